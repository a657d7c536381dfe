//! Built-in invariant suite behind the `selftest` CLI command: a scaled-down
//! sweep over the algebra identities, transform inverses, matrix structure
//! and solver-vs-oracle agreement.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::analysis::{
    check_cs_basis, check_triangular_cs, fig1_matrix, fig2_matrix, gf2_rank, matrix_mb,
};
use crate::cspat::{join_product, mobius, naive_join_product, pow3, zeta, Gf2Table};
use crate::expr::gen_random_instance;
use crate::oracle::{brute_solvable_sizes, check_representation};
use crate::pattern::{enumerate_patterns, Label, Pattern};
use crate::solver::solve;

/// One named check outcome.
pub type CheckResult = (String, bool);

fn random_table(k: u32, rng: &mut StdRng) -> Gf2Table {
    let mut t = Gf2Table::new(k);
    for i in 0..pow3(k) {
        if rng.gen_bool(0.5) {
            t.toggle(i);
        }
    }
    t
}

/// Runs the suite; `quick` trims the expensive sweeps. Returns one pass/fail
/// row per check.
pub fn run(quick: bool) -> Vec<CheckResult> {
    let mut results: Vec<CheckResult> = Vec::new();
    let mut push = |name: &str, ok: bool| results.push((name.to_string(), ok));

    // Pattern algebra over all patterns with two labels.
    let pats = enumerate_patterns(2).expect("k=2 enumeration");
    let l1 = Label(1);
    let l2 = Label(2);

    let join_neutral = pats.iter().all(|p| &p.join(&Pattern::zero()) == p);
    push("join-neutral-element", join_neutral);

    let join_commutes = pats.iter().all(|p| pats.iter().all(|q| p.join(q) == q.join(p)));
    push("join-commutative", join_commutes);

    let assoc_sample: usize = if quick { 2_000 } else { 20_000 };
    let mut rng = StdRng::seed_from_u64(0xc0ffee);
    let assoc = (0..assoc_sample).all(|_| {
        let p = &pats[rng.gen_range(0..pats.len())];
        let q = &pats[rng.gen_range(0..pats.len())];
        let r = &pats[rng.gen_range(0..pats.len())];
        p.join(q).join(r) == p.join(&q.join(r))
    });
    push("join-associative", assoc);

    let missing_singleton = pats
        .iter()
        .all(|p| pats.iter().all(|q| p.sing() & !q.lbs() == 0 || !p.consistent(q)));
    push("missing-singleton-inconsistent", missing_singleton);

    let relabel_rotate = pats.iter().all(|p| {
        pats.iter().all(|q| {
            p.relabel(l1, l2).consistent(q) == p.consistent(&q.rotate(l1, l2))
        })
    });
    push("relabel-rotate-duality", relabel_rotate);

    let fix_forget = pats.iter().all(|p| {
        pats.iter().all(|q| {
            p.consistent(q) == (p.fix(l1).consistent(q) || p.forget(l1).consistent(q))
        })
    });
    push("fix-forget-represents", fix_forget);

    let complete_rep_ok = pats.iter().all(|p| {
        let rep = p.complete_rep();
        rep.iter().all(|r| r.is_complete())
            && rep.len() <= 1 << p.inc().count_ones()
            && check_representation(&rep, &[p.clone()].into_iter().collect(), 2).unwrap()
    });
    push("complete-representation", complete_rep_ok);

    push("cs-basis-k2", check_cs_basis(2).unwrap());
    if !quick {
        push("cs-basis-k3", check_cs_basis(3).unwrap());
    }

    // Transforms.
    let mut transform_ok = true;
    let mut product_ok = true;
    for k in 1..=4u32 {
        for _ in 0..if quick { 5 } else { 25 } {
            let a = random_table(k, &mut rng);
            let b = random_table(k, &mut rng);
            transform_ok &= mobius(&zeta(&a)) == a;
            product_ok &= join_product(&a, &b).unwrap() == naive_join_product(&a, &b).unwrap();
        }
    }
    push("mobius-zeta-inverse", transform_ok);
    push("join-product-vs-naive", product_ok);

    // Matrix structure.
    let fig1 = fig1_matrix();
    push("fig1-rank-4", gf2_rank(&fig1) == 4);
    push(
        "fig2-triangular",
        fig2_matrix().to_bool_rows()
            == vec![
                vec![true, false, false],
                vec![false, true, false],
                vec![true, false, true],
            ],
    );
    push("mb-rank-16", gf2_rank(&matrix_mb(2).unwrap()) == 16);
    let tri_max = if quick { 4 } else { 5 };
    push("triangular-cs", (1..=tri_max).all(|k| check_triangular_cs(k).unwrap()));

    // Solver vs brute force on random instances.
    let instances = if quick { 4 } else { 12 };
    let mut agree = true;
    for seed in 0..instances {
        let inst = gen_random_instance(5, 2, 2, 1000 + seed).unwrap();
        let g = inst.realize_graph();
        let terms = inst.terminal_ids(&g);
        let sizes = brute_solvable_sizes(&g, &terms).unwrap();
        let brute_min = sizes.iter().copied().find(|&b| b <= inst.budget);
        let report = solve(&inst, 16, seed).unwrap();
        match report.min_size {
            Some(b) => agree &= sizes.contains(&b) && brute_min == Some(b),
            None => agree &= brute_min.is_none(),
        }
    }
    push("solver-vs-brute-force", agree);

    let det = {
        let inst = gen_random_instance(6, 3, 2, 77).unwrap();
        let a = solve(&inst, 4, 5).unwrap();
        let b = solve(&inst, 4, 5).unwrap();
        a.min_size == b.min_size && a.per_size == b.per_size
    };
    push("solver-deterministic", det);

    results
}
