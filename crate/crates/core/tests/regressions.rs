//! Pinned regressions.

use cwsteiner::expr::parse_instance;
use cwsteiner::oracle::brute_solvable_sizes;
use cwsteiner::solver::solve;

/// Found by fuzzing: v0 is isolated (the only edges form a triangle among
/// v3, v6, v8), so no Steiner tree exists at any size. An earlier version of
/// the two-label actions re-checked the fix/forget guard after erasing the
/// first label; when a detached merged member `{i,j}` degenerated to the
/// singleton `{j}`, the erase-both action kept `j` alive. That broke the
/// parity transfer into the CS basis and made the solver claim YES at size 4
/// for every seed.
#[test]
fn detached_merge_erasure_stays_dead() {
    let inst = parse_instance(
        "k 4\nterminals v0 v6 v8\nbudget 8\nexpr (join 3 2 (union (relabel 2 3 (union (intro 2 v0) (intro 1 v4))) (relabel 4 4 (union (intro 1 v2) (relabel 2 3 (union (relabel 4 2 (union (intro 4 v5) (intro 4 v1))) (join 3 4 (union (relabel 2 4 (join 1 3 (union (intro 3 v3) (join 2 1 (union (intro 1 v6) (intro 2 v8)))))) (intro 2 v7)))))))))",
    )
    .unwrap();
    let g = inst.realize_graph();
    let terms = inst.terminal_ids(&g);
    assert!(brute_solvable_sizes(&g, &terms).unwrap().is_empty());
    // The broken actions produced YES under every seed, so a few suffice.
    for seed in 0..8u64 {
        let report = solve(&inst, 2, seed).unwrap();
        assert_eq!(report.min_size, None, "false positive under seed {seed}");
    }
}
