//! Independent ground-truth implementations used to cross-check the solver:
//! brute-force Steiner search over vertex subsets, set-valued family
//! recursions over the syntax tree, and exhaustive enumeration of
//! (selection, action-sequence) pairs for parity checks.
//!
//! These paths share only the pattern algebra with the fast solver; tables,
//! encodings and convolutions are not reused.

use std::collections::{BTreeSet, HashMap};

use crate::expr::{node_count, ExprNode, Instance, LabeledGraph};
use crate::pattern::{enumerate_patterns, toggle, Pattern, PatternSet};
use crate::solver::WeightAssignment;
use crate::Error;

/// Vertex cap for subset brute force.
pub const BRUTE_VERTEX_CAP: usize = 20;

fn selection_connected(adj: &[Vec<usize>], mask: u64) -> bool {
    let n = adj.len();
    let first = match (0..n).find(|v| mask >> v & 1 != 0) {
        Some(v) => v,
        None => return true,
    };
    let mut seen = 1u64 << first;
    let mut stack = vec![first];
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if mask >> u & 1 != 0 && seen >> u & 1 == 0 {
                seen |= 1 << u;
                stack.push(u);
            }
        }
    }
    seen == mask
}

/// True iff some `S` with all terminals, exactly `b` vertices and connected
/// induced subgraph exists. Exhaustive over vertex subsets.
pub fn brute_steiner(g: &LabeledGraph, terminals: &[usize], b: usize) -> Result<bool, Error> {
    let n = g.vertex_count();
    if n > BRUTE_VERTEX_CAP {
        return Err(Error::Cap(format!("brute_steiner capped at {BRUTE_VERTEX_CAP} vertices, got {n}")));
    }
    let adj = g.adjacency();
    let term_mask: u64 = terminals.iter().fold(0, |m, &v| m | 1 << v);
    for mask in 0..(1u64 << n) {
        if mask & term_mask == term_mask
            && mask.count_ones() as usize == b
            && selection_connected(&adj, mask)
        {
            return Ok(true);
        }
    }
    Ok(false)
}

/// All sizes `b` for which a connected terminal superset of exactly `b`
/// vertices exists.
pub fn brute_solvable_sizes(
    g: &LabeledGraph,
    terminals: &[usize],
) -> Result<BTreeSet<usize>, Error> {
    let n = g.vertex_count();
    if n > BRUTE_VERTEX_CAP {
        return Err(Error::Cap(format!("brute force capped at {BRUTE_VERTEX_CAP} vertices, got {n}")));
    }
    let adj = g.adjacency();
    let term_mask: u64 = terminals.iter().fold(0, |m, &v| m | 1 << v);
    let mut sizes = BTreeSet::new();
    for mask in 0..(1u64 << n) {
        if mask & term_mask == term_mask && selection_connected(&adj, mask) {
            sizes.insert(mask.count_ones() as usize);
        }
    }
    Ok(sizes)
}

/// All `(size, weight)` pairs of connected terminal supersets.
pub fn brute_solution_stats(
    g: &LabeledGraph,
    terminals: &[usize],
    wa: &WeightAssignment,
) -> Result<BTreeSet<(usize, u64)>, Error> {
    let n = g.vertex_count();
    if n > BRUTE_VERTEX_CAP {
        return Err(Error::Cap(format!("brute force capped at {BRUTE_VERTEX_CAP} vertices, got {n}")));
    }
    let adj = g.adjacency();
    let term_mask: u64 = terminals.iter().fold(0, |m, &v| m | 1 << v);
    let mut stats = BTreeSet::new();
    for mask in 0..(1u64 << n) {
        if mask & term_mask == term_mask && selection_connected(&adj, mask) {
            let weight: u64 =
                (0..n).filter(|v| mask >> v & 1 != 0).map(|v| wa.vertex_weight(v)).sum();
            stats.insert((mask.count_ones() as usize, weight));
        }
    }
    Ok(stats)
}

/// Set-valued families keyed by `(size, weight)`, one map per node id.
pub struct SolFamilies {
    pub by_node: Vec<HashMap<(u32, u64), PatternSet>>,
}

impl SolFamilies {
    pub fn root(&self) -> &HashMap<(u32, u64), PatternSet> {
        self.by_node.last().expect("nonempty tree")
    }
}

/// Set-valued families keyed by `(size, weight, action-weight)` per node id.
pub struct BasFamilies {
    pub by_node: Vec<HashMap<(u32, u64, u64), PatternSet>>,
}

impl BasFamilies {
    pub fn root(&self) -> &HashMap<(u32, u64, u64), PatternSet> {
        self.by_node.last().expect("nonempty tree")
    }
}

const FAMILY_VERTEX_CAP: usize = 10;
const FAMILY_K_CAP: u32 = 3;

fn family_caps(instance: &Instance) -> Result<(), Error> {
    let n = node_count(&instance.expr).introduce;
    if n > FAMILY_VERTEX_CAP || instance.k > FAMILY_K_CAP {
        return Err(Error::Cap(format!(
            "family oracles capped at n <= {FAMILY_VERTEX_CAP}, k <= {FAMILY_K_CAP}"
        )));
    }
    Ok(())
}

struct OracleCtx<'a> {
    graph: LabeledGraph,
    terminals: Vec<usize>,
    v0: usize,
    wa: &'a WeightAssignment,
}

impl<'a> OracleCtx<'a> {
    fn new(instance: &Instance, wa: &'a WeightAssignment) -> OracleCtx<'a> {
        let graph = instance.realize_graph();
        let terminals = instance.terminal_ids(&graph);
        let v0 = terminals[0];
        OracleCtx { graph, terminals, v0, wa }
    }

    fn leaf_pattern(&self, label: crate::pattern::Label, vid: usize) -> Pattern {
        if vid == self.v0 {
            Pattern::new([1 | label.bit()]).unwrap()
        } else {
            Pattern::new([1, label.bit()]).unwrap()
        }
    }
}

/// Families of patterns of partial solutions, built by the recursive
/// formulas over the syntax tree (set semantics).
pub fn naive_sol_families(
    instance: &Instance,
    wa: &WeightAssignment,
) -> Result<SolFamilies, Error> {
    family_caps(instance)?;
    let ctx = OracleCtx::new(instance, wa);
    let budget = instance.budget as u32;
    let mut by_node: Vec<HashMap<(u32, u64), PatternSet>> = Vec::new();

    fn eval(
        ctx: &OracleCtx,
        node: &ExprNode,
        budget: u32,
        by_node: &mut Vec<HashMap<(u32, u64), PatternSet>>,
    ) -> usize {
        let fam: HashMap<(u32, u64), PatternSet> = match node {
            ExprNode::Introduce { label, name } => {
                let vid = ctx.graph.id_of(name).unwrap();
                let mut fam = HashMap::new();
                if !ctx.terminals.contains(&vid) {
                    fam.insert((0, 0), [Pattern::zero()].into_iter().collect());
                }
                if budget >= 1 {
                    fam.insert(
                        (1, ctx.wa.vertex_weight(vid)),
                        [ctx.leaf_pattern(*label, vid)].into_iter().collect(),
                    );
                }
                by_node.push(fam);
                return by_node.len() - 1;
            }
            ExprNode::Union { left, right } => {
                let li = eval(ctx, left, budget, by_node);
                let ri = eval(ctx, right, budget, by_node);
                let mut fam: HashMap<(u32, u64), PatternSet> = HashMap::new();
                for ((b1, c1), ps1) in &by_node[li] {
                    for ((b2, c2), ps2) in &by_node[ri] {
                        if b1 + b2 > budget {
                            continue;
                        }
                        let slot = fam.entry((b1 + b2, c1 + c2)).or_default();
                        for p1 in ps1 {
                            for p2 in ps2 {
                                slot.insert(p1.union_pat(p2));
                            }
                        }
                    }
                }
                fam
            }
            ExprNode::Relabel { from, to, child } => {
                let ci = eval(ctx, child, budget, by_node);
                by_node[ci]
                    .iter()
                    .map(|(key, ps)| {
                        (*key, ps.iter().map(|p| p.relabel(*from, *to)).collect())
                    })
                    .collect()
            }
            ExprNode::Join { i, j, child } => {
                let ci = eval(ctx, child, budget, by_node);
                by_node[ci]
                    .iter()
                    .map(|(key, ps)| (*key, ps.iter().map(|p| p.patadd(*i, *j)).collect()))
                    .collect()
            }
        };
        by_node.push(fam);
        by_node.len() - 1
    }

    eval(&ctx, &instance.expr, budget, &mut by_node);
    Ok(SolFamilies { by_node })
}

/// Families of complete representative patterns (set semantics, with the
/// complete-representation expansion at join nodes).
pub fn naive_rep_families(
    instance: &Instance,
    wa: &WeightAssignment,
) -> Result<SolFamilies, Error> {
    family_caps(instance)?;
    let ctx = OracleCtx::new(instance, wa);
    let budget = instance.budget as u32;
    let mut by_node: Vec<HashMap<(u32, u64), PatternSet>> = Vec::new();

    fn eval(
        ctx: &OracleCtx,
        node: &ExprNode,
        budget: u32,
        by_node: &mut Vec<HashMap<(u32, u64), PatternSet>>,
    ) -> usize {
        let fam: HashMap<(u32, u64), PatternSet> = match node {
            ExprNode::Introduce { label, name } => {
                let vid = ctx.graph.id_of(name).unwrap();
                let mut fam: HashMap<(u32, u64), PatternSet> = HashMap::new();
                if !ctx.terminals.contains(&vid) {
                    fam.insert((0, 0), [Pattern::zero()].into_iter().collect());
                }
                if budget >= 1 {
                    fam.insert(
                        (1, ctx.wa.vertex_weight(vid)),
                        ctx.leaf_pattern(*label, vid).complete_rep(),
                    );
                }
                by_node.push(fam);
                return by_node.len() - 1;
            }
            ExprNode::Union { left, right } => {
                let li = eval(ctx, left, budget, by_node);
                let ri = eval(ctx, right, budget, by_node);
                let mut fam: HashMap<(u32, u64), PatternSet> = HashMap::new();
                for ((b1, c1), ps1) in &by_node[li] {
                    for ((b2, c2), ps2) in &by_node[ri] {
                        if b1 + b2 > budget {
                            continue;
                        }
                        let slot = fam.entry((b1 + b2, c1 + c2)).or_default();
                        for p1 in ps1 {
                            for p2 in ps2 {
                                slot.insert(p1.union_pat(p2));
                            }
                        }
                    }
                }
                fam
            }
            ExprNode::Relabel { from, to, child } => {
                let ci = eval(ctx, child, budget, by_node);
                by_node[ci]
                    .iter()
                    .map(|(key, ps)| {
                        (*key, ps.iter().map(|p| p.relabel(*from, *to)).collect())
                    })
                    .collect()
            }
            ExprNode::Join { i, j, child } => {
                let ci = eval(ctx, child, budget, by_node);
                by_node[ci]
                    .iter()
                    .map(|(key, ps)| {
                        let expanded: PatternSet = ps
                            .iter()
                            .flat_map(|p| p.patadd(*i, *j).complete_rep())
                            .collect();
                        (*key, expanded)
                    })
                    .collect()
            }
        };
        by_node.push(fam);
        by_node.len() - 1
    }

    eval(&ctx, &instance.expr, budget, &mut by_node);
    Ok(SolFamilies { by_node })
}

/// Families of CS-patterns under symmetric-difference semantics, evaluated
/// set-wise per node; the fast solver's tables must agree bit for bit.
pub fn naive_bas_families(
    instance: &Instance,
    wa: &WeightAssignment,
) -> Result<BasFamilies, Error> {
    family_caps(instance)?;
    let ctx = OracleCtx::new(instance, wa);
    let budget = instance.budget as u32;
    let mut by_node: Vec<HashMap<(u32, u64, u64), PatternSet>> = Vec::new();

    fn eval(
        ctx: &OracleCtx,
        node: &ExprNode,
        budget: u32,
        by_node: &mut Vec<HashMap<(u32, u64, u64), PatternSet>>,
        next_id: &mut usize,
    ) -> Result<usize, Error> {
        let fam: HashMap<(u32, u64, u64), PatternSet> = match node {
            ExprNode::Introduce { label, name } => {
                let node_id = *next_id;
                *next_id += 1;
                let vid = ctx.graph.id_of(name).unwrap();
                let mut fam: HashMap<(u32, u64, u64), PatternSet> = HashMap::new();
                if !ctx.terminals.contains(&vid) {
                    fam.insert((0, 0, 0), [Pattern::zero()].into_iter().collect());
                }
                if budget >= 1 {
                    let p = ctx.leaf_pattern(*label, vid);
                    for ell in 1..=2u32 {
                        let acted = p.action(ell).unwrap();
                        let key =
                            (1, ctx.wa.vertex_weight(vid), ctx.wa.action_weight(node_id, ell));
                        let slot = fam.entry(key).or_default();
                        toggle(slot, acted);
                        if slot.is_empty() {
                            fam.remove(&key);
                        }
                    }
                }
                by_node.push(fam);
                return Ok(by_node.len() - 1);
            }
            ExprNode::Union { left, right } => {
                let li = eval(ctx, left, budget, by_node, next_id)?;
                let ri = eval(ctx, right, budget, by_node, next_id)?;
                *next_id += 1;
                let mut fam: HashMap<(u32, u64, u64), PatternSet> = HashMap::new();
                for ((b1, c1, d1), ps1) in &by_node[li] {
                    for ((b2, c2, d2), ps2) in &by_node[ri] {
                        if b1 + b2 > budget {
                            continue;
                        }
                        let slot = fam.entry((b1 + b2, c1 + c2, d1 + d2)).or_default();
                        for p1 in ps1 {
                            for p2 in ps2 {
                                toggle(slot, p1.union_pat(p2));
                            }
                        }
                    }
                }
                fam.retain(|_, ps| !ps.is_empty());
                fam
            }
            ExprNode::Relabel { from, to, child } => {
                let ci = eval(ctx, child, budget, by_node, next_id)?;
                *next_id += 1;
                let mut fam: HashMap<(u32, u64, u64), PatternSet> = HashMap::new();
                for (key, ps) in &by_node[ci] {
                    let slot = fam.entry(*key).or_default();
                    for p in ps {
                        toggle(slot, p.relabel(*from, *to));
                    }
                }
                fam.retain(|_, ps| !ps.is_empty());
                fam
            }
            ExprNode::Join { i, j, child } => {
                let ci = eval(ctx, child, budget, by_node, next_id)?;
                let node_id = *next_id;
                *next_id += 1;
                // First the exclusive merge, then the actions with their
                // weight shifts and CS flattening.
                let mut merged: HashMap<(u32, u64, u64), PatternSet> = HashMap::new();
                for (key, ps) in &by_node[ci] {
                    let slot = merged.entry(*key).or_default();
                    for p in ps {
                        toggle(slot, p.patadd(*i, *j));
                    }
                }
                let mut fam: HashMap<(u32, u64, u64), PatternSet> = HashMap::new();
                for ((b, c, d), ps) in &merged {
                    for ell in 1..=4u32 {
                        let key = (*b, *c, *d + ctx.wa.action_weight(node_id, ell));
                        for p in ps {
                            let acted = p.action(ell).expect("merged patterns have actions");
                            let slot = fam.entry(key).or_default();
                            for r in acted.parity_rep()? {
                                toggle(slot, r);
                            }
                        }
                    }
                }
                fam.retain(|_, ps| !ps.is_empty());
                fam
            }
        };
        by_node.push(fam);
        Ok(by_node.len() - 1)
    }

    let mut next_id = 0;
    eval(&ctx, &instance.expr, budget, &mut by_node, &mut next_id)?;
    Ok(BasFamilies { by_node })
}

const DREP_VERTEX_CAP: usize = 6;
const DREP_NODE_CAP: usize = 12;

/// Root families counted by explicit enumeration of (selection, action
/// sequence) pairs: for each key the set of complete patterns generated an
/// odd number of times.
pub fn naive_drep_tables(
    instance: &Instance,
    wa: &WeightAssignment,
) -> Result<HashMap<(u32, u64, u64), PatternSet>, Error> {
    let counts = node_count(&instance.expr);
    if counts.introduce > DREP_VERTEX_CAP || counts.total() > DREP_NODE_CAP {
        return Err(Error::Cap(format!(
            "drep enumeration capped at n <= {DREP_VERTEX_CAP}, nodes <= {DREP_NODE_CAP}"
        )));
    }
    let ctx = OracleCtx::new(instance, wa);
    let n = ctx.graph.vertex_count();
    let term_mask: u64 = ctx.terminals.iter().fold(0, |m, &v| m | 1 << v);

    // All (pattern, action-weight) outcomes over the subtree for a fixed
    // selection, with multiplicity.
    fn outcomes(
        ctx: &OracleCtx,
        node: &ExprNode,
        sel: u64,
        next_id: &mut usize,
    ) -> Vec<(Pattern, u64)> {
        match node {
            ExprNode::Introduce { label, name } => {
                let node_id = *next_id;
                *next_id += 1;
                let vid = ctx.graph.id_of(name).unwrap();
                if sel >> vid & 1 == 0 {
                    vec![(Pattern::zero(), 0)]
                } else {
                    let p = ctx.leaf_pattern(*label, vid);
                    (1..=2u32)
                        .map(|ell| {
                            (p.action(ell).unwrap(), ctx.wa.action_weight(node_id, ell))
                        })
                        .collect()
                }
            }
            ExprNode::Union { left, right } => {
                let lo = outcomes(ctx, left, sel, next_id);
                let ro = outcomes(ctx, right, sel, next_id);
                *next_id += 1;
                let mut out = Vec::with_capacity(lo.len() * ro.len());
                for (p1, d1) in &lo {
                    for (p2, d2) in &ro {
                        out.push((p1.union_pat(p2), d1 + d2));
                    }
                }
                out
            }
            ExprNode::Relabel { from, to, child } => {
                let co = outcomes(ctx, child, sel, next_id);
                *next_id += 1;
                co.into_iter().map(|(p, d)| (p.relabel(*from, *to), d)).collect()
            }
            ExprNode::Join { i, j, child } => {
                let co = outcomes(ctx, child, sel, next_id);
                let node_id = *next_id;
                *next_id += 1;
                let mut out = Vec::with_capacity(co.len() * 4);
                for (p, d) in &co {
                    let q = p.patadd(*i, *j);
                    for ell in 1..=4u32 {
                        out.push((
                            q.action(ell).expect("merged patterns have actions"),
                            d + ctx.wa.action_weight(node_id, ell),
                        ));
                    }
                }
                out
            }
        }
    }

    let mut tables: HashMap<(u32, u64, u64), PatternSet> = HashMap::new();
    for sel in 0..(1u64 << n) {
        if sel & term_mask != term_mask {
            continue;
        }
        let b = sel.count_ones();
        if b as usize > instance.budget {
            continue;
        }
        let c: u64 = (0..n).filter(|v| sel >> v & 1 != 0).map(|v| ctx.wa.vertex_weight(v)).sum();
        let mut next_id = 0;
        for (p, d) in outcomes(&ctx, &instance.expr, sel, &mut next_id) {
            let slot = tables.entry((b, c, d)).or_default();
            toggle(slot, p);
        }
    }
    tables.retain(|_, ps| !ps.is_empty());
    Ok(tables)
}

/// Parity of (selection, action-sequence) pairs with the given statistics
/// generating pattern `p` at the root.
pub fn naive_drep_parity(
    instance: &Instance,
    wa: &WeightAssignment,
    b: u32,
    c: u64,
    d: u64,
    p: &Pattern,
) -> Result<bool, Error> {
    let tables = naive_drep_tables(instance, wa)?;
    Ok(tables.get(&(b, c, d)).is_some_and(|ps| ps.contains(p)))
}

/// Representation check: both families are consistent with exactly the same
/// partner patterns over `[k]`.
pub fn check_representation(
    rep: &PatternSet,
    sol: &PatternSet,
    k: u32,
) -> Result<bool, Error> {
    for q in enumerate_patterns(k)? {
        let s = sol.iter().any(|p| p.consistent(&q));
        let r = rep.iter().any(|p| p.consistent(&q));
        if s != r {
            return Ok(false);
        }
    }
    Ok(true)
}
