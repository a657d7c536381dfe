//! Connectivity patterns: families of label-sets over `{0, 1, ..., k}` with
//! exactly one member containing the element 0 (the zero-set).
//!
//! A pattern records which labels each connected component of a partial
//! solution touches; the zero-set tracks the component of the fixed terminal.
//! This module implements the pattern algebra (join, relabel, union, the
//! join-node effect `patadd`, fix/forget, actions) together with complete
//! representations, parity-representations into CS-patterns, and brute-force
//! enumerations used by the analysis and test oracles.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::expr::LabeledGraph;
use crate::Error;

/// A graph label in `1..=k`. The element 0 is reserved for the zero-set
/// marker and is never a `Label`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Label(pub u32);

impl Label {
    /// Bit position of this label inside a member-set mask.
    pub fn bit(self) -> Mask {
        debug_assert!(self.0 >= 1 && self.0 < 32);
        1 << self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A member set encoded as a bit mask: bit 0 is the element 0, bit `i` is
/// label `i`. The empty set is the mask 0.
pub type Mask = u32;

/// Bit 0 alone, i.e. the member set `{0}`.
pub const ZERO_ONLY: Mask = 1;

/// Iterates the labels (bits >= 1) present in a mask.
pub fn labels_of(mask: Mask) -> impl Iterator<Item = u32> {
    let mut m = mask & !1;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros();
            m &= m - 1;
            Some(i)
        }
    })
}

/// A pattern: canonical (sorted, deduplicated) collection of member masks
/// with exactly one member containing bit 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    members: Vec<Mask>,
}

/// Deduplicated collection of patterns, ordered canonically.
pub type PatternSet = BTreeSet<Pattern>;

/// XOR-toggles membership of `p` in `set`.
pub fn toggle(set: &mut PatternSet, p: Pattern) {
    if !set.remove(&p) {
        set.insert(p);
    }
}

fn canonicalize(mut members: Vec<Mask>) -> Vec<Mask> {
    members.sort_unstable();
    members.dedup();
    members
}

impl Pattern {
    /// Builds a pattern from member masks, canonicalizing the collection.
    /// Fails unless exactly one member contains the element 0.
    pub fn new(members: impl IntoIterator<Item = Mask>) -> Result<Pattern, Error> {
        let members = canonicalize(members.into_iter().collect());
        let zeros = members.iter().filter(|m| *m & 1 != 0).count();
        if zeros != 1 {
            return Err(Error::Pattern(format!(
                "pattern must have exactly one zero-set, found {zeros}"
            )));
        }
        Ok(Pattern { members })
    }

    fn from_canonical(members: Vec<Mask>) -> Pattern {
        debug_assert_eq!(members.iter().filter(|m| *m & 1 != 0).count(), 1);
        Pattern { members }
    }

    /// The pattern `[0]`.
    pub fn zero() -> Pattern {
        Pattern { members: vec![ZERO_ONLY] }
    }

    /// The pattern `[ij]`, i.e. `{{0}, {i, j}}`.
    pub fn edge(i: Label, j: Label) -> Pattern {
        Pattern::from_canonical(canonicalize(vec![ZERO_ONLY, i.bit() | j.bit()]))
    }

    pub fn members(&self) -> &[Mask] {
        &self.members
    }

    /// The unique member containing the element 0.
    pub fn zero_set(&self) -> Mask {
        *self.members.iter().find(|m| *m & 1 != 0).unwrap()
    }

    /// All labels occurring in the pattern, as a mask (bit 0 cleared).
    pub fn lbs(&self) -> Mask {
        self.members.iter().fold(0, |acc, m| acc | m) & !1
    }

    /// Labels occurring as singleton members, as a mask.
    pub fn sing(&self) -> Mask {
        self.members
            .iter()
            .filter(|m| m.count_ones() == 1 && **m != ZERO_ONLY)
            .fold(0, |acc, m| acc | m)
    }

    /// Labels occurring but not as singletons: `lbs \ sing`.
    pub fn inc(&self) -> Mask {
        self.lbs() & !self.sing()
    }

    /// True if every occurring label also occurs as a singleton.
    pub fn is_complete(&self) -> bool {
        self.inc() == 0
    }

    /// True if the pattern consists of a zero-set and singletons only.
    pub fn is_cs(&self) -> bool {
        self.members
            .iter()
            .all(|m| *m & 1 != 0 || m.count_ones() == 1)
            && self.zero_set() & !1 & !self.sing() == 0
    }

    /// Join: unions of the equivalence classes of the closure of the pairwise
    /// intersection relation between members of `self` and members of `other`.
    pub fn join(&self, other: &Pattern) -> Pattern {
        let np = self.members.len();
        let nq = other.members.len();
        let mut uf = UnionFind::new(np + nq);
        for (a, &ma) in self.members.iter().enumerate() {
            for (b, &mb) in other.members.iter().enumerate() {
                if ma & mb != 0 {
                    uf.union(a, np + b);
                }
            }
        }
        let mut acc: Vec<Mask> = vec![0; np + nq];
        let mut seen: Vec<bool> = vec![false; np + nq];
        for (idx, &m) in self.members.iter().chain(other.members.iter()).enumerate() {
            let r = uf.find(idx);
            acc[r] |= m;
            seen[r] = true;
        }
        let members: Vec<Mask> = (0..np + nq).filter(|&r| seen[r]).map(|r| acc[r]).collect();
        Pattern::from_canonical(canonicalize(members))
    }

    /// True iff the join of the two patterns collapses to a single set.
    pub fn consistent(&self, other: &Pattern) -> bool {
        self.join(other).members.len() == 1
    }

    /// Replaces label `i` by label `j` in every member.
    pub fn relabel(&self, i: Label, j: Label) -> Pattern {
        let members = self
            .members
            .iter()
            .map(|&m| if m & i.bit() != 0 { (m & !i.bit()) | j.bit() } else { m })
            .collect();
        Pattern::from_canonical(canonicalize(members))
    }

    /// Union: keeps all non-zero members of both patterns and merges the two
    /// zero-sets.
    pub fn union_pat(&self, other: &Pattern) -> Pattern {
        let zp = self.zero_set();
        let zq = other.zero_set();
        let mut members: Vec<Mask> = self
            .members
            .iter()
            .chain(other.members.iter())
            .copied()
            .filter(|m| m & 1 == 0)
            .collect();
        members.push(zp | zq);
        Pattern::from_canonical(canonicalize(members))
    }

    /// Effect of a join node on labels `i, j`: merges all members touching
    /// `i` or `j` into one set, provided both labels occur.
    pub fn patadd(&self, i: Label, j: Label) -> Pattern {
        let need = i.bit() | j.bit();
        if self.lbs() & need != need {
            self.clone()
        } else {
            self.join(&Pattern::edge(i, j))
        }
    }

    /// Removes label `i` from all members, then adds `i` to every member
    /// containing label `j`.
    pub fn rotate(&self, i: Label, j: Label) -> Pattern {
        let members = self
            .members
            .iter()
            .map(|&m| {
                let m = m & !i.bit();
                if m & j.bit() != 0 {
                    m | i.bit()
                } else {
                    m
                }
            })
            .collect();
        Pattern::from_canonical(canonicalize(members))
    }

    /// Adds label `i` as a singleton if `i` occurs but not as a singleton;
    /// identity otherwise.
    pub fn fix(&self, i: Label) -> Pattern {
        if self.inc() & i.bit() == 0 {
            return self.clone();
        }
        let mut members = self.members.clone();
        members.push(i.bit());
        Pattern::from_canonical(canonicalize(members))
    }

    /// Removes label `i` from every member if `i` occurs but not as a
    /// singleton; identity otherwise.
    pub fn forget(&self, i: Label) -> Pattern {
        if self.inc() & i.bit() == 0 {
            return self.clone();
        }
        let members = self.members.iter().map(|&m| m & !i.bit()).collect();
        Pattern::from_canonical(canonicalize(members))
    }

    /// Complete representation: branches into forget/fix for each incomplete
    /// label in increasing order. Contains complete patterns only, at most
    /// `2^|inc|` of them.
    pub fn complete_rep(&self) -> PatternSet {
        let mut cur: PatternSet = BTreeSet::new();
        cur.insert(self.clone());
        for i in labels_of(self.inc()) {
            let lab = Label(i);
            let mut next = BTreeSet::new();
            for q in &cur {
                next.insert(q.forget(lab));
                next.insert(q.fix(lab));
            }
            cur = next;
        }
        cur
    }

    /// The four fix/forget combinations applied after a join node.
    ///
    /// Identity for complete patterns (all `ell`); for a single incomplete
    /// label only `ell` 1 (fix) and 2 (forget) are defined; for two
    /// incomplete labels `i < j`, `ell` chooses per label between keeping it
    /// as a singleton (1: both, 2: only `i`, 3: only `j`) and erasing it from
    /// every member (4: both). `None` otherwise.
    ///
    /// Erasure is unconditional: under `ell` in {2,4} the result never
    /// contains `j`, under `ell` in {3,4} never `i`, even when the erased
    /// member degenerates to a singleton or the empty set along the way. The
    /// counting layers rely on this uniformity; re-checking the fix/forget
    /// guard after the first label would keep `j` alive exactly when the
    /// merged member was `{i,j}` and silently break the parity transfer into
    /// the CS basis.
    pub fn action(&self, ell: u32) -> Option<Pattern> {
        if !(1..=4).contains(&ell) {
            return None;
        }
        let inc = self.inc();
        match inc.count_ones() {
            0 => Some(self.clone()),
            1 => {
                let i = Label(inc.trailing_zeros());
                match ell {
                    1 => Some(self.fix(i)),
                    2 => Some(self.forget(i)),
                    _ => None,
                }
            }
            2 => {
                let i = Label(inc.trailing_zeros());
                let j = Label(31 - inc.leading_zeros());
                let keep_i = ell == 1 || ell == 2;
                let keep_j = ell == 1 || ell == 3;
                let strip =
                    if keep_i { 0 } else { i.bit() } | if keep_j { 0 } else { j.bit() };
                let mut members: Vec<Mask> =
                    self.members.iter().map(|&m| m & !strip).collect();
                if keep_i {
                    members.push(i.bit());
                }
                if keep_j {
                    members.push(j.bit());
                }
                Some(Pattern::from_canonical(canonicalize(members)))
            }
            _ => None,
        }
    }

    /// One elimination step of the parity-representation: replaces the member
    /// `s` (a non-zero member of size >= 2, inclusion-wise minimal among such
    /// members) by all patterns obtained from extending the zero-set with a
    /// proper subset of `s`. Patterns produced an even number of times cancel.
    pub fn parity_rep_step(&self, s: Mask) -> Result<PatternSet, Error> {
        if !self.is_complete() {
            return Err(Error::Pattern("parity_rep_step requires a complete pattern".into()));
        }
        if s & 1 != 0 || s.count_ones() < 2 || !self.members.contains(&s) {
            return Err(Error::Pattern(
                "parity_rep_step requires a non-zero member of size >= 2".into(),
            ));
        }
        if self
            .members
            .iter()
            .any(|&m| m & 1 == 0 && m.count_ones() >= 2 && m != s && m & s == m)
        {
            return Err(Error::Pattern(
                "parity_rep_step member must be inclusion-wise minimal".into(),
            ));
        }
        let z = self.zero_set();
        let base: Vec<Mask> = self
            .members
            .iter()
            .copied()
            .filter(|&m| m != z && m != s)
            .collect();
        let mut out = BTreeSet::new();
        // Iterate the proper subsets of s.
        let mut sub: Mask = s;
        loop {
            sub = (sub.wrapping_sub(1)) & s;
            let mut members = base.clone();
            members.push(z | sub);
            toggle(&mut out, Pattern::from_canonical(canonicalize(members)));
            if sub == 0 {
                break;
            }
        }
        Ok(out)
    }

    /// Parity-representation into CS-patterns: eliminates every non-zero
    /// member of size >= 2 in increasing mask order, combining step results
    /// by symmetric difference. A pattern containing the empty member is
    /// consistent with nothing and is represented by the empty set.
    pub fn parity_rep(&self) -> Result<PatternSet, Error> {
        if !self.is_complete() {
            return Err(Error::Pattern("parity_rep requires a complete pattern".into()));
        }
        if self.members.contains(&0) {
            return Ok(BTreeSet::new());
        }
        let oversized: Vec<Mask> = self
            .members
            .iter()
            .copied()
            .filter(|&m| m & 1 == 0 && m.count_ones() >= 2)
            .collect();
        let mut cur: PatternSet = BTreeSet::new();
        cur.insert(self.clone());
        for s in oversized {
            let mut next = BTreeSet::new();
            for q in &cur {
                for r in q.parity_rep_step(s)? {
                    toggle(&mut next, r);
                }
            }
            cur = next;
        }
        Ok(cur)
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (idx, &m) in self.members.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            if m == 0 {
                write!(f, "e")?;
            } else {
                for b in 0..32 {
                    if m & (1 << b) != 0 {
                        if b < 10 {
                            write!(f, "{b}")?;
                        } else {
                            write!(f, "({b})")?;
                        }
                    }
                }
            }
        }
        write!(f, "]")
    }
}

impl FromStr for Pattern {
    type Err = Error;

    /// Parses the bracket notation: `[01,2]` is `{{0,1},{2}}`, `e` denotes
    /// the empty member, and the `{0}` member may be omitted.
    fn from_str(s: &str) -> Result<Pattern, Error> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Pattern(format!("pattern must be bracketed: {s:?}")))?;
        let mut members: Vec<Mask> = Vec::new();
        if !inner.trim().is_empty() {
            for group in inner.split(',') {
                let group = group.trim();
                if group == "e" {
                    members.push(0);
                    continue;
                }
                let mut m: Mask = 0;
                for ch in group.chars() {
                    match ch.to_digit(10) {
                        Some(d) => m |= 1 << d,
                        None => {
                            return Err(Error::Pattern(format!(
                                "invalid symbol {ch:?} in pattern {s:?}"
                            )))
                        }
                    }
                }
                members.push(m);
            }
        }
        if !members.iter().any(|m| m & 1 != 0) {
            members.push(ZERO_ONLY);
        }
        Pattern::new(members)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Default cap for full pattern enumerations; `2^(2^k) * 2^k` grows violently.
pub const FULL_ENUM_CAP: u32 = 4;
/// Cap for CS-pattern enumeration (`3^k` patterns).
pub const CS_ENUM_CAP: u32 = 14;

/// All patterns over labels `1..=k`: every family of 0-free subsets combined
/// with every choice of zero-set. `2^(2^k) * 2^k` patterns.
pub fn enumerate_patterns(k: u32) -> Result<Vec<Pattern>, Error> {
    if k > FULL_ENUM_CAP {
        return Err(Error::Cap(format!("enumerate_patterns capped at k <= {FULL_ENUM_CAP}, got {k}")));
    }
    let nsub = 1usize << k; // subsets of [k]
    let mut out = Vec::with_capacity((1usize << nsub) << k);
    for zsub in 0..(1u32 << k) {
        let zmask = (zsub << 1) | 1;
        for fam in 0..(1u64 << nsub) {
            let mut members: Vec<Mask> = vec![zmask];
            for idx in 0..nsub {
                if fam & (1 << idx) != 0 {
                    members.push((idx as Mask) << 1);
                }
            }
            out.push(Pattern::from_canonical(canonicalize(members)));
        }
    }
    Ok(out)
}

/// All complete patterns over labels `1..=k`: for each singleton set `Y`,
/// each zero-set inside `Y` and each family of extra members (subsets of `Y`
/// of size >= 2, or the empty set).
pub fn enumerate_complete(k: u32) -> Result<Vec<Pattern>, Error> {
    if k > FULL_ENUM_CAP {
        return Err(Error::Cap(format!("enumerate_complete capped at k <= {FULL_ENUM_CAP}, got {k}")));
    }
    let mut out = Vec::new();
    for ysub in 0..(1u32 << k) {
        let y_labels: Vec<u32> = (0..k).filter(|b| ysub & (1 << b) != 0).collect();
        // Candidate extra members: the empty set plus subsets of Y of size >= 2.
        let mut extras: Vec<Mask> = vec![0];
        let mut sub = ysub;
        loop {
            if sub.count_ones() >= 2 {
                extras.push(sub << 1);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & ysub;
        }
        for zsub_idx in 0..(1u32 << y_labels.len()) {
            let mut zmask: Mask = 1;
            for (pos, &lab) in y_labels.iter().enumerate() {
                if zsub_idx & (1 << pos) != 0 {
                    zmask |= 1 << (lab + 1);
                }
            }
            for fam in 0..(1u64 << extras.len()) {
                let mut members: Vec<Mask> = vec![zmask];
                for (pos, &ex) in extras.iter().enumerate() {
                    if fam & (1 << pos) != 0 {
                        members.push(ex);
                    }
                }
                for &lab in &y_labels {
                    members.push(1 << (lab + 1));
                }
                out.push(Pattern::from_canonical(canonicalize(members)));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// All CS-patterns over labels `1..=k`: a zero-set `X ∪ {0}` plus singletons
/// for every label of `Y`, for `X ⊆ Y ⊆ [k]`. Exactly `3^k` patterns.
pub fn enumerate_cs(k: u32) -> Result<Vec<Pattern>, Error> {
    if k > CS_ENUM_CAP {
        return Err(Error::Cap(format!("enumerate_cs capped at k <= {CS_ENUM_CAP}, got {k}")));
    }
    let mut out = Vec::new();
    for ysub in 0..(1u32 << k) {
        let mut xsub = ysub;
        loop {
            let mut members: Vec<Mask> = vec![(xsub << 1) | 1];
            for b in 0..k {
                if ysub & (1 << b) != 0 {
                    members.push(1 << (b + 1));
                }
            }
            out.push(Pattern::from_canonical(canonicalize(members)));
            if xsub == 0 {
                break;
            }
            xsub = (xsub - 1) & ysub;
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Brute-force domination test: `p` dominates `q` iff every pattern over
/// `[k]` consistent with `q` is consistent with `p`. Test oracle only.
pub fn dominates(p: &Pattern, q: &Pattern, k: u32) -> Result<bool, Error> {
    for r in enumerate_patterns(k)? {
        if q.consistent(&r) && !p.consistent(&r) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The pattern of a vertex selection `s` in `g`: one member per connected
/// component of `g[s]` holding the labels it touches; 0 joins the component
/// of `v0`, or forms the singleton `{0}` when `v0` is not selected.
pub fn pattern_of_solution(g: &LabeledGraph, s: &BTreeSet<usize>, v0: usize) -> Pattern {
    let ids: Vec<usize> = s.iter().copied().collect();
    let pos: std::collections::HashMap<usize, usize> =
        ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(ids.len());
    for &(u, v) in g.edges() {
        if let (Some(&a), Some(&b)) = (pos.get(&u), pos.get(&v)) {
            uf.union(a, b);
        }
    }
    let mut comp: std::collections::HashMap<usize, Mask> = std::collections::HashMap::new();
    for (i, &v) in ids.iter().enumerate() {
        let root = uf.find(i);
        *comp.entry(root).or_insert(0) |= g.label_of(v).bit();
    }
    let mut members: Vec<Mask> = Vec::new();
    if let Some(&pv0) = pos.get(&v0) {
        let r0 = uf.find(pv0);
        for (&root, &mask) in &comp {
            members.push(if root == r0 { mask | 1 } else { mask });
        }
    } else {
        members.push(ZERO_ONLY);
        members.extend(comp.values().copied());
    }
    Pattern::from_canonical(canonicalize(members))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn accessors() {
        assert_eq!(pat("[0]").lbs(), 0);
        assert_eq!(pat("[0]").sing(), 0);
        assert_eq!(pat("[0]").inc(), 0);
        let p = pat("[01,2]");
        assert_eq!(p.lbs(), 0b110);
        assert_eq!(p.sing(), 0b100);
        assert_eq!(p.inc(), 0b010);
        let p = pat("[0,1,12]");
        assert_eq!(p.lbs(), 0b110);
        assert_eq!(p.sing(), 0b010);
        assert_eq!(p.inc(), 0b100);
    }

    #[test]
    fn zero_set_must_be_unique() {
        assert!(Pattern::new([0b1, 0b11]).is_err());
        assert!(Pattern::new([0b10, 0b100]).is_err());
        assert!(Pattern::new([0b1]).is_ok());
    }

    #[test]
    fn join_examples() {
        for p in ["[0]", "[01,2]", "[0,1,12]", "[012,e]"] {
            let p = pat(p);
            assert_eq!(p.join(&Pattern::zero()), p, "p join [0] = p");
        }
        assert_eq!(pat("[0,1]").join(&pat("[01]")), pat("[01]"));
        assert_eq!(pat("[01,2]").join(&pat("[12,0]")), pat("[012]"));
    }

    #[test]
    fn relabel_examples() {
        assert_eq!(pat("[0,1]").relabel(Label(1), Label(2)), pat("[0,2]"));
        assert_eq!(pat("[0,1,2]").relabel(Label(1), Label(2)), pat("[0,2]"));
        let p = pat("[0,2]");
        assert_eq!(p.relabel(Label(1), Label(3)), p);
    }

    #[test]
    fn union_examples() {
        assert_eq!(Pattern::zero().union_pat(&Pattern::zero()), Pattern::zero());
        assert_eq!(pat("[01]").union_pat(&pat("[0,2]")), pat("[01,2]"));
        assert_eq!(pat("[0,1]").union_pat(&pat("[0,1]")), pat("[0,1]"));
    }

    #[test]
    fn patadd_examples() {
        assert_eq!(pat("[0,1]").patadd(Label(1), Label(2)), pat("[0,1]"));
        assert_eq!(pat("[0,1,2]").patadd(Label(1), Label(2)), pat("[0,12]"));
        assert_eq!(pat("[01,2]").patadd(Label(1), Label(2)), pat("[012]"));
    }

    #[test]
    fn consistency_examples() {
        assert!(pat("[0]").consistent(&pat("[0]")));
        assert!(!pat("[0,1]").consistent(&pat("[0]")));
        assert!(pat("[0,1]").consistent(&pat("[01]")));
    }

    #[test]
    fn rotate_examples() {
        assert_eq!(pat("[0,12]").rotate(Label(1), Label(2)), pat("[0,12]"));
        // Removing the lone label 1 leaves the empty member behind.
        assert_eq!(pat("[0,1]").rotate(Label(1), Label(2)), pat("[0,e]"));
        let p = pat("[0,3]");
        assert_eq!(p.rotate(Label(1), Label(2)), p);
    }

    #[test]
    fn fix_forget_examples() {
        assert_eq!(pat("[01]").fix(Label(1)), pat("[01,1]"));
        assert_eq!(pat("[01]").forget(Label(1)), pat("[0]"));
        assert_eq!(pat("[0,1]").fix(Label(1)), pat("[0,1]"));
        assert_eq!(pat("[012]").forget(Label(2)), pat("[01]"));
    }

    #[test]
    fn complete_rep_examples() {
        let r = pat("[0,1]").complete_rep();
        assert_eq!(r, [pat("[0,1]")].into_iter().collect());
        let r = pat("[01]").complete_rep();
        assert_eq!(r, [pat("[0]"), pat("[01,1]")].into_iter().collect());
        let r = pat("[012]").complete_rep();
        let want: PatternSet =
            [pat("[0]"), pat("[01,1]"), pat("[02,2]"), pat("[012,1,2]")].into_iter().collect();
        assert_eq!(r, want);
    }

    #[test]
    fn completeness_predicates() {
        assert!(pat("[01,1]").is_complete());
        assert!(pat("[01,1]").is_cs());
        assert!(pat("[12,1,2,0]").is_complete());
        assert!(!pat("[12,1,2,0]").is_cs());
        assert!(!pat("[01]").is_complete());
        // The empty member is allowed in complete patterns but not in CS ones.
        assert!(pat("[0,e]").is_complete());
        assert!(!pat("[0,e]").is_cs());
    }

    #[test]
    fn action_examples() {
        assert_eq!(pat("[0,1]").action(3), Some(pat("[0,1]")));
        assert_eq!(pat("[012]").action(1), Some(pat("[012,1,2]")));
        assert_eq!(pat("[012]").action(4), Some(pat("[0]")));
        assert_eq!(pat("[01]").action(3), None);
        assert_eq!(pat("[01]").action(1), Some(pat("[01,1]")));
        assert_eq!(pat("[01]").action(2), Some(pat("[0]")));
    }

    #[test]
    fn actions_of_detached_merge() {
        // Actions of [0,12]: the merged member {1,2} sits apart from the
        // zero-set. Erasing both labels empties it, leaving a pattern that is
        // consistent with nothing.
        let q = pat("[0,12]");
        assert_eq!(q.action(1), Some(pat("[0,12,1,2]")));
        assert_eq!(q.action(2), Some(pat("[0,1]")));
        assert_eq!(q.action(3), Some(pat("[0,2]")));
        assert_eq!(q.action(4), Some(pat("[0,e]")));
    }

    #[test]
    fn parity_rep_step_examples() {
        let p = pat("[12,1,2,0]");
        let a = p.parity_rep_step(0b110).unwrap();
        let want: PatternSet =
            [pat("[0,1,2]"), pat("[01,1,2]"), pat("[02,1,2]")].into_iter().collect();
        assert_eq!(a, want);
        // 2^|S| - 1 outputs when the zero-set is disjoint from S.
        let p = pat("[123,1,2,3,0]");
        assert_eq!(p.parity_rep_step(0b1110).unwrap().len(), 7);
        // Overlap with the zero-set cancels pairs: only the full extension
        // survives.
        let p = pat("[01,12,1,2]");
        let a = p.parity_rep_step(0b110).unwrap();
        assert_eq!(a, [pat("[012,1,2]")].into_iter().collect());
    }

    #[test]
    fn parity_rep_examples() {
        for s in ["[0]", "[0,1]", "[012,1,2]"] {
            let p = pat(s);
            assert_eq!(p.parity_rep().unwrap(), [p.clone()].into_iter().collect());
        }
        let p = pat("[12,1,2,0]");
        let want: PatternSet =
            [pat("[0,1,2]"), pat("[01,1,2]"), pat("[02,1,2]")].into_iter().collect();
        assert_eq!(p.parity_rep().unwrap(), want);
        // Patterns containing the empty member are consistent with nothing.
        assert!(pat("[0,e]").parity_rep().unwrap().is_empty());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_cs(2).unwrap().len(), 9);
        assert_eq!(enumerate_patterns(1).unwrap().len(), 8);
        // 2^(2^k) member families times 2^k zero-sets.
        assert_eq!(enumerate_patterns(2).unwrap().len(), 64);
        // Filtering the full enumeration: [0], [0,1], [01,1] and the variants
        // of [0] and [0,1] with an extra empty member, plus [01,1,e].
        let complete: Vec<Pattern> = enumerate_patterns(1)
            .unwrap()
            .into_iter()
            .filter(|p| p.is_complete())
            .collect();
        assert_eq!(complete.len(), 6);
        let direct = enumerate_complete(1).unwrap();
        assert_eq!(
            direct.iter().cloned().collect::<PatternSet>(),
            complete.into_iter().collect::<PatternSet>()
        );
    }

    #[test]
    fn enumerate_complete_matches_filter_k2() {
        let filtered: PatternSet = enumerate_patterns(2)
            .unwrap()
            .into_iter()
            .filter(|p| p.is_complete())
            .collect();
        let direct: PatternSet = enumerate_complete(2).unwrap().into_iter().collect();
        assert_eq!(filtered, direct);
    }

    #[test]
    fn domination_examples() {
        let p = pat("[01,2]");
        assert!(dominates(&p, &p, 2).unwrap());
        assert!(dominates(&pat("[01]"), &pat("[01,1]"), 2).unwrap());
        // [0,1] is consistent with [01,1] while [0] is not, so [0] does not
        // dominate [0,1]; the converse fails on r = [0].
        assert!(!dominates(&pat("[0]"), &pat("[0,1]"), 2).unwrap());
        assert!(!dominates(&pat("[0,1]"), &pat("[0]"), 2).unwrap());
    }

    #[test]
    fn parse_display_round_trip() {
        for s in ["[0]", "[0,1]", "[01,2]", "[e,0,12]", "[012,1,2]"] {
            let p = pat(s);
            let again: Pattern = p.to_string().parse().unwrap();
            assert_eq!(p, again);
        }
        // The zero singleton may be omitted.
        assert_eq!(pat("[12]"), pat("[0,12]"));
        assert!("[01,02]".parse::<Pattern>().is_err());
        assert!("0,1".parse::<Pattern>().is_err());
    }
}
