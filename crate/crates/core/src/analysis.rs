//! Consistency-matrix laboratory: builds consistency matrices over chosen
//! pattern families, measures their GF(2) rank, reproduces the one-label
//! reference matrices, and verifies the triangular-submatrix and CS-basis
//! structure that the solver's table representation rests on.

use crate::cspat::{digit, pow3, tau_inv};
use crate::pattern::{enumerate_complete, Mask, Pattern, ZERO_ONLY};
use crate::Error;

/// Per-label state of the reference pattern family: absent, singleton,
/// zero-set only, or both.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateB {
    O,
    S,
    C,
    Cs,
}

/// Builds the pattern of a state assignment: a zero-set collecting the
/// `C`/`Cs` labels plus a singleton per `S`/`Cs` label.
pub fn state_pattern(states: &[StateB]) -> Pattern {
    let mut zero: Mask = ZERO_ONLY;
    let mut members: Vec<Mask> = Vec::new();
    for (pos, st) in states.iter().enumerate() {
        let bit = 1u32 << (pos + 1);
        match st {
            StateB::O => {}
            StateB::S => members.push(bit),
            StateB::C => zero |= bit,
            StateB::Cs => {
                zero |= bit;
                members.push(bit);
            }
        }
    }
    members.push(zero);
    Pattern::new(members).unwrap()
}

/// All state tuples over the given per-coordinate order, first coordinate
/// most significant.
fn state_tuples(k: u32, order: &[StateB]) -> Vec<Vec<StateB>> {
    let mut out: Vec<Vec<StateB>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * order.len());
        for prefix in &out {
            for &st in order {
                let mut t = prefix.clone();
                t.push(st);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Cap for the 4^k reference family.
pub const PATB_CAP: u32 = 8;

/// The `4^k` reference patterns, one per state assignment, in lexicographic
/// (O, S, C, CS) order.
pub fn enumerate_patb(k: u32) -> Result<Vec<Pattern>, Error> {
    patb_ordered(k, &[StateB::O, StateB::S, StateB::C, StateB::Cs])
}

/// The `4^k` reference patterns under an explicit per-coordinate state order.
pub fn patb_ordered(k: u32, order: &[StateB; 4]) -> Result<Vec<Pattern>, Error> {
    if k > PATB_CAP {
        return Err(Error::Cap(format!("enumerate_patb capped at k <= {PATB_CAP}, got {k}")));
    }
    Ok(state_tuples(k, order).iter().map(|t| state_pattern(t)).collect())
}

/// The `3^k` CS-state patterns under an explicit per-coordinate state order.
pub fn cs_ordered(k: u32, order: &[StateB; 3]) -> Result<Vec<Pattern>, Error> {
    if k > PATB_CAP {
        return Err(Error::Cap(format!("cs_ordered capped at k <= {PATB_CAP}, got {k}")));
    }
    Ok(state_tuples(k, order).iter().map(|t| state_pattern(t)).collect())
}

/// A bit matrix whose rows and columns are indexed by patterns, with
/// `bit[r][c] = consistent(rows[r], cols[c])`.
#[derive(Clone, Debug)]
pub struct Gf2Matrix {
    pub rows: Vec<Pattern>,
    pub cols: Vec<Pattern>,
    words_per_row: usize,
    bits: Vec<u64>,
}

/// Cap on matrix entries.
pub const MATRIX_ENTRY_CAP: usize = 1 << 26;

impl Gf2Matrix {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words_per_row + c / 64] >> (c % 64) & 1 != 0
    }

    fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.bits[r * self.words_per_row + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    /// Rows as plain bool vectors, for golden-value comparisons.
    pub fn to_bool_rows(&self) -> Vec<Vec<bool>> {
        (0..self.nrows()).map(|r| (0..self.ncols()).map(|c| self.get(r, c)).collect()).collect()
    }

    /// Renders the matrix as a 0/1 grid, one row per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in 0..self.nrows() {
            for c in 0..self.ncols() {
                out.push(if self.get(r, c) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the consistency matrix of two pattern families.
pub fn consistency_matrix(rows: &[Pattern], cols: &[Pattern]) -> Result<Gf2Matrix, Error> {
    if rows.len().saturating_mul(cols.len()) > MATRIX_ENTRY_CAP {
        return Err(Error::Cap(format!(
            "consistency matrix of {}x{} exceeds the entry cap",
            rows.len(),
            cols.len()
        )));
    }
    let words_per_row = cols.len().div_ceil(64);
    let mut m = Gf2Matrix {
        rows: rows.to_vec(),
        cols: cols.to_vec(),
        words_per_row,
        bits: vec![0; rows.len() * words_per_row],
    };
    for (r, rp) in rows.iter().enumerate() {
        for (c, cp) in cols.iter().enumerate() {
            if rp.consistent(cp) {
                m.set(r, c, true);
            }
        }
    }
    Ok(m)
}

/// The one-label reference matrix with rows (S, O, CS, C) and columns
/// (C, CS, O, S).
pub fn fig1_matrix() -> Gf2Matrix {
    let rows: Vec<Pattern> =
        [StateB::S, StateB::O, StateB::Cs, StateB::C].iter().map(|&s| state_pattern(&[s])).collect();
    let cols: Vec<Pattern> =
        [StateB::C, StateB::Cs, StateB::O, StateB::S].iter().map(|&s| state_pattern(&[s])).collect();
    consistency_matrix(&rows, &cols).unwrap()
}

/// The one-label CS reference matrix with rows (S, O, CS) and columns
/// (CS, O, S).
pub fn fig2_matrix() -> Gf2Matrix {
    let rows: Vec<Pattern> =
        [StateB::S, StateB::O, StateB::Cs].iter().map(|&s| state_pattern(&[s])).collect();
    let cols: Vec<Pattern> =
        [StateB::Cs, StateB::O, StateB::S].iter().map(|&s| state_pattern(&[s])).collect();
    consistency_matrix(&rows, &cols).unwrap()
}

/// Consistency matrix over the full `4^k` reference family, lexicographic
/// order on both sides.
pub fn matrix_mb(k: u32) -> Result<Gf2Matrix, Error> {
    let pats = enumerate_patb(k)?;
    consistency_matrix(&pats, &pats)
}

/// Consistency matrix over all complete patterns.
pub fn matrix_mc(k: u32) -> Result<Gf2Matrix, Error> {
    let pats = enumerate_complete(k)?;
    consistency_matrix(&pats, &pats)
}

/// GF(2) rank by bit-packed Gaussian elimination.
pub fn gf2_rank(m: &Gf2Matrix) -> usize {
    let words = m.words_per_row;
    let mut rows: Vec<Vec<u64>> = (0..m.nrows())
        .map(|r| m.bits[r * words..(r + 1) * words].to_vec())
        .collect();
    let mut rank = 0;
    for col in 0..m.ncols() {
        let wi = col / 64;
        let bit = 1u64 << (col % 64);
        let pivot = (rank..rows.len()).find(|&r| rows[r][wi] & bit != 0);
        let Some(pivot) = pivot else { continue };
        rows.swap(rank, pivot);
        let (pivot_row, rest) = {
            let (a, b) = rows.split_at_mut(rank + 1);
            (&a[rank], b)
        };
        for row in rest.iter_mut() {
            if row[wi] & bit != 0 {
                for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Kronecker product of two consistency matrices over disjoint label blocks;
/// entry bits are products of the factor bits, row and column patterns are
/// the combined patterns.
pub fn kronecker(a: &Gf2Matrix, b: &Gf2Matrix, shift: u32) -> Result<Gf2Matrix, Error> {
    let combine = |pa: &Pattern, pb: &Pattern| -> Pattern {
        let shifted: Vec<Mask> = pb
            .members()
            .iter()
            .map(|&m| ((m & !1) << shift) | (m & 1))
            .collect();
        pa.union_pat(&Pattern::new(shifted).unwrap())
    };
    let rows: Vec<Pattern> = a
        .rows
        .iter()
        .flat_map(|pa| b.rows.iter().map(move |pb| combine(pa, pb)))
        .collect();
    let cols: Vec<Pattern> = a
        .cols
        .iter()
        .flat_map(|pa| b.cols.iter().map(move |pb| combine(pa, pb)))
        .collect();
    if rows.len().saturating_mul(cols.len()) > MATRIX_ENTRY_CAP {
        return Err(Error::Cap("kronecker product exceeds the entry cap".into()));
    }
    let words_per_row = cols.len().div_ceil(64);
    let mut m = Gf2Matrix { rows, cols, words_per_row, bits: Vec::new() };
    m.bits = vec![0; m.rows.len() * words_per_row];
    for ra in 0..a.nrows() {
        for rb in 0..b.nrows() {
            for ca in 0..a.ncols() {
                for cb in 0..b.ncols() {
                    let v = a.get(ra, ca) && b.get(rb, cb);
                    if v {
                        m.set(ra * b.nrows() + rb, ca * b.ncols() + cb, true);
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Cap for the triangular check (`9^k` consistency evaluations).
pub const TRIANGULAR_CAP: u32 = 7;

/// Swaps the digit states singleton <-> zero-set in every coordinate.
fn sigma(x: usize, k: u32) -> usize {
    let mut out = 0usize;
    for i in 0..k {
        let d = digit(x, i);
        let d = match d {
            1 => 2,
            2 => 1,
            other => other,
        };
        out += d * pow3(i);
    }
    out
}

/// Verifies that `B[v][w] = consistent(tau_inv(v), tau_inv(sigma(w)))` is
/// lower triangular with a unit diagonal in index order, which exhibits a
/// triangular consistency submatrix of dimension `3^k`.
pub fn check_triangular_cs(k: u32) -> Result<bool, Error> {
    if k > TRIANGULAR_CAP {
        return Err(Error::Cap(format!(
            "check_triangular_cs capped at k <= {TRIANGULAR_CAP}, got {k}"
        )));
    }
    let n = pow3(k);
    let pats: Vec<Pattern> = (0..n).map(|x| tau_inv(x, k)).collect();
    for v in 0..n {
        let row = &pats[v];
        for w in v..n {
            let col = &pats[sigma(w, k)];
            let bit = row.consistent(col);
            if w == v && !bit {
                return Ok(false);
            }
            if w > v && bit {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Cap for the exhaustive CS-basis check.
pub const CS_BASIS_CAP: u32 = 3;

/// For every complete pattern `p` the parity-representation of `p` has the
/// same consistency parity as `p` against every complete partner.
pub fn check_cs_basis(k: u32) -> Result<bool, Error> {
    if k > CS_BASIS_CAP {
        return Err(Error::Cap(format!("check_cs_basis capped at k <= {CS_BASIS_CAP}, got {k}")));
    }
    let complete = enumerate_complete(k)?;
    for p in &complete {
        let reps = p.parity_rep()?;
        if !reps.iter().all(|r| r.is_cs()) {
            return Ok(false);
        }
        for q in &complete {
            let parity = reps.iter().filter(|r| r.consistent(q)).count() % 2 == 1;
            if parity != p.consistent(q) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::enumerate_cs;

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn state_patterns_single_label() {
        assert_eq!(state_pattern(&[StateB::O]), pat("[0]"));
        assert_eq!(state_pattern(&[StateB::S]), pat("[0,1]"));
        assert_eq!(state_pattern(&[StateB::C]), pat("[01]"));
        assert_eq!(state_pattern(&[StateB::Cs]), pat("[01,1]"));
    }

    #[test]
    fn patb_counts() {
        assert_eq!(enumerate_patb(1).unwrap().len(), 4);
        assert_eq!(enumerate_patb(2).unwrap().len(), 16);
        // State assignments without C produce CS-patterns.
        for states in state_tuples(2, &[StateB::O, StateB::S, StateB::Cs]) {
            assert!(state_pattern(&states).is_cs());
        }
    }

    #[test]
    fn fig1_is_reproduced() {
        let want = vec![
            vec![true, true, false, false],
            vec![true, false, true, false],
            vec![true, true, false, true],
            vec![true, true, true, true],
        ];
        let m = fig1_matrix();
        assert_eq!(m.to_bool_rows(), want);
        assert_eq!(gf2_rank(&m), 4);
    }

    #[test]
    fn fig2_is_reproduced() {
        let want = vec![
            vec![true, false, false],
            vec![false, true, false],
            vec![true, false, true],
        ];
        assert_eq!(fig2_matrix().to_bool_rows(), want);
    }

    #[test]
    fn rank_of_zero_matrix() {
        let m = consistency_matrix(&[pat("[0,1]")], &[pat("[0]")]).unwrap();
        assert_eq!(gf2_rank(&m), 0);
    }

    #[test]
    fn mb_rank_is_full_k2() {
        let m = matrix_mb(2).unwrap();
        assert_eq!(gf2_rank(&m), 16);
    }

    #[test]
    fn mb_matches_kronecker_power_k2() {
        let base = matrix_mb(1).unwrap();
        let kron = kronecker(&base, &base, 1).unwrap();
        let m = matrix_mb(2).unwrap();
        // Kronecker index order (first factor most significant) matches the
        // lexicographic enumeration order.
        assert_eq!(m.to_bool_rows(), kron.to_bool_rows());
        for (a, b) in m.rows.iter().zip(kron.rows.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mb_matches_kronecker_power_k3() {
        let base = matrix_mb(1).unwrap();
        let kron2 = kronecker(&base, &base, 1).unwrap();
        let kron3 = kronecker(&kron2, &base, 2).unwrap();
        let m = matrix_mb(3).unwrap();
        assert_eq!(m.to_bool_rows(), kron3.to_bool_rows());
        assert_eq!(gf2_rank(&m), 64);
    }

    #[test]
    fn triangular_small_k() {
        for k in 1..=3 {
            assert!(check_triangular_cs(k).unwrap(), "k = {k}");
        }
        assert!(check_triangular_cs(8).is_err());
    }

    #[test]
    fn cs_basis_small_k() {
        assert!(check_cs_basis(1).unwrap());
        assert!(check_cs_basis(2).unwrap());
    }

    #[test]
    fn mc_rank_is_cs_count() {
        assert_eq!(gf2_rank(&matrix_mc(1).unwrap()), 3);
        assert_eq!(gf2_rank(&matrix_mc(2).unwrap()), 9);
    }

    #[test]
    fn cs_count_matches_enumeration() {
        for k in 0..=5 {
            assert_eq!(enumerate_cs(k).unwrap().len(), pow3(k));
        }
    }
}
