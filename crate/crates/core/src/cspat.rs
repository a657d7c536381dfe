//! Base-3 state encoding of CS-patterns and fast GF(2) transforms for the
//! lattice `{0 <= 1 <= 2}^k`.
//!
//! Digit semantics, per label: 0 = absent, 1 = singleton only, 2 = in the
//! zero-set (and singleton). Digit `i` of an index corresponds to label
//! `i + 1`, with label 1 in the least significant digit.
//!
//! The union of two CS-patterns corresponds to the digitwise max of their
//! indices, so the union-node convolution is the lattice join-product. It is
//! computed as zeta transform, pointwise product, Moebius inversion, at
//! `O(k * 3^k)` bit operations per transform.

use crate::pattern::{Mask, Pattern};
use crate::Error;

/// `3^k`.
pub fn pow3(k: u32) -> usize {
    3usize.pow(k)
}

/// Maps a CS-pattern over `[k]` to its base-3 index.
pub fn tau(p: &Pattern, k: u32) -> Result<usize, Error> {
    if !p.is_cs() {
        return Err(Error::Pattern(format!("tau requires a CS-pattern, got {p}")));
    }
    if p.lbs() >> 1 >= 1 << k {
        return Err(Error::Pattern(format!("pattern {p} has labels beyond k={k}")));
    }
    let z = p.zero_set();
    let l = p.lbs();
    let mut idx = 0usize;
    let mut place = 1usize;
    for i in 1..=k {
        let digit = if z & (1 << i) != 0 {
            2
        } else if l & (1 << i) != 0 {
            1
        } else {
            0
        };
        idx += digit * place;
        place *= 3;
    }
    Ok(idx)
}

/// Inverse of [`tau`]: rebuilds the CS-pattern from its base-3 index.
pub fn tau_inv(mut x: usize, k: u32) -> Pattern {
    let mut zero: Mask = 1;
    let mut members: Vec<Mask> = Vec::with_capacity(k as usize + 1);
    for i in 1..=k {
        let digit = x % 3;
        x /= 3;
        if digit >= 1 {
            members.push(1 << i);
        }
        if digit == 2 {
            zero |= 1 << i;
        }
    }
    members.push(zero);
    Pattern::new(members).unwrap()
}

/// Extracts digit `i` (0-based) of `x` in base 3.
pub fn digit(x: usize, i: u32) -> usize {
    (x / pow3(i)) % 3
}

/// Digitwise maximum, i.e. the lattice join of two indices.
pub fn digit_max(mut a: usize, mut b: usize, k: u32) -> usize {
    let mut out = 0usize;
    let mut place = 1usize;
    for _ in 0..k {
        out += place * (a % 3).max(b % 3);
        a /= 3;
        b /= 3;
        place *= 3;
    }
    out
}

/// A GF(2) vector with `3^k` entries indexed by CS-pattern indices, packed
/// into 64-bit words.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Table {
    k: u32,
    words: Vec<u64>,
}

impl Gf2Table {
    pub fn new(k: u32) -> Gf2Table {
        Gf2Table { k, words: vec![0; pow3(k).div_ceil(64)] }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        pow3(self.k)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Heap footprint in bytes, for memory accounting.
    pub fn byte_size(&self) -> usize {
        self.words.len() * 8
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 != 0
    }

    pub fn set(&mut self, i: usize, v: bool) {
        let w = &mut self.words[i / 64];
        if v {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }

    pub fn toggle(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        let len = self.len();
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
            .take_while(move |&i| i < len)
        })
    }

    pub fn xor_with(&mut self, other: &Gf2Table) {
        debug_assert_eq!(self.k, other.k);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// `self ^= a & b`, the inner step of accumulated join-products.
    pub fn xor_and(&mut self, a: &Gf2Table, b: &Gf2Table) {
        debug_assert_eq!(self.k, a.k);
        debug_assert_eq!(self.k, b.k);
        for ((dst, x), y) in self.words.iter_mut().zip(&a.words).zip(&b.words) {
            *dst ^= x & y;
        }
    }

    /// In-place zeta transform: entry `x` becomes the XOR of all entries
    /// digitwise below or equal to `x`.
    pub fn zeta_in_place(&mut self) {
        let len = self.len();
        let mut stride = 1usize;
        for _ in 0..self.k {
            let block = stride * 3;
            let mut base = 0;
            while base < len {
                for r in base..base + stride {
                    if self.get(r) {
                        self.toggle(r + stride);
                    }
                    if self.get(r + stride) {
                        self.toggle(r + 2 * stride);
                    }
                }
                base += block;
            }
            stride = block;
        }
    }

    /// In-place Moebius transform, the inverse of [`Gf2Table::zeta_in_place`].
    pub fn mobius_in_place(&mut self) {
        let len = self.len();
        let mut stride = 1usize;
        for _ in 0..self.k {
            let block = stride * 3;
            let mut base = 0;
            while base < len {
                for r in base..base + stride {
                    if self.get(r + stride) {
                        self.toggle(r + 2 * stride);
                    }
                    if self.get(r) {
                        self.toggle(r + stride);
                    }
                }
                base += block;
            }
            stride = block;
        }
    }

    /// Debug dump: a 0/1 string in index order.
    pub fn dump_bits(&self) -> String {
        (0..self.len()).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }
}

impl std::fmt::Debug for Gf2Table {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Gf2Table(k={}, ones={:?})", self.k, self.ones().collect::<Vec<_>>())
    }
}

/// Zeta transform of a table.
pub fn zeta(t: &Gf2Table) -> Gf2Table {
    let mut out = t.clone();
    out.zeta_in_place();
    out
}

/// Moebius transform of a table (inverse of [`zeta`]).
pub fn mobius(t: &Gf2Table) -> Gf2Table {
    let mut out = t.clone();
    out.mobius_in_place();
    out
}

/// Join-product over the digit lattice: `out[x]` is the GF(2) sum over all
/// index pairs whose digitwise max is `x` of `a[y] * b[z]`.
pub fn join_product(a: &Gf2Table, b: &Gf2Table) -> Result<Gf2Table, Error> {
    if a.k != b.k {
        return Err(Error::Dimension(format!("join_product: k {} vs {}", a.k, b.k)));
    }
    let mut za = zeta(a);
    let zb = zeta(b);
    for (x, y) in za.words.iter_mut().zip(&zb.words) {
        *x &= y;
    }
    za.mobius_in_place();
    Ok(za)
}

/// Cap on the literal double-loop join-product used as a test oracle.
pub const NAIVE_PRODUCT_CAP: u32 = 6;

/// Literal double loop over set-bit pairs; oracle for [`join_product`].
pub fn naive_join_product(a: &Gf2Table, b: &Gf2Table) -> Result<Gf2Table, Error> {
    if a.k != b.k {
        return Err(Error::Dimension(format!("join_product: k {} vs {}", a.k, b.k)));
    }
    if a.k > NAIVE_PRODUCT_CAP {
        return Err(Error::Cap(format!(
            "naive_join_product capped at k <= {NAIVE_PRODUCT_CAP}, got {}",
            a.k
        )));
    }
    let mut out = Gf2Table::new(a.k);
    for y in a.ones() {
        for z in b.ones() {
            out.toggle(digit_max(y, z, a.k));
        }
    }
    Ok(out)
}

/// Relabel map on indices: moves the contribution of label `i` onto label
/// `j` (digit of `j` becomes the max of the two digits, digit of `i` zeroes).
pub fn relabel_index(x: usize, i: u32, j: u32) -> usize {
    let di = digit(x, i - 1);
    let dj = digit(x, j - 1);
    x - di * pow3(i - 1) - dj * pow3(j - 1) + di.max(dj) * pow3(j - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::Label;

    fn pat(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&pat("[0]"), 3).unwrap(), 0);
        // digits (l1, l2) = (2, 1) -> 2 + 1*3 = 5
        assert_eq!(tau(&pat("[01,1,2]"), 2).unwrap(), 5);
        assert!(tau(&pat("[12,1,2,0]"), 2).is_err());
    }

    #[test]
    fn tau_is_bijective() {
        for k in 0..=4 {
            for x in 0..pow3(k) {
                let p = tau_inv(x, k);
                assert!(p.is_cs());
                assert_eq!(tau(&p, k).unwrap(), x);
            }
        }
    }

    #[test]
    fn tau_union_is_digit_max() {
        let k = 3;
        for x in 0..pow3(k) {
            for y in 0..pow3(k) {
                let u = tau_inv(x, k).union_pat(&tau_inv(y, k));
                assert_eq!(tau(&u, k).unwrap(), digit_max(x, y, k));
            }
        }
    }

    #[test]
    fn relabel_index_matches_pattern_route() {
        let k = 4;
        for i in 1..=k {
            for j in 1..=k {
                if i == j {
                    continue;
                }
                for x in 0..pow3(k) {
                    let via_pattern =
                        tau(&tau_inv(x, k).relabel(Label(i), Label(j)), k).unwrap();
                    assert_eq!(relabel_index(x, i, j), via_pattern);
                }
            }
        }
    }

    #[test]
    fn tau_is_an_order_isomorphism() {
        // p precedes q iff q's zero-set covers p's and q's labels cover p's;
        // that must coincide with digitwise comparison of the indices.
        let k = 3;
        for x in 0..pow3(k) {
            for y in 0..pow3(k) {
                let p = tau_inv(x, k);
                let q = tau_inv(y, k);
                let pat_leq = p.zero_set() & !q.zero_set() == 0 && p.lbs() & !q.lbs() == 0;
                let digit_leq = (0..k).all(|i| digit(x, i) <= digit(y, i));
                assert_eq!(pat_leq, digit_leq, "x={x} y={y}");
            }
        }
    }

    #[test]
    fn zeta_k1_example() {
        let mut t = Gf2Table::new(1);
        t.set(1, true);
        let z = zeta(&t);
        assert!(!z.get(0));
        assert!(z.get(1));
        assert!(z.get(2));
    }

    #[test]
    fn zeta_of_zero_is_zero() {
        let t = Gf2Table::new(3);
        assert!(zeta(&t).is_zero());
    }

    #[test]
    fn product_neutral_and_annihilator() {
        let mut a = Gf2Table::new(2);
        a.set(3, true);
        a.set(7, true);
        let mut delta0 = Gf2Table::new(2);
        delta0.set(0, true);
        assert_eq!(join_product(&delta0, &a).unwrap(), a);
        let zero = Gf2Table::new(2);
        assert!(join_product(&a, &zero).unwrap().is_zero());
    }

    #[test]
    fn product_k1_delta_example() {
        let mut d1 = Gf2Table::new(1);
        d1.set(1, true);
        let mut d2 = Gf2Table::new(1);
        d2.set(2, true);
        let p = join_product(&d1, &d2).unwrap();
        assert_eq!(p.ones().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = Gf2Table::new(2);
        let b = Gf2Table::new(3);
        assert!(join_product(&a, &b).is_err());
        assert!(naive_join_product(&a, &b).is_err());
    }
}
