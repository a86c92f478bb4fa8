//! Tensor words over the split basis of E = A ⊕ M and the elementary word
//! operators (products μ_l, cocycle insertions F_j, rotations t and 𝔱).
//!
//! Every operator here acts on a single basis word and returns a signed
//! linear combination of basis words.  Matrices are assembled by
//! [`operator_matrix`] against an explicit [`WordSpace`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use num::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{SparseTables, SquareZeroExtension};
use crate::error::{Error, Result};
use crate::linalg::{ExactMatrix, MatrixBuilder, Rational};

/// One tensor factor: a basis vector of A (index 0 is the unit) or of M.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    A(usize),
    M(usize),
}

impl Slot {
    pub fn is_m(self) -> bool {
        matches!(self, Slot::M(_))
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::A(i) => write!(f, "a{i}"),
            Slot::M(i) => write!(f, "m{i}"),
        }
    }
}

pub type Word = Vec<Slot>;

pub fn word_string(w: &[Slot]) -> String {
    w.iter().map(|s| s.to_string()).join("⊗")
}

/// A finite linear combination of words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain {
    terms: BTreeMap<Word, Rational>,
}

impl Chain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_word(w: Word) -> Self {
        let mut c = Chain::new();
        c.add(w, &Rational::one());
        c
    }

    pub fn add(&mut self, w: Word, c: &Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_chain(&mut self, other: &Chain, s: &Rational) {
        for (w, c) in &other.terms {
            self.add(w.clone(), &(c * s));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    /// Applies a word-level operator linearly.
    pub fn apply(&self, op: impl Fn(&[Slot]) -> Chain) -> Chain {
        let mut out = Chain::new();
        for (w, c) in &self.terms {
            out.add_chain(&op(w), c);
        }
        out
    }
}

fn sign(k: usize) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Word operators for one square-zero extension.
#[derive(Clone, Debug)]
pub struct WordOps {
    pub dim_a: usize,
    pub dim_m: usize,
    t: SparseTables,
}

impl WordOps {
    pub fn new(e: &SquareZeroExtension) -> Self {
        WordOps { dim_a: e.dim_a(), dim_m: e.dim_m(), t: e.tables.clone() }
    }

    /// The product x·y of the split extension without the cocycle: A·A in A,
    /// the two actions, and M·M = 0.
    pub fn product(&self, x: Slot, y: Slot) -> Vec<(Slot, Rational)> {
        let (tab, wrap): (&[(usize, Rational)], fn(usize) -> Slot) = match (x, y) {
            (Slot::A(i), Slot::A(j)) => (&self.t.a_mul[i][j], Slot::A),
            (Slot::A(i), Slot::M(j)) => (&self.t.left[i][j], Slot::M),
            (Slot::M(j), Slot::A(i)) => (&self.t.right[j][i], Slot::M),
            (Slot::M(_), Slot::M(_)) => return Vec::new(),
        };
        tab.iter().map(|(k, c)| (wrap(*k), c.clone())).collect()
    }

    /// f(x, y) ∈ M; zero unless both arguments lie in A.
    pub fn cocycle(&self, x: Slot, y: Slot) -> Vec<(Slot, Rational)> {
        match (x, y) {
            (Slot::A(i), Slot::A(j)) => self.t.cocycle[i][j].iter().map(|(k, c)| (Slot::M(*k), c.clone())).collect(),
            _ => Vec::new(),
        }
    }

    /// μ_l for 0 ≤ l ≤ n.  Interior unit coefficients are dropped.
    pub fn mu(&self, l: usize, w: &[Slot]) -> Chain {
        let n = w.len() - 1;
        let mut out = Chain::new();
        if n == 0 {
            return out;
        }
        if l < n {
            for (s, c) in self.product(w[l], w[l + 1]) {
                if l > 0 && s == Slot::A(0) {
                    continue;
                }
                let mut nw = Vec::with_capacity(n);
                nw.extend_from_slice(&w[..l]);
                nw.push(s);
                nw.extend_from_slice(&w[l + 2..]);
                out.add(nw, &(sign(l) * c));
            }
        } else {
            for (s, c) in self.product(w[n], w[0]) {
                let mut nw = Vec::with_capacity(n);
                nw.push(s);
                nw.extend_from_slice(&w[1..n]);
                out.add(nw, &(sign(n) * c));
            }
        }
        out
    }

    /// The part of μ_l whose new slot lies in A (`want_m = false`) or M.
    pub fn mu_part(&self, l: usize, w: &[Slot], want_m: bool) -> Chain {
        let pos = if l == w.len() - 1 { 0 } else { l };
        let mut out = Chain::new();
        for (nw, c) in self.mu(l, w).terms() {
            if nw[pos].is_m() == want_m {
                out.add(nw.clone(), c);
            }
        }
        out
    }

    /// Hochschild boundary b = Σ μ_l.
    pub fn b(&self, w: &[Slot]) -> Chain {
        let mut out = Chain::new();
        for l in 0..w.len() {
            out.add_chain(&self.mu(l, w), &Rational::one());
        }
        out
    }

    /// F_j: the cocycle inserted at positions (j, j+1), or at (n, 0) for j = n.
    pub fn f_op(&self, j: usize, w: &[Slot]) -> Chain {
        let n = w.len() - 1;
        let mut out = Chain::new();
        if n == 0 || j > n {
            return out;
        }
        if j < n {
            for (s, c) in self.cocycle(w[j], w[j + 1]) {
                let mut nw = Vec::with_capacity(n);
                nw.extend_from_slice(&w[..j]);
                nw.push(s);
                nw.extend_from_slice(&w[j + 2..]);
                out.add(nw, &(sign(j) * c));
            }
        } else {
            for (s, c) in self.cocycle(w[n], w[0]) {
                let mut nw = Vec::with_capacity(n);
                nw.extend_from_slice(&w[1..n]);
                nw.push(s);
                out.add(nw, &(-c));
            }
        }
        out
    }

    /// Position of the last slot in M.
    pub fn last_m(w: &[Slot]) -> Option<usize> {
        w.iter().rposition(|s| s.is_m())
    }

    /// The rotation t bringing the last M slot to the front.  Zero when the
    /// unit would move into the interior.
    pub fn t(&self, w: &[Slot]) -> Chain {
        let n = w.len() - 1;
        let i = Self::last_m(w).expect("t needs a slot in M");
        if i > 0 && w[0] == Slot::A(0) {
            return Chain::new();
        }
        let nw: Word = w[i..].iter().chain(&w[..i]).copied().collect();
        let mut out = Chain::new();
        out.add(nw, &sign(i * n));
        out
    }

    /// 𝔱(x) = (−1)^n x_n ⊗ x₀ ⊗ … ⊗ x_{n−1}.
    pub fn frak_t(&self, w: &[Slot]) -> Chain {
        let n = w.len() - 1;
        if n > 0 && w[0] == Slot::A(0) {
            return Chain::new();
        }
        let nw: Word = std::iter::once(w[n]).chain(w[..n].iter().copied()).collect();
        let mut out = Chain::new();
        out.add(nw, &sign(n));
        out
    }

    /// 1 ⊗ x.  Zero when x₀ is the unit.
    pub fn prepend_unit(&self, w: &[Slot]) -> Chain {
        if w[0] == Slot::A(0) {
            return Chain::new();
        }
        Chain::from_word(std::iter::once(Slot::A(0)).chain(w.iter().copied()).collect())
    }
}

/// What slot 0 of a word space may hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Head {
    M,
    A,
}

/// An ordered basis of words: slot 0 of the given kind, n interior slots of
/// which exactly k lie in M.
#[derive(Clone, Debug)]
pub struct WordSpace {
    pub head: Head,
    pub n: usize,
    pub k: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl WordSpace {
    pub fn new(head: Head, n: usize, k: usize, dim_a: usize, dim_m: usize) -> Self {
        let mut words = Vec::new();
        if k <= n {
            for ms in (1..=n).combinations(k) {
                let mut ranges: Vec<Vec<Slot>> = Vec::with_capacity(n + 1);
                ranges.push(match head {
                    Head::M => (0..dim_m).map(Slot::M).collect(),
                    Head::A => (0..dim_a).map(Slot::A).collect(),
                });
                for p in 1..=n {
                    ranges.push(if ms.contains(&p) {
                        (0..dim_m).map(Slot::M).collect()
                    } else {
                        (1..dim_a).map(Slot::A).collect()
                    });
                }
                words.extend(ranges.into_iter().multi_cartesian_product());
            }
        }
        let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        WordSpace { head, n, k, words, index }
    }

    /// X^w_v = M ⊗ B^{v−w}_w; empty outside 0 ≤ 2w ≤ v.
    pub fn x(v: i64, w: i64, dim_a: usize, dim_m: usize) -> Self {
        if w < 0 || v < 2 * w {
            return Self::empty(Head::M);
        }
        Self::new(Head::M, (v - w) as usize, w as usize, dim_a, dim_m)
    }

    /// Y(n, k) = A ⊗ B^n_k.
    pub fn y(n: i64, k: i64, dim_a: usize, dim_m: usize) -> Self {
        if n < 0 || k < 0 || k > n {
            return Self::empty(Head::A);
        }
        Self::new(Head::A, n as usize, k as usize, dim_a, dim_m)
    }

    pub fn empty(head: Head) -> Self {
        WordSpace { head, n: 0, k: 0, words: Vec::new(), index: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn index_of(&self, w: &[Slot]) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Coordinates of a chain that must lie in this space.
    pub fn vector(&self, c: &Chain) -> Result<Vec<Rational>> {
        let mut v = vec![Rational::zero(); self.len()];
        for (w, x) in c.terms() {
            let i = self.index_of(w).ok_or_else(|| Error::OutsideTarget(word_string(w)))?;
            v[i] += x;
        }
        Ok(v)
    }
}

/// Matrix of a word operator.  Every output word must lie in `tgt`.
pub fn operator_matrix(src: &WordSpace, tgt: &WordSpace, op: impl Fn(&[Slot]) -> Chain + Sync) -> Result<ExactMatrix> {
    let images: Vec<Chain> = src.words.par_iter().map(|w| op(w)).collect();
    let mut b = MatrixBuilder::new(tgt.len(), src.len());
    for (j, c) in images.iter().enumerate() {
        for (w, x) in c.terms() {
            let i = tgt.index_of(w).ok_or_else(|| Error::OutsideTarget(word_string(w)))?;
            b.add(i, j, x);
        }
    }
    Ok(b.build())
}

/// Like [`operator_matrix`] but silently drops words outside `tgt`; used to
/// split an operator by the shape of its output.
pub fn operator_matrix_filtered(src: &WordSpace, tgt: &WordSpace, op: impl Fn(&[Slot]) -> Chain + Sync) -> ExactMatrix {
    let images: Vec<Chain> = src.words.par_iter().map(|w| op(w)).collect();
    let mut b = MatrixBuilder::new(tgt.len(), src.len());
    for (j, c) in images.iter().enumerate() {
        for (w, x) in c.terms() {
            if let Some(i) = tgt.index_of(w) {
                b.add(i, j, x);
            }
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{dual_numbers, quartic_truncation};
    use crate::linalg::int;

    #[test]
    fn x_space_dimensions() {
        let e = quartic_truncation();
        for v in 0..6i64 {
            for w in 0..=v / 2 {
                let n = (v - w) as u32;
                let expect = 2usize.pow(w as u32 + 1) * num::integer::binomial(n as usize, w as usize);
                assert_eq!(WordSpace::x(v, w, e.dim_a(), e.dim_m()).len(), expect, "v={v} w={w}");
            }
        }
    }

    #[test]
    fn t_rotates_last_m_slot() {
        let e = dual_numbers();
        let ops = WordOps::new(&e);
        let w = vec![Slot::M(0), Slot::M(0), Slot::M(0)];
        let r = ops.t(&w);
        let (nw, c) = r.terms().next().unwrap();
        assert_eq!(nw, &w);
        assert_eq!(c, &int(1));
    }

    #[test]
    fn unit_never_moves_inside() {
        let e = dual_numbers();
        let ops = WordOps::new(&e);
        assert!(ops.t(&[Slot::A(0), Slot::M(0)]).is_zero());
        assert!(ops.frak_t(&[Slot::A(0), Slot::M(0)]).is_zero());
        assert!(ops.prepend_unit(&[Slot::A(0)]).is_zero());
    }
}
