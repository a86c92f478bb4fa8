//! Normalized Hochschild and Connes complexes straight from structure
//! constants.  This is the reference implementation everything else is
//! compared against, so it shares no code with the small complexes.

use std::collections::HashMap;
use std::sync::Arc;

use num::{One, Zero};
use parking_lot::Mutex;

use crate::algebra::{quotient_algebra, AlgebraPresentation, SquareZeroExtension};
use crate::error::Result;
use crate::linalg::{homology_dim, induced_map, ExactMatrix, HomologyBasis, MatrixBuilder, Rational};

/// A word c₀⊗c₁⊗…⊗c_n of C⊗C̄^{⊗n}: slot 0 is any basis index, the others
/// are never the unit index 0.
pub type BarWord = Vec<usize>;

fn sign(k: usize) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Normalized mixed complex of one algebra.
pub struct BarComplex {
    dim: usize,
    mult: Vec<Vec<Vec<(usize, Rational)>>>,
}

impl BarComplex {
    pub fn new(c: &AlgebraPresentation) -> Self {
        let d = c.dim();
        let mult = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        c.product(i, j)
                            .iter()
                            .enumerate()
                            .filter(|(_, x)| !x.is_zero())
                            .map(|(k, x)| (k, x.clone()))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        BarComplex { dim: d, mult }
    }

    pub fn spot_dim(&self, n: usize) -> usize {
        self.dim * (self.dim - 1).pow(n as u32)
    }

    /// All words of degree n in lexicographic order.
    pub fn words(&self, n: usize) -> Vec<BarWord> {
        let total = self.spot_dim(n);
        (0..total).map(|i| self.word_at(n, i)).collect()
    }

    fn word_at(&self, n: usize, mut idx: usize) -> BarWord {
        let r = self.dim - 1;
        let mut w = vec![0; n + 1];
        for k in (1..=n).rev() {
            w[k] = idx % r + 1;
            idx /= r;
        }
        w[0] = idx;
        w
    }

    pub fn index_of(&self, w: &[usize]) -> usize {
        let r = self.dim - 1;
        w[1..].iter().fold(w[0], |acc, &s| acc * r + (s - 1))
    }

    /// Hochschild boundary applied to one word; terms whose interior slot
    /// would be the unit are dropped.
    pub fn apply_b(&self, w: &[usize]) -> Vec<(BarWord, Rational)> {
        let n = w.len() - 1;
        let mut out = Vec::new();
        for l in 0..n {
            for (k, c) in &self.mult[w[l]][w[l + 1]] {
                if l > 0 && *k == 0 {
                    continue;
                }
                let mut nw = Vec::with_capacity(n);
                nw.extend_from_slice(&w[..l]);
                nw.push(*k);
                nw.extend_from_slice(&w[l + 2..]);
                out.push((nw, sign(l) * c));
            }
        }
        if n >= 1 {
            for (k, c) in &self.mult[w[n]][w[0]] {
                let mut nw = Vec::with_capacity(n);
                nw.push(*k);
                nw.extend_from_slice(&w[1..n]);
                out.push((nw, sign(n) * c));
            }
        }
        out
    }

    /// Connes' operator B(c₀⊗…⊗c_n) = Σ_i (−1)^{ni} 1⊗c_i⊗…⊗c_n⊗c₀⊗…⊗c_{i−1}.
    pub fn apply_connes(&self, w: &[usize]) -> Vec<(BarWord, Rational)> {
        let n = w.len() - 1;
        if w[0] == 0 {
            return Vec::new();
        }
        (0..=n)
            .map(|i| {
                let mut nw = Vec::with_capacity(n + 2);
                nw.push(0);
                nw.extend_from_slice(&w[i..]);
                nw.extend_from_slice(&w[..i]);
                (nw, sign(n * i))
            })
            .collect()
    }

    pub fn boundary(&self, n: usize) -> ExactMatrix {
        assert!(n >= 1);
        let mut b = MatrixBuilder::new(self.spot_dim(n - 1), self.spot_dim(n));
        for (j, w) in self.words(n).iter().enumerate() {
            for (nw, c) in self.apply_b(w) {
                b.add(self.index_of(&nw), j, &c);
            }
        }
        b.build()
    }

    pub fn connes(&self, n: usize) -> ExactMatrix {
        let mut b = MatrixBuilder::new(self.spot_dim(n + 1), self.spot_dim(n));
        for (j, w) in self.words(n).iter().enumerate() {
            for (nw, c) in self.apply_connes(w) {
                b.add(self.index_of(&nw), j, &c);
            }
        }
        b.build()
    }
}

/// The sub-mixed complex ker(π) ⊂ C(E) for E = A ⋉_f M, spanned by the words
/// with at least one slot in M, together with the bar complex of A.
pub struct RelativeOracle {
    pub e_bar: BarComplex,
    pub a_bar: BarComplex,
    dim_a: usize,
    rel_words: Mutex<HashMap<usize, Arc<Vec<BarWord>>>>,
    cache: Mutex<HashMap<(&'static str, usize), Arc<ExactMatrix>>>,
}

impl RelativeOracle {
    pub fn new(e: &SquareZeroExtension) -> Self {
        Self::from_parts(&e.e, &e.a)
    }

    /// `c` must list a basis of the quotient first (unit at index 0) and a
    /// basis of the ideal after it; `quotient` is the algebra on the first part.
    fn from_parts(c: &AlgebraPresentation, quotient: &AlgebraPresentation) -> Self {
        RelativeOracle {
            e_bar: BarComplex::new(c),
            a_bar: BarComplex::new(quotient),
            dim_a: quotient.dim(),
            rel_words: Mutex::new(HashMap::new()),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// ker(C(C) → C(C/I)) for an ideal I spanned by basis vectors, which
    /// need not square to zero.  The basis is reordered to put I last.
    pub fn for_ideal(c: &AlgebraPresentation, ideal: &[usize]) -> Result<Self> {
        let (q, comp) = quotient_algebra(c, ideal)?;
        let order: Vec<usize> = comp.iter().chain(ideal).copied().collect();
        let labels = order.iter().map(|&i| c.labels[i].clone()).collect();
        let reordered = AlgebraPresentation::from_fn(labels, |x, y| {
            let p = c.product(order[x], order[y]);
            order.iter().map(|&k| p[k].clone()).collect()
        })?;
        Ok(Self::from_parts(&reordered, &q))
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn is_relative(&self, w: &[usize]) -> bool {
        w.iter().any(|&s| s >= self.dim_a)
    }

    /// Relative basis in degree n: E-words with a slot in M, lexicographic.
    pub fn relative_words(&self, n: usize) -> Arc<Vec<BarWord>> {
        if let Some(w) = self.rel_words.lock().get(&n) {
            return w.clone();
        }
        let words: Vec<BarWord> = self.e_bar.words(n).into_iter().filter(|w| self.is_relative(w)).collect();
        let words = Arc::new(words);
        self.rel_words.lock().insert(n, words.clone());
        words
    }

    pub fn relative_dim(&self, n: usize) -> usize {
        self.e_bar.spot_dim(n) - self.a_bar.spot_dim(n)
    }

    fn relative_index(&self, n: usize) -> HashMap<BarWord, usize> {
        self.relative_words(n).iter().cloned().enumerate().map(|(i, w)| (w, i)).collect()
    }

    fn cached(&self, key: (&'static str, usize), build: impl FnOnce() -> ExactMatrix) -> Arc<ExactMatrix> {
        if let Some(m) = self.cache.lock().get(&key) {
            return m.clone();
        }
        let m = Arc::new(build());
        self.cache.lock().insert(key, m.clone());
        m
    }

    fn restrict(&self, n_src: usize, n_tgt: usize, op: impl Fn(&[usize]) -> Vec<(BarWord, Rational)>) -> ExactMatrix {
        let src = self.relative_words(n_src);
        let tgt = self.relative_index(n_tgt);
        let mut b = MatrixBuilder::new(tgt.len(), src.len());
        for (j, w) in src.iter().enumerate() {
            for (nw, c) in op(w) {
                let i = tgt.get(&nw).expect("ker(pi) is a subcomplex");
                b.add(*i, j, &c);
            }
        }
        b.build()
    }

    /// b restricted to ker(π), degree n → n−1.
    pub fn rel_boundary(&self, n: usize) -> Arc<ExactMatrix> {
        self.cached(("rel_b", n), || {
            if n == 0 {
                ExactMatrix::zeros(0, self.relative_dim(0))
            } else {
                self.restrict(n, n - 1, |w| self.e_bar.apply_b(w))
            }
        })
    }

    /// B restricted to ker(π), degree n → n+1.
    pub fn rel_connes(&self, n: usize) -> Arc<ExactMatrix> {
        self.cached(("rel_B", n), || self.restrict(n, n + 1, |w| self.e_bar.apply_connes(w)))
    }

    pub fn a_boundary(&self, n: usize) -> Arc<ExactMatrix> {
        self.cached(("a_b", n), || {
            if n == 0 {
                ExactMatrix::zeros(0, self.a_bar.spot_dim(0))
            } else {
                self.a_bar.boundary(n)
            }
        })
    }

    pub fn a_connes(&self, n: usize) -> Arc<ExactMatrix> {
        self.cached(("a_B", n), || self.a_bar.connes(n))
    }

    pub fn e_boundary(&self, n: usize) -> Arc<ExactMatrix> {
        self.cached(("e_b", n), || {
            if n == 0 {
                ExactMatrix::zeros(0, self.e_bar.spot_dim(0))
            } else {
                self.e_bar.boundary(n)
            }
        })
    }

    /// The section s: C(A) → C(E) (A-words are E-words) followed by b and by
    /// r = id − s∘π, which keeps the relative part.  Degree n → n−1.
    pub fn snake_hh_chain(&self, n: usize) -> Arc<ExactMatrix> {
        self.cached(("snake", n), || {
            let src = self.a_bar.words(n);
            let tgt = self.relative_index(n - 1);
            let mut b = MatrixBuilder::new(tgt.len(), src.len());
            for (j, w) in src.iter().enumerate() {
                for (nw, c) in self.e_bar.apply_b(w) {
                    if let Some(i) = tgt.get(&nw) {
                        b.add(*i, j, &c);
                    }
                }
            }
            b.build()
        })
    }

    pub fn rel_hh_basis(&self, n: usize) -> Result<HomologyBasis> {
        HomologyBasis::new(&self.rel_boundary(n + 1), &self.rel_boundary(n))
    }

    pub fn a_hh_basis(&self, n: usize) -> Result<HomologyBasis> {
        HomologyBasis::new(&self.a_boundary(n + 1), &self.a_boundary(n))
    }

    pub fn relative_hh_dims(&self, n_max: usize) -> Result<Vec<usize>> {
        (0..=n_max).map(|n| homology_dim(&self.rel_boundary(n + 1), &self.rel_boundary(n))).collect()
    }

    pub fn e_hh_dims(&self, n_max: usize) -> Result<Vec<usize>> {
        (0..=n_max).map(|n| homology_dim(&self.e_boundary(n + 1), &self.e_boundary(n))).collect()
    }

    pub fn a_hh_dims(&self, n_max: usize) -> Result<Vec<usize>> {
        (0..=n_max).map(|n| homology_dim(&self.a_boundary(n + 1), &self.a_boundary(n))).collect()
    }

    /// Columns of Tot(BC)_n: the degrees n, n−2, …, ≥ 0.
    fn bc_columns(n: isize) -> Vec<usize> {
        if n < 0 {
            return Vec::new();
        }
        (0..=n / 2).map(|k| (n - 2 * k) as usize).collect()
    }

    fn tot_bc(
        n: isize,
        dim: impl Fn(usize) -> usize,
        b: impl Fn(usize) -> Arc<ExactMatrix>,
        conn: impl Fn(usize) -> Arc<ExactMatrix>,
    ) -> ExactMatrix {
        let src = Self::bc_columns(n);
        let tgt = Self::bc_columns(n - 1);
        let offsets = |cols: &[usize]| -> Vec<usize> {
            cols.iter()
                .scan(0, |acc, &c| {
                    let o = *acc;
                    *acc += dim(c);
                    Some(o)
                })
                .collect()
        };
        let (so, to) = (offsets(&src), offsets(&tgt));
        let rows: usize = tgt.iter().map(|&c| dim(c)).sum();
        let cols: usize = src.iter().map(|&c| dim(c)).sum();
        let mut m = MatrixBuilder::new(rows, cols);
        for (si, &c) in src.iter().enumerate() {
            for (ti, &t) in tgt.iter().enumerate() {
                if c >= 1 && t == c - 1 {
                    m.add_block(to[ti], so[si], &b(c));
                } else if t == c + 1 {
                    m.add_block(to[ti], so[si], &conn(c));
                }
            }
        }
        m.build()
    }

    /// Total differential b + B of Tot(BC) of ker(π), degree n → n−1.
    pub fn rel_tot(&self, n: isize) -> ExactMatrix {
        Self::tot_bc(n, |k| self.relative_dim(k), |k| self.rel_boundary(k), |k| self.rel_connes(k))
    }

    pub fn a_tot(&self, n: isize) -> ExactMatrix {
        Self::tot_bc(n, |k| self.a_bar.spot_dim(k), |k| self.a_boundary(k), |k| self.a_connes(k))
    }

    pub fn rel_tot_dim(&self, n: isize) -> usize {
        Self::bc_columns(n).iter().map(|&k| self.relative_dim(k)).sum()
    }

    pub fn a_tot_dim(&self, n: isize) -> usize {
        Self::bc_columns(n).iter().map(|&k| self.a_bar.spot_dim(k)).sum()
    }

    pub fn rel_hc_basis(&self, n: usize) -> Result<HomologyBasis> {
        HomologyBasis::new(&self.rel_tot(n as isize + 1), &self.rel_tot(n as isize))
    }

    pub fn a_hc_basis(&self, n: usize) -> Result<HomologyBasis> {
        HomologyBasis::new(&self.a_tot(n as isize + 1), &self.a_tot(n as isize))
    }

    pub fn relative_hc_dims(&self, n_max: usize) -> Result<Vec<usize>> {
        (0..=n_max).map(|n| homology_dim(&self.rel_tot(n as isize + 1), &self.rel_tot(n as isize))).collect()
    }

    /// r∘(b+B)∘s on Tot(BC): blockwise the Hochschild snake map, since B
    /// commutes with the section.  Degree n → n−1.
    pub fn snake_hc_chain(&self, n: usize) -> ExactMatrix {
        let src = Self::bc_columns(n as isize);
        let tgt = Self::bc_columns(n as isize - 1);
        let rows = self.rel_tot_dim(n as isize - 1);
        let cols = self.a_tot_dim(n as isize);
        let mut m = MatrixBuilder::new(rows, cols);
        let (mut so, mut to) = (0, 0);
        for (k, &c) in src.iter().enumerate() {
            if let Some(&t) = tgt.get(k) {
                debug_assert_eq!(t + 1, c);
                m.add_block(to, so, &self.snake_hh_chain(c));
                to += self.relative_dim(t);
            }
            so += self.a_bar.spot_dim(c);
        }
        m.build()
    }

    /// Periodicity S on Tot(BC) of ker(π): forget the top column.
    pub fn rel_periodicity(&self, n: usize) -> ExactMatrix {
        let rows = self.rel_tot_dim(n as isize - 2);
        let cols = self.rel_tot_dim(n as isize);
        let mut m = MatrixBuilder::new(rows, cols);
        m.add_block(0, self.relative_dim(n), &ExactMatrix::identity(rows));
        m.build()
    }

    /// Inclusion of the first column, ker(π)_n → Tot(BC)_n.
    pub fn rel_first_column(&self, n: usize) -> ExactMatrix {
        let mut m = MatrixBuilder::new(self.rel_tot_dim(n as isize), self.relative_dim(n));
        m.add_block(0, 0, &ExactMatrix::identity(self.relative_dim(n)));
        m.build()
    }

    pub fn a_first_column(&self, n: usize) -> ExactMatrix {
        let d = self.a_bar.spot_dim(n);
        let mut m = MatrixBuilder::new(self.a_tot_dim(n as isize), d);
        m.add_block(0, 0, &ExactMatrix::identity(d));
        m.build()
    }

    /// Connecting map HH_n(A) → HH_{n−1}(E,M) on homology bases.
    pub fn snake_connection_hh(&self, n: usize) -> Result<ExactMatrix> {
        induced_map(&self.a_hh_basis(n)?, &self.rel_hh_basis(n - 1)?, &self.snake_hh_chain(n))
    }

    /// Connecting map HC_n(A) → HC_{n−1}(E,M) on homology bases.
    pub fn snake_connection_hc(&self, n: usize) -> Result<ExactMatrix> {
        induced_map(&self.a_hc_basis(n)?, &self.rel_hc_basis(n - 1)?, &self.snake_hc_chain(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{dual_numbers, truncated_polynomial, upper_triangular};

    #[test]
    fn word_indexing_round_trips() {
        let bar = BarComplex::new(&truncated_polynomial(4));
        for n in 0..4 {
            for (i, w) in bar.words(n).iter().enumerate() {
                assert_eq!(bar.index_of(w), i);
            }
        }
    }

    #[test]
    fn boundary_examples() {
        let dual = BarComplex::new(&truncated_polynomial(2));
        assert!(dual.boundary(1).is_zero());
        let quartic = BarComplex::new(&truncated_polynomial(4));
        // b(x⊗x) = x² − x² = 0
        let col = quartic.index_of(&[1, 1]);
        assert!(quartic.boundary(1).column(col).iter().all(|x| x.is_zero()));
        let tri = BarComplex::new(&upper_triangular());
        assert!(tri.boundary(2).mul(&tri.boundary(3)).is_zero());
    }

    #[test]
    fn connes_examples() {
        let dual = BarComplex::new(&truncated_polynomial(2));
        let b0 = dual.connes(0);
        // B(ε) = 1⊗ε
        assert_eq!(b0.get(dual.index_of(&[0, 1]), dual.index_of(&[1])), Rational::one());
        for n in 0..3 {
            assert!(dual.connes(n + 1).mul(&dual.connes(n)).is_zero());
        }
        let quartic = BarComplex::new(&truncated_polynomial(4));
        let lhs = quartic.boundary(3).mul(&quartic.connes(2)).add(&quartic.connes(1).mul(&quartic.boundary(2)));
        assert!(lhs.is_zero());
    }

    #[test]
    fn relative_spot_dimensions_add_up() {
        let o = RelativeOracle::new(&dual_numbers());
        for n in 0..5 {
            assert_eq!(o.relative_words(n).len() + o.a_bar.spot_dim(n), o.e_bar.spot_dim(n));
        }
    }
}
