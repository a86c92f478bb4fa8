//! Linear maps between direct sums of bigraded pieces.
//!
//! A piece is named by a [`Key`]; a [`KeyedMap`] stores one matrix per
//! (source, target) pair.  Identities between structure maps are checked
//! piece by piece so that a failure names the offending block.

use std::collections::BTreeMap;
use std::fmt;

use num::One;

use crate::error::{Error, Result};
use crate::linalg::{ExactMatrix, MatrixBuilder, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    /// X^w_v, the words M ⊗ B^{v−w}_w.
    X,
    /// The cokernel X̄^w_v of 1 − t.
    Bar,
    /// The M-headed part of the big model in weight w (same words as X^w_v).
    BigM,
    /// The A-headed part A ⊗ B^{v−w}_{w+1} of the big model in weight w.
    BigA,
    /// A ⊗ Ā^{⊗v}, the normalized bar words of A.
    ABar,
}

/// A bigraded piece.  For X and Bar, `c = 0` is the piece itself in
/// position (v, w) and `c = 1` is the same space used as the second summand
/// one total degree higher.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key {
    pub kind: Kind,
    pub v: i64,
    pub w: i64,
    pub c: u8,
}

impl Key {
    pub const fn new(kind: Kind, v: i64, w: i64, c: u8) -> Self {
        Key { kind, v, w, c }
    }

    pub const fn x(v: i64, w: i64, c: u8) -> Self {
        Key::new(Kind::X, v, w, c)
    }

    pub const fn bar(v: i64, w: i64, c: u8) -> Self {
        Key::new(Kind::Bar, v, w, c)
    }

    /// Total degree v − w + c.
    pub fn degree(&self) -> i64 {
        self.v - self.w + self.c as i64
    }
}

impl fmt::Debug for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}(v={},w={},c={})", self.kind, self.v, self.w, self.c)
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Ordered list of pieces with their dimensions; the basis of a total space.
#[derive(Clone, Debug, Default)]
pub struct Layout {
    pieces: Vec<(Key, usize)>,
}

impl Layout {
    pub fn new(pieces: Vec<(Key, usize)>) -> Self {
        Layout { pieces }
    }

    pub fn pieces(&self) -> &[(Key, usize)] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.pieces.iter().map(|p| p.1).sum()
    }

    pub fn offset(&self, k: &Key) -> Option<usize> {
        let mut off = 0;
        for (key, d) in &self.pieces {
            if key == k {
                return Some(off);
            }
            off += d;
        }
        None
    }

    pub fn keys(&self) -> impl Iterator<Item = Key> + '_ {
        self.pieces.iter().map(|p| p.0)
    }

    /// The block of a vector belonging to piece `k`.
    pub fn slice<'a>(&self, v: &'a [Rational], k: &Key) -> Option<&'a [Rational]> {
        let off = self.offset(k)?;
        let d = self.pieces.iter().find(|p| &p.0 == k)?.1;
        Some(&v[off..off + d])
    }
}

/// Map between direct sums of pieces, stored blockwise as `[src][tgt]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyedMap {
    blocks: BTreeMap<Key, BTreeMap<Key, ExactMatrix>>,
}

impl KeyedMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Identity on the given pieces.
    pub fn identity(pieces: &[(Key, usize)]) -> Self {
        let mut m = KeyedMap::new();
        for (k, d) in pieces {
            m.insert(*k, *k, ExactMatrix::identity(*d));
        }
        m
    }

    /// Adds `m` to the block src → tgt.
    pub fn insert(&mut self, src: Key, tgt: Key, m: ExactMatrix) {
        if m.is_zero() {
            return;
        }
        let row = self.blocks.entry(src).or_default();
        match row.get_mut(&tgt) {
            Some(x) => {
                *x = x.add(&m);
                if x.is_zero() {
                    row.remove(&tgt);
                }
            }
            None => {
                row.insert(tgt, m);
            }
        }
    }

    pub fn block(&self, src: &Key, tgt: &Key) -> Option<&ExactMatrix> {
        self.blocks.get(src).and_then(|r| r.get(tgt))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&Key, &Key, &ExactMatrix)> {
        self.blocks.iter().flat_map(|(s, r)| r.iter().map(move |(t, m)| (s, t, m)))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(|r| r.is_empty())
    }

    /// self ∘ other.
    pub fn compose(&self, other: &KeyedMap) -> KeyedMap {
        let mut out = KeyedMap::new();
        for (s, mid, m1) in other.blocks() {
            if let Some(r) = self.blocks.get(mid) {
                for (t, m2) in r {
                    out.insert(*s, *t, m2.mul(m1));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &KeyedMap) -> KeyedMap {
        let mut out = self.clone();
        for (s, t, m) in other.blocks() {
            out.insert(*s, *t, m.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> KeyedMap {
        let mut out = KeyedMap::new();
        for (s, t, m) in self.blocks() {
            out.insert(*s, *t, m.scale(c));
        }
        out
    }

    pub fn neg(&self) -> KeyedMap {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &KeyedMap) -> KeyedMap {
        self.add(&other.neg())
    }

    /// Keeps only the blocks whose source satisfies `keep`.
    pub fn restrict_source(&self, keep: impl Fn(&Key) -> bool) -> KeyedMap {
        let mut out = KeyedMap::new();
        for (s, t, m) in self.blocks() {
            if keep(s) {
                out.insert(*s, *t, m.clone());
            }
        }
        out
    }

    /// Keeps only the blocks whose target satisfies `keep`.
    pub fn restrict_target(&self, keep: impl Fn(&Key) -> bool) -> KeyedMap {
        let mut out = KeyedMap::new();
        for (s, t, m) in self.blocks() {
            if keep(t) {
                out.insert(*s, *t, m.clone());
            }
        }
        out
    }

    /// First block where `self` and `other` differ, if any.
    pub fn first_difference(&self, other: &KeyedMap) -> Option<(Key, Key)> {
        self.sub(other).blocks().next().map(|(s, t, _)| (*s, *t))
    }

    /// `Ok` when the maps agree, else an identity violation naming the block.
    pub fn expect_eq(&self, other: &KeyedMap, law: &str) -> Result<()> {
        match self.first_difference(other) {
            None => Ok(()),
            Some((s, t)) => Err(Error::IdentityViolation { law: law.to_string(), block: format!("{s} -> {t}") }),
        }
    }

    /// Splits a matrix from `src` to `tgt` into its blocks.
    pub fn from_matrix(src: &Layout, tgt: &Layout, m: &ExactMatrix) -> KeyedMap {
        assert_eq!(m.shape(), (tgt.dim(), src.dim()));
        let mut out = KeyedMap::new();
        let mut c0 = 0;
        for (s, sd) in src.pieces() {
            let cols: Vec<usize> = (c0..c0 + sd).collect();
            let part = m.select_columns(&cols);
            let mut r0 = 0;
            for (t, td) in tgt.pieces() {
                let rows: Vec<usize> = (r0..r0 + td).collect();
                out.insert(*s, *t, part.select_rows(&rows));
                r0 += td;
            }
            c0 += sd;
        }
        out
    }

    /// Dense-indexed matrix from `src` to `tgt`; blocks outside the layouts
    /// are ignored.
    pub fn to_matrix(&self, src: &Layout, tgt: &Layout) -> ExactMatrix {
        let mut b = MatrixBuilder::new(tgt.dim(), src.dim());
        let mut c0 = 0;
        for (s, d) in src.pieces() {
            if let Some(r) = self.blocks.get(s) {
                for (t, m) in r {
                    if let Some(r0) = tgt.offset(t) {
                        b.add_block(r0, c0, m);
                    }
                }
            }
            c0 += d;
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;

    #[test]
    fn compose_follows_keys() {
        let (a, b, c) = (Key::x(0, 0, 0), Key::x(1, 0, 0), Key::x(2, 1, 0));
        let mut f = KeyedMap::new();
        f.insert(a, b, ExactMatrix::from_i64(&[&[2]]));
        let mut g = KeyedMap::new();
        g.insert(b, c, ExactMatrix::from_i64(&[&[3]]));
        g.insert(a, c, ExactMatrix::from_i64(&[&[5]]));
        let h = g.compose(&f);
        assert_eq!(h.block(&a, &c).unwrap().get(0, 0), int(6));
        assert!(h.block(&b, &c).is_none());
    }

    #[test]
    fn cancelling_blocks_disappear() {
        let k = Key::x(0, 0, 0);
        let mut f = KeyedMap::identity(&[(k, 2)]);
        f.insert(k, k, ExactMatrix::identity(2).neg());
        assert!(f.is_zero());
    }

    #[test]
    fn layout_assembly() {
        let (a, b) = (Key::x(0, 0, 0), Key::x(1, 0, 0));
        let lay = Layout::new(vec![(a, 1), (b, 2)]);
        let mut f = KeyedMap::new();
        f.insert(a, b, ExactMatrix::from_i64(&[&[1], &[2]]));
        let m = f.to_matrix(&lay, &lay);
        assert_eq!(m, ExactMatrix::from_i64(&[&[0, 0, 0], &[1, 0, 0], &[2, 0, 0]]));
    }
}
