//! The small models X^w_v = M ⊗ B^{v−w}_w of the relative mixed complex and
//! the cokernel X̄ of 1 − t, with their structure maps.

use std::collections::HashMap;
use std::sync::Arc;

use num::One;
use parking_lot::Mutex;
use serde_json::json;

use crate::algebra::SquareZeroExtension;
use crate::blocks::{Key, KeyedMap, Kind, Layout};
use crate::error::Result;
use crate::linalg::{homology_dim, rank, rat, ExactMatrix, MatrixBuilder, Rational};
use crate::report::{Certificate, Ledger};
use crate::word::{operator_matrix, Chain, Slot, WordOps, WordSpace};

/// Elementary operators on a single X^w_v.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockOp {
    /// b: (v, w) → (v−1, w)
    B,
    /// t, N, 1 − t, σ, σ′: (v, w) → (v, w)
    T,
    N,
    OneMinusT,
    Sigma,
    SigmaPrime,
    /// d, d′, F_j: (v, w) → (v, w+1)
    D,
    DPrime,
    F(usize),
}

impl BlockOp {
    pub fn target(self, v: i64, w: i64) -> (i64, i64) {
        match self {
            BlockOp::B => (v - 1, w),
            BlockOp::D | BlockOp::DPrime | BlockOp::F(_) => (v, w + 1),
            _ => (v, w),
        }
    }
}

/// Class data of X̄^w_v = coker(1 − t).
#[derive(Clone, Debug)]
pub struct Quotient {
    /// Indices (in X^w_v) of the class representatives.
    pub reps: Vec<usize>,
    /// X → X̄.
    pub proj: ExactMatrix,
    /// X̄ → X, a class to its representative word.
    pub lift: ExactMatrix,
    /// N̄: X̄ → X.
    pub nbar: ExactMatrix,
    /// 𝔭: X → X̄, x ↦ ((n − i(x) + 2)/(v + 2))[x].
    pub frak_p: ExactMatrix,
}

impl Quotient {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }
}

pub(crate) fn valid(v: i64, w: i64) -> bool {
    w >= 0 && v >= 2 * w
}

/// All small-model data of one extension, built lazily and cached.
pub struct SmallComplex {
    pub ops: WordOps,
    pub name: String,
    spaces: Mutex<HashMap<(i64, i64), Arc<WordSpace>>>,
    a_spaces: Mutex<HashMap<(i64, i64), Arc<WordSpace>>>,
    blocks: Mutex<HashMap<(BlockOp, i64, i64), Arc<ExactMatrix>>>,
    quotients: Mutex<HashMap<(i64, i64), Arc<Quotient>>>,
}

fn cached<K: std::hash::Hash + Eq + Clone, V>(
    m: &Mutex<HashMap<K, Arc<V>>>,
    key: K,
    build: impl FnOnce() -> V,
) -> Arc<V> {
    if let Some(x) = m.lock().get(&key) {
        return x.clone();
    }
    let x = Arc::new(build());
    m.lock().entry(key).or_insert(x).clone()
}

impl SmallComplex {
    pub fn new(e: &SquareZeroExtension) -> Self {
        SmallComplex {
            ops: WordOps::new(e),
            name: e.name.clone(),
            spaces: Mutex::new(HashMap::new()),
            a_spaces: Mutex::new(HashMap::new()),
            blocks: Mutex::new(HashMap::new()),
            quotients: Mutex::new(HashMap::new()),
        }
    }

    /// Basis of X^w_v.
    pub fn space(&self, v: i64, w: i64) -> Arc<WordSpace> {
        cached(&self.spaces, (v, w), || WordSpace::x(v, w, self.ops.dim_a, self.ops.dim_m))
    }

    /// Basis of A ⊗ B^n_k.
    pub fn a_space(&self, n: i64, k: i64) -> Arc<WordSpace> {
        cached(&self.a_spaces, (n, k), || WordSpace::y(n, k, self.ops.dim_a, self.ops.dim_m))
    }

    pub fn dim(&self, v: i64, w: i64) -> usize {
        self.space(v, w).len()
    }

    /// Dimension of a piece named by a key.
    pub fn piece_dim(&self, k: &Key) -> usize {
        match k.kind {
            Kind::X | Kind::BigM => self.dim(k.v, k.w),
            Kind::Bar => {
                if valid(k.v, k.w) {
                    self.quotient(k.v, k.w).dim()
                } else {
                    0
                }
            }
            Kind::BigA => self.a_space(k.v - k.w, k.w + 1).len(),
            Kind::ABar => self.a_space(k.v, 0).len(),
        }
    }

    /// Word basis of a word-based piece.
    pub fn word_space(&self, k: &Key) -> Arc<WordSpace> {
        match k.kind {
            Kind::X | Kind::BigM => self.space(k.v, k.w),
            Kind::BigA => self.a_space(k.v - k.w, k.w + 1),
            Kind::ABar => self.a_space(k.v, 0),
            Kind::Bar => panic!("X̄ pieces have no word basis"),
        }
    }

    /// Builds a KeyedMap from a word operator.  `classify` names the piece
    /// of each output word; words classified as `None` are dropped.
    pub fn word_map(
        &self,
        src: &[Key],
        op: impl Fn(&[Slot]) -> Chain + Sync,
        classify: impl Fn(&Key, &[Slot]) -> Option<Key>,
    ) -> KeyedMap {
        use rayon::prelude::*;
        let mut out = KeyedMap::new();
        for k in src {
            let space = self.word_space(k);
            if space.is_empty() {
                continue;
            }
            let images: Vec<Chain> = space.words().par_iter().map(|w| op(w)).collect();
            let mut by_target: HashMap<Key, Vec<(usize, usize, Rational)>> = HashMap::new();
            for (j, c) in images.iter().enumerate() {
                for (w, x) in c.terms() {
                    if let Some(t) = classify(k, w) {
                        let i = self
                            .word_space(&t)
                            .index_of(w)
                            .unwrap_or_else(|| panic!("{} is not in {t}", crate::word::word_string(w)));
                        by_target.entry(t).or_default().push((i, j, x.clone()));
                    }
                }
            }
            for (t, entries) in by_target {
                let mut b = MatrixBuilder::new(self.word_space(&t).len(), space.len());
                for (i, j, x) in entries {
                    b.add(i, j, &x);
                }
                out.insert(*k, t, b.build());
            }
        }
        out
    }

    /// Word-level image of one basis word under an elementary operator.
    pub fn apply(&self, op: BlockOp, w: &[Slot]) -> Chain {
        let o = &self.ops;
        let n = w.len() - 1;
        let weight = w[1..].iter().filter(|s| s.is_m()).count();
        match op {
            BlockOp::B => o.b(w),
            BlockOp::T => o.t(w),
            BlockOp::N => {
                let mut out = Chain::from_word(w.to_vec());
                let mut cur = out.clone();
                for _ in 0..weight {
                    cur = cur.apply(|x| o.t(x));
                    out.add_chain(&cur, &Rational::one());
                }
                out
            }
            BlockOp::OneMinusT => {
                let mut out = Chain::from_word(w.to_vec());
                out.add_chain(&o.t(w), &-Rational::one());
                out
            }
            BlockOp::Sigma => {
                let mut out = Chain::new();
                out.add(w.to_vec(), &rat(1, weight as i64 + 1));
                out
            }
            BlockOp::SigmaPrime => {
                let wt = weight as i64;
                let mut out = Chain::new();
                let mut cur = Chain::from_word(w.to_vec());
                for j in 0..wt {
                    out.add_chain(&cur, &rat(wt - j, wt + 1));
                    cur = cur.apply(|x| o.t(x));
                }
                out
            }
            BlockOp::F(j) => o.f_op(j, w),
            BlockOp::D => {
                let mut out = Chain::new();
                for j in 1..n {
                    out.add_chain(&o.f_op(j, w), &Rational::one());
                }
                out
            }
            BlockOp::DPrime => {
                let i = WordOps::last_m(w).expect("X words start in M");
                let mut out = Chain::new();
                out.add_chain(&self.apply(BlockOp::D, w), &-Rational::one());
                for j in i + 1..n {
                    let tf = o.f_op(j, w).apply(|x| o.t(x));
                    out.add_chain(&tf, &-Rational::one());
                }
                out
            }
        }
    }

    /// Matrix of an elementary operator on X^w_v.
    pub fn block(&self, op: BlockOp, v: i64, w: i64) -> Arc<ExactMatrix> {
        cached(&self.blocks, (op, v, w), || {
            let (tv, tw) = op.target(v, w);
            let src = self.space(v, w);
            let tgt = self.space(tv, tw);
            operator_matrix(&src, &tgt, |x| self.apply(op, x)).expect("word operator left its target space")
        })
    }

    /// t^k on X^w_v.
    pub fn t_pow(&self, v: i64, w: i64, k: usize) -> ExactMatrix {
        self.block(BlockOp::T, v, w).pow(k)
    }

    /// All (v, w) with 0 ≤ 2w ≤ v ≤ v_max.
    pub fn bidegrees(v_max: i64) -> Vec<(i64, i64)> {
        (0..=v_max).flat_map(|v| (0..=v / 2).map(move |w| (v, w))).collect()
    }

    /// Checks the elementary identities on every block with v ≤ v_max.
    pub fn check_laws(&self, v_max: i64) -> Ledger {
        use BlockOp::*;
        let bd = Self::bidegrees(v_max);
        let mut ledger = Ledger::new();
        let g = |op, v, w| self.block(op, v, w);
        let mut law = |name: &str, f: &dyn Fn(i64, i64) -> bool| {
            let bad = bd.iter().find(|&&(v, w)| !f(v, w));
            let outcome = match bad {
                None => Ok(()),
                Some((v, w)) => {
                    Err(crate::Error::IdentityViolation { law: name.to_string(), block: format!("X(v={v},w={w})") })
                }
            };
            ledger.record(name, bd.len(), outcome);
        };
        let id = |v, w| ExactMatrix::identity(self.dim(v, w));
        law("t^(w+1) = id", &|v, w| self.t_pow(v, w, w as usize + 1) == id(v, w));
        law("b b = 0", &|v, w| g(B, v - 1, w).mul(&g(B, v, w)).is_zero());
        law("d d = 0", &|v, w| g(D, v, w + 1).mul(&g(D, v, w)).is_zero());
        law("d' d' = 0", &|v, w| g(DPrime, v, w + 1).mul(&g(DPrime, v, w)).is_zero());
        law("d b = -b d", &|v, w| g(D, v - 1, w).mul(&g(B, v, w)).add(&g(B, v, w + 1).mul(&g(D, v, w))).is_zero());
        law("d' b = -b d'", &|v, w| {
            g(DPrime, v - 1, w).mul(&g(B, v, w)).add(&g(B, v, w + 1).mul(&g(DPrime, v, w))).is_zero()
        });
        law("d' N = -N d", &|v, w| g(DPrime, v, w).mul(&g(N, v, w)).add(&g(N, v, w + 1).mul(&g(D, v, w))).is_zero());
        law("d (1-t) = -(1-t) d'", &|v, w| {
            g(D, v, w).mul(&g(OneMinusT, v, w)).add(&g(OneMinusT, v, w + 1).mul(&g(DPrime, v, w))).is_zero()
        });
        law("b N = N b", &|v, w| g(B, v, w).mul(&g(N, v, w)) == g(N, v - 1, w).mul(&g(B, v, w)));
        law("t b = b t", &|v, w| g(B, v, w).mul(&g(T, v, w)) == g(T, v - 1, w).mul(&g(B, v, w)));
        law("N (1-t) = 0", &|v, w| g(N, v, w).mul(&g(OneMinusT, v, w)).is_zero());
        law("rank N + rank (1-t) = dim", &|v, w| rank(&g(N, v, w)) + rank(&g(OneMinusT, v, w)) == self.dim(v, w));
        ledger
    }

    /// Contracting-homotopy identities for the rows (1 − t, N) together with
    /// b σ′ = σ′ b; these force relative periodic cyclic homology to vanish.
    pub fn check_contraction(&self, v_max: i64) -> Ledger {
        use BlockOp::*;
        let bd = Self::bidegrees(v_max);
        let mut ledger = Ledger::new();
        let mut law = |name: &str, f: &dyn Fn(i64, i64) -> bool| {
            let bad = bd.iter().find(|&&(v, w)| !f(v, w));
            let outcome = match bad {
                None => Ok(()),
                Some((v, w)) => {
                    Err(crate::Error::IdentityViolation { law: name.to_string(), block: format!("X(v={v},w={w})") })
                }
            };
            ledger.record(name, bd.len(), outcome);
        };
        let g = |op, v, w| self.block(op, v, w);
        let n_over = |v, w: i64| g(N, v, w).scale(&rat(1, w + 1));
        law("sigma N = N/(w+1)", &|v, w| g(Sigma, v, w).mul(&g(N, v, w)) == n_over(v, w));
        law("N sigma = N/(w+1)", &|v, w| g(N, v, w).mul(&g(Sigma, v, w)) == n_over(v, w));
        let target = |v, w| ExactMatrix::identity(self.dim(v, w)).sub(&n_over(v, w));
        law("(1-t) sigma' = id - N/(w+1)", &|v, w| g(OneMinusT, v, w).mul(&g(SigmaPrime, v, w)) == target(v, w));
        law("sigma' (1-t) = id - N/(w+1)", &|v, w| g(SigmaPrime, v, w).mul(&g(OneMinusT, v, w)) == target(v, w));
        law("b sigma' = sigma' b", &|v, w| {
            g(B, v, w).mul(&g(SigmaPrime, v, w)) == g(SigmaPrime, v - 1, w).mul(&g(B, v, w))
        });
        ledger
    }

    // ---- the double mixed complex X̂ and its total complex X̆ ----

    /// b̂ on the given pieces: (x, y) ↦ (bx + (1 − t)y, −by).
    pub fn hat_b(&self, keys: &[Key]) -> KeyedMap {
        let mut m = KeyedMap::new();
        for k in keys.iter().filter(|k| k.kind == Kind::X && valid(k.v, k.w)) {
            let b = self.block(BlockOp::B, k.v, k.w);
            if k.c == 0 {
                m.insert(*k, Key::x(k.v - 1, k.w, 0), (*b).clone());
            } else {
                m.insert(*k, Key::x(k.v, k.w, 0), (*self.block(BlockOp::OneMinusT, k.v, k.w)).clone());
                m.insert(*k, Key::x(k.v - 1, k.w, 1), b.neg());
            }
        }
        m
    }

    /// d̂(x, y) = (dx, d′y).
    pub fn hat_d(&self, keys: &[Key]) -> KeyedMap {
        let mut m = KeyedMap::new();
        for k in keys.iter().filter(|k| k.kind == Kind::X && valid(k.v, k.w)) {
            let op = if k.c == 0 { BlockOp::D } else { BlockOp::DPrime };
            m.insert(*k, Key::x(k.v, k.w + 1, k.c), (*self.block(op, k.v, k.w)).clone());
        }
        m
    }

    /// B̂(x, y) = (0, Nx).
    pub fn hat_connes(&self, keys: &[Key]) -> KeyedMap {
        let mut m = KeyedMap::new();
        for k in keys.iter().filter(|k| k.kind == Kind::X && k.c == 0 && valid(k.v, k.w)) {
            m.insert(*k, Key::x(k.v, k.w, 1), (*self.block(BlockOp::N, k.v, k.w)).clone());
        }
        m
    }

    /// Every X piece with v ≤ v_max, both positions.
    pub fn hat_keys(v_max: i64) -> Vec<Key> {
        Self::bidegrees(v_max).into_iter().flat_map(|(v, w)| [Key::x(v, w, 0), Key::x(v, w, 1)]).collect()
    }

    /// The double mixed complex identities on all pieces with v ≤ v_max.
    pub fn check_hat(&self, v_max: i64) -> Ledger {
        let keys = Self::hat_keys(v_max);
        let (b, d, bb) = (self.hat_b(&keys), self.hat_d(&keys), self.hat_connes(&keys));
        // second factors must be defined on the images too
        let all = Self::hat_keys(v_max + 1);
        let (b2, d2, bb2) = (self.hat_b(&all), self.hat_d(&all), self.hat_connes(&all));
        let zero = KeyedMap::new();
        let mut ledger = Ledger::new();
        let n = keys.len();
        ledger.record("b^ b^ = 0", n, b2.compose(&b).expect_eq(&zero, "b^ b^ = 0"));
        ledger.record("d^ d^ = 0", n, d2.compose(&d).expect_eq(&zero, "d^ d^ = 0"));
        ledger.record("B^ B^ = 0", n, bb2.compose(&bb).expect_eq(&zero, "B^ B^ = 0"));
        ledger.record(
            "b^ d^ + d^ b^ = 0",
            n,
            b2.compose(&d).add(&d2.compose(&b)).expect_eq(&zero, "b^ d^ + d^ b^ = 0"),
        );
        ledger.record(
            "b^ B^ + B^ b^ = 0",
            n,
            b2.compose(&bb).add(&bb2.compose(&b)).expect_eq(&zero, "b^ B^ + B^ b^ = 0"),
        );
        ledger.record(
            "d^ B^ + B^ d^ = 0",
            n,
            d2.compose(&bb).add(&bb2.compose(&d)).expect_eq(&zero, "d^ B^ + B^ d^ = 0"),
        );
        ledger
    }

    /// Pieces of X̆_n = ⊕_w X̂^w_{n+w}.
    pub fn breve_layout(&self, n: i64) -> Layout {
        let mut pieces = Vec::new();
        for w in 0..=n.max(0) {
            for k in [Key::x(n + w, w, 0), Key::x(n + w - 1, w, 1)] {
                if valid(k.v, k.w) {
                    pieces.push((k, self.piece_dim(&k)));
                }
            }
        }
        Layout::new(pieces)
    }

    fn breve_keys(&self, n: i64) -> Vec<Key> {
        self.breve_layout(n).keys().collect()
    }

    /// b̆ = b̂ + d̂ as a KeyedMap on X̆_n.
    pub fn breve_b_map(&self, n: i64) -> KeyedMap {
        let keys = self.breve_keys(n);
        self.hat_b(&keys).add(&self.hat_d(&keys))
    }

    /// b̆: X̆_n → X̆_{n−1}.
    pub fn breve_b(&self, n: i64) -> ExactMatrix {
        self.breve_b_map(n).to_matrix(&self.breve_layout(n), &self.breve_layout(n - 1))
    }

    /// B̆: X̆_n → X̆_{n+1}.
    pub fn breve_connes(&self, n: i64) -> ExactMatrix {
        let keys = self.breve_keys(n);
        self.hat_connes(&keys).to_matrix(&self.breve_layout(n), &self.breve_layout(n + 1))
    }

    pub fn breve_dim(&self, n: i64) -> usize {
        self.breve_layout(n).dim()
    }

    /// Relative Hochschild homology dimensions from (X̆, b̆).
    pub fn relative_hh_dims(&self, n_max: usize) -> Result<Vec<usize>> {
        (0..=n_max as i64).map(|n| homology_dim(&self.breve_b(n + 1), &self.breve_b(n))).collect()
    }

    // ---- the cokernel X̄ ----

    /// Canonical class data of X̄^w_v: the least word of each signed t-orbit
    /// represents its class; orbits that return with sign −1 are zero.
    pub fn quotient(&self, v: i64, w: i64) -> Arc<Quotient> {
        cached(&self.quotients, (v, w), || {
            let space = self.space(v, w);
            let dim = space.len();
            let mut class: Vec<Option<Option<(usize, Rational)>>> = vec![None; dim];
            let mut reps = Vec::new();
            for start in 0..dim {
                if class[start].is_some() {
                    continue;
                }
                // walk the orbit recording t^k(x) = s_k · y_k
                let mut orbit = vec![(start, Rational::one())];
                let mut cur = space.words()[start].clone();
                let mut s = Rational::one();
                loop {
                    let next = self.ops.t(&cur);
                    let (nw, c) = next.terms().next().expect("t is a signed permutation on X");
                    let (nw, c) = (nw.clone(), c.clone());
                    s *= &c;
                    let idx = space.index_of(&nw).unwrap();
                    if idx == start {
                        break;
                    }
                    orbit.push((idx, s.clone()));
                    cur = nw;
                }
                if s != Rational::one() {
                    for (i, _) in orbit {
                        class[i] = Some(None);
                    }
                    continue;
                }
                let rep_pos = orbit.iter().map(|o| o.0).min().unwrap();
                let rep_sign = orbit.iter().find(|o| o.0 == rep_pos).unwrap().1.clone();
                let ci = reps.len();
                reps.push(rep_pos);
                for (i, sk) in orbit {
                    // [y_k] = s_k [x] and [x] = s_rep [rep]
                    class[i] = Some(Some((ci, &sk * &rep_sign)));
                }
            }
            let mut proj = MatrixBuilder::new(reps.len(), dim);
            for (i, c) in class.iter().enumerate() {
                if let Some(Some((ci, s))) = c {
                    proj.add(*ci, i, s);
                }
            }
            let proj = proj.build();
            let mut lift = MatrixBuilder::new(dim, reps.len());
            for (ci, &r) in reps.iter().enumerate() {
                lift.add(r, ci, &Rational::one());
            }
            let lift = lift.build();
            let nbar = self.block(BlockOp::N, v, w).mul(&lift);
            let n = v - w;
            let mut scale = MatrixBuilder::new(dim, dim);
            for (i, word) in space.words().iter().enumerate() {
                let iw = WordOps::last_m(word).unwrap() as i64;
                scale.add(i, i, &rat(n - iw + 2, v + 2));
            }
            let frak_p = proj.mul(&scale.build());
            Quotient { reps, proj, lift, nbar, frak_p }
        })
    }

    /// b̄: X̄^w_v → X̄^w_{v−1}.
    pub fn bar_b(&self, v: i64, w: i64) -> ExactMatrix {
        let (q, q1) = (self.quotient(v, w), self.quotient(v - 1, w));
        if !valid(v - 1, w) {
            return ExactMatrix::zeros(0, q.dim());
        }
        q1.proj.mul(&self.block(BlockOp::B, v, w)).mul(&q.lift)
    }

    /// d̄: X̄^w_v → X̄^{w+1}_v.
    pub fn bar_d(&self, v: i64, w: i64) -> ExactMatrix {
        let q = self.quotient(v, w);
        if !valid(v, w + 1) {
            return ExactMatrix::zeros(0, q.dim());
        }
        self.quotient(v, w + 1).proj.mul(&self.block(BlockOp::D, v, w)).mul(&q.lift)
    }

    /// b and d descend to the cokernel: both kill im(1 − t) after projection.
    pub fn check_quotient(&self, v_max: i64) -> Ledger {
        let bd = Self::bidegrees(v_max);
        let mut ledger = Ledger::new();
        for (name, op, shift) in
            [("b descends to coker(1-t)", BlockOp::B, (-1, 0)), ("d descends to coker(1-t)", BlockOp::D, (0, 1))]
        {
            let bad = bd.iter().find(|&&(v, w)| {
                let (tv, tw) = (v + shift.0, w + shift.1);
                if !valid(tv, tw) {
                    return false;
                }
                !self
                    .quotient(tv, tw)
                    .proj
                    .mul(&self.block(op, v, w))
                    .mul(&self.block(BlockOp::OneMinusT, v, w))
                    .is_zero()
            });
            let outcome = match bad {
                None => Ok(()),
                Some((v, w)) => Err(crate::Error::NotWellDefined(format!("{name} fails on X(v={v},w={w})"))),
            };
            ledger.record(name, bd.len(), outcome);
        }
        ledger
    }

    /// Pieces of Tot(X̄)_n = ⊕_w X̄^w_{n+w}.
    pub fn bar_layout(&self, n: i64) -> Layout {
        let pieces = (0..=n.max(0))
            .map(|w| Key::bar(n + w, w, 0))
            .filter(|k| valid(k.v, k.w))
            .map(|k| (k, self.piece_dim(&k)))
            .collect();
        Layout::new(pieces)
    }

    /// b̄ + d̄ on the given X̄ pieces.
    pub fn bar_total_map(&self, keys: &[Key]) -> KeyedMap {
        let mut m = KeyedMap::new();
        for k in keys.iter().filter(|k| k.kind == Kind::Bar && valid(k.v, k.w)) {
            m.insert(*k, Key::bar(k.v - 1, k.w, k.c), self.bar_b(k.v, k.w));
            m.insert(*k, Key::bar(k.v, k.w + 1, k.c), self.bar_d(k.v, k.w));
        }
        m
    }

    /// Differential of Tot(X̄): degree n → n−1.
    pub fn bar_boundary(&self, n: i64) -> ExactMatrix {
        let lay = self.bar_layout(n);
        let keys: Vec<Key> = lay.keys().collect();
        self.bar_total_map(&keys).to_matrix(&lay, &self.bar_layout(n - 1))
    }

    /// Relative cyclic homology dimensions from Tot(X̄).
    pub fn relative_hc_dims(&self, n_max: usize) -> Result<Vec<usize>> {
        (0..=n_max as i64).map(|n| homology_dim(&self.bar_boundary(n + 1), &self.bar_boundary(n))).collect()
    }

    // ---- connection maps out of the bar complex of A ----

    /// Basis of A ⊗ Ā^{⊗n}.
    pub fn a_words(&self, n: i64) -> Arc<WordSpace> {
        self.a_space(n, 0)
    }

    /// Normalized Hochschild boundary of A on A ⊗ Ā^{⊗n}.
    pub fn a_boundary(&self, n: i64) -> ExactMatrix {
        let src = self.a_words(n);
        if n == 0 {
            return ExactMatrix::zeros(0, src.len());
        }
        operator_matrix(&src, &self.a_words(n - 1), |x| self.ops.b(x)).expect("b preserves A-words")
    }

    fn sum_chains(parts: impl IntoIterator<Item = Chain>, c: &Rational) -> Chain {
        let mut out = Chain::new();
        for p in parts {
            out.add_chain(&p, c);
        }
        out
    }

    /// δ¹ = Σ_{j=0}^{n} t∘F_j.
    pub fn delta1_word(&self, a: &[Slot]) -> Chain {
        let n = a.len() - 1;
        Self::sum_chains((0..=n).map(|j| self.ops.f_op(j, a).apply(|x| self.ops.t(x))), &Rational::one())
    }

    /// δ² = μ₀∘F₁.
    pub fn delta2_word(&self, a: &[Slot]) -> Chain {
        self.ops.f_op(1, a).apply(|x| self.ops.mu(0, x))
    }

    /// The correction ζ̂ on an A-headed word y: F₀y + Σ_{j>i(y)} t∘F_j y.
    pub fn zeta_word(&self, y: &[Slot]) -> Chain {
        let o = &self.ops;
        let n = y.len() - 1;
        let i = WordOps::last_m(y).expect("zeta needs a slot in M");
        let mut out = o.f_op(0, y);
        for j in i + 1..=n {
            out.add_chain(&o.f_op(j, y).apply(|x| o.t(x)), &Rational::one());
        }
        out
    }

    /// δ³ = ζ̂ applied to the A-headed part Σ_{i=1}^{n−1} F_i of the snake map.
    pub fn delta3_word(&self, a: &[Slot]) -> Chain {
        let n = a.len() - 1;
        let mut out = Chain::new();
        for i in 1..n {
            out.add_chain(&self.ops.f_op(i, a).apply(|y| self.zeta_word(y)), &Rational::one());
        }
        out
    }

    /// The closed form Σ_{i=2}^{n−1} F₀F_i − Σ_{0≤i<j≤n} tF_iF_j.  Not a chain
    /// map once f ≠ 0; kept for the test that shows it.
    pub fn delta3_variant_word(&self, a: &[Slot]) -> Chain {
        let o = &self.ops;
        let n = a.len() - 1;
        let mut out = Chain::new();
        for i in 2..n {
            out.add_chain(&o.f_op(i, a).apply(|x| o.f_op(0, x)), &Rational::one());
        }
        for j in 1..=n {
            let fj = o.f_op(j, a);
            for i in 0..j {
                out.add_chain(&fj.apply(|x| o.f_op(i, x)).apply(|x| o.t(x)), &-Rational::one());
            }
        }
        out
    }

    /// δ̆ on A ⊗ Ā^{⊗n} as a KeyedMap into X̆_{n−1}.
    pub fn delta_breve_map(&self, n: i64) -> KeyedMap {
        self.delta_breve_map_with(n, false)
    }

    fn delta_breve_map_with(&self, n: i64, variant: bool) -> KeyedMap {
        let src = self.a_words(n);
        let key = Key::new(Kind::ABar, n, 0, 0);
        let mut m = KeyedMap::new();
        if n < 1 {
            return m;
        }
        let parts: [(Key, &dyn Fn(&[Slot]) -> Chain); 3] = [
            (Key::x(n - 1, 0, 0), &|a| self.delta1_word(a)),
            (Key::x(n - 2, 0, 1), &|a| self.delta2_word(a)),
            (Key::x(n - 1, 1, 1), &|a| if variant { self.delta3_variant_word(a) } else { self.delta3_word(a) }),
        ];
        for (k, f) in parts {
            if !valid(k.v, k.w) {
                continue;
            }
            let tgt = self.space(k.v, k.w);
            let mat = src
                .words()
                .iter()
                .map(|a| tgt.vector(&f(a)))
                .collect::<Result<Vec<_>>>()
                .expect("connection map leaves its target");
            m.insert(key, k, ExactMatrix::from_columns(tgt.len(), &mat));
        }
        m
    }

    /// δ̆: A ⊗ Ā^{⊗n} → X̆_{n−1}.
    pub fn delta_breve(&self, n: i64) -> ExactMatrix {
        let src = Layout::new(vec![(Key::new(Kind::ABar, n, 0, 0), self.a_words(n).len())]);
        self.delta_breve_map(n).to_matrix(&src, &self.breve_layout(n - 1))
    }

    /// δ̆ with [`SmallComplex::delta3_variant_word`] as third component.
    pub fn delta_breve_variant(&self, n: i64) -> ExactMatrix {
        let src = Layout::new(vec![(Key::new(Kind::ABar, n, 0, 0), self.a_words(n).len())]);
        self.delta_breve_map_with(n, true).to_matrix(&src, &self.breve_layout(n - 1))
    }

    /// δ̄: A ⊗ Ā^{⊗n} → X̄^0_{n−1}, the projection of δ¹.
    pub fn delta_bar(&self, n: i64) -> ExactMatrix {
        let src = Layout::new(vec![(Key::new(Kind::ABar, n, 0, 0), self.a_words(n).len())]);
        if !valid(n - 1, 0) {
            return ExactMatrix::zeros(0, src.dim());
        }
        let top = Layout::new(vec![(Key::x(n - 1, 0, 0), self.dim(n - 1, 0))]);
        let d1 = self.delta_breve_map(n).to_matrix(&src, &top);
        self.quotient(n - 1, 0).proj.mul(&d1)
    }

    /// X̄^0_n as the w = 0 piece of Tot(X̄)_n.
    pub fn bar_top_embedding(&self, n: i64) -> ExactMatrix {
        let k = Key::bar(n, 0, 0);
        let top = Layout::new(vec![(k, self.piece_dim(&k))]);
        KeyedMap::identity(top.pieces()).to_matrix(&top, &self.bar_layout(n))
    }

    /// δ̆ and δ̄ are chain maps: b̆δ̆ = −δ̆b and D̄δ̄ = −δ̄b.
    pub fn check_connection_chain_maps(&self, n_max: i64) -> Ledger {
        let mut ledger = Ledger::new();
        let mut bad_breve = None;
        let mut bad_bar = None;
        for n in 2..=n_max {
            let lhs = self.breve_b(n - 1).mul(&self.delta_breve(n));
            let rhs = self.delta_breve(n - 1).mul(&self.a_boundary(n)).neg();
            if lhs != rhs && bad_breve.is_none() {
                bad_breve = Some(n);
            }
            let lhs = self.bar_boundary(n - 1).mul(&self.bar_top_embedding(n - 1)).mul(&self.delta_bar(n));
            let rhs = self.bar_top_embedding(n - 2).mul(&self.delta_bar(n - 1)).mul(&self.a_boundary(n)).neg();
            if lhs != rhs && bad_bar.is_none() {
                bad_bar = Some(n);
            }
        }
        let err = |law: &str, n: Option<i64>| match n {
            None => Ok(()),
            Some(n) => Err(crate::Error::IdentityViolation { law: law.into(), block: format!("degree {n}") }),
        };
        let count = (n_max - 1).max(0) as usize;
        ledger.record("b~ delta~ = -delta~ b", count, err("b~ delta~ = -delta~ b", bad_breve));
        ledger.record("D- delta- = -delta- b", count, err("D- delta- = -delta- b", bad_bar));
        ledger
    }

    /// Dimension bookkeeping: the small models against the relative bar words.
    pub fn size_comparison(&self, n_max: i64, relative_dim: impl Fn(usize) -> usize) -> Vec<(usize, usize, usize)> {
        (0..=n_max).map(|n| (self.breve_dim(n), self.bar_layout(n).dim(), relative_dim(n as usize))).collect()
    }

    /// Vanishing of relative periodic cyclic homology: the contraction
    /// identities hold on every block with v ≤ v_max.
    pub fn goodwillie_certificate(&self, v_max: i64, n_max: usize) -> Certificate {
        let ledger = self.check_contraction(v_max);
        let hp: Vec<usize> = vec![0; n_max + 1];
        let details = if ledger.all_hold() { json!({ "hp_relative": hp, "v_max": v_max }) } else { json!(null) };
        Certificate::new("goodwillie", &self.name, details, ledger)
    }
}
