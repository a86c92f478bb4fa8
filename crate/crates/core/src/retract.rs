//! The deformation retracts between the relative bar complex ker(π) and the
//! small model X̆, built from word operators and glued by the perturbation
//! lemma, together with the dictionary to the oracle's basis.

use num::One;
use serde_json::json;

use crate::bar::RelativeOracle;
use crate::blocks::{Key, KeyedMap, Kind, Layout};
use crate::error::{Error, Result};
use crate::linalg::{induced_map, rank, ExactMatrix, HomologyBasis, MatrixBuilder, Rational};
use crate::perturb::{perturb, HomotopyData, Perturbed};
use crate::report::{Certificate, Ledger};
use crate::small::{valid, BlockOp, SmallComplex};
use crate::word::{Chain, Slot, WordOps};

/// Piece of the big model holding a word: M-headed words with k interior
/// M slots lie in X^k, A-headed ones with k ≥ 1 in the A-part of weight k−1.
pub fn big_key(w: &[Slot]) -> Key {
    let n = w.len() as i64 - 1;
    let k = w[1..].iter().filter(|s| s.is_m()).count() as i64;
    if w[0].is_m() {
        Key::new(Kind::BigM, n + k, k, 0)
    } else if k >= 1 {
        Key::new(Kind::BigA, n + k - 1, k - 1, 0)
    } else {
        Key::new(Kind::ABar, n, 0, 0)
    }
}

/// Piece of X̆ holding an M-headed word, in position c.
pub fn x_key(w: &[Slot], c: u8) -> Key {
    let n = w.len() as i64 - 1;
    let k = w[1..].iter().filter(|s| s.is_m()).count() as i64;
    debug_assert!(w[0].is_m());
    Key::x(n + k, k, c)
}

/// Converts an E-word of the oracle (A-basis first, then M) into slots.
pub fn slots_of(word: &[usize], dim_a: usize) -> Vec<Slot> {
    word.iter().map(|&i| if i < dim_a { Slot::A(i) } else { Slot::M(i - dim_a) }).collect()
}

/// Graded pieces of the retract, degree n = v − w (+ c).
pub struct BarRetract<'a> {
    pub s: &'a SmallComplex,
}

fn graded(
    map: &KeyedMap,
    src: impl Fn(i64) -> Layout,
    tgt: impl Fn(i64) -> Layout,
    shift: i64,
    degrees: std::ops::RangeInclusive<i64>,
) -> Vec<ExactMatrix> {
    degrees.map(|n| map.to_matrix(&src(n), &tgt(n + shift))).collect()
}

fn keys_of(layouts: impl Iterator<Item = Layout>) -> Vec<Key> {
    let mut keys: Vec<Key> = layouts.flat_map(|l| l.keys().collect::<Vec<_>>()).collect();
    keys.sort();
    keys.dedup();
    keys
}

impl<'a> BarRetract<'a> {
    pub fn new(s: &'a SmallComplex) -> Self {
        BarRetract { s }
    }

    fn ops(&self) -> &WordOps {
        &self.s.ops
    }

    fn in_weights(w: i64, weight: Option<i64>) -> bool {
        weight.is_none_or(|x| x == w)
    }

    /// X̆_n, optionally restricted to one weight column.
    pub fn small_layout(&self, n: i64, weight: Option<i64>) -> Layout {
        let pieces =
            self.s.breve_layout(n).pieces().iter().filter(|(k, _)| Self::in_weights(k.w, weight)).cloned().collect();
        Layout::new(pieces)
    }

    /// 𝔛̆_n = ⊕_w 𝔛̂^w_{n+w}, optionally restricted to one weight column.
    pub fn big_layout(&self, n: i64, weight: Option<i64>) -> Layout {
        let mut pieces = Vec::new();
        for w in 0..=n.max(0) {
            if !Self::in_weights(w, weight) {
                continue;
            }
            let m = Key::new(Kind::BigM, n + w, w, 0);
            if valid(m.v, m.w) {
                pieces.push((m, self.s.piece_dim(&m)));
            }
            if n > w {
                let a = Key::new(Kind::BigA, n + w, w, 0);
                pieces.push((a, self.s.piece_dim(&a)));
            }
        }
        Layout::new(pieces)
    }

    /// Only the A-part of 𝔛̂^w in degree n.
    fn big_a_layout(&self, n: i64, w: i64) -> Layout {
        let l = self.big_layout(n, Some(w));
        Layout::new(l.pieces().iter().filter(|p| p.0.kind == Kind::BigA).cloned().collect())
    }

    /// Only the second summand X^w_{n+w−1} of X̂^w in degree n.
    fn small_second_layout(&self, n: i64, w: i64) -> Layout {
        let l = self.small_layout(n, Some(w));
        Layout::new(l.pieces().iter().filter(|p| p.0.c == 1).cloned().collect())
    }

    // ---- word-level maps ----

    /// 𝔡̂ = Σ_{j<n} F_j + t∘F_n.
    pub fn frak_d_word(&self, w: &[Slot]) -> Chain {
        let o = self.ops();
        let n = w.len() - 1;
        let mut out = Chain::new();
        for j in 0..n {
            out.add_chain(&o.f_op(j, w), &Rational::one());
        }
        out.add_chain(&o.f_op(n, w).apply(|x| o.t(x)), &Rational::one());
        out
    }

    /// ϑ₁(x) = Σ_{l=0}^{n−i(x)} 1 ⊗ 𝔱^l(x).
    pub fn vartheta1_word(&self, x: &[Slot]) -> Chain {
        let o = self.ops();
        let n = x.len() - 1;
        let i = WordOps::last_m(x).expect("needs a slot in M");
        let mut out = Chain::new();
        let mut cur = Chain::from_word(x.to_vec());
        for _ in 0..=n - i {
            out.add_chain(&cur.apply(|y| o.prepend_unit(y)), &Rational::one());
            cur = cur.apply(|y| o.frak_t(y));
        }
        out
    }

    /// ε(y) = −Σ_{l=0}^{n−i(y)} 1 ⊗ 𝔱^l(y).
    pub fn epsilon_word(&self, y: &[Slot]) -> Chain {
        let mut out = Chain::new();
        out.add_chain(&self.vartheta1_word(y), &-Rational::one());
        out
    }

    // ---- keyed maps ----

    /// b ⊕ −b on X̂.
    pub fn diag_small_d(&self, keys: &[Key]) -> KeyedMap {
        let mut m = KeyedMap::new();
        for k in keys.iter().filter(|k| k.kind == Kind::X && valid(k.v, k.w)) {
            let b = self.s.block(BlockOp::B, k.v, k.w);
            let b = if k.c == 0 { (*b).clone() } else { b.neg() };
            m.insert(*k, Key::x(k.v - 1, k.w, k.c), b);
        }
        m
    }

    /// 𝔟₀ ⊕ 𝔟₁: the parts of b that keep the kind of slot 0.
    pub fn big_diag_d(&self, keys: &[Key]) -> KeyedMap {
        let src: Vec<Key> = keys.iter().filter(|k| matches!(k.kind, Kind::BigM | Kind::BigA)).cloned().collect();
        self.s.word_map(
            &src,
            |w| self.ops().b(w),
            |k, w| {
                let t = big_key(w);
                (t.kind == k.kind).then_some(t)
            },
        )
    }

    /// α = μ₀^M + μ_n^M from the A-part to the M-part.
    pub fn alpha(&self, keys: &[Key]) -> KeyedMap {
        let src: Vec<Key> = keys.iter().filter(|k| k.kind == Kind::BigA).cloned().collect();
        self.s.word_map(&src, |w| self.ops().b(w), |_, w| w[0].is_m().then(|| big_key(w)))
    }

    /// 𝔟̂ = 𝔟₀ ⊕ 𝔟₁ + α: the Hochschild boundary without the cocycle.
    pub fn big_b(&self, keys: &[Key]) -> KeyedMap {
        let src: Vec<Key> = keys.iter().filter(|k| matches!(k.kind, Kind::BigM | Kind::BigA)).cloned().collect();
        self.s.word_map(&src, |w| self.ops().b(w), |_, w| Some(big_key(w)))
    }

    /// 𝔡̂ on the big model (or on A-words, where it is the snake map).
    pub fn frak_d(&self, keys: &[Key]) -> KeyedMap {
        let src: Vec<Key> =
            keys.iter().filter(|k| matches!(k.kind, Kind::BigM | Kind::BigA | Kind::ABar)).cloned().collect();
        self.s.word_map(&src, |w| self.frak_d_word(w), |_, w| Some(big_key(w)))
    }

    /// ϑ₁ from the second summand of X̂ to the A-part.
    pub fn vartheta1(&self, keys: &[Key]) -> KeyedMap {
        let src: Vec<Key> = keys.iter().filter(|k| k.kind == Kind::X && k.c == 1).cloned().collect();
        self.s.word_map(&src, |w| self.vartheta1_word(w), |_, w| Some(big_key(w)))
    }

    /// ϑ̂ = id ⊕ ϑ₁.
    pub fn vartheta_hat(&self, keys: &[Key]) -> KeyedMap {
        let mut m = self.vartheta1(keys);
        for k in keys.iter().filter(|k| k.kind == Kind::X && k.c == 0 && valid(k.v, k.w)) {
            m.insert(*k, Key::new(Kind::BigM, k.v, k.w, 0), ExactMatrix::identity(self.s.dim(k.v, k.w)));
        }
        m
    }

    /// θ₁ = μ₀^M from the A-part to the second summand.
    pub fn theta1(&self, keys: &[Key]) -> KeyedMap {
        let src: Vec<Key> = keys.iter().filter(|k| k.kind == Kind::BigA).cloned().collect();
        self.s.word_map(&src, |w| self.ops().mu_part(0, w, true), |_, w| Some(x_key(w, 1)))
    }

    /// θ̂(x, y) = (x + ty, μ₀^M y).
    pub fn theta_hat(&self, keys: &[Key]) -> KeyedMap {
        let src: Vec<Key> = keys.iter().filter(|k| k.kind == Kind::BigA).cloned().collect();
        let mut m = self.theta1(keys);
        m = m.add(&self.s.word_map(&src, |w| self.ops().t(w), |_, w| Some(x_key(w, 0))));
        for k in keys.iter().filter(|k| k.kind == Kind::BigM && valid(k.v, k.w)) {
            m.insert(*k, Key::x(k.v, k.w, 0), ExactMatrix::identity(self.s.dim(k.v, k.w)));
        }
        m
    }

    /// ε̂(x, y) = (0, εy).
    pub fn epsilon_hat(&self, keys: &[Key]) -> KeyedMap {
        let src: Vec<Key> = keys.iter().filter(|k| k.kind == Kind::BigA).cloned().collect();
        self.s.word_map(&src, |w| self.epsilon_word(w), |_, w| Some(big_key(w)))
    }

    /// ζ̂(x, y) = (0, F₀y + Σ_{j>i(y)} t∘F_j y).
    pub fn zeta_hat(&self, keys: &[Key]) -> KeyedMap {
        let src: Vec<Key> = keys.iter().filter(|k| k.kind == Kind::BigA).cloned().collect();
        self.s.word_map(&src, |w| self.s.zeta_word(w), |_, w| Some(x_key(w, 1)))
    }

    /// The t-part of θ̂ regarded as a map into the M-part: used for α∘ε = t.
    fn t_into_big(&self, keys: &[Key]) -> KeyedMap {
        let src: Vec<Key> = keys.iter().filter(|k| k.kind == Kind::BigA).cloned().collect();
        self.s.word_map(&src, |w| self.ops().t(w), |_, w| Some(big_key(w)))
    }

    fn all_keys(&self, top: i64, weight: Option<i64>) -> Vec<Key> {
        keys_of((-1..=top + 1).flat_map(|n| [self.small_layout(n, weight), self.big_layout(n, weight)]))
    }

    // ---- the three retracts ----

    /// The column retract (X^w[−1], −b) ⇄ (A ⊗ B_{w+1}, 𝔟₁) with θ₁, ϑ₁, ε.
    pub fn column_retract(&self, w: i64, top: i64) -> Result<HomotopyData> {
        let keys = self.all_keys(top, Some(w));
        let small = |n| self.small_second_layout(n, w);
        let big = |n| self.big_a_layout(n, w);
        let sd = self.diag_small_d(&keys).restrict_source(|k| k.c == 1);
        let bd = self.big_diag_d(&keys).restrict_source(|k| k.kind == Kind::BigA);
        HomotopyData::new(
            graded(&sd, small, small, -1, 0..=top),
            graded(&bd, big, big, -1, 0..=top),
            graded(&self.vartheta1(&keys), small, big, 0, 0..=top),
            graded(&self.theta1(&keys), big, small, 0, 0..=top),
            graded(&self.epsilon_hat(&keys), big, big, 1, 0..=top - 1),
        )
    }

    /// The diagonal retract (id ⊕ ϑ₁, id ⊕ θ₁, (0, ε)) before α is added.
    pub fn diagonal_retract(&self, top: i64, weight: Option<i64>) -> Result<HomotopyData> {
        let keys = self.all_keys(top, weight);
        let small = |n| self.small_layout(n, weight);
        let big = |n| self.big_layout(n, weight);
        let mut i = self.vartheta1(&keys);
        let mut p = self.theta1(&keys);
        for k in keys.iter().filter(|k| k.kind == Kind::X && k.c == 0 && valid(k.v, k.w)) {
            let id = ExactMatrix::identity(self.s.dim(k.v, k.w));
            i.insert(*k, Key::new(Kind::BigM, k.v, k.w, 0), id.clone());
            p.insert(Key::new(Kind::BigM, k.v, k.w, 0), *k, id);
        }
        HomotopyData::new(
            graded(&self.diag_small_d(&keys), small, small, -1, 0..=top),
            graded(&self.big_diag_d(&keys), big, big, -1, 0..=top),
            graded(&i, small, big, 0, 0..=top),
            graded(&p, big, small, 0, 0..=top),
            graded(&self.epsilon_hat(&keys), big, big, 1, 0..=top - 1),
        )
    }

    /// The column-wise retract (b̂, 𝔟̂, ϑ̂, θ̂, ε̂) summed over all weights.
    pub fn hat_retract(&self, top: i64) -> Result<HomotopyData> {
        let keys = self.all_keys(top, None);
        let small = |n| self.small_layout(n, None);
        let big = |n| self.big_layout(n, None);
        HomotopyData::new(
            graded(&self.s.hat_b(&keys), small, small, -1, 0..=top),
            graded(&self.big_b(&keys), big, big, -1, 0..=top),
            graded(&self.vartheta_hat(&keys), small, big, 0, 0..=top),
            graded(&self.theta_hat(&keys), big, small, 0, 0..=top),
            graded(&self.epsilon_hat(&keys), big, big, 1, 0..=top - 1),
        )
    }

    /// 𝔡̂ in degrees 0..=top, as the perturbation of `hat_retract`.
    pub fn frak_d_graded(&self, top: i64) -> Vec<ExactMatrix> {
        let keys = self.all_keys(top, None);
        let big = |n| self.big_layout(n, None);
        graded(&self.frak_d(&keys), big, big, -1, 0..=top)
    }

    /// Perturbs the column-wise retract by 𝔡̂; the result is the retract
    /// (b̆, ϑ̆, θ̆, ε̆) between X̆ and ker(π) in degrees 0..top.
    pub fn glued(&self, top: i64) -> Result<Perturbed> {
        perturb(&self.hat_retract(top)?, &self.frak_d_graded(top))
    }

    /// Checks every stage of the construction in degrees ≤ top.
    pub fn check_stages(&self, top: i64) -> Result<(Ledger, Perturbed)> {
        let mut ledger = Ledger::new();
        let keys = self.all_keys(top, None);
        let tag = |l: Ledger, prefix: &str| {
            let mut out = Ledger::new();
            for mut r in l.records {
                r.law = format!("{prefix}: {}", r.law);
                out.records.push(r);
            }
            out
        };
        for w in 0..=top {
            ledger.extend(tag(self.column_retract(w, top)?.check(true), &format!("column retract w={w}")));
        }
        let n = keys.len();
        let mut one_minus_t = KeyedMap::new();
        for k in keys.iter().filter(|k| k.kind == Kind::X && k.c == 1 && valid(k.v, k.w)) {
            one_minus_t.insert(
                *k,
                Key::new(Kind::BigM, k.v, k.w, 0),
                (*self.s.block(BlockOp::OneMinusT, k.v, k.w)).clone(),
            );
        }
        let keys2 = self.all_keys(top + 1, None);
        ledger.record(
            "alpha vartheta1 = id - t",
            n,
            self.alpha(&keys2).compose(&self.vartheta1(&keys)).expect_eq(&one_minus_t, "alpha vartheta1 = id - t"),
        );
        ledger.record(
            "alpha epsilon = t",
            n,
            self.alpha(&keys2)
                .compose(&self.epsilon_hat(&keys))
                .expect_eq(&self.t_into_big(&keys), "alpha epsilon = t"),
        );

        // α-perturbation of the diagonal retract reproduces the hat retract
        let diag = self.diagonal_retract(top, None)?;
        ledger.extend(tag(diag.check(true), "diagonal retract"));
        let keys_all = self.all_keys(top, None);
        let big = |n| self.big_layout(n, None);
        let alpha_g = graded(&self.alpha(&keys_all), big, big, -1, 0..=top);
        let hat = self.hat_retract(top)?;
        let pert = perturb(&diag, &alpha_g)?;
        ledger.record("alpha-perturbed diagonal retract = hat retract", top as usize, same_data(&pert.data, &hat));
        ledger.extend(tag(hat.check(true), "hat retract"));

        // the four composites that make the glued retract explicit
        let (th, ep, vt, fd) =
            (self.theta_hat(&keys2), self.epsilon_hat(&keys2), self.vartheta_hat(&keys), self.frak_d(&keys2));
        let ep_src = self.epsilon_hat(&keys);
        let zero = KeyedMap::new();
        let hat_d = self.s.hat_d(&keys);
        ledger.record(
            "theta^ d^ vartheta^ = d^",
            n,
            th.compose(&fd.compose(&vt)).expect_eq(&hat_d, "theta^ d^ vartheta^ = d^"),
        );
        ledger.record(
            "epsilon^ d^ vartheta^ = 0",
            n,
            ep.compose(&fd.compose(&vt)).expect_eq(&zero, "epsilon^ d^ vartheta^ = 0"),
        );
        ledger.record(
            "theta^ d^ epsilon^ = zeta^",
            n,
            th.compose(&fd.compose(&ep_src)).expect_eq(&self.zeta_hat(&keys), "theta^ d^ epsilon^ = zeta^"),
        );
        ledger.record(
            "epsilon^ d^ epsilon^ = 0",
            n,
            ep.compose(&fd.compose(&ep_src)).expect_eq(&zero, "epsilon^ d^ epsilon^ = 0"),
        );

        // the glued retract has the announced closed form
        let glued = perturb(&hat, &self.frak_d_graded(top))?;
        let t1 = top - 1;
        let small = |n| self.small_layout(n, None);
        let b_breve = graded(&self.s.hat_b(&keys).add(&hat_d), small, small, -1, 0..=t1);
        let theta_breve = graded(&self.theta_hat(&keys).add(&self.zeta_hat(&keys)), big, small, 0, 0..=t1);
        let vartheta = graded(&vt, small, big, 0, 0..=t1);
        let eps = graded(&ep_src, big, big, 1, 0..=t1 - 1);
        let cmp = |name: &str, got: &[ExactMatrix], want: &[ExactMatrix]| match got
            .iter()
            .zip(want)
            .position(|(a, b)| a != b)
        {
            None => Ok(()),
            Some(n) => Err(Error::IdentityViolation { law: name.to_string(), block: format!("degree {n}") }),
        };
        ledger.record(
            "perturbed small differential = b~",
            t1 as usize + 1,
            cmp("perturbed small differential = b~", &glued.data.small_d, &b_breve),
        );
        ledger.record(
            "perturbed projection = theta^ + zeta^",
            t1 as usize + 1,
            cmp("perturbed projection = theta^ + zeta^", &glued.data.proj, &theta_breve),
        );
        ledger.record(
            "perturbed inclusion = vartheta^",
            t1 as usize + 1,
            cmp("perturbed inclusion = vartheta^", &glued.data.incl, &vartheta),
        );
        ledger.record(
            "perturbed homotopy = epsilon^",
            t1 as usize,
            cmp("perturbed homotopy = epsilon^", &glued.data.homotopy, &eps),
        );
        ledger.extend(tag(glued.data.check(true), "glued retract"));
        let max_nil = glued.nilpotency.iter().max().copied().unwrap_or(0);
        ledger.record(
            "delta h nilpotent within the number of weight columns",
            glued.nilpotency.len(),
            if max_nil as i64 <= top + 1 { Ok(()) } else { Err(Error::NotSmall { degree: max_nil }) },
        );
        Ok((ledger, glued))
    }
}

fn same_data(a: &HomotopyData, b: &HomotopyData) -> Result<()> {
    let fields: [(&str, &Vec<ExactMatrix>, &Vec<ExactMatrix>); 4] = [
        ("small differential", &a.small_d, &b.small_d),
        ("inclusion", &a.incl, &b.incl),
        ("projection", &a.proj, &b.proj),
        ("homotopy", &a.homotopy, &b.homotopy),
    ];
    for (name, x, y) in fields {
        if let Some(n) = x.iter().zip(y.iter()).position(|(p, q)| p != q) {
            return Err(Error::Mismatch(format!("{name} differs in degree {n}")));
        }
    }
    Ok(())
}

/// The glued retract together with the translation to the oracle basis.
pub struct OracleBridge<'a> {
    pub retract: BarRetract<'a>,
    pub oracle: &'a RelativeOracle,
    pub glued: Perturbed,
    pub top: i64,
}

impl<'a> OracleBridge<'a> {
    pub fn new(s: &'a SmallComplex, oracle: &'a RelativeOracle, top: i64) -> Result<Self> {
        let retract = BarRetract::new(s);
        let glued = retract.glued(top)?;
        Ok(OracleBridge { retract, oracle, glued, top })
    }

    /// Last degree where θ̆, ϑ̆ are available.
    pub fn window(&self) -> i64 {
        self.top - 1
    }

    pub fn theta(&self, n: i64) -> &ExactMatrix {
        &self.glued.data.proj[n as usize]
    }

    pub fn vartheta(&self, n: i64) -> &ExactMatrix {
        &self.glued.data.incl[n as usize]
    }

    /// Permutation from the oracle's relative basis to 𝔛̆_n.
    pub fn pi(&self, n: i64) -> Result<ExactMatrix> {
        let lay = self.retract.big_layout(n, None);
        let words = self.oracle.relative_words(n as usize);
        let da = self.oracle.dim_a();
        let mut b = MatrixBuilder::new(lay.dim(), words.len());
        let mut hit = vec![false; lay.dim()];
        for (j, w) in words.iter().enumerate() {
            let sw = slots_of(w, da);
            let k = big_key(&sw);
            let off = lay.offset(&k).ok_or_else(|| Error::NotBijective(format!("no piece {k} in degree {n}")))?;
            let idx = self
                .retract
                .s
                .word_space(&k)
                .index_of(&sw)
                .ok_or_else(|| Error::NotBijective(format!("word outside {k}")))?;
            if hit[off + idx] {
                return Err(Error::NotBijective(format!("two oracle words hit position {}", off + idx)));
            }
            hit[off + idx] = true;
            b.add(off + idx, j, &Rational::one());
        }
        if hit.iter().any(|h| !h) {
            return Err(Error::NotBijective(format!("degree {n}: the big model is larger than ker(pi)")));
        }
        Ok(b.build())
    }

    /// Permutation from the oracle's A-words to A ⊗ Ā^{⊗n}.
    pub fn a_perm(&self, n: i64) -> ExactMatrix {
        let words = self.oracle.a_bar.words(n as usize);
        let space = self.retract.s.a_words(n);
        let mut b = MatrixBuilder::new(space.len(), words.len());
        for (j, w) in words.iter().enumerate() {
            let i = space.index_of(&slots_of(w, usize::MAX)).expect("A-words agree");
            b.add(i, j, &Rational::one());
        }
        b.build()
    }

    /// θ̆∘Π: oracle relative degree n → X̆_n.
    pub fn theta_oracle(&self, n: i64) -> Result<ExactMatrix> {
        Ok(self.theta(n).mul(&self.pi(n)?))
    }

    /// ϑ̆ followed by Π⁻¹: X̆_n → oracle relative degree n.
    pub fn vartheta_oracle(&self, n: i64) -> Result<ExactMatrix> {
        Ok(self.pi(n)?.transpose().mul(self.vartheta(n)))
    }

    /// 𝔅̆ = Π B Π⁻¹ on ker(π), degree n → n+1.
    pub fn frak_connes(&self, n: i64) -> Result<ExactMatrix> {
        Ok(self.pi(n + 1)?.mul(&self.oracle.rel_connes(n as usize)).mul(&self.pi(n)?.transpose()))
    }

    /// Projection X̆_n → Tot(X̄)_n: keep the first summands, pass to classes.
    pub fn to_bar(&self, n: i64) -> ExactMatrix {
        let s = self.retract.s;
        let src = s.breve_layout(n);
        let mut m = KeyedMap::new();
        for (k, _) in src.pieces().iter().filter(|p| p.0.c == 0) {
            m.insert(*k, Key::bar(k.v, k.w, 0), s.quotient(k.v, k.w).proj.clone());
        }
        m.to_matrix(&src, &s.bar_layout(n))
    }

    /// Φ: Tot(BC(ker π))_n → Tot(X̄)_n, through the top column.
    pub fn phi(&self, n: i64) -> Result<ExactMatrix> {
        let top_col = self.oracle.rel_first_column(n as usize).transpose();
        Ok(self.to_bar(n).mul(&self.theta_oracle(n)?).mul(&top_col))
    }

    /// Small-model homology basis of X̆ in degree n.
    pub fn breve_hh_basis(&self, n: i64) -> Result<HomologyBasis> {
        let s = self.retract.s;
        HomologyBasis::new(&s.breve_b(n + 1), &s.breve_b(n))
    }

    pub fn bar_hc_basis(&self, n: i64) -> Result<HomologyBasis> {
        let s = self.retract.s;
        HomologyBasis::new(&s.bar_boundary(n + 1), &s.bar_boundary(n))
    }

    /// The certificate for the retract and its compatibility with the oracle.
    pub fn certify(&self) -> Result<Ledger> {
        let s = self.retract.s;
        let o = self.oracle;
        let w = self.window();
        let mut ledger = Ledger::new();
        let mut first_bad =
            |name: &str, count: usize, f: &dyn Fn(i64) -> Result<bool>, range: std::ops::RangeInclusive<i64>| {
                let mut bad = None;
                for n in range {
                    match f(n) {
                        Ok(true) => {}
                        Ok(false) => {
                            bad =
                                Some(Error::IdentityViolation { law: name.to_string(), block: format!("degree {n}") });
                            break;
                        }
                        Err(e) => {
                            bad = Some(e);
                            break;
                        }
                    }
                }
                ledger.record(name, count, bad.map_or(Ok(()), Err));
            };
        let cnt = (w + 1) as usize;
        first_bad("Pi is a bijection onto the big model", cnt, &|n| self.pi(n).map(|_| true), 0..=self.top);
        first_bad(
            "Pi b Pi^-1 = b-frak + d-frak",
            cnt,
            &|n| {
                let keys: Vec<Key> = self.retract.big_layout(n, None).keys().collect();
                let lay = |m| self.retract.big_layout(m, None);
                let total = self.retract.big_b(&keys).add(&self.retract.frak_d(&keys)).to_matrix(&lay(n), &lay(n - 1));
                Ok(self.pi(n - 1)?.mul(&o.rel_boundary(n as usize)) == total.mul(&self.pi(n)?))
            },
            1..=self.top,
        );
        first_bad(
            "theta~ vartheta~ = id",
            cnt,
            &|n| Ok(self.theta(n).mul(self.vartheta(n)) == ExactMatrix::identity(s.breve_dim(n))),
            0..=w,
        );
        first_bad(
            "B~ = theta~ B-frak vartheta~",
            cnt,
            &|n| Ok(self.theta(n + 1).mul(&self.frak_connes(n)?).mul(self.vartheta(n)) == s.breve_connes(n)),
            0..=w - 1,
        );
        first_bad(
            "B-frak epsilon~ = 0",
            cnt,
            &|n| Ok(self.frak_connes(n + 1)?.mul(&self.glued.data.homotopy[n as usize]).is_zero()),
            0..=w - 1,
        );
        first_bad(
            "epsilon~ B-frak = 0",
            cnt,
            &|n| Ok(self.glued.data.homotopy[(n + 1) as usize].mul(&self.frak_connes(n)?).is_zero()),
            0..=w - 2,
        );
        first_bad(
            "theta~ B-frak = B~ theta~",
            cnt,
            &|n| Ok(self.theta(n + 1).mul(&self.frak_connes(n)?) == s.breve_connes(n).mul(self.theta(n))),
            0..=w - 1,
        );
        first_bad(
            "B-frak vartheta~ = vartheta~ B~",
            cnt,
            &|n| Ok(self.frak_connes(n)?.mul(self.vartheta(n)) == self.vartheta(n + 1).mul(&s.breve_connes(n))),
            0..=w - 1,
        );
        first_bad(
            "theta~ induces an isomorphism on HH",
            cnt,
            &|n| {
                let src = o.rel_hh_basis(n as usize)?;
                let tgt = self.breve_hh_basis(n)?;
                let m = induced_map(&src, &tgt, &self.theta_oracle(n)?)?;
                Ok(src.dim() == tgt.dim() && rank(&m) == src.dim())
            },
            0..=w - 1,
        );
        first_bad(
            "theta~ delta = delta~ (chain level)",
            cnt,
            &|n| {
                let snake = self.pi(n - 1)?.mul(&o.snake_hh_chain(n as usize)).mul(&self.a_perm(n).transpose());
                Ok(self.theta(n - 1).mul(&snake) == s.delta_breve(n))
            },
            1..=w,
        );
        first_bad(
            "Phi is a chain map",
            cnt,
            &|n| Ok(s.bar_boundary(n).mul(&self.phi(n)?) == self.phi(n - 1)?.mul(&o.rel_tot(n as isize))),
            1..=w,
        );
        first_bad(
            "Phi induces an isomorphism on HC",
            cnt,
            &|n| {
                let src = o.rel_hc_basis(n as usize)?;
                let tgt = self.bar_hc_basis(n)?;
                let m = induced_map(&src, &tgt, &self.phi(n)?)?;
                Ok(src.dim() == tgt.dim() && rank(&m) == src.dim())
            },
            0..=w - 1,
        );
        first_bad(
            "Phi delta = delta- (chain level)",
            cnt,
            &|n| {
                let lhs = self.phi(n - 1)?.mul(&o.snake_hc_chain(n as usize));
                let top = o.a_first_column(n as usize).transpose();
                let rhs = s.bar_top_embedding(n - 1).mul(&s.delta_bar(n)).mul(&self.a_perm(n)).mul(&top);
                Ok(lhs == rhs)
            },
            1..=w,
        );
        Ok(ledger)
    }
}

/// Runs every check of the retract for one extension in degrees < top.
pub fn verify_bar_retract(s: &SmallComplex, oracle: &RelativeOracle, top: i64) -> Certificate {
    let run = || -> Result<(Ledger, Vec<usize>)> {
        let retract = BarRetract::new(s);
        let (mut ledger, glued) = retract.check_stages(top)?;
        let bridge = OracleBridge { retract, oracle, glued, top };
        ledger.extend(bridge.certify()?);
        Ok((ledger, bridge.glued.nilpotency.clone()))
    };
    match run() {
        Ok((ledger, nil)) => {
            Certificate::new("bar_retract", &s.name, json!({ "window": top - 1, "nilpotency": nil }), ledger)
        }
        Err(e) => Certificate::failed("bar_retract", &s.name, &e),
    }
}
