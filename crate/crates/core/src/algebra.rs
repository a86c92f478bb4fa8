//! Structure-constant presentations of A, M, f and of E = A ⋉_f M.

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{int, Rational, Subspace};

/// Finite-dimensional unital algebra; basis element 0 is the unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraPresentation {
    pub labels: Vec<String>,
    /// `mult[(i * dim + j) * dim + k]` is the coefficient of e_k in e_i·e_j.
    mult: Vec<Rational>,
}

/// Left and right actions of the A-basis on M, as coefficient tables:
/// `left[a][j][k]` is the coefficient of m_k in e_a·m_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BimodulePresentation {
    pub labels: Vec<String>,
    pub left: Vec<Vec<Vec<Rational>>>,
    pub right: Vec<Vec<Vec<Rational>>>,
}

/// `values[i][j][k]` is the coefficient of m_k in f(e_i, e_j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalCocycle {
    pub values: Vec<Vec<Vec<Rational>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validation {
    pub valid: bool,
    pub first_failure: Option<String>,
}

impl Validation {
    fn ok() -> Self {
        Validation { valid: true, first_failure: None }
    }

    fn fail(msg: String) -> Self {
        Validation { valid: false, first_failure: Some(msg) }
    }
}

fn vec_is_zero(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_zero())
}

fn axpy(acc: &mut [Rational], s: &Rational, v: &[Rational]) {
    if s.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        *a += s * x;
    }
}

impl AlgebraPresentation {
    /// `table[i][j]` is the coordinate vector of e_i·e_j.
    pub fn new(labels: Vec<String>, table: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        let d = labels.len();
        if d == 0 {
            return Err(Error::InvalidInput("empty basis".into()));
        }
        if table.len() != d || table.iter().any(|r| r.len() != d || r.iter().any(|v| v.len() != d)) {
            return Err(Error::InvalidInput(format!("multiplication table must be {d}x{d}x{d}")));
        }
        let mult = table.into_iter().flatten().flatten().collect();
        Ok(AlgebraPresentation { labels, mult })
    }

    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> Vec<Rational>) -> Result<Self> {
        let d = labels.len();
        let table = (0..d).map(|i| (0..d).map(|j| f(i, j)).collect()).collect();
        Self::new(labels, table)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Coordinates of e_i·e_j.
    pub fn product(&self, i: usize, j: usize) -> &[Rational] {
        let d = self.dim();
        &self.mult[(i * d + j) * d..(i * d + j + 1) * d]
    }

    pub fn table(&self) -> Vec<Vec<Vec<Rational>>> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| self.product(i, j).to_vec()).collect()).collect()
    }

    pub fn multiply(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let d = self.dim();
        let mut out = vec![Rational::zero(); d];
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[j].is_zero() {
                    continue;
                }
                axpy(&mut out, &(&x[i] * &y[j]), self.product(i, j));
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    /// The field ℚ.
    pub fn ground_field() -> Self {
        Self::new(vec!["1".into()], vec![vec![vec![int(1)]]]).expect("static table")
    }

    /// Returns a copy with one structure constant shifted by `delta`.
    pub fn perturbed(&self, i: usize, j: usize, k: usize, delta: &Rational) -> Self {
        let d = self.dim();
        let mut out = self.clone();
        out.mult[(i * d + j) * d + k] += delta;
        out
    }
}

pub fn validate_algebra(a: &AlgebraPresentation) -> Validation {
    let d = a.dim();
    for i in 0..d {
        let e = a.basis_vector(i);
        if a.product(0, i) != e.as_slice() || a.product(i, 0) != e.as_slice() {
            return Validation::fail(format!("basis element 0 is not a two-sided unit on {}", a.labels[i]));
        }
    }
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let lhs = a.multiply(a.product(i, j), &a.basis_vector(k));
                let rhs = a.multiply(&a.basis_vector(i), a.product(j, k));
                if lhs != rhs {
                    return Validation::fail(format!(
                        "associativity fails on ({}, {}, {})",
                        a.labels[i], a.labels[j], a.labels[k]
                    ));
                }
            }
        }
    }
    Validation::ok()
}

impl BimodulePresentation {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Coordinates of (Σ x_a e_a)·m_j.
    pub fn act_left(&self, x: &[Rational], m: &[Rational]) -> Vec<Rational> {
        self.act(&self.left, x, m)
    }

    pub fn act_right(&self, m: &[Rational], x: &[Rational]) -> Vec<Rational> {
        self.act(&self.right, x, m)
    }

    fn act(&self, table: &[Vec<Vec<Rational>>], x: &[Rational], m: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (j, mj) in m.iter().enumerate() {
                if mj.is_zero() {
                    continue;
                }
                axpy(&mut out, &(xa * mj), &table[a][j]);
            }
        }
        out
    }

    fn shape_ok(&self, da: usize) -> bool {
        let dm = self.dim();
        [&self.left, &self.right]
            .iter()
            .all(|t| t.len() == da && t.iter().all(|r| r.len() == dm && r.iter().all(|v| v.len() == dm)))
    }
}

pub fn validate_bimodule(a: &AlgebraPresentation, m: &BimodulePresentation) -> Validation {
    let (da, dm) = (a.dim(), m.dim());
    if !m.shape_ok(da) {
        return Validation::fail("bimodule action tables have the wrong shape".into());
    }
    let unit = a.basis_vector(0);
    for j in 0..dm {
        let mj = unit_vec(dm, j);
        if m.act_left(&unit, &mj) != mj || m.act_right(&mj, &unit) != mj {
            return Validation::fail(format!("unit does not act trivially on {}", m.labels[j]));
        }
    }
    for x in 0..da {
        for y in 0..da {
            for j in 0..dm {
                let mj = unit_vec(dm, j);
                let (ex, ey) = (a.basis_vector(x), a.basis_vector(y));
                let names = (&a.labels[x], &a.labels[y], &m.labels[j]);
                if m.act_left(a.product(x, y), &mj) != m.act_left(&ex, &m.act_left(&ey, &mj)) {
                    return Validation::fail(format!("left action not associative on {names:?}"));
                }
                if m.act_right(&mj, a.product(x, y)) != m.act_right(&m.act_right(&mj, &ex), &ey) {
                    return Validation::fail(format!("right action not associative on {names:?}"));
                }
                if m.act_right(&m.act_left(&ex, &mj), &ey) != m.act_left(&ex, &m.act_right(&mj, &ey)) {
                    return Validation::fail(format!("actions do not commute on {names:?}"));
                }
            }
        }
    }
    Validation::ok()
}

fn unit_vec(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

impl NormalCocycle {
    pub fn zero(da: usize, dm: usize) -> Self {
        NormalCocycle { values: vec![vec![vec![Rational::zero(); dm]; da]; da] }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(|v| vec_is_zero(v))
    }

    /// f(x, y) extended bilinearly.
    pub fn eval(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let dm = self.values.first().and_then(|r| r.first()).map_or(0, |v| v.len());
        let mut out = vec![Rational::zero(); dm];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                axpy(&mut out, &(xi * yj), &self.values[i][j]);
            }
        }
        out
    }
}

pub fn validate_cocycle(a: &AlgebraPresentation, m: &BimodulePresentation, f: &NormalCocycle) -> Validation {
    let (da, dm) = (a.dim(), m.dim());
    if f.values.len() != da || f.values.iter().any(|r| r.len() != da || r.iter().any(|v| v.len() != dm)) {
        return Validation::fail("cocycle table has the wrong shape".into());
    }
    for i in 0..da {
        if !vec_is_zero(&f.values[0][i]) || !vec_is_zero(&f.values[i][0]) {
            return Validation::fail(format!("normality fails: f(1, {0}) or f({0}, 1) is nonzero", a.labels[i]));
        }
    }
    for x in 0..da {
        for y in 0..da {
            for z in 0..da {
                let (ex, ez) = (a.basis_vector(x), a.basis_vector(z));
                let mut lhs = m.act_left(&ex, &f.values[y][z]);
                let t2 = f.eval(a.product(x, y), &ez);
                let t3 = f.eval(&ex, a.product(y, z));
                let t4 = m.act_right(&f.values[x][y], &ez);
                for k in 0..dm {
                    lhs[k] = &lhs[k] - &t2[k] + &t3[k] - &t4[k];
                }
                if !vec_is_zero(&lhs) {
                    return Validation::fail(format!(
                        "cocycle identity fails on ({}, {}, {})",
                        a.labels[x], a.labels[y], a.labels[z]
                    ));
                }
            }
        }
    }
    Validation::ok()
}

/// Sparse lookup tables used by the word-level operators.
#[derive(Clone, Debug)]
pub struct SparseTables {
    /// e_i·e_j in A, including the unit coefficient.
    pub a_mul: Vec<Vec<Vec<(usize, Rational)>>>,
    /// e_a·m_j
    pub left: Vec<Vec<Vec<(usize, Rational)>>>,
    /// m_j·e_a, indexed [j][a]
    pub right: Vec<Vec<Vec<(usize, Rational)>>>,
    /// f(e_i, e_j)
    pub cocycle: Vec<Vec<Vec<(usize, Rational)>>>,
}

fn sparse(v: &[Rational]) -> Vec<(usize, Rational)> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

/// E = A ⋉_f M with its multiplication table on the concatenated basis
/// (A-basis first, then M-basis).
#[derive(Clone, Debug)]
pub struct SquareZeroExtension {
    pub a: AlgebraPresentation,
    pub m: BimodulePresentation,
    pub f: NormalCocycle,
    pub e: AlgebraPresentation,
    pub tables: SparseTables,
    pub name: String,
}

impl SquareZeroExtension {
    pub fn dim_a(&self) -> usize {
        self.a.dim()
    }

    pub fn dim_m(&self) -> usize {
        self.m.dim()
    }

    pub fn f_is_zero(&self) -> bool {
        self.f.is_zero()
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }
}

pub fn build_extension(
    a: &AlgebraPresentation,
    m: &BimodulePresentation,
    f: &NormalCocycle,
) -> Result<SquareZeroExtension> {
    for v in [validate_algebra(a), validate_bimodule(a, m), validate_cocycle(a, m, f)] {
        if let Some(msg) = v.first_failure {
            return Err(Error::InvalidInput(msg));
        }
    }
    let (da, dm) = (a.dim(), m.dim());
    let d = da + dm;
    let labels: Vec<String> = a.labels.iter().chain(&m.labels).cloned().collect();
    let e = AlgebraPresentation::from_fn(labels, |i, j| {
        let mut out = vec![Rational::zero(); d];
        match (i < da, j < da) {
            (true, true) => {
                out[..da].clone_from_slice(a.product(i, j));
                out[da..].clone_from_slice(&f.values[i][j]);
            }
            (true, false) => out[da..].clone_from_slice(&m.left[i][j - da]),
            (false, true) => out[da..].clone_from_slice(&m.right[j][i - da]),
            (false, false) => {}
        }
        out
    })?;
    let v = validate_algebra(&e);
    if let Some(msg) = v.first_failure {
        return Err(Error::InvalidInput(format!("extension product: {msg}")));
    }
    let tables = SparseTables {
        a_mul: (0..da).map(|i| (0..da).map(|j| sparse(a.product(i, j))).collect()).collect(),
        left: (0..da).map(|x| (0..dm).map(|j| sparse(&m.left[x][j])).collect()).collect(),
        right: (0..dm).map(|j| (0..da).map(|x| sparse(&m.right[x][j])).collect()).collect(),
        cocycle: (0..da).map(|i| (0..da).map(|j| sparse(&f.values[i][j])).collect()).collect(),
    };
    Ok(SquareZeroExtension { a: a.clone(), m: m.clone(), f: f.clone(), e, tables, name: String::new() })
}

fn check_index_set(c: &AlgebraPresentation, ideal: &[usize]) -> Result<()> {
    let d = c.dim();
    for (pos, &i) in ideal.iter().enumerate() {
        if i >= d {
            return Err(Error::IndexOutOfRange { index: i, max: d - 1 });
        }
        if ideal[..pos].contains(&i) {
            return Err(Error::InvalidInput(format!("ideal index {i} repeated")));
        }
    }
    if ideal.contains(&0) {
        return Err(Error::InvalidInput("the unit cannot lie in the ideal".into()));
    }
    Ok(())
}

/// Checks that the span of `ideal` is a two-sided ideal of `c`.
pub fn check_ideal(c: &AlgebraPresentation, ideal: &[usize]) -> Result<()> {
    check_index_set(c, ideal)?;
    let outside: Vec<usize> = (0..c.dim()).filter(|i| !ideal.contains(i)).collect();
    for i in 0..c.dim() {
        for &j in ideal {
            for (x, y) in [(i, j), (j, i)] {
                let p = c.product(x, y);
                if outside.iter().any(|&k| !p[k].is_zero()) {
                    return Err(Error::NotAnIdeal(format!("{}·{}", c.labels[x], c.labels[y])));
                }
            }
        }
    }
    Ok(())
}

/// Splits C along a square-zero ideal spanned by basis elements, using the
/// complementary basis as the linear section C/M → C.
pub fn split_ideal(
    c: &AlgebraPresentation,
    ideal: &[usize],
) -> Result<(AlgebraPresentation, BimodulePresentation, NormalCocycle)> {
    check_ideal(c, ideal)?;
    for &i in ideal {
        for &j in ideal {
            if !vec_is_zero(c.product(i, j)) {
                return Err(Error::IdealNotSquareZero(format!("{}·{}", c.labels[i], c.labels[j])));
            }
        }
    }
    let comp: Vec<usize> = (0..c.dim()).filter(|i| !ideal.contains(i)).collect();
    let pick = |v: &[Rational], idx: &[usize]| -> Vec<Rational> { idx.iter().map(|&k| v[k].clone()).collect() };
    let a = AlgebraPresentation::from_fn(comp.iter().map(|&i| c.labels[i].clone()).collect(), |x, y| {
        pick(c.product(comp[x], comp[y]), &comp)
    })?;
    let left = comp.iter().map(|&x| ideal.iter().map(|&j| pick(c.product(x, j), ideal)).collect()).collect();
    let right = comp.iter().map(|&x| ideal.iter().map(|&j| pick(c.product(j, x), ideal)).collect()).collect();
    let m = BimodulePresentation { labels: ideal.iter().map(|&i| c.labels[i].clone()).collect(), left, right };
    let values = comp.iter().map(|&x| comp.iter().map(|&y| pick(c.product(x, y), ideal)).collect()).collect();
    Ok((a, m, NormalCocycle { values }))
}

/// Span of all products of `k` elements of the ideal.
pub fn ideal_power(c: &AlgebraPresentation, ideal: &[usize], k: usize) -> Subspace {
    let d = c.dim();
    let mut current: Vec<Vec<Rational>> = ideal.iter().map(|&i| c.basis_vector(i)).collect();
    for _ in 1..k {
        let mut next = Vec::new();
        for x in &current {
            for &j in ideal {
                next.push(c.multiply(x, &c.basis_vector(j)));
            }
        }
        current = Subspace::from_vectors(d, &next).basis();
    }
    Subspace::from_vectors(d, &current)
}

/// When a subspace is spanned by basis vectors, returns their indices.
pub fn coordinate_indices(s: &Subspace) -> Option<Vec<usize>> {
    let basis = s.basis();
    let mut out = Vec::new();
    for v in &basis {
        let nz: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
        if nz.len() != 1 {
            return None;
        }
        out.push(nz[0]);
    }
    Some(out)
}

/// C/I for an ideal spanned by basis vectors; the quotient basis is the
/// complement in its original order.  Also returns the old index of each
/// new basis element.
pub fn quotient_algebra(c: &AlgebraPresentation, kill: &[usize]) -> Result<(AlgebraPresentation, Vec<usize>)> {
    check_ideal(c, kill)?;
    let comp: Vec<usize> = (0..c.dim()).filter(|i| !kill.contains(i)).collect();
    let q = AlgebraPresentation::from_fn(comp.iter().map(|&i| c.labels[i].clone()).collect(), |x, y| {
        comp.iter().map(|&k| c.product(comp[x], comp[y])[k].clone()).collect()
    })?;
    Ok((q, comp))
}

/// Truncated polynomial ring ℚ[x]/(x^k) with basis 1, x, …, x^{k−1}.
pub fn truncated_polynomial(k: usize) -> AlgebraPresentation {
    let labels = (0..k).map(|i| if i == 0 { "1".to_string() } else { format!("x^{i}") }).collect();
    AlgebraPresentation::from_fn(labels, |i, j| {
        let mut v = vec![Rational::zero(); k];
        if i + j < k {
            v[i + j] = Rational::one();
        }
        v
    })
    .expect("static table")
}

/// Upper-triangular 2×2 matrices with basis (1, e11, e12).
pub fn upper_triangular() -> AlgebraPresentation {
    let labels = vec!["1".to_string(), "e11".to_string(), "e12".to_string()];
    AlgebraPresentation::from_fn(labels, |i, j| {
        let mut v = vec![Rational::zero(); 3];
        match (i, j) {
            (0, k) | (k, 0) => v[k] = Rational::one(),
            (1, 1) => v[1] = Rational::one(),
            (1, 2) => v[2] = Rational::one(),
            _ => {}
        }
        v
    })
    .expect("static table")
}

/// Test algebra T1: the dual numbers relative to (ε).
pub fn dual_numbers() -> SquareZeroExtension {
    named_split(&truncated_polynomial(2), &[1], "dual numbers")
}

/// Test algebra T2: upper-triangular 2×2 matrices relative to (e12).
pub fn upper_triangular_extension() -> SquareZeroExtension {
    named_split(&upper_triangular(), &[2], "upper triangular 2x2")
}

/// Test algebra T3: ℚ[x]/(x⁴) relative to (x²).
pub fn quartic_truncation() -> SquareZeroExtension {
    named_split(&truncated_polynomial(4), &[2, 3], "Q[x]/(x^4) rel (x^2)")
}

fn named_split(c: &AlgebraPresentation, ideal: &[usize], name: &str) -> SquareZeroExtension {
    let (a, m, f) = split_ideal(c, ideal).expect("square-zero ideal");
    build_extension(&a, &m, &f).expect("valid split").with_name(name)
}

pub fn extension_from_ideal(c: &AlgebraPresentation, ideal: &[usize], name: &str) -> Result<SquareZeroExtension> {
    let (a, m, f) = split_ideal(c, ideal)?;
    Ok(build_extension(&a, &m, &f)?.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_field_and_dual_numbers_are_valid() {
        assert!(validate_algebra(&AlgebraPresentation::ground_field()).valid);
        assert!(validate_algebra(&truncated_polynomial(2)).valid);
    }

    #[test]
    fn broken_associativity_is_reported() {
        // e1·e1 = 1, e1·e2 = e2, e2·e1 = e1, e2·e2 = 0 on the basis (1, e1, e2)
        let t = |i: usize, j: usize| -> Vec<Rational> {
            let mut v = vec![Rational::zero(); 3];
            match (i, j) {
                (0, k) | (k, 0) => v[k] = int(1),
                (1, 1) => v[0] = int(1),
                (1, 2) => v[2] = int(1),
                (2, 1) => v[1] = int(1),
                _ => {}
            }
            v
        };
        let a = AlgebraPresentation::from_fn(vec!["1".into(), "e1".into(), "e2".into()], t).unwrap();
        let v = validate_algebra(&a);
        assert!(!v.valid);
        assert!(v.first_failure.unwrap().contains("associativity"));
    }

    #[test]
    fn split_of_dual_numbers() {
        let (a, m, f) = split_ideal(&truncated_polynomial(2), &[1]).unwrap();
        assert_eq!(a.dim(), 1);
        assert_eq!(m.dim(), 1);
        assert!(f.is_zero());
    }

    #[test]
    fn split_rejects_non_ideals() {
        let c = truncated_polynomial(4);
        assert!(matches!(split_ideal(&c, &[1]), Err(Error::NotAnIdeal(_))));
        assert!(matches!(split_ideal(&c, &[1, 2, 3]), Err(Error::IdealNotSquareZero(_))));
    }
}
