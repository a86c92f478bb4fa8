//! The homological perturbation lemma on degree-windowed data.
//!
//! Conventions: i: Y → X and p: X → Y are chain maps, h: X → X has degree +1
//! and i∘p − id = d∘h + h∘d.  A perturbation δ of d gives
//! A = (id − δh)⁻¹δ and the perturbed data
//! ∂¹ = ∂ + pAi, i¹ = i + hAi, p¹ = p + pAh, h¹ = h + hAh.

use crate::error::{Error, Result};
use crate::linalg::ExactMatrix;
use crate::report::Ledger;

/// Homotopy equivalence data in degrees 0..=top.
///
/// `small_d[n]` and `big_d[n]` go from degree n to n−1 (index 0 holds the
/// zero map to the empty degree −1); `homotopy[n]` goes from n to n+1 and is
/// stored for n < top only.
#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyData {
    pub top: usize,
    pub small_d: Vec<ExactMatrix>,
    pub big_d: Vec<ExactMatrix>,
    pub incl: Vec<ExactMatrix>,
    pub proj: Vec<ExactMatrix>,
    pub homotopy: Vec<ExactMatrix>,
}

fn check_shape(m: &ExactMatrix, rows: usize, cols: usize, what: &str, n: usize) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(Error::InvalidInput(format!(
            "{what} in degree {n} has shape {:?}, expected ({rows}, {cols})",
            m.shape()
        )));
    }
    Ok(())
}

fn law(ledger: &mut Ledger, name: &str, degrees: impl Iterator<Item = usize>, holds: impl Fn(usize) -> bool) {
    let mut count = 0;
    let mut bad = None;
    for n in degrees {
        count += 1;
        if bad.is_none() && !holds(n) {
            bad = Some(n);
        }
    }
    let outcome = match bad {
        None => Ok(()),
        Some(n) => Err(Error::IdentityViolation { law: name.to_string(), block: format!("degree {n}") }),
    };
    ledger.record(name, count, outcome);
}

impl HomotopyData {
    pub fn new(
        small_d: Vec<ExactMatrix>,
        big_d: Vec<ExactMatrix>,
        incl: Vec<ExactMatrix>,
        proj: Vec<ExactMatrix>,
        homotopy: Vec<ExactMatrix>,
    ) -> Result<Self> {
        let len = small_d.len();
        if len == 0 || big_d.len() != len || incl.len() != len || proj.len() != len || homotopy.len() + 1 != len {
            return Err(Error::InvalidInput("inconsistent degree windows".into()));
        }
        let top = len - 1;
        let ys: Vec<usize> = small_d.iter().map(|m| m.ncols()).collect();
        let xs: Vec<usize> = big_d.iter().map(|m| m.ncols()).collect();
        for n in 0..=top {
            let (ty, tx) = if n == 0 { (0, 0) } else { (ys[n - 1], xs[n - 1]) };
            check_shape(&small_d[n], ty, ys[n], "small differential", n)?;
            check_shape(&big_d[n], tx, xs[n], "big differential", n)?;
            check_shape(&incl[n], xs[n], ys[n], "inclusion", n)?;
            check_shape(&proj[n], ys[n], xs[n], "projection", n)?;
            if n < top {
                check_shape(&homotopy[n], xs[n + 1], xs[n], "homotopy", n)?;
            }
        }
        Ok(HomotopyData { top, small_d, big_d, incl, proj, homotopy })
    }

    /// Y = X with i = p = id and h = 0.
    pub fn trivial(d: Vec<ExactMatrix>) -> Result<Self> {
        let ids: Vec<ExactMatrix> = d.iter().map(|m| ExactMatrix::identity(m.ncols())).collect();
        let h = (0..d.len().saturating_sub(1)).map(|n| ExactMatrix::zeros(d[n + 1].ncols(), d[n].ncols())).collect();
        Self::new(d.clone(), d, ids.clone(), ids, h)
    }

    pub fn small_dim(&self, n: usize) -> usize {
        self.small_d[n].ncols()
    }

    pub fn big_dim(&self, n: usize) -> usize {
        self.big_d[n].ncols()
    }

    /// Verifies the defining identities; with `special`, also
    /// p i = id, h i = 0, p h = 0, h h = 0.
    pub fn check(&self, special: bool) -> Ledger {
        let mut ledger = Ledger::new();
        let top = self.top;
        let (d, s, i, p, h) = (&self.big_d, &self.small_d, &self.incl, &self.proj, &self.homotopy);
        law(&mut ledger, "d d = 0", 2..=top, |n| d[n - 1].mul(&d[n]).is_zero());
        law(&mut ledger, "del del = 0", 2..=top, |n| s[n - 1].mul(&s[n]).is_zero());
        law(&mut ledger, "i is a chain map", 1..=top, |n| d[n].mul(&i[n]) == i[n - 1].mul(&s[n]));
        law(&mut ledger, "p is a chain map", 1..=top, |n| s[n].mul(&p[n]) == p[n - 1].mul(&d[n]));
        law(&mut ledger, "i p - id = d h + h d", 0..top, |n| {
            let lhs = i[n].mul(&p[n]).sub(&ExactMatrix::identity(self.big_dim(n)));
            let mut rhs = d[n + 1].mul(&h[n]);
            if n > 0 {
                rhs = rhs.add(&h[n - 1].mul(&d[n]));
            }
            lhs == rhs
        });
        if special {
            law(&mut ledger, "p i = id", 0..=top, |n| p[n].mul(&i[n]) == ExactMatrix::identity(self.small_dim(n)));
            law(&mut ledger, "h i = 0", 0..top, |n| h[n].mul(&i[n]).is_zero());
            law(&mut ledger, "p h = 0", 0..top, |n| p[n + 1].mul(&h[n]).is_zero());
            law(&mut ledger, "h h = 0", 0..top.saturating_sub(1), |n| h[n + 1].mul(&h[n]).is_zero());
        }
        ledger
    }
}

/// Result of a perturbation: the new data (window shrinks by one degree)
/// and, per degree, the least k with (δh)^k = 0.
#[derive(Clone, Debug)]
pub struct Perturbed {
    pub data: HomotopyData,
    pub nilpotency: Vec<usize>,
}

/// Applies the perturbation lemma.  `delta[n]` maps degree n to n−1.
pub fn perturb(data: &HomotopyData, delta: &[ExactMatrix]) -> Result<Perturbed> {
    let top = data.top;
    if top == 0 {
        return Err(Error::InvalidInput("perturbation needs at least two degrees".into()));
    }
    if delta.len() != top + 1 {
        return Err(Error::InvalidInput("perturbation window does not match the data".into()));
    }
    for n in 0..=top {
        check_shape(&delta[n], data.big_d[n].nrows(), data.big_dim(n), "perturbation", n)?;
    }
    let total: Vec<ExactMatrix> = (0..=top).map(|n| data.big_d[n].add(&delta[n])).collect();
    for n in 2..=top {
        if !total[n - 1].mul(&total[n]).is_zero() {
            return Err(Error::CompositionNotZero(format!("(d + delta)^2 in degree {n}")));
        }
    }
    // A[n] = Σ_k (δ_n h_{n−1})^k δ_n, degree n → n−1
    let mut a = vec![ExactMatrix::zeros(0, data.big_dim(0))];
    let mut nilpotency = vec![0];
    for n in 1..=top {
        let dh = delta[n].mul(&data.homotopy[n - 1]);
        let mut term = delta[n].clone();
        let mut acc = term.clone();
        let mut k = 1;
        loop {
            term = dh.mul(&term);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
            k += 1;
            if k > data.big_dim(n - 1) + 2 {
                return Err(Error::NotSmall { degree: n });
            }
        }
        // the power of δh that first vanishes on the image of δ
        nilpotency.push(k);
        a.push(acc);
    }
    let (i, p, h) = (&data.incl, &data.proj, &data.homotopy);
    let new_top = top - 1;
    let small_d = (0..=new_top)
        .map(|n| if n == 0 { data.small_d[0].clone() } else { data.small_d[n].add(&p[n - 1].mul(&a[n]).mul(&i[n])) })
        .collect();
    let big_d = (0..=new_top).map(|n| total[n].clone()).collect();
    let incl =
        (0..=new_top).map(|n| if n == 0 { i[0].clone() } else { i[n].add(&h[n - 1].mul(&a[n]).mul(&i[n])) }).collect();
    let proj = (0..=new_top).map(|n| p[n].add(&p[n].mul(&a[n + 1]).mul(&h[n]))).collect();
    let homotopy = (0..new_top).map(|n| h[n].add(&h[n].mul(&a[n + 1]).mul(&h[n]))).collect();
    let data = HomotopyData::new(small_d, big_d, incl, proj, homotopy)?;
    Ok(Perturbed { data, nilpotency })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id_complex() -> Vec<ExactMatrix> {
        // k --id--> k in degrees 1 → 0
        vec![ExactMatrix::zeros(0, 1), ExactMatrix::identity(1), ExactMatrix::zeros(1, 0)]
    }

    #[test]
    fn trivial_data_is_special() {
        let data = HomotopyData::trivial(id_complex()).unwrap();
        assert!(data.check(true).all_hold());
    }

    #[test]
    fn contraction_onto_zero() {
        let d = id_complex();
        let e = |r, c| ExactMatrix::zeros(r, c);
        let data = HomotopyData::new(
            vec![e(0, 0), e(0, 0), e(0, 0)],
            d,
            vec![e(1, 0), e(1, 0), e(0, 0)],
            vec![e(0, 1), e(0, 1), e(0, 0)],
            vec![ExactMatrix::from_i64(&[&[-1]]), e(0, 1)],
        )
        .unwrap();
        assert!(data.check(true).all_hold(), "{:?}", data.check(true));
    }

    #[test]
    fn zero_perturbation_changes_nothing() {
        let data = HomotopyData::trivial(id_complex()).unwrap();
        let delta: Vec<ExactMatrix> = data.big_d.iter().map(|m| ExactMatrix::zeros(m.nrows(), m.ncols())).collect();
        let out = perturb(&data, &delta).unwrap().data;
        assert_eq!(out.small_d[1], data.small_d[1]);
        assert_eq!(out.incl[1], data.incl[1]);
    }
}
