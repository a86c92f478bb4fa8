use num::{BigInt, Integer, One, Zero};
use proptest::prelude::*;
use relcyc::algebra::{
    dual_numbers, extension_from_ideal, quartic_truncation, truncated_polynomial, upper_triangular_extension,
};
use relcyc::bar::RelativeOracle;
use relcyc::harmonic::Harmonic;
use relcyc::linalg::{kernel_basis, rank, rat, ExactMatrix, Rational};
use relcyc::small::SmallComplex;

/// Rank by fraction-free Bareiss elimination over the integers, after
/// clearing denominators row by row.
fn bareiss_rank(m: &ExactMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .to_dense()
        .into_iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect();
    let (rows, cols) = m.shape();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn matrix() -> impl Strategy<Value = ExactMatrix> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
        proptest::collection::vec((-3i64..4, 1i64..4), r * c).prop_map(move |v| {
            let entries: Vec<Rational> = v.into_iter().map(|(n, d)| rat(n, d)).collect();
            ExactMatrix::from_dense(r, c, &entries)
        })
    })
}

/// Products of two thin factors, so low ranks are common.
fn low_rank_matrix() -> impl Strategy<Value = ExactMatrix> {
    (1usize..6, 1usize..6, 0usize..4).prop_flat_map(|(r, c, k)| {
        (proptest::collection::vec(-2i64..3, r * k), proptest::collection::vec(-2i64..3, k * c)).prop_map(
            move |(x, y)| {
                let to = |v: Vec<i64>| v.into_iter().map(|n| rat(n, 1)).collect::<Vec<_>>();
                ExactMatrix::from_dense(r, k, &to(x)).mul(&ExactMatrix::from_dense(k, c, &to(y)))
            },
        )
    })
}

proptest! {
    #[test]
    fn rank_matches_bareiss(m in matrix()) {
        prop_assert_eq!(rank(&m), bareiss_rank(&m));
    }

    #[test]
    fn low_rank_matches_bareiss(m in low_rank_matrix()) {
        prop_assert_eq!(rank(&m), bareiss_rank(&m));
    }

    #[test]
    fn rank_nullity(m in matrix()) {
        let k = kernel_basis(&m);
        prop_assert_eq!(k.dim() + rank(&m), m.ncols());
        prop_assert!(m.mul(&k.basis_matrix()).is_zero());
    }

    #[test]
    fn rank_of_transpose(m in low_rank_matrix()) {
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }
}

/// ℚ[x]/(x^k) relative to (x^j) with 2j ≥ k, so the ideal squares to zero.
fn truncation() -> impl Strategy<Value = (usize, usize)> {
    (2usize..7).prop_flat_map(|k| ((k + 1) / 2..k).prop_map(move |j| (k, j)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn truncations_satisfy_the_laws((k, j) in truncation()) {
        let e = extension_from_ideal(&truncated_polynomial(k), &(j..k).collect::<Vec<_>>(), "trunc").unwrap();
        let s = SmallComplex::new(&e);
        for led in [s.check_laws(5), s.check_hat(5), s.check_quotient(5), s.check_contraction(5)] {
            prop_assert!(led.all_hold(), "{:?}", led.first_failure());
        }
    }

    #[test]
    fn truncations_match_the_oracle((k, j) in truncation()) {
        let e = extension_from_ideal(&truncated_polynomial(k), &(j..k).collect::<Vec<_>>(), "trunc").unwrap();
        let s = SmallComplex::new(&e);
        let o = RelativeOracle::new(&e);
        let n = if k > 4 { 2 } else { 3 };
        prop_assert_eq!(s.relative_hh_dims(n).unwrap(), o.relative_hh_dims(n).unwrap());
        prop_assert_eq!(s.relative_hc_dims(n).unwrap(), o.relative_hc_dims(n).unwrap());
    }

    #[test]
    fn harmonic_projection_on_truncations((k, j) in truncation()) {
        let e = extension_from_ideal(&truncated_polynomial(k), &(j..k).collect::<Vec<_>>(), "trunc").unwrap();
        let s = SmallComplex::new(&e);
        let h = Harmonic::new(&s);
        let led = h.check_harmonic(4).unwrap();
        prop_assert!(led.all_hold(), "{:?}", led.first_failure());
    }
}

#[test]
fn bareiss_agrees_on_complex_differentials() {
    for e in [dual_numbers(), upper_triangular_extension(), quartic_truncation()] {
        let s = SmallComplex::new(&e);
        let o = RelativeOracle::new(&e);
        for n in 1..=4 {
            let small = s.bar_boundary(n);
            assert_eq!(rank(&small), bareiss_rank(&small), "{} small, n = {n}", e.name);
            let big = o.rel_tot(n as isize);
            assert_eq!(rank(&big), bareiss_rank(&big), "{} bar, n = {n}", e.name);
        }
    }
}

#[test]
fn bareiss_on_known_ranks() {
    let m = ExactMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
    assert_eq!(bareiss_rank(&m), 2);
    assert_eq!(bareiss_rank(&ExactMatrix::zeros(3, 2)), 0);
    assert_eq!(bareiss_rank(&ExactMatrix::identity(4)), 4);
}
