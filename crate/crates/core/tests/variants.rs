//! Alternative signs and coefficients for several closed forms, checked
//! against the derived operators.  Each variant stays in the library so the
//! blocks where it breaks are pinned down here.

use relcyc::algebra::{dual_numbers, quartic_truncation, upper_triangular_extension};
use relcyc::blocks::KeyedMap;
use relcyc::harmonic::Harmonic;
use relcyc::small::SmallComplex;

#[test]
fn karoubi_variant_is_not_a_homotopy_commutator() {
    let s = SmallComplex::new(&quartic_truncation());
    let h = Harmonic::new(&s);
    let keys = SmallComplex::hat_keys(5);
    let pieces: Vec<_> = keys.iter().map(|k| (*k, s.piece_dim(k))).collect();
    let id = KeyedMap::identity(&pieces);
    let (d, dr) = (h.ddot_d(&keys), h.ddot_dr(&keys));
    let commutator = d.compose(&dr).add(&dr.compose(&d));
    assert!(id.sub(&h.kappa(&keys)).expect_eq(&commutator, "kappa").is_ok());
    assert!(id.sub(&h.kappa_variant(&keys)).expect_eq(&commutator, "kappa variant").is_err());
}

#[test]
fn closed_form_p_needs_minus_on_the_d_prime_sum() {
    let s = SmallComplex::new(&quartic_truncation());
    let h = Harmonic::new(&s);
    let mut plus_fails = Vec::new();
    for (v, w) in Harmonic::ddot_blocks(5) {
        let sp = h.harmonic_split(v, w).unwrap();
        assert_eq!(h.explicit_p(v, w).to_matrix(&sp.layout, &sp.layout), sp.p, "block ({v}, {w})");
        if h.explicit_p_plus(v, w).to_matrix(&sp.layout, &sp.layout) != sp.p {
            plus_fails.push((v, w));
        }
    }
    assert_eq!(plus_fails, vec![(4, 1), (5, 1)]);
}

#[test]
fn closed_form_p_sign_is_invisible_without_cocycle() {
    // with f = 0 the d′ sum on these blocks does not separate the two signs
    let s = SmallComplex::new(&upper_triangular_extension());
    let h = Harmonic::new(&s);
    for (v, w) in Harmonic::ddot_blocks(5) {
        let sp = h.harmonic_split(v, w).unwrap();
        assert_eq!(h.explicit_p_plus(v, w).to_matrix(&sp.layout, &sp.layout), sp.p, "block ({v}, {w})");
    }
}

#[test]
fn corrected_delta3_closed_forms_match_derived_maps() {
    for e in [dual_numbers(), upper_triangular_extension(), quartic_truncation()] {
        let s = SmallComplex::new(&e);
        let h = Harmonic::new(&s);
        for n in 2..=5 {
            assert_eq!(h.delta_hat3_closed(n).unwrap(), h.delta_hat3(n).unwrap(), "{} delta^3, n = {n}", e.name);
            assert_eq!(h.delta_tilde3_closed(n).unwrap(), h.delta_tilde3(n).unwrap(), "{} delta~3, n = {n}", e.name);
            assert_eq!(h.psd_delta1_closed(n).unwrap(), h.psdn(n - 1, 0).mul(&s.delta_bar(n)), "{} n = {n}", e.name);
        }
    }
}

#[test]
fn delta3_variants_agree_on_t2_and_fail_on_t3() {
    let s2 = SmallComplex::new(&upper_triangular_extension());
    let h2 = Harmonic::new(&s2);
    for n in 2..=5 {
        assert_eq!(h2.delta_hat3_variant(n).unwrap(), h2.delta_hat3(n).unwrap(), "n = {n}");
        assert_eq!(h2.delta_tilde3_variant(n).unwrap(), h2.delta_tilde3(n).unwrap(), "n = {n}");
    }
    let s3 = SmallComplex::new(&quartic_truncation());
    let h3 = Harmonic::new(&s3);
    let hat: Vec<i64> = (2..=5).filter(|&n| h3.delta_hat3_variant(n).unwrap() != h3.delta_hat3(n).unwrap()).collect();
    let tilde: Vec<i64> =
        (2..=5).filter(|&n| h3.delta_tilde3_variant(n).unwrap() != h3.delta_tilde3(n).unwrap()).collect();
    assert_eq!(hat, vec![5]);
    assert_eq!(tilde, vec![4, 5]);
}

#[test]
fn d_alpha_form_carries_no_extra_sign() {
    let s = SmallComplex::new(&quartic_truncation());
    let h = Harmonic::new(&s);
    let mut signed_fails = 0;
    for (v, w) in SmallComplex::bidegrees(6) {
        let direct = h.psdn(v, w);
        assert_eq!(h.d_alpha_form(v, w, false).unwrap(), direct, "block ({v}, {w})");
        if h.d_alpha_form(v, w, true).unwrap() != direct {
            signed_fails += 1;
        }
    }
    assert!(signed_fails > 0);
}

#[test]
fn lambda_form_matches_varsigma_bar() {
    let s = SmallComplex::new(&quartic_truncation());
    let h = Harmonic::new(&s);
    for (v, w) in SmallComplex::bidegrees(6) {
        assert_eq!(h.lambda_form(v, w).unwrap(), h.varsigma_bar(v, w), "block ({v}, {w})");
    }
}

#[test]
fn s_vanishes_on_homology_in_low_degrees() {
    // S is zero on HC here, so these examples do not fix the sign of S
    for e in [dual_numbers(), quartic_truncation()] {
        let s = SmallComplex::new(&e);
        let h = Harmonic::new(&s);
        for n in 2..=4 {
            assert!(h.s_operator(n).unwrap().is_zero(), "{} S_{n}", e.name);
        }
    }
}

#[test]
fn delta3_variant_is_a_chain_map_only_without_cocycle() {
    let not_chain = |s: &SmallComplex, n: i64| {
        let lhs = s.breve_b(n - 1).mul(&s.delta_breve_variant(n));
        lhs != s.delta_breve_variant(n - 1).mul(&s.a_boundary(n)).neg()
    };
    let s2 = SmallComplex::new(&upper_triangular_extension());
    assert!((2..=5).all(|n| !not_chain(&s2, n)));
    let s3 = SmallComplex::new(&quartic_truncation());
    let bad: Vec<i64> = (2..=5).filter(|&n| not_chain(&s3, n)).collect();
    assert!(!bad.is_empty() && bad[0] == 3, "{bad:?}");
    for n in 2..=5 {
        let lhs = s3.breve_b(n - 1).mul(&s3.delta_breve(n));
        assert_eq!(lhs, s3.delta_breve(n - 1).mul(&s3.a_boundary(n)).neg(), "n = {n}");
    }
}
