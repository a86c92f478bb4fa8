use relcyc::algebra::{dual_numbers, quartic_truncation, upper_triangular_extension};
use relcyc::bar::RelativeOracle;
use relcyc::small::SmallComplex;

#[test]
fn laws_hold_on_test_algebras() {
    for e in [dual_numbers(), upper_triangular_extension(), quartic_truncation()] {
        let s = SmallComplex::new(&e);
        for led in [
            s.check_laws(7),
            s.check_hat(6),
            s.check_quotient(7),
            s.check_contraction(7),
            s.check_connection_chain_maps(5),
        ] {
            for r in &led.records {
                assert!(r.holds, "{}: {:?}", e.name, r);
            }
        }
    }
}

#[test]
fn small_dims_match_oracle() {
    for (e, n) in [(dual_numbers(), 5), (upper_triangular_extension(), 4), (quartic_truncation(), 4)] {
        let s = SmallComplex::new(&e);
        let o = RelativeOracle::new(&e);
        assert_eq!(s.relative_hh_dims(n).unwrap(), o.relative_hh_dims(n).unwrap(), "HH {}", e.name);
        assert_eq!(s.relative_hc_dims(n).unwrap(), o.relative_hc_dims(n).unwrap(), "HC {}", e.name);
    }
}
