//! Certificates that combine several modules.

use serde_json::json;

use crate::bar::RelativeOracle;
use crate::error::{Error, Result};
use crate::harmonic::{Harmonic, HarmonicBridge};
use crate::report::{Certificate, Ledger};
use crate::retract::OracleBridge;
use crate::small::SmallComplex;

/// dim HH_n(E, M) and dim HC_n(E, M) from the small models equal the bar
/// oracle's for n ≤ n_max.
pub fn oracle_match_certificate(s: &SmallComplex, o: &RelativeOracle, n_max: usize) -> Certificate {
    let run = || -> Result<(Ledger, serde_json::Value)> {
        let (hh, hh_o) = (s.relative_hh_dims(n_max)?, o.relative_hh_dims(n_max)?);
        let (hc, hc_o) = (s.relative_hc_dims(n_max)?, o.relative_hc_dims(n_max)?);
        let mut ledger = Ledger::new();
        for (law, ours, theirs) in
            [("dim HH small = dim HH bar", &hh, &hh_o), ("dim HC small = dim HC bar", &hc, &hc_o)]
        {
            let outcome = match ours.iter().zip(theirs).position(|(a, b)| a != b) {
                None => Ok(()),
                Some(n) => Err(Error::Mismatch(format!("degree {n}: {} vs {}", ours[n], theirs[n]))),
            };
            ledger.record(law, n_max + 1, outcome);
        }
        Ok((ledger, json!({ "hh": hh, "hh_oracle": hh_o, "hc": hc, "hc_oracle": hc_o })))
    };
    match run() {
        Ok((ledger, details)) => Certificate::new("oracle_match", &s.name, details, ledger),
        Err(e) => Certificate::failed("oracle_match", &s.name, &e),
    }
}

/// Structure identities of the small models on every block with v ≤ v_max.
pub fn identities_certificate(s: &SmallComplex, v_max: i64) -> Certificate {
    let mut ledger = s.check_laws(v_max);
    ledger.extend(s.check_hat(v_max));
    ledger.extend(s.check_quotient(v_max));
    ledger.extend(s.check_contraction(v_max));
    ledger.extend(Harmonic::new(s).check_karoubi(v_max));
    Certificate::new("identities", &s.name, json!({ "v_max": v_max }), ledger)
}

/// The connection maps of HH and HC: chain-map identities and agreement
/// with the snake-lemma maps of the bar oracle for n ≤ n_max.
pub fn connection_certificate(s: &SmallComplex, o: &RelativeOracle, n_max: i64) -> Certificate {
    let run = || -> Result<Ledger> {
        let mut ledger = s.check_connection_chain_maps(n_max);
        let h = Harmonic::new(s);
        ledger.extend(h.check_revised_connection(n_max)?);
        let bridge = OracleBridge::new(s, o, n_max + 1)?;
        let hb = HarmonicBridge { h: &h, bridge: &bridge };
        ledger.extend(hb.check_connection(n_max)?);
        Ok(ledger)
    };
    match run() {
        Ok(ledger) => Certificate::new("connection", &s.name, json!({ "n_max": n_max }), ledger),
        Err(e) => Certificate::failed("connection", &s.name, &e),
    }
}

/// S built from the small model agrees with the bar oracle's S on
/// HC_n for 2 ≤ n ≤ n_max.
pub fn periodicity_certificate(s: &SmallComplex, o: &RelativeOracle, n_max: i64) -> Certificate {
    let run = || -> Result<(Ledger, serde_json::Value)> {
        let h = Harmonic::new(s);
        let mut ledger = h.check_s_chain(n_max);
        let bridge = OracleBridge::new(s, o, n_max + 1)?;
        ledger.extend(HarmonicBridge { h: &h, bridge: &bridge }.check_s(n_max)?);
        let ranks: Vec<usize> =
            (2..=n_max).map(|n| h.s_operator(n).map(|m| crate::linalg::rank(&m))).collect::<Result<_>>()?;
        Ok((ledger, json!({ "n_max": n_max, "rank_s_from_degree_2": ranks })))
    };
    match run() {
        Ok((ledger, details)) => Certificate::new("periodicity", &s.name, details, ledger),
        Err(e) => Certificate::failed("periodicity", &s.name, &e),
    }
}
