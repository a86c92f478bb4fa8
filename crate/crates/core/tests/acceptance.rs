//! Acceptance run: one PASS/FAIL line per criterion.

use std::cell::OnceCell;
use std::time::Instant;

use relcyc::algebra::{
    dual_numbers, quartic_truncation, truncated_polynomial, upper_triangular_extension, SquareZeroExtension,
};
use relcyc::bar::RelativeOracle;
use relcyc::harmonic::{check_s_nilpotence, nilpotence_certificate, periodic_vanishing_certificate, Harmonic};
use relcyc::report::{Certificate, Ledger};
use relcyc::retract::verify_bar_retract;
use relcyc::small::SmallComplex;
use relcyc::suites::{connection_certificate, identities_certificate, oracle_match_certificate};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn from_ledgers(items: &[(String, Ledger)]) -> Self {
        let mut checked = 0;
        for (what, l) in items {
            checked += l.records.len();
            if let Some(r) = l.first_failure() {
                return Outcome {
                    passed: false,
                    detail: format!(
                        "{what}: {} fails{}",
                        r.law,
                        r.failure.as_ref().map(|f| format!(" ({f})")).unwrap_or_default()
                    ),
                };
            }
        }
        Outcome { passed: true, detail: format!("{checked} identities over {} runs", items.len()) }
    }

    fn from_certs(certs: &[Certificate]) -> Self {
        let items: Vec<(String, Ledger)> =
            certs.iter().map(|c| (format!("{} on {}", c.name, c.algebra), c.ledger.clone())).collect();
        Outcome::from_ledgers(&items)
    }
}

fn t1() -> SquareZeroExtension {
    dual_numbers()
}
fn t2() -> SquareZeroExtension {
    upper_triangular_extension()
}
fn t3() -> SquareZeroExtension {
    quartic_truncation()
}

fn all_three() -> Vec<SquareZeroExtension> {
    vec![t1(), t2(), t3()]
}

fn dims(c: &Certificate, key: &str) -> Vec<usize> {
    serde_json::from_value(c.details[key].clone()).unwrap_or_default()
}

fn criterion_1() -> Outcome {
    let mut certs = Vec::new();
    for (e, n_max) in [(t1(), 6), (t2(), 5), (t3(), 4)] {
        let s = SmallComplex::new(&e);
        certs.push(oracle_match_certificate(&s, &RelativeOracle::new(&e), n_max));
    }
    let base = Outcome::from_certs(&certs);
    if !base.passed {
        return base;
    }
    let (hh1, hc1) = (dims(&certs[0], "hh"), dims(&certs[0], "hc"));
    if hh1 != vec![1; 7] || hc1[..6] != [1, 0, 1, 0, 1, 0] {
        return Outcome { passed: false, detail: format!("T1 tables HH {hh1:?} HC {hc1:?}") };
    }
    let (hh2, hc2) = (dims(&certs[1], "hh"), dims(&certs[1], "hc"));
    if hh2.iter().chain(&hc2).any(|&d| d != 0) {
        return Outcome { passed: false, detail: format!("T2 tables HH {hh2:?} HC {hc2:?}") };
    }
    Outcome {
        passed: true,
        detail: format!(
            "T1 HH {hh1:?} HC {hc1:?}; T2 zero; T3 HH {:?} HC {:?}",
            dims(&certs[2], "hh"),
            dims(&certs[2], "hc")
        ),
    }
}

fn criterion_2() -> Outcome {
    let certs: Vec<Certificate> =
        all_three().iter().map(|e| identities_certificate(&SmallComplex::new(e), 8)).collect();
    Outcome::from_certs(&certs)
}

fn criterion_3() -> Outcome {
    let certs: Vec<Certificate> =
        all_three().iter().map(|e| periodic_vanishing_certificate(&SmallComplex::new(e), 8, 5, 3)).collect();
    Outcome::from_certs(&certs)
}

fn harmonic_ledgers(
    v_max: i64,
    f: impl Fn(&Harmonic) -> Ledger,
    algebras: Vec<SquareZeroExtension>,
) -> Vec<(String, Ledger)> {
    algebras
        .iter()
        .map(|e| {
            let s = SmallComplex::new(e);
            (format!("{}, v <= {v_max}", e.name), f(&Harmonic::new(&s)))
        })
        .collect()
}

fn or_failure(r: relcyc::error::Result<Ledger>, law: &str) -> Ledger {
    r.unwrap_or_else(|e| {
        let mut l = Ledger::new();
        l.record(law, 0, Err(e));
        l
    })
}

/// The records of `l` whose law mentions any of `words`.
fn select(l: Ledger, words: &[&str]) -> Ledger {
    let mut out = Ledger::new();
    out.records = l.records.into_iter().filter(|r| words.iter().any(|w| r.law.contains(w))).collect();
    out
}

fn criterion_4() -> Outcome {
    let items = harmonic_ledgers(
        6,
        |h| {
            let mut l = h.check_karoubi(6);
            l.extend(or_failure(h.check_harmonic(6), "harmonic suite"));
            l
        },
        all_three(),
    );
    Outcome::from_ledgers(&items)
}

fn criterion_5() -> Outcome {
    let items = harmonic_ledgers(
        6,
        |h| select(or_failure(h.check_tilde(6), "tilde suite"), &["lambda_ab", "D_alpha"]),
        vec![t3()],
    );
    if items.iter().any(|(_, l)| l.records.len() != 2) {
        return Outcome { passed: false, detail: "closed-form records missing".into() };
    }
    Outcome::from_ledgers(&items)
}

fn criterion_6() -> Outcome {
    let items = harmonic_ledgers(
        6,
        |h| {
            let l = or_failure(h.check_tilde(6), "tilde suite");
            let mut out = Ledger::new();
            out.records =
                l.records.into_iter().filter(|r| !(r.law.contains("lambda_ab") || r.law.contains("D_alpha"))).collect();
            out
        },
        all_three(),
    );
    let psi_lambda = items.iter().all(|(_, l)| {
        l.records.iter().filter(|r| r.law.starts_with("Psi") || r.law.starts_with("Lambda")).count() == 8
    });
    if !psi_lambda {
        return Outcome { passed: false, detail: "Psi/Lambda records missing".into() };
    }
    Outcome::from_ledgers(&items)
}

fn criterion_7() -> Outcome {
    let e = t3();
    let s = SmallComplex::new(&e);
    let c = connection_certificate(&s, &RelativeOracle::new(&e), 4);
    let snake = c.ledger.records.iter().filter(|r| r.law.contains("induces")).count();
    let mut out = Outcome::from_certs(&[c]);
    out.detail = format!("{}; {snake} induced-map comparisons", out.detail);
    out
}

fn criterion_8() -> Outcome {
    let mut items = Vec::new();
    for e in [t1(), t3()] {
        let s = SmallComplex::new(&e);
        let h = Harmonic::new(&s);
        let mut l = Ledger::new();
        for n in [2, 3] {
            let law = format!("S_{n} = 0 on HC_{n}");
            let outcome = h.s_operator(n).and_then(|m| {
                if m.is_zero() {
                    Ok(())
                } else {
                    Err(relcyc::error::Error::NilpotenceMismatch(law.clone()))
                }
            });
            l.record(&law, 1, outcome);
        }
        l.extend(or_failure(check_s_nilpotence(&h, 1), "S composites"));
        items.push((e.name.clone(), l));
    }
    let c = truncated_polynomial(8);
    let ideal: Vec<usize> = (2..8).collect();
    let cert = nilpotence_certificate(&c, &ideal, 2, 0);
    let has_composite = cert.ledger.records.iter().any(|r| r.law.starts_with("S^2: HC_4 -> HC_0"));
    items.push((cert.algebra.clone(), cert.ledger));
    let mut out = Outcome::from_ledgers(&items);
    if out.passed && !has_composite {
        out = Outcome { passed: false, detail: "m = 2 composite not checked".into() };
    }
    out
}

/// The retract certificates shared by criteria 9 and 10.
fn retract_certs() -> Vec<Certificate> {
    all_three()
        .iter()
        .map(|e| {
            let s = SmallComplex::new(e);
            verify_bar_retract(&s, &RelativeOracle::new(e), 7)
        })
        .collect()
}

fn criterion_9(certs: &[Certificate]) -> Outcome {
    let needed = ["theta~ vartheta~ = id", "h h = 0", "p h = 0", "h i = 0"];
    for c in certs {
        if let Some(w) = needed.iter().find(|w| !c.ledger.records.iter().any(|r| r.law.contains(*w))) {
            return Outcome { passed: false, detail: format!("{}: no record for {w}", c.algebra) };
        }
    }
    Outcome::from_certs(certs)
}

fn criterion_10(certs: &[Certificate]) -> Outcome {
    let items: Vec<(String, Ledger)> = certs
        .iter()
        .map(|c| {
            let l = select(c.ledger.clone(), &["perturbed", "zeta^", "retract:", "nilpotent"]);
            (c.algebra.clone(), l)
        })
        .collect();
    let zeta = items.iter().all(|(_, l)| {
        l.records.iter().any(|r| r.law == "perturbed projection = theta^ + zeta^")
            && l.records.iter().any(|r| r.law == "theta^ d^ epsilon^ = zeta^")
    });
    if !zeta {
        return Outcome { passed: false, detail: "zeta^ comparison missing".into() };
    }
    Outcome::from_ledgers(&items)
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, title: &str, run: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = run();
        failures += usize::from(!o.passed);
        println!(
            "criterion {n:>2} {}: {title}: {} [{:.1}s]",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    };
    report(1, "small complexes match the bar oracle", &criterion_1);
    report(2, "differential laws, v <= 8", &criterion_2);
    report(3, "contraction and periodic vanishing, v <= 8", &criterion_3);
    report(4, "Karoubi operator and harmonic projection, v <= 6", &criterion_4);
    report(5, "closed forms of varsigma-bar and p sigma' d N-bar on T3", &criterion_5);
    report(6, "Psi and Lambda", &criterion_6);
    report(7, "connection maps on T3, n <= 4", &criterion_7);
    report(8, "vanishing of S composites", &criterion_8);
    let certs = OnceCell::new();
    report(9, "bar retract", &|| criterion_9(certs.get_or_init(retract_certs)));
    report(10, "perturbation of the retract data", &|| criterion_10(certs.get_or_init(retract_certs)));
    if failures > 0 {
        std::process::exit(1);
    }
}
