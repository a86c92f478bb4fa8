//! JSON algebra specifications.
//!
//! Either an algebra C with an optional ideal (`basis`, `mult`, `unit`,
//! `ideal`), or a split extension given directly by A (`basis`, `mult`,
//! `unit`), the bimodule M (`bimodule`) and the cocycle f (`cocycle`).
//! Rationals are strings such as `"3"` or `"-1/2"`.

use std::path::Path;
use std::str::FromStr;

use relcyc::algebra::{
    build_extension, check_ideal, extension_from_ideal, validate_algebra, validate_bimodule, validate_cocycle,
    AlgebraPresentation, BimodulePresentation, NormalCocycle, SquareZeroExtension,
};
use relcyc::linalg::Rational;
use serde::{Deserialize, Serialize};

use crate::CliError;

type Table = Vec<Vec<Vec<String>>>;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub basis: Vec<String>,
    /// `mult[i][j][k]`: coefficient of basis element k in e_i·e_j.
    pub mult: Table,
    #[serde(default)]
    pub unit: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bimodule: Option<BimoduleSpec>,
    /// `cocycle[i][j][k]`: coefficient of m_k in f(e_i, e_j).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<Table>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BimoduleSpec {
    pub basis: Vec<String>,
    /// `left[a][j][k]`: coefficient of m_k in e_a·m_j.
    pub left: Table,
    /// `right[a][j][k]`: coefficient of m_k in m_j·e_a.
    pub right: Table,
}

/// What an input file describes after parsing and validation.
pub enum Parsed {
    /// An algebra without an ideal or bimodule.
    Algebra(AlgebraPresentation),
    /// C together with a basis-spanned ideal.
    WithIdeal { c: AlgebraPresentation, ideal: Vec<usize> },
    /// A split extension entered as (A, M, f).
    Split(SquareZeroExtension),
}

pub fn read_spec(path: &Path) -> Result<AlgebraSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn rational(s: &str) -> Result<Rational, CliError> {
    Rational::from_str(s.trim()).map_err(|_| CliError::Parse(format!("not a rational number: {s:?}")))
}

fn table(t: &Table, shape: (usize, usize, usize), what: &str) -> Result<Vec<Vec<Vec<Rational>>>, CliError> {
    let (a, b, c) = shape;
    if t.len() != a || t.iter().any(|r| r.len() != b || r.iter().any(|v| v.len() != c)) {
        return Err(CliError::Parse(format!("{what} must have shape {a}x{b}x{c}")));
    }
    t.iter().map(|r| r.iter().map(|v| v.iter().map(|x| rational(x)).collect()).collect()).collect()
}

fn render(t: &[Vec<Vec<Rational>>]) -> Table {
    t.iter().map(|r| r.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect()).collect()
}

/// Basis order with the unit first.
fn unit_first(d: usize, unit: usize) -> Vec<usize> {
    std::iter::once(unit).chain((0..d).filter(|&i| i != unit)).collect()
}

impl AlgebraSpec {
    pub fn name_or(&self, fallback: &str) -> String {
        self.name.clone().unwrap_or_else(|| fallback.to_string())
    }

    /// The algebra with its unit moved to index 0, and the permutation used.
    fn algebra(&self) -> Result<(AlgebraPresentation, Vec<usize>), CliError> {
        let d = self.basis.len();
        if d == 0 {
            return Err(CliError::Parse("empty basis".into()));
        }
        if self.unit >= d {
            return Err(CliError::Parse(format!("unit index {} out of range", self.unit)));
        }
        let raw = table(&self.mult, (d, d, d), "mult")?;
        let order = unit_first(d, self.unit);
        let labels = order.iter().map(|&i| self.basis[i].clone()).collect();
        let a = AlgebraPresentation::from_fn(labels, |x, y| {
            order.iter().map(|&k| raw[order[x]][order[y]][k].clone()).collect()
        })
        .map_err(|e| CliError::Validation(e.to_string()))?;
        let v = validate_algebra(&a);
        if let Some(msg) = v.first_failure {
            return Err(CliError::Validation(msg));
        }
        Ok((a, order))
    }

    pub fn parse(&self) -> Result<Parsed, CliError> {
        let (a, order) = self.algebra()?;
        let d = a.dim();
        match (&self.ideal, &self.bimodule, &self.cocycle) {
            (None, None, None) => Ok(Parsed::Algebra(a)),
            (Some(ideal), None, None) => {
                let ideal: Vec<usize> = ideal
                    .iter()
                    .map(|&i| {
                        order
                            .iter()
                            .position(|&o| o == i)
                            .ok_or_else(|| CliError::Parse(format!("ideal index {i} out of range")))
                    })
                    .collect::<Result<_, _>>()?;
                check_ideal(&a, &ideal).map_err(|e| CliError::Validation(e.to_string()))?;
                Ok(Parsed::WithIdeal { c: a, ideal })
            }
            (None, Some(bm), cocycle) => {
                let dm = bm.basis.len();
                let reorder = |t: Vec<Vec<Vec<Rational>>>| -> Vec<Vec<Vec<Rational>>> {
                    order.iter().map(|&i| t[i].clone()).collect()
                };
                let m = BimodulePresentation {
                    labels: bm.basis.clone(),
                    left: reorder(table(&bm.left, (d, dm, dm), "bimodule.left")?),
                    right: reorder(table(&bm.right, (d, dm, dm), "bimodule.right")?),
                };
                let values = match cocycle {
                    Some(t) => {
                        let raw = table(t, (d, d, dm), "cocycle")?;
                        order.iter().map(|&i| order.iter().map(|&j| raw[i][j].clone()).collect()).collect()
                    }
                    None => vec![vec![vec![Rational::default(); dm]; d]; d],
                };
                let f = NormalCocycle { values };
                for v in [validate_bimodule(&a, &m), validate_cocycle(&a, &m, &f)] {
                    if let Some(msg) = v.first_failure {
                        return Err(CliError::Validation(msg));
                    }
                }
                let e = build_extension(&a, &m, &f).map_err(|e| CliError::Validation(e.to_string()))?;
                Ok(Parsed::Split(e))
            }
            (None, None, Some(_)) => Err(CliError::Parse("a cocycle needs a bimodule".into())),
            (Some(_), _, _) => Err(CliError::Parse("give either an ideal or a bimodule, not both".into())),
        }
    }
}

impl Parsed {
    /// The square-zero extension E = A ⋉_f M described by the input.
    pub fn extension(&self, name: &str) -> Result<SquareZeroExtension, CliError> {
        match self {
            Parsed::Algebra(_) => Err(CliError::Parse("the input has neither an ideal nor a bimodule".into())),
            Parsed::WithIdeal { c, ideal } => {
                extension_from_ideal(c, ideal, name).map_err(|e| CliError::Validation(e.to_string()))
            }
            Parsed::Split(e) => Ok(e.clone().with_name(name)),
        }
    }
}

/// The (A, M, f) form of an extension as an input document.
pub fn split_spec(e: &SquareZeroExtension, name: &str) -> AlgebraSpec {
    AlgebraSpec {
        name: Some(name.to_string()),
        basis: e.a.labels.clone(),
        mult: render(&e.a.table()),
        unit: 0,
        ideal: None,
        bimodule: Some(BimoduleSpec { basis: e.m.labels.clone(), left: render(&e.m.left), right: render(&e.m.right) }),
        cocycle: Some(render(&e.f.values)),
    }
}

#[cfg(test)]
/// The document for an algebra with a given ideal.
pub fn algebra_spec(c: &AlgebraPresentation, ideal: Option<Vec<usize>>, name: &str) -> AlgebraSpec {
    AlgebraSpec {
        name: Some(name.to_string()),
        basis: c.labels.clone(),
        mult: render(&c.table()),
        unit: 0,
        ideal,
        bimodule: None,
        cocycle: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use relcyc::algebra::{dual_numbers, truncated_polynomial};

    #[test]
    fn rationals_parse() {
        assert_eq!(rational(" -3/6 ").unwrap(), Rational::new((-1).into(), 2.into()));
        assert!(rational("0.5").is_err());
    }

    #[test]
    fn split_round_trip() {
        let e = dual_numbers();
        let spec = split_spec(&e, "d");
        let Parsed::Split(back) = spec.parse().unwrap() else { panic!("expected a split extension") };
        assert_eq!(back.e, e.e);
    }

    #[test]
    fn unit_is_moved_to_front() {
        let c = truncated_polynomial(3);
        let mut spec = algebra_spec(&c, Some(vec![2]), "q");
        // reverse the basis: x^2, x, 1
        let rev = |t: &Table| -> Table {
            (0..3).rev().map(|i| (0..3).rev().map(|j| t[i][j].iter().rev().cloned().collect()).collect()).collect()
        };
        spec.mult = rev(&spec.mult);
        spec.basis.reverse();
        spec.unit = 2;
        spec.ideal = Some(vec![0]);
        let Parsed::WithIdeal { c: back, ideal } = spec.parse().unwrap() else { panic!("expected C with an ideal") };
        assert_eq!(back.labels[0], "1");
        assert_eq!(back.labels[ideal[0]], "x^2");
    }

    #[test]
    fn non_associative_input_is_rejected() {
        // x·y = y and x·x = 0, so (x·x)·y ≠ x·(x·y)
        let c = truncated_polynomial(3);
        let mut spec = algebra_spec(&c, None, "bad");
        let z = || vec!["0".to_string(); 3];
        spec.mult[1][1] = z();
        spec.mult[1][2] = vec!["0".into(), "0".into(), "1".into()];
        spec.mult[2][1] = z();
        spec.mult[2][2] = z();
        match spec.parse() {
            Err(CliError::Validation(msg)) => assert!(msg.contains("associativity"), "{msg}"),
            _ => panic!("expected a validation error"),
        }
    }
}
