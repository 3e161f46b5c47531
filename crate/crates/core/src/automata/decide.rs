use num_rational::BigRational;
use serde::Serialize;

use super::{Dfa, PceCheck};
use crate::automata::CountTable;
use crate::error::{Error, Result};
use crate::recurrence::{minimal_recurrence, LinearRecurrence};
use crate::spectral::{spectral_classify, GrowthClass, SpectralReport};

/// Extra terms beyond the `2D + 1` needed by the recurrence search; they
/// serve as an independent check of the recovered recurrence.
const EXTRA_TERMS: usize = 20;

/// Minimal recurrence and spectral report of the counting sequence of the
/// language accepted from every state, after trimming.
pub fn language_spectrum(dfa: &Dfa) -> Result<Vec<(String, LinearRecurrence, SpectralReport)>> {
    let t = dfa.trim()?;
    let d = t.num_states();
    let len = 2 * d + EXTRA_TERMS;
    let counts = CountTable::compute(&t, len);
    let mut out = Vec::with_capacity(d);
    // Initial state first so that callers can read the language itself.
    let order = std::iter::once(t.initial()).chain((0..d).filter(|&q| q != t.initial()));
    for q in order {
        let seq: Vec<_> = counts.sequence(q).into_iter().map(Into::into).collect();
        let rec = minimal_recurrence(&seq, d)?;
        if !rec.annihilates(&seq) {
            return Err(Error::OutOfRange(format!(
                "recurrence for state {} fails on the check terms",
                t.state_name(q)
            )));
        }
        let report = spectral_classify(&rec)?;
        out.push((t.state_name(q).to_string(), rec, report));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientDiagnostic {
    pub state: String,
    pub modulus: f64,
    pub same_modulus: bool,
    pub is_adev: bool,
    #[serde(serialize_with = "ser_poly")]
    pub minimal_polynomial: crate::poly::Poly,
}

fn ser_poly<S: serde::Serializer>(
    p: &crate::poly::Poly,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CpVerdict {
    /// The carry propagation exists and equals `λ / (λ - 1)`.
    Exists {
        lambda: f64,
        value: f64,
        /// Exact value when λ is an integer.
        exact: Option<String>,
        /// Polynomial having λ as its largest positive root.
        lambda_polynomial: String,
    },
    /// The sufficient condition does not apply; nothing is claimed.
    Undetermined {
        reason: String,
        offending: Vec<QuotientDiagnostic>,
    },
}

impl CpVerdict {
    pub fn exists(&self) -> bool {
        matches!(self, CpVerdict::Exists { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            CpVerdict::Exists { value, .. } => Some(*value),
            CpVerdict::Undetermined { .. } => None,
        }
    }
}

/// Sufficient test for the existence of the carry propagation of a rational
/// prefix-closed extendable language: the language has an almost dominating
/// eigenvalue λ and so does every quotient of modulus λ.
pub fn decide_cp(dfa: &Dfa) -> Result<(CpVerdict, Vec<QuotientDiagnostic>)> {
    match dfa.check_pce()? {
        PceCheck::Pce => {}
        other => return Err(Error::NotPce(format!("{other:?}"))),
    }
    let spectra = language_spectrum(dfa)?;
    let lang = &spectra[0].2;
    let diagnostics: Vec<QuotientDiagnostic> = spectra
        .iter()
        .map(|(name, _, r)| QuotientDiagnostic {
            state: name.clone(),
            modulus: r.modulus,
            same_modulus: r.same_modulus(lang),
            is_adev: r.is_adev,
            minimal_polynomial: r.minimal_polynomial.clone(),
        })
        .collect();

    if lang.growth != GrowthClass::Exponential {
        return Ok((
            CpVerdict::Undetermined {
                reason: format!(
                    "the language has {:?} growth; the mean carry is unbounded",
                    lang.growth
                )
                .to_lowercase(),
                offending: Vec::new(),
            },
            diagnostics,
        ));
    }
    if !lang.is_adev {
        return Ok((
            CpVerdict::Undetermined {
                reason: "the language has no almost dominating eigenvalue".into(),
                offending: vec![diagnostics[0].clone()],
            },
            diagnostics,
        ));
    }
    let offending: Vec<QuotientDiagnostic> = diagnostics
        .iter()
        .filter(|d| d.same_modulus && !d.is_adev)
        .cloned()
        .collect();
    if !offending.is_empty() {
        return Ok((
            CpVerdict::Undetermined {
                reason: "a quotient of maximal modulus has no almost dominating eigenvalue".into(),
                offending,
            },
            diagnostics,
        ));
    }
    let lambda = lang.modulus;
    let exact = lang.carry_value_exact().map(|v: BigRational| v.to_string());
    Ok((
        CpVerdict::Exists {
            lambda,
            value: lambda / (lambda - 1.0),
            exact,
            lambda_polynomial: lang
                .modulus_polynomial
                .as_ref()
                .map(|p| p.to_string())
                .unwrap_or_default(),
        },
        diagnostics,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::builtin;
    use crate::poly::Poly;

    #[test]
    fn integer_base_exists() {
        let (v, _) = decide_cp(&builtin("base(3)").unwrap()).unwrap();
        match v {
            CpVerdict::Exists { exact, value, .. } => {
                assert_eq!(exact.as_deref(), Some("3/2"));
                assert!((value - 1.5).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fibonacci_exists_irrational() {
        let (v, _) = decide_cp(&builtin("fibonacci").unwrap()).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((v.value().unwrap() - phi / (phi - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn k4_flags_k1_quotient() {
        let (v, diags) = decide_cp(&builtin("K4").unwrap()).unwrap();
        match v {
            CpVerdict::Undetermined { offending, .. } => {
                let names: Vec<&str> = offending.iter().map(|d| d.state.as_str()).collect();
                assert!(names.contains(&"p"), "{names:?}");
                for d in &offending {
                    assert_eq!(d.minimal_polynomial, Poly::from_ints([-4, 0, 1]));
                }
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(diags[0].state, "i");
        assert!(diags[0].is_adev);
    }

    #[test]
    fn k1_is_undetermined() {
        let (v, _) = decide_cp(&builtin("K1").unwrap()).unwrap();
        assert!(!v.exists());
    }
}
