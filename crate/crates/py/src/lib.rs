use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use numcarry::automata::{builtin, decide_cp, Dfa};
use numcarry::carry::{empirical_cp, filtered_cp, local_growth, probe, SystemSource};
use numcarry::numeration::beta::DEFAULT_STATE_CAP;
use numcarry::numeration::{
    basis_from_beta, beta_builtin, beta_expand_one, AlgebraicReal, Basis, BetaProfile, RationalBase,
};
use numcarry::odometer::{cylinder_measure, layer_cp};
use numcarry::signature::Signature;
use numcarry::Word;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializes through JSON so that reports arrive as plain dicts.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (s,))
}

fn parse_beta(s: &str) -> PyResult<AlgebraicReal> {
    if s.split_whitespace().count() >= 2 {
        AlgebraicReal::parse(&format!("poly: {s}")).map_err(err)
    } else {
        beta_builtin(s).map_err(err)
    }
}

fn beta_profile_of(s: &str) -> PyResult<BetaProfile> {
    beta_expand_one(&parse_beta(s)?, DEFAULT_STATE_CAP).map_err(err)
}

fn automaton(name_or_text: &str) -> PyResult<Dfa> {
    if name_or_text.contains('\n') || name_or_text.trim_start().starts_with("states") {
        Dfa::parse(name_or_text).map_err(err)
    } else {
        builtin(name_or_text).map_err(err)
    }
}

fn greedy_basis(name: &str) -> PyResult<Basis> {
    match name.to_ascii_lowercase().as_str() {
        "fibonacci" => Ok(Basis::fibonacci()),
        "fina" => Ok(Basis::fina()),
        "tribonacci" => Ok(Basis::tribonacci()),
        _ => {
            let p = beta_profile_of(name)?;
            let len = (64.0 / p.beta().to_f64().log2()).ceil() as usize + 2;
            Ok(basis_from_beta(&p, len).map_err(err)?.basis)
        }
    }
}

/// A numeration system whose carries can be measured.
///
/// Caches inside automata are not thread-safe, so instances stay on the
/// thread that created them.
#[pyclass(module = "numcarry_py", unsendable)]
struct System {
    inner: SystemSource,
}

#[pymethods]
impl System {
    /// Named automaton, or `H`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        if name.eq_ignore_ascii_case("h") {
            return Ok(System {
                inner: SystemSource::HLanguage,
            });
        }
        Self::dfa(name)
    }

    /// Automaton from a builtin name or the text of a DFA file.
    #[staticmethod]
    fn dfa(text: &str) -> PyResult<Self> {
        Ok(System {
            inner: SystemSource::dfa(&automaton(text)?).map_err(err)?,
        })
    }

    #[staticmethod]
    fn signature(text: &str) -> PyResult<Self> {
        let sig = Signature::parse(text).map_err(err)?;
        Ok(System {
            inner: SystemSource::signature(sig).map_err(err)?,
        })
    }

    /// Rational base given as `"p/q"`.
    #[staticmethod]
    fn rational(pq: &str) -> PyResult<Self> {
        Ok(System {
            inner: SystemSource::RationalBase(RationalBase::parse(pq).map_err(err)?),
        })
    }

    /// Greedy system: `fibonacci`, `fina`, `tribonacci`, or explicit terms.
    #[staticmethod]
    #[pyo3(signature = (name=None, terms=None))]
    fn greedy(name: Option<&str>, terms: Option<Vec<u64>>) -> PyResult<Self> {
        let basis = match (name, terms) {
            (Some(n), None) => greedy_basis(n)?,
            (None, Some(t)) => Basis::explicit(t).map_err(err)?,
            _ => return Err(err("give exactly one of name or terms")),
        };
        Ok(System {
            inner: SystemSource::greedy(basis),
        })
    }

    /// β from polynomial coefficients (highest degree first) or a name.
    #[staticmethod]
    fn beta(value: &str) -> PyResult<Self> {
        let p = beta_profile_of(value)?;
        let len = (64.0 / p.beta().to_f64().log2()).ceil() as usize + 2;
        let b = basis_from_beta(&p, len).map_err(err)?;
        Ok(System {
            inner: SystemSource::beta(b.basis, p.beta().clone()),
        })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label()
    }

    /// Closed-form limit of the mean carry, if known.
    fn theory<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.theory().map_err(err)?)
    }

    /// The carries `cp(0), ..., cp(count - 1)`.
    fn carries(&self, count: u64) -> PyResult<Vec<u32>> {
        let mut out = Vec::with_capacity(count.min(1 << 20) as usize);
        self.inner
            .for_each_cp(count, |s| out.push(s.cp))
            .map_err(err)?;
        Ok(out)
    }

    #[pyo3(signature = (n, checkpoints=None))]
    fn estimate<'py>(
        &self,
        py: Python<'py>,
        n: u64,
        checkpoints: Option<Vec<u64>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let r = empirical_cp(&self.inner, n, checkpoints.as_deref()).map_err(err)?;
        to_py(py, &r)
    }

    fn filtered<'py>(&self, py: Python<'py>, lmax: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &filtered_cp(&self.inner, lmax).map_err(err)?)
    }

    /// Means at the given indices; big integers are accepted.
    fn probe<'py>(&self, py: Python<'py>, points: Vec<BigUint>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &probe(&self.inner, &points).map_err(err)?)
    }

    fn growth<'py>(&self, py: Python<'py>, lmax: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &local_growth(&self.inner, lmax).map_err(err)?)
    }
}

/// Spectral verdict on the existence of the carry propagation.
#[pyfunction]
fn analyze<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyAny>> {
    let (verdict, quotients) = decide_cp(&automaton(name)?).map_err(err)?;
    to_py(
        py,
        &serde_json::json!({ "verdict": verdict, "quotients": quotients }),
    )
}

#[pyfunction]
fn beta_profile<'py>(py: Python<'py>, beta: &str, lmax: usize) -> PyResult<Bound<'py, PyAny>> {
    let p = beta_profile_of(beta)?;
    let basis = basis_from_beta(&p, lmax).ok();
    let terms: Vec<String> = basis
        .as_ref()
        .map(|b| b.basis.terms().iter().map(ToString::to_string).collect())
        .unwrap_or_default();
    to_py(
        py,
        &serde_json::json!({
            "beta": p.beta().to_f64(),
            "polynomial": p.beta().poly().to_string(),
            "class": p.class(),
            "expansion_of_one": p.bge_string(),
            "quasi_greedy": p.quasi_greedy().format(),
            "basis": terms,
            "k_hat": basis.map(|b| b.k_hat),
        }),
    )
}

/// Layer table of a greedy system named as in `System.greedy` or by β.
#[pyfunction]
#[pyo3(signature = (system, k, n, tolerance=None))]
fn layers<'py>(
    py: Python<'py>,
    system: &str,
    k: usize,
    n: u64,
    tolerance: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let basis = greedy_basis(system)?;
    let r = py
        .detach(|| layer_cp(&basis, k, n, tolerance))
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn cylinder<'py>(py: Python<'py>, system: &str, word: &str, n: u64) -> PyResult<Bound<'py, PyAny>> {
    let basis = greedy_basis(system)?;
    let w = Word::parse(basis.alphabet(), word).map_err(err)?;
    to_py(py, &cylinder_measure(&basis, w.digits(), n).map_err(err)?)
}

#[pymodule]
fn numcarry_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<System>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(beta_profile, m)?)?;
    m.add_function(wrap_pyfunction!(layers, m)?)?;
    m.add_function(wrap_pyfunction!(cylinder, m)?)?;
    Ok(())
}
