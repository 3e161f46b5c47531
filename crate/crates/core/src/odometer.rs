//! Finite shadows of the odometer of a greedy system: truncated successor,
//! cylinder frequencies along the orbit of 0, and the layer formula for the
//! carry propagation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeration::greedy::Basis;
use crate::poly::rational_to_f64;
use crate::words::{format_digits, Digit};

pub const DEFAULT_WINDOW: usize = 32;
pub const DEFAULT_STABLE_RUNS: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OdometerStep {
    /// Successor of the full truncation, zero-padded to at least its length.
    pub digits: String,
    /// The lowest `window` digits stayed fixed over `stable_runs`
    /// consecutive truncation lengths.
    pub stabilized: bool,
    pub truncation_lengths: usize,
}

fn strip_zeros(d: &[Digit]) -> &[Digit] {
    let k = d.iter().position(|&x| x != 0).unwrap_or(d.len());
    &d[k..]
}

fn pad(d: Vec<Digit>, len: usize) -> Vec<Digit> {
    if d.len() >= len {
        return d;
    }
    let mut out = vec![0; len - d.len()];
    out.extend(d);
    out
}

/// `τ` applied to the finite left-truncation `s` (most significant digit
/// first): successors of the suffixes `s_[j,0]` are computed for growing `j`
/// and the low-order window is watched for stabilization.
pub fn odometer_step(
    basis: &Basis,
    s: &[Digit],
    window: usize,
    stable_runs: usize,
) -> Result<OdometerStep> {
    if s.is_empty() {
        return Err(Error::OutOfRange("empty truncation".into()));
    }
    let size = basis.alphabet().size();
    let mut last_low: Option<Vec<Digit>> = None;
    let mut runs = 0usize;
    let mut full = Vec::new();
    for j in 1..=s.len() {
        let suffix = &s[s.len() - j..];
        let core = strip_zeros(suffix);
        if !basis.is_greedy(core) {
            return Err(Error::NotInLanguage(format!(
                "suffix {} is not a greedy expansion",
                format_digits(suffix, size)
            )));
        }
        let n = basis.val(core)?;
        let succ = pad(basis.repr_digits(&(n + 1u32))?, j);
        let low = succ[succ.len().saturating_sub(window)..].to_vec();
        if last_low.as_ref() == Some(&low) {
            runs += 1;
        } else {
            runs = 1;
        }
        last_low = Some(low);
        full = succ;
    }
    Ok(OdometerStep {
        digits: format_digits(&full, size),
        stabilized: runs >= stable_runs,
        truncation_lengths: s.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderQuery {
    pub word: String,
    pub n: u64,
    pub count: u64,
    pub measure: f64,
}

/// `ν_N(cyl(w))`: the share of `i < N` whose zero-padded expansion ends
/// with `w`. Counted by scanning the orbit of 0.
pub fn cylinder_measure(basis: &Basis, w: &[Digit], n: u64) -> Result<CylinderQuery> {
    if n == 0 {
        return Err(Error::OutOfRange("N must be at least 1".into()));
    }
    let k = w.len();
    let mut count = 0u64;
    let mut c = basis.counter();
    for _ in 0..n {
        let cur = pad(c.current(), k);
        if cur[cur.len() - k..] == *w {
            count += 1;
        }
        c.step();
    }
    Ok(CylinderQuery {
        word: format_digits(w, basis.alphabet().size()),
        n,
        count,
        measure: count as f64 / n as f64,
    })
}

/// Indices `k >= 1` such that `g_k` ends the zero-padded expansion of `i`.
///
/// The length-`k` suffix is itself a padded greedy word, and among those
/// `g_k` is the one of value `G_k - 1`.
pub fn layers_of(basis: &Basis, digits: &[Digit]) -> Vec<usize> {
    let g = basis.small_terms();
    let mut acc = 0u64;
    let mut out = Vec::new();
    for (k, &x) in digits.iter().rev().enumerate() {
        acc += x as u64 * g[k];
        if g.get(k + 1) == Some(&(acc + 1)) {
            out.push(k + 1);
        }
    }
    out
}

/// Counts `#{i < N : g_k ends repr(i)}` for `k = 1..=kmax` in one pass.
pub fn layer_counts(basis: &Basis, kmax: usize, n: u64) -> Result<Vec<u64>> {
    if kmax + 1 >= basis.small_terms().len() {
        return Err(Error::OutOfRange(format!("basis too short for K = {kmax}")));
    }
    let mut counts = vec![0u64; kmax + 1];
    let mut c = basis.counter();
    for _ in 0..n {
        for k in layers_of(basis, &c.current()) {
            if k <= kmax {
                counts[k] += 1;
            }
        }
        c.step();
    }
    Ok(counts)
}

/// `J(k)`: the largest `m < k` such that `g_m` is a suffix of `g_k`.
pub fn j_table(basis: &Basis, kmax: usize) -> Result<Vec<usize>> {
    let g: Vec<Vec<Digit>> = (0..=kmax).map(|k| basis.g_max(k)).collect::<Result<_>>()?;
    Ok((0..=kmax)
        .map(|k| (0..k).rev().find(|&m| g[k].ends_with(&g[m])).unwrap_or(0))
        .collect())
}

/// `M_K = Σ_{j > K} (j + 1) / G_j` over the available terms.
pub fn tail_bound(basis: &Basis, k: usize) -> BigRational {
    basis
        .terms()
        .iter()
        .enumerate()
        .skip(k + 1)
        .map(|(j, g)| BigRational::new(BigInt::from(j + 1), BigInt::from(g.clone())))
        .fold(BigRational::zero(), |a, b| a + b)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerRow {
    pub k: usize,
    pub g_k: String,
    pub j: usize,
    pub weight: usize,
    pub count: u64,
    pub measure: f64,
    pub cumulative: f64,
    pub tail_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerReport {
    pub n: u64,
    pub k: usize,
    pub rows: Vec<LayerRow>,
    /// `1 + Σ_{k <= K} (k - J(k)) ν_N(cyl(g_k))`.
    pub estimate: f64,
    pub tail_bound: f64,
    pub tail_bound_exact: String,
    /// The series `Σ k / G_k` has a negligible tail on the available terms.
    pub series_bounded: bool,
}

pub fn layer_cp(basis: &Basis, kmax: usize, n: u64, tolerance: Option<f64>) -> Result<LayerReport> {
    if n == 0 || kmax == 0 {
        return Err(Error::OutOfRange("need K >= 1 and N >= 1".into()));
    }
    let counts = layer_counts(basis, kmax, n)?;
    let j = j_table(basis, kmax)?;
    let mut cumulative = 1.0;
    let mut rows = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let measure = counts[k] as f64 / n as f64;
        let weight = k - j[k];
        cumulative += weight as f64 * measure;
        rows.push(LayerRow {
            k,
            g_k: format_digits(&basis.g_max(k)?, basis.alphabet().size()),
            j: j[k],
            weight,
            count: counts[k],
            measure,
            cumulative,
            tail_bound: rational_to_f64(&tail_bound(basis, k)),
        });
    }
    let tail = tail_bound(basis, kmax);
    let tail_f = rational_to_f64(&tail);
    if let Some(tol) = tolerance {
        if tail_f > tol {
            return Err(Error::OutOfRange(format!(
                "tail bound {tail_f:.3e} exceeds the tolerance {tol:.3e}"
            )));
        }
    }
    Ok(LayerReport {
        n,
        k: kmax,
        rows,
        estimate: cumulative,
        tail_bound: tail_f,
        tail_bound_exact: tail.to_string(),
        series_bounded: rational_to_f64(&tail_bound(basis, basis.len() / 2)) < 1e-9,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FkCheck {
    pub k: usize,
    pub n: u64,
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
}

/// `Σ_{i<N} f_k(i) = Σ_{i<N} f_{k-1}(i) + ⌊N / G_k⌋ (k + 1)` for `N < G_{k+1}`,
/// with `f_k(i) = cp(i)` when `cp(i) <= k + 1` and 0 otherwise.
pub fn fk_identity_check(basis: &Basis, k: usize, n: u64) -> Result<FkCheck> {
    let g = basis.small_terms();
    let upper = *g
        .get(k + 1)
        .ok_or_else(|| Error::OutOfRange(format!("basis too short for k = {k}")))?;
    if n == 0 || n >= upper {
        return Err(Error::OutOfRange(format!(
            "need 0 < N < G_{} = {upper}",
            k + 1
        )));
    }
    let f = |cp: u32, k: i64| if (cp as i64) <= k + 1 { cp as u64 } else { 0 };
    let (mut lhs, mut prev) = (0u64, 0u64);
    let mut c = basis.counter();
    for _ in 0..n {
        let cp = c.step();
        lhs += f(cp, k as i64);
        prev += f(cp, k as i64 - 1);
    }
    let rhs = prev + (n / g[k]) * (k as u64 + 1);
    Ok(FkCheck {
        k,
        n,
        lhs,
        rhs,
        holds: lhs == rhs,
    })
}
