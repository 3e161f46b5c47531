//! Measuring carry propagation on any supported numeration system.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::automata::{decide_cp, language_spectrum, CountTable, CpVerdict, Dfa, RankedDfa};
use crate::error::{Error, Result};
use crate::numeration::greedy::{Basis, BasisRule};
use crate::numeration::{AlgebraicReal, RationalBase};
use crate::poly::{rational_to_f64, Poly};
use crate::signature::{level_counts, CpStep, CpStream, HShape, LevelCounter, Signature};
use crate::spectral::GrowthClass;
use crate::words::Digit;

/// Longest stream the analyzer will enumerate.
pub const MAX_STREAM: u64 = 10_000_000_000;

/// Level tables are never extended past this length when picking default
/// checkpoints.
const CHECKPOINT_LEVELS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Periodic signature: `p / (p - q)`.
    PerSig,
    /// Rational language with an almost dominating eigenvalue.
    ADevCp,
    /// Greedy system of a Parry number: `β / (β - 1)`.
    Beta,
    /// Greedy system on a linear recurrence with dominant root `γ`.
    GnsExponential,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theory {
    pub value: f64,
    pub exact: Option<String>,
    pub provenance: Provenance,
}

/// A numeration system seen through its carry stream and level counts.
pub enum SystemSource {
    Signature(Signature),
    /// The unbalanced language `H`.
    HLanguage,
    Dfa(Box<RankedDfa>),
    RationalBase(RationalBase),
    Greedy {
        basis: Basis,
        beta: Option<AlgebraicReal>,
    },
}

impl SystemSource {
    pub fn signature(sig: Signature) -> Result<Self> {
        sig.require_enumerable()?;
        Ok(SystemSource::Signature(sig))
    }

    pub fn dfa(dfa: &Dfa) -> Result<Self> {
        let r = RankedDfa::new(dfa)?;
        if !r.is_pce() {
            return Err(Error::NotPce(
                "carry measurements need a prefix-closed extendable language".into(),
            ));
        }
        Ok(SystemSource::Dfa(Box::new(r)))
    }

    pub fn greedy(basis: Basis) -> Self {
        SystemSource::Greedy { basis, beta: None }
    }

    pub fn beta(basis: Basis, beta: AlgebraicReal) -> Self {
        SystemSource::Greedy {
            basis,
            beta: Some(beta),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SystemSource::Signature(s) => format!("signature {s}"),
            SystemSource::HLanguage => "language H".into(),
            SystemSource::Dfa(_) => "automaton".into(),
            SystemSource::RationalBase(rb) => format!("rational base {}/{}", rb.p(), rb.q()),
            SystemSource::Greedy { beta: Some(b), .. } => format!("beta {:.15}", b.to_f64()),
            SystemSource::Greedy { .. } => "greedy basis".into(),
        }
    }

    /// The limit of the mean carry when the theory provides one.
    pub fn theory(&self) -> Result<Option<Theory>> {
        let from_rational = |r: BigRational, provenance| Theory {
            value: rational_to_f64(&r),
            exact: Some(r.to_string()),
            provenance,
        };
        Ok(match self {
            SystemSource::Signature(s) => s
                .theoretical_cp()
                .ok()
                .map(|r| from_rational(r, Provenance::PerSig)),
            SystemSource::HLanguage => None,
            SystemSource::RationalBase(rb) => {
                Some(from_rational(rb.theoretical_cp(), Provenance::PerSig))
            }
            SystemSource::Dfa(r) => match decide_cp(r.dfa())?.0 {
                CpVerdict::Exists { value, exact, .. } => Some(Theory {
                    value,
                    exact,
                    provenance: Provenance::ADevCp,
                }),
                CpVerdict::Undetermined { .. } => None,
            },
            SystemSource::Greedy { beta: Some(b), .. } => Some(gamma_theory(b, Provenance::Beta)),
            SystemSource::Greedy { basis, beta: None } => match basis.rule() {
                BasisRule::Recurrence(c) => {
                    // Characteristic polynomial X^k - c_1 X^{k-1} - ... - c_k.
                    let k = c.len();
                    let mut coeffs: Vec<i64> = c.iter().rev().map(|x| -x).collect();
                    coeffs.push(1);
                    debug_assert_eq!(coeffs.len(), k + 1);
                    AlgebraicReal::largest_root(&Poly::from_ints(coeffs))
                        .ok()
                        .map(|g| gamma_theory(&g, Provenance::GnsExponential))
                }
                _ => None,
            },
        })
    }

    /// Calls `f` on `cp(0), ..., cp(count - 1)` in order.
    pub fn for_each_cp<F: FnMut(CpStep)>(&self, count: u64, mut f: F) -> Result<()> {
        if count > MAX_STREAM {
            return Err(Error::BudgetExceeded(format!(
                "{count} carries requested, the limit is {MAX_STREAM}"
            )));
        }
        match self {
            SystemSource::Signature(s) => CpStream::new(s, count).for_each(f),
            SystemSource::HLanguage => CpStream::new(&HShape, count).for_each(f),
            SystemSource::Dfa(r) => {
                let mut stream = r.cp_stream(count)?;
                stream.by_ref().for_each(&mut f);
                if let Some(e) = stream.take_error() {
                    return Err(e);
                }
            }
            SystemSource::RationalBase(rb) => rb.cp_stream(0, count).for_each(f),
            SystemSource::Greedy { basis, .. } => {
                let top = basis.small_terms().last().copied().unwrap_or(0);
                if count >= top && basis.small_terms().len() == basis.len() {
                    return Err(Error::OutOfRange(format!(
                        "{count} exceeds the largest basis term {top}"
                    )));
                }
                let mut c = basis.counter();
                for index in 0..count {
                    let level = c.len() as u32;
                    let cp = c.step();
                    f(CpStep { index, cp, level });
                }
            }
        }
        Ok(())
    }

    /// `u(ℓ)` and `v(ℓ)` for `ℓ <= lmax`.
    pub fn levels(&self, lmax: usize) -> Result<LevelCounter> {
        Ok(match self {
            SystemSource::Signature(s) => level_counts(s, lmax),
            SystemSource::HLanguage => level_counts(&HShape, lmax),
            SystemSource::RationalBase(rb) => level_counts(&rb.signature(), lmax),
            SystemSource::Dfa(r) => {
                let v = (0..=lmax).map(|l| r.v(l)).collect::<Result<Vec<_>>>()?;
                LevelCounter::from_cumulative(v)
            }
            SystemSource::Greedy { basis, .. } => {
                // Words of length at most ℓ are the expansions of 0..G_ℓ - 1.
                let v = (0..=lmax)
                    .map(|l| basis.term(l).cloned())
                    .collect::<Result<Vec<_>>>()?;
                LevelCounter::from_cumulative(v)
            }
        })
    }

    /// `scp(n)` for a single `n`; closed form for automata, streaming
    /// otherwise.
    pub fn scp(&self, n: u64) -> Result<BigUint> {
        if let SystemSource::Dfa(r) = self {
            return r.fast_scp_u64(n);
        }
        let mut total = 0u64;
        self.for_each_cp(n, |s| total += s.cp as u64)?;
        Ok(total.into())
    }
}

fn gamma_theory(g: &AlgebraicReal, provenance: Provenance) -> Theory {
    let x = g.to_f64();
    let exact = (g.degree() == 1).then(|| {
        let root = -g.poly().coeff(0) / g.poly().coeff(1);
        (&root / (&root - BigRational::from_integer(1.into()))).to_string()
    });
    Theory {
        value: x / (x - 1.0),
        exact,
        provenance,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Checkpoint {
    pub n: u64,
    pub scp: u64,
    pub mean: f64,
    pub mean_exact: String,
}

impl Checkpoint {
    fn new(n: u64, scp: u64) -> Self {
        let exact = BigRational::new(BigInt::from(scp), BigInt::from(n));
        Checkpoint {
            n,
            scp,
            mean: scp as f64 / n as f64,
            mean_exact: exact.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CpReport {
    pub source: String,
    pub n: u64,
    pub scp: u64,
    pub mean: f64,
    pub mean_exact: String,
    pub checkpoints: Vec<Checkpoint>,
    pub theory: Option<Theory>,
    /// `mean - theory`, when a theoretical value is known.
    pub deviation: Option<f64>,
}

/// Powers of two and the level boundaries `v(ℓ)` up to `n`, and `n` itself.
pub fn default_checkpoints(src: &SystemSource, n: u64) -> Result<Vec<u64>> {
    let mut out: Vec<u64> = (0..64).map(|k| 1u64 << k).take_while(|&p| p <= n).collect();
    let levels = match src {
        SystemSource::Greedy { basis, .. } => basis.len().saturating_sub(1).min(CHECKPOINT_LEVELS),
        _ => CHECKPOINT_LEVELS,
    };
    let lc = src.levels(levels)?;
    out.extend(lc.v.iter().filter_map(|v| v.to_u64()).filter(|&v| v <= n));
    out.push(n);
    out.sort_unstable();
    out.dedup();
    out.retain(|&x| x > 0);
    Ok(out)
}

/// Streams `cp(0..n)`, recording the running mean at each checkpoint.
pub fn empirical_cp(src: &SystemSource, n: u64, checkpoints: Option<&[u64]>) -> Result<CpReport> {
    if n == 0 {
        return Err(Error::OutOfRange("N must be at least 1".into()));
    }
    let mut cps = match checkpoints {
        Some(c) => c.iter().copied().filter(|&x| x > 0 && x <= n).collect(),
        None => default_checkpoints(src, n)?,
    };
    cps.push(n);
    cps.sort_unstable();
    cps.dedup();
    let mut samples = Vec::with_capacity(cps.len());
    let mut next = cps.iter().peekable();
    let mut total = 0u64;
    src.for_each_cp(n, |s| {
        total += s.cp as u64;
        if next.peek() == Some(&&(s.index + 1)) {
            next.next();
            samples.push(Checkpoint::new(s.index + 1, total));
        }
    })?;
    let last = Checkpoint::new(n, total);
    let theory = src.theory()?;
    Ok(CpReport {
        source: src.label(),
        n,
        scp: total,
        mean: last.mean,
        mean_exact: last.mean_exact,
        deviation: theory.as_ref().map(|t| last.mean - t.value),
        checkpoints: samples,
        theory,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Converging,
    /// Increments do not shrink: the means grow without bound.
    Diverging,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FilteredPoint {
    pub level: usize,
    pub v: String,
    pub sum: String,
    pub mean: f64,
    pub mean_exact: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FilteredReport {
    pub source: String,
    pub points: Vec<FilteredPoint>,
    pub trend: Trend,
}

/// Means at the checkpoints `N = v(ℓ)`: `(v(0) + ... + v(ℓ)) / v(ℓ)`.
pub fn filtered_cp(src: &SystemSource, lmax: usize) -> Result<FilteredReport> {
    let lc = src.levels(lmax)?;
    let mut sum = BigUint::zero();
    let points: Vec<FilteredPoint> =
        lc.v.iter()
            .enumerate()
            .map(|(level, v)| {
                sum += v;
                let exact = BigRational::new(sum.clone().into(), v.clone().into());
                FilteredPoint {
                    level,
                    v: v.to_string(),
                    sum: sum.to_string(),
                    mean: rational_to_f64(&exact),
                    mean_exact: exact.to_string(),
                }
            })
            .collect();
    let means: Vec<f64> = points.iter().map(|p| p.mean).collect();
    Ok(FilteredReport {
        source: src.label(),
        trend: trend(&means),
        points,
    })
}

/// Compares the size of the last four increments with the four before
/// them: geometric decay shrinks the ratio, while steady growth or an
/// oscillation keeps it near 1.
fn trend(means: &[f64]) -> Trend {
    if means.len() < 9 {
        return Trend::Undetermined;
    }
    let d: Vec<f64> = means.windows(2).map(|w| w[1] - w[0]).collect();
    let (before, recent) = d[d.len() - 8..].split_at(4);
    let size = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>();
    if size(recent) < 1e-9 || size(recent) <= 0.75 * size(before) {
        Trend::Converging
    } else if recent.iter().all(|&x| x > 0.0) && size(recent) > 1e-2 {
        Trend::Diverging
    } else {
        Trend::Undetermined
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbePoint {
    pub n: String,
    pub scp: String,
    pub mean: f64,
    pub mean_exact: String,
}

/// Means `scp(N_j) / N_j` along an increasing sequence of indices.
pub fn probe(src: &SystemSource, points: &[BigUint]) -> Result<Vec<ProbePoint>> {
    if points.windows(2).any(|w| w[1] <= w[0]) || points.first().is_some_and(|p| p.is_zero()) {
        return Err(Error::OutOfRange(
            "probe points must be positive and increasing".into(),
        ));
    }
    let scps: Vec<BigUint> = match src {
        SystemSource::Dfa(r) => points
            .iter()
            .map(|n| r.fast_scp(n))
            .collect::<Result<_>>()?,
        _ => {
            let small: Vec<u64> = points
                .iter()
                .map(|p| {
                    p.to_u64()
                        .ok_or_else(|| Error::BudgetExceeded(format!("probe point {p} too large")))
                })
                .collect::<Result<_>>()?;
            let mut out = Vec::with_capacity(small.len());
            let mut total = 0u64;
            let mut next = small.iter().peekable();
            src.for_each_cp(*small.last().unwrap_or(&0), |s| {
                total += s.cp as u64;
                while next.peek() == Some(&&(s.index + 1)) {
                    next.next();
                    out.push(BigUint::from(total));
                }
            })?;
            out
        }
    };
    Ok(points
        .iter()
        .zip(scps)
        .map(|(n, s)| {
            let exact = BigRational::new(s.clone().into(), n.clone().into());
            ProbePoint {
                n: n.to_string(),
                scp: s.to_string(),
                mean: rational_to_f64(&exact),
                mean_exact: exact.to_string(),
            }
        })
        .collect())
}

/// `M(ℓ) = 3·2^ℓ - 1`, where the mean carry of `H` is smallest.
pub fn h_probe_point(l: u32) -> u64 {
    3 * (1u64 << l) - 1
}

/// Rank of the radix-largest word of length `len` starting with `prefix`.
pub fn max_extension_rank(r: &RankedDfa, prefix: &[Digit], len: usize) -> Result<BigUint> {
    let dfa = r.dfa();
    if prefix.len() > len {
        return Err(Error::OutOfRange(
            "prefix longer than the target length".into(),
        ));
    }
    let counts = CountTable::compute(dfa, len);
    let mut q = dfa
        .run(prefix)
        .ok_or_else(|| Error::NotInLanguage(format!("{prefix:?}")))?;
    let mut word = prefix.to_vec();
    for rest in (0..len - prefix.len()).rev() {
        let (a, t) = dfa
            .edges(q)
            .filter(|&(_, t)| !counts.u(t, rest).is_zero())
            .last()
            .ok_or_else(|| Error::NotInLanguage(format!("no extension of {prefix:?}")))?;
        word.push(a);
        q = t;
    }
    if !dfa.is_final(q) {
        return Err(Error::NotInLanguage(format!("no extension of {prefix:?}")));
    }
    r.value_of(&word)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralVerdict {
    pub growth: GrowthClass,
    pub modulus: f64,
    pub is_dev: bool,
    pub is_adev: bool,
    pub local_growth_rate: Option<f64>,
    pub minimal_polynomial: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub source: String,
    pub ratios: Vec<f64>,
    pub verdict: Option<SpectralVerdict>,
    /// `γ / (γ - 1)` when the local growth rate is known.
    pub cp_from_gamma: Option<f64>,
    /// The closed-form carry agrees with `γ / (γ - 1)`.
    pub consistent: Option<bool>,
}

/// Ratios `u(ℓ+1) / u(ℓ)` and, for automata, the exact verdict.
pub fn local_growth(src: &SystemSource, lmax: usize) -> Result<GrowthReport> {
    let ratios = src.levels(lmax)?.growth_ratios();
    let verdict = match src {
        SystemSource::Dfa(r) => {
            let spectra = language_spectrum(r.dfa())?;
            let rep = &spectra[0].2;
            Some(SpectralVerdict {
                growth: rep.growth,
                modulus: rep.modulus,
                is_dev: rep.is_dev,
                is_adev: rep.is_adev,
                local_growth_rate: rep.local_growth_rate,
                minimal_polynomial: rep.minimal_polynomial.to_string(),
            })
        }
        _ => None,
    };
    let gamma = match &verdict {
        Some(v) => v.local_growth_rate,
        None => match src {
            SystemSource::HLanguage => Some(2.0),
            _ => None,
        },
    };
    let cp_from_gamma = gamma.filter(|&g| g > 1.0).map(|g| g / (g - 1.0));
    let consistent = match (cp_from_gamma, src.theory()?) {
        (Some(c), Some(t)) => Some((c - t.value).abs() < 1e-9),
        _ => None,
    };
    Ok(GrowthReport {
        source: src.label(),
        ratios,
        verdict,
        cp_from_gamma,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::builtin;

    #[test]
    fn base_two_stream() {
        let src = SystemSource::dfa(&builtin("base(2)").unwrap()).unwrap();
        let r = empirical_cp(&src, 1 << 12, None).unwrap();
        // scp(2^k) = 2^{k+1} - 1 in base 2.
        assert_eq!(r.scp, (1 << 13) - 1);
        assert!(r.checkpoints.iter().any(|c| c.n == 1024 && c.scp == 2047));
        assert_eq!(r.theory.unwrap().exact.as_deref(), Some("2"));
    }

    #[test]
    fn filtered_means_match_enumeration() {
        let sources = [
            SystemSource::HLanguage,
            SystemSource::RationalBase(RationalBase::new(3, 2).unwrap()),
            SystemSource::greedy(Basis::fibonacci()),
            SystemSource::dfa(&builtin("K3").unwrap()).unwrap(),
        ];
        for src in &sources {
            let f = filtered_cp(src, 10).unwrap();
            for p in &f.points {
                let v: u64 = p.v.parse().unwrap();
                assert_eq!(src.scp(v).unwrap().to_string(), p.sum, "{}", src.label());
            }
        }
    }

    #[test]
    fn chain_language_diverges() {
        let sig = Signature::parse("prefix: 2\nperiod: 1").unwrap();
        let f = filtered_cp(&SystemSource::signature(sig).unwrap(), 20).unwrap();
        assert_eq!(f.trend, Trend::Diverging);
        let b3 = SystemSource::signature(Signature::constant(3)).unwrap();
        let f = filtered_cp(&b3, 30).unwrap();
        assert_eq!(f.trend, Trend::Converging);
        // The square language alternates between two limits.
        let k1 = SystemSource::dfa(&builtin("K1").unwrap()).unwrap();
        assert_eq!(filtered_cp(&k1, 20).unwrap().trend, Trend::Undetermined);
        assert!((f.points.last().unwrap().mean - 1.5).abs() < 1e-9);
    }

    #[test]
    fn probes_agree_with_streaming() {
        let dfa = builtin("K4").unwrap();
        let src = SystemSource::dfa(&dfa).unwrap();
        let pts: Vec<BigUint> = [5u64, 17, 100, 999].iter().map(|&x| x.into()).collect();
        let fast = probe(&src, &pts).unwrap();
        for (p, n) in fast.iter().zip([5u64, 17, 100, 999]) {
            let mut total = 0u64;
            src.for_each_cp(n, |s| total += s.cp as u64).unwrap();
            assert_eq!(p.scp, total.to_string());
        }
        assert!(probe(&src, &[BigUint::from(3u32), BigUint::from(2u32)]).is_err());
    }

    #[test]
    fn growth_verdicts() {
        let k1 = SystemSource::dfa(&builtin("K1").unwrap()).unwrap();
        let g = local_growth(&k1, 8).unwrap();
        assert_eq!(&g.ratios[..4], &[1.0, 4.0, 1.0, 4.0]);
        assert_eq!(g.verdict.unwrap().local_growth_rate, None);
        let b = SystemSource::dfa(&builtin("base(5)").unwrap()).unwrap();
        let g = local_growth(&b, 8).unwrap();
        assert_eq!(g.consistent, Some(true));
    }

    #[test]
    fn greedy_theory() {
        let t = SystemSource::greedy(Basis::tribonacci())
            .theory()
            .unwrap()
            .unwrap();
        assert!((t.value - 2.191_487_883_953_1).abs() < 1e-9);
        assert_eq!(t.provenance, Provenance::GnsExponential);
        assert!(SystemSource::greedy(Basis::explicit([1, 2, 3]).unwrap())
            .theory()
            .unwrap()
            .is_none());
    }
}
