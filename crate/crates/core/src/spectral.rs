//! Eigenvalue structure of a counting sequence: roots of its minimal
//! polynomial, their moduli and multiplicities, and the dominance verdicts
//! that control the local growth rate.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::recurrence::LinearRecurrence;
use crate::roots::{compare_moduli, isolate_roots, RootApprox};

pub const START_PRECISION: u32 = 128;
pub const MAX_PRECISION: u32 = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthClass {
    /// The sequence is eventually zero.
    Finite,
    Polynomial,
    Exponential,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralRoot {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub multiplicity: usize,
    pub is_real: bool,
    /// Whether the modulus equals the maximal modulus.
    pub is_maximal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    #[serde(serialize_with = "ser_display")]
    pub minimal_polynomial: Poly,
    /// Leading terms not governed by the polynomial.
    pub offset: usize,
    /// Monic coefficients, highest degree first, as exact rational strings.
    pub coefficients: Vec<String>,
    pub factors: Vec<FactorInfo>,
    pub roots: Vec<SpectralRoot>,
    /// The maximal modulus λ.
    pub modulus: f64,
    #[serde(serialize_with = "ser_opt_display")]
    pub modulus_exact: Option<BigRational>,
    /// Square-free factor having λ as a root.
    #[serde(serialize_with = "ser_opt_display")]
    pub modulus_polynomial: Option<Poly>,
    /// Rational interval isolating λ as a root of `modulus_polynomial`.
    #[serde(serialize_with = "ser_interval")]
    pub modulus_interval: Option<(BigRational, BigRational)>,
    pub modulus_multiplicity: usize,
    pub is_dev: bool,
    pub is_adev: bool,
    pub growth: GrowthClass,
    pub local_growth_rate: Option<f64>,
    pub precision_bits: u32,
    /// The maximal modulus is reached by a positive real root.
    pub positive_root_attains_modulus: bool,
    /// No root of maximal modulus has a larger multiplicity than λ.
    pub multiplicity_bound_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorInfo {
    #[serde(serialize_with = "ser_display")]
    pub factor: Poly,
    pub multiplicity: usize,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &Option<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

fn ser_interval<S: serde::Serializer>(
    v: &Option<(BigRational, BigRational)>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some((a, b)) => s.serialize_some(&[a.to_string(), b.to_string()]),
        None => s.serialize_none(),
    }
}

struct Located {
    approx: RootApprox,
    factor: usize,
    multiplicity: usize,
}

enum Attempt {
    Done(Box<SpectralReport>),
    Ambiguous(String),
}

/// Classifies the minimal polynomial of a counting sequence.
///
/// Multiplicities come from the exact square-free decomposition; the working
/// precision doubles from 128 up to 2048 bits until every modulus is either
/// certified distinct from the maximum or equal to it within `2^(-prec/2)`.
pub fn spectral_classify(rec: &LinearRecurrence) -> Result<SpectralReport> {
    classify_poly(&rec.poly, rec.offset)
}

pub fn classify_poly(poly: &Poly, offset: usize) -> Result<SpectralReport> {
    let poly = poly.monic();
    let factors = poly.square_free_decomposition();
    let mut prec = START_PRECISION;
    loop {
        match attempt(&poly, offset, &factors, prec)? {
            Attempt::Done(r) => return Ok(*r),
            Attempt::Ambiguous(reason) => {
                if prec >= MAX_PRECISION {
                    return Err(Error::PrecisionExceeded { bits: prec, reason });
                }
                prec *= 2;
            }
        }
    }
}

fn attempt(poly: &Poly, offset: usize, factors: &[(Poly, usize)], prec: u32) -> Result<Attempt> {
    let coefficients = poly.coeffs().iter().rev().map(|c| c.to_string()).collect();
    let factor_info = factors
        .iter()
        .map(|(f, m)| FactorInfo {
            factor: f.clone(),
            multiplicity: *m,
        })
        .collect();

    let mut located = Vec::new();
    for (fi, (f, m)) in factors.iter().enumerate() {
        for approx in isolate_roots(f, prec)? {
            located.push(Located {
                approx,
                factor: fi,
                multiplicity: *m,
            });
        }
    }

    if located.is_empty() {
        return Ok(Attempt::Done(Box::new(SpectralReport {
            minimal_polynomial: poly.clone(),
            offset,
            coefficients,
            factors: factor_info,
            roots: Vec::new(),
            modulus: 0.0,
            modulus_exact: Some(BigRational::zero()),
            modulus_polynomial: None,
            modulus_interval: None,
            modulus_multiplicity: 0,
            is_dev: false,
            is_adev: false,
            growth: GrowthClass::Finite,
            local_growth_rate: None,
            precision_bits: prec,
            positive_root_attains_modulus: true,
            multiplicity_bound_holds: true,
        })));
    }

    // The largest positive real root; it must attain the maximal modulus.
    let lambda_idx = located
        .iter()
        .enumerate()
        .filter(|(_, l)| l.approx.is_real && l.approx.z.re.is_positive())
        .max_by(|a, b| a.1.approx.z.re.cmp(&b.1.approx.z.re))
        .map(|(i, _)| i);
    let top_idx = (0..located.len())
        .max_by(|&a, &b| {
            located[a]
                .approx
                .z
                .norm_sqr_scaled()
                .cmp(&located[b].approx.z.norm_sqr_scaled())
        })
        .expect("nonempty");
    let reference = lambda_idx.unwrap_or(top_idx);

    let ref_mod = located[reference].approx.z.modulus_scaled();
    let mut is_max = vec![false; located.len()];
    for (i, l) in located.iter().enumerate() {
        if i == reference {
            is_max[i] = true;
            continue;
        }
        match compare_moduli(&l.approx, &located[reference].approx) {
            Some(Ordering::Less) => {}
            Some(_) if lambda_idx.is_some() => {
                // A root strictly outside the positive root's circle: the
                // positive-root property fails for this polynomial.
                is_max[i] = true;
            }
            Some(_) => is_max[i] = true,
            None => {
                let gap = (l.approx.z.modulus_scaled() - &ref_mod).abs();
                if (gap << (prec as usize / 2)) <= ref_mod {
                    is_max[i] = true;
                } else {
                    return Ok(Attempt::Ambiguous(format!(
                        "moduli of roots {i} and {reference} are not separated"
                    )));
                }
            }
        }
    }
    let strictly_above = located.iter().enumerate().any(|(i, l)| {
        i != reference
            && compare_moduli(&l.approx, &located[reference].approx) == Some(Ordering::Greater)
    });
    let positive_root_attains_modulus = lambda_idx.is_some() && !strictly_above;

    let lam = &located[reference];
    let lambda_mult = lam.multiplicity;
    let others: Vec<usize> = (0..located.len())
        .filter(|&i| i != reference && is_max[i])
        .collect();
    let is_dev = others.is_empty() && positive_root_attains_modulus;
    let is_adev = positive_root_attains_modulus
        && others
            .iter()
            .all(|&i| located[i].multiplicity < lambda_mult);
    let multiplicity_bound_holds = others
        .iter()
        .all(|&i| located[i].multiplicity <= lambda_mult);

    let lambda_poly = factors[lam.factor].0.clone();
    let one_scaled = BigInt::one() << prec as usize;
    let lo_scaled = &lam.approx.z.re - &lam.approx.radius;
    let hi_scaled = &lam.approx.z.re + &lam.approx.radius;
    let denom = BigInt::one() << prec as usize;
    let mut interval = (
        BigRational::new(lo_scaled.clone(), denom.clone()),
        BigRational::new(hi_scaled.clone(), denom.clone()),
    );
    let modulus_exact = nearest_integer_root(&lambda_poly, &lam.approx.z.re, prec);
    if let Some(k) = &modulus_exact {
        interval = (k.clone(), k.clone());
    }

    let growth = if modulus_exact.as_ref().is_some_and(|k| k.is_one()) {
        GrowthClass::Polynomial
    } else if lo_scaled > one_scaled {
        GrowthClass::Exponential
    } else if hi_scaled < one_scaled {
        // Only possible for sequences not coming from a language.
        GrowthClass::Finite
    } else {
        return Ok(Attempt::Ambiguous("modulus too close to 1".into()));
    };

    let modulus = lam.approx.modulus_f64();
    let roots = located
        .iter()
        .zip(&is_max)
        .map(|(l, &m)| SpectralRoot {
            re: l.approx.z.re_f64(),
            im: l.approx.z.im_f64(),
            modulus: l.approx.modulus_f64(),
            multiplicity: l.multiplicity,
            is_real: l.approx.is_real,
            is_maximal: m,
        })
        .collect();

    Ok(Attempt::Done(Box::new(SpectralReport {
        minimal_polynomial: poly.clone(),
        offset,
        coefficients,
        factors: factor_info,
        roots,
        modulus,
        modulus_exact,
        modulus_polynomial: Some(lambda_poly),
        modulus_interval: Some(interval),
        modulus_multiplicity: lambda_mult,
        is_dev,
        is_adev,
        growth,
        local_growth_rate: if is_adev { Some(modulus) } else { None },
        precision_bits: prec,
        positive_root_attains_modulus,
        multiplicity_bound_holds,
    })))
}

/// The integer nearest to a real root, when it is an exact root.
fn nearest_integer_root(f: &Poly, re_scaled: &BigInt, prec: u32) -> Option<BigRational> {
    let half = BigInt::one() << (prec as usize - 1);
    let k = (re_scaled + half) >> prec as usize;
    let k = BigRational::from_integer(k);
    f.eval(&k).is_zero().then_some(k)
}

impl SpectralReport {
    /// True when `other` has the same maximal modulus, decided exactly: both
    /// moduli are roots of the same irreducible factor and the common factor
    /// of the two defining polynomials has a root in both isolating intervals.
    pub fn same_modulus(&self, other: &SpectralReport) -> bool {
        match (&self.modulus_exact, &other.modulus_exact) {
            (Some(a), Some(b)) => return a == b,
            // An integer modulus is never equal to an irrational one.
            (Some(_), None) | (None, Some(_))
                if self.modulus_polynomial.is_some() && other.modulus_polynomial.is_some() =>
            {
                return false;
            }
            _ => {}
        }
        let (Some(p), Some(q)) = (&self.modulus_polynomial, &other.modulus_polynomial) else {
            return self.modulus == other.modulus;
        };
        let (Some((a_lo, a_hi)), Some((b_lo, b_hi))) =
            (&self.modulus_interval, &other.modulus_interval)
        else {
            return false;
        };
        let lo = if a_lo > b_lo { a_lo } else { b_lo };
        let hi = if a_hi < b_hi { a_hi } else { b_hi };
        if lo > hi {
            return false;
        }
        let g = p.gcd(q);
        if g.is_constant() {
            return false;
        }
        // λ is a simple root of each factor; a root of g inside both
        // intervals is then λ for both.
        let lo = lo - BigRational::new(BigInt::one(), BigInt::from(1u64 << 62));
        g.count_real_roots_in(&lo, hi) > 0
    }

    /// The exact carry propagation `λ / (λ - 1)` when λ is an integer.
    pub fn carry_value_exact(&self) -> Option<BigRational> {
        let l = self.modulus_exact.as_ref()?;
        if *l <= BigRational::one() {
            return None;
        }
        Some(l / (l - BigRational::one()))
    }
}
