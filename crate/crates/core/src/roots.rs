//! Complex roots of square-free rational polynomials.
//!
//! Roots are first located with a double precision Aberth iteration and then
//! polished in binary fixed point with exact residuals. Every root carries an
//! inclusion radius `d * |f(z) / f'(z)|`, so callers can tell a numerical tie
//! from a real one.

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Complex number stored as `(re + i im) / 2^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedComplex {
    pub re: BigInt,
    pub im: BigInt,
    pub prec: u32,
}

impl FixedComplex {
    fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        FixedComplex {
            re: f64_to_fixed(re, prec),
            im: f64_to_fixed(im, prec),
            prec,
        }
    }

    pub fn re_f64(&self) -> f64 {
        fixed_to_f64(&self.re, self.prec)
    }

    pub fn im_f64(&self) -> f64 {
        fixed_to_f64(&self.im, self.prec)
    }

    /// `|z|^2` scaled by `2^(2 prec)`.
    pub fn norm_sqr_scaled(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `|z|` scaled by `2^prec`, rounded down.
    pub fn modulus_scaled(&self) -> BigInt {
        self.norm_sqr_scaled().sqrt()
    }
}

/// One root with its certified inclusion radius, both at scale `2^prec`.
#[derive(Clone, Debug)]
pub struct RootApprox {
    pub z: FixedComplex,
    pub radius: BigInt,
    pub is_real: bool,
}

impl RootApprox {
    pub fn modulus_f64(&self) -> f64 {
        self.z.re_f64().hypot(self.z.im_f64())
    }
}

fn f64_to_fixed(x: f64, prec: u32) -> BigInt {
    if x == 0.0 || !x.is_finite() {
        return BigInt::zero();
    }
    let (mant, exp) = frexp(x);
    // x = mant * 2^exp, with |mant| in [0.5, 1): take 53 mantissa bits.
    let m = (mant * (1u64 << 53) as f64) as i64;
    let shift = exp as i64 - 53 + prec as i64;
    let m = BigInt::from(m);
    if shift >= 0 {
        m << shift as usize
    } else {
        m >> (-shift) as usize
    }
}

fn frexp(x: f64) -> (f64, i32) {
    let bits = x.abs().log2().floor() as i32 + 1;
    let mant = x / 2f64.powi(bits);
    if mant.abs() >= 1.0 {
        (mant / 2.0, bits + 1)
    } else if mant.abs() < 0.5 {
        (mant * 2.0, bits - 1)
    } else {
        (mant, bits)
    }
}

pub(crate) fn fixed_to_f64(x: &BigInt, prec: u32) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap_or(f64::NAN) / 2f64.powi(prec as i32)
    } else {
        let drop = bits - 1000;
        (x >> drop as usize).to_f64().unwrap_or(f64::NAN) * 2f64.powi(drop as i32 - prec as i32)
    }
}

/// Integer polynomial used for exact residuals.
struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Returns `f(z)` and `f'(z)` multiplied by `2^(prec * d)`, exactly,
    /// where `d` is the degree of `f`.
    fn eval_scaled(&self, z: &FixedComplex) -> ((BigInt, BigInt), (BigInt, BigInt)) {
        let d = self.degree();
        let p = z.prec as usize;
        // Horner on f and f' simultaneously; after processing coefficient k the
        // accumulators carry scale 2^(p (d - k)).
        let mut fr = self.coeffs[d].clone();
        let mut fi = BigInt::zero();
        let mut dr = BigInt::zero();
        let mut di = BigInt::zero();
        for k in (0..d).rev() {
            // f' <- f' * z + f  (scale bookkeeping: f' lags f by one step)
            let ndr = (&dr * &z.re - &di * &z.im) + (&fr << p);
            let ndi = (&dr * &z.im + &di * &z.re) + (&fi << p);
            let nfr = &fr * &z.re - &fi * &z.im + (&self.coeffs[k] << (p * (d - k)));
            let nfi = &fr * &z.im + &fi * &z.re;
            fr = nfr;
            fi = nfi;
            dr = ndr;
            di = ndi;
        }
        ((fr, fi), (dr, di))
    }
}

fn complex_div_scaled(
    (ar, ai): (&BigInt, &BigInt),
    (br, bi): (&BigInt, &BigInt),
    prec: u32,
) -> Option<(BigInt, BigInt)> {
    let den = br * br + bi * bi;
    if den.is_zero() {
        return None;
    }
    let nr = (ar * br + ai * bi) << prec as usize;
    let ni = (ai * br - ar * bi) << prec as usize;
    Some((nr / &den, ni / den))
}

fn f64_aberth(coeffs: &[f64]) -> Vec<(f64, f64)> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    // Fujiwara's bound keeps the starting circle at the scale of the roots.
    let r0 = 2.0
        * (0..d)
            .map(|k| monic[k].abs().powf(1.0 / (d - k) as f64))
            .fold(0.0f64, f64::max)
        + 1e-3;
    let mut z: Vec<(f64, f64)> = (0..d)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
            (r0 * ang.cos(), r0 * ang.sin())
        })
        .collect();
    let eval = |x: (f64, f64)| {
        let mut f = (1.0, 0.0);
        let mut df = (0.0, 0.0);
        for k in (0..d).rev() {
            df = cadd(cmul(df, x), f);
            f = cadd(cmul(f, x), (monic[k], 0.0));
        }
        (f, df)
    };
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (f, df) = eval(z[i]);
            if f == (0.0, 0.0) {
                continue;
            }
            let ratio = cdiv(f, df);
            let mut s = (0.0, 0.0);
            for j in 0..d {
                if j != i {
                    s = cadd(s, cdiv((1.0, 0.0), csub(z[i], z[j])));
                }
            }
            let denom = csub((1.0, 0.0), cmul(ratio, s));
            let w = cdiv(ratio, denom);
            if w.0.is_finite() && w.1.is_finite() {
                z[i] = csub(z[i], w);
                moved = moved.max(w.0.hypot(w.1) / z[i].0.hypot(z[i].1).max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn cadd(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0, a.1 + b.1)
}
fn csub(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 - b.0, a.1 - b.1)
}
fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}
fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let den = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / den, (a.1 * b.0 - a.0 * b.1) / den)
}

/// All complex roots of a square-free polynomial of positive degree, polished
/// to `prec` fractional bits.
///
/// Exactly as many roots as the Sturm count are flagged real, and those are
/// kept on the real axis during refinement.
pub fn isolate_roots(f: &Poly, prec: u32) -> Result<Vec<RootApprox>> {
    let d = match f.degree() {
        Some(d) if d > 0 => d,
        _ => return Ok(Vec::new()),
    };
    let ints = IntPoly {
        coeffs: f.to_primitive_integer(),
    };
    let approx: Vec<(f64, f64)> = if d == 1 {
        let c = crate::poly::rational_to_f64(&(-f.coeff(0) / f.coeff(1)));
        vec![(c, 0.0)]
    } else {
        let cf: Vec<f64> = f
            .coeffs()
            .iter()
            .map(crate::poly::rational_to_f64)
            .collect();
        f64_aberth(&cf)
    };

    // Flag the real roots: the ones closest to the axis, as many as Sturm says.
    let n_real = f.count_real_roots();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| approx[a].1.abs().total_cmp(&approx[b].1.abs()));
    let mut real = vec![false; d];
    for &i in order.iter().take(n_real) {
        real[i] = true;
    }

    let mut z: Vec<FixedComplex> = approx
        .iter()
        .zip(&real)
        .map(|(&(re, im), &r)| FixedComplex::from_f64(re, if r { 0.0 } else { im }, prec))
        .collect();

    let p = prec as usize;
    let tiny = BigInt::from(1) << 8usize;
    for _round in 0..(prec as usize / 8 + 60) {
        let mut max_step = BigInt::zero();
        for i in 0..d {
            let ((fr, fi), (dr, di)) = ints.eval_scaled(&z[i]);
            if fr.is_zero() && fi.is_zero() {
                continue;
            }
            // Newton ratio f/f' at scale 2^prec; both residuals share the
            // factor 2^(prec d).
            let Some((nr, ni)) = complex_div_scaled((&fr, &fi), (&dr, &di), prec) else {
                continue;
            };
            // Aberth correction w = N / (1 - N * S), S = sum 1/(z_i - z_j).
            let mut sr = BigInt::zero();
            let mut si = BigInt::zero();
            for j in 0..d {
                if j == i {
                    continue;
                }
                let ar = &z[i].re - &z[j].re;
                let ai = &z[i].im - &z[j].im;
                let one = BigInt::from(1) << p;
                if let Some((qr, qi)) =
                    complex_div_scaled((&one, &BigInt::zero()), (&ar, &ai), prec)
                {
                    sr += qr;
                    si += qi;
                }
            }
            let one = BigInt::from(1) << p;
            let nsr = (&nr * &sr - &ni * &si) >> p;
            let nsi = (&nr * &si + &ni * &sr) >> p;
            let (dr2, di2) = (&one - nsr, -nsi);
            let (wr, mut wi) =
                complex_div_scaled((&nr, &ni), (&dr2, &di2), prec).unwrap_or((nr, ni));
            if real[i] {
                wi = BigInt::zero();
            }
            if !real[i] && z[i].im.is_zero() {
                wi += &tiny;
            }
            let step = wr.abs().max(wi.abs());
            if step > max_step {
                max_step = step.clone();
            }
            z[i].re -= &wr;
            z[i].im -= &wi;
        }
        if max_step <= tiny {
            break;
        }
    }

    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let ((fr, fi), (dr, di)) = ints.eval_scaled(&z[i]);
        let radius = if fr.is_zero() && fi.is_zero() {
            BigInt::zero()
        } else {
            match complex_div_scaled((&fr, &fi), (&dr, &di), prec) {
                Some((nr, ni)) => {
                    // |N| <= |re| + |im|; one extra unit covers truncation.
                    (nr.abs() + ni.abs()) * BigInt::from(d) + 2
                }
                None => {
                    return Err(Error::PrecisionExceeded {
                        bits: prec,
                        reason: "derivative vanished at a root approximation".into(),
                    })
                }
            }
        };
        out.push(RootApprox {
            z: z[i].clone(),
            radius,
            is_real: real[i],
        });
    }
    Ok(out)
}

/// Sign of `|a|^2 - |b|^2` when the inclusion disks certify it, `None` otherwise.
pub fn compare_moduli(a: &RootApprox, b: &RootApprox) -> Option<std::cmp::Ordering> {
    let ma = a.z.modulus_scaled();
    let mb = b.z.modulus_scaled();
    let gap = &ma - &mb;
    let slack = &a.radius + &b.radius + 2;
    if gap.abs() > slack {
        Some(if gap.sign() == Sign::Minus {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        })
    } else {
        None
    }
}
