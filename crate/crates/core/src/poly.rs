//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial over the rationals, coefficients in ascending degree order.
/// The representation never carries trailing zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::new(vec![c])
    }

    /// `X - r`.
    pub fn linear_root(r: BigRational) -> Self {
        Poly::new(vec![-r, BigRational::one()])
    }

    pub fn from_ints<I: IntoIterator<Item = i64>>(ascending: I) -> Self {
        Poly::new(
            ascending
                .into_iter()
                .map(|c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn from_bigints(ascending: &[BigInt]) -> Self {
        Poly::new(
            ascending
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// Coefficients given highest degree first, as in `c_d ... c_1 c_0`.
    pub fn from_descending_ints(descending: &[i64]) -> Self {
        Poly::from_ints(descending.iter().rev().copied())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.lead();
        Poly::new(self.coeffs.iter().map(|c| c / &lead).collect())
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division. Panics on division by the zero polynomial.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.lead();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * d;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational_to_f64(c);
        }
        acc
    }

    pub fn is_square_free(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).is_constant(),
        }
    }

    /// Yun's square-free decomposition: monic factors `f_i` with
    /// `monic(self) = Π f_i^{m_i}`, pairwise coprime and square-free.
    pub fn square_free_decomposition(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while !b.is_constant() {
            a = b.gcd(&d);
            if !a.is_constant() {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Sturm sequence of a square-free polynomial.
    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-BigRational::one()));
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_real_roots_in(&self, lo: &BigRational, hi: &BigRational) -> usize {
        let seq = self.sturm_sequence();
        let vl = sign_changes(seq.iter().map(|p| p.eval(lo).signum()));
        let vh = sign_changes(seq.iter().map(|p| p.eval(hi).signum()));
        vl.saturating_sub(vh)
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        let seq = self.sturm_sequence();
        let at = |pos: bool| {
            sign_changes(seq.iter().map(|p| {
                let lead = p.lead().signum();
                match p.degree() {
                    Some(d) if !pos && d % 2 == 1 => -lead,
                    _ => lead,
                }
            }))
        };
        at(false).saturating_sub(at(true))
    }

    /// Cauchy bound: every complex root has modulus below this value.
    pub fn root_bound(&self) -> BigRational {
        let lead = self.lead().abs();
        let max = self
            .coeffs
            .iter()
            .take(self.coeffs.len().saturating_sub(1))
            .map(|c| c.abs() / &lead)
            .fold(BigRational::zero(), |m, c| if c > m { c } else { m });
        max + BigRational::one()
    }

    /// Primitive integer polynomial proportional to `self` with a positive
    /// leading coefficient.
    pub fn to_primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let den_lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den_lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().unwrap().sign() == Sign::Minus {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    /// Exact rational roots (rational root theorem on the primitive form).
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let ints = self.to_primitive_integer();
        if ints.len() < 2 {
            return Vec::new();
        }
        let mut roots = Vec::new();
        let mut ints = ints;
        while ints.len() > 1 && ints[0].is_zero() {
            ints.remove(0);
            if !roots.iter().any(|r: &BigRational| r.is_zero()) {
                roots.push(BigRational::zero());
            }
        }
        if ints.len() < 2 {
            return roots;
        }
        let reduced = Poly::from_bigints(&ints);
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let (Some(ps), Some(qs)) = (small_divisors(&a0), small_divisors(&an)) else {
            return roots;
        };
        for p in &ps {
            for q in &qs {
                for s in [1i64, -1] {
                    let r = BigRational::new(p * BigInt::from(s), q.clone());
                    if !roots.contains(&r) && reduced.eval(&r).is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

/// Divisors of a small positive integer, `None` when trial division would be
/// too expensive.
fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n: u64 = n.try_into().ok()?;
    if n == 0 || n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

fn sign_changes<I: Iterator<Item = BigRational>>(signs: I) -> usize {
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for s in signs {
        if s.is_zero() {
            continue;
        }
        let pos = s.is_positive();
        if let Some(prev) = last {
            if prev != pos {
                changes += 1;
            }
        }
        last = Some(pos);
    }
    changes
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Both parts overflow f64; scale them down together.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("X")?,
                _ => write!(f, "X^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        let p = Poly::from_ints([-4, 0, 1]); // X^2 - 4
        let q = Poly::from_ints([-2, 1]); // X - 2
        let (d, r) = p.div_rem(&q);
        assert_eq!(d, Poly::from_ints([2, 1]));
        assert!(r.is_zero());
        let g = p.gcd(&Poly::from_ints([-6, 1, 1])); // (X-2)(X+3)
        assert_eq!(g, q);
    }

    #[test]
    fn yun_recovers_multiplicities() {
        // (X-2)^2 (X+2)
        let p = Poly::from_ints([-2, 1])
            .pow(2)
            .mul(&Poly::from_ints([2, 1]));
        let sf = p.square_free_decomposition();
        assert_eq!(
            sf,
            vec![(Poly::from_ints([2, 1]), 1), (Poly::from_ints([-2, 1]), 2)]
        );
        assert!(!p.is_square_free());
        assert!(Poly::from_ints([-4, 0, 1]).is_square_free());
    }

    #[test]
    fn sturm_counts_real_roots() {
        let tri = Poly::from_descending_ints(&[1, -1, -1, -1]);
        assert_eq!(tri.count_real_roots(), 1);
        assert_eq!(tri.count_real_roots_in(&int(1), &int(2)), 1);
        let p = Poly::from_ints([-4, 0, 1]);
        assert_eq!(p.count_real_roots(), 2);
        assert_eq!(p.count_real_roots_in(&int(-3), &int(0)), 1);
        assert_eq!(Poly::from_ints([1, 0, 1]).count_real_roots(), 0);
    }

    #[test]
    fn rational_roots_and_display() {
        let p = Poly::from_ints([-2, 1]).mul(&Poly::from_ints([1, 2]));
        assert_eq!(p.rational_roots(), vec![rat(-1, 2), int(2)]);
        assert_eq!(Poly::from_ints([-4, 0, 1]).to_string(), "X^2 - 4");
        assert_eq!(
            Poly::from_ints([1, 0, 1])
                .mul(&Poly::from_ints([0, 1]))
                .rational_roots(),
            vec![int(0)]
        );
    }
}
