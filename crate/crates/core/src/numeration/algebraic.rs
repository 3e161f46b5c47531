//! Exact real algebraic numbers given by a polynomial and an isolating
//! interval, with arithmetic in the field they generate.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{rational_to_f64, Poly};

/// Bisection steps allowed before a sign question is given up.
pub const MAX_BISECTIONS: u32 = 4096;

/// The unique root of `poly` in the half-open interval `(lo, hi]`.
#[derive(Clone, Debug)]
pub struct AlgebraicReal {
    poly: Poly,
    lo: BigRational,
    hi: BigRational,
}

impl AlgebraicReal {
    pub fn new(poly: Poly, lo: BigRational, hi: BigRational) -> Result<Self> {
        if poly.degree().unwrap_or(0) == 0 {
            return Err(Error::InvalidAlgebraic(
                "polynomial must be non-constant".into(),
            ));
        }
        if lo >= hi {
            return Err(Error::InvalidAlgebraic("empty interval".into()));
        }
        let poly = square_free_part(&poly);
        match poly.count_real_roots_in(&lo, &hi) {
            1 => Ok(AlgebraicReal { poly, lo, hi }),
            n => Err(Error::InvalidAlgebraic(format!(
                "interval contains {n} roots, expected exactly one"
            ))),
        }
    }

    /// Largest real root of `poly`, which must exceed 1.
    pub fn largest_root(poly: &Poly) -> Result<Self> {
        let sf = square_free_part(poly);
        let hi = sf.root_bound();
        let one = BigRational::one();
        if sf.count_real_roots_in(&one, &hi) == 0 {
            return Err(Error::InvalidAlgebraic(format!(
                "{poly} has no real root above 1"
            )));
        }
        // Shrink from below until a single root remains above `lo`.
        let mut lo = one;
        let mut top = hi.clone();
        while sf.count_real_roots_in(&lo, &hi) > 1 {
            let mid = (&lo + &top) / BigRational::from_integer(2.into());
            if sf.count_real_roots_in(&mid, &hi) >= 1 {
                lo = mid;
            } else {
                top = mid;
            }
        }
        AlgebraicReal::new(sf, lo, hi)
    }

    pub fn integer(n: i64) -> Result<Self> {
        let r = BigRational::from_integer(n.into());
        AlgebraicReal::new(
            Poly::linear_root(r.clone()),
            r.clone() - BigRational::one(),
            r,
        )
    }

    /// Reads `poly: c_d ... c_0` and an optional `interval: lo hi` line;
    /// without an interval the largest real root is taken.
    pub fn parse(text: &str) -> Result<Self> {
        let mut poly = None;
        let mut interval = None;
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: ln + 1, msg };
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| err(format!("expected `key: value`, got `{line}`")))?;
            let vals: Vec<BigRational> = rest
                .split_whitespace()
                .map(|t| parse_rational(t).ok_or_else(|| err(format!("bad number `{t}`"))))
                .collect::<Result<_>>()?;
            match key.trim() {
                "poly" => poly = Some(Poly::new(vals.into_iter().rev().collect())),
                "interval" if vals.len() == 2 => {
                    interval = Some((vals[0].clone(), vals[1].clone()))
                }
                "interval" => return Err(err("interval needs two endpoints".into())),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        let poly = poly.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing `poly:` line".into(),
        })?;
        match interval {
            Some((lo, hi)) => AlgebraicReal::new(poly, lo, hi),
            None => AlgebraicReal::largest_root(&poly),
        }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn interval(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().expect("non-constant")
    }

    fn bisect(&mut self) {
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(2.into());
        if self.poly.count_real_roots_in(&self.lo, &mid) == 1 {
            self.hi = mid;
        } else {
            self.lo = mid;
        }
    }

    /// Refines the interval until its width is below `2^-bits`.
    pub fn refine(&mut self, bits: u32) {
        let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
        while &self.hi - &self.lo > eps {
            self.bisect();
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mut r = self.clone();
        r.refine(60);
        rational_to_f64(&r.hi)
    }

    /// Sign of `s(β)`, decided exactly.
    ///
    /// `s(β) = 0` iff `gcd(poly, s)` vanishes at β, that is, has a root in
    /// the isolating interval. Otherwise the interval is narrowed until it
    /// holds no root of `s`, after which the sign at `hi` is the answer.
    pub fn sign_of(&mut self, s: &Poly) -> Result<Ordering> {
        if s.is_zero() {
            return Ok(Ordering::Equal);
        }
        let g = self.poly.gcd(s);
        if !g.is_constant() && g.count_real_roots_in(&self.lo, &self.hi) > 0 {
            return Ok(Ordering::Equal);
        }
        let mut steps = 0;
        while !s.is_constant() && s.count_real_roots_in(&self.lo, &self.hi) > 0 {
            if steps == MAX_BISECTIONS {
                return Err(Error::PrecisionExceeded {
                    bits: MAX_BISECTIONS,
                    reason: format!("cannot separate β from a root of {s}"),
                });
            }
            self.bisect();
            steps += 1;
        }
        Ok(s.eval(&self.hi).cmp(&BigRational::zero()))
    }

    /// `⌊s(β)⌋`, decided exactly.
    pub fn floor_of(&mut self, s: &Poly) -> Result<BigInt> {
        let guess = s.eval_f64(self.to_f64());
        let mut k = if guess.is_finite() {
            BigInt::from(guess.floor() as i64)
        } else {
            BigInt::zero()
        };
        let shifted = |k: &BigInt| s.sub(&Poly::constant(BigRational::from_integer(k.clone())));
        while self.sign_of(&shifted(&k))? == Ordering::Less {
            k -= 1;
        }
        loop {
            let next = &k + 1;
            if self.sign_of(&shifted(&next))? == Ordering::Less {
                return Ok(k);
            }
            k = next;
        }
    }

    /// Replaces the defining polynomial by a factor that still vanishes at β.
    pub(crate) fn shrink_to(&mut self, factor: &Poly) {
        debug_assert_eq!(factor.count_real_roots_in(&self.lo, &self.hi), 1);
        self.poly = factor.monic();
    }
}

impl fmt::Display for AlgebraicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "root of {} in ({}, {}]", self.poly, self.lo, self.hi)
    }
}

fn square_free_part(p: &Poly) -> Poly {
    let g = p.gcd(&p.derivative());
    p.div_rem(&g).0.monic()
}

fn parse_rational(t: &str) -> Option<BigRational> {
    let (n, d) = t.split_once('/').unwrap_or((t, "1"));
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n.parse().ok()?, d))
}

/// An element of `Q(β)`: a polynomial in β kept reduced modulo the
/// defining polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NumberFieldElement {
    coeffs: Vec<BigRational>,
}

impl NumberFieldElement {
    pub fn from_poly(p: &Poly, beta: &AlgebraicReal) -> Self {
        NumberFieldElement {
            coeffs: p.rem(beta.poly()).coeffs().to_vec(),
        }
    }

    pub fn integer(n: &BigInt) -> Self {
        let p = Poly::constant(BigRational::from_integer(n.clone()));
        NumberFieldElement {
            coeffs: p.coeffs().to_vec(),
        }
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    /// The representative is the zero polynomial. With a reducible defining
    /// polynomial a nonzero representative may still vanish at β.
    pub fn is_trivially_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        NumberFieldElement {
            coeffs: self.to_poly().add(&other.to_poly()).coeffs().to_vec(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        NumberFieldElement {
            coeffs: self.to_poly().sub(&other.to_poly()).coeffs().to_vec(),
        }
    }

    pub fn mul(&self, other: &Self, beta: &AlgebraicReal) -> Self {
        NumberFieldElement::from_poly(&self.to_poly().mul(&other.to_poly()), beta)
    }

    pub fn mul_beta(&self, beta: &AlgebraicReal) -> Self {
        let x = Poly::from_ints([0, 1]);
        NumberFieldElement::from_poly(&self.to_poly().mul(&x), beta)
    }

    pub fn sign(&self, beta: &mut AlgebraicReal) -> Result<Ordering> {
        beta.sign_of(&self.to_poly())
    }

    pub fn floor(&self, beta: &mut AlgebraicReal) -> Result<BigInt> {
        beta.floor_of(&self.to_poly())
    }

    pub fn to_f64(&self, beta: &AlgebraicReal) -> f64 {
        self.to_poly().eval_f64(beta.to_f64())
    }
}
