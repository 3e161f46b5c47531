//! Shortest linear recurrences of integer sequences, found exactly with the
//! Berlekamp–Massey algorithm over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// A linear recurrence `s(n) = c_1 s(n-1) + ... + c_t s(n-t)` valid for all
/// `n >= offset + t`.
///
/// `offset` accounts for sequences whose first terms do not follow the
/// recurrence (the polynomial part of the generating function); the minimal
/// polynomial is then `X^offset * poly` in the usual sense, and `poly` is the
/// part carrying the nonzero eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearRecurrence {
    /// Monic minimal polynomial `X^t - c_1 X^{t-1} - ... - c_t` with `c_t != 0`.
    #[serde(serialize_with = "serialize_poly")]
    pub poly: Poly,
    /// Number of leading terms not governed by `poly`.
    pub offset: usize,
    /// Linear complexity of the sequence, equal to `deg(poly) + offset`.
    pub order: usize,
    #[serde(serialize_with = "serialize_terms")]
    pub initial_terms: Vec<BigInt>,
}

fn serialize_poly<S: serde::Serializer>(p: &Poly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

fn serialize_terms<S: serde::Serializer>(
    t: &[BigInt],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(t.len()))?;
    for x in t {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

impl LinearRecurrence {
    /// Coefficients `c_1..c_t` of the recurrence.
    pub fn coefficients(&self) -> Vec<BigRational> {
        let t = self.poly.degree().unwrap_or(0);
        (1..=t).map(|i| -self.poly.coeff(t - i)).collect()
    }

    /// True when the recurrence reproduces every term of `seq`.
    pub fn annihilates(&self, seq: &[BigInt]) -> bool {
        let c = self.coefficients();
        let t = c.len();
        (self.offset + t..seq.len()).all(|n| {
            let mut acc = BigRational::zero();
            for (i, ci) in c.iter().enumerate() {
                acc += ci * BigRational::from_integer(seq[n - 1 - i].clone());
            }
            acc == BigRational::from_integer(seq[n].clone())
        })
    }

    /// Extends the sequence by `extra` terms.
    pub fn extend(&self, seq: &[BigInt], extra: usize) -> Vec<BigInt> {
        let c = self.coefficients();
        let mut out = seq.to_vec();
        for _ in 0..extra {
            let n = out.len();
            let mut acc = BigRational::zero();
            for (i, ci) in c.iter().enumerate() {
                acc += ci * BigRational::from_integer(out[n - 1 - i].clone());
            }
            out.push(acc.to_integer());
        }
        out
    }
}

/// Runs Berlekamp–Massey on the whole slice and returns the connection
/// polynomial `C(x) = 1 + c'_1 x + ... ` together with the linear complexity.
fn berlekamp_massey(seq: &[BigRational]) -> (Vec<BigRational>, usize) {
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = BigRational::one();
    for n in 0..seq.len() {
        let mut d = seq[n].clone();
        for i in 1..=l.min(c.len() - 1) {
            d += &c[i] * &seq[n - i];
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = &d / &bd;
        let prev = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, BigRational::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + m] -= &coef * bi;
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = prev;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    c.resize(l + 1, BigRational::zero());
    (c, l)
}

/// Exact minimal recurrence of an integer sequence whose linear complexity is
/// at most `degree_bound`.
///
/// At least `2 * degree_bound + 1` terms are required; with fewer terms the
/// result would not be certified by the bound.
pub fn minimal_recurrence(seq: &[BigInt], degree_bound: usize) -> Result<LinearRecurrence> {
    let needed = 2 * degree_bound + 1;
    if seq.len() < needed {
        return Err(Error::PrefixTooShort {
            needed,
            got: seq.len(),
        });
    }
    let rats: Vec<BigRational> = seq
        .iter()
        .map(|x| BigRational::from_integer(x.clone()))
        .collect();
    let (c, l) = berlekamp_massey(&rats);
    if l > degree_bound {
        return Err(Error::OutOfRange(format!(
            "sequence has linear complexity {l}, above the bound {degree_bound}"
        )));
    }
    // C(x) = 1 + c_1 x + ... + c_t x^t with t <= l; the reciprocal
    // x^l C(1/x) = x^{l-t} (x^t + c_1 x^{t-1} + ... + c_t).
    let t = c.iter().rposition(|x| !x.is_zero()).unwrap_or(0);
    let poly = Poly::new((0..=t).map(|i| c[t - i].clone()).collect());
    let rec = LinearRecurrence {
        poly,
        offset: l - t,
        order: l,
        initial_terms: seq[..l.min(seq.len())].to_vec(),
    };
    debug_assert!(rec.annihilates(seq));
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn fibonacci_like() {
        let seq = big(&[1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
        let rec = minimal_recurrence(&seq, 3).unwrap();
        assert_eq!(rec.poly, Poly::from_ints([-1, -1, 1]));
        assert_eq!(rec.offset, 0);
        assert!(rec.annihilates(&seq));
    }

    #[test]
    fn oscillating_and_shifted() {
        let seq = big(&[1, 1, 4, 4, 16, 16, 64, 64, 256, 256]);
        let rec = minimal_recurrence(&seq, 2).unwrap();
        assert_eq!(rec.poly, Poly::from_ints([-4, 0, 1]));

        // 1 followed by 3 * 2^k: the first term escapes the recurrence.
        let seq = big(&[1, 3, 6, 12, 24, 48, 96, 192, 384]);
        let rec = minimal_recurrence(&seq, 3).unwrap();
        assert_eq!(rec.poly, Poly::from_ints([-2, 1]));
        assert_eq!(rec.offset, 1);
        assert!(rec.annihilates(&seq));
    }

    #[test]
    fn repeated_root() {
        // n 2^n has minimal polynomial (X - 2)^2.
        let seq: Vec<BigInt> = (0..12).map(|n| BigInt::from(n * (1i64 << n))).collect();
        let rec = minimal_recurrence(&seq, 3).unwrap();
        assert_eq!(rec.poly, Poly::from_ints([4, -4, 1]));
        assert_eq!(rec.extend(&seq[..4], 2)[5], BigInt::from(5 * 32));
    }

    #[test]
    fn too_short_prefix() {
        let err = minimal_recurrence(&big(&[1, 2, 3]), 2).unwrap_err();
        assert_eq!(err, Error::PrefixTooShort { needed: 5, got: 3 });
    }
}
