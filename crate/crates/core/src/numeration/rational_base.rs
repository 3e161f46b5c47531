//! Rational base numeration: `N` is written `a_k ... a_0` with
//! `N = Σ (a_i / q) (p / q)^i` and digits in `0..p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::signature::{CpStep, Signature};
use crate::words::{delta_digits, Alphabet, Digit, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalBase {
    p: u64,
    q: u64,
}

impl RationalBase {
    /// `q = 1` gives the integer base `p`.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidRationalBase {
            p,
            q,
            reason: reason.into(),
        };
        if q == 0 || p <= q {
            return Err(bad("need p > q >= 1"));
        }
        if p.gcd(&q) != 1 {
            return Err(bad("p and q must be coprime"));
        }
        if p > Alphabet::MAX_SIZE as u64 {
            return Err(bad("digit alphabet too large"));
        }
        Ok(RationalBase { p, q })
    }

    /// Parses `p/q` or a plain integer `p`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let err = || Error::Parse {
            line: 0,
            msg: format!("expected `p` or `p/q`, got `{t}`"),
        };
        let (p, q) = match t.split_once('/') {
            Some((a, b)) => (
                a.trim().parse().map_err(|_| err())?,
                b.trim().parse().map_err(|_| err())?,
            ),
            None => (t.parse().map_err(|_| err())?, 1),
        };
        RationalBase::new(p, q)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.p as u32).expect("checked in new")
    }

    /// Digits of `n`, most significant first.
    pub fn repr_digits(&self, mut n: u64) -> Vec<Digit> {
        let (p, q) = (self.p as u128, self.q as u128);
        let mut out = Vec::new();
        while n > 0 {
            let qn = q * n as u128;
            let a = qn % p;
            out.push(a as Digit);
            n = ((qn - a) / p) as u64;
        }
        out.reverse();
        out
    }

    pub fn repr(&self, n: u64) -> Word {
        Word::from_trusted(self.alphabet(), self.repr_digits(n))
    }

    /// `Σ (a_i / q)(p / q)^i`; an integer exactly when the word is a valid
    /// expansion.
    pub fn val(&self, w: &Word) -> Result<BigRational> {
        if w.alphabet() != self.alphabet() {
            return Err(Error::AlphabetMismatch {
                left: w.alphabet().size(),
                right: self.p as u32,
            });
        }
        let base = BigRational::new(BigInt::from(self.p), BigInt::from(self.q));
        let q = BigInt::from(self.q);
        let mut acc = BigRational::zero();
        for &a in w.digits() {
            acc = acc * &base + BigRational::new(BigInt::from(a), q.clone());
        }
        Ok(acc)
    }

    /// Integer value of a valid expansion.
    pub fn value_of(&self, w: &Word) -> Result<u64> {
        let v = self.val(w)?;
        let invalid = || Error::NotInLanguage(w.to_string());
        if !v.is_integer() {
            return Err(invalid());
        }
        let n: u64 = v.to_integer().try_into().map_err(|_| invalid())?;
        if self.repr_digits(n) != w.digits() {
            return Err(invalid());
        }
        Ok(n)
    }

    pub fn succ(&self, w: &Word) -> Result<Word> {
        let n = self.value_of(w)?;
        Ok(self.repr(n + 1))
    }

    /// `Δ(repr(n), repr(n + 1))`.
    ///
    /// Run the division loop on `n` and `n + 1` side by side: the digits
    /// agree from the first step where the two quotients coincide, and the
    /// digit just below that step always differs. So the carry is the
    /// number of steps until the quotients meet.
    pub fn cp(&self, n: u64) -> u32 {
        let (p, q) = (self.p as u128, self.q as u128);
        let (mut a, mut b) = (n as u128, n as u128 + 1);
        let mut k = 0;
        while a != b {
            a = (q * a - (q * a) % p) / p;
            b = (q * b - (q * b) % p) / p;
            k += 1;
        }
        k
    }

    /// `cp(start), cp(start + 1), ...` for `count` indices.
    pub fn cp_stream(&self, start: u64, count: u64) -> impl Iterator<Item = CpStep> + '_ {
        (start..start + count).map(move |i| CpStep {
            index: i,
            cp: self.cp(i),
            level: self.repr_digits(i).len() as u32,
        })
    }

    /// Purely periodic signature of the tree of expansions: node `N` has
    /// children `M` with `pN <= qM <= pN + p - 1`.
    pub fn signature(&self) -> Signature {
        let (p, q) = (self.p, self.q);
        let period = (0..q)
            .map(|n| {
                let lo = (p * n).div_ceil(q);
                let hi = (p * n + p - 1) / q;
                hi + 1 - lo
            })
            .collect();
        Signature::new(Vec::new(), period).expect("nonempty period")
    }

    /// `p / (p - q)`.
    pub fn theoretical_cp(&self) -> BigRational {
        BigRational::new(BigInt::from(self.p), BigInt::from(self.p - self.q))
    }
}

/// Definitional carry between two consecutive words.
pub fn delta_cp(rb: &RationalBase, n: u64) -> u32 {
    delta_digits(&rb.repr_digits(n), &rb.repr_digits(n + 1)) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::CpStream;

    #[test]
    fn three_halves_expansions() {
        let rb = RationalBase::new(3, 2).unwrap();
        let reprs: Vec<String> = (0..5).map(|n| rb.repr(n).to_string()).collect();
        assert_eq!(reprs, ["e", "2", "21", "210", "212"]);
        for n in 0..2000 {
            assert_eq!(rb.value_of(&rb.repr(n)).unwrap(), n);
        }
        let bad = Word::parse(rb.alphabet(), "1").unwrap();
        assert!(rb.value_of(&bad).is_err());
        assert_eq!(rb.succ(&rb.repr(3)).unwrap().to_string(), "212");
    }

    #[test]
    fn rejects_bad_bases() {
        assert!(RationalBase::new(4, 2).is_err());
        assert!(RationalBase::new(2, 3).is_err());
        assert!(RationalBase::new(3, 0).is_err());
        let two = RationalBase::parse("2").unwrap();
        assert_eq!(two.q(), 1);
        assert_eq!(two.repr(5).to_string(), "101");
    }

    #[test]
    fn cp_matches_delta_and_signature_stream() {
        for (p, q) in [(3, 2), (5, 2), (7, 3), (2, 1)] {
            let rb = RationalBase::new(p, q).unwrap();
            let sig = rb.signature();
            let stream: Vec<u32> = CpStream::new(&sig, 5000).map(|s| s.cp).collect();
            for n in 0..5000u64 {
                assert_eq!(rb.cp(n), delta_cp(&rb, n), "{p}/{q} at {n}");
                assert_eq!(stream[n as usize], rb.cp(n), "{p}/{q} at {n}");
            }
        }
        assert_eq!(
            RationalBase::new(3, 2)
                .unwrap()
                .signature()
                .period()
                .entries(),
            [2, 1]
        );
    }

    #[test]
    fn theory() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(RationalBase::new(5, 2).unwrap().theoretical_cp(), r(5, 3));
        assert_eq!(RationalBase::new(3, 2).unwrap().theoretical_cp(), r(3, 1));
    }
}
