//! Greedy numeration systems over an increasing basis `G_0 = 1 < G_1 < ...`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::{delta_digits, Alphabet, Digit, Word};

/// Terms are generated at least until they exceed this many bits.
const DEFAULT_BITS: u64 = 160;
const MIN_TERMS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisRule {
    Explicit,
    /// `G_n = c_1 G_{n-1} + ... + c_k G_{n-k}`.
    Recurrence(Vec<i64>),
    /// Built from the quasi-greedy expansion of a Parry number.
    FromBeta,
}

/// A greedy basis with exact terms and a `u64` mirror of its small prefix.
#[derive(Clone, Debug)]
pub struct Basis {
    terms: Vec<BigUint>,
    small: Vec<u64>,
    rule: BasisRule,
    alphabet: Alphabet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GnsPce {
    Pce,
    /// `word` is a prefix of the expansion `of` but is not itself an expansion.
    NotPrefixClosed {
        word: String,
        of: String,
    },
    NotExtendable {
        word: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GnsPceReport {
    pub verdict: GnsPce,
    pub depth: usize,
    /// `floor(G_{n+1} / G_n)` is non-increasing on the available terms.
    pub quotients_non_increasing: bool,
}

impl Basis {
    pub fn new(terms: Vec<BigUint>, rule: BasisRule) -> Result<Self> {
        if terms.first() != Some(&BigUint::one()) {
            return Err(Error::InvalidBasis("G_0 must be 1".into()));
        }
        if let Some(i) = terms.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidBasis(format!(
                "not strictly increasing at index {}",
                i + 1
            )));
        }
        // Largest digit: max ceil(G_{i+1} / G_i) - 1.
        let max_digit = terms
            .windows(2)
            .map(|w| w[1].div_ceil(&w[0]) - 1u32)
            .max()
            .unwrap_or_else(BigUint::zero);
        let size = max_digit
            .to_u32()
            .filter(|&d| d < Alphabet::MAX_SIZE)
            .ok_or_else(|| Error::InvalidBasis("quotients too large".into()))?
            + 1;
        let small = terms.iter().map_while(|t| t.to_u64()).collect();
        Ok(Basis {
            terms,
            small,
            rule,
            alphabet: Alphabet::new(size.max(2))?,
        })
    }

    pub fn explicit<I: IntoIterator<Item = u64>>(terms: I) -> Result<Self> {
        Basis::new(
            terms.into_iter().map(BigUint::from).collect(),
            BasisRule::Explicit,
        )
    }

    /// One integer per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let t = line.split('#').next().unwrap_or("").trim();
            if t.is_empty() {
                continue;
            }
            terms.push(t.parse::<BigUint>().map_err(|_| Error::Parse {
                line: ln + 1,
                msg: format!("bad basis term `{t}`"),
            })?);
        }
        Basis::new(terms, BasisRule::Explicit)
    }

    /// Terms of a linear recurrence from the given initial terms, generated
    /// until they exceed `2^bits` (and at least `MIN_TERMS` of them).
    pub fn recurrence(coeffs: &[i64], initial: &[u64], bits: Option<u64>) -> Result<Self> {
        if coeffs.is_empty() || initial.len() < coeffs.len() {
            return Err(Error::InvalidBasis(
                "need at least as many initial terms as coefficients".into(),
            ));
        }
        let bits = bits.unwrap_or(DEFAULT_BITS);
        let mut terms: Vec<BigInt> = initial.iter().map(|&x| BigInt::from(x)).collect();
        while terms.len() < MIN_TERMS || terms.last().unwrap().bits() <= bits {
            let n = terms.len();
            let next: BigInt = coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| BigInt::from(c) * &terms[n - 1 - i])
                .sum();
            if !next.is_positive() {
                return Err(Error::InvalidBasis(
                    "recurrence produced a non-positive term".into(),
                ));
            }
            terms.push(next);
            if terms.len() > 100_000 {
                return Err(Error::InvalidBasis("basis grows too slowly".into()));
            }
        }
        let terms = terms
            .into_iter()
            .map(|t| t.to_biguint().expect("positive"))
            .collect();
        Basis::new(terms, BasisRule::Recurrence(coeffs.to_vec()))
    }

    /// `1, 2, 3, 5, 8, ...`
    pub fn fibonacci() -> Self {
        Basis::recurrence(&[1, 1], &[1, 2], None).expect("valid")
    }

    /// `1, 3, 8, 21, ...` with `E_{n+2} = 3 E_{n+1} - E_n`.
    pub fn fina() -> Self {
        Basis::recurrence(&[3, -1], &[1, 3], None).expect("valid")
    }

    /// `1, 2, 4, 7, 13, 24, ...`
    pub fn tribonacci() -> Self {
        // G_n = G_{n-1} + G_{n-2} + G_{n-3} + 1, which as a homogeneous
        // recurrence is G_n = 2 G_{n-1} - G_{n-4}.
        Basis::recurrence(&[2, 0, 0, -1], &[1, 2, 4, 7], None).expect("valid")
    }

    pub fn integer_base(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidBasis("base must be at least 2".into()));
        }
        Basis::recurrence(&[p as i64], &[1], None)
    }

    pub fn terms(&self) -> &[BigUint] {
        &self.terms
    }

    pub fn small_terms(&self) -> &[u64] {
        &self.small
    }

    pub fn rule(&self) -> &BasisRule {
        &self.rule
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub(crate) fn widen_alphabet(&mut self, size: u32) -> Result<()> {
        if size > self.alphabet.size() {
            self.alphabet = Alphabet::new(size)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, l: usize) -> Result<&BigUint> {
        self.terms
            .get(l)
            .ok_or_else(|| Error::OutOfRange(format!("basis has only {} terms", self.terms.len())))
    }

    /// `limsup ceil(G_{l+1} / G_l)` estimated on the available terms.
    pub fn quotient_bound(&self) -> u64 {
        self.alphabet.size() as u64
    }

    fn check_range_u64(&self, n: u64) -> Result<()> {
        match self.small.last() {
            Some(&last) if n < last || self.small.len() < self.terms.len() => Ok(()),
            _ => Err(Error::OutOfRange(format!(
                "{n} exceeds the largest basis term"
            ))),
        }
    }

    /// Greedy digits of `n`, most significant first, for `n` below the
    /// largest available term.
    pub fn repr_digits_u64(&self, n: u64) -> Result<Vec<Digit>> {
        self.check_range_u64(n)?;
        let mut k = self.small.partition_point(|&g| g <= n);
        let mut rem = n;
        let mut out = Vec::with_capacity(k);
        while k > 0 {
            k -= 1;
            let g = self.small[k];
            out.push((rem / g) as Digit);
            rem %= g;
        }
        Ok(out)
    }

    pub fn repr_digits(&self, n: &BigUint) -> Result<Vec<Digit>> {
        if let Some(small) = n.to_u64() {
            if self.check_range_u64(small).is_ok() {
                return self.repr_digits_u64(small);
            }
        }
        if n >= self.terms.last().expect("nonempty") {
            return Err(Error::OutOfRange(format!(
                "{n} exceeds the largest basis term"
            )));
        }
        let mut k = self.terms.partition_point(|g| g <= n);
        let mut rem = n.clone();
        let mut out = Vec::with_capacity(k);
        while k > 0 {
            k -= 1;
            let (d, r) = rem.div_rem(&self.terms[k]);
            out.push(d.to_u32().expect("digit bounded by the quotients") as Digit);
            rem = r;
        }
        Ok(out)
    }

    pub fn repr(&self, n: &BigUint) -> Result<Word> {
        Ok(Word::from_trusted(self.alphabet, self.repr_digits(n)?))
    }

    /// Greedy admissibility: no leading zero and, for every `i`,
    /// `x_i G_i + ... + x_0 G_0 < G_{i+1}`.
    pub fn is_greedy(&self, digits: &[Digit]) -> bool {
        if digits.first() == Some(&0) || digits.len() >= self.terms.len() {
            return false;
        }
        let mut acc = BigUint::zero();
        for (i, &x) in digits.iter().rev().enumerate() {
            acc += &self.terms[i] * BigUint::from(x);
            if acc >= self.terms[i + 1] {
                return false;
            }
        }
        true
    }

    /// Value of a greedy expansion.
    pub fn val(&self, digits: &[Digit]) -> Result<BigUint> {
        if !self.is_greedy(digits) {
            return Err(Error::NotInLanguage(crate::words::format_digits(
                digits,
                self.alphabet.size(),
            )));
        }
        Ok(digits
            .iter()
            .rev()
            .enumerate()
            .map(|(i, &x)| &self.terms[i] * BigUint::from(x))
            .sum())
    }

    /// `g_ℓ = repr(G_ℓ - 1)`, the largest word of length `ℓ`.
    pub fn g_max(&self, l: usize) -> Result<Vec<Digit>> {
        let g = self.term(l)?;
        self.repr_digits(&(g - 1u32))
    }

    /// `1 + max{k : g_k is a suffix of repr(n)}`.
    ///
    /// The length-`k` suffix of `repr(n)` is a greedy word of value
    /// `x_{k-1} G_{k-1} + ... + x_0 G_0`, and it equals `g_k` exactly when
    /// that value is `G_k - 1`.
    pub fn cp_u64(&self, n: u64) -> Result<u32> {
        let d = self.repr_digits_u64(n)?;
        Ok(self.cp_of_digits_u64(&d))
    }

    fn cp_of_digits_u64(&self, d: &[Digit]) -> u32 {
        let mut acc: u64 = 0;
        let mut best = 0;
        for (k, &x) in d.iter().rev().enumerate() {
            acc += x as u64 * self.small[k];
            if self.small.get(k + 1) == Some(&(acc + 1)) {
                best = k + 1;
            }
        }
        best as u32 + 1
    }

    /// Definitional carry `Δ(repr(n), repr(n + 1))`.
    pub fn delta_cp_u64(&self, n: u64) -> Result<u32> {
        Ok(delta_digits(&self.repr_digits_u64(n)?, &self.repr_digits_u64(n + 1)?) as u32)
    }

    /// Tests prefix closure and extendability of the greedy language on all
    /// words of length at most `depth`.
    pub fn check_pce(&self, depth: usize) -> Result<GnsPceReport> {
        if depth < 2 {
            return Err(Error::OutOfRange("depth must be at least 2".into()));
        }
        let limit = self
            .small
            .get(depth)
            .copied()
            .ok_or_else(|| Error::OutOfRange(format!("basis too short for depth {depth}")))?;
        let fmt = |d: &[Digit]| crate::words::format_digits(d, self.alphabet.size());
        let mut verdict = GnsPce::Pce;
        'scan: for n in 0..limit {
            let d = self.repr_digits_u64(n)?;
            for cut in (1..d.len()).rev() {
                if !self.is_greedy(&d[..cut]) {
                    verdict = GnsPce::NotPrefixClosed {
                        word: fmt(&d[..cut]),
                        of: fmt(&d),
                    };
                    break 'scan;
                }
            }
            if d.len() < depth {
                let mut e = d.clone();
                e.push(0);
                let extendable = (0..self.alphabet.size() as Digit).any(|a| {
                    *e.last_mut().unwrap() = a;
                    self.is_greedy(&e)
                });
                if !extendable {
                    verdict = GnsPce::NotExtendable { word: fmt(&d) };
                    break 'scan;
                }
            }
        }
        let q: Vec<BigUint> = self.terms.windows(2).map(|w| &w[1] / &w[0]).collect();
        Ok(GnsPceReport {
            verdict,
            depth,
            quotients_non_increasing: q.windows(2).all(|w| w[1] <= w[0]),
        })
    }

    /// Counter producing `repr(0), repr(1), ...` by the carry rule: with
    /// `cp(n) = k + 1`, digit `k` is incremented and every lower digit reset.
    pub fn counter(&self) -> GreedyCounter<'_> {
        GreedyCounter {
            basis: self,
            digits: Vec::new(),
        }
    }
}

/// Incremental greedy counter, least significant digit at index 0.
pub struct GreedyCounter<'a> {
    basis: &'a Basis,
    digits: Vec<Digit>,
}

impl GreedyCounter<'_> {
    /// Digits of the current value, most significant first.
    pub fn current(&self) -> Vec<Digit> {
        self.digits.iter().rev().copied().collect()
    }

    /// Number of digits of the current value.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Moves to the next integer and returns the carry.
    pub fn step(&mut self) -> u32 {
        let msdf: Vec<Digit> = self.current();
        let cp = self.basis.cp_of_digits_u64(&msdf);
        let k = cp as usize - 1;
        for d in &mut self.digits[..k] {
            *d = 0;
        }
        if k == self.digits.len() {
            self.digits.push(1);
        } else {
            self.digits[k] += 1;
        }
        cp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(b: &Basis, d: &[Digit]) -> String {
        crate::words::format_digits(d, b.alphabet().size())
    }

    #[test]
    fn fibonacci_examples() {
        let f = Basis::fibonacci();
        assert_eq!(f.small_terms()[..6], [1, 2, 3, 5, 8, 13]);
        assert_eq!(s(&f, &f.repr_digits_u64(9).unwrap()), "10001");
        assert_eq!(s(&f, &f.g_max(5).unwrap()), "10101");
        assert_eq!(f.g_max(0).unwrap(), Vec::<Digit>::new());
        assert_eq!(f.cp_u64(9).unwrap(), 2);
        assert_eq!(f.cp_u64(12).unwrap(), 6);
        assert_eq!(f.repr_digits_u64(0).unwrap(), Vec::<Digit>::new());
        assert_eq!(f.val(&[1, 0, 0, 1, 0]).unwrap(), BigUint::from(10u32));
        assert!(f.val(&[1, 1]).is_err());
    }

    #[test]
    fn other_bases() {
        let e = Basis::fina();
        assert_eq!(e.small_terms()[..5], [1, 3, 8, 21, 55]);
        assert_eq!(s(&e, &e.repr_digits_u64(2).unwrap()), "2");
        let t = Basis::tribonacci();
        assert_eq!(t.small_terms()[..6], [1, 2, 4, 7, 13, 24]);
        assert_eq!(s(&t, &t.g_max(3).unwrap()), "110");
        assert_eq!(
            Basis::integer_base(10).unwrap().small_terms()[..3],
            [1, 10, 100]
        );
    }

    #[test]
    fn cp_rule_matches_delta() {
        for b in [Basis::fibonacci(), Basis::fina(), Basis::tribonacci()] {
            for n in 0..3000 {
                assert_eq!(b.cp_u64(n).unwrap(), b.delta_cp_u64(n).unwrap(), "n = {n}");
            }
        }
    }

    #[test]
    fn counter_follows_repr() {
        let b = Basis::tribonacci();
        let mut c = b.counter();
        for n in 0..2000u64 {
            assert_eq!(c.current(), b.repr_digits_u64(n).unwrap());
            c.step();
        }
    }

    #[test]
    fn pce_checks() {
        let odd = Basis::explicit([1, 2, 3, 5, 9, 14, 23]).unwrap();
        let r = odd.check_pce(5).unwrap();
        assert_eq!(
            r.verdict,
            GnsPce::NotPrefixClosed {
                word: "110".into(),
                of: "1100".into()
            }
        );
        assert_eq!(
            Basis::fibonacci().check_pce(10).unwrap().verdict,
            GnsPce::Pce
        );
        let ten = Basis::integer_base(10).unwrap();
        let r = ten.check_pce(4).unwrap();
        assert_eq!(r.verdict, GnsPce::Pce);
        assert!(r.quotients_non_increasing);
    }

    #[test]
    fn invalid_bases() {
        assert!(Basis::explicit([2, 3]).is_err());
        assert!(Basis::explicit([1, 3, 3]).is_err());
        assert!(Basis::parse("1\n2\nx\n").is_err());
        assert_eq!(Basis::parse("1\n# c\n2\n4\n").unwrap().len(), 3);
    }
}
