use std::cell::RefCell;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{Dfa, PceCheck};
use crate::error::{Error, Result};
use crate::signature::CpStep;
use crate::words::{format_digits, Digit, Word};

/// Default bound on word lengths handled by successor and ranking.
pub const DEFAULT_LENGTH_BUDGET: usize = 4096;

/// Exact per-state counts: `u[ℓ][q]` words of length `ℓ` accepted from `q`
/// and the cumulative `v[ℓ][q]` for lengths up to `ℓ`.
#[derive(Clone, Debug, Default)]
pub struct CountTable {
    u: Vec<Vec<BigUint>>,
    v: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn compute(dfa: &Dfa, lmax: usize) -> Self {
        let mut t = CountTable::default();
        t.extend(dfa, lmax);
        t
    }

    fn extend(&mut self, dfa: &Dfa, lmax: usize) {
        let n = dfa.num_states();
        while self.u.len() <= lmax {
            let row: Vec<BigUint> = match self.u.last() {
                None => (0..n)
                    .map(|q| {
                        if dfa.is_final(q) {
                            BigUint::one()
                        } else {
                            BigUint::zero()
                        }
                    })
                    .collect(),
                Some(prev) => (0..n)
                    .map(|q| dfa.edges(q).map(|(_, t)| &prev[t]).sum())
                    .collect(),
            };
            let cum: Vec<BigUint> = match self.v.last() {
                None => row.clone(),
                Some(prev) => prev.iter().zip(&row).map(|(a, b)| a + b).collect(),
            };
            self.u.push(row);
            self.v.push(cum);
        }
    }

    pub fn max_len(&self) -> usize {
        self.u.len().saturating_sub(1)
    }

    pub fn u(&self, q: usize, l: usize) -> &BigUint {
        &self.u[l][q]
    }

    pub fn v(&self, q: usize, l: usize) -> &BigUint {
        &self.v[l][q]
    }

    /// Level sizes from state `q` for lengths `0..=max_len`.
    pub fn sequence(&self, q: usize) -> Vec<BigUint> {
        self.u.iter().map(|row| row[q].clone()).collect()
    }
}

/// A trimmed automaton together with lazily grown count and reachability
/// tables, supporting ranking, unranking and successor computations.
#[derive(Debug)]
pub struct RankedDfa {
    dfa: Dfa,
    pce: bool,
    budget: usize,
    counts: RefCell<CountTable>,
    /// `reach[m][q]`: some word of length exactly `m` leads from `q` to a final state.
    reach: RefCell<Vec<Vec<bool>>>,
}

impl RankedDfa {
    pub fn new(dfa: &Dfa) -> Result<Self> {
        Self::with_budget(dfa, DEFAULT_LENGTH_BUDGET)
    }

    pub fn with_budget(dfa: &Dfa, budget: usize) -> Result<Self> {
        let dfa = dfa.trim()?;
        let pce = dfa.check_pce()? == PceCheck::Pce;
        Ok(RankedDfa {
            counts: RefCell::new(CountTable::compute(&dfa, 8)),
            reach: RefCell::new(Vec::new()),
            dfa,
            pce,
            budget,
        })
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn is_pce(&self) -> bool {
        self.pce
    }

    fn ensure_counts(&self, l: usize) -> Result<()> {
        if l > self.budget {
            return Err(Error::BudgetExceeded(format!(
                "length {l} exceeds the length budget {}",
                self.budget
            )));
        }
        let mut c = self.counts.borrow_mut();
        let have = c.max_len();
        if have < l {
            c.extend(&self.dfa, l.max(2 * have).min(self.budget));
        }
        Ok(())
    }

    fn reachable(&self, q: usize, m: usize) -> Result<bool> {
        if m > self.budget {
            return Err(Error::BudgetExceeded(format!(
                "length {m} exceeds the length budget {}",
                self.budget
            )));
        }
        let mut r = self.reach.borrow_mut();
        while r.len() <= m {
            let row: Vec<bool> = match r.last() {
                None => (0..self.dfa.num_states())
                    .map(|q| self.dfa.is_final(q))
                    .collect(),
                Some(prev) => (0..self.dfa.num_states())
                    .map(|q| self.dfa.edges(q).any(|(_, t)| prev[t]))
                    .collect(),
            };
            r.push(row);
        }
        Ok(r[m][q])
    }

    /// A copy of the count table covering lengths up to `lmax`.
    pub fn count(&self, lmax: usize) -> Result<CountTable> {
        self.ensure_counts(lmax)?;
        let c = self.counts.borrow();
        Ok(CountTable {
            u: c.u[..=lmax].to_vec(),
            v: c.v[..=lmax].to_vec(),
        })
    }

    /// `u_L(ℓ)`.
    pub fn u(&self, l: usize) -> Result<BigUint> {
        self.ensure_counts(l)?;
        Ok(self.counts.borrow().u(self.dfa.initial(), l).clone())
    }

    /// `v_L(ℓ)`.
    pub fn v(&self, l: usize) -> Result<BigUint> {
        self.ensure_counts(l)?;
        Ok(self.counts.borrow().v(self.dfa.initial(), l).clone())
    }

    fn path(&self, digits: &[Digit]) -> Result<Vec<usize>> {
        let mut states = Vec::with_capacity(digits.len() + 1);
        let mut q = self.dfa.initial();
        states.push(q);
        for &a in digits {
            q = self
                .dfa
                .step(q, a)
                .ok_or_else(|| self.not_in_language(digits))?;
            states.push(q);
        }
        if !self.dfa.is_final(q) {
            return Err(self.not_in_language(digits));
        }
        Ok(states)
    }

    fn not_in_language(&self, digits: &[Digit]) -> Error {
        Error::NotInLanguage(format_digits(digits, self.dfa.alphabet().size()))
    }

    /// Rank of `w` in the radix order of the language.
    pub fn value_of(&self, digits: &[Digit]) -> Result<BigUint> {
        let states = self.path(digits)?;
        let l = digits.len();
        self.ensure_counts(l)?;
        let c = self.counts.borrow();
        let mut n = if l == 0 {
            BigUint::zero()
        } else {
            c.v(self.dfa.initial(), l - 1).clone()
        };
        for (j, &x) in digits.iter().enumerate() {
            for (a, t) in self.dfa.edges(states[j]) {
                if a >= x {
                    break;
                }
                n += c.u(t, l - 1 - j);
            }
        }
        Ok(n)
    }

    pub fn value_of_word(&self, w: &Word) -> Result<BigUint> {
        self.check_alphabet(w)?;
        self.value_of(w.digits())
    }

    fn check_alphabet(&self, w: &Word) -> Result<()> {
        if w.alphabet() != self.dfa.alphabet() {
            return Err(Error::AlphabetMismatch {
                left: w.alphabet().size(),
                right: self.dfa.alphabet().size(),
            });
        }
        Ok(())
    }

    /// The word of rank `n`.
    pub fn repr_of(&self, n: &BigUint) -> Result<Vec<Digit>> {
        let q0 = self.dfa.initial();
        let mut l = 0;
        loop {
            self.ensure_counts(l)?;
            if self.counts.borrow().v(q0, l) > n {
                break;
            }
            l += 1;
        }
        let c = self.counts.borrow();
        let mut rem = if l == 0 {
            n.clone()
        } else {
            n - c.v(q0, l - 1)
        };
        let mut q = q0;
        let mut out = Vec::with_capacity(l);
        for j in 0..l {
            let mut chosen = None;
            for (a, t) in self.dfa.edges(q) {
                let k = c.u(t, l - 1 - j);
                if rem < *k {
                    chosen = Some((a, t));
                    break;
                }
                rem -= k;
            }
            let (a, t) = chosen.expect("counts are consistent");
            out.push(a);
            q = t;
        }
        Ok(out)
    }

    pub fn repr_of_u64(&self, n: u64) -> Result<Word> {
        let d = self.repr_of(&BigUint::from(n))?;
        Ok(Word::from_trusted(self.dfa.alphabet(), d))
    }

    /// Smallest word of length `len` that leads from `q` to a final state,
    /// appended to `out`.
    fn complete_min(
        &self,
        mut q: usize,
        len: usize,
        out: &mut Vec<Digit>,
        states: &mut Vec<usize>,
    ) -> Result<()> {
        for m in (0..len).rev() {
            let mut next = None;
            for (a, t) in self.dfa.edges(q) {
                if self.reachable(t, m)? {
                    next = Some((a, t));
                    break;
                }
            }
            let (a, t) = next.expect("reachability table guarantees a completion");
            out.push(a);
            states.push(t);
            q = t;
        }
        Ok(())
    }

    /// Advances `digits` (with its state path) to its successor in place and
    /// returns the carry `Δ(w, succ(w))`.
    fn advance(&self, digits: &mut Vec<Digit>, states: &mut Vec<usize>) -> Result<u32> {
        let l = digits.len();
        for j in (0..l).rev() {
            let q = states[j];
            let cur = digits[j];
            let mut found = None;
            for (a, t) in self.dfa.edges(q) {
                if a > cur && self.reachable(t, l - 1 - j)? {
                    found = Some((a, t));
                    break;
                }
            }
            if let Some((a, t)) = found {
                digits.truncate(j);
                states.truncate(j + 1);
                digits.push(a);
                states.push(t);
                self.complete_min(t, l - 1 - j, digits, states)?;
                return Ok((l - j) as u32);
            }
        }
        let q0 = self.dfa.initial();
        let mut m = l + 1;
        while !self.reachable(q0, m)? {
            m += 1;
        }
        digits.clear();
        states.truncate(1);
        self.complete_min(q0, m, digits, states)?;
        Ok(m as u32)
    }

    /// The least word of the language greater than `w`.
    pub fn successor(&self, digits: &[Digit]) -> Result<Vec<Digit>> {
        let mut states = self.path(digits)?;
        let mut d = digits.to_vec();
        self.advance(&mut d, &mut states)?;
        Ok(d)
    }

    pub fn successor_word(&self, w: &Word) -> Result<Word> {
        self.check_alphabet(w)?;
        Ok(Word::from_trusted(
            self.dfa.alphabet(),
            self.successor(w.digits())?,
        ))
    }

    fn first_word(&self) -> Result<(Vec<Digit>, Vec<usize>)> {
        let q0 = self.dfa.initial();
        let mut m = 0;
        while !self.reachable(q0, m)? {
            m += 1;
        }
        let mut d = Vec::new();
        let mut s = vec![q0];
        self.complete_min(q0, m, &mut d, &mut s)?;
        Ok((d, s))
    }

    /// The first `count` words in radix order.
    pub fn enumerate(&self, count: u64) -> Result<WordStream<'_>> {
        let (digits, states) = self.first_word()?;
        Ok(WordStream {
            lang: self,
            digits,
            states,
            remaining: count,
            started: false,
        })
    }

    /// Carry propagations `cp(0), ..., cp(count - 1)`.
    pub fn cp_stream(&self, count: u64) -> Result<DfaCpStream<'_>> {
        let (digits, states) = self.first_word()?;
        Ok(DfaCpStream {
            lang: self,
            digits,
            states,
            index: 0,
            remaining: count,
            error: None,
        })
    }

    fn require_pce(&self) -> Result<()> {
        if self.pce {
            Ok(())
        } else {
            Err(Error::NotPce(
                "the closed-form carry sum needs a prefix-closed extendable language".into(),
            ))
        }
    }

    /// `|LB(x)|`: nodes of the tree truncated at depth `|x|` lying strictly
    /// to the left of the path from the root to `x`.
    pub fn left_bank(&self, digits: &[Digit]) -> Result<BigUint> {
        let states = self.path(digits)?;
        let l = digits.len();
        self.ensure_counts(l)?;
        let c = self.counts.borrow();
        let mut total = BigUint::zero();
        for (j, &x) in digits.iter().enumerate() {
            for (a, t) in self.dfa.edges(states[j]) {
                if a >= x {
                    break;
                }
                total += c.v(t, l - 1 - j);
            }
        }
        Ok(total)
    }

    /// `scp(N) = cp(0) + ... + cp(N - 1)` without enumeration.
    ///
    /// With `w` the word of rank `N - 1` and `ℓ = |w|`, the words shorter
    /// than `w` contribute `v(0) + ... + v(ℓ - 1)`; the words of length `ℓ`
    /// up to `w` contribute `v(ℓ)` when `w` is the last word of its length
    /// and `|LB(succ(w))|` otherwise.
    pub fn fast_scp(&self, n: &BigUint) -> Result<BigUint> {
        self.require_pce()?;
        if n.is_zero() {
            return Ok(BigUint::zero());
        }
        let w = self.repr_of(&(n - 1u32))?;
        let l = w.len();
        self.ensure_counts(l)?;
        let q0 = self.dfa.initial();
        let (base, vl) = {
            let c = self.counts.borrow();
            let base: BigUint = (0..l).map(|i| c.v(q0, i)).sum();
            (base, c.v(q0, l).clone())
        };
        if *n == vl {
            return Ok(base + vl);
        }
        let x = self.successor(&w)?;
        Ok(base + self.left_bank(&x)?)
    }

    pub fn fast_scp_u64(&self, n: u64) -> Result<BigUint> {
        self.fast_scp(&BigUint::from(n))
    }
}

/// Radix-order enumeration of a language.
pub struct WordStream<'a> {
    lang: &'a RankedDfa,
    digits: Vec<Digit>,
    states: Vec<usize>,
    remaining: u64,
    started: bool,
}

impl Iterator for WordStream<'_> {
    type Item = Result<Word>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        if self.started {
            if let Err(e) = self.lang.advance(&mut self.digits, &mut self.states) {
                self.remaining = 0;
                return Some(Err(e));
            }
        }
        self.started = true;
        self.remaining -= 1;
        Some(Ok(Word::from_trusted(
            self.lang.dfa.alphabet(),
            self.digits.clone(),
        )))
    }
}

/// Carry stream over a language given by an automaton.
pub struct DfaCpStream<'a> {
    lang: &'a RankedDfa,
    digits: Vec<Digit>,
    states: Vec<usize>,
    index: u64,
    remaining: u64,
    error: Option<Error>,
}

impl DfaCpStream<'_> {
    /// The error that ended the stream early, if any.
    pub fn take_error(&mut self) -> Option<Error> {
        self.error.take()
    }

    pub fn current_word(&self) -> &[Digit] {
        &self.digits
    }
}

impl Iterator for DfaCpStream<'_> {
    type Item = CpStep;

    fn next(&mut self) -> Option<CpStep> {
        if self.remaining == 0 {
            return None;
        }
        let level = self.digits.len() as u32;
        match self.lang.advance(&mut self.digits, &mut self.states) {
            Ok(cp) => {
                let step = CpStep {
                    index: self.index,
                    cp,
                    level,
                };
                self.index += 1;
                self.remaining -= 1;
                Some(step)
            }
            Err(e) => {
                self.error = Some(e);
                self.remaining = 0;
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::builtin;
    use crate::words::{delta_digits, Alphabet};
    use num_traits::ToPrimitive;

    fn fib() -> RankedDfa {
        RankedDfa::new(&builtin("fibonacci").unwrap()).unwrap()
    }

    fn w(s: &str) -> Vec<Digit> {
        s.bytes().map(|b| (b - b'0') as Digit).collect()
    }

    #[test]
    fn fibonacci_successor_and_rank() {
        let f = fib();
        assert_eq!(f.successor(&w("10001")).unwrap(), w("10010"));
        assert_eq!(f.successor(&w("10101")).unwrap(), w("100000"));
        assert_eq!(f.value_of(&w("10010")).unwrap(), BigUint::from(10u32));
        assert_eq!(f.value_of(&w("10001")).unwrap(), BigUint::from(9u32));
        assert!(matches!(f.value_of(&w("11")), Err(Error::NotInLanguage(_))));
        assert_eq!(f.repr_of_u64(12).unwrap().to_string(), "10101");
        assert_eq!(f.repr_of_u64(0).unwrap().to_string(), "e");
    }

    #[test]
    fn base_three_repr() {
        let b = RankedDfa::new(&builtin("base(3)").unwrap()).unwrap();
        assert_eq!(b.repr_of_u64(9).unwrap().to_string(), "100");
        let c = b.count(5).unwrap();
        assert_eq!(c.u(0, 3), &BigUint::from(18u32));
    }

    #[test]
    fn counts_of_square_languages() {
        let k1 = RankedDfa::new(&builtin("K1").unwrap()).unwrap();
        let u: Vec<u64> = (0..6).map(|l| k1.u(l).unwrap().to_u64().unwrap()).collect();
        assert_eq!(u, [1, 1, 4, 4, 16, 16]);
        let k2 = RankedDfa::new(&builtin("K2").unwrap()).unwrap();
        for l in 0..20 {
            assert_eq!(k2.u(l).unwrap(), BigUint::one() << l);
        }
    }

    #[test]
    fn stream_agrees_with_delta_and_successor() {
        let f = fib();
        let words: Vec<Vec<Digit>> = f
            .enumerate(2000)
            .unwrap()
            .map(|x| x.unwrap().into_digits())
            .collect();
        let cps: Vec<CpStep> = f.cp_stream(1999).unwrap().collect();
        for i in 0..1999 {
            assert_eq!(cps[i].cp as usize, delta_digits(&words[i], &words[i + 1]));
            assert_eq!(f.successor(&words[i]).unwrap(), words[i + 1]);
            assert_eq!(f.repr_of(&BigUint::from(i)).unwrap(), words[i]);
        }
    }

    #[test]
    fn fast_scp_small_cases() {
        let b = RankedDfa::new(&builtin("base(2)").unwrap()).unwrap();
        let expect = [0u32, 1, 3, 4, 7, 8, 10, 11, 15];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(b.fast_scp_u64(n as u64).unwrap(), BigUint::from(*e));
        }
    }

    #[test]
    fn non_pce_language_successor() {
        // Words of even length over {0,1} starting with 1, as a general
        // rational language: ε, 10, 11, 1000, ...
        let a = Alphabet::new(2).unwrap();
        let mut d = Dfa::new(a, 3, 0).unwrap();
        d.set_transition(0, 1, 1).unwrap();
        d.set_transition(1, 0, 2).unwrap();
        d.set_transition(1, 1, 2).unwrap();
        d.set_transition(2, 0, 1).unwrap();
        d.set_transition(2, 1, 1).unwrap();
        d.set_final(1, false);
        let r = RankedDfa::new(&d).unwrap();
        assert!(!r.is_pce());
        let words: Vec<String> = r
            .enumerate(5)
            .unwrap()
            .map(|x| x.unwrap().to_string())
            .collect();
        assert_eq!(words, ["e", "10", "11", "1000", "1001"]);
        assert!(r.fast_scp_u64(3).is_err());
        assert_eq!(r.value_of(&w("1001")).unwrap(), BigUint::from(4u32));
    }
}
