//! β-expansion of 1, Parry classification and the greedy system built on
//! the quasi-greedy expansion.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::algebraic::{AlgebraicReal, NumberFieldElement};
use super::greedy::{Basis, BasisRule};
use crate::automata::Dfa;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::words::{format_digits, Alphabet, Digit};

/// Default cap on the number of distinct remainders in the Rényi loop.
pub const DEFAULT_STATE_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParryClass {
    Simple,
    NonSimple,
    UnknownWithinBound,
}

/// `d_β(1)`: finite, eventually periodic, or cut at the state cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub digits: Vec<Digit>,
    /// Index in `digits` where the period starts, if periodic.
    pub period_start: Option<usize>,
}

/// Eventually periodic `pre · period^ω`. When `truncated` holds, only the
/// finite word `pre` is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiGreedy {
    pub pre: Vec<Digit>,
    pub period: Vec<Digit>,
    pub truncated: bool,
}

impl QuasiGreedy {
    /// First `n` digits, if known.
    pub fn prefix(&self, n: usize) -> Result<Vec<Digit>> {
        if self.period.is_empty() {
            if n > self.pre.len() {
                return Err(Error::UnknownParryClass);
            }
            return Ok(self.pre[..n].to_vec());
        }
        Ok(self
            .pre
            .iter()
            .chain(self.period.iter().cycle())
            .take(n)
            .copied()
            .collect())
    }

    pub fn max_digit(&self) -> Digit {
        self.pre
            .iter()
            .chain(&self.period)
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// `pre(period)^ω`, or the known prefix followed by `...`.
    pub fn format(&self) -> String {
        let size = self.max_digit() as u32 + 1;
        let mut s = String::new();
        if !self.pre.is_empty() {
            s.push_str(&format_digits(&self.pre, size));
        }
        if self.truncated {
            s.push_str("...");
        } else {
            s.push('(');
            s.push_str(&format_digits(&self.period, size));
            s.push_str(")^w");
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct BetaProfile {
    beta: AlgebraicReal,
    expansion: Expansion,
    class: ParryClass,
}

/// Runs the Rényi loop `x_i = ⌊β r_{i-1}⌋`, `r_i = β r_{i-1} - x_i` from
/// `r_0 = 1` with exact arithmetic in `Q(β)`.
pub fn beta_expand_one(beta: &AlgebraicReal, state_cap: usize) -> Result<BetaProfile> {
    let mut beta = beta.clone();
    let mut r = NumberFieldElement::integer(&One::one());
    let mut digits: Vec<Digit> = Vec::new();
    let mut index: HashMap<NumberFieldElement, usize> = HashMap::new();
    loop {
        let t = r.mul_beta(&beta);
        let x = t.floor(&mut beta)?;
        let digit: Digit = x
            .to_u32()
            .filter(|&d| d <= Digit::MAX as u32)
            .ok_or_else(|| Error::InvalidAlgebraic("digit does not fit the alphabet".into()))?
            as Digit;
        digits.push(digit);
        r = t.sub(&NumberFieldElement::integer(&x));
        if r.is_trivially_zero() {
            return Ok(BetaProfile::new(beta, digits, None, ParryClass::Simple));
        }
        if r.sign(&mut beta)? == Ordering::Equal {
            // A reducible defining polynomial: keep only the factor through β
            // so that representatives become canonical again.
            let factor = beta.poly().gcd(&r.to_poly());
            beta.shrink_to(&factor);
            return Ok(BetaProfile::new(beta, digits, None, ParryClass::Simple));
        }
        if let Some(&j) = index.get(&r) {
            return Ok(BetaProfile::new(
                beta,
                digits,
                Some(j),
                ParryClass::NonSimple,
            ));
        }
        if index.len() >= state_cap {
            return Ok(BetaProfile::new(
                beta,
                digits,
                None,
                ParryClass::UnknownWithinBound,
            ));
        }
        index.insert(r.clone(), digits.len());
    }
}

impl BetaProfile {
    fn new(
        beta: AlgebraicReal,
        digits: Vec<Digit>,
        period_start: Option<usize>,
        class: ParryClass,
    ) -> Self {
        BetaProfile {
            beta,
            expansion: Expansion {
                digits,
                period_start,
            },
            class,
        }
    }

    pub fn beta(&self) -> &AlgebraicReal {
        &self.beta
    }

    pub fn class(&self) -> ParryClass {
        self.class
    }

    pub fn expansion(&self) -> &Expansion {
        &self.expansion
    }

    fn alphabet_size(&self) -> u32 {
        self.expansion.digits.iter().copied().max().unwrap_or(1) as u32 + 1
    }

    /// `d_β(1)` as text: a finite word, `pre(period)^w`, or a prefix ending
    /// in `...` when the class is unknown.
    pub fn bge_string(&self) -> String {
        let d = &self.expansion.digits;
        let size = self.alphabet_size();
        match (self.class, self.expansion.period_start) {
            (ParryClass::NonSimple, Some(j)) => {
                let pre = if j > 0 {
                    format_digits(&d[..j], size)
                } else {
                    String::new()
                };
                format!("{pre}({})^w", format_digits(&d[j..], size))
            }
            (ParryClass::UnknownWithinBound, _) => format!("{}...", format_digits(d, size)),
            _ => format_digits(d, size),
        }
    }

    /// A finite `t_1 ... t_m` becomes `(t_1 ... t_{m-1} (t_m - 1))^ω`; an
    /// infinite expansion is its own quasi-greedy expansion.
    pub fn quasi_greedy(&self) -> QuasiGreedy {
        let d = &self.expansion.digits;
        match self.class {
            ParryClass::Simple => {
                let mut period = d.clone();
                *period.last_mut().expect("nonempty") -= 1;
                QuasiGreedy {
                    pre: Vec::new(),
                    period,
                    truncated: false,
                }
            }
            ParryClass::NonSimple => {
                let j = self.expansion.period_start.expect("periodic");
                QuasiGreedy {
                    pre: d[..j].to_vec(),
                    period: d[j..].to_vec(),
                    truncated: false,
                }
            }
            ParryClass::UnknownWithinBound => QuasiGreedy {
                pre: d.clone(),
                period: Vec::new(),
                truncated: true,
            },
        }
    }

    /// `w ∈ L_β`: no leading zero, and every suffix of `w` is
    /// lexicographically at most the prefix of `d*` of the same length.
    pub fn is_member(&self, w: &[Digit]) -> Result<bool> {
        if w.is_empty() {
            return Ok(true);
        }
        if w[0] == 0 {
            return Ok(false);
        }
        let d = self.quasi_greedy().prefix(w.len())?;
        Ok((0..w.len()).all(|i| w[i..] <= d[..w.len() - i]))
    }

    /// Automaton of `L_β` for a Parry number. State `i` records that the
    /// last `i` digits read equal `d_1 ... d_i`; a smaller digit resets it.
    pub fn parry_automaton(&self) -> Result<Dfa> {
        if self.class == ParryClass::UnknownWithinBound {
            return Err(Error::UnknownParryClass);
        }
        let qg = self.quasi_greedy();
        let d: Vec<Digit> = qg.pre.iter().chain(&qg.period).copied().collect();
        let m = d.len();
        let size = (qg.max_digit() as u32 + 1).max(2);
        let mut dfa = Dfa::new(Alphabet::new(size)?, m + 1, m)?;
        for (i, &top) in d.iter().enumerate() {
            for a in 0..top {
                dfa.set_transition(i, a, 0)?;
            }
            let next = if i + 1 == m { qg.pre.len() } else { i + 1 };
            dfa.set_transition(i, top, next)?;
        }
        // The initial state forbids a leading zero and otherwise acts as state 0.
        for a in 1..=d[0] {
            let t = dfa.step(0, a).expect("defined above");
            dfa.set_transition(m, a, t)?;
        }
        let mut names: Vec<String> = (0..m).map(|i| format!("s{i}")).collect();
        names.push("init".into());
        dfa.set_names(names);
        Ok(dfa)
    }
}

/// The canonical system of β together with `K̂ = G_ℓ / β^ℓ` at the last term.
#[derive(Clone, Debug)]
pub struct BetaBasis {
    pub basis: Basis,
    pub k_hat: f64,
    /// Set when the basis rests on a truncated expansion.
    pub warning: Option<String>,
}

/// `G_0 = 1` and `G_ℓ = d_1 G_{ℓ-1} + ... + d_ℓ G_0 + 1`.
pub fn basis_from_beta(profile: &BetaProfile, lmax: usize) -> Result<BetaBasis> {
    let qg = profile.quasi_greedy();
    let d = qg.prefix(lmax)?;
    let mut g: Vec<BigUint> = vec![BigUint::one()];
    for l in 1..=lmax {
        let next: BigUint = (1..=l)
            .map(|i| &g[l - i] * BigUint::from(d[i - 1]))
            .sum::<BigUint>()
            + 1u32;
        g.push(next);
    }
    let beta = profile.beta().to_f64();
    let k_hat = (log2_big(g.last().expect("nonempty")) - lmax as f64 * beta.log2()).exp2();
    let mut basis = Basis::new(g, BasisRule::FromBeta)?;
    // The alphabet of L_β is 0..⌈β⌉-1 even when the finite prefix is small.
    basis.widen_alphabet(qg.max_digit() as u32 + 1)?;
    Ok(BetaBasis {
        basis,
        k_hat,
        warning: qg.truncated.then(|| {
            format!(
                "Parry class unknown; basis built from the first {} digits of d*",
                qg.pre.len()
            )
        }),
    })
}

fn log2_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return n.to_f64().expect("small").log2();
    }
    let top = (n >> (bits - 64)).to_f64().expect("64 bits");
    top.log2() + (bits - 64) as f64
}

/// Named β values: `phi`, `theta`, `psi` or an integer.
pub fn beta_builtin(name: &str) -> Result<AlgebraicReal> {
    let poly = match name.trim().to_ascii_lowercase().as_str() {
        "phi" | "golden" | "fibonacci" => Poly::from_ints([-1, -1, 1]),
        "theta" | "fina" => Poly::from_ints([1, -3, 1]),
        "psi" | "tribonacci" => Poly::from_ints([-1, -1, -1, 1]),
        other => match other.parse::<i64>() {
            Ok(p) if p >= 2 => return AlgebraicReal::integer(p),
            _ => return Err(Error::UnknownBuiltin(name.to_string())),
        },
    };
    AlgebraicReal::largest_root(&poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(name: &str) -> BetaProfile {
        beta_expand_one(&beta_builtin(name).unwrap(), DEFAULT_STATE_CAP).unwrap()
    }

    fn small(b: &Basis, n: usize) -> Vec<u64> {
        b.small_terms()[..n].to_vec()
    }

    #[test]
    fn golden_ratio() {
        let p = profile("phi");
        assert_eq!(p.bge_string(), "11");
        assert_eq!(p.class(), ParryClass::Simple);
        assert_eq!(p.quasi_greedy().format(), "(10)^w");
        let b = basis_from_beta(&p, 20).unwrap();
        assert_eq!(small(&b.basis, 6), [1, 2, 3, 5, 8, 13]);
        assert!(b.warning.is_none());
        assert!(!p.is_member(&[1, 1]).unwrap());
        assert!(p.is_member(&[1, 0]).unwrap());
        assert!(p.is_member(&[]).unwrap());
    }

    #[test]
    fn fina_and_tribonacci() {
        let t = profile("theta");
        assert_eq!(t.class(), ParryClass::NonSimple);
        assert_eq!(t.quasi_greedy().format(), "2(1)^w");
        let b = basis_from_beta(&t, 30).unwrap().basis;
        assert_eq!(small(&b, 5), [1, 3, 8, 21, 55]);
        let e = b.small_terms();
        assert!((2..e.len()).all(|n| e[n] == 3 * e[n - 1] - e[n - 2]));
        assert!(!t.is_member(&[2, 1, 2]).unwrap());

        let psi = profile("psi");
        assert_eq!(psi.bge_string(), "111");
        assert_eq!(psi.class(), ParryClass::Simple);
        assert_eq!(psi.quasi_greedy().format(), "(110)^w");
        let b = basis_from_beta(&psi, 20).unwrap().basis;
        assert_eq!(small(&b, 6), [1, 2, 4, 7, 13, 24]);
    }

    #[test]
    fn integer_beta() {
        let p = profile("10");
        assert_eq!(p.class(), ParryClass::Simple);
        assert_eq!(p.quasi_greedy().format(), "(9)^w");
        let b = basis_from_beta(&p, 5).unwrap();
        assert_eq!(small(&b.basis, 4), [1, 10, 100, 1000]);
        assert!((b.k_hat - 1.0).abs() < 1e-9);
    }

    #[test]
    fn truncated_class_still_builds() {
        let p = beta_expand_one(&beta_builtin("theta").unwrap(), 0).unwrap();
        assert_eq!(p.class(), ParryClass::UnknownWithinBound);
        assert!(basis_from_beta(&p, 1).unwrap().warning.is_some());
        assert!(basis_from_beta(&p, 40).is_err());
    }

    #[test]
    fn membership_matches_greedy_reprs() {
        for name in ["phi", "theta", "psi"] {
            let p = profile(name);
            let b = basis_from_beta(&p, 30).unwrap().basis;
            let size = b.alphabet().size() as u64;
            let limit = b.small_terms()[8];
            let mut members = Vec::new();
            // Radix order: by length, then lexicographically.
            for len in 0..=8u32 {
                for code in 0..size.pow(len) {
                    let mut w = vec![0 as Digit; len as usize];
                    let mut c = code;
                    for slot in w.iter_mut().rev() {
                        *slot = (c % size) as Digit;
                        c /= size;
                    }
                    if p.is_member(&w).unwrap() {
                        members.push(w);
                    }
                }
            }
            assert_eq!(members.len() as u64, limit, "{name}");
            for (n, w) in members.iter().enumerate() {
                assert_eq!(&b.repr_digits_u64(n as u64).unwrap(), w, "{name} at {n}");
            }
        }
    }

    #[test]
    fn parry_automaton_recognizes_the_language() {
        for name in ["phi", "theta", "psi", "3"] {
            let p = profile(name);
            let dfa = p.parry_automaton().unwrap();
            let size = dfa.alphabet().size() as u64;
            for len in 0..=7u32 {
                for code in 0..size.pow(len) {
                    let mut w = vec![0 as Digit; len as usize];
                    let mut c = code;
                    for slot in w.iter_mut().rev() {
                        *slot = (c % size) as Digit;
                        c /= size;
                    }
                    assert_eq!(dfa.accepts(&w), p.is_member(&w).unwrap(), "{name} {w:?}");
                }
            }
        }
        let (v, _) =
            crate::automata::decide_cp(&profile("phi").parry_automaton().unwrap()).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((v.value().unwrap() - phi / (phi - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn reducible_input() {
        let poly = Poly::from_ints([-1, -1, 1]).mul(&Poly::from_ints([-7, 1]));
        let beta = AlgebraicReal::new(poly, crate::poly::int(1), crate::poly::int(2)).unwrap();
        let p = beta_expand_one(&beta, 100).unwrap();
        assert_eq!(p.bge_string(), "11");
        assert_eq!(p.beta().degree(), 2);
    }
}
