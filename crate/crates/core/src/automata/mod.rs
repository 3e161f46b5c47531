//! Deterministic automata over digit alphabets and the representation
//! languages they accept.

mod builtin;
mod decide;
mod language;

pub use builtin::{builtin, BUILTIN_NAMES};
pub use decide::{decide_cp, language_spectrum, CpVerdict, QuotientDiagnostic};
pub use language::{CountTable, DfaCpStream, RankedDfa, WordStream};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Digit};

/// A deterministic automaton with a partial transition function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    initial: usize,
    finals: Vec<bool>,
    /// `delta[state][digit]`.
    delta: Vec<Vec<Option<usize>>>,
    names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PceCheck {
    Pce,
    NotPrefixClosed { state: String },
    NotExtendable { state: String },
}

impl Dfa {
    pub fn new(alphabet: Alphabet, states: usize, initial: usize) -> Result<Self> {
        if initial >= states {
            return Err(Error::OutOfRange(format!(
                "initial state {initial} but only {states} states"
            )));
        }
        Ok(Dfa {
            alphabet,
            initial,
            finals: vec![true; states],
            delta: vec![vec![None; alphabet.size() as usize]; states],
            names: (0..states).map(|i| i.to_string()).collect(),
        })
    }

    /// Builds an automaton from named edges; every state is final.
    pub fn from_edges(alphabet: Alphabet, names: &[&str], edges: &[(&str, Digit, &str)]) -> Self {
        let idx = |n: &str| names.iter().position(|x| *x == n).expect("known state");
        let mut dfa = Dfa::new(alphabet, names.len(), 0).expect("nonempty");
        dfa.names = names.iter().map(|s| s.to_string()).collect();
        for &(s, a, t) in edges {
            dfa.set_transition(idx(s), a, idx(t)).expect("valid edge");
        }
        dfa
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn set_names(&mut self, names: Vec<String>) {
        assert_eq!(names.len(), self.num_states());
        self.names = names;
    }

    pub fn set_final(&mut self, q: usize, is_final: bool) {
        self.finals[q] = is_final;
    }

    pub fn set_transition(&mut self, from: usize, digit: Digit, to: usize) -> Result<()> {
        let n = self.num_states();
        if from >= n || to >= n {
            return Err(Error::OutOfRange(format!(
                "state out of range in {from} -> {to}"
            )));
        }
        if !self.alphabet.contains(digit) {
            return Err(Error::DigitOutOfRange {
                digit: digit as u32,
                size: self.alphabet.size(),
            });
        }
        self.delta[from][digit as usize] = Some(to);
        Ok(())
    }

    pub fn step(&self, q: usize, digit: Digit) -> Option<usize> {
        self.delta[q].get(digit as usize).copied().flatten()
    }

    /// Outgoing transitions of `q` in increasing digit order.
    pub fn edges(&self, q: usize) -> impl Iterator<Item = (Digit, usize)> + '_ {
        self.delta[q]
            .iter()
            .enumerate()
            .filter_map(|(a, t)| t.map(|t| (a as Digit, t)))
    }

    pub fn run(&self, digits: &[Digit]) -> Option<usize> {
        digits
            .iter()
            .try_fold(self.initial, |q, &a| self.step(q, a))
    }

    pub fn accepts(&self, digits: &[Digit]) -> bool {
        self.run(digits).is_some_and(|q| self.finals[q])
    }

    /// Keeps only states that are reachable from the initial state and from
    /// which a final state is reachable.
    pub fn trim(&self) -> Result<Dfa> {
        let n = self.num_states();
        let mut acc = vec![false; n];
        let mut stack = vec![self.initial];
        acc[self.initial] = true;
        while let Some(q) = stack.pop() {
            for (_, t) in self.edges(q) {
                if !acc[t] {
                    acc[t] = true;
                    stack.push(t);
                }
            }
        }
        let mut coacc = self.finals.clone();
        loop {
            let mut changed = false;
            for q in 0..n {
                if !coacc[q] && self.edges(q).any(|(_, t)| coacc[t]) {
                    coacc[q] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let keep: Vec<bool> = (0..n).map(|q| acc[q] && coacc[q]).collect();
        if !keep[self.initial] {
            return Err(Error::EmptyLanguage);
        }
        let mut map = vec![usize::MAX; n];
        let mut next = 0;
        for q in 0..n {
            if keep[q] {
                map[q] = next;
                next += 1;
            }
        }
        let mut out = Dfa::new(self.alphabet, next, map[self.initial])?;
        for q in (0..n).filter(|&q| keep[q]) {
            out.finals[map[q]] = self.finals[q];
            out.names[map[q]] = self.names[q].clone();
            for (a, t) in self.edges(q) {
                if keep[t] {
                    out.delta[map[q]][a as usize] = Some(map[t]);
                }
            }
        }
        Ok(out)
    }

    /// Prefix-closed and extendable test, run on the trimmed automaton.
    pub fn check_pce(&self) -> Result<PceCheck> {
        let t = self.trim()?;
        for q in 0..t.num_states() {
            if !t.finals[q] {
                return Ok(PceCheck::NotPrefixClosed {
                    state: t.names[q].clone(),
                });
            }
        }
        for q in 0..t.num_states() {
            if t.edges(q).next().is_none() {
                return Ok(PceCheck::NotExtendable {
                    state: t.names[q].clone(),
                });
            }
        }
        Ok(PceCheck::Pce)
    }

    /// Reads the line format
    ///
    /// ```text
    /// alphabet 4        # optional, defaults to the largest digit + 1
    /// states 3
    /// initial 0
    /// finals 0 1 2      # optional, defaults to all states
    /// trans 0 1 1
    /// ```
    pub fn parse(text: &str) -> Result<Dfa> {
        let mut alphabet = None;
        let mut states = None;
        let mut initial = None;
        let mut finals: Option<Vec<usize>> = None;
        let mut trans = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut toks = content.split_whitespace();
            let key = toks.next().unwrap_or_default();
            let nums = toks
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::Parse {
                        line,
                        msg: format!("expected a non-negative integer, got `{t}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let exactly = |k: usize| -> Result<()> {
                if nums.len() == k {
                    Ok(())
                } else {
                    Err(Error::Parse {
                        line,
                        msg: format!("`{key}` takes {k} argument(s), got {}", nums.len()),
                    })
                }
            };
            match key {
                "alphabet" => {
                    exactly(1)?;
                    alphabet = Some(nums[0]);
                }
                "states" => {
                    exactly(1)?;
                    states = Some(nums[0]);
                }
                "initial" => {
                    exactly(1)?;
                    initial = Some(nums[0]);
                }
                "finals" => finals = Some(nums),
                "trans" => {
                    exactly(3)?;
                    trans.push((line, nums[0], nums[1], nums[2]));
                }
                other => {
                    return Err(Error::Parse {
                        line,
                        msg: format!("unknown directive `{other}`"),
                    })
                }
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 0,
            msg: format!("missing `{what}` line"),
        };
        let states = states.ok_or_else(|| missing("states"))?;
        let initial = initial.ok_or_else(|| missing("initial"))?;
        let size = alphabet.unwrap_or_else(|| trans.iter().map(|t| t.2 + 1).max().unwrap_or(1));
        let size = u32::try_from(size).map_err(|_| Error::InvalidAlphabet(size as u64))?;
        let mut dfa =
            Dfa::new(Alphabet::new(size)?, states, initial).map_err(|e| Error::Parse {
                line: 0,
                msg: e.to_string(),
            })?;
        if let Some(f) = finals {
            dfa.finals = vec![false; states];
            for q in f {
                if q >= states {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("final state {q} out of range"),
                    });
                }
                dfa.finals[q] = true;
            }
        }
        for (line, s, a, t) in trans {
            let digit = Digit::try_from(a).map_err(|_| Error::Parse {
                line,
                msg: format!("digit {a} too large"),
            })?;
            if s < states && dfa.step(s, digit).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("second transition from state {s} on digit {a}"),
                });
            }
            dfa.set_transition(s, digit, t).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        Ok(dfa)
    }

    /// Serializes in the format read by [`Dfa::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "alphabet {}\nstates {}\ninitial {}\n",
            self.alphabet.size(),
            self.num_states(),
            self.initial
        );
        let finals: Vec<String> = (0..self.num_states())
            .filter(|&q| self.finals[q])
            .map(|q| q.to_string())
            .collect();
        s.push_str(&format!("finals {}\n", finals.join(" ")));
        for q in 0..self.num_states() {
            for (a, t) in self.edges(q) {
                s.push_str(&format!("trans {q} {a} {t}\n"));
            }
        }
        s
    }
}
