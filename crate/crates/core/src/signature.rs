//! Tree shapes given by breadth-first degree sequences.
//!
//! Nodes of the language tree are numbered `0, 1, 2, ...` in breadth-first
//! order, which is also the radix order of the words they stand for. With
//! `S(n)` the sum of the first `n` degrees, the children of node `n` are the
//! nodes in `[S(n), S(n+1))`. The root counts a loop on itself, so its proper
//! children are `[1, S(1))`.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A breadth-first tree shape.
pub trait TreeShape {
    /// `S(n)`: the index of the first child of node `n`.
    fn child_start(&self, n: u64) -> u64;

    /// Exact `v(ℓ)`, the number of nodes of depth at most `ℓ`, for `ℓ <= lmax`.
    fn cumulative_levels(&self, lmax: usize) -> Vec<BigUint>;

    /// The node has at least one proper child.
    fn is_extendable(&self, n: u64) -> bool {
        let lo = if n == 0 { 1 } else { self.child_start(n) };
        self.child_start(n + 1) > lo
    }
}

/// The periodic part of a signature; `q` is its length and `p` its sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Rhythm {
    entries: Vec<u64>,
}

impl Rhythm {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidSignature("empty period".into()));
        }
        Ok(Rhythm { entries })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn q(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn p(&self) -> u64 {
        self.entries.iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Validity {
    Valid,
    /// The first index `j` with `s_0 + ... + s_j <= j + 1`.
    Invalid {
        index: u64,
    },
}

/// An eventually periodic degree sequence `prefix · period^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    prefix: Vec<u64>,
    period: Rhythm,
}

impl Signature {
    pub fn new(prefix: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        Ok(Signature {
            prefix,
            period: Rhythm::new(period)?,
        })
    }

    /// `p^ω`, the shape of the integer base `p`.
    pub fn constant(p: u64) -> Self {
        Signature {
            prefix: Vec::new(),
            period: Rhythm { entries: vec![p] },
        }
    }

    /// Reads the two-line format `prefix: a b c` / `period: x y z`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut prefix = None;
        let mut period = None;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once(':').ok_or_else(|| Error::Parse {
                line: ln + 1,
                msg: format!("expected `prefix:` or `period:`, got `{line}`"),
            })?;
            let values = rest
                .split_whitespace()
                .map(|t| {
                    t.parse::<u64>().map_err(|_| Error::Parse {
                        line: ln + 1,
                        msg: format!("bad degree `{t}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match key.trim() {
                "prefix" => prefix = Some(values),
                "period" => period = Some(values),
                other => {
                    return Err(Error::Parse {
                        line: ln + 1,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        let period = period.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "missing `period:` line".into(),
        })?;
        Signature::new(prefix.unwrap_or_default(), period)
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn period(&self) -> &Rhythm {
        &self.period
    }

    /// Degree `s_n`.
    pub fn degree(&self, n: u64) -> u64 {
        let k = self.prefix.len() as u64;
        if n < k {
            self.prefix[n as usize]
        } else {
            self.period.entries[((n - k) % self.period.q()) as usize]
        }
    }

    fn prefix_sum(&self) -> u64 {
        self.prefix.iter().sum()
    }

    /// `S(n)` over arbitrary precision integers.
    pub fn child_start_big(&self, n: &BigUint) -> BigUint {
        let k = self.prefix.len();
        if let Some(small) = n.to_usize().filter(|&m| m <= k) {
            return BigUint::from(self.prefix[..small].iter().sum::<u64>());
        }
        let rest = n - BigUint::from(k);
        let q = BigUint::from(self.period.q());
        let t = &rest / &q;
        let r = (&rest % &q).to_usize().unwrap_or(0);
        BigUint::from(self.prefix_sum())
            + t * BigUint::from(self.period.p())
            + BigUint::from(self.period.entries[..r].iter().sum::<u64>())
    }

    /// Checks `s_0 + ... + s_j > j + 1` for every `j`.
    ///
    /// Over one period the slack changes by `p - q`, so when `p >= q` the
    /// prefix and two periods decide the whole sequence; otherwise the slack
    /// eventually becomes negative and the scan finds the first failure.
    pub fn validate(&self) -> Validity {
        let k = self.prefix.len() as u64;
        let q = self.period.q();
        let limit = if self.period.p() >= q {
            k + 2 * q
        } else {
            u64::MAX
        };
        let mut sum: u64 = 0;
        let mut j = 0u64;
        while j < limit {
            sum += self.degree(j);
            if sum <= j + 1 {
                return Validity::Invalid { index: j };
            }
            j += 1;
        }
        Validity::Valid
    }

    pub fn has_zero(&self) -> bool {
        self.prefix
            .iter()
            .chain(&self.period.entries)
            .any(|&d| d == 0)
    }

    fn require_valid(&self) -> Result<()> {
        match self.validate() {
            Validity::Valid => Ok(()),
            Validity::Invalid { index } => Err(Error::InvalidSignature(format!(
                "partial sum condition fails at index {index}"
            ))),
        }
    }

    /// Valid and free of zero degrees, as needed to enumerate words.
    pub fn require_enumerable(&self) -> Result<()> {
        self.require_valid()?;
        if self.has_zero() {
            return Err(Error::InvalidSignature(
                "a zero degree leaves a node without successor".into(),
            ));
        }
        Ok(())
    }

    /// `p / (p - q)`, the limit of the mean carry propagation.
    pub fn theoretical_cp(&self) -> Result<BigRational> {
        let (p, q) = (self.period.p(), self.period.q());
        if p <= q {
            return Err(Error::InvalidSignature(format!(
                "directing parameter ({q},{p}) does not satisfy p > q"
            )));
        }
        Ok(BigRational::new(p.into(), (p - q).into()))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        if self.prefix.is_empty() {
            write!(f, "({})^ω", join(&self.period.entries))
        } else {
            write!(
                f,
                "{} ({})^ω",
                join(&self.prefix),
                join(&self.period.entries)
            )
        }
    }
}

impl TreeShape for Signature {
    fn child_start(&self, n: u64) -> u64 {
        let k = self.prefix.len() as u64;
        if n <= k {
            return self.prefix[..n as usize].iter().sum();
        }
        let rest = n - k;
        let q = self.period.q();
        let r = (rest % q) as usize;
        self.prefix_sum()
            + (rest / q) * self.period.p()
            + self.period.entries[..r].iter().sum::<u64>()
    }

    fn cumulative_levels(&self, lmax: usize) -> Vec<BigUint> {
        let mut v = vec![BigUint::from(1u32)];
        for _ in 0..lmax {
            let next = self.child_start_big(v.last().unwrap());
            v.push(next);
        }
        v
    }
}

/// The shape of the language `H` over `{a, b, c}`: on every level the first
/// half of the nodes has three children and the second half one child.
#[derive(Clone, Copy, Debug, Default)]
pub struct HShape;

impl TreeShape for HShape {
    fn child_start(&self, n: u64) -> u64 {
        if n == 0 {
            return 0;
        }
        // Level ℓ holds nodes 2^ℓ - 1 .. 2^(ℓ+1) - 2.
        let l = 63 - (n + 1).leading_zeros() as u64;
        let j = n - ((1u64 << l) - 1);
        let h = 1u64 << (l - 1);
        ((1u64 << (l + 1)) - 1) + 3 * j.min(h) + j.saturating_sub(h)
    }

    fn cumulative_levels(&self, lmax: usize) -> Vec<BigUint> {
        (0..=lmax)
            .map(|l| (BigUint::from(1u32) << (l + 1)) - 1u32)
            .collect()
    }
}

/// Per-level degrees of `H` for levels `1..=lmax`; degrees are counted
/// without the root loop.
pub fn h_language_degrees(lmax: usize) -> Vec<Vec<u64>> {
    (1..=lmax)
        .map(|l| {
            let start = (1u64 << l) - 1;
            (start..start + (1u64 << l))
                .map(|n| HShape.child_start(n + 1) - HShape.child_start(n))
                .collect()
        })
        .collect()
}

/// Level sizes `u(ℓ)` and cumulative counts `v(ℓ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCounter {
    pub u: Vec<BigUint>,
    pub v: Vec<BigUint>,
}

impl LevelCounter {
    pub fn from_cumulative(v: Vec<BigUint>) -> Self {
        let u = v
            .iter()
            .enumerate()
            .map(|(l, x)| if l == 0 { x.clone() } else { x - &v[l - 1] })
            .collect();
        LevelCounter { u, v }
    }

    /// Ratios `u(ℓ+1) / u(ℓ)` as floating point numbers.
    pub fn growth_ratios(&self) -> Vec<f64> {
        self.u.windows(2).map(|w| ratio_f64(&w[1], &w[0])).collect()
    }
}

pub fn level_counts<T: TreeShape + ?Sized>(shape: &T, lmax: usize) -> LevelCounter {
    LevelCounter::from_cumulative(shape.cumulative_levels(lmax))
}

pub(crate) fn ratio_f64(a: &BigUint, b: &BigUint) -> f64 {
    if b.is_zero() {
        return f64::INFINITY;
    }
    let shift = a.bits().max(b.bits()).saturating_sub(900);
    let x = (a >> shift).to_f64().unwrap_or(f64::NAN);
    let y = (b >> shift).to_f64().unwrap_or(f64::NAN);
    x / y
}

/// The ratios `(x_0 + ... + x_n) / x_n`. When `x_{n+1}/x_n -> γ > 1` these
/// converge to `γ / (γ - 1)` (Stolz–Cesàro).
pub fn cumulative_ratios(x: &[BigUint]) -> Vec<f64> {
    let mut acc = BigUint::zero();
    x.iter()
        .map(|xi| {
            acc += xi;
            ratio_f64(&acc, xi)
        })
        .collect()
}

/// One step of a carry stream: `cp` is `Δ(word(index), word(index + 1))` and
/// `level` the length of `word(index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CpStep {
    pub index: u64,
    pub cp: u32,
    pub level: u32,
}

/// Streams carry propagations over a tree shape without materializing it.
///
/// The stream keeps the root-to-node path. Moving to the next node raises
/// the deepest ancestor that still has a right sibling and resets everything
/// below it to leftmost children, so the carry is the number of levels
/// touched. After the last node of a level the path becomes the leftmost
/// path of the next level and the carry is `ℓ + 1`.
pub struct CpStream<'a, T: TreeShape + ?Sized> {
    shape: &'a T,
    path: Vec<u64>,
    index: u64,
    level_end: u64,
    remaining: u64,
}

impl<'a, T: TreeShape + ?Sized> CpStream<'a, T> {
    pub fn new(shape: &'a T, count: u64) -> Self {
        CpStream {
            shape,
            path: vec![0],
            index: 0,
            level_end: 1,
            remaining: count,
        }
    }
}

impl<T: TreeShape + ?Sized> Iterator for CpStream<'_, T> {
    type Item = CpStep;

    fn next(&mut self) -> Option<CpStep> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let level = (self.path.len() - 1) as u32;
        let index = self.index;
        let cp;
        if index + 1 == self.level_end {
            cp = level + 1;
            // Leftmost path one level deeper: level k starts at v(k-1).
            let mut starts = Vec::with_capacity(self.path.len() + 1);
            starts.push(0u64);
            let mut v_prev = 1u64;
            for _ in 0..=level {
                starts.push(v_prev);
                v_prev = self.shape.child_start(v_prev);
            }
            self.level_end = v_prev;
            self.path = starts;
        } else {
            let mut k = self.path.len() - 1;
            loop {
                let parent = self.path[k - 1];
                if self.path[k] + 1 < self.shape.child_start(parent + 1) {
                    break;
                }
                k -= 1;
            }
            self.path[k] += 1;
            for j in k + 1..self.path.len() {
                self.path[j] = self.shape.child_start(self.path[j - 1]);
            }
            cp = level - k as u32 + 1;
        }
        self.index += 1;
        Some(CpStep { index, cp, level })
    }
}

/// Convenience wrapper checking the signature before streaming.
pub fn enumerate_with_cp(sig: &Signature, count: u64) -> Result<CpStream<'_, Signature>> {
    sig.require_enumerable()?;
    Ok(CpStream::new(sig, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cps<T: TreeShape>(shape: &T, n: u64) -> Vec<u32> {
        CpStream::new(shape, n).map(|s| s.cp).collect()
    }

    #[test]
    fn validity_examples() {
        assert_eq!(Signature::constant(3).validate(), Validity::Valid);
        let chain = Signature::new(vec![1], vec![1]).unwrap();
        assert_eq!(chain.validate(), Validity::Invalid { index: 0 });
        let three_halves = Signature::new(vec![2, 1], vec![2, 1]).unwrap();
        assert_eq!(three_halves.validate(), Validity::Valid);
        // p < q: slack shrinks until it fails.
        let dying = Signature::new(vec![5], vec![1, 0]).unwrap();
        assert_eq!(dying.validate(), Validity::Invalid { index: 8 });
        // p == q with enough slack is a valid chain-like shape.
        let chain = Signature::new(vec![2], vec![1]).unwrap();
        assert_eq!(chain.validate(), Validity::Valid);
        assert!(chain.theoretical_cp().is_err());
    }

    #[test]
    fn base_two_stream() {
        let s = Signature::constant(2);
        assert_eq!(cps(&s, 8), [1, 2, 1, 3, 1, 2, 1, 4]);
        assert_eq!(cps(&s, 1), [1]);
    }

    #[test]
    fn level_sums_match_cumulative_counts() {
        for sig in [
            Signature::constant(3),
            Signature::new(vec![], vec![2, 1]).unwrap(),
            Signature::new(vec![4, 1], vec![1, 3, 2]).unwrap(),
        ] {
            let v = level_counts(&sig, 12).v;
            let total = v[12].to_u64().unwrap();
            let mut sums = [0u64; 13];
            for step in CpStream::new(&sig, total) {
                sums[step.level as usize] += step.cp as u64;
            }
            for (l, (&s, vl)) in sums.iter().zip(&v).enumerate() {
                assert_eq!(BigUint::from(s), *vl, "{sig} level {l}");
            }
        }
    }

    #[test]
    fn last_word_of_level_carries_everything() {
        let sig = Signature::new(vec![3], vec![2, 1, 1]).unwrap();
        let v = level_counts(&sig, 8).v;
        let steps: Vec<CpStep> = CpStream::new(&sig, v[8].to_u64().unwrap()).collect();
        for (l, vl) in v.iter().take(8).enumerate() {
            let last = vl.to_u64().unwrap() - 1;
            assert_eq!(steps[last as usize].cp, l as u32 + 1);
        }
    }

    #[test]
    fn counts_and_theory() {
        let c = level_counts(&Signature::constant(3), 5);
        assert_eq!(c.u[3], BigUint::from(18u32));
        assert_eq!(c.v[4], BigUint::from(81u32));
        let t = level_counts(&Signature::new(vec![], vec![2, 1]).unwrap(), 5);
        let u: Vec<u64> = t.u.iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(u, [1, 1, 1, 2, 3, 4]);
        assert_eq!(
            level_counts(&Signature::constant(2), 0).v,
            [BigUint::from(1u32)]
        );

        let r = |p: i64, q: i64| BigRational::new(p.into(), q.into());
        assert_eq!(Signature::constant(3).theoretical_cp().unwrap(), r(3, 2));
        assert_eq!(
            Signature::new(vec![], vec![2, 1])
                .unwrap()
                .theoretical_cp()
                .unwrap(),
            r(3, 1)
        );
        assert_eq!(Signature::constant(5).theoretical_cp().unwrap(), r(5, 4));
    }

    #[test]
    fn h_shape() {
        let c = level_counts(&HShape, 10);
        assert_eq!(c.u[3], BigUint::from(8u32));
        for l in 0..=10 {
            assert_eq!(c.v[l], (BigUint::from(1u32) << (l + 1)) - 1u32);
        }
        let deg = h_language_degrees(3);
        assert_eq!(deg[0], [3, 1]);
        assert_eq!(deg[1], [3, 3, 1, 1]);
        // The stream's own level boundaries agree with the closed form.
        let steps: Vec<CpStep> = CpStream::new(&HShape, 2047).collect();
        assert_eq!(steps[2046].cp, 11);
        assert_eq!(steps[1022].level, 9);
    }

    #[test]
    fn parse_signature_file() {
        let s = Signature::parse("prefix: 2 1\nperiod: 2 1\n").unwrap();
        assert_eq!(s.prefix(), [2, 1]);
        assert_eq!(s.period().p(), 3);
        assert!(Signature::parse("period: x").is_err());
        assert!(Signature::parse("prefix: 1").is_err());
    }

    #[test]
    fn stolz_cesaro_ratios() {
        let x: Vec<BigUint> = (0..60).map(|n| BigUint::from(3u32).pow(n)).collect();
        let r = cumulative_ratios(&x);
        assert!((r[59] - 1.5).abs() < 1e-12);
        assert!((r[10] - 1.5).abs() > (r[20] - 1.5).abs());
    }
}
