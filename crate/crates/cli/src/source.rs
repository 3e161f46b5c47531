//! Turning the source flags into a numeration system.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;

use numcarry::automata::{builtin, Dfa};
use numcarry::carry::SystemSource;
use numcarry::numeration::beta::DEFAULT_STATE_CAP;
use numcarry::numeration::{
    basis_from_beta, beta_builtin, beta_expand_one, AlgebraicReal, Basis, BetaProfile, RationalBase,
};
use numcarry::signature::Signature;

/// Exactly one numeration system.
#[derive(Args, Clone, Debug)]
#[group(id = "source", required = true, multiple = false)]
pub struct SourceArgs {
    /// Named system: an automaton (base(p), fibonacci, fina, K1..K4) or H.
    #[arg(long, visible_alias = "builtin-lang", value_name = "NAME")]
    pub builtin: Option<String>,
    /// Automaton file (`states`, `initial`, `finals`, `trans` lines).
    #[arg(long, value_name = "FILE")]
    pub dfa: Option<PathBuf>,
    /// Signature file (`prefix:` and `period:` lines).
    #[arg(long, value_name = "FILE")]
    pub signature: Option<PathBuf>,
    /// Integer base.
    #[arg(long, value_name = "P", value_parser = clap::value_parser!(u32).range(2..))]
    pub base: Option<u32>,
    /// Rational base p/q.
    #[arg(long, value_name = "P/Q")]
    pub rational: Option<String>,
    /// Greedy basis file, one term per line.
    #[arg(long, value_name = "FILE")]
    pub basis: Option<PathBuf>,
    /// Named greedy system: fibonacci, fina or tribonacci.
    #[arg(long, value_name = "NAME")]
    pub gns: Option<String>,
    /// β as polynomial coefficients, highest degree first, or a name.
    #[arg(long, value_name = "COEFFS|NAME", allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// β as a `poly:` / `interval:` file.
    #[arg(long, value_name = "FILE")]
    pub beta_file: Option<PathBuf>,
}

pub const SOURCE_KEYS: &[&str] = &[
    "builtin",
    "builtin-lang",
    "dfa",
    "signature",
    "base",
    "rational",
    "basis",
    "gns",
    "beta",
    "beta-file",
];

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_file<T>(path: &Path, f: impl FnOnce(&str) -> numcarry::Result<T>) -> Result<T> {
    let text = read(path)?;
    f(&text).with_context(|| format!("in {}", path.display()))
}

fn parse_beta(s: &str) -> Result<AlgebraicReal> {
    let tokens: Vec<&str> = s.split_whitespace().collect();
    if tokens.len() >= 2 {
        return Ok(AlgebraicReal::parse(&format!("poly: {s}"))?);
    }
    Ok(beta_builtin(s)?)
}

pub fn parse_rational(s: &str) -> Result<RationalBase> {
    Ok(RationalBase::parse(s)?)
}

/// Terms needed so that the basis covers indices up to `2^64`.
fn beta_basis_len(beta: &AlgebraicReal) -> usize {
    (64.0 / beta.to_f64().log2()).ceil() as usize + 2
}

impl SourceArgs {
    /// The source as given on the command line, for report metadata.
    pub fn describe(&self) -> String {
        let path = |p: &PathBuf| p.display().to_string();
        let pairs = [
            ("builtin", self.builtin.clone()),
            ("dfa", self.dfa.as_ref().map(path)),
            ("signature", self.signature.as_ref().map(path)),
            ("base", self.base.map(|p| p.to_string())),
            ("rational", self.rational.clone()),
            ("basis", self.basis.as_ref().map(path)),
            ("gns", self.gns.clone()),
            ("beta", self.beta.clone()),
            ("beta-file", self.beta_file.as_ref().map(path)),
        ];
        pairs
            .into_iter()
            .find_map(|(k, v)| v.map(|v| format!("{k} {v}")))
            .unwrap_or_default()
    }

    pub fn beta_value(&self) -> Result<Option<AlgebraicReal>> {
        if let Some(s) = &self.beta {
            return parse_beta(s).map(Some);
        }
        if let Some(p) = &self.beta_file {
            return parse_file(p, AlgebraicReal::parse).map(Some);
        }
        Ok(None)
    }

    pub fn beta_profile(&self, state_cap: usize) -> Result<Option<BetaProfile>> {
        match self.beta_value()? {
            Some(b) => Ok(Some(beta_expand_one(&b, state_cap)?)),
            None => Ok(None),
        }
    }

    /// The automaton behind the source, if it has one.
    pub fn automaton(&self) -> Result<Option<Dfa>> {
        if let Some(name) = &self.builtin {
            if name.eq_ignore_ascii_case("h") {
                return Ok(None);
            }
            return Ok(Some(builtin(name)?));
        }
        if let Some(p) = self.base {
            return Ok(Some(builtin(&format!("base({p})"))?));
        }
        if let Some(path) = &self.dfa {
            return parse_file(path, Dfa::parse).map(Some);
        }
        if let Some(p) = self.beta_profile(DEFAULT_STATE_CAP)? {
            return Ok(Some(p.parry_automaton()?));
        }
        Ok(None)
    }

    pub fn greedy_basis(&self) -> Result<Basis> {
        if let Some(name) = &self.gns {
            return Ok(match name.to_ascii_lowercase().as_str() {
                "fibonacci" | "fib" => Basis::fibonacci(),
                "fina" => Basis::fina(),
                "tribonacci" | "trib" => Basis::tribonacci(),
                _ => bail!("unknown greedy system `{name}`"),
            });
        }
        if let Some(path) = &self.basis {
            return parse_file(path, Basis::parse);
        }
        if let Some(p) = self.beta_profile(DEFAULT_STATE_CAP)? {
            let b = basis_from_beta(&p, beta_basis_len(p.beta()))?;
            return Ok(b.basis);
        }
        bail!("this command needs a greedy basis: --gns, --basis, --beta or --beta-file")
    }

    pub fn resolve(&self) -> Result<SystemSource> {
        if let Some(profile) = self.beta_profile(DEFAULT_STATE_CAP)? {
            let b = basis_from_beta(&profile, beta_basis_len(profile.beta()))?;
            return Ok(SystemSource::beta(b.basis, profile.beta().clone()));
        }
        if self
            .builtin
            .as_deref()
            .is_some_and(|n| n.eq_ignore_ascii_case("h"))
        {
            return Ok(SystemSource::HLanguage);
        }
        if let Some(dfa) = self.automaton()? {
            return Ok(SystemSource::dfa(&dfa)?);
        }
        if let Some(path) = &self.signature {
            let sig = parse_file(path, Signature::parse)?;
            return Ok(SystemSource::signature(sig)?);
        }
        if let Some(r) = &self.rational {
            return Ok(SystemSource::RationalBase(parse_rational(r)?));
        }
        Ok(SystemSource::greedy(self.greedy_basis()?))
    }
}
