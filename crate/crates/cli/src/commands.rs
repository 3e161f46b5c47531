use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use numcarry::automata::{decide_cp, language_spectrum, CpVerdict, QuotientDiagnostic};
use numcarry::carry::{
    empirical_cp, filtered_cp, h_probe_point, local_growth, probe, SystemSource, Theory, Trend,
};
use numcarry::numeration::beta::DEFAULT_STATE_CAP;
use numcarry::numeration::{basis_from_beta, ParryClass};
use numcarry::odometer::{
    cylinder_measure, layer_cp, odometer_step, DEFAULT_STABLE_RUNS, DEFAULT_WINDOW,
};
use numcarry::recurrence::LinearRecurrence;
use numcarry::spectral::SpectralReport;
use numcarry::Word;

use crate::output::{emit, opt, Meta, OutputArgs, Table};
use crate::source::SourceArgs;

/// Probes whose mean stays this far from the filtered mean at the last
/// level are reported as non-convergent.
const PROBE_GAP: f64 = 0.05;

/// How a successful run ended; maps to exit codes 0 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Undetermined,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spectral report and existence verdict for an automaton.
    Analyze {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Running mean of the carry over the first N words.
    Estimate(EstimateArgs),
    /// Means along a chosen sequence of indices.
    Probe(ProbeArgs),
    /// Means at the level boundaries v(l).
    Filtered(LevelArgs),
    /// Ratios u(l+1)/u(l) and the local growth rate.
    Growth(LevelArgs),
    /// Layer table of a greedy system.
    Measures(MeasuresArgs),
    /// Expansion of 1, Parry class and canonical basis of β.
    Beta(BetaArgs),
    /// Successor of a left-truncated sequence.
    Odometer(OdometerArgs),
    /// Frequency of a cylinder along the orbit of 0.
    Cylinder(CylinderArgs),
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Comma-separated checkpoints; defaults to powers of two and v(l).
    #[arg(long, value_delimiter = ',')]
    checkpoints: Option<Vec<u64>>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sequence {
    /// 3·2^l - 1, the minima of the language H.
    #[value(name = "M")]
    M,
    /// The level boundaries v(l).
    V,
    /// Powers of two.
    Pow2,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value_t = Sequence::Pow2, ignore_case = true)]
    sequence: Sequence,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    lmax: u64,
    /// Explicit comma-separated indices; overrides --sequence.
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<BigUint>>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct LevelArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    lmax: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct MeasuresArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Fail when the tail bound M_K exceeds this value.
    #[arg(long)]
    tolerance: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct BetaArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Number of basis terms to list.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    lmax: u64,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    state_cap: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct OdometerArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Truncation, most significant digit first.
    #[arg(long)]
    digits: String,
    #[arg(long, default_value_t = DEFAULT_WINDOW as u64, value_parser = clap::value_parser!(u64).range(1..))]
    window: u64,
    #[arg(long, default_value_t = DEFAULT_STABLE_RUNS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CylinderArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    word: String,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[command(flatten)]
    output: OutputArgs,
}

pub fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Analyze { source, output } => analyze(&source, &output),
        Command::Estimate(a) => estimate(&a),
        Command::Probe(a) => probe_cmd(&a),
        Command::Filtered(a) => filtered(&a),
        Command::Growth(a) => growth(&a),
        Command::Measures(a) => measures(&a),
        Command::Beta(a) => beta(&a),
        Command::Odometer(a) => odometer(&a),
        Command::Cylinder(a) => cylinder(&a),
    }
}

fn usize_of(x: u64) -> Result<usize> {
    usize::try_from(x).context("value does not fit in memory sizes")
}

#[derive(Serialize)]
struct StateSpectrum {
    state: String,
    recurrence: LinearRecurrence,
    report: SpectralReport,
}

#[derive(Serialize)]
struct AnalyzeData {
    verdict: CpVerdict,
    quotients: Vec<QuotientDiagnostic>,
    spectra: Vec<StateSpectrum>,
}

fn analyze(source: &SourceArgs, output: &OutputArgs) -> Result<Outcome> {
    let dfa = source
        .automaton()?
        .context("analyze needs an automaton: --builtin, --base, --dfa, --beta or --beta-file")?;
    let (verdict, quotients) = decide_cp(&dfa)?;
    let spectra = language_spectrum(&dfa)?
        .into_iter()
        .map(|(state, recurrence, report)| StateSpectrum {
            state,
            recurrence,
            report,
        })
        .collect();
    let mut table = Table::new(&[
        "state",
        "modulus",
        "same_modulus",
        "is_adev",
        "minimal_polynomial",
    ]);
    for q in &quotients {
        table.row(vec![
            q.state.clone(),
            q.modulus.to_string(),
            q.same_modulus.to_string(),
            q.is_adev.to_string(),
            q.minimal_polynomial.to_string(),
        ]);
    }
    let outcome = if verdict.exists() {
        Outcome::Success
    } else {
        Outcome::Undetermined
    };
    let meta = Meta::new("analyze", source.describe()).param("verdict", verdict_name(&verdict));
    emit(
        output,
        &meta,
        &AnalyzeData {
            verdict,
            quotients,
            spectra,
        },
        &table,
    )?;
    Ok(outcome)
}

fn verdict_name(v: &CpVerdict) -> &'static str {
    match v {
        CpVerdict::Exists { .. } => "exists",
        CpVerdict::Undetermined { .. } => "undetermined",
    }
}

fn estimate(a: &EstimateArgs) -> Result<Outcome> {
    let src = a.source.resolve()?;
    let rep = empirical_cp(&src, a.n, a.checkpoints.as_deref())?;
    let mut table = Table::new(&["checkpoint", "scp", "mean", "mean_exact"]);
    for c in &rep.checkpoints {
        table.row(vec![
            c.n.to_string(),
            c.scp.to_string(),
            c.mean.to_string(),
            c.mean_exact.clone(),
        ]);
    }
    let meta = Meta::new("estimate", a.source.describe())
        .param("n", a.n)
        .param("theory", opt(&rep.theory.as_ref().map(|t| t.value)));
    emit(&a.output, &meta, &rep, &table)?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct ProbeRow {
    level: Option<u64>,
    n: String,
    scp: String,
    mean: f64,
    mean_exact: String,
    /// Mean at `v(level)` for comparison.
    filtered_mean: Option<f64>,
    gap: Option<f64>,
}

#[derive(Serialize)]
struct ProbeData {
    rows: Vec<ProbeRow>,
    /// The probe means stay away from the filtered means.
    non_convergent: bool,
}

fn probe_points(src: &SystemSource, seq: Sequence, lmax: u64) -> Result<Vec<BigUint>> {
    let levels = 1..=lmax;
    Ok(match seq {
        Sequence::M => {
            if !matches!(src, SystemSource::HLanguage) {
                bail!("--sequence M is defined for the language H; use V, pow2 or --points");
            }
            if lmax > 60 {
                bail!("--lmax above 60 overflows 3·2^l - 1");
            }
            levels.map(|l| h_probe_point(l as u32).into()).collect()
        }
        Sequence::Pow2 => levels.map(|l| BigUint::from(1u32) << l).collect(),
        Sequence::V => {
            let lc = src.levels(usize_of(lmax)?)?;
            lc.v[1..].to_vec()
        }
    })
}

fn probe_cmd(a: &ProbeArgs) -> Result<Outcome> {
    let src = &a.source.resolve()?;
    let (points, levels) = match &a.points {
        Some(p) => (p.clone(), None),
        None => (probe_points(src, a.sequence, a.lmax)?, Some(a.lmax)),
    };
    let probes = probe(src, &points)?;
    let filtered = match levels {
        Some(l) => Some(filtered_cp(src, usize_of(l)?)?),
        None => None,
    };
    let rows: Vec<ProbeRow> = probes
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let level = levels.map(|_| i as u64 + 1);
            let fm = filtered.as_ref().map(|f| f.points[i + 1].mean);
            ProbeRow {
                level,
                gap: fm.map(|m| p.mean - m),
                filtered_mean: fm,
                n: p.n,
                scp: p.scp,
                mean: p.mean,
                mean_exact: p.mean_exact,
            }
        })
        .collect();
    let non_convergent = rows
        .last()
        .and_then(|r| r.gap)
        .is_some_and(|g| g.abs() > PROBE_GAP);
    let mut table = Table::new(&[
        "level",
        "n",
        "scp",
        "mean",
        "mean_exact",
        "filtered_mean",
        "gap",
    ]);
    for r in &rows {
        table.row(vec![
            opt(&r.level),
            r.n.clone(),
            r.scp.clone(),
            r.mean.to_string(),
            r.mean_exact.clone(),
            opt(&r.filtered_mean),
            opt(&r.gap),
        ]);
    }
    let seq = match (&a.points, a.sequence) {
        (Some(_), _) => "points",
        (None, Sequence::M) => "M",
        (None, Sequence::V) => "v",
        (None, Sequence::Pow2) => "pow2",
    };
    let meta = Meta::new("probe", a.source.describe())
        .param("sequence", seq)
        .param("non_convergent", non_convergent);
    emit(
        &a.output,
        &meta,
        &ProbeData {
            rows,
            non_convergent,
        },
        &table,
    )?;
    Ok(if non_convergent {
        Outcome::Undetermined
    } else {
        Outcome::Success
    })
}

fn filtered(a: &LevelArgs) -> Result<Outcome> {
    let src = a.source.resolve()?;
    let rep = filtered_cp(&src, usize_of(a.lmax)?)?;
    let mut table = Table::new(&["level", "v", "sum", "mean", "mean_exact"]);
    for p in &rep.points {
        table.row(vec![
            p.level.to_string(),
            p.v.clone(),
            p.sum.clone(),
            p.mean.to_string(),
            p.mean_exact.clone(),
        ]);
    }
    let meta = Meta::new("filtered", a.source.describe())
        .param("lmax", a.lmax)
        .param("trend", format!("{:?}", rep.trend).to_lowercase());
    emit(&a.output, &meta, &rep, &table)?;
    Ok(if rep.trend == Trend::Converging {
        Outcome::Success
    } else {
        Outcome::Undetermined
    })
}

fn growth(a: &LevelArgs) -> Result<Outcome> {
    let src = a.source.resolve()?;
    let rep = local_growth(&src, usize_of(a.lmax)?)?;
    let mut table = Table::new(&["level", "ratio"]);
    for (l, x) in rep.ratios.iter().enumerate() {
        table.row(vec![l.to_string(), x.to_string()]);
    }
    let meta = Meta::new("growth", a.source.describe()).param("lmax", a.lmax);
    emit(&a.output, &meta, &rep, &table)?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct MeasuresData {
    #[serde(flatten)]
    report: numcarry::odometer::LayerReport,
    theory: Option<Theory>,
}

fn measures(a: &MeasuresArgs) -> Result<Outcome> {
    let basis = a.source.greedy_basis()?;
    let theory = match a.source.beta_value()? {
        Some(b) => SystemSource::beta(basis.clone(), b).theory()?,
        None => SystemSource::greedy(basis.clone()).theory()?,
    };
    let report = layer_cp(&basis, usize_of(a.k)?, a.n, a.tolerance)?;
    let mut table = Table::new(&[
        "k",
        "g_k",
        "J",
        "weight",
        "count",
        "measure",
        "cumulative",
        "tail_bound",
    ]);
    for r in &report.rows {
        table.row(vec![
            r.k.to_string(),
            r.g_k.clone(),
            r.j.to_string(),
            r.weight.to_string(),
            r.count.to_string(),
            r.measure.to_string(),
            r.cumulative.to_string(),
            r.tail_bound.to_string(),
        ]);
    }
    let meta = Meta::new("measures", a.source.describe())
        .param("k", a.k)
        .param("n", a.n)
        .param("estimate", report.estimate)
        .param("theory", opt(&theory.as_ref().map(|t| t.value)));
    emit(&a.output, &meta, &MeasuresData { report, theory }, &table)?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct BetaValue {
    polynomial: String,
    interval: [String; 2],
    decimal: f64,
}

#[derive(Serialize)]
struct BetaData {
    beta: BetaValue,
    class: ParryClass,
    expansion_of_one: String,
    quasi_greedy: String,
    basis: Vec<String>,
    k_hat: Option<f64>,
    carry: Option<Theory>,
    odometer: &'static str,
    warning: Option<String>,
}

fn beta(a: &BetaArgs) -> Result<Outcome> {
    let profile = a
        .source
        .beta_profile(usize_of(a.state_cap)?)?
        .context("the beta command needs --beta or --beta-file")?;
    let known = profile.class() != ParryClass::UnknownWithinBound;
    let built = if known {
        Some(basis_from_beta(&profile, usize_of(a.lmax)?)?)
    } else {
        None
    };
    let b = profile.beta();
    let (lo, hi) = b.interval();
    let carry = match &built {
        Some(bb) => SystemSource::beta(bb.basis.clone(), b.clone()).theory()?,
        None => None,
    };
    let data = BetaData {
        beta: BetaValue {
            polynomial: b.poly().to_string(),
            interval: [lo.to_string(), hi.to_string()],
            decimal: b.to_f64(),
        },
        class: profile.class(),
        expansion_of_one: profile.bge_string(),
        quasi_greedy: profile.quasi_greedy().format(),
        basis: built
            .as_ref()
            .map(|bb| bb.basis.terms().iter().map(ToString::to_string).collect())
            .unwrap_or_default(),
        k_hat: built.as_ref().map(|bb| bb.k_hat),
        carry,
        odometer: match profile.class() {
            ParryClass::Simple => "simple Parry number: the odometer is continuous",
            ParryClass::NonSimple => "non-simple Parry number: the odometer is not continuous",
            ParryClass::UnknownWithinBound => "Parry class unknown within the state cap",
        },
        warning: (!known).then(|| "expansion of 1 did not close within the state cap".into()),
    };
    let mut table = Table::new(&["l", "G_l"]);
    for (l, g) in data.basis.iter().enumerate() {
        table.row(vec![l.to_string(), g.clone()]);
    }
    let meta = Meta::new("beta", a.source.describe())
        .param(
            "class",
            serde_json::to_value(profile.class())?
                .as_str()
                .unwrap_or(""),
        )
        .param("expansion_of_one", &data.expansion_of_one);
    emit(&a.output, &meta, &data, &table)?;
    Ok(if known {
        Outcome::Success
    } else {
        Outcome::Undetermined
    })
}

fn odometer(a: &OdometerArgs) -> Result<Outcome> {
    let basis = a.source.greedy_basis()?;
    let digits = Word::parse(basis.alphabet(), &a.digits)?.into_digits();
    let step = odometer_step(&basis, &digits, usize_of(a.window)?, usize_of(a.runs)?)?;
    let mut table = Table::new(&["input", "successor", "stabilized"]);
    table.row(vec![
        a.digits.clone(),
        step.digits.clone(),
        step.stabilized.to_string(),
    ]);
    let meta = Meta::new("odometer", a.source.describe())
        .param("window", a.window)
        .param("runs", a.runs);
    emit(&a.output, &meta, &step, &table)?;
    Ok(if step.stabilized {
        Outcome::Success
    } else {
        Outcome::Undetermined
    })
}

fn cylinder(a: &CylinderArgs) -> Result<Outcome> {
    let basis = a.source.greedy_basis()?;
    let w = Word::parse(basis.alphabet(), &a.word)?.into_digits();
    let q = cylinder_measure(&basis, &w, a.n)?;
    let mut table = Table::new(&["word", "n", "count", "measure"]);
    table.row(vec![
        q.word.clone(),
        q.n.to_string(),
        q.count.to_string(),
        q.measure.to_string(),
    ]);
    let meta = Meta::new("cylinder", a.source.describe()).param("n", a.n);
    emit(&a.output, &meta, &q, &table)?;
    Ok(Outcome::Success)
}
