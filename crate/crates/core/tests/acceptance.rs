//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use numcarry::automata::{builtin, decide_cp, language_spectrum, CpVerdict, Dfa, RankedDfa};
use numcarry::carry::{
    empirical_cp, filtered_cp, h_probe_point, max_extension_rank, probe, SystemSource,
};
use numcarry::numeration::beta::DEFAULT_STATE_CAP;
use numcarry::numeration::{
    basis_from_beta, beta_builtin, beta_expand_one, Basis, ParryClass, RationalBase,
};
use numcarry::odometer::{cylinder_measure, fk_identity_check, j_table, layer_cp};
use numcarry::signature::{CpStream, Signature};
use numcarry::spectral::GrowthClass;
use numcarry::{Digit, Poly};

const N_LARGE: u64 = 1_000_000;
const TOL_INTEGER_BASE: f64 = 1e-3;
const TOL_FIBONACCI: f64 = 1e-2;
const TOL_RATIONAL: f64 = 0.05;
const TOL_K4_PROBE: f64 = 0.02;
const TOL_LAYER: f64 = 1e-2;
const H_PROBE_MAX: f64 = 1.9;
const H_FILTERED_MIN: f64 = 1.95;
const LIMIT_INTEGER_BASE: Duration = Duration::from_secs(10);
const LIMIT_FIBONACCI: Duration = Duration::from_secs(30);

/// Largest real root of a monic integer polynomial above 1, by bisection.
fn root_above_one(desc: &[f64]) -> f64 {
    let f = |x: f64| desc.iter().fold(0.0, |acc, c| acc * x + c);
    let (mut lo, mut hi) = (1.0, 1.0 + desc.iter().skip(1).map(|c| c.abs()).sum::<f64>());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Number of trailing positions that change from `u` to `v` once `u` is
/// padded with leading zeros.
fn changed_positions(u: &[Digit], v: &[Digit]) -> usize {
    let mut padded = vec![0; v.len().saturating_sub(u.len())];
    padded.extend_from_slice(u);
    let same = padded.iter().zip(v).take_while(|(a, b)| a == b).count();
    v.len() - same
}

/// Greedy expansion computed from scratch.
fn greedy_digits(g: &[u64], mut n: u64) -> Vec<Digit> {
    let k = g.iter().take_while(|&&x| x <= n).count();
    let mut out = Vec::new();
    for &gi in g[..k].iter().rev() {
        out.push((n / gi) as Digit);
        n %= gi;
    }
    out
}

/// Brute-force count of accepted words of each length.
fn brute_counts(dfa: &Dfa, lmax: usize) -> Vec<u64> {
    let a = dfa.alphabet().size() as u64;
    (0..=lmax)
        .map(|l| {
            (0..a.pow(l as u32))
                .filter(|&code| {
                    let mut w = vec![0 as Digit; l];
                    let mut c = code;
                    for slot in w.iter_mut().rev() {
                        *slot = (c % a) as Digit;
                        c /= a;
                    }
                    dfa.accepts(&w)
                })
                .count() as u64
        })
        .collect()
}

fn stream_mean(src: &SystemSource, n: u64) -> f64 {
    empirical_cp(src, n, Some(&[])).expect("stream").mean
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let ok = parts.iter().all(|p| p.ok);
    let detail = parts
        .iter()
        .filter(|p| ok || !p.ok)
        .map(|p| p.detail.as_str())
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { ok, detail }
}

fn criterion_1() -> Outcome {
    all([2u32, 3, 10]
        .iter()
        .map(|&p| {
            let src = SystemSource::dfa(&builtin(&format!("base({p})")).unwrap()).unwrap();
            let t = Instant::now();
            let mean = stream_mean(&src, N_LARGE);
            let dt = t.elapsed();
            let target = p as f64 / (p as f64 - 1.0);
            check(
                (mean - target).abs() < TOL_INTEGER_BASE && dt < LIMIT_INTEGER_BASE,
                format!("base {p}: mean {mean:.6} vs {target:.6} in {dt:.2?}"),
            )
        })
        .collect())
}

fn criterion_2() -> Outcome {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let target = phi / (phi - 1.0);
    let src = SystemSource::dfa(&builtin("fibonacci").unwrap()).unwrap();
    let t = Instant::now();
    let mean = stream_mean(&src, N_LARGE);
    let dt = t.elapsed();
    check(
        (mean - target).abs() < TOL_FIBONACCI && dt < LIMIT_FIBONACCI,
        format!("mean {mean:.6} vs {target:.6} in {dt:.2?}"),
    )
}

fn criterion_3() -> Outcome {
    let rb = RationalBase::new(3, 2).unwrap();
    let mean = stream_mean(&SystemSource::RationalBase(rb), N_LARGE);
    let sig = rb.signature();
    let from_tree: Vec<u32> = CpStream::new(&sig, 100_000).map(|s| s.cp).collect();
    let mismatches = (0..100_000u64)
        .filter(|&i| {
            let d = changed_positions(&rb.repr_digits(i), &rb.repr_digits(i + 1)) as u32;
            d != from_tree[i as usize] || d != rb.cp(i)
        })
        .count();
    all(vec![
        check(
            (mean - 3.0).abs() < TOL_RATIONAL,
            format!("mean {mean:.6} vs 3"),
        ),
        check(
            mismatches == 0,
            format!("{mismatches} stream mismatches below 1e5"),
        ),
    ])
}

fn criterion_4() -> Outcome {
    let spectrum = |name: &str| {
        let s = language_spectrum(&builtin(name).unwrap()).unwrap();
        s.into_iter().next().unwrap().2
    };
    let k1 = spectrum("K1");
    let k2 = spectrum("K2");
    let k3 = spectrum("K3");
    let k4 = spectrum("K4");
    let x2_4 = Poly::from_ints([-4, 0, 1]);
    let x_2 = Poly::from_ints([-2, 1]);
    let k3_poly = x_2.mul(&x_2).mul(&Poly::from_ints([2, 1]));
    let (verdict, _) = decide_cp(&builtin("K4").unwrap()).unwrap();
    let flagged = match &verdict {
        CpVerdict::Undetermined { offending, .. } => offending
            .iter()
            .any(|d| d.state == "p" && d.minimal_polynomial == x2_4 && !d.is_adev),
        CpVerdict::Exists { .. } => false,
    };
    let k3_counts = brute_counts(&builtin("K3").unwrap(), 3);
    all(vec![
        check(
            k1.minimal_polynomial == x2_4 && !k1.is_adev && k1.local_growth_rate.is_none(),
            format!("K1 {} adev={}", k1.minimal_polynomial, k1.is_adev),
        ),
        check(
            k2.minimal_polynomial == x_2 && k2.is_dev,
            format!("K2 {} dev={}", k2.minimal_polynomial, k2.is_dev),
        ),
        check(
            k3.minimal_polynomial == k3_poly
                && k3.is_adev
                && !k3.is_dev
                && k3.local_growth_rate == Some(2.0)
                && k3_counts == [1, 3, 6, 16],
            format!(
                "K3 {} adev={} dev={} counts {:?}",
                k3.minimal_polynomial, k3.is_adev, k3.is_dev, k3_counts
            ),
        ),
        check(
            k4.is_dev
                && k4.modulus_exact == Some(Poly::from_ints([2]).coeff(0))
                && k4.growth == GrowthClass::Exponential
                && flagged,
            format!(
                "K4 dev={} modulus {} quotient K1 flagged={flagged}",
                k4.is_dev, k4.modulus
            ),
        ),
    ])
}

fn criterion_5() -> Outcome {
    let h = SystemSource::HLanguage;
    let m = h_probe_point(15);
    let pm = probe(&h, &[BigUint::from(m)]).unwrap()[0].mean;
    let filtered = filtered_cp(&h, 15).unwrap().points[15].mean;

    let k4 = builtin("K4").unwrap();
    let ranked = RankedDfa::new(&k4).unwrap();
    let src = SystemSource::dfa(&k4).unwrap();
    let mut parts = vec![
        check(pm < H_PROBE_MAX, format!("H probe at M(15)={m}: {pm:.5}")),
        check(
            filtered > H_FILTERED_MIN,
            format!("H filtered at v(15): {filtered:.5}"),
        ),
    ];
    for (l, target) in [(20usize, 13.0 / 6.0), (21, 28.0 / 15.0)] {
        // Probe word: b followed by the largest word of K1 of length l - 1.
        let n = max_extension_rank(&ranked, &[1], l).unwrap() + 1u32;
        let k = (l as u32 - 2) / 2;
        let closed: u64 = if l % 2 == 0 {
            2 * (1u64 << (2 * k + 2)) - 2
        } else {
            5 * (1u64 << (2 * k + 2)) - 2
        };
        let mean = probe(&src, std::slice::from_ref(&n)).unwrap()[0].mean;
        parts.push(check(
            (mean - target).abs() < TOL_K4_PROBE && n.to_u64() == Some(closed),
            format!("K4 probe l={l} N={n}: {mean:.5} vs {target:.5}"),
        ));
    }
    all(parts)
}

fn criterion_6() -> Outcome {
    let run = |name: &str, bge: &str, class: ParryClass, dstar: &str, basis: &[u64]| {
        let p = beta_expand_one(&beta_builtin(name).unwrap(), DEFAULT_STATE_CAP).unwrap();
        let b = basis_from_beta(&p, 30).unwrap().basis;
        let got = &b.small_terms()[..basis.len()];
        let ok_bge = bge.is_empty() || p.bge_string() == bge;
        check(
            ok_bge && p.class() == class && p.quasi_greedy().format() == dstar && got == basis,
            format!(
                "{name}: bge {} {:?} d* {} basis {:?}",
                p.bge_string(),
                p.class(),
                p.quasi_greedy().format(),
                got
            ),
        )
    };
    let theta = {
        let p = beta_expand_one(&beta_builtin("theta").unwrap(), DEFAULT_STATE_CAP).unwrap();
        let e = basis_from_beta(&p, 40).unwrap().basis;
        let e = e.small_terms().to_vec();
        check(
            (2..e.len()).all(|n| e[n] + e[n - 2] == 3 * e[n - 1]),
            "theta basis obeys E(n+2) = 3E(n+1) - E(n)",
        )
    };
    all(vec![
        run("phi", "11", ParryClass::Simple, "(10)^w", &[1, 2, 3, 5, 8]),
        run(
            "theta",
            "",
            ParryClass::NonSimple,
            "2(1)^w",
            &[1, 3, 8, 21, 55],
        ),
        theta,
        run(
            "psi",
            "111",
            ParryClass::Simple,
            "(110)^w",
            &[1, 2, 4, 7, 13, 24],
        ),
    ])
}

fn criterion_7() -> Outcome {
    let psi = root_above_one(&[1.0, -1.0, -1.0, -1.0]);
    let target = psi / (psi - 1.0);
    let t = Basis::tribonacci();
    let report = layer_cp(&t, 30, N_LARGE, None).unwrap();
    let j = j_table(&t, 30).unwrap();
    let j_ok = j[1] == 0 && j[2] == 1 && (3..=30).all(|k| j[k] == k - 3);
    all(vec![
        check(
            (report.estimate - target).abs() < TOL_LAYER,
            format!("layer estimate {:.6} vs {target:.6}", report.estimate),
        ),
        check(j_ok, "J(1)=0, J(2)=1, J(k)=k-3"),
    ])
}

fn criterion_8() -> Outcome {
    let mut parts = Vec::new();
    for name in [
        "base(2)",
        "base(3)",
        "base(10)",
        "fibonacci",
        "fina",
        "K1",
        "K2",
        "K3",
        "K4",
    ] {
        let dfa = builtin(name).unwrap();
        let r = RankedDfa::new(&dfa).unwrap();
        let mut total = 0u64;
        let mut bad = 0usize;
        let mut cps = r.cp_stream(10_000).unwrap();
        for (n, step) in cps.by_ref().enumerate() {
            if r.fast_scp_u64(n as u64).unwrap() != BigUint::from(total) {
                bad += 1;
            }
            total += step.cp as u64;
        }
        if r.fast_scp_u64(10_000).unwrap() != BigUint::from(total) {
            bad += 1;
        }
        let rt_bad = (0..100_000u64)
            .filter(|&n| {
                r.value_of(r.repr_of_u64(n).unwrap().digits()).unwrap() != BigUint::from(n)
            })
            .count();
        parts.push(check(
            bad == 0 && rt_bad == 0,
            format!("{name}: {bad} scp mismatches, {rt_bad} round-trip failures"),
        ));
    }
    for (name, b) in [
        ("fibonacci", Basis::fibonacci()),
        ("fina", Basis::fina()),
        ("tribonacci", Basis::tribonacci()),
    ] {
        let g = b.small_terms();
        let bad = (0..=100_000u64)
            .filter(|&n| {
                let d = changed_positions(&greedy_digits(g, n), &greedy_digits(g, n + 1));
                b.cp_u64(n).unwrap() as usize != d
            })
            .count();
        parts.push(check(
            bad == 0,
            format!("{name} greedy: {bad} cp mismatches"),
        ));
    }
    all(parts)
}

/// Streams per-level carry sums while `v(ℓ)` stays within reach.
fn level_sums_ok(src: &SystemSource, lmax: usize, budget: u64) -> (bool, usize) {
    let lc = src.levels(lmax).unwrap();
    let top = (0..=lmax)
        .take_while(|&l| lc.v[l].to_u64().is_some_and(|v| v <= budget))
        .last()
        .unwrap_or(0);
    let n = lc.v[top].to_u64().unwrap();
    let mut sums = vec![0u64; top + 1];
    src.for_each_cp(n, |s| sums[s.level as usize] += s.cp as u64)
        .unwrap();
    let ok = (0..=top).all(|l| BigUint::from(sums[l]) == lc.v[l]);
    (ok, top)
}

fn criterion_9() -> Outcome {
    const LEVEL_BUDGET: u64 = 20_000_000;
    let mut parts = Vec::new();
    let mut sources: Vec<(String, SystemSource)> = [
        "base(2)",
        "base(3)",
        "base(10)",
        "fibonacci",
        "fina",
        "K1",
        "K2",
        "K3",
        "K4",
    ]
    .iter()
    .map(|n| {
        (
            n.to_string(),
            SystemSource::dfa(&builtin(n).unwrap()).unwrap(),
        )
    })
    .collect();
    sources.push(("H".into(), SystemSource::HLanguage));
    sources.push((
        "3/2".into(),
        SystemSource::RationalBase(RationalBase::new(3, 2).unwrap()),
    ));
    sources.push((
        "signature 3 (2 1)".into(),
        SystemSource::signature(Signature::new(vec![3], vec![2, 1]).unwrap()).unwrap(),
    ));
    for (name, b) in [
        ("fib", Basis::fibonacci()),
        ("fina", Basis::fina()),
        ("trib", Basis::tribonacci()),
    ] {
        sources.push((format!("greedy {name}"), SystemSource::greedy(b)));
    }
    for (name, src) in &sources {
        let (ok, top) = level_sums_ok(src, 15, LEVEL_BUDGET);
        parts.push(check(
            ok,
            format!("{name}: level sums equal v(l) for l <= {top}"),
        ));
    }

    for (name, b) in [
        ("fib", Basis::fibonacci()),
        ("fina", Basis::fina()),
        ("trib", Basis::tribonacci()),
    ] {
        let g = b.small_terms().to_vec();
        let mut bad = 0;
        for k in 0..=8usize {
            let upper = g[k + 1];
            let step = (upper / 200).max(1);
            for n in (1..upper).step_by(step as usize).chain([upper - 1]) {
                if !fk_identity_check(&b, k, n).unwrap().holds {
                    bad += 1;
                }
            }
        }
        parts.push(check(
            bad == 0,
            format!("{name}: {bad} identity failures for k <= 8"),
        ));

        let mut worst = f64::NEG_INFINITY;
        for (l, &gl_value) in g.iter().enumerate().take(13).skip(1) {
            let gl = b.g_max(l).unwrap();
            let q = cylinder_measure(&b, &gl, N_LARGE).unwrap();
            worst = worst.max(q.measure - (1.0 / gl_value as f64 + 1.0 / N_LARGE as f64));
        }
        parts.push(check(
            worst <= 0.0,
            format!("{name}: cylinder bound slack {worst:.3e} for l <= 12"),
        ));
    }
    all(parts)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("integer bases converge to p/(p-1)", criterion_1),
        ("Fibonacci mean", criterion_2),
        ("rational base 3/2", criterion_3),
        ("spectral fixtures K1..K4", criterion_4),
        ("non-existence probes H and K4", criterion_5),
        ("beta pipeline", criterion_6),
        ("Tribonacci layer formula", criterion_7),
        ("oracle equivalence", criterion_8),
        ("identity suites", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = f();
        let tag = if out.ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {tag} | {name} | {} | {:.2?}",
            i + 1,
            out.detail,
            t.elapsed()
        );
        if !out.ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
