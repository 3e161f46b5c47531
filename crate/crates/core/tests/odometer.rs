use numcarry::numeration::Basis;
use numcarry::odometer::{cylinder_measure, fk_identity_check, layer_counts, layer_cp, layers_of};
use numcarry::Digit;

const N: u64 = 1_000_000;

fn theta() -> f64 {
    (3.0 + 5f64.sqrt()) / 2.0
}

#[test]
fn fina_layer_formula() {
    let t = theta();
    let r = layer_cp(&Basis::fina(), 30, N, Some(1e-6)).unwrap();
    assert!((r.estimate - t / (t - 1.0)).abs() < 1e-2, "{}", r.estimate);
    assert!(r.series_bounded);
}

#[test]
fn tail_bound_tolerance_is_enforced() {
    assert!(layer_cp(&Basis::fibonacci(), 3, 1000, Some(1e-6)).is_err());
}

#[test]
fn fina_cylinders_of_dstar_prefixes() {
    // d* = 2 1 1 1 ...
    let t = theta();
    let e = Basis::fina();
    for k in 1..=5 {
        let mut w: Vec<Digit> = vec![2];
        w.extend(std::iter::repeat_n(1, k - 1));
        let q = cylinder_measure(&e, &w, N).unwrap();
        let expect = (t - 1.0) * t.powi(-(k as i32) - 1);
        assert!((q.measure - expect).abs() < 1e-2, "k = {k}: {}", q.measure);
    }
}

#[test]
fn tribonacci_first_cylinder() {
    let psi = 1.839_286_755_214_161;
    let q = cylinder_measure(&Basis::tribonacci(), &[1], N).unwrap();
    assert!(
        (q.measure - (1.0 - 1.0 / psi)).abs() < 1e-2,
        "{}",
        q.measure
    );
}

#[test]
fn layer_counts_match_string_scans() {
    for b in [Basis::fibonacci(), Basis::fina(), Basis::tribonacci()] {
        let counts = layer_counts(&b, 8, 20_000).unwrap();
        for (k, &count) in counts.iter().enumerate().skip(1) {
            let g = b.g_max(k).unwrap();
            assert_eq!(cylinder_measure(&b, &g, 20_000).unwrap().count, count);
        }
    }
}

#[test]
fn carries_partition_into_layers() {
    // cp(i) = k + 1 exactly when i lies in cyl(g_k) and in no deeper cyl(g_m).
    for b in [Basis::fibonacci(), Basis::fina(), Basis::tribonacci()] {
        for i in 0..10_000u64 {
            let d = b.repr_digits_u64(i).unwrap();
            let deepest = layers_of(&b, &d).into_iter().max().unwrap_or(0);
            let padded_match = (1..=d.len() + 1).rev().find(|&k| {
                let g = b.g_max(k).unwrap();
                let mut p = vec![0; k.saturating_sub(d.len())];
                p.extend_from_slice(&d);
                p.ends_with(&g)
            });
            assert_eq!(deepest, padded_match.unwrap_or(0));
            assert_eq!(b.cp_u64(i).unwrap() as usize, deepest + 1);
        }
    }
}

#[test]
fn fk_identity_exhaustive_small() {
    let t = Basis::tribonacci();
    assert!(
        fk_identity_check(&t, 4, t.small_terms()[5] - 1)
            .unwrap()
            .holds
    );
    let f = Basis::fibonacci();
    for k in 0..=6 {
        for n in 1..f.small_terms()[k + 1] {
            assert!(
                fk_identity_check(&f, k, n).unwrap().holds,
                "k = {k}, N = {n}"
            );
        }
    }
}
