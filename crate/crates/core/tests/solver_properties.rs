use std::f64::consts::TAU;

use polyelliptic::atlas::{sector_partition, SectorId, SectorTable};
use polyelliptic::polygon::build_polygon;
use polyelliptic::solver::angular::weighted_dot;
use polyelliptic::solver::mathieu::{modified_mathieu, periodic_spectrum};
use polyelliptic::solver::radial::radial_defect;
use polyelliptic::solver::{
    angular_spectrum, angular_spectrum_shifted, helmholtz_residual, radial_solution, RadialBc, ResidualSamples,
};

fn table(f: &[f64]) -> SectorTable {
    sector_partition(&build_polygon(f).unwrap()).unwrap()
}

#[test]
fn mathieu_limit_of_angular_spectrum() {
    let t = table(&[1.0, 1.0, 1e-6]);
    let f = t.wedge_frames[0].f;
    for q in [0.5f64, 1.0, 5.0] {
        let k = 2.0 * q.sqrt() / f;
        let got = angular_spectrum(&t, k, 5, 1440).unwrap();
        let want = periodic_spectrum(q, 5);
        for (g, w) in got.iter().zip(&want) {
            // relative to max(|a|, 1): b1 crosses zero near q = 0.9
            let rel = (g.lambda - w).abs() / w.abs().max(1.0);
            assert!(rel < 1e-5, "q {q} n {}: {} vs {w} ({rel:e})", g.index, g.lambda);
        }
    }
}

#[test]
fn equilateral_rotation_invariance() {
    let t = table(&[1.3; 3]);
    let a = angular_spectrum(&t, 1.0, 10, 720).unwrap();
    let b = angular_spectrum_shifted(&t, 1.0, 10, 720, TAU / 3.0).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.lambda - y.lambda).abs() < 1e-8 * x.lambda.abs().max(1.0), "{} {}", x.lambda, y.lambda);
    }
    // singles are 2pi/3-periodic; the rest pair up
    let n = a[0].theta.len();
    assert_eq!(n % 3, 0);
    let mut i = 0;
    let mut pairs = 0;
    while i < a.len() - 1 {
        let paired = i + 1 < a.len() && (a[i + 1].lambda - a[i].lambda).abs() < 1e-8 * a[i].lambda.abs().max(1.0);
        if paired {
            pairs += 1;
            i += 2;
        } else {
            let psi = &a[i].psi;
            let d = (0..n).map(|j| (psi[j] - psi[(j + n / 3) % n]).abs()).fold(0.0, f64::max);
            assert!(d < 1e-6, "mode {i} neither paired nor symmetric: {d:e}");
            i += 1;
        }
    }
    assert!(pairs >= 2);
}

#[test]
fn orthogonality_and_periodicity() {
    for f in [vec![1.39, 2.595, 2.44], vec![1.0; 4]] {
        let t = table(&f);
        let a = angular_spectrum(&t, 1.0, 6, 720).unwrap();
        for i in 0..a.len() {
            for j in 0..i {
                assert!(weighted_dot(&t, &a[i].theta, &a[i].psi, &a[j].psi).abs() < 1e-8);
            }
            assert!(a[i].lambda.is_finite() && (i == 0 || a[i].lambda >= a[i - 1].lambda));
        }
    }
}

#[test]
fn radial_matches_modified_mathieu() {
    let t = table(&[1.0, 1.0, 1e-6]);
    let w = t.wedge_frames[0];
    let co_min = t.local_ae_from_common(SectorId::Wedge(0), t.ae_c_from_mu_c(0.0).unwrap()).unwrap();
    let tau = |mu: f64| {
        let ae = t.local_ae_from_common(SectorId::Wedge(0), t.ae_c_from_mu_c(mu).unwrap()).unwrap();
        (ae / w.f).acosh()
    };
    let tau0 = (co_min / w.f).acosh();
    for q in [0.5f64, 1.0, 5.0] {
        let k = 2.0 * q.sqrt() / w.f;
        let a = periodic_spectrum(q, 3)[2];
        for (bc, start) in [(RadialBc::UnitStart, [1.0, 0.0]), (RadialBc::Dirichlet, [0.0, 1.0])] {
            let sol = radial_solution(&t, SectorId::Wedge(0), k, a, bc, 3.0, 6000).unwrap();
            let ts: Vec<f64> = sol.mu[1..].iter().map(|m| tau(*m)).collect();
            let y = modified_mathieu(a, q, tau0, start, &ts, 8);
            let scale = y.iter().fold(1e-300f64, |m, v| m.max(v[0].abs()));
            let worst = y.iter().zip(&sol.psi[1..]).map(|(o, p)| (o[0] - p).abs()).fold(0.0, f64::max) / scale;
            assert!(worst < 1e-5, "q {q} {bc:?}: {worst:e}");
        }
    }
}

#[test]
fn radial_step_halving() {
    let t = table(&[1.39, 2.595, 2.44]);
    for id in [SectorId::Edge(1), SectorId::Wedge(0)] {
        let d: Vec<f64> = [400, 800]
            .iter()
            .map(|&n| radial_defect(&t, &radial_solution(&t, id, 1.0, 2.0, RadialBc::Dirichlet, 3.0, n).unwrap()))
            .collect();
        let ratio = d[0] / d[1];
        assert!((ratio - 4.0).abs() < 0.8, "{id:?}: {d:?} ratio {ratio}");
    }
}

#[test]
fn trivial_helmholtz() {
    let t = table(&[1.39, 2.595, 2.44]);
    let pair = &angular_spectrum(&t, 0.0, 1, 360).unwrap()[0];
    let s = ResidualSamples::default_for(&t);
    let rad = radial_solution(&t, s.sector, 0.0, 0.0, RadialBc::UnitStart, 2.5, 250).unwrap();
    let (r, n) = helmholtz_residual(&t, 0.0, pair, &rad, &s).unwrap();
    assert!(n > 100);
    assert!(r < 1e-10, "{r:e}");
}

fn residual_pair(t: &SectorTable, k: f64, index: usize, res: usize, steps: usize, s: &ResidualSamples) -> f64 {
    let pairs = angular_spectrum(t, k, index + 1, res).unwrap();
    let pair = &pairs[index];
    let rad = radial_solution(t, s.sector, k, pair.lambda, RadialBc::Dirichlet, s.mu_hi + 0.5, steps).unwrap();
    helmholtz_residual(t, k, pair, &rad, s).unwrap().0
}

#[test]
fn helmholtz_recomposition_reference_triangle() {
    let t = table(&[1.39, 2.595, 2.44]);
    for s in [ResidualSamples::default_for(&t), ResidualSamples { sector: SectorId::Wedge(0), mu_lo: 1.0, mu_hi: 2.5 }] {
        for index in [0, 1] {
            let a = residual_pair(&t, 1.0, index, 1440, 600, &s);
            let b = residual_pair(&t, 1.0, index, 2880, 1200, &s);
            assert!(a < 1e-3, "{s:?} {index}: {a:e}");
            let ratio = a / b;
            assert!((ratio - 4.0).abs() < 0.8, "{s:?} {index}: {a:e} {b:e} ratio {ratio}");
        }
    }
}

#[test]
fn helmholtz_recomposition_mathieu_limit() {
    let t = table(&[1.0, 1.0, 1e-6]);
    let s = ResidualSamples { sector: SectorId::Wedge(0), mu_lo: 0.25, mu_hi: 2.0 };
    // h = 1e-3 in both directions, then halved
    let a = residual_pair(&t, 1.0, 1, 6283, 2500, &s);
    let b = residual_pair(&t, 1.0, 1, 12566, 5000, &s);
    assert!(a < 1e-3, "{a:e}");
    assert!((a / b - 4.0).abs() < 0.8, "{a:e} {b:e}");
}
