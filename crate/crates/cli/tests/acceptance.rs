//! The twelve acceptance criteria, one PASS/FAIL line each.
//! `cargo test -p polyelliptic-cli --test acceptance`

use std::f64::consts::TAU;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use polyelliptic::atlas::{hyperbola_ranges, sector_partition, CommonCoord, SectorId, SectorTable};
use polyelliptic::metric::{metric_profile, scale_factors, stackel_factors};
use polyelliptic::polygon::{build_polygon, build_square, triangle_from_sides};
use polyelliptic::solver::angular_spectrum;
use polyelliptic::solver::mathieu::{mathieu_characteristic, mathieu_characteristic_truncated, periodic_spectrum, Parity};
use polyelliptic::verify::{self, degeneration_deviation, recomposition};

const REFERENCE: [f64; 3] = [1.39, 2.595, 2.44];

fn table(f: &[f64]) -> SectorTable {
    sector_partition(&build_polygon(f).unwrap()).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn construction() -> Outcome {
    let spec = triangle_from_sides([2.78, 5.19, 4.88]).unwrap();
    let want = [80.2, 67.95, 31.85];
    let got: Vec<f64> = spec.gamma.iter().map(|g| g.to_degrees()).collect();
    let worst = got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    ok(worst < 0.05, format!("gamma = {got:.3?} deg, worst {worst:.4} deg"))
}

fn covering_continuity() -> Outcome {
    let mut pass = true;
    let mut d = Vec::new();
    for t in [table(&REFERENCE), table(&[1.3; 3]), sector_partition(&build_square(1.0)).unwrap()] {
        let (a, b) = (verify::covering(&t, 1e-12), verify::continuity(&t, 1e-9));
        pass &= a.pass && b.pass;
        d.push(format!("{:.1e}/{:.1e}", a.residual, b.residual));
    }
    ok(pass, format!("covering/continuity {}", d.join(", ")))
}

fn orthogonality() -> Outcome {
    let mut pass = true;
    let mut d = Vec::new();
    for t in [table(&REFERENCE), table(&[1.3; 3]), sector_partition(&build_square(1.0)).unwrap()] {
        let t0 = Instant::now();
        let c = verify::orthogonality(&t, 1e-7);
        pass &= c.pass && t0.elapsed() < Duration::from_secs(10);
        d.push(format!("{:.1e}", c.residual));
    }
    ok(pass, format!("max off-diagonal {}", d.join(", ")))
}

fn round_trip() -> Outcome {
    let c = verify::round_trip(&table(&REFERENCE), 1e-9);
    ok(c.pass, format!("{:.1e} over {} points; {}", c.residual, c.n_samples, c.detail))
}

fn separability() -> Outcome {
    let t = table(&REFERENCE);
    let c = verify::separability(&t, 1e-8);
    // first vertex-chart piece against its closed form
    let (f2, k) = (REFERENCE[1], REFERENCE[0] + REFERENCE[2]);
    let st = stackel_factors(&t, SectorId::Wedge(0));
    let mut worst = 0.0f64;
    let mut n = 0;
    for i in 0..60 {
        for j in 0..120 {
            let (mu, th) = (0.05 + 0.05 * i as f64, TAU * (j as f64 + 0.5) / 120.0);
            if t.sector_at(CommonCoord::new(mu, th)) != SectorId::Wedge(0) {
                continue;
            }
            let ae = k * mu.cosh();
            let want_t = ae * ae - f2 * f2 * (th - t.theta_v1()).cos().powi(2);
            let want_m = k * k * mu.sinh().powi(2) * want_t / (ae * ae - f2 * f2);
            let (hm, ht) = scale_factors(&t, CommonCoord::new(mu, th));
            worst = worst.max((ht * ht - want_t).abs() / want_t).max((hm * hm - want_m).abs() / want_m);
            worst = worst.max((st.h1(mu) - ae * ae).abs() / (ae * ae)).max((st.g1(th) - 1.0).abs());
            n += 1;
        }
    }
    ok(c.pass && n > 100 && worst < 1e-12, format!("mixed difference {:.1e}; closed form {worst:.1e} at {n} points", c.residual))
}

fn degeneration() -> Outcome {
    let d: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|&e| degeneration_deviation(e).unwrap()).collect();
    ok(d[1] < d[0] && d[2] < d[1] && d[2] < 1e-4, format!("deviation {:.2e} {:.2e} {:.2e}", d[0], d[1], d[2]))
}

fn mathieu_limit() -> Outcome {
    let t = table(&[1.0, 1.0, 1e-6]);
    let f = t.wedge_frames[0].f;
    let mut worst = 0.0f64;
    for q in [0.5f64, 1.0, 5.0] {
        let got = angular_spectrum(&t, 2.0 * q.sqrt() / f, 5, 1440).unwrap();
        for (g, a) in got.iter().zip(periodic_spectrum(q, 5)) {
            worst = worst.max((g.lambda - a).abs() / a.abs().max(1.0));
        }
    }
    let mut trunc = 0.0f64;
    let mut exact = 0.0f64;
    for n in 0..6usize {
        exact = exact.max((mathieu_characteristic(0.0, n, Parity::Even) - (n * n) as f64).abs());
        if n > 0 {
            exact = exact.max((mathieu_characteristic(0.0, n, Parity::Odd) - (n * n) as f64).abs());
        }
        for q in [0.5, 1.0, 5.0] {
            for p in [Parity::Even, Parity::Odd] {
                if n == 0 && p == Parity::Odd {
                    continue;
                }
                let (a, b) = (mathieu_characteristic_truncated(q, n, p, 20), mathieu_characteristic_truncated(q, n, p, 40));
                trunc = trunc.max((a - b).abs());
            }
        }
    }
    ok(
        worst < 1e-5 && trunc < 1e-10 && exact == 0.0,
        format!("relative {worst:.1e}; oracle doubling {trunc:.1e}, q = 0 error {exact:.1e}"),
    )
}

fn square_claim() -> Outcome {
    let r = hyperbola_ranges(&build_square(1.0));
    let worst = r.iter().map(|(lo, hi)| (hi - lo).abs()).fold(0.0, f64::max);
    ok(r.len() == 4 && worst < 1e-12, format!("widths <= {worst:.1e}"))
}

fn profile_shape() -> Outcome {
    let mut pass = true;
    let mut d = Vec::new();
    for f in [REFERENCE, [1.3; 3]] {
        let t = table(&f);
        // continuity across band edges, periodicity, kinks at edges
        let (mut jump, mut kinks) = (0.0f64, 0);
        for band in &t.bands {
            let e = band.hi;
            let h = 1e-6;
            let s = |th: f64| {
                let (m, t2) = scale_factors(&t, CommonCoord::new(1.1, th));
                [m * m, t2 * t2]
            };
            let (l, r) = (s(e - 1e-11), s(e + 1e-11));
            jump = jump.max((l[0] - r[0]).abs() / l[0]).max((l[1] - r[1]).abs() / l[1]);
            let (sl, sr) = ((s(e - h)[1] - s(e - 2.0 * h)[1]) / h, (s(e + 2.0 * h)[1] - s(e + h)[1]) / h);
            if (sl - sr).abs() > 1e-3 * l[1] {
                kinks += 1;
            }
        }
        let rows = metric_profile(&t, 1.1, 720).unwrap();
        let period = rows
            .iter()
            .map(|r| {
                let (a, b) = (scale_factors(&t, CommonCoord::new(1.1, r.theta_c)), scale_factors(&t, CommonCoord::new(1.1, r.theta_c + TAU)));
                ((a.1 - b.1).abs() / a.1).max((a.0 - b.0).abs() / a.0)
            })
            .fold(0.0, f64::max);
        pass &= jump < 1e-9 && period < 1e-12 && kinks > 0;
        d.push(format!("jump {jump:.1e}, period {period:.1e}, {kinks} kinks"));
    }
    let t = table(&[1.3; 3]);
    let rows = metric_profile(&t, 1.1, 900).unwrap();
    let third = (0..900)
        .map(|i| {
            let (a, b) = (&rows[i], &rows[(i + 300) % 900]);
            ((a.h_theta_sq - b.h_theta_sq).abs() / a.h_theta_sq).max((a.h_mu_sq - b.h_mu_sq).abs() / a.h_mu_sq)
        })
        .fold(0.0, f64::max);
    pass &= third < 1e-9;
    ok(pass, format!("{}; equilateral 2pi/3 shift {third:.1e}", d.join("; ")))
}

fn end_to_end() -> Outcome {
    let t = table(&REFERENCE);
    let mut pass = true;
    let mut d = Vec::new();
    for index in [0, 1] {
        let (a, n) = recomposition(&t, 1.0, index, 1440).unwrap();
        let (b, _) = recomposition(&t, 1.0, index, 2880).unwrap();
        pass &= a < 1e-3 && (a / b - 4.0).abs() < 0.8;
        d.push(format!("pair {index}: {a:.2e} -> {b:.2e} (ratio {:.2}, {n} nodes)", a / b));
    }
    ok(pass, d.join("; "))
}

fn polar_limit() -> Outcome {
    let mut pass = true;
    let mut d = Vec::new();
    for t in [table(&REFERENCE), table(&[1.3; 3]), sector_partition(&build_square(1.0)).unwrap()] {
        let c = t.spec.centroid();
        let r: Vec<f64> = (0..3600).map(|j| (t.forward(CommonCoord::new(5.0, TAU * j as f64 / 3600.0)) - c).norm()).collect();
        let ratio = r.iter().cloned().fold(0.0, f64::max) / r.iter().cloned().fold(f64::INFINITY, f64::min);
        pass &= ratio - 1.0 < 0.05;
        d.push(format!("{:.4}", ratio - 1.0));
    }
    ok(pass, format!("max/min - 1 = {}", d.join(", ")))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("polyelliptic-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("reference.json");
    std::fs::write(&cfg, r#"{"sides": [2.78, 5.19, 4.88]}"#).unwrap();
    let run = |sub: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_polyelliptic")).arg(sub).arg(&cfg).output().unwrap();
        (o.status.code(), o.stdout)
    };
    let mut pass = true;
    for sub in ["verify", "net"] {
        let (a, b) = (run(sub), run(sub));
        pass &= a.0 == Some(0) && !a.1.is_empty() && a == b;
    }
    let _ = std::fs::remove_dir_all(&dir);
    ok(pass, "verify and net rerun byte-identical")
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 12] = [
        ("1 reference-triangle construction", construction, 1),
        ("2 covering + continuity", covering_continuity, 5),
        ("3 orthogonality", orthogonality, 30),
        ("4 round trip", round_trip, 10),
        ("5 Stackel separability", separability, 60),
        ("6 degeneration", degeneration, 60),
        ("7 Mathieu limit", mathieu_limit, 60),
        ("8 square: no true hyperbolas", square_claim, 1),
        ("9 metric profile shape", profile_shape, 60),
        ("10 end-to-end separation", end_to_end, 60),
        ("11 polar limit", polar_limit, 10),
        ("12 determinism", determinism, 120),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let t0 = Instant::now();
        let out = check();
        let dt = t0.elapsed();
        let pass = out.pass && dt < Duration::from_secs(budget);
        failed += usize::from(!pass);
        println!("{} {name:32} {:>8.3}s  {}", if pass { "PASS" } else { "FAIL" }, dt.as_secs_f64(), out.detail);
    }
    println!("acceptance: {} of 12 passed", 12 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
