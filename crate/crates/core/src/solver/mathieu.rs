//! Characteristic values of `y'' + (a - 2q cos 2t) y = 0` from truncated
//! Fourier-mode matrices. Validation oracle only.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// Even (`a_n`, cosine series) or odd (`b_n`, sine series) solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// `a_n(q)` or `b_n(q)`; `b_0` does not exist and yields `NaN`.
pub fn mathieu_characteristic(q: f64, n: usize, parity: Parity) -> f64 {
    mathieu_characteristic_truncated(q, n, parity, default_truncation(q, n))
}

/// Modes per block. Generous: the matrices are tiny.
fn default_truncation(q: f64, n: usize) -> usize {
    40 + n + 2 * q.abs().sqrt().ceil() as usize
}

/// Same, with `m` Fourier modes in the block that contains order `n`.
pub fn mathieu_characteristic_truncated(q: f64, n: usize, parity: Parity, m: usize) -> f64 {
    if parity == Parity::Odd && n == 0 {
        return f64::NAN;
    }
    // block of modes n mod 2 (+1 for odd), spaced by 2
    let first = match parity {
        Parity::Even => n % 2,
        Parity::Odd => 2 - n % 2,
    };
    let m = m.max(n / 2 + 2);
    let mut a = DMatrix::<f64>::zeros(m, m);
    for r in 0..m {
        let order = (first + 2 * r) as f64;
        a[(r, r)] = order * order;
        if r + 1 < m {
            a[(r, r + 1)] = q;
            a[(r + 1, r)] = q;
        }
    }
    match (parity, first) {
        // cos 0 couples to cos 2t with weight 2: symmetrised
        (Parity::Even, 0) if m > 1 => {
            a[(0, 1)] = std::f64::consts::SQRT_2 * q;
            a[(1, 0)] = a[(0, 1)];
        }
        (Parity::Even, 1) => a[(0, 0)] += q,
        (Parity::Odd, 1) => a[(0, 0)] -= q,
        _ => {}
    }
    let mut e: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().cloned().collect();
    e.sort_by(|x, y| x.total_cmp(y));
    let idx = match parity {
        Parity::Even => n / 2,
        Parity::Odd => (n - 1) / 2,
    };
    e[idx]
}

/// First `count` eigenvalues of the `2pi`-periodic problem: the merged
/// sequence `a_0, b_1, a_1, b_2, a_2, ...`, sorted.
pub fn periodic_spectrum(q: f64, count: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=count)
        .flat_map(|n| {
            let a = mathieu_characteristic(q, n, Parity::Even);
            let b = if n > 0 { Some(mathieu_characteristic(q, n, Parity::Odd)) } else { None };
            std::iter::once(a).chain(b)
        })
        .collect();
    v.sort_by(|x, y| x.total_cmp(y));
    v.truncate(count);
    v
}

/// Direct integration of the modified equation `y'' = (a - 2q cosh 2t) y`
/// from `t0` with `(y, y')(t0) = start`; values and slopes at the ascending
/// points `ts >= t0`, `sub` RK4 steps per interval.
pub fn modified_mathieu(a: f64, q: f64, t0: f64, start: [f64; 2], ts: &[f64], sub: usize) -> Vec<[f64; 2]> {
    let f = |t: f64, y: [f64; 2]| [y[1], (a - 2.0 * q * (2.0 * t).cosh()) * y[0]];
    let mut y = start;
    let mut t = t0;
    ts.iter()
        .map(|&target| {
            let h = (target - t) / sub as f64;
            for _ in 0..sub {
                let k1 = f(t, y);
                let k2 = f(t + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
                let k3 = f(t + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
                let k4 = f(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
                for j in 0..2 {
                    y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                }
                t += h;
            }
            t = target;
            y
        })
        .collect()
}
