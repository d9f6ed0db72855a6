//! Symmetric cyclic tridiagonal pencils `A - s M` with diagonal `M > 0`:
//! Sturm counts, bisection and inverse iteration.

/// `A` has diagonal `diag` and couplings `off[i]` between nodes `i` and
/// `i + 1 (mod n)`; `M` is diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicPencil {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub mass: Vec<f64>,
}

impl CyclicPencil {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `s`.
    ///
    /// Inertia of `A - s M`: LDL^T of the open chain `0..n-1` plus the sign
    /// of the Schur complement of the last node.
    pub fn count_below(&self, s: f64) -> usize {
        let n = self.len();
        assert!(n >= 3, "cyclic pencil needs at least 3 nodes");
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let (mut d_prev, mut z_prev) = (0.0f64, 0.0f64);
        let mut quad = 0.0;
        for i in 0..n - 1 {
            let a = self.diag[i] - s * self.mass[i];
            let mut c = if i == 0 { self.off[n - 1] } else { 0.0 };
            if i == n - 2 {
                c += self.off[n - 2];
            }
            let (mut d, z) = if i == 0 {
                (a, c)
            } else {
                let l = self.off[i - 1] / d_prev;
                (a - l * self.off[i - 1], c - l * z_prev)
            };
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
            quad += z * z / d;
            d_prev = d;
            z_prev = z;
        }
        let schur = self.diag[n - 1] - s * self.mass[n - 1] - quad;
        if schur < 0.0 {
            count += 1;
        }
        count
    }

    /// Gershgorin bounds of `M^{-1/2} A M^{-1/2}`.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let left = self.off[(i + n - 1) % n].abs() / (self.mass[i] * self.mass[(i + n - 1) % n]).sqrt();
            let right = self.off[i].abs() / (self.mass[i] * self.mass[(i + 1) % n]).sqrt();
            let c = self.diag[i] / self.mass[i];
            lo = lo.min(c - left - right);
            hi = hi.max(c + left + right);
        }
        (lo, hi)
    }

    /// The `index`-th eigenvalue (0-based, ascending) by bisection.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        let pad = 1e-12 * (hi - lo).abs().max(1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `(A - s M) x` in natural node order.
    pub fn apply_shifted(&self, s: f64, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                (self.diag[i] - s * self.mass[i]) * x[i]
                    + self.off[i] * x[(i + 1) % n]
                    + self.off[(i + n - 1) % n] * x[(i + n - 1) % n]
            })
            .collect()
    }

    /// `x^T A x / x^T M x`.
    pub fn rayleigh(&self, x: &[f64]) -> f64 {
        let ax = self.apply_shifted(0.0, x);
        x.iter().zip(&ax).map(|(a, b)| a * b).sum::<f64>() / self.m_dot(x, x)
    }

    /// First `count` eigenpairs: bisection, inverse iteration, then the
    /// Rayleigh quotient (bisection alone resolves exact pairs only to
    /// ~1e-9, the inertia count being ill-conditioned there).
    pub fn lowest(&self, count: usize) -> Vec<(f64, Vec<f64>)> {
        let vals: Vec<f64> = (0..count).map(|i| self.eigenvalue(i)).collect();
        let mut out: Vec<(f64, Vec<f64>)> =
            self.eigenvectors(&vals).into_iter().map(|v| (self.rayleigh(&v), v)).collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    /// `x^T M y`.
    pub fn m_dot(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).zip(&self.mass).map(|((a, b), m)| a * b * m).sum()
    }

    /// Eigenvectors for the given eigenvalues by inverse iteration,
    /// `M`-orthonormalised within clusters of close eigenvalues.
    pub fn eigenvectors(&self, values: &[f64]) -> Vec<Vec<f64>> {
        let n = self.len();
        let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        for (j, &lam) in values.iter().enumerate() {
            let shift = lam + 1e-10 * scale;
            let lu = BandLu::cyclic(self, shift);
            // deterministic start vector, varied per index
            let mut x: Vec<f64> =
                (0..n).map(|i| 1.0 + 0.5 * ((i * (2 * j + 3)) as f64 * 0.7548776662).sin()).collect();
            let cluster: Vec<usize> = (0..j).filter(|&i| (values[i] - lam).abs() <= 1e-8 * scale).collect();
            for _ in 0..6 {
                let rhs: Vec<f64> = x.iter().zip(&self.mass).map(|(a, m)| a * m).collect();
                x = lu.solve(&rhs);
                for &i in &cluster {
                    let p = self.m_dot(&out[i], &x);
                    for (xv, ov) in x.iter_mut().zip(&out[i]) {
                        *xv -= p * ov;
                    }
                }
                let norm = self.m_dot(&x, &x).sqrt();
                x.iter_mut().for_each(|v| *v /= norm);
            }
            // fix the sign: largest component positive
            let big = x.iter().cloned().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
            if big < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            out.push(x);
        }
        out
    }
}

/// Banded LU with partial pivoting of a cyclic tridiagonal matrix stored in
/// interleaved order (`0, n-1, 1, n-2, ...`), which makes it pentadiagonal.
struct BandLu {
    n: usize,
    /// Row-major band: row `r` holds columns `r - KL ..= r + KU + KL`.
    band: Vec<[f64; W]>,
    piv: Vec<usize>,
    perm: Vec<usize>,
}

const KL: usize = 2;
const KU: usize = 2;
const W: usize = 2 * KL + KU + 1;

impl BandLu {
    fn cyclic(p: &CyclicPencil, s: f64) -> Self {
        let n = p.len();
        let perm: Vec<usize> = (0..n).map(|r| if r % 2 == 0 { r / 2 } else { n - 1 - r / 2 }).collect();
        let mut pos = vec![0; n];
        for (r, &node) in perm.iter().enumerate() {
            pos[node] = r;
        }
        let mut lu = BandLu { n, band: vec![[0.0; W]; n], piv: vec![0; n], perm };
        for node in 0..n {
            let r = pos[node];
            lu.add(r, r, p.diag[node] - s * p.mass[node]);
            let right = (node + 1) % n;
            lu.add(r, pos[right], p.off[node]);
            lu.add(pos[right], r, p.off[node]);
        }
        lu.factor();
        lu
    }

    fn at(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.band[r][c + KL - r]
    }

    fn add(&mut self, r: usize, c: usize, v: f64) {
        *self.at(r, c) += v;
    }

    fn get(&self, r: usize, c: usize) -> f64 {
        if c + KL < r || c > r + KU + KL {
            0.0
        } else {
            self.band[r][c + KL - r]
        }
    }

    fn factor(&mut self) {
        let n = self.n;
        for k in 0..n {
            let last = (k + KL).min(n - 1);
            let mut p = k;
            for r in k + 1..=last {
                if self.get(r, k).abs() > self.get(p, k).abs() {
                    p = r;
                }
            }
            self.piv[k] = p;
            if p != k {
                for c in k..=(k + KU + KL).min(n - 1) {
                    let (a, b) = (self.get(k, c), self.get(p, c));
                    *self.at(k, c) = b;
                    *self.at(p, c) = a;
                }
            }
            let mut pivot = self.get(k, k);
            if pivot == 0.0 {
                pivot = f64::EPSILON * 1e-10;
                *self.at(k, k) = pivot;
            }
            for r in k + 1..=last {
                let l = self.get(r, k) / pivot;
                *self.at(r, k) = l;
                for c in k + 1..=(k + KU + KL).min(n - 1) {
                    let v = self.get(k, c);
                    if v != 0.0 {
                        *self.at(r, c) -= l * v;
                    }
                }
            }
        }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&node| rhs[node]).collect();
        for k in 0..n {
            y.swap(k, self.piv[k]);
            for r in k + 1..=(k + KL).min(n - 1) {
                y[r] -= self.get(r, k) * y[k];
            }
        }
        for k in (0..n).rev() {
            let mut v = y[k];
            for c in k + 1..=(k + KU + KL).min(n - 1) {
                v -= self.get(k, c) * y[c];
            }
            y[k] = v / self.get(k, k);
        }
        let mut x = vec![0.0; n];
        for (r, &node) in self.perm.iter().enumerate() {
            x[node] = y[r];
        }
        x
    }
}
