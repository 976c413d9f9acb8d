//! Small numerical kernels: 2×2 complex algebra, a Lyapunov solver, adaptive
//! Gauss–Kronrod quadrature, an embedded Runge–Kutta integrator, scalar root
//! and minimum search, and a cyclic Jacobi eigensolver for Hermitian matrices.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Dense 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Self::diag(C64::new(1.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Self::diag(C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }

    pub fn diag(a: C64, d: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Mat2([[a, z], [z, d]])
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Inverse via the adjugate; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(Mat2([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]))
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

/// (e^z − 1)/z, accurate near z = 0.
pub fn phi1(z: C64) -> C64 {
    if z.norm() < 1e-3 {
        // Horner form of 1 + z/2 + z²/6 + z³/24 + z⁴/120 + z⁵/720
        let mut acc = C64::new(1.0 / 720.0, 0.0);
        for k in [120.0, 24.0, 6.0, 2.0, 1.0] {
            acc = acc * z + 1.0 / k;
        }
        acc
    } else {
        (z.exp() - 1.0) / z
    }
}

/// (e^y − 1 − y)/y², accurate near y = 0.
pub fn phi2(y: C64) -> C64 {
    if y.norm() < 0.5 {
        // Σ_{k≥0} y^k/(k+2)!, truncated once terms drop below 1e-17.
        let mut term = C64::new(0.5, 0.0);
        let mut sum = term;
        for k in 1..40 {
            term = term * y / (k as f64 + 2.0);
            sum += term;
            if term.norm() < 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (y.exp() - 1.0 - y) / (y * y)
    }
}

/// Solves the continuous Lyapunov equation M·X + X·M† + Q = 0.
pub fn solve_lyapunov(m: &Mat2, q: &Mat2) -> Result<Mat2> {
    // Unknown x_{ij} sits at index 2i + j.
    let mut a = [[C64::new(0.0, 0.0); 5]; 4];
    for i in 0..2 {
        for j in 0..2 {
            let row = 2 * i + j;
            for k in 0..2 {
                a[row][2 * k + j] += m.0[i][k];
                a[row][2 * i + k] += m.0[j][k].conj();
            }
            a[row][4] = -q.0[i][j];
        }
    }
    let x = gauss_solve(a).ok_or_else(|| Error::Domain("Lyapunov system is singular".into()))?;
    Ok(Mat2([[x[0], x[1]], [x[2], x[3]]]))
}

fn gauss_solve<const N: usize, const M: usize>(mut a: [[C64; M]; N]) -> Option<[C64; N]> {
    for col in 0..N {
        let pivot = (col..N).max_by(|&r, &s| a[r][col].norm().total_cmp(&a[s][col].norm()))?;
        if a[pivot][col].norm() == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        for r in col + 1..N {
            let f = a[r][col] / a[col][col];
            for c in col..M {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
        }
    }
    let mut x = [C64::new(0.0, 0.0); N];
    for r in (0..N).rev() {
        let mut s = a[r][N];
        for c in r + 1..N {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const GAUSS7_WEIGHTS: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = GAUSS7_WEIGHTS[3] * fc;
    for k in 0..7 {
        let dx = h * GK_NODES[k];
        let pair = f(c - dx) + f(c + dx);
        kronrod += GK_WEIGHTS[k] * pair;
        if k % 2 == 1 {
            gauss += GAUSS7_WEIGHTS[k / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive 15-point Gauss–Kronrod quadrature over the union of the given
/// consecutive breakpoints. Stops when the summed error estimate falls below
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rel_tol: f64, abs_tol: f64) -> Result<f64> {
    let mut pieces: Vec<(f64, f64, f64, f64)> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    const MAX_PIECES: usize = 4000;
    loop {
        let total: f64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        let target = abs_tol.max(rel_tol * total.abs());
        if err <= target {
            return Ok(total);
        }
        let worst = pieces.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).map(|(i, _)| i).unwrap_or(0);
        let (a, b, _, _) = pieces[worst];
        let mid = 0.5 * (a + b);
        if pieces.len() >= MAX_PIECES || mid <= a || mid >= b {
            return Err(Error::Quadrature { estimate: err, requested: target });
        }
        let (v1, e1) = gk15(&f, a, mid);
        let (v2, e2) = gk15(&f, mid, b);
        pieces[worst] = (a, mid, v1, e1);
        pieces.push((mid, b, v2, e2));
    }
}

/// Dormand–Prince 5(4) integration of y' = f(t, y) from t0 to t1.
pub fn dopri45<const N: usize, F>(f: F, t0: f64, y0: [C64; N], t1: f64, rel_tol: f64, abs_tol: f64) -> Result<[C64; N]>
where
    F: Fn(f64, &[C64; N]) -> [C64; N],
{
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] =
        [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

    if t1 < t0 {
        return Err(Error::Integration("end time precedes start time".into()));
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = ((t1 - t0) * 1e-3).max(f64::MIN_POSITIVE);
    let max_steps = 50_000_000usize;
    let mut steps = 0usize;
    while t < t1 {
        steps += 1;
        if steps > max_steps {
            return Err(Error::Integration(format!("step budget exhausted at t = {t:e}")));
        }
        if t + h > t1 {
            h = t1 - t;
        }
        let mut k = [[C64::new(0.0, 0.0); N]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, a) in A[s].iter().enumerate().take(s) {
                if *a != 0.0 {
                    for n in 0..N {
                        ys[n] += k[j][n] * (h * a);
                    }
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for n in 0..N {
            let mut d5 = C64::new(0.0, 0.0);
            let mut d4 = C64::new(0.0, 0.0);
            for s in 0..7 {
                d5 += k[s][n] * B5[s];
                d4 += k[s][n] * B4[s];
            }
            y5[n] += d5 * h;
            let scale = abs_tol + rel_tol * y[n].norm().max(y5[n].norm());
            err = err.max(((d5 - d4) * h).norm() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Integration(format!("non-finite state at t = {t:e}")));
        }
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * t.abs().max(1e-300) {
            return Err(Error::Integration(format!("step size underflow at t = {t:e}")));
        }
    }
    Ok(y)
}

/// Bisection on a sign-changing bracket until the bracket width is below
/// `rel_tol` times its upper end. `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let lo_negative = f(lo) < 0.0;
    while (hi - lo) > rel_tol * hi.abs() {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimisation of `f` on [a, b] until the bracket is below
/// `abs_tol`. Returns the abscissa and value of the best point seen.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, abs_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > abs_tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
        }
    }
}

/// `n` evenly spaced points on [lo, hi); the upper end is excluded.
pub fn lin_space_half_open(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Eigen-decomposition of a complex Hermitian matrix by cyclic Jacobi
/// rotations. Returns eigenvalues in ascending order and the matching
/// eigenvectors as columns. Iterates until the off-diagonal Frobenius norm is
/// below `1e-14` times the norm of the whole matrix.
pub fn hermitian_eigen<const N: usize>(h: &[[C64; N]; N]) -> ([f64; N], [[C64; N]; N]) {
    let mut a = *h;
    let mut v = [[C64::new(0.0, 0.0); N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    let total: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = 1e-14 * total.max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..N)
            .flat_map(|p| (0..N).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a[p][q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let (app, aqq) = (a[p][p].re, a[q][q].re);
                let zeta = (aqq - app) / (2.0 * mag);
                let t = zeta.signum() / (zeta.abs() + (zeta * zeta + 1.0).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // V = diag(1, e^{-iθ}) · [[c, s], [-s, c]] restricted to (p, q).
                let vpp = C64::new(c, 0.0);
                let vpq = C64::new(s, 0.0);
                let vqp = -phase.conj() * s;
                let vqq = phase.conj() * c;
                for row in a.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = xp * vpp + xq * vqp;
                    row[q] = xp * vpq + xq * vqq;
                }
                for col in 0..N {
                    let (xp, xq) = (a[p][col], a[q][col]);
                    a[p][col] = vpp.conj() * xp + vqp.conj() * xq;
                    a[q][col] = vpq.conj() * xp + vqq.conj() * xq;
                }
                a[p][q] = C64::new(0.0, 0.0);
                a[q][p] = C64::new(0.0, 0.0);
                a[p][p] = C64::new(a[p][p].re, 0.0);
                a[q][q] = C64::new(a[q][q].re, 0.0);
                for row in v.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = xp * vpp + xq * vqp;
                    row[q] = xp * vpq + xq * vqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[i][i].re.total_cmp(&a[j][j].re));
    let mut values = [0.0; N];
    let mut vectors = [[C64::new(0.0, 0.0); N]; N];
    for (k, &i) in order.iter().enumerate() {
        values[k] = a[i][i].re;
        for r in 0..N {
            vectors[r][k] = v[r][i];
        }
    }
    (values, vectors)
}
