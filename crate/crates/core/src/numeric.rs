//! Grid calculus shared by the integrator, estimator and tower: finite
//! differences, cumulative quadrature, and the interpolants used for
//! resampling and tabulated profiles.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// Finite-difference weights for derivatives of order `0..=max_order` at
/// `x0` over arbitrary nodes (Fornberg's recursion). `w[j][k]` is the
/// weight of node `j` in the order-`k` derivative.
pub fn fornberg_weights(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; max_order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c
}

const STENCIL: usize = 5;

/// Five-point finite differences of a uniformly sampled sequence.
///
/// Interior samples use the central stencil; the two samples at each end of
/// an open sequence use the one-sided five-point stencils. A periodic
/// sequence wraps around instead.
pub struct Differentiator {
    h: f64,
    periodic: bool,
    // weights[pattern][order][node]; pattern p places the sample at node p
    weights: [[[f64; STENCIL]; 4]; STENCIL],
}

impl Differentiator {
    pub fn new(h: f64, periodic: bool) -> Self {
        let mut weights = [[[0.0; STENCIL]; 4]; STENCIL];
        let nodes: Vec<f64> = (0..STENCIL).map(|j| j as f64).collect();
        for (p, table) in weights.iter_mut().enumerate() {
            let w = fornberg_weights(p as f64, &nodes, 3);
            for (order, row) in table.iter_mut().enumerate() {
                for j in 0..STENCIL {
                    row[j] = w[j][order];
                }
            }
        }
        Differentiator { h, periodic, weights }
    }

    /// Order-`order` derivative (1 to 3) of `values` at every sample.
    pub fn apply<T>(&self, values: &[T], order: usize) -> Vec<T>
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    {
        assert!((1..=3).contains(&order));
        let n = values.len();
        assert!(n >= STENCIL, "need at least {STENCIL} samples");
        let scale = self.h.powi(order as i32).recip();
        (0..n)
            .map(|i| {
                let (start, pattern) = if self.periodic {
                    (i as isize - 2, 2)
                } else {
                    let start = i.saturating_sub(2).min(n - STENCIL);
                    (start as isize, i - start)
                };
                let w = &self.weights[pattern][order];
                let mut acc = T::default();
                for (j, wj) in w.iter().enumerate() {
                    let idx = (start + j as isize).rem_euclid(n as isize) as usize;
                    acc = acc + values[idx] * *wj;
                }
                acc * scale
            })
            .collect()
    }
}

/// Running integral of uniformly sampled values from the first sample,
/// composite Simpson on even spans; odd spans close with Simpson's 3/8
/// rule on the last three intervals (or a cubic one-interval rule at i=1).
pub fn cumulative_simpson<T>(values: &[T], h: f64) -> Vec<T>
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    let mut out = vec![T::default(); n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + (values[i - 1] + values[i]) * (h / 2.0);
        }
        return out;
    }
    let f = values;
    // even indices: composite Simpson from 0
    let mut i = 2;
    while i < n {
        out[i] = out[i - 2] + (f[i - 2] + f[i - 1] * 4.0 + f[i]) * (h / 3.0);
        i += 2;
    }
    out[1] = (f[0] * 9.0 + f[1] * 19.0 + f[2] * -5.0 + f[3]) * (h / 24.0);
    let mut i = 3;
    while i < n {
        out[i] = out[i - 3] + (f[i - 3] + f[i - 2] * 3.0 + f[i - 1] * 3.0 + f[i]) * (3.0 * h / 8.0);
        i += 2;
    }
    out
}

/// Clamped cubic spline through `(t_i, y_i)`; end slopes come from the
/// cubic through the four nearest nodes, which keeps the interpolant
/// fourth-order accurate up to the ends.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    t: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(t: &[f64], y: &[f64]) -> Result<Self> {
        let n = t.len();
        if n < 2 || y.len() != n {
            return Err(Error::InsufficientSamples { needed: 2, got: n.min(y.len()) });
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::NotRegular("spline knots must increase strictly".into()));
        }
        let k = n.min(4);
        let slope = |x0: f64, idx: std::ops::Range<usize>| {
            let w = fornberg_weights(x0, &t[idx.clone()], 1);
            idx.zip(w).map(|(i, wi)| wi[1] * y[i]).sum::<f64>()
        };
        let d0 = slope(t[0], 0..k);
        let dn = slope(t[n - 1], n - k..n);

        let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0 * h[0];
        sup[0] = h[0];
        rhs[0] = 6.0 * ((y[1] - y[0]) / h[0] - d0);
        for i in 1..n - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        sub[n - 1] = h[n - 2];
        diag[n - 1] = 2.0 * h[n - 2];
        rhs[n - 1] = 6.0 * (dn - (y[n - 1] - y[n - 2]) / h[n - 2]);
        let m = solve_tridiagonal(&sub, &diag, &sup, &rhs);
        Ok(CubicSpline { t: t.to_vec(), y: y.to_vec(), m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.t
    }

    /// Index of the segment containing `x`, clamped to the valid range.
    pub fn segment(&self, x: f64) -> usize {
        let n = self.t.len();
        match self.t.partition_point(|&ti| ti <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    pub fn eval_in(&self, i: usize, x: f64) -> (f64, f64) {
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let a = t1 - x;
        let b = x - t0;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let c0 = self.y[i] / h - m0 * h / 6.0;
        let c1 = self.y[i + 1] / h - m1 * h / 6.0;
        let v = m0 * a * a * a / (6.0 * h) + m1 * b * b * b / (6.0 * h) + c0 * a + c1 * b;
        let d = -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) - c0 + c1;
        (v, d)
    }

    pub fn eval(&self, x: f64) -> (f64, f64) {
        self.eval_in(self.segment(x), x)
    }
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch–Carlson
/// slopes with the Fritsch–Butland harmonic mean).
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
            return MonotoneCubic { x: x.to_vec(), y: y.to_vec(), d };
        }
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        MonotoneCubic { x: x.to_vec(), y: y.to_vec(), d }
    }

    /// Value and derivative at `t` (clamped to the table range).
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.x.len();
        let i = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]);
        let u2 = u * u;
        let u3 = u2 * u;
        let v = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * h * d0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * h * d1;
        let dv = ((6.0 * u2 - 6.0 * u) * y0 + (-6.0 * u2 + 6.0 * u) * y1) / h
            + (3.0 * u2 - 4.0 * u + 1.0) * d0
            + (3.0 * u2 - 2.0 * u) * d1;
        (v, dv)
    }
}

fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

/// Five-point Gauss–Legendre rule on [a, b].
pub fn gauss_legendre(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    const NODES: [f64; 5] =
        [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * NODES.iter().zip(WEIGHTS).map(|(x, w)| w * f(mid + half * x)).sum::<f64>()
}

/// Least-squares line `y = slope·x + intercept`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}
