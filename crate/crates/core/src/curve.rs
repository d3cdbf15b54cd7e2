use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{FrenetFrame, Vec3};

/// A curve sampled on a uniform arclength grid `s_i = s0 + i·h`, with its
/// moving frame and curvature data at every sample.
///
/// `sigma` holds NaN where the sample is degenerate (κ below the floor).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FramedCurve {
    pub s0: f64,
    pub h: f64,
    pub points: Vec<Vec3>,
    pub frames: Vec<FrenetFrame>,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    pub sigma: Vec<f64>,
    pub degenerate: Vec<bool>,
}

impl FramedCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn s(&self, i: usize) -> f64 {
        self.s0 + i as f64 * self.h
    }

    pub fn s_grid(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.s(i)).collect()
    }

    pub fn s_end(&self) -> f64 {
        self.s(self.len().saturating_sub(1))
    }

    /// ‖W‖ = √(κ² + τ²) at sample `i`.
    pub fn omega(&self, i: usize) -> f64 {
        self.kappa[i].hypot(self.tau[i])
    }

    /// Samples with a defined normal and geodesic curvature.
    pub fn is_usable(&self, i: usize) -> bool {
        !self.degenerate[i] && self.sigma[i].is_finite()
    }

    /// Longest contiguous run of usable samples.
    pub fn longest_usable_run(&self) -> Option<Range<usize>> {
        longest_run(self.len(), |i| self.is_usable(i))
    }

    /// Copy restricted to `range`; the grid origin moves with it so sample
    /// positions on the arclength axis are unchanged.
    pub fn slice(&self, range: Range<usize>) -> FramedCurve {
        FramedCurve {
            s0: self.s(range.start),
            h: self.h,
            points: self.points[range.clone()].to_vec(),
            frames: self.frames[range.clone()].to_vec(),
            kappa: self.kappa[range.clone()].to_vec(),
            tau: self.tau[range.clone()].to_vec(),
            sigma: self.sigma[range.clone()].to_vec(),
            degenerate: self.degenerate[range].to_vec(),
        }
    }

    /// Checks the structural invariants: equal column lengths, finite data,
    /// orthonormal frames on non-degenerate samples, and chord lengths
    /// consistent with unit speed.
    pub fn validate(&self, frame_tol: f64) -> Result<()> {
        let n = self.len();
        let lens = [self.frames.len(), self.kappa.len(), self.tau.len(), self.sigma.len(), self.degenerate.len()];
        if lens.iter().any(|&l| l != n) {
            return Err(Error::Format("framed curve columns differ in length".into()));
        }
        if !(self.h > 0.0) || !self.s0.is_finite() {
            return Err(Error::InvalidArgument("grid step must be positive".into()));
        }
        for i in 0..n {
            if !self.points[i].is_finite() || !self.kappa[i].is_finite() || !self.tau[i].is_finite() {
                return Err(Error::NonFinite("framed curve sample"));
            }
            if !self.degenerate[i] && !self.frames[i].is_valid(frame_tol) {
                return Err(Error::FrameCollapse { condition: self.frames[i].orthonormality_error() });
            }
        }
        for i in 1..n {
            let chord = (self.points[i] - self.points[i - 1]).norm();
            if chord > self.h * (1.0 + 1e-3) {
                return Err(Error::NotRegular(format!("chord {chord} exceeds step at s = {}", self.s(i))));
            }
        }
        Ok(())
    }

    /// Middle `fraction` of `range`, trimming equally from both ends.
    pub fn interior(range: Range<usize>, fraction: f64) -> Range<usize> {
        let len = range.len();
        let trim = ((len as f64) * (1.0 - fraction) / 2.0).round() as usize;
        range.start + trim..range.end - trim
    }
}

pub(crate) fn longest_run(n: usize, ok: impl Fn(usize) -> bool) -> Option<Range<usize>> {
    let mut best: Option<Range<usize>> = None;
    let mut start = None;
    for i in 0..=n {
        let good = i < n && ok(i);
        match (good, start) {
            (true, None) => start = Some(i),
            (false, Some(a)) => {
                if best.as_ref().is_none_or(|b| i - a > b.len()) {
                    best = Some(a..i);
                }
                start = None;
            }
            _ => {}
        }
    }
    best
}
