//! Compressor functions: the nonlinear optimal compressor for the Gaussian
//! source and its piecewise linear approximation.
//!
//! The optimal compressor maps `[0, x_max]` onto itself through the
//! normalised running integral of p^(1/3), and is extended to negative
//! inputs by odd symmetry.
//!
//! The piecewise linear model splits `[0, x_max]` into `L` equal segments
//! and, on segment `i`, replaces the slope of the optimal compressor by its
//! value at the segment midpoint `s_i = (2i − 1)·x_max/(2L)`. Cumulative
//! integrals become Riemann sums of `w_i = p^(1/3)(s_i)`, which gives
//!
//! ```text
//! c_i(x) = (Σ_{j<i} w_j·x_max/L + (x − x_{i−1})·w_i) / (Σ_j w_j / L)
//! ```
//!
//! The leading `x_max` of the textbook form cancels one `x_max/L` factor of
//! the denominator sum. Adjacent pieces agree at the segment breaks by
//! construction, so the function is continuous and strictly increasing.
//!
//! Note on the slope formula: differentiating the optimal compressor gives
//! `c'(s) = x_max·p^(1/3)(s) / ∫₀^{x_max} p^(1/3)`. A variant printed with an
//! extra `x_i` factor (and an upper limit of `x_i`) in the denominator is
//! sometimes quoted; it is not the derivative of the optimal compressor and
//! it is inconsistent with the piecewise form above, so it is not used.

use crate::error::{Error, Result};
use crate::gaussmath::{integral_pdf_cuberoot, pdf_cuberoot};

fn check_support(x_max: f64) -> Result<()> {
    if !x_max.is_finite() || x_max <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "support threshold x_max must be finite and positive (got {x_max})"
        )));
    }
    Ok(())
}

fn check_inside(x: f64, x_max: f64) -> Result<()> {
    if !(x.abs() <= x_max) {
        return Err(Error::InvalidArgument(format!(
            "{x} lies outside the support region [-{x_max}, {x_max}]"
        )));
    }
    Ok(())
}

/// Common interface over both compressor models.
pub trait Compressor {
    fn support(&self) -> f64;

    /// Compressor value at `x`, `|x| ≤ support()`.
    fn evaluate(&self, x: f64) -> Result<f64>;
}

/// Nonlinear optimal compressor for the unit Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalCompressor {
    x_max: f64,
    normalization: f64,
}

impl OptimalCompressor {
    pub fn new(x_max: f64) -> Result<Self> {
        check_support(x_max)?;
        let normalization = integral_pdf_cuberoot(0.0, x_max)?;
        Ok(Self {
            x_max,
            normalization,
        })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// ∫₀^{x_max} p^(1/3)(x) dx.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Slope of the compressor at `s`; even in `s` and maximal at zero.
    pub fn derivative(&self, s: f64) -> Result<f64> {
        check_inside(s, self.x_max)?;
        Ok(self.x_max * pdf_cuberoot(s) / self.normalization)
    }
}

impl Compressor for OptimalCompressor {
    fn support(&self) -> f64 {
        self.x_max
    }

    fn evaluate(&self, x: f64) -> Result<f64> {
        check_inside(x, self.x_max)?;
        if x == self.x_max {
            return Ok(self.x_max);
        }
        if x == -self.x_max {
            return Ok(-self.x_max);
        }
        let partial = integral_pdf_cuberoot(0.0, x.abs())?;
        Ok((self.x_max * partial / self.normalization).copysign(x))
    }
}

/// Convenience constructor matching the other builders.
pub fn build_optimal(x_max: f64) -> Result<OptimalCompressor> {
    OptimalCompressor::new(x_max)
}

/// Piecewise linear approximation of the optimal compressor over `L`
/// equidistant segments per side.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearCompressor {
    segments: usize,
    x_max: f64,
    midpoints: Vec<f64>,
    weights: Vec<f64>,
    segment_breaks: Vec<f64>,
    knot_values: Vec<f64>,
    slopes: Vec<f64>,
}

impl PiecewiseLinearCompressor {
    pub fn new(segments: u32, x_max: f64) -> Result<Self> {
        if segments == 0 {
            return Err(Error::InvalidArgument(
                "the number of segments L must be at least 1".into(),
            ));
        }
        check_support(x_max)?;
        let l = segments as usize;
        let lf = segments as f64;

        let segment_breaks = segment_breaks(segments, x_max);
        let midpoints: Vec<f64> = (1..=l)
            .map(|i| (2 * i - 1) as f64 * x_max / (2.0 * lf))
            .collect();
        let weights: Vec<f64> = midpoints.iter().map(|&s| pdf_cuberoot(s)).collect();

        // Left-to-right running sums of w_j, one per knot.
        let mut cumulative = Vec::with_capacity(l + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for &w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        let total = acc;
        let width = x_max / lf;

        let mut knot_values: Vec<f64> = cumulative
            .iter()
            .map(|&c| c * width / (total / lf))
            .collect();
        knot_values[0] = 0.0;
        knot_values[l] = x_max;

        let slopes = weights.iter().map(|&w| w / (total / lf)).collect();

        Ok(Self {
            segments: l,
            x_max,
            midpoints,
            weights,
            segment_breaks,
            knot_values,
            slopes,
        })
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Segment midpoints `s_i`.
    pub fn midpoints(&self) -> &[f64] {
        &self.midpoints
    }

    /// `p^(1/3)(s_i)` for each segment.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `L + 1` equidistant breaks `i·x_max/L`.
    pub fn segment_breaks(&self) -> &[f64] {
        &self.segment_breaks
    }

    /// Compressor value at every segment break.
    pub fn knot_values(&self) -> &[f64] {
        &self.knot_values
    }

    /// Slope of each linear piece.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// 1-based segment holding `|x|`, with zero assigned to segment 1.
    pub fn segment_of(&self, x: f64) -> usize {
        segment_index(x.abs(), self.segments, self.x_max)
    }

    /// Value of the `i`-th linear piece (1-based) at `x`, without any range
    /// check. Used to test continuity at the breaks.
    pub fn piece(&self, i: usize, x: f64) -> f64 {
        self.knot_values[i - 1] + (x - self.segment_breaks[i - 1]) * self.slopes[i - 1]
    }

    /// Expander: the exact inverse of the piecewise linear compressor.
    pub fn invert(&self, y: f64) -> Result<f64> {
        check_inside(y, self.x_max)?;
        let v = y.abs();
        // First knot at or above v, so v lies in (knot[i-1], knot[i]].
        let i = self
            .knot_values
            .partition_point(|&k| k < v)
            .clamp(1, self.segments);
        let x = self.segment_breaks[i - 1] + (v - self.knot_values[i - 1]) / self.slopes[i - 1];
        Ok(x.min(self.x_max).copysign(y))
    }
}

impl Compressor for PiecewiseLinearCompressor {
    fn support(&self) -> f64 {
        self.x_max
    }

    fn evaluate(&self, x: f64) -> Result<f64> {
        check_inside(x, self.x_max)?;
        let v = x.abs();
        let i = self.segment_of(v);
        // Knots are stored exactly; the linear form can be off by an ulp there.
        let y = if v == self.segment_breaks[i] {
            self.knot_values[i]
        } else {
            self.piece(i, v)
        };
        Ok(y.copysign(x))
    }
}

pub fn build_piecewise(segments: u32, x_max: f64) -> Result<PiecewiseLinearCompressor> {
    PiecewiseLinearCompressor::new(segments, x_max)
}

/// Equidistant segment breaks `i·x_max/L`, `i = 0..=L`.
pub(crate) fn segment_breaks(segments: u32, x_max: f64) -> Vec<f64> {
    let lf = segments as f64;
    let mut breaks: Vec<f64> = (0..=segments).map(|i| i as f64 * x_max / lf).collect();
    breaks[segments as usize] = x_max;
    breaks
}

/// `ceil(v·L/x_max)` clamped to `[1, L]`, for `v ≥ 0`.
pub(crate) fn segment_index(v: f64, segments: usize, x_max: f64) -> usize {
    let raw = (v * segments as f64 / x_max).ceil();
    if raw < 1.0 {
        1
    } else if raw > segments as f64 {
        segments
    } else {
        raw as usize
    }
}

/// Both compressors sampled on `points` equally spaced inputs spanning
/// `[−x_max, x_max]`, as `(x, optimal, piecewise)` rows.
pub fn compressor_curve(segments: u32, x_max: f64, points: usize) -> Result<Vec<[f64; 3]>> {
    if points < 2 {
        return Err(Error::InvalidArgument(format!(
            "a curve needs at least 2 points (got {points})"
        )));
    }
    let optimal = OptimalCompressor::new(x_max)?;
    let piecewise = PiecewiseLinearCompressor::new(segments, x_max)?;
    let last = (points - 1) as f64;
    (0..points)
        .map(|k| {
            // Symmetric numerator so the grid is exactly odd about zero.
            let x = x_max * (2.0 * k as f64 - last) / last;
            let x = x.clamp(-x_max, x_max);
            Ok([x, optimal.evaluate(x)?, piecewise.evaluate(x)?])
        })
        .collect()
}

/// Largest |piecewise − optimal| over a uniform grid on `[0, x_max]`.
pub fn sup_norm_gap(segments: u32, x_max: f64, points: usize) -> Result<f64> {
    let optimal = OptimalCompressor::new(x_max)?;
    let piecewise = PiecewiseLinearCompressor::new(segments, x_max)?;
    let last = (points.max(2) - 1) as f64;
    let mut gap: f64 = 0.0;
    for k in 0..points.max(2) {
        let x = (x_max * k as f64 / last).min(x_max);
        gap = gap.max((piecewise.evaluate(x)? - optimal.evaluate(x)?).abs());
    }
    Ok(gap)
}
