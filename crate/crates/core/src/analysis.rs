//! Distortion, SQNR and support-threshold optimization.
//!
//! Two evaluation routes are kept side by side:
//!
//! * the high-rate formula: `D_g = 2 Σ_i (Δ_i²/12)·P_i` with `P_i` the
//!   segment probability, plus the asymptotic overload term
//!   `D_o = √(2/π)·x_max⁻³·exp(−x_max²/2)`;
//! * an exact closed form that integrates `(x − y)²·p(x)` over every cell
//!   and over the tail through the partial moments of the Gaussian.
//!
//! The high-rate route is what reported numbers use; the exact route is an
//! independent oracle.

use std::fmt;

use serde::Serialize;

use crate::design::{build_codebook, validate_levels, Codebook, QuantizerConfig};
use crate::error::{Error, Result};
use crate::gaussmath::{
    integral_pdf, integral_pdf_cuberoot, pdf, tail_mass, tail_second_moment, total_pdf_cuberoot,
};
use crate::jsonfloat;
use crate::search::scan_then_refine;

/// Search interval and resolution of [`optimize_threshold`].
pub const THRESHOLD_SEARCH_LO: f64 = 1.0;
pub const THRESHOLD_SEARCH_HI: f64 = 8.0;
pub const THRESHOLD_COARSE_STEP: f64 = 0.05;
pub const THRESHOLD_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    HighRateFormula,
    ExactClosedForm,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::HighRateFormula => "HighRateFormula",
            Method::ExactClosedForm => "ExactClosedForm",
            Method::MonteCarlo => "MonteCarlo",
        })
    }
}

/// Granular, overload and total mean squared error with the resulting SQNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionReport {
    pub granular: f64,
    pub overload: f64,
    pub total: f64,
    pub sqnr_db: f64,
    pub method: Method,
}

impl DistortionReport {
    pub fn new(granular: f64, overload: f64, method: Method) -> Result<Self> {
        if !(granular >= 0.0) || !(overload >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "distortions must be non-negative (granular {granular}, overload {overload})"
            )));
        }
        Ok(Self {
            granular,
            overload,
            total: granular + overload,
            sqnr_db: sqnr_db(granular, overload)?,
            method,
        })
    }
}

/// `10·log10(1/(granular + overload))` for the unit-variance source.
pub fn sqnr_db(granular: f64, overload: f64) -> Result<f64> {
    let total = granular + overload;
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "total distortion must be positive and finite (got {total})"
        )));
    }
    Ok(-10.0 * total.log10())
}

/// High-rate granular distortion `2 Σ_i (Δ_i²/12)·P_i`.
pub fn granular_distortion(codebook: &Codebook) -> f64 {
    let layout = codebook.layout();
    let sum: f64 = layout
        .segment_breaks
        .windows(2)
        .zip(&layout.cell_lengths)
        .map(|(w, &step)| {
            let mass = integral_pdf(w[0], w[1]).expect("segment breaks are ordered");
            step * step / 12.0 * mass
        })
        .sum();
    2.0 * sum
}

/// Asymptotic overload distortion `√(2/π)·x_max⁻³·exp(−x_max²/2)`.
pub fn overload_distortion(x_max: f64) -> Result<f64> {
    if !x_max.is_finite() || x_max <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "x_max must be finite and positive (got {x_max})"
        )));
    }
    let sqrt_2_over_pi = 0.797_884_560_802_865_4;
    Ok(sqrt_2_over_pi / x_max.powi(3) * (-0.5 * x_max * x_max).exp())
}

pub fn high_rate_distortion(codebook: &Codebook) -> DistortionReport {
    let granular = granular_distortion(codebook);
    let overload = overload_distortion(codebook.x_max()).expect("codebook x_max is valid");
    DistortionReport::new(granular, overload, Method::HighRateFormula)
        .expect("high-rate distortion is positive")
}

/// ∫ₐᵇ (x − y)²·p(x) dx from the partial moments of the Gaussian.
fn cell_distortion(a: f64, b: f64, y: f64) -> f64 {
    let m0 = integral_pdf(a, b).expect("cell bounds are ordered");
    let (pa, pb) = (pdf(a), pdf(b));
    let m1 = pa - pb;
    let m2 = a * pa - b * pb + m0;
    (m2 - 2.0 * y * m1 + y * y * m0).max(0.0)
}

/// Exact two-sided overload distortion `2∫_{x_max}^∞ (x − y)²·p(x) dx`.
pub fn exact_overload_distortion(x_max: f64, level: f64) -> f64 {
    let m0 = tail_mass(x_max);
    let m1 = pdf(x_max);
    let m2 = tail_second_moment(x_max);
    2.0 * (m2 - 2.0 * level * m1 + level * level * m0).max(0.0)
}

pub fn exact_distortion(codebook: &Codebook) -> DistortionReport {
    let t = codebook.cell_thresholds();
    let granular: f64 = codebook
        .granular_levels()
        .iter()
        .enumerate()
        .map(|(k, &y)| cell_distortion(t[k], t[k + 1], y))
        .sum::<f64>()
        * 2.0;
    let overload = exact_overload_distortion(codebook.x_max(), codebook.overload_level());
    DistortionReport::new(granular, overload, Method::ExactClosedForm)
        .expect("exact distortion is positive")
}

/// Distortion model used as an optimization objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Objective {
    HighRateFormula,
    ExactClosedForm,
}

impl Objective {
    pub fn evaluate(self, codebook: &Codebook) -> DistortionReport {
        match self {
            Objective::HighRateFormula => high_rate_distortion(codebook),
            Objective::ExactClosedForm => exact_distortion(codebook),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::HighRateFormula => Method::HighRateFormula.fmt(f),
            Objective::ExactClosedForm => Method::ExactClosedForm.fmt(f),
        }
    }
}

/// Closed-form support threshold
/// `√(6 ln N)·[1 − ln(ln N)/(4 ln N) − ln(3√π)/(2 ln N)]`.
pub fn support_threshold_formula(levels: u32) -> Result<f64> {
    if levels < 3 {
        return Err(Error::InvalidArgument(format!(
            "the threshold formula needs N >= 3 (got {levels})"
        )));
    }
    let ln_n = (levels as f64).ln();
    let ln_3_sqrt_pi = (3.0 * std::f64::consts::PI.sqrt()).ln();
    Ok((6.0 * ln_n).sqrt() * (1.0 - ln_n.ln() / (4.0 * ln_n) - ln_3_sqrt_pi / (2.0 * ln_n)))
}

/// Builds the `(N, L)` design at `x_max` and evaluates it.
pub fn evaluate_design(
    levels: u32,
    segments: u32,
    x_max: f64,
    objective: Objective,
) -> Result<(Codebook, DistortionReport)> {
    let codebook = build_codebook(&QuantizerConfig::new(levels, segments, x_max)?)?;
    let report = objective.evaluate(&codebook);
    Ok((codebook, report))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdOptimum {
    pub x_max: f64,
    pub report: DistortionReport,
}

/// Support threshold in `[1, 8]` maximizing the SQNR of the full design
/// pipeline under `objective`.
pub fn optimize_threshold(
    levels: u32,
    segments: u32,
    objective: Objective,
) -> Result<ThresholdOptimum> {
    validate_levels(levels, segments)?;
    let sqnr_at = |x: f64| match evaluate_design(levels, segments, x, objective) {
        Ok((_, report)) => report.sqnr_db,
        Err(_) => f64::NEG_INFINITY,
    };
    let best = scan_then_refine(
        sqnr_at,
        THRESHOLD_SEARCH_LO,
        THRESHOLD_SEARCH_HI,
        THRESHOLD_COARSE_STEP,
        THRESHOLD_TOLERANCE,
    );
    let (_, report) = evaluate_design(levels, segments, best.x, objective)?;
    Ok(ThresholdOptimum {
        x_max: best.x,
        report,
    })
}

/// Support convention for the nonlinear optimal compander baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompanderSupport {
    /// Granular integral over the whole real line, no overload term.
    Unbounded,
    /// Granular integral over `[−x_max, x_max]` plus the asymptotic
    /// overload term at `x_max`.
    Threshold(f64),
}

impl CompanderSupport {
    pub fn x_max(&self) -> f64 {
        match *self {
            CompanderSupport::Unbounded => f64::INFINITY,
            CompanderSupport::Threshold(x) => x,
        }
    }
}

/// High-resolution performance of the nonlinear optimal compander with `N`
/// levels: `D_g = (1/(12N²))·(∫ p^(1/3))³`.
pub fn optimal_compander_sqnr(levels: u32, support: CompanderSupport) -> Result<DistortionReport> {
    if levels < 2 {
        return Err(Error::InvalidArgument(format!(
            "the compander needs N >= 2 (got {levels})"
        )));
    }
    let scale = 12.0 * (levels as f64).powi(2);
    let (granular, overload) = match support {
        CompanderSupport::Unbounded => (total_pdf_cuberoot().powi(3) / scale, 0.0),
        CompanderSupport::Threshold(x_max) => {
            let overload = overload_distortion(x_max)?;
            let integral = integral_pdf_cuberoot(-x_max, x_max)?;
            (integral.powi(3) / scale, overload)
        }
    };
    DistortionReport::new(granular, overload, Method::HighRateFormula)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Variant {
    /// PLSCQ at the closed-form support threshold.
    FormulaThreshold,
    /// PLSCQ at the numerically optimized threshold.
    OptimizedThreshold,
    /// Nonlinear optimal compander baseline.
    OptimalCompander,
    /// Single-segment PLSCQ, i.e. the uniform quantizer, at its optimum.
    Uniform,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::FormulaThreshold => "FormulaThreshold",
            Variant::OptimizedThreshold => "OptimizedThreshold",
            Variant::OptimalCompander => "OptimalCompander",
            Variant::Uniform => "Uniform",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// `None` for rows that are not segmented designs.
    #[serde(rename = "L")]
    pub segments: Option<u32>,
    #[serde(serialize_with = "jsonfloat::finite_or_string")]
    pub x_max: f64,
    pub variant: Variant,
    pub report: DistortionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    #[serde(rename = "N")]
    pub levels: u32,
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_CSV_HEADER: &str = "L,variant,x_max,Dg,Do,D,sqnr_db,method";

impl SweepResult {
    pub fn row(&self, segments: Option<u32>, variant: Variant) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.segments == segments && r.variant == variant)
    }

    pub fn sqnr(&self, segments: u32, variant: Variant) -> Option<f64> {
        self.row(Some(segments), variant).map(|r| r.report.sqnr_db)
    }

    pub fn baseline(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.variant == Variant::OptimalCompander)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let l = r.segments.map(|l| l.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                l,
                r.variant,
                r.x_max,
                r.report.granular,
                r.report.overload,
                r.report.total,
                r.report.sqnr_db,
                r.report.method
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub objective: Objective,
    pub baseline: CompanderSupport,
    pub include_uniform: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            objective: Objective::HighRateFormula,
            baseline: CompanderSupport::Unbounded,
            include_uniform: false,
        }
    }
}

fn row_error(segments: u32, variant: Variant, source: Error) -> Error {
    Error::SweepRow {
        segments,
        variant: variant.to_string(),
        source: Box::new(source),
    }
}

/// SQNR against the number of segments: for every `L`, the PLSCQ at the
/// closed-form threshold and at the optimized threshold, followed by the
/// compander baseline.
pub fn run_sweep(levels: u32, segment_list: &[u32], options: &SweepOptions) -> Result<SweepResult> {
    if segment_list.is_empty() {
        return Err(Error::InvalidArgument("the segment list is empty".into()));
    }
    let mut seen = segment_list.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != segment_list.len() {
        return Err(Error::InvalidArgument(
            "the segment list repeats a value".into(),
        ));
    }

    let formula_x = support_threshold_formula(levels)?;
    let mut rows = Vec::with_capacity(2 * segment_list.len() + 2);
    for &l in segment_list {
        let (_, report) = evaluate_design(levels, l, formula_x, options.objective)
            .map_err(|e| row_error(l, Variant::FormulaThreshold, e))?;
        rows.push(SweepRow {
            segments: Some(l),
            x_max: formula_x,
            variant: Variant::FormulaThreshold,
            report,
        });
        let best = optimize_threshold(levels, l, options.objective)
            .map_err(|e| row_error(l, Variant::OptimizedThreshold, e))?;
        rows.push(SweepRow {
            segments: Some(l),
            x_max: best.x_max,
            variant: Variant::OptimizedThreshold,
            report: best.report,
        });
    }

    let report = optimal_compander_sqnr(levels, options.baseline)
        .map_err(|e| row_error(0, Variant::OptimalCompander, e))?;
    rows.push(SweepRow {
        segments: None,
        x_max: options.baseline.x_max(),
        variant: Variant::OptimalCompander,
        report,
    });

    if options.include_uniform {
        let best = optimize_threshold(levels, 1, options.objective)
            .map_err(|e| row_error(1, Variant::Uniform, e))?;
        rows.push(SweepRow {
            segments: None,
            x_max: best.x_max,
            variant: Variant::Uniform,
            report: best.report,
        });
    }

    Ok(SweepResult { levels, rows })
}
