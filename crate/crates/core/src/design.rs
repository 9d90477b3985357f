//! Quantizer construction from `(N, L, x_max)`.
//!
//! The positive half of the support is split into `L` equal segments. Each
//! segment gets a share of the `(N − 2)/2` granular cells proportional to
//! the rise of the piecewise linear compressor across it; inside a segment
//! the cells are uniform and reproduce at their midpoints. One further
//! level per side, placed at the centroid of the tail beyond `x_max`,
//! covers the overload region. Only the positive side is stored.

use serde::{Deserialize, Serialize};

use crate::compressor::{segment_breaks, PiecewiseLinearCompressor};
use crate::error::{Error, Result};
use crate::gaussmath::{tail_centroid, SourceModel};

/// Largest level count representable by the 16-bit index file format.
pub const MAX_LEVELS: u32 = 1 << 16;

pub const CODEBOOK_FORMAT_VERSION: u32 = 1;

/// Design inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerConfig {
    levels: u32,
    segments: u32,
    x_max: f64,
    source: SourceModel,
}

impl QuantizerConfig {
    /// `levels` is the total number of quantization levels N, `segments`
    /// the number L of segments per side.
    pub fn new(levels: u32, segments: u32, x_max: f64) -> Result<Self> {
        Self::with_source(levels, segments, x_max, SourceModel::UNIT_GAUSSIAN)
    }

    pub fn with_source(
        levels: u32,
        segments: u32,
        x_max: f64,
        source: SourceModel,
    ) -> Result<Self> {
        validate_levels(levels, segments)?;
        if !x_max.is_finite() || x_max <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "x_max must be finite and positive (got {x_max})"
            )));
        }
        let source = SourceModel::new(source.variance(), source.mean())?;
        Ok(Self {
            levels,
            segments,
            x_max,
            source,
        })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn segments(&self) -> u32 {
        self.segments
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn source(&self) -> SourceModel {
        self.source
    }

    /// Granular cells per side, `(N − 2)/2`.
    pub fn granular_cells(&self) -> u32 {
        (self.levels - 2) / 2
    }

    /// Bit rate R = log2 N.
    pub fn rate_bits(&self) -> f64 {
        (self.levels as f64).log2()
    }

    /// Same `(N, L)` at another support threshold.
    pub fn with_x_max(&self, x_max: f64) -> Result<Self> {
        Self::with_source(self.levels, self.segments, x_max, self.source)
    }
}

/// Checks the `(N, L)` pair on its own.
pub fn validate_levels(levels: u32, segments: u32) -> Result<()> {
    if levels < 4 || !levels.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "N must be even and at least 4 (got {levels})"
        )));
    }
    if levels > MAX_LEVELS {
        return Err(Error::InvalidConfig(format!(
            "N must not exceed {MAX_LEVELS} (got {levels})"
        )));
    }
    if segments == 0 {
        return Err(Error::InvalidConfig("L must be at least 1".into()));
    }
    let cells = (levels - 2) / 2;
    if cells < segments {
        return Err(Error::InvalidConfig(format!(
            "(N-2)/2 = {cells} cells cannot cover L = {segments} segments with at least one cell each"
        )));
    }
    Ok(())
}

/// Segment geometry and the per-segment cell split.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentLayout {
    pub segment_breaks: Vec<f64>,
    pub midpoints: Vec<f64>,
    pub cells_per_segment: Vec<u32>,
    pub cell_lengths: Vec<f64>,
    /// Compressed-domain step `c_L(x_max) / ((N − 2)/2)`.
    pub compressed_step: f64,
}

/// Real-valued cell quotas `(N−2)/2 · (c(x_i) − c(x_{i−1})) / c(x_max)`.
pub fn cell_quotas(config: &QuantizerConfig, compressor: &PiecewiseLinearCompressor) -> Vec<f64> {
    let cells = config.granular_cells() as f64;
    let knots = compressor.knot_values();
    let top = knots[knots.len() - 1];
    knots
        .windows(2)
        .map(|w| cells * (w[1] - w[0]) / top)
        .collect()
}

/// Largest-remainder apportionment of `total` seats over `quotas` (which
/// must sum to `total`), with every entry raised to at least `minimum`.
///
/// Entries are floored and the leftover seats go one each to the largest
/// fractional parts, ties to the lower index. When a quota floors below
/// the minimum it is lifted, and the seats are taken back from the entries
/// that sit furthest above their quotas (ties to the higher index).
pub fn largest_remainder(quotas: &[f64], total: u32, minimum: u32) -> Vec<u32> {
    let mut seats: Vec<u32> = quotas
        .iter()
        .map(|&q| (q.max(0.0).floor() as u32).max(minimum))
        .collect();
    let assigned: u32 = seats.iter().sum();

    if assigned < total {
        let mut order: Vec<usize> = (0..quotas.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - seats[a] as f64;
            let rb = quotas[b] - seats[b] as f64;
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &i in order.iter().cycle().take((total - assigned) as usize) {
            seats[i] += 1;
        }
    } else if assigned > total {
        let mut excess = assigned - total;
        while excess > 0 {
            let donor = (0..quotas.len())
                .filter(|&i| seats[i] > minimum)
                .max_by(|&a, &b| {
                    let oa = seats[a] as f64 - quotas[a];
                    let ob = seats[b] as f64 - quotas[b];
                    oa.total_cmp(&ob).then(a.cmp(&b))
                })
                .expect("total covers the per-entry minimum");
            seats[donor] -= 1;
            excess -= 1;
        }
    }
    seats
}

/// Integer cells per segment, summing to `(N − 2)/2`, each at least one.
pub fn allocate_cells(
    config: &QuantizerConfig,
    compressor: &PiecewiseLinearCompressor,
) -> Result<Vec<u32>> {
    validate_levels(config.levels(), config.segments())?;
    if compressor.segments() != config.segments() as usize || compressor.x_max() != config.x_max() {
        return Err(Error::InvalidArgument(
            "compressor was built for a different (L, x_max) than the configuration".into(),
        ));
    }
    let quotas = cell_quotas(config, compressor);
    Ok(largest_remainder(&quotas, config.granular_cells(), 1))
}

fn layout_from_counts(config: &QuantizerConfig, cells_per_segment: Vec<u32>) -> SegmentLayout {
    let l = config.segments();
    let x_max = config.x_max();
    let breaks = segment_breaks(l, x_max);
    let width = x_max / l as f64;
    let midpoints = (1..=l)
        .map(|i| (2 * i - 1) as f64 * x_max / (2.0 * l as f64))
        .collect();
    let cell_lengths = cells_per_segment
        .iter()
        .map(|&n| width / n as f64)
        .collect();
    SegmentLayout {
        segment_breaks: breaks,
        midpoints,
        cells_per_segment,
        cell_lengths,
        compressed_step: x_max / config.granular_cells() as f64,
    }
}

pub fn build_layout(config: &QuantizerConfig) -> Result<SegmentLayout> {
    let compressor = PiecewiseLinearCompressor::new(config.segments(), config.x_max())?;
    let counts = allocate_cells(config, &compressor)?;
    Ok(layout_from_counts(config, counts))
}

/// Complete positive-side codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    config: QuantizerConfig,
    layout: SegmentLayout,
    cell_thresholds: Vec<f64>,
    reproduction_levels: Vec<f64>,
    /// Index of the first cell of each segment in the flat tables.
    segment_offsets: Vec<usize>,
}

impl Codebook {
    /// Builds the tables for an explicit cell split.
    pub fn from_allocation(config: QuantizerConfig, cells_per_segment: Vec<u32>) -> Result<Self> {
        if cells_per_segment.len() != config.segments() as usize {
            return Err(Error::InvalidConfig(format!(
                "expected {} cell counts, got {}",
                config.segments(),
                cells_per_segment.len()
            )));
        }
        if cells_per_segment.contains(&0) {
            return Err(Error::InvalidConfig(
                "every segment needs at least one cell".into(),
            ));
        }
        let sum: u64 = cells_per_segment.iter().map(|&n| n as u64).sum();
        if sum != config.granular_cells() as u64 {
            return Err(Error::InvalidConfig(format!(
                "cell counts sum to {sum}, expected (N-2)/2 = {}",
                config.granular_cells()
            )));
        }
        let layout = layout_from_counts(&config, cells_per_segment);

        let cells = config.granular_cells() as usize;
        let mut thresholds = Vec::with_capacity(cells + 1);
        let mut levels = Vec::with_capacity(cells + 1);
        let mut offsets = Vec::with_capacity(layout.cells_per_segment.len());
        thresholds.push(0.0);
        for (i, (&n, &step)) in layout
            .cells_per_segment
            .iter()
            .zip(&layout.cell_lengths)
            .enumerate()
        {
            offsets.push(levels.len());
            let start = layout.segment_breaks[i];
            for j in 1..=n {
                let upper = if j == n {
                    layout.segment_breaks[i + 1]
                } else {
                    start + j as f64 * step
                };
                thresholds.push(upper);
                levels.push(start + (2 * j - 1) as f64 / 2.0 * step);
            }
        }
        levels.push(tail_centroid(config.x_max()));

        Ok(Self {
            config,
            layout,
            cell_thresholds: thresholds,
            reproduction_levels: levels,
            segment_offsets: offsets,
        })
    }

    pub fn config(&self) -> &QuantizerConfig {
        &self.config
    }

    pub fn layout(&self) -> &SegmentLayout {
        &self.layout
    }

    pub fn levels(&self) -> u32 {
        self.config.levels()
    }

    pub fn x_max(&self) -> f64 {
        self.config.x_max()
    }

    /// Positive-side cell thresholds, `0 = x_0 < … < x_{(N−2)/2} = x_max`.
    pub fn cell_thresholds(&self) -> &[f64] {
        &self.cell_thresholds
    }

    /// All `N/2` positive reproduction levels, the overload level last.
    pub fn reproduction_levels(&self) -> &[f64] {
        &self.reproduction_levels
    }

    pub fn granular_levels(&self) -> &[f64] {
        &self.reproduction_levels[..self.reproduction_levels.len() - 1]
    }

    pub fn overload_level(&self) -> f64 {
        self.reproduction_levels[self.reproduction_levels.len() - 1]
    }

    pub(crate) fn segment_offsets(&self) -> &[usize] {
        &self.segment_offsets
    }

    pub fn to_document(&self) -> CodebookDocument {
        CodebookDocument {
            format_version: CODEBOOK_FORMAT_VERSION,
            levels: self.config.levels(),
            segments: self.config.segments(),
            x_max: self.config.x_max(),
            cells_per_segment: self.layout.cells_per_segment.clone(),
            cell_thresholds: self.cell_thresholds.clone(),
            reproduction_levels: self.reproduction_levels.clone(),
            overload_level: self.overload_level(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("codebook serializes")
    }

    /// Parses and validates a codebook document. Tables are rebuilt from
    /// `(N, L, x_max, cells_per_segment)` and must match the stored ones.
    pub fn from_json(text: &str) -> Result<Self> {
        let probe: serde_json::Value = serde_json::from_str(text)?;
        let version = probe
            .get("format_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Format("missing format_version".into()))?;
        if version != CODEBOOK_FORMAT_VERSION as u64 {
            return Err(Error::VersionMismatch {
                found: version.min(u32::MAX as u64) as u32,
                expected: CODEBOOK_FORMAT_VERSION,
            });
        }
        let doc: CodebookDocument =
            serde_json::from_value(probe).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn from_document(doc: &CodebookDocument) -> Result<Self> {
        let config = QuantizerConfig::new(doc.levels, doc.segments, doc.x_max)?;
        let rebuilt = Codebook::from_allocation(config, doc.cells_per_segment.clone())?;
        let scale = doc.x_max.max(1.0);
        let close = |a: &[f64], b: &[f64]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12 * scale)
        };
        if !close(&doc.cell_thresholds, &rebuilt.cell_thresholds) {
            return Err(Error::Format(
                "cell_thresholds disagree with the design".into(),
            ));
        }
        if !close(&doc.reproduction_levels, &rebuilt.reproduction_levels) {
            return Err(Error::Format(
                "reproduction_levels disagree with the design".into(),
            ));
        }
        if (doc.overload_level - rebuilt.overload_level()).abs() > 1e-12 * scale {
            return Err(Error::Format(
                "overload_level disagrees with the design".into(),
            ));
        }
        Ok(rebuilt)
    }
}

/// Versioned on-disk form of a [`Codebook`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodebookDocument {
    pub format_version: u32,
    #[serde(rename = "N")]
    pub levels: u32,
    #[serde(rename = "L")]
    pub segments: u32,
    pub x_max: f64,
    pub cells_per_segment: Vec<u32>,
    pub cell_thresholds: Vec<f64>,
    pub reproduction_levels: Vec<f64>,
    pub overload_level: f64,
}

pub fn build_codebook(config: &QuantizerConfig) -> Result<Codebook> {
    let layout = build_layout(config)?;
    Codebook::from_allocation(*config, layout.cells_per_segment)
}
