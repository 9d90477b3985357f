//! Operational quantization: sample-to-index encoding, index-to-level
//! decoding, a reproducible Gaussian test source and empirical SQNR.
//!
//! Level indices run over `0..N`. Indices `N/2..N` are the positive levels
//! in ascending order, ending with the overload level; index `k < N/2` is
//! the mirror image of `N − 1 − k`.
//!
//! Cells are half-open on the left, `(x_{k−1}, x_k]`, and zero belongs to
//! the first positive cell.

use std::fs;
use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::compressor::segment_index;
use crate::design::Codebook;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::jsonfloat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LevelIndex(pub u32);

impl LevelIndex {
    pub fn value(self) -> u32 {
        self.0
    }

    /// Index of the level with the opposite sign.
    pub fn mirror(self, levels: u32) -> LevelIndex {
        LevelIndex(levels - 1 - self.0)
    }
}

/// Flat positive-side cell of `v = |x| ≤ x_max`: `0..(N−2)/2`.
fn granular_cell(codebook: &Codebook, v: f64) -> usize {
    let layout = codebook.layout();
    let breaks = &layout.segment_breaks;
    let l = layout.cells_per_segment.len();

    let mut i = segment_index(v, l, codebook.x_max());
    while i > 1 && v <= breaks[i - 1] {
        i -= 1;
    }
    while i < l && v > breaks[i] {
        i += 1;
    }

    let n = layout.cells_per_segment[i - 1] as usize;
    let step = layout.cell_lengths[i - 1];
    let raw = ((v - breaks[i - 1]) / step).ceil();
    let mut j = if raw < 1.0 {
        1
    } else if raw > n as f64 {
        n
    } else {
        raw as usize
    };

    let offset = codebook.segment_offsets()[i - 1];
    let t = codebook.cell_thresholds();
    while j > 1 && v <= t[offset + j - 1] {
        j -= 1;
    }
    while j < n && v > t[offset + j] {
        j += 1;
    }
    offset + j - 1
}

pub fn encode(codebook: &Codebook, x: f64) -> Result<LevelIndex> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cannot encode non-finite sample {x}"
        )));
    }
    let half = codebook.levels() / 2;
    let v = x.abs();
    let k = if v > codebook.x_max() {
        (half - 1) as usize
    } else {
        granular_cell(codebook, v)
    };
    let k = k as u32;
    Ok(if x < 0.0 {
        LevelIndex(half - 1 - k)
    } else {
        LevelIndex(half + k)
    })
}

pub fn decode(codebook: &Codebook, index: LevelIndex) -> Result<f64> {
    let n = codebook.levels();
    let half = n / 2;
    let k = index.0;
    if k >= n {
        return Err(Error::InvalidArgument(format!(
            "level index {k} out of range for N = {n}"
        )));
    }
    let levels = codebook.reproduction_levels();
    Ok(if k >= half {
        levels[(k - half) as usize]
    } else {
        -levels[(half - 1 - k) as usize]
    })
}

/// Deterministic standard normal stream.
///
/// Uniforms come from ChaCha20 (`rand_chacha`) seeded with
/// `seed_from_u64(seed)`; each pair of 53-bit uniforms `u1 ∈ (0, 1]`,
/// `u2 ∈ [0, 1)` becomes two normals by the Box–Muller transform
/// `√(−2 ln u1)·(cos 2πu2, sin 2πu2)`. The transcendental functions are
/// the pure Rust `libm` ones, so streams are identical across platforms.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
    remaining: u64,
}

impl GaussianStream {
    pub fn new(seed: u64, count: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
            spare: None,
            remaining: count,
        }
    }

    fn unit_open_closed(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn unit_closed_open(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl Iterator for GaussianStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        if let Some(z) = self.spare.take() {
            return Some(z);
        }
        let u1 = self.unit_open_closed();
        let u2 = self.unit_closed_open();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = 2.0 * std::f64::consts::PI * u2;
        let (s, c) = libm::sincos(angle);
        self.spare = Some(radius * s);
        Some(radius * c)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

pub fn generate_gaussian(seed: u64, count: u64) -> GaussianStream {
    GaussianStream::new(seed, count)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Empirical signal and noise power of a quantized stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StreamStats {
    pub count: u64,
    pub signal_power: f64,
    pub noise_power: f64,
    /// `+inf` when the stream was reproduced without error.
    #[serde(serialize_with = "jsonfloat::finite_or_string")]
    pub sqnr_db: f64,
}

#[derive(Debug, Clone, Default)]
pub struct StreamAccumulator {
    count: u64,
    signal: CompensatedSum,
    noise: CompensatedSum,
}

impl StreamAccumulator {
    pub fn push(&mut self, x: f64, reproduced: f64) {
        let e = x - reproduced;
        self.count += 1;
        self.signal.add(x * x);
        self.noise.add(e * e);
    }

    pub fn finish(&self) -> Option<StreamStats> {
        if self.count == 0 {
            return None;
        }
        let n = self.count as f64;
        let signal_power = self.signal.value() / n;
        let noise_power = self.noise.value() / n;
        let sqnr_db = if noise_power == 0.0 {
            f64::INFINITY
        } else {
            10.0 * (signal_power / noise_power).log10()
        };
        Some(StreamStats {
            count: self.count,
            signal_power,
            noise_power,
            sqnr_db,
        })
    }
}

/// Quantizes every sample of `samples` and accumulates the error powers.
pub fn measure<I: IntoIterator<Item = f64>>(
    codebook: &Codebook,
    samples: I,
) -> Result<StreamStats> {
    let mut acc = StreamAccumulator::default();
    for x in samples {
        let y = decode(codebook, encode(codebook, x)?)?;
        acc.push(x, y);
    }
    acc.finish()
        .ok_or_else(|| Error::InvalidArgument("no samples to measure".into()))
}

/// Empirical SQNR of `codebook` on `count` seeded Gaussian samples.
pub fn monte_carlo_sqnr(codebook: &Codebook, seed: u64, count: u64) -> Result<StreamStats> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "Monte Carlo needs at least one sample".into(),
        ));
    }
    measure(codebook, generate_gaussian(seed, count))
}

/// On-disk layout of a sample file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    /// Densely packed little-endian f64, no header.
    Binary,
    /// One decimal number per line.
    Text,
}

pub fn read_samples(path: &Path, format: SampleFormat) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, 0, e))?;
    let malformed = |record: u64, reason: String| Error::MalformedSample {
        path: path.to_path_buf(),
        record,
        reason,
    };
    let samples = match format {
        SampleFormat::Binary => {
            let whole = bytes.len() - bytes.len() % 8;
            if whole != bytes.len() {
                return Err(Error::io(
                    path,
                    whole as u64,
                    std::io::Error::new(
                        std::io::ErrorKind::UnexpectedEof,
                        "truncated 8-byte sample",
                    ),
                ));
            }
            bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect::<Vec<f64>>()
        }
        SampleFormat::Text => {
            let text = String::from_utf8(bytes).map_err(|e| {
                let offset = e.utf8_error().valid_up_to() as u64;
                Error::io(
                    path,
                    offset,
                    std::io::Error::new(std::io::ErrorKind::InvalidData, "not UTF-8 text"),
                )
            })?;
            let mut out = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let value: f64 = line
                    .parse()
                    .map_err(|_| malformed(out.len() as u64, format!("cannot parse {line:?}")))?;
                out.push(value);
            }
            out
        }
    };
    if let Some(record) = samples.iter().position(|x| !x.is_finite()) {
        return Err(malformed(
            record as u64,
            format!("non-finite value {}", samples[record]),
        ));
    }
    Ok(samples)
}

pub fn write_samples(path: &Path, samples: &[f64], format: SampleFormat) -> Result<()> {
    let bytes = match format {
        SampleFormat::Binary => samples.iter().flat_map(|x| x.to_le_bytes()).collect(),
        SampleFormat::Text => {
            let mut s = String::with_capacity(samples.len() * 20);
            for x in samples {
                s.push_str(&format!("{x}\n"));
            }
            s.into_bytes()
        }
    };
    write_atomic(path, &bytes)
}

/// Reads a little-endian u16 index file.
pub fn read_indices(path: &Path) -> Result<Vec<u16>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, 0, e))?;
    if bytes.len() % 2 != 0 {
        return Err(Error::io(
            path,
            (bytes.len() - 1) as u64,
            std::io::Error::new(std::io::ErrorKind::UnexpectedEof, "truncated 2-byte index"),
        ));
    }
    Ok(bytes
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]))
        .collect())
}

pub fn write_indices(path: &Path, indices: &[u16]) -> Result<()> {
    let bytes: Vec<u8> = indices.iter().flat_map(|i| i.to_le_bytes()).collect();
    write_atomic(path, &bytes)
}

/// Encodes a sample file into an index file; returns the stream statistics.
pub fn quantize_file(
    codebook: &Codebook,
    input: &Path,
    output: &Path,
    format: SampleFormat,
) -> Result<StreamStats> {
    let samples = read_samples(input, format)?;
    if samples.is_empty() {
        return Err(Error::EmptyInput(input.to_path_buf()));
    }
    let mut indices = Vec::with_capacity(samples.len());
    let mut acc = StreamAccumulator::default();
    for &x in &samples {
        let idx = encode(codebook, x)?;
        acc.push(x, decode(codebook, idx)?);
        indices.push(idx.0 as u16);
    }
    write_indices(output, &indices)?;
    Ok(acc.finish().expect("non-empty input"))
}

/// Decodes an index file into a sample file; returns the sample count.
pub fn dequantize_file(
    codebook: &Codebook,
    input: &Path,
    output: &Path,
    format: SampleFormat,
) -> Result<usize> {
    let indices = read_indices(input)?;
    if indices.is_empty() {
        return Err(Error::EmptyInput(input.to_path_buf()));
    }
    let samples = indices
        .iter()
        .enumerate()
        .map(|(record, &i)| {
            decode(codebook, LevelIndex(i as u32)).map_err(|e| Error::MalformedSample {
                path: input.to_path_buf(),
                record: record as u64,
                reason: e.to_string(),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    write_samples(output, &samples, format)?;
    Ok(samples.len())
}
