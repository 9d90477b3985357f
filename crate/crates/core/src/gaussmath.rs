//! Closed-form special functions for the zero-mean, unit-variance Gaussian
//! source.
//!
//! Everything the design and analysis layers need reduces to `erf`/`erfc`
//! of a scaled argument: probability mass over an interval, the first and
//! second partial moments of the tail, and integrals of the cube root of
//! the density, which is itself a Gaussian shape with variance 3.
//!
//! `erf`/`erfc` come from `libm`, a pure Rust port of the musl routines, so
//! results are bit-identical on every platform.

use crate::error::{Error, Result};

/// 1/√(2π), the density at the mode.
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_939_946_059_934_381_868_5;

/// (2π)^(−1/6), the cube root of the density at the mode.
pub const CUBEROOT_PDF_AT_MODE: f64 = 0.736_156_281_056_739_343_192_089_134_510_669_925_6;

/// √(6π)/2. Scales `erf(x/√6)` into ∫₀ˣ exp(−t²/6) dt.
const HALF_SQRT_6PI: f64 = 2.170_803_763_674_803_020_232_419_466_460_779_566_9;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_6: f64 = 2.449_489_742_783_178_098_197_284_074_705_891_391_965;

/// Statistical description of the source.
///
/// Only the zero-mean, unit-variance Gaussian is supported; the constructor
/// rejects anything else so a mismatched variance can never reach the
/// design formulas.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SourceModel {
    variance: f64,
    mean: f64,
}

impl SourceModel {
    pub const UNIT_GAUSSIAN: SourceModel = SourceModel {
        variance: 1.0,
        mean: 0.0,
    };

    pub fn new(variance: f64, mean: f64) -> Result<Self> {
        if variance != 1.0 || mean != 0.0 {
            return Err(Error::InvalidConfig(format!(
                "only the unit-variance zero-mean Gaussian source is supported \
                 (got variance {variance}, mean {mean})"
            )));
        }
        Ok(Self::UNIT_GAUSSIAN)
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

impl Default for SourceModel {
    fn default() -> Self {
        Self::UNIT_GAUSSIAN
    }
}

#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Gaussian density p(x).
#[inline]
pub fn pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * libm::exp(-0.5 * x * x)
}

/// p(x)^(1/3) = (2π)^(−1/6)·exp(−x²/6).
#[inline]
pub fn pdf_cuberoot(x: f64) -> f64 {
    CUBEROOT_PDF_AT_MODE * libm::exp(-x * x / 6.0)
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "interval bounds must be finite (got [{a}, {b}])"
        )));
    }
    if a > b {
        return Err(Error::InvalidArgument(format!(
            "interval lower bound {a} exceeds upper bound {b}"
        )));
    }
    Ok(())
}

/// ∫_{a}^{b} exp(−t²/(2σ²))-style mass expressed through erf of `x/scale`,
/// picking the erfc form when both ends sit in the same tail so the
/// difference keeps full relative precision.
fn erf_difference(a: f64, b: f64, scale: f64) -> f64 {
    let (za, zb) = (a / scale, b / scale);
    if za >= 0.0 {
        erfc(za) - erfc(zb)
    } else if zb <= 0.0 {
        erfc(-zb) - erfc(-za)
    } else {
        erf(zb) - erf(za)
    }
}

/// Probability mass ∫ₐᵇ p(x) dx.
pub fn integral_pdf(a: f64, b: f64) -> Result<f64> {
    check_interval(a, b)?;
    Ok(0.5 * erf_difference(a, b, SQRT_2))
}

/// ∫ₐᵇ p(x)^(1/3) dx in closed form.
pub fn integral_pdf_cuberoot(a: f64, b: f64) -> Result<f64> {
    check_interval(a, b)?;
    Ok(CUBEROOT_PDF_AT_MODE * HALF_SQRT_6PI * erf_difference(a, b, SQRT_6))
}

/// ∫ p(x)^(1/3) dx over the whole real line, (2π)^(−1/6)·√(6π).
pub fn total_pdf_cuberoot() -> f64 {
    2.0 * CUBEROOT_PDF_AT_MODE * HALF_SQRT_6PI
}

/// Upper tail mass Q(a) = ∫ₐ^∞ p(x) dx.
#[inline]
pub fn tail_mass(a: f64) -> f64 {
    0.5 * erfc(a / SQRT_2)
}

/// ∫ₐ^∞ x·p(x) dx, which equals p(a) for the unit Gaussian.
#[inline]
pub fn tail_first_moment(a: f64) -> f64 {
    pdf(a)
}

/// ∫ₐ^∞ x²·p(x) dx = a·p(a) + Q(a).
#[inline]
pub fn tail_second_moment(a: f64) -> f64 {
    a * pdf(a) + tail_mass(a)
}

/// Conditional mean of the source beyond `a`.
pub fn tail_centroid(a: f64) -> f64 {
    tail_first_moment(a) / tail_mass(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{quad, rel_err};
    use proptest::prelude::*;

    // 40-digit mpmath values: (x, erf(x), erfc(x)).
    const ERF_TABLE: [(f64, f64, f64); 30] = [
        (
            -1.5,
            -0.966_105_146_475_310_727_07,
            1.966_105_146_475_310_727_1,
        ),
        (
            -1.25,
            -0.922_900_128_256_458_230_14,
            1.922_900_128_256_458_230_1,
        ),
        (
            -1.0,
            -0.842_700_792_949_714_869_34,
            1.842_700_792_949_714_869_3,
        ),
        (
            -0.75,
            -0.711_155_633_653_515_131_6,
            1.711_155_633_653_515_131_6,
        ),
        (
            -0.5,
            -0.520_499_877_813_046_537_68,
            1.520_499_877_813_046_537_7,
        ),
        (
            -0.25,
            -0.276_326_390_168_236_932_99,
            1.276_326_390_168_236_933,
        ),
        (0.0, 0.0, 1.0),
        (
            0.25,
            0.276_326_390_168_236_932_99,
            0.723_673_609_831_763_067_01,
        ),
        (
            0.5,
            0.520_499_877_813_046_537_68,
            0.479_500_122_186_953_462_32,
        ),
        (
            0.75,
            0.711_155_633_653_515_131_6,
            0.288_844_366_346_484_868_4,
        ),
        (
            1.0,
            0.842_700_792_949_714_869_34,
            0.157_299_207_050_285_130_66,
        ),
        (
            1.25,
            0.922_900_128_256_458_230_14,
            0.077_099_871_743_541_769_863,
        ),
        (
            1.5,
            0.966_105_146_475_310_727_07,
            0.033_894_853_524_689_272_933,
        ),
        (
            1.75,
            0.986_671_671_219_182_443_77,
            0.013_328_328_780_817_556_228,
        ),
        (
            2.0,
            0.995_322_265_018_952_734_16,
            0.004_677_734_981_047_265_837_9,
        ),
        (
            2.25,
            0.998_537_283_413_318_848_3,
            0.001_462_716_586_681_151_697_9,
        ),
        (
            2.5,
            0.999_593_047_982_555_041_06,
            0.000_406_952_017_444_958_939_56,
        ),
        (
            2.75,
            0.999_899_378_077_880_363_16,
            0.000_100_621_922_119_636_836_9,
        ),
        (
            3.0,
            0.999_977_909_503_001_414_56,
            0.000_022_090_496_998_585_441_373,
        ),
        (
            3.25,
            0.999_995_697_220_536_324_88,
            4.302_779_463_675_121_830_5e-6,
        ),
        (
            3.5,
            0.999_999_256_901_627_658_59,
            7.430_983_723_414_127_455_2e-7,
        ),
        (
            3.75,
            0.999_999_886_272_743_430_2,
            1.137_272_565_697_966_532_6e-7,
        ),
        (
            4.0,
            0.999_999_984_582_742_099_72,
            1.541_725_790_028_001_885_2e-8,
        ),
        (
            4.25,
            0.999_999_998_149_425_862_61,
            1.850_574_137_386_742_520_1e-9,
        ),
        (
            4.5,
            0.999_999_999_803_383_955_85,
            1.966_160_441_542_887_476_3e-10,
        ),
        (
            4.75,
            0.999_999_999_981_514_952_28,
            1.848_504_772_148_531_088_7e-11,
        ),
        (
            5.0,
            0.999_999_999_998_462_540_21,
            1.537_459_794_428_034_850_2e-12,
        ),
        (
            5.25,
            0.999_999_999_999_886_896_87,
            1.131_031_326_688_715_388_3e-13,
        ),
        (
            5.5,
            0.999_999_999_999_992_642_15,
            7.357_847_917_974_398_063_1e-15,
        ),
        (
            5.75,
            0.999_999_999_999_999_576_79,
            4.232_136_617_425_737_625_9e-16,
        ),
    ];

    #[test]
    fn erf_matches_reference_table() {
        for &(x, want_erf, want_erfc) in &ERF_TABLE {
            assert!((erf(x) - want_erf).abs() <= 1e-15, "erf({x})");
            assert!(rel_err(erfc(x), want_erfc) <= 1e-14, "erfc({x})");
        }
    }

    #[test]
    fn pdf_values() {
        assert!((pdf(0.0) - 0.398_942_280_4).abs() < 1e-10);
        assert!((pdf(1.0) - 0.241_970_724_519_143_35).abs() < 1e-15);
        for i in 0..200 {
            let x = -10.0 + 0.1 * i as f64;
            assert_eq!(pdf(-x), pdf(x));
        }
    }

    #[test]
    fn pdf_cuberoot_values() {
        assert!((pdf_cuberoot(0.0) - 0.736_156_281_056_739_34).abs() < 1e-15);
        assert!((pdf_cuberoot(3.0) - 0.164_258_668_886_462_77).abs() < 1e-15);
        for i in 0..=200 {
            let x = -10.0 + 0.1 * i as f64;
            assert!(rel_err(pdf_cuberoot(x).powi(3), pdf(x)) <= 1e-14, "x = {x}");
        }
    }

    #[test]
    fn integral_pdf_values() {
        assert!((integral_pdf(-1.0, 1.0).unwrap() - 0.682_689_492_137_085_9).abs() < 1e-15);
        assert_eq!(integral_pdf(0.7, 0.7).unwrap(), 0.0);
        assert_eq!(tail_mass(0.0), 0.5);
        assert!(integral_pdf(1.0, -1.0).is_err());
        assert!(integral_pdf(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn integral_pdf_cuberoot_values() {
        assert_eq!(integral_pdf_cuberoot(2.0, 2.0).unwrap(), 0.0);
        let got = integral_pdf_cuberoot(0.0, 4.03).unwrap();
        let oracle = quad(pdf_cuberoot, 0.0, 4.03, 1e-14);
        assert!(rel_err(got, oracle) <= 1e-10);
        assert!((got - 1.566_121_629_014_772_97).abs() < 1e-14);
        assert!(
            (integral_pdf_cuberoot(-2.0, 0.0).unwrap() - integral_pdf_cuberoot(0.0, 2.0).unwrap())
                .abs()
                < 1e-15
        );
        assert!(integral_pdf_cuberoot(1.0, 0.0).is_err());
        assert!((total_pdf_cuberoot() - 3.196_101_651_141_631_667).abs() < 1e-14);
    }

    #[test]
    fn tail_values() {
        assert!(rel_err(tail_mass(4.03), 2.788_842_644_056_394_77e-5) < 1e-13);
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let q = tail_mass(-5.0 + 0.13 * i as f64);
            assert!(q < prev);
            prev = q;
        }
        assert_eq!(tail_first_moment(0.0), FRAC_1_SQRT_2PI);
        assert!((tail_first_moment(3.0) - 0.004_431_848_411_938_007).abs() < 1e-16);
        assert_eq!(tail_second_moment(0.0), 0.5);
        assert!((tail_second_moment(2.0) - 0.130_732_064_974_555_311).abs() < 1e-15);
        assert!((tail_centroid(3.5) - 3.751_391_264_857_699_7).abs() < 1e-12);
    }

    #[test]
    fn tail_moments_match_quadrature() {
        for a in [1.0, 2.0, 4.0] {
            let oracle = quad(|x| x * pdf(x), a, a + 40.0, 1e-14);
            assert!(rel_err(tail_first_moment(a), oracle) <= 1e-10, "a = {a}");
        }
        for a in [1.0, 3.0] {
            let oracle = quad(|x| x * x * pdf(x), a, a + 40.0, 1e-14);
            assert!(rel_err(tail_second_moment(a), oracle) <= 1e-10, "a = {a}");
        }
    }

    #[test]
    fn partition_of_unity() {
        for i in 0..=80 {
            let a = 0.1 * i as f64;
            let total = integral_pdf(-a, a).unwrap() + 2.0 * tail_mass(a);
            assert!((total - 1.0).abs() <= 1e-12, "a = {a}");
        }
    }

    #[test]
    fn source_model_rejects_other_variances() {
        assert!(SourceModel::new(1.0, 0.0).is_ok());
        assert!(SourceModel::new(2.0, 0.0).is_err());
        assert!(SourceModel::new(1.0, 0.5).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn integrals_agree_with_quadrature(u in -8.0f64..8.0, v in -8.0f64..8.0) {
            let (a, b) = if u <= v { (u, v) } else { (v, u) };
            prop_assume!(b - a > 1e-9);
            let mass = integral_pdf(a, b).unwrap();
            prop_assert!(rel_err(mass, quad(pdf, a, b, 1e-14)) <= 1e-10);
            let cube = integral_pdf_cuberoot(a, b).unwrap();
            prop_assert!(rel_err(cube, quad(pdf_cuberoot, a, b, 1e-14)) <= 1e-10);
        }

        #[test]
        fn centroid_lies_beyond_threshold(a in 1e-6f64..8.0) {
            prop_assert!(tail_first_moment(a) / tail_mass(a) > a);
        }
    }
}
