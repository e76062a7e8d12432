//! Standard normal kernel: density, distribution function and quantile.
//!
//! The distribution function is built on W. J. Cody's rational Chebyshev
//! approximations of `erfc` (Math. Comp. 1969, as revised in CALERF, 1990),
//! always evaluating the smaller tail directly. The quantile is Wichura's
//! AS 241 (`PPND16`) followed by a single Newton step against [`std_cdf`].

// Published coefficients are kept as printed.
#![allow(clippy::excessive_precision)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_95;
const SQRT_PI: f64 = 1.772_453_850_905_516_027_3;

/// Beyond this |x| the distribution function saturates at 0 or 1.
pub const SATURATION: f64 = 38.0;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const HALF: Probability = Probability(0.5);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || !(0.0..=1.0).contains(&value) {
            return Err(Error::domain(format!("probability {value} outside [0, 1]")));
        }
        Ok(Probability(value))
    }

    /// Clamps into `[0, 1]`; for results of arithmetic already known to be
    /// probabilities up to rounding.
    pub(crate) fn saturating(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        Probability(value.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Probability(1.0 - self.0)
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

fn check_arg(x: f64, what: &str) -> Result<()> {
    if x.is_nan() {
        Err(Error::domain(format!("{what}: NaN argument")))
    } else {
        Ok(())
    }
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> Result<f64> {
    check_arg(x, "norm_pdf")?;
    Ok(std_pdf(x))
}

/// Standard normal distribution function Φ(x).
pub fn norm_cdf(x: f64) -> Result<Probability> {
    check_arg(x, "norm_cdf")?;
    Ok(Probability(std_cdf(x)))
}

/// Upper tail 1 − Φ(x), evaluated without cancellation.
pub fn norm_sf(x: f64) -> Result<Probability> {
    check_arg(x, "norm_sf")?;
    Ok(Probability(std_cdf(-x)))
}

/// Inverse of Φ on the open interval (0, 1).
pub fn norm_quantile(p: Probability) -> Result<f64> {
    let p = p.value();
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::domain(format!("norm_quantile: p = {p} must lie strictly inside (0, 1)")));
    }
    Ok(std_quantile(p))
}

/// Unchecked density.
#[inline]
pub fn std_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Unchecked Φ(x). NaN propagates.
pub fn std_cdf(x: f64) -> f64 {
    if x < -SATURATION {
        0.0
    } else if x > SATURATION {
        1.0
    } else if x <= 0.0 {
        0.5 * erfc_nonneg(-x * std::f64::consts::FRAC_1_SQRT_2)
    } else {
        1.0 - 0.5 * erfc_nonneg(x * std::f64::consts::FRAC_1_SQRT_2)
    }
}

/// Unchecked Φ⁻¹(p) for 0 < p < 1.
pub fn std_quantile(p: f64) -> f64 {
    if p > 0.5 {
        // 1 - p is exact here
        -lower_quantile(1.0 - p)
    } else {
        lower_quantile(p)
    }
}

fn lower_quantile(p: f64) -> f64 {
    let x = ppnd16(p);
    if !x.is_finite() {
        return x;
    }
    let density = std_pdf(x);
    if density == 0.0 {
        return x;
    }
    x - (std_cdf(x) - p) / density
}

const THRESH: f64 = 0.46875;

/// erfc(y) for y ≥ 0 (Cody's CALERF, three intervals).
pub(crate) fn erfc_nonneg(y: f64) -> f64 {
    const XBIG: f64 = 26.543;
    const A: [f64; 5] = [
        3.161_123_743_870_565_60e0,
        1.138_641_541_510_501_56e2,
        3.774_852_376_853_020_21e2,
        3.209_377_589_138_469_47e3,
        1.857_777_061_846_031_53e-1,
    ];
    const B: [f64; 4] = [
        2.360_129_095_234_412_09e1,
        2.440_246_379_344_441_73e2,
        1.282_616_526_077_372_28e3,
        2.844_236_833_439_170_62e3,
    ];
    debug_assert!(y >= 0.0 || y.is_nan());
    if y <= THRESH {
        let ysq = y * y;
        let mut num = A[4] * ysq;
        let mut den = ysq;
        for i in 0..3 {
            num = (num + A[i]) * ysq;
            den = (den + B[i]) * ysq;
        }
        return 1.0 - y * (num + A[3]) / (den + B[3]);
    }
    if y >= XBIG {
        return 0.0;
    }
    // exp(-y^2) split so the exponent is exact
    let head = (y * 16.0).trunc() / 16.0;
    let del = (y - head) * (y + head);
    (-head * head).exp() * (-del).exp() * erfcx_large(y)
}

/// Scaled complement e^{y²}·erfc(y) for y ≥ 0.
pub(crate) fn erfcx_nonneg(y: f64) -> f64 {
    if y <= THRESH {
        (y * y).exp() * erfc_nonneg(y)
    } else {
        erfcx_large(y)
    }
}

// e^{y²}·erfc(y) for y > THRESH, before the exponential is applied.
fn erfcx_large(y: f64) -> f64 {
    const C: [f64; 9] = [
        5.641_884_969_886_700_89e-1,
        8.883_149_794_388_375_94e0,
        6.611_919_063_714_162_95e1,
        2.986_351_381_974_001_31e2,
        8.819_522_212_417_690_90e2,
        1.712_047_612_634_070_58e3,
        2.051_078_377_826_071_47e3,
        1.230_339_354_797_997_25e3,
        2.153_115_354_744_038_46e-8,
    ];
    const D: [f64; 8] = [
        1.574_492_611_070_983_47e1,
        1.176_939_508_913_124_99e2,
        5.371_811_018_620_098_58e2,
        1.621_389_574_566_690_19e3,
        3.290_799_235_733_459_63e3,
        4.362_619_090_143_247_16e3,
        3.439_367_674_143_721_64e3,
        1.230_339_354_803_749_42e3,
    ];

    if y <= 4.0 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        (num + C[7]) / (den + D[7])
    } else {
        let inv = 1.0 / (y * y);
        (FRAC_1_SQRT_PI - inv * asymptotic_rational(inv)) / y
    }
}

// Cody's rational term for y > 4 in powers of 1/y².
fn asymptotic_rational(inv: f64) -> f64 {
    const P: [f64; 6] = [
        3.053_266_349_612_323_44e-1,
        3.603_448_999_498_044_39e-1,
        1.257_817_261_112_292_46e-1,
        1.608_378_514_874_227_66e-2,
        6.587_491_615_298_378_03e-4,
        1.631_538_713_730_209_78e-2,
    ];
    const Q: [f64; 5] = [
        2.568_520_192_289_822_42e0,
        1.872_952_849_923_460_47e0,
        5.279_051_029_514_284_12e-1,
        6.051_834_131_244_131_91e-2,
        2.335_204_976_268_691_85e-3,
    ];
    let mut num = P[5] * inv;
    let mut den = inv;
    for i in 0..4 {
        num = (num + P[i]) * inv;
        den = (den + Q[i]) * inv;
    }
    (num + P[4]) / (den + Q[4])
}

/// Mills ratio Φ(−a)/φ(a) for a ≥ 0, free of the e^{−a²/2} factor.
pub(crate) fn mills_ratio(a: f64) -> f64 {
    const SQRT_FRAC_PI_2: f64 = 1.253_314_137_315_500_3;
    SQRT_FRAC_PI_2 * erfcx_nonneg(a * std::f64::consts::FRAC_1_SQRT_2)
}

/// −R'(a) = 1 − a·R(a) for a ≥ 0, without the cancellation of the direct
/// form for large a.
pub(crate) fn mills_slope(a: f64) -> f64 {
    let y = a * std::f64::consts::FRAC_1_SQRT_2;
    if y > 4.0 {
        let inv = 1.0 / (y * y);
        SQRT_PI * inv * asymptotic_rational(inv)
    } else {
        1.0 - a * mills_ratio(a)
    }
}

/// Wichura's AS 241 for 0 < p ≤ 0.5.
fn ppnd16(p: f64) -> f64 {
    const SPLIT1: f64 = 0.425;
    const SPLIT2: f64 = 5.0;
    const CONST1: f64 = 0.180625;
    const CONST2: f64 = 1.6;

    const A: [f64; 8] = [
        3.387_132_872_796_366_608_0e0,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083_0e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061_0e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561_0e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34e0,
        4.630_337_846_156_545_295_90e0,
        5.769_497_221_460_691_405_50e0,
        3.647_848_324_763_204_605_04e0,
        1.270_458_252_452_368_382_58e0,
        2.417_807_251_774_506_117_70e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_40e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87e0,
        1.676_384_830_183_803_849_40e0,
        6.897_673_349_851_000_045_50e-1,
        1.481_039_764_274_800_745_90e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946_00e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_20e0,
        5.463_784_911_164_114_369_90e0,
        1.784_826_539_917_291_335_80e0,
        2.965_605_718_285_048_912_30e-1,
        2.653_218_952_657_612_309_30e-2,
        1.242_660_947_388_078_438_60e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_90e-1,
        1.369_298_809_227_358_053_10e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591_00e-4,
        1.846_318_317_510_054_681_80e-5,
        1.421_511_758_316_445_888_70e-7,
        2.044_263_103_389_939_785_64e-15,
    ];

    fn horner(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
    }

    let q = p - 0.5;
    if q.abs() <= SPLIT1 {
        let r = CONST1 - q * q;
        return q * horner(&A, r) / horner(&B, r);
    }
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let r = (-p.ln()).sqrt();
    let x = if r <= SPLIT2 {
        let r = r - CONST2;
        horner(&C, r) / horner(&D, r)
    } else {
        let r = r - SPLIT2;
        horner(&E, r) / horner(&F, r)
    };
    -x
}
