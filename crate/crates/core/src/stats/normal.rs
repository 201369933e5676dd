//! Standard normal distribution function and quantile.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// `Φ(z)`.
pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `1 - Φ(z)` without cancellation for large `z`.
pub fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Wichura's AS 241 (PPND16), accurate to about 1e-16 relative.
fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((2509.080_928_730_122_7 * r + 33430.575_583_588_128) * r + 67265.770_927_008_7) * r
                + 45921.953_931_549_87)
                * r
                + 13731.693_765_509_461)
                * r
                + 1971.590_950_306_551_3)
                * r
                + 133.141_667_891_784_38)
                * r
                + 3.387_132_872_796_366_5)
            / (((((((5226.495_278_852_545 * r + 28729.085_735_721_943) * r + 39307.895_800_092_71) * r
                + 21213.794_301_586_597)
                * r
                + 5394.196_021_424_751)
                * r
                + 687.187_007_492_057_9)
                * r
                + 42.313_330_701_600_91)
                * r
                + 1.0);
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        (((((((7.745_450_142_783_414e-4 * r + 0.022_723_844_989_269_184) * r + 0.241_780_725_177_450_6) * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5)
            / (((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
                + 0.015_198_666_563_616_457)
                * r
                + 0.148_103_976_427_480_08)
                * r
                + 0.689_767_334_985_1)
                * r
                + 1.676_384_830_183_803_8)
                * r
                + 2.053_191_626_637_759)
                * r
                + 1.0)
    } else {
        r -= 5.0;
        (((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 0.026_532_189_526_576_124)
            * r
            + 0.296_560_571_828_504_9)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103)
            / (((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
                + 1.846_318_317_510_054_8e-5)
                * r
                + 7.868_691_311_456_133e-4)
                * r
                + 0.014_875_361_290_850_615)
                * r
                + 0.136_929_880_922_735_8)
                * r
                + 0.599_832_206_555_888)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// `z_p` with `Φ(z_p) = p`.
pub fn quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("quantile of p = {p}")));
    }
    Ok(ppnd16(p))
}

/// `z_{1-2^e}` for `e < 0`, computed from the lower tail so that tiny
/// probabilities such as `2^-48` keep full precision.
pub fn upper_quantile_log2(e: f64) -> Result<f64> {
    if !(e < 0.0) {
        return Err(Error::InvalidParameter(format!("log2 probability {e} must be negative")));
    }
    Ok(-ppnd16(e.exp2()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_points() {
        assert_eq!(quantile(0.5).unwrap(), 0.0);
        assert!((quantile(0.975).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
        assert!((upper_quantile_log2(-10.0).unwrap() - 3.097).abs() < 0.01);
        assert!((upper_quantile_log2(-2.7).unwrap() - 1.0).abs() < 0.05);
        assert!(quantile(0.0).is_err() && quantile(1.0).is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        for k in 1..=16 {
            for p in [10f64.powi(-k), 1.0 - 10f64.powi(-k).max(1e-16), 0.3, 0.7] {
                let z = quantile(p).unwrap();
                let back = if p < 0.5 { cdf(z) } else { 1.0 - upper_tail(z) };
                assert!((back - p).abs() <= 1e-8, "p={p} z={z} back={back}");
            }
        }
    }
}
