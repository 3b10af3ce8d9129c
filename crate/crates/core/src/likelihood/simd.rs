//! Four-wide exp and ln for the inner likelihood loop. Restricted domains,
//! full double precision.

use std::f64::consts::{LOG2_E, SQRT_2};

use wide::{bytemuck::cast, f64x4, u64x4};

const LN2_HI: f64 = 6.93147180369123816490e-01;
const LN2_LO: f64 = 1.90821492927058770002e-10;
const TWO52: f64 = 4503599627370496.0;

/// `exp(x)` for `x <= 0`; arguments below -708 are clamped.
#[inline(always)]
pub(crate) fn exp_nonpos(x: f64x4) -> f64x4 {
    const C: [f64; 14] = [
        1.0,
        1.0,
        1.0 / 2.0,
        1.0 / 6.0,
        1.0 / 24.0,
        1.0 / 120.0,
        1.0 / 720.0,
        1.0 / 5040.0,
        1.0 / 40320.0,
        1.0 / 362880.0,
        1.0 / 3628800.0,
        1.0 / 39916800.0,
        1.0 / 479001600.0,
        1.0 / 6227020800.0,
    ];
    let x = x.max(f64x4::splat(-708.0));
    let k = (x * f64x4::splat(LOG2_E)).round();
    let r = k.mul_neg_add(f64x4::splat(LN2_HI), x);
    let r = k.mul_neg_add(f64x4::splat(LN2_LO), r);
    let mut p = f64x4::splat(C[13]);
    for c in C[..13].iter().rev() {
        p = p.mul_add(r, f64x4::splat(*c));
    }
    let biased: u64x4 = cast(k + f64x4::splat(TWO52 + 1023.0));
    let scale: f64x4 = cast(biased << 52);
    p * scale
}

/// `ln(y)` for finite, normal `y > 0`.
#[inline(always)]
pub(crate) fn ln_pos(y: f64x4) -> f64x4 {
    let bits: u64x4 = cast(y);
    let expo: f64x4 = cast((bits >> 52) | u64x4::splat(0x4330_0000_0000_0000));
    let mut e = expo - f64x4::splat(TWO52 + 1023.0);
    let mut m: f64x4 =
        cast((bits & u64x4::splat(0x000F_FFFF_FFFF_FFFF)) | u64x4::splat(0x3FF0_0000_0000_0000));
    let big = m.simd_gt(f64x4::splat(SQRT_2));
    m = big.bitselect(m * f64x4::splat(0.5), m);
    e = big.bitselect(e + f64x4::ONE, e);
    // atanh series in f = (m-1)/(m+1), |f| < 0.172
    let f = (m - f64x4::ONE) / (m + f64x4::ONE);
    let s = f * f;
    let mut p = f64x4::splat(1.0 / 23.0);
    for k in (0..11).rev() {
        p = p.mul_add(s, f64x4::splat(1.0 / (2 * k + 1) as f64));
    }
    let lnm = f64x4::splat(2.0) * f * p;
    e.mul_add(f64x4::splat(LN2_HI), e.mul_add(f64x4::splat(LN2_LO), lnm))
}
