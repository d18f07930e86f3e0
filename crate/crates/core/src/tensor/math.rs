//! Branch-free logistic and hyperbolic tangent.
//!
//! Both are built on one `expm1` kernel for non-positive arguments: a
//! round-to-nearest reduction `y = k ln2 + r` with `|r| <= ln2/2`, a degree-13
//! Taylor polynomial for `e^r - 1`, and an exact power-of-two scale assembled
//! from bits. Results are within a few ulp of the correctly rounded values.
//! The slice versions produce the same bits as the scalar ones; they only
//! give the compiler room to vectorize.

const LOG2E: f64 = std::f64::consts::LOG2_E;
const LN2_HI: f64 = 0.693_147_180_369_123_8;
const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;
/// `1.5 * 2^52`: adding it rounds to an integer held in the low mantissa bits.
const ROUNDER: f64 = 6_755_399_441_055_744.0;
/// Below this, `e^y` is under the smallest normal double and is flushed to 0.
const EXP_FLOOR: f64 = -708.0;
/// `tanh(20)` rounds to 1.
const TANH_CAP: f64 = 20.0;

const INV_FACT: [f64; 12] = [
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
    1.0 / 40320.0,
    1.0 / 362_880.0,
    1.0 / 3_628_800.0,
    1.0 / 39_916_800.0,
    1.0 / 479_001_600.0,
    1.0 / 6_227_020_800.0,
];

/// Returns `(2^k, e^r - 1)` with `y = k ln2 + r`, for `EXP_FLOOR <= y <= 0`.
#[inline(always)]
fn reduce(y: f64) -> (f64, f64) {
    let t = y * LOG2E + ROUNDER;
    let kf = t - ROUNDER;
    let k = (t.to_bits() as i64).wrapping_sub(ROUNDER.to_bits() as i64);
    let r = (y - kf * LN2_HI) - kf * LN2_LO;
    let mut p = INV_FACT[11];
    for c in INV_FACT[..11].iter().rev() {
        p = p * r + c;
    }
    let q = r * (1.0 + r * p);
    let scale = f64::from_bits((k.wrapping_add(1023) as u64) << 52);
    (scale, q)
}

#[inline(always)]
fn exp_nonpositive(y: f64) -> f64 {
    let (scale, q) = reduce(if y < EXP_FLOOR { EXP_FLOOR } else { y });
    let e = scale + scale * q;
    if y < EXP_FLOOR {
        0.0
    } else {
        e
    }
}

/// Logistic function `1 / (1 + e^-x)`, evaluated through `e^-|x|` so nothing overflows.
#[inline(always)]
pub fn sigmoid(x: f64) -> f64 {
    let e = exp_nonpositive(-x.abs());
    let den = 1.0 + e;
    if x >= 0.0 {
        1.0 / den
    } else {
        e / den
    }
}

/// `tanh(|x|) = -m / (2 + m)` with `m = expm1(-2|x|)`, which keeps full
/// relative precision near zero.
#[inline(always)]
pub fn tanh(x: f64) -> f64 {
    let a = x.abs();
    let y = -2.0 * if a > TANH_CAP { TANH_CAP } else { a };
    let (scale, q) = reduce(y);
    let m = (scale - 1.0) + scale * q;
    (-m / (2.0 + m)).copysign(x)
}

macro_rules! in_place {
    ($name:ident, $f:ident, $avx512:ident, $avx2:ident) => {
        pub fn $name(xs: &mut [f64]) {
            #[cfg(target_arch = "x86_64")]
            {
                if std::is_x86_feature_detected!("avx512f") {
                    // SAFETY: the feature was detected at runtime.
                    unsafe { $avx512(xs) };
                    return;
                }
                if std::is_x86_feature_detected!("avx2") {
                    // SAFETY: the feature was detected at runtime.
                    unsafe { $avx2(xs) };
                    return;
                }
            }
            for x in xs {
                *x = $f(*x);
            }
        }

        #[cfg(target_arch = "x86_64")]
        #[target_feature(enable = "avx512f")]
        unsafe fn $avx512(xs: &mut [f64]) {
            for x in xs {
                *x = $f(*x);
            }
        }

        #[cfg(target_arch = "x86_64")]
        #[target_feature(enable = "avx2")]
        unsafe fn $avx2(xs: &mut [f64]) {
            for x in xs {
                *x = $f(*x);
            }
        }
    };
}

in_place!(sigmoid_in_place, sigmoid, sigmoid_avx512, sigmoid_avx2);
in_place!(tanh_in_place, tanh, tanh_avx512, tanh_avx2);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ulps(a: f64, b: f64) -> u64 {
        if a == b {
            return 0;
        }
        (a.to_bits() as i64).abs_diff(b.to_bits() as i64)
    }

    #[test]
    fn special_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert_eq!(sigmoid(f64::NEG_INFINITY), 0.0);
        assert_eq!(sigmoid(f64::INFINITY), 1.0);
        assert!(sigmoid(f64::NAN).is_nan());
        assert_eq!(tanh(0.0).to_bits(), 0.0f64.to_bits());
        assert_eq!(tanh(-0.0).to_bits(), (-0.0f64).to_bits());
        assert_eq!(tanh(30.0), 1.0);
        assert_eq!(tanh(f64::NEG_INFINITY), -1.0);
        assert!(tanh(f64::NAN).is_nan());
        assert_eq!(tanh(1e-300), 1e-300);
    }

    #[test]
    fn slices_match_scalars() {
        let xs: Vec<f64> = (0..1003).map(|i| (i as f64 - 501.0) * 0.0731).collect();
        let mut s = xs.clone();
        sigmoid_in_place(&mut s);
        let mut t = xs.clone();
        tanh_in_place(&mut t);
        for (i, &x) in xs.iter().enumerate() {
            assert_eq!(s[i].to_bits(), sigmoid(x).to_bits());
            assert_eq!(t[i].to_bits(), tanh(x).to_bits());
        }
    }

    proptest! {
        #[test]
        fn tanh_close_to_libm(x in -25.0f64..25.0) {
            prop_assert!(ulps(tanh(x), x.tanh()) <= 4, "{x}: {} vs {}", tanh(x), x.tanh());
        }

        #[test]
        fn tanh_tiny_arguments(x in -1e-3f64..1e-3) {
            prop_assert!(ulps(tanh(x), x.tanh()) <= 4);
        }

        #[test]
        fn sigmoid_close_to_reference(x in -700.0f64..40.0) {
            let reference = if x >= 0.0 { 1.0 / (1.0 + (-x).exp()) } else { x.exp() / (1.0 + x.exp()) };
            prop_assert!(ulps(sigmoid(x), reference) <= 4, "{x}");
        }
    }
}
