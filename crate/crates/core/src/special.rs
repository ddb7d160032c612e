//! Elementary functions with the cancellation-prone cases handled by series.

/// Below this argument `coth x - 1/x` is summed from its Laurent series.
const COTH_SERIES_CUTOFF: f64 = 0.25;

// 2^{2n} B_{2n} / (2n)! for n = 1..7.
const COTH_SERIES: [f64; 7] = [
    1.0 / 3.0,
    -1.0 / 45.0,
    2.0 / 945.0,
    -1.0 / 4725.0,
    2.0 / 93555.0,
    -1382.0 / 638512875.0,
    4.0 / 18243225.0,
];

/// `coth x - 1/x` for `x > 0`, accurate to a few ulps near the origin.
pub fn coth_minus_inv(x: f64) -> f64 {
    if x < COTH_SERIES_CUTOFF {
        let x2 = x * x;
        let mut acc = 0.0;
        for c in COTH_SERIES.iter().rev() {
            acc = acc * x2 + c;
        }
        acc * x
    } else {
        coth(x) - 1.0 / x
    }
}

pub fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

/// `ln(sinh x)` for `x > 0` without overflow for large `x`.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `ln(2 cosh x)` without overflow.
pub fn ln_two_cosh(x: f64) -> f64 {
    let x = x.abs();
    x + (-2.0 * x).exp().ln_1p()
}

/// `(1 - s)^b - 1` computed without cancellation for small `s`.
pub fn pow1m_minus_one(s: f64, b: f64) -> f64 {
    (b * (-s).ln_1p()).exp_m1()
}

/// `x^e` with the exponent-zero case returned as exactly 1.
pub fn pow_or_one(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}
