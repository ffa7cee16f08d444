//! Special functions: log-gamma, regularized incomplete gamma, erf, digamma
//! and trigamma.
//!
//! The incomplete gamma kernel is the single special-function primitive; the
//! error function and the normal CDF are expressed through it.

use crate::error::{domain, Error, Result};

const MAX_ITER: usize = 10_000;
const REL_TOL: f64 = 1e-15;
const TINY: f64 = 1e-300;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Returns `(P(a, x), Q(a, x))`, the regularized lower and upper incomplete
/// gamma functions. Whichever side is computed directly carries the full
/// relative precision; the other is its complement.
pub fn regularized_gamma_pair(a: f64, x: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain(format!("incomplete gamma shape must be positive, got {a}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(domain(format!("incomplete gamma argument must be non-negative, got {x}")));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        let p = lower_series(a, x, log_prefactor)?;
        Ok((p, 1.0 - p))
    } else {
        let q = upper_continued_fraction(a, x, log_prefactor)?;
        Ok((1.0 - q, q))
    }
}

/// Regularized lower incomplete gamma `P(a, x) = γ(a, x) / Γ(a)`.
pub fn regularized_lower_gamma(a: f64, x: f64) -> Result<f64> {
    regularized_gamma_pair(a, x).map(|(p, _)| p)
}

/// Regularized upper incomplete gamma `Q(a, x) = Γ(a, x) / Γ(a)`.
pub fn regularized_upper_gamma(a: f64, x: f64) -> Result<f64> {
    regularized_gamma_pair(a, x).map(|(_, q)| q)
}

fn lower_series(a: f64, x: f64, log_prefactor: f64) -> Result<f64> {
    let mut denom = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if term.abs() < sum.abs() * REL_TOL {
            return Ok((sum.ln() + log_prefactor).exp().min(1.0));
        }
    }
    Err(Error::NonConvergence { routine: "incomplete gamma series", iterations: MAX_ITER })
}

// Modified Lentz evaluation of the continued fraction for Γ(a, x).
fn upper_continued_fraction(a: f64, x: f64, log_prefactor: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < REL_TOL {
            return Ok((h.ln() + log_prefactor).exp().min(1.0));
        }
    }
    Err(Error::NonConvergence { routine: "incomplete gamma continued fraction", iterations: MAX_ITER })
}

/// Error function, via `erf(x) = sign(x) P(1/2, x²)`.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let p = regularized_lower_gamma(0.5, x * x).expect("x² is a valid argument");
    if x < 0.0 {
        -p
    } else {
        p
    }
}

/// Complementary error function, via `erfc(x) = Q(1/2, x²)` for `x ≥ 0`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let q = regularized_upper_gamma(0.5, x * x).expect("x² is a valid argument");
    if x < 0.0 {
        2.0 - q
    } else {
        q
    }
}

const SHIFT_TO: f64 = 10.0;

/// `ln(x) − ψ(x)` for `x > 0`, evaluated without cancellation for large `x`.
///
/// This is the left-hand side of the Gamma shape likelihood equation.
pub fn ln_minus_digamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    // ψ(x) = ψ(x + k) − Σ_{j<k} 1/(x + j)
    let mut y = x;
    let mut shift_sum = 0.0;
    while y < SHIFT_TO {
        shift_sum += 1.0 / y;
        y += 1.0;
    }
    let k = y - x;
    // ln(x) − ln(y) = −ln(1 + k/x)
    let log_gap = if k == 0.0 { 0.0 } else { -(k / x).ln_1p() };
    log_gap + ln_minus_digamma_asymptotic(y) + shift_sum
}

// ln y − ψ(y) = 1/(2y) + Σ B_{2k} / (2k y^{2k})
fn ln_minus_digamma_asymptotic(y: f64) -> f64 {
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32_760.0))))));
    0.5 * inv + series
}

/// Digamma function ψ(x) for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    x.ln() - ln_minus_digamma(x)
}

/// Trigamma function ψ'(x) for `x > 0`.
pub fn trigamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut y = x;
    let mut acc = 0.0;
    while y < SHIFT_TO {
        acc += 1.0 / (y * y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    // 1/y + 1/(2y²) + Σ B_{2k} / y^{2k+1}
    let series = inv2
        * inv
        * (1.0 / 6.0
            - inv2
                * (1.0 / 30.0
                    - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0 - inv2 * (691.0 / 2730.0))))));
    acc + inv + 0.5 * inv2 + series
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(lo + i as f64 * h);
        }
        s * h / 3.0
    }

    // Composite Simpson on the unnormalized Gamma(a, 1) density, normalized
    // by its own quadrature: shares nothing with the series / continued
    // fraction path or with ln_gamma. The head [0, x] uses t = x s^4, which
    // turns the t^(a-1) endpoint behaviour into the smooth s^(4a-1).
    fn lower_gamma_by_quadrature(a: f64, x: f64) -> f64 {
        let n = 400_000;
        let head = 4.0 * x.powf(a) * simpson(|s: f64| s.powf(4.0 * a - 1.0) * (-x * s.powi(4)).exp(), 0.0, 1.0, n);
        let tail_end = a + 40.0 * a.sqrt() + 60.0;
        let tail = simpson(|t: f64| ((a - 1.0) * t.ln() - t).exp(), x, tail_end.max(x), n);
        head / (head + tail)
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        // ln(9!) = ln 362880
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.1) - 2.252_712_651_734_206).abs() < 1e-12);
    }

    #[test]
    fn incomplete_gamma_identities() {
        for a in [0.5, 0.98, 1.0, 1.28, 3.0, 17.5, 50.0] {
            assert_eq!(regularized_lower_gamma(a, 0.0).unwrap(), 0.0);
        }
        for x in [1e-8, 0.01, 0.5, 1.0, 1.999, 2.0, 5.0, 30.0, 700.0] {
            let p = regularized_lower_gamma(1.0, x).unwrap();
            assert!((p + (-x).exp_m1()).abs() < 1e-14, "x={x}");
        }
        // P(1/2, 1) = erf(1)
        assert!((regularized_lower_gamma(0.5, 1.0).unwrap() - 0.842_700_792_949_714_9).abs() < 1e-14);
    }

    #[test]
    fn incomplete_gamma_matches_quadrature() {
        for &a in &[0.5, 0.98, 1.13, 2.5, 7.0, 20.0, 50.0] {
            for &x in &[0.05, 0.7, 1.5, 4.0, 12.0, 45.0, 60.0] {
                let want = lower_gamma_by_quadrature(a, x);
                let got = regularized_lower_gamma(a, x).unwrap();
                assert!((got - want).abs() < 1e-10, "a={a} x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn incomplete_gamma_extremes() {
        assert_eq!(regularized_lower_gamma(0.5, 1e3).unwrap(), 1.0);
        assert!(regularized_lower_gamma(50.0, 1e3).unwrap() == 1.0);
        let (p, q) = regularized_gamma_pair(50.0, 1e-3).unwrap();
        assert!((0.0..1e-100).contains(&p) && q == 1.0);
        assert!(regularized_lower_gamma(0.0, 1.0).is_err());
        assert!(regularized_lower_gamma(1.0, -1.0).is_err());
        assert!(regularized_lower_gamma(1.0, f64::NAN).is_err());
    }

    #[test]
    fn erf_values() {
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-14);
        assert!((erf(-1.0) + 0.842_700_792_949_714_9).abs() < 1e-14);
        assert_eq!(erf(0.0), 0.0);
        assert!((erfc(2.0) - 0.004_677_734_981_047_266).abs() < 1e-16);
        assert!((erfc(-2.0) - 1.995_322_265_018_952_7).abs() < 1e-14);
    }

    #[test]
    fn digamma_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + euler).abs() < 1e-13);
        assert!((digamma(0.5) + euler + 2.0 * 2f64.ln()).abs() < 1e-13);
        assert!((digamma(10.0) - 2.251_752_589_066_721).abs() < 1e-13);
        // recurrence ψ(x+1) = ψ(x) + 1/x
        for x in [0.3, 1.7, 9.99, 10.0, 250.0] {
            assert!((digamma(x + 1.0) - digamma(x) - 1.0 / x).abs() < 1e-12);
        }
    }

    #[test]
    fn trigamma_values() {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((trigamma(1.0) - pi2_6).abs() < 1e-13);
        assert!((trigamma(0.5) - 3.0 * pi2_6).abs() < 1e-12);
        // derivative check against digamma
        for x in [0.6, 1.2, 4.0, 30.0] {
            let h = 1e-5;
            let fd = (digamma(x + h) - digamma(x - h)) / (2.0 * h);
            assert!((fd - trigamma(x)).abs() < 1e-7, "x={x}");
        }
    }

    #[test]
    fn ln_minus_digamma_large_argument() {
        // ln x − ψ(x) ≈ 1/(2x) + 1/(12x²) for large x
        let x = 1e6;
        let want = 0.5 / x + 1.0 / (12.0 * x * x);
        assert!((ln_minus_digamma(x) / want - 1.0).abs() < 1e-12);
    }
}
