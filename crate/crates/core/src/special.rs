//! Scalar special functions needed by the outage expressions.
//!
//! Only the modified Bessel function of the second kind (orders 0 and 1, plus
//! integer orders by recurrence) and the Erlang survival sum are provided.
//! Every public function rejects NaN and out-of-domain arguments instead of
//! propagating them.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this argument the power series is used, above it Steed's continued
/// fraction. Both branches agree to ~1e-15 relative at the seam.
const SERIES_LIMIT: f64 = 2.0;

const MAX_ITER: usize = 10_000;

/// Modified Bessel function of the second kind of order one, `K₁(x)`.
///
/// Underflows to zero for `x` beyond roughly 705.
pub fn bessel_k1(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain("bessel_k1", format!("requires x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let (_, k1) = k0_k1_scaled(x);
    Ok(k1 * (-x).exp())
}

/// `√x · K₁(√x)`, continuously extended with value 1 at the origin.
pub fn phi1(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain("phi1", format!("requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let s = x.sqrt();
    let (_, k1) = k0_k1_scaled(s);
    Ok((s * k1 * (-s).exp()).min(1.0))
}

/// Survival function of a sum of `n_terms` i.i.d. exponential variables with
/// rate `psi`: `exp(-psi*y) * sum_{m<n} (psi*y)^m / m!`.
///
/// This is the regularised upper incomplete gamma `Q(n, psi*y)`.
pub fn erlang_sf(n_terms: usize, psi: f64, y: f64) -> Result<f64> {
    if n_terms == 0 {
        return Err(Error::domain("erlang_sf", "requires n_terms >= 1"));
    }
    if psi.is_nan() || psi <= 0.0 || psi.is_infinite() {
        return Err(Error::domain(
            "erlang_sf",
            format!("requires finite psi > 0, got {psi}"),
        ));
    }
    if y.is_nan() || y < 0.0 {
        return Err(Error::domain("erlang_sf", format!("requires y >= 0, got {y}")));
    }
    Ok(erlang_sf_unchecked(n_terms, psi * y))
}

/// `Q(n, x)` for integer `n >= 1` and `x >= 0`, no argument checks.
pub(crate) fn erlang_sf_unchecked(n_terms: usize, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    // term_{m+1} = term_m * x / (m+1); the sum is rescaled whenever it grows
    // large so that exp(-x) is only applied once, in log space.
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut log_scale = 0.0_f64;
    for m in 1..n_terms {
        term *= x / m as f64;
        sum += term;
        if sum > 1e280 {
            sum *= 1e-280;
            term *= 1e-280;
            log_scale += 280.0 * std::f64::consts::LN_10;
        }
    }
    (sum.ln() + log_scale - x).exp().clamp(0.0, 1.0)
}

/// `e^x · K_ν(x)` for integer order `ν >= 0` and `x > 0`.
///
/// Upward recurrence `K_{ν+1} = K_{ν-1} + (2ν/x) K_ν` is stable for `K`.
pub(crate) fn bessel_k_scaled(order: u32, x: f64) -> f64 {
    let (k0, k1) = k0_k1_scaled(x);
    match order {
        0 => k0,
        1 => k1,
        _ => {
            let (mut prev, mut cur) = (k0, k1);
            for nu in 1..order {
                let next = prev + 2.0 * nu as f64 / x * cur;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Returns `(e^x K₀(x), e^x K₁(x))` for `x > 0`.
fn k0_k1_scaled(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        let (k0, k1) = k0_k1_series(x);
        let ex = x.exp();
        (k0 * ex, k1 * ex)
    } else {
        k0_k1_continued_fraction(x)
    }
}

/// Ascending series:
///   K₀ = -(ln(x/2) + γ) I₀ + Σ H_k y^k / (k!)²
///   K₁ = 1/x + ln(x/2) I₁ - (x/4) Σ (ψ(k+1) + ψ(k+2)) y^k / (k!(k+1)!)
/// with `y = x²/4` and harmonic numbers `H_k`.
fn k0_k1_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // t0 = y^k/(k!)^2, t1 = (x/2) y^k/(k!(k+1)!)
    let mut t0 = 1.0;
    let mut t1 = 0.5 * x;
    let mut i0 = t0;
    let mut i1 = t1;
    let mut harmonic = 0.0; // H_k
    let mut s0 = 0.0; // Σ H_k t0
    // ψ(1) + ψ(2) = -2γ + 1
    let mut s1 = t1 * (1.0 - 2.0 * EULER_GAMMA);
    for k in 1..MAX_ITER {
        let kf = k as f64;
        t0 *= y / (kf * kf);
        t1 *= y / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        let harmonic_next = harmonic + 1.0 / (kf + 1.0);
        i0 += t0;
        i1 += t1;
        s0 += harmonic * t0;
        s1 += t1 * (harmonic + harmonic_next - 2.0 * EULER_GAMMA);
        if t0 < f64::EPSILON * 1e-3 * i0 && t1 < f64::EPSILON * 1e-3 * i1 {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + log_half * i1 - 0.5 * s1;
    (k0, k1)
}

/// Steed's method on the Thompson–Barnett continued fraction for `K_0`, with
/// `K_1` from the accompanying ratio. Returns exponentially scaled values.
fn k0_k1_continued_fraction(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        a -= 2.0 * (i - 1) as f64;
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON * 0.5 {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// `ln(m!)` by direct summation; only used for the modest orders that appear
/// in antenna-count sums.
pub(crate) fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

pub(crate) fn ln_binomial(m: usize, n: usize) -> f64 {
    ln_factorial(m) - ln_factorial(n) - ln_factorial(m - n)
}
