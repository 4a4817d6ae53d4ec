//! Closed-form outage probabilities of the adaptive schemes, and an
//! independent numerical-integration oracle for the same events.
//!
//! Random variables (Rayleigh fading, `psi = d^alpha`):
//! `Y₁ = |h_s1|² ~ Exp(psi_s1)`, `X₁ = |h_sr|² ~ Exp(psi_sr)` in the
//! single-antenna schemes; with MRT, `‖h_s1‖² ~ Gamma(N, psi_s1)` and the
//! projections `Y_sr ~ Exp(psi_sr)`, `Y_s1 ~ Exp(psi_s1)`.
//!
//! The multi-antenna expressions follow the usual reduction in which the two
//! projections and `‖h_s1‖²` are handled as independent; the oracle
//! integrates the same reduced events, so differences between the two only
//! measure integration, never modelling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{derive_thresholds, quarter_slot_snr, DerivedThresholds, SystemParams};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};
use crate::schemes::{SchemeKind, Signal};
use crate::special::{bessel_k_scaled, erlang_sf, ln_binomial, ln_factorial, phi1};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpValue {
    pub p: f64,
    pub method: OpMethod,
}

impl OpValue {
    fn closed(p: f64) -> Self {
        OpValue {
            p: p.clamp(0.0, 1.0),
            method: OpMethod::ClosedForm,
        }
    }

    fn quadrature(p: f64) -> Self {
        OpValue {
            p: p.clamp(0.0, 1.0),
            method: OpMethod::Quadrature,
        }
    }
}

/// Composite constants shared by the closed forms. Built fresh from the
/// parameters on every call, so they can never go stale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticConstants {
    pub psi_s1: f64,
    pub psi_sr: f64,
    pub psi_r1: f64,
    pub psi_r2: f64,
    /// `theta1 (theta2 + 1) / rho_s`
    pub a0: f64,
    /// `psi_s1 / (theta rho_s)`
    pub a3: f64,
    /// `psi_sr / rho_s`
    pub a5: f64,
    /// `psi_r2 / (G0 rho_r)`
    pub a6: f64,
    /// `psi_r1 rho_s / (psi_s1 eta rho_r)`
    pub a9: f64,
    /// `1 - exp(-psi_s1 tau2)`
    pub a10: f64,
    pub n_antennas: usize,
    pub g0: f64,
    pub eta: f64,
}

impl AnalyticConstants {
    pub fn new(params: &SystemParams, thr: &DerivedThresholds) -> Self {
        let [psi_s1, psi_sr, psi_r1, psi_r2] = params.inverse_gains();
        AnalyticConstants {
            psi_s1,
            psi_sr,
            psi_r1,
            psi_r2,
            a0: thr.theta1 * (thr.theta2 + 1.0) / thr.rho_s,
            a3: psi_s1 / (thr.theta * thr.rho_s),
            a5: psi_sr / thr.rho_s,
            a6: psi_r2 / (params.g0 * thr.rho_r),
            a9: psi_r1 * thr.rho_s / (psi_s1 * params.eta * thr.rho_r),
            a10: -(-psi_s1 * thr.tau2).exp_m1(),
            n_antennas: params.n_antennas,
            g0: params.g0,
            eta: params.eta,
        }
    }

    /// `ln(psi^m / m!)`, the Erlang series coefficient.
    pub fn ln_xi(psi: f64, m: usize) -> f64 {
        m as f64 * psi.ln() - ln_factorial(m)
    }
}

fn constants(params: &SystemParams) -> Result<(DerivedThresholds, AnalyticConstants)> {
    let thr = derive_thresholds(params)?;
    let c = AnalyticConstants::new(params, &thr);
    Ok((thr, c))
}

pub fn op_x1_dpu(params: &SystemParams) -> Result<OpValue> {
    let (thr, c) = constants(params)?;
    Ok(OpValue::closed(-(-c.psi_s1 * (c.a0 + thr.tau1)).exp_m1()))
}

pub fn op_x2_dpu(params: &SystemParams) -> Result<OpValue> {
    let (thr, c) = constants(params)?;
    let s = c.psi_s1 + c.psi_sr;
    let success =
        c.psi_s1 / s * (-s * thr.tau1 - c.psi_r2 * thr.theta2 / thr.rho_r).exp();
    Ok(OpValue::closed(1.0 - success))
}

pub fn op_x3_dpu(params: &SystemParams) -> Result<OpValue> {
    let (thr, c) = constants(params)?;
    let p = if thr.theta2 >= thr.theta3 {
        -(-c.psi_s1 * thr.tau1).exp_m1()
    } else {
        -(-c.psi_s1 * thr.theta3 / thr.rho_s).exp_m1()
    };
    Ok(OpValue::closed(p))
}

/// Uses the Bessel approximation of `∫ exp(-a x - b/x) dx`; see
/// [`op_quadrature`] for the exact value.
pub fn op_x1_dpr(params: &SystemParams) -> Result<OpValue> {
    let (thr, c) = constants(params)?;
    let s = c.psi_s1 + c.psi_sr;
    let direct = c.psi_sr / s * (-s * (c.a0 + thr.tau1)).exp();
    let bessel = (-c.psi_sr * thr.tau1 - c.psi_s1 * c.a0).exp()
        * -(-c.psi_sr * c.a0).exp_m1()
        * phi1(4.0 * c.psi_s1 * c.psi_sr * thr.tau1 * c.a0)?;
    Ok(OpValue::closed(1.0 - direct - bessel))
}

pub fn op_x2_dpr(params: &SystemParams) -> Result<OpValue> {
    let (thr, c) = constants(params)?;
    Ok(OpValue::closed(
        -(-c.psi_sr * thr.tau1 - c.psi_r2 * thr.theta2 / thr.rho_r).exp_m1(),
    ))
}

pub fn op_x3_dpr(params: &SystemParams) -> Result<OpValue> {
    let (thr, c) = constants(params)?;
    let s = c.psi_s1 + c.psi_sr;
    let p = if thr.theta2 >= thr.theta3 {
        1.0 - c.psi_sr / s * (-s * thr.tau1).exp()
    } else {
        let q = thr.theta3 / thr.rho_s;
        1.0 - (-thr.tau1 * c.psi_sr - q * c.psi_s1).exp() + c.psi_s1 / s * (-q * s).exp()
    };
    Ok(OpValue::closed(p))
}

/// NOMA-branch success probability of x₁ under MDPR,
/// `∫_{τ₁}^∞ S_H(B y/(y-τ₁)) f_Ysr(y) dy` with `B = θ₁/(θρ_s)`, summed term by
/// term. With `y = τ₁ + t` every term becomes
/// `∫_0^∞ t^{-n} exp(-β/t - ψ_sr t) dt = 2 (β/ψ_sr)^{(1-n)/2} K_{n-1}(2√(βψ_sr))`.
fn mdpr_x1_noma_success(thr: &DerivedThresholds, c: &AnalyticConstants) -> f64 {
    let b = thr.theta1 / (thr.theta * thr.rho_s);
    let beta = c.psi_s1 * b * thr.tau1;
    let w = 2.0 * (beta * c.psi_sr).sqrt();
    let ln_common = c.psi_sr.ln() - c.psi_sr * thr.tau1 - c.psi_s1 * b + std::f64::consts::LN_2;
    let mut total = 0.0;
    for m in 0..c.n_antennas {
        let ln_m = AnalyticConstants::ln_xi(c.psi_s1, m) + m as f64 * b.ln();
        for n in 0..=m {
            let order = (n as i64 - 1).unsigned_abs() as u32;
            let ln_term = ln_common
                + ln_m
                + ln_binomial(m, n)
                + n as f64 * thr.tau1.ln()
                + 0.5 * (1.0 - n as f64) * (beta / c.psi_sr).ln()
                + bessel_k_scaled(order, w).ln()
                - w;
            total += ln_term.exp();
        }
    }
    total
}

pub fn op_x1_mdpr(params: &SystemParams) -> Result<OpValue> {
    let (thr, c) = constants(params)?;
    let oma = -(-c.psi_sr * thr.tau1).exp_m1()
        * erlang_sf(c.n_antennas, c.psi_s1, quarter_slot_snr(params.rth_x1) / thr.rho_s)?;
    Ok(OpValue::closed(1.0 - oma - mdpr_x1_noma_success(&thr, &c)))
}

/// The x₁ expression exactly as it is usually printed, with `φ₁` (order one)
/// in every term of the double sum. Kept for comparison only: it is not a
/// probability in general and goes negative at high SNR.
pub fn op_x1_mdpr_printed(params: &SystemParams) -> Result<f64> {
    let (thr, c) = constants(params)?;
    let (t1, th1) = (thr.tau1, thr.theta1);
    let q = th1 * (th1 + 2.0);
    let z = phi1(4.0 * c.a3 * c.psi_sr * th1 * t1)?;
    let mut p = 1.0;
    for m in 0..c.n_antennas {
        let xi = AnalyticConstants::ln_xi(c.psi_s1, m).exp();
        let a1 = -(-c.psi_sr * t1).exp_m1() * xi * thr.rho_s.powi(-(m as i32));
        p -= a1 * q.powi(m as i32) * (-c.a3 * thr.theta * q).exp();
        for n in 0..=m {
            let a2 = xi * ln_binomial(m, n).exp() / (thr.theta * thr.rho_s).powi(m as i32)
                * (c.psi_sr * thr.theta * thr.theta2 / c.psi_s1).powf(0.5 * n as f64)
                * (-c.psi_sr * t1).exp();
            p -= a2 * th1.powf(m as f64 - 0.5 * n as f64) * (-c.a3 * th1).exp() * z;
        }
    }
    Ok(p)
}

pub fn op_x2_mdpr(params: &SystemParams) -> Result<OpValue> {
    let (thr, c) = constants(params)?;
    let hop2 = (-c.a6 * thr.theta2).exp();
    let p_noma = (-c.psi_sr * thr.tau1).exp();
    let oma_first_hop = erlang_sf(
        c.n_antennas,
        c.psi_sr,
        quarter_slot_snr(params.rth_x2) / thr.rho_s,
    )?;
    let success = (p_noma + (1.0 - p_noma) * oma_first_hop) * hop2;
    Ok(OpValue::closed(1.0 - success))
}

/// Probability that the OMA interference-limited SINR of x₃ clears θ₃:
/// `E[S_H(c (kZ + 1))]` with `Z ~ Exp(psi_r1)`, `k = η G₀ ρ_r`.
fn mdpr_x3_interfered_success(thr: &DerivedThresholds, c: &AnalyticConstants) -> f64 {
    let cc = thr.theta3 / (c.g0 * thr.rho_s);
    let k = c.eta * c.g0 * thr.rho_r;
    let s = c.psi_r1 + c.psi_s1 * cc * k;
    let mut total = 0.0;
    for m in 0..c.n_antennas {
        let ln_m = AnalyticConstants::ln_xi(c.psi_s1, m) + m as f64 * cc.ln() - c.psi_s1 * cc;
        for n in 0..=m {
            let ln_term = ln_m + ln_binomial(m, n) + ln_factorial(n) + n as f64 * k.ln()
                + c.psi_r1.ln()
                - (n as f64 + 1.0) * s.ln();
            total += ln_term.exp();
        }
    }
    total
}

pub fn op_x3_mdpr(params: &SystemParams) -> Result<OpValue> {
    let (thr, c) = constants(params)?;
    let s_h = erlang_sf(c.n_antennas, c.psi_s1, thr.theta3 / (c.g0 * thr.rho_s))?;
    let p_noma = (-c.psi_sr * thr.tau1).exp();
    let t = mdpr_x3_interfered_success(&thr, &c);
    let success =
        (1.0 - c.a10) * s_h + c.a10 * (p_noma * s_h + (1.0 - p_noma) * t);
    Ok(OpValue::closed(1.0 - success))
}

/// Closed-form OP of `signal` under `scheme`. Only the adaptive schemes have
/// one; the single-antenna formulas ignore `n_antennas`.
pub fn closed_form(scheme: SchemeKind, signal: Signal, params: &SystemParams) -> Result<OpValue> {
    use SchemeKind::*;
    use Signal::*;
    match (scheme, signal) {
        (Dpu, X1) => op_x1_dpu(params),
        (Dpu, X2) => op_x2_dpu(params),
        (Dpu, X3) => op_x3_dpu(params),
        (Dpr, X1) => op_x1_dpr(params),
        (Dpr, X2) => op_x2_dpr(params),
        (Dpr, X3) => op_x3_dpr(params),
        (Mdpr, X1) => op_x1_mdpr(params),
        (Mdpr, X2) => op_x2_mdpr(params),
        (Mdpr, X3) => op_x3_mdpr(params),
        (k, _) => Err(Error::InvalidCombination(format!(
            "{k} has no closed-form outage probability"
        ))),
    }
}

pub fn closed_form_all(scheme: SchemeKind, params: &SystemParams) -> Result<[OpValue; 3]> {
    Ok([
        closed_form(scheme, Signal::X1, params)?,
        closed_form(scheme, Signal::X2, params)?,
        closed_form(scheme, Signal::X3, params)?,
    ])
}

// ---------------------------------------------------------------------------
// Quadrature oracle

fn outer_tol() -> Tolerance {
    Tolerance {
        abs: 1e-14,
        rel: 1e-11,
        max_intervals: 4000,
    }
}

fn inner_tol() -> Tolerance {
    Tolerance {
        abs: 1e-16,
        rel: 1e-13,
        max_intervals: 2000,
    }
}

fn exp_pdf(psi: f64, x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        psi * (-psi * x).exp()
    }
}

/// `P(X <= x)` for `X ~ Exp(psi)`, by integrating the density.
fn exp_cdf_quad(psi: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    if psi * x <= 1.0 {
        return Ok(integrate(|t| exp_pdf(psi, t), 0.0, x, inner_tol())?.value);
    }
    // past the mean the tail is the small side
    let tail = integrate_to_infinity(|t| exp_pdf(psi, t), x, 1.0 / psi, &[], inner_tol())?;
    Ok(1.0 - tail.value)
}

fn gamma_pdf(n: usize, psi: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if n == 1 {
        return exp_pdf(psi, x);
    }
    if x == 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    (nf * psi.ln() + (nf - 1.0) * x.ln() - psi * x - ln_factorial(n - 1)).exp()
}

/// `(P(H <= x), P(H > x))` for `H ~ Gamma(n, psi)`, integrating whichever
/// side of the density is smaller so both stay accurate in the tails.
fn gamma_cdf_sf_quad(n: usize, psi: f64, x: f64) -> Result<(f64, f64)> {
    if x <= 0.0 {
        return Ok((0.0, 1.0));
    }
    let mode = (n as f64 - 1.0) / psi;
    if x <= n as f64 / psi {
        let cuts = if mode > 0.0 && mode < x { vec![0.0, mode, x] } else { vec![0.0, x] };
        let cdf = crate::quadrature::integrate_pieces(|t| gamma_pdf(n, psi, t), &cuts, inner_tol())?
            .value;
        Ok((cdf, 1.0 - cdf))
    } else {
        let sf = integrate_to_infinity(|t| gamma_pdf(n, psi, t), x, 1.0 / psi, &[], inner_tol())?
            .value;
        Ok((1.0 - sf, sf))
    }
}

/// Outage probability by numerically integrating the event densities.
/// Gamma-distributed norms are handled by nested integration of their
/// density, so the oracle shares no series code with the closed forms.
pub fn op_quadrature(scheme: SchemeKind, signal: Signal, params: &SystemParams) -> Result<OpValue> {
    let (thr, c) = constants(params)?;
    let tau1 = thr.tau1;
    let p = match (scheme, signal) {
        (SchemeKind::Dpu, Signal::X1) => exp_cdf_quad(c.psi_s1, c.a0 + tau1)?,
        (SchemeKind::Dpu, Signal::X2) => {
            let hop2 = 1.0 - exp_cdf_quad(c.psi_r2, thr.theta2 / thr.rho_r)?;
            let race = integrate_to_infinity(
                |y| exp_pdf(c.psi_s1, y) * (-c.psi_sr * y).exp(),
                tau1,
                1.0 / (c.psi_s1 + c.psi_sr),
                &[],
                outer_tol(),
            )?;
            1.0 - hop2 * race.value
        }
        (SchemeKind::Dpu, Signal::X3) => {
            exp_cdf_quad(c.psi_s1, tau1.max(thr.theta3 / thr.rho_s))?
        }
        (SchemeKind::Dpr, Signal::X1) => {
            let a0 = c.a0;
            let f = |x: f64| {
                let need = x.max(a0 * x / (x - tau1));
                exp_pdf(c.psi_sr, x) * (-c.psi_s1 * need).exp()
            };
            let success =
                integrate_to_infinity(f, tau1, 1.0 / c.psi_sr, &[a0 + tau1], outer_tol())?;
            1.0 - success.value
        }
        (SchemeKind::Dpr, Signal::X2) => {
            let first = 1.0 - exp_cdf_quad(c.psi_sr, tau1)?;
            let hop2 = 1.0 - exp_cdf_quad(c.psi_r2, thr.theta2 / thr.rho_r)?;
            1.0 - first * hop2
        }
        (SchemeKind::Dpr, Signal::X3) => {
            let q = thr.theta3 / thr.rho_s;
            let f = |x: f64| exp_pdf(c.psi_sr, x) * (-c.psi_s1 * x.max(q)).exp();
            let success = integrate_to_infinity(f, tau1, 1.0 / c.psi_sr, &[q], outer_tol())?;
            1.0 - success.value
        }
        (SchemeKind::Mdpr, Signal::X1) => {
            let n = c.n_antennas;
            let b = thr.theta1 / (thr.theta * thr.rho_s);
            let f = |y: f64| {
                let bound = b * y / (y - tau1);
                match gamma_cdf_sf_quad(n, c.psi_s1, bound) {
                    Ok((cdf, _)) => exp_pdf(c.psi_sr, y) * cdf,
                    Err(_) => f64::NAN,
                }
            };
            let cuts = [tau1 + b, tau1 + 4.0 * b, 2.0 * tau1];
            let noma = integrate_to_infinity(f, tau1, 1.0 / c.psi_sr, &cuts, outer_tol())?.value;
            let (oma_cdf, _) =
                gamma_cdf_sf_quad(n, c.psi_s1, quarter_slot_snr(params.rth_x1) / thr.rho_s)?;
            noma + exp_cdf_quad(c.psi_sr, tau1)? * oma_cdf
        }
        (SchemeKind::Mdpr, Signal::X2) => {
            let f_noma = exp_cdf_quad(c.psi_sr, tau1)?;
            let (_, oma_first) = gamma_cdf_sf_quad(
                c.n_antennas,
                c.psi_sr,
                quarter_slot_snr(params.rth_x2) / thr.rho_s,
            )?;
            let hop2 = 1.0 - exp_cdf_quad(c.psi_r2, thr.theta2 / (c.g0 * thr.rho_r))?;
            1.0 - ((1.0 - f_noma) + f_noma * oma_first) * hop2
        }
        (SchemeKind::Mdpr, Signal::X3) => {
            let n = c.n_antennas;
            let cc = thr.theta3 / (c.g0 * thr.rho_s);
            let k = c.eta * c.g0 * thr.rho_r;
            let (f_h, _) = gamma_cdf_sf_quad(n, c.psi_s1, cc)?;
            let f = |z: f64| match gamma_cdf_sf_quad(n, c.psi_s1, cc * (k * z + 1.0)) {
                Ok((cdf, _)) => exp_pdf(c.psi_r1, z) * cdf,
                Err(_) => f64::NAN,
            };
            let interfered = integrate_to_infinity(f, 0.0, 1.0 / c.psi_r1, &[], outer_tol())?.value;
            let f_sr = exp_cdf_quad(c.psi_sr, tau1)?;
            let f_s1 = exp_cdf_quad(c.psi_s1, thr.tau2)?;
            (1.0 - f_sr) * f_h + f_sr * ((1.0 - f_s1) * f_h + f_s1 * interfered)
        }
        (k, _) => {
            return Err(Error::InvalidCombination(format!(
                "{k} has no analytic event model to integrate"
            )))
        }
    };
    if !p.is_finite() {
        return Err(Error::NonConvergence(format!(
            "quadrature of {scheme} {signal} produced a non-finite value"
        )));
    }
    Ok(OpValue::quadrature(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(db: f64) -> SystemParams {
        SystemParams::default().with_rho_db(db)
    }

    #[test]
    fn reference_values_at_20_db() {
        let p = at(20.0);
        let expect = [
            (SchemeKind::Dpu, [0.7064, 0.96195, 0.38849]),
            (SchemeKind::Dpr, [0.945, 0.79779, 0.86001]),
            (SchemeKind::Mdpr, [0.03108, 0.38873, 0.0]),
        ];
        for (scheme, vals) in expect {
            for (s, v) in Signal::ALL.into_iter().zip(vals) {
                let got = closed_form(scheme, s, &p).unwrap().p;
                assert!((got - v).abs() < 5e-5, "{scheme} {s}: {got} vs {v}");
            }
        }
    }

    #[test]
    fn benchmarks_have_no_closed_form() {
        let p = at(20.0);
        for k in [SchemeKind::Ben1, SchemeKind::Ben2, SchemeKind::Ben3] {
            assert!(matches!(
                closed_form(k, Signal::X1, &p),
                Err(Error::InvalidCombination(_))
            ));
            assert!(op_quadrature(k, Signal::X2, &p).is_err());
        }
    }

    #[test]
    fn quadrature_matches_exact_forms() {
        for db in [10.0, 20.0, 30.0] {
            let p = at(db);
            for scheme in [SchemeKind::Dpu, SchemeKind::Dpr, SchemeKind::Mdpr] {
                for s in Signal::ALL {
                    if scheme == SchemeKind::Dpr && s == Signal::X1 {
                        continue;
                    }
                    let cf = closed_form(scheme, s, &p).unwrap().p;
                    let q = op_quadrature(scheme, s, &p).unwrap().p;
                    assert!((cf - q).abs() < 1e-9, "{scheme} {s} at {db} dB: {cf} vs {q}");
                }
            }
        }
    }

    #[test]
    fn dpr_x1_exact_reference() {
        // exact integral, not the Bessel approximation
        let q = op_quadrature(SchemeKind::Dpr, Signal::X1, &at(20.0)).unwrap().p;
        assert!((q - 0.9568).abs() < 5e-4, "{q}");
        let q = op_quadrature(SchemeKind::Dpr, Signal::X1, &at(30.0)).unwrap().p;
        assert!((q - 0.43095).abs() < 5e-5, "{q}");
    }

    #[test]
    fn dpr_x1_tau_to_zero_collapse() {
        // R_th(x2) -> 0 kills tau1 and phi1 -> 1
        let p = SystemParams {
            rth_x2: 1e-12,
            ..at(20.0)
        };
        let (thr, c) = constants(&p).unwrap();
        let s = c.psi_s1 + c.psi_sr;
        let limit = 1.0
            - c.psi_sr / s * (-s * c.a0).exp()
            - (-c.psi_s1 * c.a0).exp() * (1.0 - (-c.psi_sr * c.a0).exp());
        assert!(thr.tau1 < 1e-13);
        assert!((op_x1_dpr(&p).unwrap().p - limit).abs() < 1e-9);
        assert!((op_quadrature(SchemeKind::Dpr, Signal::X1, &p).unwrap().p - limit).abs() < 1e-8);
    }

    #[test]
    fn symmetric_race_gives_one_half() {
        let p = SystemParams {
            d_sr: 10.0,
            rth_x2: 1e-12,
            ..at(20.0)
        };
        assert!((op_x2_dpu(&p).unwrap().p - 0.5).abs() < 1e-9);
    }

    #[test]
    fn large_rho_limits() {
        let p = at(120.0);
        for s in Signal::ALL {
            assert!(closed_form(SchemeKind::Dpu, s, &p).unwrap().p < 1e-9 || s == Signal::X2);
        }
        // x2 of DPU keeps the race X1 >= Y1 even at infinite power
        let race = 1.0 - 100.0 / 325.0;
        assert!((op_x2_dpu(&p).unwrap().p - race).abs() < 1e-6);
        let p = SystemParams {
            rho_r_db: 200.0,
            ..at(20.0)
        };
        let (thr, c) = constants(&p).unwrap();
        assert!((op_x2_dpr(&p).unwrap().p + (-c.psi_sr * thr.tau1).exp_m1()).abs() < 1e-12);
    }

    #[test]
    fn dpr_x3_first_branch() {
        let p = SystemParams {
            rth_x3: 0.1,
            ..at(15.0)
        };
        let (thr, c) = constants(&p).unwrap();
        let s = c.psi_s1 + c.psi_sr;
        let expect = 1.0 - c.psi_sr / s * (-s * thr.tau1).exp();
        assert!((op_x3_dpr(&p).unwrap().p - expect).abs() < 1e-15);
    }

    #[test]
    fn branch_boundaries_are_continuous() {
        // theta2 = theta3 is the seam of the x3 branches
        let base = at(18.0);
        for f in [op_x3_dpu, op_x3_dpr] {
            let lo = f(&SystemParams { rth_x3: 0.2 - 1e-9, ..base.clone() }).unwrap().p;
            let hi = f(&SystemParams { rth_x3: 0.2 + 1e-9, ..base.clone() }).unwrap().p;
            assert!((lo - hi).abs() < 1e-7);
        }
    }

    #[test]
    fn mdpr_single_antenna_x2_reduction() {
        // N = 1: the OMA first hop can never succeed since ‖h_sr‖² = Y_sr <= tau1 < tau2
        let p = SystemParams {
            n_antennas: 1,
            ..at(20.0)
        };
        let (thr, c) = constants(&p).unwrap();
        let expect = 1.0 - (-c.psi_sr * thr.tau1 - c.a6 * thr.theta2).exp()
            - (1.0 - (-c.psi_sr * thr.tau1).exp())
                * (-c.psi_sr * thr.tau2 - c.a6 * thr.theta2).exp();
        assert!((op_x2_mdpr(&p).unwrap().p - expect).abs() < 1e-14);
    }

    #[test]
    fn printed_mdpr_x1_goes_negative() {
        assert!(op_x1_mdpr_printed(&at(25.0)).unwrap() < 0.0);
        assert!(op_x1_mdpr(&at(25.0)).unwrap().p > 0.0);
    }

    #[test]
    fn monotone_in_rho() {
        for scheme in [SchemeKind::Dpu, SchemeKind::Dpr] {
            for s in Signal::ALL {
                let mut prev = 1.0;
                for i in 0..=60 {
                    let v = closed_form(scheme, s, &at(i as f64)).unwrap().p;
                    assert!(v <= prev + 1e-12, "{scheme} {s} at {i} dB");
                    prev = v;
                }
            }
        }
    }
}
