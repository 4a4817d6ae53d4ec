//! System configuration and the SNR thresholds derived from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which node the Ben2 benchmark steers its MRT beam towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeamTarget {
    #[default]
    #[serde(alias = "user")]
    U1,
    Relay,
}

/// Full experiment configuration. Distances are in metres, rates in nats/s/Hz,
/// transmit SNRs in dB, gains linear. Noise power is normalised to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    pub d_s1: f64,
    pub d_sr: f64,
    pub d_r1: f64,
    pub d_r2: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Transmit antennas at the source.
    pub n_antennas: usize,
    pub rho_s_db: f64,
    pub rho_r_db: f64,
    /// Relay mainlobe gain.
    pub g0: f64,
    /// Sidelobe attenuation towards U₁.
    pub eta: f64,
    pub rth_x1: f64,
    pub rth_x2: f64,
    pub rth_x3: f64,
    /// Power fraction of x₁ under fixed power allocation (Ben1, Ben2).
    pub a1_fixed: f64,
    pub ben2_beam: BeamTarget,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            d_s1: 10.0,
            d_sr: 15.0,
            d_r1: 15.0,
            d_r2: 10.0,
            alpha: 2.0,
            n_antennas: 10,
            rho_s_db: 20.0,
            rho_r_db: 20.0,
            g0: 1.0,
            eta: 0.7,
            rth_x1: 0.2,
            rth_x2: 0.2,
            rth_x3: 0.2,
            a1_fixed: 0.2,
            ben2_beam: BeamTarget::U1,
        }
    }
}

fn positive_finite(key: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(key, format!("must be finite and > 0, got {v}")))
    }
}

impl SystemParams {
    /// Sets both transmit SNRs to the same value, as every preset sweep does.
    pub fn with_rho_db(mut self, rho_db: f64) -> Self {
        self.rho_s_db = rho_db;
        self.rho_r_db = rho_db;
        self
    }

    /// Sets the three rate thresholds to one common value.
    pub fn with_rth(mut self, rth: f64) -> Self {
        self.rth_x1 = rth;
        self.rth_x2 = rth;
        self.rth_x3 = rth;
        self
    }

    pub fn validate(&self) -> Result<()> {
        positive_finite("d_s1", self.d_s1)?;
        positive_finite("d_sr", self.d_sr)?;
        positive_finite("d_r1", self.d_r1)?;
        positive_finite("d_r2", self.d_r2)?;
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::param("alpha", format!("must be >= 0, got {}", self.alpha)));
        }
        if self.n_antennas == 0 {
            return Err(Error::param("n_antennas", "must be >= 1"));
        }
        if !self.rho_s_db.is_finite() {
            return Err(Error::param("rho_s_db", "must be finite"));
        }
        if !self.rho_r_db.is_finite() {
            return Err(Error::param("rho_r_db", "must be finite"));
        }
        positive_finite("g0", self.g0)?;
        // eta = 1 (omnidirectional relay) is admitted for reduction checks
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::param("eta", format!("must lie in (0, 1], got {}", self.eta)));
        }
        positive_finite("rth_x1", self.rth_x1)?;
        positive_finite("rth_x2", self.rth_x2)?;
        positive_finite("rth_x3", self.rth_x3)?;
        if !(self.a1_fixed > 0.0 && self.a1_fixed < 1.0) {
            return Err(Error::param(
                "a1_fixed",
                format!("must lie in (0, 1), got {}", self.a1_fixed),
            ));
        }
        Ok(())
    }

    pub fn rho_s(&self) -> f64 {
        db_to_linear(self.rho_s_db)
    }

    pub fn rho_r(&self) -> f64 {
        db_to_linear(self.rho_r_db)
    }

    /// Average channel gain `d^-alpha` of a link.
    pub fn mean_gain(&self, distance: f64) -> f64 {
        distance.powf(-self.alpha)
    }

    /// Inverse mean gains `(psi_s1, psi_sr, psi_r1, psi_r2)`.
    pub fn inverse_gains(&self) -> [f64; 4] {
        [self.d_s1, self.d_sr, self.d_r1, self.d_r2].map(|d| d.powf(self.alpha))
    }

    pub fn rate_thresholds(&self) -> [f64; 3] {
        [self.rth_x1, self.rth_x2, self.rth_x3]
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// SNR needed to reach `rate` nats/s/Hz over half a block (pre-log 1/2).
pub fn half_slot_snr(rate: f64) -> f64 {
    (2.0 * rate).exp_m1()
}

/// SNR needed to reach `rate` nats/s/Hz over a quarter block (pre-log 1/4).
pub fn quarter_slot_snr(rate: f64) -> f64 {
    (4.0 * rate).exp_m1()
}

/// The constants every decoding rule and closed form consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedThresholds {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    /// Power-allocation cap `1/(1+theta2)`.
    pub theta: f64,
    /// Smallest gain that lets x₂ alone meet its target over half a block.
    pub tau1: f64,
    /// Same over a quarter block.
    pub tau2: f64,
    pub rho_s: f64,
    pub rho_r: f64,
}

pub fn derive_thresholds(params: &SystemParams) -> Result<DerivedThresholds> {
    params.validate()?;
    let rho_s = params.rho_s();
    let theta2 = half_slot_snr(params.rth_x2);
    Ok(DerivedThresholds {
        theta1: half_slot_snr(params.rth_x1),
        theta2,
        theta3: half_slot_snr(params.rth_x3),
        theta: 1.0 / (1.0 + theta2),
        tau1: theta2 / rho_s,
        tau2: quarter_slot_snr(params.rth_x2) / rho_s,
        rho_s,
        rho_r: params.rho_r(),
    })
}
