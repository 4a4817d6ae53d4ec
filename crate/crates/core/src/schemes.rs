//! Per-trial decoding rules of the six transmission schemes.
//!
//! Given one channel realisation, each evaluator decides whether x₁ (direct
//! user), x₂ (relayed to the edge user) and x₃ (second-slot direct signal)
//! are in outage. U₁ always decodes x₂ before x₁ (SIC), and parallel
//! transmission of x₃ only works if U₁ removed x₂ in the first slot.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::params::{quarter_slot_snr, DerivedThresholds, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SchemeKind {
    /// Single antenna, power allocation keyed to the S–U₁ gain.
    #[serde(alias = "dpu")]
    Dpu,
    /// Single antenna, power allocation keyed to the S–R gain.
    #[serde(alias = "dpr")]
    Dpr,
    /// MRT towards U₁, power allocation keyed to the beamformed S–R gain,
    /// OMA fallback.
    #[serde(alias = "mdpr")]
    Mdpr,
    /// Single antenna, fixed power allocation.
    #[serde(alias = "ben1")]
    Ben1,
    /// MRT, fixed power allocation.
    #[serde(alias = "ben2")]
    Ben2,
    /// MRT towards R, power allocation keyed to the S–U₁ gain.
    #[serde(alias = "ben3")]
    Ben3,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 6] = [
        SchemeKind::Dpu,
        SchemeKind::Dpr,
        SchemeKind::Mdpr,
        SchemeKind::Ben1,
        SchemeKind::Ben2,
        SchemeKind::Ben3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Dpu => "DPU",
            SchemeKind::Dpr => "DPR",
            SchemeKind::Mdpr => "MDPR",
            SchemeKind::Ben1 => "BEN1",
            SchemeKind::Ben2 => "BEN2",
            SchemeKind::Ben3 => "BEN3",
        }
    }

    pub fn single_antenna(self) -> bool {
        matches!(self, SchemeKind::Dpu | SchemeKind::Dpr | SchemeKind::Ben1)
    }

    /// Whether outage probabilities exist in closed form.
    pub fn has_closed_form(self) -> bool {
        matches!(self, SchemeKind::Dpu | SchemeKind::Dpr | SchemeKind::Mdpr)
    }

    /// Copy of `params` with the antenna count forced to one for
    /// single-antenna schemes, so one template serves every scheme.
    pub fn adapt(self, params: &SystemParams) -> SystemParams {
        let mut p = params.clone();
        if self.single_antenna() {
            p.n_antennas = 1;
        }
        p
    }

    pub fn check(self, params: &SystemParams) -> Result<()> {
        if self.single_antenna() && params.n_antennas != 1 {
            return Err(Error::Config(format!(
                "{} is a single-antenna scheme but n_antennas = {}",
                self.name(),
                params.n_antennas
            )));
        }
        Ok(())
    }

    pub fn evaluate(
        self,
        params: &SystemParams,
        thr: &DerivedThresholds,
        ch: &ChannelRealization,
    ) -> Result<(OutageFlags, TrialBranch)> {
        self.check(params)?;
        Ok(match self {
            SchemeKind::Dpu => dpu(thr, ch),
            SchemeKind::Dpr => dpr(thr, ch),
            SchemeKind::Mdpr => mdpr(params, thr, ch),
            SchemeKind::Ben1 => {
                fixed_allocation(params, thr, ch.norm2_s1, ch.norm2_sr, ch.gain_r2(), 1.0)
            }
            SchemeKind::Ben2 => {
                let (at_user, at_relay) = match params.ben2_beam {
                    crate::params::BeamTarget::U1 => (ch.norm2_s1, ch.y_sr),
                    crate::params::BeamTarget::Relay => (ch.y_s1, ch.norm2_sr),
                };
                fixed_allocation(params, thr, at_user, at_relay, ch.gain_r2(), params.g0)
            }
            SchemeKind::Ben3 => ben3(params, thr, ch),
        })
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signal {
    X1,
    X2,
    X3,
}

impl Signal {
    pub const ALL: [Signal; 3] = [Signal::X1, Signal::X2, Signal::X3];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.index() + 1)
    }
}

/// Outage indicators of one trial; `true` means the signal was lost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutageFlags {
    pub out_x1: bool,
    pub out_x2: bool,
    pub out_x3: bool,
}

impl OutageFlags {
    pub const ALL_OUT: OutageFlags = OutageFlags {
        out_x1: true,
        out_x2: true,
        out_x3: true,
    };

    pub fn as_array(self) -> [bool; 3] {
        [self.out_x1, self.out_x2, self.out_x3]
    }
}

/// Transmission mode a trial ended up in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrialBranch {
    /// Adaptive rule found no feasible power split.
    SystemDown,
    Noma { a1: f64 },
    OmaDecodedX2,
    OmaUndecodedX2,
}

impl TrialBranch {
    pub const COUNT: usize = 4;

    pub fn index(self) -> usize {
        match self {
            TrialBranch::SystemDown => 0,
            TrialBranch::Noma { .. } => 1,
            TrialBranch::OmaDecodedX2 => 2,
            TrialBranch::OmaUndecodedX2 => 3,
        }
    }

    pub fn a1(self) -> Option<f64> {
        match self {
            TrialBranch::Noma { a1 } => Some(a1),
            _ => None,
        }
    }
}

/// Largest x₁ power fraction that still lets a receiver with `gain` decode
/// x₂: `theta * (1 - tau1/gain)`, or `None` when `gain <= tau1`.
pub fn dpa_coefficient(gain: f64, thr: &DerivedThresholds) -> Option<f64> {
    (gain > thr.tau1).then(|| thr.theta * (1.0 - thr.tau1 / gain))
}

/// SINR of x₂ when x₁ is superposed with power fraction `a1`.
pub fn sinr_x2(a1: f64, rho: f64, gain: f64) -> f64 {
    (1.0 - a1) * rho * gain / (a1 * rho * gain + 1.0)
}

pub fn evaluate_dpu(
    params: &SystemParams,
    thr: &DerivedThresholds,
    ch: &ChannelRealization,
) -> Result<OutageFlags> {
    SchemeKind::Dpu.check(params)?;
    Ok(dpu(thr, ch).0)
}

pub fn evaluate_dpr(
    params: &SystemParams,
    thr: &DerivedThresholds,
    ch: &ChannelRealization,
) -> Result<OutageFlags> {
    SchemeKind::Dpr.check(params)?;
    Ok(dpr(thr, ch).0)
}

pub fn evaluate_mdpr(
    params: &SystemParams,
    thr: &DerivedThresholds,
    ch: &ChannelRealization,
) -> (OutageFlags, TrialBranch) {
    mdpr(params, thr, ch)
}

pub fn evaluate_ben1(
    params: &SystemParams,
    thr: &DerivedThresholds,
    ch: &ChannelRealization,
) -> Result<OutageFlags> {
    SchemeKind::Ben1.evaluate(params, thr, ch).map(|r| r.0)
}

pub fn evaluate_ben2(
    params: &SystemParams,
    thr: &DerivedThresholds,
    ch: &ChannelRealization,
) -> OutageFlags {
    SchemeKind::Ben2
        .evaluate(params, thr, ch)
        .expect("Ben2 accepts any antenna count")
        .0
}

pub fn evaluate_ben3(
    params: &SystemParams,
    thr: &DerivedThresholds,
    ch: &ChannelRealization,
) -> OutageFlags {
    ben3(params, thr, ch).0
}

fn dpu(thr: &DerivedThresholds, ch: &ChannelRealization) -> (OutageFlags, TrialBranch) {
    let y1 = ch.norm2_s1;
    let x1 = ch.norm2_sr;
    let Some(a1) = dpa_coefficient(y1, thr) else {
        return (OutageFlags::ALL_OUT, TrialBranch::SystemDown);
    };
    // U₁ decodes x₂ by construction of a1
    let relay_x2 = sinr_x2(a1, thr.rho_s, x1) >= thr.theta2;
    let flags = OutageFlags {
        out_x1: thr.rho_s * a1 * y1 < thr.theta1,
        out_x2: !(relay_x2 && thr.rho_r * ch.gain_r2() >= thr.theta2),
        out_x3: thr.rho_s * y1 < thr.theta3,
    };
    (flags, TrialBranch::Noma { a1 })
}

fn dpr(thr: &DerivedThresholds, ch: &ChannelRealization) -> (OutageFlags, TrialBranch) {
    match dpa_coefficient(ch.norm2_sr, thr) {
        None => (OutageFlags::ALL_OUT, TrialBranch::SystemDown),
        Some(a1) => (relay_keyed_noma(thr, ch.norm2_s1, ch.gain_r2(), a1, 1.0), TrialBranch::Noma { a1 }),
    }
}

/// NOMA slot with a1 chosen from the relay's gain: R decodes x₂ by
/// construction, U₁ must still pass both SIC stages.
fn relay_keyed_noma(
    thr: &DerivedThresholds,
    user_gain: f64,
    gain_r2: f64,
    a1: f64,
    g0: f64,
) -> OutageFlags {
    let user_x2 = sinr_x2(a1, thr.rho_s, user_gain) >= thr.theta2;
    OutageFlags {
        out_x1: !(user_x2 && thr.rho_s * a1 * user_gain >= thr.theta1),
        out_x2: g0 * thr.rho_r * gain_r2 < thr.theta2,
        out_x3: !(user_x2 && g0 * thr.rho_s * user_gain >= thr.theta3),
    }
}

fn mdpr(
    params: &SystemParams,
    thr: &DerivedThresholds,
    ch: &ChannelRealization,
) -> (OutageFlags, TrialBranch) {
    let g0 = params.g0;
    if let Some(a1) = dpa_coefficient(ch.y_sr, thr) {
        let flags = relay_keyed_noma(thr, ch.norm2_s1, ch.gain_r2(), a1, g0);
        return (flags, TrialBranch::Noma { a1 });
    }
    // OMA: first slot split in two quarter-block transmissions
    let user_x2 = ch.y_s1 > thr.tau2;
    let x3_snr = g0 * thr.rho_s * ch.norm2_s1;
    let x3_sinr = if user_x2 {
        x3_snr
    } else {
        x3_snr / (params.eta * g0 * thr.rho_r * ch.gain_r1() + 1.0)
    };
    let flags = OutageFlags {
        out_x1: thr.rho_s * ch.norm2_s1 < quarter_slot_snr(params.rth_x1),
        out_x2: !(thr.rho_s * ch.norm2_sr >= quarter_slot_snr(params.rth_x2)
            && g0 * thr.rho_r * ch.gain_r2() >= thr.theta2),
        out_x3: x3_sinr < thr.theta3,
    };
    let branch = if user_x2 {
        TrialBranch::OmaDecodedX2
    } else {
        TrialBranch::OmaUndecodedX2
    };
    (flags, branch)
}

/// Fixed power allocation (Ben1 with `g0 = 1`, Ben2 with the relay's
/// directional gain). Nothing guarantees either receiver can decode x₂.
fn fixed_allocation(
    params: &SystemParams,
    thr: &DerivedThresholds,
    user_gain: f64,
    relay_gain: f64,
    gain_r2: f64,
    g0: f64,
) -> (OutageFlags, TrialBranch) {
    let a1 = params.a1_fixed;
    let user_x2 = sinr_x2(a1, thr.rho_s, user_gain) >= thr.theta2;
    let relay_x2 = sinr_x2(a1, thr.rho_s, relay_gain) >= thr.theta2;
    let flags = OutageFlags {
        out_x1: !(user_x2 && thr.rho_s * a1 * user_gain >= thr.theta1),
        out_x2: !(relay_x2 && g0 * thr.rho_r * gain_r2 >= thr.theta2),
        // without x₂ removed in t₁ there is no parallel x₃ transmission
        out_x3: !(user_x2 && g0 * thr.rho_s * user_gain >= thr.theta3),
    };
    (flags, TrialBranch::Noma { a1 })
}

/// MRT towards R; a1 keyed to the gain U₁ sees through that beam.
fn ben3(
    params: &SystemParams,
    thr: &DerivedThresholds,
    ch: &ChannelRealization,
) -> (OutageFlags, TrialBranch) {
    let user_gain = ch.y_s1;
    let Some(a1) = dpa_coefficient(user_gain, thr) else {
        return (OutageFlags::ALL_OUT, TrialBranch::SystemDown);
    };
    let g0 = params.g0;
    let relay_x2 = sinr_x2(a1, thr.rho_s, ch.norm2_sr) >= thr.theta2;
    let flags = OutageFlags {
        out_x1: thr.rho_s * a1 * user_gain < thr.theta1,
        out_x2: !(relay_x2 && g0 * thr.rho_r * ch.gain_r2() >= thr.theta2),
        out_x3: g0 * thr.rho_s * user_gain < thr.theta3,
    };
    (flags, TrialBranch::Noma { a1 })
}
