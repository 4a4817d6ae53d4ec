//! Monte Carlo outage estimation and effective sum throughput.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::draw_channels;
use crate::error::{Error, Result};
use crate::params::{derive_thresholds, SystemParams};
use crate::rng::{RandomStream, StreamFactory};
use crate::schemes::{OutageFlags, SchemeKind, TrialBranch};

/// Estimates below this are reported as under-resolved.
pub const RESOLUTION_FLOOR: f64 = 1e-4;

/// Trials per parallel work item. Counts are integers, so the split never
/// changes the result.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpEstimate {
    pub p_hat: f64,
    pub n_trials: u64,
    /// Normal-approximation standard error, or the rule-of-three bound `3/n`
    /// when no (or every) trial was in outage.
    pub std_err: f64,
    pub under_resolved: bool,
    /// Trials per [`TrialBranch`] index; sums to `n_trials`.
    pub branch_counts: [u64; TrialBranch::COUNT],
}

impl OpEstimate {
    pub fn from_counts(outages: u64, n_trials: u64, branch_counts: [u64; TrialBranch::COUNT]) -> Self {
        let n = n_trials as f64;
        let p_hat = outages as f64 / n;
        let std_err = if outages == 0 || outages == n_trials {
            3.0 / n
        } else {
            (p_hat * (1.0 - p_hat) / n).sqrt()
        };
        OpEstimate {
            p_hat,
            n_trials,
            std_err,
            under_resolved: p_hat < RESOLUTION_FLOOR,
            branch_counts,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    outages: [u64; 3],
    branches: [u64; TrialBranch::COUNT],
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        for i in 0..3 {
            self.outages[i] += other.outages[i];
        }
        for i in 0..TrialBranch::COUNT {
            self.branches[i] += other.branches[i];
        }
        self
    }

    fn record(&mut self, flags: OutageFlags, branch: TrialBranch) {
        for (slot, out) in self.outages.iter_mut().zip(flags.as_array()) {
            *slot += out as u64;
        }
        self.branches[branch.index()] += 1;
    }
}

/// Runs `trial` on the substreams `0..n_trials` of `seed` and tallies the
/// outage flags. Deterministic for any thread count.
pub fn estimate_with<F>(n_trials: u64, seed: u64, trial: F) -> Result<[OpEstimate; 3]>
where
    F: Fn(&mut RandomStream) -> Result<(OutageFlags, TrialBranch)> + Sync,
{
    if n_trials == 0 {
        return Err(Error::param("n_trials", "must be >= 1"));
    }
    let factory = StreamFactory::new(seed);
    let chunks = n_trials.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n_trials) {
                let (flags, branch) = trial(&mut factory.stream(i))?;
                t.record(flags, branch);
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(tally
        .outages
        .map(|k| OpEstimate::from_counts(k, n_trials, tally.branches)))
}

/// Outage estimates of x₁, x₂, x₃ for one scheme.
pub fn estimate_op(
    scheme: SchemeKind,
    params: &SystemParams,
    n_trials: u64,
    seed: u64,
) -> Result<[OpEstimate; 3]> {
    scheme.check(params)?;
    let thr = derive_thresholds(params)?;
    estimate_with(n_trials, seed, |stream| {
        let ch = draw_channels(params, stream)?;
        scheme.evaluate(params, &thr, &ch)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstValue {
    /// Nats/s/Hz.
    pub psi: f64,
    pub contributions: [f64; 3],
}

/// `sum_i R_i (1 - P_i)`.
pub fn effective_sum_throughput(ops: [f64; 3], rth: [f64; 3]) -> Result<EstValue> {
    for p in ops {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(
                "effective_sum_throughput",
                format!("outage probability {p} outside [0, 1]"),
            ));
        }
    }
    let contributions = [0, 1, 2].map(|i| rth[i] * (1.0 - ops[i]));
    Ok(EstValue {
        psi: contributions.iter().sum(),
        contributions,
    })
}
