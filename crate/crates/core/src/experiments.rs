//! Parameter sweeps and rate-threshold optimisation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::closed_form_all;
use crate::error::{Error, Result};
use crate::montecarlo::{effective_sum_throughput, estimate_op};
use crate::params::SystemParams;
use crate::schemes::SchemeKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    RhoDb,
    DS1,
    DSr,
    Rth,
    A1Fixed,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::RhoDb,
        SweepAxis::DS1,
        SweepAxis::DSr,
        SweepAxis::Rth,
        SweepAxis::A1Fixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::RhoDb => "rho_db",
            SweepAxis::DS1 => "d_s1",
            SweepAxis::DSr => "d_sr",
            SweepAxis::Rth => "rth",
            SweepAxis::A1Fixed => "a1_fixed",
        }
    }

    /// Copy of `base` with the axis variable set to `value`. `rho_db` moves
    /// both transmit SNRs, `rth` all three thresholds.
    pub fn apply(self, base: &SystemParams, value: f64) -> SystemParams {
        let p = base.clone();
        match self {
            SweepAxis::RhoDb => p.with_rho_db(value),
            SweepAxis::DS1 => SystemParams { d_s1: value, ..p },
            SweepAxis::DSr => SystemParams { d_sr: value, ..p },
            SweepAxis::Rth => p.with_rth(value),
            SweepAxis::A1Fixed => SystemParams { a1_fixed: value, ..p },
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep axis `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Mc,
    Analytic,
    /// Analytic rows where a closed form exists plus Monte Carlo rows for
    /// every scheme.
    Both,
}

/// How a single row was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowMode {
    Mc,
    Analytic,
}

impl RowMode {
    pub fn name(self) -> &'static str {
        match self {
            RowMode::Mc => "mc",
            RowMode::Analytic => "analytic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub schemes: Vec<SchemeKind>,
    pub fixed: SystemParams,
    pub n_trials: u64,
    pub seed: u64,
    pub mode: SweepMode,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::param("grid", "must not be empty"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("grid", "values must be finite"));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("grid", "must be strictly increasing"));
        }
        if self.schemes.is_empty() {
            return Err(Error::param("schemes", "must not be empty"));
        }
        if self.mode != SweepMode::Analytic && self.n_trials == 0 {
            return Err(Error::param("n_trials", "must be >= 1"));
        }
        if self.mode == SweepMode::Analytic {
            if let Some(k) = self.schemes.iter().find(|k| !k.has_closed_form()) {
                return Err(Error::InvalidCombination(format!(
                    "analytic mode requested for {k}, which has no closed form"
                )));
            }
        }
        for &v in &self.grid {
            self.axis.apply(&self.fixed, v).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpCell {
    pub p: f64,
    /// Present for Monte Carlo rows only.
    pub std_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub scheme: SchemeKind,
    pub mode: RowMode,
    pub op: [OpCell; 3],
    pub est: f64,
}

fn analytic_row(scheme: SchemeKind, params: &SystemParams, axis_value: f64) -> Result<SweepRow> {
    let ops = closed_form_all(scheme, params)?;
    let est = effective_sum_throughput(ops.map(|o| o.p), params.rate_thresholds())?;
    Ok(SweepRow {
        axis_value,
        scheme,
        mode: RowMode::Analytic,
        op: ops.map(|o| OpCell { p: o.p, std_err: None }),
        est: est.psi,
    })
}

fn mc_row(
    scheme: SchemeKind,
    params: &SystemParams,
    axis_value: f64,
    n_trials: u64,
    seed: u64,
) -> Result<SweepRow> {
    let ops = estimate_op(scheme, params, n_trials, seed)?;
    let est = effective_sum_throughput(ops.map(|o| o.p_hat), params.rate_thresholds())?;
    Ok(SweepRow {
        axis_value,
        scheme,
        mode: RowMode::Mc,
        op: ops.map(|o| OpCell {
            p: o.p_hat,
            std_err: Some(o.std_err),
        }),
        est: est.psi,
    })
}

/// Rows ordered by axis value, then scheme as listed, analytic before MC.
/// All schemes and grid points share `spec.seed`, so Monte Carlo curves are
/// driven by common random numbers.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &v in &spec.grid {
        for &scheme in &spec.schemes {
            let params = scheme.adapt(&spec.axis.apply(&spec.fixed, v));
            let want_analytic = match spec.mode {
                SweepMode::Analytic => true,
                SweepMode::Both => scheme.has_closed_form(),
                SweepMode::Mc => false,
            };
            if want_analytic {
                rows.push(analytic_row(scheme, &params, v)?);
            }
            if spec.mode != SweepMode::Analytic {
                rows.push(mc_row(scheme, &params, v, spec.n_trials, spec.seed)?);
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub x_star: f64,
    pub value: f64,
    /// Refined interior local maxima `(x, value)`, in increasing `x`.
    pub local_maxima: Vec<(f64, f64)>,
    /// No interior maximum exists; `x_star` is an endpoint (or the midpoint
    /// of a flat objective).
    pub degenerate: bool,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn golden_section<F>(f: &mut F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Coarse grid of `n_grid` points on `[lo, hi]`, then golden-section
/// refinement inside every bracket around an interior grid maximum.
pub fn maximize_on_grid<F>(mut f: F, lo: f64, hi: f64, n_grid: usize) -> Result<Optimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::domain("maximize_on_grid", format!("bad range [{lo}, {hi}]")));
    }
    if n_grid < 3 {
        return Err(Error::domain("maximize_on_grid", "need at least 3 grid points"));
    }
    let step = (hi - lo) / (n_grid - 1) as f64;
    let xs: Vec<f64> = (0..n_grid).map(|i| lo + step * i as f64).collect();
    let vs = xs.iter().map(|&x| f(x)).collect::<Result<Vec<f64>>>()?;
    let scale = vs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let eps = 1e-12 * scale;

    if vs.iter().all(|v| (v - vs[0]).abs() <= eps) {
        return Ok(Optimum {
            x_star: 0.5 * (lo + hi),
            value: f(0.5 * (lo + hi))?,
            local_maxima: Vec::new(),
            degenerate: true,
        });
    }

    let mut local_maxima = Vec::new();
    let mut i = 1;
    while i + 1 < n_grid {
        if vs[i] > vs[i - 1] + eps {
            // walk across a plateau before deciding
            let mut j = i;
            while j + 1 < n_grid && (vs[j + 1] - vs[i]).abs() <= eps {
                j += 1;
            }
            if j + 1 < n_grid && vs[j + 1] < vs[i] - eps {
                let (x, v) = golden_section(&mut f, xs[i - 1], xs[j + 1], 1e-9 * (hi - lo))?;
                local_maxima.push((x, v.max(vs[i])));
                if v < vs[i] {
                    let last = local_maxima.len() - 1;
                    local_maxima[last].0 = xs[i];
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }

    let mut best = if vs[0] >= vs[n_grid - 1] {
        (xs[0], vs[0])
    } else {
        (xs[n_grid - 1], vs[n_grid - 1])
    };
    for &(x, v) in &local_maxima {
        if v > best.1 {
            best = (x, v);
        }
    }
    let degenerate = local_maxima.iter().all(|&(_, v)| v < best.1) || local_maxima.is_empty();
    Ok(Optimum {
        x_star: best.0,
        value: best.1,
        local_maxima,
        degenerate,
    })
}

/// Default search interval for the common rate threshold, nats/s/Hz.
pub const RTH_RANGE: (f64, f64) = (0.01, 2.0);

/// How the EST objective is evaluated during the threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Analytic,
    MonteCarlo { n_trials: u64, seed: u64 },
}

impl Objective {
    /// Closed forms where they exist, Monte Carlo otherwise.
    pub fn for_scheme(scheme: SchemeKind, n_trials: u64, seed: u64) -> Self {
        if scheme.has_closed_form() {
            Objective::Analytic
        } else {
            Objective::MonteCarlo { n_trials, seed }
        }
    }
}

pub fn est_at_rth(
    scheme: SchemeKind,
    params: &SystemParams,
    rth: f64,
    objective: Objective,
) -> Result<f64> {
    let p = scheme.adapt(&params.clone().with_rth(rth));
    let ops = match objective {
        Objective::Analytic => closed_form_all(scheme, &p)?.map(|o| o.p),
        Objective::MonteCarlo { n_trials, seed } => {
            estimate_op(scheme, &p, n_trials, seed)?.map(|o| o.p_hat)
        }
    };
    Ok(effective_sum_throughput(ops, p.rate_thresholds())?.psi)
}

/// Common rate threshold maximising the effective sum throughput.
pub fn find_optimal_rth(
    scheme: SchemeKind,
    params: &SystemParams,
    range: (f64, f64),
    resolution: usize,
    objective: Objective,
) -> Result<Optimum> {
    if !(range.0 > 0.0) {
        return Err(Error::param("range", "search range must be positive"));
    }
    maximize_on_grid(|r| est_at_rth(scheme, params, r, objective), range.0, range.1, resolution)
}

/// Built-in sweeps, named fig2 .. fig7. Each reproduces
/// one curve family member at the default geometry; other members follow by
/// editing `fixed`.
pub fn preset(name: &str) -> Result<SweepSpec> {
    let all = SchemeKind::ALL.to_vec();
    let adaptive = vec![SchemeKind::Dpu, SchemeKind::Dpr, SchemeKind::Mdpr];
    let rho_grid: Vec<f64> = (0..=8).map(|i| 5.0 * i as f64).collect();
    let base = SystemParams::default();
    let spec = |axis, grid, schemes, fixed, mode| SweepSpec {
        axis,
        grid,
        schemes,
        fixed,
        n_trials: 1_000_000,
        seed: 2024,
        mode,
    };
    Ok(match name {
        "fig2" | "fig4" | "fig6" => spec(SweepAxis::RhoDb, rho_grid, all, base, SweepMode::Both),
        "fig3" => spec(
            SweepAxis::DSr,
            (0..=8).map(|i| 5.0 + 2.5 * i as f64).collect(),
            all,
            base.with_rho_db(20.0),
            SweepMode::Both,
        ),
        "fig5" => spec(
            SweepAxis::Rth,
            (1..=40).map(|i| 0.05 * i as f64).collect(),
            adaptive,
            base.with_rho_db(23.0),
            SweepMode::Analytic,
        ),
        "fig7" => spec(
            SweepAxis::A1Fixed,
            (1..=19).map(|i| 0.05 * i as f64).collect(),
            vec![SchemeKind::Ben1, SchemeKind::Ben2],
            base.with_rho_db(35.0).with_rth(0.3),
            SweepMode::Mc,
        ),
        other => return Err(Error::Config(format!("unknown preset `{other}`"))),
    })
}

pub const PRESETS: [&str; 6] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mode: SweepMode, schemes: Vec<SchemeKind>) -> SweepSpec {
        SweepSpec {
            axis: SweepAxis::RhoDb,
            grid: vec![10.0, 20.0],
            schemes,
            fixed: SystemParams::default(),
            n_trials: 2000,
            seed: 5,
            mode,
        }
    }

    #[test]
    fn analytic_mode_rejects_benchmarks() {
        let s = small(SweepMode::Analytic, vec![SchemeKind::Dpu, SchemeKind::Ben2]);
        assert!(matches!(run_sweep(&s), Err(Error::InvalidCombination(_))));
    }

    #[test]
    fn grid_must_increase() {
        let mut s = small(SweepMode::Mc, vec![SchemeKind::Dpu]);
        s.grid = vec![10.0, 10.0];
        assert!(s.validate().is_err());
        s.grid.clear();
        assert!(s.validate().is_err());
    }

    #[test]
    fn both_mode_layout() {
        let s = small(SweepMode::Both, vec![SchemeKind::Dpu, SchemeKind::Ben1]);
        let rows = run_sweep(&s).unwrap();
        let tags: Vec<_> = rows.iter().map(|r| (r.axis_value, r.scheme, r.mode)).collect();
        assert_eq!(
            tags,
            vec![
                (10.0, SchemeKind::Dpu, RowMode::Analytic),
                (10.0, SchemeKind::Dpu, RowMode::Mc),
                (10.0, SchemeKind::Ben1, RowMode::Mc),
                (20.0, SchemeKind::Dpu, RowMode::Analytic),
                (20.0, SchemeKind::Dpu, RowMode::Mc),
                (20.0, SchemeKind::Ben1, RowMode::Mc),
            ]
        );
        for r in &rows {
            let recomputed: f64 = (0..3).map(|i| 0.2 * (1.0 - r.op[i].p)).sum();
            assert!((r.est - recomputed).abs() < 1e-12);
            assert_eq!(r.op[0].std_err.is_some(), r.mode == RowMode::Mc);
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let s = small(SweepMode::Mc, vec![SchemeKind::Mdpr, SchemeKind::Ben2]);
        assert_eq!(run_sweep(&s).unwrap(), run_sweep(&s).unwrap());
    }

    #[test]
    fn dpu_x1_ignores_relay_distance() {
        let s = SweepSpec {
            axis: SweepAxis::DSr,
            grid: vec![10.0, 15.0, 20.0],
            ..small(SweepMode::Analytic, vec![SchemeKind::Dpu])
        };
        let rows = run_sweep(&s).unwrap();
        assert!(rows.iter().all(|r| r.op[0].p == rows[0].op[0].p));
    }

    #[test]
    fn decreasing_objective_is_degenerate_at_left_end() {
        let o = maximize_on_grid(|x| Ok(-x), 0.0, 1.0, 11).unwrap();
        assert!(o.degenerate);
        assert_eq!(o.x_star, 0.0);
        let o = maximize_on_grid(|_| Ok(2.0), 0.0, 1.0, 11).unwrap();
        assert!(o.degenerate);
        assert_eq!(o.x_star, 0.5);
    }

    #[test]
    fn two_humps_are_both_found() {
        let f = |x: f64| Ok((-(x - 0.3).powi(2) * 200.0).exp() + 0.8 * (-(x - 0.7).powi(2) * 200.0).exp());
        let o = maximize_on_grid(f, 0.0, 1.0, 41).unwrap();
        assert_eq!(o.local_maxima.len(), 2);
        assert!((o.x_star - 0.3).abs() < 1e-3);
        assert!((o.local_maxima[1].0 - 0.7).abs() < 2e-2);
        assert!(!o.degenerate);
    }

    #[test]
    fn dpu_optimum_is_interior_at_23_db() {
        let p = SystemParams::default().with_rho_db(23.0);
        let o = find_optimal_rth(SchemeKind::Dpu, &p, RTH_RANGE, 80, Objective::Analytic).unwrap();
        assert!(!o.degenerate);
        assert!(o.x_star > 0.1 && o.x_star < 0.6, "{}", o.x_star);
    }

    #[test]
    fn presets_validate() {
        for name in PRESETS {
            preset(name).unwrap().validate().unwrap();
        }
        assert!(preset("fig9").is_err());
    }
}
