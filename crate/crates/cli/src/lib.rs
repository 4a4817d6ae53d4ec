//! Command implementations behind the `cdrt` binary.

pub mod config;
pub mod table;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cdrt_core::analytic::{closed_form, op_quadrature};
use cdrt_core::experiments::{find_optimal_rth, preset, run_sweep, Objective, SweepSpec};
use cdrt_core::montecarlo::estimate_op;
use cdrt_core::{Error, SchemeKind, Signal};

use config::{Format, RunConfig};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParam { .. } | Error::InvalidCombination(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        }
    }
}

/// Overrides taken from the command line; `None` keeps the config value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

pub fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            config::parse_config(&text)
        }
    }
}

fn write_output(text: &str, cfg: &RunConfig, ov: &Overrides) -> Result<(), CliError> {
    match ov.out.as_ref().or(cfg.output.path.as_ref()) {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn format_of(cfg: &RunConfig, ov: &Overrides) -> Format {
    ov.format.unwrap_or(cfg.output.format)
}

/// Sweep described by a preset, or by the `[sweep]` section of the config.
/// With a preset, the config's `[system]` section is ignored.
pub fn sweep_spec(cfg: &RunConfig, preset_name: Option<&str>, ov: &Overrides) -> Result<SweepSpec, CliError> {
    let mut spec = match preset_name {
        Some(name) => preset(name)?,
        None => cfg
            .sweep_spec()
            .ok_or_else(|| CliError::Config("no [sweep] section and no --preset given".into()))?,
    };
    if let Some(t) = ov.trials {
        spec.n_trials = t;
    }
    if let Some(s) = ov.seed {
        spec.seed = s;
    }
    spec.validate()?;
    Ok(spec)
}

pub fn render_sweep(cfg: &RunConfig, preset_name: Option<&str>, ov: &Overrides) -> Result<String, CliError> {
    let spec = sweep_spec(cfg, preset_name, ov)?;
    let rows = run_sweep(&spec)?;
    Ok(table::render(spec.axis, &rows, format_of(cfg, ov)))
}

pub fn cmd_sweep(cfg: &RunConfig, preset_name: Option<&str>, ov: &Overrides) -> Result<(), CliError> {
    let text = render_sweep(cfg, preset_name, ov)?;
    write_output(&text, cfg, ov)
}

/// Three-way comparison of closed form, quadrature and Monte Carlo for the
/// adaptive schemes, over the configured SNR grid.
pub fn render_validate(cfg: &RunConfig, ov: &Overrides) -> Result<String, CliError> {
    let grid = match &cfg.sweep {
        Some(s) if s.axis == cdrt_core::experiments::SweepAxis::RhoDb => s.grid.clone(),
        _ => vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
    };
    let trials = ov.trials.unwrap_or(config::DEFAULT_TRIALS);
    let seed = ov.seed.unwrap_or(config::DEFAULT_SEED);
    let mut out = String::from("rho_db,scheme,signal,closed_form,quadrature,mc,se_mc,within_gate\n");
    let mut json = Vec::new();
    for &rho in &grid {
        for scheme in [SchemeKind::Dpu, SchemeKind::Dpr, SchemeKind::Mdpr] {
            let params = scheme.adapt(&cfg.system.clone().with_rho_db(rho));
            let mc = estimate_op(scheme, &params, trials, seed)?;
            for s in Signal::ALL {
                let cf = closed_form(scheme, s, &params)?.p;
                let q = op_quadrature(scheme, s, &params)?.p;
                let e = mc[s.index()];
                let ok = (e.p_hat - cf).abs() <= (3.0 * e.std_err).max(0.02 * cf + 0.005);
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    table::fmt_sig(rho),
                    scheme,
                    s,
                    table::fmt_sig(cf),
                    table::fmt_sig(q),
                    table::fmt_sig(e.p_hat),
                    table::fmt_sig(e.std_err),
                    ok
                ));
                json.push(serde_json::json!({
                    "rho_db": rho, "scheme": scheme, "signal": s,
                    "closed_form": cf, "quadrature": q, "mc": e.p_hat,
                    "se_mc": e.std_err, "within_gate": ok,
                }));
            }
        }
    }
    Ok(match format_of(cfg, ov) {
        Format::Csv => out,
        Format::Json => serde_json::to_string_pretty(&json).expect("json") + "\n",
    })
}

pub fn cmd_validate(cfg: &RunConfig, ov: &Overrides) -> Result<(), CliError> {
    let text = render_validate(cfg, ov)?;
    write_output(&text, cfg, ov)
}

pub fn render_optimize(cfg: &RunConfig, ov: &Overrides) -> Result<String, CliError> {
    let opt = &cfg.optimize;
    let trials = ov.trials.unwrap_or(opt.n_trials);
    let seed = ov.seed.unwrap_or(opt.seed);
    let mut out = String::from("scheme,rth_star,est_star,degenerate,local_maxima\n");
    let mut json = Vec::new();
    for &scheme in &opt.schemes {
        let o = find_optimal_rth(
            scheme,
            &cfg.system,
            (opt.range[0], opt.range[1]),
            opt.resolution,
            Objective::for_scheme(scheme, trials, seed),
        )?;
        let maxima: Vec<String> = o
            .local_maxima
            .iter()
            .map(|(x, v)| format!("{}:{}", table::fmt_sig(*x), table::fmt_sig(*v)))
            .collect();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            scheme,
            table::fmt_sig(o.x_star),
            table::fmt_sig(o.value),
            o.degenerate,
            maxima.join(";")
        ));
        json.push(serde_json::json!({
            "scheme": scheme, "rth_star": o.x_star, "est_star": o.value,
            "degenerate": o.degenerate, "local_maxima": o.local_maxima,
        }));
    }
    Ok(match format_of(cfg, ov) {
        Format::Csv => out,
        Format::Json => serde_json::to_string_pretty(&json).expect("json") + "\n",
    })
}

pub fn cmd_optimize(cfg: &RunConfig, ov: &Overrides) -> Result<(), CliError> {
    let text = render_optimize(cfg, ov)?;
    write_output(&text, cfg, ov)
}
