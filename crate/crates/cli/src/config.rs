//! Flat key-value experiment configuration.
//!
//! Format: one `section.key = value` per line, `#` starts a comment,
//! blank lines ignored. The key set is closed; unknown keys are errors.
//! Lists (seeds, the eps ladder) are comma-separated.

use pam_core::lattice::Grid;
use pam_core::solver::SolveConfig;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("bad value for `{key}`: {detail}")]
    BadValue { key: String, detail: String },
    #[error("line {0} is not `key = value`")]
    Malformed(usize),
    #[error("{0}")]
    Constraint(String),
}

/// A fully resolved experiment configuration (defaults filled).
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub grid_half_width: f64,
    pub grid_points: usize,
    pub seeds: Vec<u64>,
    pub eps_ladder: Vec<f64>,
    pub kappa: f64,
    pub weight_exponent: f64,
    pub ell: f64,
    pub t_final: f64,
    pub dt: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub fk_walkers: usize,
    pub fk_dt: f64,
    pub collar: f64,
}

impl ExperimentConfig {
    pub fn grid(&self) -> Result<Grid, pam_core::CoreError> {
        Grid::new(self.grid_half_width, self.grid_points)
    }

    pub fn solve_config(&self) -> SolveConfig {
        let mut cfg = SolveConfig::new(self.t_final, self.dt).expect("validated at parse time");
        cfg.kappa = self.kappa;
        cfg.weight_exponent = self.weight_exponent;
        cfg.ell = self.ell;
        cfg.picard_tol = self.picard_tol;
        cfg.picard_max_iter = self.picard_max_iter;
        cfg
    }

    /// The resolved key/value list, in config-key order, for manifests.
    pub fn echo(&self) -> Vec<(String, String)> {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        vec![
            ("grid.L".into(), format!("{}", self.grid_half_width)),
            ("grid.n".into(), format!("{}", self.grid_points)),
            (
                "noise.seeds".into(),
                self.seeds
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("mollifier.eps_ladder".into(), list(&self.eps_ladder)),
            ("solver.kappa".into(), format!("{}", self.kappa)),
            ("solver.a".into(), format!("{}", self.weight_exponent)),
            ("solver.ell".into(), format!("{}", self.ell)),
            ("solver.T".into(), format!("{}", self.t_final)),
            ("solver.dt".into(), format!("{}", self.dt)),
            ("solver.picard_tol".into(), format!("{}", self.picard_tol)),
            (
                "solver.picard_max_iter".into(),
                format!("{}", self.picard_max_iter),
            ),
            ("fk.walkers".into(), format!("{}", self.fk_walkers)),
            ("fk.dt".into(), format!("{}", self.fk_dt)),
            ("report.collar".into(), format!("{}", self.collar)),
        ]
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        detail: format!("`{v}` is not a number"),
    })
}

fn parse_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        detail: format!("`{v}` is not a non-negative integer"),
    })
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut grid_l: Option<f64> = None;
    let mut grid_n: Option<usize> = None;
    let mut seeds: Vec<u64> = vec![0];
    let mut eps_ladder: Vec<f64> = vec![0.25, 0.125, 0.0625];
    let mut kappa = 0.1;
    let mut a = 0.04;
    let mut ell = 0.0;
    let mut t_final = 0.2;
    let mut dt = 1e-3;
    let mut picard_tol = 1e-8;
    let mut picard_max_iter = 50usize;
    let mut fk_walkers = 100_000usize;
    let mut fk_dt = 1e-3;
    let mut collar = 1.0;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(ConfigError::Malformed(lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "grid.L" => grid_l = Some(parse_f64(key, value)?),
            "grid.n" => grid_n = Some(parse_usize(key, value)?),
            "noise.seeds" => {
                seeds = value
                    .split(',')
                    .map(|s| {
                        s.trim().parse().map_err(|_| ConfigError::BadValue {
                            key: key.into(),
                            detail: format!("`{s}` is not a seed"),
                        })
                    })
                    .collect::<Result<_, _>>()?;
            }
            "mollifier.eps_ladder" => {
                eps_ladder = value
                    .split(',')
                    .map(|s| parse_f64(key, s.trim()))
                    .collect::<Result<_, _>>()?;
            }
            "solver.kappa" => kappa = parse_f64(key, value)?,
            "solver.a" => a = parse_f64(key, value)?,
            "solver.ell" => ell = parse_f64(key, value)?,
            "solver.T" => t_final = parse_f64(key, value)?,
            "solver.dt" => dt = parse_f64(key, value)?,
            "solver.picard_tol" => picard_tol = parse_f64(key, value)?,
            "solver.picard_max_iter" => picard_max_iter = parse_usize(key, value)?,
            "fk.walkers" => fk_walkers = parse_usize(key, value)?,
            "fk.dt" => fk_dt = parse_f64(key, value)?,
            "report.collar" => collar = parse_f64(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.into())),
        }
    }

    let grid_half_width = grid_l.ok_or(ConfigError::MissingKey("grid.L"))?;
    let grid_points = grid_n.ok_or(ConfigError::MissingKey("grid.n"))?;

    let cfg = ExperimentConfig {
        grid_half_width,
        grid_points,
        seeds,
        eps_ladder,
        kappa,
        weight_exponent: a,
        ell,
        t_final,
        dt,
        picard_tol,
        picard_max_iter,
        fk_walkers,
        fk_dt,
        collar,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    let grid = cfg
        .grid()
        .map_err(|e| ConfigError::Constraint(format!("grid: {e}")))?;
    if !(cfg.kappa > 0.0 && cfg.kappa < 0.5) {
        return Err(ConfigError::Constraint(format!(
            "solver.kappa = {} must lie in (0, 1/2)",
            cfg.kappa
        )));
    }
    if !(cfg.weight_exponent > 0.0 && cfg.weight_exponent < cfg.kappa / 2.0) {
        return Err(ConfigError::Constraint(format!(
            "solver.a = {} violates: a must be < kappa/2 = {}",
            cfg.weight_exponent,
            cfg.kappa / 2.0
        )));
    }
    if cfg.eps_ladder.is_empty() {
        return Err(ConfigError::Constraint(
            "mollifier.eps_ladder must not be empty".into(),
        ));
    }
    if !cfg.eps_ladder.windows(2).all(|w| w[1] < w[0]) {
        return Err(ConfigError::Constraint(
            "mollifier.eps_ladder must be strictly decreasing".into(),
        ));
    }
    let eps_min = *cfg.eps_ladder.last().unwrap();
    if eps_min < 2.0 * grid.spacing() {
        return Err(ConfigError::Constraint(format!(
            "mollifier under-resolved: eps = {eps_min} needs eps >= 2h = {}",
            2.0 * grid.spacing()
        )));
    }
    if cfg.seeds.is_empty() {
        return Err(ConfigError::Constraint("noise.seeds must not be empty".into()));
    }
    if !(cfg.dt > 0.0 && cfg.t_final >= cfg.dt) {
        return Err(ConfigError::Constraint(format!(
            "solver.dt = {} and solver.T = {} must satisfy 0 < dt <= T",
            cfg.dt, cfg.t_final
        )));
    }
    if cfg.fk_walkers == 0 {
        return Err(ConfigError::Constraint("fk.walkers must be positive".into()));
    }
    if !(cfg.collar >= 0.0) {
        return Err(ConfigError::Constraint("report.collar must be >= 0".into()));
    }
    Ok(())
}
