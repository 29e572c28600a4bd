//! Experiment drivers: the convergence study, the cross-module validation
//! suite, and the single-shot subcommand bodies.

use crate::config::ExperimentConfig;
use crate::report::{fmt_num, manifest, Report, Table};
use anyhow::{Context, Result};
use pam_core::besov::{analyze, neg_holder_norm, regularity_estimate, WaveletBasis};
use pam_core::enhancement::{
    build_enhancement, c_epsilon_quadrature, pair_with_bump, z_covariance_quadrature, Enhancement,
};
use pam_core::kernels::{build_green, heat_semigroup, GreenKernel};
use pam_core::lattice::{
    holder_norm_positive, weighted_sup_norm, Field, WeightSpec,
};
use pam_core::solver::{
    feynman_kac, solve_direct, solve_transformed, spacetime_sup_norm, SpaceTimeField,
};
use pam_core::stochastics::{mollify, sample_white_noise, MollifierSpec};
use std::path::Path;
use std::time::Instant;

const LN2_OVER_TWO_PI: f64 = 0.110_318_013_594_2;

fn gaussian_bump(grid: pam_core::Grid) -> Field {
    Field::from_fn(grid, |x, y| (-(x * x + y * y) / 0.25).exp())
}

// ---------------------------------------------------------------- noise --

pub fn run_sample_noise(cfg: &ExperimentConfig, out: &Path, seed: Option<u64>) -> Result<()> {
    let grid = cfg.grid()?;
    std::fs::create_dir_all(out)?;
    let seeds: Vec<u64> = seed.map(|s| vec![s]).unwrap_or_else(|| cfg.seeds.clone());
    for s in &seeds {
        let xi = sample_white_noise(grid, *s);
        pam_core::pamf::save(&out.join(format!("noise_{s}.pamf")), xi.field())?;
    }
    std::fs::write(out.join("manifest.txt"), manifest("sample-noise", cfg))?;
    Ok(())
}

// ---------------------------------------------------------- enhancement --

pub fn write_enhancement(enh: &Enhancement, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    pam_core::pamf::save(&dir.join("xi_eps.pamf"), &enh.xi_eps)?;
    pam_core::pamf::save(&dir.join("y.pamf"), &enh.y)?;
    pam_core::pamf::save(&dir.join("grad_y1.pamf"), &enh.grad_y[0])?;
    pam_core::pamf::save(&dir.join("grad_y2.pamf"), &enh.grad_y[1])?;
    pam_core::pamf::save(&dir.join("z.pamf"), &enh.z)?;
    pam_core::pamf::save(&dir.join("f_xi.pamf"), &enh.f_xi)?;
    std::fs::write(
        dir.join("manifest.txt"),
        format!(
            "epsilon: {}\nc_eps: {}\nseed: {}\n",
            enh.epsilon,
            fmt_num(enh.c_eps),
            enh.seed
        ),
    )?;
    Ok(())
}

pub fn run_build_enhancement(cfg: &ExperimentConfig, out: &Path, seed: Option<u64>) -> Result<()> {
    let grid = cfg.grid()?;
    let s = seed.unwrap_or(cfg.seeds[0]);
    let xi = sample_white_noise(grid, s);
    for (k, &eps) in cfg.eps_ladder.iter().enumerate() {
        let enh = build_enhancement(&xi, eps)?;
        write_enhancement(&enh, &out.join(format!("rung_{k}")))?;
    }
    std::fs::write(out.join("manifest.txt"), manifest("build-enhancement", cfg))?;
    Ok(())
}

// --------------------------------------------------------------- solve --

fn write_trajectory(v: &SpaceTimeField, cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (k, frame) in v.frames().iter().enumerate() {
        pam_core::pamf::save(&dir.join(format!("frame_{k:04}.pamf")), frame)?;
    }
    let mut m = manifest("trajectory", cfg);
    m.push_str(&format!(
        "times: {}\n",
        v.times()
            .iter()
            .map(|t| format!("{t}"))
            .collect::<Vec<_>>()
            .join(",")
    ));
    std::fs::write(dir.join("manifest.txt"), m)?;
    Ok(())
}

pub fn run_solve(
    cfg: &ExperimentConfig,
    out: &Path,
    seed: Option<u64>,
    method: &str,
) -> Result<()> {
    let grid = cfg.grid()?;
    let s = seed.unwrap_or(cfg.seeds[0]);
    let eps = cfg.eps_ladder[0];
    let xi = sample_white_noise(grid, s);
    let enh = build_enhancement(&xi, eps)?;
    let u0 = gaussian_bump(grid);
    let mut solve_cfg = cfg.solve_config();
    solve_cfg.frame_stride = (solve_cfg.steps() / 8).max(1);
    match method {
        "direct" => {
            let u = solve_direct(&enh.xi_eps, enh.c_eps, &u0, &solve_cfg)?;
            write_trajectory(&u, cfg, &out.join("direct"))?;
        }
        "transformed" => {
            let sol = solve_transformed(&enh, &u0, &solve_cfg)?;
            write_trajectory(&sol.u, cfg, &out.join("u"))?;
            write_trajectory(&sol.v, cfg, &out.join("v"))?;
        }
        other => anyhow::bail!("unknown method `{other}` (use `direct` or `transformed`)"),
    }
    Ok(())
}

// ------------------------------------------------------------ fk-check --

pub fn run_fk_check(cfg: &ExperimentConfig, out: &Path, seed: Option<u64>) -> Result<()> {
    let grid = cfg.grid()?;
    let s = seed.unwrap_or(cfg.seeds[0]);
    let eps = cfg.eps_ladder[0];
    let xi = sample_white_noise(grid, s);
    let enh = build_enhancement(&xi, eps)?;
    let u0 = gaussian_bump(grid);
    let mut solve_cfg = cfg.solve_config();
    solve_cfg.frame_stride = solve_cfg.steps();
    let direct = solve_direct(&enh.xi_eps, enh.c_eps, &u0, &solve_cfg)?;
    let o = grid.origin_index();
    let reference = direct.frames().last().unwrap().at(o, o);
    let est = feynman_kac(
        &enh.xi_eps,
        enh.c_eps,
        &u0,
        cfg.t_final,
        (0.0, 0.0),
        cfg.fk_walkers,
        cfg.fk_dt,
        s ^ 0x5eed,
    )?;
    if est.box_too_small() {
        eprintln!(
            "warning: {:.2}% of walkers left the box; grid.L is too small for T = {}",
            100.0 * est.exit_fraction,
            cfg.t_final
        );
    }
    let mut table = Table::new(
        "fk_check",
        &[
            "seed", "eps", "t", "direct", "fk_mean", "fk_stderr", "deviation_sigmas", "exit_fraction",
        ],
    );
    let sigmas = (est.mean - reference).abs() / est.stderr.max(f64::MIN_POSITIVE);
    table.push(vec![
        s.to_string(),
        fmt_num(eps),
        fmt_num(cfg.t_final),
        fmt_num(reference),
        fmt_num(est.mean),
        fmt_num(est.stderr),
        fmt_num(sigmas),
        fmt_num(est.exit_fraction),
    ]);
    let mut report = Report::new("fk-check");
    report.tables.push(table);
    report.write_to(out, cfg)?;
    anyhow::ensure!(sigmas <= 3.0, "Feynman-Kac deviates by {sigmas:.2} sigma");
    Ok(())
}

// ---------------------------------------------------------------- norm --

pub fn run_norm(cfg: &ExperimentConfig, out: &Path, field_path: &Path) -> Result<()> {
    let field = pam_core::pamf::load(field_path)
        .with_context(|| format!("reading {}", field_path.display()))?;
    let basis = WaveletBasis::daubechies6();
    let pyramid = analyze(&field, &basis)?;
    let w = WeightSpec::polynomial(cfg.weight_exponent);

    std::fs::create_dir_all(out)?;
    let mut table = Table::new("levels", &["level", "sup_coeff", "weight_at_argmax"]);
    for sup in pyramid.level_sups(&w, cfg.collar) {
        table.push(vec![
            sup.level.to_string(),
            fmt_num(sup.sup),
            fmt_num(sup.weight_at_argmax),
        ]);
    }
    let mut norms = Table::new("norms", &["name", "value"]);
    norms.push(vec![
        "weighted_sup".into(),
        fmt_num(weighted_sup_norm(&field, &w, cfg.collar)),
    ]);
    for alpha in [-0.5, -1.0 - cfg.kappa] {
        norms.push(vec![
            format!("neg_holder[{alpha}]"),
            fmt_num(neg_holder_norm(&pyramid, alpha, &w, cfg.collar)?),
        ]);
    }
    match regularity_estimate(&pyramid, &w, cfg.collar) {
        Ok(fit) => norms.push(vec!["alpha_hat".into(), fmt_num(fit.alpha_hat)]),
        Err(e) => eprintln!("regularity estimate unavailable: {e}"),
    }
    // per-level detail grids for inspection
    for lvl in pyramid.levels() {
        let side = lvl.side;
        let level_grid = pam_core::Grid::new(field.grid().half_width(), side);
        if let Ok(g) = level_grid {
            for (name, d) in ["h", "v", "d"].iter().zip(lvl.details.iter()) {
                let f = Field::from_values(g, d.clone())?;
                pam_core::pamf::save(
                    &out.join(format!("level_{:02}_{name}.pamf", lvl.level)),
                    &f,
                )?;
            }
        }
    }
    let mut report = Report::new("norm");
    report.tables.push(table);
    report.tables.push(norms);
    report.write_to(out, cfg)?;
    Ok(())
}

// ---------------------------------------------------- convergence study --

/// Builds enhancements along the eps ladder for every seed, runs both
/// solvers, and reports per-rung constants, successive solution distances,
/// Picard iteration counts and timings.
pub fn run_convergence_study(cfg: &ExperimentConfig, out: &Path) -> Result<i32> {
    anyhow::ensure!(
        cfg.eps_ladder.len() >= 3,
        "convergence study needs a ladder of length >= 3"
    );
    let grid = cfg.grid()?;
    let u0 = gaussian_bump(grid);
    let w = WeightSpec::polynomial(cfg.weight_exponent);
    let mut solve_cfg = cfg.solve_config();
    solve_cfg.frame_stride = (solve_cfg.steps() / 4).max(1);

    let mut table = Table::new(
        "convergence",
        &[
            "seed",
            "eps",
            "c_eps",
            "picard_iters",
            "d_weighted_sup",
            "d_spacetime",
            "status",
            "direct_ms",
            "transformed_ms",
        ],
    );
    let mut any_failure = false;

    for &seed in &cfg.seeds {
        let xi = sample_white_noise(grid, seed);
        let mut prev: Option<SpaceTimeField> = None;
        for &eps in &cfg.eps_ladder {
            let enh = match build_enhancement(&xi, eps) {
                Ok(e) => e,
                Err(e) => {
                    any_failure = true;
                    table.push(vec![
                        seed.to_string(),
                        fmt_num(eps),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        format!("enhancement-failed: {e}"),
                        String::new(),
                        String::new(),
                    ]);
                    continue;
                }
            };
            let t0 = Instant::now();
            let direct = solve_direct(&enh.xi_eps, enh.c_eps, &u0, &solve_cfg);
            let direct_ms = t0.elapsed().as_millis();
            let t1 = Instant::now();
            let transformed = solve_transformed(&enh, &u0, &solve_cfg);
            let transformed_ms = t1.elapsed().as_millis();

            match (direct, transformed) {
                (Ok(direct), Ok(transformed)) => {
                    let (d_sup, d_st) = match &prev {
                        Some(prev_u) => {
                            let (_, a) = prev_u.last();
                            let (_, b) = direct.last();
                            let d_sup = weighted_sup_norm(&a.axpy(-1.0, b), &w, cfg.collar);
                            let diff = SpaceTimeField::new(
                                direct.times().to_vec(),
                                direct
                                    .frames()
                                    .iter()
                                    .zip(prev_u.frames())
                                    .map(|(x, y)| x.axpy(-1.0, y))
                                    .collect(),
                                cfg.kappa,
                                cfg.ell,
                            )?;
                            (
                                Some(d_sup),
                                Some(spacetime_sup_norm(&diff, cfg.ell, cfg.kappa, cfg.collar)),
                            )
                        }
                        None => (None, None),
                    };
                    table.push(vec![
                        seed.to_string(),
                        fmt_num(eps),
                        fmt_num(enh.c_eps),
                        transformed.picard_residuals.len().to_string(),
                        d_sup.map(fmt_num).unwrap_or_default(),
                        d_st.map(fmt_num).unwrap_or_default(),
                        "ok".into(),
                        direct_ms.to_string(),
                        transformed_ms.to_string(),
                    ]);
                    prev = Some(direct);
                }
                (d, t) => {
                    any_failure = true;
                    let err = d
                        .err()
                        .map(|e| e.to_string())
                        .or_else(|| t.err().map(|e| e.to_string()))
                        .unwrap_or_default();
                    table.push(vec![
                        seed.to_string(),
                        fmt_num(eps),
                        fmt_num(enh.c_eps),
                        String::new(),
                        String::new(),
                        String::new(),
                        format!("solve-failed: {err}"),
                        direct_ms.to_string(),
                        transformed_ms.to_string(),
                    ]);
                    prev = None;
                }
            }
        }
    }
    table.sort_rows();
    let mut report = Report::new("converge");
    report.tables.push(table);
    report.write_to(out, cfg)?;
    Ok(if any_failure { 1 } else { 0 })
}

// ------------------------------------------------------------ validate --

pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub lo: f64,
    pub hi: f64,
    pub status: CheckStatus,
    pub note: String,
}

#[derive(Clone, Copy, PartialEq)]
pub enum CheckStatus {
    Pass,
    Fail,
    LowPower,
}

impl Check {
    fn banded(name: &'static str, measured: f64, lo: f64, hi: f64, low_power: bool) -> Self {
        let status = if low_power {
            CheckStatus::LowPower
        } else if measured >= lo && measured <= hi {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Check {
            name,
            measured,
            lo,
            hi,
            status,
            note: if low_power { "low-power".into() } else { String::new() },
        }
    }
}

/// Verifies the tabulated kernel bundle: the exact log form inside the
/// half ball, the vanishing remainder off the annulus, and the discrete
/// Laplacian consistency on the annulus. Exposed so fault-injection tests
/// can feed a corrupted bundle.
pub fn green_kernel_check(gk: &GreenKernel) -> Check {
    let grid = *gk.green().grid();
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = grid.node(i, j);
            let r = x.hypot(y);
            if r > 0.0 && r <= 0.5 {
                let expect = -r.ln() / std::f64::consts::TAU;
                worst = worst.max((gk.green().at(i, j) - expect).abs());
            }
            if (r <= 0.5 || r >= 1.0) && r > 0.0 {
                worst = worst.max(gk.remainder().at(i, j).abs());
            }
        }
    }
    // five-point Laplacian against the remainder on the annulus
    let mut lap_worst = 0.0_f64;
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let (x, y) = grid.node(i, j);
            let r = x.hypot(y);
            if !(0.55..=0.95).contains(&r) {
                continue;
            }
            let g = gk.green();
            let lap = (g.at(i + 1, j) + g.at(i - 1, j) + g.at(i, j + 1) + g.at(i, j - 1)
                - 4.0 * g.at(i, j))
                / (h * h);
            lap_worst = lap_worst.max((lap - gk.remainder().at(i, j)).abs());
        }
    }
    // exact identities at machine precision; Laplacian consistency O(h^2)
    let lap_tol = 40.0 * h * h;
    let pass = worst <= 1e-12 && lap_worst <= lap_tol;
    Check {
        name: "green_kernel",
        measured: worst.max(lap_worst / lap_tol * 1e-12),
        lo: 0.0,
        hi: 1e-12,
        status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
        note: format!("tabulation {worst:.2e}, laplacian {lap_worst:.2e} (tol {lap_tol:.2e})"),
    }
}

/// The cross-module validation suite. Statistical checks with fewer than
/// the stated seed budget are reported as low-power rather than failed.
pub fn run_validation(cfg: &ExperimentConfig, out: &Path) -> Result<i32> {
    let grid = cfg.grid()?;
    let mut checks: Vec<Check> = Vec::new();
    let n_seeds = cfg.seeds.len();
    let low_power = n_seeds < 8;

    // white-noise isometry: wavelet coefficient variance pooled per seed
    {
        let basis = WaveletBasis::daubechies6();
        let mut sq = 0.0;
        let mut count = 0usize;
        for &s in &cfg.seeds {
            let xi = sample_white_noise(grid, s);
            let p = analyze(xi.field(), &basis)?;
            for lvl in p.levels().iter().filter(|l| p.is_resolvable(l)) {
                for d in &lvl.details {
                    sq += d.iter().map(|v| v * v).sum::<f64>();
                    count += d.len();
                }
            }
        }
        let var = sq / count as f64;
        let half_width = 0.05 + 3.0 * (2.0 / count as f64).sqrt();
        checks.push(Check::banded(
            "white_noise_isometry",
            var,
            1.0 - half_width,
            1.0 + half_width,
            false,
        ));
    }

    // c_eps slope over the config ladder
    if cfg.eps_ladder.len() >= 3 {
        let cs: Vec<f64> = cfg
            .eps_ladder
            .iter()
            .map(|&e| c_epsilon_quadrature(e, grid))
            .collect::<Result<_, _>>()?;
        let xs: Vec<f64> = cfg.eps_ladder.iter().map(|e| (1.0 / e).ln()).collect();
        let nf = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / nf;
        let my = cs.iter().sum::<f64>() / nf;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(&cs).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        checks.push(Check::banded("c_eps_slope", slope, 0.151, 0.167, false));
    }

    // Z covariance: Monte Carlo over seeds vs quadrature
    {
        let eps = *cfg.eps_ladder.last().unwrap();
        let lambda = (4.0 * grid.spacing()).max(0.25);
        let quad = z_covariance_quadrature(lambda, eps, grid)?;
        let mut pairings = Vec::with_capacity(n_seeds);
        for &s in &cfg.seeds {
            let xi = sample_white_noise(grid, s);
            let enh = build_enhancement(&xi, eps)?;
            pairings.push(pair_with_bump(&enh.z, lambda));
        }
        let nf = pairings.len() as f64;
        let mean = pairings.iter().sum::<f64>() / nf;
        let var = pairings.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
        let m4 = pairings.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / nf;
        let se = ((m4 - var * var).max(0.0) / nf).sqrt();
        checks.push(Check::banded(
            "z_variance_mc_vs_quadrature",
            var,
            quad - 3.0 * se,
            quad + 3.0 * se,
            low_power,
        ));
    }

    // heat smoothing slope
    {
        let eps = *cfg.eps_ladder.last().unwrap();
        let xi = sample_white_noise(grid, cfg.seeds[0]);
        let xi_eps = mollify(&xi, &MollifierSpec::new(eps)?)?;
        let w = WeightSpec::exponential(0.5);
        let ts: Vec<f64> = (4..=8).rev().map(|k| 2.0_f64.powi(-k)).collect();
        let sups: Vec<f64> = ts
            .iter()
            .map(|&t| {
                heat_semigroup(&xi_eps, t).map(|u| weighted_sup_norm(&u, &w, cfg.collar))
            })
            .collect::<Result<_, _>>()?;
        let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
        let ys: Vec<f64> = sups.iter().map(|s| s.ln()).collect();
        let nf = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / nf;
        let my = ys.iter().sum::<f64>() / nf;
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        let target = -(1.0 + cfg.kappa) / 2.0;
        checks.push(Check::banded(
            "heat_smoothing_slope",
            slope,
            target * 1.15,
            target * 0.85,
            false,
        ));
    }

    // Young product constant spread over seeds
    {
        let eps = cfg.eps_ladder[0];
        let basis = WaveletBasis::daubechies6();
        let wf = WeightSpec::polynomial(0.3);
        let wg = WeightSpec::polynomial(0.2);
        let wfg = WeightSpec::polynomial(0.5);
        let mut ratios = Vec::new();
        for &s in &cfg.seeds {
            let xi = sample_white_noise(grid, s);
            let rough = mollify(&xi, &MollifierSpec::new(eps)?)?;
            let smooth = heat_semigroup(sample_white_noise(grid, s ^ 0xba5e).field(), 0.02)?;
            let product = rough.mul_pointwise(&smooth);
            let nf = neg_holder_norm(&analyze(&rough, &basis)?, -0.3, &wf, cfg.collar)?;
            let ng = holder_norm_positive(&smooth, 0.8, &wg, cfg.collar)?;
            let nfg = neg_holder_norm(&analyze(&product, &basis)?, -0.3, &wfg, cfg.collar)?;
            ratios.push(nfg / (nf * ng));
        }
        let max = ratios.iter().cloned().fold(0.0_f64, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        checks.push(Check::banded(
            "young_constant_spread",
            max / min,
            0.0,
            4.0,
            n_seeds < 2,
        ));
    }

    // renormalisation identity (machine exact) and transform consistency
    {
        let eps = cfg.eps_ladder[0];
        let xi = sample_white_noise(grid, cfg.seeds[0]);
        let enh = build_enhancement(&xi, eps)?;
        let u0 = gaussian_bump(grid);
        let mut solve_cfg = cfg.solve_config();
        solve_cfg.frame_stride = solve_cfg.steps();
        let with_c = solve_direct(&enh.xi_eps, enh.c_eps, &u0, &solve_cfg)?;
        let without = solve_direct(&enh.xi_eps, 0.0, &u0, &solve_cfg)?;
        let (&t, a) = with_c.last();
        let (_, b) = without.last();
        let factor = (enh.c_eps * t).exp();
        let sup = b.values().iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
        let mut worst = 0.0_f64;
        for (x, y) in a.values().iter().zip(b.values()) {
            worst = worst.max((y - factor * x).abs() / sup);
        }
        checks.push(Check::banded("renormalisation_identity", worst, 0.0, 1e-10, false));

        let transformed = solve_transformed(&enh, &u0, &solve_cfg)?;
        let ua = transformed.u.frames().last().unwrap();
        let ub = with_c.frames().last().unwrap();
        let n = grid.points_per_axis();
        let mut dworst = 0.0_f64;
        let mut dscale = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if grid.is_interior(i, j, cfg.collar) {
                    dworst = dworst.max((ua.at(i, j) - ub.at(i, j)).abs());
                    dscale = dscale.max(ub.at(i, j).abs());
                }
            }
        }
        // smoke threshold: separates a consistent discretisation from a
        // broken transform assembly (which disagrees at order one); the
        // tight quantitative gate lives in the acceptance suite
        checks.push(Check::banded(
            "transform_consistency",
            dworst / dscale,
            0.0,
            2.5e-2,
            false,
        ));

        // Feynman-Kac agreement at the final time
        let o = grid.origin_index();
        let reference = ub.at(o, o);
        let est = feynman_kac(
            &enh.xi_eps,
            enh.c_eps,
            &u0,
            cfg.t_final,
            (0.0, 0.0),
            cfg.fk_walkers,
            cfg.fk_dt,
            cfg.seeds[0] ^ 0x5eed,
        )?;
        let sigmas = (est.mean - reference).abs() / est.stderr.max(f64::MIN_POSITIVE);
        checks.push(Check::banded(
            "feynman_kac_agreement",
            sigmas,
            0.0,
            3.0,
            cfg.fk_walkers < 10_000,
        ));
    }

    // c_eps successive differences vs ln2/(2pi) when the ladder is dyadic;
    // only rungs from 2^-3 down are in the asymptotic regime (coarser eps
    // still carry an O(eps) share of the constant's finite part)
    {
        let dyadic = cfg
            .eps_ladder
            .windows(2)
            .all(|w| (w[0] / w[1] - 2.0).abs() < 1e-12);
        if dyadic && cfg.eps_ladder.len() >= 2 {
            let cs: Vec<f64> = cfg
                .eps_ladder
                .iter()
                .map(|&e| c_epsilon_quadrature(e, grid))
                .collect::<Result<_, _>>()?;
            let mut worst: f64 = 0.0;
            let mut counted = false;
            for (w, eps) in cs.windows(2).zip(cfg.eps_ladder.windows(2)) {
                if eps[0] <= 0.13 {
                    worst = worst.max(((w[1] - w[0]) / LN2_OVER_TWO_PI - 1.0).abs());
                    counted = true;
                }
            }
            if counted {
                checks.push(Check::banded("c_eps_diff_rel_dev", worst, 0.0, 0.05, false));
            }
        }
    }

    // green kernel tabulation
    checks.push(green_kernel_check(&build_green(grid)?));

    // regularity of the mollified noise (needs enough wavelet levels)
    {
        let eps = *cfg.eps_ladder.last().unwrap();
        let xi = sample_white_noise(grid, cfg.seeds[0]);
        let xi_eps = mollify(&xi, &MollifierSpec::new(eps)?)?;
        let basis = WaveletBasis::daubechies6();
        match regularity_estimate(&analyze(&xi_eps, &basis)?, &WeightSpec::polynomial(0.04), cfg.collar) {
            Ok(fit) => checks.push(Check::banded(
                "mollified_noise_regularity",
                fit.alpha_hat,
                -1.6,
                -0.6,
                low_power,
            )),
            Err(e) => eprintln!("regularity check skipped: {e}"),
        }
    }

    let mut table = Table::new(
        "validation",
        &["check", "measured", "lower", "upper", "status", "note"],
    );
    let mut any_fail = false;
    for c in &checks {
        if c.status == CheckStatus::Fail {
            any_fail = true;
        }
        table.push(vec![
            c.name.into(),
            fmt_num(c.measured),
            fmt_num(c.lo),
            fmt_num(c.hi),
            match c.status {
                CheckStatus::Pass => "pass".into(),
                CheckStatus::Fail => "FAIL".into(),
                CheckStatus::LowPower => "low-power".into(),
            },
            c.note.clone(),
        ]);
    }
    let mut report = Report::new("validate");
    report.tables.push(table);
    report.write_to(out, cfg)?;
    for c in &checks {
        println!(
            "{:32} {:>14.6e}  [{:.3e}, {:.3e}]  {}",
            c.name,
            c.measured,
            c.lo,
            c.hi,
            match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::LowPower => "low-power",
            }
        );
    }
    Ok(if any_fail { 1 } else { 0 })
}
