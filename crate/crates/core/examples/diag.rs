// Scratch diagnostics (not part of the deliverable surface; run with
// `cargo run -p pam-core --example diag`).
use pam_core::kernels::heat_semigroup;
use pam_core::lattice::{make_grid, Field, WeightSpec};
use pam_core::solver::{picard_map, SolveConfig, SpaceTimeField};
use pam_core::stochastics::{mollify, sample_white_noise, MollifierSpec};

fn main() {
    smoothing_slope_big_box();
}

fn smoothing_slope_big_box() {
    let grid = make_grid(8.0, 2048).unwrap();
    let eps = 2.0_f64.powi(-6);
    let w = WeightSpec::exponential(0.0);
    let ts: Vec<f64> = (4..=8).rev().map(|k| 2.0_f64.powi(-k)).collect();
    let mut pooled = vec![0.0f64; ts.len()];
    let seeds = 8u64;
    for seed in 2030..2030 + seeds {
        let xi = sample_white_noise(grid, seed);
        let xi_eps = mollify(&xi, &MollifierSpec::new(eps).unwrap()).unwrap();
        let sups: Vec<f64> = ts
            .iter()
            .map(|&t| {
                pam_core::lattice::weighted_sup_norm(&heat_semigroup(&xi_eps, t).unwrap(), &w, 1.0)
            })
            .collect();
        println!("L=8 seed {seed}: slope {:.4}", fit_loglog(&ts, &sups));
        for (k, s) in sups.iter().enumerate() {
            pooled[k] += s.ln();
        }
    }
    let mean_sups: Vec<f64> = pooled.iter().map(|v| (v / seeds as f64).exp()).collect();
    println!("L=8 pooled slope {:.4}", fit_loglog(&ts, &mean_sups));
}

fn fit_loglog(ts: &[f64], sups: &[f64]) -> f64 {
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = sups.iter().map(|s| s.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>()
}

fn young_dc_diag() {
    use pam_core::besov::{analyze, neg_holder_norm, WaveletBasis};
    use pam_core::lattice::holder_norm_positive;
    let basis = WaveletBasis::daubechies6();
    let eps = 2.0_f64.powi(-3);
    let (alpha, beta) = (-0.3_f64, 0.8_f64);
    let wf = WeightSpec::polynomial(0.3);
    let wg = WeightSpec::polynomial(0.2);
    let wfg = WeightSpec::polynomial(0.5);
    let mut ratios = Vec::new();
    for npts in [64usize, 128] {
        let grid = make_grid(2.0, npts).unwrap();
        for idx in 0..100u64 {
            let xi = sample_white_noise(grid, 70_000 + idx);
            let rough = mollify(&xi, &MollifierSpec::new(eps).unwrap()).unwrap();
            let smooth = band_limited_dc(grid, 80_000 + idx);
            let product = rough.mul_pointwise(&smooth);
            let nf = neg_holder_norm(&analyze(&rough, &basis).unwrap(), alpha, &wf, 1.0).unwrap();
            let ng = holder_norm_positive(&smooth, beta, &wg, 1.0).unwrap();
            let nfg = neg_holder_norm(&analyze(&product, &basis).unwrap(), alpha, &wfg, 1.0).unwrap();
            ratios.push(nfg / (nf * ng));
        }
    }
    let max = ratios.iter().cloned().fold(0.0_f64, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("young with mean component: spread x{:.2} [{min:.4}, {max:.4}]", max / min);
}

fn band_limited_dc(grid: pam_core::Grid, seed: u64) -> Field {
    let rng = pam_core::rng::CounterRng::new(seed);
    let k0 = std::f64::consts::PI / grid.half_width();
    let mut modes = Vec::new();
    let mut counter = 0u64;
    for m1 in -4i32..=4 {
        for m2 in -4i32..=4 {
            if m1 == 0 && m2 == 0 { continue; }
            let amp = rng.standard_normal(counter);
            let phase = std::f64::consts::TAU * rng.uniform(1_000_000 + counter);
            counter += 1;
            modes.push((k0 * m1 as f64, k0 * m2 as f64, amp, phase));
        }
    }
    let norm = 1.0 / (modes.len() as f64).sqrt();
    Field::from_fn(grid, |x, y| {
        2.0 + modes.iter().map(|(kx, ky, a, p)| a * (kx * x + ky * y + p).cos()).sum::<f64>() * norm
    })
}

fn fk_diag() {
    use pam_core::enhancement::build_enhancement;
    use pam_core::solver::{feynman_kac, solve_direct, SolveConfig};
    let grid = make_grid(4.0, 512).unwrap();
    let eps = 2.0_f64.powi(-3);
    for seed in [2028u64, 2040] {
        let xi = sample_white_noise(grid, seed);
        let enh = build_enhancement(&xi, eps).unwrap();
        let u0 = Field::from_fn(grid, |x, y| (-(x * x + y * y) / 0.25).exp());
        let mut cfg = SolveConfig::new(0.05, 1e-3).unwrap();
        cfg.frame_stride = cfg.steps();
        let direct = solve_direct(&enh.xi_eps, enh.c_eps, &u0, &cfg).unwrap();
        let o = grid.origin_index();
        let reference = direct.frames().last().unwrap().at(o, o);
        for dtw in [1e-3, 2.5e-4] {
            let est = feynman_kac(&enh.xi_eps, enh.c_eps, &u0, 0.05, (0.0, 0.0), 100_000, dtw, seed ^ 1).unwrap();
            println!(
                "FK seed {seed} dtw {dtw}: ref {reference:.6} fk {:.6} +- {:.6} -> {:.2} sigma",
                est.mean, est.stderr, (est.mean - reference).abs() / est.stderr
            );
        }
    }
}
