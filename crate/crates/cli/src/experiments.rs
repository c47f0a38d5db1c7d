//! Experiment drivers: convergence sweeps, the scalar sinc study, and the
//! Mittag-Leffler accuracy table. Every row carries the fully resolved
//! parameter set; CSV output is deterministic apart from the wall_ms
//! column.

use crate::config::{check_sections, config_hash, RawConfig, Section};
use crate::presets::{self, Preset};
use fracsinc::compare::{l2_distance, merged_breakpoints, project_function};
use fracsinc::contour::{default_step, g_lambda, sinc_integrate};
use fracsinc::hpfem::Coefficients1D;
use fracsinc::mlf::{ml_eval, MLParams, MlOracle};
use fracsinc::solver::{prepare, DiscretizationConfig, FracProblem};
use fracsinc::spectral::{discrete_eigenpairs, htilde_norm_fem, spacetime_error};
use fracsinc::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

pub struct ExperimentConfig {
    pub preset: Preset,
    pub gamma: f64,
    pub beta: f64,
    pub t_end: f64,
    pub interval: (f64, f64),
    pub coeffs: Coefficients1D,
    pub p_list: Vec<usize>,
    pub times: Vec<f64>,
    pub mesh_sigma: f64,
    pub quad_sigma: f64,
    pub nq_rule: NqRule,
    pub out_dir: String,
    // sinc study
    pub sinc_lambda: f64,
    pub sinc_t: f64,
    pub sinc_nq: Vec<usize>,
    pub sinc_reference_nq: usize,
    // mlf check
    pub mlf_pairs: Vec<(f64, f64)>,
    pub mlf_samples: usize,
    pub mlf_radius_max: f64,
    pub raw_text: String,
}

pub enum NqRule {
    SixPSquared,
    Fixed(usize),
}

impl NqRule {
    fn apply(&self, p: usize) -> usize {
        match self {
            NqRule::SixPSquared => 6 * p * p,
            NqRule::Fixed(n) => *n,
        }
    }
}

pub fn resolve(raw: &RawConfig, preset_flag: Option<&str>) -> Result<ExperimentConfig, String> {
    check_sections(raw, &["problem", "sweep", "output", "sinc", "mlf"])?;
    let mut problem = Section::new(raw, "problem");
    let preset_name = match preset_flag {
        Some(p) => p.to_string(),
        None => problem
            .get("data")
            .unwrap_or("example71-1d")
            .to_string(),
    };
    if preset_flag.is_some() {
        // consume a data key if the config also carries one
        let _ = problem.get("data");
    }
    let preset = presets::lookup(&preset_name).ok_or_else(|| {
        format!(
            "unknown data preset `{preset_name}` (available: {})",
            presets::PRESET_NAMES.join(", ")
        )
    })?;
    let gamma = problem.f64("gamma")?.unwrap_or(preset.default_gamma);
    let beta = problem.f64("beta")?.unwrap_or(preset.default_beta);
    let t_end = problem.f64("t_end")?.unwrap_or(1.0);
    let interval = match problem.f64_list("interval")? {
        None => (0.0, 1.0),
        Some(v) if v.len() == 2 && v[0] < v[1] => (v[0], v[1]),
        Some(v) => return Err(format!("[problem] interval: expected two ascending numbers, got {v:?}")),
    };
    let coeffs = match problem.get("coefficients") {
        None => Coefficients1D::constant(1.0, 0.0),
        Some(spec) => {
            let parts: Vec<&str> = spec.split_whitespace().collect();
            match parts.as_slice() {
                ["constant", a0, c0] => {
                    let a0: f64 = a0.parse().map_err(|_| "bad A0".to_string())?;
                    let c0: f64 = c0.parse().map_err(|_| "bad c0".to_string())?;
                    if a0 <= 0.0 || c0 < 0.0 {
                        return Err("[problem] coefficients: need A0 > 0, c0 >= 0".into());
                    }
                    Coefficients1D::constant(a0, c0)
                }
                _ => {
                    return Err(format!(
                        "[problem] coefficients: `{spec}` not recognized (use `constant A0 c0`)"
                    ))
                }
            }
        }
    };
    problem.finish()?;

    let mut sweep = Section::new(raw, "sweep");
    let p_list = sweep.usize_list("p")?.unwrap_or_else(|| (2..=8).collect());
    if p_list.iter().any(|&p| p == 0) {
        return Err("[sweep] p: degrees must be >= 1".into());
    }
    let times = sweep.f64_list("times")?.unwrap_or_else(|| vec![1.0]);
    let mesh_sigma = sweep.f64("mesh_sigma")?.unwrap_or(0.125);
    let quad_sigma = sweep.f64("quad_sigma")?.unwrap_or(0.125);
    let nq_rule = match sweep.get("nq_rule") {
        None => NqRule::SixPSquared,
        Some("6p2") => NqRule::SixPSquared,
        Some(v) => NqRule::Fixed(
            v.parse::<usize>()
                .map_err(|_| format!("[sweep] nq_rule: `{v}` is neither `6p2` nor an integer"))?,
        ),
    };
    match sweep.get("k_rule") {
        None | Some("default") => {}
        Some(v) => return Err(format!("[sweep] k_rule: only `default` is supported, got `{v}`")),
    }
    match sweep.get("nhp_rule") {
        None | Some("p") => {}
        Some(v) => return Err(format!("[sweep] nhp_rule: only `p` is supported, got `{v}`")),
    }
    sweep.finish()?;

    let mut output = Section::new(raw, "output");
    let out_dir = output.get("dir").unwrap_or("out").to_string();
    match output.get("format") {
        None | Some("csv") => {}
        Some(v) => return Err(format!("[output] format: only `csv` is supported, got `{v}`")),
    }
    output.finish()?;

    let mut sinc = Section::new(raw, "sinc");
    let sinc_lambda = sinc.f64("lambda")?.unwrap_or(4.0 * PI * PI);
    let sinc_t = sinc.f64("t")?.unwrap_or(1.0);
    let sinc_nq = sinc
        .usize_list("nq")?
        .unwrap_or_else(|| vec![25, 100, 400, 1600]);
    let sinc_reference_nq = sinc.usize("reference_nq")?.unwrap_or(10_000);
    sinc.finish()?;

    let mut mlf = Section::new(raw, "mlf");
    let mlf_pairs = match mlf.f64_list("pairs")? {
        None => vec![
            (0.5, 0.5),
            (0.6, 1.0),
            (0.75, 0.75),
            (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
        ],
        Some(v) if v.len() % 2 == 0 => v.chunks(2).map(|c| (c[0], c[1])).collect(),
        Some(_) => return Err("[mlf] pairs: expected an even list `g1 mu1 g2 mu2 ...`".into()),
    };
    let mlf_samples = mlf.usize("samples")?.unwrap_or(250);
    let mlf_radius_max = mlf.f64("radius_max")?.unwrap_or(50.0);
    mlf.finish()?;

    Ok(ExperimentConfig {
        preset,
        gamma,
        beta,
        t_end,
        interval,
        coeffs,
        p_list,
        times,
        mesh_sigma,
        quad_sigma,
        nq_rule,
        out_dir,
        sinc_lambda,
        sinc_t,
        sinc_nq,
        sinc_reference_nq,
        mlf_pairs,
        mlf_samples,
        mlf_radius_max,
        raw_text: raw.text.clone(),
    })
}

impl ExperimentConfig {
    pub fn problem(&self) -> Result<FracProblem, fracsinc::Error> {
        FracProblem::new(
            self.gamma,
            self.beta,
            self.t_end,
            self.interval,
            self.coeffs.clone(),
            self.preset.u0.clone(),
            (self.preset.source_for)(self.gamma, self.beta),
        )
    }

    pub fn discretization(&self, p: usize) -> DiscretizationConfig {
        DiscretizationConfig {
            p,
            mesh_layers: p,
            mesh_sigma: self.mesh_sigma,
            n_q: self.nq_rule.apply(p),
            k: None,
            n_hp: p,
            quad_sigma: self.quad_sigma,
            b: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub p: usize,
    pub n_q: usize,
    pub n_hp: usize,
    pub ndof: usize,
    pub t: f64,
    pub err_l2: f64,
    pub err_hbeta: f64,
    pub err_spacetime: f64,
    pub wall_ms: f64,
    pub factorizations: u64,
}

pub const CONVERGENCE_HEADER: &str =
    "p,n_q,n_hp,ndof,t,err_L2,err_Hbeta,err_spacetime,wall_ms,factorizations";

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from(CONVERGENCE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6e},{:.12e},{:.12e},{:.12e},{:.3},{}",
            r.p,
            r.n_q,
            r.n_hp,
            r.ndof,
            r.t,
            r.err_l2,
            r.err_hbeta,
            r.err_spacetime,
            r.wall_ms,
            r.factorizations
        );
    }
    out
}

/// One row per (p, t): errors against the preset's closed form when it has
/// one, otherwise self-convergence against the largest sweep member (which
/// then reports zero against itself). Row failures abort the row, not the
/// run.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Vec<ConvergenceRow>, String> {
    let problem = cfg.problem().map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    if cfg.p_list.is_empty() {
        return Ok(rows);
    }
    // prepare all degrees (the largest may serve as the reference)
    let mut sols = Vec::new();
    for &p in &cfg.p_list {
        let t0 = Instant::now();
        match prepare(&problem, &cfg.discretization(p)) {
            Ok(s) => sols.push(Some((s, t0.elapsed().as_secs_f64() * 1e3))),
            Err(e) => {
                eprintln!("warning: prepare failed at p={p}: {e}");
                sols.push(None);
            }
        }
    }
    let p_ref = *cfg.p_list.iter().max().unwrap();
    let ref_idx = cfg.p_list.iter().position(|&p| p == p_ref).unwrap();
    // reference machinery for the H~beta norm: discrete eigenpairs on the
    // finest space of the sweep
    let ref_sol = sols[ref_idx].as_ref().map(|(s, _)| s);
    let basis = match ref_sol {
        Some(s) => match discrete_eigenpairs(&s.space, &s.mats, s.space.ndof.min(260)) {
            Ok(b) => Some(Arc::new(b)),
            Err(e) => {
                eprintln!("warning: discrete eigenpairs failed: {e}");
                None
            }
        },
        None => None,
    };
    for (i, &p) in cfg.p_list.iter().enumerate() {
        let Some((sol, prep_ms)) = &sols[i] else {
            continue;
        };
        for &t in &cfg.times {
            let t0 = Instant::now();
            let u = match sol.eval(t) {
                Ok(u) => u,
                Err(e) => {
                    eprintln!("warning: eval failed at p={p}, t={t}: {e}");
                    continue;
                }
            };
            let eval_ms = t0.elapsed().as_secs_f64() * 1e3;
            // the error target: closed form, or the finest sweep member
            let exact: Box<dyn Fn(f64) -> f64> = match &cfg.preset.exact_for {
                Some(make) => {
                    let f = make(cfg.gamma, cfg.beta);
                    Box::new(move |x| f(t, x))
                }
                None => {
                    let Some(rs) = ref_sol else { continue };
                    match rs.eval(t) {
                        Ok(ur) => Box::new(move |x| ur.eval_real(x)),
                        Err(e) => {
                            eprintln!("warning: reference eval failed at t={t}: {e}");
                            continue;
                        }
                    }
                }
            };
            let meshes: Vec<&fracsinc::hpfem::GeometricMesh1D> = match ref_sol {
                Some(rs) => vec![&sol.space.mesh, &rs.space.mesh],
                None => vec![&sol.space.mesh],
            };
            let err_l2 = l2_distance(&meshes, sol.space.degree + 8, |x| u.eval_real(x), &exact);
            let err_hbeta = match (&basis, ref_sol) {
                (Some(b), Some(rs)) => {
                    let breaks = merged_breakpoints(&meshes);
                    match project_function(&rs.space, &rs.mats, &breaks, |x| {
                        u.eval_real(x) - exact(x)
                    }) {
                        Ok(diff) => htilde_norm_fem(b, &diff, cfg.beta).0,
                        Err(e) => {
                            eprintln!("warning: projection failed: {e}");
                            f64::NAN
                        }
                    }
                }
                _ => f64::NAN,
            };
            // space-time functional over (0, t]
            let err_spacetime = match (&basis, ref_sol) {
                (Some(b), Some(rs)) => {
                    let breaks = merged_breakpoints(&meshes);
                    spacetime_error(cfg.gamma, t, 8, |tau| {
                        let u_tau = sol.eval(tau)?;
                        let target: Box<dyn Fn(f64) -> f64> = match &cfg.preset.exact_for {
                            Some(make) => {
                                let f = make(cfg.gamma, cfg.beta);
                                Box::new(move |x| f(tau, x))
                            }
                            None => {
                                let ur = rs.eval(tau)?;
                                Box::new(move |x| ur.eval_real(x))
                            }
                        };
                        let diff = project_function(&rs.space, &rs.mats, &breaks, |x| {
                            u_tau.eval_real(x) - target(x)
                        })?;
                        Ok(htilde_norm_fem(b, &diff, cfg.beta).0.powi(2))
                    })
                    .unwrap_or(f64::NAN)
                }
                _ => f64::NAN,
            };
            rows.push(ConvergenceRow {
                p,
                n_q: sol.config.n_q,
                n_hp: sol.config.n_hp,
                ndof: sol.space.ndof,
                t,
                err_l2,
                err_hbeta,
                err_spacetime,
                wall_ms: prep_ms + eval_ms,
                factorizations: sol.factorization_count(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct SincRow {
    pub n_q: usize,
    pub k: f64,
    pub scalar_quad_error: f64,
}

pub const SINC_HEADER: &str = "n_q,k,scalar_quad_error";

pub fn sinc_csv(rows: &[SincRow]) -> String {
    let mut out = String::from(SINC_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{:.12e},{:.12e}", r.n_q, r.k, r.scalar_quad_error);
    }
    out
}

/// Scalar g_lambda sinc quadrature against a high-resolution reference.
pub fn run_sinc_study(cfg: &ExperimentConfig) -> Result<Vec<SincRow>, String> {
    let sector = fracsinc::contour::SectorParams::for_interval(
        cfg.interval.0,
        cfg.interval.1,
        cfg.coeffs.a_min,
    )
    .map_err(|e| e.to_string())?;
    let b = sector.default_b();
    let quad = |n_q: usize| -> Result<Complex64, String> {
        let k = default_step(cfg.beta, n_q, PI / 5.0);
        sinc_integrate(
            |y| {
                g_lambda(
                    cfg.sinc_lambda,
                    Complex64::new(y, 0.0),
                    cfg.sinc_t,
                    cfg.gamma,
                    cfg.beta,
                    b,
                )
                .unwrap_or(Complex64::new(f64::NAN, 0.0))
            },
            k,
            n_q,
        )
        .map_err(|e| e.to_string())
    };
    let reference = quad(cfg.sinc_reference_nq)?;
    let mut rows = Vec::new();
    for &n_q in &cfg.sinc_nq {
        let v = quad(n_q)?;
        rows.push(SincRow {
            n_q,
            k: default_step(cfg.beta, n_q, PI / 5.0),
            scalar_quad_error: (v - reference).norm(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct MlfRow {
    pub gamma: f64,
    pub mu: f64,
    pub samples: usize,
    pub max_rel_err: f64,
}

pub const MLF_HEADER: &str = "gamma,mu,samples,max_rel_err";

pub fn mlf_csv(rows: &[MlfRow]) -> String {
    let mut out = String::from(MLF_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{},{:.12e}",
            r.gamma, r.mu, r.samples, r.max_rel_err
        );
    }
    out
}

/// Sector sampling of ml_eval against the series oracle.
pub fn run_mlf_check(cfg: &ExperimentConfig) -> Result<Vec<MlfRow>, String> {
    let mut rows = Vec::new();
    for &(g, mu) in &cfg.mlf_pairs {
        let params = MLParams::new(g, mu).map_err(|e| e.to_string())?;
        let oracle = MlOracle::new(params);
        let radii = cfg.mlf_samples / 10;
        let mut worst: f64 = 0.0;
        let mut used = 0usize;
        for i in 0..radii {
            let r = 10f64.powf(
                -2.0 + (cfg.mlf_radius_max.log10() + 2.0) * i as f64 / (radii - 1).max(1) as f64,
            );
            // fewer angles at the expensive top radii
            let angles = if i + 2 >= radii { 4 } else { 10 };
            for j in 0..angles {
                let arg = 3.0 * PI / 4.0 + (PI / 4.0) * j as f64 / (angles - 1).max(1) as f64;
                let w = Complex64::from_polar(r, arg);
                let v = ml_eval(params, w, 1e-12).map_err(|e| e.to_string())?;
                let o = oracle.eval(w).map_err(|e| e.to_string())?;
                worst = worst.max((v - o).norm() / o.norm().max(1e-30));
                used += 1;
            }
        }
        rows.push(MlfRow {
            gamma: g,
            mu,
            samples: used,
            max_rel_err: worst,
        });
    }
    Ok(rows)
}

/// Resolved-parameter manifest line set for a run.
pub fn manifest(cfg: &ExperimentConfig, wall_s: f64) -> String {
    format!(
        "config_hash = {:016x}\nlibrary_version = {}\nwall_seconds = {:.3}\npreset = {}\ngamma = {:.16e}\nbeta = {:.16e}\n",
        config_hash(&cfg.raw_text),
        env!("CARGO_PKG_VERSION"),
        wall_s,
        cfg.preset.name,
        cfg.gamma,
        cfg.beta,
    )
}
