//! Experiment harness for the fractional-diffusion solver.
//!
//! Subcommands:
//!   convergence  sweep the polynomial degree, write a convergence table
//!   sinc-study   scalar contour-quadrature error against a deep reference
//!   mlf-check    Mittag-Leffler accuracy against the series oracle
//!   solve        one discretization, print sampled solution values
//!
//! Flags: --config <path>, --out <dir>, --threads <n>, --preset <name>.
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod config;
mod experiments;
mod presets;

use experiments::ExperimentConfig;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

struct Args {
    command: String,
    config: Option<String>,
    out: Option<String>,
    threads: Option<usize>,
    preset: Option<String>,
}

fn parse_args() -> Result<Args, String> {
    let mut argv = std::env::args().skip(1);
    let command = argv.next().ok_or_else(usage)?;
    let mut args = Args {
        command,
        config: None,
        out: None,
        threads: None,
        preset: None,
    };
    while let Some(flag) = argv.next() {
        let mut take = |name: &str| -> Result<String, String> {
            argv.next().ok_or(format!("{name} expects a value"))
        };
        match flag.as_str() {
            "--config" => args.config = Some(take("--config")?),
            "--out" => args.out = Some(take("--out")?),
            "--threads" => {
                args.threads = Some(
                    take("--threads")?
                        .parse()
                        .map_err(|_| "--threads expects an integer".to_string())?,
                )
            }
            "--preset" => args.preset = Some(take("--preset")?),
            other => return Err(format!("unknown flag `{other}`\n{}", usage())),
        }
    }
    Ok(args)
}

fn usage() -> String {
    "usage: fracsinc <convergence|sinc-study|mlf-check|solve> \
     [--config <path>] [--out <dir>] [--threads <n>] [--preset <name>]"
        .to_string()
}

fn load_config(args: &Args) -> Result<ExperimentConfig, String> {
    let raw = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config `{path}`: {e}"))?;
            config::parse(&text)?
        }
        None => config::parse("")?,
    };
    let mut cfg = experiments::resolve(&raw, args.preset.as_deref())?;
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn write_outputs(cfg: &ExperimentConfig, name: &str, csv: &str, wall_s: f64) -> Result<(), String> {
    let dir = Path::new(&cfg.out_dir);
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create `{}`: {e}", cfg.out_dir))?;
    let csv_path = dir.join(format!("{name}.csv"));
    std::fs::write(&csv_path, csv).map_err(|e| format!("cannot write {csv_path:?}: {e}"))?;
    let man_path = dir.join(format!("{name}-manifest.txt"));
    std::fs::write(&man_path, experiments::manifest(cfg, wall_s))
        .map_err(|e| format!("cannot write {man_path:?}: {e}"))?;
    println!("wrote {}", csv_path.display());
    Ok(())
}

fn run() -> Result<(), (u8, String)> {
    let args = parse_args().map_err(|e| (2u8, e))?;
    #[cfg(feature = "parallel")]
    if let Some(n) = args.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    if args.threads.is_some() {
        eprintln!("note: built without the `parallel` feature; --threads ignored");
    }
    let cfg = load_config(&args).map_err(|e| (2u8, e))?;
    let t0 = Instant::now();
    match args.command.as_str() {
        "convergence" => {
            let rows = experiments::run_convergence(&cfg).map_err(|e| (3u8, e))?;
            let csv = experiments::convergence_csv(&rows);
            print!("{csv}");
            write_outputs(&cfg, "convergence", &csv, t0.elapsed().as_secs_f64())
                .map_err(|e| (3u8, e))?;
        }
        "sinc-study" => {
            let rows = experiments::run_sinc_study(&cfg).map_err(|e| (3u8, e))?;
            let csv = experiments::sinc_csv(&rows);
            print!("{csv}");
            write_outputs(&cfg, "sinc-study", &csv, t0.elapsed().as_secs_f64())
                .map_err(|e| (3u8, e))?;
        }
        "mlf-check" => {
            let rows = experiments::run_mlf_check(&cfg).map_err(|e| (3u8, e))?;
            let csv = experiments::mlf_csv(&rows);
            print!("{csv}");
            write_outputs(&cfg, "mlf-check", &csv, t0.elapsed().as_secs_f64())
                .map_err(|e| (3u8, e))?;
        }
        "solve" => {
            let problem = cfg.problem().map_err(|e| (3u8, e.to_string()))?;
            let p = *cfg.p_list.last().unwrap_or(&6);
            let sol = fracsinc::solver::prepare(&problem, &cfg.discretization(p))
                .map_err(|e| (3u8, e.to_string()))?;
            println!("# p = {p}, ndof = {}, n_q = {}", sol.space.ndof, sol.config.n_q);
            println!("t,x,u");
            for &t in &cfg.times {
                let u = sol.eval(t).map_err(|e| (3u8, e.to_string()))?;
                for i in 0..=20 {
                    let x = cfg.interval.0
                        + (cfg.interval.1 - cfg.interval.0) * i as f64 / 20.0;
                    println!("{t:.6e},{x:.6e},{:.12e}", u.eval_real(x));
                }
            }
        }
        other => return Err((2u8, format!("unknown subcommand `{other}`\n{}", usage()))),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
