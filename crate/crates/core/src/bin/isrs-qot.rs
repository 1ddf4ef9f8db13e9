//! Command-line front end: `gen`, `run` and `compare`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use isrs_qot::scenario::{self, GsnrTable, ScenarioConfig, ScenarioKind};
use isrs_qot::{GridStrategy, ModelRegistry, QotError};

#[derive(Parser)]
#[command(
    name = "isrs-qot",
    version,
    about = "ISRS-aware GN-model QoT estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the configuration of a built-in scenario.
    Gen {
        /// c_band_48, cl_band_96 or random_60
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to this file instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a scenario and write per-model GSNR tables.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to `output_dir` from the config, then `.`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Comma-separated model names, overriding the config.
        #[arg(long, value_delimiter = ',')]
        models: Option<Vec<String>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        zeta_points: Option<usize>,
        #[arg(long)]
        f_grid_points: Option<usize>,
        #[arg(long)]
        rel_tol: Option<f64>,
        /// uniform or hyperbolic-refined
        #[arg(long)]
        grid: Option<String>,
        /// Worker threads for per-channel model evaluation (0 = all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// MAE and MaxAE between two GSNR tables.
    Compare { a: PathBuf, b: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> isrs_qot::Result<()> {
    match command {
        Command::Gen { kind, seed, output } => {
            let kind: ScenarioKind = kind.parse()?;
            let text = scenario::generate_scenario(kind, seed).to_toml()?;
            match output {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| QotError::Io(format!("{}: {e}", path.display()))),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Run {
            config,
            out_dir,
            models,
            seed,
            zeta_points,
            f_grid_points,
            rel_tol,
            grid,
            threads,
        } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if let Some(m) = models {
                cfg.models = m;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(z) = zeta_points {
                cfg.quadrature.zeta_points = z;
            }
            if let Some(f) = f_grid_points {
                cfg.quadrature.f_grid_points = f;
            }
            if let Some(t) = rel_tol {
                cfg.quadrature.rel_tol = t;
            }
            if let Some(g) = grid {
                cfg.quadrature.grid_strategy = match g.as_str() {
                    "uniform" => GridStrategy::Uniform,
                    "hyperbolic-refined" => GridStrategy::HyperbolicRefined,
                    other => {
                        return Err(QotError::Config(format!("unknown grid strategy `{other}`")))
                    }
                };
            }
            let dir = out_dir
                .or_else(|| cfg.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("."));
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| QotError::Config(e.to_string()))?;
            let registry = ModelRegistry::with_defaults(cfg.quadrature);
            let out = pool.install(|| scenario::run(&cfg, &registry, Some(&dir)))?;

            for w in &out.warnings {
                eprintln!("{w}");
            }
            let mut stdout = std::io::stdout().lock();
            let launch: Vec<String> = cfg
                .bands
                .iter()
                .zip(&out.launch_dbm)
                .map(|(b, p)| format!("{}={}", b.name, scenario::fmt_sig6(*p)))
                .collect();
            writeln!(stdout, "launch_dbm {}", launch.join(" "))?;
            for f in &out.files {
                writeln!(stdout, "wrote {}", f.display())?;
            }
            for (name, m) in &out.metrics {
                writeln!(
                    stdout,
                    "metrics reference={} model={name} {m}",
                    cfg.models[0]
                )?;
            }
            Ok(())
        }
        Command::Compare { a, b } => {
            let m = scenario::compare_tables(&GsnrTable::read_csv(&a)?, &GsnrTable::read_csv(&b)?)?;
            println!("{m}");
            Ok(())
        }
    }
}
