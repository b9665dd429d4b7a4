use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use propeq::harness::{self, Execution, ScenarioConfig, Stages};
use propeq::{forward_fft, predict_blind_spots, Error, Result};

#[derive(Parser)]
#[command(
    name = "propeq",
    version,
    about = "Propeller-modulation equalization with a reference tone"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and report raw and equalized DDM.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        fp: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "snr-db")]
        snr_db: Option<f64>,
        /// Drop the AWGN stage.
        #[arg(long, conflicts_with = "snr_db")]
        noiseless: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the propeller frequency over a grid with several noise seeds.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "fp-start", default_value_t = 15.0)]
        fp_start: f64,
        #[arg(long = "fp-stop", default_value_t = 40.0)]
        fp_stop: f64,
        #[arg(long = "fp-step", default_value_t = 0.5)]
        fp_step: f64,
        /// Number of seeds, counted up from the config's rng_seed.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long = "snr-db")]
        snr_db: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long)]
        serial: bool,
    },
    /// List propeller speeds whose modulator hits the ILS tone frequencies.
    Blindspots {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        threshold: f64,
        /// Check a single speed instead of scanning the grid.
        #[arg(long)]
        fp: Option<f64>,
        #[arg(long = "fp-start", default_value_t = 15.0)]
        fp_start: f64,
        #[arg(long = "fp-stop", default_value_t = 40.0)]
        fp_stop: f64,
        #[arg(long = "fp-step", default_value_t = 0.5)]
        fp_step: f64,
    },
    /// Dump a spectrum as freq_hz,re,im,mag_db CSV.
    Spectrum {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        stage: Stage,
        #[arg(long)]
        fp: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Stage {
    Rx,
    Equalized,
    Modulator,
}

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig> {
    match path {
        None => Ok(ScenarioConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            ScenarioConfig::from_json(&text).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("{}: {msg}", p.display())),
                other => other,
            })
        }
    }
}

fn with_fp(cfg: ScenarioConfig, fp: Option<f64>) -> Result<ScenarioConfig> {
    match fp {
        Some(f) => cfg.with_fp(f),
        None => Ok(cfg),
    }
}

fn blind_spot_note(spots: &[f64]) -> String {
    if spots.is_empty() {
        String::new()
    } else {
        let hz: Vec<String> = spots.iter().map(|f| format!("{f} Hz")).collect();
        format!(
            "  [blind spot at {}: equalization may underperform]",
            hz.join(", ")
        )
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            config,
            fp,
            seed,
            snr_db,
            noiseless,
            out,
        } => {
            let mut cfg = with_fp(load_config(config.as_deref())?, fp)?;
            if let Some(s) = seed {
                cfg = cfg.with_seed(s);
            }
            if noiseless {
                cfg.channel = cfg.channel.with_snr_db(None)?;
            } else if snr_db.is_some() {
                cfg.channel = cfg.channel.with_snr_db(snr_db)?;
            }
            cfg.validate()?;
            let r = harness::run_single(&cfg)?;
            println!("f_p_hz   {}", r.f_p_hz);
            println!("seed     {}", r.seed);
            println!("ddm_raw  {:.9}  (deviation {:.3e})", r.ddm_raw, r.dev_raw);
            println!(
                "ddm_eq   {:.9}  (deviation {:.3e}){}",
                r.ddm_eq,
                r.dev_eq,
                blind_spot_note(&cfg.blind_spots()?)
            );
            if let Some(path) = out {
                harness::emit_csv(&harness::SweepResult::from_runs(vec![r]), &path)?;
            }
        }
        Command::Sweep {
            config,
            fp_start,
            fp_stop,
            fp_step,
            seeds,
            snr_db,
            out,
            plot,
            serial,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            if snr_db.is_some() {
                cfg.channel = cfg.channel.with_snr_db(snr_db)?;
            }
            let base = cfg.channel.rng_seed();
            let seed_list: Vec<u64> = (0..seeds).map(|i| base.wrapping_add(i)).collect();
            let exec = if serial {
                Execution::Serial
            } else {
                Execution::Parallel
            };
            let result = harness::sweep_fp(&cfg, fp_start, fp_stop, fp_step, &seed_list, exec)?;
            println!("f_p_hz  median_dev_raw  median_dev_eq");
            for s in &result.summaries {
                println!(
                    "{:6.2}  {:14.6e}  {:13.6e}{}",
                    s.f_p_hz,
                    s.median_dev_raw,
                    s.median_dev_eq,
                    blind_spot_note(&s.blind_spots)
                );
            }
            harness::emit_csv(&result, &out)?;
            if let Some(path) = plot {
                harness::emit_plot(&result, &path)?;
            }
        }
        Command::Blindspots {
            config,
            threshold,
            fp,
            fp_start,
            fp_stop,
            fp_step,
        } => {
            let cfg = load_config(config.as_deref())?;
            let grid = match fp {
                Some(f) => vec![f],
                None => harness::fp_grid(fp_start, fp_stop, fp_step)?,
            };
            let mut any = false;
            for f in grid {
                let c = cfg.clone().with_fp(f)?;
                let spots = predict_blind_spots(
                    &c.channel,
                    c.clock,
                    &c.blind_spots.critical_hz,
                    threshold,
                )?;
                if !spots.is_empty() {
                    any = true;
                    let hz: Vec<String> = spots.iter().map(|s| s.to_string()).collect();
                    println!(
                        "f_p = {f} Hz: modulator component at {} Hz, equalization may underperform",
                        hz.join(", ")
                    );
                }
            }
            if !any {
                println!("no blind spots above threshold {threshold}");
            }
        }
        Command::Spectrum {
            config,
            stage,
            fp,
            out,
        } => {
            let cfg = with_fp(load_config(config.as_deref())?, fp)?;
            cfg.validate()?;
            let spec = match stage {
                Stage::Modulator => Stages::modulator_spectrum(&cfg),
                Stage::Rx => Stages::run(&cfg)?.rx_spec,
                Stage::Equalized => forward_fft(&Stages::run(&cfg)?.equalized),
            };
            harness::dump_spectrum(&spec, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
