//! Command-line front end for `thabound-core`: sweeps, thresholds, isolation
//! budgets, reflectivity traces, damage thresholds and convexity checks.

pub mod commands;
pub mod config;
pub mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thabound_core::budget::{ComponentCatalog, LidtPreset, PlanConstraints};
use thabound_core::AttackKind;

use commands::{BudgetArgs, ConvexityArgs, LidtArgs, Report};
use config::{resolve, Preset, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "thabound",
    version,
    about = "Trojan-horse leakage bounds for QKD transmitters"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Source {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Bundled figure configuration.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
}

impl Source {
    fn load(&self) -> anyhow::Result<RunConfig> {
        resolve(self.config.as_deref(), self.preset)
    }

    fn title(&self) -> String {
        match (&self.config, self.preset) {
            (Some(p), _) => p.display().to_string(),
            (None, Some(p)) => p.name().to_string(),
            (None, None) => Preset::Fig3.name().to_string(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Key rate versus distance to CSV, plus a gnuplot script.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// CSV output path (overrides the config).
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long)]
        l_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Largest tolerable mu_out, and maximum distances, as JSON.
    Threshold {
        #[command(flatten)]
        source: Source,
        /// Attack kind: general, passive or usd.
        #[arg(long)]
        attack: Option<AttackKind>,
        /// mu_out values for the max-distance table (repeatable).
        #[arg(long = "mu")]
        mus: Vec<f64>,
    },
    /// Isolation needed for a leakage target and component combinations meeting it.
    Budget {
        /// Target leakage per pulse.
        #[arg(long, default_value_t = 1e-6)]
        mu_out: f64,
        /// Damage-threshold photon flux N, photons/s.
        #[arg(long, default_value_t = 1e20)]
        photons: f64,
        /// Transmitter clock rate f_A, Hz.
        #[arg(long, default_value_t = 1e9)]
        clock: f64,
        /// Forbid attenuators (single-photon sources, receivers).
        #[arg(long)]
        no_attenuator: bool,
        /// Largest attenuator magnitude to consider, dB.
        #[arg(long, default_value_t = 35.0)]
        max_attenuator: f64,
        /// Component catalog taken from this run configuration.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Rows to print.
        #[arg(long, default_value_t = 20)]
        limit: usize,
        #[arg(long)]
        json: bool,
    },
    /// Total reflectivity bound from a reflection-peak trace CSV.
    Reflectivity {
        trace: PathBuf,
        /// Region start, m.
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        /// Region end, m.
        #[arg(long, default_value_t = f64::MAX)]
        to: f64,
    },
    /// Damage-threshold photon flux and its scaling.
    Lidt {
        #[arg(long)]
        preset: Option<LidtPreset>,
        /// CW power, W.
        #[arg(long)]
        power: Option<f64>,
        /// Wavelength of --power, m.
        #[arg(long, default_value_t = 1550e-9)]
        lambda: f64,
        /// Raise preset flux by 10% for longer probe wavelengths.
        #[arg(long)]
        compensate_wavelength: bool,
        /// Rescale to this pulse width, s.
        #[arg(long)]
        tau: Option<f64>,
        /// Rescale to this wavelength, m.
        #[arg(long)]
        to_lambda: Option<f64>,
    },
    /// Randomized check that uneven Trojan splits never beat the even split.
    Convexity {
        #[command(flatten)]
        source: Source,
        /// Restrict to one attack kind (repeatable).
        #[arg(long)]
        attack: Vec<AttackKind>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        mu_max: f64,
    },
}

pub fn run(cli: Cli) -> anyhow::Result<Report> {
    match cli.command {
        Command::Sweep {
            source,
            output,
            l_max,
            step,
        } => {
            let mut cfg = source.load()?;
            cfg.output_path = commands::output_path(&cfg, output);
            if let Some(l) = l_max {
                cfg.sweep.l_max = l;
            }
            if let Some(s) = step {
                cfg.sweep.step = s;
            }
            cfg.validate()?;
            commands::cmd_sweep(&cfg, &source.title())
        }
        Command::Threshold {
            source,
            attack,
            mus,
        } => commands::cmd_threshold(&source.load()?, attack, &mus),
        Command::Budget {
            mu_out,
            photons,
            clock,
            no_attenuator,
            max_attenuator,
            config,
            limit,
            json,
        } => {
            let catalog = match config {
                Some(path) => RunConfig::load(&path)?.catalog.unwrap_or_default(),
                None => ComponentCatalog::default(),
            };
            let args = BudgetArgs {
                mu_out,
                photons,
                clock_hz: clock,
                constraints: PlanConstraints {
                    max_attenuator_db: max_attenuator,
                    allow_attenuator: !no_attenuator,
                },
                limit,
                json,
            };
            commands::cmd_budget(&args, &catalog)
        }
        Command::Reflectivity { trace, from, to } => commands::cmd_reflectivity(&trace, (from, to)),
        Command::Lidt {
            preset,
            power,
            lambda,
            compensate_wavelength,
            tau,
            to_lambda,
        } => commands::cmd_lidt(&LidtArgs {
            preset,
            power_w: power,
            wavelength_m: lambda,
            compensate: compensate_wavelength,
            pulse_width_s: tau,
            scale_wavelength_m: to_lambda,
        }),
        Command::Convexity {
            source,
            attack,
            samples,
            seed,
            mu_max,
        } => commands::cmd_convexity(
            &source.load()?,
            &ConvexityArgs {
                kinds: attack,
                samples,
                seed,
                mu_max,
            },
        ),
    }
}
