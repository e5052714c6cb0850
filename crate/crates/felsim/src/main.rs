//! Thin command-line frontend over [`felsim::runner`].
//!
//! Exit codes: 0 success, 2 config error, 3 numerical-diagnostic abort,
//! 1 anything else. Progress goes to stderr; data goes to files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use felsim::runner::{self, FigureId, RunArtifacts, SimulationConfig};
use felsim::Error;

#[derive(Parser)]
#[command(name = "felsim", version, about = "Stochastic FEL pulse and resonant-Auger lineshape simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// JSON config file (flat schema, see docs/config.schema.json).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides config and FELSIM_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    n_traj: Option<u64>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    sigma_omega: Option<f64>,
    /// PSD FWHM (alternative to --sigma-omega).
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    rabi_peak: Option<f64>,
    /// gaussian | lorentzian
    #[arg(long)]
    psd_family: Option<String>,
    #[arg(long)]
    detuning_min: Option<f64>,
    #[arg(long)]
    detuning_max: Option<f64>,
    #[arg(long)]
    detuning_step: Option<f64>,
}

impl ConfigArgs {
    fn build(&self, base: SimulationConfig) -> Result<SimulationConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => SimulationConfig::from_json_file(path)?,
            None => base,
        };
        self.apply(&mut cfg)?;
        Ok(cfg)
    }

    fn apply(&self, cfg: &mut SimulationConfig) -> Result<(), Error> {
        if let Some(dir) = &self.out {
            cfg.output_dir = Some(dir.clone());
        }
        if let Some(n) = self.n_traj {
            cfg.n_traj = n;
        }
        if let Some(s) = self.master_seed {
            cfg.master_seed = s;
        }
        if let Some(s) = self.sigma_omega {
            cfg.sigma_omega = Some(s);
            cfg.bandwidth = None;
        }
        if let Some(b) = self.bandwidth {
            cfg.bandwidth = Some(b);
            cfg.sigma_omega = None;
        }
        if let Some(t) = self.tau {
            cfg.tau = t;
        }
        if let Some(r) = self.rabi_peak {
            cfg.rabi_peak = r;
        }
        if let Some(f) = &self.psd_family {
            cfg.psd_family = serde_json::from_value(serde_json::Value::String(f.clone()))
                .map_err(|_| Error::Config {
                    field: "psd_family".into(),
                    message: format!("unknown family `{f}` (gaussian | lorentzian)"),
                })?;
        }
        if let Some(d) = self.detuning_min {
            cfg.detuning_min = d;
        }
        if let Some(d) = self.detuning_max {
            cfg.detuning_max = d;
        }
        if let Some(d) = self.detuning_step {
            cfg.detuning_step = d;
        }
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Dump sample pulse realizations and the ensemble mean intensity.
    GenPulses {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Number of individual pulses to dump.
        #[arg(long, default_value_t = 2)]
        dump: usize,
    },
    /// Coherence, intensity/energy histograms, and spectrum of the ensemble.
    FieldStats {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Ensemble lineshape over the configured detuning grid.
    Scan {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Dump this many per-pulse density-matrix solutions (debugging).
        #[arg(long, default_value_t = 0)]
        dump_trajectories: usize,
    },
    /// Deterministic phase-diffusion-model lineshape.
    PdmScan {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Decorrelation error vs peak Rabi frequency, both noise families.
    DecorrError {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Peak Rabi frequencies to sweep (units of gamma2).
        #[arg(long, value_delimiter = ',', default_value = "0.001,0.01,0.1,1.0")]
        rabi: Vec<f64>,
    },
    /// FWHM vs bandwidth for the PDM and Gaussian noise, with the Voigt law.
    FwhmCurve {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_delimiter = ',', default_value = "3.0,20.0")]
        taus: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1.0,2.0,4.0,8.0,16.0")]
        gammas: Vec<f64>,
    },
    /// Rebuild the data behind a named figure preset.
    Reproduce {
        /// fig1 | fig3 | fig4 | decor | line1 | line2 | fw | exp
        figure: String,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

fn run(cli: Cli) -> Result<RunArtifacts, Error> {
    match cli.command {
        Command::GenPulses { cfg, dump } => {
            runner::run_gen_pulses(&cfg.build(SimulationConfig::default())?, dump)
        }
        Command::FieldStats { cfg } => {
            runner::run_field_stats(&cfg.build(SimulationConfig::default())?)
        }
        Command::Scan { cfg, dump_trajectories } => runner::run_scan_with_dumps(
            &cfg.build(SimulationConfig::default())?,
            dump_trajectories,
        ),
        Command::PdmScan { cfg } => {
            runner::run_pdm_scan(&cfg.build(SimulationConfig::default())?)
        }
        Command::DecorrError { cfg, rabi } => {
            runner::run_decorr_error(&cfg.build(SimulationConfig::default())?, &rabi)
        }
        Command::FwhmCurve { cfg, taus, gammas } => {
            runner::run_fwhm_curve(&cfg.build(SimulationConfig::default())?, &taus, &gammas)
        }
        Command::Reproduce { figure, cfg } => {
            let id: FigureId = figure.parse()?;
            runner::run_reproduce(id, |preset| {
                let _ = cfg.apply(preset);
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(artifacts) => {
            for f in &artifacts.files {
                eprintln!("wrote {}", f.display());
            }
            for (k, v) in &artifacts.summary {
                eprintln!("{k} = {v}");
            }
            ExitCode::SUCCESS
        }
        Err(e @ Error::Config { .. }) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e @ Error::ConservationViolation { .. }) => {
            eprintln!("numerical diagnostic: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
