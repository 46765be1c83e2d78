use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sqsl::hamiltonians::HamiltonianSpec;
use sqsl::harness::{
    describe, emit_csv, emit_plotdata, load_config, preset, run_scenario, validate_suite, ExperimentConfig,
    ValidateOptions, PRESET_IDS,
};
use sqsl::Error;

#[derive(Parser)]
#[command(name = "sqsl", version, about = "Quantum speed limit bounds for mixed states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a built-in scenario.
    Preset {
        id: String,
        /// Seed for the candidate observables.
        #[arg(long)]
        seed: Option<u64>,
        /// Seed for the GUE Hamiltonian (gue3 only).
        #[arg(long)]
        h_seed: Option<u64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        candidates: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite and print a JSON report.
    Validate {
        /// Also fail on empirical per-preset claims.
        #[arg(long)]
        strict: bool,
        /// Evaluate the uncertainty relation with the unfavorable sign.
        #[arg(long)]
        inject_sign_flip: bool,
        #[arg(long, default_value_t = ValidateOptions::default().seed)]
        seed: u64,
    },
    /// List the built-in scenarios.
    ListPresets,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation { .. } | Error::Parse { .. } | Error::UnknownPreset(_) => 1,
        Error::Scenario { source, .. } => exit_code(source),
        _ => 2,
    }
}

fn execute(cfg: &ExperimentConfig) -> Result<(), Error> {
    let table = run_scenario(cfg)?;
    let csv = cfg.output_dir.join(format!("{}.csv", cfg.scenario));
    emit_csv(&table, &csv)?;
    println!("{}", csv.display());
    for path in emit_plotdata(&table, &cfg.output_dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn preset_config(
    id: &str,
    seed: Option<u64>,
    h_seed: Option<u64>,
    steps: Option<usize>,
    t_end: Option<f64>,
    candidates: Option<usize>,
    out: Option<PathBuf>,
) -> Result<ExperimentConfig, Error> {
    let mut cfg = preset(id)?;
    if let Some(s) = seed {
        cfg.candidate_seed = s;
    }
    if let Some(s) = h_seed {
        match &mut cfg.hamiltonian {
            HamiltonianSpec::Gue { seed, .. } => *seed = s,
            _ => {
                return Err(Error::Validation {
                    field: "h_seed".into(),
                    message: format!("preset {id} has no random Hamiltonian"),
                })
            }
        }
    }
    cfg.steps = steps.unwrap_or(cfg.steps);
    cfg.t_end = t_end.unwrap_or(cfg.t_end);
    cfg.n_candidates = candidates.unwrap_or(cfg.n_candidates);
    cfg.output_dir = out.unwrap_or(cfg.output_dir);
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => load_config(&config).and_then(|cfg| execute(&cfg)),
        Command::Preset {
            id,
            seed,
            h_seed,
            steps,
            t_end,
            candidates,
            out,
        } => preset_config(&id, seed, h_seed, steps, t_end, candidates, out).and_then(|cfg| execute(&cfg)),
        Command::Validate {
            strict,
            inject_sign_flip,
            seed,
        } => {
            let report = validate_suite(ValidateOptions {
                seed,
                inject_sign_flip,
                ..ValidateOptions::default()
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            let ok = report.passed && (!strict || report.empirical_passed);
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
        Command::ListPresets => {
            for id in PRESET_IDS {
                println!("{id:<12} {}", describe(id).unwrap_or(""));
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
