//! `steerbell`: analyze two-qubit states for Bell nonlocality via steering,
//! apply the map and its inverse criterion, print classical bounds, run the
//! Monte Carlo verification, scan the Werner family, and replay the
//! hidden-state construction.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use steerbell_core::criteria::{
    bell_via_steering, dodecahedron_settings, icosahedron_settings, inverse_map, map_to_steering,
    BellVerdict, MapSpec,
};
use steerbell_core::experiment::{
    sample_rng, sample_separable, scan_to_csv, unit_grid, verify_theorem, werner_scan, Generator,
    SampleSpec, SettingsChoice,
};
use steerbell_core::io;
use steerbell_core::model::{construct_lhs, lhv_from_separable, verify_lhs};
use steerbell_core::states::{bell_state, werner, TwoQubitState};
use steerbell_core::{Error, INV_SQRT_3};

#[derive(Parser)]
#[command(name = "steerbell", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SettingsArg {
    #[value(name = "6")]
    N6,
    #[value(name = "10")]
    N10,
    Both,
}

impl From<SettingsArg> for SettingsChoice {
    fn from(v: SettingsArg) -> Self {
        match v {
            SettingsArg::N6 => SettingsChoice::N6,
            SettingsArg::N10 => SettingsChoice::N10,
            SettingsArg::Both => SettingsChoice::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GeneratorArg {
    HaarPure,
    HsMixed,
    Separable,
}

#[derive(Args)]
struct StateInput {
    /// Path to a state JSON file (`{"dim": 4, "entries": [[re, im], ...]}`).
    #[arg(long = "in", value_name = "FILE", conflicts_with = "state")]
    input: Option<PathBuf>,
    /// Inline named state: `bell`, `mixed`, or `werner:<w>`.
    #[arg(long)]
    state: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Full nonlocality report: steering parameters of the mapped state for
    /// both settings families, classical bounds, CHSH maximum, verdict.
    Analyze {
        #[command(flatten)]
        state: StateInput,
        #[arg(long, default_value_t = INV_SQRT_3)]
        mu: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the map `rho = mu tau + (1 - mu) tau_A (x) I/2`.
    Map {
        #[command(flatten)]
        state: StateInput,
        #[arg(long, default_value_t = INV_SQRT_3)]
        mu: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invert the map and report whether the candidate is a density matrix.
    Invert {
        #[command(flatten)]
        state: StateInput,
        #[arg(long, default_value_t = INV_SQRT_3)]
        mu: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the classical bounds of the settings families.
    Bounds {
        #[arg(long, value_enum, default_value = "both")]
        settings: SettingsArg,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Monte Carlo check that steering violations of mapped states always
    /// come with CHSH violations of the source states. Exits 1 on any
    /// counterexample.
    VerifyTheorem {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "hs-mixed")]
        generator: GeneratorArg,
        /// Number of product components for the separable generator.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, value_enum, default_value = "both")]
        settings: SettingsArg,
        #[arg(long, default_value_t = INV_SQRT_3)]
        mu: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the Werner family, emitting one CSV row per visibility.
    ScanWerner {
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = INV_SQRT_3)]
        mu: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the hidden-state ensemble for a separable state and verify it
    /// reproduces the mapped state's conditional states. Exits 1 on failure.
    CheckProof {
        /// Separable decomposition file: JSON array of
        /// `{"weight": p, "alice": <2x2 state>, "bob": <2x2 state>}`.
        #[arg(long = "in", value_name = "FILE", conflicts_with = "random")]
        input: Option<PathBuf>,
        /// Draw a random separable state with this many components instead.
        #[arg(long, value_name = "K")]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = INV_SQRT_3)]
        mu: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        directions: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_COUNTEREXAMPLE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidDensityMatrix { .. } | Error::NotHermitian { .. } => EXIT_VALIDATION,
        _ => EXIT_INPUT,
    }
}

fn load_state(input: &StateInput) -> Result<TwoQubitState<f64>, Error> {
    match (&input.input, &input.state) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            io::two_qubit_state_from_json(&text)
        }
        (None, Some(spec)) => parse_named_state(spec),
        _ => Err(Error::Format(
            "provide exactly one of --in <file> or --state <name>".into(),
        )),
    }
}

fn parse_named_state(spec: &str) -> Result<TwoQubitState<f64>, Error> {
    match spec {
        "bell" => Ok(bell_state()),
        "mixed" => werner(0.0),
        other => {
            if let Some(w) = other.strip_prefix("werner:") {
                let w: f64 = w
                    .parse()
                    .map_err(|_| Error::Format(format!("invalid visibility `{w}`")))?;
                werner(w)
            } else {
                Err(Error::Format(format!(
                    "unknown state `{other}`; expected bell, mixed, or werner:<w>"
                )))
            }
        }
    }
}

/// Writes via a temp file in the same directory, then renames.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, content)?;
            std::fs::rename(&tmp, path)?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Analyze {
            state,
            mu,
            format,
            out,
        } => {
            let tau = load_state(&state)?;
            let spec = MapSpec::new(mu)?;
            let n6 = icosahedron_settings();
            let n10 = dodecahedron_settings();
            let report = bell_via_steering(&tau, &[&n6, &n10], &spec)?;
            let content = match format {
                FormatArg::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                ),
                FormatArg::Text => {
                    let mut s = String::new();
                    s.push_str(&format!("mu = {:.12}\n", report.mu));
                    for entry in &report.steering {
                        s.push_str(&format!(
                            "{}: S = {:.12}  C = {:.12}  violated = {}\n",
                            entry.label, entry.result.value, entry.result.bound,
                            entry.result.violated
                        ));
                    }
                    s.push_str(&format!(
                        "chsh_max = {:.12}  violated = {}\n",
                        report.chsh.max_value, report.chsh.violated
                    ));
                    s.push_str(&format!(
                        "verdict: {}\n",
                        match report.verdict {
                            BellVerdict::NonlocalViaSteering => "nonlocal via steering",
                            BellVerdict::Inconclusive => "inconclusive",
                        }
                    ));
                    s
                }
            };
            emit(&out, &content)?;
            Ok(0)
        }
        Command::Map { state, mu, out } => {
            let tau = load_state(&state)?;
            let spec = MapSpec::new(mu)?;
            let rho = map_to_steering(&tau, &spec);
            emit(&out, &io::matrix_to_json(rho.matrix()))?;
            Ok(0)
        }
        Command::Invert { state, mu, out } => {
            let rho = load_state(&state)?;
            let spec = MapSpec::new(mu)?;
            let verdict = inverse_map(&rho, &spec);
            let candidate_json = io::matrix_to_json(&verdict.candidate);
            let content = format!(
                "{{\n\"is_density_matrix\": {},\n\"min_eigenvalue\": {:.16e},\n\"candidate\": {}}}\n",
                verdict.is_density_matrix,
                verdict.min_eigenvalue,
                candidate_json
            );
            emit(&out, &content)?;
            Ok(0)
        }
        Command::Bounds { settings, format } => {
            let mut pairs = Vec::new();
            match settings {
                SettingsArg::N6 => pairs.push(icosahedron_settings::<f64>()),
                SettingsArg::N10 => pairs.push(dodecahedron_settings::<f64>()),
                SettingsArg::Both => {
                    pairs.push(icosahedron_settings::<f64>());
                    pairs.push(dodecahedron_settings::<f64>());
                }
            }
            let content = match format {
                FormatArg::Text => pairs
                    .iter()
                    .map(|s| format!("{}: C_{} = {:.12}\n", s.label, s.n(), s.classical_bound))
                    .collect::<String>(),
                FormatArg::Json => {
                    let entries: Vec<String> = pairs
                        .iter()
                        .map(|s| {
                            format!(
                                "{{\"label\": \"{}\", \"n\": {}, \"classical_bound\": {:.16e}}}",
                                s.label,
                                s.n(),
                                s.classical_bound
                            )
                        })
                        .collect();
                    format!("[{}]\n", entries.join(", "))
                }
            };
            emit(&None, &content)?;
            Ok(0)
        }
        Command::VerifyTheorem {
            samples,
            seed,
            generator,
            k,
            settings,
            mu,
            out,
        } => {
            let generator = match generator {
                GeneratorArg::HaarPure => Generator::HaarPure,
                GeneratorArg::HsMixed => Generator::HsMixed,
                GeneratorArg::Separable => Generator::Separable { k },
            };
            let spec = SampleSpec {
                n_samples: samples,
                generator,
                seed,
                settings: settings.into(),
                mu,
            };
            let stats = verify_theorem(&spec)?;
            let content = format!(
                "{}\n",
                serde_json::to_string_pretty(&stats).expect("stats serialize")
            );
            emit(&out, &content)?;
            Ok(if stats.n_counterexamples > 0 {
                EXIT_COUNTEREXAMPLE
            } else {
                0
            })
        }
        Command::ScanWerner { step, mu, out } => {
            if !(step > 0.0 && step <= 1.0) {
                return Err(Error::ParameterOutOfRange {
                    name: "step",
                    value: step,
                    range: "(0, 1]",
                });
            }
            let rows = werner_scan(&unit_grid(step), mu)?;
            emit(&out, &scan_to_csv(&rows))?;
            Ok(0)
        }
        Command::CheckProof {
            input,
            random,
            seed,
            mu,
            tol,
            directions,
            out,
        } => {
            let spec = MapSpec::new(mu)?;
            let components = match (input, random) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(&path)?;
                    io::components_from_json(&text)?
                }
                (None, Some(k)) => {
                    if k == 0 {
                        return Err(Error::ParameterOutOfRange {
                            name: "random",
                            value: 0.0,
                            range: ">= 1",
                        });
                    }
                    let mut rng = sample_rng(seed, 0);
                    sample_separable(&mut rng, k).1
                }
                _ => {
                    return Err(Error::Format(
                        "provide exactly one of --in <file> or --random <k>".into(),
                    ))
                }
            };
            let model = lhv_from_separable(components)?;
            let rho = map_to_steering(&model.induced_state(), &spec);
            let ensemble = construct_lhs(&model, &spec)?;
            let mut rng = sample_rng(seed, 1);
            let report = verify_lhs(&ensemble, &rho, directions, tol, &mut rng);
            let content = format!(
                "{}\n",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            emit(&out, &content)?;
            Ok(if report.passed { 0 } else { EXIT_COUNTEREXAMPLE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
