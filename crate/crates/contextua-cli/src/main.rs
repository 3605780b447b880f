//! Batch front-end for the joint-measurability and LSW-inequality toolkit.
//!
//! Every command is deterministic given its flags (and seed), writes one
//! artifact to `--out` or stdout, and uses the exit code to separate the
//! scientific verdict from operational failures: 0 means the computed
//! criterion holds, 2 means it was computed and does not hold, 1 means the
//! job itself failed (bad flags, bad input, I/O).

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use contextua::bloch::{coplanar_from_angles, trine_vectors};
use contextua::classical::mc_verify_lsw_bound;
use contextua::lsw::{counterexample_check, violation_scan};
use contextua::pairwise::{pairwise_compat, PairwiseJoint};
use contextua::triplewise::{fermat_torricelli, triplewise_compat, LambdaSystem, TriplewiseJoint};
use contextua::{JmError, Vec3, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

fn parse_triple(raw: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected \"x,y,z\", got \"{raw}\""));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad component \"{part}\": {e}"))?;
    }
    Ok(out)
}

/// Observable inputs: Cartesian triples, or (sharpness, angles) in the
/// xy-plane.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
struct InputArgs {
    /// First observable as "x,y,z"
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    #[serde(default)]
    lambda1: Option<[f64; 3]>,
    /// Second observable as "x,y,z"
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    #[serde(default)]
    lambda2: Option<[f64; 3]>,
    /// Third observable as "x,y,z"
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    #[serde(default)]
    lambda3: Option<[f64; 3]>,
    /// Equal-length coplanar observables at mutual 120 degrees (needs --eta)
    #[arg(long)]
    #[serde(default)]
    trine: bool,
    /// Common sharpness for --trine or --phi1/--phi2
    #[arg(long)]
    #[serde(default)]
    eta: Option<f64>,
    /// Angle (radians) from the third observable to the first (needs --eta)
    #[arg(long)]
    #[serde(default)]
    phi1: Option<f64>,
    /// Angle (radians) from the third observable to the second
    #[arg(long)]
    #[serde(default)]
    phi2: Option<f64>,
}

impl InputArgs {
    fn resolve(&self) -> Result<Vec<Vec3>> {
        if self.trine {
            let eta = self.eta.context("--trine requires --eta")?;
            return Ok(trine_vectors(eta).to_vec());
        }
        if self.phi1.is_some() || self.phi2.is_some() {
            let eta = self.eta.context("--phi1/--phi2 require --eta")?;
            let phi1 = self.phi1.context("--phi2 requires --phi1")?;
            let phi2 = self.phi2.context("--phi1 requires --phi2")?;
            return Ok(coplanar_from_angles(eta, phi1, phi2).to_vec());
        }
        let vectors: Vec<Vec3> = [self.lambda1, self.lambda2, self.lambda3]
            .iter()
            .flatten()
            .map(|&v| Vec3::from(v))
            .collect();
        if vectors.is_empty() {
            bail!("no observables given: use --lambda1/2/3, --trine or --phi1/--phi2");
        }
        Ok(vectors)
    }

    fn pair(&self) -> Result<(Vec3, Vec3)> {
        let v = self.resolve()?;
        if v.len() < 2 {
            bail!("this command needs two observables");
        }
        Ok((v[0], v[1]))
    }

    fn triple(&self) -> Result<(Vec3, Vec3, Vec3)> {
        let v = self.resolve()?;
        if v.len() != 3 {
            bail!("this command needs three observables, got {}", v.len());
        }
        Ok((v[0], v[1], v[2]))
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
struct OutputArgs {
    /// Write the artifact here instead of stdout
    #[arg(long)]
    #[serde(default)]
    out: Option<PathBuf>,
    /// Output format (json, or csv for lsw-scan)
    #[arg(long, value_enum)]
    #[serde(default)]
    format: Option<Format>,
}

#[derive(Parser)]
#[command(name = "contextua")]
#[command(about = "Joint measurability of unsharp qubit observables and the LSW inequality")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Busch criterion for two unbiased observables
    CheckPairwise {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fermat-Torricelli criterion for three unbiased observables
    CheckTriplewise {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Explicit joint POVM: optimal pairwise for two observables (or the
    /// general family via --corr/--z), eight-effect joint for three
    BuildJoint {
        #[command(flatten)]
        input: InputArgs,
        /// Correlation parameter of the general pairwise family
        #[arg(long)]
        corr: Option<f64>,
        /// Vector parameter "x,y,z" of the general pairwise family
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        z: Option<[f64; 3]>,
        /// State direction "x,y,z" for the optimal pairwise joint
        /// (default: a direction orthogonal to both observables)
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        state: Option<[f64; 3]>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo verification of the LSW bound over random hidden models
    ClassicalSim {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// RNG seed (required for reproducibility)
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tabulate the classical line and the quantum maximum over sharpness
    LswScan {
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 0.0)]
        eta_min: f64,
        #[arg(long, default_value_t = 1.0)]
        eta_max: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The pairwise-but-not-triplewise configuration that cannot violate
    /// the LSW inequality
    Counterexample {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fermat-Torricelli vector of the sign system of three observables
    FtPoint {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a job described by a JSON config file
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

/// A complete job description; the flag surface and the config-file surface
/// accept the same fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct JobConfig {
    command: CommandKind,
    #[serde(flatten)]
    input: InputArgs,
    #[serde(default)]
    corr: Option<f64>,
    #[serde(default)]
    z: Option<[f64; 3]>,
    #[serde(default)]
    state: Option<[f64; 3]>,
    #[serde(default)]
    trials: Option<u64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    steps: Option<usize>,
    #[serde(default)]
    eta_min: Option<f64>,
    #[serde(default)]
    eta_max: Option<f64>,
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum CommandKind {
    CheckPairwise,
    CheckTriplewise,
    BuildJoint,
    ClassicalSim,
    LswScan,
    Counterexample,
    FtPoint,
}

impl Command {
    fn into_job(self) -> Result<JobConfig> {
        let job = |command, input, output| JobConfig {
            command,
            input,
            corr: None,
            z: None,
            state: None,
            trials: None,
            seed: None,
            steps: None,
            eta_min: None,
            eta_max: None,
            output,
        };
        Ok(match self {
            Command::CheckPairwise { input, output } => {
                job(CommandKind::CheckPairwise, input, output)
            }
            Command::CheckTriplewise { input, output } => {
                job(CommandKind::CheckTriplewise, input, output)
            }
            Command::BuildJoint {
                input,
                corr,
                z,
                state,
                output,
            } => JobConfig {
                corr,
                z,
                state,
                ..job(CommandKind::BuildJoint, input, output)
            },
            Command::ClassicalSim {
                trials,
                seed,
                output,
            } => JobConfig {
                trials: Some(trials),
                seed: Some(seed),
                ..job(CommandKind::ClassicalSim, InputArgs::default(), output)
            },
            Command::LswScan {
                steps,
                eta_min,
                eta_max,
                output,
            } => JobConfig {
                steps: Some(steps),
                eta_min: Some(eta_min),
                eta_max: Some(eta_max),
                ..job(CommandKind::LswScan, InputArgs::default(), output)
            },
            Command::Counterexample { output } => {
                job(CommandKind::Counterexample, InputArgs::default(), output)
            }
            Command::FtPoint { input, output } => job(CommandKind::FtPoint, input, output),
            Command::Run { config } => {
                let text = std::fs::read_to_string(&config)
                    .with_context(|| format!("reading {}", config.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", config.display()))?
            }
        })
    }
}

/// The artifact text plus the scientific verdict that drives the exit code.
struct Outcome {
    text: String,
    criterion_holds: bool,
}

fn json_artifact<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Maps a "computed: no" construction failure to exit code 2; everything
/// else stays an operational error.
fn criterion_failure(err: &JmError) -> bool {
    matches!(
        err,
        JmError::NotJointlyMeasurable { .. }
            | JmError::NotTriplewiseMeasurable { .. }
            | JmError::NotPositive { .. }
    )
}

#[derive(Serialize)]
struct TriplewiseReport {
    margin: f64,
    ft_point: Vec3,
    lambdas: [Vec3; 3],
    measurable: bool,
}

fn execute(job: &JobConfig, tol: f64) -> Result<Outcome> {
    match job.command {
        CommandKind::CheckPairwise => {
            let (l_i, l_j) = job.input.pair()?;
            let compat = pairwise_compat(l_i, l_j, tol)?;
            Ok(Outcome {
                text: json_artifact(&compat)?,
                criterion_holds: compat.measurable,
            })
        }
        CommandKind::CheckTriplewise => {
            let (l1, l2, l3) = job.input.triple()?;
            let compat = triplewise_compat(l1, l2, l3, tol)?;
            let report = TriplewiseReport {
                margin: compat.margin,
                ft_point: compat.ft.point,
                lambdas: [l1, l2, l3],
                measurable: compat.measurable,
            };
            Ok(Outcome {
                text: json_artifact(&report)?,
                criterion_holds: compat.measurable,
            })
        }
        CommandKind::BuildJoint => {
            let vectors = job.input.resolve()?;
            match vectors.len() {
                3 => match TriplewiseJoint::build(vectors[0], vectors[1], vectors[2], tol) {
                    Ok(joint) => Ok(Outcome {
                        text: json_artifact(&joint)?,
                        criterion_holds: true,
                    }),
                    Err(ref err) if criterion_failure(err) => Ok(Outcome {
                        text: format!("{err}\n"),
                        criterion_holds: false,
                    }),
                    Err(err) => Err(err.into()),
                },
                2 => {
                    let (l_i, l_j) = (vectors[0], vectors[1]);
                    let built = if job.corr.is_some() || job.z.is_some() {
                        let corr = job.corr.context("--z requires --corr")?;
                        let z = Vec3::from(job.z.context("--corr requires --z")?);
                        PairwiseJoint::build(l_i, l_j, corr, z, tol)
                    } else {
                        let state = match job.state {
                            Some(raw) => Vec3::from(raw),
                            None => default_orthogonal(l_i, l_j),
                        };
                        PairwiseJoint::optimal(l_i, l_j, state, tol)
                    };
                    match built {
                        Ok(joint) => Ok(Outcome {
                            text: json_artifact(&joint)?,
                            criterion_holds: true,
                        }),
                        Err(ref err) if criterion_failure(err) => Ok(Outcome {
                            text: format!("{err}\n"),
                            criterion_holds: false,
                        }),
                        Err(err) => Err(err.into()),
                    }
                }
                n => bail!("build-joint needs two or three observables, got {n}"),
            }
        }
        CommandKind::ClassicalSim => {
            let trials = job.trials.unwrap_or(10_000);
            if trials == 0 {
                bail!("classical-sim requires at least one trial");
            }
            let seed = job.seed.context("classical-sim requires a seed")?;
            let report = mc_verify_lsw_bound(trials, seed);
            let holds = report.violations == 0;
            Ok(Outcome {
                text: json_artifact(&report)?,
                criterion_holds: holds,
            })
        }
        CommandKind::LswScan => {
            let steps = job.steps.unwrap_or(200);
            let eta_min = job.eta_min.unwrap_or(0.0);
            let eta_max = job.eta_max.unwrap_or(1.0);
            if !(0.0..1.0).contains(&eta_min) || eta_max > 1.0 || eta_min >= eta_max || steps < 2 {
                bail!("invalid scan range: need 0 <= eta-min < eta-max <= 1 and steps >= 2");
            }
            let scan = violation_scan(eta_min, eta_max, steps);
            let text = match job.output.format.unwrap_or(Format::Csv) {
                Format::Csv => scan.to_csv(),
                Format::Json => json_artifact(&scan)?,
            };
            Ok(Outcome {
                text,
                criterion_holds: true,
            })
        }
        CommandKind::Counterexample => {
            let report = counterexample_check();
            let holds = report.ok;
            Ok(Outcome {
                text: json_artifact(&report)?,
                criterion_holds: holds,
            })
        }
        CommandKind::FtPoint => {
            let (l1, l2, l3) = job.input.triple()?;
            let system = LambdaSystem::new(l1, l2, l3);
            let ft = fermat_torricelli(&system.points())?;
            Ok(Outcome {
                text: json_artifact(&ft)?,
                criterion_holds: true,
            })
        }
    }
}

fn default_orthogonal(l_i: Vec3, l_j: Vec3) -> Vec3 {
    if let Some(n) = l_i.cross(l_j).normalized() {
        return n;
    }
    let axis = if l_i.norm() > l_j.norm() { l_i } else { l_j };
    let helper = if axis.x.abs() < 0.9 * axis.norm() || axis.norm() < 1e-12 {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        Vec3::new(0.0, 1.0, 0.0)
    };
    match axis.normalized() {
        Some(u) => (helper - u * helper.dot(u))
            .normalized()
            .unwrap_or(Vec3::new(0.0, 0.0, 1.0)),
        None => Vec3::new(0.0, 0.0, 1.0),
    }
}

fn tolerance_from_env() -> Result<f64> {
    match std::env::var("CONTEXTUA_TOL") {
        Ok(raw) => {
            let tol: f64 = raw
                .parse()
                .with_context(|| format!("CONTEXTUA_TOL is not a number: \"{raw}\""))?;
            if !tol.is_finite() || tol < 0.0 {
                bail!("CONTEXTUA_TOL must be a nonnegative finite number, got {tol}");
            }
            Ok(tol)
        }
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_TOL),
        Err(e) => Err(e.into()),
    }
}

fn deliver(outcome: &Outcome, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, &outcome.text)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{}", outcome.text);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let run = || -> Result<Outcome> {
        let tol = tolerance_from_env()?;
        let job = cli.command.into_job()?;
        let outcome = execute(&job, tol)?;
        deliver(&outcome, job.output.out.as_ref())?;
        Ok(outcome)
    };
    match run() {
        Ok(outcome) if outcome.criterion_holds => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
