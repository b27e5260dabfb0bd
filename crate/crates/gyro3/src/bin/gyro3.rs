//! Command-line front door. All computation lives in the library; this
//! binary parses arguments, loads inputs, and prints tables, JSON or CSV.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gyro3::bodies::Catalog;
use gyro3::euler::{self, EulerConfig};
use gyro3::integrator::{self, Method};
use gyro3::model::ReducedState;
use gyro3::report::{self, Format, SweepAxis, SweepSpec, SweepTarget};
use gyro3::{lagrange, stability, SystemParams};

#[derive(Parser)]
#[command(name = "gyro3", version, about = "Relative equilibria of a gyrostat with two rigid bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Emit JSON instead of the human table.
    #[arg(long, global = true)]
    json: bool,
    /// Emit CSV instead of the human table.
    #[arg(long, global = true)]
    csv: bool,
}

impl OutputArgs {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Table
        }
    }
}

#[derive(Args, Clone)]
struct ParamsArgs {
    /// Masses m0,m1,m2.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.3,0.7")]
    masses: Vec<f64>,
    /// Principal moments A0,C0,A1,C1,A2,C2.
    #[arg(long, value_delimiter = ',', default_value = "1e-4,1e-4,1e-5,1e-5,1e-5,1e-5")]
    inertia: Vec<f64>,
    /// Gravitational constant.
    #[arg(long, default_value_t = 1.0)]
    g: f64,
    /// Gyrostatic momentum l.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    l: f64,
    /// Override beta1 = 3(C1-A1)/2 by shifting C1.
    #[arg(long, allow_negative_numbers = true)]
    beta1: Option<f64>,
    /// Override beta2 = 3(C2-A2)/2 by shifting C2.
    #[arg(long, allow_negative_numbers = true)]
    beta2: Option<f64>,
}

impl ParamsArgs {
    fn build(&self) -> gyro3::Result<SystemParams> {
        if self.masses.len() != 3 || self.inertia.len() != 6 {
            return Err(gyro3::Error::InvalidParams(
                "need --masses m0,m1,m2 and --inertia A0,C0,A1,C1,A2,C2".into(),
            ));
        }
        let mut p = SystemParams::new(
            self.masses[0],
            self.masses[1],
            self.masses[2],
            self.g,
            self.inertia[0],
            self.inertia[1],
            self.inertia[2],
            self.inertia[3],
            self.inertia[4],
            self.inertia[5],
            self.l,
        )?;
        if let Some(b1) = self.beta1 {
            p.c1 = p.a1 + b1 / 1.5;
        }
        if let Some(b2) = self.beta2 {
            p.c2 = p.a2 + b2 / 1.5;
        }
        Ok(p)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Collinear equilibria: roots, rotation rates, bifurcation regime.
    Euler {
        /// Configuration letter: a (S0S2S1), b (S2S0S1), c (S2S1S0).
        #[arg(long, default_value = "c")]
        config: char,
        /// Separation |lambda|.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Oblateness ratio k = beta1/beta2 for the regime map.
        #[arg(long, allow_negative_numbers = true)]
        k: Option<f64>,
        /// Classify in the restricted (m0 -> 0) regime.
        #[arg(long)]
        small_m0: bool,
        /// Sweep an axis (name=start:stop:count over m0, k, beta2 or a)
        /// instead of solving a single point; repeatable.
        #[arg(long = "sweep")]
        sweep: Vec<String>,
        #[command(flatten)]
        params: ParamsArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Triangular equilibria: branch table and bifurcation clause.
    Lagrange {
        #[arg(long, default_value_t = 1.0)]
        z: f64,
        /// Quintic oblateness parameters (per-unit-mass). With
        /// --physical they are derived from the inertia moments instead.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta2: f64,
        /// Use 3(C_i - A_i)/(2 m_i) from --inertia/--masses.
        #[arg(long)]
        physical: bool,
        /// Sweep an axis (name=start:stop:count over z, beta1 or beta2)
        /// instead of solving a single point; repeatable.
        #[arg(long = "sweep")]
        sweep: Vec<String>,
        #[command(flatten)]
        params: ParamsArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Stability verdict for an equilibrium JSON file
    /// ({"params": {...}, "state": [21 numbers]}).
    Stability {
        /// Input file; '-' reads stdin.
        #[arg(long)]
        input: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Integrate the reduced flow, emitting the trajectory as CSV.
    Integrate {
        /// Input file with params and initial state; '-' reads stdin.
        #[arg(long)]
        input: String,
        #[arg(long)]
        t_end: f64,
        #[arg(long)]
        dt: f64,
        /// rk4 (fixed step) or rkf78 (adaptive).
        #[arg(long, default_value = "rk4")]
        method: String,
        /// Local error tolerance for rkf78.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Reproduce the published collinear-point distance table.
    Appendixb {
        /// Catalog file (JSON or TOML); default: built-in constants or
        /// the GYRO3_CATALOG path.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Grid classification sweep over euler or lagrange parameters.
    Sweep {
        /// Target: euler or lagrange.
        target: String,
        /// Axis specs name=start:stop:count; repeatable. Euler axes:
        /// m0, k, beta2, a. Lagrange axes: z, beta1, beta2.
        #[arg(long = "axis")]
        axes: Vec<String>,
        /// Evaluate the i-th of n chunks: "i/n".
        #[arg(long)]
        chunk: Option<String>,
        #[arg(long, default_value = "c")]
        config: char,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        z: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta2: f64,
        #[arg(long)]
        small_m0: bool,
        #[command(flatten)]
        params: ParamsArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// On-disk scenario: parameters plus a flat 21-component state.
#[derive(serde::Serialize, serde::Deserialize)]
struct StateFile {
    params: SystemParams,
    state: ReducedState,
}

fn read_state_file(path: &str) -> gyro3::Result<StateFile> {
    let text = if path == "-" {
        use std::io::Read;
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| gyro3::Error::Catalog(e.to_string()))?;
        buf
    } else {
        std::fs::read_to_string(path).map_err(|e| gyro3::Error::Catalog(format!("{path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| gyro3::Error::Catalog(format!("{path}: {e}")))
}

fn emit_sweep(spec: &SweepSpec, format: Format) -> gyro3::Result<bool> {
    let result = report::sweep(spec);
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&result).unwrap()),
        Format::Csv => print!("{}", result.csv(&spec.axes)),
        Format::Table => print!("{}", result.table(&spec.axes)),
    }
    if !result.failures.is_empty() {
        eprintln!("failing grid points: {:?}", result.failures);
        return Ok(false);
    }
    Ok(true)
}

fn load_catalog(flag: Option<PathBuf>) -> gyro3::Result<Catalog> {
    if let Some(path) = flag {
        return Catalog::load(&path);
    }
    if let Ok(path) = std::env::var("GYRO3_CATALOG") {
        return Catalog::load(std::path::Path::new(&path));
    }
    Ok(Catalog::builtin())
}

fn run() -> gyro3::Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Euler {
            config,
            a,
            k,
            small_m0,
            sweep,
            params,
            out,
        } => {
            let cfg = EulerConfig::from_letter(config)
                .ok_or_else(|| gyro3::Error::InvalidParams(format!("config '{config}'")))?;
            let p = params.build()?;
            if !sweep.is_empty() {
                let axes = sweep
                    .iter()
                    .map(|s| SweepAxis::parse(s))
                    .collect::<gyro3::Result<Vec<_>>>()?;
                let spec = SweepSpec {
                    target: SweepTarget::Euler {
                        config,
                        base: p,
                        a,
                        small_m0,
                        k: k.unwrap_or(1.0),
                        beta2: 0.0,
                    },
                    axes,
                    chunk: None,
                };
                return emit_sweep(&spec, out.format());
            }
            let branch = euler::solve(&p, cfg, a)?;
            let regime = match k {
                Some(k) => Some(euler::classify_bifurcation(&p, cfg, k, p.beta2(), a, small_m0)?),
                None => None,
            };
            match out.format() {
                Format::Json => {
                    let doc = serde_json::json!({ "branch": branch, "regime": regime });
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
                Format::Csv => {
                    println!("config,rho,omega0_sq,clause");
                    let clause = regime.as_ref().map(|r| r.clause.clone()).unwrap_or_default();
                    for r in &branch.roots {
                        println!("{},{:.17e},{:.17e},{}", cfg, r.rho, r.omega0_sq, clause);
                    }
                }
                Format::Table => {
                    println!("configuration {} ({}), |lambda| = {}", cfg, config, a);
                    for r in &branch.roots {
                        println!("  rho = {:>14.10}   omega0^2 = {:>14.10}", r.rho, r.omega0_sq);
                    }
                    for r in &branch.rejected {
                        println!("  rejected rho = {:.10} (omega0^2 = {:.3e})", r.rho, r.omega0_sq);
                    }
                    if let Some(reg) = &regime {
                        println!(
                            "  regime: clause {} count {} (xi1 {:?}, xi2 {:?}, k0 {:?})",
                            reg.clause, reg.count, reg.xi1, reg.xi2, reg.k0
                        );
                    }
                }
            }
            Ok(true)
        }
        Command::Lagrange {
            z,
            beta1,
            beta2,
            physical,
            sweep,
            params,
            out,
        } => {
            let (b1, b2) = if physical {
                let p = params.build()?;
                lagrange::effective_quintic_betas(&p)
            } else {
                (beta1, beta2)
            };
            if !sweep.is_empty() {
                let axes = sweep
                    .iter()
                    .map(|s| SweepAxis::parse(s))
                    .collect::<gyro3::Result<Vec<_>>>()?;
                let spec = SweepSpec {
                    target: SweepTarget::Lagrange {
                        z,
                        beta1: b1,
                        beta2: b2,
                    },
                    axes,
                    chunk: None,
                };
                return emit_sweep(&spec, out.format());
            }
            let regime = lagrange::classify_lagrange(z, b1, b2)?;
            let sols = lagrange::lagrange_system_solve(z, b1, b2)?;
            match out.format() {
                Format::Json => {
                    let doc = serde_json::json!({ "regime": regime, "solutions": sols });
                    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                }
                Format::Csv => {
                    println!("z,beta1,beta2,x,y,shape,count,clause");
                    for t in &sols {
                        println!(
                            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:?},{},{}",
                            z, b1, b2, t.x, t.y, t.shape, regime.families,
                            regime.clause.replace(',', ";")
                        );
                    }
                }
                Format::Table => {
                    println!(
                        "Z = {}, beta1 = {:.6e}, beta2 = {:.6e}  (thresholds: -7Z^2/32 = {:.6e}, beta* = {:.6e})",
                        z, b1, b2, regime.beta_degenerate, regime.beta_star
                    );
                    println!(
                        "clause {}: {} branch pairs ({} equilateral, {} isosceles, {} scalene, {} degenerate), {} mirror states",
                        regime.clause,
                        regime.families,
                        regime.equilateral,
                        regime.isosceles,
                        regime.scalene,
                        regime.degenerate,
                        regime.mirror_states
                    );
                    for t in &sols {
                        println!(
                            "  branch {:?}: X = {:>13.10}  Y = {:>13.10}  {:?}",
                            t.branch, t.x, t.y, t.shape
                        );
                    }
                }
            }
            Ok(true)
        }
        Command::Stability { input, out } => {
            let file = read_state_file(&input)?;
            let verdict = stability::stability_report(&file.params, &file.state)?;
            match out.format() {
                Format::Table => {
                    println!(
                        "classification: {:?}{}",
                        verdict.classification,
                        if verdict.marginal { " (marginal)" } else { "" }
                    );
                    println!(
                        "max Re(lambda) = {:.3e}; zero eigenvalue: algebraic {}, geometric {}, rank defect {}",
                        verdict.max_real_part,
                        verdict.zero_algebraic,
                        verdict.zero_geometric,
                        verdict.zero_rank_defect
                    );
                    for c in &verdict.conditions {
                        println!(
                            "  [{}] {} = {:.6e}",
                            if c.satisfied { "pass" } else { "fail" },
                            c.name,
                            c.value
                        );
                    }
                }
                _ => {
                    println!("{}", serde_json::to_string_pretty(&verdict).unwrap());
                }
            }
            Ok(true)
        }
        Command::Integrate {
            input,
            t_end,
            dt,
            method,
            tol,
        } => {
            let file = read_state_file(&input)?;
            let m = match method.as_str() {
                "rk4" => Method::Rk4,
                "rkf78" => Method::Rkf78 { tol },
                other => {
                    return Err(gyro3::Error::InvalidParams(format!(
                        "unknown method '{other}' (rk4|rkf78)"
                    )))
                }
            };
            let report = integrator::integrate(&file.params, &file.state, t_end, dt, m)?;
            print!("{}", integrator::report_to_csv(&report));
            if let Some(abort) = &report.aborted {
                eprintln!("aborted: {:?}", abort);
                return Ok(false);
            }
            Ok(true)
        }
        Command::Appendixb { catalog, out } => {
            let cat = load_catalog(catalog)?;
            let rep = report::appendixb_report(&cat)?;
            match out.format() {
                Format::Json => println!("{}", serde_json::to_string_pretty(&rep).unwrap()),
                Format::Csv => print!("{}", rep.csv()),
                Format::Table => print!("{}", rep.table()),
            }
            Ok(true)
        }
        Command::Sweep {
            target,
            axes,
            chunk,
            config,
            a,
            z,
            k,
            beta1,
            beta2,
            small_m0,
            params,
            out,
        } => {
            let axes = axes
                .iter()
                .map(|s| SweepAxis::parse(s))
                .collect::<gyro3::Result<Vec<_>>>()?;
            if axes.is_empty() {
                return Err(gyro3::Error::InvalidParams("need at least one --axis".into()));
            }
            let chunk = match chunk {
                Some(c) => {
                    let (i, n) = c.split_once('/').ok_or_else(|| {
                        gyro3::Error::InvalidParams(format!("chunk '{c}': want i/n"))
                    })?;
                    Some((
                        i.parse::<usize>()
                            .map_err(|_| gyro3::Error::InvalidParams("bad chunk index".into()))?,
                        n.parse::<usize>()
                            .map_err(|_| gyro3::Error::InvalidParams("bad chunk count".into()))?,
                    ))
                }
                None => None,
            };
            let target = match target.as_str() {
                "euler" => SweepTarget::Euler {
                    config,
                    base: params.build()?,
                    a,
                    small_m0,
                    k,
                    beta2,
                },
                "lagrange" => SweepTarget::Lagrange { z, beta1, beta2 },
                other => {
                    return Err(gyro3::Error::InvalidParams(format!(
                        "unknown sweep target '{other}'"
                    )))
                }
            };
            let spec = SweepSpec {
                target,
                axes,
                chunk,
            };
            emit_sweep(&spec, out.format())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
