//! Batch front end for classification, order comparison and dominance
//! checks. Every verdict comes straight from the library; the CLI only
//! parses flags, forwards them, and serializes the reports.
//!
//! Exit codes: 0 supported / consistent, 1 usage or input error,
//! 2 classification with implication violations, 3 order or dominance
//! violated.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heavytail::classifiers::{classify_all, ClassificationReport, CLASS_NAMES};
use heavytail::defaults;
use heavytail::dist::catalog::{catalog_entries, default_catalog};
use heavytail::dominance::{check_dominance_exact2, check_dominance_mc, WeightVector};
use heavytail::orders::{check_order, OrderKind};
use heavytail::{parse_dist_spec, GridSpec, Spacing, Status, Witness};

#[derive(Parser)]
#[command(
    name = "heavytail",
    version,
    about = "Classify heavy-tailed distributions, compare stochastic orders, and verify dominance by convex combinations of i.i.d. copies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct GridArgs {
    /// Evaluation lattice as x_lo,x_hi,n,log|lin
    #[arg(long)]
    grid: Option<String>,
    /// Size of the theta lattice on (0, 1)
    #[arg(long)]
    theta_points: Option<usize>,
    /// Violation tolerance for grid verdicts
    #[arg(long)]
    tol: Option<f64>,
}

impl GridArgs {
    fn build(&self, base: GridSpec) -> Result<GridSpec, String> {
        let mut g = base;
        if let Some(spec) = &self.grid {
            let parts: Vec<&str> = spec.split(',').collect();
            if parts.len() != 4 {
                return Err(format!("--grid expects x_lo,x_hi,n,log|lin, got `{spec}`"));
            }
            g.x_lo = parts[0].parse().map_err(|_| format!("bad x_lo `{}`", parts[0]))?;
            g.x_hi = parts[1].parse().map_err(|_| format!("bad x_hi `{}`", parts[1]))?;
            g.n_x = parts[2].parse().map_err(|_| format!("bad n `{}`", parts[2]))?;
            g.spacing = match parts[3] {
                "log" => Spacing::Log,
                "lin" => Spacing::Linear,
                other => return Err(format!("bad spacing `{other}` (log or lin)")),
            };
        }
        if let Some(tp) = self.theta_points {
            g.theta_points = tp;
        }
        if let Some(tol) = self.tol {
            g.tol = tol;
        }
        g.validate().map_err(|e| e.to_string())?;
        Ok(g)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify a distribution into the heavy-tail families
    Classify {
        /// Distribution spec (see `heavytail catalog`)
        #[arg(long)]
        dist: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare two distributions under a stochastic order
    Order {
        /// Left-hand distribution spec
        #[arg(long)]
        left: String,
        /// Right-hand distribution spec
        #[arg(long)]
        right: String,
        /// Order to check: st, c, or i-sb
        #[arg(long)]
        order: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Verify X <=_st sum of weighted i.i.d. copies
    Dominate {
        /// Distribution spec
        #[arg(long)]
        dist: String,
        /// Comma-separated positive weights summing to 1
        #[arg(long)]
        weights: String,
        /// Use exact convolution (n = 2 only) instead of Monte Carlo
        #[arg(long)]
        exact: bool,
        /// Monte Carlo sample count
        #[arg(long, default_value_t = defaults::MC_SAMPLES)]
        samples: usize,
        /// DKW band level
        #[arg(long, default_value_t = defaults::MC_ALPHA)]
        alpha: f64,
        /// RNG seed
        #[arg(long, default_value_t = defaults::SEED)]
        seed: u64,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List the distribution catalog and spec mini-language
    Catalog {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Classify every default catalog entry and summarize
    Report {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn write_output(output: &OutputArgs, content: &str) -> Result<(), String> {
    match &output.out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| e.to_string())
        }
    }
}

fn witness_fields(w: &Option<Witness>) -> (String, String) {
    match w {
        Some(Witness::X { x }) => (x.to_string(), String::new()),
        Some(Witness::XTheta { x, theta }) => (x.to_string(), theta.to_string()),
        Some(Witness::Pair { x, y }) => (x.to_string(), y.to_string()),
        None => (String::new(), String::new()),
    }
}

fn classification_csv(report: &ClassificationReport) -> String {
    let mut out = String::from("class,status,worst_residual,witness_a,witness_b\n");
    for class in CLASS_NAMES {
        let v = report.verdicts.get(class).expect("known class");
        let status = match v.status {
            Status::Supported => "supported",
            Status::Violated => "violated",
            Status::NotApplicable => "not_applicable",
        };
        let (a, b) = witness_fields(&v.witness);
        out.push_str(&format!(
            "{class},{status},{},{a},{b}\n",
            v.worst_residual
        ));
    }
    out
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    s.push('\n');
    Ok(s)
}

fn run() -> Result<u8, String> {
    // clap exits with status 2 on usage errors by default; route them
    // through the error path so usage problems are always exit 1 and
    // status 2 stays reserved for implication violations
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => return Err(e.to_string()),
        Err(e) => {
            print!("{e}");
            return Ok(0);
        }
    };
    match cli.command {
        Command::Classify { dist, grid, output } => {
            let d = parse_dist_spec(&dist).map_err(|e| e.to_string())?;
            let g = grid.build(defaults::classify_grid())?;
            let report = classify_all(d.as_ref(), &g).map_err(|e| e.to_string())?;
            let content = match output.format {
                Format::Json => to_json(&report)?,
                Format::Csv => classification_csv(&report),
            };
            write_output(&output, &content)?;
            if report.implication_violations.is_empty() {
                Ok(0)
            } else {
                eprintln!(
                    "{} implication violation(s) for {}",
                    report.implication_violations.len(),
                    dist
                );
                Ok(2)
            }
        }
        Command::Order {
            left,
            right,
            order,
            grid,
            output,
        } => {
            let l = parse_dist_spec(&left).map_err(|e| e.to_string())?;
            let r = parse_dist_spec(&right).map_err(|e| e.to_string())?;
            let kind = OrderKind::from_str(&order).map_err(|e| e.to_string())?;
            let g = grid.build(defaults::classify_grid())?;
            let check = check_order(kind, l.as_ref(), r.as_ref(), &g).map_err(|e| e.to_string())?;
            let content = match output.format {
                Format::Json => to_json(&check)?,
                Format::Csv => {
                    let mut s = String::from("x,value\n");
                    for p in &check.composition {
                        s.push_str(&format!("{},{}\n", p.x, p.value));
                    }
                    s
                }
            };
            write_output(&output, &content)?;
            Ok(if check.verdict.is_violated() { 3 } else { 0 })
        }
        Command::Dominate {
            dist,
            weights,
            exact,
            samples,
            alpha,
            seed,
            grid,
            output,
        } => {
            let d = parse_dist_spec(&dist).map_err(|e| e.to_string())?;
            let ws: Vec<f64> = weights
                .split(',')
                .map(|w| w.trim().parse::<f64>().map_err(|_| format!("bad weight `{w}`")))
                .collect::<Result<_, _>>()?;
            let w = WeightVector::new(ws).map_err(|e| e.to_string())?;
            let g = grid.build(defaults::dominance_grid())?;
            let report = if exact {
                if w.len() != 2 {
                    return Err("--exact requires exactly two weights".into());
                }
                check_dominance_exact2(d.as_ref(), w.as_slice()[0], &g).map_err(|e| e.to_string())?
            } else {
                check_dominance_mc(d.as_ref(), &w, samples, seed, alpha, &g)
                    .map_err(|e| e.to_string())?
            };
            let content = match output.format {
                Format::Json => to_json(&report)?,
                Format::Csv => report.gap_curve_csv(),
            };
            write_output(&output, &content)?;
            Ok(if report.verdict.is_violated() { 3 } else { 0 })
        }
        Command::Catalog { output } => {
            let entries = catalog_entries();
            let content = match output.format {
                Format::Json => {
                    let rows: Vec<serde_json::Value> = entries
                        .iter()
                        .map(|e| {
                            serde_json::json!({
                                "name": e.name,
                                "params": e.params_doc,
                                "description": e.description,
                            })
                        })
                        .collect();
                    to_json(&rows)?
                }
                Format::Csv => {
                    let mut s = String::from("name,params,description\n");
                    for e in entries {
                        s.push_str(&format!(
                            "{},\"{}\",\"{}\"\n",
                            e.name, e.params_doc, e.description
                        ));
                    }
                    s
                }
            };
            write_output(&output, &content)?;
            Ok(0)
        }
        Command::Report { grid, output } => {
            let g = grid.build(defaults::classify_grid())?;
            let mut reports = Vec::new();
            let mut violations = 0usize;
            for d in default_catalog() {
                let r = classify_all(d.as_ref(), &g).map_err(|e| e.to_string())?;
                violations += r.implication_violations.len();
                eprintln!(
                    "{:<16} invsub={:?} super_heavy={:?} dor={:?} violations={}",
                    d.name(),
                    r.verdicts.invsub.status,
                    r.verdicts.super_heavy_tailed.status,
                    r.verdicts.dor_super_pareto.status,
                    r.implication_violations.len()
                );
                reports.push(r);
            }
            let content = match output.format {
                Format::Json => to_json(&reports)?,
                Format::Csv => {
                    let mut s = String::new();
                    for r in &reports {
                        s.push_str(&format!("# {}\n", r.distribution.name));
                        s.push_str(&classification_csv(r));
                    }
                    s
                }
            };
            write_output(&output, &content)?;
            Ok(if violations == 0 { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
