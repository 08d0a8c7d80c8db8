use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sim2real::agents::AgentId;
use sim2real::backend::{BackendId, SimParams};
use sim2real::io::{
    emit_scatter, pair_results, read_paired, read_results, write_paired, write_results, ScenarioFile, SHIPPED,
};
use sim2real::metrics::{srcc_report, Metric, SRCCReport, TableOneDataset, TABLE_ONE_SHA256};
use sim2real::optimizer::{optimize, ParamGrid};
use sim2real::task::{run_suite, BackendConfig, ScenarioSuite};

#[derive(Parser)]
#[command(
    name = "sim2real",
    version,
    about = "Point-goal navigation simulator and sim-vs-real predictivity tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file (or shipped scenario name) and print its legs.
    Validate { scenario: String },
    /// Run a roster on a suite and write the per-episode results CSV.
    Run {
        #[arg(long, value_parser = parse_backend)]
        backend: BackendId,
        /// JSON simulator parameters; defaults to sliding on, no noise.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Comma-separated agent ids, or `all`.
        #[arg(long, default_value = "all")]
        roster: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scenario files or shipped names; defaults to the CODA suite.
        #[arg(long = "scenario")]
        scenarios: Vec<String>,
        /// Label written to the `cell` column.
        #[arg(long)]
        cell: Option<String>,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Correlate two results files by agent id.
    Srcc {
        sim: PathBuf,
        real: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Spl)]
        metric: MetricArg,
        /// Also write the per-method paired CSV.
        #[arg(long)]
        paired_out: Option<PathBuf>,
    },
    /// Grid-search simulator parameters against reference results.
    Optimize {
        #[arg(long, value_enum, default_value_t = GridArg::Default)]
        grid: GridArg,
        #[arg(long, default_value = "all")]
        roster: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "scenario")]
        scenarios: Vec<String>,
        /// Write the cell table as CSV.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Render a paired CSV as an SVG scatter plot.
    Plot {
        paired: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Analyze the embedded nine-model SPL table.
    Table1 {
        /// Write the reality vs chall-sim scatter here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Spl,
    Success,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Spl => Metric::Spl,
            MetricArg::Success => Metric::Success,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    Default,
}

fn parse_backend(s: &str) -> Result<BackendId, String> {
    s.parse()
}

/// Marks an error as bad input (exit 2) rather than a runtime failure (exit 3).
#[derive(Debug)]
struct Invalid(anyhow::Error);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Invalid {}

fn invalid<E: Into<anyhow::Error>>(e: E) -> anyhow::Error {
    Invalid(e.into()).into()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(invalid)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_scenario(spec: &str) -> Result<ScenarioFile> {
    let path = Path::new(spec);
    if !path.exists() && SHIPPED.iter().any(|(n, _)| *n == spec) {
        return ScenarioFile::shipped(spec).map_err(invalid);
    }
    ScenarioFile::load(path)
        .with_context(|| format!("scenario {spec}"))
        .map_err(invalid)
}

fn load_suite(specs: &[String]) -> Result<ScenarioSuite> {
    if specs.is_empty() {
        return ScenarioFile::default_suite().map_err(invalid);
    }
    let files = specs.iter().map(|s| load_scenario(s)).collect::<Result<Vec<_>>>()?;
    ScenarioFile::suite_of(&files).map_err(invalid)
}

fn load_params(path: Option<&Path>) -> Result<SimParams> {
    let Some(path) = path else {
        return Ok(SimParams::default());
    };
    let params: SimParams = serde_json::from_str(&read(path)?)
        .with_context(|| format!("parameters {}", path.display()))
        .map_err(invalid)?;
    params.validate().map_err(invalid)?;
    Ok(params)
}

fn print_report(label: &str, r: &SRCCReport) {
    println!(
        "{label}: SRCC={:.3}  reversals {}/{} ({:.1}%)",
        r.srcc,
        r.discordant_pairs,
        r.total_pairs,
        100.0 * r.reversal_fraction
    );
}

fn validate(spec: &str) -> Result<()> {
    let file = load_scenario(spec)?;
    let config = file.configuration().map_err(invalid)?;
    println!(
        "{}: {} obstacles, radius {}, {} trials, limits {:?}",
        file.name,
        file.obstacles.len(),
        file.agent_radius,
        file.trials,
        file.limits
    );
    for (k, leg) in config.legs().iter().enumerate() {
        println!(
            "  leg {k}: ({:.2}, {:.2}) -> ({:.2}, {:.2})  geodesic {:.3} m",
            leg.start.position.x, leg.start.position.y, leg.goal.x, leg.goal.y, leg.geodesic_l
        );
    }
    Ok(())
}

fn cell_label(backend: BackendId, params: &SimParams) -> String {
    match backend {
        BackendId::ReferenceReal => "reference".into(),
        BackendId::TestSim => format!(
            "sliding={},noise={:.1}",
            if params.sliding { "on" } else { "off" },
            params.noise_multiplier
        ),
    }
}

fn table1(plot: Option<&Path>) -> Result<()> {
    let start = Instant::now();
    let data = TableOneDataset::load()?;
    let a = data.analyze()?;
    println!("Embedded table: {} models, sha256 {TABLE_ONE_SHA256}", data.rows.len());
    println!("{:<38} {:>7} {:>10} {:>9}", "model", "reality", "chall-sim", "test-sim");
    for r in &data.rows {
        println!(
            "{:<38} {:>7.2} {:>10.2} {:>9.2}",
            r.label(),
            r.reality_spl,
            r.coda_chall_sim_spl,
            r.coda_test_sim_spl
        );
    }
    println!(
        "reality vs CODA chall-sim: SRCC={:.3} (published 0.60)  reversals {}/{} (published 9)",
        a.chall_srcc, a.chall_reversals.count, a.chall_reversals.total
    );
    println!(
        "reality vs CODA test-sim:  SRCC={:.3} (published 0.875)  reversals {}/{} = {:.1}% (published 5, 13.8%)",
        a.test_srcc,
        a.test_reversals.count,
        a.test_reversals.total,
        100.0 * a.test_reversals.fraction()
    );
    println!("reversals count pairs ordered oppositely, plus pairs tied in exactly one column");
    if let Some(out) = plot {
        let paired = data.paired(|r| r.coda_chall_sim_spl)?;
        let svg = emit_scatter(&paired, &srcc_report(&paired)?)?;
        emit(Some(out), &svg)?;
    }
    println!("({:.3} s)", start.elapsed().as_secs_f64());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { scenario } => validate(&scenario),
        Command::Run {
            backend,
            params,
            roster,
            seed,
            scenarios,
            cell,
            out,
        } => {
            let params = load_params(params.as_deref())?;
            let roster = AgentId::parse_roster(&roster).map_err(invalid)?;
            let suite = load_suite(&scenarios)?;
            let results = run_suite(&BackendConfig::new(backend, params.clone()), &roster, &suite, seed)?;
            let label = cell.unwrap_or_else(|| cell_label(backend, &params));
            emit(out.as_deref(), &write_results(&results, &label)?)?;
            for r in &results {
                eprintln!(
                    "{:<22} success {:.3} ± {:.3}  SPL {:.3} ± {:.3}",
                    r.agent.as_str(),
                    r.success_rate,
                    r.success_se,
                    r.mean_spl,
                    r.spl_se
                );
            }
            Ok(())
        }
        Command::Srcc {
            sim,
            real,
            metric,
            paired_out,
        } => {
            let sim_rows = read_results(&read(&sim)?).map_err(invalid)?;
            let real_rows = read_results(&read(&real)?).map_err(invalid)?;
            let paired = pair_results(&sim_rows, &real_rows, metric.into()).map_err(invalid)?;
            let report = srcc_report(&paired).map_err(invalid)?;
            for e in &paired.entries {
                println!(
                    "{:<22} sim {:.3} ± {:.3}  real {:.3} ± {:.3}",
                    e.method, e.sim, e.sim_se, e.real, e.real_se
                );
            }
            print_report(report.metric.as_str(), &report);
            if let Some(p) = paired_out {
                emit(Some(&p), &write_paired(&paired)?)?;
            }
            Ok(())
        }
        Command::Optimize {
            grid: GridArg::Default,
            roster,
            seed,
            scenarios,
            out,
        } => {
            let roster = AgentId::parse_roster(&roster).map_err(invalid)?;
            let suite = load_suite(&scenarios)?;
            let start = Instant::now();
            let reference = run_suite(&BackendConfig::reference(), &roster, &suite, seed)?;
            let result = optimize(&ParamGrid::default(), &roster, &suite, &reference, seed)?;
            let mut table = String::from("cell,sliding,noise,spl_srcc,spl_reversals,success_srcc,success_reversals\n");
            let field = |r: &Result<SRCCReport, _>| match r {
                Ok(r) => (format!("{:.6}", r.srcc), r.discordant_pairs.to_string()),
                Err(_) => ("undefined".to_string(), String::new()),
            };
            for c in &result.cells {
                let (s, sr) = field(&c.spl);
                let (u, ur) = field(&c.success);
                table.push_str(&format!(
                    "{},{},{:.1},{s},{sr},{u},{ur}\n",
                    c.cell.index,
                    if c.cell.sliding { "on" } else { "off" },
                    c.cell.noise_multiplier
                ));
                match (&c.spl, &c.success) {
                    (Ok(a), Ok(b)) => println!(
                        "{:>2} {:<22} SPL-SRCC {:>6.3} ({:>2} reversals)  success-SRCC {:>6.3}",
                        c.cell.index,
                        c.cell.label(),
                        a.srcc,
                        a.discordant_pairs,
                        b.srcc
                    ),
                    (Ok(a), Err(e)) => println!(
                        "{:>2} {:<22} SPL-SRCC {:>6.3} ({:>2} reversals)  success-SRCC undefined: {e}",
                        c.cell.index,
                        c.cell.label(),
                        a.srcc,
                        a.discordant_pairs
                    ),
                    (Err(e), _) => println!("{:>2} {:<22} SPL-SRCC undefined: {e}", c.cell.index, c.cell.label()),
                }
            }
            match result.best() {
                Some(best) => println!("argmax: {}", best.cell.label()),
                None => println!("argmax: none (every correlation undefined)"),
            }
            eprintln!("({:.1} s)", start.elapsed().as_secs_f64());
            if let Some(p) = out {
                emit(Some(&p), &table)?;
            }
            Ok(())
        }
        Command::Plot { paired, out } => {
            let paired = read_paired(&read(&paired)?).map_err(invalid)?;
            let report = srcc_report(&paired).map_err(invalid)?;
            let svg = emit_scatter(&paired, &report).map_err(invalid)?;
            emit(Some(&out), &svg)?;
            print_report(report.metric.as_str(), &report);
            Ok(())
        }
        Command::Table1 { plot } => table1(plot.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Invalid>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
