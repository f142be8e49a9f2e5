//! `ftmbar`: enumerate stable graphs, query Betti numbers, dump Feynman
//! complexes and the (1,4) tables, and run the verification report.
//!
//! Exit codes: 0 success, 1 a selected check failed, 2 usage error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ftmbar::feynman::feynman_transform;
use ftmbar::modgraph::enumerate_stable;
use ftmbar::strata;
use ftmbar::verify14::{self, Params};

#[derive(Parser, Debug)]
#[command(name = "ftmbar", version, about = "Feynman transform of H_*(M̄_{g,n}) through (1,4)")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stable graphs of type (g, n) with a given number of edges.
    Graphs {
        g: u32,
        n: usize,
        #[arg(long, default_value_t = 0)]
        edges: usize,
        /// Keep leg labels (isomorphism classes of leg-labeled graphs).
        #[arg(long)]
        labeled: bool,
        #[arg(long, value_enum, default_value_t = GraphFormat::Text)]
        format: GraphFormat,
    },
    /// dim H_d(M̄_{g,n}), d the real degree.
    Betti { g: u32, n: usize, d: usize },
    /// Dimensions and differentials of the Feynman transform.
    Ft {
        g: u32,
        n: usize,
        /// Restrict to one internal degree s.
        #[arg(long)]
        row: Option<usize>,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// The two (1,4) differential matrices in the named bases.
    Qcomplex {
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        /// Emit only one table.
        #[arg(long, value_enum)]
        table: Option<QTable>,
    },
    /// Run the named checks (all of them by default).
    Verify {
        /// Check to run; repeatable.
        #[arg(long = "check")]
        checks: Vec<String>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        /// List the check names and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GraphFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum QTable {
    /// `Q_6 → Q_5`, 6×14.
    Q6q5,
    /// `(Q_5 → Q_4)^T`, 7×14.
    Q5q4,
}

/// Bad arguments that clap cannot see.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn supported(g: u32, n: usize) -> Result<()> {
    if strata::is_supported(g, n) {
        Ok(())
    } else {
        let list: Vec<String> = strata::SUPPORTED.iter().map(|(g, n)| format!("({g},{n})")).collect();
        Err(Usage(format!("type ({g},{n}) is outside the supported range {}", list.join(" "))).into())
    }
}

fn graphs(g: u32, n: usize, edges: usize, labeled: bool, format: GraphFormat) -> Result<String> {
    if 2 * g as usize + n < 3 {
        return Err(Usage(format!("type ({g},{n}) is unstable")).into());
    }
    let list = enumerate_stable(g, n, edges, labeled);
    let json: Vec<_> = list.iter().map(|x| x.to_json()).collect();
    Ok(match format {
        GraphFormat::Text => {
            let mut out = format!("{}\n", list.len());
            for j in &json {
                writeln!(out, "{}", serde_json::to_string(j)?)?;
            }
            out
        }
        GraphFormat::Json => {
            let v = serde_json::json!({
                "g": g, "n": n, "edges": edges, "labeled": labeled,
                "count": list.len(), "graphs": json,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
    })
}

fn ft(g: u32, n: usize, row: Option<usize>, format: TableFormat) -> Result<String> {
    supported(g, n)?;
    let mut c = feynman_transform(g, n)?;
    if let Some(s) = row {
        if !c.s_values().contains(&s) {
            return Err(Usage(format!("no row s={s} for ({g},{n}); rows are {:?}", c.s_values())).into());
        }
        c.dims.retain(|&(_, t), _| t == s);
        c.diffs.retain(|&(_, t), _| t == s);
    }
    Ok(match format {
        TableFormat::Json => serde_json::to_string_pretty(&c.to_json())? + "\n",
        TableFormat::Csv => {
            let mut out = String::from("# r,s,dim\n");
            for (&(r, s), &d) in &c.dims {
                writeln!(out, "{r},{s},{d}")?;
            }
            for (&(r, s), m) in &c.diffs {
                if m.nrows() == 0 || m.ncols() == 0 {
                    continue;
                }
                writeln!(out, "# d: ({r},{s}) -> ({},{s}), {}x{}", r + 1, m.nrows(), m.ncols())?;
                out.push_str(&m.to_csv());
            }
            out
        }
    })
}

fn qcomplex(format: TableFormat, table: Option<QTable>) -> Result<String> {
    let q = verify14::build_q_complex(true)?;
    let (t1, t2) = verify14::q_matrices(&q)?;
    let picked: Vec<(QTable, &str, &ftmbar::QMatrix)> = [
        (QTable::Q6q5, "Q6 -> Q5; rows eta_23,eta_34,eta_24,eta_04,eta_03,eta_02", &t1),
        (QTable::Q5q4, "(Q5 -> Q4)^T; rows delta_22,delta_23,delta_34,delta_24,delta_04,delta_03,delta_02", &t2),
    ]
    .into_iter()
    .filter(|(t, _, _)| table.is_none_or(|x| x == *t))
    .collect();
    let columns: Vec<String> = verify14::LAMBDA.iter().map(|(d, e)| format!("{}^{}", d.name(), e.name())).collect();
    Ok(match format {
        TableFormat::Csv => {
            let mut out = String::new();
            for (_, title, m) in &picked {
                if table.is_none() {
                    writeln!(out, "# {title}")?;
                }
                out.push_str(&m.to_csv());
            }
            out
        }
        TableFormat::Json => {
            let tables: Vec<_> = picked
                .iter()
                .map(|(_, title, m)| serde_json::json!({ "title": title, "columns": columns, "rows": m.to_json() }))
                .collect();
            serde_json::to_string_pretty(&tables)? + "\n"
        }
    })
}

/// Returns the rendered report and whether every selected check passed.
fn verify(checks: &[String], format: ReportFormat, list: bool) -> Result<(String, bool)> {
    let names = verify14::check_names();
    if list {
        return Ok((names.join("\n") + "\n", true));
    }
    if let Some(bad) = checks.iter().find(|c| !names.contains(&c.as_str())) {
        return Err(Usage(format!("unknown check '{bad}'; known checks: {}", names.join(", "))).into());
    }
    let report = verify14::run_checks(&verify14::Context::new(Params::default()), checks);
    let text = match format {
        ReportFormat::Text => report.render(),
        ReportFormat::Json => serde_json::to_string_pretty(&report.to_json())? + "\n",
    };
    Ok((text, report.all_passed()))
}

fn run(cli: Cli) -> Result<bool> {
    let (text, ok) = match cli.command {
        Command::Graphs { g, n, edges, labeled, format } => (graphs(g, n, edges, labeled, format)?, true),
        Command::Betti { g, n, d } => {
            supported(g, n)?;
            (format!("{}\n", strata::betti(g, n, d)?), true)
        }
        Command::Ft { g, n, row, format } => (ft(g, n, row, format)?, true),
        Command::Qcomplex { format, table } => (qcomplex(format, table)?, true),
        Command::Verify { checks, format, list } => verify(&checks, format, list)?,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
