//! `nilcat`: profile curves, stable domains, Morse indices and invariant
//! checks for the rotational catenoids of the Heisenberg groups.

mod commands;
mod format;
mod svg;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::{usage, RunConfig, UsageError, PROFILE_HEADER};
use nilcat_core::numerics::Tolerances;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nilcat", version, about = "Rotational catenoids in the Heisenberg groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    tol: TolArgs,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the document here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, global = true, allow_negative_numbers = true)]
    ode_rel: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    ode_abs: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    quad_tol: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    root_tol: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    zero_eps: Option<f64>,
}

impl TolArgs {
    fn resolve(&self) -> Result<Tolerances> {
        let d = Tolerances::default();
        let tol = Tolerances {
            ode_rel: self.ode_rel.unwrap_or(d.ode_rel),
            ode_abs: self.ode_abs.unwrap_or(d.ode_abs),
            quad_tol: self.quad_tol.unwrap_or(d.quad_tol),
            root_tol: self.root_tol.unwrap_or(d.root_tol),
            zero_eps: self.zero_eps.unwrap_or(d.zero_eps),
        };
        if let Err(e) = tol.validate() {
            return usage(e.to_string());
        }
        Ok(tol)
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Neck {
    /// Neck radius.
    #[arg(long, allow_negative_numbers = true, value_parser = positive_a)]
    a: Option<f64>,

    /// Sweep: `lo:hi:step` or a comma-separated list.
    #[arg(long, allow_hyphen_values = true, value_parser = a_grid)]
    a_grid: Option<AGrid>,
}

#[derive(Clone, Debug)]
struct AGrid(Vec<f64>);

impl Neck {
    fn values(&self) -> (Vec<f64>, bool) {
        match (&self.a, &self.a_grid) {
            (Some(a), _) => (vec![*a], false),
            (None, Some(g)) => (g.0.clone(), true),
            (None, None) => unreachable!("clap enforces the group"),
        }
    }
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    neck: Neck,

    /// Dimension index: the hypersurface lives in Nil(2n+1).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,

    /// Half-length of the constructed height interval.
    #[arg(long, allow_negative_numbers = true, value_parser = positive_t_max)]
    t_max: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Sampled generating curve: t, f, f_t, s, gamma.
    Profile {
        #[command(flatten)]
        common: Common,
        /// Sample spacing in t.
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
        step: f64,
        /// Also draw the curve as an SVG file.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Conjugate height z(a) and the companion boundary of a domain.
    Stability {
        #[command(flatten)]
        common: Common,
        /// Lower boundary height, the domain starts at -t1 (default z(a)).
        #[arg(long, allow_negative_numbers = true)]
        t1: Option<f64>,
        /// Upper boundary height (default: the companion of t1).
        #[arg(long, allow_negative_numbers = true)]
        t2: Option<f64>,
    },
    /// Morse index with its bracket.
    Index {
        #[command(flatten)]
        common: Common,
    },
    /// Twist limit and Gauss-map strip half-width.
    Omega {
        #[command(flatten)]
        common: Common,
    },
    /// Escape height, conjugate height and the Lindelöf property.
    Highdim {
        #[command(flatten)]
        common: Common,
    },
    /// Full invariant suite; exits 1 if any check fails.
    Check,
}

fn positive_a(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if a.is_finite() && a > 0.0 {
        Ok(a)
    } else {
        Err(format!("requires a > 0, got {a}"))
    }
}

fn positive_t_max(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(format!("requires t_max > 0, got {t}"))
    }
}

fn a_grid(s: &str) -> Result<AGrid, String> {
    let mut vals = if let Some((lo, rest)) = s.split_once(':') {
        let (hi, step) = rest.split_once(':').ok_or("expected lo:hi:step")?;
        let [lo, hi, step] = [lo, hi, step].map(|x| x.trim().parse::<f64>());
        let (lo, hi, step) = (
            lo.map_err(|e| e.to_string())?,
            hi.map_err(|e| e.to_string())?,
            step.map_err(|e| e.to_string())?,
        );
        if !(step > 0.0 && hi >= lo) {
            return Err("expected hi >= lo and step > 0".into());
        }
        let m = ((hi - lo) / step * (1.0 + 1e-12)).floor() as usize;
        (0..=m).map(|i| lo + i as f64 * step).collect::<Vec<_>>()
    } else {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?
    };
    if let Some(bad) = vals.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(format!("requires a > 0, got {bad}"));
    }
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    Ok(AGrid(vals))
}

#[derive(Serialize)]
struct GridEntry<T> {
    a: f64,
    result: T,
}

/// Evaluates `f` at every `a` concurrently, keeping ascending order.
fn sweep<T: Send>(
    common: &Common,
    tol: Tolerances,
    f: impl Fn(&RunConfig) -> Result<T> + Sync,
) -> Result<(Vec<(f64, T)>, bool)> {
    let (values, is_grid) = common.neck.values();
    let out = values
        .par_iter()
        .map(|&a| {
            let cfg = RunConfig {
                a,
                n: common.n,
                t_max: common.t_max,
                tol,
            };
            f(&cfg).map(|r| (a, r)).with_context(|| format!("a = {a}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((out, is_grid))
}

fn json<T: Serialize>(docs: Vec<(f64, T)>, is_grid: bool) -> Result<String> {
    let mut s = if is_grid {
        let entries: Vec<GridEntry<T>> = docs.into_iter().map(|(a, result)| GridEntry { a, result }).collect();
        serde_json::to_string_pretty(&entries)?
    } else {
        let (_, doc) = docs.into_iter().next().expect("one value of a");
        serde_json::to_string_pretty(&doc)?
    };
    s.push('\n');
    Ok(s)
}

fn json_only(format: Option<Format>, command: &str) -> Result<()> {
    if format == Some(Format::Csv) {
        return usage(format!("`{command}` emits JSON only"));
    }
    Ok(())
}

/// The document and whether the invariant suite failed.
fn run(cli: &Cli) -> Result<(String, bool)> {
    let tol = cli.tol.resolve()?;
    let doc = match &cli.command {
        Command::Profile { common, step, svg } => {
            let (docs, is_grid) = sweep(common, tol, |cfg| commands::profile(cfg, *step))?;
            if let Some(path) = svg {
                if is_grid {
                    return usage("--svg needs a single --a");
                }
                let cfg = RunConfig {
                    a: docs[0].0,
                    n: common.n,
                    t_max: common.t_max,
                    tol,
                };
                let figure = commands::profile_svg(&cfg, &docs[0].1)?;
                std::fs::write(path, figure).with_context(|| format!("writing {}", path.display()))?;
            }
            match cli.format.unwrap_or(Format::Csv) {
                Format::Json => json(docs, is_grid)?,
                Format::Csv => {
                    let mut out = String::new();
                    out.push_str(if is_grid { "a," } else { "" });
                    out.push_str(PROFILE_HEADER);
                    out.push('\n');
                    for (a, doc) in &docs {
                        for row in &doc.rows {
                            if is_grid {
                                out.push_str(&format::csv_row(&[*a]));
                                out.push(',');
                            }
                            out.push_str(&row.csv());
                            out.push('\n');
                        }
                    }
                    out
                }
            }
        }
        Command::Stability { common, t1, t2 } => {
            json_only(cli.format, "stability")?;
            let (docs, g) = sweep(common, tol, |cfg| commands::stability(cfg, *t1, *t2))?;
            json(docs, g)?
        }
        Command::Index { common } => {
            json_only(cli.format, "index")?;
            let (docs, g) = sweep(common, tol, commands::index)?;
            json(docs, g)?
        }
        Command::Omega { common } => {
            json_only(cli.format, "omega")?;
            let (docs, g) = sweep(common, tol, commands::omega)?;
            json(docs, g)?
        }
        Command::Highdim { common } => {
            json_only(cli.format, "highdim")?;
            let (docs, g) = sweep(common, tol, commands::highdim)?;
            json(docs, g)?
        }
        Command::Check => {
            let outcomes = commands::check(&tol);
            let failed = outcomes.iter().any(|o| !o.passed);
            let text = match cli.format {
                Some(Format::Json) => serde_json::to_string_pretty(&outcomes)? + "\n",
                Some(Format::Csv) => {
                    let mut s = String::from("id,name,passed,detail\n");
                    for o in &outcomes {
                        s.push_str(&format!(
                            "{},{},{},\"{}\"\n",
                            o.id,
                            o.name,
                            o.passed,
                            o.detail.replace('"', "\"\"")
                        ));
                    }
                    s
                }
                None => commands::check_table(&outcomes),
            };
            return Ok((text, failed));
        }
    };
    Ok((doc, false))
}

fn is_usage(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<UsageError>()
            || matches!(
                c.downcast_ref::<nilcat_core::Error>(),
                Some(nilcat_core::Error::InvalidParameter { .. } | nilcat_core::Error::Tolerance(_))
            )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((doc, failed)) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &doc).with_context(|| format!("writing {}", path.display())),
                None => std::io::stdout()
                    .lock()
                    .write_all(doc.as_bytes())
                    .context("writing standard output"),
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::FAILURE;
            }
            if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
