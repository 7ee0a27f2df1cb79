//! `rpd`: reduced pipe dreams and their lattice from the command line.
//!
//! Exit codes: 0 success, 1 domain error, 2 failed verification or a
//! disagreement between comparison methods, 64 usage error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pipedream_lattice::lattice::{join_with_trace, leq, meet, PosetOracle, Side};
use pipedream_lattice::markov::{run_walks, WalkConfig};
use pipedream_lattice::moveop::{m_explicit, m_prime, m_recursive, path_of};
use pipedream_lattice::moves::enumerate_rpd_bounded;
use pipedream_lattice::tableau::{from_tableau, tableau_of, Tableau};
use pipedream_lattice::verify::{verify_all, verify_permutation, VerifyOptions, VerifyReport};
use pipedream_lattice::{lattice, Permutation, PipeDream, Tile};

const EXIT_DOMAIN: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "rpd",
    version,
    about = "Reduced pipe dreams and the lattice of generalized ladder moves"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count (and list) the reduced pipe dreams of a permutation.
    Enumerate {
        w: Permutation,
        /// Print only the count.
        #[arg(long)]
        count: bool,
    },
    /// Draw a pipe dream with box-drawing pipes.
    Render { dream: PathBuf },
    /// Hasse diagram of RPD(w) in DOT.
    Hasse { w: Permutation },
    /// Join of two pipe dreams.
    Join {
        w: Permutation,
        a: PathBuf,
        b: PathBuf,
        /// Also print each step of the recursion.
        #[arg(long)]
        trace: bool,
    },
    /// Meet of two pipe dreams.
    Meet {
        w: Permutation,
        a: PathBuf,
        b: PathBuf,
    },
    /// Compare two pipe dreams by join and by tableau.
    Compare {
        w: Permutation,
        a: PathBuf,
        b: PathBuf,
    },
    /// Apply M_ij.
    Move {
        w: Permutation,
        #[arg(long)]
        dream: PathBuf,
        #[arg(long)]
        pivot: Tile,
        #[arg(long, value_enum, default_value_t = Variant::Explicit)]
        variant: Variant,
    },
    /// Show Path_ij and Shape_ij as a marked matrix.
    Path {
        w: Permutation,
        #[arg(long)]
        dream: PathBuf,
        #[arg(long)]
        pivot: Tile,
    },
    /// Print the tableau of a pipe dream.
    Tableau {
        w: Permutation,
        #[arg(long)]
        dream: PathBuf,
    },
    /// Rebuild a pipe dream from its tableau (grid or JSON).
    FromTableau {
        w: Permutation,
        #[arg(long)]
        tableau: PathBuf,
    },
    /// Run the property sweeps on RPD(w), or on all of S_N.
    Verify {
        #[arg(required_unless_present = "all_sn", conflicts_with = "all_sn")]
        w: Option<Permutation>,
        #[arg(long, value_name = "N")]
        all_sn: Option<usize>,
        /// Largest n for which the V_ij minimality suite runs.
        #[arg(long, default_value_t = 4)]
        minimality_max_n: usize,
    },
    /// Random walk on RPD(w) with total-variation trace.
    Sample {
        w: Permutation,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        walks: usize,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        /// CSV destination; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    Explicit,
    Recursive,
    Prime,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

/// Staircase text or `{"n":…,"crosses":…}`.
fn read_dream(path: &Path) -> Result<PipeDream> {
    let s = read_input(path)?;
    let d = if s.trim_start().starts_with('{') {
        PipeDream::from_json(&s)
    } else {
        s.trim_end_matches(['\n', '\r']).parse()
    };
    d.with_context(|| format!("parsing {}", path.display()))
}

fn read_dream_for(w: &Permutation, path: &Path) -> Result<PipeDream> {
    let d = read_dream(path)?;
    let v = d.permutation();
    if v != *w {
        bail!("{} is a pipe dream for {v}, not {w}", path.display());
    }
    if !d.is_reduced() {
        bail!("{} is not reduced", path.display());
    }
    Ok(d)
}

fn emit(cli: &Cli, text: impl FnOnce() -> String, value: impl FnOnce() -> Value) -> Result<()> {
    let mut out = io::stdout().lock();
    if cli.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&value())?)?;
    } else {
        let s = text();
        write!(out, "{s}")?;
        if !s.ends_with('\n') {
            writeln!(out)?;
        }
    }
    Ok(())
}

fn dream_json(d: &PipeDream) -> Value {
    json!({ "n": d.n(), "crosses": d.crosses(), "text": d.to_string() })
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Enumerate { w, count } => {
            let mut all = enumerate_rpd_bounded(w, lattice::oracle_budget())?;
            all.sort();
            emit(
                cli,
                || {
                    let mut s = format!("{}\n", all.len());
                    if !count {
                        for d in &all {
                            s.push('\n');
                            s.push_str(&d.to_string());
                            s.push('\n');
                        }
                    }
                    s
                },
                || {
                    let mut v = json!({ "permutation": w.to_string(), "count": all.len() });
                    if !count {
                        v["pipe_dreams"] = all.iter().map(dream_json).collect();
                    }
                    v
                },
            )?;
        }
        Command::Render { dream } => {
            let d = read_dream(dream)?;
            emit(
                cli,
                || d.render_unicode(),
                || json!({ "permutation": d.permutation().to_string(), "dream": dream_json(&d) }),
            )?;
        }
        Command::Hasse { w } => {
            let o = PosetOracle::build(w)?;
            emit(
                cli,
                || o.to_dot(),
                || {
                    let nodes: Vec<Value> = o
                        .elements()
                        .iter()
                        .map(|d| json!({ "id": lattice::node_id(d), "text": d.to_string() }))
                        .collect();
                    let edges: Vec<Value> = (0..o.len())
                        .flat_map(|a| o.covers(a).iter().map(move |&b| (a, b)))
                        .map(|(a, b)| {
                            json!([
                                lattice::node_id(&o.elements()[a]),
                                lattice::node_id(&o.elements()[b])
                            ])
                        })
                        .collect();
                    json!({ "permutation": w.to_string(), "nodes": nodes, "edges": edges })
                },
            )?;
        }
        Command::Join { w, a, b, trace } => {
            let (a, b) = (read_dream_for(w, a)?, read_dream_for(w, b)?);
            let t = join_with_trace(&a, &b)?;
            emit(
                cli,
                || {
                    let mut s = String::new();
                    if *trace {
                        for st in &t.steps {
                            let side = match st.disagreement.side {
                                Side::First => "first",
                                Side::Second => "second",
                            };
                            s.push_str(&format!(
                                "M at {} on the {side} dream\n",
                                st.disagreement.tile
                            ));
                        }
                    }
                    s.push_str(&t.result.to_string());
                    s
                },
                || {
                    let steps: Vec<Value> = t
                        .steps
                        .iter()
                        .map(|st| {
                            json!({
                                "tile": st.disagreement.tile,
                                "side": if st.disagreement.side == Side::First { "first" } else { "second" },
                            })
                        })
                        .collect();
                    json!({ "result": dream_json(&t.result), "steps": steps })
                },
            )?;
        }
        Command::Meet { w, a, b } => {
            let (a, b) = (read_dream_for(w, a)?, read_dream_for(w, b)?);
            let m = meet(&a, &b)?;
            emit(
                cli,
                || m.to_string(),
                || json!({ "result": dream_json(&m) }),
            )?;
        }
        Command::Compare { w, a, b } => {
            let (a, b) = (read_dream_for(w, a)?, read_dream_for(w, b)?);
            let by_join = verdict(leq(&a, &b)?, leq(&b, &a)?);
            let (ta, tb) = (tableau_of(&a)?, tableau_of(&b)?);
            let by_tableau = verdict(ta.leq(&tb)?, tb.leq(&ta)?);
            emit(
                cli,
                || format!("join: {by_join}\ntableau: {by_tableau}"),
                || json!({ "join": by_join, "tableau": by_tableau, "agree": by_join == by_tableau }),
            )?;
            if by_join != by_tableau {
                eprintln!("error: join and tableau comparisons disagree");
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Move {
            w,
            dream,
            pivot,
            variant,
        } => {
            let d = read_dream_for(w, dream)?;
            let r = match variant {
                Variant::Explicit => m_explicit(&d, *pivot)?,
                Variant::Recursive => m_recursive(&d, *pivot)?,
                Variant::Prime => m_prime(&d, *pivot)?,
            };
            emit(
                cli,
                || r.to_string(),
                || json!({ "pivot": pivot, "result": dream_json(&r) }),
            )?;
        }
        Command::Path { w, dream, pivot } => {
            let d = read_dream_for(w, dream)?;
            let ps = path_of(&d, *pivot)?;
            let ctx = ps.context;
            emit(
                cli,
                || {
                    format!(
                        "rectangle rows {}..={} columns {}..={}\n{}",
                        ctx.h,
                        pivot.row,
                        pivot.col,
                        ctx.k,
                        ps.render(&d)
                    )
                },
                || {
                    json!({
                        "pivot": pivot,
                        "h": ctx.h,
                        "k": ctx.k,
                        "max_bump_row": ctx.max_bump_row,
                        "min_bump_col": ctx.min_bump_col,
                        "path": ps.path,
                        "corners": ps.corners,
                        "shape": ps.shape,
                        "bump_rows": ps.bump_rows,
                        "bump_cols": ps.bump_cols,
                    })
                },
            )?;
        }
        Command::Tableau { w, dream } => {
            let d = read_dream_for(w, dream)?;
            let t = tableau_of(&d)?;
            emit(
                cli,
                || t.to_string(),
                || serde_json::from_str(&t.to_json()).expect("valid json"),
            )?;
        }
        Command::FromTableau { w, tableau } => {
            let t = Tableau::parse(w, &read_input(tableau)?)?;
            let d = from_tableau(&t)?;
            emit(cli, || d.to_string(), || dream_json(&d))?;
        }
        Command::Verify {
            w,
            all_sn,
            minimality_max_n,
        } => {
            let opts = VerifyOptions {
                max_n_minimality: *minimality_max_n,
                ..VerifyOptions::default()
            };
            let report: VerifyReport = match (w, all_sn) {
                (_, Some(n)) => verify_all(*n, &opts)?,
                (Some(w), None) => verify_permutation(w, &opts)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            emit(
                cli,
                || report.table(),
                || serde_json::to_value(&report).expect("serializable"),
            )?;
            if !report.passed() {
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Sample {
            w,
            p,
            walks,
            steps,
            seed,
            burn_in,
            out,
        } => {
            let cfg = WalkConfig {
                w: w.clone(),
                p: *p,
                steps: *steps,
                walks: *walks,
                seed: *seed,
                burn_in: *burn_in,
            };
            let report = run_walks(&cfg)?;
            let csv = report.to_csv();
            match out {
                Some(path) => {
                    fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
                    emit(
                        cli,
                        || {
                            format!(
                                "{} states, {} of them visited; final TV distance {:.6}\nup {} down {} lazy {}",
                                report.states.len(),
                                report.histogram.iter().filter(|&&c| c > 0).count(),
                                report.final_tv(),
                                report.up_steps,
                                report.down_steps,
                                report.lazy_steps
                            )
                        },
                        || {
                            json!({
                                "states": report.states.len(),
                                "visited": report.histogram.iter().filter(|&&c| c > 0).count(),
                                "final_tv": report.final_tv(),
                                "up_steps": report.up_steps,
                                "down_steps": report.down_steps,
                                "lazy_steps": report.lazy_steps,
                            })
                        },
                    )?;
                }
                None => {
                    io::stdout().lock().write_all(csv.as_bytes())?;
                }
            }
        }
    }
    Ok(0)
}

fn verdict(le: bool, ge: bool) -> &'static str {
    match (le, ge) {
        (true, true) => "=",
        (true, false) => "≤",
        (false, true) => "≥",
        (false, false) => "incomparable",
    }
}
