//! Command-line front end. Every subcommand maps onto one engine entry
//! point and emits a JSON report, pretty-printed to stdout or to --out.
//! Censuses stream line-delimited JSON to a file and print a fixed-width
//! summary. Exit codes: 0 success, 1 usage or hard error, 2 when a
//! resource cap made the answer infeasible or a census came back
//! incomplete.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cayley_ci::cayley::{
    analyze, aut_gs_count, build_cayley, digraph_automorphisms, find_wreath_witness, CayleyDigraph,
    CayleyError, ConnectionSet, EngineConfig,
};
use cayley_ci::constructions::{
    connection_set_orbit, d8_counterexample_report, ladder_set, ladder_witness_subgroup,
    reduce_by_symmetry, run_census, CensusMode, CensusOptions,
};
use cayley_ci::dihedral::{holomorph_structure_report, Dihedral};
use cayley_ci::perm::PermGroup;

#[derive(Parser)]
#[command(
    name = "cayley-ci",
    version,
    about = "Cayley digraphs of dihedral groups: automorphism groups, normality, CI verdicts"
)]
struct Cli {
    /// Worker threads for census parallelism (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ReportArgs {
    /// Dihedral parameter: the group is D_2n on 2n vertices
    #[arg(long)]
    n: usize,
    /// Connection set, e.g. "a^1,a^5,b*a^0"; "" is the empty set
    #[arg(long)]
    set: String,
    /// Backtrack node budget for the automorphism search
    #[arg(long)]
    budget: Option<u64>,
    /// Write the JSON report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the digraph in DOT format to this file
    #[arg(long)]
    export_graph: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// All subsets of the non-identity elements
    Digraph,
    /// Inverse-closed subsets only
    Graph,
}

#[derive(Subcommand)]
enum Command {
    /// Construct Cay(D_2n, S) and report its basic structure
    Build(ReportArgs),
    /// Full automorphism group of Cay(D_2n, S)
    Aut(ReportArgs),
    /// Normality verdict, with a non-normality witness when one applies
    Normal(ReportArgs),
    /// Normality plus CI verdict
    Ci(ReportArgs),
    /// Search for a generalized wreath non-normality witness
    Wreath(ReportArgs),
    /// The set {a, a^-1, b}: full analysis plus its second regular subgroup
    Ladder {
        /// Dihedral parameter: the group is D_2n on 2n vertices
        #[arg(long)]
        n: usize,
        /// Backtrack node budget for the automorphism search
        #[arg(long)]
        budget: Option<u64>,
        /// Write the JSON report to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the digraph in DOT format to this file
        #[arg(long)]
        export_graph: Option<PathBuf>,
    },
    /// The n = 4 ladder counterexample, every claim recomputed
    D8 {
        /// Backtrack node budget for the automorphism search
        #[arg(long)]
        budget: Option<u64>,
        /// Write the JSON report to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Holomorph structure report for D_2n
    Holomorph {
        /// Dihedral parameter: the group is D_2n on 2n vertices
        #[arg(long)]
        n: usize,
        /// Write the JSON report to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Census over connection sets, checking the classification claim
    VerifyTheorem {
        /// Dihedral parameter: the group is D_2n on 2n vertices
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Digraph)]
        mode: ModeArg,
        /// Scan every connection set (the default; --sample overrides)
        #[arg(long, conflicts_with = "sample")]
        exhaustive: bool,
        /// Sampled census over this many structured plus random sets
        #[arg(long)]
        sample: Option<usize>,
        /// RNG seed for the sampled census
        #[arg(long)]
        seed: Option<u64>,
        /// Backtrack node budget for the automorphism search
        #[arg(long)]
        budget: Option<u64>,
        /// Census file path (default: census-n{n}-{mode}.jsonl)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aut(D_2n)-orbit of one connection set, or all orbit representatives
    Orbits {
        /// Dihedral parameter: the group is D_2n on 2n vertices
        #[arg(long)]
        n: usize,
        /// With a set: list its orbit. Without: decompose all sets
        #[arg(long)]
        set: Option<String>,
        /// Write the JSON report to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let capped = err
                .downcast_ref::<CayleyError>()
                .is_some_and(CayleyError::is_infeasible);
            ExitCode::from(if capped { 2 } else { 1 })
        }
    }
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Build(args) => {
            let (set, gamma) = digraph_for(&args)?;
            export(&gamma, &args.export_graph)?;
            let report = json!({
                "n": set.n(),
                "S": set.to_string(),
                "is_graph": gamma.is_graph(),
                "vertices": gamma.degree(),
                "out_degree": set.len(),
                "arcs": gamma.arcs().len(),
            });
            emit(&args.out, &serde_json::to_string_pretty(&report)?)?;
            Ok(0)
        }
        Command::Aut(args) => {
            let (set, gamma) = digraph_for(&args)?;
            export(&gamma, &args.export_graph)?;
            let cfg = engine_config(args.budget)?;
            let aut = digraph_automorphisms(&gamma, &cfg)?;
            let generators: Vec<String> = aut.generators().iter().map(|p| p.to_string()).collect();
            let report = json!({
                "n": set.n(),
                "S": set.to_string(),
                "is_graph": gamma.is_graph(),
                "aut_order": order_value(&aut),
                "aut_gs_order": aut_gs_count(&set)?,
                "generators": generators,
            });
            emit(&args.out, &serde_json::to_string_pretty(&report)?)?;
            Ok(0)
        }
        Command::Normal(args) => set_report(&args, false),
        Command::Ci(args) => set_report(&args, true),
        Command::Wreath(args) => {
            let (set, gamma) = digraph_for(&args)?;
            export(&gamma, &args.export_graph)?;
            let d = Dihedral::new(set.n())?;
            let witness = find_wreath_witness(&set).map(|w| {
                let show =
                    |v: &[_]| -> Vec<String> { v.iter().map(|&x| d.display_element(x)).collect() };
                json!({
                    "type": "wreath",
                    "h": show(&w.h),
                    "k": show(&w.k),
                    "x": d.display_element(w.x),
                    "y": d.display_element(w.y),
                })
            });
            let report = json!({
                "n": set.n(),
                "S": set.to_string(),
                "witness": witness,
            });
            emit(&args.out, &serde_json::to_string_pretty(&report)?)?;
            Ok(0)
        }
        Command::Ladder {
            n,
            budget,
            out,
            export_graph,
        } => {
            check_n(n)?;
            let set = ladder_set(n)?;
            let gamma = build_cayley(&set)?;
            export(&gamma, &export_graph)?;
            let cfg = engine_config(budget)?;
            let report = analyze(&set, &cfg, true)?;
            let code = if report.status.is_some() { 2 } else { 0 };
            // the second regular dihedral subgroup exists for even n > 4
            let witness_subgroup = if n % 2 == 0 && n > 4 {
                let w = ladder_witness_subgroup(n, &cfg)?;
                let generators: Vec<String> =
                    w.generators().iter().map(|p| p.to_string()).collect();
                Some(json!({
                    "order": order_value(&w),
                    "generators": generators,
                }))
            } else {
                None
            };
            let combined = json!({
                "report": report,
                "witness_subgroup": witness_subgroup,
            });
            emit(&out, &serde_json::to_string_pretty(&combined)?)?;
            Ok(code)
        }
        Command::D8 { budget, out } => {
            let cfg = engine_config(budget)?;
            let rep = d8_counterexample_report(&cfg)?;
            let verified = rep.all_verified();
            let mut value = serde_json::to_value(&rep)?;
            value["all_verified"] = json!(verified);
            emit(&out, &serde_json::to_string_pretty(&value)?)?;
            Ok(0)
        }
        Command::Holomorph { n, out } => {
            check_n(n)?;
            let rep = holomorph_structure_report(n)?;
            let verified = rep.all_verified();
            let mut value = serde_json::to_value(&rep)?;
            value["all_verified"] = json!(verified);
            emit(&out, &serde_json::to_string_pretty(&value)?)?;
            Ok(0)
        }
        Command::VerifyTheorem {
            n,
            mode,
            exhaustive: _,
            sample,
            seed,
            budget,
            out,
        } => {
            check_n(n)?;
            let mode = match mode {
                ModeArg::Digraph => CensusMode::Digraph,
                ModeArg::Graph => CensusMode::Graph,
            };
            let mut opts = CensusOptions {
                config: engine_config(budget)?,
                ..CensusOptions::default()
            };
            if let Some(size) = sample {
                opts.exhaustive = false;
                opts.sample_size = size;
            }
            if let Some(seed) = seed {
                opts.seed = seed;
            }
            let (verdict, records) = run_census(n, mode, &opts)?;
            let path = out
                .unwrap_or_else(|| PathBuf::from(format!("census-n{n}-{}.jsonl", mode.as_str())));
            let mut lines = String::new();
            for record in &records {
                writeln!(lines, "{}", serde_json::to_string(record)?)?;
            }
            writeln!(lines, "{}", serde_json::to_string(&verdict)?)?;
            fs::write(&path, lines).with_context(|| format!("writing {}", path.display()))?;
            print_line(&format!(
                "{:<4} {:<8} {:>8} {:>8} {:>8} {:>6} {:>9}",
                "n", "mode", "sets", "normal", "non-ci", "claim", "complete"
            ))?;
            print_line(&format!(
                "{:<4} {:<8} {:>8} {:>8} {:>8} {:>6} {:>9}",
                verdict.n,
                verdict.mode,
                verdict.total_sets_scanned,
                verdict.normal_count,
                verdict.normal_non_ci_examples.len(),
                verdict.claim_matches_paper,
                verdict.complete
            ))?;
            eprintln!(
                "{} set records and the verdict written to {}",
                records.len(),
                path.display()
            );
            Ok(if verdict.complete { 0 } else { 2 })
        }
        Command::Orbits { n, set, out } => {
            check_n(n)?;
            let report = match set {
                Some(spec) => {
                    let s = parse_set(n, &spec)?;
                    let members: Vec<String> = connection_set_orbit(&s)
                        .iter()
                        .map(|&m| {
                            ConnectionSet::from_bitmask(n, m)
                                .expect("orbit masks stay in range")
                                .to_string()
                        })
                        .collect();
                    json!({
                        "n": n,
                        "S": s.to_string(),
                        "orbit_size": members.len(),
                        "orbit": members,
                    })
                }
                None => {
                    if n > 8 {
                        bail!("full orbit decomposition is desk scale only (n <= 8)");
                    }
                    let bits = 2 * n - 1;
                    let all: Vec<ConnectionSet> = (0u64..1 << bits)
                        .map(|m| ConnectionSet::from_bitmask(n, m).expect("in range"))
                        .collect();
                    let reduced = reduce_by_symmetry(&all);
                    let total: usize = reduced.iter().map(|(_, size)| size).sum();
                    let orbits: Vec<serde_json::Value> = reduced
                        .iter()
                        .map(|(rep, size)| json!({"S": rep.to_string(), "size": size}))
                        .collect();
                    json!({
                        "n": n,
                        "total_sets": total,
                        "orbit_count": orbits.len(),
                        "orbits": orbits,
                    })
                }
            };
            emit(&out, &serde_json::to_string_pretty(&report)?)?;
            Ok(0)
        }
    }
}

fn set_report(args: &ReportArgs, with_ci: bool) -> Result<u8> {
    let (set, gamma) = digraph_for(args)?;
    export(&gamma, &args.export_graph)?;
    let cfg = engine_config(args.budget)?;
    let report = analyze(&set, &cfg, with_ci)?;
    let code = if report.status.is_some() { 2 } else { 0 };
    emit(&args.out, &serde_json::to_string_pretty(&report)?)?;
    Ok(code)
}

fn digraph_for(args: &ReportArgs) -> Result<(ConnectionSet, CayleyDigraph)> {
    check_n(args.n)?;
    let set = parse_set(args.n, &args.set)?;
    let gamma = build_cayley(&set)?;
    Ok((set, gamma))
}

/// Strict set-spec parser for the command line: tokens are exactly "a^i" or
/// "b*a^i" with 0 <= i < n, no duplicates. The library parser is more
/// forgiving (shorthands, negative exponents); a batch interface should not
/// silently normalize its input.
fn parse_set(n: usize, spec: &str) -> Result<ConnectionSet> {
    let d = Dihedral::new(n)?;
    let mut seen = BTreeSet::new();
    let mut members = Vec::new();
    for token in spec.split(',') {
        let token = token.trim();
        if token.is_empty() {
            if spec.trim().is_empty() {
                continue; // "" denotes the empty set
            }
            bail!("empty token in --set {spec:?}");
        }
        let (flip, digits) = if let Some(rest) = token.strip_prefix("b*a^") {
            (true, rest)
        } else if let Some(rest) = token.strip_prefix("a^") {
            (false, rest)
        } else {
            bail!("bad token {token:?}: expected a^i or b*a^i");
        };
        let i: usize = digits
            .parse()
            .with_context(|| format!("bad exponent in token {token:?}"))?;
        if i >= n {
            bail!("exponent {i} in token {token:?} out of range: need 0..{n}");
        }
        let x = if flip {
            d.reflection(i as i64)
        } else {
            d.rotation(i as i64)
        };
        if !seen.insert(x) {
            bail!("duplicate token {token:?}");
        }
        members.push(x);
    }
    Ok(ConnectionSet::new(n, members)?)
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        bail!("--n must be at least 2");
    }
    Ok(())
}

fn engine_config(budget: Option<u64>) -> Result<EngineConfig> {
    let mut cfg = EngineConfig::default();
    if let Some(b) = budget {
        cfg.backtrack_node_budget = b;
    }
    if let Ok(cap) = std::env::var("CAYLEY_CI_CAP") {
        cfg.enumeration_cap = cap
            .parse()
            .with_context(|| format!("CAYLEY_CI_CAP={cap:?} is not a count"))?;
    }
    Ok(cfg)
}

fn order_value(g: &PermGroup) -> serde_json::Value {
    match g.order_u64() {
        Some(v) => json!(v),
        None => json!(g.order().to_string()),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display())),
        None => print_line(text),
    }
}

/// println! that survives a consumer closing the pipe early (head, less).
fn print_line(text: &str) -> Result<()> {
    use std::io::{ErrorKind, Write};
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}") {
        if e.kind() != ErrorKind::BrokenPipe {
            return Err(e).context("writing to stdout");
        }
    }
    Ok(())
}

fn export(gamma: &CayleyDigraph, path: &Option<PathBuf>) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, gamma.to_dot()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}
