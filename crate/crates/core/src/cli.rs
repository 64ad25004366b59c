//! Command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success; states equivalent; oracle agrees |
//! | 1 | states not equivalent; oracle disagreement; demo did not reproduce |
//! | 2 | unreadable input, malformed JSON or bad command-line arguments |
//! | 3 | validation error (symmetry, dimension, case mismatch, zero state) |
//! | 4 | decomposition did not converge |

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::equivalence::lu_equivalent;
use crate::error::Error;
use crate::invariants::{
    derived_seed, enumerate_strata, orbit_invariants, sampled_representative, stratum_margin,
    OrbitInvariants,
};
use crate::io;
use crate::moment::reduced_matrix;
use crate::oracle::{counterexample_demo, oracle_check, OracleReport};
use crate::slice::canonicalize;
use crate::states::{random_state, ParticleCase};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "lu-orbits",
    version,
    about = "Local unitary classification of two-particle pure states",
    after_help = "Exit codes: 0 ok/equivalent, 1 not equivalent or oracle disagreement, \
                  2 parse error, 3 validation error, 4 convergence failure."
)]
pub struct Cli {
    #[command(flatten)]
    pub tolerances: Tolerances,

    /// Emit machine-readable JSON
    #[arg(long, global = true)]
    pub json: bool,

    /// Write the output to PATH instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Tolerances {
    /// Spectral equivalence tolerance, also the input symmetry tolerance
    #[arg(long, global = true, default_value = "1e-8", value_parser = positive)]
    pub tol: f64,

    /// Relative gap below which probabilities are merged into one block
    #[arg(long, global = true, default_value = "1e-8", value_parser = positive)]
    pub cluster_tol: f64,

    /// Relative singular value threshold for numerical ranks
    #[arg(long, global = true, default_value = "1e-9", value_parser = positive)]
    pub rank_tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical form, moment spectrum and stratum of a state file
    Classify { path: PathBuf },
    /// Decide local unitary equivalence of two state files
    Compare { a: PathBuf, b: PathBuf },
    /// Table of all strata for a particle case and dimension
    Strata {
        #[arg(long)]
        case: ParticleCase,
        #[arg(long, alias = "N")]
        n: usize,
        /// Check each row against the numerical oracle on a sampled representative
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Numerical orbit dimension and degeneracy of a state file
    Oracle { path: PathBuf },
    /// Print a random state file
    Random {
        #[arg(long)]
        case: ParticleCase,
        #[arg(long, alias = "N")]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Three-qubit states with equal moment images in distinct orbits
    Demo,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("tolerance must be positive, got {s}"))
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::ConvergenceFailure { .. } => EXIT_CONVERGENCE,
        _ => EXIT_VALIDATION,
    }
}

/// Parse `args` (including the program name) and run. Normal output goes to
/// `out` unless `--out` is given; diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    execute(&cli, out, err)
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (text, code) = match dispatch(cli) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text),
        None => out.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_PARSE;
    }
    code
}

fn dispatch(cli: &Cli) -> crate::Result<(String, i32)> {
    let tols = cli.tolerances;
    match &cli.command {
        Command::Classify { path } => classify(path, tols, cli.json),
        Command::Compare { a, b } => compare(a, b, tols, cli.json),
        Command::Strata { case, n, verify, seed } => strata(*case, *n, *verify, *seed, tols, cli.json),
        Command::Oracle { path } => oracle(path, tols, cli.json),
        Command::Random { case, n, seed } => {
            let s = random_state(*case, *n, *seed)?;
            Ok((format!("{}\n", io::state_json(&s)), EXIT_OK))
        }
        Command::Demo => {
            let r = counterexample_demo();
            let code = if r.moment_images_equal && r.orbits_distinct { EXIT_OK } else { EXIT_NEGATIVE };
            let text = if cli.json {
                pretty(&io::counterexample_json(&r))
            } else {
                r.render()
            };
            Ok((text, code))
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn fmt_list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| format!("{:.15}", io::round15(*x))).collect();
    format!("[{}]", items.join(", "))
}

fn fmt_d(inv: &OrbitInvariants) -> String {
    let d: Vec<String> = inv.multiplicity.d.iter().map(|x| x.to_string()).collect();
    format!("({})", d.join(","))
}

fn fmt_fiber(inv: &OrbitInvariants) -> String {
    // zero-dimensional factors are points and only clutter the table
    let parts: Vec<String> = inv
        .fiber_factors
        .iter()
        .filter(|f| f.dim() > 0)
        .map(|f| f.to_string())
        .collect();
    if parts.is_empty() {
        "point".to_string()
    } else {
        parts.join(" x ")
    }
}

/// Classification report of a single state as JSON.
pub fn classify_report(state: &crate::states::QuantumState, cluster_tol: f64) -> crate::Result<Value> {
    let cf = canonicalize(state)?;
    let moment = reduced_matrix(state);
    let inv = orbit_invariants(&cf, cluster_tol)?;
    let margin = stratum_margin(&moment.probabilities(), &inv.multiplicity);
    Ok(json!({
        "case": state.case(),
        "n": state.n(),
        "canonical_form": io::canonical_json(&cf),
        "moment": io::moment_json(&moment),
        "stratum": io::stratum_json(&inv),
        "stratum_margin": margin.map(io::round15),
    }))
}

fn classify(path: &Path, tols: Tolerances, as_json: bool) -> crate::Result<(String, i32)> {
    let state = io::read_state_file(path, tols.tol)?;
    let report = classify_report(&state, tols.cluster_tol)?;
    if as_json {
        return Ok((pretty(&report), EXIT_OK));
    }
    let cf = canonicalize(&state)?;
    let moment = reduced_matrix(&state);
    let inv = orbit_invariants(&cf, tols.cluster_tol)?;
    let margin = report["stratum_margin"].as_f64();
    let mut s = String::new();
    s.push_str(&format!("case          {}\nn             {}\n", state.case(), state.n()));
    s.push_str(&format!("lambdas       {}\n", fmt_list(cf.lambdas())));
    s.push_str(&format!("residual      {:.3e}\n", cf.residual()));
    s.push_str(&format!("p             {}\n", fmt_list(&moment.probabilities())));
    s.push_str(&format!("q             {}\n", fmt_list(moment.q_spectrum())));
    s.push_str(&format!(
        "stratum       d = {}{}\n",
        fmt_d(&inv),
        if inv.multiplicity.degenerate { " (degenerate)" } else { "" }
    ));
    if let Some(m) = margin {
        s.push_str(&format!("margin        {m:.3e}\n"));
    }
    s.push_str(&format!("flag dim      {}\n", inv.flag_dim_real));
    s.push_str(&format!("fiber         {} (dim {})\n", fmt_fiber(&inv), inv.fiber_dim));
    s.push_str(&format!("orbit dim     {}\n", inv.orbit_dim));
    s.push_str(&format!("degeneracy D  {}\n", inv.degeneracy_d));
    Ok((s, EXIT_OK))
}

fn compare(a: &Path, b: &Path, tols: Tolerances, as_json: bool) -> crate::Result<(String, i32)> {
    let sa = io::read_state_file(a, tols.tol)?;
    let sb = io::read_state_file(b, tols.tol)?;
    let v = lu_equivalent(&sa, &sb, tols.tol)?;
    let code = if v.equivalent { EXIT_OK } else { EXIT_NEGATIVE };
    if as_json {
        return Ok((pretty(&io::verdict_json(&v)), code));
    }
    let mut s = format!(
        "equivalent         {}\nspectral distance  {:.3e}\n",
        v.equivalent, v.spectral_distance
    );
    if let Some(r) = v.witness_residual {
        s.push_str(&format!("witness residual   {r:.3e}\n"));
    }
    if let Some(g) = &v.witness {
        s.push_str(&format!("witness            {}\n", io::witness_json(g)));
    }
    for w in &v.warnings {
        s.push_str(&format!("warning            {w}\n"));
    }
    Ok((s, code))
}

fn strata(
    case: ParticleCase,
    n: usize,
    verify: bool,
    seed: u64,
    tols: Tolerances,
    as_json: bool,
) -> crate::Result<(String, i32)> {
    let rows = enumerate_strata(case, n)?;
    let checks: Vec<Option<crate::Result<OracleReport>>> = if verify {
        rows.par_iter()
            .enumerate()
            .map(|(i, inv)| {
                Some(
                    sampled_representative(case, &inv.multiplicity, derived_seed(seed, i as u64))
                        .and_then(|s| oracle_check(&s, tols.rank_tol, tols.cluster_tol)),
                )
            })
            .collect()
    } else {
        vec![None; rows.len()]
    };
    let all_agree = checks
        .iter()
        .all(|c| c.as_ref().is_none_or(|r| r.as_ref().is_ok_and(|r| r.agree)));
    let code = if all_agree { EXIT_OK } else { EXIT_NEGATIVE };
    if as_json {
        let items: Vec<Value> = rows
            .iter()
            .zip(&checks)
            .map(|(inv, check)| {
                let mut v = io::stratum_json(inv);
                match check {
                    Some(Ok(r)) => v["oracle"] = io::oracle_json(r),
                    Some(Err(e)) => v["oracle"] = json!({"error": e.to_string()}),
                    None => {}
                }
                v
            })
            .collect();
        let report = json!({"case": case, "n": n, "strata": items});
        return Ok((pretty(&report), code));
    }
    let mut s = format!("{} strata for {case}, N = {n}\n", rows.len());
    s.push_str(&format!(
        "{:<16} {:<5} {:>5} {:>5} {:>6} {:>4}  {:<28}",
        "d", "deg", "flag", "fiber", "orbit", "D", "fiber type"
    ));
    if verify {
        s.push_str("  oracle");
    }
    s.push('\n');
    for (inv, check) in rows.iter().zip(&checks) {
        s.push_str(&format!(
            "{:<16} {:<5} {:>5} {:>5} {:>6} {:>4}  {:<28}",
            fmt_d(inv),
            if inv.multiplicity.degenerate { "yes" } else { "no" },
            inv.flag_dim_real,
            inv.fiber_dim,
            inv.orbit_dim,
            inv.degeneracy_d,
            fmt_fiber(inv)
        ));
        match check {
            Some(Ok(r)) => s.push_str(&format!(
                "  orbit {} D {} {}",
                r.orbit_dim_numeric,
                r.degeneracy_numeric,
                if r.agree { "ok" } else { "MISMATCH" }
            )),
            Some(Err(e)) => s.push_str(&format!("  error: {e}")),
            None => {}
        }
        s.push('\n');
    }
    Ok((s, code))
}

fn oracle(path: &Path, tols: Tolerances, as_json: bool) -> crate::Result<(String, i32)> {
    let state = io::read_state_file(path, tols.tol)?;
    let r = oracle_check(&state, tols.rank_tol, tols.cluster_tol)?;
    let code = if r.agree { EXIT_OK } else { EXIT_NEGATIVE };
    if as_json {
        return Ok((pretty(&io::oracle_json(&r)), code));
    }
    let mut s = format!(
        "orbit dim     numeric {}  formula {}\nsymplectic    numeric {}\ndegeneracy D  numeric {}  formula {}\nagree         {}\nrank tol      {:e}\n",
        r.orbit_dim_numeric,
        r.formula_orbit_dim,
        r.symplectic_rank_numeric,
        r.degeneracy_numeric,
        r.formula_degeneracy,
        r.agree,
        r.rank_tolerance_used
    );
    for d in &r.diagnostics {
        s.push_str(&format!("diagnostic    {d}\n"));
    }
    Ok((s, code))
}
