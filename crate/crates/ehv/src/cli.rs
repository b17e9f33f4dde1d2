//! Argument parsing and the three subcommands.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use ehv_core::{Dd, Error, C64};

use crate::checks::{self, Ctx, Precision, REGISTRY};
use crate::eval::{self, EvalArgs};
use crate::exec::Threads;
use crate::format;
use crate::params::ParamFile;
use crate::run::{self, error_kind, is_input_error, SweepLine};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Eval,
    Verify,
    Sweep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Std,
    Extended,
}

#[derive(Parser, Debug)]
#[command(name = "ehv", version, about = "Evaluate and verify theta hypergeometric identities")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Function for eval, registry check for verify and sweep; `verify list` prints the registry.
    pub name: String,
    /// JSON parameter file {q, p, t, f, s, extras}.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixed nodes per dimension (no doubling).
    #[arg(long)]
    pub nodes: Option<usize>,
    /// JSON-lines output.
    #[arg(long)]
    pub json: bool,
    #[arg(long, value_enum)]
    pub precision: Option<PrecisionArg>,
    /// Rank, order or first index, depending on the check.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<i64>,
    /// Second index.
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of seeded draws.
    #[arg(long)]
    pub draws: Option<usize>,
    /// Sweep grid NAME=START:STOP:COUNT[:lin|geo] over |NAME|.
    #[arg(long)]
    pub grid: Option<String>,
    /// Sweep output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Complex values as `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub z: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub q: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub p: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub u: Option<C64>,
}

pub fn parse_complex(s: &str) -> Result<C64, String> {
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("bad number '{x}'"));
    match s.split_once(',') {
        Some((re, im)) => Ok(C64::new(num(re)?, num(im)?)),
        None => Ok(C64::new(num(s)?, 0.0)),
    }
}

/// Output and environment of one invocation.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
    /// `EHV_MAX_NODES`.
    pub max_nodes: Option<String>,
    /// Zeroes `runtime_ms` so repeated runs are byte-identical.
    pub fixed_time: bool,
    pub threads: Threads,
}

impl Io<'_> {
    pub fn from_env<'a>(out: &'a mut dyn Write, err: &'a mut dyn Write) -> Io<'a> {
        Io {
            out,
            err,
            max_nodes: std::env::var("EHV_MAX_NODES").ok(),
            fixed_time: std::env::var("EHV_FIXED_TIME").is_ok_and(|v| !v.is_empty() && v != "0"),
            threads: Threads::from_env(),
        }
    }
}

fn fail(io: &mut Io, e: &Error) -> i32 {
    let _ = writeln!(io.err, "{}", format::error(error_kind(e), &e.to_string()));
    if is_input_error(e) {
        2
    } else {
        1
    }
}

fn bad_input(io: &mut Io, msg: &str) -> i32 {
    fail(io, &Error::InvalidParams(msg.into()))
}

pub fn run<I, T>(args: I, io: &mut Io) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(io.out, "{text}") } else { write!(io.err, "{text}") };
            return code;
        }
    };
    let params = match &cli.params {
        Some(path) => match ParamFile::load(path) {
            Ok(pf) => Some(pf),
            Err(e) => return fail(io, &e),
        },
        None => None,
    };
    match cli.command {
        Command::Eval => cmd_eval(&cli, params, io),
        Command::Verify | Command::Sweep => {
            let ctx = match context(&cli, io) {
                Ok(c) => c,
                Err(e) => return fail(io, &e),
            };
            if cli.command == Command::Verify {
                cmd_verify(&cli, params, &ctx, io)
            } else {
                cmd_sweep(&cli, params, &ctx, io)
            }
        }
    }
}

fn context(cli: &Cli, io: &Io) -> Result<Ctx, Error> {
    let bad = |m: String| Error::InvalidParams(m);
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err(bad(format!("tolerance must be positive, got {t}")));
        }
    }
    let n = match cli.n {
        Some(n) if n < 0 => return Err(bad(format!("n must be non-negative, got {n}"))),
        n => n.map(|n| n as usize),
    };
    let max_nodes = match &io.max_nodes {
        Some(s) => s.trim().parse().map_err(|_| bad(format!("EHV_MAX_NODES: bad value '{s}'")))?,
        None => ehv_core::quadrature::DEFAULT_MAX_NODES,
    };
    Ok(Ctx { seed: cli.seed, tol: cli.tol, nodes: cli.nodes, n, m: cli.m, draws: cli.draws, max_nodes, exec: io.threads })
}

fn precision(cli: &Cli, default: Precision) -> Precision {
    match cli.precision {
        Some(PrecisionArg::Std) => Precision::Std,
        Some(PrecisionArg::Extended) => Precision::Extended,
        None => default,
    }
}

fn cmd_eval(cli: &Cli, params: Option<ParamFile>, io: &mut Io) -> i32 {
    if !eval::FUNCTIONS.contains(&cli.name.as_str()) {
        return bad_input(io, &format!("unknown function {}; one of {}", cli.name, eval::FUNCTIONS.join(", ")));
    }
    let args = EvalArgs { z: cli.z, q: cli.q, p: cli.p, u: cli.u, n: cli.n, params };
    let v = match precision(cli, Precision::Std) {
        Precision::Std => eval::eval::<f64>(&cli.name, &args),
        Precision::Extended => eval::eval::<Dd>(&cli.name, &args),
    };
    match v {
        Ok(v) => {
            let _ = writeln!(io.out, "{}", format::value(v));
            0
        }
        Err(e) => fail(io, &e),
    }
}

fn finish(r: &mut ehv_core::VerificationReport, io: &Io) {
    if io.fixed_time {
        r.runtime_ms = 0.0;
    }
}

fn cmd_verify(cli: &Cli, params: Option<ParamFile>, ctx: &Ctx, io: &mut Io) -> i32 {
    if cli.name == "list" {
        for c in REGISTRY.iter() {
            let _ = writeln!(io.out, "{:<16} {}", c.name, c.about);
        }
        return 0;
    }
    let Some(check) = checks::find(&cli.name) else {
        return bad_input(io, &format!("unknown check {}; see `ehv verify list`", cli.name));
    };
    let mut outcome = run::verify(check, params.as_ref(), ctx, precision(cli, check.precision));
    for r in &mut outcome.reports {
        finish(r, io);
        let line = if cli.json { format::report(r) } else { format::report_text(r) };
        let _ = writeln!(io.out, "{line}");
    }
    if outcome.rejected > 0 {
        let _ = if cli.json {
            writeln!(io.err, "{{\"note\":\"rejected draws\",\"name\":{},\"count\":{}}}", format::string(check.name), outcome.rejected)
        } else {
            writeln!(io.err, "{}: {} draws rejected as inadmissible", check.name, outcome.rejected)
        };
    }
    if let Some(e) = &outcome.error {
        fail(io, e);
    }
    outcome.exit_code()
}

fn cmd_sweep(cli: &Cli, params: Option<ParamFile>, ctx: &Ctx, io: &mut Io) -> i32 {
    let Some(check) = checks::find(&cli.name) else {
        return bad_input(io, &format!("unknown check {}; see `ehv verify list`", cli.name));
    };
    let Some(spec) = &cli.grid else {
        return bad_input(io, "sweep needs --grid NAME=START:STOP:COUNT[:lin|geo]");
    };
    let grid = match run::parse_grid(spec) {
        Ok(g) => g,
        Err(e) => return fail(io, &e),
    };
    let sw = match run::sweep(check, params.as_ref(), &grid, ctx, precision(cli, check.precision)) {
        Ok(s) => s,
        Err(e) => return fail(io, &e),
    };
    let mut text = String::new();
    for line in &sw.lines {
        match line {
            SweepLine::Report(r) => {
                let mut r = r.clone();
                finish(&mut r, io);
                text.push_str(&format::report(&r));
            }
            SweepLine::Error { name, error } => text.push_str(&format!(
                "{{\"name\":{},\"error\":{},\"kind\":{}}}",
                format::string(name),
                format::string(&error.to_string()),
                format::string(error_kind(error))
            )),
        }
        text.push('\n');
    }
    text.push_str(&sw.summary(check.name, grid.values.len()));
    text.push('\n');
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => io.out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        return bad_input(io, &e);
    }
    sw.exit_code()
}
