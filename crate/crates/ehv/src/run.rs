//! Drives a check over seeded draws or a parameter file, and over sweep grids.

use std::time::Instant;

use ehv_core::{Error, VerificationReport, C64};

use crate::checks::{Check, Ctx, Precision, Sampler};
use crate::format;
use crate::params::ParamFile;

pub struct Outcome {
    pub reports: Vec<VerificationReport>,
    /// Draws rejected by the sampler.
    pub rejected: u64,
    /// The error that stopped the run, after the reports produced before it.
    pub error: Option<Error>,
}

impl Outcome {
    pub fn all_pass(&self) -> bool {
        self.error.is_none() && self.reports.iter().all(|r| r.pass)
    }

    /// 0 if everything passed, 1 on a failed check, 2 on bad input.
    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) if is_input_error(e) => 2,
            Some(_) => 1,
            None if self.reports.iter().all(|r| r.pass) => 0,
            None => 1,
        }
    }
}

/// Errors caused by the parameters rather than by the numerics.
pub fn is_input_error(e: &Error) -> bool {
    !matches!(
        e,
        Error::NotConverged { .. } | Error::ResourceLimit { .. } | Error::TruncationFailure { .. } | Error::SingularStep { .. }
    )
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NonConvergent(_) => "non_convergent",
        Error::TruncationFailure { .. } => "truncation_failure",
        Error::DomainError(_) => "domain_error",
        Error::PoleHit { .. } => "pole_hit",
        Error::BalancingViolation { .. } => "balancing_violation",
        Error::NonTerminating => "non_terminating",
        Error::NotConverged { .. } => "not_converged",
        Error::ResourceLimit { .. } => "resource_limit",
        Error::InadmissibleContour { .. } => "inadmissible_contour",
        Error::DomainViolation(_) => "domain_violation",
        Error::UnsupportedFamily(_) => "unsupported_family",
        Error::SingularStep { .. } => "singular_step",
        Error::DegenerateConfiguration(_) => "degenerate_configuration",
        Error::ConstraintViolation(_) => "constraint_violation",
        Error::InvalidParams(_) => "invalid_params",
    }
}

fn settings(ctx: &Ctx, prec: Precision) -> String {
    format!("{}|{:?}|{:?}|{:?}|{:?}", prec.name(), ctx.tol, ctx.nodes, ctx.n, ctx.m)
}

/// Runs one parameter file; reports get the digest of their inputs and the
/// wall time of the evaluation, split evenly among them.
pub fn evaluate(check: &Check, pf: &ParamFile, ctx: &Ctx, prec: Precision) -> Result<Vec<VerificationReport>, Error> {
    let start = Instant::now();
    let mut reports = check.run(pf, ctx, prec)?;
    let ms = start.elapsed().as_secs_f64() * 1e3 / reports.len().max(1) as f64;
    let canon = pf.canonical();
    let set = settings(ctx, prec);
    for r in &mut reports {
        r.runtime_ms = ms;
        r.params_digest = format::digest(&[check.name, &r.name, &set, &canon]);
    }
    Ok(reports)
}

/// `params` if given, else `--draws` (or the check's default) seeded draws.
pub fn verify(check: &Check, params: Option<&ParamFile>, ctx: &Ctx, prec: Precision) -> Outcome {
    let mut out = Outcome { reports: Vec::new(), rejected: 0, error: None };
    let mut nodes = 0u64;
    let mut step = |pf: &ParamFile, suffix: String, out: &mut Outcome| -> bool {
        match evaluate(check, pf, ctx, prec) {
            Ok(rs) => {
                for mut r in rs {
                    nodes += r.nodes;
                    r.name.push_str(&suffix);
                    out.reports.push(r);
                }
                if nodes > ctx.max_nodes {
                    out.error = Some(Error::ResourceLimit { requested: nodes, limit: ctx.max_nodes });
                    return false;
                }
                true
            }
            Err(e) => {
                out.error = Some(e);
                false
            }
        }
    };
    if let Some(pf) = params {
        step(pf, String::new(), &mut out);
        return out;
    }
    let draws = ctx.draws.unwrap_or(check.draws);
    let mut s = Sampler::new(ctx.seed);
    for k in 0..draws {
        s.index = k;
        let pf = match check.sample(&mut s, ctx) {
            Ok(pf) => pf,
            Err(e) => {
                out.error = Some(e);
                break;
            }
        };
        let suffix = if draws > 1 { format!("#{k}") } else { String::new() };
        if !step(&pf, suffix, &mut out) {
            break;
        }
    }
    out.rejected = s.rejected;
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub param: String,
    pub values: Vec<f64>,
}

/// `NAME=START:STOP:COUNT[:lin|:geo]`; the grid sets `|NAME|` and keeps its
/// argument. `|t0|` and `t0` are the same parameter.
pub fn parse_grid(spec: &str) -> Result<Grid, Error> {
    let bad = |m: &str| Error::InvalidParams(format!("grid '{spec}': {m}"));
    let (name, range) = spec.split_once('=').ok_or_else(|| bad("expected NAME=START:STOP:COUNT"))?;
    let name = name.trim().trim_matches('|').to_string();
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() < 3 || parts.len() > 4 || name.is_empty() {
        return Err(bad("expected NAME=START:STOP:COUNT[:lin|geo]"));
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad("bad stop"))?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
    let geo = match parts.get(3).map(|s| s.trim()) {
        None | Some("lin") => false,
        Some("geo") => true,
        Some(_) => return Err(bad("spacing must be lin or geo")),
    };
    if count == 0 {
        return Err(bad("empty grid"));
    }
    if !(start.is_finite() && stop.is_finite()) || (geo && (start <= 0.0 || stop <= 0.0)) {
        return Err(bad("bad range"));
    }
    let at = |k: usize| -> f64 {
        if count == 1 {
            return start;
        }
        let u = k as f64 / (count - 1) as f64;
        if geo {
            start * (stop / start).powf(u)
        } else {
            start + (stop - start) * u
        }
    };
    Ok(Grid { param: name, values: (0..count).map(at).collect() })
}

pub enum SweepLine {
    Report(VerificationReport),
    Error { name: String, error: Error },
}

pub struct Sweep {
    pub lines: Vec<SweepLine>,
    pub rejected: u64,
}

impl Sweep {
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for l in &self.lines {
            match l {
                SweepLine::Report(r) if r.pass => c.0 += 1,
                SweepLine::Report(_) => c.1 += 1,
                SweepLine::Error { .. } => c.2 += 1,
            }
        }
        c
    }

    pub fn exit_code(&self) -> i32 {
        let (_, failed, errors) = self.counts();
        i32::from(failed + errors > 0)
    }

    pub fn summary(&self, check: &str, points: usize) -> String {
        let (passed, failed, errors) = self.counts();
        let total = passed + failed + errors;
        let frac = if total == 0 { 0.0 } else { passed as f64 / total as f64 };
        format!(
            "{{\"summary\":{{\"name\":{},\"points\":{points},\"passed\":{passed},\"failed\":{failed},\"errors\":{errors},\"pass_fraction\":{},\"rejected\":{}}}}}",
            format::string(check),
            format::num(frac),
            self.rejected
        )
    }
}

/// One evaluation per grid value on top of `base`, or on one seeded draw.
/// Failures at a grid point are recorded and the sweep goes on.
pub fn sweep(check: &Check, base: Option<&ParamFile>, grid: &Grid, ctx: &Ctx, prec: Precision) -> Result<Sweep, Error> {
    let mut s = Sampler::new(ctx.seed);
    let base = match base {
        Some(pf) => pf.clone(),
        None => check.sample(&mut s, ctx)?,
    };
    let current = base.get_slot(&grid.param)?;
    let mut lines = Vec::new();
    for &v in &grid.values {
        let arg = if current.norm() > 0.0 { current.arg() } else { 0.0 };
        let mut pf = base.clone();
        pf.set_slot(&grid.param, C64::from_polar(v, arg))?;
        let tag = format!("@{}={}", grid.param, format::num(v));
        match evaluate(check, &pf, ctx, prec) {
            Ok(rs) => lines.extend(rs.into_iter().map(|mut r| {
                r.name.push_str(&tag);
                SweepLine::Report(r)
            })),
            Err(error) => lines.push(SweepLine::Error { name: format!("{}{tag}", check.name), error }),
        }
    }
    Ok(Sweep { lines, rejected: s.rejected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = parse_grid("|t0|=0.1:0.9:5").unwrap();
        assert_eq!(g.param, "t0");
        assert_eq!(g.values.len(), 5);
        assert!((g.values[4] - 0.9).abs() < 1e-15);
        let g = parse_grid("p=1e-4:1e-1:4:geo").unwrap();
        assert!((g.values[1] - 1e-3).abs() < 1e-15);
        assert!(parse_grid("t0=0.1:0.9:0").is_err());
        assert!(parse_grid("t0=0.1:0.9").is_err());
        assert!(parse_grid("t0=0:1:3:geo").is_err());
    }

    #[test]
    fn exit_codes() {
        let ok = VerificationReport::compare("a", C64::new(1.0, 0.0), C64::new(1.0, 0.0), 1e-9, 0);
        let mut out = Outcome { reports: vec![ok.clone()], rejected: 0, error: None };
        assert_eq!(out.exit_code(), 0);
        out.reports.push(VerificationReport::compare("b", C64::new(2.0, 0.0), C64::new(1.0, 0.0), 1e-9, 0));
        assert_eq!(out.exit_code(), 1);
        out.error = Some(Error::NonTerminating);
        assert_eq!(out.exit_code(), 2);
    }
}
