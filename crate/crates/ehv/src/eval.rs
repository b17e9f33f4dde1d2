//! Single function values for `ehv eval`.

use ehv_core::cx::{lift, lower, Cx};
use ehv_core::gamma::{double_sine, elliptic_gamma, modified_gamma_g, QuasiPeriods};
use ehv_core::integrands::{delta, Family, IntegrandSpec, ParamSet};
use ehv_core::series::{sum_v, VSpec};
use ehv_core::special::{qpochhammer, theta, theta_factorial};
use ehv_core::{Error, Moduli, Real, TruncationPolicy, C64};

use crate::params::ParamFile;

pub const FUNCTIONS: [&str; 16] = [
    "theta",
    "theta_factorial",
    "qpochhammer",
    "gamma",
    "G",
    "S",
    "sum_V",
    "delta_e",
    "delta_cn1",
    "delta_cn2",
    "delta_cn3",
    "delta_an1",
    "delta_an2",
    "delta_an3",
    "delta_vwp",
    "delta_minus_a",
];

/// Inline values take precedence over the parameter file.
#[derive(Clone, Debug, Default)]
pub struct EvalArgs {
    pub z: Option<C64>,
    pub q: Option<C64>,
    pub p: Option<C64>,
    pub u: Option<C64>,
    pub n: Option<i64>,
    pub params: Option<ParamFile>,
}

fn missing(what: &str) -> Error {
    Error::InvalidParams(format!("missing {what}"))
}

impl EvalArgs {
    fn file(&self) -> ParamFile {
        self.params.clone().unwrap_or_default()
    }

    fn scalar<T: Real>(&self, inline: Option<C64>, key: &str) -> Result<Cx<T>, Error> {
        if let Some(z) = inline {
            return Ok(lift(z));
        }
        let pf = self.file();
        let from_file = match key {
            "q" => pf.q.map(|v| v.c64()),
            "p" => pf.p.map(|v| v.c64()),
            _ => pf.extra_c::<f64>(key)?,
        };
        from_file.map(lift).ok_or_else(|| missing(key))
    }

    fn moduli<T: Real>(&self) -> Result<Moduli<T>, Error> {
        Moduli::new(self.scalar(self.q, "q")?, self.scalar(self.p, "p")?)
    }

    fn omega<T: Real>(&self, k: &str) -> Result<Cx<T>, Error> {
        self.file().extra_c::<T>(k)?.ok_or_else(|| missing(&format!("extras.{k}")))
    }
}

fn family(name: &str) -> Option<Family> {
    Some(match name {
        "delta_e" => Family::E,
        "delta_cn1" => Family::CnI,
        "delta_cn2" => Family::CnII,
        "delta_cn3" => Family::CnIII,
        "delta_an1" => Family::AnI,
        "delta_an2" => Family::AnII,
        "delta_an3" => Family::AnIII,
        "delta_vwp" => Family::GenericVwp,
        "delta_minus_a" => Family::MinusA,
        _ => return None,
    })
}

pub fn eval<T: Real>(name: &str, a: &EvalArgs) -> Result<C64, Error> {
    let pol = TruncationPolicy::for_real::<T>();
    let v: Cx<T> = match name {
        "theta" => theta(a.scalar(a.z, "z")?, a.scalar(a.p, "p")?)?,
        "theta_factorial" => {
            let n = a.n.ok_or_else(|| missing("n"))?;
            theta_factorial(a.scalar(a.z, "z")?, a.scalar(a.p, "p")?, a.scalar(a.q, "q")?, n)?
        }
        "qpochhammer" => qpochhammer(a.scalar(a.z, "z")?, a.scalar(a.q, "q")?, pol)?,
        "gamma" => elliptic_gamma(a.scalar(a.z, "z")?, &a.moduli()?, pol)?,
        "G" => {
            let w = QuasiPeriods::new(a.omega("omega1")?, a.omega("omega2")?, a.omega("omega3")?);
            modified_gamma_g(a.scalar(a.u, "u")?, &w)?
        }
        "S" => double_sine(a.scalar(a.u, "u")?, a.omega("omega1")?, a.omega("omega2")?)?,
        "sum_V" => {
            let pf = a.file();
            let x = pf.extra_c::<T>("x")?.unwrap_or(Cx::new(T::one(), T::zero()));
            let spec = VSpec::new(pf.need_c("t0")?, pf.list("t")?, x, a.moduli()?)?;
            sum_v(&spec)?
        }
        _ => {
            let fam = family(name).ok_or_else(|| Error::InvalidParams(format!("unknown function {name}")))?;
            let pf = a.file();
            let params = ParamSet {
                t: pf.list("t")?,
                f: pf.list("f")?,
                s: pf.list("s")?,
                x: pf.list("x")?,
                tt: pf.extra_c("t")?,
                ss: pf.extra_c("s")?,
                rho: pf.extra_c("rho")?,
                gamma: pf.extra_c("gamma")?,
                m: pf.extra_usize("m")?,
            };
            let mut z: Vec<Cx<T>> = pf.list("z")?;
            if let Some(zi) = a.z {
                z = vec![lift(zi)];
            }
            let n = a.n.map(|n| n as usize).or(pf.extra_usize("n")?).unwrap_or(z.len().max(1));
            if z.is_empty() {
                return Err(missing("z"));
            }
            delta(&IntegrandSpec { family: fam, n, params, moduli: a.moduli()? }, &z)?
        }
    };
    Ok(lower(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_zero_at_one() {
        let a = EvalArgs { z: Some(C64::new(1.0, 0.0)), p: Some(C64::new(0.3, 0.0)), ..Default::default() };
        assert_eq!(eval::<f64>("theta", &a).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn non_terminating_sum() {
        let pf = ParamFile::parse(r#"{"q":[0.3,0],"p":[0.2,0],"t":[[0.5,0],[0.6,0],[0.7,0],[0.8,0],[0.4,0]],"extras":{"t0":[0.9,0]}}"#).unwrap();
        let a = EvalArgs { params: Some(pf), ..Default::default() };
        assert_eq!(eval::<f64>("sum_V", &a), Err(Error::NonTerminating));
    }

    #[test]
    fn unknown_function() {
        assert!(matches!(eval::<f64>("zeta", &EvalArgs::default()), Err(Error::InvalidParams(_))));
    }
}
