//! JSON parameter files: `{q, p, t, f, s, extras}` with complex numbers as
//! `[re, im]` pairs (a bare number is read as real).

use std::collections::BTreeMap;
use std::path::Path;

use ehv_core::cx::{lift, Cx};
use ehv_core::{Error, Moduli, Real, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Pair([f64; 2]),
    Real(f64),
}

impl Num {
    pub fn c64(self) -> C64 {
        match self {
            Num::Pair([re, im]) => C64::new(re, im),
            Num::Real(re) => C64::new(re, 0.0),
        }
    }
}

impl From<C64> for Num {
    fn from(z: C64) -> Self {
        Num::Pair([z.re, z.im])
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Num>,
    #[serde(default)]
    pub t: Vec<Num>,
    #[serde(default)]
    pub f: Vec<Num>,
    #[serde(default)]
    pub s: Vec<Num>,
    #[serde(default)]
    pub extras: BTreeMap<String, Value>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

fn num_of(v: &Value) -> Option<C64> {
    serde_json::from_value::<Num>(v.clone()).ok().map(Num::c64)
}

impl ParamFile {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| bad(format!("parameter file: {e}")))
    }

    /// Canonical serialization: every number as a pair, `extras` keys sorted.
    pub fn canonical(&self) -> String {
        let pair = |z: &Num| Num::from(z.c64());
        let norm = ParamFile {
            q: self.q.as_ref().map(pair),
            p: self.p.as_ref().map(pair),
            t: self.t.iter().map(pair).collect(),
            f: self.f.iter().map(pair).collect(),
            s: self.s.iter().map(pair).collect(),
            extras: self.extras.clone(),
        };
        serde_json::to_string(&norm).expect("parameter file serializes")
    }

    pub fn moduli<T: Real>(&self, q: C64, p: C64) -> Result<Moduli<T>, Error> {
        let q = self.q.map_or(q, Num::c64);
        let p = self.p.map_or(p, Num::c64);
        Moduli::new(lift(q), lift(p))
    }

    pub fn set_moduli(&mut self, q: C64, p: C64) {
        self.q = Some(q.into());
        self.p = Some(p.into());
    }

    pub fn list<T: Real>(&self, key: &str) -> Result<Vec<Cx<T>>, Error> {
        let v: &[Num] = match key {
            "t" => &self.t,
            "f" => &self.f,
            "s" => &self.s,
            _ => {
                return match self.extras.get(key) {
                    None => Ok(Vec::new()),
                    Some(Value::Array(a)) if a.iter().all(|x| x.is_array()) => a
                        .iter()
                        .map(|x| num_of(x).map(lift).ok_or_else(|| bad(format!("extras.{key}: bad complex number"))))
                        .collect(),
                    Some(_) => Err(bad(format!("extras.{key} must be a list of [re, im] pairs"))),
                };
            }
        };
        Ok(v.iter().map(|z| lift(z.c64())).collect())
    }

    /// List of exactly `n` entries.
    pub fn exact<T: Real>(&self, key: &str, n: usize) -> Result<Vec<Cx<T>>, Error> {
        let v = self.list(key)?;
        if v.len() != n {
            return Err(bad(format!("{key} needs {n} entries, got {}", v.len())));
        }
        Ok(v)
    }

    pub fn extra_c<T: Real>(&self, key: &str) -> Result<Option<Cx<T>>, Error> {
        match self.extras.get(key) {
            None => Ok(None),
            Some(v) => num_of(v).map(|z| Some(lift(z))).ok_or_else(|| bad(format!("extras.{key}: bad complex number"))),
        }
    }

    pub fn need_c<T: Real>(&self, key: &str) -> Result<Cx<T>, Error> {
        self.extra_c(key)?.ok_or_else(|| bad(format!("missing extras.{key}")))
    }

    pub fn extra_usize(&self, key: &str) -> Result<Option<usize>, Error> {
        match self.extras.get(key) {
            None => Ok(None),
            Some(v) => v.as_u64().map(|n| Some(n as usize)).ok_or_else(|| bad(format!("extras.{key} must be a non-negative integer"))),
        }
    }

    pub fn extra_usizes(&self, key: &str) -> Result<Option<Vec<usize>>, Error> {
        match self.extras.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .map(|x| x.as_u64().map(|n| n as usize))
                .collect::<Option<Vec<_>>>()
                .map(Some)
                .ok_or_else(|| bad(format!("extras.{key} must hold non-negative integers"))),
            Some(_) => Err(bad(format!("extras.{key} must be a list"))),
        }
    }

    pub fn put_c(&mut self, key: &str, z: C64) {
        self.extras.insert(key.into(), serde_json::json!([z.re, z.im]));
    }

    pub fn put_list(&mut self, key: &str, zs: &[C64]) {
        let v: Vec<Value> = zs.iter().map(|z| serde_json::json!([z.re, z.im])).collect();
        self.extras.insert(key.into(), Value::Array(v));
    }

    pub fn put_usize(&mut self, key: &str, n: usize) {
        self.extras.insert(key.into(), Value::from(n));
    }

    /// One complex parameter by name: `q`, `p`, `t0`, `f2`, `extras.t`.
    pub fn get_slot(&self, name: &str) -> Result<C64, Error> {
        let missing = || bad(format!("no parameter {name}"));
        match name {
            "q" => self.q.map(Num::c64).ok_or_else(missing),
            "p" => self.p.map(Num::c64).ok_or_else(missing),
            _ => {
                if let Some(key) = name.strip_prefix("extras.") {
                    return self.extra_c::<f64>(key)?.ok_or_else(missing);
                }
                let (list, idx) = split_indexed(name).ok_or_else(missing)?;
                let v = match list {
                    "t" => &self.t,
                    "f" => &self.f,
                    _ => &self.s,
                };
                v.get(idx).map(|z| z.c64()).ok_or_else(missing)
            }
        }
    }

    pub fn set_slot(&mut self, name: &str, z: C64) -> Result<(), Error> {
        self.get_slot(name)?;
        match name {
            "q" => self.q = Some(z.into()),
            "p" => self.p = Some(z.into()),
            _ => {
                if let Some(key) = name.strip_prefix("extras.") {
                    self.put_c(key, z);
                    return Ok(());
                }
                let (list, idx) = split_indexed(name).unwrap();
                let v = match list {
                    "t" => &mut self.t,
                    "f" => &mut self.f,
                    _ => &mut self.s,
                };
                v[idx] = z.into();
            }
        }
        Ok(())
    }
}

fn split_indexed(name: &str) -> Option<(&str, usize)> {
    let list = ["t", "f", "s"].into_iter().find(|l| name.starts_with(l))?;
    let idx = name[list.len()..].parse().ok()?;
    Some((list, idx))
}

pub fn nums(zs: &[C64]) -> Vec<Num> {
    zs.iter().map(|&z| z.into()).collect()
}
