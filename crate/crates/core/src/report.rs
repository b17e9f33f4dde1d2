//! Outcome of a single identity check.

use alloc::string::String;

use crate::cx::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub name: String,
    pub lhs: C64,
    pub rhs: C64,
    pub abs_err: f64,
    /// `abs_err` over the comparison scale, `|rhs|` unless stated otherwise.
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
    pub nodes: u64,
    pub runtime_ms: f64,
    pub params_digest: String,
}

impl VerificationReport {
    /// Compares two sides relative to `|rhs|`, or absolutely when `rhs = 0`.
    pub fn compare(name: &str, lhs: C64, rhs: C64, tol: f64, nodes: u64) -> Self {
        let scale = rhs.norm();
        Self::with_scale(name, lhs, rhs, scale, tol, nodes)
    }

    /// Compares two sides relative to an explicit scale, such as the largest
    /// term of a sum that cancels.
    pub fn with_scale(name: &str, lhs: C64, rhs: C64, scale: f64, tol: f64, nodes: u64) -> Self {
        let abs_err = (lhs - rhs).norm();
        let rel_err = if scale > 0.0 { abs_err / scale } else { abs_err };
        VerificationReport {
            name: name.into(),
            lhs,
            rhs,
            abs_err,
            rel_err,
            tol,
            pass: rel_err.is_finite() && rel_err <= tol,
            nodes,
            runtime_ms: 0.0,
            params_digest: String::new(),
        }
    }

    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_never_exceeds_tol() {
        let r = VerificationReport::compare("x", C64::new(1.0, 0.0), C64::new(1.0 + 1e-9, 0.0), 1e-10, 0);
        assert!(!r.pass);
        let r = VerificationReport::compare("x", C64::new(1e-20, 0.0), C64::new(0.0, 0.0), 1e-12, 0);
        assert!(r.pass);
        let r = VerificationReport::compare("x", C64::new(f64::NAN, 0.0), C64::new(1.0, 0.0), 1.0, 0);
        assert!(!r.pass);
    }
}
