//! Fixed-order, fixed-format JSON output.

use ehv_core::{VerificationReport, C64};
use sha2::{Digest, Sha256};

/// 17 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        "null".into()
    } else if x == 0.0 {
        "0.0".into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn pair(z: C64) -> String {
    format!("[{},{}]", num(z.re), num(z.im))
}

pub fn string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

pub fn value(z: C64) -> String {
    format!("{{\"re\":{},\"im\":{}}}", num(z.re), num(z.im))
}

pub fn report(r: &VerificationReport) -> String {
    format!(
        "{{\"name\":{},\"lhs\":{},\"rhs\":{},\"abs_err\":{},\"rel_err\":{},\"tol\":{},\"pass\":{},\"nodes\":{},\"runtime_ms\":{},\"params_digest\":{}}}",
        string(&r.name),
        pair(r.lhs),
        pair(r.rhs),
        num(r.abs_err),
        num(r.rel_err),
        num(r.tol),
        r.pass,
        r.nodes,
        num(r.runtime_ms),
        string(&r.params_digest)
    )
}

pub fn report_text(r: &VerificationReport) -> String {
    format!(
        "{} {}  rel_err {:.3e}  tol {:.1e}  nodes {}  {:.1} ms",
        if r.pass { "PASS" } else { "FAIL" },
        r.name,
        r.rel_err,
        r.tol,
        r.nodes,
        r.runtime_ms
    )
}

pub fn error(kind: &str, msg: &str) -> String {
    format!("{{\"error\":{},\"kind\":{}}}", string(msg), string(kind))
}

pub fn digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    format!("{:x}", h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.0), "0.0");
        assert_eq!(num(-0.0), "0.0");
        assert_eq!(num(f64::NAN), "null");
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.5e-300), "-2.5000000000000000e-300");
        let x = 0.1 + 0.2;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn report_field_order() {
        let mut r = VerificationReport::compare("x", C64::new(1.0, 0.0), C64::new(1.0, 0.0), 1e-12, 4);
        r.params_digest = digest(&["a"]);
        let s = report(&r);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["pass"], true);
        let keys = ["name", "lhs", "rhs", "abs_err", "rel_err", "tol", "pass", "nodes", "runtime_ms", "params_digest"];
        let mut at = 0;
        for k in keys {
            let i = s.find(&format!("\"{k}\"")).unwrap();
            assert!(i >= at);
            at = i;
        }
    }
}
