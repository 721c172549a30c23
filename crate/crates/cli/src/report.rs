use serde::Serialize;
use serde_json::Value;

use entanglia::locc::MajTable;
use entanglia::majorize::MAJ_TOL;
use entanglia::numkernel::{HERM_TOL, PSD_CLAMP, RESID_TOL};
use entanglia::witness::PPT_TOL;

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub herm: f64,
    pub resid: f64,
    pub psd_clamp: f64,
    pub maj: f64,
    pub ppt: f64,
}

impl Tolerances {
    pub fn current() -> Self {
        Tolerances { herm: HERM_TOL, resid: RESID_TOL, psd_clamp: PSD_CLAMP, maj: MAJ_TOL, ppt: PPT_TOL }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub result: Value,
}

/// Human text and structured payload of one command.
pub struct Outcome {
    pub human: String,
    pub data: Value,
}

impl Outcome {
    pub fn new(human: String, data: impl Serialize) -> Self {
        Outcome { human, data: serde_json::to_value(data).expect("serializable report") }
    }
}

/// Six significant digits, trailing zeros dropped.
pub fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        return format!("{x:.5e}");
    }
    let s = format!("{:.*}", (5 - exp).max(0) as usize, x);
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn sig_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| sig(*x)).collect();
    format!("({})", parts.join(", "))
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Partial-sum table of a majorization check.
pub fn table(t: &MajTable) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:>3}  {:>10}  {:>10}  {:>10}  {:>10}  ok\n", "k", "source", "target", "sum src", "sum tgt"));
    for k in 0..t.source.len() {
        let ok = t.source_partial[k] <= t.target_partial[k] + MAJ_TOL;
        out.push_str(&format!(
            "{:>3}  {:>10}  {:>10}  {:>10}  {:>10}  {}\n",
            k + 1,
            sig(t.source[k]),
            sig(t.target[k]),
            sig(t.source_partial[k]),
            sig(t.target_partial[k]),
            if ok { "yes" } else { "NO" }
        ));
    }
    out.push_str(&format!("source -> target: {}", yes_no(t.holds)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig(0.6), "0.6");
        assert_eq!(sig(1.0 / 3.0), "0.333333");
        assert_eq!(sig(1.52192809), "1.52193");
        assert_eq!(sig(123456.7), "123457");
        assert_eq!(sig(1234567.8), "1.23457e6");
        assert_eq!(sig(-0.125), "-0.125");
        assert_eq!(sig(2.0e-7), "2.00000e-7");
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(-1e-20), "-1.00000e-20");
    }
}
