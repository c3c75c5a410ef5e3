//! The JSON run report written by every CLI command.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::genfn::ProbeConfig;

pub const SCHEMA: u32 = 1;
pub const TOOL: &str = "overlap";

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub grid_n: usize,
    pub tol: f64,
    pub seed: u64,
    pub probe: ProbeConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// `sha256:<hex>` of the input spec file, when there is one.
    pub input_digest: Option<String>,
    pub config: RunConfig,
    pub results: Value,
    pub exit_code: i32,
    pub timing_ms: u64,
}

impl RunReport {
    pub fn new(command: &str, config: RunConfig) -> Self {
        RunReport {
            schema: SCHEMA,
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            input_digest: None,
            config,
            results: Value::Object(Default::default()),
            exit_code: 0,
            timing_ms: 0,
        }
    }

    /// Sets `results[key]`.
    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.results.as_object_mut().expect("results is an object").insert(key.to_string(), v);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// C's `%.17g`.
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-4..17).contains(&exp) {
        trim(&format!("{:.*}", (16 - exp) as usize, v))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (0.5, "0.5"),
            (1.0, "1"),
            (-0.0, "0"),
            (1.0 / 3.0, "0.33333333333333331"),
            (0.1, "0.10000000000000001"),
            (1e-5, "1.0000000000000001e-05"),
            (123456.0, "123456"),
            (1e17, "1e+17"),
            (2.5e-300, "2.5e-300"),
            (-2.0, "-2"),
            (0.0001, "0.0001"),
        ];
        for (v, want) in cases {
            assert_eq!(fmt_g17(v), want, "{v:e}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for v in [0.1, 0.7, 1.0 / 7.0, 0.999999999, 3e-10, 12345.678] {
            assert_eq!(fmt_g17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn digest_format() {
        assert_eq!(digest(b"abc"), "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
