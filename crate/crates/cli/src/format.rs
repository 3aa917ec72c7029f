//! File formats: pmf JSON in and out, fixed-width float text.

use std::fs;
use std::path::Path;

use beamsplit_core::pmf::geometric_pmf;
use beamsplit_core::{GeometricSpec, Pmf, Tail, DEFAULT_TAIL_TOLERANCE};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Float text with 17 significant digits; non-finite values become strings.
pub fn float_text(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

/// A float that serializes as a 17-digit JSON number, or as the string
/// `"+inf"`, `"-inf"` or `"nan"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw =
                RawValue::from_string(float_text(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_str(&float_text(self.0))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitDoc {
    pmf: Vec<f64>,
    #[serde(default = "default_tolerance")]
    tail_tolerance: f64,
    #[serde(default)]
    tail: Option<String>,
    #[serde(default)]
    tail_mean: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    family: String,
    mean: f64,
    #[serde(default = "default_tolerance")]
    truncation_epsilon: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TAIL_TOLERANCE
}

/// A pmf file as read, with the digest of its bytes.
#[derive(Debug, Clone)]
pub struct LoadedPmf {
    pub pmf: Pmf,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads `{"pmf": [...], "tail_tolerance": t}` or
/// `{"family": "geometric", "mean": m, "truncation_epsilon": e}`.
pub fn read_pmf(path: &Path) -> Result<LoadedPmf> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let format_error = |message: String| CliError::Format {
        path: path.to_path_buf(),
        message,
    };
    let value: Value = serde_json::from_slice(&bytes).map_err(|e| format_error(e.to_string()))?;
    let pmf = if value.get("family").is_some() {
        let doc: FamilyDoc =
            serde_json::from_value(value).map_err(|e| format_error(e.to_string()))?;
        if doc.family != "geometric" {
            return Err(format_error(format!("unknown family {:?}", doc.family)));
        }
        geometric_pmf(&GeometricSpec::new(doc.mean, doc.truncation_epsilon))?
    } else if value.get("pmf").is_some() {
        let doc: ExplicitDoc =
            serde_json::from_value(value).map_err(|e| format_error(e.to_string()))?;
        let tail = match (doc.tail.as_deref(), doc.tail_mean) {
            (None | Some("finite"), None) => Tail::Finite,
            (Some("truncated"), None) => Tail::Truncated,
            (Some("geometric"), Some(mean)) => Tail::Geometric { mean },
            _ => {
                return Err(format_error(
                    "tail must be \"finite\", \"truncated\", or \"geometric\" with tail_mean"
                        .into(),
                ))
            }
        };
        Pmf::with_tail(doc.pmf, doc.tail_tolerance, tail)?
    } else {
        return Err(format_error(
            "expected a \"pmf\" array or a \"family\" object".into(),
        ));
    };
    Ok(LoadedPmf {
        pmf,
        sha256: sha256_hex(&bytes),
    })
}

#[derive(Serialize)]
struct PmfOut<'a> {
    pmf: Vec<Num>,
    tail_tolerance: Num,
    tail: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail_mean: Option<Num>,
}

/// Pmf JSON that [`read_pmf`] accepts back unchanged.
pub fn pmf_json(p: &Pmf) -> String {
    let (tail, tail_mean) = match p.tail() {
        Tail::Finite => ("finite", None),
        Tail::Truncated => ("truncated", None),
        Tail::Geometric { mean } => ("geometric", Some(Num(mean))),
    };
    let doc = PmfOut {
        pmf: p.probs().iter().map(|&v| Num(v)).collect(),
        tail_tolerance: Num(p.tail_tolerance()),
        tail,
        tail_mean,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("pmf serializes");
    text.push('\n');
    text
}

/// Writes to `path`, or to standard output when it is absent.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_text_has_17_digits() {
        assert_eq!(float_text(0.5), "5.0000000000000000e-1");
        assert_eq!(float_text(0.1), "1.0000000000000001e-1");
        assert_eq!(float_text(f64::INFINITY), "+inf");
        assert_eq!(float_text(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn num_serializes_as_number_or_string() {
        let v = vec![Num(0.25), Num(f64::INFINITY)];
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"[2.5000000000000000e-1,"+inf"]"#
        );
    }
}
