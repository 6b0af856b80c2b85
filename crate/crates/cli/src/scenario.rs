//! Scenario files: a model, a list of check ids and optional overrides.

use std::sync::OnceLock;

use num_complex::Complex64;
use pso_core::models::NonlocalCase;
use regex::Regex;
use serde::{de, Deserialize, Deserializer};

use crate::checks::CheckId;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub model: ModelSpec,
    pub checks: Vec<CheckId>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub extension: Option<ExtensionSpec>,
    /// Seed for randomized checks.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    0
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Momentum {
        #[serde(default = "one")]
        m: usize,
    },
    Nonlocal {
        case: NonlocalCase,
        #[serde(deserialize_with = "complex")]
        alpha: Complex64,
    },
    Shift {
        d: usize,
        #[serde(default = "minus_one", deserialize_with = "complex")]
        twist: Complex64,
    },
    Haar {
        j_range: [i32; 2],
        k_range: [i32; 2],
    },
}

fn one() -> usize {
    1
}

fn minus_one() -> Complex64 {
    Complex64::new(-1.0, 0.0)
}

impl ModelSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::Momentum { .. } => "momentum",
            ModelSpec::Nonlocal { .. } => "nonlocal",
            ModelSpec::Shift { .. } => "shift",
            ModelSpec::Haar { .. } => "haar",
        }
    }

    /// Command-line shorthand: `momentum[:m]`, `nonlocal:<I|II>:<alpha>`.
    pub fn parse_short(text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            ["momentum"] => Ok(ModelSpec::Momentum { m: 1 }),
            ["momentum", m] => m
                .parse()
                .map(|m| ModelSpec::Momentum { m })
                .map_err(|_| format!("bad defect dimension {m:?}")),
            ["nonlocal", case, alpha] => {
                let case = match *case {
                    "I" => NonlocalCase::I,
                    "II" => NonlocalCase::II,
                    other => return Err(format!("unknown nonlocal case {other:?}")),
                };
                Ok(ModelSpec::Nonlocal {
                    case,
                    alpha: parse_complex(alpha)?,
                })
            }
            _ => Err(format!(
                "cannot read model {text:?}; expected momentum[:m] or nonlocal:<I|II>:<alpha>"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// Extension `T Gamma_+ f = Gamma_- f` for the spectrum check; `theta`
/// optionally supplies the constant characteristic function.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSpec {
    #[serde(deserialize_with = "complex_matrix")]
    pub t: Vec<Vec<Complex64>>,
    #[serde(default, deserialize_with = "optional_complex_matrix")]
    pub theta: Option<Vec<Vec<Complex64>>>,
}

fn grammar() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        let dec = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?";
        Regex::new(&format!(
            r"^(?:(?P<re>[+-]?{dec})(?P<im>[+-]{dec})i|(?P<only_im>[+-]?{dec})i|(?P<only_re>[+-]?{dec}))$"
        ))
        .expect("static pattern")
    })
}

/// Parses `a`, `bi` or `a+bi` (either sign) with decimal literals and a
/// mandatory `i` on the imaginary part.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let caps = grammar()
        .captures(text)
        .ok_or_else(|| format!("invalid complex literal {text:?}; expected a, bi or a+bi"))?;
    let num = |name: &str| {
        caps.name(name)
            .map(|m| m.as_str().parse::<f64>().expect("grammar-checked"))
    };
    let value = match (num("re"), num("im"), num("only_im"), num("only_re")) {
        (Some(a), Some(b), _, _) => Complex64::new(a, b),
        (_, _, Some(b), _) => Complex64::new(0.0, b),
        (_, _, _, Some(a)) => Complex64::new(a, 0.0),
        _ => unreachable!("one alternative matched"),
    };
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(format!("complex literal {text:?} overflows"));
    }
    Ok(value)
}

fn complex<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    let s = String::deserialize(d)?;
    parse_complex(&s).map_err(de::Error::custom)
}

fn complex_matrix<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Complex64>>, D::Error> {
    let rows = Vec::<Vec<String>>::deserialize(d)?;
    let out = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| parse_complex(s))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(de::Error::custom)?;
    let n = out.len();
    if n == 0 || out.iter().any(|r| r.len() != n) {
        return Err(de::Error::custom("matrix must be square and nonempty"));
    }
    Ok(out)
}

fn optional_complex_matrix<'de, D: Deserializer<'de>>(
    d: D,
) -> Result<Option<Vec<Vec<Complex64>>>, D::Error> {
    complex_matrix(d).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_grammar_accepts() {
        let cases = [
            ("4i", (0.0, 4.0)),
            ("1", (1.0, 0.0)),
            ("-1", (-1.0, 0.0)),
            ("3-1i", (3.0, -1.0)),
            ("+0.5+2.25i", (0.5, 2.25)),
            ("1e-3-2E2i", (1e-3, -200.0)),
            ("-.5i", (0.0, -0.5)),
        ];
        for (text, (re, im)) in cases {
            assert_eq!(
                parse_complex(text).unwrap(),
                Complex64::new(re, im),
                "{text}"
            );
        }
    }

    #[test]
    fn complex_grammar_rejects() {
        for text in [
            "i", "-i", "1+i", "2j", "1 + 2i", "", "1+2", "i4", "1.2.3", "nan", "inf", "1e400",
        ] {
            assert!(parse_complex(text).is_err(), "{text}");
        }
    }

    #[test]
    fn scenario_parses() {
        let s: Scenario = serde_json::from_str(
            r#"{"name": "x", "model": {"type": "nonlocal", "case": "I", "alpha": "4i"}, "checks": ["constancy"]}"#,
        )
        .unwrap();
        assert_eq!(
            s.model,
            ModelSpec::Nonlocal {
                case: NonlocalCase::I,
                alpha: Complex64::new(0.0, 4.0)
            }
        );
    }

    #[test]
    fn unknown_check_is_rejected_with_position() {
        let err = serde_json::from_str::<Scenario>(
            r#"{"name": "x", "model": {"type": "momentum"}, "checks": ["nope"]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("column"), "{err}");
    }

    #[test]
    fn short_model_specs() {
        assert_eq!(
            ModelSpec::parse_short("momentum:2").unwrap(),
            ModelSpec::Momentum { m: 2 }
        );
        assert!(ModelSpec::parse_short("nonlocal:III:1").is_err());
        assert!(ModelSpec::parse_short("shift:8").is_err());
    }
}
