//! The state mini-language: `family:key=value,key=value`.
//!
//! ```text
//! noon:N=4            NOON state with N photons
//! twin:n=2            |n, n> at the input ports
//! cs:alpha=2,r=1      coherent light and squeezed vacuum
//! pairs:r=1.5         two squeezed vacua
//! numcoh:n=1,alpha=2  coherent light in port 1, |n> in port 2
//! file:PATH           sectors from a JSON state file
//! ```

use std::fmt;
use std::path::PathBuf;

use pathsym_core::{states, MultiSectorState};

use crate::config::Settings;
use crate::error::CliError;
use crate::statefile;

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Noon { n: u32 },
    Twin { n: u32 },
    SqueezedCoherent { alpha: f64, r: f64 },
    Pairs { r: f64 },
    NumberCoherent { n: u32, alpha: f64 },
    File(PathBuf),
}

/// A parse failure at byte offset `position` of the input.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}", self.render())]
pub struct SpecError {
    pub input: String,
    pub position: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl SpecError {
    fn render(&self) -> String {
        let mut out = format!("invalid state spec at column {}: {}", self.position + 1, self.message);
        if !self.expected.is_empty() {
            out.push_str(&format!("; expected {}", self.expected.join(" or ")));
        }
        out.push_str(&format!("\n  {}\n  {}^", self.input, " ".repeat(self.position)));
        out
    }
}

const FAMILIES: [&str; 6] = ["noon", "twin", "cs", "pairs", "numcoh", "file"];

fn keys_for(family: &str) -> &'static [&'static str] {
    match family {
        "noon" => &["N"],
        "twin" => &["n"],
        "cs" => &["alpha", "r"],
        "pairs" => &["r"],
        "numcoh" => &["n", "alpha"],
        _ => &[],
    }
}

struct Field<'a> {
    key: &'a str,
    value: &'a str,
    value_at: usize,
}

struct Parser<'a> {
    input: &'a str,
}

impl<'a> Parser<'a> {
    fn error(&self, position: usize, message: impl Into<String>, expected: &[&str]) -> SpecError {
        SpecError {
            input: self.input.to_string(),
            position,
            message: message.into(),
            expected: expected.iter().map(|s| format!("`{s}`")).collect(),
        }
    }

    fn fields(&self, body: &'a str, offset: usize, keys: &[&str]) -> Result<Vec<Field<'a>>, SpecError> {
        let mut out: Vec<Field<'a>> = Vec::new();
        let mut at = offset;
        for item in body.split(',') {
            let Some(eq) = item.find('=') else {
                let position = at + item.len();
                return Err(if item.is_empty() {
                    self.error(at, "missing key", keys)
                } else {
                    self.error(position, "missing value", &["="])
                });
            };
            let (key, value) = (&item[..eq], &item[eq + 1..]);
            if !keys.contains(&key) {
                let message = if key.is_empty() {
                    "missing key".to_string()
                } else {
                    format!("unknown key `{key}`")
                };
                return Err(self.error(at, message, keys));
            }
            if out.iter().any(|f| f.key == key) {
                return Err(self.error(at, format!("duplicate key `{key}`"), &[]));
            }
            out.push(Field {
                key,
                value,
                value_at: at + eq + 1,
            });
            at += item.len() + 1;
        }
        if let Some(missing) = keys.iter().find(|k| !out.iter().any(|f| f.key == **k)) {
            return Err(self.error(
                self.input.len(),
                format!("missing key `{missing}`"),
                &[&format!(",{missing}=")],
            ));
        }
        Ok(out)
    }

    fn real(&self, fields: &[Field], key: &str) -> Result<f64, SpecError> {
        let f = fields.iter().find(|f| f.key == key).expect("keys were checked");
        match f.value.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.error(f.value_at, format!("`{}` is not a finite number", f.value), &["number"])),
        }
    }

    fn count(&self, fields: &[Field], key: &str) -> Result<u32, SpecError> {
        let f = fields.iter().find(|f| f.key == key).expect("keys were checked");
        f.value.parse::<u32>().map_err(|_| {
            self.error(f.value_at, format!("`{}` is not a non-negative integer", f.value), &["integer"])
        })
    }

    fn value_at(fields: &[Field], key: &str) -> usize {
        fields.iter().find(|f| f.key == key).map_or(0, |f| f.value_at)
    }

    fn parse(&self) -> Result<StateSpec, SpecError> {
        let text = self.input;
        let Some(colon) = text.find(':') else {
            let expected: Vec<&str> = FAMILIES.to_vec();
            let message = if FAMILIES.contains(&text) {
                "missing `:` after family"
            } else {
                "unknown state family"
            };
            return Err(self.error(0, message, &expected));
        };
        let (family, body) = (&text[..colon], &text[colon + 1..]);
        if !FAMILIES.contains(&family) {
            return Err(self.error(0, format!("unknown state family `{family}`"), &FAMILIES));
        }
        if family == "file" {
            if body.is_empty() {
                return Err(self.error(colon + 1, "missing file path", &["path"]));
            }
            return Ok(StateSpec::File(PathBuf::from(body)));
        }
        let fields = self.fields(body, colon + 1, keys_for(family))?;
        let spec = match family {
            "noon" => {
                let n = self.count(&fields, "N")?;
                if n == 0 {
                    let at = fields[0].value_at;
                    return Err(self.error(at, "a NOON state needs at least one photon", &["N >= 1"]));
                }
                StateSpec::Noon { n }
            }
            "twin" => StateSpec::Twin {
                n: self.count(&fields, "n")?,
            },
            "cs" => {
                let r = self.real(&fields, "r")?;
                if r < 0.0 {
                    return Err(self.error(Self::value_at(&fields, "r"), "squeezing must be non-negative", &["r >= 0"]));
                }
                StateSpec::SqueezedCoherent {
                    alpha: self.real(&fields, "alpha")?,
                    r,
                }
            }
            "pairs" => {
                let r = self.real(&fields, "r")?;
                if r <= 0.0 {
                    return Err(self.error(Self::value_at(&fields, "r"), "squeezing must be positive", &["r > 0"]));
                }
                StateSpec::Pairs { r }
            }
            "numcoh" => StateSpec::NumberCoherent {
                n: self.count(&fields, "n")?,
                alpha: self.real(&fields, "alpha")?,
            },
            _ => unreachable!("family list is closed"),
        };
        Ok(spec)
    }
}

impl std::str::FromStr for StateSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser { input: s.trim() }.parse()
    }
}

/// Canonical form: fixed key order, shortest round-trip numbers.
impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Noon { n } => write!(f, "noon:N={n}"),
            Self::Twin { n } => write!(f, "twin:n={n}"),
            Self::SqueezedCoherent { alpha, r } => write!(f, "cs:alpha={alpha},r={r}"),
            Self::Pairs { r } => write!(f, "pairs:r={r}"),
            Self::NumberCoherent { n, alpha } => write!(f, "numcoh:n={n},alpha={alpha}"),
            Self::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

impl StateSpec {
    pub fn build(&self, settings: &Settings) -> Result<MultiSectorState, CliError> {
        let trunc = settings.truncation();
        let state = match self {
            Self::Noon { n } => MultiSectorState::single(states::noon(*n)?),
            Self::Twin { n } => states::twin_fock(*n as usize),
            Self::SqueezedCoherent { alpha, r } => states::squeezed_coherent(*alpha, *r, &trunc)?,
            Self::Pairs { r } => states::pair_state(*r, &trunc)?,
            Self::NumberCoherent { n, alpha } => states::number_coherent(*n as usize, *alpha, &trunc)?,
            Self::File(path) => statefile::load(path)?,
        };
        Ok(state)
    }
}
