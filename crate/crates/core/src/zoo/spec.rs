use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::partition::FiniteSystem;
use crate::perm::Permutation;
use crate::scalar::{format_rational, parse_rational, Rational};

use super::{bernoulli_system, iet_system, odometer_system, rotation_system, IetSpec};

/// Addressable zoo member, e.g. `rot:k=13,s=5`, `odo:m=4`, `bern:d=2,L=3`,
/// `iet:perm=2,0,1`, `skew:alpha=1/7`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemSpec {
    Rotation { k: usize, s: usize },
    Odometer { m: u32 },
    Bernoulli { d: usize, len: usize },
    Iet { permutation: Permutation },
    /// `(x, y, z) ↦ (x + α, x + y, x + y + z)` on the 3-torus; not a finite system.
    Skew { alpha: Rational },
}

impl SystemSpec {
    /// The finite system, or an error for the skew product.
    pub fn build(&self) -> Result<FiniteSystem> {
        match self {
            Self::Rotation { k, s } => rotation_system(*k, *s),
            Self::Odometer { m } => odometer_system(*m),
            Self::Bernoulli { d, len } => bernoulli_system(*d, *len),
            Self::Iet { permutation } => iet_system(&IetSpec::new(permutation.clone())?),
            Self::Skew { .. } => Err(Error::InvalidParameter(
                "skew products act on rotation parameters, not on a finite partition".into(),
            )),
        }
    }
}

fn parse_fields(kind: &str, body: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    if kind == "iet" {
        let perm = body
            .strip_prefix("perm=")
            .ok_or_else(|| Error::Parse(format!("expected iet:perm=…, got iet:{body}")))?;
        out.insert("perm".to_string(), perm.to_string());
        return Ok(out);
    }
    for part in body.split(',').filter(|p| !p.trim().is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value in {part:?}")))?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn take<T: FromStr>(fields: &mut BTreeMap<String, String>, key: &str, spec: &str) -> Result<T> {
    let raw = fields
        .remove(key)
        .ok_or_else(|| Error::Parse(format!("{spec:?} is missing {key}")))?;
    raw.parse()
        .map_err(|_| Error::Parse(format!("{spec:?}: cannot parse {key}={raw}")))
}

impl FromStr for SystemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("system spec {s:?} needs the form kind:params")))?;
        let mut fields = parse_fields(kind, body)?;
        let spec = match kind {
            "rot" => Self::Rotation {
                k: take(&mut fields, "k", s)?,
                s: take(&mut fields, "s", s)?,
            },
            "odo" => Self::Odometer {
                m: take(&mut fields, "m", s)?,
            },
            "bern" => Self::Bernoulli {
                d: take(&mut fields, "d", s)?,
                len: take(&mut fields, "L", s)?,
            },
            "iet" => {
                let raw = fields.remove("perm").unwrap_or_default();
                let images = raw
                    .split(',')
                    .map(|x| x.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::Parse(format!("{s:?}: bad permutation {raw:?}")))?;
                Self::Iet {
                    permutation: Permutation::new(images)?,
                }
            }
            "skew" => {
                let raw = fields
                    .remove("alpha")
                    .ok_or_else(|| Error::Parse(format!("{s:?} is missing alpha")))?;
                Self::Skew {
                    alpha: parse_rational(&raw)?,
                }
            }
            other => return Err(Error::Parse(format!("unknown system kind {other:?}"))),
        };
        if let Some(extra) = fields.keys().next() {
            return Err(Error::Parse(format!("{s:?}: unexpected parameter {extra}")));
        }
        Ok(spec)
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rotation { k, s } => write!(f, "rot:k={k},s={s}"),
            Self::Odometer { m } => write!(f, "odo:m={m}"),
            Self::Bernoulli { d, len } => write!(f, "bern:d={d},L={len}"),
            Self::Iet { permutation } => {
                let parts: Vec<String> = permutation.as_slice().iter().map(usize::to_string).collect();
                write!(f, "iet:perm={}", parts.join(","))
            }
            Self::Skew { alpha } => write!(f, "skew:alpha={}", format_rational(alpha)),
        }
    }
}
