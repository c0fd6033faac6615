//! JSON definition of an IFS:
//!
//! ```json
//! {"dim": 1,
//!  "maps": [{"kind": "similarity", "ratio": 0.333, "isometry": [[1]], "translation": [0]},
//!           {"kind": "expr", "map": "x1/3 + 2/3", "jacobian": "1/3"}],
//!  "bounding_ball": {"center": [0.5], "radius": 0.5}}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::map::{ContractionMap, ExprMap, Similarity};
use super::system::{BoundingBall, IfsSystem};
use crate::error::{Error, Result};
use crate::linalg::identity;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub maps: Vec<MapSpec>,
    pub bounding_ball: BallSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapSpec {
    Similarity {
        ratio: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        isometry: Option<Vec<Vec<f64>>>,
        translation: Vec<f64>,
    },
    Expr {
        map: String,
        jacobian: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl IfsSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidParameter(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn build(&self) -> Result<IfsSystem> {
        let d = self.dim;
        if self.bounding_ball.center.len() != d {
            return Err(Error::InvalidSystem(format!(
                "bounding ball center has {} coordinates, dim is {d}",
                self.bounding_ball.center.len()
            )));
        }
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(i, m)| m.build(d).map_err(|e| locate(e, i)))
            .collect::<Result<Vec<_>>>()?;
        IfsSystem::new(
            maps,
            BoundingBall {
                center: self.bounding_ball.center.clone(),
                radius: self.bounding_ball.radius,
            },
        )
    }
}

impl MapSpec {
    fn build(&self, d: usize) -> Result<ContractionMap> {
        match self {
            MapSpec::Similarity {
                ratio,
                isometry,
                translation,
            } => {
                if translation.len() != d {
                    return Err(Error::InvalidSystem(format!(
                        "translation has {} coordinates, dim is {d}",
                        translation.len()
                    )));
                }
                let iso = match isometry {
                    None => identity(d),
                    Some(rows) => {
                        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                            return Err(Error::InvalidSystem(format!("isometry must be {d}x{d}")));
                        }
                        rows.iter().flatten().copied().collect()
                    }
                };
                Ok(Similarity::new(*ratio, iso, translation.clone())?.into())
            }
            MapSpec::Expr { map, jacobian } => {
                Ok(ContractionMap::generic(ExprMap::parse(d, map, jacobian)?))
            }
        }
    }

    pub fn similarity(s: &Similarity) -> Self {
        let d = s.dim();
        let identity = identity(d);
        MapSpec::Similarity {
            ratio: s.ratio,
            isometry: (s.isometry != identity)
                .then(|| s.isometry.chunks(d).map(<[f64]>::to_vec).collect()),
            translation: s.translation.clone(),
        }
    }
}

fn locate(e: Error, index: usize) -> Error {
    match e {
        Error::Parse {
            line,
            column,
            message,
        } => Error::Parse {
            line,
            column,
            message: format!("maps[{index}]: {message}"),
        },
        Error::NotContraction { norm, .. } => Error::NotContraction {
            index: index + 1,
            norm,
        },
        Error::InvalidSystem(m) => Error::InvalidSystem(format!("maps[{index}]: {m}")),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_definition() {
        let text = r#"{"dim": 1,
            "maps": [{"kind": "similarity", "ratio": 0.3333333333333333, "translation": [0]},
                     {"kind": "expr", "map": "x1/3 + 2/3", "jacobian": "1/3"}],
            "bounding_ball": {"center": [0.5], "radius": 0.5}}"#;
        let spec = IfsSpec::from_json(text).unwrap();
        let s = spec.build().unwrap();
        assert_eq!(s.len(), 2);
        assert!(!s.is_similarity());
    }

    #[test]
    fn json_errors_carry_position() {
        let err = IfsSpec::from_json("{\"dim\": 1,\n \"maps\": [}").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let bad_expr = r#"{"dim": 1, "maps": [{"kind": "expr", "map": "x1 +", "jacobian": "1"},
            {"kind": "expr", "map": "x1", "jacobian": "1"}],
            "bounding_ball": {"center": [0], "radius": 1}}"#;
        let err = IfsSpec::from_json(bad_expr).unwrap().build().unwrap_err();
        assert!(matches!(err, Error::Parse { ref message, .. } if message.starts_with("maps[0]")));
    }

    #[test]
    fn ratio_above_one_is_rejected() {
        let text = r#"{"dim": 1, "maps": [{"kind": "similarity", "ratio": 1.1, "translation": [0]},
            {"kind": "similarity", "ratio": 0.5, "translation": [0.5]}],
            "bounding_ball": {"center": [0.5], "radius": 0.5}}"#;
        let err = IfsSpec::from_json(text).unwrap().build().unwrap_err();
        assert!(matches!(err, Error::NotContraction { index: 1, .. }));
    }
}
