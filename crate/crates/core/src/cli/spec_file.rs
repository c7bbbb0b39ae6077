//! JSON chain descriptions and the built-in presets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foundation::{frac, inv_pow3, pow2, render, Rational};
use crate::foundation::{is_unit, parse_rational};
use crate::nullsets::{Caps, Generator, LevelChain, Stream};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default)]
    pub levels: Vec<LevelSpec>,
    #[serde(default)]
    pub stream: Option<StreamSpec>,
    #[serde(default)]
    pub densify: bool,
    #[serde(default)]
    pub caps: CapsSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSpec {
    #[serde(default)]
    pub points: Vec<String>,
    #[serde(default)]
    pub cantors: Vec<CantorSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorSpec {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamSpec {
    pub kind: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapsSpec {
    pub stream_level_cap: u32,
    pub scan_depth_cap: u32,
}

impl Default for CapsSpec {
    fn default() -> Self {
        let caps = Caps::default();
        CapsSpec { stream_level_cap: caps.stream_level_cap, scan_depth_cap: caps.scan_depth_cap }
    }
}

fn spec_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Spec { field: field.into(), message: message.into() }
}

fn unit_rational(field: &str, s: &str) -> Result<Rational> {
    let q = parse_rational(s).map_err(|_| spec_err(field, format!("not a rational literal: {s:?}")))?;
    if !is_unit(&q) {
        return Err(spec_err(field, format!("{s} lies outside [0, 1]")));
    }
    Ok(q)
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            spec_err(format!("line {}, column {}", e.line(), e.column()), e.to_string())
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Validates every field and builds the chain.
    pub fn to_chain(&self) -> Result<LevelChain> {
        let mut levels = Vec::with_capacity(self.levels.len());
        for (i, level) in self.levels.iter().enumerate() {
            let mut gens = Vec::new();
            for (j, p) in level.points.iter().enumerate() {
                gens.push(Generator::Point(unit_rational(&format!("levels[{i}].points[{j}]"), p)?));
            }
            for (j, c) in level.cantors.iter().enumerate() {
                let a = unit_rational(&format!("levels[{i}].cantors[{j}].a"), &c.a)?;
                let b = unit_rational(&format!("levels[{i}].cantors[{j}].b"), &c.b)?;
                if a >= b {
                    return Err(spec_err(format!("levels[{i}].cantors[{j}]"), "requires a < b"));
                }
                gens.push(Generator::AffineCantor { a, b });
            }
            levels.push(gens);
        }
        let stream = match self.stream.as_ref().map(|s| s.kind.as_str()) {
            None | Some("none") => None,
            Some("rationals") => Some(Stream::Rationals),
            Some(other) => {
                return Err(spec_err("stream.kind", format!("expected \"rationals\" or \"none\", got {other:?}")))
            }
        };
        if self.caps.stream_level_cap == 0 {
            return Err(spec_err("caps.stream_level_cap", "must be at least 1"));
        }
        if !(1..=40).contains(&self.caps.scan_depth_cap) {
            return Err(spec_err("caps.scan_depth_cap", "must lie in 1..=40"));
        }
        let caps = Caps {
            stream_level_cap: self.caps.stream_level_cap,
            scan_depth_cap: self.caps.scan_depth_cap,
        };
        if levels.is_empty() && stream.is_none() && !self.densify {
            return Err(spec_err("levels", "no levels, no stream and no densify: M is empty"));
        }
        LevelChain::new(levels, stream, self.densify, caps).map_err(|e| match e {
            Error::MissingEndpoints => spec_err("levels[0]", "level 1 must contain both 0 and 1"),
            other => spec_err("levels", other.to_string()),
        })
    }
}

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub spec: SpecFile,
}

fn level(points: &[Rational], cantors: &[(Rational, Rational)]) -> LevelSpec {
    LevelSpec {
        points: points.iter().map(render).collect(),
        cantors: cantors
            .iter()
            .map(|(a, b)| CantorSpec { a: render(a), b: render(b) })
            .collect(),
    }
}

fn finite(levels: Vec<LevelSpec>) -> SpecFile {
    SpecFile { levels, stream: None, densify: false, caps: CapsSpec::default() }
}

pub fn presets() -> Vec<Preset> {
    let endpoints = level(&[frac(0, 1), frac(1, 1)], &[]);
    let mut cantor_levels = vec![
        endpoints.clone(),
        level(&[], &[(frac(0, 1), frac(1, 1)), (frac(1, 2), frac(1, 2) + inv_pow3(2))]),
    ];
    for n in 3..=8u32 {
        let a = pow2(1 - i64::from(n));
        let b = &a + inv_pow3(n);
        cantor_levels.push(level(&[], &[(a, b)]));
    }
    vec![
        Preset {
            name: "endpoints",
            description: "F1 = {0, 1} only",
            spec: finite(vec![endpoints.clone()]),
        },
        Preset {
            name: "midpoint",
            description: "F1 = {0, 1}, F2 adds 1/2",
            spec: finite(vec![endpoints.clone(), level(&[frac(1, 2)], &[])]),
        },
        Preset {
            name: "cantor-chain",
            description: "F1 = {0, 1}; F2 adds the ternary Cantor set and a copy on [1/2, 11/18]; \
                          Fn (n = 3..8) adds a copy on [2^(1-n), 2^(1-n) + 3^-n]",
            spec: finite(cantor_levels),
        },
        Preset {
            name: "rationals-dense",
            description: "stream: Fn = all rationals in [0, 1] with denominator <= 2n - 1",
            spec: SpecFile {
                levels: vec![],
                stream: Some(StreamSpec { kind: "rationals".into() }),
                densify: false,
                caps: CapsSpec::default(),
            },
        },
    ]
}

pub fn preset(name: &str) -> Option<SpecFile> {
    presets().into_iter().find(|p| p.name == name).map(|p| p.spec)
}

/// A preset name or a path to a JSON spec file.
pub fn load(spec: &str) -> Result<SpecFile> {
    if let Some(p) = preset(spec) {
        return Ok(p);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| spec_err("--spec", format!("{spec:?} is neither a preset nor a readable file: {e}")))?;
    SpecFile::from_json(&text)
}
