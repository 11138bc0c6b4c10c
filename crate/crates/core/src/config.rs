//! Run configuration: TOML documents and built-in presets.
//!
//! A document names its scenario with `kind` and lists that scenario's
//! parameters at the top level, with `source`, `slab`, `pml` and `pulse`
//! sub-tables. Unknown keys are rejected. Example:
//!
//! ```toml
//! kind = "mimetic1d"
//! snapshot_every = 50
//! m = 200
//! k = 2
//! dz = 0.01
//! dt = 1.6666666666666667e-11
//! steps = 500
//! eps0 = 8.85419e-12
//!
//! [source]
//! index = 4
//! frequency = 700000000.0
//! amplitude = 1.0
//!
//! [slab]
//! start = 99
//! eps_r = 4.0
//! sigma = 0.04
//! ```

use std::path::PathBuf;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::maxwell1d::{self, Scenario1D};
use crate::maxwell2d::{self, Scenario2D};
use crate::yee::HClosure;

pub const PRESETS: [&str; 5] = [
    "sullivan-1d",
    "sullivan-1d-free",
    "sullivan-1d-yee",
    "sullivan-2d-upml",
    "sullivan-2d-pml-oracle",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Grad,
    Div,
    Lap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpsDump {
    pub k: u32,
    pub m: usize,
    pub dx: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dy: Option<f64>,
    pub dump: OperatorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Yee1D {
        scenario: Scenario1D,
        closure: HClosure,
    },
    Mimetic1D(Scenario1D),
    Mimetic2D(Scenario2D),
    OpsDump(OpsDump),
    /// Damped run compared with an undamped domain `factor` times larger.
    PmlOracle {
        scenario: Scenario2D,
        factor: usize,
    },
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Yee1D { .. } => "yee1d",
            Scenario::Mimetic1D(_) => "mimetic1d",
            Scenario::Mimetic2D(_) => "mimetic2d",
            Scenario::OpsDump(_) => "ops-dump",
            Scenario::PmlOracle { .. } => "pml-oracle",
        }
    }

    fn default_snapshot_every(&self) -> usize {
        match self {
            Scenario::Yee1D { .. } | Scenario::Mimetic1D(_) => maxwell1d::SNAPSHOT_EVERY,
            Scenario::Mimetic2D(_) | Scenario::PmlOracle { .. } => maxwell2d::SNAPSHOT_EVERY,
            Scenario::OpsDump(_) => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub snapshot_every: usize,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            snapshot_every: scenario.default_snapshot_every(),
            scenario,
            out: None,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        let scenario = match name {
            "sullivan-1d" => Scenario::Mimetic1D(Scenario1D::sullivan()),
            "sullivan-1d-free" => Scenario::Mimetic1D(Scenario1D::sullivan_free_space()),
            "sullivan-1d-yee" => Scenario::Yee1D {
                scenario: Scenario1D::sullivan(),
                closure: HClosure::OneSided,
            },
            "sullivan-2d-upml" => Scenario::Mimetic2D(Scenario2D::sullivan_upml()),
            "sullivan-2d-pml-oracle" => Scenario::PmlOracle {
                scenario: Scenario2D::sullivan_upml(),
                factor: 3,
            },
            other => return Err(Error::UnknownPreset(other.to_string())),
        };
        Ok(Self::new(scenario))
    }

    /// Checks every parameter before anything is stepped.
    pub fn validate(&self) -> Result<()> {
        if self.snapshot_every == 0 {
            return Err(Error::validation("snapshot_every", "must be at least 1"));
        }
        match &self.scenario {
            Scenario::Yee1D { scenario, .. } | Scenario::Mimetic1D(scenario) => {
                scenario.validate()?;
                maxwell1d::material_vectors(scenario).map(|_| ())
            }
            Scenario::Mimetic2D(s) => s.validate(),
            Scenario::PmlOracle { scenario, factor } => {
                if *factor < 3 || factor.is_multiple_of(2) {
                    return Err(Error::validation("factor", "must be an odd integer >= 3"));
                }
                if scenario.pml.is_none() {
                    return Err(Error::validation("pml", "required for pml-oracle"));
                }
                scenario.validate()
            }
            Scenario::OpsDump(ops) => {
                crate::grid::OperatorOrder::new(ops.k)?;
                crate::grid::StaggeredGrid1D::new(ops.m, ops.dx)?;
                match (ops.n, ops.dy) {
                    (Some(n), dy) => crate::grid::StaggeredGrid1D::new(n, dy.unwrap_or(ops.dx)).map(|_| ()),
                    (None, None) => Ok(()),
                    (None, Some(_)) => Err(Error::validation("dy", "given without n")),
                }
            }
        }
    }

    pub fn render(&self) -> String {
        let (mut table, extra): (Table, Option<(&str, Value)>) = match &self.scenario {
            Scenario::Yee1D { scenario, closure } => {
                let name = match closure {
                    HClosure::TwoPoint => "two-point",
                    HClosure::OneSided => "one-sided",
                };
                (to_table(scenario), Some(("closure", Value::String(name.into()))))
            }
            Scenario::Mimetic1D(s) => (to_table(s), None),
            Scenario::Mimetic2D(s) => (to_table(s), None),
            Scenario::OpsDump(o) => (to_table(o), None),
            Scenario::PmlOracle { scenario, factor } => {
                (to_table(scenario), Some(("factor", Value::Integer(*factor as i64))))
            }
        };
        let mut doc = Table::new();
        doc.insert("kind".into(), Value::String(self.scenario.kind().into()));
        doc.insert("snapshot_every".into(), Value::Integer(self.snapshot_every as i64));
        if let Some(out) = &self.out {
            doc.insert("out".into(), Value::String(out.display().to_string()));
        }
        if let Some((k, v)) = extra {
            doc.insert(k.into(), v);
        }
        // scalars first so the sub-tables follow them
        let (scalars, tables): (Vec<_>, Vec<_>) =
            std::mem::take(&mut table).into_iter().partition(|(_, v)| !v.is_table());
        doc.extend(scalars);
        doc.extend(tables);
        toml::to_string(&doc).expect("config tables serialize")
    }
}

fn to_table<T: Serialize>(value: &T) -> Table {
    match Value::try_from(value).expect("scenario types serialize to TOML") {
        Value::Table(t) => t,
        _ => unreachable!("scenario types are structs"),
    }
}

fn from_table<T: DeserializeOwned>(table: Table) -> Result<T> {
    Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))
}

fn take_usize(table: &mut Table, key: &str) -> Result<Option<usize>> {
    match table.remove(key) {
        None => Ok(None),
        Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as usize)),
        Some(other) => Err(Error::validation(
            key,
            format!("expected a non-negative integer, got {other}"),
        )),
    }
}

fn take_string(table: &mut Table, key: &str) -> Result<Option<String>> {
    match table.remove(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(Error::validation(key, format!("expected a string, got {other}"))),
    }
}

/// Parses and validates a TOML run document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    let kind = take_string(&mut table, "kind")?.ok_or_else(|| Error::validation("kind", "missing"))?;
    let snapshot_every = take_usize(&mut table, "snapshot_every")?;
    let out = take_string(&mut table, "out")?.map(PathBuf::from);

    let scenario = match kind.as_str() {
        "yee1d" => {
            let closure = match take_string(&mut table, "closure")?.as_deref() {
                None | Some("two-point") => HClosure::TwoPoint,
                Some("one-sided") => HClosure::OneSided,
                Some(other) => {
                    return Err(Error::validation(
                        "closure",
                        format!("{other:?} is not one of \"two-point\", \"one-sided\""),
                    ))
                }
            };
            Scenario::Yee1D {
                scenario: from_table(table)?,
                closure,
            }
        }
        "mimetic1d" => Scenario::Mimetic1D(from_table(table)?),
        "mimetic2d" => Scenario::Mimetic2D(from_table(table)?),
        "ops-dump" => Scenario::OpsDump(from_table(table)?),
        "pml-oracle" => {
            let factor = take_usize(&mut table, "factor")?.unwrap_or(3);
            Scenario::PmlOracle {
                scenario: from_table(table)?,
                factor,
            }
        }
        other => {
            return Err(Error::validation(
                "kind",
                format!("{other:?} is not one of yee1d, mimetic1d, mimetic2d, ops-dump, pml-oracle"),
            ))
        }
    };
    let mut config = RunConfig::new(scenario);
    if let Some(every) = snapshot_every {
        config.snapshot_every = every;
    }
    config.out = out;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_resolve() {
        for name in PRESETS {
            let c = RunConfig::preset(name).unwrap();
            c.validate().unwrap();
        }
        let c = RunConfig::preset("sullivan-1d").unwrap();
        assert_eq!(c.scenario, Scenario::Mimetic1D(Scenario1D::sullivan()));
        assert_eq!(c.snapshot_every, 50);
        let c = RunConfig::preset("sullivan-2d-upml").unwrap();
        assert_eq!(c.scenario, Scenario::Mimetic2D(Scenario2D::sullivan_upml()));
        assert_eq!(c.snapshot_every, 70);
        assert!(matches!(RunConfig::preset("nope"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn presets_round_trip() {
        for name in PRESETS {
            let c = RunConfig::preset(name).unwrap();
            assert_eq!(parse_config(&c.render()).unwrap(), c, "{name}");
        }
    }

    #[test]
    fn module_doc_example_parses() {
        let text = r#"
kind = "mimetic1d"
snapshot_every = 50
m = 200
k = 2
dz = 0.01
dt = 1.6666666666666667e-11
steps = 500
eps0 = 8.85419e-12

[source]
index = 4
frequency = 700000000.0
amplitude = 1.0

[slab]
start = 99
eps_r = 4.0
sigma = 0.04
"#;
        let c = parse_config(text).unwrap();
        assert_eq!(c.scenario, Scenario::Mimetic1D(Scenario1D::sullivan()));
    }

    #[test]
    fn negative_cell_count_is_rejected() {
        let text = RunConfig::preset("sullivan-1d")
            .unwrap()
            .render()
            .replace("m = 200", "m = -200");
        assert!(parse_config(&text).unwrap_err().is_config_error());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = RunConfig::preset("sullivan-2d-upml").unwrap().render() + "\ncolour = 3\n";
        assert!(parse_config(&text).is_err());
        let text = RunConfig::preset("sullivan-2d-upml")
            .unwrap()
            .render()
            .replace("sigma_max", "sigma_mx");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("sigma_mx"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_config("kind = \"mimetic1d\"\nm = = 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn validation_names_the_field() {
        let text = RunConfig::preset("sullivan-1d")
            .unwrap()
            .render()
            .replace("index = 4", "index = 0");
        let err = parse_config(&text).unwrap_err();
        assert!(
            matches!(err, Error::Validation { ref field, .. } if field == "source.index"),
            "{err}"
        );
        let text = RunConfig::preset("sullivan-1d")
            .unwrap()
            .render()
            .replace("kind = \"mimetic1d\"", "kind = \"fdtd3d\"");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn ops_dump_document() {
        let c = parse_config("kind = \"ops-dump\"\nk = 2\nm = 4\ndx = 1.0\ndump = \"grad\"\n").unwrap();
        assert_eq!(
            c.scenario,
            Scenario::OpsDump(OpsDump {
                k: 2,
                m: 4,
                dx: 1.0,
                n: None,
                dy: None,
                dump: OperatorKind::Grad
            })
        );
        assert!(parse_config("kind = \"ops-dump\"\nk = 4\nm = 4\ndx = 1.0\ndump = \"grad\"\n").is_err());
        assert!(parse_config("kind = \"ops-dump\"\nk = 2\nm = 4\ndx = 1.0\ndump = \"curl\"\n").is_err());
    }
}
