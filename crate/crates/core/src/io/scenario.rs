//! JSON scenario files: network, flux model and run configuration.
//!
//! The schema lives in `schema/scenario.schema.json` at the repository root.
//! Unknown fields are rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flux_model::FluxModel;
use crate::junction::DistributionMatrix;
use crate::network::{Arc, ArcKind, BoundaryCondition, CoefficientMode, Junction, Network, Sink};
use crate::simulator::SimConfig;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },
    #[error("invalid network:\n  {}", .0.join("\n  "))]
    Network(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcKindSpec {
    ExternalIn,
    ExternalOut,
    Circle,
    Generic,
}

impl From<ArcKindSpec> for ArcKind {
    fn from(k: ArcKindSpec) -> Self {
        match k {
            ArcKindSpec::ExternalIn => ArcKind::ExternalIn,
            ArcKindSpec::ExternalOut => ArcKind::ExternalOut,
            ArcKindSpec::Circle => ArcKind::Circle,
            ArcKindSpec::Generic => ArcKind::Generic,
        }
    }
}

impl From<ArcKind> for ArcKindSpec {
    fn from(k: ArcKind) -> Self {
        match k {
            ArcKind::ExternalIn => ArcKindSpec::ExternalIn,
            ArcKind::ExternalOut => ArcKindSpec::ExternalOut,
            ArcKind::Circle => ArcKindSpec::Circle,
            ArcKind::Generic => ArcKindSpec::Generic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSpec {
    #[default]
    Static,
    Dynamic,
}

impl From<ModeSpec> for CoefficientMode {
    fn from(m: ModeSpec) -> Self {
        match m {
            ModeSpec::Static => CoefficientMode::Static,
            ModeSpec::Dynamic => CoefficientMode::Dynamic,
        }
    }
}

impl From<CoefficientMode> for ModeSpec {
    fn from(m: CoefficientMode) -> Self {
        match m {
            CoefficientMode::Static => ModeSpec::Static,
            CoefficientMode::Dynamic => ModeSpec::Dynamic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub v_max: f64,
    pub rho_max: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            v_max: 1.0,
            rho_max: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSpec {
    pub id: String,
    pub a: f64,
    pub b: f64,
    pub cells: usize,
    #[serde(default = "generic")]
    pub kind: ArcKindSpec,
}

fn generic() -> ArcKindSpec {
    ArcKindSpec::Generic
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JunctionSpec {
    pub id: String,
    pub incoming: Vec<String>,
    pub outgoing: Vec<String>,
    /// One row per outgoing arc, one entry per incoming arc.
    pub distribution: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority: Option<Vec<f64>>,
    #[serde(default)]
    pub coefficients: ModeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub arc: String,
    pub density: f64,
    #[serde(default)]
    pub tracer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinkSpec {
    pub arc: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigSpec {
    pub cfl: f64,
    pub t_end: f64,
    pub sample_interval: f64,
    pub equilibrium_window: f64,
    pub equilibrium_tol: f64,
    pub coefficients: ModeSpec,
}

impl Default for ConfigSpec {
    fn default() -> Self {
        SimConfig::default().into()
    }
}

impl From<SimConfig> for ConfigSpec {
    fn from(c: SimConfig) -> Self {
        Self {
            cfl: c.cfl,
            t_end: c.t_end,
            sample_interval: c.sample_interval,
            equilibrium_window: c.equilibrium_window,
            equilibrium_tol: c.equilibrium_tol,
            coefficients: c.coefficient_mode.into(),
        }
    }
}

impl From<&ConfigSpec> for SimConfig {
    fn from(c: &ConfigSpec) -> Self {
        Self {
            cfl: c.cfl,
            t_end: c.t_end,
            sample_interval: c.sample_interval,
            equilibrium_window: c.equilibrium_window,
            equilibrium_tol: c.equilibrium_tol,
            coefficient_mode: c.coefficients.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub model: ModelSpec,
    pub arcs: Vec<ArcSpec>,
    #[serde(default)]
    pub junctions: Vec<JunctionSpec>,
    #[serde(default)]
    pub boundaries: Vec<BoundarySpec>,
    #[serde(default)]
    pub sinks: Vec<SinkSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tracer_target: Option<String>,
    #[serde(default)]
    pub config: ConfigSpec,
}

/// A parsed and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: Network,
    pub config: SimConfig,
}

fn schema(location: impl Into<String>, message: impl ToString) -> ScenarioError {
    ScenarioError::Schema {
        location: location.into(),
        message: message.to_string(),
    }
}

impl ScenarioFile {
    pub fn from_network(net: &Network, config: &SimConfig) -> Self {
        Self {
            model: ModelSpec {
                v_max: net.model.v_max(),
                rho_max: net.model.rho_max(),
            },
            arcs: net
                .arcs
                .iter()
                .map(|a| ArcSpec {
                    id: a.id.clone(),
                    a: a.a,
                    b: a.b,
                    cells: a.cells,
                    kind: a.kind.into(),
                })
                .collect(),
            junctions: net
                .junctions
                .iter()
                .map(|j| JunctionSpec {
                    id: j.id.clone(),
                    incoming: j.incoming.clone(),
                    outgoing: j.outgoing.clone(),
                    distribution: j.distribution.rows(),
                    priority: Some(j.priority.clone()),
                    coefficients: j.mode.into(),
                })
                .collect(),
            boundaries: net
                .boundaries
                .iter()
                .map(|b| BoundarySpec {
                    arc: b.arc.clone(),
                    density: b.density,
                    tracer: b.tracer,
                })
                .collect(),
            sinks: net
                .sinks
                .iter()
                .map(|s| SinkSpec {
                    arc: s.arc.clone(),
                    density: s.exterior_density,
                })
                .collect(),
            tracer_target: net.tracer_target.clone(),
            config: config.clone().into(),
        }
    }

    /// Builds the domain objects, reporting structural problems (bad model
    /// parameters, ragged matrices) as schema errors and invariant
    /// violations as network errors.
    pub fn into_scenario(self) -> Result<Scenario, ScenarioError> {
        let model = FluxModel::new(self.model.v_max, self.model.rho_max).map_err(|e| schema("model", e))?;
        let mut junctions = Vec::with_capacity(self.junctions.len());
        for (k, j) in self.junctions.into_iter().enumerate() {
            let distribution = DistributionMatrix::from_rows(&j.distribution)
                .map_err(|e| schema(format!("junctions[{k}].distribution (junction `{}`)", j.id), e))?;
            let n = j.incoming.len().max(1);
            junctions.push(Junction {
                priority: j.priority.unwrap_or_else(|| vec![1.0 / n as f64; j.incoming.len()]),
                id: j.id,
                incoming: j.incoming,
                outgoing: j.outgoing,
                distribution,
                mode: j.coefficients.into(),
            });
        }
        let network = Network {
            model,
            arcs: self
                .arcs
                .into_iter()
                .map(|a| Arc::new(a.id, a.a, a.b, a.cells, a.kind.into()))
                .collect(),
            junctions,
            boundaries: self
                .boundaries
                .into_iter()
                .map(|b| BoundaryCondition {
                    arc: b.arc,
                    density: b.density,
                    tracer: b.tracer,
                })
                .collect(),
            sinks: self
                .sinks
                .into_iter()
                .map(|s| Sink {
                    arc: s.arc,
                    exterior_density: s.density,
                })
                .collect(),
            tracer_target: self.tracer_target,
        };
        let config = SimConfig::from(&self.config);
        config.check().map_err(|e| schema("config", e))?;
        let report = network.validate();
        if !report.is_valid() {
            return Err(ScenarioError::Network(report.violations));
        }
        Ok(Scenario { network, config })
    }
}

/// Parses and validates scenario JSON.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => ScenarioError::Schema {
                location: format!("line {}, column {}", e.line(), e.column()),
                message: e.to_string(),
            },
            _ => ScenarioError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
        }
    })?;
    file.into_scenario()
}

/// Pretty-printed scenario JSON.
pub fn write_scenario(net: &Network, config: &SimConfig) -> String {
    let mut s = serde_json::to_string_pretty(&ScenarioFile::from_network(net, config))
        .expect("scenario serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roundabout::{build_roundabout, RoundaboutParams};

    const CHAIN: &str = r#"{
        "arcs": [
            {"id": "in", "a": 0, "b": 1, "cells": 10, "kind": "external-in"},
            {"id": "out", "a": 0, "b": 1, "cells": 10, "kind": "external-out"}
        ],
        "junctions": [
            {"id": "J", "incoming": ["in"], "outgoing": ["out"], "distribution": [[1.0]]}
        ],
        "boundaries": [{"arc": "in", "density": 0.1}],
        "sinks": [{"arc": "out"}]
    }"#;

    #[test]
    fn parses_minimal_chain_with_defaults() {
        let sc = parse_scenario(CHAIN).unwrap();
        assert_eq!(sc.network.arcs.len(), 2);
        assert_eq!(sc.network.model, FluxModel::unit());
        assert_eq!(sc.config, SimConfig::default());
        assert_eq!(sc.network.junctions[0].priority, vec![1.0]);
    }

    #[test]
    fn empty_file_is_a_syntax_error() {
        assert!(matches!(parse_scenario(""), Err(ScenarioError::Syntax { .. })));
        assert!(matches!(parse_scenario("{\"arcs\": ["), Err(ScenarioError::Syntax { .. })));
    }

    #[test]
    fn unknown_field_is_a_schema_error() {
        let text = CHAIN.replace("\"sinks\"", "\"colour\": 3, \"sinks\"");
        match parse_scenario(&text) {
            Err(ScenarioError::Schema { message, .. }) => assert!(message.contains("colour"), "{message}"),
            other => panic!("{other:?}"),
        }
        let text = CHAIN.replace("\"cells\": 10, \"kind\": \"external-in\"", "\"cells\": -3");
        assert!(matches!(parse_scenario(&text), Err(ScenarioError::Schema { .. })));
    }

    #[test]
    fn bad_column_mass_names_the_junction() {
        let text = CHAIN.replace("[[1.0]]", "[[0.9]]");
        match parse_scenario(&text) {
            Err(ScenarioError::Network(v)) => {
                assert!(v.iter().any(|m| m.contains("`J`") && m.contains("0.9")), "{v:?}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ragged_matrix_and_bad_config() {
        let text = CHAIN.replace("[[1.0]]", "[[1.0], []]");
        assert!(matches!(parse_scenario(&text), Err(ScenarioError::Schema { location, .. }) if location.contains("junctions[0]")));
        let text = CHAIN.replace("\"sinks\"", "\"config\": {\"cfl\": 2.0}, \"sinks\"");
        assert!(matches!(parse_scenario(&text), Err(ScenarioError::Schema { location, .. }) if location == "config"));
    }

    #[test]
    fn roundabout_round_trips() {
        let net = build_roundabout(&RoundaboutParams::new(0.3, 0.7, 0.1, 0.12, 17)).unwrap();
        let cfg = SimConfig {
            t_end: 42.0,
            ..SimConfig::default()
        };
        let text = write_scenario(&net, &cfg);
        let back = parse_scenario(&text).unwrap();
        assert_eq!(back.network, net);
        assert_eq!(back.config, cfg);
        assert_eq!(write_scenario(&back.network, &back.config), text);
    }
}
