//! Network topology: arcs, junctions, boundary and outflow conditions.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::flux_model::FluxModel;
use crate::junction::{DistributionMatrix, COLUMN_MASS_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcKind {
    ExternalIn,
    ExternalOut,
    Circle,
    Generic,
}

/// One network edge, the interval `[a, b]` split into `cells` uniform cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub id: String,
    pub a: f64,
    pub b: f64,
    pub cells: usize,
    pub kind: ArcKind,
}

impl Arc {
    pub fn new(id: impl Into<String>, a: f64, b: f64, cells: usize, kind: ArcKind) -> Self {
        Self {
            id: id.into(),
            a,
            b,
            cells,
            kind,
        }
    }

    /// Unit-length arc on `[0, 1]`.
    pub fn unit(id: impl Into<String>, cells: usize, kind: ArcKind) -> Self {
        Self::new(id, 0.0, 1.0, cells, kind)
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.cells as f64
    }

    /// Centre of cell `i`.
    pub fn cell_center(&self, i: usize) -> f64 {
        self.a + (i as f64 + 0.5) * self.dx()
    }
}

/// Whether a junction's split coefficients follow the arriving tracer
/// composition or stay at their initial values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoefficientMode {
    #[default]
    Static,
    Dynamic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Junction {
    pub id: String,
    pub incoming: Vec<String>,
    pub outgoing: Vec<String>,
    pub distribution: DistributionMatrix,
    /// One weight per incoming arc; larger weights are served first.
    pub priority: Vec<f64>,
    pub mode: CoefficientMode,
}

impl Junction {
    pub fn new(
        id: impl Into<String>,
        incoming: &[&str],
        outgoing: &[&str],
        distribution: DistributionMatrix,
    ) -> Self {
        let n = incoming.len().max(1);
        Self {
            id: id.into(),
            incoming: incoming.iter().map(|s| s.to_string()).collect(),
            outgoing: outgoing.iter().map(|s| s.to_string()).collect(),
            distribution,
            priority: vec![1.0 / n as f64; incoming.len()],
            mode: CoefficientMode::Static,
        }
    }

    pub fn with_priority(mut self, priority: Vec<f64>) -> Self {
        self.priority = priority;
        self
    }

    pub fn with_mode(mut self, mode: CoefficientMode) -> Self {
        self.mode = mode;
        self
    }
}

/// Constant-density reservoir feeding a source arc. `tracer` is the fraction
/// of the entering mass bound for the network's tracer target.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCondition {
    pub arc: String,
    pub density: f64,
    pub tracer: f64,
}

/// Outflow condition at the downstream end of an arc. Without an exterior
/// density the sink absorbs everything the last cell can send.
#[derive(Debug, Clone, PartialEq)]
pub struct Sink {
    pub arc: String,
    pub exterior_density: Option<f64>,
}

impl Sink {
    pub fn absorbing(arc: impl Into<String>) -> Self {
        Self {
            arc: arc.into(),
            exterior_density: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub model: FluxModel,
    pub arcs: Vec<Arc>,
    pub junctions: Vec<Junction>,
    pub boundaries: Vec<BoundaryCondition>,
    pub sinks: Vec<Sink>,
    /// Exit arc whose bound mass the destination tracer follows.
    pub tracer_target: Option<String>,
}

/// Violated invariants, empty when the network is well formed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidNetwork(self.violations))
        }
    }

    fn push(&mut self, msg: String) {
        self.violations.push(msg);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

impl Network {
    pub fn arc_index(&self, id: &str) -> Option<usize> {
        self.arcs.iter().position(|a| a.id == id)
    }

    pub fn arc(&self, id: &str) -> Option<&Arc> {
        self.arcs.iter().find(|a| a.id == id)
    }

    pub fn junction(&self, id: &str) -> Option<&Junction> {
        self.junctions.iter().find(|j| j.id == id)
    }

    pub fn total_cells(&self) -> usize {
        self.arcs.iter().map(|a| a.cells).sum()
    }

    /// Checks every structural invariant and reports all violations found.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let rho_max = self.model.rho_max();

        let mut ids = HashSet::new();
        for arc in &self.arcs {
            if !ids.insert(arc.id.as_str()) {
                report.push(format!("duplicate arc id `{}`", arc.id));
            }
            if !(arc.a.is_finite() && arc.b.is_finite() && arc.b > arc.a) {
                report.push(format!("arc `{}`: endpoints [{}, {}] need b > a", arc.id, arc.a, arc.b));
            }
            if arc.cells == 0 {
                report.push(format!("arc `{}`: needs at least one cell", arc.id));
            }
        }
        if self.arcs.is_empty() {
            report.push("network has no arcs".into());
        }

        // upstream[arc] / downstream[arc]: junctions attached at each end
        let mut upstream: HashMap<&str, Vec<&str>> = HashMap::new();
        let mut downstream: HashMap<&str, Vec<&str>> = HashMap::new();
        let mut junction_ids = HashSet::new();
        for j in &self.junctions {
            if !junction_ids.insert(j.id.as_str()) {
                report.push(format!("duplicate junction id `{}`", j.id));
            }
            if j.incoming.is_empty() || j.outgoing.is_empty() {
                report.push(format!("junction `{}`: needs incoming and outgoing arcs", j.id));
            }
            let mut seen = HashSet::new();
            for a in j.incoming.iter().chain(&j.outgoing) {
                if !seen.insert(a.as_str()) {
                    report.push(format!("junction `{}`: arc `{a}` appears twice", j.id));
                }
                if !ids.contains(a.as_str()) {
                    report.push(format!("junction `{}`: dangling reference to arc `{a}`", j.id));
                }
            }
            for a in &j.incoming {
                downstream.entry(a.as_str()).or_default().push(&j.id);
            }
            for a in &j.outgoing {
                upstream.entry(a.as_str()).or_default().push(&j.id);
            }
            self.check_junction_matrix(j, &mut report);
        }

        let mut sources = HashSet::new();
        for bc in &self.boundaries {
            if !ids.contains(bc.arc.as_str()) {
                report.push(format!("boundary condition: dangling reference to arc `{}`", bc.arc));
            }
            if !sources.insert(bc.arc.as_str()) {
                report.push(format!("arc `{}` has more than one boundary condition", bc.arc));
            }
            if !(bc.density >= 0.0 && bc.density <= rho_max) {
                report.push(format!(
                    "boundary density {} on arc `{}` outside [0, {rho_max}]",
                    bc.density, bc.arc
                ));
            }
            if !(0.0..=1.0).contains(&bc.tracer) {
                report.push(format!("boundary tracer {} on arc `{}` outside [0, 1]", bc.tracer, bc.arc));
            }
        }
        let mut sinks = HashSet::new();
        for s in &self.sinks {
            if !ids.contains(s.arc.as_str()) {
                report.push(format!("sink: dangling reference to arc `{}`", s.arc));
            }
            if !sinks.insert(s.arc.as_str()) {
                report.push(format!("arc `{}` has more than one sink", s.arc));
            }
            if let Some(rho) = s.exterior_density {
                if !(rho >= 0.0 && rho <= rho_max) {
                    report.push(format!("sink density {rho} on arc `{}` outside [0, {rho_max}]", s.arc));
                }
            }
        }

        for arc in &self.arcs {
            let id = arc.id.as_str();
            let ups = upstream.get(id).map_or(0, Vec::len);
            let downs = downstream.get(id).map_or(0, Vec::len);
            let is_source = sources.contains(id);
            let is_sink = sinks.contains(id);
            if ups > 1 {
                report.push(format!("arc `{id}` has {ups} upstream junctions"));
            }
            if downs > 1 {
                report.push(format!("arc `{id}` has {downs} downstream junctions"));
            }
            match (ups > 0, is_source) {
                (true, true) => report.push(format!("arc `{id}` has both a boundary condition and an upstream junction")),
                (false, false) => report.push(format!("arc `{id}` has no upstream connection")),
                _ => {}
            }
            match (downs > 0, is_sink) {
                (true, true) => report.push(format!("arc `{id}` has both a sink and a downstream junction")),
                (false, false) => report.push(format!("arc `{id}` has no downstream connection")),
                _ => {}
            }
            if arc.kind == ArcKind::ExternalIn && !is_source {
                report.push(format!("external-in arc `{id}` lacks a boundary condition"));
            }
            if arc.kind == ArcKind::ExternalOut && !is_sink {
                report.push(format!("external-out arc `{id}` lacks free outflow"));
            }
        }

        if let Some(target) = &self.tracer_target {
            if !sinks.contains(target.as_str()) {
                report.push(format!("tracer target `{target}` is not a sink arc"));
            }
        }
        for j in &self.junctions {
            if j.mode == CoefficientMode::Dynamic {
                if let Err(e) = self.exit_slot(j) {
                    report.push(format!("junction `{}`: {e}", j.id));
                }
            }
        }

        if !self.arcs.is_empty() && !self.is_connected() {
            report.push("network is not connected".into());
        }
        report
    }

    pub fn ensure_valid(&self) -> Result<()> {
        self.validate().into_result()
    }

    fn check_junction_matrix(&self, j: &Junction, report: &mut ValidationReport) {
        let a = &j.distribution;
        if a.incoming() != j.incoming.len() || a.outgoing() != j.outgoing.len() {
            report.push(format!(
                "junction `{}`: distribution is {}x{} for {} outgoing and {} incoming arcs",
                j.id,
                a.outgoing(),
                a.incoming(),
                j.outgoing.len(),
                j.incoming.len()
            ));
            return;
        }
        for (i, inc) in j.incoming.iter().enumerate() {
            let entries_ok = (0..a.outgoing()).all(|r| {
                let v = a.get(r, i);
                v.is_finite() && v >= 0.0
            });
            if !entries_ok {
                report.push(format!("junction `{}`: negative or non-finite entry in column `{inc}`", j.id));
            }
            let mass = a.column_mass(i);
            if (mass - 1.0).abs() > COLUMN_MASS_TOLERANCE {
                report.push(format!("junction `{}`: column mass {mass} ≠ 1 (incoming `{inc}`)", j.id));
            }
        }
        if j.priority.len() != j.incoming.len() {
            report.push(format!(
                "junction `{}`: {} priority weights for {} incoming arcs",
                j.id,
                j.priority.len(),
                j.incoming.len()
            ));
        } else {
            if j.priority.iter().any(|p| !(0.0..=1.0).contains(p)) {
                report.push(format!("junction `{}`: priority weights must lie in [0, 1]", j.id));
            }
            let total: f64 = j.priority.iter().sum();
            if (total - 1.0).abs() > COLUMN_MASS_TOLERANCE {
                report.push(format!("junction `{}`: priority weights sum to {total} ≠ 1", j.id));
            }
        }
    }

    /// For a dynamic exit junction (one incoming arc, two outgoing, exactly
    /// one of which is a sink), returns the slot of the exit arc and whether
    /// that exit is the tracer target.
    pub fn exit_slot(&self, j: &Junction) -> Result<(usize, bool)> {
        let Some(target) = &self.tracer_target else {
            return Err(Error::Junction("dynamic coefficients need a tracer target".into()));
        };
        if j.incoming.len() != 1 || j.outgoing.len() != 2 {
            return Err(Error::Junction("dynamic coefficients need one incoming and two outgoing arcs".into()));
        }
        let is_sink = |id: &str| self.sinks.iter().any(|s| s.arc == id);
        let exits: Vec<usize> = (0..2).filter(|&k| is_sink(&j.outgoing[k])).collect();
        match exits.as_slice() {
            [k] => Ok((*k, &j.outgoing[*k] == target)),
            _ => Err(Error::Junction("dynamic coefficients need exactly one outgoing sink arc".into())),
        }
    }

    fn is_connected(&self) -> bool {
        let index: HashMap<&str, usize> = self
            .arcs
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.as_str(), i))
            .collect();
        let mut parent: Vec<usize> = (0..self.arcs.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for j in &self.junctions {
            let members: Vec<usize> = j
                .incoming
                .iter()
                .chain(&j.outgoing)
                .filter_map(|id| index.get(id.as_str()).copied())
                .collect();
            for w in members.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        (0..self.arcs.len()).all(|i| find(&mut parent, i) == root)
    }

    /// Arcs fed by a junction-free upstream end, in boundary order.
    pub fn source_arcs(&self) -> impl Iterator<Item = &str> {
        self.boundaries.iter().map(|b| b.arc.as_str())
    }
}
