//! The two-entry, two-exit circle and its closed-form equilibrium.
//!
//! Layout (one lane, flow in the direction of the arrows):
//!
//! ```text
//!   S1 ──► J1 ──S1C──► J2 ──► S3
//!          ▲           │
//!         S4C         S2C
//!          │           ▼
//!   S4 ◄── J4 ◄─S3C─── J3 ◄── S2
//! ```
//!
//! Entries J1 and J3 give right-of-way to the circulating arc. Exits J2 and
//! J4 split the arriving flow between the external exit and the next circle
//! arc. Tags from S1 leave at S3 with fraction `alpha`; tags from S2 leave at
//! S4 with fraction `beta`.

use crate::error::{param, Error, Result};
use crate::flux_model::FluxModel;
use crate::junction::DistributionMatrix;
use crate::network::{
    Arc, ArcKind, BoundaryCondition, CoefficientMode, Junction, Network, Sink,
};

pub const S1: &str = "S1";
pub const S2: &str = "S2";
pub const S3: &str = "S3";
pub const S4: &str = "S4";
pub const S1C: &str = "S1C";
pub const S2C: &str = "S2C";
pub const S3C: &str = "S3C";
pub const S4C: &str = "S4C";
pub const ENTRY_1: &str = "J1";
pub const EXIT_1: &str = "J2";
pub const ENTRY_2: &str = "J3";
pub const EXIT_2: &str = "J4";

/// All arcs in the order the builder creates them.
pub const ARC_IDS: [&str; 8] = [S1, S2, S3, S4, S1C, S2C, S3C, S4C];

/// Split coefficients at the two exit junctions: `(to exit, to circle)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitCoefficients {
    /// J2: toward S3, toward S2C.
    pub j2: (f64, f64),
    /// J4: toward S4, toward S4C.
    pub j4: (f64, f64),
}

fn fraction(name: &'static str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(param(name, v, "must lie in [0, 1]"))
    }
}

/// Coefficients while only first-pass tags reach the exits: everything at
/// J2 is S1 traffic and everything at J4 is S2 traffic.
pub fn initial_coefficients(alpha: f64, beta: f64) -> Result<ExitCoefficients> {
    let alpha = fraction("alpha", alpha)?;
    let beta = fraction("beta", beta)?;
    Ok(ExitCoefficients {
        j2: (alpha, 1.0 - alpha),
        j4: (beta, 1.0 - beta),
    })
}

/// Exit coefficients that route every tag to its destination once the
/// circle carries its steady mix, given the entry fluxes `f1` (S1), `f2` (S2).
pub fn equilibrium_coefficients(alpha: f64, beta: f64, f1: f64, f2: f64) -> Result<ExitCoefficients> {
    let alpha = fraction("alpha", alpha)?;
    let beta = fraction("beta", beta)?;
    if !(f1 >= 0.0 && f2 >= 0.0) {
        return Err(param("flux", f1.min(f2), "entry fluxes must be non-negative"));
    }
    let at_j2 = f1 + (1.0 - beta) * f2;
    let at_j4 = (1.0 - alpha) * f1 + f2;
    if at_j2 <= 0.0 || at_j4 <= 0.0 {
        return Err(Error::UndefinedCoefficients);
    }
    Ok(ExitCoefficients {
        j2: (
            (alpha * f1 + (1.0 - beta) * f2) / at_j2,
            (1.0 - alpha) * f1 / at_j2,
        ),
        j4: (
            ((1.0 - alpha) * f1 + beta * f2) / at_j4,
            (1.0 - beta) * f2 / at_j4,
        ),
    })
}

/// Steady flux on every arc of the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundaboutFluxes {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub s1c: f64,
    pub s2c: f64,
    pub s3c: f64,
    pub s4c: f64,
}

impl RoundaboutFluxes {
    pub fn get(&self, arc: &str) -> Option<f64> {
        Some(match arc {
            S1 => self.s1,
            S2 => self.s2,
            S3 => self.s3,
            S4 => self.s4,
            S1C => self.s1c,
            S2C => self.s2c,
            S3C => self.s3c,
            S4C => self.s4c,
            _ => return None,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        ARC_IDS.iter().map(move |id| (*id, self.get(id).unwrap()))
    }
}

pub fn equilibrium_fluxes(alpha: f64, beta: f64, f1: f64, f2: f64) -> RoundaboutFluxes {
    RoundaboutFluxes {
        s1: f1,
        s2: f2,
        s1c: f1 + (1.0 - beta) * f2,
        s2c: (1.0 - alpha) * f1,
        s3c: f2 + (1.0 - alpha) * f1,
        s4c: (1.0 - beta) * f2,
        s3: alpha * f1 + (1.0 - beta) * f2,
        s4: (1.0 - alpha) * f1 + beta * f2,
    }
}

/// Whether both exits can take all entering traffic: `f1 + f2 ≤ f(σ)`.
pub fn check_low_flow(model: &FluxModel, f1: f64, f2: f64) -> bool {
    f1 + f2 <= model.capacity()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundaboutParams {
    pub alpha: f64,
    pub beta: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub cells_per_arc: usize,
    pub model: FluxModel,
}

impl RoundaboutParams {
    pub fn new(alpha: f64, beta: f64, rho1: f64, rho2: f64, cells_per_arc: usize) -> Self {
        Self {
            alpha,
            beta,
            rho1,
            rho2,
            cells_per_arc,
            model: FluxModel::unit(),
        }
    }

    /// Entry fluxes `(f(ρ̄1), f(ρ̄2))`.
    pub fn entry_fluxes(&self) -> Result<(f64, f64)> {
        Ok((self.model.flux(self.rho1)?, self.model.flux(self.rho2)?))
    }
}

/// Builds the empty circle with Eq.-(7)-style initial exit coefficients and
/// dynamic coefficient mode at both exits.
pub fn build_roundabout(p: &RoundaboutParams) -> Result<Network> {
    let coeffs = initial_coefficients(p.alpha, p.beta)?;
    let sigma = p.model.sigma();
    for (name, rho) in [("rho1", p.rho1), ("rho2", p.rho2)] {
        if !(rho >= 0.0 && rho <= sigma) {
            return Err(param(name, rho, "inflow density must lie in [0, sigma]"));
        }
    }
    if p.cells_per_arc == 0 {
        return Err(param("cells_per_arc", 0.0, "must be positive"));
    }
    let n = p.cells_per_arc;
    let arcs = vec![
        Arc::unit(S1, n, ArcKind::ExternalIn),
        Arc::unit(S2, n, ArcKind::ExternalIn),
        Arc::unit(S3, n, ArcKind::ExternalOut),
        Arc::unit(S4, n, ArcKind::ExternalOut),
        Arc::unit(S1C, n, ArcKind::Circle),
        Arc::unit(S2C, n, ArcKind::Circle),
        Arc::unit(S3C, n, ArcKind::Circle),
        Arc::unit(S4C, n, ArcKind::Circle),
    ];
    let junctions = vec![
        Junction::new(ENTRY_1, &[S1, S4C], &[S1C], DistributionMatrix::merge(2))
            .with_priority(vec![0.0, 1.0]),
        Junction::new(
            EXIT_1,
            &[S1C],
            &[S3, S2C],
            DistributionMatrix::split(&[coeffs.j2.0, coeffs.j2.1]),
        )
        .with_mode(CoefficientMode::Dynamic),
        Junction::new(ENTRY_2, &[S2, S2C], &[S3C], DistributionMatrix::merge(2))
            .with_priority(vec![0.0, 1.0]),
        Junction::new(
            EXIT_2,
            &[S3C],
            &[S4, S4C],
            DistributionMatrix::split(&[coeffs.j4.0, coeffs.j4.1]),
        )
        .with_mode(CoefficientMode::Dynamic),
    ];
    let net = Network {
        model: p.model,
        arcs,
        junctions,
        boundaries: vec![
            BoundaryCondition {
                arc: S1.into(),
                density: p.rho1,
                tracer: p.alpha,
            },
            BoundaryCondition {
                arc: S2.into(),
                density: p.rho2,
                tracer: 1.0 - p.beta,
            },
        ],
        sinks: vec![Sink::absorbing(S3), Sink::absorbing(S4)],
        tracer_target: Some(S3.into()),
    };
    net.ensure_valid()?;
    Ok(net)
}
