//! Fundamental diagram of the flow: velocity, flux, demand/supply and the
//! exact Riemann solution used as a reference.
//!
//! The diagram is Greenshields' quadratic, `v(ρ) = v_max (1 - ρ/ρ_max)`, so
//! `f(ρ) = v_max ρ (1 - ρ/ρ_max)` with critical density `σ = ρ_max / 2`.
//! Everything downstream goes through [`FluxModel`]'s methods, never through
//! the closed forms directly.

use crate::error::{param, Error, Result};

/// Densities within this absolute distance outside `[0, ρ_max]` are treated as
/// round-off and clamped; anything further out is a domain error.
pub const DENSITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxModel {
    v_max: f64,
    rho_max: f64,
    sigma: f64,
}

impl Default for FluxModel {
    fn default() -> Self {
        Self::unit()
    }
}

impl FluxModel {
    pub fn new(v_max: f64, rho_max: f64) -> Result<Self> {
        if !(v_max.is_finite() && v_max > 0.0) {
            return Err(param("v_max", v_max, "must be finite and > 0"));
        }
        if !(rho_max.is_finite() && rho_max > 0.0) {
            return Err(param("rho_max", rho_max, "must be finite and > 0"));
        }
        Ok(Self {
            v_max,
            rho_max,
            sigma: 0.5 * rho_max,
        })
    }

    /// `v_max = ρ_max = 1`.
    pub fn unit() -> Self {
        Self {
            v_max: 1.0,
            rho_max: 1.0,
            sigma: 0.5,
        }
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// Critical density, where the flux peaks.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Arc capacity `f(σ)`.
    pub fn capacity(&self) -> f64 {
        0.25 * self.v_max * self.rho_max
    }

    /// Largest characteristic speed `max |f'(ρ)|` over the admissible range.
    pub fn max_wave_speed(&self) -> f64 {
        self.v_max
    }

    /// Validates a density, clamping round-off excursions of at most
    /// [`DENSITY_TOLERANCE`] back into range.
    pub fn check_density(&self, rho: f64) -> Result<f64> {
        if rho >= 0.0 && rho <= self.rho_max {
            Ok(rho)
        } else if rho >= -DENSITY_TOLERANCE && rho <= self.rho_max + DENSITY_TOLERANCE {
            Ok(rho.clamp(0.0, self.rho_max))
        } else {
            Err(Error::DensityOutOfRange {
                value: rho,
                rho_max: self.rho_max,
            })
        }
    }

    pub fn velocity(&self, rho: f64) -> Result<f64> {
        let rho = self.check_density(rho)?;
        Ok(self.velocity_unchecked(rho))
    }

    pub fn flux(&self, rho: f64) -> Result<f64> {
        let rho = self.check_density(rho)?;
        Ok(self.flux_unchecked(rho))
    }

    /// Largest flux a cell at density `rho` can send downstream.
    pub fn demand(&self, rho: f64) -> Result<f64> {
        let rho = self.check_density(rho)?;
        Ok(self.demand_unchecked(rho))
    }

    /// Largest flux a cell at density `rho` can receive from upstream.
    pub fn supply(&self, rho: f64) -> Result<f64> {
        let rho = self.check_density(rho)?;
        Ok(self.supply_unchecked(rho))
    }

    /// Godunov numerical flux at an interface between two cells.
    pub fn godunov_flux(&self, rho_left: f64, rho_right: f64) -> Result<f64> {
        let l = self.check_density(rho_left)?;
        let r = self.check_density(rho_right)?;
        Ok(self.godunov_unchecked(l, r))
    }

    /// Characteristic speed `f'(ρ)`.
    pub fn wave_speed(&self, rho: f64) -> f64 {
        self.v_max * (1.0 - 2.0 * rho / self.rho_max)
    }

    /// Entropy solution of the Riemann problem with data `(rho_left | rho_right)`
    /// evaluated at the similarity coordinate `xi = x / t`.
    pub fn riemann_eval(&self, rho_left: f64, rho_right: f64, xi: f64) -> Result<f64> {
        let l = self.check_density(rho_left)?;
        let r = self.check_density(rho_right)?;
        if l < r {
            let shock = (self.flux_unchecked(r) - self.flux_unchecked(l)) / (r - l);
            Ok(if xi < shock { l } else { r })
        } else if l > r {
            let (lo, hi) = (self.wave_speed(l), self.wave_speed(r));
            Ok(if xi <= lo {
                l
            } else if xi >= hi {
                r
            } else {
                // f'(ρ) = xi inverted on the fan
                0.5 * self.rho_max * (1.0 - xi / self.v_max)
            })
        } else {
            Ok(l)
        }
    }

    /// Free-flow density (`ρ ≤ σ`) whose flux equals `q`.
    pub fn free_flow_density(&self, q: f64) -> Result<f64> {
        let cap = self.capacity();
        if !(q >= 0.0 && q <= cap) {
            return Err(param("flux", q, "must lie in [0, capacity]"));
        }
        let disc = (1.0 - q / cap).max(0.0).sqrt();
        Ok(0.5 * self.rho_max * (1.0 - disc))
    }

    #[inline]
    pub fn velocity_unchecked(&self, rho: f64) -> f64 {
        self.v_max * (1.0 - rho / self.rho_max)
    }

    #[inline]
    pub fn flux_unchecked(&self, rho: f64) -> f64 {
        rho * self.velocity_unchecked(rho)
    }

    #[inline]
    pub fn demand_unchecked(&self, rho: f64) -> f64 {
        if rho <= self.sigma {
            self.flux_unchecked(rho)
        } else {
            self.capacity()
        }
    }

    #[inline]
    pub fn supply_unchecked(&self, rho: f64) -> f64 {
        if rho <= self.sigma {
            self.capacity()
        } else {
            self.flux_unchecked(rho)
        }
    }

    #[inline]
    pub fn godunov_unchecked(&self, rho_left: f64, rho_right: f64) -> f64 {
        self.demand_unchecked(rho_left)
            .min(self.supply_unchecked(rho_right))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> FluxModel {
        FluxModel::unit()
    }

    /// Riemann solution built only from flux evaluations: a numerical
    /// derivative for characteristic speeds, Rankine-Hugoniot for shocks and
    /// bisection to invert the fan.
    fn riemann_oracle(m: &FluxModel, l: f64, r: f64, xi: f64) -> f64 {
        let f = |x: f64| m.flux_unchecked(x);
        let df = |x: f64| {
            let h = 1e-6;
            let (a, b) = ((x - h).max(0.0), (x + h).min(m.rho_max()));
            (f(b) - f(a)) / (b - a)
        };
        if l == r {
            return l;
        }
        if l < r {
            let s = (f(r) - f(l)) / (r - l);
            return if xi < s { l } else { r };
        }
        if xi <= df(l) {
            return l;
        }
        if xi >= df(r) {
            return r;
        }
        // df is decreasing in rho; find rho in [r, l] with df(rho) = xi
        let (mut lo, mut hi) = (r, l);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if df(mid) > xi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn velocity_examples() {
        assert_eq!(unit().velocity(0.0).unwrap(), 1.0);
        assert_eq!(unit().velocity(1.0).unwrap(), 0.0);
        let m = FluxModel::new(2.0, 1.0).unwrap();
        assert_eq!(m.velocity(0.5).unwrap(), 1.0);
    }

    #[test]
    fn flux_examples() {
        let m = unit();
        assert_eq!(m.flux(0.0).unwrap(), 0.0);
        assert_eq!(m.flux(0.5).unwrap(), 0.25);
        assert!((m.flux(0.2).unwrap() - 0.16).abs() < 1e-15);
    }

    #[test]
    fn demand_supply_examples() {
        let m = unit();
        assert!((m.demand(0.2).unwrap() - 0.16).abs() < 1e-15);
        assert_eq!(m.demand(0.8).unwrap(), 0.25);
        assert_eq!(m.demand(0.5).unwrap(), 0.25);
        assert_eq!(m.supply(0.2).unwrap(), 0.25);
        assert!((m.supply(0.8).unwrap() - 0.16).abs() < 1e-15);
        assert_eq!(m.supply(1.0).unwrap(), 0.0);
    }

    #[test]
    fn godunov_examples() {
        let m = unit();
        assert!((m.godunov_flux(0.2, 0.2).unwrap() - 0.16).abs() < 1e-15);
        // transonic fan passes through sigma
        assert_eq!(m.godunov_flux(0.8, 0.2).unwrap(), 0.25);
        let fan = riemann_oracle(&m, 0.8, 0.2, 0.0);
        assert!((m.flux_unchecked(fan) - 0.25).abs() < 1e-12);
        // stationary shock
        assert!((m.godunov_flux(0.2, 0.8).unwrap() - 0.16).abs() < 1e-15);
    }

    #[test]
    fn riemann_examples() {
        let m = unit();
        for xi in [-3.0, -0.2, 0.0, 0.7, 5.0] {
            assert_eq!(m.riemann_eval(0.3, 0.3, xi).unwrap(), 0.3);
        }
        assert_eq!(m.riemann_eval(0.2, 0.8, -0.1).unwrap(), 0.2);
        assert_eq!(riemann_oracle(&m, 0.2, 0.8, -0.1), 0.2);
        assert_eq!(m.riemann_eval(0.8, 0.2, 0.0).unwrap(), 0.5);
        assert!((riemann_oracle(&m, 0.8, 0.2, 0.0) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn riemann_matches_oracle_across_fans() {
        let m = FluxModel::new(1.7, 2.5).unwrap();
        let pts: Vec<f64> = (0..=20).map(|i| 2.5 * i as f64 / 20.0).collect();
        for &l in &pts {
            for &r in &pts {
                for k in -20..=20 {
                    let xi = 1.9 * k as f64 / 20.0;
                    let got = m.riemann_eval(l, r, xi).unwrap();
                    let want = riemann_oracle(&m, l, r, xi);
                    assert!((got - want).abs() < 1e-5, "({l}|{r}) at {xi}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn godunov_equals_riemann_flux_at_interface() {
        let m = unit();
        let grid: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
        for &a in &grid {
            for &b in &grid {
                let g = m.godunov_flux(a, b).unwrap();
                let exact = m.flux_unchecked(m.riemann_eval(a, b, 0.0).unwrap());
                assert!((g - exact).abs() <= 1e-12, "({a}, {b}): {g} vs {exact}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        let m = unit();
        assert!(matches!(m.flux(-0.1), Err(Error::DensityOutOfRange { .. })));
        assert!(m.velocity(1.5).is_err());
        assert!(m.demand(f64::NAN).is_err());
        assert!(m.godunov_flux(0.2, 1.01).is_err());
        assert!(m.riemann_eval(-1.0, 0.2, 0.0).is_err());
        // round-off is absorbed
        assert_eq!(m.flux(-1e-13).unwrap(), 0.0);
        assert_eq!(m.check_density(1.0 + 5e-13).unwrap(), 1.0);
        assert!(FluxModel::new(0.0, 1.0).is_err());
        assert!(FluxModel::new(1.0, -2.0).is_err());
    }

    #[test]
    fn free_flow_inversion() {
        let m = unit();
        let rho = m.free_flow_density(0.1).unwrap();
        assert!((rho - 0.112_701_665_379_258_3).abs() < 1e-15);
        assert!((m.flux_unchecked(rho) - 0.1).abs() < 1e-15);
        assert_eq!(m.free_flow_density(0.25).unwrap(), 0.5);
        assert!(m.free_flow_density(0.3).is_err());
    }

    proptest! {
        #[test]
        fn flux_is_density_times_velocity(rho in 0.0..=1.0f64, vmax in 0.1..10.0f64, rmax in 0.1..10.0f64) {
            let m = FluxModel::new(vmax, rmax).unwrap();
            let rho = rho * rmax;
            prop_assert_eq!(m.flux(rho).unwrap(), rho * m.velocity(rho).unwrap());
            prop_assert!(m.flux(rho).unwrap() <= m.capacity() + 1e-15);
        }

        #[test]
        fn demand_supply_cover_capacity(rho in 0.0..=1.0f64) {
            let m = unit();
            let (d, s) = (m.demand(rho).unwrap(), m.supply(rho).unwrap());
            prop_assert!(d + s >= m.capacity());
            prop_assert!((d.min(s) - m.flux(rho).unwrap()).abs() < 1e-15);
            prop_assert!((m.godunov_flux(rho, rho).unwrap() - m.flux(rho).unwrap()).abs() < 1e-15);
        }

        #[test]
        fn demand_nondecreasing_supply_nonincreasing(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
            let m = unit();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(m.demand(lo).unwrap() <= m.demand(hi).unwrap());
            prop_assert!(m.supply(lo).unwrap() >= m.supply(hi).unwrap());
            prop_assert!(m.velocity(lo).unwrap() >= m.velocity(hi).unwrap());
        }

        #[test]
        fn riemann_profile_monotone_and_bounded(l in 0.0..=1.0f64, r in 0.0..=1.0f64) {
            let m = unit();
            let (lo, hi) = (l.min(r), l.max(r));
            let mut prev = m.riemann_eval(l, r, -2.0).unwrap();
            prop_assert_eq!(prev, l);
            for k in -199..=200 {
                let v = m.riemann_eval(l, r, k as f64 / 100.0).unwrap();
                prop_assert!(v >= lo - 1e-15 && v <= hi + 1e-15);
                if l <= r { prop_assert!(v >= prev); } else { prop_assert!(v <= prev); }
                prev = v;
            }
            prop_assert_eq!(prev, r);
        }
    }
}
