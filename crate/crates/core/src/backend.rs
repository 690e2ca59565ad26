//! Interchangeable master-equation treatments behind one trait.
//!
//! Each backend is registered by name in a [`BackendRegistry`] and selected at
//! run time. Solves go through [`BackendRegistry::solve`], which rescales all
//! energies to units of δ before calling the backend and converts the report
//! back afterwards.

use std::fmt;

use crate::error::{Error, Result};
use crate::params::{Baths, ReservoirParams, SystemParams};
use crate::thermo::CurrentReport;

/// One operating point: system and reservoir parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub system: SystemParams,
    pub baths: Baths,
}

impl Point {
    pub fn new(system: SystemParams, baths: Baths) -> Result<Self> {
        system.validate()?;
        Ok(Self { system, baths })
    }

    /// The same point with energies divided by δ (and β multiplied by δ).
    pub fn normalized(&self) -> (Point, f64) {
        let d = self.system.delta;
        let s = &self.system;
        let system = SystemParams {
            delta: 1.0,
            big_delta: s.big_delta / d,
            omega: s.omega / d,
            lambda: s.lambda / d,
            n_qutrits: s.n_qutrits,
        };
        let scale_bath = |r: &ReservoirParams| ReservoirParams {
            beta: r.beta * d,
            gamma_bare: r.gamma_bare / d,
            sigma: r.sigma / d,
            kind: r.kind,
        };
        let baths = Baths {
            cold: scale_bath(&self.baths.cold),
            hot: scale_bath(&self.baths.hot),
        };
        (Point { system, baths }, d)
    }
}

/// Knobs shared by all backends.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Largest Fourier cutoff the Redfield solver may try.
    pub redfield_cutoff_cap: usize,
    /// Relative change in the cold current below which the cutoff is accepted.
    pub redfield_tolerance: f64,
    /// Amplitude substituted for `λ = 0` when the Floquet steady state is not unique.
    pub lambda_shift: f64,
    /// Resolve degenerate steady states by projection instead of failing.
    pub lenient: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            redfield_cutoff_cap: 32,
            redfield_tolerance: 1e-3,
            lambda_shift: 1e-9,
            lenient: true,
        }
    }
}

/// A master-equation treatment producing stationary currents.
///
/// Implementations receive parameters in units of δ.
pub trait Backend: Send + Sync {
    fn name(&self) -> &'static str;

    /// Largest ensemble size the backend accepts, if limited.
    fn max_qutrits(&self) -> Option<usize> {
        None
    }

    fn solve(&self, point: &Point, opts: &SolveOptions) -> Result<CurrentReport>;
}

impl fmt::Debug for dyn Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Backend({})", self.name())
    }
}

/// Name-indexed collection of backends.
#[derive(Debug, Default)]
pub struct BackendRegistry {
    entries: Vec<Box<dyn Backend>>,
}

impl BackendRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `weak`, `floquet-lindblad`, `floquet-pauli` and `redfield`.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(crate::weak::WeakDriving));
        r.register(Box::new(crate::floquet_lindblad::FloquetLindblad::full()));
        r.register(Box::new(crate::floquet_lindblad::FloquetLindblad::pauli()));
        r.register(Box::new(crate::redfield::FloquetRedfield::default()));
        r
    }

    /// Add a backend; a later registration replaces an earlier one of the same name.
    pub fn register(&mut self, backend: Box<dyn Backend>) {
        self.entries.retain(|b| b.name() != backend.name());
        self.entries.push(backend);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Backend> {
        self.entries
            .iter()
            .find(|b| b.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnknownBackend(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|b| b.name()).collect()
    }

    /// Solve `point` with the named backend, working internally in units of δ.
    pub fn solve(&self, name: &str, point: &Point, opts: &SolveOptions) -> Result<CurrentReport> {
        let backend = self.get(name)?;
        if let Some(cap) = backend.max_qutrits() {
            if point.system.n_qutrits > cap {
                return Err(Error::Unsupported {
                    backend: backend.name(),
                    reason: format!("N = {} exceeds the cap {cap}", point.system.n_qutrits),
                });
            }
        }
        let (scaled, delta) = point.normalized();
        Ok(backend.solve(&scaled, opts)?.rescaled(delta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ReservoirKind;
    use proptest::prelude::*;

    fn point(delta: f64, n: usize, omega: f64, lambda: f64) -> Point {
        let res = |kind, beta: f64| ReservoirParams::new(kind, beta / delta, 0.1 * delta, delta).unwrap();
        let baths = Baths::new(res(ReservoirKind::Cold, 1.5), res(ReservoirKind::Hot, 1.0)).unwrap();
        let system = SystemParams::new(delta, 2.0 * delta, omega * delta, lambda * delta, n).unwrap();
        Point::new(system, baths).unwrap()
    }

    #[test]
    fn registry_lookup() {
        let r = BackendRegistry::with_defaults();
        assert_eq!(r.names(), vec!["weak", "floquet-lindblad", "floquet-pauli", "redfield"]);
        assert!(matches!(r.get("exact"), Err(Error::UnknownBackend(_))));
        let mut r = r;
        r.register(Box::new(crate::redfield::FloquetRedfield { max_n: 2 }));
        assert_eq!(r.names().len(), 4);
        assert_eq!(r.get("redfield").unwrap().max_qutrits(), Some(2));
        let e = r.solve("redfield", &point(1.0, 3, 1.0, 0.5), &SolveOptions::default());
        assert!(matches!(e, Err(Error::Unsupported { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn currents_scale_with_delta_squared(
            s in 0.2..5.0f64,
            n in 1usize..4,
            omega in -2.0..2.5f64,
            lambda in -1.5..1.5f64,
            backend in prop::sample::select(vec!["weak", "floquet-lindblad", "floquet-pauli", "redfield"]),
        ) {
            let r = BackendRegistry::with_defaults();
            let opts = SolveOptions::default();
            let unit = r.solve(backend, &point(1.0, n, omega, lambda), &opts).unwrap();
            let scaled = r.solve(backend, &point(s, n, omega, lambda), &opts).unwrap();
            let tol = 1e-12 * s * s * unit.i_cold.abs().max(unit.i_hot.abs()).max(1e-300);
            prop_assert!((scaled.i_cold - s * s * unit.i_cold).abs() <= tol);
            prop_assert!((scaled.i_hot - s * s * unit.i_hot).abs() <= tol);
            prop_assert!((scaled.power - s * s * unit.power).abs() <= tol.max(1e-12 * s * s * unit.power.abs()));
            prop_assert!((scaled.entropy_rate - s * unit.entropy_rate).abs() <= 1e-12 * s * unit.entropy_rate.abs().max(1e-300));
            match (scaled.cop, unit.cop) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-9),
                (a, b) => prop_assert_eq!(a, b),
            }
        }
    }
}
