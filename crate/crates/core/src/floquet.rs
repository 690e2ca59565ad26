//! Closed-form Floquet decomposition of the circularly driven qutrit.
//!
//! The propagator factorizes into a kick `U_kick(t) = exp(+iΩt/2 (|1⟩⟨1| − |2⟩⟨2|))`
//! and evolution under the static Floquet Hamiltonian
//! `H_F = (δ + Ω/2)|1⟩⟨1| + (Δ − Ω/2)|2⟩⟨2| + λ(|1⟩⟨2| + |2⟩⟨1|)`.
//! Its eigenstates in the excited block are
//! `|−⟩ = cos α |1⟩ − s sin α |2⟩` and `|+⟩ = sin α |1⟩ + s cos α |2⟩`
//! with `s = sgn λ` and `α ∈ [0, π/2]`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::Matrix2;

use crate::params::{Baths, SystemParams};

/// Ratio `gap / max rate` at or above which the secular approximation is trusted.
pub const SECULAR_THRESHOLD: f64 = 10.0;

/// Label of a single-qutrit Floquet state in the excited block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FloquetBranch {
    Minus,
    Plus,
}

impl FloquetBranch {
    pub const BOTH: [FloquetBranch; 2] = [FloquetBranch::Minus, FloquetBranch::Plus];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetData {
    pub eps_minus: f64,
    pub eps_plus: f64,
    /// Rotation angle in `[0, π/2]`.
    pub alpha: f64,
    /// `+1` or `−1`, the sign of the driving amplitude (`+1` at `λ = 0`).
    pub lambda_sign: f64,
    pub gap: f64,
    pub omega: f64,
}

impl FloquetData {
    pub fn new(p: &SystemParams) -> Self {
        let (eps_minus, eps_plus) = floquet_energies(p);
        Self {
            eps_minus,
            eps_plus,
            alpha: rotation_angle(p),
            lambda_sign: if p.lambda < 0.0 { -1.0 } else { 1.0 },
            gap: eps_plus - eps_minus,
            omega: p.omega,
        }
    }

    /// `α` with the sign of `λ` folded in; this is the angle the rotated
    /// collective operators are built with.
    pub fn signed_alpha(&self) -> f64 {
        self.lambda_sign * self.alpha
    }

    /// `(sin α', cos α')`, exact at `α ∈ {0, π/2}`.
    pub fn sin_cos(&self) -> (f64, f64) {
        if self.alpha == FRAC_PI_2 {
            (self.lambda_sign, 0.0)
        } else {
            self.signed_alpha().sin_cos()
        }
    }

    pub fn energy(&self, a: FloquetBranch) -> f64 {
        match a {
            FloquetBranch::Minus => self.eps_minus,
            FloquetBranch::Plus => self.eps_plus,
        }
    }

    /// Amplitudes `(⟨1|a⟩, ⟨2|a⟩)` in the convention of the rotated operators,
    /// `|−⟩ = cos α' |1⟩ − sin α' |2⟩`, `|+⟩ = sin α' |1⟩ + cos α' |2⟩`, `α' = sgn(λ) α`.
    pub fn overlaps(&self, a: FloquetBranch) -> (f64, f64) {
        let (s, c) = self.sin_cos();
        match a {
            FloquetBranch::Minus => (c, -s),
            FloquetBranch::Plus => (s, c),
        }
    }

    /// Frequency `ε_a − Ω/2` exchanged with the cold reservoir on a transition into `|a⟩`.
    pub fn cold_frequency(&self, a: FloquetBranch) -> f64 {
        self.energy(a) - self.omega / 2.0
    }

    /// Frequency `ε_a + Ω/2` exchanged with the hot reservoir.
    pub fn hot_frequency(&self, a: FloquetBranch) -> f64 {
        self.energy(a) + self.omega / 2.0
    }
}

/// `ε_± = (δ+Δ)/2 ± ½√((Δ−δ−Ω)² + 4λ²)`, returned as `(ε_−, ε_+)`.
pub fn floquet_energies(p: &SystemParams) -> (f64, f64) {
    let mean = 0.5 * (p.delta + p.big_delta);
    let half = 0.5 * p.detuning().hypot(2.0 * p.lambda);
    (mean - half, mean + half)
}

/// `tan α = (x + √(x² + 4λ²)) / (2|λ|)` with `x = Ω − Δ + δ`.
///
/// At `λ = 0` the angle is fixed by the sign of the detuning: `0` for red
/// detuning, `π/2` for blue detuning and `π/4` exactly on resonance.
pub fn rotation_angle(p: &SystemParams) -> f64 {
    let x = -p.detuning();
    let lam = p.lambda.abs();
    if lam == 0.0 {
        return if x < 0.0 {
            0.0
        } else if x > 0.0 {
            FRAC_PI_2
        } else {
            FRAC_PI_4
        };
    }
    let r = x.hypot(2.0 * lam);
    let num = if x >= 0.0 { x + r } else { 4.0 * lam * lam / (r - x) };
    num.atan2(2.0 * lam)
}

/// Phases `(+Ωt/2, −Ωt/2)` picked up by levels `|1⟩` and `|2⟩` under the kick.
pub fn kick_phases(p: &SystemParams, t: f64) -> (f64, f64) {
    let half = 0.5 * p.omega * t;
    (half, -half)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularDiagnostic {
    pub ok: bool,
    /// `gap / max γ`; infinite when every rate vanishes.
    pub ratio: f64,
}

/// Secular validity: the quasi-energy gap must be at least
/// [`SECULAR_THRESHOLD`] times the largest rate at the Floquet transition
/// frequencies `±(ε_a ∓ Ω/2)`. The comparison is inclusive.
pub fn secular_validity(p: &SystemParams, baths: &Baths) -> SecularDiagnostic {
    let f = FloquetData::new(p);
    let mut max_rate: f64 = 0.0;
    for a in FloquetBranch::BOTH {
        for sign in [1.0, -1.0] {
            max_rate = max_rate
                .max(baths.cold.rate(sign * f.cold_frequency(a)))
                .max(baths.hot.rate(sign * f.hot_frequency(a)));
        }
    }
    let ratio = if max_rate > 0.0 { f.gap / max_rate } else { f64::INFINITY };
    SecularDiagnostic {
        ok: ratio >= SECULAR_THRESHOLD,
        ratio,
    }
}

/// The excited 2×2 block of `H_F` in the `{|1⟩, |2⟩}` basis.
pub fn floquet_block(p: &SystemParams) -> Matrix2<f64> {
    Matrix2::new(
        p.delta + 0.5 * p.omega,
        p.lambda,
        p.lambda,
        p.big_delta - 0.5 * p.omega,
    )
}
