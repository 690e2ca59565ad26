//! Physical parameters and reservoir correlation rates.
//!
//! The reservoirs carry a Lorentz-Drude spectral function
//! `Γ(ω) = Γ ω σ / (σ² + ω²)`, continued to negative frequencies as an odd
//! function. The dissipator rates are `γ(ω) = Γ(ω) [1 + n(ω)]` with the Bose
//! factor `n(ω) = 1 / (e^{βω} − 1)`. With the odd continuation `γ(ω) ≥ 0` for
//! every real `ω` and the pair obeys the KMS relation `γ(−ω) = e^{−βω} γ(ω)`.

use std::fmt;

use crate::error::{Error, Result};

/// Below this `|βω|` the rate is evaluated by its second-order Taylor series.
pub const SMALL_BETA_OMEGA: f64 = 1e-8;

/// Energies of the single qutrit, driving, and ensemble size.
///
/// Level `|1⟩` sits at `delta`, level `|2⟩` at `big_delta`; the circular drive
/// couples them with amplitude `lambda` at angular frequency `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub delta: f64,
    pub big_delta: f64,
    pub omega: f64,
    pub lambda: f64,
    pub n_qutrits: usize,
}

impl SystemParams {
    pub fn new(delta: f64, big_delta: f64, omega: f64, lambda: f64, n_qutrits: usize) -> Result<Self> {
        let p = Self {
            delta,
            big_delta,
            omega,
            lambda,
            n_qutrits,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::param("delta", format!("must be positive and finite, got {}", self.delta)));
        }
        if !(self.big_delta > self.delta && self.big_delta.is_finite()) {
            return Err(Error::param(
                "Delta",
                format!("must exceed delta = {}, got {}", self.delta, self.big_delta),
            ));
        }
        if !self.omega.is_finite() {
            return Err(Error::param("Omega", "must be finite"));
        }
        if !self.lambda.is_finite() {
            return Err(Error::param("lambda", "must be real and finite"));
        }
        if self.n_qutrits == 0 {
            return Err(Error::param("n_qutrits", "must be at least 1"));
        }
        Ok(())
    }

    /// Detuning `Δ − δ − Ω` of the drive from the `|1⟩ ↔ |2⟩` transition.
    pub fn detuning(&self) -> f64 {
        self.big_delta - self.delta - self.omega
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    pub fn with_n(self, n_qutrits: usize) -> Self {
        Self { n_qutrits, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReservoirKind {
    Cold,
    Hot,
}

impl fmt::Display for ReservoirKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReservoirKind::Cold => f.write_str("cold"),
            ReservoirKind::Hot => f.write_str("hot"),
        }
    }
}

/// A thermal bosonic reservoir with a Lorentz-Drude spectral function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirParams {
    pub beta: f64,
    pub gamma_bare: f64,
    pub sigma: f64,
    pub kind: ReservoirKind,
}

impl ReservoirParams {
    pub fn new(kind: ReservoirKind, beta: f64, gamma_bare: f64, sigma: f64) -> Result<Self> {
        let r = Self {
            beta,
            gamma_bare,
            sigma,
            kind,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be positive and finite, got {v}")))
            }
        };
        check("beta", self.beta)?;
        check("gamma_bare", self.gamma_bare)?;
        check("sigma", self.sigma)
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        spectral_density(omega, self)
    }

    pub fn rate(&self, omega: f64) -> f64 {
        rate_gamma(omega, self)
    }

    /// Bose occupation at `omega` for this reservoir's temperature.
    pub fn occupation(&self, omega: f64) -> Result<f64> {
        bose_occupation(omega, self.beta)
    }
}

/// The cold/hot reservoir pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baths {
    pub cold: ReservoirParams,
    pub hot: ReservoirParams,
}

impl Baths {
    pub fn new(cold: ReservoirParams, hot: ReservoirParams) -> Result<Self> {
        if cold.kind != ReservoirKind::Cold || hot.kind != ReservoirKind::Hot {
            return Err(Error::param("reservoirs", "expected a (cold, hot) pair"));
        }
        cold.validate()?;
        hot.validate()?;
        Ok(Self { cold, hot })
    }

    /// True when the "cold" reservoir is actually the hotter one. Accepted, but
    /// sweeps flag such points.
    pub fn reversed(&self) -> bool {
        self.cold.beta < self.hot.beta
    }

    pub fn get(&self, kind: ReservoirKind) -> &ReservoirParams {
        match kind {
            ReservoirKind::Cold => &self.cold,
            ReservoirKind::Hot => &self.hot,
        }
    }

    /// Largest dissipative rate scale `max(Γ_c, Γ_h)`.
    pub fn max_coupling(&self) -> f64 {
        self.cold.gamma_bare.max(self.hot.gamma_bare)
    }
}

/// Lorentz-Drude spectral function `Γ ω σ / (σ² + ω²)`, odd in `ω`.
pub fn spectral_density(omega: f64, res: &ReservoirParams) -> f64 {
    res.gamma_bare * omega * res.sigma / (res.sigma * res.sigma + omega * omega)
}

/// `1 / (e^{βω} − 1)`. Negative for `ω < 0`.
pub fn bose_occupation(omega: f64, beta: f64) -> Result<f64> {
    if omega == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    Ok(1.0 / (beta * omega).exp_m1())
}

/// Fourier transform of the reservoir correlation function, `Γ(ω)[1 + n(ω)]`.
///
/// Written as `Γσ/(σ²+ω²) · ω/(1 − e^{−βω})`, which is finite and
/// non-negative on the whole real axis; for `|βω| < 1e-8` the second factor
/// is replaced by `(1 + x/2 + x²/12)/β` with `x = βω`.
pub fn rate_gamma(omega: f64, res: &ReservoirParams) -> f64 {
    let lorentz = res.gamma_bare * res.sigma / (res.sigma * res.sigma + omega * omega);
    let x = res.beta * omega;
    let thermal = if x.abs() < SMALL_BETA_OMEGA {
        (1.0 + x / 2.0 + x * x / 12.0) / res.beta
    } else {
        omega / -(-x).exp_m1()
    };
    lorentz * thermal
}
