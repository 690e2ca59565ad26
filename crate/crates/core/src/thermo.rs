//! Current reports, coefficient of performance and entropy production.

use crate::params::Baths;

/// Cold currents with `|I_c| ≤ COOLING_FLOOR · max(Γ) · δ` do not count as cooling.
pub const COOLING_FLOOR: f64 = 1e-12;

/// Diagnostics attached to a solved point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Flags {
    /// Secular validity of the Floquet decomposition, where it applies.
    pub secular_ok: Option<bool>,
    /// A non-unique steady state was resolved by projection.
    pub degenerate: bool,
    /// `λ = 0` was replaced by a tiny positive amplitude.
    pub lambda_shifted: bool,
    /// Fourier cutoff accepted by the Redfield solver.
    pub cutoff: Option<usize>,
    /// The "cold" reservoir is hotter than the "hot" one.
    pub reversed_baths: bool,
    /// Minimum eigenvalue below the positivity tolerance of the backend.
    pub positivity_warning: bool,
    /// The Redfield cutoff history was not monotonically decreasing.
    pub nonmonotone_convergence: bool,
}

impl Flags {
    /// Semicolon-separated tokens for CSV output; empty when nothing is set.
    pub fn tokens(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.secular_ok == Some(false) {
            out.push("secular_violated".to_string());
        }
        if self.degenerate {
            out.push("degenerate".to_string());
        }
        if self.lambda_shifted {
            out.push("lambda_shifted".to_string());
        }
        if let Some(c) = self.cutoff {
            out.push(format!("cutoff={c}"));
        }
        if self.reversed_baths {
            out.push("reversed_baths".to_string());
        }
        if self.positivity_warning {
            out.push("positivity".to_string());
        }
        if self.nonmonotone_convergence {
            out.push("nonmonotone_cutoff".to_string());
        }
        out
    }
}

/// Stationary (or period-averaged) energy balance of one operating point.
///
/// Currents are positive when energy leaves the respective reservoir.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentReport {
    pub i_cold: f64,
    pub i_hot: f64,
    /// Power injected by the drive. Backends with an independent power
    /// expression store it here; otherwise it is `−I_c − I_h`.
    pub power: f64,
    /// `κ/κ_Carnot`; `None` when the power vanishes.
    pub cop: Option<f64>,
    pub entropy_rate: f64,
    pub flags: Flags,
}

impl CurrentReport {
    pub fn new(i_cold: f64, i_hot: f64, power: Option<f64>, baths: &Baths, energy_scale: f64) -> Self {
        let power = power.unwrap_or(-i_cold - i_hot);
        let report = Self {
            i_cold,
            i_hot,
            power,
            cop: None,
            entropy_rate: entropy_rate(i_cold, i_hot, baths),
            flags: Flags {
                reversed_baths: baths.reversed(),
                ..Flags::default()
            },
        };
        Self {
            cop: cop(&report, baths, energy_scale),
            ..report
        }
    }

    /// `|P + I_c + I_h|`.
    pub fn first_law_defect(&self) -> f64 {
        (self.power + self.i_cold + self.i_hot).abs()
    }

    /// Rescale a report computed with energies in units of `scale`.
    pub fn rescaled(mut self, scale: f64) -> Self {
        let s2 = scale * scale;
        self.i_cold *= s2;
        self.i_hot *= s2;
        self.power *= s2;
        self.entropy_rate *= scale;
        self
    }
}

/// `−β_c I_c − β_h I_h`.
pub fn entropy_rate(i_cold: f64, i_hot: f64, baths: &Baths) -> f64 {
    -baths.cold.beta * i_cold - baths.hot.beta * i_hot
}

/// Renormalized coefficient of performance
/// `κ/κ_Ca = I_c Θ(I_c) / (−I_c − I_h) · (β_c − β_h)/β_h`.
///
/// Zero when the cold current does not exceed the cooling floor; `None` when
/// the power vanishes.
pub fn cop(report: &CurrentReport, baths: &Baths, energy_scale: f64) -> Option<f64> {
    let power = -report.i_cold - report.i_hot;
    if power == 0.0 {
        return None;
    }
    let floor = COOLING_FLOOR * baths.max_coupling() * energy_scale;
    if report.i_cold <= floor {
        return Some(0.0);
    }
    let carnot_ratio = (baths.cold.beta - baths.hot.beta) / baths.hot.beta;
    Some(report.i_cold / power * carnot_ratio)
}
