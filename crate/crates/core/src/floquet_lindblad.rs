//! Floquet-Lindblad treatment and its Pauli rate-equation reduction.
//!
//! In the Floquet picture each reservoir sees the tilted jumps
//! `S_a^∓` between `|0⟩` and the Floquet states `|a⟩`, weighted by
//! `|⟨1|a⟩|²` (cold) or `|⟨2|a⟩|²` (hot) and evaluated at the shifted
//! frequencies `ε_a − Ω/2` (cold) and `ε_a + Ω/2` (hot).
//!
//! The full generator is assembled in the bare `|M;m⟩` coordinates from the
//! rotated collective operators. In the rotated basis `|M,m⟩` it maps
//! populations to populations only, which yields the Pauli equation over
//! `(N+1)(N+2)/2` populations with Clebsch-Gordan factors such as
//! `(N−M−m)(m+1)`.

use sprs::{CsMat, TriMat};

use crate::backend::{Backend, Point, SolveOptions};
use crate::basis::{build_operator, BasisIndex, CollectiveBasis, OperatorKind};
use crate::error::{Error, Result};
use crate::floquet::{secular_validity, FloquetBranch, FloquetData};
use crate::linalg;
use crate::params::{Baths, ReservoirKind, SystemParams};
use crate::superop::{
    complexify, steady_state, Degeneracy, Generator, GeneratorBuilder, SteadyState, Weight,
    LINDBLAD_POSITIVITY_TOL,
};
use crate::thermo::CurrentReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FloquetMode {
    Full,
    Pauli,
}

/// Full Floquet-Lindblad generator in bare coordinates.
#[derive(Debug, Clone)]
pub struct FloquetLindbladGenerator {
    pub generator: Generator,
    pub floquet: FloquetData,
    pub system: SystemParams,
    pub baths: Baths,
}

/// Collective Floquet Hamiltonian
/// `(δ + Ω/2) N_δ + (Δ − Ω/2) N_Δ + λ (J_w^− + J_w^+)` in bare coordinates.
pub fn collective_floquet_hamiltonian(p: &SystemParams) -> CsMat<f64> {
    let n = p.n_qutrits;
    let op = |k| build_operator(k, n, 0.0).matrix;
    use OperatorKind::*;
    let diag = &op(NumberSmall).map(|x| x * (p.delta + 0.5 * p.omega))
        + &op(NumberLarge).map(|x| x * (p.big_delta - 0.5 * p.omega));
    &diag + &(&op(JwMinus) + &op(JwPlus)).map(|x| x * p.lambda)
}

/// Assemble the dissipator families of the listed reservoirs.
pub fn build_full_generator(p: &SystemParams, baths: &Baths, families: &[ReservoirKind]) -> Result<FloquetLindbladGenerator> {
    p.validate()?;
    let f = FloquetData::new(p);
    let n = p.n_qutrits;
    let alpha = f.signed_alpha();
    let d = crate::basis::basis_dim(n);
    let mut b = GeneratorBuilder::new(d);
    b.hamiltonian(&complexify(&collective_floquet_hamiltonian(p)));
    for a in FloquetBranch::BOTH {
        let (lower, upper) = match a {
            FloquetBranch::Minus => (OperatorKind::SMinusMinus, OperatorKind::SMinusPlus),
            FloquetBranch::Plus => (OperatorKind::SPlusMinus, OperatorKind::SPlusPlus),
        };
        let lo = complexify(&build_operator(lower, n, alpha).matrix);
        let up = complexify(&build_operator(upper, n, alpha).matrix);
        let (o1, o2) = f.overlaps(a);
        for kind in families {
            let (res, w, weight) = match kind {
                ReservoirKind::Cold => (&baths.cold, f.cold_frequency(a), o1 * o1),
                ReservoirKind::Hot => (&baths.hot, f.hot_frequency(a), o2 * o2),
            };
            let tag = |e| Weight { reservoir: *kind, energy: e };
            b.dissipator(&lo, weight * res.rate(w), Some(tag(w)))?;
            b.dissipator(&up, weight * res.rate(-w), Some(tag(-w)))?;
        }
    }
    Ok(FloquetLindbladGenerator {
        generator: b.finish(true),
        floquet: f,
        system: *p,
        baths: *baths,
    })
}

/// One transition `|M,m⟩ → |M,m+1⟩` (branch `−`) or `|M+1,m⟩` (branch `+`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliEdge {
    pub from: usize,
    pub to: usize,
    pub branch: FloquetBranch,
    pub up_cold: f64,
    pub down_cold: f64,
    pub up_hot: f64,
    pub down_hot: f64,
    /// Energy absorbed from the cold reservoir on the upward jump, `ε_a − Ω/2`.
    pub cold_energy: f64,
    /// Energy absorbed from the hot reservoir on the upward jump, `ε_a + Ω/2`.
    pub hot_energy: f64,
}

impl PauliEdge {
    /// Net upward probability flows `(cold, hot)` for populations `p`.
    pub fn flows(&self, p: &[f64]) -> (f64, f64) {
        (
            self.up_cold * p[self.from] - self.down_cold * p[self.to],
            self.up_hot * p[self.from] - self.down_hot * p[self.to],
        )
    }
}

/// Pauli rate matrix over the rotated basis, with per-edge rates.
#[derive(Debug, Clone)]
pub struct PauliRateMatrix {
    pub matrix: CsMat<f64>,
    pub edges: Vec<PauliEdge>,
    pub floquet: FloquetData,
}

impl PauliRateMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn column_sum_defect(&self) -> f64 {
        let mut sums = vec![0.0; self.dim()];
        let mut scale: f64 = 0.0;
        for (v, (_, j)) in self.matrix.iter() {
            sums[j] += v;
            scale = scale.max(v.abs());
        }
        sums.iter().map(|s| s.abs()).fold(0.0, f64::max) / scale.max(f64::MIN_POSITIVE)
    }
}

/// Clebsch-Gordan factor of the upward transition of `branch` from `s`.
pub fn clebsch_gordan(n: usize, s: BasisIndex, branch: FloquetBranch) -> f64 {
    let free = n - s.excitations();
    match branch {
        FloquetBranch::Minus => (free * (s.small + 1)) as f64,
        FloquetBranch::Plus => (free * (s.big + 1)) as f64,
    }
}

pub fn build_pauli(p: &SystemParams, baths: &Baths) -> Result<PauliRateMatrix> {
    p.validate()?;
    let f = FloquetData::new(p);
    let n = p.n_qutrits;
    let basis = CollectiveBasis::new(n);
    let d = basis.dim();
    let mut tri = TriMat::new((d, d));
    let mut edges = Vec::with_capacity(2 * d);
    for (i, s) in basis.states().iter().enumerate() {
        if s.excitations() == n {
            continue;
        }
        for a in FloquetBranch::BOTH {
            let to = match a {
                FloquetBranch::Minus => BasisIndex::new(s.big, s.small + 1),
                FloquetBranch::Plus => BasisIndex::new(s.big + 1, s.small),
            }
            .linear();
            let cg = clebsch_gordan(n, *s, a);
            let (o1, o2) = f.overlaps(a);
            let (wc, wh) = (f.cold_frequency(a), f.hot_frequency(a));
            let e = PauliEdge {
                from: i,
                to,
                branch: a,
                up_cold: cg * o1 * o1 * baths.cold.rate(-wc),
                down_cold: cg * o1 * o1 * baths.cold.rate(wc),
                up_hot: cg * o2 * o2 * baths.hot.rate(-wh),
                down_hot: cg * o2 * o2 * baths.hot.rate(wh),
                cold_energy: wc,
                hot_energy: wh,
            };
            let up = e.up_cold + e.up_hot;
            let down = e.down_cold + e.down_hot;
            tri.add_triplet(to, i, up);
            tri.add_triplet(i, i, -up);
            tri.add_triplet(i, to, down);
            tri.add_triplet(to, to, -down);
            edges.push(e);
        }
    }
    Ok(PauliRateMatrix {
        matrix: tri.to_csc(),
        edges,
        floquet: f,
    })
}

/// Stationary populations of the rate matrix.
#[derive(Debug, Clone)]
pub struct PauliSolution {
    pub populations: Vec<f64>,
    pub degenerate: bool,
    pub report: CurrentReport,
}

/// Currents as edge flows times energy weights; power from the drive's share
/// `Ω/2` of every jump.
pub fn pauli_currents(rates: &PauliRateMatrix, p: &SystemParams, baths: &Baths, lenient: bool) -> Result<PauliSolution> {
    let trace: Vec<usize> = (0..rates.dim()).collect();
    let sol = linalg::stationary_vector(&rates.matrix, &trace, lenient)?;
    let pops: Vec<f64> = sol.vector.iter().copied().collect();
    let (mut ic, mut ih, mut drive) = (0.0, 0.0, 0.0);
    for e in &rates.edges {
        let (fc, fh) = e.flows(&pops);
        ic += e.cold_energy * fc;
        ih += e.hot_energy * fh;
        drive += fc - fh;
    }
    let power = 0.5 * p.omega * drive;
    let mut report = CurrentReport::new(ic, ih, Some(power), baths, p.delta);
    report.flags.degenerate = sol.degenerate;
    Ok(PauliSolution {
        populations: pops,
        degenerate: sol.degenerate,
        report,
    })
}

/// Full-generator steady state and counting-field currents.
#[derive(Debug, Clone)]
pub struct FullSolution {
    pub state: SteadyState,
    pub report: CurrentReport,
}

pub fn full_currents(gen: &FloquetLindbladGenerator, policy: Degeneracy) -> Result<FullSolution> {
    let state = steady_state(&gen.generator.generator, policy)?;
    let ic = gen.generator.cold.trace_against(&state.rho.matrix).re;
    let ih = gen.generator.hot.trace_against(&state.rho.matrix).re;
    let mut report = CurrentReport::new(ic, ih, None, &gen.baths, gen.system.delta);
    report.flags.degenerate = state.degenerate;
    report.flags.positivity_warning = state.rho.min_eigenvalue() < -LINDBLAD_POSITIVITY_TOL;
    Ok(FullSolution { state, report })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    GuaranteedCooling,
    LowerCycleCandidate,
    None,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::GuaranteedCooling => "guaranteed_cooling",
            Classification::LowerCycleCandidate => "lower_cycle_candidate",
            Classification::None => "none",
        }
    }
}

/// Cycle-analysis cooling conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingConditions {
    pub classification: Classification,
    /// `ε_− − Ω/2`; the first sufficient condition is `> 0`.
    pub lower_gap: f64,
    /// `β_h(ε_+ + Ω/2) − β_c(ε_+ − Ω/2)`; the second condition is `> 0`.
    pub upper_affinity: f64,
    /// `β_c(ε_− − Ω/2) − β_h(ε_− + Ω/2)`; the lower-cycle condition is `> 0`.
    pub lower_affinity: f64,
    /// False when the drive does not mix `|1⟩` and `|2⟩` (`sin 2α = 0`), so
    /// that no cycle connects the reservoirs.
    pub cycles_exist: bool,
}

impl CoolingConditions {
    pub fn first(&self) -> bool {
        self.lower_gap > 0.0
    }

    pub fn second(&self) -> bool {
        self.upper_affinity > 0.0
    }

    pub fn lower_cycle(&self) -> bool {
        self.lower_gap < 0.0 && self.lower_affinity > 0.0
    }
}

/// Classify a point. Guaranteed cooling requires `ε_− − Ω/2 > 0` and
/// `β_c(ε_+ − Ω/2) < β_h(ε_+ + Ω/2)`; the lower-cycle candidate requires
/// `ε_− − Ω/2 < 0` and `β_c(ε_− − Ω/2) > β_h(ε_− + Ω/2)`. Neither applies
/// without cycles.
pub fn cooling_conditions(p: &SystemParams, baths: &Baths) -> CoolingConditions {
    let f = FloquetData::new(p);
    let (bc, bh) = (baths.cold.beta, baths.hot.beta);
    let half = 0.5 * p.omega;
    let lower_gap = f.eps_minus - half;
    let upper_affinity = bh * (f.eps_plus + half) - bc * (f.eps_plus - half);
    let lower_affinity = bc * (f.eps_minus - half) - bh * (f.eps_minus + half);
    let (s, c) = f.sin_cos();
    let cycles_exist = s * c != 0.0;
    let mut c = CoolingConditions {
        classification: Classification::None,
        lower_gap,
        upper_affinity,
        lower_affinity,
        cycles_exist,
    };
    if cycles_exist {
        if c.first() && c.second() {
            c.classification = Classification::GuaranteedCooling;
        } else if c.lower_cycle() {
            c.classification = Classification::LowerCycleCandidate;
        }
    }
    c
}

/// The Floquet-Lindblad backend in either mode.
#[derive(Debug, Clone, Copy)]
pub struct FloquetLindblad {
    pub mode: FloquetMode,
}

/// Largest N of the full-generator mode.
pub const FULL_MODE_CAP: usize = 10;

impl FloquetLindblad {
    pub fn full() -> Self {
        Self { mode: FloquetMode::Full }
    }

    pub fn pauli() -> Self {
        Self { mode: FloquetMode::Pauli }
    }

    fn solve_at(&self, system: &SystemParams, baths: &Baths, policy: Degeneracy) -> Result<CurrentReport> {
        match self.mode {
            FloquetMode::Full => {
                let gen = build_full_generator(system, baths, &[ReservoirKind::Cold, ReservoirKind::Hot])?;
                Ok(full_currents(&gen, policy)?.report)
            }
            FloquetMode::Pauli => {
                let rates = build_pauli(system, baths)?;
                Ok(pauli_currents(&rates, system, baths, policy == Degeneracy::Lenient)?.report)
            }
        }
    }
}

impl Backend for FloquetLindblad {
    fn name(&self) -> &'static str {
        match self.mode {
            FloquetMode::Full => "floquet-lindblad",
            FloquetMode::Pauli => "floquet-pauli",
        }
    }

    fn max_qutrits(&self) -> Option<usize> {
        match self.mode {
            FloquetMode::Full => Some(FULL_MODE_CAP),
            FloquetMode::Pauli => None,
        }
    }

    /// A degenerate steady state at `λ = 0` is retried at `λ = lambda_shift`
    /// (flagged); if that is still degenerate the lenient projection is used
    /// when allowed.
    fn solve(&self, point: &Point, opts: &SolveOptions) -> Result<CurrentReport> {
        let secular = secular_validity(&point.system, &point.baths).ok;
        let mut report = match self.solve_at(&point.system, &point.baths, Degeneracy::Strict) {
            Err(Error::DegenerateSteadyState { .. }) if point.system.lambda == 0.0 => {
                let shifted = point.system.with_lambda(opts.lambda_shift);
                let policy = if opts.lenient { Degeneracy::Lenient } else { Degeneracy::Strict };
                let mut r = self.solve_at(&shifted, &point.baths, policy)?;
                r.flags.lambda_shifted = true;
                r
            }
            Err(Error::DegenerateSteadyState { .. }) if opts.lenient => {
                self.solve_at(&point.system, &point.baths, Degeneracy::Lenient)?
            }
            other => other?,
        };
        report.flags.secular_ok = Some(secular);
        let (sin, cos) = FloquetData::new(&point.system).sin_cos();
        if sin * cos != 0.0 {
            return Ok(report);
        }
        // Each reservoir couples a single Floquet branch and only changes its
        // own excitation number: every stationary current vanishes.
        let mut zero = CurrentReport::new(0.0, 0.0, Some(0.0), &point.baths, 1.0);
        zero.flags = report.flags;
        Ok(zero)
    }
}
