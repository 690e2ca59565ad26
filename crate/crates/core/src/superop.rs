//! Vectorized superoperators, steady states and Fourier-component stacks.
//!
//! Vectorization is column stacking: `ρ_ij` sits at index `i + j·d`, so that
//! `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`. This convention is frozen.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};
use crate::linalg;
use crate::params::ReservoirKind;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
#[cfg(test)]
const ONE: C64 = C64::new(1.0, 0.0);
const MINUS_I: C64 = C64::new(0.0, -1.0);

/// Hermiticity tolerance for returned density matrices.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Positivity tolerance for Lindblad steady states.
pub const LINDBLAD_POSITIVITY_TOL: f64 = 1e-8;
/// Positivity tolerance for Redfield states (monitored only).
pub const REDFIELD_POSITIVITY_TOL: f64 = 1e-6;

/// Position of `ρ_ij` in the column-stacked vector.
#[inline]
pub fn vec_index(i: usize, j: usize, d: usize) -> usize {
    i + j * d
}

/// Promote a real sparse operator to complex entries.
pub fn complexify(m: &CsMat<f64>) -> CsMat<C64> {
    m.map(|&x| C64::new(x, 0.0))
}

fn adjoint(m: &CsMat<C64>) -> CsMat<C64> {
    m.transpose_view().map(|x| x.conj()).to_csc()
}

fn product(a: &CsMat<C64>, b: &CsMat<C64>) -> CsMat<C64> {
    (&a.to_csr() * &b.to_csr()).to_csc()
}

fn hermiticity_defect(m: &CsMat<C64>) -> f64 {
    let diff = m - &adjoint(m);
    diff.iter().map(|(v, _)| v.norm()).fold(0.0, f64::max)
}

/// A linear map on vectorized `d × d` matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub dim: usize,
    pub matrix: CsMat<C64>,
    pub trace_preserving: bool,
}

impl Superoperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            matrix: CsMat::zero((dim * dim, dim * dim)).to_csc(),
            trace_preserving: true,
        }
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let v = sparse_matvec(&self.matrix, rho.as_slice());
        DMatrix::from_vec(self.dim, self.dim, v)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.matrix.rows(), self.matrix.cols());
        for (v, (i, j)) in self.matrix.iter() {
            out[(i, j)] += *v;
        }
        out
    }

    /// Largest entry of `vec(1)ᵀ L`; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        trace_row(&self.matrix, self.dim).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn norm_max(&self) -> f64 {
        self.matrix.iter().map(|(v, _)| v.norm()).fold(0.0, f64::max)
    }

    pub fn plus(&self, other: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix + &other.matrix,
            trace_preserving: self.trace_preserving && other.trace_preserving,
        }
    }
}

/// `vec(1)ᵀ M` as a dense row.
fn trace_row(m: &CsMat<C64>, d: usize) -> Vec<C64> {
    let mut row = vec![ZERO; m.cols()];
    for (v, (r, c)) in m.iter() {
        if r % d == r / d {
            row[c] += *v;
        }
    }
    row
}

fn sparse_matvec(m: &CsMat<C64>, x: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; m.rows()];
    for (v, (i, j)) in m.iter() {
        out[i] += *v * x[j];
    }
    out
}

/// `−i ∂χ L(χ)|χ=0` for one reservoir; `tr(𝒥 ρ)` is the energy current
/// leaving that reservoir.
#[derive(Debug, Clone)]
pub struct CurrentSuperoperator {
    pub reservoir: ReservoirKind,
    pub dim: usize,
    pub matrix: CsMat<C64>,
    trace_row: Vec<(usize, C64)>,
}

impl CurrentSuperoperator {
    pub fn new(reservoir: ReservoirKind, dim: usize, matrix: CsMat<C64>) -> Self {
        let trace_row = trace_row(&matrix, dim)
            .into_iter()
            .enumerate()
            .filter(|(_, v)| *v != ZERO)
            .collect();
        Self {
            reservoir,
            dim,
            matrix,
            trace_row,
        }
    }

    /// `tr(𝒥 x)` for an arbitrary (not necessarily Hermitian) matrix.
    pub fn trace_against(&self, x: &DMatrix<C64>) -> C64 {
        let xs = x.as_slice();
        self.trace_row.iter().map(|(c, w)| *w * xs[*c]).sum()
    }
}

/// Energy weight attached to a sandwich term: the reservoir and the energy the
/// system hands to it when the term acts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weight {
    pub reservoir: ReservoirKind,
    pub energy: f64,
}

impl Weight {
    pub fn cold(energy: f64) -> Self {
        Self {
            reservoir: ReservoirKind::Cold,
            energy,
        }
    }

    pub fn hot(energy: f64) -> Self {
        Self {
            reservoir: ReservoirKind::Hot,
            energy,
        }
    }
}

/// Incremental assembly of a generator and its two current superoperators.
///
/// Counting fields enter only through sandwich terms `g A ρ B`: a term that
/// hands energy `w` to reservoir ν carries `e^{iwχ_ν}`, so it contributes
/// `−w g A ρ B` to `𝒥_ν`.
pub struct GeneratorBuilder {
    d: usize,
    l: TriMat<C64>,
    cold: TriMat<C64>,
    hot: TriMat<C64>,
}

impl GeneratorBuilder {
    pub fn new(d: usize) -> Self {
        let n = d * d;
        Self {
            d,
            l: TriMat::new((n, n)),
            cold: TriMat::new((n, n)),
            hot: TriMat::new((n, n)),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `coef · A ρ B`.
    pub fn sandwich(&mut self, coef: C64, a: &CsMat<C64>, b: &CsMat<C64>, weight: Option<Weight>) {
        if coef == ZERO {
            return;
        }
        let d = self.d;
        let bt: Vec<_> = b.iter().map(|(v, (l, j))| (*v, l, j)).collect();
        for (av, (i, k)) in a.iter() {
            for &(bv, l, j) in &bt {
                let val = coef * *av * bv;
                let (row, col) = (vec_index(i, j, d), vec_index(k, l, d));
                self.l.add_triplet(row, col, val);
                if let Some(w) = weight {
                    let cur = -w.energy * val;
                    match w.reservoir {
                        ReservoirKind::Cold => self.cold.add_triplet(row, col, cur),
                        ReservoirKind::Hot => self.hot.add_triplet(row, col, cur),
                    }
                }
            }
        }
    }

    /// `coef · A ρ`.
    pub fn left(&mut self, coef: C64, a: &CsMat<C64>) {
        let d = self.d;
        for (v, (i, k)) in a.iter() {
            for j in 0..d {
                self.l.add_triplet(vec_index(i, j, d), vec_index(k, j, d), coef * *v);
            }
        }
    }

    /// `coef · ρ B`.
    pub fn right(&mut self, coef: C64, b: &CsMat<C64>) {
        let d = self.d;
        for (v, (l, j)) in b.iter() {
            for i in 0..d {
                self.l.add_triplet(vec_index(i, j, d), vec_index(i, l, d), coef * *v);
            }
        }
    }

    /// `−i[H, ρ]` for any (possibly non-Hermitian) `H`.
    pub fn hamiltonian(&mut self, h: &CsMat<C64>) {
        self.left(MINUS_I, h);
        self.right(-MINUS_I, h);
    }

    /// `rate · (J ρ J† − ½{J†J, ρ})`, with the jump weighted by `weight`.
    pub fn dissipator(&mut self, jump: &CsMat<C64>, rate: f64, weight: Option<Weight>) -> Result<()> {
        if rate < 0.0 {
            return Err(Error::NegativeRate(rate));
        }
        if rate == 0.0 {
            return Ok(());
        }
        let jd = adjoint(jump);
        let jdj = product(&jd, jump);
        let r = C64::new(rate, 0.0);
        self.sandwich(r, jump, &jd, weight);
        self.left(-0.5 * r, &jdj);
        self.right(-0.5 * r, &jdj);
        Ok(())
    }

    /// `coef · [A, B ρ]`; the sandwich part is `−coef · B ρ A`.
    pub fn commutator_left(&mut self, coef: C64, a: &CsMat<C64>, b: &CsMat<C64>, weight: Option<Weight>) {
        self.left(coef, &product(a, b));
        self.sandwich(-coef, b, a, weight);
    }

    /// `coef · [ρ B, A]`; the sandwich part is `−coef · A ρ B`.
    pub fn commutator_right(&mut self, coef: C64, b: &CsMat<C64>, a: &CsMat<C64>, weight: Option<Weight>) {
        self.right(coef, &product(b, a));
        self.sandwich(-coef, a, b, weight);
    }

    pub fn finish(self, trace_preserving: bool) -> Generator {
        let d = self.d;
        Generator {
            generator: Superoperator {
                dim: d,
                matrix: self.l.to_csc(),
                trace_preserving,
            },
            cold: CurrentSuperoperator::new(ReservoirKind::Cold, d, self.cold.to_csc()),
            hot: CurrentSuperoperator::new(ReservoirKind::Hot, d, self.hot.to_csc()),
        }
    }
}

/// A generator together with its cold and hot current superoperators.
#[derive(Debug, Clone)]
pub struct Generator {
    pub generator: Superoperator,
    pub cold: CurrentSuperoperator,
    pub hot: CurrentSuperoperator,
}

/// `rate · D[J]` as a standalone superoperator.
pub fn lindblad_term(jump: &CsMat<C64>, rate: f64) -> Result<Superoperator> {
    let mut b = GeneratorBuilder::new(jump.rows());
    b.dissipator(jump, rate, None)?;
    Ok(b.finish(true).generator)
}

/// `−i[H, ·]` for Hermitian `H`.
pub fn commutator_term(h: &CsMat<C64>) -> Result<Superoperator> {
    let defect = hermiticity_defect(h);
    if defect > 1e-12 {
        return Err(Error::NotHermitian(defect));
    }
    let mut b = GeneratorBuilder::new(h.rows());
    b.hamiltonian(h);
    Ok(b.finish(true).generator)
}

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn from_vectorized(v: &DVector<C64>, d: usize) -> Result<Self> {
        if v.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: v.len(),
            });
        }
        Ok(Self {
            matrix: DMatrix::from_column_slice(d, d, v.as_slice()),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        h.symmetric_eigenvalues().min()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }
}

/// `tr(O ρ)`.
pub fn expectation(obs: &CsMat<C64>, rho: &DensityMatrix) -> Result<C64> {
    let d = rho.dim();
    if obs.rows() != d || obs.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: obs.rows(),
        });
    }
    Ok(obs.iter().map(|(v, (i, k))| *v * rho.matrix[(k, i)]).sum())
}

/// How degenerate nullspaces are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Degeneracy {
    /// Return [`Error::DegenerateSteadyState`].
    #[default]
    Strict,
    /// Return the state reached from the maximally mixed one and flag it.
    Lenient,
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    pub nullity: usize,
    pub degenerate: bool,
    /// `‖L ρ‖_max / (‖L‖_max ‖ρ‖_max)`.
    pub residual: f64,
}

/// Trace-normalized null vector of `l`.
pub fn steady_state(l: &Superoperator, policy: Degeneracy) -> Result<SteadyState> {
    let d = l.dim;
    let trace_idx: Vec<usize> = (0..d).map(|i| vec_index(i, i, d)).collect();
    let sol = linalg::stationary_vector(&l.matrix, &trace_idx, policy == Degeneracy::Lenient)?;
    let rho = DensityMatrix::from_vectorized(&sol.vector, d)?;
    let lrho = sparse_matvec(&l.matrix, sol.vector.as_slice());
    let rmax = lrho.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let residual = rmax / (l.norm_max() * sol.vector.camax()).max(f64::MIN_POSITIVE);
    if residual > 1e-9 {
        return Err(Error::Numerical(format!("steady-state residual {residual:.2e}")));
    }
    let defect = rho.hermiticity_defect();
    if defect > 1e-8 {
        return Err(Error::Numerical(format!("steady state not Hermitian ({defect:.2e})")));
    }
    Ok(SteadyState {
        rho,
        nullity: sol.nullity,
        degenerate: sol.degenerate,
        residual,
    })
}

/// Fourier components `ρ^(n)`, `n ∈ [−cutoff, cutoff]`, of an asymptotically
/// periodic state.
#[derive(Debug, Clone)]
pub struct FourierState {
    pub cutoff: usize,
    components: Vec<DMatrix<C64>>,
    pub residual: f64,
    /// `max_n ‖ρ^(−n) − (ρ^(n))†‖_max`.
    pub pairing_defect: f64,
}

impl FourierState {
    pub fn component(&self, n: isize) -> &DMatrix<C64> {
        &self.components[(n + self.cutoff as isize) as usize]
    }

    /// `ρ(t) = Σ_n ρ^(n) e^{inΩt}`.
    pub fn at_phase(&self, omega_t: f64) -> DMatrix<C64> {
        let c = self.cutoff as isize;
        (-c..=c).fold(DMatrix::zeros(self.components[0].nrows(), self.components[0].ncols()), |acc, n| {
            acc + self.component(n) * C64::from_polar(1.0, n as f64 * omega_t)
        })
    }
}

/// Solve `0 = (L0 − inΩ)ρ^(n) + L+ ρ^(n−1) + L− ρ^(n+1)` with `tr ρ^(0) = 1`.
pub fn block_tridiagonal_nullspace(
    l0: &Superoperator,
    lplus: &Superoperator,
    lminus: &Superoperator,
    omega: f64,
    cutoff: usize,
) -> Result<FourierState> {
    if cutoff == 0 {
        return Err(Error::param("cutoff", "must be at least 1"));
    }
    let d = l0.dim;
    let trace_idx: Vec<usize> = (0..d).map(|i| vec_index(i, i, d)).collect();
    let sol = linalg::fourier_stack_nullvector(&l0.matrix, &lplus.matrix, &lminus.matrix, omega, cutoff, &trace_idx)?;
    if sol.residual > 1e-10 {
        return Err(Error::Numerical(format!("Fourier stack residual {:.2e}", sol.residual)));
    }
    let components: Vec<DMatrix<C64>> = sol
        .components
        .iter()
        .map(|v| DMatrix::from_column_slice(d, d, v.as_slice()))
        .collect();
    let c = cutoff as isize;
    let scale = components[cutoff].camax();
    let pairing_defect = (0..=c)
        .map(|n| {
            let a = &components[(c - n) as usize];
            let b = &components[(c + n) as usize];
            (a - b.adjoint()).camax() / scale
        })
        .fold(0.0, f64::max);
    if pairing_defect > 1e-8 {
        return Err(Error::Numerical(format!(
            "Fourier components violate Hermitian pairing ({pairing_defect:.2e})"
        )));
    }
    Ok(FourierState {
        cutoff,
        components,
        residual: sol.residual,
        pairing_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn op(d: usize, entries: &[(usize, usize, f64)]) -> CsMat<C64> {
        let mut t = TriMat::new((d, d));
        for &(i, j, v) in entries {
            t.add_triplet(i, j, C64::new(v, 0.0));
        }
        t.to_csc()
    }

    fn random_matrix(d: usize, vals: &[f64]) -> DMatrix<C64> {
        DMatrix::from_fn(d, d, |i, j| C64::new(vals[2 * (i * d + j)], vals[2 * (i * d + j) + 1]))
    }

    #[test]
    fn zero_rate_is_zero() {
        let j = op(2, &[(0, 1, 1.0)]);
        assert_eq!(lindblad_term(&j, 0.0).unwrap().matrix.nnz(), 0);
        assert!(matches!(lindblad_term(&j, -0.1), Err(Error::NegativeRate(_))));
    }

    #[test]
    fn pure_decay_relaxes_to_ground_state() {
        let j = op(2, &[(0, 1, 1.0)]);
        let ss = steady_state(&lindblad_term(&j, 1.0).unwrap(), Degeneracy::Strict).unwrap();
        assert_relative_eq!(ss.rho.matrix[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert!(ss.rho.matrix[(1, 1)].norm() < 1e-14);
    }

    #[test]
    fn population_block_is_a_rate_matrix() {
        // two-level system: decay at g1, excitation at g2
        let (g1, g2) = (0.7, 0.3);
        let down = op(2, &[(0, 1, 1.0)]);
        let up = op(2, &[(1, 0, 1.0)]);
        let l = lindblad_term(&down, g1).unwrap().plus(&lindblad_term(&up, g2).unwrap()).to_dense();
        let p = [vec_index(0, 0, 2), vec_index(1, 1, 2)];
        let expected = [[-g2, g1], [g2, -g1]];
        for a in 0..2 {
            for b in 0..2 {
                assert_relative_eq!(l[(p[a], p[b])].re, expected[a][b], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn commutator_examples() {
        let id = op(3, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]);
        assert!(commutator_term(&id).unwrap().norm_max() == 0.0);
        let diag = op(3, &[(0, 0, 0.3), (1, 1, 1.1), (2, 2, -2.0)]);
        let l = commutator_term(&diag).unwrap();
        let rho = DMatrix::from_diagonal(&DVector::from_vec(vec![ONE * 0.2, ONE * 0.5, ONE * 0.3]));
        assert!(l.apply(&rho).camax() < 1e-15);
        let bad = op(2, &[(0, 1, 1.0)]);
        assert!(matches!(commutator_term(&bad), Err(Error::NotHermitian(_))));
    }

    /// Rabi oscillation: under `H = λσ_x`, `⟨σ_z⟩(t) = cos(2λt)`.
    #[test]
    fn rabi_frequency() {
        let lambda = 0.7;
        let l = commutator_term(&op(2, &[(0, 1, lambda), (1, 0, lambda)])).unwrap().to_dense();
        // spectrum of −i[H,·] is {0, 0, ±2iλ}
        let eig = l.eigenvalues().unwrap();
        let mut im: Vec<f64> = eig.iter().map(|z| z.im).collect();
        im.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(im[0], -2.0 * lambda, epsilon = 1e-12);
        assert_relative_eq!(im[3], 2.0 * lambda, epsilon = 1e-12);
        // propagate with the exponential and compare ⟨σ_z⟩
        let t = 0.9;
        let prop = (l * C64::new(t, 0.0)).exp();
        let rho0 = DVector::from_vec(vec![ONE, ZERO, ZERO, ZERO]);
        let rho_t = prop * rho0;
        let sz = rho_t[vec_index(0, 0, 2)].re - rho_t[vec_index(1, 1, 2)].re;
        assert_relative_eq!(sz, (2.0 * lambda * t).cos(), epsilon = 1e-12);
    }

    #[test]
    fn gibbs_state_of_a_single_bath() {
        // three-level ladder with detailed-balance rates
        let beta: f64 = 1.3;
        let e: [f64; 3] = [0.0, 1.0, 2.5];
        let mut b = GeneratorBuilder::new(3);
        for (lo, hi) in [(0, 1), (0, 2)] {
            let w = e[hi] - e[lo];
            b.dissipator(&op(3, &[(lo, hi, 1.0)]), 0.4, None).unwrap();
            b.dissipator(&op(3, &[(hi, lo, 1.0)]), 0.4 * (-beta * w).exp(), None).unwrap();
        }
        let ss = steady_state(&b.finish(true).generator, Degeneracy::Strict).unwrap();
        let z: f64 = e.iter().map(|x| (-beta * x).exp()).sum();
        for i in 0..3 {
            assert_relative_eq!(ss.rho.matrix[(i, i)].re, (-beta * e[i]).exp() / z, epsilon = 1e-13);
        }
        let number = op(3, &[(1, 1, 1.0), (2, 2, 2.0)]);
        let expected = ((-beta * e[1]).exp() + 2.0 * (-beta * e[2]).exp()) / z;
        assert_relative_eq!(expectation(&number, &ss.rho).unwrap().re, expected, epsilon = 1e-13);
    }

    #[test]
    fn zero_generator_is_degenerate() {
        let l = Superoperator::zeros(3);
        assert!(matches!(
            steady_state(&l, Degeneracy::Strict),
            Err(Error::DegenerateSteadyState { dim: 3 })
        ));
        let ss = steady_state(&l, Degeneracy::Lenient).unwrap();
        assert!(ss.degenerate);
        for i in 0..3 {
            assert_relative_eq!(ss.rho.matrix[(i, i)].re, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn expectation_examples() {
        let rho = DensityMatrix {
            matrix: DMatrix::from_fn(2, 2, |i, j| if i == 0 && j == 0 { ONE } else { ZERO }),
        };
        assert_eq!(expectation(&op(2, &[(0, 0, 1.0), (1, 1, 1.0)]), &rho).unwrap(), ONE);
        assert_eq!(expectation(&op(2, &[(0, 0, 1.0)]), &rho).unwrap(), ONE);
        assert!(expectation(&op(3, &[]), &rho).is_err());
    }

    #[test]
    fn decoupled_sidebands_reduce_to_the_static_steady_state() {
        let mut b = GeneratorBuilder::new(2);
        b.dissipator(&op(2, &[(0, 1, 1.0)]), 0.5, None).unwrap();
        b.dissipator(&op(2, &[(1, 0, 1.0)]), 0.2, None).unwrap();
        b.hamiltonian(&op(2, &[(0, 1, 0.3), (1, 0, 0.3)]));
        let l0 = b.finish(true).generator;
        let zero = Superoperator::zeros(2);
        let fs = block_tridiagonal_nullspace(&l0, &zero, &zero, 1.3, 2).unwrap();
        let ss = steady_state(&l0, Degeneracy::Strict).unwrap();
        assert!((fs.component(0) - &ss.rho.matrix).camax() < 1e-13);
        for n in [-2, -1, 1, 2] {
            assert_eq!(fs.component(n).camax(), 0.0);
        }
    }

    #[test]
    fn current_superoperator_weights_only_sandwiches() {
        let j = op(2, &[(0, 1, 1.0)]);
        let mut b = GeneratorBuilder::new(2);
        b.dissipator(&j, 0.5, Some(Weight::cold(2.0))).unwrap();
        let g = b.finish(true);
        // 𝒥ρ = −2·0.5·JρJ†: trace against the excited state is −1
        let excited = DMatrix::from_fn(2, 2, |i, j| if i == 1 && j == 1 { ONE } else { ZERO });
        assert_relative_eq!(g.cold.trace_against(&excited).re, -1.0, epsilon = 1e-15);
        assert_eq!(g.hot.matrix.nnz(), 0);
    }

    proptest! {
        #[test]
        fn assembled_generators_preserve_trace_and_hermiticity(
            h in proptest::collection::vec(-1.0f64..1.0, 6),
            rates in proptest::collection::vec(0.0f64..1.0, 3),
            x in proptest::collection::vec(-1.0f64..1.0, 18),
        ) {
            let d = 3;
            let ham = op(d, &[(0, 0, h[0]), (1, 1, h[1]), (2, 2, h[2]), (0, 1, h[3]), (1, 0, h[3]), (1, 2, h[4]), (2, 1, h[4]), (0, 2, h[5]), (2, 0, h[5])]);
            let mut b = GeneratorBuilder::new(d);
            b.hamiltonian(&ham);
            b.dissipator(&op(d, &[(0, 1, 1.0)]), rates[0], None).unwrap();
            b.dissipator(&op(d, &[(1, 2, 1.0), (0, 2, 0.5)]), rates[1], None).unwrap();
            b.dissipator(&op(d, &[(2, 0, 1.0)]), rates[2], None).unwrap();
            let l = b.finish(true).generator;
            prop_assert!(l.trace_defect() < 1e-12);
            let rho = random_matrix(d, &x);
            let lhs = l.apply(&rho.adjoint()).adjoint();
            let rhs = l.apply(&rho);
            prop_assert!((lhs - rhs).camax() < 1e-12);
        }
    }
}
