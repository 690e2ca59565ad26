//! Sparse-pattern analysis and block-tridiagonal nullspace elimination.
//!
//! Generators of this crate are sparse with a strong conservation structure:
//! only some components of the coupling graph contain populations, and inside a
//! component breadth-first levels from the vacuum population make the matrix
//! block tridiagonal. Fourier-component stacks are block tridiagonal by
//! construction. Both cases are handled by [`BlockTridiagonal`].

use std::collections::VecDeque;

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use petgraph::unionfind::UnionFind;
use sprs::CsMat;

use crate::error::{Error, Result};

/// Sector size up to which a full dense SVD is used (and the nullity counted).
pub const DENSE_LIMIT: usize = 300;

/// Singular values below this fraction of the largest count as zero.
pub const NULL_TOLERANCE: f64 = 1e-11;

/// Scalar types the solvers work with (`f64` for rate matrices, `Complex64`
/// for superoperators).
pub trait Scalar: ComplexField<RealField = f64> + Copy {}
impl<T: ComplexField<RealField = f64> + Copy> Scalar for T {}

/// Connected components of the symmetrized sparsity pattern of `mats` that
/// contain at least one of `seeds`. Each component is sorted; components are
/// ordered by their smallest seed.
pub fn seeded_components<T>(n: usize, mats: &[&CsMat<T>], seeds: &[usize]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::<usize>::new(n);
    for m in mats {
        for (_, (i, j)) in m.iter() {
            uf.union(i, j);
        }
    }
    let labels = uf.into_labeling();
    let mut order: Vec<usize> = Vec::new();
    for &s in seeds {
        if !order.contains(&labels[s]) {
            order.push(labels[s]);
        }
    }
    let mut comps = vec![Vec::new(); order.len()];
    for (i, l) in labels.iter().enumerate() {
        if let Some(k) = order.iter().position(|o| o == l) {
            comps[k].push(i);
        }
    }
    comps
}

/// Breadth-first levels over the symmetrized pattern restricted to `subset`,
/// starting from `start`. Entries coupling levels more than one apart cannot
/// exist, so the restricted matrix is block tridiagonal in this ordering.
pub fn bfs_levels<T>(mat: &CsMat<T>, subset: &[usize], start: usize) -> Result<Vec<Vec<usize>>> {
    let n = mat.rows();
    let mut local = vec![usize::MAX; n];
    for (k, &i) in subset.iter().enumerate() {
        local[i] = k;
    }
    let mut adj = vec![Vec::new(); subset.len()];
    for (_, (i, j)) in mat.iter() {
        if i != j && local[i] != usize::MAX && local[j] != usize::MAX {
            adj[local[i]].push(local[j]);
            adj[local[j]].push(local[i]);
        }
    }
    let mut level = vec![usize::MAX; subset.len()];
    let root = local[start];
    if root == usize::MAX {
        return Err(Error::Numerical("BFS root outside its component".into()));
    }
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut levels: Vec<Vec<usize>> = vec![];
    while let Some(u) = queue.pop_front() {
        if levels.len() <= level[u] {
            levels.push(Vec::new());
        }
        levels[level[u]].push(subset[u]);
        for &v in &adj[u] {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    if levels.iter().map(Vec::len).sum::<usize>() != subset.len() {
        return Err(Error::Numerical("component is not connected".into()));
    }
    for l in &mut levels {
        l.sort_unstable();
    }
    Ok(levels)
}

/// Dense copy of `mat` restricted to rows and columns in `idx`.
pub fn dense_submatrix<T: Scalar>(mat: &CsMat<T>, idx: &[usize]) -> DMatrix<T> {
    let mut local = vec![usize::MAX; mat.rows().max(mat.cols())];
    for (k, &i) in idx.iter().enumerate() {
        local[i] = k;
    }
    let mut out = DMatrix::zeros(idx.len(), idx.len());
    for (v, (i, j)) in mat.iter() {
        if local[i] != usize::MAX && local[j] != usize::MAX {
            out[(local[i], local[j])] += *v;
        }
    }
    out
}

/// Right nullspace by SVD: orthonormal basis columns and the smallest
/// singular value relative to the largest.
pub fn dense_nullspace<T: Scalar>(m: &DMatrix<T>) -> Result<(DMatrix<T>, f64)> {
    let n = m.ncols();
    if n == 0 {
        return Ok((DMatrix::zeros(0, 0), 0.0));
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD did not return right singular vectors".into()))?;
    let s = &svd.singular_values;
    let smax = s.max();
    if smax == 0.0 {
        return Ok((DMatrix::identity(n, n), 0.0));
    }
    let null: Vec<usize> = (0..s.len()).filter(|&k| s[k] <= NULL_TOLERANCE * smax).collect();
    let (cols, ratio) = if null.is_empty() {
        let k = s.imin();
        (vec![k], s[k] / smax)
    } else {
        let worst = null.iter().map(|&k| s[k]).fold(0.0, f64::max);
        (null, worst / smax)
    };
    let mut basis = DMatrix::zeros(n, cols.len());
    for (c, &k) in cols.iter().enumerate() {
        for r in 0..n {
            basis[(r, c)] = v_t[(k, r)].conjugate();
        }
    }
    Ok((basis, ratio))
}

/// How to extract the null vector of the final Schur complement.
#[derive(Debug, Clone)]
pub enum PivotRule<T> {
    /// Dense SVD; the nullity is counted.
    Svd,
    /// Replace local row `row` of the pivot equation with the functional
    /// `weights · x = 1` and solve. Cheaper for large pivots; nullity is
    /// reported as 1.
    ReplaceRow { row: usize, weights: DVector<T> },
}

/// Block-tridiagonal matrix: row block `k` reads
/// `lower[k] x_{k−1} + diag[k] x_k + upper[k] x_{k+1}`.
#[derive(Debug, Clone)]
pub struct BlockTridiagonal<T: Scalar> {
    pub diag: Vec<DMatrix<T>>,
    /// `lower[0]` is unused (empty).
    pub lower: Vec<DMatrix<T>>,
    /// `upper[K−1]` is unused (empty).
    pub upper: Vec<DMatrix<T>>,
}

/// Null vector of a block-tridiagonal system, split per block.
#[derive(Debug, Clone)]
pub struct BlockNullVector<T: Scalar> {
    pub blocks: Vec<DVector<T>>,
    pub nullity: usize,
    /// Relative size of the singular value accepted as zero at the pivot.
    pub pivot_ratio: f64,
}

impl<T: Scalar> BlockTridiagonal<T> {
    /// Extract the block structure of `mat` over index `levels`.
    pub fn from_levels(mat: &CsMat<T>, levels: &[Vec<usize>]) -> Result<Self> {
        let n = mat.rows();
        let mut where_ = vec![(usize::MAX, 0usize); n];
        for (l, idx) in levels.iter().enumerate() {
            for (k, &i) in idx.iter().enumerate() {
                where_[i] = (l, k);
            }
        }
        let nl = levels.len();
        let size = |l: usize| levels[l].len();
        let mut diag: Vec<DMatrix<T>> = (0..nl).map(|l| DMatrix::zeros(size(l), size(l))).collect();
        let mut lower: Vec<DMatrix<T>> = (0..nl)
            .map(|l| if l == 0 { DMatrix::zeros(0, 0) } else { DMatrix::zeros(size(l), size(l - 1)) })
            .collect();
        let mut upper: Vec<DMatrix<T>> = (0..nl)
            .map(|l| if l + 1 == nl { DMatrix::zeros(0, 0) } else { DMatrix::zeros(size(l), size(l + 1)) })
            .collect();
        for (v, (i, j)) in mat.iter() {
            let (li, ki) = where_[i];
            let (lj, kj) = where_[j];
            if li == usize::MAX || lj == usize::MAX {
                continue;
            }
            if li == lj {
                diag[li][(ki, kj)] += *v;
            } else if lj + 1 == li {
                lower[li][(ki, kj)] += *v;
            } else if li + 1 == lj {
                upper[li][(ki, kj)] += *v;
            } else {
                return Err(Error::Numerical(format!("entry couples levels {li} and {lj}")));
            }
        }
        Ok(Self { diag, lower, upper })
    }

    pub fn n_blocks(&self) -> usize {
        self.diag.len()
    }

    /// Largest absolute entry over all blocks.
    pub fn scale(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.lower)
            .chain(&self.upper)
            .map(|m| if m.is_empty() { 0.0 } else { m.camax() })
            .fold(0.0, f64::max)
    }

    /// Null vector by elimination from both ends toward block `pivot`.
    ///
    /// From below, `x_k = F_k x_{k+1}` with `F_k = −T_k^{-1} U_k` and
    /// `T_k = A_k + W_k F_{k−1}`; from above, `x_k = G_k x_{k−1}` with
    /// `G_k = −S_k^{-1} W_k` and `S_k = A_k + U_k G_{k+1}`. The pivot block then
    /// satisfies `(A_p + W_p F_{p−1} + U_p G_{p+1}) x_p = 0`.
    pub fn nullvector(&self, pivot: usize, rule: &PivotRule<T>) -> Result<BlockNullVector<T>> {
        let nb = self.n_blocks();
        if pivot >= nb {
            return Err(Error::Numerical(format!("pivot {pivot} outside {nb} blocks")));
        }
        let solve = |a: DMatrix<T>, b: &DMatrix<T>, k: usize| -> Result<DMatrix<T>> {
            let lu = a.lu();
            lu.solve(b)
                .filter(|x| x.iter().all(|v| v.is_finite()))
                .map(|x| -x)
                .ok_or_else(|| Error::Numerical(format!("singular block {k} during elimination")))
        };
        let mut f: Vec<Option<DMatrix<T>>> = vec![None; nb];
        for k in 0..pivot {
            let mut t = self.diag[k].clone();
            if k > 0 {
                t += &self.lower[k] * f[k - 1].as_ref().unwrap();
            }
            f[k] = Some(solve(t, &self.upper[k], k)?);
        }
        let mut g: Vec<Option<DMatrix<T>>> = vec![None; nb];
        for k in (pivot + 1..nb).rev() {
            let mut s = self.diag[k].clone();
            if k + 1 < nb {
                s += &self.upper[k] * g[k + 1].as_ref().unwrap();
            }
            g[k] = Some(solve(s, &self.lower[k], k)?);
        }
        let mut p = self.diag[pivot].clone();
        if pivot > 0 {
            p += &self.lower[pivot] * f[pivot - 1].as_ref().unwrap();
        }
        if pivot + 1 < nb {
            p += &self.upper[pivot] * g[pivot + 1].as_ref().unwrap();
        }
        let (xp, nullity, pivot_ratio) = match rule {
            PivotRule::Svd => {
                let scale = self.scale().max(p.camax());
                if p.nrows() == 1 {
                    let ratio = if scale > 0.0 { p[(0, 0)].modulus() / scale } else { 0.0 };
                    (DVector::from_element(1, T::one()), 1, ratio)
                } else {
                    let (basis, ratio) = dense_nullspace(&p)?;
                    (basis.column(0).into_owned(), basis.ncols(), ratio)
                }
            }
            PivotRule::ReplaceRow { row, weights } => {
                let mut a = p.clone();
                for c in 0..a.ncols() {
                    a[(*row, c)] = weights[c];
                }
                let mut rhs = DVector::zeros(a.nrows());
                rhs[*row] = T::one();
                let x = a
                    .lu()
                    .solve(&rhs)
                    .filter(|x| x.iter().all(|v| v.is_finite()))
                    .ok_or_else(|| Error::Numerical("singular pivot after row replacement".into()))?;
                let resid = (&p * &x).camax() / (p.camax() * x.camax()).max(f64::MIN_POSITIVE);
                (x, 1, resid)
            }
        };
        let mut blocks: Vec<DVector<T>> = vec![DVector::zeros(0); nb];
        blocks[pivot] = xp;
        for k in (0..pivot).rev() {
            blocks[k] = f[k].as_ref().unwrap() * &blocks[k + 1];
        }
        for k in pivot + 1..nb {
            blocks[k] = g[k].as_ref().unwrap() * &blocks[k - 1];
        }
        Ok(BlockNullVector {
            blocks,
            nullity,
            pivot_ratio,
        })
    }

    /// `‖M x‖_∞` for a block vector.
    pub fn residual(&self, x: &[DVector<T>]) -> f64 {
        let nb = self.n_blocks();
        (0..nb)
            .map(|k| {
                let mut r = &self.diag[k] * &x[k];
                if k > 0 {
                    r += &self.lower[k] * &x[k - 1];
                }
                if k + 1 < nb {
                    r += &self.upper[k] * &x[k + 1];
                }
                if r.is_empty() {
                    0.0
                } else {
                    r.camax()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Result of a stationary-vector solve of a sparse generator.
#[derive(Debug, Clone)]
pub struct StationaryVector<T: Scalar> {
    /// Full-length vector, normalized so the entries at the trace indices sum to one.
    pub vector: DVector<T>,
    /// Measured nullspace dimension (summed over components).
    pub nullity: usize,
    /// True when the nullspace was not one-dimensional and a projection was returned.
    pub degenerate: bool,
}

/// Stationary vector `M x = 0` with `Σ_{i ∈ trace_idx} x_i = 1`.
///
/// The coupling graph is split into components containing trace indices.
/// Small components are solved by dense SVD, large ones by block elimination
/// over BFS levels rooted at their first trace index. With a non-unique
/// nullspace, `lenient` returns the asymptotic state reached from the uniform
/// distribution over the trace indices (each component weighted by its share of
/// trace indices, projected within a component); otherwise an error carrying the
/// dimension is returned.
pub fn stationary_vector<T: Scalar>(mat: &CsMat<T>, trace_idx: &[usize], lenient: bool) -> Result<StationaryVector<T>> {
    let n = mat.rows();
    if mat.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: mat.cols(),
        });
    }
    let comps = seeded_components(n, &[mat], trace_idx);
    let mut is_trace = vec![false; n];
    trace_idx.iter().for_each(|&i| is_trace[i] = true);
    let mut pieces = Vec::with_capacity(comps.len());
    let mut nullity = 0;
    for comp in &comps {
        let (basis, k) = component_nullspace(mat, comp, &is_trace)?;
        nullity += k;
        pieces.push(basis);
    }
    let degenerate = nullity != 1;
    if degenerate && !lenient {
        return Err(Error::DegenerateSteadyState { dim: nullity });
    }
    let total_trace = trace_idx.len() as f64;
    let mut vector = DVector::zeros(n);
    for (comp, basis) in comps.iter().zip(&pieces) {
        let share = comp.iter().filter(|&&i| is_trace[i]).count() as f64 / total_trace;
        let local_trace = |v: &DVector<T>| -> T {
            comp.iter()
                .zip(v.iter())
                .filter(|(i, _)| is_trace[**i])
                .fold(T::zero(), |acc, (_, x)| acc + *x)
        };
        let v = if basis.ncols() == 1 {
            basis.column(0).into_owned()
        } else {
            // coefficients of the uniform trace vector in the orthonormal basis
            let uniform = DVector::from_iterator(
                comp.len(),
                comp.iter().map(|&i| if is_trace[i] { T::one() } else { T::zero() }),
            );
            let coeff = basis.adjoint() * uniform;
            let v = basis * coeff;
            if local_trace(&v).modulus() > 1e-12 {
                v
            } else {
                basis.column(0).into_owned()
            }
        };
        let tr = local_trace(&v);
        if tr.modulus() < 1e-300 {
            return Err(Error::Numerical("stationary vector has zero trace".into()));
        }
        let scale = T::from_real(share) / tr;
        for (k, &i) in comp.iter().enumerate() {
            vector[i] = v[k] * scale;
        }
    }
    Ok(StationaryVector {
        vector,
        nullity,
        degenerate,
    })
}

fn component_nullspace<T: Scalar>(mat: &CsMat<T>, comp: &[usize], is_trace: &[bool]) -> Result<(DMatrix<T>, usize)> {
    if comp.len() <= DENSE_LIMIT {
        let dense = dense_submatrix(mat, comp);
        let (basis, _) = dense_nullspace(&dense)?;
        let k = basis.ncols();
        return Ok((basis, k));
    }
    let root = *comp
        .iter()
        .find(|&&i| is_trace[i])
        .ok_or_else(|| Error::Numerical("component without trace index".into()))?;
    let levels = bfs_levels(mat, comp, root)?;
    let system = BlockTridiagonal::from_levels(mat, &levels)?;
    let sol = system.nullvector(0, &PivotRule::Svd)?;
    let scale = system.scale();
    let xnorm = sol.blocks.iter().map(|b| b.camax()).fold(0.0, f64::max);
    let resid = system.residual(&sol.blocks);
    if !(resid <= 1e-9 * scale * xnorm) {
        return Err(Error::Numerical(format!(
            "block elimination residual {:.2e} (scale {:.2e})",
            resid / xnorm.max(f64::MIN_POSITIVE),
            scale
        )));
    }
    let mut local = vec![usize::MAX; mat.rows()];
    comp.iter().enumerate().for_each(|(k, &i)| local[i] = k);
    let mut out = DMatrix::zeros(comp.len(), 1);
    for (lvl, block) in levels.iter().zip(&sol.blocks) {
        for (&i, v) in lvl.iter().zip(block.iter()) {
            out[(local[i], 0)] = *v;
        }
    }
    Ok((out, 1))
}

/// Fourier components `x^(n)`, `n ∈ [−cutoff, cutoff]`, solving
/// `0 = (L0 − inΩ) x^(n) + L+ x^(n−1) + L− x^(n+1)` with `Σ_{trace} x^(0) = 1`.
#[derive(Debug, Clone)]
pub struct FourierSolution {
    /// Full-length vectors, index `n + cutoff`.
    pub components: Vec<DVector<Complex64>>,
    pub nullity: usize,
    pub residual: f64,
}

pub fn fourier_stack_nullvector(
    l0: &CsMat<Complex64>,
    lplus: &CsMat<Complex64>,
    lminus: &CsMat<Complex64>,
    omega: f64,
    cutoff: usize,
    trace_idx: &[usize],
) -> Result<FourierSolution> {
    fourier_stack_nullvector_with_limit(l0, lplus, lminus, omega, cutoff, trace_idx, DENSE_LIMIT)
}

/// As [`fourier_stack_nullvector`], switching to the sparse path above `dense_limit`.
pub fn fourier_stack_nullvector_with_limit(
    l0: &CsMat<Complex64>,
    lplus: &CsMat<Complex64>,
    lminus: &CsMat<Complex64>,
    omega: f64,
    cutoff: usize,
    trace_idx: &[usize],
    dense_limit: usize,
) -> Result<FourierSolution> {
    let n = l0.rows();
    let comps = seeded_components(n, &[l0, lplus, lminus], trace_idx);
    let mut sector: Vec<usize> = comps.into_iter().flatten().collect();
    sector.sort_unstable();
    let mut is_trace = vec![false; n];
    trace_idx.iter().for_each(|&i| is_trace[i] = true);
    let blocks = if sector.len() <= dense_limit {
        dense_fourier_stack(l0, lplus, lminus, omega, cutoff, &sector, &is_trace)?
    } else {
        sparse_fourier_stack(l0, lplus, lminus, omega, cutoff, &sector, &is_trace)?
    };
    let stack = StackedFourier {
        mats: [l0, lplus, lminus],
        omega,
        cutoff,
        sector: &sector,
    };
    let xnorm = blocks.iter().map(|b| b.camax()).fold(0.0, f64::max);
    let residual = stack.residual(&blocks) / (stack.scale() * xnorm).max(f64::MIN_POSITIVE);
    let components = blocks
        .iter()
        .map(|b| {
            let mut full = DVector::zeros(n);
            for (&i, v) in sector.iter().zip(b.iter()) {
                full[i] = *v;
            }
            full
        })
        .collect();
    Ok(FourierSolution {
        components,
        nullity: 1,
        residual,
    })
}

/// Sparse view of the truncated Fourier stack restricted to a sector.
struct StackedFourier<'a> {
    mats: [&'a CsMat<Complex64>; 3],
    omega: f64,
    cutoff: usize,
    sector: &'a [usize],
}

impl StackedFourier<'_> {
    fn local(&self, n: usize) -> Vec<usize> {
        let mut local = vec![usize::MAX; n];
        for (k, &i) in self.sector.iter().enumerate() {
            local[i] = k;
        }
        local
    }

    /// Entries `(row, col, value)` of block row `k`, as `(block offset, local row, local col)`.
    fn for_each_entry(&self, mut f: impl FnMut(usize, isize, usize, usize, Complex64)) {
        let n = self.mats[0].rows();
        let local = self.local(n);
        let nb = 2 * self.cutoff + 1;
        for (which, m) in self.mats.iter().enumerate() {
            // L0 on the diagonal, L+ couples to block k−1, L− to block k+1
            let offset: isize = [0, -1, 1][which];
            for (v, (i, j)) in m.iter() {
                let (li, lj) = (local[i], local[j]);
                if li == usize::MAX || lj == usize::MAX {
                    continue;
                }
                for k in 0..nb {
                    let kk = k as isize + offset;
                    if kk >= 0 && (kk as usize) < nb {
                        f(k, offset, li, lj, *v);
                    }
                }
            }
        }
    }

    fn scale(&self) -> f64 {
        let max = self.mats.iter().flat_map(|m| m.iter().map(|(v, _)| v.norm())).fold(0.0, f64::max);
        max.max(self.cutoff as f64 * self.omega.abs())
    }

    fn residual(&self, x: &[DVector<Complex64>]) -> f64 {
        let nb = 2 * self.cutoff + 1;
        let mut r: Vec<DVector<Complex64>> = (0..nb)
            .map(|k| {
                let shift = Complex64::new(0.0, (k as f64 - self.cutoff as f64) * self.omega);
                -x[k].map(|v| v * shift)
            })
            .collect();
        self.for_each_entry(|k, off, li, lj, v| {
            r[k][li] += v * x[(k as isize + off) as usize][lj];
        });
        r.iter().map(|b| if b.is_empty() { 0.0 } else { b.camax() }).fold(0.0, f64::max)
    }
}

fn dense_fourier_stack(
    l0: &CsMat<Complex64>,
    lplus: &CsMat<Complex64>,
    lminus: &CsMat<Complex64>,
    omega: f64,
    cutoff: usize,
    sector: &[usize],
    is_trace: &[bool],
) -> Result<Vec<DVector<Complex64>>> {
    let a0 = dense_submatrix(l0, sector);
    let lp = dense_submatrix(lplus, sector);
    let lm = dense_submatrix(lminus, sector);
    let nb = 2 * cutoff + 1;
    let s = sector.len();
    let diag: Vec<_> = (0..nb)
        .map(|k| {
            let shift = Complex64::new(0.0, (k as f64 - cutoff as f64) * omega);
            let mut a = a0.clone();
            for i in 0..s {
                a[(i, i)] -= shift;
            }
            a
        })
        .collect();
    let lower: Vec<_> = (0..nb).map(|k| if k == 0 { DMatrix::zeros(0, 0) } else { lp.clone() }).collect();
    let upper: Vec<_> = (0..nb)
        .map(|k| if k + 1 == nb { DMatrix::zeros(0, 0) } else { lm.clone() })
        .collect();
    let system = BlockTridiagonal { diag, lower, upper };
    let weights = trace_weights(sector, is_trace);
    let sol = system.nullvector(cutoff, &PivotRule::Svd)?;
    if sol.nullity != 1 {
        return Err(Error::DegenerateSteadyState { dim: sol.nullity });
    }
    normalize_blocks(sol.blocks, &weights, cutoff)
}

fn trace_weights(sector: &[usize], is_trace: &[bool]) -> DVector<Complex64> {
    DVector::from_iterator(
        sector.len(),
        sector
            .iter()
            .map(|&i| if is_trace[i] { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }),
    )
}

fn normalize_blocks(
    blocks: Vec<DVector<Complex64>>,
    weights: &DVector<Complex64>,
    cutoff: usize,
) -> Result<Vec<DVector<Complex64>>> {
    let tr = weights.dot(&blocks[cutoff]);
    if tr.norm() < 1e-300 {
        return Err(Error::Numerical("zeroth Fourier component has zero trace".into()));
    }
    Ok(blocks.iter().map(|b| b / tr).collect())
}

/// Sparse LU of the stacked system with one trace row of the zeroth block
/// replaced by the normalization `tr x^(0) = 1`.
fn sparse_fourier_stack(
    l0: &CsMat<Complex64>,
    lplus: &CsMat<Complex64>,
    lminus: &CsMat<Complex64>,
    omega: f64,
    cutoff: usize,
    sector: &[usize],
    is_trace: &[bool],
) -> Result<Vec<DVector<Complex64>>> {
    use faer::linalg::solvers::Solve;
    use faer::sparse::{SparseColMat, Triplet};

    let s = sector.len();
    let nb = 2 * cutoff + 1;
    let row = sector
        .iter()
        .position(|&i| is_trace[i])
        .ok_or_else(|| Error::Numerical("no trace index in sector".into()))?;
    let replaced = cutoff * s + row;
    let stack = StackedFourier {
        mats: [l0, lplus, lminus],
        omega,
        cutoff,
        sector,
    };
    let mut trip = Vec::new();
    stack.for_each_entry(|k, off, li, lj, v| {
        let r = k * s + li;
        if r != replaced {
            trip.push(Triplet::new(r, ((k as isize + off) as usize) * s + lj, v));
        }
    });
    for k in 0..nb {
        let shift = Complex64::new(0.0, (k as f64 - cutoff as f64) * omega);
        for i in 0..s {
            let r = k * s + i;
            if r != replaced && shift != Complex64::new(0.0, 0.0) {
                trip.push(Triplet::new(r, r, -shift));
            }
        }
    }
    for (k, &i) in sector.iter().enumerate() {
        if is_trace[i] {
            trip.push(Triplet::new(replaced, cutoff * s + k, Complex64::new(1.0, 0.0)));
        }
    }
    let a = SparseColMat::<usize, Complex64>::try_new_from_triplets(nb * s, nb * s, &trip)
        .map_err(|e| Error::Numerical(format!("sparse assembly failed: {e:?}")))?;
    let lu = a.sp_lu().map_err(|e| Error::Numerical(format!("sparse LU failed: {e:?}")))?;
    let mut rhs = faer::Mat::<Complex64>::zeros(nb * s, 1);
    rhs[(replaced, 0)] = Complex64::new(1.0, 0.0);
    let x = lu.solve(&rhs);
    let blocks: Vec<DVector<Complex64>> = (0..nb)
        .map(|k| DVector::from_iterator(s, (0..s).map(|i| x[(k * s + i, 0)])))
        .collect();
    if blocks.iter().any(|b| b.iter().any(|v| !v.is_finite())) {
        return Err(Error::Numerical("singular Fourier stack".into()));
    }
    normalize_blocks(blocks, &trace_weights(sector, is_trace), cutoff)
}
