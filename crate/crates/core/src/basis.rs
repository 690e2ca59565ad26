//! Permutation-symmetric states of N qutrits and collective ladder operators.
//!
//! A symmetric state is labelled by the number `M` of qutrits in `|2⟩` and the
//! number `m` in `|1⟩`. The subspace is isomorphic to two bosonic modes with a
//! shared vacuum, so the ladder operators carry Clebsch-Gordan amplitudes such
//! as `J_h^+ |M;m⟩ = √((N−M−m)(M+1)) |M+1;m⟩`.
//!
//! Linear index: states are ordered by total excitation `K = M + m` and then by
//! `M`, giving `idx(M, m) = K(K+1)/2 + M`. This ordering is frozen; vectorized
//! superoperators depend on it.

use nalgebra::DMatrix;
use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};

/// Dimension `(N+1)(N+2)/2` of the symmetric subspace.
pub fn basis_dim(n: usize) -> usize {
    (n + 1) * (n + 2) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex {
    /// Number of qutrits in the upper level `|2⟩`.
    pub big: usize,
    /// Number of qutrits in the middle level `|1⟩`.
    pub small: usize,
}

impl BasisIndex {
    pub const fn new(big: usize, small: usize) -> Self {
        Self { big, small }
    }

    pub fn excitations(&self) -> usize {
        self.big + self.small
    }

    pub fn linear(&self) -> usize {
        let k = self.excitations();
        k * (k + 1) / 2 + self.big
    }

    pub fn from_linear(i: usize) -> Self {
        // largest k with k(k+1)/2 <= i
        let mut k = (((8 * i + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
        while (k + 1) * (k + 2) / 2 <= i {
            k += 1;
        }
        while k * (k + 1) / 2 > i {
            k -= 1;
        }
        let big = i - k * (k + 1) / 2;
        Self { big, small: k - big }
    }

    pub fn is_valid(&self, n: usize) -> bool {
        self.excitations() <= n
    }
}

/// The symmetric subspace for a fixed number of qutrits.
#[derive(Debug, Clone)]
pub struct CollectiveBasis {
    n: usize,
    states: Vec<BasisIndex>,
}

impl CollectiveBasis {
    pub fn new(n: usize) -> Self {
        let states = (0..basis_dim(n)).map(BasisIndex::from_linear).collect();
        Self { n, states }
    }

    pub fn n_qutrits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisIndex] {
        &self.states
    }

    pub fn index(&self, s: BasisIndex) -> Option<usize> {
        s.is_valid(self.n).then(|| s.linear())
    }
}

/// Operator families on the symmetric subspace.
///
/// `S_a^±` are the rotated ladder operators between `|0⟩` and the single-qutrit
/// Floquet states `|a⟩`, `a ∈ {−, +}`:
/// `S_−^− = cos α J_c^− − sin α J_h^−`, `S_+^− = sin α J_c^− + cos α J_h^−`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    JcPlus,
    JcMinus,
    JhPlus,
    JhMinus,
    JwPlus,
    JwMinus,
    SMinusPlus,
    SMinusMinus,
    SPlusPlus,
    SPlusMinus,
    NumberSmall,
    NumberLarge,
    Identity,
}

impl OperatorKind {
    /// The Hermitian-conjugate family.
    pub fn adjoint(self) -> Self {
        use OperatorKind::*;
        match self {
            JcPlus => JcMinus,
            JcMinus => JcPlus,
            JhPlus => JhMinus,
            JhMinus => JhPlus,
            JwPlus => JwMinus,
            JwMinus => JwPlus,
            SMinusPlus => SMinusMinus,
            SMinusMinus => SMinusPlus,
            SPlusPlus => SPlusMinus,
            SPlusMinus => SPlusPlus,
            k => k,
        }
    }

    fn is_rotated(self) -> bool {
        use OperatorKind::*;
        matches!(self, SMinusPlus | SMinusMinus | SPlusPlus | SPlusMinus)
    }
}

/// Image and amplitude of a bare ladder operator acting on a basis state.
///
/// Returns `None` when the move leaves the simplex `M + m ≤ N` or the
/// amplitude vanishes. Only the six bare ladder kinds are accepted.
pub fn ladder_element(kind: OperatorKind, from: BasisIndex, n: usize) -> Option<(BasisIndex, f64)> {
    use OperatorKind::*;
    let (big, small) = (from.big, from.small);
    debug_assert!(from.is_valid(n));
    let free = n - big - small;
    let (to, amp2) = match kind {
        JhPlus => (BasisIndex::new(big + 1, small), free * (big + 1)),
        JcPlus => (BasisIndex::new(big, small + 1), free * (small + 1)),
        JhMinus if big > 0 => (BasisIndex::new(big - 1, small), (free + 1) * big),
        JcMinus if small > 0 => (BasisIndex::new(big, small - 1), (free + 1) * small),
        JwPlus if small > 0 => (BasisIndex::new(big + 1, small - 1), (big + 1) * small),
        JwMinus if big > 0 => (BasisIndex::new(big - 1, small + 1), big * (small + 1)),
        JhMinus | JcMinus | JwPlus | JwMinus => return None,
        _ => panic!("ladder_element called with non-ladder kind {kind:?}"),
    };
    (amp2 > 0).then(|| (to, (amp2 as f64).sqrt()))
}

/// A collective operator stored as a sparse real matrix over `|M;m⟩`.
#[derive(Debug, Clone)]
pub struct CollectiveOperator {
    pub kind: OperatorKind,
    pub n: usize,
    pub matrix: CsMat<f64>,
}

impl CollectiveOperator {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for (v, (i, j)) in self.matrix.iter() {
            out[(i, j)] += *v;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self {
            kind: self.kind.adjoint(),
            n: self.n,
            matrix: self.matrix.transpose_view().to_csc(),
        }
    }
}

fn bare_matrix(kind: OperatorKind, n: usize) -> CsMat<f64> {
    use OperatorKind::*;
    let basis = CollectiveBasis::new(n);
    let d = basis.dim();
    let mut tri = TriMat::new((d, d));
    for (col, s) in basis.states().iter().enumerate() {
        match kind {
            NumberSmall => {
                if s.small > 0 {
                    tri.add_triplet(col, col, s.small as f64)
                }
            }
            NumberLarge => {
                if s.big > 0 {
                    tri.add_triplet(col, col, s.big as f64)
                }
            }
            Identity => tri.add_triplet(col, col, 1.0),
            _ => {
                if let Some((to, amp)) = ladder_element(kind, *s, n) {
                    tri.add_triplet(to.linear(), col, amp);
                }
            }
        }
    }
    tri.to_csc()
}

/// Build a collective operator. `alpha` is only read for the rotated `S` kinds;
/// negative angles are allowed and encode a negative driving amplitude.
pub fn build_operator(kind: OperatorKind, n: usize, alpha: f64) -> CollectiveOperator {
    use OperatorKind::*;
    let matrix = if kind.is_rotated() {
        let (s, c) = alpha.sin_cos();
        let (jc, jh) = match kind {
            SMinusMinus | SPlusMinus => (bare_matrix(JcMinus, n), bare_matrix(JhMinus, n)),
            _ => (bare_matrix(JcPlus, n), bare_matrix(JhPlus, n)),
        };
        let (a, b) = match kind {
            SMinusMinus | SMinusPlus => (c, -s),
            _ => (s, c),
        };
        &jc.map(|x| a * x) + &jh.map(|x| b * x)
    } else {
        bare_matrix(kind, n)
    };
    CollectiveOperator { kind, n, matrix }
}

/// Unitary whose columns are the rotated states
/// `|M,m⟩ ∝ (S_+^+)^M (S_−^+)^m |0…0⟩` expressed in `|M;m⟩` coordinates.
///
/// Columns are normalized to unit length with a positive normalization
/// constant, so `alpha = 0` gives the identity.
pub fn rotated_basis_transform(n: usize, alpha: f64) -> Result<DMatrix<f64>> {
    let basis = CollectiveBasis::new(n);
    let d = basis.dim();
    let s_minus_up = build_operator(OperatorKind::SMinusPlus, n, alpha).matrix;
    let s_plus_up = build_operator(OperatorKind::SPlusPlus, n, alpha).matrix;
    let mut u = DMatrix::<f64>::zeros(d, d);
    let apply = |op: &CsMat<f64>, v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (x, (i, j)) in op.iter() {
            out[i] += x * v[j];
        }
        out
    };
    let normalized = |mut v: Vec<f64>| -> Result<Vec<f64>> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numerical("rotated basis vector vanished".into()));
        }
        v.iter_mut().for_each(|x| *x /= norm);
        Ok(v)
    };
    let mut seed = vec![0.0; d];
    seed[0] = 1.0;
    for small in 0..=n {
        if small > 0 {
            seed = normalized(apply(&s_minus_up, &seed))?;
        }
        let mut v = seed.clone();
        for big in 0..=(n - small) {
            if big > 0 {
                v = normalized(apply(&s_plus_up, &v))?;
            }
            let col = BasisIndex::new(big, small).linear();
            u.column_mut(col).copy_from_slice(&v);
        }
    }
    let defect = (u.transpose() * &u - DMatrix::identity(d, d)).amax();
    if defect > 1e-10 {
        return Err(Error::Numerical(format!(
            "rotated basis lost orthonormality ({defect:.2e})"
        )));
    }
    Ok(u)
}
