//! Floquet-Redfield treatment without the secular approximation.
//!
//! In the Schrödinger picture the generator has exactly three Fourier
//! components, `L(t) = L0 + L− e^{−iΩt} + L+ e^{+iΩt}`. The asymptotic state
//! `ρ(t) = Σ_n ρ^(n) e^{inΩt}` follows from a truncated block-tridiagonal
//! system, and the period-averaged current of reservoir ν is
//! `tr(𝒥0 ρ^(0) + 𝒥− ρ^(+1) + 𝒥+ ρ^(−1))`.

use sprs::CsMat;

use crate::backend::{Backend, Point, SolveOptions};
use crate::basis::{build_operator, OperatorKind};
use crate::error::{Error, Result};
use crate::floquet::{FloquetBranch, FloquetData};
use crate::params::{Baths, SystemParams};
use crate::superop::{
    block_tridiagonal_nullspace, complexify, steady_state, CurrentSuperoperator, Degeneracy, FourierState, Generator,
    GeneratorBuilder, Weight, C64, REDFIELD_POSITIVITY_TOL,
};
use crate::thermo::{CurrentReport, COOLING_FLOOR};

/// Largest N accepted by the backend.
pub const REDFIELD_CAP: usize = 10;

/// Imaginary parts of period-averaged currents above this are a numerical failure.
pub const IMAGINARY_RESIDUE: f64 = 1e-9;

/// Bare collective operators used by the sidebands.
struct Ops {
    jc_plus: CsMat<C64>,
    jc_minus: CsMat<C64>,
    jh_plus: CsMat<C64>,
    jh_minus: CsMat<C64>,
    jc: CsMat<C64>,
    jh: CsMat<C64>,
    jw_plus: CsMat<C64>,
    jw_minus: CsMat<C64>,
    h0: CsMat<C64>,
}

impl Ops {
    fn new(p: &SystemParams) -> Self {
        use OperatorKind::*;
        let op = |k| complexify(&build_operator(k, p.n_qutrits, 0.0).matrix);
        let (jc_plus, jc_minus, jh_plus, jh_minus) = (op(JcPlus), op(JcMinus), op(JhPlus), op(JhMinus));
        let jc = &jc_plus + &jc_minus;
        let jh = &jh_plus + &jh_minus;
        let h0 = &op(NumberSmall).map(|x| x * p.delta) + &op(NumberLarge).map(|x| x * p.big_delta);
        Self {
            jc_plus,
            jc_minus,
            jh_plus,
            jh_minus,
            jc,
            jh,
            jw_plus: op(JwPlus),
            jw_minus: op(JwMinus),
            h0,
        }
    }
}

/// The three Fourier components of the generator, each with its cold and hot
/// current superoperators.
#[derive(Debug, Clone)]
pub struct RedfieldSidebands {
    pub zero: Generator,
    /// Component multiplying `e^{+iΩt}`.
    pub plus: Generator,
    /// Component multiplying `e^{−iΩt}`.
    pub minus: Generator,
    pub floquet: FloquetData,
    pub system: SystemParams,
    pub baths: Baths,
}

pub fn build_redfield_sidebands(p: &SystemParams, baths: &Baths) -> Result<RedfieldSidebands> {
    p.validate()?;
    let f = FloquetData::new(p);
    let ops = Ops::new(p);
    let d = crate::basis::basis_dim(p.n_qutrits);
    let (gc, gh) = (|w| baths.cold.rate(w), |w| baths.hot.rate(w));
    let c = |x: f64| C64::new(x, 0.0);
    let lam = C64::new(0.0, -p.lambda);

    let mut zero = GeneratorBuilder::new(d);
    zero.hamiltonian(&ops.h0);
    let mut plus = GeneratorBuilder::new(d);
    plus.left(lam, &ops.jw_minus);
    plus.right(-lam, &ops.jw_minus);
    let mut minus = GeneratorBuilder::new(d);
    minus.left(lam, &ops.jw_plus);
    minus.right(-lam, &ops.jw_plus);

    for a in FloquetBranch::BOTH {
        let (o1, o2) = f.overlaps(a);
        let (wc, wh) = (f.cold_frequency(a), f.hot_frequency(a));
        // −g/2 ([J, Bρ] + [ρB†, J])
        let mut both = |coef: f64, j: &CsMat<C64>, b: &CsMat<C64>, bd: &CsMat<C64>, w: Weight| {
            zero.commutator_left(c(-0.5 * coef), j, b, Some(w));
            zero.commutator_right(c(-0.5 * coef), bd, j, Some(w));
        };
        both(gc(-wc) * o1 * o1, &ops.jc, &ops.jc_plus, &ops.jc_minus, Weight::cold(-wc));
        both(gc(wc) * o1 * o1, &ops.jc, &ops.jc_minus, &ops.jc_plus, Weight::cold(wc));
        both(gh(-wh) * o2 * o2, &ops.jh, &ops.jh_plus, &ops.jh_minus, Weight::hot(-wh));
        both(gh(wh) * o2 * o2, &ops.jh, &ops.jh_minus, &ops.jh_plus, Weight::hot(wh));

        let x = o1 * o2;
        if x == 0.0 {
            continue;
        }
        plus.commutator_right(c(-0.5 * gc(-wc) * x), &ops.jh_minus, &ops.jc, Some(Weight::cold(-wc)));
        plus.commutator_left(c(-0.5 * gc(wc) * x), &ops.jc, &ops.jh_minus, Some(Weight::cold(wc)));
        plus.commutator_left(c(-0.5 * gh(-wh) * x), &ops.jh, &ops.jc_plus, Some(Weight::hot(-wh)));
        plus.commutator_right(c(-0.5 * gh(wh) * x), &ops.jc_plus, &ops.jh, Some(Weight::hot(wh)));

        minus.commutator_left(c(-0.5 * gc(-wc) * x), &ops.jc, &ops.jh_plus, Some(Weight::cold(-wc)));
        minus.commutator_right(c(-0.5 * gc(wc) * x), &ops.jh_plus, &ops.jc, Some(Weight::cold(wc)));
        minus.commutator_right(c(-0.5 * gh(-wh) * x), &ops.jc_minus, &ops.jh, Some(Weight::hot(-wh)));
        minus.commutator_left(c(-0.5 * gh(wh) * x), &ops.jh, &ops.jc_minus, Some(Weight::hot(wh)));
    }
    Ok(RedfieldSidebands {
        zero: zero.finish(true),
        plus: plus.finish(true),
        minus: minus.finish(true),
        floquet: f,
        system: *p,
        baths: *baths,
    })
}

/// Truncated asymptotic state together with the cutoff search record.
#[derive(Debug, Clone)]
pub struct AsymptoticState {
    pub state: FourierState,
    pub cutoff: usize,
    /// Relative cold-current change between successive cutoffs.
    pub history: Vec<f64>,
    pub i_cold: f64,
    pub i_hot: f64,
}

impl AsymptoticState {
    /// False when the cutoff history did not shrink monotonically.
    pub fn monotone(&self) -> bool {
        self.history.windows(2).all(|w| w[1] <= w[0])
    }
}

fn averaged(cur: [&CurrentSuperoperator; 3], state: &FourierState) -> C64 {
    let [zero, plus, minus] = cur;
    zero.trace_against(state.component(0))
        + minus.trace_against(state.component(1))
        + plus.trace_against(state.component(-1))
}

/// Period-averaged `(I_c, I_h)`.
pub fn period_averaged_currents(sb: &RedfieldSidebands, state: &FourierState) -> Result<(f64, f64)> {
    let ic = averaged([&sb.zero.cold, &sb.plus.cold, &sb.minus.cold], state);
    let ih = averaged([&sb.zero.hot, &sb.plus.hot, &sb.minus.hot], state);
    for v in [ic, ih] {
        if v.im.abs() > IMAGINARY_RESIDUE * v.re.abs().max(1.0) {
            return Err(Error::Numerical(format!("current has imaginary residue {:.2e}", v.im)));
        }
    }
    Ok((ic.re, ih.re))
}

pub fn solve_with_cutoff(sb: &RedfieldSidebands, cutoff: usize) -> Result<FourierState> {
    block_tridiagonal_nullspace(
        &sb.zero.generator,
        &sb.plus.generator,
        &sb.minus.generator,
        sb.system.omega,
        cutoff,
    )
}

/// Doubles the cutoff from 1 until the cold current changes by less than
/// `tol` relative to the smaller cutoff, then keeps the smaller cutoff.
pub fn redfield_asymptotic(sb: &RedfieldSidebands, cap: usize, tol: f64) -> Result<AsymptoticState> {
    if sb.system.omega == 0.0 {
        return Err(Error::param("omega", "the Fourier ansatz needs a nonzero drive frequency"));
    }
    let floor = COOLING_FLOOR * sb.baths.max_coupling() * sb.system.delta;
    let mut cutoff = 1;
    let mut state = solve_with_cutoff(sb, cutoff)?;
    let (mut ic, mut ih) = period_averaged_currents(sb, &state)?;
    let mut history = Vec::new();
    while 2 * cutoff <= cap {
        let next = solve_with_cutoff(sb, 2 * cutoff)?;
        let (nc, nh) = period_averaged_currents(sb, &next)?;
        let change = (nc - ic).abs() / ic.abs().max(floor);
        history.push(change);
        if change < tol {
            return Ok(AsymptoticState {
                state,
                cutoff,
                history,
                i_cold: ic,
                i_hot: ih,
            });
        }
        cutoff *= 2;
        state = next;
        ic = nc;
        ih = nh;
    }
    Err(Error::CutoffNotConverged { cap, history })
}

/// The Floquet-Redfield backend, limited to `max_n` qutrits.
#[derive(Debug, Clone, Copy)]
pub struct FloquetRedfield {
    pub max_n: usize,
}

impl Default for FloquetRedfield {
    fn default() -> Self {
        Self { max_n: REDFIELD_CAP }
    }
}

impl Backend for FloquetRedfield {
    fn name(&self) -> &'static str {
        "redfield"
    }

    fn max_qutrits(&self) -> Option<usize> {
        Some(self.max_n)
    }

    fn solve(&self, point: &Point, opts: &SolveOptions) -> Result<CurrentReport> {
        let sb = build_redfield_sidebands(&point.system, &point.baths)?;
        let (p, baths) = (&point.system, &point.baths);
        if p.omega == 0.0 {
            let l = sb.zero.generator.plus(&sb.plus.generator).plus(&sb.minus.generator);
            let policy = if opts.lenient { Degeneracy::Lenient } else { Degeneracy::Strict };
            let ss = steady_state(&l, policy)?;
            let ic = (sb.zero.cold.trace_against(&ss.rho.matrix)
                + sb.plus.cold.trace_against(&ss.rho.matrix)
                + sb.minus.cold.trace_against(&ss.rho.matrix))
            .re;
            let ih = (sb.zero.hot.trace_against(&ss.rho.matrix)
                + sb.plus.hot.trace_against(&ss.rho.matrix)
                + sb.minus.hot.trace_against(&ss.rho.matrix))
            .re;
            let mut r = CurrentReport::new(ic, ih, None, baths, p.delta);
            r.flags.degenerate = ss.degenerate;
            r.flags.positivity_warning = ss.rho.min_eigenvalue() < -REDFIELD_POSITIVITY_TOL;
            return Ok(r);
        }
        let asym = redfield_asymptotic(&sb, opts.redfield_cutoff_cap, opts.redfield_tolerance)?;
        let mut r = CurrentReport::new(asym.i_cold, asym.i_hot, None, baths, p.delta);
        r.flags.cutoff = Some(asym.cutoff);
        r.flags.nonmonotone_convergence = !asym.monotone();
        let rho0 = crate::superop::DensityMatrix {
            matrix: asym.state.component(0).clone(),
        };
        r.flags.positivity_warning = rho0.min_eigenvalue() < -REDFIELD_POSITIVITY_TOL;
        if r.flags.nonmonotone_convergence {
            log::warn!("redfield cutoff history not monotone: {:?}", asym.history);
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ReservoirKind, ReservoirParams};
    use crate::superop::vec_index;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn baths(bc: f64, bh: f64) -> Baths {
        Baths::new(
            ReservoirParams::new(ReservoirKind::Cold, bc, 0.1, 1.0).unwrap(),
            ReservoirParams::new(ReservoirKind::Hot, bh, 0.1, 1.0).unwrap(),
        )
        .unwrap()
    }

    fn sys(n: usize, omega: f64, lambda: f64) -> SystemParams {
        SystemParams::new(1.0, 2.0, omega, lambda, n).unwrap()
    }

    /// Row `(i, j)` of the single-qutrit equations, as coefficients of the
    /// components `ρ_kl`.
    type Rows = Vec<((usize, usize), Vec<((usize, usize), C64)>)>;

    /// Hand-written single-qutrit equations of motion for the sidebands.
    fn single_qutrit_oracle(p: &SystemParams, b: &Baths) -> [Rows; 3] {
        let f = FloquetData::new(p);
        let (gc, gh) = (|w| b.cold.rate(w), |w| b.hot.rate(w));
        let (mut l10, mut l01, mut l20, mut l02) = (0.0, 0.0, 0.0, 0.0);
        let (mut dc, mut uc, mut dh, mut uh) = (0.0, 0.0, 0.0, 0.0);
        for a in FloquetBranch::BOTH {
            let (o1, o2) = f.overlaps(a);
            let e = f.energy(a);
            let h = p.omega / 2.0;
            l10 += o1 * o1 * gc(e - h);
            l01 += o1 * o1 * gc(-e + h);
            l20 += o2 * o2 * gh(e + h);
            l02 += o2 * o2 * gh(-e - h);
            dc += o1 * o2 / 2.0 * gc(e - h);
            uc += o1 * o2 / 2.0 * gc(-e + h);
            dh += o1 * o2 / 2.0 * gh(e + h);
            uh += o1 * o2 / 2.0 * gh(-e - h);
        }
        let r = |x: f64| C64::new(x, 0.0);
        let il = C64::new(0.0, p.lambda);
        let split = C64::new(0.0, p.big_delta - p.delta);
        let zero = vec![
            ((0, 0), vec![((0, 0), r(-l01 - l02)), ((1, 1), r(l10)), ((2, 2), r(l20))]),
            ((1, 1), vec![((0, 0), r(l01)), ((1, 1), r(-l10))]),
            ((2, 2), vec![((0, 0), r(l02)), ((2, 2), r(-l20))]),
            ((1, 2), vec![((1, 2), -(r(l10 / 2.0 + l20 / 2.0) - split))]),
            ((2, 1), vec![((2, 1), -(r(l10 / 2.0 + l20 / 2.0) + split))]),
        ];
        let minus = vec![
            ((0, 0), vec![((1, 2), r(dc + dh))]),
            ((1, 1), vec![((1, 2), -(r(dc) - il))]),
            ((2, 2), vec![((1, 2), -(r(dh) + il))]),
            ((1, 2), vec![]),
            ((2, 1), vec![((0, 0), r(uc + uh)), ((1, 1), -(r(dh) + il)), ((2, 2), -(r(dc) - il))]),
        ];
        let plus = vec![
            ((0, 0), vec![((2, 1), r(dc + dh))]),
            ((1, 1), vec![((2, 1), -(r(dc) + il))]),
            ((2, 2), vec![((2, 1), -(r(dh) - il))]),
            ((1, 2), vec![((0, 0), r(uc + uh)), ((1, 1), -(r(dh) - il)), ((2, 2), -(r(dc) + il))]),
            ((2, 1), vec![]),
        ];
        [zero, plus, minus]
    }

    #[test]
    fn single_qutrit_matrix_elements() {
        let b = baths(1.5, 1.0);
        for (omega, lam) in [(0.8, 0.3), (1.0, 0.05), (1.3, -0.4)] {
            let p = sys(1, omega, lam);
            let sb = build_redfield_sidebands(&p, &b).unwrap();
            let oracle = single_qutrit_oracle(&p, &b);
            let gens = [&sb.zero, &sb.plus, &sb.minus];
            for (g, rows) in gens.iter().zip(oracle.iter()) {
                let m = g.generator.to_dense();
                for ((i, j), coefs) in rows {
                    let row = vec_index(*i, *j, 3);
                    let mut expect = vec![C64::new(0.0, 0.0); 9];
                    for ((k, l), v) in coefs {
                        expect[vec_index(*k, *l, 3)] = *v;
                    }
                    for col in 0..9 {
                        assert!(
                            (m[(row, col)] - expect[col]).norm() < 1e-14,
                            "({i},{j}) col {col}: {} vs {}",
                            m[(row, col)],
                            expect[col]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sidebands_preserve_trace() {
        let b = baths(1.5, 1.0);
        for n in 1..=3 {
            let sb = build_redfield_sidebands(&sys(n, 0.9, 0.3), &b).unwrap();
            for g in [&sb.zero, &sb.plus, &sb.minus] {
                assert!(g.generator.trace_defect() < 1e-14);
            }
        }
    }

    #[test]
    fn undriven_off_resonance_has_no_sidebands() {
        let b = baths(1.5, 1.0);
        for n in 1..=3 {
            for omega in [0.4, 1.7] {
                let sb = build_redfield_sidebands(&sys(n, omega, 0.0), &b).unwrap();
                assert_eq!(sb.plus.generator.norm_max(), 0.0);
                assert_eq!(sb.minus.generator.norm_max(), 0.0);
            }
        }
    }

    /// Dense oracle for the undriven Redfield generator built from Kronecker products.
    fn undriven_oracle(n: usize, b: &Baths) -> DMatrix<C64> {
        let dense = |k| build_operator(k, n, 0.0).to_dense().map(|x| C64::new(x, 0.0));
        use OperatorKind::*;
        let d = crate::basis::basis_dim(n);
        let id = DMatrix::<C64>::identity(d, d);
        let pre = |a: &DMatrix<C64>| id.kronecker(a);
        let post = |a: &DMatrix<C64>| a.transpose().kronecker(&id);
        let sandw = |a: &DMatrix<C64>, c: &DMatrix<C64>| c.transpose().kronecker(a);
        let h0 = dense(NumberSmall) + dense(NumberLarge) * C64::new(2.0, 0.0);
        let mut l = (pre(&h0) - post(&h0)) * C64::new(0.0, -1.0);
        for (jp, jm, res, e) in [
            (dense(JcPlus), dense(JcMinus), &b.cold, 1.0),
            (dense(JhPlus), dense(JhMinus), &b.hot, 2.0),
        ] {
            let j = &jp + &jm;
            // B = γ(e) J⁻ + γ(−e) J⁺, all real
            let bop = &jm * C64::new(res.rate(e), 0.0) + &jp * C64::new(res.rate(-e), 0.0);
            let bd = bop.adjoint();
            let half = C64::new(0.5, 0.0);
            l -= (pre(&(&j * &bop)) - sandw(&bop, &j)) * half;
            l -= (post(&(&bd * &j)) - sandw(&j, &bd)) * half;
        }
        l
    }

    #[test]
    fn undriven_generator_matches_oracle() {
        let b = baths(1.5, 1.0);
        for n in 1..=3 {
            let sb = build_redfield_sidebands(&sys(n, 0.4, 0.0), &b).unwrap();
            let diff = (sb.zero.generator.to_dense() - undriven_oracle(n, &b)).camax();
            assert!(diff < 1e-14, "n={n}: {diff}");
        }
    }

    /// Secular part of `L0 + i[H0, ·]` at `λ = 0` equals the bare Lindblad dissipators.
    #[test]
    fn secular_part_reduces_to_weak_dissipators() {
        let b = baths(1.5, 1.0);
        let n = 2;
        let p = sys(n, 0.4, 0.0);
        let sb = build_redfield_sidebands(&p, &b).unwrap();
        let basis = crate::basis::CollectiveBasis::new(n);
        let energy: Vec<f64> = basis.states().iter().map(|s| s.small as f64 + 2.0 * s.big as f64).collect();
        let d = basis.dim();
        let mut lb = GeneratorBuilder::new(d);
        use OperatorKind::*;
        let op = |k| complexify(&build_operator(k, n, 0.0).matrix);
        lb.dissipator(&op(JcMinus), b.cold.rate(1.0), None).unwrap();
        lb.dissipator(&op(JcPlus), b.cold.rate(-1.0), None).unwrap();
        lb.dissipator(&op(JhMinus), b.hot.rate(2.0), None).unwrap();
        lb.dissipator(&op(JhPlus), b.hot.rate(-2.0), None).unwrap();
        let lindblad = lb.finish(true).generator.to_dense();
        let mut hb = GeneratorBuilder::new(d);
        hb.hamiltonian(&complexify(&build_operator(NumberSmall, n, 0.0).matrix.map(|x| x * 1.0)));
        hb.hamiltonian(&complexify(&build_operator(NumberLarge, n, 0.0).matrix.map(|x| x * 2.0)));
        let red = sb.zero.generator.to_dense() - hb.finish(true).generator.to_dense();
        let freq = |v: usize| energy[v % d] - energy[v / d];
        for r in 0..d * d {
            for c in 0..d * d {
                if (freq(r) - freq(c)).abs() < 1e-12 {
                    assert!((red[(r, c)] - lindblad[(r, c)]).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn undriven_current_vanishes() {
        let b = baths(1.5, 1.0);
        for omega in [0.3, 0.77, 1.0, 1.4] {
            let sb = build_redfield_sidebands(&sys(1, omega, 0.0), &b).unwrap();
            let a = redfield_asymptotic(&sb, 32, 1e-3).unwrap();
            assert!(a.i_cold.abs() < 1e-12 * 0.1, "{omega}: {}", a.i_cold);
        }
    }

    #[test]
    fn asymptotic_state_properties() {
        let b = baths(1.5, 1.0);
        let sb = build_redfield_sidebands(&sys(2, 0.9, 0.4), &b).unwrap();
        let a = redfield_asymptotic(&sb, 32, 1e-3).unwrap();
        let s = &a.state;
        assert!(s.pairing_defect < 1e-8);
        assert_relative_eq!(s.component(0).trace().re, 1.0, epsilon = 1e-10);
        for k in 1..=s.cutoff as isize {
            assert!(s.component(k).trace().norm() < 1e-10);
        }
        for phase in [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            let rho = s.at_phase(phase);
            assert!((&rho - rho.adjoint()).camax() < 1e-8);
            assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    /// Generic current against the explicit single-qutrit expression.
    #[test]
    fn single_qutrit_current_formula() {
        let b = baths(1.5, 1.0);
        for (omega, lam) in [(0.8, 0.3), (1.0, 0.2), (1.2, -0.45)] {
            let p = sys(1, omega, lam);
            let sb = build_redfield_sidebands(&p, &b).unwrap();
            let a = redfield_asymptotic(&sb, 32, 1e-3).unwrap();
            let f = &sb.floquet;
            let (r0, rm, rp) = (a.state.component(0), a.state.component(-1), a.state.component(1));
            let mut expect = C64::new(0.0, 0.0);
            for br in FloquetBranch::BOTH {
                let (o1, o2) = f.overlaps(br);
                let w = f.energy(br) - omega / 2.0;
                expect -= w * b.cold.rate(w) * o1 * o1 * r0[(1, 1)];
                expect -= -w * b.cold.rate(-w) * o1 * o1 * r0[(0, 0)];
                expect -= w * b.cold.rate(w) / 2.0 * o1 * o2 * (rm[(2, 1)] + rp[(1, 2)]);
            }
            assert!(expect.im.abs() < 1e-12);
            assert_relative_eq!(a.i_cold, expect.re, max_relative = 1e-10, epsilon = 1e-15);
        }
    }

    #[test]
    fn first_law_and_second_law() {
        let b = baths(1.5, 1.0);
        for (n, omega, lam) in [(1, 0.9, 0.3), (2, 1.0, 0.1), (3, 1.2, 0.5)] {
            let pt = Point::new(sys(n, omega, lam), b).unwrap();
            let r = FloquetRedfield::default().solve(&pt, &SolveOptions::default()).unwrap();
            assert!(r.entropy_rate > -1e-10);
            assert_eq!(r.flags.cutoff, Some(1));
        }
    }

    #[test]
    fn sparse_and_dense_stack_solvers_agree() {
        let b = baths(1.5, 1.0);
        let sb = build_redfield_sidebands(&sys(3, 0.9, 0.4), &b).unwrap();
        let d = 10;
        let trace: Vec<usize> = (0..d).map(|i| vec_index(i, i, d)).collect();
        let solve = |limit| {
            crate::linalg::fourier_stack_nullvector_with_limit(
                &sb.zero.generator.matrix,
                &sb.plus.generator.matrix,
                &sb.minus.generator.matrix,
                0.9,
                2,
                &trace,
                limit,
            )
            .unwrap()
        };
        let (dense, sparse) = (solve(usize::MAX), solve(0));
        assert!(sparse.residual < 1e-12);
        for (a, s) in dense.components.iter().zip(&sparse.components) {
            assert!((a - s).camax() < 1e-12);
        }
    }

    #[test]
    fn static_limit_is_routed() {
        let b = baths(1.5, 1.0);
        let pt = Point::new(sys(2, 0.0, 0.3), b).unwrap();
        let r = FloquetRedfield::default().solve(&pt, &SolveOptions::default()).unwrap();
        assert!(r.flags.cutoff.is_none());
        assert!(r.i_cold.is_finite());
    }
}
