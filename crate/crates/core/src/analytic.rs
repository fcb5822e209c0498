//! Closed-form evolution under the mixed optomechanical Hamiltonian from
//! `(|0>_a + |1>_a)|0>_b / sqrt(2)`, and the conditional states of mode `b`
//! after measuring mode `a` in the `(|0> +- |1>)/sqrt(2)` basis.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, HilbertConfig, Space, StateVector, TAIL_LIMIT};
use crate::params::AnalyticParams;

/// Outcomes below this probability are treated as impossible.
pub const MIN_PROBABILITY: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatComponents {
    pub time: f64,
    pub alpha1: C64,
    /// Relative phase between vacuum and the displaced branch.
    pub phase: f64,
    pub plus_state: StateVector,
    pub minus_state: StateVector,
    pub norm_plus: f64,
    pub norm_minus: f64,
    pub prob_plus: f64,
    pub prob_minus: f64,
}

fn check_tail(psi: &StateVector) -> Result<()> {
    let tail = fock::tail_mass(&psi.populations());
    if tail > TAIL_LIMIT {
        return Err(Error::CutoffInsufficient { tail, limit: TAIL_LIMIT });
    }
    Ok(())
}

/// `D[alpha1(t)] S(eta1) S(-eta1 e^{-2i varpi1 t}) |0>_b`.
pub fn branch_state(t: f64, ap: &AnalyticParams, n_b: usize) -> Result<StateVector> {
    let vac = StateVector::basis(Space::ModeB(n_b), 0)?;
    let inner = fock::squeeze(-ap.eta1 * C64::from_polar(1.0, -2.0 * ap.varpi1 * t), n_b)?;
    let outer = fock::squeeze(C64::from(ap.eta1), n_b)?;
    let disp = fock::displacement(ap.alpha1(t), n_b)?;
    let u = &disp * &(&outer * &inner);
    let psi = u.apply(&vac)?;
    check_tail(&psi)?;
    Ok(psi)
}

/// Joint state at time `t`:
/// `(|0>_a|0>_b + e^{-i eps(t)} |1>_a D[alpha1] S(eta1) S(-eta1 e^{-2i varpi1 t})|0>_b) / sqrt(2)`.
pub fn analytic_state(t: f64, ap: &AnalyticParams, dims: HilbertConfig) -> Result<StateVector> {
    let branch = branch_state(t, ap, dims.n_b)?;
    let mut amps = Array1::zeros(dims.dim());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    amps[dims.index(0, 0)] = C64::from(h);
    let w = C64::from_polar(h, -ap.phase(t));
    amps.slice_mut(s![dims.index(1, 0)..dims.index(1, 0) + dims.n_b])
        .assign(&branch.amps().mapv(|z| z * w));
    StateVector::new(dims.joint(), amps)
}

/// `N_+- [|0> +- e^{-i phase} |chi>]` for a branch state `chi` whose vacuum
/// overlap is `overlap = <0|chi>`.
fn components(
    time: f64,
    alpha1: C64,
    phase: f64,
    chi: &StateVector,
    overlap: C64,
) -> Result<CatComponents> {
    let n = chi.dim();
    let rel = C64::from_polar(1.0, -phase);
    let cross = (rel * overlap).re;
    let branch = |sign: f64| -> Result<(StateVector, f64, f64)> {
        let norm_sq_inv = 2.0 + 2.0 * sign * cross;
        let prob = norm_sq_inv / 4.0;
        if prob < MIN_PROBABILITY {
            return Err(Error::ZeroProbabilityOutcome(prob));
        }
        let norm = norm_sq_inv.powf(-0.5);
        let mut amps = chi.amps().mapv(|z| z * rel * sign);
        amps[0] += 1.0;
        Ok((StateVector::new(Space::ModeB(n), amps.mapv(|z| z * norm))?, norm, prob))
    };
    let (plus_state, norm_plus, prob_plus) = branch(1.0)?;
    let (minus_state, norm_minus, prob_minus) = branch(-1.0)?;
    Ok(CatComponents { time, alpha1, phase, plus_state, minus_state, norm_plus, norm_minus, prob_plus, prob_minus })
}

/// Cat states `N_+- [|0> +- e^{-i eps10 t_c} |alpha1(t_c)>]` at `t_c(k)`, with
/// `N_+- = {2 +- 2 exp(-|alpha1|^2/2) cos(eps10 t_c)}^{-1/2}` and `P_+- = 1/(4 N_+-^2)`.
pub fn cat_components(ap: &AnalyticParams, k: u32, n_b: usize) -> Result<CatComponents> {
    let t = ap.t_c(k);
    let alpha1 = ap.alpha1(t);
    let chi = fock::displacement(alpha1, n_b)?.apply(&StateVector::basis(Space::ModeB(n_b), 0)?)?;
    check_tail(&chi)?;
    let overlap = C64::from((-0.5 * alpha1.norm_sqr()).exp());
    components(t, alpha1, ap.eps10 * t, &chi, overlap)
}

/// Superpositions of vacuum and a displaced squeezed state at `t_s(k)`,
/// `N_+- {|0> +- e^{-i eps(t_s)} D[alpha1(t_s)] S(2 eta1) |0>}`.
pub fn squeezed_components(ap: &AnalyticParams, k: u32, n_b: usize) -> Result<CatComponents> {
    let t = ap.t_s(k);
    let alpha1 = ap.alpha1(t);
    let vac = StateVector::basis(Space::ModeB(n_b), 0)?;
    let u = &fock::displacement(alpha1, n_b)? * &fock::squeeze(C64::from(2.0 * ap.eta1), n_b)?;
    let chi = u.apply(&vac)?;
    check_tail(&chi)?;
    let two_eta = 2.0 * ap.eta1;
    let overlap = (-0.5 * alpha1.norm_sqr() - 0.5 * alpha1.conj().powi(2) * two_eta.tanh()).exp()
        / two_eta.cosh().sqrt();
    components(t, alpha1, ap.phase(t), &chi, overlap)
}

fn joint_dims(space: Space) -> Result<(usize, usize)> {
    match space {
        Space::Joint { n_a, n_b } => Ok((n_a, n_b)),
        other => Err(Error::InvalidSpace(format!("mode-a measurement needs a joint state, got {other:?}"))),
    }
}

/// Projects mode `a` onto `(|0> +- |1>)/sqrt(2)`; returns the normalized
/// mode-`b` state and the outcome probability.
pub fn measure_mode_a(psi: &StateVector, sign: Sign) -> Result<(StateVector, f64)> {
    let (_, n_b) = joint_dims(psi.space())?;
    let amps = psi.amps();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let reduced: Array1<C64> = (&amps.slice(s![0..n_b]) + &(&amps.slice(s![n_b..2 * n_b]) * sign.value())) * h;
    let prob = reduced.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if prob < MIN_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome(prob));
    }
    Ok((StateVector::new(Space::ModeB(n_b), reduced / C64::from(prob.sqrt()))?, prob))
}

/// Density-matrix form of [`measure_mode_a`].
pub fn measure_mode_a_mixed(rho: &DensityMatrix, sign: Sign) -> Result<(DensityMatrix, f64)> {
    let (_, n_b) = joint_dims(rho.space())?;
    let r = rho.matrix();
    let sg = sign.value();
    let blk = |m: usize, mp: usize| r.slice(s![m * n_b..(m + 1) * n_b, mp * n_b..(mp + 1) * n_b]);
    let sum: Array2<C64> = &blk(0, 0) + &(&blk(0, 1) * sg) + &(&blk(1, 0) * sg) + blk(1, 1);
    let reduced = sum * C64::from(0.5);
    let prob = reduced.diag().iter().map(|z| z.re).sum::<f64>();
    if prob < MIN_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome(prob));
    }
    Ok((DensityMatrix::new(Space::ModeB(n_b), reduced / C64::from(prob))?, prob))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::max_abs;
    use crate::params::{analytic_params, effective_params, ModelParams};

    fn cat_params() -> AnalyticParams {
        let p = ModelParams { chi: 0.01, eps: 0.3, omega_p2: 0.49, ..Default::default() }
            .with_matched_phases()
            .unwrap();
        analytic_params(&effective_params(&p).unwrap()).unwrap()
    }

    #[test]
    fn initial_state() {
        let ap = cat_params();
        let dims = HilbertConfig::new(2, 40).unwrap();
        let psi = analytic_state(0.0, &ap, dims).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut expect = Array1::zeros(80);
        expect[0] = C64::from(h);
        expect[40] = C64::from(h);
        let err = psi.amps().iter().zip(expect.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn cat_amplitude_and_probabilities() {
        let ap = cat_params();
        let cat = cat_components(&ap, 0, 60).unwrap();
        assert!((cat.alpha1.norm() - 3.171).abs() < 1e-3);
        assert!((cat.prob_plus + cat.prob_minus - 1.0).abs() < 1e-12);
        assert!((cat.plus_state.norm() - 1.0).abs() < 1e-10);
        assert!((cat.minus_state.norm() - 1.0).abs() < 1e-10);
        let bound = (-cat.alpha1.norm_sqr() / 2.0).exp();
        assert!((cat.prob_plus - 0.5).abs() <= bound);
    }

    #[test]
    fn measurement_reproduces_components() {
        let ap = cat_params();
        let dims = HilbertConfig::new(2, 60).unwrap();
        let cat = cat_components(&ap, 0, 60).unwrap();
        let psi = analytic_state(ap.t_c(0), &ap, dims).unwrap();
        for (sign, comp, prob) in
            [(Sign::Plus, &cat.plus_state, cat.prob_plus), (Sign::Minus, &cat.minus_state, cat.prob_minus)]
        {
            let (b, p) = measure_mode_a(&psi, sign).unwrap();
            assert!((p - prob).abs() < 1e-10);
            assert!((b.inner(comp).unwrap().norm() - 1.0).abs() < 1e-10);
            let (rb, pm) = measure_mode_a_mixed(&psi.projector(), sign).unwrap();
            assert!((pm - p).abs() < 1e-12);
            assert!(max_abs(&(rb.matrix() - b.projector().matrix())) < 1e-12);
        }
    }

    #[test]
    fn squeezed_components_normalized() {
        let ap = cat_params();
        let sq = squeezed_components(&ap, 0, 80).unwrap();
        assert!((sq.plus_state.norm() - 1.0).abs() < 1e-10);
        assert!((sq.minus_state.norm() - 1.0).abs() < 1e-10);
        assert!((sq.prob_plus + sq.prob_minus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_squeezed_branch_is_rejected() {
        let ap = AnalyticParams { eta1: 0.0, beta1: 0.0, varpi1: 1.0, eps10: 0.0 };
        assert!(matches!(squeezed_components(&ap, 0, 10), Err(Error::ZeroProbabilityOutcome(_))));
    }

    #[test]
    fn measurement_edge_cases() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = Array1::zeros(6);
        amps[0] = C64::from(h);
        amps[3] = C64::from(h);
        let psi = StateVector::new(Space::Joint { n_a: 2, n_b: 3 }, amps).unwrap();
        let (b, p) = measure_mode_a(&psi, Sign::Plus).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!((b.amps()[0] - C64::from(1.0)).norm() < 1e-15);
        assert!(matches!(measure_mode_a(&psi, Sign::Minus), Err(Error::ZeroProbabilityOutcome(_))));
        let single = StateVector::basis(Space::ModeB(3), 0).unwrap();
        assert!(matches!(measure_mode_a(&single, Sign::Plus), Err(Error::InvalidSpace(_))));
    }

    #[test]
    fn agrees_with_numeric_propagation() {
        use crate::evolve::{propagate_schrodinger, SchrodingerMethod};
        use crate::hamiltonians::build_mixed_approx;
        let p = ModelParams { chi: 0.01, eps: 0.3, omega_p2: 0.49, ..Default::default() }
            .with_matched_phases()
            .unwrap();
        let d = effective_params(&p).unwrap();
        let ap = analytic_params(&d).unwrap();
        let dims = HilbertConfig::new(2, 80).unwrap();
        let h = build_mixed_approx(&d, dims).unwrap();
        let psi0 = analytic_state(0.0, &ap, dims).unwrap();
        let grid: Vec<f64> = (0..=8).map(|k| k as f64 * ap.t_c(0) / 4.0).collect();
        let num = propagate_schrodinger(&psi0, &h, &grid, SchrodingerMethod::Eigen).unwrap();
        for (t, psi) in grid.iter().zip(&num.states) {
            let exact = analytic_state(*t, &ap, dims).unwrap();
            let overlap = exact.inner(psi).unwrap().norm();
            assert!(overlap > 1.0 - 1e-9, "t = {t}: overlap {overlap}");
        }
    }
}
