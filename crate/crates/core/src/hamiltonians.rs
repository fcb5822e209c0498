//! Hamiltonian builders on the joint truncated space.
//!
//! Every Hamiltonian here depends on mode `a` only through `a^dagger a`, so
//! each one is assembled block by block: block `m` is the mode-`b` operator
//! seen when mode `a` holds `m` quanta.
//!
//! Quadrature squares such as `(b^dagger + b)^2` are written in normal order,
//! `b^dagger^2 + b^2 + 2 b^dagger b + 1`, which avoids the spurious corner
//! entry that the truncated product `b b^dagger` would introduce.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{HilbertConfig, Operator};
use crate::params::{DerivedParams, FlowState, ModelParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HamiltonianKind {
    ExactRotating,
    TransformedGeneral,
    TransformedStationary,
    MixedApprox,
    QuadraticApprox,
}

/// Mode-`b` building blocks on an `n`-level space.
struct Ladder {
    num: Array2<C64>,
    b: Array2<C64>,
    b2: Array2<C64>,
    id: Array2<C64>,
}

impl Ladder {
    fn new(n: usize) -> Self {
        let mut b = Array2::zeros((n, n));
        let mut b2 = Array2::zeros((n, n));
        for k in 0..n - 1 {
            b[[k, k + 1]] = C64::from(((k + 1) as f64).sqrt());
        }
        for k in 0..n.saturating_sub(2) {
            b2[[k, k + 2]] = C64::from((((k + 1) * (k + 2)) as f64).sqrt());
        }
        let num = Array2::from_diag(&Array1::from_iter((0..n).map(|k| C64::from(k as f64))));
        Self { num, b, b2, id: Array2::eye(n) }
    }

    fn bd(&self) -> Array2<C64> {
        self.b.t().to_owned()
    }

    fn bd2(&self) -> Array2<C64> {
        self.b2.t().to_owned()
    }

    /// `b^dagger u + sign * b u^*`.
    fn quadrature(&self, u: C64, sign: f64) -> Array2<C64> {
        self.bd() * u + &self.b * (u.conj() * sign)
    }

    /// Normal-ordered `(b^dagger u + sign * b u^*)^2` for `|u| = 1`.
    fn quadrature_sq(&self, u: C64, sign: f64) -> Array2<C64> {
        self.bd2() * (u * u) + &self.b2 * (u.conj() * u.conj()) + (&self.num * 2.0 + &self.id) * C64::from(sign)
    }
}

fn block_diagonal(dims: HilbertConfig, mut block: impl FnMut(usize) -> Array2<C64>) -> Result<Operator> {
    let nb = dims.n_b;
    let mut h = Array2::zeros((dims.dim(), dims.dim()));
    for m in 0..dims.n_a {
        h.slice_mut(s![m * nb..(m + 1) * nb, m * nb..(m + 1) * nb]).assign(&block(m));
    }
    Operator::new(dims.joint(), h)
}

/// Mode-`b` block of a joint operator for `m` quanta in mode `a`.
pub fn block(op: &Operator, dims: HilbertConfig, m: usize) -> Result<Array2<C64>> {
    if op.dim() != dims.dim() {
        return Err(Error::DimensionMismatch { expected: dims.dim(), found: op.dim() });
    }
    if m >= dims.n_a {
        return Err(Error::InvalidParams(format!("block {m} outside mode-a cutoff {}", dims.n_a)));
    }
    let nb = dims.n_b;
    Ok(op.matrix().slice(s![m * nb..(m + 1) * nb, m * nb..(m + 1) * nb]).to_owned())
}

/// Ascending eigenvalues of block `m`.
pub fn block_eigenvalues(op: &Operator, dims: HilbertConfig, m: usize) -> Result<Array1<f64>> {
    Ok(crate::fock::eigh(&block(op, dims, m)?)?.0)
}

/// `Delta_b b^dagger b + chi a^dagger a b^dagger b + eps (e^{-i theta_d} b^dagger + h.c.)
/// + Omega_p (e^{-i theta_p} b^dagger^2 + h.c.)`.
pub fn build_exact_rotating(p: &ModelParams, dims: HilbertConfig) -> Result<Operator> {
    let l = Ladder::new(dims.n_b);
    let drive = l.bd() * C64::from_polar(p.eps, -p.theta_d) + &l.b * C64::from_polar(p.eps, p.theta_d);
    let pump = l.bd2() * C64::from_polar(p.omega_p2, -p.theta_p) + &l.b2 * C64::from_polar(p.omega_p2, p.theta_p);
    let base = &l.num * p.delta_b + drive + pump;
    block_diagonal(dims, |m| &base + &(&l.num * (p.chi * m as f64)))
}

/// Frequency `Delta_b cosh 2r - 2 Omega_p cos(theta_p + phi) sinh 2r + phi_dot sinh^2 r`,
/// with `phi_dot sinh^2 r` expanded so that `r = 0` is regular.
pub fn transformed_frequency(p: &ModelParams, r: f64, phi: f64) -> f64 {
    let c = (p.theta_p + phi).cos();
    let frame = 2.0 * p.omega_p2 * c * (2.0 * r).cosh() * r.tanh() - 2.0 * p.delta_b * r.sinh().powi(2);
    p.delta_b * (2.0 * r).cosh() - 2.0 * p.omega_p2 * c * (2.0 * r).sinh() + frame
}

/// c-number dropped from `U^dagger H_I U` with `U = S(r e^{i phi}) D(alpha)`.
///
/// Terms generated by the motion of the frame are not included; they vanish
/// at the stationary point.
pub fn c_offset(p: &ModelParams, flow: &FlowState) -> f64 {
    let (r, phi, alpha) = (flow.r, flow.phi, flow.alpha);
    let beta = alpha * r.cosh() - alpha.conj() * C64::from_polar(r.sinh(), phi);
    p.delta_b * (beta.norm_sqr() + r.sinh().powi(2))
        + 2.0 * (C64::from_polar(p.eps, p.theta_d) * beta).re
        + 2.0 * (C64::from_polar(p.omega_p2, p.theta_p) * beta * beta).re
        - p.omega_p2 * (2.0 * r).sinh() * (p.theta_p + phi).cos()
}

/// Hamiltonian in the squeezed and displaced frame `(r, phi, alpha)`.
/// Returns the operator and the dropped c-number.
pub fn build_transformed(p: &ModelParams, flow: &FlowState, dims: HilbertConfig) -> Result<(Operator, f64)> {
    let (r, phi) = (flow.r, flow.phi);
    let l = Ladder::new(dims.n_b);
    let u = C64::from_polar(1.0, 0.5 * phi);
    let w = flow.alpha * u.conj();
    let (pq, qq) = (w.re, w.im);
    let (em, ep) = ((-2.0 * r).exp(), (2.0 * r).exp());
    let omega_a = p.chi * (em * pq * pq + ep * qq * qq) - 0.5 * p.chi;
    let omega_b = transformed_frequency(p, r, phi);

    let coupling = l.quadrature(u, 1.0) * C64::from(pq * p.chi * em)
        + l.quadrature(u, -1.0) * C64::new(0.0, qq * p.chi * ep)
        + l.quadrature_sq(u, 1.0) * C64::from(0.25 * p.chi * em)
        - l.quadrature_sq(u, -1.0) * C64::from(0.25 * p.chi * ep)
        + &l.id * omega_a;
    let free = &l.num * omega_b;
    let h = block_diagonal(dims, |m| &free + &(&coupling * C64::from(m as f64)))?;
    Ok((h, c_offset(p, flow)))
}

/// `omega_a a^dagger a + omega_b b^dagger b + g1 a^dagger a (b^dagger + b)
/// + g2 a^dagger a (b^dagger + b)^2 - g2' a^dagger a (b^dagger - b)^2`.
pub fn build_transformed_stationary(d: &DerivedParams, dims: HilbertConfig) -> Result<Operator> {
    let l = Ladder::new(dims.n_b);
    let x = l.quadrature(C64::from(1.0), 1.0);
    let x2 = l.quadrature_sq(C64::from(1.0), 1.0);
    let y2 = l.quadrature_sq(C64::from(1.0), -1.0);
    let coupling = &l.id * d.omega_a_eff + x * d.g1 + x2 * d.g2 - y2 * d.g2p;
    let free = &l.num * d.omega_b_eff;
    block_diagonal(dims, |m| &free + &(&coupling * C64::from(m as f64)))
}

/// Mixed first-order plus quadratic optomechanical Hamiltonian.
pub fn build_mixed_approx(d: &DerivedParams, dims: HilbertConfig) -> Result<Operator> {
    for w in rwa_advisory(d, dims) {
        log::debug!("{w}");
    }
    mixed(d.omega_a_eff_prime, d.omega_b_eff, d.g1, d.g2, dims)
}

/// Quadratic-only optomechanical Hamiltonian (`g1` dropped).
pub fn build_quadratic_approx(d: &DerivedParams, dims: HilbertConfig) -> Result<Operator> {
    mixed(d.omega_a_eff_prime, d.omega_b_eff, 0.0, d.g2, dims)
}

fn mixed(omega_a: f64, omega_b: f64, g1: f64, g2: f64, dims: HilbertConfig) -> Result<Operator> {
    let l = Ladder::new(dims.n_b);
    let x = l.quadrature(C64::from(1.0), 1.0);
    let x2 = l.quadrature_sq(C64::from(1.0), 1.0);
    let coupling = &l.id * omega_a + x * g1 + x2 * g2;
    let free = &l.num * omega_b;
    block_diagonal(dims, |m| &free + &(&coupling * C64::from(m as f64)))
}

/// Builds the Hamiltonian of the given kind. `flow` is used only by the
/// general transformed form and defaults to the stationary frame.
pub fn build(
    kind: HamiltonianKind,
    p: &ModelParams,
    d: &DerivedParams,
    flow: Option<&FlowState>,
    dims: HilbertConfig,
) -> Result<Operator> {
    match kind {
        HamiltonianKind::ExactRotating => build_exact_rotating(p, dims),
        HamiltonianKind::TransformedGeneral => {
            let stationary = FlowState { r: d.r, phi: d.phi, alpha: C64::from(d.alpha_ss) };
            Ok(build_transformed(p, flow.unwrap_or(&stationary), dims)?.0)
        }
        HamiltonianKind::TransformedStationary => build_transformed_stationary(d, dims),
        HamiltonianKind::MixedApprox => build_mixed_approx(d, dims),
        HamiltonianKind::QuadraticApprox => build_quadratic_approx(d, dims),
    }
}

/// Conditions under which dropping the `g2'` terms is justified, taken as
/// factor-10 inequalities: `g2 >= 10 g2'` and `omega_b >= 20 n_max g2'`.
/// Returns one message per violated condition.
pub fn rwa_advisory(d: &DerivedParams, dims: HilbertConfig) -> Vec<String> {
    let mut out = Vec::new();
    if d.g2 < 10.0 * d.g2p {
        out.push(format!("rotating-wave advisory: g2 = {:.4e} is not >> g2' = {:.4e}", d.g2, d.g2p));
    }
    let bound = 20.0 * dims.n_max() as f64 * d.g2p;
    if d.omega_b_eff < bound {
        out.push(format!(
            "rotating-wave advisory: omega_b = {:.4e} is below 20 n_max g2' = {:.4e}",
            d.omega_b_eff, bound
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{annihilator, lift, max_abs, number, Mode, StateVector};
    use crate::params::{analytic_params, effective_params};
    use std::f64::consts::PI;

    fn dims() -> HilbertConfig {
        HilbertConfig::new(3, 40).unwrap()
    }

    fn cat_params() -> ModelParams {
        ModelParams { chi: 0.01, eps: 0.3, omega_p2: 0.49, ..Default::default() }.with_matched_phases().unwrap()
    }

    fn num_a(dims: HilbertConfig) -> Operator {
        lift(&number(Mode::A, dims.n_a).unwrap(), dims).unwrap()
    }

    #[test]
    fn free_mode_b() {
        let h = build_exact_rotating(&ModelParams::default(), dims()).unwrap();
        for i in 0..dims().dim() {
            for j in 0..dims().dim() {
                let expect = if i == j { (i % 40) as f64 } else { 0.0 };
                assert_eq!(h.matrix()[[i, j]], C64::from(expect));
            }
        }
    }

    #[test]
    fn all_kinds_are_hermitian_and_conserve_a_number() {
        let p = cat_params();
        let d = effective_params(&p).unwrap();
        let flow = FlowState { r: 0.7, phi: 2.1, alpha: C64::new(0.4, -1.3) };
        let na = num_a(dims());
        for kind in [
            HamiltonianKind::ExactRotating,
            HamiltonianKind::TransformedGeneral,
            HamiltonianKind::TransformedStationary,
            HamiltonianKind::MixedApprox,
            HamiltonianKind::QuadraticApprox,
        ] {
            let h = build(kind, &p, &d, Some(&flow), dims()).unwrap();
            assert!(h.hermiticity_deviation() < 1e-12, "{kind:?}");
            assert!(h.commutator_norm(&na).unwrap() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn two_excitation_matrix_elements() {
        let p = ModelParams { omega_p2: 0.3, ..Default::default() };
        let h = build_exact_rotating(&p, dims()).unwrap();
        let blk = block(&h, dims(), 0).unwrap();
        for k in 0..38 {
            let expect = -0.3 * (((k + 1) * (k + 2)) as f64).sqrt();
            assert!((blk[[k, k + 2]] - C64::from(expect)).norm() < 1e-14);
            assert!((blk[[k + 2, k]] - C64::from(expect)).norm() < 1e-14);
        }
    }

    #[test]
    fn identity_frame_gives_detuned_cross_kerr() {
        let p = ModelParams { chi: 0.05, ..Default::default() };
        let flow = FlowState { r: 0.0, phi: 0.3, alpha: C64::from(0.0) };
        let (h, c) = build_transformed(&p, &flow, dims()).unwrap();
        let exact = build_exact_rotating(&p, dims()).unwrap();
        assert!(max_abs(&(h.matrix() - exact.matrix())) < 1e-14);
        assert_eq!(c, 0.0);
    }

    #[test]
    fn general_form_matches_stationary_form() {
        let p = cat_params();
        let d = effective_params(&p).unwrap();
        let flow = FlowState { r: d.r, phi: PI, alpha: C64::from(d.alpha_ss) };
        let (general, _) = build_transformed(&p, &flow, dims()).unwrap();
        let stationary = build_transformed_stationary(&d, dims()).unwrap();
        let diff = max_abs(&(general.matrix() - stationary.matrix()));
        assert!(diff < 1e-12, "difference {diff:e}");
    }

    #[test]
    fn vacuum_expectation_of_stationary_form() {
        let d = effective_params(&cat_params()).unwrap();
        let h = build_transformed_stationary(&d, dims()).unwrap();
        let psi = StateVector::basis(dims().joint(), dims().index(1, 0)).unwrap();
        let e = psi.inner(&h.apply(&psi).unwrap()).unwrap();
        assert!((e.re - (d.omega_a_eff + d.g2 + d.g2p)).abs() < 1e-12 * e.re.abs().max(1.0));
        assert!(e.im.abs() < 1e-14);
    }

    #[test]
    fn dropped_terms_identity() {
        let d = effective_params(&cat_params()).unwrap();
        let full = build_transformed_stationary(&d, dims()).unwrap();
        let app = build_mixed_approx(&d, dims()).unwrap();
        let l = Ladder::new(dims().n_b);
        let y2 = l.quadrature_sq(C64::from(1.0), -1.0) + &l.id;
        let expected = block_diagonal(dims(), |m| &y2 * C64::from(-d.g2p * m as f64)).unwrap();
        assert!(max_abs(&((&full - &app).matrix() - expected.matrix())) < 1e-12);
    }

    #[test]
    fn single_photon_block_spacing() {
        let d = effective_params(&cat_params()).unwrap();
        let a = analytic_params(&d).unwrap();
        let dims = HilbertConfig::new(2, 120).unwrap();
        for h in [build_mixed_approx(&d, dims).unwrap(), build_quadratic_approx(&d, dims).unwrap()] {
            let e = block_eigenvalues(&h, dims, 1).unwrap();
            for k in 0..5 {
                assert!((e[k + 1] - e[k] - a.varpi1).abs() < 1e-10, "level {k}");
            }
        }
        let q = build_quadratic_approx(&d, dims).unwrap();
        let m = build_mixed_approx(&DerivedParams { g1: 0.0, ..d }, dims).unwrap();
        assert_eq!(q, m);
    }

    #[test]
    fn advisory_flags_weak_quadratic_coupling() {
        let d = effective_params(&cat_params()).unwrap();
        assert!(rwa_advisory(&d, dims()).is_empty());
        let p = ModelParams { chi: 0.05, eps: 0.01, ..Default::default() }.with_matched_phases().unwrap();
        let d = effective_params(&p).unwrap();
        assert_eq!(rwa_advisory(&d, dims()).len(), 1);
    }

    #[test]
    fn ladder_matches_fock_annihilator() {
        let l = Ladder::new(7);
        assert_eq!(&l.b, annihilator(Mode::B, 7).unwrap().matrix());
        assert!(max_abs(&(&l.b2 - &l.b.dot(&l.b))) < 1e-14);
    }
}
