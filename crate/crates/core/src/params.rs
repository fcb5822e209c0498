//! Derived quantities of the squeezing/displacement transformation.
//!
//! All inputs are ratios to the detuning `Delta_b`, which sets the time unit.

use std::f64::consts::PI;

use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{Dopri5, OdeStats, Tolerances};

/// Physical inputs of the rotating-frame model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub delta_b: f64,
    pub chi: f64,
    pub eps: f64,
    pub theta_d: f64,
    pub omega_p2: f64,
    pub theta_p: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub n_th: f64,
    pub r_e: f64,
    pub theta_e: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            delta_b: 1.0,
            chi: 0.0,
            eps: 0.0,
            theta_d: 0.0,
            omega_p2: 0.0,
            theta_p: PI,
            kappa_a: 0.0,
            kappa_b: 0.0,
            n_th: 0.0,
            r_e: 0.0,
            theta_e: 0.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("delta_b", self.delta_b),
            ("chi", self.chi),
            ("eps", self.eps),
            ("theta_d", self.theta_d),
            ("omega_p2", self.omega_p2),
            ("theta_p", self.theta_p),
            ("kappa_a", self.kappa_a),
            ("kappa_b", self.kappa_b),
            ("n_th", self.n_th),
            ("r_e", self.r_e),
            ("theta_e", self.theta_e),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("{name} is not finite")));
        }
        if self.delta_b <= 0.0 {
            return Err(Error::InvalidParams("delta_b must be positive (red detuning)".into()));
        }
        for (name, v) in [("kappa_a", self.kappa_a), ("kappa_b", self.kappa_b), ("n_th", self.n_th), ("r_e", self.r_e)] {
            if v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be non-negative")));
            }
        }
        Ok(())
    }

    /// Sets `theta_d` to the value that makes the steady displacement real
    /// and positive, and tunes the bath to the noise-cancelling point
    /// `r_e = r`, `theta_e = 0`.
    pub fn with_matched_phases(mut self) -> Result<Self> {
        let r = stationary_r(&self)?;
        self.theta_d = required_drive_phase(&self);
        self.r_e = r;
        self.theta_e = 0.0;
        Ok(self)
    }
}

/// Steady-state and effective quantities at the stationary point `phi = pi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub r: f64,
    pub phi: f64,
    pub alpha_ss: f64,
    pub theta_d_required: f64,
    pub omega_a_eff: f64,
    pub omega_a_eff_prime: f64,
    pub omega_b_eff: f64,
    pub g1: f64,
    pub g2: f64,
    pub g2p: f64,
    pub n_ss: f64,
    pub m_ss: C64,
}

/// Constants of the closed-form evolution under the mixed Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParams {
    pub eta1: f64,
    pub beta1: f64,
    pub varpi1: f64,
    pub eps10: f64,
}

impl AnalyticParams {
    /// Cat generation time `(2k+1) pi / varpi1`.
    pub fn t_c(&self, k: u32) -> f64 {
        (2 * k + 1) as f64 * PI / self.varpi1
    }

    /// Maximal-squeezing time `(2k+1) pi / (2 varpi1)`.
    pub fn t_s(&self, k: u32) -> f64 {
        (2 * k + 1) as f64 * PI / (2.0 * self.varpi1)
    }

    pub fn alpha1(&self, t: f64) -> C64 {
        let w = self.varpi1 * t;
        self.beta1 * (-self.eta1).exp() * C64::new(1.0 - w.cos(), (2.0 * self.eta1).exp() * w.sin())
    }

    /// Relative phase `eps(t)` between the two branches.
    pub fn phase(&self, t: f64) -> f64 {
        self.eps10 * t + self.beta1 * self.beta1 * (self.varpi1 * t).sin()
    }
}

/// Frame variables `(r, phi, alpha)` of the time-dependent transformation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub r: f64,
    pub phi: f64,
    pub alpha: C64,
}

impl FlowState {
    fn to_array(self) -> Array1<f64> {
        Array1::from(vec![self.r, self.phi, self.alpha.re, self.alpha.im])
    }

    fn from_slice(v: &[f64]) -> Self {
        Self { r: v[0], phi: v[1], alpha: C64::new(v[2], v[3]) }
    }
}

fn is_pi(theta: f64) -> bool {
    (theta.cos() + 1.0).abs() < 1e-12
}

/// `r = ln[(Delta_b + 2 Omega_p)/(Delta_b - 2 Omega_p)] / 4`, valid for
/// `theta_p = pi`.
pub fn stationary_r(p: &ModelParams) -> Result<f64> {
    if !is_pi(p.theta_p) {
        return Err(Error::InvalidParams("stationary squeezing requires theta_p = pi".into()));
    }
    if p.omega_p2 < 0.0 {
        return Err(Error::InvalidParams("omega_p2 must be non-negative".into()));
    }
    let (d, two_omega) = (p.delta_b, 2.0 * p.omega_p2);
    if d <= two_omega {
        return Err(Error::OutsideStationaryDomain { delta_b: d, two_omega });
    }
    Ok(0.25 * ((d + two_omega) / (d - two_omega)).ln())
}

/// Drive phase for which the flow fixed point is `+alpha_ss`:
/// `tan theta_d = kappa_b / [2 (Delta_b - 2 Omega_p)]`, taken in the quadrant
/// that makes the displacement positive.
pub fn required_drive_phase(p: &ModelParams) -> f64 {
    (-0.5 * p.kappa_b).atan2(-(p.delta_b - 2.0 * p.omega_p2))
}

/// Drive amplitude whose projection `Re[eps e^{i theta_d}]` has magnitude
/// `projection` at the given phase.
pub fn eps_from_projection(projection: f64, theta_d: f64) -> Result<f64> {
    let c = theta_d.cos().abs();
    if c < 1e-12 {
        return Err(Error::InvalidParams("drive projection undefined at |cos theta_d| = 0".into()));
    }
    Ok(projection / c)
}

/// Returns `(alpha_ss, theta_d_required)`.
pub fn steady_alpha(p: &ModelParams, r: f64) -> Result<(f64, f64)> {
    let detune = p.delta_b - 2.0 * p.omega_p2;
    let denom = (detune * detune + 0.25 * p.kappa_b * p.kappa_b).sqrt();
    if denom == 0.0 {
        return Err(Error::SingularDisplacement);
    }
    Ok((p.eps * (-r).exp() / denom, required_drive_phase(p)))
}

/// Effective thermal occupation and two-photon correlation seen by the
/// transformed mode `b` for a general frame phase `phi`.
pub fn bath_params(r_e: f64, theta_e: f64, r: f64, phi: f64) -> (f64, C64) {
    let half = 0.5 * (phi - theta_e);
    let (c2, s2) = (half.cos().powi(2), half.sin().powi(2));
    let n = (r_e - r).sinh().powi(2) + 0.5 * c2 * ((2.0 * (r_e + r)).cosh() - (2.0 * (r_e - r)).cosh());
    let rot = C64::from_polar(1.0, -phi);
    let m = rot * 0.5 * ((2.0 * (r_e + r)).sinh() * c2 - (2.0 * (r_e - r)).sinh() * s2)
        + C64::i() * rot * 0.5 * (phi - theta_e).sin() * (2.0 * r_e).sinh();
    (n, m)
}

/// The `phi = pi` specialization of [`bath_params`], written in its reduced
/// form so that `r_e = r`, `theta_e = 0` gives exact zeros.
pub fn steady_bath(r_e: f64, theta_e: f64, r: f64) -> (f64, C64) {
    let (s2, c2) = ((0.5 * theta_e).sin().powi(2), (0.5 * theta_e).cos().powi(2));
    let n = 0.5 * ((2.0 * (r_e + r)).cosh() - (2.0 * (r_e - r)).cosh()) * s2 + (r_e - r).sinh().powi(2);
    let m = C64::new(
        0.5 * ((2.0 * (r_e - r)).sinh() * c2 - (2.0 * (r_e + r)).sinh() * s2),
        -0.5 * theta_e.sin() * (2.0 * r_e).sinh(),
    );
    (n, m)
}

/// Squeezed-vacuum reservoir seen in the untransformed frame.
pub fn reservoir_bath(r_e: f64, theta_e: f64) -> (f64, C64) {
    (r_e.sinh().powi(2), C64::from_polar(r_e.cosh() * r_e.sinh(), -theta_e))
}

/// Checks `|M|^2 <= N (N + 1)`. A pure squeezed vacuum sits on the boundary,
/// so the comparison carries a relative slack.
pub fn check_bath(n: f64, m: C64) -> Result<()> {
    let bound = n * (n + 1.0);
    let m_sq = m.norm_sqr();
    if n < -1e-12 || m_sq > bound + 1e-12 * bound.max(1.0) {
        return Err(Error::UnphysicalBath { m_sq, bound });
    }
    Ok(())
}

/// The values `(Delta_b - 2 Omega_p) e^{2r}`, `Delta_b cosh 2r - 2 Omega_p sinh 2r`,
/// `Delta_b - 2 Omega_p tanh r` and `sqrt(Delta_b^2 - 4 Omega_p^2)`, which all
/// coincide at the stationary `r`.
pub fn omega_b_forms(p: &ModelParams, r: f64) -> [f64; 4] {
    let (d, w) = (p.delta_b, p.omega_p2);
    [
        (d - 2.0 * w) * (2.0 * r).exp(),
        d * (2.0 * r).cosh() - 2.0 * w * (2.0 * r).sinh(),
        d - 2.0 * w * r.tanh(),
        (d * d - 4.0 * w * w).sqrt(),
    ]
}

pub fn effective_params(p: &ModelParams) -> Result<DerivedParams> {
    p.validate()?;
    let r = stationary_r(p)?;
    let (alpha_ss, theta_d_required) = steady_alpha(p, r)?;
    let e2r = (2.0 * r).exp();
    let g1 = p.chi * e2r * alpha_ss;
    let g2 = 0.25 * p.chi * e2r;
    let g2p = 0.25 * p.chi / e2r;
    let omega_a_eff = -0.5 * p.chi + p.chi * alpha_ss * alpha_ss * e2r;
    let (n_ss, m_ss) = steady_bath(p.r_e, p.theta_e, r);
    Ok(DerivedParams {
        r,
        phi: PI,
        alpha_ss,
        theta_d_required,
        omega_a_eff,
        omega_a_eff_prime: omega_a_eff + g2p,
        omega_b_eff: (p.delta_b - 2.0 * p.omega_p2) * e2r,
        g1,
        g2,
        g2p,
        n_ss,
        m_ss,
    })
}

pub fn analytic_params(d: &DerivedParams) -> Result<AnalyticParams> {
    let wb = d.omega_b_eff;
    if !(wb > 0.0) {
        return Err(Error::InvalidParams(format!("effective frequency must be positive, got {wb}")));
    }
    let ratio = (wb + 4.0 * d.g2) / wb;
    if !(ratio > 0.0) {
        return Err(Error::InvalidParams("omega_b_eff + 4 g2 must be positive".into()));
    }
    let eta1 = 0.25 * ratio.ln();
    let varpi1 = (2.0 * eta1).exp() * wb;
    Ok(AnalyticParams {
        eta1,
        beta1: -d.g1 * (-3.0 * eta1).exp() / wb,
        varpi1,
        eps10: d.omega_a_eff_prime - d.g1 * d.g1 * (-4.0 * eta1).exp() / wb + 0.5 * (varpi1 - wb),
    })
}

/// Time derivative of the frame variables.
pub fn flow_rhs(s: &FlowState, p: &ModelParams) -> Result<FlowState> {
    if !(s.r > 0.0) {
        return Err(Error::CothSingularity(s.r));
    }
    let angle = p.theta_p + s.phi;
    let r_dot = 2.0 * p.omega_p2 * angle.sin();
    let phi_dot = 4.0 * p.omega_p2 * angle.cos() / (2.0 * s.r).tanh() - 2.0 * p.delta_b;
    let freq = p.delta_b * (2.0 * s.r).cosh() - 2.0 * p.omega_p2 * angle.cos() * (2.0 * s.r).sinh()
        + phi_dot * s.r.sinh().powi(2);
    let drive = C64::from_polar(s.r.cosh(), -p.theta_d) - C64::from_polar(s.r.sinh(), p.theta_d + s.phi);
    let alpha_dot = -0.5 * p.kappa_b * s.alpha - C64::i() * freq * s.alpha - C64::i() * p.eps * drive;
    Ok(FlowState { r: r_dot, phi: phi_dot, alpha: alpha_dot })
}

/// Analytic fixed point `(r*, pi, alpha*)` of the flow for `theta_p = pi`.
pub fn flow_fixed_point(p: &ModelParams) -> Result<FlowState> {
    let r = stationary_r(p)?;
    let freq = p.delta_b * (2.0 * r).cosh() - 2.0 * p.omega_p2 * (2.0 * r).sinh();
    let denom = C64::new(0.5 * p.kappa_b, freq);
    if denom.norm() == 0.0 {
        return Err(Error::SingularDisplacement);
    }
    let drive = C64::from_polar(r.cosh(), -p.theta_d) + C64::from_polar(r.sinh(), p.theta_d);
    Ok(FlowState { r, phi: PI, alpha: -C64::i() * p.eps * drive / denom })
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<FlowState>,
    pub fixed_point: FlowState,
    pub terminal_distance: f64,
    pub stats: OdeStats,
}

/// Largest component-wise distance, with the phase compared modulo `2 pi`.
pub fn flow_distance(a: &FlowState, b: &FlowState) -> f64 {
    let dphi = (a.phi - b.phi + PI).rem_euclid(2.0 * PI) - PI;
    (a.r - b.r).abs().max(dphi.abs()).max((a.alpha - b.alpha).norm())
}

pub fn flow_integrate(
    state0: FlowState,
    p: &ModelParams,
    horizon: f64,
    samples: usize,
    tol: Tolerances,
) -> Result<FlowTrajectory> {
    if !(state0.r > 0.0) {
        return Err(Error::CothSingularity(state0.r));
    }
    if !(horizon > 0.0) || samples < 2 {
        return Err(Error::InvalidParams("flow needs a positive horizon and at least two samples".into()));
    }
    let fixed_point = flow_fixed_point(p)?;
    let times: Vec<f64> = (0..samples).map(|i| horizon * i as f64 / (samples - 1) as f64).collect();
    let mut states = Vec::with_capacity(samples);
    let mut failure = None;
    let solver = Dopri5::with_tolerances(tol);
    let stats = solver.integrate(
        |_, y: &Array1<f64>, dy: &mut Array1<f64>| {
            let s = FlowState::from_slice(y.as_slice().unwrap());
            match flow_rhs(&s, p) {
                Ok(d) => dy.as_slice_mut().unwrap().copy_from_slice(&[d.r, d.phi, d.alpha.re, d.alpha.im]),
                Err(e) => {
                    failure.get_or_insert(e);
                    dy.fill(f64::NAN);
                }
            }
        },
        &times,
        state0.to_array(),
        |_, _, y| {
            states.push(FlowState::from_slice(y.as_slice().unwrap()));
            Ok(())
        },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let stats = stats?;
    let terminal_distance = flow_distance(states.last().unwrap(), &fixed_point);
    Ok(FlowTrajectory { times, states, fixed_point, terminal_distance, stats })
}
