//! Schrödinger and Lindblad propagation.
//!
//! The master equation is
//!
//! ```text
//! drho/dt = -i[H, rho] + sum_c kappa (N+1) D[o] rho + kappa N D[o^dagger] rho
//!                            - kappa M G[o] rho - kappa M^* G[o^dagger] rho
//! D[o] rho = o rho o^dagger - (o^dagger o rho + rho o^dagger o)/2
//! G[o] rho = o rho o - (o o rho + rho o o)/2
//! ```
//!
//! with `o` the annihilator of the channel's mode. It is evaluated as
//! `L rho + rho L^dagger + sum_k c_k A_k rho B_k`, with every operator held in
//! compressed-row form. All products are taken inside the truncated space, so
//! the trace of the right-hand side vanishes to rounding.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, HilbertConfig, Mode, Operator, Space, StateVector};
use crate::ode::{Dopri5, OdeStats, Tolerances};
use crate::params::{check_bath, reservoir_bath, DerivedParams, ModelParams};
use crate::sparse::CsrMatrix;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// One squeezed-thermal damping channel acting on a single mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissipatorChannel {
    pub mode: Mode,
    pub rate: f64,
    pub occupation: f64,
    pub correlation: C64,
}

impl DissipatorChannel {
    pub fn new(mode: Mode, rate: f64, occupation: f64, correlation: C64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParams(format!("channel rate must be non-negative, got {rate}")));
        }
        if !(occupation >= 0.0) || !occupation.is_finite() {
            return Err(Error::InvalidParams(format!("channel occupation must be non-negative, got {occupation}")));
        }
        check_bath(occupation, correlation)?;
        Ok(Self { mode, rate, occupation, correlation })
    }

    pub fn thermal(mode: Mode, rate: f64, occupation: f64) -> Result<Self> {
        Self::new(mode, rate, occupation, ZERO)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    Original,
    Transformed,
}

/// Thermal channel on mode `a` plus squeezed channel on mode `b`.
pub fn make_channels(p: &ModelParams, frame: Frame, derived: Option<&DerivedParams>) -> Result<Vec<DissipatorChannel>> {
    let (n, m) = match frame {
        Frame::Original => reservoir_bath(p.r_e, p.theta_e),
        Frame::Transformed => {
            let d = derived
                .ok_or_else(|| Error::InvalidParams("transformed-frame channels need derived parameters".into()))?;
            (d.n_ss, d.m_ss)
        }
    };
    Ok(vec![
        DissipatorChannel::thermal(Mode::A, p.kappa_a, p.n_th)?,
        DissipatorChannel::new(Mode::B, p.kappa_b, n, m)?,
    ])
}

/// Annihilator of `mode` expressed on `space`.
pub fn jump_operator(mode: Mode, space: Space) -> Result<Operator> {
    match (mode, space) {
        (_, Space::Joint { n_a, n_b }) => {
            let dims = HilbertConfig::new(n_a, n_b)?;
            let n = if mode == Mode::A { n_a } else { n_b };
            fock::lift(&fock::annihilator(mode, n)?, dims)
        }
        (Mode::A, Space::ModeA(n)) | (Mode::B, Space::ModeB(n)) => fock::annihilator(mode, n),
        _ => Err(Error::InvalidSpace(format!("no mode {mode:?} in {space:?}"))),
    }
}

/// Lindblad generator in the form `L rho + rho L^dagger + sum_k c_k A_k rho B_k`.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    space: Space,
    left: CsrMatrix,
    right: CsrMatrix,
    sandwich: Vec<(C64, CsrMatrix, CsrMatrix)>,
}

impl Liouvillian {
    pub fn new(h: &Operator, channels: &[DissipatorChannel]) -> Result<Self> {
        let space = h.space();
        let i = C64::i();
        let mut left = h.matrix().mapv(|z| -i * z);
        let mut sandwich = Vec::new();
        for ch in channels {
            if ch.rate == 0.0 {
                continue;
            }
            let o = jump_operator(ch.mode, space)?.into_matrix();
            let od = fock::dagger(&o);
            let c1 = ch.rate * (ch.occupation + 1.0);
            let c2 = ch.rate * ch.occupation;
            let km = ch.correlation * ch.rate;
            left = left - od.dot(&o) * C64::from(0.5 * c1);
            if c2 != 0.0 {
                left = left - o.dot(&od) * C64::from(0.5 * c2);
                sandwich.push((C64::from(c2), CsrMatrix::from_dense(&od), CsrMatrix::from_dense(&o)));
            }
            if km != ZERO {
                let oo = o.dot(&o);
                let odod = od.dot(&od);
                left = left + oo * (0.5 * km) + odod * (0.5 * km.conj());
                sandwich.push((-km, CsrMatrix::from_dense(&o), CsrMatrix::from_dense(&o)));
                sandwich.push((-km.conj(), CsrMatrix::from_dense(&od), CsrMatrix::from_dense(&od)));
            }
            sandwich.push((C64::from(c1), CsrMatrix::from_dense(&o), CsrMatrix::from_dense(&od)));
        }
        let right = fock::dagger(&left);
        Ok(Self { space, left: CsrMatrix::from_dense(&left), right: CsrMatrix::from_dense(&right), sandwich })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    /// `out = L(rho)`; `scratch` must have the shape of `rho`.
    pub fn apply(&self, rho: &Array2<C64>, out: &mut Array2<C64>, scratch: &mut Array2<C64>) {
        out.fill(ZERO);
        self.left.left_mul_acc(C64::from(1.0), rho, out);
        self.right.right_mul_acc(C64::from(1.0), rho, out);
        for (c, a, b) in &self.sandwich {
            scratch.fill(ZERO);
            a.left_mul_acc(C64::from(1.0), rho, scratch);
            b.right_mul_acc(*c, scratch, out);
        }
    }
}

/// Right-hand side of the master equation for a single state.
pub fn lindblad_rhs(rho: &DensityMatrix, h: &Operator, channels: &[DissipatorChannel]) -> Result<Array2<C64>> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: rho.dim() });
    }
    let l = Liouvillian::new(h, channels)?;
    let d = rho.dim();
    let rho = rho.matrix().as_standard_layout().into_owned();
    let mut out = Array2::zeros((d, d));
    let mut scratch = Array2::zeros((d, d));
    l.apply(&rho, &mut out, &mut scratch);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationOptions {
    pub tol: Tolerances,
    /// Minimum eigenvalue is evaluated at every `k`-th sample (0 disables).
    pub eig_stride: usize,
    pub trace_limit: f64,
    pub hermiticity_limit: f64,
    pub eigenvalue_floor: f64,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self { tol: Tolerances::default(), eig_stride: 1, trace_limit: 1e-8, hermiticity_limit: 1e-8, eigenvalue_floor: -1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleDiagnostics {
    pub t: f64,
    /// `|Tr rho - 1|`, or `| ||psi|| - 1 |` for state vectors.
    pub trace_deviation: f64,
    pub hermiticity_deviation: f64,
    pub min_eigenvalue: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct PropagationResult<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub diagnostics: Vec<SampleDiagnostics>,
    pub stats: OdeStats,
    pub degraded: bool,
}

impl<S> PropagationResult<S> {
    pub fn max_trace_deviation(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.trace_deviation).fold(0.0, f64::max)
    }

    pub fn max_hermiticity_deviation(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.hermiticity_deviation).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.diagnostics.iter().filter_map(|d| d.min_eigenvalue).reduce(f64::min)
    }
}

/// Summary of a propagation without the states.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PropagationReport {
    pub samples: usize,
    pub max_trace_deviation: f64,
    pub max_hermiticity_deviation: f64,
    pub min_eigenvalue: Option<f64>,
    pub stats: OdeStats,
    pub degraded: bool,
}

impl PropagationReport {
    fn record(&mut self, d: &SampleDiagnostics, opts: &PropagationOptions) {
        self.samples += 1;
        self.max_trace_deviation = self.max_trace_deviation.max(d.trace_deviation);
        self.max_hermiticity_deviation = self.max_hermiticity_deviation.max(d.hermiticity_deviation);
        if let Some(e) = d.min_eigenvalue {
            self.min_eigenvalue = Some(self.min_eigenvalue.map_or(e, |m| m.min(e)));
        }
        let bad = d.trace_deviation > opts.trace_limit
            || d.hermiticity_deviation > opts.hermiticity_limit
            || d.min_eigenvalue.is_some_and(|e| e < opts.eigenvalue_floor);
        if bad && !self.degraded {
            log::warn!(
                "propagation degraded at t = {}: trace {:e}, hermiticity {:e}, min eigenvalue {:?}",
                d.t,
                d.trace_deviation,
                d.hermiticity_deviation,
                d.min_eigenvalue
            );
        }
        self.degraded |= bad;
    }
}

/// Integrates the master equation and hands every output sample to `visit`
/// together with its diagnostics. The integrated state is never renormalized.
pub fn propagate_master_with<F>(
    rho0: &DensityMatrix,
    liouvillian: &Liouvillian,
    t_grid: &[f64],
    opts: &PropagationOptions,
    mut visit: F,
) -> Result<PropagationReport>
where
    F: FnMut(usize, f64, &DensityMatrix, &SampleDiagnostics) -> Result<()>,
{
    if rho0.dim() != liouvillian.dim() {
        return Err(Error::DimensionMismatch { expected: liouvillian.dim(), found: rho0.dim() });
    }
    let space = rho0.space();
    let d = rho0.dim();
    let mut scratch = Array2::zeros((d, d));
    let mut report = PropagationReport::default();
    let solver = Dopri5::with_tolerances(opts.tol);
    let y0 = rho0.matrix().as_standard_layout().into_owned();
    let stats = solver.integrate(
        |_, y: &Array2<C64>, dy: &mut Array2<C64>| liouvillian.apply(y, dy, &mut scratch),
        t_grid,
        y0,
        |i, t, y| {
            let rho = DensityMatrix::new(space, y.clone())?;
            let min_eigenvalue = if opts.eig_stride > 0 && i % opts.eig_stride == 0 {
                Some(rho.min_eigenvalue()?)
            } else {
                None
            };
            let diag = SampleDiagnostics {
                t,
                trace_deviation: (rho.trace() - C64::from(1.0)).norm(),
                hermiticity_deviation: rho.hermiticity_deviation(),
                min_eigenvalue,
            };
            report.record(&diag, opts);
            visit(i, t, &rho, &diag)
        },
    )?;
    report.stats = stats;
    Ok(report)
}

pub fn propagate_master(
    rho0: &DensityMatrix,
    h: &Operator,
    channels: &[DissipatorChannel],
    t_grid: &[f64],
    opts: &PropagationOptions,
) -> Result<PropagationResult<DensityMatrix>> {
    if rho0.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: rho0.dim() });
    }
    let l = Liouvillian::new(h, channels)?;
    let mut states = Vec::with_capacity(t_grid.len());
    let mut diagnostics = Vec::with_capacity(t_grid.len());
    let report = propagate_master_with(rho0, &l, t_grid, opts, |_, _, rho, diag| {
        states.push(rho.clone());
        diagnostics.push(*diag);
        Ok(())
    })?;
    Ok(PropagationResult { times: t_grid.to_vec(), states, diagnostics, stats: report.stats, degraded: report.degraded })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchrodingerMethod {
    /// `e^{-iHt} psi0` from one Hermitian eigendecomposition.
    Eigen,
    /// Adaptive integration of `dpsi/dt = -i H psi`.
    Ode(Tolerances),
}

pub fn propagate_schrodinger(
    psi0: &StateVector,
    h: &Operator,
    t_grid: &[f64],
    method: SchrodingerMethod,
) -> Result<PropagationResult<StateVector>> {
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: psi0.dim() });
    }
    if h.hermiticity_deviation() > 1e-10 {
        return Err(Error::Numeric("Schrödinger propagation needs a Hermitian Hamiltonian".into()));
    }
    let space = psi0.space();
    let mut states = Vec::with_capacity(t_grid.len());
    let mut diagnostics = Vec::with_capacity(t_grid.len());
    let mut record = |t: f64, amps: Array1<C64>| -> Result<()> {
        let psi = StateVector::new(space, amps)?;
        diagnostics.push(SampleDiagnostics {
            t,
            trace_deviation: (psi.norm() - 1.0).abs(),
            hermiticity_deviation: 0.0,
            min_eigenvalue: None,
        });
        states.push(psi);
        Ok(())
    };
    let stats = match method {
        SchrodingerMethod::Eigen => {
            let (vals, vecs) = fock::eigh(h.matrix())?;
            let coeffs = fock::dagger(&vecs).dot(psi0.amps());
            for &t in t_grid {
                let phased = Array1::from_iter(
                    coeffs.iter().zip(vals.iter()).map(|(&c, &e)| c * C64::from_polar(1.0, -e * t)),
                );
                record(t, vecs.dot(&phased))?;
            }
            OdeStats::default()
        }
        SchrodingerMethod::Ode(tol) => {
            let csr = CsrMatrix::from_dense(h.matrix());
            let minus_i = -C64::i();
            Dopri5::with_tolerances(tol).integrate(
                |_, y: &Array1<C64>, dy: &mut Array1<C64>| {
                    dy.fill(ZERO);
                    csr.mul_vec_acc(minus_i, y, dy);
                },
                t_grid,
                psi0.amps().clone(),
                |_, t, y| record(t, y.clone()),
            )?
        }
    };
    let degraded = diagnostics.iter().any(|d| d.trace_deviation > 1e-8);
    Ok(PropagationResult { times: t_grid.to_vec(), states, diagnostics, stats, degraded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::max_abs;
    use crate::params::effective_params;

    fn c(x: f64) -> C64 {
        C64::from(x)
    }

    #[test]
    fn amplitude_damping_of_single_photon() {
        let space = Space::ModeB(3);
        let rho = StateVector::basis(space, 1).unwrap().projector();
        let h = Operator::zeros(space);
        let ch = DissipatorChannel::thermal(Mode::B, 0.7, 0.0).unwrap();
        let d = lindblad_rhs(&rho, &h, &[ch]).unwrap();
        let mut expect = Array2::zeros((3, 3));
        expect[[0, 0]] = c(0.7);
        expect[[1, 1]] = c(-0.7);
        assert!(max_abs(&(d - expect)) < 1e-15);
    }

    #[test]
    fn rhs_matches_dense_superoperator() {
        let space = Space::Joint { n_a: 2, n_b: 5 };
        let dims = HilbertConfig::new(2, 5).unwrap();
        let h = Operator::new(
            space,
            Array2::from_shape_fn((10, 10), |(i, j)| {
                let v = C64::new(((i * 3 + j) % 5) as f64 * 0.1, (i as f64 - j as f64) * 0.05);
                if i <= j { v } else { C64::new(((j * 3 + i) % 5) as f64 * 0.1, (i as f64 - j as f64) * 0.05) }
            }),
        )
        .unwrap();
        let h = &h + &h.dagger();
        let rho = DensityMatrix::new(
            space,
            Array2::from_shape_fn((10, 10), |(i, j)| if i == j { c(0.1) } else { C64::new(0.01, 0.003 * (j as f64 - i as f64)) }),
        )
        .unwrap();
        let chans = [
            DissipatorChannel::thermal(Mode::A, 0.3, 0.4).unwrap(),
            DissipatorChannel::new(Mode::B, 0.2, 0.5, C64::from_polar(0.6, 0.4)).unwrap(),
        ];
        let got = lindblad_rhs(&rho, &h, &chans).unwrap();

        let r = rho.matrix();
        let i = C64::i();
        let mut want = (h.matrix().dot(r) - r.dot(h.matrix())) * (-i);
        let dd = |o: &Array2<C64>, x: &Array2<C64>| {
            let od = fock::dagger(o);
            o.dot(x).dot(&od) - (od.dot(o).dot(x) + x.dot(&od).dot(o)) * c(0.5)
        };
        let gg = |o: &Array2<C64>, x: &Array2<C64>| o.dot(x).dot(o) - (o.dot(o).dot(x) + x.dot(o).dot(o)) * c(0.5);
        for ch in &chans {
            let o = fock::lift(&fock::annihilator(ch.mode, if ch.mode == Mode::A { 2 } else { 5 }).unwrap(), dims)
                .unwrap()
                .into_matrix();
            let od = fock::dagger(&o);
            want = want + dd(&o, r) * c(ch.rate * (ch.occupation + 1.0)) + dd(&od, r) * c(ch.rate * ch.occupation)
                - gg(&o, r) * (ch.correlation * ch.rate)
                - gg(&od, r) * (ch.correlation.conj() * ch.rate);
        }
        assert!(max_abs(&(&got - &want)) < 1e-13);
        let tr: C64 = got.diag().iter().sum();
        assert!(tr.norm() < 1e-13);
    }

    #[test]
    fn channels_in_both_frames() {
        let p = ModelParams { chi: 0.01, eps: 0.1, omega_p2: 0.45, kappa_a: 0.02, kappa_b: 0.05, ..Default::default() }
            .with_matched_phases()
            .unwrap();
        let d = effective_params(&p).unwrap();
        let t = make_channels(&p, Frame::Transformed, Some(&d)).unwrap();
        assert_eq!(t[1].occupation, 0.0);
        assert_eq!(t[1].correlation, ZERO);
        assert_eq!(t[0], DissipatorChannel { mode: Mode::A, rate: 0.02, occupation: 0.0, correlation: ZERO });
        let o = make_channels(&p, Frame::Original, None).unwrap();
        assert!((o[1].occupation - p.r_e.sinh().powi(2)).abs() < 1e-15);
        assert!(make_channels(&p, Frame::Transformed, None).is_err());
        assert!(matches!(
            DissipatorChannel::new(Mode::B, 1.0, 0.1, c(1.0)),
            Err(Error::UnphysicalBath { .. })
        ));
    }

    #[test]
    fn schrodinger_paths_agree() {
        let dims = HilbertConfig::new(2, 20).unwrap();
        let p = ModelParams { chi: 0.05, eps: 0.05, omega_p2: 0.3, ..Default::default() };
        let h = crate::hamiltonians::build_exact_rotating(&p, dims).unwrap();
        let psi0 = StateVector::tensor(
            &StateVector::basis(Space::ModeA(2), 1).unwrap(),
            &StateVector::coherent(c(0.5), 20).unwrap(),
        )
        .unwrap();
        let grid: Vec<f64> = (0..=10).map(|k| k as f64 * 3.0).collect();
        let eig = propagate_schrodinger(&psi0, &h, &grid, SchrodingerMethod::Eigen).unwrap();
        let ode = propagate_schrodinger(&psi0, &h, &grid, SchrodingerMethod::Ode(Tolerances { rtol: 1e-10, atol: 1e-12 }))
            .unwrap();
        for (a, b) in eig.states.iter().zip(&ode.states) {
            assert!(a.inner(b).unwrap().norm() > 1.0 - 1e-9);
        }
        assert!(!eig.degraded && !ode.degraded);
    }
}
