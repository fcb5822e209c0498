//! Wigner functions, fidelities and expectation values.
//!
//! The Wigner function uses the convention
//! `W(zeta) = (2/pi) Tr[D^dagger(zeta) rho D(zeta) (-1)^{b^dagger b}]`, so the
//! vacuum peaks at `2/pi` and `Re zeta`, `Im zeta` are the quadratures
//! `(b + b^dagger)/2` and `(b - b^dagger)/2i`.
//!
//! Grid evaluation sums `rho_mn W_mn(zeta)` with the Fock-basis Wigner
//! functions `W_mn` generated by a three-term recursion in the associated
//! Laguerre polynomials. This is exact for any truncated `rho`, unlike the
//! exponential of the truncated displacement generator, which degrades once
//! `|zeta|` approaches the edge of the cutoff. [`wigner_point`] evaluates the
//! defining trace directly and serves as the reference at interior points.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, DensityMatrix, Operator, Space, StateVector, TAIL_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerGridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub n_re: usize,
    pub im_min: f64,
    pub im_max: f64,
    pub n_im: usize,
}

impl Default for WignerGridSpec {
    fn default() -> Self {
        Self { re_min: -5.0, re_max: 5.0, n_re: 201, im_min: -5.0, im_max: 5.0, n_im: 201 }
    }
}

impl WignerGridSpec {
    fn axis(min: f64, max: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![min];
        }
        (0..n).map(|k| min + (max - min) * k as f64 / (n - 1) as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        let ok = |a: f64, b: f64, n: usize| a.is_finite() && b.is_finite() && n >= 1 && (n == 1 || b > a);
        if !ok(self.re_min, self.re_max, self.n_re) || !ok(self.im_min, self.im_max, self.n_im) {
            return Err(Error::InvalidParams("Wigner grid needs finite increasing bounds and at least one point".into()));
        }
        Ok(())
    }
}

/// Sampled Wigner function. `values[[i, j]]` is `W(re_axis[j] + i im_axis[i])`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WignerGrid {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    pub values: Array2<f64>,
    /// Trapezoidal estimate of the integral over the window.
    pub normalization: f64,
    /// Largest imaginary part met while summing (zero for Hermitian input).
    pub imaginary_residue: f64,
}

impl WignerGrid {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Depth of the negative region, `max(0, -min W)`.
    pub fn negativity_depth(&self) -> f64 {
        (-self.min()).max(0.0)
    }
}

fn single_mode(rho: &DensityMatrix) -> Result<usize> {
    match rho.space() {
        Space::ModeB(n) => Ok(n),
        other => Err(Error::InvalidSpace(format!("Wigner function needs a mode-b state, got {other:?}"))),
    }
}

/// Wigner function at one point, `sum_mn rho_mn W_mn(zeta)`, returned as a
/// complex number whose imaginary part vanishes for Hermitian `rho`.
fn wigner_sum(rho: &Array2<C64>, zeta: C64, w: &mut [C64]) -> C64 {
    let n = rho.nrows();
    let two_z = 2.0 * zeta;
    let two_zc = two_z.conj();
    w[0] = C64::from((2.0 / PI) * (-2.0 * zeta.norm_sqr()).exp());
    let mut total = rho[[0, 0]] * w[0];
    for k in 1..n {
        w[k] = two_z * w[k - 1] / (k as f64).sqrt();
        total += rho[[0, k]] * w[k] + rho[[k, 0]] * w[k].conj();
    }
    for m in 1..n {
        let sm = (m as f64).sqrt();
        let mut prev = w[m];
        w[m] = (two_zc * prev - sm * w[m - 1]) / sm;
        total += rho[[m, m]] * w[m];
        for k in m + 1..n {
            let next = (two_z * w[k - 1] - sm * prev) / (k as f64).sqrt();
            prev = w[k];
            w[k] = next;
            total += rho[[m, k]] * w[k] + rho[[k, m]] * w[k].conj();
        }
    }
    total
}

/// Wigner function of a mode-`b` state on a rectangular grid.
pub fn wigner(rho: &DensityMatrix, spec: &WignerGridSpec) -> Result<WignerGrid> {
    let n = single_mode(rho)?;
    spec.validate()?;
    let tail = fock::tail_mass(&rho.populations());
    if tail > TAIL_LIMIT {
        return Err(Error::CutoffInsufficient { tail, limit: TAIL_LIMIT });
    }
    let re_axis = WignerGridSpec::axis(spec.re_min, spec.re_max, spec.n_re);
    let im_axis = WignerGridSpec::axis(spec.im_min, spec.im_max, spec.n_im);
    let r = rho.matrix();
    let rows: Vec<(Vec<f64>, f64)> = im_axis
        .par_iter()
        .map(|&y| {
            let mut w = vec![C64::from(0.0); n];
            let mut residue: f64 = 0.0;
            let row = re_axis
                .iter()
                .map(|&x| {
                    let v = wigner_sum(r, C64::new(x, y), &mut w);
                    residue = residue.max(v.im.abs());
                    v.re
                })
                .collect();
            (row, residue)
        })
        .collect();
    let imaginary_residue = rows.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    let flat: Vec<f64> = rows.into_iter().flat_map(|(row, _)| row).collect();
    let values = Array2::from_shape_vec((im_axis.len(), re_axis.len()), flat)
        .map_err(|e| Error::Numeric(e.to_string()))?;
    let normalization = trapezoid_2d(&values, &re_axis, &im_axis);
    Ok(WignerGrid { re_axis, im_axis, values, normalization, imaginary_residue })
}

fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|k| {
            let left = if k > 0 { axis[k] - axis[k - 1] } else { 0.0 };
            let right = if k + 1 < n { axis[k + 1] - axis[k] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

fn trapezoid_2d(values: &Array2<f64>, re: &[f64], im: &[f64]) -> f64 {
    let wx = trapezoid_weights(re);
    let wy = trapezoid_weights(im);
    values
        .outer_iter()
        .zip(&wy)
        .map(|(row, &gy)| gy * row.iter().zip(&wx).map(|(v, gx)| v * gx).sum::<f64>())
        .sum()
}

/// Direct evaluation of `(2/pi) Tr[D^dagger(zeta) rho D(zeta) P]` with the
/// truncated displacement operator. Accurate only well inside the cutoff.
pub fn wigner_point(rho: &DensityMatrix, zeta: C64) -> Result<f64> {
    let n = single_mode(rho)?;
    let d = fock::displacement(zeta, n)?;
    let p = fock::parity(n)?;
    let moved = d.dagger().matrix().dot(rho.matrix()).dot(d.matrix());
    let tr: C64 = moved.diag().iter().zip(p.matrix().diag()).map(|(a, b)| a * b).sum();
    Ok(2.0 / PI * tr.re)
}

fn check_normalized(psi: &StateVector) -> Result<()> {
    let dev = (psi.norm() - 1.0).abs();
    if dev > 1e-8 {
        return Err(Error::InvalidParams(format!("state is not normalized (|norm - 1| = {dev:e})")));
    }
    Ok(())
}

/// `|<psi1|psi2>|`.
pub fn fidelity_pure(psi1: &StateVector, psi2: &StateVector) -> Result<f64> {
    if psi1.dim() != psi2.dim() {
        return Err(Error::DimensionMismatch { expected: psi1.dim(), found: psi2.dim() });
    }
    check_normalized(psi1)?;
    check_normalized(psi2)?;
    Ok(psi1.inner(psi2)?.norm())
}

/// Uhlmann fidelity `Tr[(sqrt(rho1) rho2 sqrt(rho1))^{1/2}]`.
pub fn fidelity_mixed(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch { expected: rho1.dim(), found: rho2.dim() });
    }
    if rho2.hermiticity_deviation() > 1e-8 {
        return Err(Error::Numeric("fidelity input is not Hermitian".into()));
    }
    let s = fock::sqrt_psd(rho1)?.into_matrix();
    let inner = s.dot(rho2.matrix()).dot(&s);
    let (vals, _) = fock::eigh(&inner)?;
    // Square roots amplify roundoff: a 1e-17 eigenvalue would add 3e-9.
    let floor = vals.len() as f64 * f64::EPSILON * vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(fock::clamped_roots(&vals)?.into_iter().filter(|r| r * r > floor).sum())
}

pub fn expectation_pure(psi: &StateVector, op: &Operator) -> Result<C64> {
    psi.inner(&op.apply(psi)?)
}

/// `Tr[rho O]`.
pub fn expectation_mixed(rho: &DensityMatrix, op: &Operator) -> Result<C64> {
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), found: rho.dim() });
    }
    let (r, o) = (rho.matrix(), op.matrix());
    let d = r.nrows();
    let mut tr = C64::from(0.0);
    for i in 0..d {
        for k in 0..d {
            tr += r[[i, k]] * o[[k, i]];
        }
    }
    Ok(tr)
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Occupations of the levels of a state, for cutoff checks.
pub fn populations(rho: &DensityMatrix) -> Array1<f64> {
    Array1::from(rho.populations())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_and_fock_values_at_origin() {
        let vac = StateVector::basis(Space::ModeB(10), 0).unwrap().projector();
        let one = StateVector::basis(Space::ModeB(10), 1).unwrap().projector();
        let spec = WignerGridSpec { re_min: 0.0, re_max: 0.0, n_re: 1, im_min: 0.0, im_max: 0.0, n_im: 1 };
        assert!((wigner(&vac, &spec).unwrap().values[[0, 0]] - 2.0 / PI).abs() < 1e-15);
        assert!((wigner(&one, &spec).unwrap().values[[0, 0]] + 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn coherent_state_gaussian_with_complex_amplitude() {
        let beta = C64::new(1.2, -0.7);
        let n = (beta.norm_sqr() + 6.0 * beta.norm() + 10.0).ceil() as usize;
        let rho = StateVector::coherent(beta, n).unwrap().projector();
        let spec = WignerGridSpec { re_min: -1.0, re_max: 3.0, n_re: 9, im_min: -2.5, im_max: 1.5, n_im: 9 };
        let g = wigner(&rho, &spec).unwrap();
        for (i, &y) in g.im_axis.iter().enumerate() {
            for (j, &x) in g.re_axis.iter().enumerate() {
                let want = 2.0 / PI * (-2.0 * (C64::new(x, y) - beta).norm_sqr()).exp();
                assert!((g.values[[i, j]] - want).abs() < 1e-6, "({x}, {y})");
            }
        }
    }

    #[test]
    fn recursion_matches_displaced_parity() {
        let n = 60;
        let a = StateVector::coherent(C64::new(0.8, 0.3), n).unwrap();
        let b = StateVector::basis(Space::ModeB(n), 3).unwrap();
        let mix = (a.projector().matrix() * C64::from(0.6)) + &(b.projector().matrix() * C64::from(0.4));
        let mut off = Array2::zeros((n, n));
        off[[0, 2]] = C64::new(0.05, 0.02);
        off[[2, 0]] = C64::new(0.05, -0.02);
        let rho = DensityMatrix::new(Space::ModeB(n), mix + off).unwrap();
        let spec = WignerGridSpec { re_min: -1.5, re_max: 1.5, n_re: 7, im_min: -1.5, im_max: 1.5, n_im: 7 };
        let g = wigner(&rho, &spec).unwrap();
        for (i, &y) in g.im_axis.iter().enumerate() {
            for (j, &x) in g.re_axis.iter().enumerate() {
                let direct = wigner_point(&rho, C64::new(x, y)).unwrap();
                assert!((g.values[[i, j]] - direct).abs() < 1e-10, "({x}, {y}) {} {}", g.values[[i, j]], direct);
            }
        }
        assert!(g.imaginary_residue < 1e-12);
    }

    #[test]
    fn normalization_on_default_grid() {
        let rho = StateVector::coherent(C64::new(-1.0, 0.5), 30).unwrap().projector();
        let g = wigner(&rho, &WignerGridSpec::default()).unwrap();
        assert!((g.normalization - 1.0).abs() < 1e-2);
        assert!(g.max() <= 2.0 / PI + 1e-6);
    }

    #[test]
    fn rejects_truncated_state() {
        let rho = StateVector::basis(Space::ModeB(10), 9).unwrap().projector();
        assert!(matches!(wigner(&rho, &WignerGridSpec::default()), Err(Error::CutoffInsufficient { .. })));
    }

    #[test]
    fn fidelities() {
        let n = 20;
        let psi = StateVector::coherent(C64::new(0.9, 0.4), n).unwrap();
        let vac = StateVector::basis(Space::ModeB(n), 0).unwrap();
        assert!((fidelity_pure(&psi, &psi).unwrap() - 1.0).abs() < 1e-12);
        let f = fidelity_pure(&vac, &psi).unwrap();
        assert!((f - (-0.5 * (0.81 + 0.16f64)).exp()).abs() < 1e-10);
        let fm = fidelity_mixed(&vac.projector(), &psi.projector()).unwrap();
        assert!((fm - f).abs() < 1e-8);
        let mixed = DensityMatrix::maximally_mixed(Space::ModeB(4));
        let pure = StateVector::basis(Space::ModeB(4), 2).unwrap().projector();
        assert!((fidelity_mixed(&mixed, &pure).unwrap() - 0.5).abs() < 1e-10);
        assert!((fidelity_mixed(&pure, &mixed).unwrap() - 0.5).abs() < 1e-10);
        assert!((fidelity_mixed(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn expectation_paths_agree() {
        let psi = StateVector::coherent(C64::new(0.5, -0.2), 15).unwrap();
        let num = fock::number(fock::Mode::B, 15).unwrap();
        let a = expectation_pure(&psi, &num).unwrap();
        let b = expectation_mixed(&psi.projector(), &num).unwrap();
        assert!((a - b).norm() < 1e-12);
        assert!((a.re - 0.29).abs() < 1e-10);
    }
}
