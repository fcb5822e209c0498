//! Dense complex linear algebra over truncated one- and two-mode Fock spaces.
//!
//! Every matrix carries a [`Space`] tag recording which mode (or the joint
//! space) it acts on, together with the cutoffs. The joint space orders
//! basis vectors with mode `a` as the outer index.

use ndarray::{Array1, Array2, Axis, ShapeBuilder};
use ndarray_linalg::{EighInto, UPLO};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Default ceiling on the joint dimension `n_a * n_b`.
pub const DEFAULT_DIM_CEILING: usize = 4096;

/// Largest population allowed in the top levels of a truncated mode.
pub const TAIL_LIMIT: f64 = 1e-8;

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as rounding noise.
pub const PSD_CLAMP: f64 = 1e-8;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Per-mode Fock cutoffs. Mode `a` keeps levels `0..n_a`, mode `b` keeps
/// levels `0..n_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertConfig {
    pub n_a: usize,
    pub n_b: usize,
}

impl HilbertConfig {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        Self::with_ceiling(n_a, n_b, DEFAULT_DIM_CEILING)
    }

    pub fn with_ceiling(n_a: usize, n_b: usize, ceiling: usize) -> Result<Self> {
        for n in [n_a, n_b] {
            if n < 2 {
                return Err(Error::InvalidCutoff(n));
            }
        }
        let dim = n_a * n_b;
        if dim > ceiling {
            return Err(Error::DimensionCeiling { dim, ceiling });
        }
        Ok(Self { n_a, n_b })
    }

    pub fn dim(&self) -> usize {
        self.n_a * self.n_b
    }

    /// Largest photon number representable in mode `a`.
    pub fn n_max(&self) -> usize {
        self.n_a - 1
    }

    pub fn joint(&self) -> Space {
        Space::Joint { n_a: self.n_a, n_b: self.n_b }
    }

    /// Position of `|m>_a |n>_b` in the joint basis.
    pub fn index(&self, m: usize, n: usize) -> usize {
        m * self.n_b + n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    A,
    B,
}

/// Which space a matrix or vector lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    ModeA(usize),
    ModeB(usize),
    Joint { n_a: usize, n_b: usize },
}

impl Space {
    pub fn single(mode: Mode, n: usize) -> Self {
        match mode {
            Mode::A => Space::ModeA(n),
            Mode::B => Space::ModeB(n),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Space::ModeA(n) | Space::ModeB(n) => n,
            Space::Joint { n_a, n_b } => n_a * n_b,
        }
    }

    pub fn is_joint(&self) -> bool {
        matches!(self, Space::Joint { .. })
    }
}

/// Square complex matrix tagged with the space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: Space,
    matrix: Array2<C64>,
}

impl Operator {
    pub fn new(space: Space, matrix: Array2<C64>) -> Result<Self> {
        check_square(&matrix, space)?;
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        Self { space, matrix: Array2::zeros((d, d)) }
    }

    pub fn identity(space: Space) -> Self {
        let d = space.dim();
        Self { space, matrix: Array2::<C64>::eye(d) }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self { space: self.space, matrix: dagger(&self.matrix) }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { space: self.space, matrix: &self.matrix * factor }
    }

    /// `max |H - H^dagger|` over all entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.matrix)
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        same_space(self.space, psi.space)?;
        Ok(StateVector { space: self.space, amps: self.matrix.dot(&psi.amps) })
    }

    /// `max |[self, other]|` over all entries.
    pub fn commutator_norm(&self, other: &Operator) -> Result<f64> {
        same_space(self.space, other.space)?;
        let c = self.matrix.dot(&other.matrix) - other.matrix.dot(&self.matrix);
        Ok(max_abs(&c))
    }

    /// Eigenvalues in ascending order (the operator must be Hermitian).
    pub fn eigenvalues(&self) -> Result<Array1<f64>> {
        Ok(eigh(&self.matrix)?.0)
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "adding operators on different spaces");
        Operator { space: self.space, matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "subtracting operators on different spaces");
        Operator { space: self.space, matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.space, rhs.space, "multiplying operators on different spaces");
        Operator { space: self.space, matrix: self.matrix.dot(&rhs.matrix) }
    }
}

/// Pure state on a tagged space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: Space,
    amps: Array1<C64>,
}

impl StateVector {
    pub fn new(space: Space, amps: Array1<C64>) -> Result<Self> {
        if amps.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: amps.len() });
        }
        Ok(Self { space, amps })
    }

    /// Fock basis state `|k>` on a single-mode or joint space (joint index).
    pub fn basis(space: Space, k: usize) -> Result<Self> {
        let d = space.dim();
        if k >= d {
            return Err(Error::DimensionMismatch { expected: d, found: k + 1 });
        }
        let mut amps = Array1::zeros(d);
        amps[k] = ONE;
        Ok(Self { space, amps })
    }

    /// Coherent state `D(beta)|0>` on mode `b`.
    pub fn coherent(beta: C64, n: usize) -> Result<Self> {
        let d = displacement(beta, n)?;
        let vac = Self::basis(Space::ModeB(n), 0)?;
        d.apply(&vac)
    }

    /// `|psi_a> (x) |psi_b>`.
    pub fn tensor(a: &StateVector, b: &StateVector) -> Result<Self> {
        let (Space::ModeA(n_a), Space::ModeB(n_b)) = (a.space, b.space) else {
            return Err(Error::InvalidComposition(format!(
                "tensor needs (mode-a, mode-b), got ({:?}, {:?})",
                a.space, b.space
            )));
        };
        let mut amps = Array1::zeros(n_a * n_b);
        for m in 0..n_a {
            for n in 0..n_b {
                amps[m * n_b + n] = a.amps[m] * b.amps[n];
            }
        }
        Ok(Self { space: Space::Joint { n_a, n_b }, amps })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &Array1<C64> {
        &self.amps
    }

    pub fn into_amps(self) -> Array1<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Numeric(format!("cannot normalize a state of norm {n}")));
        }
        Ok(Self { space: self.space, amps: &self.amps / C64::from(n) })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        same_space(self.space, other.space)?;
        Ok(self.amps.iter().zip(other.amps.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn projector(&self) -> DensityMatrix {
        let d = self.dim();
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityMatrix { space: self.space, matrix: m }
    }

    /// Populations `|<k|psi>|^2`.
    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Density matrix on a tagged space. Construction only checks shapes; use
/// [`DensityMatrix::check_physical`] to validate trace, Hermiticity and
/// positivity.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    space: Space,
    matrix: Array2<C64>,
}

impl DensityMatrix {
    pub fn new(space: Space, matrix: Array2<C64>) -> Result<Self> {
        check_square(&matrix, space)?;
        Ok(Self { space, matrix })
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(space: Space) -> Self {
        let d = space.dim();
        Self { space, matrix: Array2::<C64>::eye(d) / C64::from(d as f64) }
    }

    /// `rho_a (x) rho_b`.
    pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        let (Space::ModeA(n_a), Space::ModeB(n_b)) = (a.space, b.space) else {
            return Err(Error::InvalidComposition(format!(
                "tensor needs (mode-a, mode-b), got ({:?}, {:?})",
                a.space, b.space
            )));
        };
        Ok(Self { space: Space::Joint { n_a, n_b }, matrix: kron(&a.matrix, &b.matrix) })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Result<Array1<f64>> {
        Ok(eigh(&self.matrix)?.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().cloned().fold(f64::INFINITY, f64::min))
    }

    /// `Tr[rho^2]`.
    pub fn purity(&self) -> f64 {
        // Tr[rho rho] = sum_ij rho_ij rho_ji
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += self.matrix[[i, j]] * self.matrix[[j, i]];
            }
        }
        acc.re
    }

    /// Diagonal in the Fock basis.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diag().iter().map(|z| z.re).collect()
    }

    /// Hermitian within 1e-10, unit trace within 1e-8, eigenvalues >= -1e-8.
    pub fn check_physical(&self) -> Result<()> {
        let herm = self.hermiticity_deviation();
        if herm > 1e-10 {
            return Err(Error::Numeric(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > 1e-8 {
            return Err(Error::Numeric(format!("density matrix trace {tr} != 1")));
        }
        let min = self.min_eigenvalue()?;
        if min < -PSD_CLAMP {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        Ok(())
    }
}

/// Ladder operator with `<m|a|m+1> = sqrt(m+1)`.
pub fn annihilator(mode: Mode, n: usize) -> Result<Operator> {
    if n < 2 {
        return Err(Error::InvalidCutoff(n));
    }
    let mut m = Array2::zeros((n, n));
    for k in 0..n - 1 {
        m[[k, k + 1]] = C64::from(((k + 1) as f64).sqrt());
    }
    Ok(Operator { space: Space::single(mode, n), matrix: m })
}

pub fn creator(mode: Mode, n: usize) -> Result<Operator> {
    Ok(annihilator(mode, n)?.dagger())
}

/// Number operator `diag(0, 1, ..., n-1)`.
pub fn number(mode: Mode, n: usize) -> Result<Operator> {
    if n < 2 {
        return Err(Error::InvalidCutoff(n));
    }
    let diag = Array1::from_iter((0..n).map(|k| C64::from(k as f64)));
    Ok(Operator { space: Space::single(mode, n), matrix: Array2::from_diag(&diag) })
}

/// Parity `(-1)^{b^dagger b}` on mode `b`.
pub fn parity(n: usize) -> Result<Operator> {
    if n < 2 {
        return Err(Error::InvalidCutoff(n));
    }
    let diag = Array1::from_iter((0..n).map(|k| if k % 2 == 0 { ONE } else { -ONE }));
    Ok(Operator { space: Space::ModeB(n), matrix: Array2::from_diag(&diag) })
}

/// Kronecker product of a mode-`a` and a mode-`b` operator.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    let (Space::ModeA(n_a), Space::ModeB(n_b)) = (a.space, b.space) else {
        return Err(Error::InvalidComposition(format!(
            "tensor needs (mode-a, mode-b), got ({:?}, {:?})",
            a.space, b.space
        )));
    };
    Ok(Operator { space: Space::Joint { n_a, n_b }, matrix: kron(&a.matrix, &b.matrix) })
}

/// Embed a single-mode operator into the joint space of `dims`.
pub fn lift(op: &Operator, dims: HilbertConfig) -> Result<Operator> {
    match op.space {
        Space::ModeA(n) if n == dims.n_a => tensor(op, &Operator::identity(Space::ModeB(dims.n_b))),
        Space::ModeB(n) if n == dims.n_b => tensor(&Operator::identity(Space::ModeA(dims.n_a)), op),
        other => Err(Error::InvalidComposition(format!(
            "cannot lift {other:?} into {:?}",
            dims.joint()
        ))),
    }
}

/// Displacement `D(alpha) = exp(alpha b^dagger - alpha^* b)` on mode `b`,
/// the exact exponential of the truncated generator.
pub fn displacement(alpha: C64, n: usize) -> Result<Operator> {
    let b = annihilator(Mode::B, n)?;
    let gen = &b.dagger().scaled(alpha) - &b.scaled(alpha.conj());
    matrix_exp(&gen)
}

/// Squeezing `S(zeta) = exp[(zeta^* b^2 - zeta b^dagger^2)/2]` on mode `b`,
/// the exact exponential of the truncated generator.
pub fn squeeze(zeta: C64, n: usize) -> Result<Operator> {
    let b = annihilator(Mode::B, n)?;
    let b2 = &b * &b;
    let gen = (&b2.scaled(zeta.conj()) - &b2.dagger().scaled(zeta)).scaled(C64::from(0.5));
    matrix_exp(&gen)
}

/// Matrix exponential `e^G`.
///
/// Anti-Hermitian generators go through a Hermitian eigendecomposition of
/// `iG`, which keeps the result unitary to machine precision. Everything else
/// uses scaling and squaring around a Taylor kernel.
pub fn matrix_exp(gen: &Operator) -> Result<Operator> {
    let g = &gen.matrix;
    if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("non-finite entry in matrix exponential input".into()));
    }
    let scale = max_abs(g).max(1.0);
    let anti = g + &dagger(g);
    let matrix = if max_abs(&anti) <= 1e-14 * scale {
        let h = g.mapv(|z| I * z);
        let (vals, vecs) = eigh(&h)?;
        let phases: Vec<C64> = vals.iter().map(|&l| (-I * l).exp()).collect();
        reconstruct(&vecs, &phases)
    } else {
        expm_taylor(g)
    };
    Ok(Operator { space: gen.space, matrix })
}

fn expm_taylor(g: &Array2<C64>) -> Array2<C64> {
    let d = g.nrows();
    let norm1 = (0..d)
        .map(|j| g.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let a = g / C64::from(2f64.powi(squarings));
    let mut result: Array2<C64> = Array2::<C64>::eye(d);
    let mut term: Array2<C64> = Array2::<C64>::eye(d);
    for k in 1..=40 {
        term = term.dot(&a) / C64::from(k as f64);
        result += &term;
        if max_abs(&term) <= 1e-18 * max_abs(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Reduced density matrix of the kept mode.
pub fn partial_trace(rho: &DensityMatrix, keep: Mode) -> Result<DensityMatrix> {
    let Space::Joint { n_a, n_b } = rho.space else {
        return Err(Error::InvalidSpace(format!("partial trace needs a joint state, got {:?}", rho.space)));
    };
    let m = &rho.matrix;
    let reduced = match keep {
        Mode::B => {
            let mut out = Array2::zeros((n_b, n_b));
            for k in 0..n_a {
                for j in 0..n_b {
                    for l in 0..n_b {
                        out[[j, l]] += m[[k * n_b + j, k * n_b + l]];
                    }
                }
            }
            DensityMatrix { space: Space::ModeB(n_b), matrix: out }
        }
        Mode::A => {
            let mut out = Array2::zeros((n_a, n_a));
            for p in 0..n_a {
                for q in 0..n_a {
                    let mut acc = ZERO;
                    for j in 0..n_b {
                        acc += m[[p * n_b + j, q * n_b + j]];
                    }
                    out[[p, q]] = acc;
                }
            }
            DensityMatrix { space: Space::ModeA(n_a), matrix: out }
        }
    };
    Ok(reduced)
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-1e-8, 0)` are clamped to zero; anything more negative is
/// rejected.
pub fn sqrt_psd(rho: &DensityMatrix) -> Result<Operator> {
    let herm = rho.hermiticity_deviation();
    if herm > 1e-8 {
        return Err(Error::Numeric(format!("sqrt_psd input not Hermitian ({herm:e})")));
    }
    let (vals, vecs) = eigh(&rho.matrix)?;
    let roots = clamped_roots(&vals)?;
    let weights: Vec<C64> = roots.into_iter().map(C64::from).collect();
    Ok(Operator { space: rho.space, matrix: reconstruct(&vecs, &weights) })
}

pub(crate) fn clamped_roots(vals: &Array1<f64>) -> Result<Vec<f64>> {
    vals.iter()
        .map(|&l| {
            if l < -PSD_CLAMP {
                Err(Error::NotPositiveSemidefinite(l))
            } else {
                Ok(l.max(0.0).sqrt())
            }
        })
        .collect()
}

/// Population held by the top `max(2, n/10)` Fock levels.
pub fn tail_mass(populations: &[f64]) -> f64 {
    let n = populations.len();
    let width = (n / 10).max(2).min(n);
    populations[n - width..].iter().sum()
}

/// Hermitian eigendecomposition (ascending eigenvalues, eigenvectors in
/// columns) of the Hermitian part of `m`.
pub fn eigh(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("non-finite entry in eigendecomposition input".into()));
    }
    // LAPACK sees a row-major complex matrix as its conjugate, so hand it a
    // column-major copy.
    let n = m.nrows();
    let mut sym = Array2::<C64>::zeros((n, n).f());
    sym.assign(&((m + &dagger(m)) * C64::from(0.5)));
    let (vals, vecs) = sym.eigh_into(UPLO::Lower).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok((vals, vecs.as_standard_layout().into_owned()))
}

/// `V diag(w) V^dagger`.
pub(crate) fn reconstruct(vecs: &Array2<C64>, weights: &[C64]) -> Array2<C64> {
    let mut scaled = vecs.clone();
    for (mut col, &w) in scaled.axis_iter_mut(Axis(1)).zip(weights) {
        col.mapv_inplace(|z| z * w);
    }
    scaled.dot(&dagger(vecs))
}

pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[[i, j]];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[[i * rb + k, j * cb + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

pub fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_deviation(m: &Array2<C64>) -> f64 {
    let d = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..d {
        for j in i..d {
            dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    dev
}

fn check_square(matrix: &Array2<C64>, space: Space) -> Result<()> {
    let (r, c) = matrix.dim();
    if r != c {
        return Err(Error::InvalidSpace(format!("matrix is {r}x{c}, not square")));
    }
    if r != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: r });
    }
    Ok(())
}

fn same_space(a: Space, b: Space) -> Result<()> {
    if a != b {
        return Err(Error::InvalidComposition(format!("space mismatch: {a:?} vs {b:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn factorial(k: usize) -> f64 {
        (1..=k).map(|x| x as f64).product()
    }

    #[test]
    fn annihilator_entries() {
        let a = annihilator(Mode::B, 2).unwrap();
        assert_eq!(a.matrix()[[0, 1]], c(1.0));
        assert_eq!(a.matrix()[[1, 0]], ZERO);
        assert_eq!(a.matrix()[[0, 0]], ZERO);
        let a3 = annihilator(Mode::B, 3).unwrap();
        assert_abs_diff_eq!(a3.matrix()[[1, 2]].re, 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(annihilator(Mode::A, 1), Err(Error::InvalidCutoff(1)));
    }

    #[test]
    fn number_operator_on_fock_states() {
        let n = 7;
        let a = annihilator(Mode::B, n).unwrap();
        let num = &a.dagger() * &a;
        for k in 0..n {
            let ket = StateVector::basis(Space::ModeB(n), k).unwrap();
            let out = num.apply(&ket).unwrap();
            for j in 0..n {
                let expected = if j == k { k as f64 } else { 0.0 };
                assert_abs_diff_eq!(out.amps()[j].re, expected, epsilon = 1e-12);
                assert_abs_diff_eq!(out.amps()[j].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ladder_commutator_below_truncation_edge() {
        let n = 9;
        let b = annihilator(Mode::B, n).unwrap();
        let comm = &(&b * &b.dagger()) - &(&b.dagger() * &b);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(comm.matrix()[[i, j]].re, expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn tensor_identity_and_eigenvalue() {
        let id = tensor(&Operator::identity(Space::ModeA(2)), &Operator::identity(Space::ModeB(3))).unwrap();
        assert_eq!(id.matrix(), &Array2::<C64>::eye(6));

        let dims = HilbertConfig::new(3, 4).unwrap();
        let na = number(Mode::A, 3).unwrap();
        let nb = number(Mode::B, 4).unwrap();
        let prod = tensor(&na, &nb).unwrap();
        let ket = StateVector::basis(dims.joint(), dims.index(1, 2)).unwrap();
        let out = prod.apply(&ket).unwrap();
        assert_abs_diff_eq!(out.amps()[dims.index(1, 2)].re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.norm(), 2.0, epsilon = 1e-14);

        let twice = tensor(&na.scaled(c(2.0)), &nb).unwrap();
        assert_eq!(twice, prod.scaled(c(2.0)));

        assert!(matches!(tensor(&nb, &na), Err(Error::InvalidComposition(_))));
    }

    #[test]
    fn displacement_identity_inverse_and_poisson() {
        let n = 40;
        let id = displacement(ZERO, n).unwrap();
        assert!(max_abs(&(id.matrix() - &Array2::<C64>::eye(n))) < 1e-14);

        let alpha = C64::new(1.3, -0.7);
        let d = displacement(alpha, n).unwrap();
        let dinv = displacement(-alpha, n).unwrap();
        assert!(max_abs(&((&d * &dinv).matrix() - &Array2::<C64>::eye(n))) < 1e-12);

        let vac = StateVector::basis(Space::ModeB(n), 0).unwrap();
        let coh = d.apply(&vac).unwrap();
        let m2 = alpha.norm_sqr();
        for k in 0..12 {
            let poisson = (-m2).exp() * m2.powi(k as i32) / factorial(k);
            assert_abs_diff_eq!(coh.amps()[k].norm_sqr(), poisson, epsilon = 1e-8);
        }
    }

    #[test]
    fn squeeze_variance_and_inverse() {
        let r: f64 = 0.5;
        let n = (20.0 * (2.0 * r).exp()).ceil() as usize;
        let s = squeeze(c(r), n).unwrap();
        let vac = StateVector::basis(Space::ModeB(n), 0).unwrap();
        let sq = s.apply(&vac).unwrap();
        let b = annihilator(Mode::B, n).unwrap();
        let x = (&b + &b.dagger()).scaled(c(1.0 / 2f64.sqrt()));
        let x2 = &x * &x;
        let mean = sq.inner(&x.apply(&sq).unwrap()).unwrap().re;
        let second = sq.inner(&x2.apply(&sq).unwrap()).unwrap().re;
        assert_abs_diff_eq!(second - mean * mean, (-2.0 * r).exp() / 2.0, epsilon = 1e-6);

        let zeta = C64::from_polar(0.8, 1.1);
        let s1 = squeeze(zeta, 30).unwrap();
        let s2 = squeeze(-zeta, 30).unwrap();
        assert!(max_abs(&((&s1 * &s2).matrix() - &Array2::<C64>::eye(30))) < 1e-10);
        assert!(max_abs(&(squeeze(ZERO, 5).unwrap().matrix() - &Array2::<C64>::eye(5))) < 1e-15);
    }

    #[test]
    fn matrix_exp_cases() {
        let z = Operator::zeros(Space::ModeB(4));
        assert!(max_abs(&(matrix_exp(&z).unwrap().matrix() - &Array2::<C64>::eye(4))) < 1e-15);

        let thetas = [0.3, -1.2, 2.5];
        let diag = Array1::from_iter(thetas.iter().map(|&t| I * t));
        let g = Operator::new(Space::ModeB(3), Array2::from_diag(&diag)).unwrap();
        let e = matrix_exp(&g).unwrap();
        for (k, &t) in thetas.iter().enumerate() {
            assert_abs_diff_eq!((e.matrix()[[k, k]] - (I * t).exp()).norm(), 0.0, epsilon = 1e-14);
        }

        // general (non-normal) generator through the Taylor route
        let mut m = Array2::zeros((5, 5));
        for i in 0..5 {
            for j in 0..5 {
                m[[i, j]] = C64::new(((i * 3 + j) % 5) as f64 * 0.4 - 0.6, (i as f64 - j as f64) * 0.15);
            }
        }
        let g = Operator::new(Space::ModeB(5), m).unwrap();
        let prod = &matrix_exp(&g).unwrap() * &matrix_exp(&g.scaled(-ONE)).unwrap();
        assert!(max_abs(&(prod.matrix() - &Array2::<C64>::eye(5))) < 1e-10);

        let mut bad = Array2::zeros((2, 2));
        bad[[0, 1]] = C64::new(f64::NAN, 0.0);
        let bad = Operator::new(Space::ModeB(2), bad).unwrap();
        assert!(matches!(matrix_exp(&bad), Err(Error::Numeric(_))));
    }

    #[test]
    fn unitarity_of_displacement_and_squeeze() {
        for op in [
            displacement(C64::new(2.0, 1.0), 25).unwrap(),
            squeeze(C64::from_polar(1.2, -0.4), 25).unwrap(),
        ] {
            let u = &op.dagger() * &op;
            assert!(max_abs(&(u.matrix() - &Array2::<C64>::eye(25))) < 1e-10);
        }
    }

    #[test]
    fn partial_trace_cases() {
        let rho_a = DensityMatrix::maximally_mixed(Space::ModeA(2));
        let psi = StateVector::coherent(C64::new(0.4, 0.2), 6).unwrap();
        let rho_b = psi.projector();
        let joint = DensityMatrix::tensor(&rho_a, &rho_b).unwrap();
        let red = partial_trace(&joint, Mode::B).unwrap();
        assert!(max_abs(&(red.matrix() - rho_b.matrix())) < 1e-12);
        let red_a = partial_trace(&joint, Mode::A).unwrap();
        assert!(max_abs(&(red_a.matrix() * rho_b.trace() - rho_a.matrix())) < 1e-12);

        // sum_k |kk><kk| / d
        let d = 3;
        let mut m = Array2::zeros((d * d, d * d));
        for k in 0..d {
            m[[k * d + k, k * d + k]] = c(1.0 / d as f64);
        }
        let corr = DensityMatrix::new(Space::Joint { n_a: d, n_b: d }, m).unwrap();
        let red = partial_trace(&corr, Mode::B).unwrap();
        assert!(max_abs(&(red.matrix() - &(Array2::<C64>::eye(d) / c(d as f64)))) < 1e-15);

        assert!(matches!(partial_trace(&rho_b, Mode::B), Err(Error::InvalidSpace(_))));
    }

    #[test]
    fn eigh_residual_for_complex_input() {
        let h = Array2::from_shape_fn((6, 6), |(i, j)| {
            let (i, j) = (i as f64, j as f64);
            C64::new((i + j).cos(), (i - j) * 0.3)
        });
        let (vals, vecs) = eigh(&h).unwrap();
        let lhs = h.dot(&vecs);
        let rhs = &vecs * &vals.mapv(C64::from);
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn sqrt_psd_cases() {
        let mixed = DensityMatrix::maximally_mixed(Space::ModeB(4));
        let s = sqrt_psd(&mixed).unwrap();
        assert!(max_abs(&(s.matrix() - &(Array2::<C64>::eye(4) * c(0.5)))) < 1e-12);

        let proj = StateVector::coherent(C64::new(0.5, 0.5), 8).unwrap().projector();
        let s = sqrt_psd(&proj).unwrap();
        assert!(max_abs(&(s.matrix() - proj.matrix())) < 1e-8);

        let mut neg = Array2::<C64>::eye(2);
        neg[[1, 1]] = c(-0.1);
        let neg = DensityMatrix::new(Space::ModeB(2), neg).unwrap();
        assert!(matches!(sqrt_psd(&neg), Err(Error::NotPositiveSemidefinite(_))));

        let mut tiny = Array2::<C64>::eye(2) * c(0.5);
        tiny[[1, 1]] = c(-1e-10);
        let tiny = DensityMatrix::new(Space::ModeB(2), tiny).unwrap();
        assert_abs_diff_eq!(sqrt_psd(&tiny).unwrap().matrix()[[1, 1]].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn parity_cases() {
        let p = parity(2).unwrap();
        assert_eq!(p.matrix()[[0, 0]], ONE);
        assert_eq!(p.matrix()[[1, 1]], -ONE);
        let p5 = parity(5).unwrap();
        assert_eq!((&p5 * &p5).matrix(), &Array2::<C64>::eye(5));
    }

    #[test]
    fn hilbert_config_validation() {
        assert!(HilbertConfig::new(4, 60).is_ok());
        assert_eq!(HilbertConfig::new(1, 60), Err(Error::InvalidCutoff(1)));
        assert!(matches!(HilbertConfig::new(100, 100), Err(Error::DimensionCeiling { .. })));
        assert!(HilbertConfig::with_ceiling(100, 100, 10_000).is_ok());
    }

    #[test]
    fn tail_mass_window() {
        let mut pops = vec![0.0; 30];
        pops[0] = 1.0 - 1e-6;
        pops[29] = 1e-6;
        assert_abs_diff_eq!(tail_mass(&pops), 1e-6, epsilon = 1e-18);
        pops[26] = 1.0;
        assert_abs_diff_eq!(tail_mass(&pops), 1e-6, epsilon = 1e-18);
    }
}
