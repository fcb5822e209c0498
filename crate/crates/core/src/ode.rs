//! Adaptive Dormand-Prince 5(4) integrator with 4th-order dense output.
//!
//! The integrator works on any owned `ndarray` array in standard layout whose
//! elements are `f64` or `Complex64`. Output samples are produced by dense
//! interpolation, so the step sequence does not depend on the output grid.

use ndarray::{Array, Dimension};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub trait OdeScalar: Copy + Send + Sync + 'static {
    fn zero() -> Self;
    fn scale(self, f: f64) -> Self;
    fn plus(self, other: Self) -> Self;
    fn modulus(self) -> f64;
}

impl OdeScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn scale(self, f: f64) -> Self {
        self * f
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl OdeScalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn scale(self, f: f64) -> Self {
        self * f
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// State container the integrator can take linear combinations of.
pub trait OdeState: Clone {
    type Elem: OdeScalar;
    fn data(&self) -> &[Self::Elem];
    fn data_mut(&mut self) -> &mut [Self::Elem];
}

impl<A: OdeScalar, D: Dimension> OdeState for Array<A, D> {
    type Elem = A;

    fn data(&self) -> &[A] {
        self.as_slice().expect("ODE state must be in standard layout")
    }

    fn data_mut(&mut self) -> &mut [A] {
        self.as_slice_mut().expect("ODE state must be in standard layout")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10 }
    }
}

/// Step counters for one integration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OdeStats {
    pub rhs_evals: usize,
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Clone, Debug)]
pub struct Dopri5 {
    pub tol: Tolerances,
    pub h_init: Option<f64>,
    pub h_max: Option<f64>,
    pub max_steps: usize,
    pub safety: f64,
    pub fac_min: f64,
    pub fac_max: f64,
    pub beta: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            h_init: None,
            h_max: None,
            max_steps: 2_000_000,
            safety: 0.9,
            fac_min: 0.2,
            fac_max: 10.0,
            beta: 0.04,
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// `out = base + h * sum_j coeffs[j] * ks[j]`.
fn lincomb<S: OdeState>(out: &mut S, base: &S, h: f64, coeffs: &[f64], ks: &[S]) {
    let o = out.data_mut();
    o.copy_from_slice(base.data());
    for (&c, k) in coeffs.iter().zip(ks) {
        if c == 0.0 {
            continue;
        }
        let w = h * c;
        for (oi, &ki) in o.iter_mut().zip(k.data()) {
            *oi = oi.plus(ki.scale(w));
        }
    }
}

fn weighted_rms<S: OdeState>(v: &[S::Elem], y0: &S, y1: &S, tol: Tolerances) -> f64 {
    let n = v.len().max(1);
    let sum: f64 = v
        .iter()
        .zip(y0.data())
        .zip(y1.data())
        .map(|((e, a), b)| {
            let sk = tol.atol + tol.rtol * a.modulus().max(b.modulus());
            (e.modulus() / sk).powi(2)
        })
        .sum();
    (sum / n as f64).sqrt()
}

impl Dopri5 {
    pub fn with_tolerances(tol: Tolerances) -> Self {
        Self { tol, ..Self::default() }
    }

    /// Integrates `dy/dt = rhs(t, y)` from `t_grid[0]` and reports the state at
    /// every grid time through `emit(index, t, y)`. The grid must be
    /// non-decreasing.
    pub fn integrate<S, F, O>(&self, mut rhs: F, t_grid: &[f64], y0: S, mut emit: O) -> Result<OdeStats>
    where
        S: OdeState,
        F: FnMut(f64, &S, &mut S),
        O: FnMut(usize, f64, &S) -> Result<()>,
    {
        let mut stats = OdeStats::default();
        let Some(&t_start) = t_grid.first() else {
            return Ok(stats);
        };
        if t_grid.windows(2).any(|w| w[1] < w[0]) || t_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParams("time grid must be finite and non-decreasing".into()));
        }
        let t_end = *t_grid.last().unwrap();

        let mut t = t_start;
        let mut y = y0;
        let mut next = 0;
        while next < t_grid.len() && t_grid[next] <= t {
            emit(next, t, &y)?;
            next += 1;
        }
        if next == t_grid.len() {
            return Ok(stats);
        }

        let mut k: Vec<S> = (0..7).map(|_| y.clone()).collect();
        let mut ytmp = y.clone();
        let mut ynew = y.clone();
        let mut err = y.clone();
        rhs(t, &y, &mut k[0]);
        stats.rhs_evals += 1;

        let mut h = match self.h_init {
            Some(h) => h,
            None => self.initial_step(&mut rhs, t, &y, &k[0], &mut ytmp, &mut ynew, &mut stats),
        };
        if let Some(hm) = self.h_max {
            h = h.min(hm);
        }

        let expo1 = 0.2 - self.beta * 0.75;
        let mut facold: f64 = 1e-4;
        let mut last_rejected = false;

        while next < t_grid.len() {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::Integration {
                    last_good_time: t,
                    reason: format!("exceeded {} steps", self.max_steps),
                });
            }
            let h_floor = 1e-14 * t.abs().max(1.0);
            if h < h_floor {
                return Err(Error::StiffFailure { t, h });
            }
            if t + h > t_end {
                h = t_end - t;
            }

            for s in 1..6 {
                lincomb(&mut ytmp, &y, h, &A[s][..s], &k[..s]);
                rhs(t + C[s] * h, &ytmp, &mut k[s]);
            }
            // last stage is evaluated at the 5th-order solution itself
            lincomb(&mut ynew, &y, h, &A[6], &k[..6]);
            rhs(t + h, &ynew, &mut k[6]);
            stats.rhs_evals += 6;

            {
                let e = err.data_mut();
                e.iter_mut().for_each(|v| *v = S::Elem::zero());
                for (j, kj) in k.iter().enumerate() {
                    if E[j] == 0.0 {
                        continue;
                    }
                    let w = h * E[j];
                    for (ei, &ki) in e.iter_mut().zip(kj.data()) {
                        *ei = ei.plus(ki.scale(w));
                    }
                }
            }
            let err_norm = weighted_rms(err.data(), &y, &ynew, self.tol);
            if !err_norm.is_finite() {
                return Err(Error::Integration { last_good_time: t, reason: "non-finite error estimate".into() });
            }
            let fac11 = err_norm.powf(expo1);

            if err_norm <= 1.0 {
                let t_new = t + h;
                while next < t_grid.len() && t_grid[next] <= t_new {
                    let tout = t_grid[next];
                    if tout == t_new {
                        emit(next, tout, &ynew)?;
                    } else {
                        self.dense_output(&mut ytmp, &y, &ynew, &k, h, (tout - t) / h);
                        emit(next, tout, &ytmp)?;
                    }
                    next += 1;
                }
                stats.accepted += 1;
                t = t_new;
                std::mem::swap(&mut y, &mut ynew);
                k.swap(0, 6);

                let fac = (fac11 / facold.powf(self.beta) / self.safety)
                    .clamp(1.0 / self.fac_max, 1.0 / self.fac_min);
                facold = err_norm.max(1e-4);
                let mut h_new = h / fac;
                if last_rejected {
                    h_new = h_new.min(h);
                }
                if let Some(hm) = self.h_max {
                    h_new = h_new.min(hm);
                }
                h = h_new;
                last_rejected = false;
            } else {
                stats.rejected += 1;
                h /= (fac11 / self.safety).min(1.0 / self.fac_min);
                last_rejected = true;
            }
        }
        Ok(stats)
    }

    fn dense_output<S: OdeState>(&self, out: &mut S, y0: &S, y1: &S, k: &[S], h: f64, theta: f64) {
        let th1 = 1.0 - theta;
        let o = out.data_mut();
        let y0 = y0.data();
        let y1 = y1.data();
        let k1 = k[0].data();
        let k7 = k[6].data();
        for i in 0..o.len() {
            let r2 = y1[i].plus(y0[i].scale(-1.0));
            let r3 = k1[i].scale(h).plus(r2.scale(-1.0));
            let r4 = r2.plus(k7[i].scale(-h)).plus(r3.scale(-1.0));
            let mut r5 = S::Elem::zero();
            for (j, kj) in k.iter().enumerate() {
                if D[j] != 0.0 {
                    r5 = r5.plus(kj.data()[i].scale(h * D[j]));
                }
            }
            let inner = r4.plus(r5.scale(th1)).scale(theta);
            let mid = r3.plus(inner).scale(th1);
            o[i] = y0[i].plus(r2.plus(mid).scale(theta));
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn initial_step<S, F>(
        &self,
        rhs: &mut F,
        t: f64,
        y: &S,
        f0: &S,
        ytmp: &mut S,
        f1: &mut S,
        stats: &mut OdeStats,
    ) -> f64
    where
        S: OdeState,
        F: FnMut(f64, &S, &mut S),
    {
        let d0 = weighted_rms(y.data(), y, y, self.tol);
        let d1 = weighted_rms(f0.data(), y, y, self.tol);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        lincomb(ytmp, y, h0, &[1.0], std::slice::from_ref(f0));
        rhs(t + h0, ytmp, f1);
        stats.rhs_evals += 1;
        let diff: Vec<S::Elem> = f1.data().iter().zip(f0.data()).map(|(&a, &b)| a.plus(b.scale(-1.0))).collect();
        let d2 = weighted_rms(&diff, y, y, self.tol) / h0;
        let dmax = d1.max(d2);
        let h1 = if dmax <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dmax).powf(0.2) };
        (100.0 * h0).min(h1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1};

    #[test]
    fn exponential_decay_matches_closed_form() {
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.25).collect();
        let mut out = vec![0.0; grid.len()];
        let solver = Dopri5::with_tolerances(Tolerances { rtol: 1e-10, atol: 1e-12 });
        solver
            .integrate(
                |_, y: &Array1<f64>, dy: &mut Array1<f64>| dy[0] = -1.3 * y[0],
                &grid,
                array![2.0],
                |i, _, y| {
                    out[i] = y[0];
                    Ok(())
                },
            )
            .unwrap();
        for (i, &t) in grid.iter().enumerate() {
            assert!((out[i] - 2.0 * (-1.3 * t).exp()).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn complex_rotation_with_dense_output() {
        // y' = -i w y, sampled at points that fall inside steps
        let w = 2.7;
        let grid: Vec<f64> = (0..=37).map(|i| i as f64 * 0.137).collect();
        let mut max_err: f64 = 0.0;
        let solver = Dopri5::default();
        let stats = solver
            .integrate(
                |_, y: &Array1<C64>, dy: &mut Array1<C64>| dy[0] = C64::new(0.0, -w) * y[0],
                &grid,
                array![C64::new(1.0, 0.0)],
                |_, t, y| {
                    max_err = max_err.max((y[0] - C64::new(0.0, -w * t).exp()).norm());
                    Ok(())
                },
            )
            .unwrap();
        assert!(max_err < 1e-7, "max error {max_err}");
        assert!(stats.accepted > 0);
    }

    #[test]
    fn rejects_decreasing_grid() {
        let res = Dopri5::default().integrate(
            |_, _: &Array1<f64>, _: &mut Array1<f64>| {},
            &[1.0, 0.5],
            array![0.0],
            |_, _, _| Ok(()),
        );
        assert!(matches!(res, Err(Error::InvalidParams(_))));
    }

    #[test]
    fn step_underflow_is_reported() {
        // blows up in finite time at t = 1
        let res = Dopri5::default().integrate(
            |_, y: &Array1<f64>, dy: &mut Array1<f64>| dy[0] = y[0] * y[0],
            &[0.0, 2.0],
            array![1.0],
            |_, _, _| Ok(()),
        );
        assert!(matches!(res, Err(Error::StiffFailure { .. }) | Err(Error::Integration { .. })));
    }
}
