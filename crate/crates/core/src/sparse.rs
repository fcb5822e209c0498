//! Compressed-row view of a dense operator.
//!
//! Matrices are stored densely everywhere else; propagation converts the
//! ladder-built operators (a handful of non-zeros per row) into this form so
//! that products with a dense state cost `O(nnz * d)` instead of `O(d^3)`.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

#[derive(Clone, Debug)]
pub struct CsrMatrix {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Keeps every entry that is not exactly zero.
    pub fn from_dense(m: &Array2<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "CSR conversion needs a square matrix");
        let dim = m.nrows();
        let mut indptr = Vec::with_capacity(dim + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in m.rows() {
            for (j, &v) in row.iter().enumerate() {
                if v.re != 0.0 || v.im != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self { dim, indptr, indices, values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let mut out = Array2::zeros((self.dim, self.dim));
        for i in 0..self.dim {
            for p in self.indptr[i]..self.indptr[i + 1] {
                out[[i, self.indices[p]]] = self.values[p];
            }
        }
        out
    }

    /// `out += coef * self * x` for a dense square `x`.
    pub fn left_mul_acc(&self, coef: C64, x: &Array2<C64>, out: &mut Array2<C64>) {
        let d = self.dim;
        let xs = x.as_slice().expect("standard layout");
        let os = out.as_slice_mut().expect("standard layout");
        for i in 0..d {
            let out_row = &mut os[i * d..(i + 1) * d];
            for p in self.indptr[i]..self.indptr[i + 1] {
                let w = coef * self.values[p];
                let k = self.indices[p];
                let x_row = &xs[k * d..(k + 1) * d];
                for (o, &xv) in out_row.iter_mut().zip(x_row) {
                    *o += w * xv;
                }
            }
        }
    }

    /// `out += coef * x * self` for a dense square `x`.
    pub fn right_mul_acc(&self, coef: C64, x: &Array2<C64>, out: &mut Array2<C64>) {
        let d = self.dim;
        let xs = x.as_slice().expect("standard layout");
        let os = out.as_slice_mut().expect("standard layout");
        for i in 0..d {
            let x_row = &xs[i * d..(i + 1) * d];
            let out_row = &mut os[i * d..(i + 1) * d];
            for (k, &xv) in x_row.iter().enumerate() {
                if xv.re == 0.0 && xv.im == 0.0 {
                    continue;
                }
                let w = coef * xv;
                for p in self.indptr[k]..self.indptr[k + 1] {
                    out_row[self.indices[p]] += w * self.values[p];
                }
            }
        }
    }

    /// `out += coef * self * v`.
    pub fn mul_vec_acc(&self, coef: C64, v: &Array1<C64>, out: &mut Array1<C64>) {
        for i in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for p in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[p] * v[self.indices[p]];
            }
            out[i] += coef * acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(d: usize, seed: usize) -> Array2<C64> {
        Array2::from_shape_fn((d, d), |(i, j)| {
            let h = (i * 31 + j * 17 + seed * 7) % 11;
            if h < 4 {
                C64::new(h as f64 - 1.5, (i as f64 - j as f64) * 0.1)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn products_match_dense() {
        let d = 9;
        let a = sample(d, 1);
        let x = Array2::from_shape_fn((d, d), |(i, j)| C64::new(i as f64 * 0.3 - 1.0, j as f64 * 0.2));
        let csr = CsrMatrix::from_dense(&a);
        assert!(csr.nnz() < d * d);
        assert_eq!(csr.to_dense(), a);
        let coef = C64::new(0.5, -2.0);

        let mut left = Array2::zeros((d, d));
        csr.left_mul_acc(coef, &x, &mut left);
        let expected = a.dot(&x) * coef;
        assert!((&left - &expected).iter().all(|z| z.norm() < 1e-12));

        let mut right = Array2::zeros((d, d));
        csr.right_mul_acc(coef, &x, &mut right);
        let expected = x.dot(&a) * coef;
        assert!((&right - &expected).iter().all(|z| z.norm() < 1e-12));

        let v = Array1::from_shape_fn(d, |i| C64::new(1.0, i as f64));
        let mut out = Array1::zeros(d);
        csr.mul_vec_acc(coef, &v, &mut out);
        let expected = a.dot(&v) * coef;
        assert!((&out - &expected).iter().all(|z| z.norm() < 1e-12));
    }
}
