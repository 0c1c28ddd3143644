//! Local data of the exponent at its minimizer, plus the small dense
//! linear algebra every bound needs.
//!
//! Dimensions here are small (a handful of coordinates), so everything is
//! stored as flat row-major `Vec<f64>` and computed with textbook
//! algorithms: Cholesky for the determinant and the whitening factor,
//! cyclic Jacobi for the smallest eigenvalue.

use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

const SYMMETRY_TOL: f64 = 1e-12;
const TENSOR_SYMMETRY_TOL: f64 = 1e-10;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    d: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn new(d: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: data.len(),
            });
        }
        Ok(Self { d, data })
    }

    pub fn identity(d: usize) -> Self {
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            data[i * d + i] = 1.0;
        }
        Self { d, data }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `A · v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.d)
            .map(|i| (0..self.d).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `Aᵀ A`.
    pub fn gram(&self) -> Vec<f64> {
        let d = self.d;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = (0..d).map(|k| self.get(k, i) * self.get(k, j)).sum();
            }
        }
        out
    }

    /// Solves `A x = b` for upper-triangular `A` by back substitution.
    pub fn solve_upper(&self, b: &[f64]) -> Vec<f64> {
        let d = self.d;
        let mut x = vec![0.0; d];
        for i in (0..d).rev() {
            let s: f64 = ((i + 1)..d).map(|k| self.get(i, k) * x[k]).sum();
            x[i] = (b[i] - s) / self.get(i, i);
        }
        x
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Real symmetric `d × d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(SquareMatrix);

impl SymMatrix {
    /// Accepts row-major entries; rejects asymmetry above 1e-12 relative
    /// to the largest entry and stores the exact symmetric part.
    pub fn new(d: usize, data: Vec<f64>) -> Result<Self> {
        let mut m = SquareMatrix::new(d, data)?;
        if d == 0 {
            return Err(invalid("d", "dimension must be positive"));
        }
        if m.data.iter().any(|v| !v.is_finite()) {
            return Err(invalid("hessian", "entries must be finite"));
        }
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..d {
            for j in (i + 1)..d {
                let gap = (m.get(i, j) - m.get(j, i)).abs();
                if gap > SYMMETRY_TOL * scale {
                    return Err(Error::NotSymmetric { i, j, gap });
                }
                let avg = 0.5 * (m.get(i, j) + m.get(j, i));
                m.data[i * d + j] = avg;
                m.data[j * d + i] = avg;
            }
        }
        Ok(Self(m))
    }

    pub fn identity(d: usize) -> Self {
        Self(SquareMatrix::identity(d))
    }

    pub fn diag(values: &[f64]) -> Self {
        let d = values.len();
        let mut m = SquareMatrix::identity(d);
        for (i, v) in values.iter().enumerate() {
            m.data[i * d + i] = *v;
        }
        Self(m)
    }

    /// Builds the matrix from a function of the index pair; only the
    /// upper triangle is sampled.
    pub fn from_fn(d: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let v = f(i, j);
                data[i * d + j] = v;
                data[j * d + i] = v;
            }
        }
        Self(SquareMatrix { d, data })
    }

    pub fn dim(&self) -> usize {
        self.0.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_square(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.0.clone();
        m.data.iter_mut().for_each(|v| *v *= s);
        Self(m)
    }

    /// `tᵀ H t`.
    pub fn quad_form(&self, t: &[f64]) -> f64 {
        let ht = self.0.mul_vec(t);
        t.iter().zip(ht).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn cholesky_upper(&self) -> Result<SquareMatrix> {
        cholesky_upper(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self)
    }

    pub fn determinant(&self) -> Result<f64> {
        determinant(self)
    }
}

/// Upper-triangular `U` with positive diagonal such that `H = Uᵀ U`.
pub fn cholesky_upper(h: &SymMatrix) -> Result<SquareMatrix> {
    let d = h.dim();
    let mut u = vec![0.0; d * d];
    for i in 0..d {
        let s: f64 = (0..i).map(|k| u[k * d + i] * u[k * d + i]).sum();
        let pivot = h.get(i, i) - s;
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { row: i, pivot });
        }
        let uii = pivot.sqrt();
        u[i * d + i] = uii;
        for j in (i + 1)..d {
            let s: f64 = (0..i).map(|k| u[k * d + i] * u[k * d + j]).sum();
            u[i * d + j] = (h.get(i, j) - s) / uii;
        }
    }
    SquareMatrix::new(d, u)
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
/// in ascending order.
pub fn symmetric_eigenvalues(h: &SymMatrix) -> Vec<f64> {
    let d = h.dim();
    let mut a = h.as_slice().to_vec();
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = 1e-14 * norm;

    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * d + j] * a[i * d + j])
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..d).map(|i| a[i * d + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

pub fn min_eigenvalue(h: &SymMatrix) -> f64 {
    symmetric_eigenvalues(h)[0]
}

/// det H as the product of the squared Cholesky pivots.
pub fn determinant(h: &SymMatrix) -> Result<f64> {
    let u = cholesky_upper(h)?;
    Ok((0..h.dim()).map(|i| u.get(i, i) * u.get(i, i)).product())
}

/// Fully symmetric `d × d × d` array of third partial derivatives,
/// stored i-major (`i·d² + j·d + k`).
#[derive(Debug, Clone, PartialEq)]
pub struct ThirdTensor {
    d: usize,
    data: Vec<f64>,
}

impl ThirdTensor {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            data: vec![0.0; d * d * d],
        }
    }

    /// Validates symmetry (1e-10 relative to the largest entry) and then
    /// stores the average over all index permutations.
    pub fn new(d: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != d * d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d * d,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(invalid("third_tensor", "entries must be finite"));
        }
        let sym = Self::symmetrized(d, &data);
        let scale = data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let worst = data
            .iter()
            .zip(&sym.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        if scale > 0.0 && worst > TENSOR_SYMMETRY_TOL * scale {
            return Err(Error::AsymmetricTensor(worst / scale));
        }
        Ok(sym)
    }

    /// Symmetrizes arbitrary input by averaging the six index permutations.
    pub fn symmetrized(d: usize, data: &[f64]) -> Self {
        let at = |i: usize, j: usize, k: usize| data[(i * d + j) * d + k];
        let mut out = vec![0.0; d * d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    out[(i * d + j) * d + k] = (at(i, j, k)
                        + at(i, k, j)
                        + at(j, i, k)
                        + at(j, k, i)
                        + at(k, i, j)
                        + at(k, j, i))
                        / 6.0;
                }
            }
        }
        Self { d, data: out }
    }

    /// Builds the tensor from a function that must already be symmetric.
    pub fn from_fn(d: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; d * d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    data[(i * d + j) * d + k] = f(i, j, k);
                }
            }
        }
        Self::symmetrized(d, &data)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.d + j) * self.d + k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Third total derivative `d³f(0, t) = Σ T_ijk t_i t_j t_k`.
    pub fn d3f(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: t.len(),
            });
        }
        Ok(self.d3f_unchecked(t))
    }

    pub(crate) fn d3f_unchecked(&self, t: &[f64]) -> f64 {
        let d = self.d;
        let mut sum = 0.0;
        for i in 0..d {
            for j in 0..d {
                let tij = t[i] * t[j];
                let row = &self.data[(i * d + j) * d..(i * d + j + 1) * d];
                sum += tij * row.iter().zip(t).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        sum
    }

    /// `D = (d^{3/2} / 6) · max |T_ijk|`, the constant with
    /// `|d³f(0,t) / 6| ≤ D ‖t‖³`.
    pub fn d_constant(&self) -> f64 {
        (self.d as f64).powf(1.5) / 6.0 * self.max_abs()
    }
}

/// Free-function form of [`ThirdTensor::d3f`].
pub fn d3f_eval(t3: &ThirdTensor, t: &[f64]) -> Result<f64> {
    t3.d3f(t)
}

/// Free-function form of [`ThirdTensor::d_constant`].
pub fn d_constant(t3: &ThirdTensor) -> f64 {
    t3.d_constant()
}

/// Everything the bounds need to know about the exponent `f` near its
/// minimizer `0` (with `f(0) = 0`).
///
/// `scale` is the fixed multiplier `s` in integrals of the form
/// `∫ exp(-s·n·f)`; `n1` and `i_n1` are expressed in that same `n`, so
/// `i_n1` is (a bound on) `∫ exp(-s·n1·f)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LocalExpansionJson", into = "LocalExpansionJson")]
pub struct LocalExpansion {
    pub hessian: SymMatrix,
    pub third: ThirdTensor,
    /// Hölder remainder constant.
    pub c: f64,
    /// Hölder exponent, in (1, 2].
    pub alpha: f64,
    /// Radius of the Hölder bound.
    pub r: f64,
    /// Convexity radius.
    pub delta: f64,
    /// Exterior gap: `f ≥ big_delta` outside `B_{min(δ, r)}`.
    pub big_delta: f64,
    pub n1: f64,
    /// Value of, or upper bound on, `I(n1)`.
    pub i_n1: f64,
    pub scale: f64,
}

impl LocalExpansion {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        hessian: SymMatrix,
        third: ThirdTensor,
        c: f64,
        alpha: f64,
        r: f64,
        delta: f64,
        big_delta: f64,
        n1: f64,
        i_n1: f64,
    ) -> Result<Self> {
        let local = Self {
            hessian,
            third,
            c,
            alpha,
            r,
            delta,
            big_delta,
            n1,
            i_n1,
            scale: 1.0,
        };
        local.validate()?;
        Ok(local)
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        self.scale = scale;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.hessian.dim()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.hessian.dim();
        if d < 2 {
            return Err(invalid("d", format!("dimension must be at least 2, got {d}")));
        }
        if self.third.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.third.dim(),
            });
        }
        self.hessian.cholesky_upper()?;
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(invalid("alpha", format!("must lie in (1, 2], got {}", self.alpha)));
        }
        for (name, v) in [
            ("C", self.c),
            ("r", self.r),
            ("delta", self.delta),
            ("Delta", self.big_delta),
            ("n1", self.n1),
            ("I_n1", self.i_n1),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.scale >= 1.0 && self.scale.is_finite()) {
            return Err(invalid("scale", format!("must be at least 1, got {}", self.scale)));
        }
        Ok(())
    }

    pub fn lambda_min(&self) -> f64 {
        self.hessian.min_eigenvalue()
    }

    pub fn det_hessian(&self) -> f64 {
        // validated positive definite at construction
        self.hessian.determinant().unwrap_or(f64::NAN)
    }

    pub fn d_constant(&self) -> f64 {
        self.third.d_constant()
    }

    /// Second-plus-third order model `½ tᵀHt + d³f(0,t)/6`.
    pub fn cubic_model(&self, t: &[f64]) -> f64 {
        0.5 * self.hessian.quad_form(t) + self.third.d3f_unchecked(t) / 6.0
    }

    pub fn from_json_str(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("LocalExpansion always serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct LocalExpansionJson {
    d: usize,
    hessian: Vec<f64>,
    third_tensor: Vec<f64>,
    C: f64,
    alpha: f64,
    r: f64,
    delta: f64,
    Delta: f64,
    n1: f64,
    I_n1: f64,
    #[serde(default = "unit_scale")]
    scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl TryFrom<LocalExpansionJson> for LocalExpansion {
    type Error = Error;

    fn try_from(j: LocalExpansionJson) -> Result<Self> {
        let hessian = SymMatrix::new(j.d, j.hessian)?;
        let third = ThirdTensor::new(j.d, j.third_tensor)?;
        LocalExpansion::new(hessian, third, j.C, j.alpha, j.r, j.delta, j.Delta, j.n1, j.I_n1)?
            .with_scale(j.scale)
    }
}

impl From<LocalExpansion> for LocalExpansionJson {
    fn from(l: LocalExpansion) -> Self {
        Self {
            d: l.dim(),
            hessian: l.hessian.as_slice().to_vec(),
            third_tensor: l.third.as_slice().to_vec(),
            C: l.c,
            alpha: l.alpha,
            r: l.r,
            delta: l.delta,
            Delta: l.big_delta,
            n1: l.n1,
            I_n1: l.i_n1,
            scale: l.scale,
        }
    }
}
