//! Ready-made problems: an evaluatable exponent, its local data, and the
//! route an oracle should take to get the true integral.

mod dixon;
mod selector;
mod separable;

pub use dixon::{
    dixon2_transformed, dixon_c, dixon_delta, dixon_exponent, dixon_k1_closed_form,
    dixon_leading, dixon_max_eta, dixon_sum_exact, dixon2_published_constants, DixonSpec,
    DIXON2_DEFAULT_R,
};
pub use selector::parse_selector;
pub use separable::{separable_cubic, separable_cubic_with_r, separable_exponent};

use crate::bounds::GData;
use crate::error::{invalid, Result};
use crate::local_model::{LocalExpansion, SymMatrix, ThirdTensor};
use crate::oracle;
use serde::Serialize;

/// The exponent `f`, normalized so that `f(0) = 0` is the global minimum.
#[derive(Debug, Clone, PartialEq)]
pub enum Exponent {
    /// `Σ t_i² + t_i³ + |t_i|^{3+γ}`.
    SeparableCubic { gamma: f64 },
    /// Dixon exponent in the shifted angle variables, `d` of them.
    Dixon { d: usize },
    /// The two-variable Dixon exponent after the orthogonal change of
    /// variables that makes its Hessian `2I`.
    Dixon2Transformed,
    /// `½ tᵀHt`.
    Quadratic(SymMatrix),
}

impl Exponent {
    /// `+∞` where the exponent is undefined.
    pub fn eval(&self, t: &[f64]) -> f64 {
        match self {
            Exponent::SeparableCubic { gamma } => t.iter().map(|&x| separable_exponent(x, *gamma)).sum(),
            Exponent::Dixon { d } => dixon::dixon_f(*d, t),
            Exponent::Dixon2Transformed => dixon::dixon2_f(t),
            Exponent::Quadratic(h) => 0.5 * h.quad_form(t),
        }
    }
}

/// Open half-space `normal · t < offset`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Whole,
    /// Intersection of open half-spaces, with a box that encloses it.
    Polyhedron {
        halfspaces: Vec<HalfSpace>,
        bbox_lo: Vec<f64>,
        bbox_hi: Vec<f64>,
    },
}

impl Domain {
    pub fn contains(&self, t: &[f64]) -> bool {
        match self {
            Domain::Whole => true,
            Domain::Polyhedron { halfspaces, .. } => halfspaces.iter().all(|h| {
                let dot: f64 = h.normal.iter().zip(t).map(|(a, b)| a * b).sum();
                dot < h.offset
            }),
        }
    }

    pub fn bounding_box(&self) -> Option<(&[f64], &[f64])> {
        match self {
            Domain::Whole => None,
            Domain::Polyhedron { bbox_lo, bbox_hi, .. } => Some((bbox_lo, bbox_hi)),
        }
    }
}

/// Closed-form oracles for integer `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactHook {
    /// `I(n) = S(d+1, n) π^d / (2 · (2 cos α̂)^{2n(d+1)})`.
    DixonSum { d: usize },
    /// `I(n) = S(3, n) π² / 3^{3n+1/2}`.
    Dixon2Sum,
}

impl ExactHook {
    /// `ln I(n)` computed from the exact alternating sum.
    pub fn ln_integral(&self, n: u32) -> Result<f64> {
        let (s, ln_factor) = match *self {
            ExactHook::DixonSum { d } => {
                let a = dixon::alpha_hat(d);
                let m = 2.0 * n as f64 * (d as f64 + 1.0);
                let ln = d as f64 * std::f64::consts::PI.ln()
                    - std::f64::consts::LN_2
                    - m * (2.0 * a.cos()).ln();
                (d as u32 + 1, ln)
            }
            ExactHook::Dixon2Sum => {
                let ln = 2.0 * std::f64::consts::PI.ln() - (3.0 * n as f64 + 0.5) * 3f64.ln();
                (3, ln)
            }
        };
        let sum = dixon_sum_exact(s, n);
        let ln_s = oracle::ln_bigint(&sum)
            .ok_or_else(|| invalid("n", format!("S({s}, {n}) is not positive")))?;
        Ok(ln_s + ln_factor)
    }
}

/// A non-constant amplitude `g` for integrals `∫ exp(-s·n·f) g`.
#[derive(Debug, Clone, PartialEq)]
pub enum AmplitudeKind {
    Constant(f64),
    Affine { g0: f64, grad: Vec<f64> },
}

impl AmplitudeKind {
    pub fn eval(&self, t: &[f64]) -> f64 {
        match self {
            AmplitudeKind::Constant(c) => *c,
            AmplitudeKind::Affine { g0, grad } => g0 + grad.iter().zip(t).map(|(a, b)| a * b).sum::<f64>(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Amplitude {
    pub kind: AmplitudeKind,
    pub data: GData,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub name: String,
    pub local: LocalExpansion,
    /// `None` for problems given only by their local data.
    pub exponent: Option<Exponent>,
    pub domain: Domain,
    pub amplitude: Option<Amplitude>,
    pub exact: Option<ExactHook>,
}

impl Problem {
    /// A problem known only through its local data. Bounds work, oracles
    /// do not.
    pub fn from_local(name: impl Into<String>, local: LocalExpansion) -> Result<Self> {
        local.validate()?;
        Ok(Self {
            name: name.into(),
            local,
            exponent: None,
            domain: Domain::Whole,
            amplitude: None,
            exact: None,
        })
    }

    /// Pure Gaussian `exp(-s·n·½tᵀHt)`. `E(n)` is identically zero.
    pub fn gaussian(hessian: SymMatrix, scale: f64) -> Result<Self> {
        let d = hessian.dim();
        let lambda = hessian.min_eigenvalue();
        let det = hessian.determinant()?;
        let r = 1.0;
        let i_n1 = (2.0 * std::f64::consts::PI / scale).powf(d as f64 / 2.0) / det.sqrt();
        let local = LocalExpansion::new(
            hessian.clone(),
            ThirdTensor::zeros(d),
            // any positive C works, the remainder is zero
            1e-300,
            2.0,
            r,
            r,
            0.5 * lambda * r * r,
            1.0,
            i_n1,
        )?
        .with_scale(scale)?;
        Ok(Self {
            name: format!("gaussian:d={d}"),
            local,
            exponent: Some(Exponent::Quadratic(hessian)),
            domain: Domain::Whole,
            amplitude: None,
            exact: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.local.dim()
    }

    pub fn exponent_scale(&self) -> f64 {
        self.local.scale
    }

    /// `f(t)`, or `+∞` outside the domain. `NaN` if the problem has no
    /// evaluator.
    pub fn f_eval(&self, t: &[f64]) -> f64 {
        match &self.exponent {
            None => f64::NAN,
            Some(_) if !self.domain.contains(t) => f64::INFINITY,
            Some(e) => e.eval(t),
        }
    }

    pub fn g_eval(&self, t: &[f64]) -> Option<f64> {
        self.amplitude.as_ref().map(|a| a.kind.eval(t))
    }

    /// Attaches `g ≡ g0`.
    pub fn with_constant_amplitude(mut self, g0: f64) -> Result<Self> {
        let d = self.dim();
        let data = GData {
            g0,
            grad_g0: vec![0.0; d],
            m: 0.0,
            n3: self.local.n1,
            jabs_n3: g0.abs() * self.local.i_n1,
            nonnegative: g0 > 0.0,
        };
        data.validate(d)?;
        self.amplitude = Some(Amplitude {
            kind: AmplitudeKind::Constant(g0),
            data,
        });
        Ok(self)
    }

    /// Attaches `g(t) = g0 + grad·t`. `∫ exp(-s·n1·f)|g|` comes from the
    /// quadrature oracle, so the problem needs an evaluator and d ≤ 3.
    pub fn with_affine_amplitude(mut self, g0: f64, grad: Vec<f64>) -> Result<Self> {
        let d = self.dim();
        let kind = AmplitudeKind::Affine { g0, grad: grad.clone() };
        let probe = kind.clone();
        let jabs = oracle::integrate_weighted(
            &self,
            self.local.n1,
            &move |t: &[f64]| probe.eval(t).abs(),
            &oracle::QuadratureSpec::default(),
        )?;
        let data = GData {
            g0,
            grad_g0: grad,
            m: 0.0,
            n3: self.local.n1,
            jabs_n3: jabs,
            nonnegative: false,
        };
        data.validate(d)?;
        self.amplitude = Some(Amplitude { kind, data });
        Ok(self)
    }
}
