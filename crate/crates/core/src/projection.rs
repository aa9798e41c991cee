//! Orthogonal projection of a normalized first-order target onto a span of
//! single-pole impulse responses.
//!
//! All inner products have closed forms: `<s_a, s_b> = 1/(1 - ab)`, so the
//! Gram matrix of a pole set and the cross vector against the target are
//! filled directly, without simulating signals. The projection error of the
//! unit-norm target is `1 - r^T Sigma^-1 r`.
//!
//! The two-pole neighborhood analysis (error and its derivative at the
//! neighborhood midpoint, plus exact and leading-order worst-case bounds) is
//! implemented in closed form as well; it is the ingredient behind the
//! optimal pole-density argument.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lti::Pole;

/// Poles closer than this are treated as duplicates when building a set;
/// exact duplicates would make the Gram matrix singular by construction.
pub const DISTINCTNESS_TOLERANCE: f64 = 1e-12;

/// Relative eigenvalue cutoff for the pseudo-inverse solve. The Gram matrix
/// is Cauchy-like and severely ill-conditioned for large sets, so eigen
/// directions below `1e-12 * lambda_max` are truncated.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// A set of distinct reservoir poles `{beta_1 .. beta_M}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    poles: Vec<Pole>,
}

impl PoleSet {
    /// Builds a set, dropping poles within [`DISTINCTNESS_TOLERANCE`] of an
    /// earlier one. The set must end up non-empty.
    pub fn new(poles: Vec<Pole>) -> Result<Self> {
        let mut kept: Vec<Pole> = Vec::with_capacity(poles.len());
        for p in poles {
            if kept
                .iter()
                .all(|q| (q.value() - p.value()).abs() > DISTINCTNESS_TOLERANCE)
            {
                kept.push(p);
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyPoleSet);
        }
        Ok(PoleSet { poles: kept })
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        // The constructor guarantees at least one pole.
        self.poles.is_empty()
    }
}

/// Inner product of two single-pole impulse responses:
/// `sum_n (ab)^n = 1/(1 - ab)`.
#[inline]
pub fn basis_inner_product(a: Pole, b: Pole) -> f64 {
    1.0 / (1.0 - a.value() * b.value())
}

/// The normal equations of the projection: Gram matrix `Sigma`, cross
/// vector `r` against the normalized target, and the target pole itself.
#[derive(Debug, Clone)]
pub struct GramSystem {
    sigma: DMatrix<f64>,
    r: DVector<f64>,
    target: Pole,
}

impl GramSystem {
    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn r(&self) -> &DVector<f64> {
        &self.r
    }

    pub fn target(&self) -> Pole {
        self.target
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }
}

/// Fills `Sigma[i][j] = 1/(1 - beta_i beta_j)` and
/// `r[i] = sqrt(1 - alpha^2)/(1 - alpha beta_i)`.
///
/// The factor `sqrt(1 - alpha^2)` normalizes the target to unit l2 norm, so
/// the projection error lives on the fixed scale [0, 1].
pub fn build_gram(poles: &PoleSet, target: Pole) -> GramSystem {
    let m = poles.len();
    let b = poles.poles();
    let sigma = DMatrix::from_fn(m, m, |i, j| basis_inner_product(b[i], b[j]));
    let alpha = target.value();
    let norm = (1.0 - alpha * alpha).sqrt();
    let r = DVector::from_fn(m, |i, _| norm / (1.0 - alpha * b[i].value()));
    GramSystem { sigma, r, target }
}

/// Optimal output weights and the residual projection error.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    weights: Vec<f64>,
    error: f64,
    effective_rank: usize,
}

impl ProjectionResult {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Squared distance between the unit-norm target and its projection,
    /// clamped into [0, 1].
    pub fn error(&self) -> f64 {
        self.error
    }

    /// Number of eigen directions kept by the truncated solve.
    pub fn effective_rank(&self) -> usize {
        self.effective_rank
    }

    /// True when truncation discarded at least one direction, i.e. the
    /// normal equations were numerically rank-deficient.
    pub fn is_rank_deficient(&self) -> bool {
        self.effective_rank < self.weights.len()
    }
}

/// Solves `Sigma w = r` by symmetric eigendecomposition with relative
/// truncation at [`RANK_TOLERANCE`] (pseudo-inverse semantics) and returns
/// the weights together with `error = 1 - r^T w` clamped into [0, 1].
pub fn project(gram: &GramSystem) -> ProjectionResult {
    let m = gram.dim();
    let eig = gram.sigma.clone().symmetric_eigen();
    let lambda_max = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()));
    let cutoff = RANK_TOLERANCE * lambda_max;

    let vt_r = eig.eigenvectors.transpose() * &gram.r;
    let mut coeff = DVector::zeros(m);
    let mut rank = 0usize;
    for i in 0..m {
        // Sigma is positive definite in exact arithmetic; directions whose
        // computed eigenvalue falls at or below the cutoff (including any
        // tiny negative ones) carry no trustworthy information.
        if eig.eigenvalues[i] > cutoff {
            coeff[i] = vt_r[i] / eig.eigenvalues[i];
            rank += 1;
        }
    }
    let w = &eig.eigenvectors * coeff;
    let error = (1.0 - gram.r.dot(&w)).clamp(0.0, 1.0);
    ProjectionResult {
        weights: w.iter().copied().collect(),
        error,
        effective_rank: rank,
    }
}

/// Closed-form projection error of target `alpha` onto two distinct poles.
///
/// This is the M = 2 normal-equations solution written out explicitly; it
/// must agree with the generic [`project`] path and is cheap enough to grid
/// over neighborhoods.
pub fn two_pole_error(alpha: Pole, beta1: Pole, beta2: Pole) -> f64 {
    let a = alpha.value();
    let b1 = beta1.value();
    let b2 = beta2.value();
    assert!((b1 - b2).abs() > 0.0, "two-pole error needs distinct poles");
    let pre = (1.0 - a * a) * (1.0 - b1 * b2) / ((b1 - b2) * (b1 - b2));
    let t1 = (1.0 - b1 * b1) * (1.0 - b1 * b2) / ((1.0 - a * b1) * (1.0 - a * b1));
    let t2 = 2.0 * (1.0 - b1 * b1) * (1.0 - b2 * b2) / ((1.0 - a * b1) * (1.0 - a * b2));
    let t3 = (1.0 - b2 * b2) * (1.0 - b1 * b2) / ((1.0 - a * b2) * (1.0 - a * b2));
    1.0 - pre * (t1 - t2 + t3)
}

/// Exact error at the midpoint of a two-pole neighborhood: the target sits
/// at `alpha = beta`, the poles at `beta -/+ delta`:
/// `delta^4 / (1 + beta^4 - beta^2 (2 + delta^2))^2`.
pub fn midpoint_error_exact(beta: f64, delta: f64) -> f64 {
    let d2 = delta * delta;
    let den = 1.0 + beta.powi(4) - beta * beta * (2.0 + d2);
    d2 * d2 / (den * den)
}

/// Exact derivative of the neighborhood error with respect to the target
/// position, evaluated at the midpoint:
/// `4 beta (1 - beta^2 + delta^2) delta^4 / ((1-beta^2)^2 - beta^2 delta^2)^3`.
pub fn midpoint_derivative_exact(beta: f64, delta: f64) -> f64 {
    let b2 = beta * beta;
    let d2 = delta * delta;
    let den = (1.0 - b2) * (1.0 - b2) - b2 * d2;
    4.0 * beta * (1.0 - b2 + d2) * d2 * d2 / (den * den * den)
}

/// Exact-form worst-case error bound over the neighborhood
/// `(beta - delta, beta + delta)`: midpoint error plus `delta` times the
/// magnitude of the midpoint derivative.
pub fn error_bound(beta: f64, delta: f64) -> f64 {
    midpoint_error_exact(beta, delta) + delta * midpoint_derivative_exact(beta, delta).abs()
}

/// Leading-order form of the worst-case bound:
/// `delta^4/(1-beta^2)^4 + 4|beta| delta^5/(1-beta^2)^5`.
pub fn error_bound_leading_order(beta: f64, delta: f64) -> f64 {
    let c = 1.0 - beta * beta;
    let d4 = delta.powi(4);
    d4 / c.powi(4) + 4.0 * beta.abs() * delta * d4 / c.powi(5)
}
