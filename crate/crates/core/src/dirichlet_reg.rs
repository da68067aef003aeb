//! Dirichlet density and moments, the mean/precision parametrization,
//! and maximum-likelihood regression of compositional responses on
//! covariates with Wald inference.
//!
//! The regression models the mean vector through a reference-category
//! softmax of linear predictors (one coefficient row per non-reference
//! category, intercept included) and a single precision parameter on the
//! log scale, constant across observations.

use nalgebra::{DMatrix, DVector};
use statrs::function::erf::erfc;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::rng;

const MODULE: &str = "dirichlet_reg";

/// An interior point of the probability simplex.
#[derive(Clone, Debug)]
pub struct Composition {
    y: Vec<f64>,
}

impl Composition {
    pub fn new(y: Vec<f64>) -> Result<Composition> {
        if y.len() < 2 {
            return Err(Error::invalid(MODULE, "composition needs at least 2 parts"));
        }
        if y.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid(MODULE, "composition parts must be positive"));
        }
        let sum: f64 = y.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                MODULE,
                format!("composition sums to {sum}, expected 1"),
            ));
        }
        Ok(Composition { y })
    }

    pub fn parts(&self) -> &[f64] {
        &self.y
    }
}

/// Dirichlet parameters in the concentration form, with accessors for the
/// mean/precision view.
#[derive(Clone, Debug)]
pub struct DirichletParams {
    alpha: Vec<f64>,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<DirichletParams> {
        if alpha.len() < 2 {
            return Err(Error::invalid(MODULE, "needs at least 2 categories"));
        }
        if alpha.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::invalid(MODULE, "concentrations must be positive"));
        }
        Ok(DirichletParams { alpha })
    }

    /// Builds concentrations from a mean vector and precision: `alpha = phi * mu`.
    pub fn from_mean_precision(mu: &[f64], phi: f64) -> Result<DirichletParams> {
        if !(phi > 0.0) || !phi.is_finite() {
            return Err(Error::invalid(MODULE, format!("precision must be positive, got {phi}")));
        }
        let sum: f64 = mu.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(MODULE, format!("mean sums to {sum}, expected 1")));
        }
        DirichletParams::new(mu.iter().map(|&m| phi * m).collect())
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn k(&self) -> usize {
        self.alpha.len()
    }

    /// Precision: the concentration total.
    pub fn phi(&self) -> f64 {
        self.alpha.iter().sum()
    }

    /// Mean vector `alpha / phi`.
    pub fn mu(&self) -> Vec<f64> {
        let phi = self.phi();
        self.alpha.iter().map(|&a| a / phi).collect()
    }
}

fn ln_multivariate_beta(alpha: &[f64]) -> f64 {
    alpha.iter().map(|&a| ln_gamma(a)).sum::<f64>() - ln_gamma(alpha.iter().sum())
}

/// Log density of the Dirichlet distribution at an interior point.
pub fn dirichlet_log_density(y: &Composition, params: &DirichletParams) -> Result<f64> {
    if y.parts().len() != params.k() {
        return Err(Error::invalid(
            MODULE,
            format!("dimension mismatch: {} vs {}", y.parts().len(), params.k()),
        ));
    }
    let alpha = params.alpha();
    let mut ll = -ln_multivariate_beta(alpha);
    for (yc, &ac) in y.parts().iter().zip(alpha) {
        ll += (ac - 1.0) * yc.ln();
    }
    Ok(ll)
}

/// First two moments of the Dirichlet distribution.
#[derive(Clone, Debug)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub covariance: DMatrix<f64>,
}

pub fn moments(params: &DirichletParams) -> Moments {
    let k = params.k();
    let a0 = params.phi();
    let denom = a0 * a0 * (a0 + 1.0);
    let mean = params.mu();
    let variance: Vec<f64> = params
        .alpha()
        .iter()
        .map(|&a| a * (a0 - a) / denom)
        .collect();
    let mut covariance = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            covariance[(i, j)] = if i == j {
                variance[i]
            } else {
                -params.alpha()[i] * params.alpha()[j] / denom
            };
        }
    }
    Moments {
        mean,
        variance,
        covariance,
    }
}

/// Pulls boundary-touching rows into the simplex interior with
/// `y' = (y * (n - 1) + 1/K) / n`, `n` the number of rows.
pub fn boundary_compress(y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = y.nrows();
    let k = y.ncols();
    if n == 0 || k < 2 {
        return Err(Error::invalid(MODULE, "matrix must be n x K with K >= 2"));
    }
    for i in 0..n {
        let mut sum = 0.0;
        for j in 0..k {
            let v = y[(i, j)];
            if v < 0.0 || !v.is_finite() {
                return Err(Error::invalid(MODULE, format!("negative entry in row {i}")));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(MODULE, format!("row {i} sums to {sum}, expected 1")));
        }
    }
    let nf = n as f64;
    let uniform = 1.0 / k as f64;
    Ok(DMatrix::from_fn(n, k, |i, j| {
        (y[(i, j)] * (nf - 1.0) + uniform) / nf
    }))
}

/// Independent Dirichlet draws as rows of an `n x K` matrix: normalized
/// Gamma variates, deterministic per seed.
pub fn sample(params: &DirichletParams, n: usize, seed: u64) -> DMatrix<f64> {
    let k = params.k();
    let mut rng = rng::chacha(seed);
    let mut out = DMatrix::zeros(n, k);
    for i in 0..n {
        let mut row: Vec<f64> = params
            .alpha()
            .iter()
            .map(|&a| rng::gamma(&mut rng, a))
            .collect();
        let total: f64 = row.iter().sum();
        if total <= 0.0 {
            // all-zero row is a measure-zero event; fall back to the mean
            row = params.mu();
        } else {
            for v in row.iter_mut() {
                *v /= total;
            }
        }
        for (j, v) in row.iter().enumerate() {
            out[(i, j)] = *v;
        }
    }
    out
}

/// Wald statistics for a fitted regression, available when the observed
/// information matrix could be inverted.
#[derive(Clone, Debug)]
pub struct WaldStats {
    pub se_beta: DMatrix<f64>,
    pub z_beta: DMatrix<f64>,
    pub p_beta: DMatrix<f64>,
    pub se_log_phi: f64,
    pub z_log_phi: f64,
    pub p_log_phi: f64,
}

/// A fitted Dirichlet regression.
#[derive(Clone, Debug)]
pub struct DirichletFit {
    pub n_categories: usize,
    pub n_covariates: usize,
    pub ref_category: usize,
    /// Coefficients for the non-reference categories in ascending category
    /// order, one row per category, intercept in column 0.
    pub beta: DMatrix<f64>,
    pub log_phi: f64,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    pub wald: Option<WaldStats>,
}

impl DirichletFit {
    /// Categories carrying coefficient rows, ascending, reference excluded.
    pub fn free_categories(&self) -> Vec<usize> {
        (0..self.n_categories)
            .filter(|&c| c != self.ref_category)
            .collect()
    }
}

/// Two-sided p-value of a standard normal z statistic.
pub fn wald_p_value(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// Significance code at the 0.1 / 0.05 / 0.01 / 0.001 bands.
pub fn significance_code(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else if p < 0.1 {
        "."
    } else {
        ""
    }
}

struct Model<'a> {
    y_ln: DMatrix<f64>,
    design: &'a DMatrix<f64>,
    k: usize,
    free: Vec<usize>,
}

impl Model<'_> {
    fn n_params(&self) -> usize {
        (self.k - 1) * self.design.ncols() + 1
    }

    /// Mean vectors for every observation at the given parameters.
    fn means(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        let n = self.design.nrows();
        let p = self.design.ncols();
        let mut mu = DMatrix::zeros(n, self.k);
        for i in 0..n {
            let mut eta = vec![0.0; self.k];
            for (row, &c) in self.free.iter().enumerate() {
                let mut acc = 0.0;
                for j in 0..p {
                    acc += self.design[(i, j)] * theta[row * p + j];
                }
                eta[c] = acc;
            }
            let max = eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut denom = 0.0;
            for e in eta.iter_mut() {
                *e = (*e - max).exp();
                denom += *e;
            }
            for c in 0..self.k {
                mu[(i, c)] = eta[c] / denom;
            }
        }
        mu
    }

    fn log_likelihood(&self, theta: &DVector<f64>) -> f64 {
        let mu = self.means(theta);
        let phi = theta[self.n_params() - 1].exp();
        let n = self.design.nrows();
        let mut ll = 0.0;
        for i in 0..n {
            ll += ln_gamma(phi);
            for c in 0..self.k {
                let a = phi * mu[(i, c)];
                ll += -ln_gamma(a) + (a - 1.0) * self.y_ln[(i, c)];
            }
        }
        ll
    }

    fn gradient(&self, theta: &DVector<f64>) -> DVector<f64> {
        let mu = self.means(theta);
        let p = self.design.ncols();
        let np = self.n_params();
        let phi = theta[np - 1].exp();
        let n = self.design.nrows();
        let mut grad = DVector::zeros(np);
        let dig_phi = digamma(phi);
        for i in 0..n {
            // t_c = log y_c - psi(phi mu_c); the softmax Jacobian turns the
            // per-category score into the linear-predictor score.
            let mut t = vec![0.0; self.k];
            let mut t_dot_mu = 0.0;
            for c in 0..self.k {
                t[c] = self.y_ln[(i, c)] - digamma(phi * mu[(i, c)]);
                t_dot_mu += mu[(i, c)] * t[c];
            }
            for (row, &c) in self.free.iter().enumerate() {
                let g_eta = phi * mu[(i, c)] * (t[c] - t_dot_mu);
                for j in 0..p {
                    grad[row * p + j] += g_eta * self.design[(i, j)];
                }
            }
            grad[np - 1] += phi * (dig_phi + t_dot_mu);
        }
        grad
    }
}

/// Maximum-likelihood Dirichlet regression with a reference-category
/// softmax mean link and constant log-scale precision.
///
/// `y` holds interior compositions row-wise (`boundary_compress` first if
/// memberships may touch 0 or 1); `x` holds raw covariates without the
/// intercept column. Standard errors come from the finite-difference
/// observed information at the optimum; a singular information matrix
/// leaves `wald` unset.
pub fn fit(y: &DMatrix<f64>, x: &DMatrix<f64>, ref_category: usize) -> Result<DirichletFit> {
    let n = y.nrows();
    let k = y.ncols();
    let q = x.ncols();
    if k < 2 {
        return Err(Error::invalid(MODULE, "need at least 2 response categories"));
    }
    if ref_category >= k {
        return Err(Error::invalid(
            MODULE,
            format!("reference category {ref_category} out of range for K={k}"),
        ));
    }
    if x.nrows() != n {
        return Err(Error::invalid(
            MODULE,
            format!("covariate rows {} do not match responses {}", x.nrows(), n),
        ));
    }
    if n <= (k - 1) * (q + 1) + 1 {
        return Err(Error::invalid(
            MODULE,
            format!(
                "{n} observations cannot identify {} parameters",
                (k - 1) * (q + 1) + 1
            ),
        ));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(MODULE, "non-finite covariate"));
    }
    for i in 0..n {
        let mut sum = 0.0;
        for c in 0..k {
            let v = y[(i, c)];
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::invalid(
                    MODULE,
                    format!("response row {i} is not interior; apply boundary compression"),
                ));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(MODULE, format!("response row {i} sums to {sum}")));
        }
    }

    let design = {
        let mut d = DMatrix::zeros(n, q + 1);
        for i in 0..n {
            d[(i, 0)] = 1.0;
            for j in 0..q {
                d[(i, j + 1)] = x[(i, j)];
            }
        }
        d
    };
    let y_ln = y.map(f64::ln);
    let free: Vec<usize> = (0..k).filter(|&c| c != ref_category).collect();
    let model = Model {
        y_ln,
        design: &design,
        k,
        free,
    };

    let np = model.n_params();
    let mut theta = DVector::zeros(np);
    theta[np - 1] = (k as f64).ln();

    const MAX_ITER: usize = 500;
    const GRAD_TOL: f64 = 1e-6;
    // Optimize the per-observation mean log-likelihood so the gradient
    // tolerance is scale-free and the surface stays resolvable in f64.
    let scale = 1.0 / n as f64;
    let mut h_inv = DMatrix::<f64>::identity(np, np);
    let mut ll = model.log_likelihood(&theta) * scale;
    let mut grad = model.gradient(&theta) * scale;
    let mut converged = false;
    let mut iterations = 0;
    let mut exhausted = true;

    for iter in 0..MAX_ITER {
        iterations = iter;
        if grad.amax() < GRAD_TOL {
            converged = true;
            exhausted = false;
            break;
        }
        let mut dir = &h_inv * &grad;
        if dir.dot(&grad) <= 0.0 {
            h_inv = DMatrix::identity(np, np);
            dir = grad.clone();
        }
        // Backtracking line search on the ascent direction; progress must
        // be strict or the surface is exhausted at this resolution.
        let slope = grad.dot(&dir);
        let mut step = 1.0;
        let mut next = None;
        while step >= 1e-14 {
            let cand = &theta + &dir * step;
            let cand_ll = model.log_likelihood(&cand) * scale;
            if cand_ll.is_finite() && cand_ll > ll && cand_ll >= ll + 1e-4 * step * slope {
                next = Some((cand, cand_ll));
                break;
            }
            step *= 0.5;
        }
        let Some((new_theta, new_ll)) = next else {
            exhausted = false;
            break;
        };
        let new_grad = model.gradient(&new_theta) * scale;
        let s = &new_theta - &theta;
        let yv = &new_grad - &grad;
        let sy = s.dot(&yv);
        // BFGS update on the inverse Hessian of the negated objective,
        // written in ascent quantities (curvature condition s'y < 0,
        // rho = 1/s'y < 0).
        if sy < -1e-12 {
            let rho = 1.0 / sy;
            let hy = &h_inv * &yv;
            let yhy = yv.dot(&hy);
            h_inv = &h_inv - (&hy * s.transpose() + &s * hy.transpose()) * rho
                + &s * s.transpose() * (rho * rho * yhy - rho);
        }
        theta = new_theta;
        ll = new_ll;
        grad = new_grad;
    }
    let ll = ll / scale;

    if exhausted && !converged {
        return Err(Error::fit_failed(
            MODULE,
            format!(
                "no convergence in {MAX_ITER} iterations (mean gradient norm {:.3e})",
                grad.amax()
            ),
        ));
    }

    let p = q + 1;
    let mut beta = DMatrix::zeros(k - 1, p);
    for row in 0..k - 1 {
        for j in 0..p {
            beta[(row, j)] = theta[row * p + j];
        }
    }
    let log_phi = theta[np - 1];

    let wald = observed_information(&model, &theta).and_then(|info| {
        info.try_inverse().and_then(|cov| {
            let mut se_beta = DMatrix::zeros(k - 1, p);
            let mut z_beta = DMatrix::zeros(k - 1, p);
            let mut p_beta = DMatrix::zeros(k - 1, p);
            for row in 0..k - 1 {
                for j in 0..p {
                    let idx = row * p + j;
                    let var = cov[(idx, idx)];
                    if var <= 0.0 || !var.is_finite() {
                        return None;
                    }
                    let se = var.sqrt();
                    let z = beta[(row, j)] / se;
                    se_beta[(row, j)] = se;
                    z_beta[(row, j)] = z;
                    p_beta[(row, j)] = wald_p_value(z);
                }
            }
            let var_phi = cov[(np - 1, np - 1)];
            if var_phi <= 0.0 || !var_phi.is_finite() {
                return None;
            }
            let se_log_phi = var_phi.sqrt();
            let z_log_phi = log_phi / se_log_phi;
            Some(WaldStats {
                se_beta,
                z_beta,
                p_beta,
                se_log_phi,
                z_log_phi,
                p_log_phi: wald_p_value(z_log_phi),
            })
        })
    });

    Ok(DirichletFit {
        n_categories: k,
        n_covariates: q,
        ref_category,
        beta,
        log_phi,
        loglik: ll,
        converged,
        iterations,
        wald,
    })
}

/// Negative Hessian of the log-likelihood by central differences of the
/// analytic gradient.
fn observed_information(model: &Model<'_>, theta: &DVector<f64>) -> Option<DMatrix<f64>> {
    let np = theta.len();
    let mut hess = DMatrix::zeros(np, np);
    for j in 0..np {
        let h = 1e-5 * theta[j].abs().max(1.0);
        let mut up = theta.clone();
        up[j] += h;
        let mut down = theta.clone();
        down[j] -= h;
        let gu = model.gradient(&up);
        let gd = model.gradient(&down);
        for i in 0..np {
            hess[(i, j)] = (gu[i] - gd[i]) / (2.0 * h);
        }
    }
    // Symmetrize and negate: observed information.
    let info = (&hess + hess.transpose()) * -0.5;
    if info.iter().all(|v| v.is_finite()) {
        Some(info)
    } else {
        None
    }
}

/// Mean composition predicted at a covariate vector.
pub fn predict(fit: &DirichletFit, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != fit.n_covariates {
        return Err(Error::invalid(
            MODULE,
            format!("expected {} covariates, got {}", fit.n_covariates, x.len()),
        ));
    }
    let p = fit.n_covariates + 1;
    let mut eta = vec![0.0; fit.n_categories];
    for (row, c) in fit.free_categories().into_iter().enumerate() {
        let mut acc = fit.beta[(row, 0)];
        for j in 0..fit.n_covariates {
            acc += fit.beta[(row, j + 1)] * x[j];
        }
        debug_assert!(p == fit.beta.ncols());
        eta[c] = acc;
    }
    let max = eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut denom = 0.0;
    for e in eta.iter_mut() {
        *e = (*e - max).exp();
        denom += *e;
    }
    Ok(eta.into_iter().map(|e| e / denom).collect())
}
