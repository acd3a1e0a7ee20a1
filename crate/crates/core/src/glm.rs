//! Regression kernel: maximum-likelihood logistic (and probit) regression via
//! iteratively reweighted least squares, ordinary least squares, and the
//! one-dimensional offset fluctuation used by the targeting step.
//!
//! All fits accept a fixed offset. Near-separated logistic fits are kept
//! finite by capping coefficients on the link scale and flagging the fit
//! instead of erroring: collaborative searches routinely fit propensity
//! models on near-instrument covariates and must not abort.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{conv, expit, logit, Scalar};
use crate::special::{normal_cdf, normal_pdf};
use crate::tabular::{Dataset, OutcomeFamily};

/// Absolute cap on coefficients of binary-response fits (link scale).
pub const COEFFICIENT_CAP: f64 = 20.0;

/// Default bound used to clamp predicted propensities into
/// [bound, 1 - bound] before any inverse weighting.
pub const DEFAULT_G_BOUND: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Logistic,
    Probit,
    Linear,
}

/// Named covariate selection for a regression design.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub column_names: Vec<String>,
    pub include_intercept: bool,
}

impl DesignSpec {
    pub fn main_terms(column_names: Vec<String>) -> Self {
        DesignSpec { column_names, include_intercept: true }
    }
}

/// Column-view design matrix. Columns are borrowed slices; the intercept is
/// implicit so callers never materialize a ones column.
#[derive(Debug, Clone)]
pub struct Design<'a, S> {
    pub names: Vec<String>,
    pub cols: Vec<&'a [S]>,
    pub intercept: bool,
    pub n: usize,
}

impl<'a, S: Scalar> Design<'a, S> {
    pub fn new(names: Vec<String>, cols: Vec<&'a [S]>, intercept: bool, n: usize) -> Result<Self> {
        if names.len() != cols.len() {
            return Err(Error::domain("design name/column count mismatch"));
        }
        for (name, col) in names.iter().zip(&cols) {
            if col.len() != n {
                return Err(Error::domain(format!("design column `{name}` has wrong length")));
            }
        }
        if !intercept && cols.is_empty() {
            return Err(Error::domain("empty design"));
        }
        Ok(Design { names, cols, intercept, n })
    }

    /// Intercept-only design.
    pub fn intercept_only(n: usize) -> Self {
        Design { names: Vec::new(), cols: Vec::new(), intercept: true, n }
    }

    /// Design over dataset covariates selected by a [`DesignSpec`].
    pub fn from_dataset(d: &'a Dataset<S>, spec: &DesignSpec) -> Result<Self> {
        let mut cols = Vec::with_capacity(spec.column_names.len());
        for name in &spec.column_names {
            let col = d
                .column_values(name)
                .ok_or_else(|| Error::domain(format!("design column `{name}` not in dataset")))?;
            cols.push(col);
        }
        Design::new(spec.column_names.clone(), cols, spec.include_intercept, d.n())
    }

    pub fn width(&self) -> usize {
        self.cols.len() + usize::from(self.intercept)
    }

    fn coef_name(&self, j: usize) -> &str {
        if self.intercept {
            if j == 0 {
                "(intercept)"
            } else {
                &self.names[j - 1]
            }
        } else {
            &self.names[j]
        }
    }

    /// Value of design coefficient column `j` at row `i`.
    #[inline]
    fn x(&self, i: usize, j: usize) -> S {
        if self.intercept {
            if j == 0 {
                S::one()
            } else {
                self.cols[j - 1][i]
            }
        } else {
            self.cols[j][i]
        }
    }
}

/// How to react to linearly dependent design columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankPolicy {
    /// Fail with [`Error::RankDeficient`] naming the first dependent column.
    Error,
    /// Drop dependent columns (coefficient pinned to zero) and record them.
    DropAliased,
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Relative deviance-change tolerance.
    pub deviance_tol: f64,
    /// Max-abs score tolerance required to declare convergence.
    pub score_tol: f64,
    pub rank_policy: RankPolicy,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 100,
            deviance_tol: 1e-8,
            score_tol: 1e-6,
            rank_policy: RankPolicy::Error,
        }
    }
}

impl FitOptions {
    /// Options for search-internal fits: aliased columns are dropped rather
    /// than escalated.
    pub fn lenient() -> Self {
        FitOptions { rank_policy: RankPolicy::DropAliased, ..FitOptions::default() }
    }
}

/// A fitted regression.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlmFit<S> {
    pub family: Family,
    /// Intercept first when present, then design columns in order. Aliased
    /// columns carry coefficient zero.
    pub coefficients: Vec<S>,
    pub converged: bool,
    pub iterations: usize,
    pub max_abs_coefficient_capped: bool,
    /// Coefficient indices dropped as linearly dependent.
    pub aliased: Vec<usize>,
}

impl<S: Scalar> GlmFit<S> {
    /// Linear predictor Xβ (+ offset when given) on a design of matching width.
    pub fn linear_predictor(&self, design: &Design<'_, S>, offset: Option<&[S]>) -> Vec<S> {
        assert_eq!(design.width(), self.coefficients.len(), "design width mismatch");
        let mut eta = vec![S::zero(); design.n];
        if let Some(off) = offset {
            eta.copy_from_slice(off);
        }
        if design.intercept {
            let b0 = self.coefficients[0];
            for e in eta.iter_mut() {
                *e = *e + b0;
            }
        }
        let base = usize::from(design.intercept);
        for (j, col) in design.cols.iter().enumerate() {
            let b = self.coefficients[base + j];
            if b != S::zero() {
                for (e, &x) in eta.iter_mut().zip(*col) {
                    *e = *e + b * x;
                }
            }
        }
        eta
    }

    /// Mean response: probabilities for binary families, identity for linear.
    pub fn predict_mean(&self, design: &Design<'_, S>, offset: Option<&[S]>) -> Vec<S> {
        let eta = self.linear_predictor(design, offset);
        match self.family {
            Family::Logistic => eta.into_iter().map(expit).collect(),
            Family::Probit => eta.into_iter().map(normal_cdf).collect(),
            Family::Linear => eta,
        }
    }
}

/// LDL^T solve of the SPD system `g beta = b`, dropping columns whose pivot
/// collapses (linear dependence). Returns the solution and aliased indices.
fn solve_spd<S: Scalar>(g: &[Vec<S>], b: &[S]) -> (Vec<S>, Vec<usize>) {
    let k = b.len();
    let mut l = vec![vec![S::zero(); k]; k];
    let mut d = vec![S::zero(); k];
    let mut aliased = vec![false; k];
    let tol = S::epsilon() * conv::<S>(1e4);

    for j in 0..k {
        let mut dj = g[j][j];
        for s in 0..j {
            if !aliased[s] {
                dj = dj - l[j][s] * l[j][s] * d[s];
            }
        }
        let scale = if g[j][j] > S::zero() { g[j][j] } else { S::one() };
        if dj <= tol * scale {
            aliased[j] = true;
            continue;
        }
        d[j] = dj;
        for i in (j + 1)..k {
            let mut v = g[i][j];
            for s in 0..j {
                if !aliased[s] {
                    v = v - l[i][s] * l[j][s] * d[s];
                }
            }
            l[i][j] = v / dj;
        }
    }

    // Forward substitution L z = b, scale by D, back substitution L^T beta = z.
    let mut z = vec![S::zero(); k];
    for j in 0..k {
        if aliased[j] {
            continue;
        }
        let mut v = b[j];
        for s in 0..j {
            if !aliased[s] {
                v = v - l[j][s] * z[s];
            }
        }
        z[j] = v;
    }
    let mut beta = vec![S::zero(); k];
    for j in (0..k).rev() {
        if aliased[j] {
            continue;
        }
        let mut v = z[j] / d[j];
        for i in (j + 1)..k {
            if !aliased[i] {
                v = v - l[i][j] * beta[i];
            }
        }
        beta[j] = v;
    }

    let idx = aliased
        .iter()
        .enumerate()
        .filter(|&(_, &a)| a)
        .map(|(j, _)| j)
        .collect();
    (beta, idx)
}

struct IrlsState<S> {
    eta: Vec<S>,
    mu: Vec<S>,
    deviance: S,
}

fn binary_state<S: Scalar>(
    design: &Design<'_, S>,
    beta: &[S],
    offset: Option<&[S]>,
    y: &[S],
    link: Family,
) -> IrlsState<S> {
    let n = design.n;
    let mut eta = vec![S::zero(); n];
    for i in 0..n {
        let mut e = if let Some(off) = offset { off[i] } else { S::zero() };
        for j in 0..design.width() {
            e = e + beta[j] * design.x(i, j);
        }
        eta[i] = e;
    }
    let mu: Vec<S> = match link {
        Family::Logistic => eta.iter().map(|&e| expit(e)).collect(),
        Family::Probit => eta.iter().map(|&e| normal_cdf(e)).collect(),
        Family::Linear => unreachable!("binary state for linear family"),
    };
    let tiny = conv::<S>(1e-12);
    let mut dev = S::zero();
    for i in 0..n {
        let m = mu[i].max(tiny).min(S::one() - tiny);
        dev = dev - conv::<S>(2.0) * (y[i] * m.ln() + (S::one() - y[i]) * (S::one() - m).ln());
    }
    IrlsState { eta, mu, deviance: dev }
}

fn fit_binary<S: Scalar>(
    design: &Design<'_, S>,
    y: &[S],
    offset: Option<&[S]>,
    link: Family,
    opts: &FitOptions,
) -> Result<GlmFit<S>> {
    let n = design.n;
    if y.len() != n {
        return Err(Error::domain("response length differs from design rows"));
    }
    if let Some(off) = offset {
        if off.len() != n {
            return Err(Error::domain("offset length differs from design rows"));
        }
    }
    if let Some(bad) = y.iter().find(|&&v| v != S::zero() && v != S::one()) {
        return Err(Error::domain(format!("binary response value {bad} outside {{0,1}}")));
    }

    let k = design.width();
    let cap = conv::<S>(COEFFICIENT_CAP);
    let tiny = conv::<S>(1e-10);
    let mut beta = vec![S::zero(); k];
    let mut state = binary_state(design, &beta, offset, y, link);
    let mut aliased: Vec<usize> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for iter in 1..=opts.max_iterations {
        iterations = iter;

        // Working weights and response for the current linearization.
        let mut w = vec![S::zero(); n];
        let mut z = vec![S::zero(); n];
        for i in 0..n {
            let mu = state.mu[i];
            let var = (mu * (S::one() - mu)).max(tiny);
            let dmu = match link {
                Family::Logistic => var,
                Family::Probit => normal_pdf(state.eta[i]).max(tiny),
                Family::Linear => unreachable!(),
            };
            w[i] = dmu * dmu / var;
            let off = if let Some(off) = offset { off[i] } else { S::zero() };
            z[i] = state.eta[i] - off + (y[i] - mu) / dmu;
        }

        // Normal equations X^T W X beta = X^T W z.
        let mut g = vec![vec![S::zero(); k]; k];
        let mut b = vec![S::zero(); k];
        for i in 0..n {
            let wi = w[i];
            for r in 0..k {
                let xr = design.x(i, r);
                b[r] = b[r] + wi * xr * z[i];
                for c in 0..=r {
                    g[r][c] = g[r][c] + wi * xr * design.x(i, c);
                }
            }
        }
        for r in 0..k {
            for c in (r + 1)..k {
                g[r][c] = g[c][r];
            }
        }

        let (mut next, dropped) = solve_spd(&g, &b);
        if !dropped.is_empty() && opts.rank_policy == RankPolicy::Error {
            return Err(Error::RankDeficient(design.coef_name(dropped[0]).to_string()));
        }
        aliased = dropped;
        for v in next.iter_mut() {
            *v = v.max(-cap).min(cap);
        }

        // Step halving keeps the deviance from increasing.
        let mut next_state = binary_state(design, &next, offset, y, link);
        let mut halvings = 0;
        while next_state.deviance > state.deviance + conv::<S>(1e-10) && halvings < 8 {
            for j in 0..k {
                next[j] = (next[j] + beta[j]) / conv::<S>(2.0);
            }
            next_state = binary_state(design, &next, offset, y, link);
            halvings += 1;
        }

        let dev_change = (next_state.deviance - state.deviance).abs();
        let rel = dev_change / (next_state.deviance.abs() + conv::<S>(0.1));
        beta = next;
        state = next_state;

        if rel < conv::<S>(opts.deviance_tol) {
            let score = binary_score(design, y, &state.mu, &state.eta, link);
            let max_score = score.iter().fold(S::zero(), |m, &v| m.max(v.abs()));
            if max_score <= conv::<S>(opts.score_tol) {
                converged = true;
                break;
            }
            // Deviance plateaued at the cap without solving the score: stop.
            if beta.iter().any(|&b| b.abs() >= cap - conv::<S>(1e-9)) {
                break;
            }
        }
    }

    let capped = beta.iter().any(|&b| b.abs() >= cap - conv::<S>(1e-9));
    Ok(GlmFit {
        family: link,
        coefficients: beta,
        converged,
        iterations,
        max_abs_coefficient_capped: capped,
        aliased,
    })
}

/// Score of the Bernoulli log-likelihood at the current fit. For the logit
/// link this is X^T (y - mu); the probit score carries the usual
/// phi / (mu (1-mu)) factor.
fn binary_score<S: Scalar>(
    design: &Design<'_, S>,
    y: &[S],
    mu: &[S],
    eta: &[S],
    link: Family,
) -> Vec<S> {
    let k = design.width();
    let tiny = conv::<S>(1e-10);
    let mut score = vec![S::zero(); k];
    for i in 0..design.n {
        let factor = match link {
            Family::Logistic => y[i] - mu[i],
            Family::Probit => {
                let var = (mu[i] * (S::one() - mu[i])).max(tiny);
                (y[i] - mu[i]) * normal_pdf(eta[i]) / var
            }
            Family::Linear => unreachable!(),
        };
        for j in 0..k {
            score[j] = score[j] + design.x(i, j) * factor;
        }
    }
    score
}

/// Maximum-likelihood logistic regression with optional offset.
pub fn fit_logistic<S: Scalar>(
    design: &Design<'_, S>,
    y: &[S],
    offset: Option<&[S]>,
) -> Result<GlmFit<S>> {
    fit_binary(design, y, offset, Family::Logistic, &FitOptions::default())
}

pub fn fit_logistic_with<S: Scalar>(
    design: &Design<'_, S>,
    y: &[S],
    offset: Option<&[S]>,
    opts: &FitOptions,
) -> Result<GlmFit<S>> {
    fit_binary(design, y, offset, Family::Logistic, opts)
}

/// Probit regression (binary response, standard-normal link).
pub fn fit_probit<S: Scalar>(
    design: &Design<'_, S>,
    y: &[S],
    offset: Option<&[S]>,
) -> Result<GlmFit<S>> {
    fit_binary(design, y, offset, Family::Probit, &FitOptions::default())
}

/// Ordinary least squares of (y - offset) on the design.
pub fn fit_linear<S: Scalar>(
    design: &Design<'_, S>,
    y: &[S],
    offset: Option<&[S]>,
) -> Result<GlmFit<S>> {
    fit_linear_with(design, y, offset, &FitOptions::default())
}

pub fn fit_linear_with<S: Scalar>(
    design: &Design<'_, S>,
    y: &[S],
    offset: Option<&[S]>,
    opts: &FitOptions,
) -> Result<GlmFit<S>> {
    let n = design.n;
    if y.len() != n {
        return Err(Error::domain("response length differs from design rows"));
    }
    if let Some(off) = offset {
        if off.len() != n {
            return Err(Error::domain("offset length differs from design rows"));
        }
    }
    let k = design.width();
    let mut g = vec![vec![S::zero(); k]; k];
    let mut b = vec![S::zero(); k];
    for i in 0..n {
        let resid = if let Some(off) = offset { y[i] - off[i] } else { y[i] };
        for r in 0..k {
            let xr = design.x(i, r);
            b[r] = b[r] + xr * resid;
            for c in 0..=r {
                g[r][c] = g[r][c] + xr * design.x(i, c);
            }
        }
    }
    for r in 0..k {
        for c in (r + 1)..k {
            g[r][c] = g[c][r];
        }
    }
    let (beta, aliased) = solve_spd(&g, &b);
    if !aliased.is_empty() && opts.rank_policy == RankPolicy::Error {
        return Err(Error::RankDeficient(design.coef_name(aliased[0]).to_string()));
    }
    Ok(GlmFit {
        family: Family::Linear,
        coefficients: beta,
        converged: true,
        iterations: 1,
        max_abs_coefficient_capped: false,
        aliased,
    })
}

/// One-dimensional fluctuation coefficient of the targeting step.
///
/// Binary family: MLE slope of a logistic regression of `y` on `h` with
/// offset `logit(q0)` and no intercept (damped Newton from zero, so the
/// log-likelihood never decreases relative to epsilon = 0). Continuous
/// family: least-squares slope of (y - q0) on `h` with no intercept.
pub fn fit_fluctuation<S: Scalar>(
    y: &[S],
    q0: &[S],
    h: &[S],
    family: OutcomeFamily,
) -> Result<S> {
    let n = y.len();
    if q0.len() != n || h.len() != n {
        return Err(Error::domain("fluctuation input lengths differ"));
    }
    if h.iter().all(|&v| v == S::zero()) {
        return Err(Error::domain("clever covariate is identically zero: no fluctuation direction"));
    }
    match family {
        OutcomeFamily::Continuous => {
            let num = h.iter().zip(y.iter().zip(q0)).map(|(&hi, (&yi, &qi))| hi * (yi - qi)).sum::<S>();
            let den = h.iter().map(|&hi| hi * hi).sum::<S>();
            Ok(num / den)
        }
        OutcomeFamily::Binary => {
            if q0.iter().any(|&q| q <= S::zero() || q >= S::one()) {
                return Err(Error::domain("initial predictions must lie strictly in (0,1)"));
            }
            let offset: Vec<S> = q0.iter().map(|&q| logit(q)).collect();
            let scale = h.iter().map(|&v| v.abs()).sum::<S>().max(S::one());
            let tol = S::epsilon() * conv::<S>(1e3) * scale;
            let ll = |eps: S| -> S {
                let mut total = S::zero();
                for i in 0..n {
                    let lp = offset[i] + eps * h[i];
                    let mu = expit(lp).max(conv::<S>(1e-12)).min(S::one() - conv::<S>(1e-12));
                    total = total + y[i] * mu.ln() + (S::one() - y[i]) * (S::one() - mu).ln();
                }
                total
            };
            let mut eps = S::zero();
            let mut cur_ll = ll(eps);
            for _ in 0..100 {
                let mut score = S::zero();
                let mut info = S::zero();
                for i in 0..n {
                    let mu = expit(offset[i] + eps * h[i]);
                    score = score + h[i] * (y[i] - mu);
                    info = info + h[i] * h[i] * mu * (S::one() - mu);
                }
                if score.abs() <= tol {
                    break;
                }
                if info <= conv::<S>(1e-30) {
                    break;
                }
                let mut step = score / info;
                // Damp the step until the likelihood does not decrease.
                let mut tries = 0;
                loop {
                    let cand = eps + step;
                    let cand_ll = ll(cand);
                    if cand_ll >= cur_ll - S::epsilon() * cur_ll.abs().max(S::one()) || tries >= 30 {
                        eps = cand;
                        cur_ll = cand_ll;
                        break;
                    }
                    step = step / conv::<S>(2.0);
                    tries += 1;
                }
                let bound = conv::<S>(1e3);
                if eps.abs() > bound {
                    eps = eps.signum() * bound;
                    break;
                }
            }
            Ok(eps)
        }
    }
}

/// Clamp predicted probabilities into [bound, 1 - bound].
pub fn clamp_probs<S: Scalar>(probs: &mut [S], bound: S) {
    for p in probs.iter_mut() {
        *p = p.max(bound).min(S::one() - bound);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn intercept_only_balanced_outcome_gives_zero() {
        let design = Design::<f64>::intercept_only(4);
        let fit = fit_logistic(&design, &[1.0, 0.0, 1.0, 0.0], None).unwrap();
        assert!(fit.converged);
        assert_abs_diff_eq!(fit.coefficients[0], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn all_ones_outcome_is_capped() {
        let design = Design::<f64>::intercept_only(4);
        let fit = fit_logistic(&design, &[1.0, 1.0, 1.0, 1.0], None).unwrap();
        assert!(fit.max_abs_coefficient_capped);
        assert_eq!(fit.coefficients[0], COEFFICIENT_CAP);
    }

    #[test]
    fn duplicate_column_errors_with_name() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let design =
            Design::new(vec!["w1".into(), "w1_copy".into()], vec![&x, &x], true, 4).unwrap();
        let err = fit_logistic(&design, &[0.0, 1.0, 0.0, 1.0], None).unwrap_err();
        assert!(err.to_string().contains("w1_copy"), "{err}");
    }

    #[test]
    fn lenient_policy_drops_duplicate_column() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let design =
            Design::new(vec!["w1".into(), "w1_copy".into()], vec![&x, &x], true, 4).unwrap();
        let fit =
            fit_logistic_with(&design, &[0.0, 1.0, 0.0, 1.0], None, &FitOptions::lenient()).unwrap();
        assert_eq!(fit.aliased, vec![2]);
        assert_eq!(fit.coefficients[2], 0.0);
    }

    #[test]
    fn linear_intercept_only_is_mean() {
        let design = Design::<f64>::intercept_only(2);
        let fit = fit_linear(&design, &[2.0, 4.0], None).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn linear_identity_fit() {
        let y = vec![1.0, 2.0, 3.0];
        let design = Design::new(vec!["x".into()], vec![y.as_slice()], false, 3).unwrap();
        let fit = fit_linear(&design, &y, None).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], 1.0, epsilon = 1e-12);
        let pred = fit.predict_mean(&design, None);
        for (p, v) in pred.iter().zip(&y) {
            assert_abs_diff_eq!(p, v, epsilon = 1e-12);
        }
    }

    #[test]
    fn linear_offset_equals_shifted_response() {
        let x = vec![0.4, -1.0, 2.2, 0.9, -0.3];
        let y = vec![1.0, 0.2, 3.0, 1.4, 0.7];
        let off = vec![0.5, -0.2, 0.1, 0.0, 1.3];
        let design = Design::new(vec!["x".into()], vec![x.as_slice()], true, 5).unwrap();
        let with_offset = fit_linear(&design, &y, Some(&off)).unwrap();
        let shifted: Vec<f64> = y.iter().zip(&off).map(|(&yi, &oi)| yi - oi).collect();
        let direct = fit_linear(&design, &shifted, None).unwrap();
        assert_eq!(with_offset.coefficients, direct.coefficients);
    }

    #[test]
    fn fluctuation_zero_residual_is_zero() {
        let y = vec![0.2, 0.4, 0.6];
        let h = vec![1.0, -2.0, 0.5];
        let eps = fit_fluctuation(&y, &y, &h, OutcomeFamily::Continuous).unwrap();
        assert_eq!(eps, 0.0);
    }

    #[test]
    fn fluctuation_constant_slope() {
        let eps =
            fit_fluctuation(&[2.0, 2.0], &[0.0, 0.0], &[1.0, 1.0], OutcomeFamily::Continuous)
                .unwrap();
        assert_abs_diff_eq!(eps, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn fluctuation_rejects_zero_direction() {
        let err = fit_fluctuation(&[1.0, 0.0], &[0.5, 0.5], &[0.0, 0.0], OutcomeFamily::Binary)
            .unwrap_err();
        assert!(err.to_string().contains("fluctuation direction"));
    }

    #[test]
    fn fluctuation_rejects_degenerate_initial_probabilities() {
        assert!(fit_fluctuation(&[1.0, 0.0], &[1.0, 0.5], &[1.0, 1.0], OutcomeFamily::Binary).is_err());
    }

    #[test]
    fn binary_fluctuation_never_hurts_likelihood() {
        let y = [1.0, 0.0, 1.0, 1.0, 0.0];
        let q0 = [0.3, 0.6, 0.5, 0.2, 0.8];
        let h = [2.0, -1.5, 1.0, 3.0, -2.0];
        let eps = fit_fluctuation(&y, &q0, &h, OutcomeFamily::Binary).unwrap();
        let ll = |e: f64| -> f64 {
            y.iter()
                .zip(q0.iter().zip(&h))
                .map(|(&yi, (&qi, &hi))| {
                    let mu = expit(logit(qi) + e * hi);
                    yi * mu.ln() + (1.0 - yi) * (1.0 - mu).ln()
                })
                .sum()
        };
        assert!(ll(eps) >= ll(0.0));
    }

    #[test]
    fn capped_probit_on_constant_response() {
        let design = Design::<f64>::intercept_only(6);
        let fit = fit_probit(&design, &[1.0; 6], None).unwrap();
        assert!(fit.max_abs_coefficient_capped);
    }

    #[test]
    fn logistic_works_in_f32() {
        let x: Vec<f32> = vec![-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, -1.2, 0.3];
        let y: Vec<f32> = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0];
        let design = Design::new(vec!["x".into()], vec![x.as_slice()], true, 8).unwrap();
        let fit = fit_logistic(&design, &y, None).unwrap();
        assert!(fit.coefficients[1] > 0.0);
    }
}
