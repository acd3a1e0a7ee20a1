//! Baseline estimators of the average treatment effect — inverse-probability
//! weighting, its stabilized (Hajek) form, AIPW, and TMLE — plus the
//! efficient-influence-curve inference shared by every estimator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::glm::{
    clamp_probs, fit_linear_with, fit_logistic_with, Design, DesignSpec, FitOptions, GlmFit,
};
use crate::scalar::{clamp_prob, conv, expit, logit, mean, sample_sd, Scalar};
use crate::special::two_sided_p;
use crate::tabular::{Dataset, OutcomeFamily};

/// 97.5% standard-normal quantile used for all confidence intervals.
pub const Z_CRITICAL: f64 = 1.959964;

/// Predictions for binary outcomes are clamped into
/// [`Q_BOUND`, 1 - `Q_BOUND`] before moving to the logit scale.
pub const Q_BOUND: f64 = 1e-6;

/// Fitted nuisance models: propensity g and initial outcome regression.
#[derive(Debug, Clone)]
pub struct NuisanceFits<S> {
    /// Propensity model for A given W.
    pub g: GlmFit<S>,
    pub g_design: DesignSpec,
    /// Initial outcome model for Y given (A, W); the treatment column enters
    /// first, before `q_design` covariates.
    pub q0: GlmFit<S>,
    pub q_design: DesignSpec,
    pub outcome_family: OutcomeFamily,
    /// Propensities are clamped into [g_bound, 1 - g_bound].
    pub g_bound: S,
}

/// Per-observation nuisance predictions consumed by the estimators.
#[derive(Debug, Clone)]
pub struct NuisanceValues<S> {
    /// Clamped propensity g(1|W).
    pub g1w: Vec<S>,
    /// Outcome prediction at the observed treatment.
    pub q_obs: Vec<S>,
    /// Outcome prediction with treatment set to 1.
    pub q1: Vec<S>,
    /// Outcome prediction with treatment set to 0.
    pub q0: Vec<S>,
    pub family: OutcomeFamily,
}

impl<S: Scalar> NuisanceValues<S> {
    pub fn new(g1w: Vec<S>, q_obs: Vec<S>, q1: Vec<S>, q0: Vec<S>, family: OutcomeFamily) -> Self {
        NuisanceValues { g1w, q_obs, q1, q0, family }
    }

    pub fn n(&self) -> usize {
        self.g1w.len()
    }
}

/// Fits main-terms nuisance models: logistic A ~ W and a family-matched
/// regression Y ~ A + W. Aliased (linearly dependent) columns are dropped.
pub fn fit_nuisance<S: Scalar>(d: &Dataset<S>, g_bound: S) -> Result<NuisanceFits<S>> {
    if g_bound <= S::zero() || g_bound >= conv::<S>(0.5) {
        return Err(Error::domain("g_bound must lie in (0, 0.5)"));
    }
    let names: Vec<String> = d.column_names().iter().map(|s| s.to_string()).collect();
    let g_design = DesignSpec::main_terms(names.clone());
    let q_design = DesignSpec::main_terms(names);

    let a: Vec<S> = d.treatment().iter().map(|&v| conv(v as f64)).collect();
    let opts = FitOptions::lenient();

    let g = fit_logistic_with(&Design::from_dataset(d, &g_design)?, &a, None, &opts)?;

    let q_x = q_design_matrix(d, &q_design, &a)?;
    let y = d.outcome();
    let q0 = match d.outcome_family() {
        OutcomeFamily::Binary => fit_logistic_with(&q_x, y, None, &opts)?,
        OutcomeFamily::Continuous => fit_linear_with(&q_x, y, None, &opts)?,
    };

    Ok(NuisanceFits {
        g,
        g_design,
        q0,
        q_design,
        outcome_family: d.outcome_family(),
        g_bound,
    })
}

/// Design [A, W...] with intercept, borrowing `a` for the treatment column.
fn q_design_matrix<'a, S: Scalar>(
    d: &'a Dataset<S>,
    spec: &DesignSpec,
    a: &'a [S],
) -> Result<Design<'a, S>> {
    let mut names = vec!["(treatment)".to_string()];
    let mut cols: Vec<&[S]> = vec![a];
    for name in &spec.column_names {
        let col = d
            .column_values(name)
            .ok_or_else(|| Error::domain(format!("design column `{name}` not in dataset")))?;
        names.push(name.clone());
        cols.push(col);
    }
    Design::new(names, cols, spec.include_intercept, d.n())
}

impl<S: Scalar> NuisanceFits<S> {
    /// Evaluates both models on a dataset, clamping propensities.
    pub fn predict(&self, d: &Dataset<S>) -> Result<NuisanceValues<S>> {
        let n = d.n();
        let g_x = Design::from_dataset(d, &self.g_design)?;
        let mut g1w = self.g.predict_mean(&g_x, None);
        clamp_probs(&mut g1w, self.g_bound);

        let a: Vec<S> = d.treatment().iter().map(|&v| conv(v as f64)).collect();
        let ones = vec![S::one(); n];
        let zeros = vec![S::zero(); n];
        let q_obs = self.q0.predict_mean(&q_design_matrix(d, &self.q_design, &a)?, None);
        let q1 = self.q0.predict_mean(&q_design_matrix(d, &self.q_design, &ones)?, None);
        let q0 = self.q0.predict_mean(&q_design_matrix(d, &self.q_design, &zeros)?, None);

        Ok(NuisanceValues { g1w, q_obs, q1, q0, family: self.outcome_family })
    }
}

/// Inverse-propensity contrast H(a, g) = a/g - (1-a)/(1-g).
#[inline]
pub fn clever_covariate<S: Scalar>(a: u8, g1w: S) -> S {
    if a == 1 {
        S::one() / g1w
    } else {
        -(S::one() / (S::one() - g1w))
    }
}

/// Per-observation efficient influence curve values at the parameter `psi`:
/// H(a, g)(y - q(a,W)) + q(1,W) - q(0,W) - psi.
pub fn eic_from_values<S: Scalar>(
    a: &[u8],
    y: &[S],
    values: &NuisanceValues<S>,
    psi: S,
) -> Vec<S> {
    (0..y.len())
        .map(|i| {
            let h = clever_covariate(a[i], values.g1w[i]);
            h * (y[i] - values.q_obs[i]) + values.q1[i] - values.q0[i] - psi
        })
        .collect()
}

/// [`eic_from_values`] evaluated through fitted nuisance models.
pub fn eic_values<S: Scalar>(d: &Dataset<S>, fits: &NuisanceFits<S>, psi: S) -> Result<Vec<S>> {
    let values = fits.predict(d)?;
    Ok(eic_from_values(d.treatment(), d.outcome(), &values, psi))
}

/// Point estimate with influence-curve inference.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport<S> {
    pub schema_version: u32,
    pub estimator: String,
    /// Average treatment effect estimate.
    pub psi: S,
    pub se: S,
    pub ci: [S; 2],
    pub p_value: S,
    pub n: usize,
    /// How the standard error was obtained.
    pub se_method: String,
    /// Per-observation influence values (empty for plain IPW).
    #[serde(skip)]
    pub influence_values: Vec<S>,
}

impl<S: Scalar> EstimateReport<S> {
    pub fn ci_lower(&self) -> S {
        self.ci[0]
    }

    pub fn ci_upper(&self) -> S {
        self.ci[1]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Inference<S> {
    pub se: S,
    pub ci: [S; 2],
    pub p_value: S,
}

/// Wald inference from per-observation values: se = sd/sqrt(n), the 95% CI,
/// and the two-sided normal p-value. With se = 0 the p-value degenerates to
/// 0 for a nonzero estimate and 1 otherwise.
pub fn inference<S: Scalar>(influence_values: &[S], psi: S) -> Result<Inference<S>> {
    let n = influence_values.len();
    if n < 2 {
        return Err(Error::domain("inference requires at least two observations"));
    }
    let se = sample_sd(influence_values) / conv::<S>(n as f64).sqrt();
    let z = conv::<S>(Z_CRITICAL);
    let ci = [psi - z * se, psi + z * se];
    let p_value = if se == S::zero() {
        if psi == S::zero() {
            S::one()
        } else {
            S::zero()
        }
    } else {
        two_sided_p(psi / se)
    };
    Ok(Inference { se, ci, p_value })
}

fn report<S: Scalar>(
    estimator: &str,
    psi: S,
    inf: Inference<S>,
    n: usize,
    se_method: &str,
    influence_values: Vec<S>,
) -> EstimateReport<S> {
    EstimateReport {
        schema_version: 1,
        estimator: estimator.to_string(),
        psi,
        se: inf.se,
        ci: inf.ci,
        p_value: inf.p_value,
        n,
        se_method: se_method.to_string(),
        influence_values,
    }
}

/// Horvitz-Thompson inverse-probability-weighted estimate from propensities.
pub fn estimate_ipw_from<S: Scalar>(a: &[u8], y: &[S], g1w: &[S]) -> Result<EstimateReport<S>> {
    let summands: Vec<S> = (0..y.len())
        .map(|i| clever_covariate(a[i], g1w[i]) * y[i])
        .collect();
    let psi = mean(&summands);
    let inf = inference(&summands, psi)?;
    Ok(report("ipw", psi, inf, y.len(), "plug-in summand variance", Vec::new()))
}

pub fn estimate_ipw<S: Scalar>(d: &Dataset<S>, fits: &NuisanceFits<S>) -> Result<EstimateReport<S>> {
    let values = fits.predict(d)?;
    estimate_ipw_from(d.treatment(), d.outcome(), &values.g1w)
}

/// Hajek (stabilized) IPW: difference of weighted outcome means with weights
/// normalized within each arm.
pub fn estimate_stabilized_ipw_from<S: Scalar>(
    a: &[u8],
    y: &[S],
    g1w: &[S],
) -> Result<EstimateReport<S>> {
    let n = y.len();
    let n_s = conv::<S>(n as f64);
    let mut sum_w1 = S::zero();
    let mut sum_w0 = S::zero();
    let mut sum_wy1 = S::zero();
    let mut sum_wy0 = S::zero();
    for i in 0..n {
        if a[i] == 1 {
            let w = S::one() / g1w[i];
            sum_w1 = sum_w1 + w;
            sum_wy1 = sum_wy1 + w * y[i];
        } else {
            let w = S::one() / (S::one() - g1w[i]);
            sum_w0 = sum_w0 + w;
            sum_wy0 = sum_wy0 + w * y[i];
        }
    }
    if sum_w1 == S::zero() || sum_w0 == S::zero() {
        return Err(Error::domain("stabilized IPW requires both treatment arms present"));
    }
    let mu1 = sum_wy1 / sum_w1;
    let mu0 = sum_wy0 / sum_w0;
    let psi = mu1 - mu0;

    // Influence curve of the ratio estimator, linearized per arm.
    let mean_w1 = sum_w1 / n_s;
    let mean_w0 = sum_w0 / n_s;
    let influence: Vec<S> = (0..n)
        .map(|i| {
            if a[i] == 1 {
                (y[i] - mu1) / (g1w[i] * mean_w1)
            } else {
                -((y[i] - mu0) / ((S::one() - g1w[i]) * mean_w0))
            }
        })
        .collect();
    let inf = inference(&influence, psi)?;
    Ok(report("sipw", psi, inf, n, "ratio-estimator linearization", influence))
}

pub fn estimate_stabilized_ipw<S: Scalar>(
    d: &Dataset<S>,
    fits: &NuisanceFits<S>,
) -> Result<EstimateReport<S>> {
    let values = fits.predict(d)?;
    estimate_stabilized_ipw_from(d.treatment(), d.outcome(), &values.g1w)
}

/// Augmented IPW: the efficient-influence-curve estimating equation solved
/// for the parameter directly.
pub fn estimate_aipw_from<S: Scalar>(
    a: &[u8],
    y: &[S],
    values: &NuisanceValues<S>,
) -> Result<EstimateReport<S>> {
    let summands: Vec<S> = (0..y.len())
        .map(|i| {
            let h = clever_covariate(a[i], values.g1w[i]);
            h * (y[i] - values.q_obs[i]) + (values.q1[i] - values.q0[i])
        })
        .collect();
    let psi = mean(&summands);
    let inf = inference(&summands, psi)?;
    let influence = summands.into_iter().map(|s| s - psi).collect();
    Ok(report("aipw", psi, inf, y.len(), "efficient influence curve", influence))
}

pub fn estimate_aipw<S: Scalar>(d: &Dataset<S>, fits: &NuisanceFits<S>) -> Result<EstimateReport<S>> {
    let values = fits.predict(d)?;
    estimate_aipw_from(d.treatment(), d.outcome(), &values)
}

/// Outcome of the one-step targeting update.
#[derive(Debug, Clone)]
pub struct TargetedValues<S> {
    pub epsilon: S,
    pub q_obs: Vec<S>,
    pub q1: Vec<S>,
    pub q0: Vec<S>,
}

/// Runs the targeting step on nuisance predictions: builds the clever
/// covariate, fits the fluctuation, and updates the outcome predictions on
/// the link scale matching the family.
pub fn target_predictions<S: Scalar>(
    a: &[u8],
    y: &[S],
    values: &NuisanceValues<S>,
) -> Result<TargetedValues<S>> {
    let n = y.len();
    let h_obs: Vec<S> = (0..n).map(|i| clever_covariate(a[i], values.g1w[i])).collect();
    let h1: Vec<S> = values.g1w.iter().map(|&g| S::one() / g).collect();
    let h0: Vec<S> = values.g1w.iter().map(|&g| -(S::one() / (S::one() - g))).collect();

    match values.family {
        OutcomeFamily::Binary => {
            let b = conv::<S>(Q_BOUND);
            let q_obs_c: Vec<S> = values.q_obs.iter().map(|&q| clamp_prob(q, b)).collect();
            let q1_c: Vec<S> = values.q1.iter().map(|&q| clamp_prob(q, b)).collect();
            let q0_c: Vec<S> = values.q0.iter().map(|&q| clamp_prob(q, b)).collect();
            let epsilon = crate::glm::fit_fluctuation(y, &q_obs_c, &h_obs, OutcomeFamily::Binary)?;
            let update = |q: &[S], h: &[S]| -> Vec<S> {
                q.iter()
                    .zip(h)
                    .map(|(&qi, &hi)| expit(logit(qi) + epsilon * hi))
                    .collect()
            };
            Ok(TargetedValues {
                epsilon,
                q_obs: update(&q_obs_c, &h_obs),
                q1: update(&q1_c, &h1),
                q0: update(&q0_c, &h0),
            })
        }
        OutcomeFamily::Continuous => {
            let epsilon =
                crate::glm::fit_fluctuation(y, &values.q_obs, &h_obs, OutcomeFamily::Continuous)?;
            let update = |q: &[S], h: &[S]| -> Vec<S> {
                q.iter().zip(h).map(|(&qi, &hi)| qi + epsilon * hi).collect()
            };
            Ok(TargetedValues {
                epsilon,
                q_obs: update(&values.q_obs, &h_obs),
                q1: update(&values.q1, &h1),
                q0: update(&values.q0, &h0),
            })
        }
    }
}

/// TMLE from nuisance predictions: target, plug in, and take EIC inference
/// at the updated fit.
pub fn estimate_tmle_from<S: Scalar>(
    a: &[u8],
    y: &[S],
    values: &NuisanceValues<S>,
) -> Result<EstimateReport<S>> {
    let targeted = target_predictions(a, y, values)?;
    let n = y.len();
    let diffs: Vec<S> = targeted.q1.iter().zip(&targeted.q0).map(|(&q1, &q0)| q1 - q0).collect();
    let psi = mean(&diffs);
    let star = NuisanceValues {
        g1w: values.g1w.clone(),
        q_obs: targeted.q_obs,
        q1: targeted.q1,
        q0: targeted.q0,
        family: values.family,
    };
    let influence = eic_from_values(a, y, &star, psi);
    let inf = inference(&influence, psi)?;
    Ok(report("tmle", psi, inf, n, "efficient influence curve", influence))
}

pub fn estimate_tmle<S: Scalar>(d: &Dataset<S>, fits: &NuisanceFits<S>) -> Result<EstimateReport<S>> {
    let values = fits.predict(d)?;
    estimate_tmle_from(d.treatment(), d.outcome(), &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn values(
        g1w: Vec<f64>,
        q_obs: Vec<f64>,
        q1: Vec<f64>,
        q0: Vec<f64>,
        family: OutcomeFamily,
    ) -> NuisanceValues<f64> {
        NuisanceValues::new(g1w, q_obs, q1, q0, family)
    }

    #[test]
    fn clever_covariate_cases() {
        assert_eq!(clever_covariate(1, 0.5), 2.0);
        assert_eq!(clever_covariate(0, 0.5), -2.0);
        assert_eq!(clever_covariate(1, 0.2), 5.0);
    }

    #[test]
    fn eic_single_observation() {
        let v = values(vec![0.5], vec![0.5], vec![1.5], vec![0.5], OutcomeFamily::Continuous);
        // H = 2, y - q = 0.5, q1 - q0 = 1, psi = 1 -> 2*0.5 + 1 - 1 = 1
        let eic = eic_from_values(&[1], &[1.0], &v, 1.0);
        assert_abs_diff_eq!(eic[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn eic_mean_zero_when_outcome_model_exact() {
        let q1 = vec![1.0, 2.0, 3.0, 4.0];
        let q0 = vec![0.5, 1.0, 1.5, 2.0];
        let a = [1u8, 0, 1, 0];
        let q_obs: Vec<f64> =
            a.iter().enumerate().map(|(i, &ai)| if ai == 1 { q1[i] } else { q0[i] }).collect();
        let y = q_obs.clone();
        let diffs: Vec<f64> = q1.iter().zip(&q0).map(|(&x, &z)| x - z).collect();
        let psi = mean(&diffs);
        let v = values(vec![0.4; 4], q_obs, q1, q0, OutcomeFamily::Continuous);
        let eic = eic_from_values(&a, &y, &v, psi);
        assert_abs_diff_eq!(mean(&eic), 0.0, epsilon = 1e-15);
    }

    // Independent term-by-term expansion of the influence-curve formula.
    fn eic_oracle(a: &[u8], y: &[f64], v: &NuisanceValues<f64>, psi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..y.len() {
            let h = if a[i] == 1 { 1.0 / v.g1w[i] } else { -1.0 / (1.0 - v.g1w[i]) };
            let residual = y[i] - v.q_obs[i];
            let plug_in = v.q1[i] - v.q0[i];
            out.push(h * residual + plug_in - psi);
        }
        out
    }

    #[test]
    fn eic_matches_term_by_term_oracle() {
        let a = [1u8, 0, 0, 1, 1];
        let y = [0.3, 1.2, -0.5, 2.0, 0.0];
        let v = values(
            vec![0.3, 0.6, 0.45, 0.8, 0.25],
            vec![0.1, 0.9, -0.2, 1.5, 0.3],
            vec![0.4, 1.1, 0.0, 1.5, 0.6],
            vec![-0.1, 0.9, -0.2, 0.7, 0.1],
            OutcomeFamily::Continuous,
        );
        let psi = 0.37;
        let got = eic_from_values(&a, &y, &v, psi);
        let want = eic_oracle(&a, &y, &v, psi);
        for (g, w) in got.iter().zip(&want) {
            assert_abs_diff_eq!(g, w, epsilon = 1e-14);
        }
    }

    #[test]
    fn ipw_hand_computed_cases() {
        // g = 0.5, (a=1, y=1) and (a=0, y=0): psi = (2*1 + 0)/2 = 1
        let r = estimate_ipw_from(&[1, 0], &[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(r.psi, 1.0, epsilon = 1e-15);

        // all-zero outcomes
        let r = estimate_ipw_from(&[1, 0, 1], &[0.0, 0.0, 0.0], &[0.3, 0.4, 0.5]).unwrap();
        assert_eq!(r.psi, 0.0);

        // g = 0.5, y = 1: psi = mean(2a - 2(1-a))
        let a = [1u8, 1, 0, 1];
        let want = a.iter().map(|&ai| 2.0 * ai as f64 - 2.0 * (1.0 - ai as f64)).sum::<f64>() / 4.0;
        let r = estimate_ipw_from(&a, &[1.0; 4], &[0.5; 4]).unwrap();
        assert_abs_diff_eq!(r.psi, want, epsilon = 1e-15);
        assert!(r.influence_values.is_empty());
    }

    #[test]
    fn stabilized_ipw_constant_outcome_is_zero() {
        let r =
            estimate_stabilized_ipw_from(&[1, 0, 1, 0], &[3.0; 4], &[0.3, 0.3, 0.3, 0.3]).unwrap();
        assert_abs_diff_eq!(r.psi, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn stabilized_ipw_equal_weights_is_mean_difference() {
        let a = [1u8, 1, 0, 0];
        let y = [2.0, 4.0, 1.0, 2.0];
        let r = estimate_stabilized_ipw_from(&a, &y, &[0.5; 4]).unwrap();
        assert_abs_diff_eq!(r.psi, 3.0 - 1.5, epsilon = 1e-15);
    }

    #[test]
    fn stabilized_ipw_matches_two_pass_oracle() {
        let a = [1u8, 0, 1, 0, 1, 0];
        let y = [0.4, 1.3, -0.8, 2.2, 0.9, -0.3];
        let g = [0.3, 0.7, 0.55, 0.2, 0.8, 0.45];
        let r = estimate_stabilized_ipw_from(&a, &y, &g).unwrap();

        let (mut w1, mut wy1, mut w0, mut wy0) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..6 {
            if a[i] == 1 {
                w1 += 1.0 / g[i];
                wy1 += y[i] / g[i];
            } else {
                w0 += 1.0 / (1.0 - g[i]);
                wy0 += y[i] / (1.0 - g[i]);
            }
        }
        assert_abs_diff_eq!(r.psi, wy1 / w1 - wy0 / w0, epsilon = 1e-14);
    }

    #[test]
    fn stabilized_ipw_requires_both_arms() {
        assert!(estimate_stabilized_ipw_from(&[1, 1], &[1.0, 2.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn aipw_with_exact_outcome_model_is_plug_in() {
        let q1 = vec![1.0, 2.0, 3.0];
        let q0 = vec![0.0, 1.0, 1.0];
        let a = [1u8, 0, 1];
        let q_obs: Vec<f64> =
            a.iter().enumerate().map(|(i, &ai)| if ai == 1 { q1[i] } else { q0[i] }).collect();
        let y = q_obs.clone();
        let v =
            values(vec![0.6, 0.3, 0.5], q_obs, q1.clone(), q0.clone(), OutcomeFamily::Continuous);
        let r = estimate_aipw_from(&a, &y, &v).unwrap();
        let diffs: Vec<f64> = q1.iter().zip(&q0).map(|(&x, &z)| x - z).collect();
        assert_abs_diff_eq!(r.psi, mean(&diffs), epsilon = 1e-15);
    }

    #[test]
    fn aipw_with_zero_outcome_model_equals_ipw_bitwise() {
        let a = [1u8, 0, 1, 0, 1];
        let y = [0.7, 1.9, -0.4, 2.5, 1.1];
        let g = [0.35, 0.6, 0.2, 0.75, 0.5];
        let zero = vec![0.0; 5];
        let v = values(g.to_vec(), zero.clone(), zero.clone(), zero, OutcomeFamily::Continuous);
        let aipw = estimate_aipw_from(&a, &y, &v).unwrap();
        let ipw = estimate_ipw_from(&a, &y, &g).unwrap();
        assert_eq!(aipw.psi.to_bits(), ipw.psi.to_bits());
        assert_eq!(aipw.se.to_bits(), ipw.se.to_bits());
    }

    #[test]
    fn aipw_matches_term_by_term_oracle() {
        let a = [1u8, 0, 0, 1];
        let y = [1.4, 0.2, 0.9, 2.3];
        let v = values(
            vec![0.4, 0.55, 0.3, 0.7],
            vec![1.0, 0.5, 0.6, 2.0],
            vec![1.5, 1.1, 1.2, 2.0],
            vec![0.8, 0.5, 0.6, 1.1],
            OutcomeFamily::Continuous,
        );
        let mut total = 0.0;
        for i in 0..4 {
            let h = if a[i] == 1 { 1.0 / v.g1w[i] } else { -1.0 / (1.0 - v.g1w[i]) };
            total += h * (y[i] - v.q_obs[i]) + v.q1[i] - v.q0[i];
        }
        let r = estimate_aipw_from(&a, &y, &v).unwrap();
        assert_abs_diff_eq!(r.psi, total / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn tmle_with_solved_score_is_plug_in() {
        // y equals the initial predictions, so epsilon = 0 and TMLE reduces
        // to the plug-in of the initial fit.
        let q1 = vec![1.0, 2.0, 1.5, 0.5];
        let q0 = vec![0.2, 1.1, 0.9, 0.4];
        let a = [1u8, 0, 1, 0];
        let q_obs: Vec<f64> =
            a.iter().enumerate().map(|(i, &ai)| if ai == 1 { q1[i] } else { q0[i] }).collect();
        let y = q_obs.clone();
        let v = values(vec![0.5; 4], q_obs, q1.clone(), q0.clone(), OutcomeFamily::Continuous);
        let r = estimate_tmle_from(&a, &y, &v).unwrap();
        let diffs: Vec<f64> = q1.iter().zip(&q0).map(|(&x, &z)| x - z).collect();
        assert_abs_diff_eq!(r.psi, mean(&diffs), epsilon = 1e-15);
    }

    #[test]
    fn tmle_hand_solved_two_point_instance() {
        // h = (2, -2), residuals (0.7, -0.2):
        //   epsilon = (2*0.7 + (-2)*(-0.2)) / 8 = 0.225
        //   q1* = q1 + 0.45, q0* = q0 - 0.45, psi = 1.1
        let v = values(
            vec![0.5, 0.5],
            vec![0.3, 0.2],
            vec![0.3, 0.4],
            vec![0.1, 0.2],
            OutcomeFamily::Continuous,
        );
        let targeted = target_predictions(&[1, 0], &[1.0, 0.0], &v).unwrap();
        assert_abs_diff_eq!(targeted.epsilon, 0.225, epsilon = 1e-15);
        let r = estimate_tmle_from(&[1, 0], &[1.0, 0.0], &v).unwrap();
        assert_abs_diff_eq!(r.psi, 1.1, epsilon = 1e-15);
    }

    #[test]
    fn tmle_solves_the_eic_equation() {
        let a = [1u8, 0, 1, 0, 1, 1, 0, 0];
        let y = [1.2, 0.4, 2.0, 0.1, 1.7, 0.9, 0.6, 0.2];
        let v = values(
            vec![0.4, 0.3, 0.7, 0.5, 0.6, 0.45, 0.35, 0.55],
            vec![1.0, 0.5, 1.5, 0.3, 1.2, 1.0, 0.5, 0.4],
            vec![1.3, 0.9, 1.5, 0.8, 1.2, 1.0, 0.9, 0.9],
            vec![0.5, 0.5, 0.7, 0.3, 0.6, 0.6, 0.5, 0.4],
            OutcomeFamily::Continuous,
        );
        let r = estimate_tmle_from(&a, &y, &v).unwrap();
        assert!(mean(&r.influence_values).abs() <= 1e-12);
    }

    #[test]
    fn binary_tmle_stays_in_bounds_where_aipw_escapes() {
        // One treated observation with tiny propensity makes the AIPW
        // correction term explode; the TMLE plug-in cannot leave [-1, 1].
        let a = [1u8, 0, 0, 0];
        let y = [1.0, 0.0, 1.0, 0.0];
        let v = values(
            vec![0.01, 0.5, 0.5, 0.5],
            vec![0.1, 0.5, 0.5, 0.5],
            vec![0.1, 0.6, 0.6, 0.6],
            vec![0.4, 0.5, 0.5, 0.5],
            OutcomeFamily::Binary,
        );
        let aipw = estimate_aipw_from(&a, &y, &v).unwrap();
        assert!(aipw.psi.abs() > 1.0, "aipw psi = {}", aipw.psi);
        let tmle = estimate_tmle_from(&a, &y, &v).unwrap();
        assert!(tmle.psi.abs() <= 1.0, "tmle psi = {}", tmle.psi);
    }

    #[test]
    fn inference_degenerate_cases() {
        let inf = inference(&[0.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(inf.se, 0.0);
        assert_eq!(inf.p_value, 1.0);

        let inf = inference(&[0.0, 0.0, 0.0], 0.5).unwrap();
        assert_eq!(inf.p_value, 0.0);

        assert!(inference(&[1.0], 0.5).is_err());
    }

    #[test]
    fn inference_scales_sd_by_sqrt_n() {
        let vals: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let sd = sample_sd(&vals);
        let inf = inference(&vals, 0.0).unwrap();
        assert_abs_diff_eq!(inf.se, sd / 10.0, epsilon = 1e-15);
    }

    #[test]
    fn inference_p_value_at_critical_ratio() {
        let vals: Vec<f64> = (0..50).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let se = sample_sd(&vals) / (50.0_f64).sqrt();
        let psi = Z_CRITICAL * se;
        let inf = inference(&vals, psi).unwrap();
        assert_abs_diff_eq!(inf.p_value, 0.05, epsilon = 1e-6);
    }
}
