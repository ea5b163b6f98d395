//! Local surrogate explanations of the decision model around a point.
//!
//! Perturbed neighbors of x0 are drawn inside the proximity regions of its
//! components, labelled by the model (1 when it returns the target
//! solution), weighted by an exponential kernel over δ, and fitted with a
//! weighted ridge regression. Columns are standardized under the kernel
//! weights before the fit, so the reported weights are comparable across
//! parameters of different kinds and spreads.
//!
//! Components named as free are hypothetical (filled in rather than
//! measured) and are resampled over their whole declared domain instead of
//! their proximity region.

mod linalg;

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decision_model::DecisionModel;
use crate::error::{Error, Result};
use crate::feature_space::{sample_anywhere, sample_component, seeded, CaseVector, DomainSchema, Metric, ParameterDef, ParameterKind, SolutionId, Value};
use crate::scalar::{cmp_scalar, Scalar};

/// Probability that a single component is resampled in a perturbation.
const RESAMPLE_PROBABILITY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct PerturbationConfig<T> {
    pub samples: usize,
    pub kernel_width: T,
    pub ridge: T,
    pub seed: u64,
}

impl<T: Scalar> Default for PerturbationConfig<T> {
    fn default() -> Self {
        Self {
            samples: 1000,
            kernel_width: T::of(0.25),
            ridge: T::of(1e-3),
            seed: 0,
        }
    }
}

impl<T: Scalar> PerturbationConfig<T> {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 10 {
            return Err(Error::Argument(format!("need at least 10 perturbation samples, got {}", self.samples)));
        }
        if !(self.kernel_width > T::zero()) || !self.kernel_width.is_finite() {
            return Err(Error::Argument("kernel width must be positive".into()));
        }
        if !(self.ridge >= T::zero()) || !self.ridge.is_finite() {
            return Err(Error::Argument("ridge strength must be non-negative".into()));
        }
        Ok(())
    }
}

/// Local weights of every schema parameter for one (point, target) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Explanation<T> {
    pub point: CaseVector<T>,
    pub target: SolutionId,
    pub weights: BTreeMap<String, T>,
    pub intercept: T,
    /// Kernel-weighted share of perturbations the model labelled as target.
    pub target_share: T,
    pub config: PerturbationConfig<T>,
}

impl<T: Scalar> Explanation<T> {
    pub fn weight(&self, name: &str) -> T {
        self.weights.get(name).copied().unwrap_or_else(T::zero)
    }
}

/// Interpretable encoding of one component, relative to x0 for labels.
fn encode<T: Scalar>(p: &ParameterDef<T>, value: &Value<T>, origin: &Value<T>) -> T {
    match (&p.kind, value) {
        (ParameterKind::Numeric { range, .. }, Value::Numeric(iv)) => (iv.midpoint() - range.lo) / range.width(),
        (ParameterKind::Ordinal { levels, .. }, Value::Ordinal(r)) => {
            T::of_usize(r.mid2()) / T::of_usize(2 * (levels.len() - 1))
        }
        (ParameterKind::Categorical { .. }, Value::Categorical(_)) => {
            if value.intersects(origin) {
                T::one()
            } else {
                T::zero()
            }
        }
        _ => T::zero(),
    }
}

/// Fits a local surrogate for `model` at the full vector `x0`.
pub fn explain_local<T: Scalar>(
    model: &dyn DecisionModel<T>,
    schema: &DomainSchema<T>,
    metric: &dyn Metric<T>,
    x0: &CaseVector<T>,
    target: &SolutionId,
    config: &PerturbationConfig<T>,
) -> Result<Explanation<T>> {
    explain_local_with_free(model, schema, metric, x0, target, config, &BTreeSet::new())
}

/// [`explain_local`] where the parameters in `free` range over their whole domain.
pub fn explain_local_with_free<T: Scalar>(
    model: &dyn DecisionModel<T>,
    schema: &DomainSchema<T>,
    metric: &dyn Metric<T>,
    x0: &CaseVector<T>,
    target: &SolutionId,
    config: &PerturbationConfig<T>,
    free: &BTreeSet<String>,
) -> Result<Explanation<T>> {
    if let Some(name) = free.iter().find(|n| schema.parameter(n).is_err()) {
        return Err(Error::Argument(format!("unknown free parameter `{name}`")));
    }
    config.validate()?;
    schema.check_vector(x0)?;
    if !schema.is_full(x0) {
        return Err(Error::Precondition("explanation point must assign every parameter".into()));
    }
    let params = schema.parameters();
    let n = params.len();
    let rows = config.samples;
    let mut rng = seeded(config.seed);

    let mut xs = Vec::with_capacity(rows * n);
    let mut ys = Vec::with_capacity(rows);
    let mut pis = Vec::with_capacity(rows);
    let sigma2 = config.kernel_width * config.kernel_width;
    for _ in 0..rows {
        let mut z = x0.clone();
        for p in params {
            if rng.gen_bool(RESAMPLE_PROBABILITY) {
                let value = if free.contains(&p.name) {
                    sample_anywhere(p, &mut rng)
                } else {
                    sample_component(p, x0.get(&p.name).expect("x0 is full"), &mut rng)
                };
                z.set(p.name.clone(), value);
            }
        }
        for p in params {
            let origin = x0.get(&p.name).expect("x0 is full");
            xs.push(encode(p, z.get(&p.name).expect("z is full"), origin));
        }
        ys.push(if &model.classify(&z) == target { T::one() } else { T::zero() });
        let d = metric.distance(schema, &z, x0);
        pis.push((-(d * d) / sigma2).exp());
    }

    let total: T = pis.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::Precondition("kernel weights vanished; widen the kernel".into()));
    }
    for w in &mut pis {
        *w = *w / total;
    }

    let y_mean: T = ys.iter().zip(&pis).map(|(&y, &w)| w * y).sum();
    let mut means = vec![T::zero(); n];
    for r in 0..rows {
        for j in 0..n {
            means[j] = means[j] + pis[r] * xs[r * n + j];
        }
    }
    let mut sds = vec![T::zero(); n];
    for r in 0..rows {
        for j in 0..n {
            let c = xs[r * n + j] - means[j];
            sds[j] = sds[j] + pis[r] * c * c;
        }
    }
    let eps = T::of(1e-9);
    let active: Vec<usize> = (0..n)
        .filter(|&j| {
            sds[j] = sds[j].sqrt();
            sds[j] > eps
        })
        .collect();

    let m = active.len();
    let mut weights: BTreeMap<String, T> = params.iter().map(|p| (p.name.clone(), T::zero())).collect();
    if m > 0 {
        let mut a = vec![T::zero(); m * m];
        let mut b = vec![T::zero(); m];
        let mut zrow = vec![T::zero(); m];
        for r in 0..rows {
            for (k, &j) in active.iter().enumerate() {
                zrow[k] = (xs[r * n + j] - means[j]) / sds[j];
            }
            let w = pis[r];
            let yc = ys[r] - y_mean;
            for i in 0..m {
                b[i] = b[i] + w * zrow[i] * yc;
                for k in 0..=i {
                    a[i * m + k] = a[i * m + k] + w * zrow[i] * zrow[k];
                }
            }
        }
        for i in 0..m {
            for k in 0..i {
                a[k * m + i] = a[i * m + k];
            }
        }
        let solved = solve_ridge(&a, &b, m, config.ridge)
            .ok_or_else(|| Error::Precondition("surrogate system is singular".into()))?;
        for (k, &j) in active.iter().enumerate() {
            weights.insert(params[j].name.clone(), solved[k]);
        }
    }

    Ok(Explanation {
        point: x0.clone(),
        target: target.clone(),
        weights,
        intercept: y_mean,
        target_share: y_mean,
        config: *config,
    })
}

/// Adds `ridge` to the diagonal; retries with a small jitter if the
/// system is still not positive definite (exactly collinear columns).
fn solve_ridge<T: Scalar>(a: &[T], b: &[T], m: usize, ridge: T) -> Option<Vec<T>> {
    let mut lambda = ridge;
    for _ in 0..3 {
        let mut reg = a.to_vec();
        for i in 0..m {
            reg[i * m + i] = reg[i * m + i] + lambda;
        }
        if let Some(x) = linalg::cholesky_solve(&reg, b, m) {
            return Some(x);
        }
        lambda = lambda.max(T::of(1e-8)) * T::of(100.0);
    }
    None
}

/// Parameters ordered by decreasing |w|, ties broken by name; `asked` are
/// dropped and, when given, only names in `restrict_to` are kept.
pub fn rank_parameters_for_questioning<T: Scalar>(
    explanation: &Explanation<T>,
    asked: &BTreeSet<String>,
    restrict_to: Option<&BTreeSet<String>>,
) -> Vec<String> {
    let mut out: Vec<(&String, T)> = explanation
        .weights
        .iter()
        .filter(|(name, _)| !asked.contains(*name))
        .filter(|(name, _)| restrict_to.is_none_or(|r| r.contains(*name)))
        .map(|(name, w)| (name, w.abs()))
        .collect();
    out.sort_by(|a, b| cmp_scalar(&b.1, &a.1).then_with(|| a.0.cmp(b.0)));
    out.into_iter().map(|(n, _)| n.clone()).collect()
}
