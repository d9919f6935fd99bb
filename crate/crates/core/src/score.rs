//! Basis-function BIC: a decomposable, score-equivalent local score over
//! embedded blocks.
//!
//! The local score of a child is the chain-rule sum over its embedded columns
//! `X_1..X_w`, each regressed on every parent column plus the child's earlier
//! columns. Residual variances come straight from the shared covariance matrix.

use dashmap::DashMap;
use nalgebra::{DMatrix, DVector};

use crate::data::{BasisSpec, EmbeddedData};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Lower clamp on residual variances, keeping `ln σ²` finite for
/// deterministic children.
pub const VARIANCE_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreConfig {
    pub penalty_discount: f64,
    pub basis: BasisSpec,
    /// Added to the predictor covariance diagonal; 0 unless the caller asks.
    pub ridge: f64,
}

impl ScoreConfig {
    pub fn new(penalty_discount: f64, truncation: usize) -> Result<Self> {
        if !(penalty_discount > 0.0 && penalty_discount.is_finite()) {
            return Err(Error::Config(format!(
                "penalty discount must be positive, got {penalty_discount}"
            )));
        }
        Ok(ScoreConfig {
            penalty_discount,
            basis: BasisSpec::new(truncation)?,
            ridge: 0.0,
        })
    }
}

/// A decomposable local score, maximized by the searches.
pub trait LocalScore: Sync {
    fn num_variables(&self) -> usize;
    fn local_score(&self, child: usize, parents: &[usize]) -> Result<f64>;
}

fn solve_quadratic(cov: &DMatrix<f64>, target: usize, predictors: &[usize], ridge: f64) -> Option<f64> {
    let k = predictors.len();
    let a = DMatrix::from_fn(k, k, |i, j| {
        cov[(predictors[i], predictors[j])] + if i == j { ridge } else { 0.0 }
    });
    let b = DVector::from_fn(k, |i, _| cov[(predictors[i], target)]);
    let chol = a.cholesky()?;
    let x = chol.solve(&b);
    let explained = b.dot(&x);
    explained.is_finite().then_some(explained)
}

/// Residual variance of column `target` after linear regression (with
/// intercept) on the `predictors` columns: `Var(X) - Cov(X,P) Cov(P,P)^-1 Cov(P,X)`.
///
/// If the system is not positive definite a ridge of `1e-8 * trace / |P|` is
/// added once before giving up. The result is clamped below at [`VARIANCE_FLOOR`].
pub fn residual_variance(
    target: usize,
    predictors: &[usize],
    data: &EmbeddedData,
    ridge: f64,
) -> Result<f64> {
    residual_variance_cov(data.covariance(), target, predictors, ridge)
}

pub(crate) fn residual_variance_cov(
    cov: &DMatrix<f64>,
    target: usize,
    predictors: &[usize],
    ridge: f64,
) -> Result<f64> {
    if predictors.contains(&target) {
        return Err(Error::Config("target column is among its predictors".into()));
    }
    let var = cov[(target, target)];
    if predictors.is_empty() {
        return Ok(var.max(VARIANCE_FLOOR));
    }
    let explained = match solve_quadratic(cov, target, predictors, ridge) {
        Some(x) => x,
        None => {
            let trace: f64 = predictors.iter().map(|&p| cov[(p, p)]).sum();
            let extra = 1e-8 * trace / predictors.len() as f64;
            solve_quadratic(cov, target, predictors, ridge + extra).ok_or(Error::SingularSystem)?
        }
    };
    Ok((var - explained).max(VARIANCE_FLOOR))
}

/// `2L - c k ln N` with `L = -(N/2) ln(2π σ²) + 1`.
pub fn bic_from_variance(sigma2: f64, k: usize, n: usize, penalty_discount: f64) -> f64 {
    let nf = n as f64;
    let loglik = -(nf / 2.0) * (2.0 * std::f64::consts::PI * sigma2).ln() + 1.0;
    2.0 * loglik - penalty_discount * k as f64 * nf.ln()
}

/// BIC of one embedded column regressed on `predictors`; `k = |predictors|`,
/// the intercept is not penalized.
pub fn component_bic(
    target: usize,
    predictors: &[usize],
    data: &EmbeddedData,
    cfg: &ScoreConfig,
) -> Result<f64> {
    let n = data.num_rows();
    if n < predictors.len() + 2 {
        return Err(Error::Config(format!(
            "{n} rows cannot support a regression on {} predictors",
            predictors.len()
        )));
    }
    let s2 = residual_variance(target, predictors, data, cfg.ridge)?;
    Ok(bic_from_variance(s2, predictors.len(), n, cfg.penalty_discount))
}

/// Chain-rule conditional variances of `targets` given `predictors` and the
/// earlier targets, read off one Cholesky factor. `None` when the joint
/// covariance is not numerically positive definite.
fn chained_variances(cov: &DMatrix<f64>, predictors: &[usize], targets: &[usize]) -> Option<Vec<f64>> {
    let cols: Vec<usize> = predictors.iter().chain(targets).copied().collect();
    let m = cols.len();
    let a = DMatrix::from_fn(m, m, |i, j| cov[(cols[i], cols[j])]);
    let l = a.cholesky()?.unpack();
    let out: Vec<f64> = (predictors.len()..m).map(|i| l[(i, i)] * l[(i, i)]).collect();
    // a vanishing pivot means later columns were regressed on a singular system
    let min_rel = (predictors.len()..m)
        .map(|i| l[(i, i)] * l[(i, i)] / cov[(cols[i], cols[i])].max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);
    (out.iter().all(|v| v.is_finite()) && min_rel > 1e-12).then_some(out)
}

/// Local BF-BIC of `child` given `parents`.
pub fn local_bf_bic(child: usize, parents: &[usize], data: &EmbeddedData, cfg: &ScoreConfig) -> Result<f64> {
    if parents.contains(&child) {
        return Err(Error::Config("a variable cannot be its own parent".into()));
    }
    let mut sorted = parents.to_vec();
    sorted.sort_unstable();
    let predictors = data.columns_of(&sorted);
    let targets: Vec<usize> = data.block(child).collect();
    let n = data.num_rows();
    if n < predictors.len() + targets.len() + 1 {
        return Err(Error::Config(format!(
            "{n} rows cannot support a regression on {} predictors",
            predictors.len() + targets.len() - 1
        )));
    }

    if cfg.ridge == 0.0 {
        if let Some(vars) = chained_variances(data.covariance(), &predictors, &targets) {
            return Ok(vars
                .iter()
                .enumerate()
                .map(|(j, &s2)| {
                    bic_from_variance(s2.max(VARIANCE_FLOOR), predictors.len() + j, n, cfg.penalty_discount)
                })
                .sum());
        }
    }

    let mut preds = predictors;
    let mut total = 0.0;
    for &t in &targets {
        total += component_bic(t, &preds, data, cfg)?;
        preds.push(t);
    }
    Ok(total)
}

/// Concurrent memo of local scores keyed by `(child, sorted parents)`.
#[derive(Debug, Default)]
pub struct ScoreCache {
    map: DashMap<(usize, Vec<usize>), f64>,
}

impl ScoreCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get_or_try_insert(
        &self,
        child: usize,
        parents: &[usize],
        compute: impl FnOnce() -> Result<f64>,
    ) -> Result<f64> {
        let mut key = parents.to_vec();
        key.sort_unstable();
        if let Some(v) = self.map.get(&(child, key.clone())) {
            return Ok(*v);
        }
        let v = compute()?;
        self.map.insert((child, key), v);
        Ok(v)
    }
}

/// BF-BIC bound to a dataset, optionally memoized.
pub struct BfBicScore<'a> {
    data: &'a EmbeddedData,
    cfg: ScoreConfig,
    cache: Option<ScoreCache>,
}

impl<'a> BfBicScore<'a> {
    pub fn new(data: &'a EmbeddedData, cfg: ScoreConfig) -> Self {
        BfBicScore {
            data,
            cfg,
            cache: Some(ScoreCache::new()),
        }
    }

    pub fn without_cache(data: &'a EmbeddedData, cfg: ScoreConfig) -> Self {
        BfBicScore { data, cfg, cache: None }
    }

    pub fn config(&self) -> &ScoreConfig {
        &self.cfg
    }

    pub fn data(&self) -> &EmbeddedData {
        self.data
    }

    pub fn cache(&self) -> Option<&ScoreCache> {
        self.cache.as_ref()
    }
}

impl LocalScore for BfBicScore<'_> {
    fn num_variables(&self) -> usize {
        self.data.num_variables()
    }

    fn local_score(&self, child: usize, parents: &[usize]) -> Result<f64> {
        match &self.cache {
            Some(c) => c.get_or_try_insert(child, parents, || local_bf_bic(child, parents, self.data, &self.cfg)),
            None => local_bf_bic(child, parents, self.data, &self.cfg),
        }
    }
}

/// Sum of local scores of every node given its parents in the DAG `g`.
pub fn score_dag<S: LocalScore + ?Sized>(g: &Graph, score: &S) -> Result<f64> {
    g.topological_order()?;
    if g.num_nodes() != score.num_variables() {
        return Err(Error::VariableMismatch);
    }
    (0..g.num_nodes()).map(|v| score.local_score(v, &g.parents(v))).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_residual_variance() {
        // Var(X)=1, Cov(X,P)=(0.6,0), Cov(P,P)=I
        let cov = DMatrix::from_row_slice(3, 3, &[1.0, 0.6, 0.0, 0.6, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let s2 = residual_variance_cov(&cov, 0, &[1, 2], 0.0).unwrap();
        assert!((s2 - 0.64).abs() < 1e-15);
        assert_eq!(residual_variance_cov(&cov, 0, &[], 0.0).unwrap(), 1.0);
    }

    #[test]
    fn duplicate_predictor_hits_floor() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 2.0, 2.0, 2.0]);
        assert_eq!(residual_variance_cov(&cov, 0, &[1], 0.0).unwrap(), VARIANCE_FLOOR);
    }

    #[test]
    fn bic_formula() {
        let s = bic_from_variance(1.0, 2, 100, 1.0);
        let want = 2.0 * (-50.0 * (2.0 * std::f64::consts::PI).ln() + 1.0) - 2.0 * 100f64.ln();
        assert!((s - want).abs() < 1e-12);
        assert!((s - (-190.998)).abs() < 1e-3);
        let doubled = bic_from_variance(1.0, 2, 100, 2.0);
        assert!((s - doubled - 2.0 * 100f64.ln()).abs() < 1e-12);
        let k0 = bic_from_variance(1.0, 0, 100, 5.0);
        assert_eq!(k0, 2.0 * (-50.0 * (2.0 * std::f64::consts::PI).ln() + 1.0));
    }

    #[test]
    fn bad_penalty_rejected() {
        assert!(ScoreConfig::new(0.0, 3).is_err());
        assert!(ScoreConfig::new(-1.0, 3).is_err());
        assert!(ScoreConfig::new(1.0, 0).is_err());
    }
}
