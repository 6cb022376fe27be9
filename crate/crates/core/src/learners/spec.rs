use std::fmt;

use serde::Serialize;

use crate::auction::{BidGrid, BidProbabilityVector, ThresholdVector, ValueDistribution};
use crate::error::{domain, Result};
use crate::learners::{
    default_eta_alg1, default_eta_alg2, new_alg1, new_alg2, new_lazy_ftrl, new_mean_based_ftl, wrap_misreport,
    Learner, MisreportMap, StepSizePolicy, DEFAULT_BUCKETS,
};

/// A learner description as written in configs, e.g. `alg2(eta=0.01)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerSpec {
    Alg1 { eta: Option<f64> },
    Alg1Harmonic { fbar: f64, dmin: f64 },
    Alg2 { eta: Option<f64> },
    Ftl { buckets: usize },
    LazyFtrl { eta: Option<f64> },
    Misreport { inner: Box<LearnerSpec>, map: MisreportMap },
}

impl LearnerSpec {
    pub fn ftl() -> Self {
        Self::Ftl { buckets: DEFAULT_BUCKETS }
    }

    /// Instantiates the learner from the all-zero probability vector (or the
    /// all-one threshold vector). A missing step size falls back to the
    /// horizon-tuned default, which needs `horizon`.
    pub fn build(&self, grid: &BidGrid, dist: &ValueDistribution, horizon: Option<u64>) -> Result<Box<dyn Learner>> {
        let k = grid.k();
        let need = |eta: Option<f64>, default: &dyn Fn(u64) -> f64| -> Result<f64> {
            match (eta, horizon) {
                (Some(eta), _) => Ok(eta),
                (None, Some(t)) => Ok(default(t)),
                (None, None) => Err(domain(format!("`{self}` has no step size and the horizon is unknown"))),
            }
        };
        Ok(match self {
            Self::Alg1 { eta } => {
                let eta = need(*eta, &|t| default_eta_alg1(k, t))?;
                Box::new(new_alg1(grid, dist, &BidProbabilityVector::zeros(k), StepSizePolicy::Fixed(eta))?)
            }
            Self::Alg1Harmonic { fbar, dmin } => Box::new(new_alg1(
                grid,
                dist,
                &BidProbabilityVector::zeros(k),
                StepSizePolicy::Harmonic { fbar: *fbar, dmin: *dmin },
            )?),
            Self::Alg2 { eta } => {
                let fbar = dist.density_bound();
                let eta = need(*eta, &|t| default_eta_alg2(fbar, t))?;
                Box::new(new_alg2(grid, &ThresholdVector::ones(k), eta)?)
            }
            Self::Ftl { buckets } => Box::new(new_mean_based_ftl(grid, *buckets)?),
            Self::LazyFtrl { eta } => {
                let eta = need(*eta, &|t| default_eta_alg1(k, t))?;
                Box::new(new_lazy_ftrl(grid, dist, &BidProbabilityVector::zeros(k), eta)?)
            }
            Self::Misreport { inner, map } => Box::new(wrap_misreport(inner.build(grid, dist, horizon)?, map.clone())),
        })
    }

    /// The same learner without any misreport wrapper.
    pub fn truthful(&self) -> &LearnerSpec {
        match self {
            Self::Misreport { inner, .. } => inner.truthful(),
            other => other,
        }
    }
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eta = |f: &mut fmt::Formatter<'_>, name: &str, eta: &Option<f64>| match eta {
            Some(e) => write!(f, "{name}(eta={e})"),
            None => write!(f, "{name}"),
        };
        match self {
            Self::Alg1 { eta: e } => eta(f, "alg1", e),
            Self::Alg1Harmonic { fbar, dmin } => write!(f, "alg1(harmonic,fbar={fbar},dmin={dmin})"),
            Self::Alg2 { eta: e } => eta(f, "alg2", e),
            Self::Ftl { buckets } => write!(f, "ftl(buckets={buckets})"),
            Self::LazyFtrl { eta: e } => eta(f, "lazyftrl", e),
            Self::Misreport { inner, map } => write!(f, "misreport({inner}, map={map})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_need_a_horizon() {
        let g = BidGrid::uniform(2, 0.25).unwrap();
        let u = ValueDistribution::Uniform;
        let spec = LearnerSpec::Alg1 { eta: None };
        assert!(spec.build(&g, &u, None).is_err());
        let l = spec.build(&g, &u, Some(10_000)).unwrap();
        assert!((l.step_size().unwrap() - 0.01).abs() < 1e-15);
        let l = LearnerSpec::Alg2 { eta: None }.build(&g, &u, Some(10_000)).unwrap();
        assert!((l.step_size().unwrap() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn display_round_trips_the_grammar_shape() {
        let spec = LearnerSpec::Misreport {
            inner: Box::new(LearnerSpec::Alg2 { eta: Some(0.01) }),
            map: MisreportMap::shade_above(0.5, 0.25).unwrap(),
        };
        assert_eq!(spec.to_string(), "misreport(alg2(eta=0.01), map=[0:0, 0.5:0.5, 0.5:0.25, 1:0.25])");
        assert_eq!(spec.truthful(), &LearnerSpec::Alg2 { eta: Some(0.01) });
    }
}
