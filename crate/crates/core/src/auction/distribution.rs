use std::fmt;

use rand::Rng;

use crate::error::{domain, Result};
use crate::numeric;

/// Bisection tolerance for inverting tabulated CDFs.
pub const INVERSE_TOL: f64 = 1e-12;

/// An atomless value distribution on [0, 1] with bounded density.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueDistribution {
    /// Uniform on [0, 1].
    Uniform,
    /// Uniform on [a, b] ⊆ [0, 1].
    UniformInterval { a: f64, b: f64 },
    /// Equal revenue 1/8 for every price in [1/8, 1 − δ], with a linear tail
    /// that brings the CDF to 1 at v = 1.
    EquiRevenue { delta: f64 },
    /// Piecewise-linear CDF through (x_k, y_k), starting at (0, 0) and ending at (1, 1).
    PiecewiseLinear { xs: Vec<f64>, ys: Vec<f64> },
}

impl ValueDistribution {
    pub fn uniform_interval(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(domain(format!("uniform({a},{b}) needs 0 ≤ a < b ≤ 1")));
        }
        Ok(Self::UniformInterval { a, b })
    }

    pub fn equi_revenue(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.875) {
            return Err(domain(format!("equirev({delta}) needs 0 < δ < 7/8")));
        }
        Ok(Self::EquiRevenue { delta })
    }

    pub fn piecewise_linear(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(domain("pwl needs at least two breakpoints"));
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
        if xs[0] != 0.0 || ys[0] != 0.0 {
            return Err(domain("pwl must start at 0:0"));
        }
        if *xs.last().unwrap() != 1.0 || *ys.last().unwrap() != 1.0 {
            return Err(domain("pwl must end at 1:1"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("pwl breakpoints must be strictly increasing in x"));
        }
        if ys.windows(2).any(|w| w[1] < w[0]) {
            return Err(domain("pwl CDF values must be non-decreasing"));
        }
        Ok(Self::PiecewiseLinear { xs, ys })
    }

    /// F(x), with F = 0 left of 0 and F = 1 right of 1.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match self {
            Self::Uniform => x,
            Self::UniformInterval { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Self::EquiRevenue { delta } => {
                let knee = 1.0 - delta;
                if x <= 0.125 {
                    0.0
                } else if x < knee {
                    1.0 - 1.0 / (8.0 * x)
                } else {
                    1.0 - (1.0 - x) / (8.0 * knee * delta)
                }
            }
            Self::PiecewiseLinear { xs, ys } => {
                let k = segment_of(xs, x);
                ys[k] + (ys[k + 1] - ys[k]) * (x - xs[k]) / (xs[k + 1] - xs[k])
            }
        }
    }

    /// Right-derivative of F.
    pub fn density(&self, x: f64) -> f64 {
        if !(0.0..1.0).contains(&x) {
            return 0.0;
        }
        match self {
            Self::Uniform => 1.0,
            Self::UniformInterval { a, b } => {
                if x >= *a && x < *b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Self::EquiRevenue { delta } => {
                let knee = 1.0 - delta;
                if x < 0.125 {
                    0.0
                } else if x < knee {
                    1.0 / (8.0 * x * x)
                } else {
                    1.0 / (8.0 * knee * delta)
                }
            }
            Self::PiecewiseLinear { xs, ys } => {
                let k = segment_of(xs, x);
                (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])
            }
        }
    }

    /// f̄, an upper bound on the density.
    pub fn density_bound(&self) -> f64 {
        match self {
            Self::Uniform => 1.0,
            Self::UniformInterval { a, b } => 1.0 / (b - a),
            Self::EquiRevenue { delta } => f64::max(8.0, 1.0 / (8.0 * (1.0 - delta) * delta)),
            Self::PiecewiseLinear { xs, ys } => xs
                .windows(2)
                .zip(ys.windows(2))
                .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
                .fold(0.0, f64::max),
        }
    }

    /// Points where the density may jump; used to split quadratures.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Uniform => vec![],
            Self::UniformInterval { a, b } => vec![*a, *b],
            Self::EquiRevenue { delta } => vec![0.125, 1.0 - delta],
            Self::PiecewiseLinear { xs, .. } => xs[1..xs.len() - 1].to_vec(),
        }
    }

    /// F⁻(y) = inf{v ∈ [0,1] : F(v) ≥ y}.
    pub fn generalized_inverse(&self, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&y) {
            return Err(domain(format!("F⁻ is defined on [0,1], got {y}")));
        }
        Ok(self.inverse(y))
    }

    pub(crate) fn inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Uniform => y.min(1.0),
            Self::UniformInterval { a, b } => (a + y * (b - a)).min(*b),
            Self::EquiRevenue { delta } => {
                let knee = 1.0 - delta;
                let y_knee = 1.0 - 1.0 / (8.0 * knee);
                if y <= y_knee {
                    1.0 / (8.0 * (1.0 - y))
                } else {
                    1.0 - (1.0 - y) * 8.0 * knee * delta
                }
            }
            Self::PiecewiseLinear { .. } => {
                numeric::bisect_first_true(|v| self.cdf(v) >= y, 0.0, 1.0, INVERSE_TOL)
            }
        }
    }

    /// G(x) = ∫_x^1 F⁻(u) du.
    pub fn tail_integral(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(domain(format!("G is defined on [0,1], got {x}")));
        }
        Ok(self.g(x))
    }

    pub(crate) fn g(&self, x: f64) -> f64 {
        if x >= 1.0 {
            return 0.0;
        }
        let r = 1.0 - x;
        match self {
            Self::Uniform => 0.5 * (1.0 - x * x),
            Self::UniformInterval { a, b } => a * r + 0.5 * (b - a) * (1.0 - x * x),
            Self::EquiRevenue { delta } => {
                let knee = 1.0 - delta;
                let c = 8.0 * knee * delta;
                let y_knee = 1.0 - 1.0 / (8.0 * knee);
                if x >= y_knee {
                    r - 0.5 * c * r * r
                } else {
                    let rk = 1.0 - y_knee;
                    let upper = rk - 0.5 * c * rk * rk;
                    0.125 * (r.ln() - rk.ln()) + upper
                }
            }
            Self::PiecewiseLinear { xs, ys } => {
                let mut total = 0.0;
                for k in 0..xs.len() - 1 {
                    let (y0, y1) = (ys[k], ys[k + 1]);
                    if y1 <= y0 || y1 <= x {
                        continue;
                    }
                    let lo = x.max(y0);
                    let slope = (xs[k + 1] - xs[k]) / (y1 - y0);
                    let at_lo = xs[k] + (lo - y0) * slope;
                    total += 0.5 * (at_lo + xs[k + 1]) * (y1 - lo);
                }
                total
            }
        }
    }

    /// ∫_x^1 (1 − F(t)) dt.
    pub fn survival_integral(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self {
            Self::Uniform => 0.5 * (1.0 - x) * (1.0 - x),
            Self::UniformInterval { a, b } => {
                let flat = (a - x).max(0.0);
                let lo = x.max(*a);
                let ramp = if lo < *b { 0.5 * (b - lo) * (b - lo) / (b - a) } else { 0.0 };
                flat + ramp
            }
            Self::EquiRevenue { delta } => {
                let knee = 1.0 - delta;
                let c = 8.0 * knee * delta;
                let mut total = 0.0;
                if x < 0.125 {
                    total += 0.125 - x;
                }
                let lo = x.max(0.125);
                if lo < knee {
                    total += 0.125 * (knee.ln() - lo.ln());
                }
                let lo = x.max(knee);
                total += 0.5 * (1.0 - lo) * (1.0 - lo) / c;
                total
            }
            Self::PiecewiseLinear { xs, ys } => {
                let mut total = 0.0;
                for k in 0..xs.len() - 1 {
                    if xs[k + 1] <= x {
                        continue;
                    }
                    let lo = x.max(xs[k]);
                    let s_lo = 1.0 - self.cdf(lo);
                    let s_hi = 1.0 - ys[k + 1];
                    total += 0.5 * (s_lo + s_hi) * (xs[k + 1] - lo);
                }
                total
            }
        }
    }

    /// E[v].
    pub fn mean(&self) -> f64 {
        self.g(0.0)
    }

    /// E[v · 1(lo < v ≤ hi)], via G at the quantiles of the endpoints.
    pub fn partial_mean(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        self.g(self.cdf(lo)) - self.g(self.cdf(hi))
    }

    /// Inverse-transform sampling.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.inverse(u)
    }
}

fn segment_of(xs: &[f64], x: f64) -> usize {
    let k = xs.partition_point(|&b| b <= x);
    k.saturating_sub(1).min(xs.len() - 2)
}

impl fmt::Display for ValueDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => write!(f, "uniform"),
            Self::UniformInterval { a, b } => write!(f, "uniform({a},{b})"),
            Self::EquiRevenue { delta } => write!(f, "equirev({delta})"),
            Self::PiecewiseLinear { xs, ys } => {
                write!(f, "pwl(")?;
                for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}:{y}")?;
                }
                write!(f, ")")
            }
        }
    }
}
