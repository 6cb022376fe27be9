use crate::auction::{
    BidGrid, BidProbabilityVector, CompetingBidDistribution, ThresholdVector, ValueDistribution,
};
use crate::error::{invariant, Result};
use crate::numeric::{Accumulator, COMPENSATION_THRESHOLD};

fn check_len(grid: &BidGrid, p: &BidProbabilityVector) -> Result<()> {
    if p.k() != grid.k() {
        return Err(invariant(format!("vector of length {} on a grid with K = {}", p.k(), grid.k())));
    }
    Ok(())
}

/// Suffix sums S_i = Σ_{j ≥ i} b_j (p_j − p_{j+1}) for i = 0..=K.
fn payment_suffix(grid: &BidGrid, p: &BidProbabilityVector) -> Vec<f64> {
    let k = grid.k();
    let mut out = vec![0.0; k + 1];
    if k > COMPENSATION_THRESHOLD {
        let mut acc = Accumulator::default();
        for j in (0..=k).rev() {
            acc.add(grid.bid(j) * (p.get(j) - p.get(j + 1)));
            out[j] = acc.value();
        }
    } else {
        let mut acc = 0.0;
        for j in (0..=k).rev() {
            acc += grid.bid(j) * (p.get(j) - p.get(j + 1));
            out[j] = acc;
        }
    }
    out
}

/// u(p | F, h = b_i) = G(1 − p_i) − Σ_{j ≥ i} b_j (p_j − p_{j+1}).
pub fn utility_against(
    grid: &BidGrid,
    dist: &ValueDistribution,
    p: &BidProbabilityVector,
    i: usize,
) -> Result<f64> {
    check_len(grid, p)?;
    grid.check_index(i)?;
    let k = grid.k();
    let mut pay = 0.0;
    if k > COMPENSATION_THRESHOLD {
        let mut acc = Accumulator::default();
        for j in i..=k {
            acc.add(grid.bid(j) * (p.get(j) - p.get(j + 1)));
        }
        pay = acc.value();
    } else {
        for j in i..=k {
            pay += grid.bid(j) * (p.get(j) - p.get(j + 1));
        }
    }
    Ok(dist.g(1.0 - p.get(i)) - pay)
}

/// u(p | F, d) = Σ_i d_i · u(p | F, b_i).
pub fn expected_utility(
    grid: &BidGrid,
    dist: &ValueDistribution,
    d: &CompetingBidDistribution,
    p: &BidProbabilityVector,
) -> Result<f64> {
    check_len(grid, p)?;
    if d.k() != grid.k() {
        return Err(invariant("competing-bid distribution and grid disagree on K"));
    }
    let suffix = payment_suffix(grid, p);
    let terms = d
        .d()
        .iter()
        .enumerate()
        .map(|(i, &di)| if di == 0.0 { 0.0 } else { di * (dist.g(1.0 - p.get(i)) - suffix[i]) });
    Ok(crate::numeric::sum(terms.collect::<Vec<_>>()))
}

/// ∇_p u(p | F, b_i): 0 below i, F⁻(1 − p_i) − b_i at i, −(b_j − b_{j−1}) above.
pub fn utility_gradient(
    grid: &BidGrid,
    dist: &ValueDistribution,
    p: &BidProbabilityVector,
    i: usize,
) -> Result<Vec<f64>> {
    check_len(grid, p)?;
    grid.check_index(i)?;
    Ok(gradient_unchecked(grid, dist, p, i))
}

pub(crate) fn gradient_unchecked(
    grid: &BidGrid,
    dist: &ValueDistribution,
    p: &BidProbabilityVector,
    i: usize,
) -> Vec<f64> {
    (1..=grid.k())
        .map(|j| {
            if j < i {
                0.0
            } else if j == i {
                dist.inverse(1.0 - p.get(j)) - grid.bid(j)
            } else {
                -grid.gap(j)
            }
        })
        .collect()
}

/// rev(p, b_i) = b_i p_i + Σ_{j > i} (b_j − b_{j−1}) p_j; on a uniform grid the
/// tail is ε Σ_{j>i} p_j.
pub fn expected_revenue(grid: &BidGrid, p: &BidProbabilityVector, i: usize) -> Result<f64> {
    check_len(grid, p)?;
    grid.check_index(i)?;
    Ok(revenue_unchecked(grid, p, i))
}

pub(crate) fn revenue_unchecked(grid: &BidGrid, p: &BidProbabilityVector, i: usize) -> f64 {
    let k = grid.k();
    let head = grid.bid(i) * p.get(i);
    let tail = if grid.is_uniform() {
        let eps = grid.gap(1);
        let s = if k - i > COMPENSATION_THRESHOLD {
            crate::numeric::neumaier((i + 1..=k).map(|j| p.get(j)))
        } else {
            (i + 1..=k).map(|j| p.get(j)).sum::<f64>()
        };
        eps * s
    } else {
        (i + 1..=k).map(|j| grid.gap(j) * p.get(j)).sum::<f64>()
    };
    head + tail
}

/// Best response to d: the pointwise argmax of (v − b_j)·D_j, ties to
/// the smaller bid, returned as thresholds.
pub fn single_shot_best_response(grid: &BidGrid, d: &CompetingBidDistribution) -> Result<ThresholdVector> {
    if d.k() != grid.k() {
        return Err(invariant("competing-bid distribution and grid disagree on K"));
    }
    let k = grid.k();
    let cum = d.cumulative();
    let mut v = vec![1.0; k];
    let mut current = 0usize;
    let mut at = 0.0f64;
    loop {
        // Next line to overtake `current`: earliest crossing, steepest among equals.
        let mut best: Option<(f64, usize)> = None;
        for j in current + 1..=k {
            if cum[j] <= cum[current] {
                continue;
            }
            let x = (grid.bid(j) * cum[j] - grid.bid(current) * cum[current]) / (cum[j] - cum[current]);
            let x = x.max(at);
            match best {
                Some((bx, _)) if x > bx => {}
                Some((bx, bj)) if x == bx && cum[j] <= cum[bj] => {}
                _ => best = Some((x, j)),
            }
        }
        match best {
            Some((x, j)) if x < 1.0 => {
                for slot in v.iter_mut().take(j).skip(current) {
                    *slot = x;
                }
                current = j;
                at = x;
            }
            _ => break,
        }
    }
    let mut prev = 0.0f64;
    for (j, x) in v.iter_mut().enumerate() {
        *x = x.max(grid.bid(j + 1)).max(prev).min(1.0);
        prev = *x;
    }
    ThresholdVector::new(v, grid)
}
