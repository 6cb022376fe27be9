use crate::environments::Trace;
use crate::error::{domain, Result};
use crate::numeric::neumaier;

/// Σ_t u(s_t ∘ M | F, h_t) − Σ_t u(s_t | F, h_t) for a misreporting run and
/// its truthful twin.
///
/// Both traces must face the same h-sequence, which holds whenever the
/// competition does not react to the buyer's bids. The misreporting trace
/// evaluates the composed step strategy exactly, piece by piece.
pub fn ic_gap(truthful: &Trace, misreport: &Trace) -> Result<f64> {
    if truthful.rows.len() != misreport.rows.len() {
        return Err(domain(format!(
            "traces have different horizons ({} vs {})",
            truthful.rows.len(),
            misreport.rows.len()
        )));
    }
    if let Some((a, _)) = truthful.rows.iter().zip(&misreport.rows).find(|(a, b)| a.h_index != b.h_index) {
        return Err(domain(format!("h-sequences differ at round {}", a.t)));
    }
    Ok(neumaier(truthful.rows.iter().zip(&misreport.rows).map(|(a, b)| b.exp_utility - a.exp_utility)))
}
