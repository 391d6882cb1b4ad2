//! Observation assembly: market window, normalized portfolio vector, and
//! legality mask, flattened for MLP consumption.

use super::action::LegalMask;
use crate::error::{Error, Result};
use crate::exec::{PortfolioState, RiskConfig};

/// Portfolio-state vector length.
pub const D_PORT: usize = 10;

/// Agent-facing observation. `flat` is the row-major market window, then
/// the portfolio vector, then the mask bits as 0/1 reals; its length is
/// `window * d_feat + D_PORT + n_actions`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub market: Vec<f64>,
    pub window: usize,
    pub d_feat: usize,
    pub portfolio: Vec<f64>,
    pub mask: LegalMask,
    pub flat: Vec<f64>,
}

/// Flat input dimension for a given window, feature width, and action count.
pub fn flat_dim(window: usize, d_feat: usize, n_actions: usize) -> usize {
    window * d_feat + D_PORT + n_actions
}

/// Scale-free account summary: cash/equity/unrealized/realized relative to
/// initial capital, margin utilization, direction sign, lots relative to the
/// depth-cap maximum, both scaling depths relative to the cap, drawdown.
pub fn portfolio_vector(state: &PortfolioState, risk: &RiskConfig) -> Vec<f64> {
    let c0 = state.initial_capital;
    let cap = risk.depth_cap.max(1) as f64;
    vec![
        state.cash / c0,
        state.equity / c0,
        state.unrealized_pnl / c0,
        state.realized_pnl / c0,
        state.margin_utilization,
        state.position.direction.sign(),
        state.position.lots / risk.max_lots(),
        state.position.pyramid_depth as f64 / cap,
        state.position.martingale_depth as f64 / cap,
        state.current_drawdown,
    ]
}

/// Assemble an observation from exactly `window` feature rows ending at the
/// decision bar.
pub fn build_observation(
    market_window: &[f64],
    window: usize,
    d_feat: usize,
    state: &PortfolioState,
    risk: &RiskConfig,
    mask: LegalMask,
) -> Result<Observation> {
    if market_window.len() != window * d_feat {
        return Err(Error::Contract(format!(
            "observation window must hold {} values ({} rows x {} features), got {}",
            window * d_feat,
            window,
            d_feat,
            market_window.len()
        )));
    }
    let portfolio = portfolio_vector(state, risk);
    debug_assert_eq!(portfolio.len(), D_PORT);
    let expected = flat_dim(window, d_feat, mask.len());
    let mut flat = Vec::with_capacity(expected);
    flat.extend_from_slice(market_window);
    flat.extend_from_slice(&portfolio);
    flat.extend(mask.as_f64());
    if flat.len() != expected {
        return Err(Error::Contract(format!(
            "flat observation length {} does not match the declared dimension {expected}",
            flat.len()
        )));
    }
    Ok(Observation {
        market: market_window.to_vec(),
        window,
        d_feat,
        portfolio,
        mask,
        flat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_dim_instances() {
        // Canonical pipeline: 24-row window over 19 features plus the
        // 10-entry portfolio vector plus the mask.
        assert_eq!(flat_dim(24, 19, 10), 476);
        assert_eq!(flat_dim(24, 19, 3), 469);
    }

    #[test]
    fn layout_is_market_then_portfolio_then_mask() {
        let state = PortfolioState::new(100_000.0, 1.1);
        let risk = RiskConfig::default();
        let window = vec![0.5f64; 2 * 3];
        let mask = LegalMask::new(vec![true, false, true]);
        let obs = build_observation(&window, 2, 3, &state, &risk, mask).unwrap();
        assert_eq!(obs.flat.len(), 2 * 3 + D_PORT + 3);
        assert_eq!(&obs.flat[..6], window.as_slice());
        assert_eq!(&obs.flat[6..16], obs.portfolio.as_slice());
        assert_eq!(&obs.flat[16..], &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn initial_state_portfolio_vector() {
        let state = PortfolioState::new(100_000.0, 1.1);
        let v = portfolio_vector(&state, &RiskConfig::default());
        assert_eq!(v, vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn wrong_row_count_is_contract_error() {
        let state = PortfolioState::new(100_000.0, 1.1);
        let risk = RiskConfig::default();
        let err = build_observation(&vec![0.0; 5], 2, 3, &state, &risk,
            LegalMask::new(vec![true]));
        assert!(err.is_err());
    }
}
