//! Legality masks, recomputed from the current account state at every step.

use super::action::{Action, ActionMode, LegalMask, SimpleAction, EXTENDED_ACTIONS};
use crate::exec::{extended_action_legal, PortfolioState, RiskConfig};

/// Legality vector over the 10 extended actions.
pub fn compute_extended_mask(state: &PortfolioState, r: &RiskConfig) -> LegalMask {
    LegalMask::new(
        EXTENDED_ACTIONS.iter().map(|&a| extended_action_legal(state, r, a)).collect(),
    )
}

/// Map a simplified target action onto the extended operation that reaches
/// the target from the current position in one step.
pub fn adapt_simplified(a: SimpleAction, state: &PortfolioState) -> Action {
    use crate::exec::Direction;
    let dir = state.position.direction;
    match a {
        SimpleAction::Hold => Action::Hold,
        SimpleAction::TargetLong => match dir {
            Direction::Flat => Action::OpenLong,
            Direction::Short => Action::Reverse,
            Direction::Long => Action::Hold,
        },
        SimpleAction::TargetShort => match dir {
            Direction::Flat => Action::OpenShort,
            Direction::Long => Action::Reverse,
            Direction::Short => Action::Hold,
        },
    }
}

/// Mode-aware legality: extended masks are the raw legality vector, and a
/// simplified bit is legal exactly when its adapted extended action is.
pub fn compute_legal_mask(state: &PortfolioState, r: &RiskConfig, mode: ActionMode) -> LegalMask {
    match mode {
        ActionMode::Extended => compute_extended_mask(state, r),
        ActionMode::Simplified => {
            let legal = |sa: SimpleAction| {
                extended_action_legal(state, r, adapt_simplified(sa, state))
            };
            LegalMask::new(vec![
                true,
                legal(SimpleAction::TargetLong),
                legal(SimpleAction::TargetShort),
            ])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::{mark_to_market, Direction, Position};

    fn state() -> PortfolioState {
        PortfolioState::new(100_000.0, 1.10)
    }

    fn long_state(lots: f64, pyramid_depth: u32) -> PortfolioState {
        let mut st = state();
        st.position = Position {
            direction: Direction::Long,
            lots,
            avg_entry_price: 1.10,
            pyramid_depth,
            martingale_depth: 0,
        };
        st.used_margin = crate::exec::required_margin(lots, 1.10, &RiskConfig::default());
        mark_to_market(&st, 1.10)
    }

    #[test]
    fn flat_state_with_margin_allows_hold_and_opens_only() {
        let mask = compute_extended_mask(&state(), &RiskConfig::default());
        let legal = mask.legal_ids();
        assert_eq!(
            legal,
            vec![Action::Hold.id(), Action::OpenLong.id(), Action::OpenShort.id()]
        );
    }

    #[test]
    fn pyramid_illegal_at_depth_cap() {
        let r = RiskConfig::default();
        let st = long_state(0.4, r.depth_cap);
        let mask = compute_extended_mask(&st, &r);
        assert!(!mask.is_legal(Action::PyramidLong.id()));
        let st = long_state(0.2, 1);
        let mask = compute_extended_mask(&st, &r);
        assert!(mask.is_legal(Action::PyramidLong.id()));
    }

    #[test]
    fn zero_free_margin_leaves_only_hold() {
        let mut st = state();
        st.cash = 0.0;
        st.equity = 0.0;
        st.free_margin = 0.0;
        let mask = compute_extended_mask(&st, &RiskConfig::default());
        assert_eq!(mask.legal_ids(), vec![Action::Hold.id()]);
    }

    #[test]
    fn adapter_mapping_table() {
        let flat = state();
        assert_eq!(adapt_simplified(SimpleAction::TargetLong, &flat), Action::OpenLong);
        assert_eq!(adapt_simplified(SimpleAction::TargetShort, &flat), Action::OpenShort);
        assert_eq!(adapt_simplified(SimpleAction::Hold, &flat), Action::Hold);

        let long = long_state(0.1, 0);
        assert_eq!(adapt_simplified(SimpleAction::TargetLong, &long), Action::Hold);
        assert_eq!(adapt_simplified(SimpleAction::TargetShort, &long), Action::Reverse);

        let mut short = long_state(0.1, 0);
        short.position.direction = Direction::Short;
        assert_eq!(adapt_simplified(SimpleAction::TargetLong, &short), Action::Reverse);
        assert_eq!(adapt_simplified(SimpleAction::TargetShort, &short), Action::Hold);
    }

    #[test]
    fn simplified_mask_follows_adapted_legality() {
        let r = RiskConfig::default();
        let mask = compute_legal_mask(&state(), &r, ActionMode::Simplified);
        assert_eq!(mask.len(), 3);
        assert!(mask.is_legal(0) && mask.is_legal(1) && mask.is_legal(2));
        // Broke account: targets become illegal, HOLD stays.
        let mut broke = state();
        broke.cash = 0.0;
        broke.equity = 0.0;
        broke.free_margin = 0.0;
        let mask = compute_legal_mask(&broke, &r, ActionMode::Simplified);
        assert_eq!(mask.legal_ids(), vec![0]);
    }

    #[test]
    fn scaling_availability_switches() {
        let r = RiskConfig { allow_pyramid: false, allow_martingale: false, ..Default::default() };
        let mut st = long_state(0.1, 0);
        st = mark_to_market(&st, 1.09); // adverse, so martingale would otherwise be legal
        let mask = compute_extended_mask(&st, &r);
        assert!(!mask.is_legal(Action::PyramidLong.id()));
        assert!(!mask.is_legal(Action::MartingaleLong.id()));
        assert!(mask.is_legal(Action::Close.id()));
    }
}
