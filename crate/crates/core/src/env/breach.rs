//! Deliberate causality-breaking hooks for conformance-test sensitivity
//! checks. Production paths always run with [`Breach::None`]; the verify
//! suite enables one breach at a time and asserts that the matching test
//! catches it.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Breach {
    #[default]
    None,
    /// Observation window shifted one bar into the future.
    ObservationLookahead,
    /// Orders fill at close_{t+1} instead of open_{t+1}.
    FillAtCloseNext,
    /// Reward profit reads the mark at close_{t+2}.
    RewardLookahead,
    /// Scaler fitted on train + heldout instead of train only.
    ScalerRefitOnFull,
    /// Observations carry the previous step's mask instead of a fresh one.
    StaleMask,
}
