use thiserror::Error;

use crate::model::PortId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("port {0} has zero capacity")]
    ZeroCapacity(PortId),
    #[error("duplicate flow id {0:?}")]
    DuplicateFlowId(String),
    #[error("flow {flow:?} references port {port} outside the switch")]
    UnknownPort { flow: String, port: PortId },
    #[error("flow {0:?} has zero demand")]
    ZeroDemand(String),
    #[error("flow {flow:?} demand {demand} exceeds bottleneck capacity {kappa}")]
    DemandExceedsCapacity { flow: String, demand: u32, kappa: u32 },
    #[error("flow {0:?} has an empty active set")]
    EmptyActiveSet(String),
    #[error("flow {flow:?} lists active round {round} before its release {release}")]
    ActiveBeforeRelease { flow: String, round: u32, release: u32 },
    #[error("schedule names unknown flow {0:?}")]
    UnknownFlow(String),
    #[error("schedule does not cover flow {0:?}")]
    MissingFlow(String),
    #[error("flow {flow:?} assigned to invalid round {round}")]
    NegativeRound { flow: String, round: i64 },
    #[error("flow {flow:?} runs in round {round} before its release {release}")]
    NegativeResponse { flow: String, round: u32, release: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error("simplex made no progress after {pivots} pivots")]
    Stalled { pivots: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("horizon {horizon} must exceed the latest release {max_release}")]
    HorizonTooSmall { horizon: u32, max_release: u32 },
    #[error("no fractional schedule fits within horizon {horizon}")]
    HorizonInfeasible { horizon: u32 },
    #[error("flow {0:?} has non-unit demand; this step handles unit flows only")]
    NonUnitDemand(String),
    #[error("cannot pack {colors} matchings into window of {window} rounds at augmentation {augment} (backlog {backlog})")]
    PackingOverflow { backlog: u64, window: u32, colors: usize, augment: u32 },
    #[error("fractional input is not feasible: {0}")]
    InfeasibleInput(String),
    #[error("LP returned a non-vertex or inconsistent solution: {0}")]
    NonVertex(String),
    #[error("rounding made no progress: {0}")]
    RoundingStalled(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("schedule failed validation: {0}")]
    Validation(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable short tag for machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Model(_) => "model",
            Error::Lp(_) => "lp",
            Error::HorizonTooSmall { .. } => "horizon_too_small",
            Error::HorizonInfeasible { .. } => "horizon_infeasible",
            Error::NonUnitDemand(_) => "non_unit_demand",
            Error::PackingOverflow { .. } => "packing_overflow",
            Error::InfeasibleInput(_) => "infeasible_input",
            Error::NonVertex(_) => "non_vertex",
            Error::RoundingStalled(_) => "rounding_stalled",
            Error::Config(_) => "config",
            Error::Validation(_) => "validation",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
