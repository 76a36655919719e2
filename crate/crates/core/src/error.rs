use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("outcome row {row} has {found} entries, expected {expected}")]
    NonRectangular { row: usize, expected: usize, found: usize },
    #[error("outcome for recipient {recipient}, treatment {treatment} is not finite")]
    NonFiniteOutcome { recipient: usize, treatment: usize },
    #[error("capacity of treatment {treatment} is negative ({value})")]
    NegativeCapacity { treatment: usize, value: i64 },
    #[error("{found} capacities given for {expected} treatments")]
    CapacityLengthMismatch { expected: usize, found: usize },
    #[error("cost scale must be at least 1, got {0}")]
    InvalidCostScale(i64),
    #[error("scaled costs overflow 64-bit integers")]
    CostOverflow,
    #[error("allocation covers {found} recipients, instance has {expected}")]
    RecipientCountMismatch { expected: usize, found: usize },
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("treatment {treatment} assigned {assigned} recipients, capacity is {capacity}")]
    CapacityViolated { treatment: usize, assigned: i64, capacity: i64 },
    #[error("infeasible: total capacity {capacity} is below {recipients} recipients")]
    Infeasible { capacity: i64, recipients: usize },
    #[error("baseline allocation is not feasible for this instance")]
    InfeasibleBaseline,
    #[error("flow is not feasible for this network")]
    InfeasibleFlow,
    #[error("flow does not route exactly one unit into recipient {recipient}")]
    MalformedFlow { recipient: usize },
    #[error("arc {arc} has lower bound {lower} above upper bound {upper}")]
    InvalidBounds { arc: usize, lower: i64, upper: i64 },
    #[error("vertex balances sum to {0}, expected 0")]
    UnbalancedNetwork(i64),
    #[error("network has no allocation layout")]
    NotLayered,
    #[error("iteration cap of {0} reached with negative cycles remaining")]
    IterationCapExceeded(usize),
    #[error("enumeration of {candidates} candidates exceeds the cap of {cap}")]
    TooLarge { candidates: u128, cap: u128 },
    #[error("no group has two or more arms")]
    NoPairs,
    #[error("group {group} is empty or has an empty arm")]
    EmptyGroup { group: usize },
    #[error("replicate count must be at least 1")]
    NoReplicates,
}
