//! Error types, one enum per area.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("alternative id {0:?} is empty or blank")]
    InvalidAlternative(String),
    #[error("alternative id {0:?} is reserved")]
    ReservedId(String),
    #[error("alternative {0:?} appears twice")]
    DuplicateAlternative(String),
    #[error("unknown alternative {0:?}")]
    UnknownAlternative(String),
    #[error("universe is empty")]
    EmptyUniverse,
    #[error("universe has {size} alternatives; at most {max} are supported")]
    UniverseTooLarge { size: usize, max: usize },
    #[error("universes of the inputs differ")]
    UniverseMismatch,
    #[error("menu is empty")]
    EmptyMenu,
    #[error("menu contains alternatives outside the universe")]
    MenuOutsideUniverse,
    #[error("menu is not part of the menu collection")]
    MenuOutsideCollection,
    #[error("alternative #{0} is not in the menu")]
    AlternativeNotInMenu(usize),
    #[error("no data for menu {0}")]
    MissingMenu(String),
    #[error("not a linear order over the universe")]
    InvalidOrder,
    #[error("weight #{index} is {value}; weights must be positive and finite")]
    NonPositiveWeight { index: usize, value: f64 },
    #[error("alpha = {0} is outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("menu weight {0} is outside (0, 1]")]
    InvalidMenuWeight(f64),
    #[error("probabilities for {menu} sum to {sum}")]
    RowSum { menu: String, sum: f64 },
    #[error("menu {menu} assigns mass to {alternative}, which it does not contain")]
    MassOutsideMenu { menu: String, alternative: String },
    #[error("probability {value} in menu {menu} is outside [0, 1]")]
    InvalidProbability { menu: String, value: f64 },
    #[error("replica count {0} is negative")]
    InvalidReplicaCount(i64),
    #[error("a choice row has no positive mass")]
    DegenerateRow,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentifyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("need at least three alternatives, got {0}")]
    TooFewAlternatives(usize),
    #[error("alternatives of a triple must be distinct")]
    NotATriple,
    #[error("menu {0} is required but not observed")]
    MissingMenu(String),
    #[error("{alternative} has zero probability in {menu}")]
    ZeroProbability { alternative: String, menu: String },
    #[error("sign pattern is ambiguous on {}", triples.join(", "))]
    Ambiguous { triples: Vec<String> },
    #[error("observed triples leave {} unranked", pairs.join(", "))]
    Incomplete { pairs: Vec<String> },
    #[error("{axiom} fails: {detail}")]
    AxiomViolation { axiom: String, detail: String },
    #[error("per-triple alpha values disagree (mean {mean}, max relative deviation {max_deviation})")]
    InconsistentAlpha { mean: f64, max_deviation: f64, per_triple: Vec<(String, f64)> },
    #[error("recovered alpha = {0} is outside (0, 1)")]
    AlphaOutOfRange(f64),
    #[error("recovered weight of {alternative} is {value}")]
    NonPositiveWeight { alternative: String, value: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AxiomError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Identify(#[from] IdentifyError),
    #[error("menu {0} is required but not observed")]
    MissingMenu(String),
    #[error("{alternative} has zero probability in {menu}")]
    ZeroProbability { alternative: String, menu: String },
    #[error("no admissible (x, y, menu) combination to test")]
    NoAdmissibleTriple,
    #[error("{0}")]
    InvalidArguments(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("need at least two alternatives, got {0}")]
    TooFewAlternatives(usize),
    #[error("order search supports at most {max} alternatives, got {size}")]
    UniverseTooLarge { size: usize, max: usize },
    #[error("no prediction for menu {0}")]
    MissingPrediction(String),
    #[error("observed cells have zero variance")]
    DegenerateVariance,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IoError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RationalityError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("supports at most {max} alternatives, got {size}")]
    UniverseTooLarge { size: usize, max: usize },
    #[error("data sets are over different universes")]
    UniverseMismatch,
    #[error("lambda must lie in (0, 1], got {0}")]
    InvalidLambda(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AvailabilityError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("menu {menu} has {size} options; subset sums support at most {max}")]
    MenuTooLarge { menu: String, size: usize, max: usize },
    #[error("menu {0} has subsets missing from the collection")]
    NotSubsetClosed(String),
    #[error("the empty menu row is required")]
    MissingEmptyMenu,
    #[error("the default must have probability one on the empty menu, got {0}")]
    EmptyMenuDefault(f64),
    #[error("default probability missing for {0}")]
    MissingDefault(String),
    #[error("default has zero probability in {0}")]
    ZeroDefault(String),
    #[error("invalid availability distribution: {0}")]
    InvalidAvailability(String),
    #[error("availability probability must lie in (0, 1), got {0}")]
    InvalidPhi(f64),
    #[error("default-probability alternating sum is not positive on {menu}: {value}")]
    BlockMarschakViolation { menu: String, value: f64 },
    #[error("associated choice function is not a probability on {menu}: {detail}")]
    NormalizationFailure { menu: String, detail: String },
    #[error("associated choice function has no DST representation: {0}")]
    NoDstRepresentation(IdentifyError),
    #[error("default odds depend on the menu for {alternative}: {detail}")]
    MidoViolation { alternative: String, detail: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ListError {
    #[error("invalid list problem: {0}")]
    Invalid(String),
    #[error("perceived utilities of {0} and {1} tie under some list")]
    PerceivedUtilityTie(String, String),
    #[error("supports at most {max} products, got {size}")]
    TooManyProducts { size: usize, max: usize },
    #[error("elasticity must exceed one, got {0}")]
    InvalidDelta(f64),
    #[error("the 0-1 program only covers the expected-payoff objective")]
    ObjectiveUnsupported,
    #[error("0-1 program cannot be solved: {0}")]
    InfeasibleModel(String),
    #[error("branch and bound exceeded {0} nodes")]
    NodeLimit(usize),
    #[error("a list must place every product exactly once")]
    NotAList,
    #[error("unknown product {0}")]
    UnknownProduct(String),
    #[error("{0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtensionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("needs exactly three alternatives, got {0}")]
    WrongUniverseSize(usize),
    #[error("choice probabilities must be positive: {0}")]
    NotPositive(String),
    #[error("missing menu {0}")]
    MissingMenu(String),
    #[error("no menu-dependent representation: {0}")]
    NoRepresentation(String),
    #[error("within-menu rankings disagree: {0}")]
    InconsistentRanking(String),
    #[error("{axiom} fails: {detail}")]
    AxiomViolation { axiom: String, detail: String },
    #[error("incomplete data: {0}")]
    IncompleteData(String),
    #[error("invalid mixture: {0}")]
    InvalidMixture(String),
    #[error("parameter out of range: {0}")]
    Domain(String),
}
