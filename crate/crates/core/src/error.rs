use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CllError {
    #[error("table is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element {0} is not a two-sided identity")]
    NoIdentity(usize),
    #[error("element {0} has no two-sided inverse")]
    NoInverse(usize),
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("orders {0} and {1} are not coprime")]
    OrdersNotCoprime(usize, usize),
    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },
    #[error("not a normalized cocycle: {0}")]
    NotCocycle(String),
    #[error("stem class search exhausted: {0}")]
    SearchExhausted(String),
    #[error("no same-order lift of element {0}")]
    NoSuchLift(usize),
    #[error("same-order lift of element {0} is not unique")]
    NotUnique(usize),
    #[error("elements do not generate the group")]
    NotGenerating,
    #[error("lifted product is not in the kernel")]
    NotInKernel,
    #[error("q = {q} is not coprime to {order}")]
    QNotCoprime { q: u64, order: u64 },
    #[error("alpha = {alpha} is not coprime to {order}")]
    AlphaNotCoprime { alpha: i64, order: u64 },
    #[error("prime {ell} is not allowed at class {class}")]
    BadPrimeForClass { ell: u64, class: u8 },
    #[error("generator index {0} out of range")]
    BadIndex(usize),
    #[error("element has a nonzero degree-1 part")]
    NotInCommutatorPart,
    #[error("element is not central")]
    NotCentral,
    #[error("target not expressible in the commutator layer")]
    LayerSingular,
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("inconsistent prescription: {0}")]
    InconsistentPrescription(String),
    #[error("generator images do not kill the relator")]
    RelatorNotKilled,
    #[error("witness search failed: {0}")]
    WitnessSearchFailed(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unknown group spec: {0}")]
    UnknownSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CllError>;

impl From<std::io::Error> for CllError {
    fn from(e: std::io::Error) -> Self {
        CllError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CllError {
    fn from(e: serde_json::Error) -> Self {
        CllError::Parse(e.to_string())
    }
}
