use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // exact algebra
    #[error("sublattice check failed: generator {column} of the smaller lattice is not in the larger one")]
    NotSublattice { column: usize },
    #[error("coefficient of {monomial} has p-adic valuation {valuation}, cannot divide by p^{k}")]
    NotDivisible { monomial: String, valuation: u32, k: u32 },
    #[error("image of {variable} is not a Frobenius lift: {reason}")]
    NotAFrobeniusLift { variable: String, reason: String },
    #[error("operation requires exact integer coefficients, ring has modulus {modulus}")]
    TorsionCoefficients { modulus: BigInt },
    #[error("operands live in different rings: {0}")]
    MismatchedRing(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("linear system has no integer solution")]
    NoSolution,

    // witt vectors
    #[error("mismatched Witt parameters: {0}")]
    MismatchedParameters(String),
    #[error("Frobenius needs a coefficient ring of characteristic {p}")]
    NotCharP { p: u32 },
    #[error("Witt vector is not in the image of V (first coordinate nonzero)")]
    NotInVImage,
    #[error("Dwork recursion: division by p^{level} failed at coordinate {level}")]
    DworkDivisionFailure { level: usize },

    // de Rham
    #[error("PD relation violated for x = {x}, n = {n}")]
    RelationViolated { x: String, n: u32 },
    #[error("Frobenius lift does not preserve the weight grading: {0}")]
    NonGradedLift(String),

    // crystals
    #[error("connection is not integrable: entry ({row}, {col}) of dΘ + Θ∧Θ is {value}")]
    NotIntegrable { row: usize, col: usize, value: String },
    #[error("Frobenius is not horizontal: entry ({row}, {col}) differs by {value}")]
    NotHorizontal { row: usize, col: usize, value: String },
    #[error("Frobenius is not unit-root: det Φ mod p = {det}")]
    NotUnitRoot { det: String },
    #[error("crystals live over different bases: {0}")]
    MismatchedBase(String),
    #[error("crystal data is not homogeneous for any weight shift: {0}")]
    NonHomogeneousCrystal(String),
    #[error("operator image leaves the weight window at degree {degree}, weight {weight}")]
    WindowOverflow { degree: usize, weight: String },
    #[error("invalid crystal data: {0}")]
    InvalidCrystal(String),

    // saturation engine
    #[error("α_F image left the décalage lattice at degree {degree}, weight {weight}")]
    ImageOutsideEta { degree: usize, weight: String },
    #[error("weight window is incoherent: {0}")]
    WindowIncoherent(String),
    #[error("input is not a torsion-free Dieudonné complex: {0}")]
    NotDieudonne(String),
    #[error("block (degree {degree}, weight {weight}) did not stabilize within K_max = {k_max}")]
    NotStabilized { degree: usize, weight: String, k_max: usize },
    #[error("tower axiom {axiom} violated at {block}")]
    AxiomViolation { axiom: String, block: String },
    #[error("λ does not induce an isomorphism on H^{degree} at weight {weight}: {detail}")]
    QuasiIsoFailure { degree: usize, weight: String, detail: String },
    #[error("check {check} failed: {witness}")]
    Mismatch { check: String, witness: String },
    #[error("base change mismatch at degree {degree}, weight {weight}: {detail}")]
    BaseChangeMismatch { degree: usize, weight: String, detail: String },
    #[error("module action leaves the window at degree {degree}, weight {weight}")]
    ActionOverflow { degree: usize, weight: String },

    // input
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid job: {0}")]
    InvalidJob(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
