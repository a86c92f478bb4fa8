use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("consecutive differentials do not compose to zero ({0})")]
    CompositionNotZero(String),
    #[error("generalized eigenspaces are not complementary: {ker} + {im} != {ambient}")]
    NotComplementary { ker: usize, im: usize, ambient: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("span is not a two-sided ideal: {0}")]
    NotAnIdeal(String),
    #[error("ideal does not square to zero: {0}")]
    IdealNotSquareZero(String),
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("identity `{law}` fails on {block}")]
    IdentityViolation { law: String, block: String },
    #[error("induced map not well defined: {0}")]
    NotWellDefined(String),
    #[error("perturbation is not small: (delta h)^k does not vanish in degree {degree}")]
    NotSmall { degree: usize },
    #[error("closed form disagrees with the direct composite: {0}")]
    Mismatch(String),
    #[error("map is not bijective: {0}")]
    NotBijective(String),
    #[error("nilpotence hypothesis fails: {0}")]
    NilpotenceMismatch(String),
    #[error("estimated dimension {estimate} exceeds the budget {budget}")]
    CapExceeded { estimate: usize, budget: usize },
    #[error("vector is not a cycle")]
    NotACycle,
    #[error("word {0} is not in the target basis")]
    OutsideTarget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
