use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image array is not a permutation")]
    NotAPermutation,
    #[error("degree {0} exceeds the supported maximum")]
    DegreeTooLarge(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("element is not a member of the group")]
    NotInGroup,
    #[error("not a subgroup")]
    NotASubgroup,
    #[error("matrix not invertible mod {0}")]
    SingularMatrix(u16),
    #[error("group is not transitive")]
    NotTransitive,
    #[error("group is not primitive: block of size {0} found")]
    NotPrimitive(usize),
    #[error("socle has order {got}, expected {want}")]
    BadSocle { got: u128, want: u128 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("parse error: {msg}{}", loc.as_ref().map(|(l, c)| format!(" at line {l}, column {c}")).unwrap_or_default())]
    Parse {
        msg: String,
        loc: Option<(usize, usize)>,
    },
    #[error("unknown catalog group {0:?}")]
    UnknownGroup(String),
    #[error("unknown class label {0:?}")]
    UnknownLabel(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
}

impl Error {
    pub fn parse(msg: String) -> Error {
        Error::Parse { msg, loc: None }
    }

    pub fn parse_at(msg: String, line: usize, col: usize) -> Error {
        Error::Parse {
            msg,
            loc: Some((line, col)),
        }
    }
}
