use alloc::string::String;
use core::fmt;

/// Errors raised by the algebra and counting routines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HallError {
    /// Two values built over different primes were combined.
    FieldMismatch { left: u32, right: u32 },
    /// Inversion of the zero element.
    DivisionByZero,
    /// An argument outside the supported domain.
    Domain(String),
    /// A lookup with an unknown class id or name.
    Lookup(String),
    /// A configured budget was exceeded.
    Resource(String),
    /// An internal consistency assertion failed.
    Inconsistent(String),
    /// The requested operation has no implementation for this period.
    Unsupported(String),
}

impl fmt::Display for HallError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HallError::FieldMismatch { left, right } => {
                write!(f, "coefficient fields differ: q={} vs q={}", left, right)
            }
            HallError::DivisionByZero => write!(f, "division by zero"),
            HallError::Domain(m) => write!(f, "domain error: {}", m),
            HallError::Lookup(m) => write!(f, "lookup error: {}", m),
            HallError::Resource(m) => write!(f, "resource limit: {}", m),
            HallError::Inconsistent(m) => write!(f, "internal inconsistency: {}", m),
            HallError::Unsupported(m) => write!(f, "unsupported: {}", m),
        }
    }
}

pub type Result<T> = core::result::Result<T, HallError>;
