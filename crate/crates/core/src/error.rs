use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A quantum number or index argument is out of its domain.
    InvalidIndex { what: &'static str, value: i64 },
    /// A real-valued parameter is outside its allowed range.
    InvalidParameter { what: &'static str, value: f64 },
    /// `p₀` and `q₀` of a higher-harmonic decomposition share a factor.
    NotCoprime { p0: u32, q0: u32 },
    /// The operation requires the isotropic subspace `p = q = 1`.
    NotIsotropic { p: u32, q: u32 },
    /// The operation requires commensurate frequencies.
    NotCommensurate,
    /// Every coefficient selected by a projection vanished.
    EmptyProjection,
    /// The grid cannot resolve the highest oscillation of the state.
    UnderResolved { axis: char, spacing: f64, limit: f64 },
    /// Grid shape is invalid.
    InvalidGrid(&'static str),
    /// A collection of states that should share one Fock basis does not.
    IncompatibleStates,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidIndex { what, value } => write!(f, "invalid {what}: {value}"),
            Error::InvalidParameter { what, value } => write!(f, "invalid {what}: {value}"),
            Error::NotCoprime { p0, q0 } => {
                write!(f, "p0 = {p0} and q0 = {q0} are not coprime")
            }
            Error::NotIsotropic { p, q } => {
                write!(f, "isotropic subspace required, got p = {p}, q = {q}")
            }
            Error::NotCommensurate => f.write_str("frequency ratio is not commensurate"),
            Error::EmptyProjection => f.write_str("projection selected only zero amplitudes"),
            Error::UnderResolved { axis, spacing, limit } => write!(
                f,
                "grid spacing {spacing} along {axis} exceeds the resolution limit {limit}"
            ),
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::IncompatibleStates => f.write_str("states do not share a Fock basis"),
        }
    }
}

impl core::error::Error for Error {}
