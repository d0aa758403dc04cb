use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
///
/// Domain errors reject inputs outside an operation's contract. Guard errors
/// report that a numerical certificate (truncation, leakage, fit quality) did
/// not hold and the caller should enlarge a resource or shrink a window.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// `kappa == 0` leaves the detuning parameter `c` undefined.
    DegenerateCoupling,
    /// An argument lies outside the operation's domain.
    Domain { what: &'static str, value: f64 },
    /// Only orders 0 through 3 of the expansion exist.
    OrderNotImplemented(usize),
    /// The spectral minimiser sits on the `n_max` boundary.
    IncreaseNMax { n_max: usize },
    /// A truncated Fock basis is too small for the requested state or power.
    IncreaseDim { dim: usize, residue: f64 },
    /// The quadratic short-time fit left a residual above tolerance.
    FitResidual { residual: f64, tolerance: f64 },
    /// A sampled trace is flat over the window, so no revival can be located.
    NoRevival,
    /// Input arrays or grids do not fit together.
    Shape(&'static str),
}

impl Error {
    /// True for certificate failures, as opposed to plain domain errors.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::IncreaseNMax { .. }
                | Error::IncreaseDim { .. }
                | Error::FitResidual { .. }
                | Error::NoRevival
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateCoupling => {
                write!(f, "degenerate coupling: kappa = 0 leaves c undefined")
            }
            Error::Domain { what, value } => write!(f, "domain error: {what} (got {value})"),
            Error::OrderNotImplemented(order) => {
                write!(f, "order {order} not implemented (orders 0..=3 only)")
            }
            Error::IncreaseNMax { n_max } => {
                write!(f, "spectral minimum sits at the boundary n_max = {n_max}; increase n_max")
            }
            Error::IncreaseDim { dim, residue } => {
                write!(f, "truncation residue {residue:e} at dim = {dim}; increase dim")
            }
            Error::FitResidual { residual, tolerance } => write!(
                f,
                "short-time fit residual {residual:e} exceeds {tolerance:e}; shrink window / increase dim"
            ),
            Error::NoRevival => write!(f, "no revival detected: trace is flat in the window"),
            Error::Shape(msg) => write!(f, "shape mismatch: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
