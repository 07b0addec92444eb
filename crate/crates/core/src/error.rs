use core::fmt;

/// Errors reported by the matching and triangulation operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// The image is smaller than the requested matching window.
    InputTooSmall {
        width: usize,
        height: usize,
        window: usize,
    },
    /// Two inputs that must agree on dimensions or window size do not.
    ShapeError(&'static str),
    /// Triangulation input admits no triangle: fewer than three distinct
    /// points, or all points collinear.
    DegenerateInput,
    /// A configuration value is outside its accepted range.
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InputTooSmall {
                width,
                height,
                window,
            } => write!(
                f,
                "image {}x{} is smaller than the {}x{} matching window",
                width, height, window, window
            ),
            Error::ShapeError(what) => write!(f, "shape mismatch: {}", what),
            Error::DegenerateInput => {
                write!(f, "degenerate input: no triangle can be formed")
            }
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {}", what),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
