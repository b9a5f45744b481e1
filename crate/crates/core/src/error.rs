use thiserror::Error;

/// Failure modes shared by every analysis in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KellyError {
    #[error("{name} = {value} is outside its domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The game has no positive edge (p <= 1/2), so no stake is justified.
    #[error("no positive edge at p = {p}; the game is not played")]
    NoEdge { p: f64 },

    #[error("degenerate game at p = {p}: {reason}")]
    Degenerate { p: f64, reason: &'static str },

    #[error("small-stake series is invalid: F_K^2 = {kelly_squared} >= 3/8")]
    SeriesInvalid { kelly_squared: f64 },

    #[error("{what} overflows f64; {hint}")]
    Range {
        what: &'static str,
        hint: &'static str,
    },

    #[error("{what}: {requested} exceeds the limit of {limit}")]
    Size {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("approximation used outside its validity range: {name} = {value} > {limit}")]
    ApproximationDomain {
        name: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("stake F = {stake} is in the decay regime at p = {p}")]
    NotSubmartingale { stake: f64, p: f64 },
}

pub type Result<T> = std::result::Result<T, KellyError>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(KellyError::Domain {
            name,
            value,
            expected: "a probability in [0, 1]",
        })
    }
}
