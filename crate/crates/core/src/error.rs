use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("missing configuration key `{0}`")]
    MissingKey(&'static str),

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: &'static str, reason: String },

    #[error("explicit mass {mass:e} kg disagrees with radius/density mass {derived:e} kg")]
    InconsistentMass { mass: f64, derived: f64 },

    #[error("pulse sequence out of order: need 0 < t1 < t2 < t3, got ({t1:e}, {t2:e}, {t3:e}) s")]
    SequenceOrder { t1: f64, t2: f64, t3: f64 },

    #[error(
        "pulse sequence is not balanced (t1 = t3/4, t2 = 3 t3/4); the phase is entangled with \
         the motion, use evolve_sequence instead"
    )]
    UnbalancedSequence,

    #[error("gravitational phase routes disagree: action {action} rad vs propagator {propagator} rad")]
    PhaseRouteMismatch { action: f64, propagator: f64 },

    #[error("branches do not share sigma0 and spread_time; overlap unsupported")]
    MismatchedBranches,

    #[error("{what} = {value} out of range {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("collective spin value M = {m} incompatible with {l} pseudo-spins (need |M| <= l, M = l mod 2)")]
    Parity { m: i32, l: u32 },

    #[error("quadrature did not converge for channel `{channel}` (estimated error {error:e})")]
    Quadrature { channel: String, error: f64 },

    #[error("invalid spectral table for `{channel}`: {reason}")]
    SpectralTable { channel: String, reason: &'static str },
}
