//! Numerical experiments on the question-mark function and its trees.

pub mod determinants;
pub mod grid;
pub mod monotone;
pub mod probe;

pub use determinants::{verify_determinants, verify_mediants, DeterminantReport, MediantReport};
pub use grid::{
    arc_length, plotdata, riemann_integral, riemann_integral_exact, self_similarity_stat,
    verify_envelope, verify_parabola, EnvelopeReport, ParabolaReport, SelfSimilarity,
};
pub use monotone::{verify_monotone, MonotoneReport};
pub use probe::{derivative_probe, predicted_limit, ProbeResult, Side};
