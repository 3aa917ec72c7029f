//! Evolution of `Z_η = X ⊞_η Geom(λ_Y)` in `η` and the functionals that
//! control it.

pub mod debruijn;
pub mod heat;

pub use debruijn::{
    channel_divergence, check_log_sobolev, debruijn_lhs_numeric, debruijn_rhs,
    entropy_concavity_gap, score, tilted_pair, LogSobolevReport, ScoreProfile, TiltedPair,
};
pub use heat::{evolve_heat, evolve_heat_partial, heat_rhs, EvolveConfig, SignedSeq, Trajectory};
