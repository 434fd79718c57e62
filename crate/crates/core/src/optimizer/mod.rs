//! Binary particle swarm feature selection with validation strategies.
//!
//! Particles move in `{0, 1}^D`. Inertia and the cognitive/social
//! accelerations follow per-iteration schedules, and a V-shaped transfer
//! function turns each velocity component into the probability of flipping
//! the corresponding bit. Fitness is the user-threshold EER of the wrapped
//! classifier on the Opt writers; the Sel writers validate candidates
//! according to the chosen [`Strategy`].

mod archive;
mod fitness;
mod swarm;
mod transfer;

pub use archive::{Archive, ArchiveEntry};
pub use fitness::{evaluate, score_trials, EvalSet, FitnessContext, Objective, DEGENERATE_PENALTY};
pub use swarm::{
    update_particle, update_particle_with, BinaryPso, Coefficients, IterationRecord, Particle, RunOutcome, ScheduleFn,
    Strategy, SwarmConfig,
};
pub use transfer::{v_shaped, TransferFn};
