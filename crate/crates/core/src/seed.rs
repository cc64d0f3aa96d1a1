//! Per-task seeding.
//!
//! Every random draw in the crate comes from a [`TaskRng`] seeded by
//! `task_seed(master, kind, index)`. The mixing is SplitMix64 applied in a
//! fixed sequence, so a task's stream depends only on those three values and
//! never on scheduling or worker count. This scheme is frozen: changing it
//! changes every sampled output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TaskRng = ChaCha8Rng;

/// Stream families; the discriminant is part of the frozen seed derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum TaskKind {
    Rotation = 1,
    SubsetRotation = 2,
    SubsetChoice = 3,
    Noise = 4,
    ShotNoise = 5,
    Sphere = 6,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn task_seed(master: u64, kind: TaskKind, index: u64) -> u64 {
    let h = splitmix64(master);
    let h = splitmix64(h ^ (kind as u64));
    splitmix64(h ^ index)
}

/// Combines a seed with an extra coordinate (e.g. a subset number).
pub fn derive(seed: u64, extra: u64) -> u64 {
    splitmix64(seed ^ splitmix64(extra))
}

pub fn task_rng(master: u64, kind: TaskKind, index: u64) -> TaskRng {
    TaskRng::seed_from_u64(task_seed(master, kind, index))
}
