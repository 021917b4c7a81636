use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator_lab::OperatorFamily;

/// Families whose eigenvalues linger near zero for longer than this are
/// rejected by the generators.
pub const MAX_NEAR_ZERO_STRETCH: f64 = 1e-3;
const MAX_ATTEMPTS_PER_INSTANCE: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Piecewise,
    Loop,
    /// Alternates open and loop families.
    Mixed,
}

#[derive(Debug, Clone, Serialize)]
pub struct Rejection {
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct Instance<T> {
    pub id: usize,
    pub seed: u64,
    pub family: OperatorFamily,
    pub rejections: Vec<Rejection>,
    pub result: T,
}

/// Coefficient scale of generated families.
pub const DEFAULT_SCALE: f64 = 1.2;

pub fn family_from_seed(seed: u64, is_loop: bool) -> Result<OperatorFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fam = OperatorFamily::random_piecewise(&mut rng, is_loop, DEFAULT_SCALE)?;
    fam.name = format!("{}-{seed}", fam.name);
    Ok(fam)
}

/// Whether an error from a verification run marks the family as degenerate
/// rather than the computation as broken.
pub fn is_degenerate(e: &Error) -> bool {
    match e {
        Error::NonRegularCrossing { .. } | Error::TrackingAmbiguous { .. } => true,
        Error::Context { source, .. } => is_degenerate(source),
        _ => false,
    }
}

/// Draws family seeds from `seed` until `evaluate` accepts one.
///
/// `evaluate` returns the result together with the longest near-zero stretch
/// it saw; families above [`MAX_NEAR_ZERO_STRETCH`] and families that fail
/// with a degenerate error are rejected and logged.
pub fn generate<T, F>(id: usize, seed: u64, kind: FamilyKind, evaluate: F) -> Result<Instance<T>>
where
    F: Fn(&OperatorFamily) -> Result<(T, f64)>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let is_loop = match kind {
        FamilyKind::Piecewise => false,
        FamilyKind::Loop => true,
        FamilyKind::Mixed => id % 2 == 1,
    };
    let mut rejections = Vec::new();
    for _ in 0..MAX_ATTEMPTS_PER_INSTANCE {
        let s: u64 = rng.gen();
        let fam = family_from_seed(s, is_loop)?;
        match evaluate(&fam) {
            Ok((result, stretch)) if stretch <= MAX_NEAR_ZERO_STRETCH => {
                return Ok(Instance {
                    id,
                    seed: s,
                    family: fam,
                    rejections,
                    result,
                });
            }
            Ok((_, stretch)) => rejections.push(Rejection {
                seed: s,
                reason: format!("eigenvalue near zero over a t-stretch of {stretch:.3e}"),
            }),
            Err(e) if is_degenerate(&e) => rejections.push(Rejection {
                seed: s,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e.context(format!("instance {id}, family seed {s}"))),
        }
    }
    Err(Error::SearchExhausted {
        bound: MAX_ATTEMPTS_PER_INSTANCE,
    })
}

/// Per-instance seeds derived from a sweep seed.
pub fn instance_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen()).collect()
}
