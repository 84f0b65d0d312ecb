//! Component skipping through the Jacobian of the map.
//!
//! If the columns of `J(φ)` indexed by a set of variables `S` are linearly
//! independent over the function field, no nonzero kernel element is
//! supported on `S`. Evaluating `J(φ)` at a point can only lower ranks, so a
//! full-rank evaluation is a certificate; an unlucky point merely costs an
//! unnecessary solve.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::rank_mod_p;
use crate::polyring::coeff::next_prime;
use crate::polyring::{PolyError, PrimeField, RingMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatroidError {
    #[error("{p} is not a prime below 2^63")]
    NotPrime { p: u64 },
    #[error("a coefficient denominator is divisible by {p}")]
    BadPrime { p: u64 },
    #[error("no usable prime found after {tries} attempts")]
    NoPrime { tries: usize },
}

/// `J(φ)` evaluated at a random point of `GF(p)^m`: `entries[i][j] = ∂φ(x_j)/∂t_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluatedJacobian {
    pub entries: Vec<Vec<u64>>,
    pub point: Vec<u64>,
    pub prime: u64,
}

impl EvaluatedJacobian {
    /// Rank of the columns indexed by `support`.
    pub fn column_rank(&self, support: &[usize]) -> usize {
        let sub: Vec<Vec<u64>> = self
            .entries
            .iter()
            .map(|row| support.iter().map(|&j| row[j]).collect())
            .collect();
        rank_mod_p(&sub, self.prime)
    }
}

/// Partial derivatives of every image, evaluated at a point drawn from a
/// generator seeded with `seed`.
pub fn build_jacobian(map: &RingMap, p: u64, seed: u64) -> Result<EvaluatedJacobian, MatroidError> {
    let field = PrimeField::new(p).ok_or(MatroidError::NotPrime { p })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point: Vec<u64> = (0..map.m()).map(|_| rng.gen_range(0..p)).collect();
    let mut entries = vec![vec![0u64; map.n()]; map.m()];
    for (j, img) in map.images().iter().enumerate() {
        for (i, row) in entries.iter_mut().enumerate() {
            let partial = img
                .partial_derivative(i)
                .expect("codomain index is in range");
            row[j] = partial.eval_mod_p(field, &point).map_err(|e| match e {
                PolyError::BadPrime { p } => MatroidError::BadPrime { p },
                other => unreachable!("evaluation in range cannot fail: {other}"),
            })?;
        }
    }
    Ok(EvaluatedJacobian {
        entries,
        point,
        prime: p,
    })
}

/// [`build_jacobian`], moving on to the next prime while denominators vanish.
pub fn build_jacobian_retrying(
    map: &RingMap,
    p: u64,
    seed: u64,
) -> Result<EvaluatedJacobian, MatroidError> {
    const TRIES: usize = 16;
    let mut prime = p;
    for _ in 0..TRIES {
        match build_jacobian(map, prime, seed) {
            Err(MatroidError::BadPrime { p }) => {
                log::debug!("prime {p} divides a denominator, trying the next one");
                prime = next_prime(p).ok_or(MatroidError::NoPrime { tries: TRIES })?;
            }
            other => return other,
        }
    }
    Err(MatroidError::NoPrime { tries: TRIES })
}

/// Memoized skip decisions keyed by support set. Concurrent readers share the
/// map; a race only duplicates an idempotent computation.
#[derive(Debug, Default)]
pub struct SkipCache {
    decisions: RwLock<HashMap<Vec<usize>, bool>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl SkipCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.decisions.read().expect("skip cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// (hits, misses) so far.
    pub fn stats(&self) -> (u64, u64) {
        (
            self.hits.load(Ordering::Relaxed),
            self.misses.load(Ordering::Relaxed),
        )
    }
}

/// `true` iff the Jacobian columns indexed by `support` (sorted) have full rank.
pub fn can_skip(jacobian: &EvaluatedJacobian, support: &[usize], cache: &SkipCache) -> bool {
    if support.is_empty() {
        return true;
    }
    if let Some(&hit) = cache
        .decisions
        .read()
        .expect("skip cache poisoned")
        .get(support)
    {
        cache.hits.fetch_add(1, Ordering::Relaxed);
        return hit;
    }
    cache.misses.fetch_add(1, Ordering::Relaxed);
    let decision =
        support.len() <= jacobian.entries.len() && jacobian.column_rank(support) == support.len();
    cache
        .decisions
        .write()
        .expect("skip cache poisoned")
        .insert(support.to_vec(), decision);
    decision
}
