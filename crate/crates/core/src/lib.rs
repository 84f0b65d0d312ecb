//! Minimal generators of the kernel of a polynomial ring map, computed degree
//! by degree inside a maximal multigrading that the kernel respects.
//!
//! The pipeline:
//!
//! 1. [`grading`] finds integer weight vectors making every `x_i - φ(x_i)`
//!    homogeneous and projects them to the domain, giving a grading matrix `A`
//!    plus a strictly positive weight vector `a` in its row space.
//! 2. [`enumerate`] lists all domain monomials of weighted degree `i` and
//!    buckets them by multidegree `β = Aα`.
//! 3. [`engine`] solves one exact linear system per multidegree, skipping
//!    components certified empty by [`matroid`] and trimming columns spanned
//!    by multiples of lower-degree generators; [`linalg`] supplies the exact
//!    kernels and the modular rank tests.

pub mod engine;
pub mod enumerate;
pub mod fixtures;
pub mod grading;
pub mod linalg;
pub mod matroid;
pub mod polyring;
#[cfg(feature = "testkit")]
pub mod testkit;

pub use engine::{
    components_of_kernel, naive_total_degree_kernel, naive_total_degree_run, ComponentStatus,
    EngineError, EngineOptions, Generator, GeneratorSet, KernelRun, LevelReport,
};
pub use enumerate::{enumerate_level, DegreeLevel, MonomialBasis};
pub use grading::{GradingMatrix, HomogeneityBasis, Multidegree};
pub use polyring::{Monomial, PolyError, PrimeField, QPoly, Rational, RingMap, DEFAULT_PRIME};
