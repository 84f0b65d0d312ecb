//! Degree-by-degree computation of minimal kernel generators.
//!
//! For each weighted degree `i = 1..=d`, every multidegree component `R_β`
//! of that degree is handled independently:
//!
//! 1. skipped outright if the Jacobian certifies no kernel element can be
//!    supported on the variables of `M_β`;
//! 2. trimmed to a coordinate complement `V_β` of the span of all products
//!    `x^γ g` of lower-degree generators `g` that land in degree `β`;
//! 3. assembled into the linear system `L c = 0` whose solutions are the
//!    kernel elements supported on `V_β`;
//! 4. screened modulo a prime (full column rank certifies a trivial kernel);
//! 5. solved exactly over the rationals.
//!
//! Levels are barriers: components of one level run in parallel and only read
//! generators from earlier levels.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::enumerate::{
    count_monomials, enumerate_level, DegreeLevel, EnumerateError, MonomialBasis,
};
use crate::grading::{compute_grading, GradingError, GradingMatrix, Multidegree};
use crate::linalg::{exact_kernel, pivot_columns, prescreen_trivial, ComponentMatrix, LinalgError};
use crate::matroid::{
    build_jacobian_retrying, can_skip, EvaluatedJacobian, MatroidError, SkipCache,
};
use crate::polyring::coeff::next_prime;
use crate::polyring::{ImagePowers, Monomial, PrimeField, QPoly, Rational, RingMap, DEFAULT_PRIME};

/// Largest number of monomials per total degree the naive oracle accepts by default.
pub const DEFAULT_NAIVE_CAP: usize = 5000;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("the grading admits no strictly positive weight vector; cannot enumerate by degree")]
    NoPositiveGrading,
    #[error("degree bound must be at least 1, got {0}")]
    BadDegree(i64),
    #[error("{count} monomials of degree {degree} exceed the cap of {cap}")]
    CapExceeded {
        degree: i64,
        count: u128,
        cap: usize,
    },
    #[error("grading has {got} columns but the map has {expected} domain variables")]
    GradingShape { expected: usize, got: usize },
    #[error("{0} is not a prime below 2^63")]
    NotPrime(u64),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Every speedup can be switched off independently for differential testing.
#[derive(Clone, Debug)]
pub struct EngineOptions {
    /// Jacobian component skip.
    pub skip: bool,
    /// Trimming by lifts of lower-degree generators.
    pub trim: bool,
    /// Modular full-rank screen before exact elimination.
    pub prescreen: bool,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    /// Seed of the Jacobian evaluation point.
    pub seed: u64,
    /// Prime for the Jacobian and the prescreen.
    pub prime: u64,
    /// Use this grading instead of the one computed from the map. It must be
    /// a grading in which the kernel is homogeneous; this is not checked.
    pub grading: Option<GradingMatrix>,
    /// Re-check that every generator maps to zero and is homogeneous.
    pub verify: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            skip: true,
            trim: true,
            prescreen: true,
            threads: 0,
            seed: 0,
            prime: DEFAULT_PRIME,
            grading: None,
            verify: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentStatus {
    SkippedMatroid,
    SkippedPrescreen,
    Solved,
}

/// What happened to one multidegree component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentTask {
    pub beta: Vec<i64>,
    /// `|M_β|`.
    pub basis_size: usize,
    /// The columns `V_β` that survived trimming (empty when skipped by the Jacobian).
    pub columns: Vec<Monomial>,
    /// Dimension of the span of lifted lower-degree generators.
    pub lift_rank: usize,
    pub status: ComponentStatus,
    pub kernel_dim: usize,
}

/// A minimal generator with its degree data and component provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub poly: QPoly,
    pub multidegree: Multidegree,
    /// `|M_β|` of the component it came from.
    pub component_size: usize,
    /// `|V_β|` after trimming.
    pub trimmed_size: usize,
}

impl Generator {
    pub fn total_degree(&self) -> u64 {
        self.poly.total_degree().unwrap_or(0)
    }

    fn sort_key(&self) -> (i64, &[i64], Reverse<&Monomial>) {
        (
            self.multidegree.weighted_degree,
            &self.multidegree.beta,
            Reverse(
                self.poly
                    .leading_monomial()
                    .expect("generators are nonzero"),
            ),
        )
    }
}

/// Generators sorted by weighted degree, then multidegree, then leading monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorSet {
    generators: Vec<Generator>,
}

impl GeneratorSet {
    pub fn new(mut generators: Vec<Generator>) -> Self {
        generators.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Self { generators }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Generator> {
        self.generators.iter()
    }

    pub fn as_slice(&self) -> &[Generator] {
        &self.generators
    }

    /// Generators of weighted degree `degree`.
    pub fn of_degree(&self, degree: i64) -> impl Iterator<Item = &Generator> {
        self.generators
            .iter()
            .filter(move |g| g.multidegree.weighted_degree == degree)
    }

    /// Count of generators per total degree.
    pub fn counts_by_total_degree(&self) -> BTreeMap<u64, usize> {
        let mut out = BTreeMap::new();
        for g in &self.generators {
            *out.entry(g.total_degree()).or_insert(0) += 1;
        }
        out
    }

    fn extend(&mut self, more: Vec<Generator>) {
        let mut all = std::mem::take(&mut self.generators);
        all.extend(more);
        *self = Self::new(all);
    }
}

impl<'a> IntoIterator for &'a GeneratorSet {
    type Item = &'a Generator;
    type IntoIter = std::slice::Iter<'a, Generator>;
    fn into_iter(self) -> Self::IntoIter {
        self.generators.iter()
    }
}

/// Per-level counts. `multidegrees = skipped_matroid + skipped_prescreen + solved`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelReport {
    pub degree: i64,
    pub monomials: usize,
    pub multidegrees: usize,
    pub skipped_matroid: usize,
    pub skipped_prescreen: usize,
    pub solved: usize,
    pub generators: usize,
    pub elapsed: Duration,
}

/// Result of [`components_of_kernel`].
#[derive(Clone, Debug)]
pub struct KernelRun {
    pub grading: GradingMatrix,
    pub generators: GeneratorSet,
    pub levels: Vec<LevelReport>,
    /// Per-level component outcomes, in multidegree order.
    pub tasks: Vec<Vec<ComponentTask>>,
    /// Prime of the Jacobian evaluation (absent when skipping is off).
    pub jacobian_prime: Option<u64>,
    pub seed: u64,
}

/// The columns `V_β` and the rank of the lift space, for the component `β`
/// of weighted degree `degree`.
///
/// `levels[k]` must hold the monomials of weighted degree `k + 1` for every
/// `k < degree`. Generators of weighted degree `≥ degree` are ignored.
pub fn trim_basis(
    generators: &GeneratorSet,
    beta: &[i64],
    degree: i64,
    levels: &[DegreeLevel],
) -> Result<(Vec<Monomial>, usize), EngineError> {
    let level = level_at(levels, degree)?;
    let Some(basis) = level.components.get(beta) else {
        return Ok((Vec::new(), 0));
    };
    let lifts = lift_rows(generators, beta, degree, levels, basis)?;
    if lifts.is_empty() {
        return Ok((basis.monomials().to_vec(), 0));
    }
    let pivots = pivot_columns(&lifts, basis.len());
    let mut is_pivot = vec![false; basis.len()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let columns = basis
        .monomials()
        .iter()
        .zip(&is_pivot)
        .filter(|(_, &p)| !p)
        .map(|(m, _)| m.clone())
        .collect();
    Ok((columns, pivots.len()))
}

fn level_at(levels: &[DegreeLevel], degree: i64) -> Result<&DegreeLevel, EngineError> {
    usize::try_from(degree - 1)
        .ok()
        .and_then(|k| levels.get(k))
        .filter(|l| l.degree == degree)
        .ok_or_else(|| EngineError::Invariant(format!("level {degree} has not been enumerated")))
}

/// Coordinates in `M_β` of every product `x^γ g` with `deg(x^γ) = β - deg(g)`.
fn lift_rows(
    generators: &GeneratorSet,
    beta: &[i64],
    degree: i64,
    levels: &[DegreeLevel],
    basis: &MonomialBasis,
) -> Result<Vec<Vec<Rational>>, EngineError> {
    let mut rows = Vec::new();
    for g in generators {
        let w = g.multidegree.weighted_degree;
        if w >= degree {
            continue;
        }
        let shift: Option<Vec<i64>> = beta
            .iter()
            .zip(&g.multidegree.beta)
            .map(|(b, c)| b.checked_sub(*c))
            .collect();
        let Some(shift) = shift else { continue };
        for gamma in level_at(levels, degree - w)?.lookup_basis(&shift) {
            let mut row = vec![Rational::from_integer(0.into()); basis.len()];
            for (mono, c) in g.poly.terms() {
                let pos = basis.position(&mono.mul(gamma)).ok_or_else(|| {
                    EngineError::Invariant(format!(
                        "lift of a generator leaves the component {beta:?}"
                    ))
                })?;
                row[pos] = c.clone();
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// The matrix whose column `k` is the coefficient vector of `φ(x^{α_k})`,
/// rows indexed by codomain monomials in descending graded-lex order.
pub fn assemble_component(map: &RingMap, columns: &[Monomial]) -> ComponentMatrix {
    let max_exp = columns
        .iter()
        .flat_map(|m| m.iter().map(|(_, e)| e))
        .max()
        .unwrap_or(0);
    assemble_with_powers(&ImagePowers::new(map, max_exp), columns)
}

fn assemble_with_powers(powers: &ImagePowers, columns: &[Monomial]) -> ComponentMatrix {
    let ncols = columns.len();
    let mut rows: BTreeMap<Monomial, Vec<Rational>> = BTreeMap::new();
    for (k, alpha) in columns.iter().enumerate() {
        for (gamma, c) in powers.monomial_image(alpha).terms() {
            rows.entry(gamma.clone())
                .or_insert_with(|| vec![Rational::from_integer(0.into()); ncols])[k] = c.clone();
        }
    }
    ComponentMatrix::new(ncols, rows.into_iter().rev()).expect("rows have one entry per column")
}

/// `true` if some prime in a short sequence starting at `p` shows full column rank.
fn prescreen(l: &ComponentMatrix, p: u64) -> bool {
    let mut prime = p;
    for _ in 0..4 {
        let Some(field) = PrimeField::new(prime) else {
            return false;
        };
        match prescreen_trivial(l, field) {
            Ok(trivial) => return trivial,
            Err(LinalgError::BadPrime { .. }) => match next_prime(prime) {
                Some(q) => prime = q,
                None => return false,
            },
            Err(_) => return false,
        }
    }
    false
}

struct LevelContext<'a> {
    map: &'a RingMap,
    grading: &'a GradingMatrix,
    options: &'a EngineOptions,
    powers: &'a ImagePowers,
    jacobian: Option<&'a EvaluatedJacobian>,
    cache: &'a SkipCache,
    generators: &'a GeneratorSet,
    levels: &'a [DegreeLevel],
    degree: i64,
}

impl LevelContext<'_> {
    fn solve(
        &self,
        beta: &[i64],
        basis: &MonomialBasis,
    ) -> Result<(ComponentTask, Vec<Generator>), EngineError> {
        let mut task = ComponentTask {
            beta: beta.to_vec(),
            basis_size: basis.len(),
            columns: Vec::new(),
            lift_rank: 0,
            status: ComponentStatus::Solved,
            kernel_dim: 0,
        };
        if let Some(jac) = self.jacobian {
            if can_skip(jac, basis.support(), self.cache) {
                task.status = ComponentStatus::SkippedMatroid;
                return Ok((task, Vec::new()));
            }
        }
        let (columns, lift_rank) = if self.options.trim && !self.generators.is_empty() {
            trim_basis(self.generators, beta, self.degree, self.levels)?
        } else {
            (basis.monomials().to_vec(), 0)
        };
        task.columns = columns;
        task.lift_rank = lift_rank;
        if task.columns.is_empty() {
            return Ok((task, Vec::new()));
        }
        let matrix = assemble_with_powers(self.powers, &task.columns);
        if self.options.prescreen && prescreen(&matrix, self.options.prime) {
            task.status = ComponentStatus::SkippedPrescreen;
            return Ok((task, Vec::new()));
        }
        let kernel = exact_kernel(&matrix);
        task.kernel_dim = kernel.dim();
        let multidegree = Multidegree {
            weighted_degree: self.degree,
            beta: beta.to_vec(),
        };
        let n = self.map.n();
        let mut found = Vec::with_capacity(kernel.dim());
        for v in &kernel.vectors {
            let poly = QPoly::from_terms(
                n,
                task.columns
                    .iter()
                    .zip(v)
                    .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
                    .map(|(m, c)| (m.clone(), c.clone())),
            );
            if self.options.verify {
                self.verify(&poly, beta)?;
            }
            found.push(Generator {
                poly,
                multidegree: multidegree.clone(),
                component_size: basis.len(),
                trimmed_size: task.columns.len(),
            });
        }
        Ok((task, found))
    }

    fn verify(&self, poly: &QPoly, beta: &[i64]) -> Result<(), EngineError> {
        let mut image = QPoly::zero(self.map.m());
        for (mono, c) in poly.terms() {
            for (t, d) in self.powers.monomial_image(mono).terms() {
                image.add_term(t.clone(), d * c);
            }
        }
        if !image.is_zero() {
            return Err(EngineError::Invariant(format!(
                "generator in component {beta:?} does not map to zero"
            )));
        }
        for row in self.grading.rows() {
            if !poly.is_homogeneous_int(row).unwrap_or(false) {
                return Err(EngineError::Invariant(format!(
                    "generator in component {beta:?} is not homogeneous"
                )));
            }
        }
        Ok(())
    }
}

/// Minimal generators of `ker φ` of weighted degree at most `max_degree`.
pub fn components_of_kernel(
    map: &RingMap,
    max_degree: i64,
    options: &EngineOptions,
) -> Result<KernelRun, EngineError> {
    if max_degree < 1 {
        return Err(EngineError::BadDegree(max_degree));
    }
    if PrimeField::new(options.prime).is_none() {
        return Err(EngineError::NotPrime(options.prime));
    }
    let grading = match &options.grading {
        Some(g) => g.clone(),
        None => compute_grading(map)?,
    };
    if grading.n() != map.n() {
        return Err(EngineError::GradingShape {
            expected: map.n(),
            got: grading.n(),
        });
    }
    if grading.positive_weight().is_none() {
        return Err(EngineError::NoPositiveGrading);
    }
    let jacobian = if options.skip {
        Some(build_jacobian_retrying(map, options.prime, options.seed)?)
    } else {
        None
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| EngineError::ThreadPool(e.to_string()))?;
    let max_exp = u32::try_from(max_degree).map_err(|_| EngineError::BadDegree(max_degree))?;
    let powers = ImagePowers::new(map, max_exp);
    let cache = SkipCache::new();
    let mut generators = GeneratorSet::default();
    let mut levels: Vec<DegreeLevel> = Vec::new();
    let mut reports = Vec::new();
    let mut all_tasks = Vec::new();
    for degree in 1..=max_degree {
        let started = Instant::now();
        levels.push(enumerate_level(&grading, degree)?);
        let level = levels.last().expect("just pushed");
        let ctx = LevelContext {
            map,
            grading: &grading,
            options,
            powers: &powers,
            jacobian: jacobian.as_ref(),
            cache: &cache,
            generators: &generators,
            levels: &levels,
            degree,
        };
        // largest components first to shorten the tail
        let mut order: Vec<(&Vec<i64>, &MonomialBasis)> = level.components.iter().collect();
        order.sort_by_key(|(beta, basis)| (Reverse(basis.len()), *beta));
        let results: Vec<(ComponentTask, Vec<Generator>)> = pool.install(|| {
            order
                .par_iter()
                .map(|(beta, basis)| ctx.solve(beta, basis))
                .collect::<Result<_, _>>()
        })?;
        let mut tasks = Vec::with_capacity(results.len());
        let mut found = Vec::new();
        for (task, gens) in results {
            tasks.push(task);
            found.extend(gens);
        }
        tasks.sort_by(|a, b| a.beta.cmp(&b.beta));
        let count = |s: ComponentStatus| tasks.iter().filter(|t| t.status == s).count();
        let report = LevelReport {
            degree,
            monomials: level.monomial_count(),
            multidegrees: level.component_count(),
            skipped_matroid: count(ComponentStatus::SkippedMatroid),
            skipped_prescreen: count(ComponentStatus::SkippedPrescreen),
            solved: count(ComponentStatus::Solved),
            generators: found.len(),
            elapsed: started.elapsed(),
        };
        log::info!(
            "degree {degree}: {} monomials, {} components, {} skipped by Jacobian, {} by prescreen, {} generators in {:.2?}",
            report.monomials,
            report.multidegrees,
            report.skipped_matroid,
            report.skipped_prescreen,
            report.generators,
            report.elapsed
        );
        generators.extend(found);
        reports.push(report);
        all_tasks.push(tasks);
    }
    Ok(KernelRun {
        grading,
        generators,
        levels: reports,
        tasks: all_tasks,
        jacobian_prime: jacobian.map(|j| j.prime),
        seed: options.seed,
    })
}

/// The single-matrix-per-degree method: total-degree grading, no skipping or
/// screening, trimming by the same lift mechanism. Only homogeneous kernel
/// elements are found, so the result is complete only for maps whose kernel
/// is homogeneous in the standard grading.
pub fn naive_total_degree_kernel(
    map: &RingMap,
    max_degree: i64,
) -> Result<GeneratorSet, EngineError> {
    naive_total_degree_kernel_capped(map, max_degree, DEFAULT_NAIVE_CAP)
}

pub fn naive_total_degree_kernel_capped(
    map: &RingMap,
    max_degree: i64,
    cap: usize,
) -> Result<GeneratorSet, EngineError> {
    Ok(naive_total_degree_run(map, max_degree, cap)?.generators)
}

/// The naive method with per-level reports; refuses levels with more than
/// `cap` monomials.
pub fn naive_total_degree_run(
    map: &RingMap,
    max_degree: i64,
    cap: usize,
) -> Result<KernelRun, EngineError> {
    if max_degree < 1 {
        return Err(EngineError::BadDegree(max_degree));
    }
    let ones = vec![1; map.n()];
    for degree in 1..=max_degree {
        let count = count_monomials(&ones, degree);
        if count > cap as u128 {
            return Err(EngineError::CapExceeded { degree, count, cap });
        }
    }
    let options = EngineOptions {
        skip: false,
        trim: true,
        prescreen: false,
        threads: 1,
        grading: Some(GradingMatrix::total_degree(map.n())),
        ..EngineOptions::default()
    };
    components_of_kernel(map, max_degree, &options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn cusp_quadric() {
        let map = fixtures::cusp();
        let run = components_of_kernel(&map, 2, &EngineOptions::default()).unwrap();
        assert_eq!(run.generators.len(), 1);
        let g = &run.generators.as_slice()[0];
        assert_eq!(g.poly.display(map.domain_names()).to_string(), "x*z - y^2");
        let naive = naive_total_degree_kernel(&map, 2).unwrap();
        assert_eq!(naive.as_slice()[0].poly, g.poly);
    }

    #[test]
    fn zero_and_coincident_images_give_linear_generators() {
        let t = QPoly::variable(1, 0);
        let map = RingMap::new(
            names(&["x", "y", "z"]),
            names(&["t"]),
            vec![t.clone(), QPoly::zero(1), t],
        )
        .unwrap();
        let run = components_of_kernel(&map, 2, &EngineOptions::default()).unwrap();
        let shown: Vec<String> = run
            .generators
            .iter()
            .map(|g| g.poly.display(map.domain_names()).to_string())
            .collect();
        assert_eq!(
            run.generators.counts_by_total_degree(),
            BTreeMap::from([(1, 2)])
        );
        assert!(shown.contains(&"y".to_string()), "{shown:?}");
        assert!(shown.contains(&"x - z".to_string()), "{shown:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let map = fixtures::cusp();
        assert!(matches!(
            components_of_kernel(&map, 0, &EngineOptions::default()),
            Err(EngineError::BadDegree(0))
        ));
        let opts = EngineOptions {
            grading: Some(GradingMatrix::from_rows(3, vec![vec![1, -1, 0]]).unwrap()),
            ..EngineOptions::default()
        };
        assert!(matches!(
            components_of_kernel(&map, 2, &opts),
            Err(EngineError::NoPositiveGrading)
        ));
        let opts = EngineOptions {
            prime: 91,
            ..EngineOptions::default()
        };
        assert!(matches!(
            components_of_kernel(&map, 2, &opts),
            Err(EngineError::NotPrime(91))
        ));
        let big = fixtures::grassmannian(8).unwrap();
        assert!(matches!(
            naive_total_degree_kernel_capped(&big, 3, 100),
            Err(EngineError::CapExceeded { .. })
        ));
    }

    #[test]
    fn assemble_zero_image_column() {
        let map = RingMap::new(names(&["x"]), names(&["t"]), vec![QPoly::zero(1)]).unwrap();
        let l = assemble_component(&map, &[Monomial::variable(0)]);
        assert_eq!((l.nrows(), l.ncols()), (0, 1));
        assert_eq!(exact_kernel(&l).dim(), 1);
    }

    #[test]
    fn report_counts_reconcile() {
        let map = fixtures::grassmannian(4).unwrap();
        let run = components_of_kernel(&map, 3, &EngineOptions::default()).unwrap();
        for r in &run.levels {
            assert_eq!(
                r.multidegrees,
                r.skipped_matroid + r.skipped_prescreen + r.solved
            );
        }
        assert_eq!(
            run.generators.counts_by_total_degree(),
            BTreeMap::from([(2, 1)])
        );
    }
}
