//! Random generators and property checks shared by the test suites.
//!
//! Every suite is a function taking a case count, so the same checks can run
//! from unit-style tests and from the acceptance report.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use crate::enumerate::{count_monomials, enumerate_level};
use crate::grading::{
    build_constraints, domain_grading, homogeneity_space, multidegree_of, GradingMatrix,
};
use crate::linalg::{exact_kernel, prescreen_trivial, ComponentMatrix};
use crate::polyring::{Monomial, PrimeField, QPoly, Rational, RingMap, DEFAULT_PRIME};

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Small rationals, zero about a third of the time.
pub fn small_rational() -> impl Strategy<Value = Rational> {
    prop_oneof![
        1 => Just(Rational::zero()),
        2 => (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rational(n, d)),
    ]
}

pub fn monomial(nvars: usize, max_exp: u32) -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0..=max_exp, nvars).prop_map(|e| Monomial::from_dense(&e))
}

pub fn polynomial(nvars: usize, max_terms: usize, max_exp: u32) -> impl Strategy<Value = QPoly> {
    prop::collection::vec((monomial(nvars, max_exp), small_rational()), 0..=max_terms)
        .prop_map(move |terms| QPoly::from_terms(nvars, terms))
}

fn names(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i}")).collect()
}

/// Arbitrary maps with `1..=max_n` images in `m` codomain variables.
pub fn ring_map(max_n: usize, m: usize) -> impl Strategy<Value = RingMap> {
    prop::collection::vec(polynomial(m, 3, 2), 1..=max_n).prop_map(move |images| {
        let n = images.len();
        RingMap::new(names("x", n), names("t", m), images).expect("generated map is valid")
    })
}

/// Monomial maps `x_i ↦ t^{v_i}` with every `|v_i| = degree`, so the kernel is
/// homogeneous in the standard grading.
pub fn equal_degree_monomial_map(
    max_n: usize,
    m: usize,
    degree: u32,
) -> impl Strategy<Value = RingMap> {
    let exponent = prop::collection::vec(0..m, degree as usize).prop_map(move |vars| {
        let mut e = vec![0u32; m];
        for v in vars {
            e[v] += 1;
        }
        e
    });
    prop::collection::vec(exponent, 2..=max_n).prop_map(move |vs| {
        let n = vs.len();
        let images = vs
            .iter()
            .map(|e| QPoly::from_terms(m, [(Monomial::from_dense(e), Rational::one())]))
            .collect();
        RingMap::new(names("x", n), names("t", m), images).expect("generated map is valid")
    })
}

/// Dense small-integer matrices, biased towards rank deficiency.
pub fn int_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(
            prop::collection::vec(prop_oneof![2 => Just(0i64), 3 => -3i64..=3], c),
            r,
        )
    })
}

/// Rows that are rational combinations of a few random rows, so kernels are common.
pub fn low_rank_matrix(
    max_rows: usize,
    max_cols: usize,
) -> impl Strategy<Value = (usize, Vec<Vec<Rational>>)> {
    (1..=max_rows, 1..=max_cols, 1..=3usize).prop_flat_map(|(r, c, k)| {
        (
            prop::collection::vec(prop::collection::vec(small_rational(), c), k),
            prop::collection::vec(prop::collection::vec(-2i64..=2, k), r),
        )
            .prop_map(move |(basis, mix)| {
                let rows = mix
                    .iter()
                    .map(|coeffs| {
                        (0..c)
                            .map(|j| {
                                coeffs
                                    .iter()
                                    .zip(&basis)
                                    .fold(Rational::zero(), |acc, (&a, b)| {
                                        acc + Rational::from_integer(a.into()) * &b[j]
                                    })
                            })
                            .collect()
                    })
                    .collect();
                (c, rows)
            })
    })
}

/// Rank by textbook Gaussian elimination over the rationals, scanning pivots
/// from the last column backwards. Independent of the production code path.
pub fn reference_rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut rank = 0;
    for c in (0..ncols).rev() {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = &m[i][c] / &pivot;
                let pivot_row = m[rank].clone();
                for (entry, p) in m[i].iter_mut().zip(&pivot_row) {
                    *entry -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn check(cond: bool, what: &str) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

/// Ring axioms on random polynomials and homomorphism laws for random maps.
pub fn ring_law_suite(cases: u32) -> Result<(), String> {
    let strategy = (
        ring_map(4, 3),
        polynomial(4, 4, 2),
        polynomial(4, 4, 2),
        polynomial(4, 4, 2),
    );
    runner(cases)
        .run(&strategy, |(map, f, g, h)| {
            let n = map.n();
            let (f, g, h) = (restrict(&f, n), restrict(&g, n), restrict(&h, n));
            check(&f + &g == &g + &f, "addition commutes")?;
            check(&f * &g == &g * &f, "multiplication commutes")?;
            check(&(&f + &g) + &h == &f + &(&g + &h), "addition associates")?;
            check(
                &(&f * &g) * &h == &f * &(&g * &h),
                "multiplication associates",
            )?;
            check(&f * &(&g + &h) == &(&f * &g) + &(&f * &h), "distributivity")?;
            check(&f + &QPoly::zero(n) == f, "additive identity")?;
            check(&f * &QPoly::one(n) == f, "multiplicative identity")?;
            check((&f + &(-&f)).is_zero(), "additive inverse")?;
            check(f.pow(2) == &f * &f, "square")?;
            let phi = |p: &QPoly| map.apply(p).expect("same ring");
            check(phi(&(&f + &g)) == &phi(&f) + &phi(&g), "φ additive")?;
            check(phi(&(&f * &g)) == &phi(&f) * &phi(&g), "φ multiplicative")?;
            check(phi(&QPoly::one(n)) == QPoly::one(map.m()), "φ unital")?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Keeps only the first `n` variables (drops terms using others).
fn restrict(f: &QPoly, n: usize) -> QPoly {
    QPoly::from_terms(
        n,
        f.terms()
            .filter(|(m, _)| m.span() <= n)
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

/// A map built to be homogeneous for a chosen weight `ω`, together with `ω`.
fn map_with_weight() -> impl Strategy<Value = (RingMap, Vec<i64>)> {
    (1..=4usize, 1..=4usize).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(-2i64..=2, m),
            prop::collection::vec(prop::collection::vec(monomial(m, 2), 1..=4), n),
            prop::collection::vec(prop::collection::vec(-3i64..=3, 4), n),
        )
            .prop_map(move |(wt, monos, coeffs)| {
                let images: Vec<QPoly> = monos
                    .iter()
                    .zip(&coeffs)
                    .map(|(ms, cs)| {
                        let lead = ms[0].weighted_degree(&wt).expect("small weights");
                        QPoly::from_terms(
                            m,
                            ms.iter()
                                .zip(cs)
                                .filter(|(mono, _)| mono.weighted_degree(&wt) == Some(lead))
                                .map(|(mono, &c)| (mono.clone(), Rational::from_integer(c.into()))),
                        )
                    })
                    .collect();
                let mut omega: Vec<i64> = images
                    .iter()
                    .map(|img| {
                        img.leading_monomial()
                            .map_or(0, |mono| mono.weighted_degree(&wt).unwrap())
                    })
                    .collect();
                // a zero image leaves its weight free
                for (o, img) in omega.iter_mut().zip(&images) {
                    if img.is_zero() {
                        *o = 5;
                    }
                }
                omega.extend(&wt);
                let map = RingMap::new(names("x", n), names("t", m), images).expect("valid");
                (map, omega)
            })
    })
}

/// Homogeneity-space exactness, maximality, primitivity, homogeneity of the
/// image of every graded monomial, and well-defined weighted degrees.
pub fn grading_suite(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(
            &(map_with_weight(), monomial(4, 3), monomial(4, 3)),
            |((map, omega), a1, a2)| {
                let (n, m) = (map.n(), map.m());
                let constraints = build_constraints(&map);
                let basis = homogeneity_space(&map).expect("small map");
                for b in &basis.full_vectors {
                    for row in &constraints {
                        let dot: i64 = row.iter().zip(b).map(|(x, y)| x * y).sum();
                        check(dot == 0, "basis vector satisfies every constraint")?;
                    }
                    let g = b.iter().fold(0i64, |acc, &x| gcd(acc, x));
                    check(g == 1, "basis vector is primitive")?;
                }
                check(
                    basis.full_vectors.len() + basis.constraint_rank == n + m,
                    "dimension + rank = n + m",
                )?;
                let mut stacked = basis.full_vectors.clone();
                let before = crate::linalg::integer_rank(&stacked, n + m);
                stacked.push(omega.clone());
                check(
                    crate::linalg::integer_rank(&stacked, n + m) == before,
                    "a homogeneity vector lies in the span of the basis",
                )?;
                let grading = domain_grading(&basis);
                check(
                    crate::linalg::integer_rank(grading.rows(), n) == grading.rank(),
                    "grading rows are independent",
                )?;
                for (full, row) in grading.full_rows().iter().zip(grading.rows()) {
                    for (i, img) in map.images().iter().enumerate() {
                        for (mono, _) in img.terms() {
                            check(
                                mono.weighted_degree(&full[n..]) == Some(row[i]),
                                "image degree equals the column of A",
                            )?;
                        }
                    }
                }
                if let Some(w) = grading.positive_weight() {
                    check(w.iter().all(|&x| x >= 1), "positive weight is positive")?;
                    let mut with_w = grading.rows().to_vec();
                    with_w.push(w.to_vec());
                    check(
                        crate::linalg::integer_rank(&with_w, n) == grading.rank(),
                        "positive weight lies in the row space",
                    )?;
                    let a1 = restrict_monomial(&a1, n);
                    let a2 = restrict_monomial(&a2, n);
                    let d1 = multidegree_of(&grading, &a1).expect("small");
                    let d2 = multidegree_of(&grading, &a2).expect("small");
                    if d1.beta == d2.beta {
                        check(
                            d1.weighted_degree == d2.weighted_degree,
                            "weighted degree is determined by β",
                        )?;
                    }
                }
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

fn restrict_monomial(m: &Monomial, n: usize) -> Monomial {
    Monomial::from_pairs(m.iter().filter(|&(v, _)| v < n))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Level enumeration partitions the monomials of each weighted degree.
pub fn enumerate_suite(cases: u32) -> Result<(), String> {
    let strategy = (1..=5usize, 1..=4i64, any::<bool>()).prop_flat_map(|(n, degree, ones)| {
        (
            if ones {
                Just(vec![1i64; n]).boxed()
            } else {
                prop::collection::vec(1i64..=3, n).boxed()
            },
            prop::collection::vec(prop::collection::vec(-2i64..=2, n), 0..=2),
            Just(degree),
        )
    });
    runner(cases)
        .run(&strategy, |(weight, extra, degree)| {
            let n = weight.len();
            let mut rows = vec![weight.clone()];
            rows.extend(extra);
            let grading = GradingMatrix::from_rows(n, rows).expect("consistent rows");
            let a = grading
                .positive_weight()
                .expect("weight row is positive")
                .to_vec();
            let level = enumerate_level(&grading, degree).expect("small level");
            check(
                level.monomial_count() as u128 == count_monomials(&a, degree),
                "level size equals the monomial count",
            )?;
            if weight.iter().all(|&w| w == 1) {
                check(
                    level.monomial_count() as u128
                        == binomial(n as u128 + degree as u128 - 1, degree as u128),
                    "level size is binomial for unit weights",
                )?;
            }
            let mut seen = std::collections::HashSet::new();
            for (beta, basis) in &level.components {
                check(!basis.is_empty(), "no empty components")?;
                for mono in basis.monomials() {
                    let md = multidegree_of(&grading, mono).expect("small");
                    check(&md.beta == beta, "Aα = β")?;
                    check(md.weighted_degree == degree, "a·α = degree")?;
                    check(seen.insert(mono.clone()), "each monomial appears once")?;
                }
                check(
                    basis.monomials().windows(2).all(|w| w[0] > w[1]),
                    "members in descending graded-lex order",
                )?;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Rank–nullity against an independent elimination, exact annihilation,
/// normalization idempotence, and prescreen soundness over several primes.
pub fn linalg_suite(cases: u32) -> Result<(), String> {
    let strategy = (
        prop_oneof![
            int_matrix(7, 6).prop_map(|rows| {
                let c = rows[0].len();
                (
                    c,
                    rows.into_iter()
                        .map(|r| r.into_iter().map(|v| rational(v, 1)).collect())
                        .collect(),
                )
            }),
            low_rank_matrix(8, 6),
        ],
        prop::sample::select(vec![2u64, 3, 5, 7, 101, DEFAULT_PRIME]),
    );
    runner(cases)
        .run(&strategy, |((ncols, rows), p)| {
            let l = ComponentMatrix::from_rows(ncols, rows.clone()).expect("rectangular");
            let kernel = exact_kernel(&l);
            let rank = reference_rank(&rows, ncols);
            check(rank + kernel.dim() == ncols, "rank + nullity = columns")?;
            check(l.rank() == rank, "rank agrees with the reference")?;
            for v in &kernel.vectors {
                check(l.apply(v).iter().all(Zero::is_zero), "L v = 0")?;
            }
            check(
                reference_rank(&kernel.vectors, ncols) == kernel.dim(),
                "kernel vectors are independent",
            )?;
            check(kernel.normalize() == kernel, "normalization is idempotent")?;
            let field = PrimeField::new(p).expect("prime");
            if let Ok(true) = prescreen_trivial(&l, field) {
                check(kernel.is_trivial(), "prescreen certifies a trivial kernel")?;
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// All four suites with the given case count; the first failure is returned.
pub fn all_property_suites(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("polyring ring/homomorphism laws", ring_law_suite(cases)),
        ("grading exactness/maximality", grading_suite(cases)),
        ("enumerate partition identity", enumerate_suite(cases)),
        (
            "linalg rank-nullity and prescreen soundness",
            linalg_suite(cases),
        ),
    ]
}
