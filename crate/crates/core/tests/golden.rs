//! Worked examples on the Plücker embedding of Gr(2,4), the cusp map and the
//! 4-sunlet, plus agreement with the single-matrix method.

use std::collections::BTreeMap;

use implicit_core::engine::{assemble_component, naive_total_degree_kernel, trim_basis};
use implicit_core::enumerate::enumerate_level;
use implicit_core::grading::{compute_grading, homogeneity_space};
use implicit_core::linalg::{exact_kernel, integer_rank, rational_rank};
use implicit_core::matroid::{build_jacobian, can_skip, SkipCache};
use implicit_core::testkit::rational;
use implicit_core::{
    components_of_kernel, fixtures, EngineOptions, GradingMatrix, Monomial, QPoly, Rational,
    RingMap, DEFAULT_PRIME,
};

/// Rows spanning the homogeneity space of the Gr(2,4) elimination ideal, columns
/// `p12 p13 p23 p14 p24 p34 | x11 x12 x13 x14 x21 x22 x23 x24`.
const GR24_HOMOGENEITY: [[i64; 14]; 5] = [
    [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0],
    [1, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0],
    [1, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0],
    [0, 1, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0],
    [-1, -1, -1, 0, 0, 0, -1, -1, -1, 0, 0, 0, 0, 1],
];

fn gr24_domain_grading() -> GradingMatrix {
    let rows = GR24_HOMOGENEITY.iter().map(|r| r[..6].to_vec()).collect();
    GradingMatrix::from_rows(6, rows).unwrap()
}

/// `p_ij p_kl` as a monomial in the variable order p12 p13 p23 p14 p24 p34.
fn pp(names: &[&str]) -> Monomial {
    let order = ["p12", "p13", "p23", "p14", "p24", "p34"];
    Monomial::from_pairs(
        names
            .iter()
            .map(|n| (order.iter().position(|o| o == n).unwrap(), 1)),
    )
}

fn plucker() -> QPoly {
    // p23 p14 - p13 p24 + p12 p34
    QPoly::from_terms(
        6,
        [
            (pp(&["p23", "p14"]), rational(1, 1)),
            (pp(&["p13", "p24"]), rational(-1, 1)),
            (pp(&["p12", "p34"]), rational(1, 1)),
        ],
    )
}

#[test]
fn gr24_homogeneity_space_matches() {
    let map = fixtures::grassmannian(4).unwrap();
    let basis = homogeneity_space(&map).unwrap();
    assert_eq!(basis.full_vectors.len(), 5);
    let reference: Vec<Vec<i64>> = GR24_HOMOGENEITY.iter().map(|r| r.to_vec()).collect();
    let mut stacked = reference.clone();
    stacked.extend(basis.full_vectors.iter().cloned());
    assert_eq!(integer_rank(&reference, 14), 5);
    assert_eq!(integer_rank(&stacked, 14), 5);
    let grading = compute_grading(&map).unwrap();
    assert_eq!(grading.rank(), 4);
    assert_eq!(grading.positive_weight(), Some(&[1; 6][..]));
    assert_eq!(integer_rank(gr24_domain_grading().rows(), 6), 4);
}

#[test]
fn gr24_level_two_components() {
    let grading = gr24_domain_grading();
    let level = enumerate_level(&grading, 2).unwrap();
    assert_eq!(level.monomial_count(), 21);
    assert_eq!(level.component_count(), 19);
    let big: Vec<_> = level
        .components
        .iter()
        .filter(|(_, b)| b.len() > 1)
        .collect();
    assert_eq!(big.len(), 1);
    assert_eq!(big[0].0, &vec![2, 1, 1, 1, -1]);
    assert_eq!(
        big[0].1.monomials(),
        &[
            pp(&["p12", "p34"]),
            pp(&["p13", "p24"]),
            pp(&["p23", "p14"])
        ]
    );
    let level1 = enumerate_level(&grading, 1).unwrap();
    assert_eq!(level1.lookup_basis(&grading.column(0)), &[pp(&["p12"])]);
    assert!(level.lookup_basis(&[9, 9, 9, 9, 9]).is_empty());
}

#[test]
fn gr24_quadric_component_matrix() {
    let map = fixtures::grassmannian(4).unwrap();
    let columns = [
        pp(&["p12", "p34"]),
        pp(&["p13", "p24"]),
        pp(&["p23", "p14"]),
    ];
    let l = assemble_component(&map, &columns);
    assert_eq!((l.nrows(), l.ncols()), (6, 3));
    let mut rows: Vec<Vec<i64>> = l
        .rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| v.to_integer().try_into().unwrap())
                .collect()
        })
        .collect();
    rows.sort();
    let mut expected = vec![
        vec![0, 1, 1],
        vec![1, 0, -1],
        vec![-1, -1, 0],
        vec![-1, -1, 0],
        vec![1, 0, -1],
        vec![0, 1, 1],
    ];
    expected.sort();
    assert_eq!(rows, expected);
    let kernel = exact_kernel(&l);
    assert_eq!(
        kernel.vectors,
        vec![vec![rational(1, 1), rational(-1, 1), rational(1, 1)]]
    );
}

#[test]
fn gr24_cubic_component_is_trimmed_to_nothing() {
    let map = fixtures::grassmannian(4).unwrap();
    let grading = gr24_domain_grading();
    let options = EngineOptions {
        grading: Some(grading.clone()),
        ..EngineOptions::default()
    };
    let run = components_of_kernel(&map, 2, &options).unwrap();
    assert_eq!(run.generators.len(), 1);
    let levels: Vec<_> = (1..=3)
        .map(|d| enumerate_level(&grading, d).unwrap())
        .collect();
    let beta = [3, 1, 1, 2, -1];
    let full = levels[2].lookup_basis(&beta);
    assert_eq!(full.len(), 3);
    let untrimmed = assemble_component(&map, full);
    assert_eq!((untrimmed.nrows(), untrimmed.ncols()), (10, 3));
    assert_eq!(exact_kernel(&untrimmed).dim(), 1);
    let (columns, lift_rank) = trim_basis(&run.generators, &beta, 3, &levels).unwrap();
    assert_eq!(lift_rank, 1);
    assert_eq!(
        columns,
        vec![pp(&["p13", "p24", "p34"]), pp(&["p23", "p14", "p34"])]
    );
    assert!(exact_kernel(&assemble_component(&map, &columns)).is_trivial());
}

#[test]
fn gr24_single_matrix_method() {
    let map = fixtures::grassmannian(4).unwrap();
    let level = enumerate_level(&GradingMatrix::total_degree(6), 2).unwrap();
    let l = assemble_component(&map, level.lookup_basis(&[2]));
    assert_eq!((l.nrows(), l.ncols()), (72, 21));
    assert_eq!(exact_kernel(&l).dim(), 1);
    let naive = naive_total_degree_kernel(&map, 2).unwrap();
    assert_eq!(naive.len(), 1);
    assert_eq!(naive.as_slice()[0].poly, plucker());
}

#[test]
fn gr24_run_to_degree_three() {
    let map = fixtures::grassmannian(4).unwrap();
    let run = components_of_kernel(&map, 3, &EngineOptions::default()).unwrap();
    assert_eq!(
        run.generators.counts_by_total_degree(),
        BTreeMap::from([(2, 1)])
    );
    assert_eq!(run.generators.as_slice()[0].poly, plucker());
    assert_eq!(
        run.generators.as_slice()[0]
            .poly
            .display(map.domain_names())
            .to_string(),
        "p12*p34 - p13*p24 + p23*p14"
    );
}

/// The symbolic Jacobian of the Plücker map as polynomials.
fn symbolic_jacobian(map: &RingMap) -> Vec<Vec<QPoly>> {
    (0..map.m())
        .map(|i| {
            map.images()
                .iter()
                .map(|img| img.partial_derivative(i).unwrap())
                .collect()
        })
        .collect()
}

#[test]
fn gr24_jacobian_has_generic_rank_five() {
    let map = fixtures::grassmannian(4).unwrap();
    let jac = symbolic_jacobian(&map);
    assert_eq!((jac.len(), jac[0].len()), (8, 6));
    // upper bound: the gradient of the relation, pulled back, is a kernel vector of J
    let f = plucker();
    let grad: Vec<QPoly> = (0..6)
        .map(|j| map.apply(&f.partial_derivative(j).unwrap()).unwrap())
        .collect();
    assert!(grad.iter().any(|g| !g.is_zero()));
    for row in &jac {
        let dot = row
            .iter()
            .zip(&grad)
            .fold(QPoly::zero(8), |acc, (a, b)| &acc + &(a * b));
        assert!(dot.is_zero());
    }
    // lower bound: exact rank 5 at a rational point
    let point: Vec<Rational> = [3, -1, 4, 1, -5, 9, 2, 6]
        .iter()
        .map(|&v| rational(v, 1))
        .collect();
    let evaluated: Vec<Vec<Rational>> = jac
        .iter()
        .map(|row| row.iter().map(|e| e.eval(&point).unwrap()).collect())
        .collect();
    assert_eq!(rational_rank(&evaluated, 6), 5);
    let modular = build_jacobian(&map, DEFAULT_PRIME, 0).unwrap();
    assert_eq!(modular.column_rank(&[0, 1, 2, 3, 4, 5]), 5);
    let cache = SkipCache::new();
    assert!(can_skip(&modular, &[0, 1], &cache));
    assert!(!can_skip(&modular, &[0, 1, 2, 3, 4, 5], &cache));
}

#[test]
fn cusp_grading_and_generator() {
    let map = fixtures::cusp();
    let grading = compute_grading(&map).unwrap();
    assert_eq!(grading.rows(), &[vec![2, 2, 2]]);
    let run = components_of_kernel(&map, 2, &EngineOptions::default()).unwrap();
    let shown: Vec<String> = run
        .generators
        .iter()
        .map(|g| g.poly.display(map.domain_names()).to_string())
        .collect();
    assert_eq!(shown, vec!["x*z - y^2"]);
}

#[test]
fn gr25_has_five_quadrics() {
    let map = fixtures::grassmannian(5).unwrap();
    let naive = naive_total_degree_kernel(&map, 3).unwrap();
    let run = components_of_kernel(&map, 3, &EngineOptions::default()).unwrap();
    assert_eq!(naive.counts_by_total_degree(), BTreeMap::from([(2, 5)]));
    assert_eq!(
        run.generators.counts_by_total_degree(),
        naive.counts_by_total_degree()
    );
}

#[test]
fn gr23_kernel_is_trivial() {
    let map = fixtures::grassmannian(3).unwrap();
    assert!(naive_total_degree_kernel(&map, 3).unwrap().is_empty());
    assert!(components_of_kernel(&map, 3, &EngineOptions::default())
        .unwrap()
        .generators
        .is_empty());
}

#[test]
fn skipped_components_really_are_empty() {
    let map = fixtures::grassmannian(5).unwrap();
    let run = components_of_kernel(&map, 3, &EngineOptions::default()).unwrap();
    let levels: Vec<_> = (1..=3)
        .map(|d| enumerate_level(&run.grading, d).unwrap())
        .collect();
    for (level, tasks) in levels.iter().zip(&run.tasks) {
        for task in tasks {
            if task.status != implicit_core::ComponentStatus::Solved {
                let l = assemble_component(&map, level.lookup_basis(&task.beta));
                let kernel = exact_kernel(&l);
                // a skipped component may only hold lifts of lower generators
                let (_, lift) =
                    trim_basis(&run.generators, &task.beta, level.degree, &levels).unwrap();
                assert_eq!(kernel.dim(), lift, "component {:?}", task.beta);
            }
        }
    }
}

#[test]
fn sunlet_counts() {
    let map = fixtures::sunlet_k3p();
    let grading = compute_grading(&map).unwrap();
    assert_eq!(grading.rank(), 13);
    let run = components_of_kernel(&map, 3, &EngineOptions::default()).unwrap();
    assert_eq!(
        run.generators.counts_by_total_degree(),
        BTreeMap::from([(2, 12), (3, 64)])
    );
    let l2 = &run.levels[1];
    assert_eq!(
        (l2.monomials, l2.multidegrees, l2.skipped_matroid),
        (2080, 1720, 1708)
    );
    let l3 = &run.levels[2];
    assert_eq!(
        (l3.monomials, l3.multidegrees, l3.skipped_matroid),
        (45760, 25152, 24304)
    );
}
