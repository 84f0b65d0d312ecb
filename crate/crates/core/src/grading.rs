//! Multigradings in which the kernel of a ring map is homogeneous.
//!
//! Weight vectors `ω ∈ ℤ^{n+m}` making every generator `x_i - φ(x_i)` of the
//! elimination ideal homogeneous form a linear space; restricting them to the
//! domain coordinates gives gradings of `ker φ`. The rows of [`GradingMatrix`]
//! are a maximal independent subset of those restrictions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::{integer_nullspace, integer_rank};
use crate::polyring::coeff::content;
use crate::polyring::{Monomial, RingMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradingError {
    #[error("integer overflow in grading arithmetic")]
    Overflow,
    #[error("grading has no strictly positive weight vector in its row space")]
    NoPositiveWeight,
    #[error("grading row has {got} entries, expected {expected}")]
    RaggedRow { expected: usize, got: usize },
    #[error("malformed grading text: {0}")]
    Parse(String),
}

/// Integer basis of the homogeneity space of the elimination ideal
/// `⟨x_i - φ(x_i)⟩`, with domain coordinates first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneityBasis {
    pub n: usize,
    pub m: usize,
    /// Primitive vectors, sorted by (max |entry|, lexicographic).
    pub full_vectors: Vec<Vec<i64>>,
    pub constraint_rank: usize,
    /// Domain variables mapped to zero; they contribute no constraints.
    pub zero_image_vars: Vec<usize>,
}

/// A multidegree `β = Aα` together with the weighted degree `a·α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multidegree {
    pub weighted_degree: i64,
    pub beta: Vec<i64>,
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.beta.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// An integer grading matrix `A` (r × n) on the domain, plus a strictly
/// positive weight vector in its row space when one exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradingMatrix {
    n: usize,
    rows: Vec<Vec<i64>>,
    full_rows: Vec<Vec<i64>>,
    positive_weight: Option<Vec<i64>>,
}

impl GradingMatrix {
    /// A user-supplied grading. Rows need not be independent; no full
    /// (pre-projection) rows are recorded.
    pub fn from_rows(n: usize, rows: Vec<Vec<i64>>) -> Result<Self, GradingError> {
        for r in &rows {
            if r.len() != n {
                return Err(GradingError::RaggedRow {
                    expected: n,
                    got: r.len(),
                });
            }
        }
        let positive_weight = find_positive_weight(&rows, n);
        Ok(Self {
            n,
            rows,
            full_rows: Vec::new(),
            positive_weight,
        })
    }

    /// The standard grading by total degree, `A = 𝟙`.
    pub fn total_degree(n: usize) -> Self {
        Self {
            n,
            rows: vec![vec![1; n]],
            full_rows: Vec::new(),
            positive_weight: Some(vec![1; n]),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rows `r`.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Rows over all `n + m` variables before projection (empty for explicit gradings).
    pub fn full_rows(&self) -> &[Vec<i64>] {
        &self.full_rows
    }

    pub fn positive_weight(&self) -> Option<&[i64]> {
        self.positive_weight.as_deref()
    }

    /// Column `j` of `A`: the multidegree of `x_j`.
    pub fn column(&self, j: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Plain-text export: a header line `r n`, then one space-separated row per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows.len(), self.n);
        for r in &self.rows {
            let parts: Vec<String> = r.iter().map(i64::to_string).collect();
            out.push_str(&parts.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, GradingError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| GradingError::Parse("missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| GradingError::Parse(format!("bad header `{header}`")))
            })
            .collect::<Result<_, _>>()?;
        let [r, n] = dims[..] else {
            return Err(GradingError::Parse(format!("bad header `{header}`")));
        };
        let rows: Vec<Vec<i64>> = lines
            .map(|l| {
                l.split_whitespace()
                    .map(|t| {
                        t.parse()
                            .map_err(|_| GradingError::Parse(format!("bad entry `{t}`")))
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        if rows.len() != r {
            return Err(GradingError::Parse(format!(
                "expected {r} rows, found {}",
                rows.len()
            )));
        }
        Self::from_rows(n, rows)
    }
}

/// One row per (domain variable, monomial of its image): `ω_{x_i} - Σ_j α_j ω_{t_j} = 0`.
/// Zero images contribute nothing; a constant term forces `ω_{x_i} = 0`.
pub fn build_constraints(map: &RingMap) -> Vec<Vec<i64>> {
    let (n, m) = (map.n(), map.m());
    let mut rows = Vec::new();
    for (i, img) in map.images().iter().enumerate() {
        for (mono, _) in img.terms() {
            let mut row = vec![0i64; n + m];
            row[i] = 1;
            for (j, e) in mono.iter() {
                row[n + j] = -(e as i64);
            }
            rows.push(row);
        }
    }
    rows
}

/// Integer basis of the homogeneity space of `⟨x_i - φ(x_i)⟩`.
pub fn homogeneity_space(map: &RingMap) -> Result<HomogeneityBasis, GradingError> {
    let (n, m) = (map.n(), map.m());
    let constraints = build_constraints(map);
    let constraint_rank = integer_rank(&constraints, n + m);
    let mut full_vectors: Vec<Vec<i64>> = integer_nullspace(&constraints, n + m)
        .into_iter()
        .map(|v| {
            v.iter()
                .map(|x| x.to_i64().ok_or(GradingError::Overflow))
                .collect::<Result<Vec<i64>, _>>()
        })
        .collect::<Result<_, _>>()?;
    full_vectors.sort_by(|a, b| {
        let max_abs = |v: &[i64]| v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
        max_abs(a).cmp(&max_abs(b)).then_with(|| a.cmp(b))
    });
    let zero_image_vars = (0..n).filter(|&i| map.image(i).is_zero()).collect();
    Ok(HomogeneityBasis {
        n,
        m,
        full_vectors,
        constraint_rank,
        zero_image_vars,
    })
}

/// Projects the homogeneity basis to the domain and keeps the first maximal
/// independent subset, in basis order.
pub fn domain_grading(basis: &HomogeneityBasis) -> GradingMatrix {
    let n = basis.n;
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut full_rows = Vec::new();
    for v in &basis.full_vectors {
        let projected = v[..n].to_vec();
        if projected.iter().all(|&x| x == 0) {
            continue;
        }
        rows.push(projected);
        if integer_rank(&rows, n) == rows.len() {
            full_rows.push(v.clone());
        } else {
            rows.pop();
        }
    }
    let positive_weight = find_positive_weight(&rows, n);
    GradingMatrix {
        n,
        rows,
        full_rows,
        positive_weight,
    }
}

/// The grading computed from the map: [`homogeneity_space`] followed by [`domain_grading`].
pub fn compute_grading(map: &RingMap) -> Result<GradingMatrix, GradingError> {
    Ok(domain_grading(&homogeneity_space(map)?))
}

// Above this many inequalities the elimination gives up.
const FOURIER_MOTZKIN_LIMIT: usize = 200_000;

/// A strictly positive integer vector in the row space of `rows`, if any.
///
/// Returns `𝟙` whenever it lies in the rational row space. Otherwise solves
/// `uᵀA > 0` exactly by Fourier–Motzkin elimination over the coefficients `u`
/// and scales `uᵀA` to a primitive integer vector.
pub fn find_positive_weight(rows: &[Vec<i64>], n: usize) -> Option<Vec<i64>> {
    if n == 0 {
        return Some(Vec::new());
    }
    if rows.is_empty() {
        return None;
    }
    let rank = integer_rank(rows, n);
    let mut with_ones = rows.to_vec();
    with_ones.push(vec![1; n]);
    if integer_rank(&with_ones, n) == rank {
        return Some(vec![1; n]);
    }
    let r = rows.len();
    // inequality j: Σ_k u_k A[k][j] > 0
    let system: Vec<Vec<BigInt>> = (0..n)
        .map(|j| primitive((0..r).map(|k| BigInt::from(rows[k][j])).collect()))
        .collect();
    let u = fourier_motzkin(system, r)?;
    let combo: Vec<BigRational> = (0..n)
        .map(|j| {
            (0..r).fold(BigRational::zero(), |acc, k| {
                acc + &u[k] * BigRational::from_integer(BigInt::from(rows[k][j]))
            })
        })
        .collect();
    let lcm = combo
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = combo
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let g = content(&ints);
    let weight: Vec<i64> = ints
        .iter()
        .map(|v| (v / &g).to_i64())
        .collect::<Option<_>>()?;
    debug_assert!(weight.iter().all(|&w| w > 0));
    weight.iter().all(|&w| w > 0).then_some(weight)
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = content(&v);
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
    v
}

/// Finds `u` with `c·u > 0` for every constraint `c`, or `None` if infeasible.
fn fourier_motzkin(system: Vec<Vec<BigInt>>, vars: usize) -> Option<Vec<BigRational>> {
    // stages[s] holds the system after eliminating the variables in order[..s]
    let mut stages: Vec<Vec<Vec<BigInt>>> = vec![dedup(system)];
    let mut order: Vec<usize> = Vec::new();
    let mut remaining: Vec<usize> = (0..vars).collect();
    while !remaining.is_empty() {
        let current = stages.last().expect("at least one stage");
        if current.iter().any(|c| c.iter().all(Zero::is_zero)) {
            return None;
        }
        // eliminate the variable producing the fewest combinations
        let (pos_in_remaining, &var) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &k)| {
                let p = current.iter().filter(|c| c[k].is_positive()).count();
                let q = current.iter().filter(|c| c[k].is_negative()).count();
                p * q
            })
            .expect("remaining is nonempty");
        remaining.remove(pos_in_remaining);
        let (pos, neg): (Vec<&Vec<BigInt>>, Vec<&Vec<BigInt>>) = (
            current.iter().filter(|c| c[var].is_positive()).collect(),
            current.iter().filter(|c| c[var].is_negative()).collect(),
        );
        if pos.len() * neg.len() > FOURIER_MOTZKIN_LIMIT {
            log::warn!(
                "positive-weight search abandoned: {} inequalities",
                pos.len() * neg.len()
            );
            return None;
        }
        let mut next: Vec<Vec<BigInt>> = current
            .iter()
            .filter(|c| c[var].is_zero())
            .cloned()
            .collect();
        for p in &pos {
            for q in &neg {
                let a = -&q[var];
                let b = &p[var];
                let combined: Vec<BigInt> = p
                    .iter()
                    .zip(q.iter())
                    .map(|(x, y)| &a * x + b * y)
                    .collect();
                next.push(primitive(combined));
            }
        }
        stages.push(dedup(next));
        order.push(var);
    }
    if stages
        .last()
        .expect("final stage")
        .iter()
        .any(|c| c.iter().all(Zero::is_zero))
    {
        return None;
    }
    // back-substitute in reverse elimination order
    let mut u: Vec<Option<BigRational>> = vec![None; vars];
    for (s, &var) in order.iter().enumerate().rev() {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for c in &stages[s] {
            if c[var].is_zero() {
                continue;
            }
            let rest = c.iter().enumerate().filter(|&(k, _)| k != var).fold(
                BigRational::zero(),
                |acc, (k, ck)| match &u[k] {
                    Some(val) => acc + val * BigRational::from_integer(ck.clone()),
                    None => acc,
                },
            );
            let bound = -rest / BigRational::from_integer(c[var].clone());
            if c[var].is_positive() {
                lo = Some(lo.map_or(bound.clone(), |l| l.max(bound)));
            } else {
                hi = Some(hi.map_or(bound.clone(), |h| h.min(bound)));
            }
        }
        let value = match (lo, hi) {
            (Some(l), Some(h)) => (l + h) / BigRational::from_integer(BigInt::from(2)),
            (Some(l), None) => l.floor() + BigRational::one(),
            (None, Some(h)) => h.ceil() - BigRational::one(),
            (None, None) => BigRational::zero(),
        };
        u[var] = Some(value);
    }
    Some(
        u.into_iter()
            .map(|v| v.unwrap_or_else(BigRational::zero))
            .collect(),
    )
}

fn dedup(mut system: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    system.sort();
    system.dedup();
    system
}

/// `β = Aα` and the weighted degree `a·α`.
pub fn multidegree_of(
    grading: &GradingMatrix,
    alpha: &Monomial,
) -> Result<Multidegree, GradingError> {
    let weight = grading
        .positive_weight()
        .ok_or(GradingError::NoPositiveWeight)?;
    let beta = grading
        .rows()
        .iter()
        .map(|row| alpha.weighted_degree(row).ok_or(GradingError::Overflow))
        .collect::<Result<Vec<i64>, _>>()?;
    let weighted_degree = alpha
        .weighted_degree(weight)
        .ok_or(GradingError::Overflow)?;
    Ok(Multidegree {
        weighted_degree,
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::polyring::QPoly;

    fn monomial_map(exps: &[&[u32]], m: usize) -> RingMap {
        let images = exps
            .iter()
            .map(|e| QPoly::from_int_terms(m, &[(1, e)]))
            .collect::<Vec<_>>();
        let dn = (0..images.len()).map(|i| format!("x{i}")).collect();
        let cn = (0..m).map(|j| format!("t{j}")).collect();
        RingMap::new(dn, cn, images).unwrap()
    }

    #[test]
    fn cusp_constraints_and_space() {
        let map = fixtures::cusp();
        let rows = build_constraints(&map);
        // 3 + 2 + 3 monomials in the images
        assert_eq!(rows.len(), 8);
        let basis = homogeneity_space(&map).unwrap();
        assert_eq!(basis.full_vectors, vec![vec![2, 2, 2, 1, 1]]);
        assert_eq!(basis.constraint_rank, 4);
        let grading = domain_grading(&basis);
        assert_eq!(grading.rows(), &[vec![2, 2, 2]]);
        assert_eq!(grading.full_rows(), &[vec![2, 2, 2, 1, 1]]);
        assert_eq!(grading.positive_weight(), Some(&[1, 1, 1][..]));
    }

    #[test]
    fn identity_map() {
        let map = monomial_map(&[&[1]], 1);
        assert_eq!(build_constraints(&map), vec![vec![1, -1]]);
        let basis = homogeneity_space(&map).unwrap();
        assert_eq!(basis.full_vectors, vec![vec![1, 1]]);
    }

    #[test]
    fn monomial_maps_have_one_row_per_image() {
        let map = monomial_map(&[&[2, 0], &[1, 1], &[0, 2], &[3, 1]], 2);
        assert_eq!(build_constraints(&map).len(), 4);
    }

    #[test]
    fn trivial_space_gives_empty_grading() {
        let images = vec![QPoly::from_int_terms(1, &[(1, &[1]), (1, &[2])])];
        let map = RingMap::new(vec!["x".into()], vec!["t".into()], images).unwrap();
        let basis = homogeneity_space(&map).unwrap();
        assert!(basis.full_vectors.is_empty());
        let grading = domain_grading(&basis);
        assert_eq!(grading.rank(), 0);
        assert_eq!(grading.positive_weight(), None);
    }

    #[test]
    fn zero_images_get_unit_rows() {
        let images = vec![QPoly::variable(1, 0), QPoly::zero(1)];
        let map = RingMap::new(vec!["x".into(), "y".into()], vec!["t".into()], images).unwrap();
        let basis = homogeneity_space(&map).unwrap();
        assert_eq!(basis.zero_image_vars, vec![1]);
        assert!(basis.full_vectors.contains(&vec![0, 1, 0]));
        let grading = domain_grading(&basis);
        assert_eq!(grading.rank(), 2);
        assert!(grading.positive_weight().is_some());
    }

    #[test]
    fn positive_weight_search() {
        assert_eq!(find_positive_weight(&[vec![1, -1]], 2), None);
        assert_eq!(
            find_positive_weight(&[vec![2, 2, 2]], 3),
            Some(vec![1, 1, 1])
        );
        // 𝟙 is not in the row space, but (1,2) is
        assert_eq!(find_positive_weight(&[vec![1, 2]], 2), Some(vec![1, 2]));
        let w = find_positive_weight(&[vec![1, -1, 0], vec![0, 2, 1]], 3).unwrap();
        assert!(w.iter().all(|&x| x > 0));
        let a = [vec![1, -1, 0], vec![0, 2, 1]];
        let stacked = vec![a[0].clone(), a[1].clone(), w.clone()];
        assert_eq!(integer_rank(&stacked, 3), 2);
        assert_eq!(find_positive_weight(&[vec![1, 0], vec![-1, 0]], 2), None);
        assert_eq!(find_positive_weight(&[], 2), None);
    }

    #[test]
    fn positive_weight_needs_combination() {
        // neither row is positive; 2*row0 + row1 = (1, 1, 3) is not 𝟙-proportional
        let rows = [vec![1, 2, 1], vec![-1, -3, 1]];
        let w = find_positive_weight(&rows, 3).unwrap();
        assert!(w.iter().all(|&x| x > 0), "{w:?}");
        let stacked = vec![rows[0].clone(), rows[1].clone(), w];
        assert_eq!(integer_rank(&stacked, 3), 2);
    }

    #[test]
    fn grading_text_round_trip() {
        let g = GradingMatrix::from_rows(3, vec![vec![1, 1, 1], vec![0, 1, -1]]).unwrap();
        let text = g.to_text();
        assert_eq!(text, "2 3\n1 1 1\n0 1 -1\n");
        assert_eq!(GradingMatrix::from_text(&text).unwrap(), g);
        assert!(GradingMatrix::from_text("2 3\n1 1 1\n").is_err());
        assert!(GradingMatrix::from_rows(3, vec![vec![1, 1]]).is_err());
    }

    #[test]
    fn multidegrees() {
        let g = GradingMatrix::from_rows(3, vec![vec![1, 1, 1], vec![0, 1, 2]]).unwrap();
        let md = multidegree_of(&g, &Monomial::from_dense(&[1, 0, 2])).unwrap();
        assert_eq!(md.beta, vec![3, 4]);
        assert_eq!(md.weighted_degree, 3);
        let unit = multidegree_of(&g, &Monomial::one()).unwrap();
        assert_eq!(unit.beta, vec![0, 0]);
        assert_eq!(unit.weighted_degree, 0);
    }
}
