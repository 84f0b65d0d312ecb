//! Exact linear algebra for component matrices: rank over GF(p), and kernels
//! over the rationals by fraction-free elimination on primitive integer rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::polyring::coeff::{content, inv_mod, mul_mod, primitive_integer_vector, sub_mod};
use crate::polyring::{Monomial, PrimeField, Rational, DEFAULT_PRIME};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("a matrix entry has a denominator divisible by the prime {p}")]
    BadPrime { p: u64 },
    #[error("row has {got} entries, expected {expected}")]
    RaggedRow { expected: usize, got: usize },
}

/// The linear system `L c = 0` of one multidegree component: rows indexed by
/// codomain monomials, columns by the monomials of the (trimmed) basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentMatrix {
    row_keys: Vec<Monomial>,
    rows: Vec<Vec<Rational>>,
    ncols: usize,
}

impl ComponentMatrix {
    /// Builds a matrix from keyed rows; all-zero rows are dropped with their keys.
    pub fn new(
        ncols: usize,
        keyed_rows: impl IntoIterator<Item = (Monomial, Vec<Rational>)>,
    ) -> Result<Self, LinalgError> {
        let mut row_keys = Vec::new();
        let mut rows = Vec::new();
        for (key, row) in keyed_rows {
            if row.len() != ncols {
                return Err(LinalgError::RaggedRow {
                    expected: ncols,
                    got: row.len(),
                });
            }
            if row.iter().all(Zero::is_zero) {
                continue;
            }
            row_keys.push(key);
            rows.push(row);
        }
        Ok(Self {
            row_keys,
            rows,
            ncols,
        })
    }

    /// Builds an unkeyed matrix from dense rows.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        Self::new(ncols, rows.into_iter().map(|r| (Monomial::one(), r))).map(|mut m| {
            m.row_keys.clear();
            m
        })
    }

    pub fn from_int_rows(ncols: usize, rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        Self::from_rows(
            ncols,
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| Rational::from_integer(BigInt::from(v)))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// Codomain monomial of each row; empty for hand-built matrices.
    pub fn row_keys(&self) -> &[Monomial] {
        &self.row_keys
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.rows[row][col]
    }

    /// `L v` for a column vector `v`.
    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn reduce_mod_p(&self, field: PrimeField) -> Result<Vec<Vec<u64>>, LinalgError> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        field
                            .reduce_rational(v)
                            .ok_or(LinalgError::BadPrime { p: field.modulus() })
                    })
                    .collect()
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        integer_echelon(self.integer_rows(), self.ncols)
            .pivots
            .len()
    }

    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.rows
            .iter()
            .map(|r| primitive_integer_vector(r))
            .collect()
    }
}

/// A basis of `ker L`. When `normalized`, the vectors are the rows of the
/// reduced row echelon form of the kernel, each scaled to a primitive integer
/// vector with a positive leading entry; this form depends only on the kernel
/// itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    pub ncols: usize,
    pub vectors: Vec<Vec<Rational>>,
    pub normalized: bool,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn normalize(&self) -> KernelBasis {
        let rows: Vec<Vec<BigInt>> = self
            .vectors
            .iter()
            .map(|v| primitive_integer_vector(v))
            .collect();
        let ech = integer_echelon(rows, self.ncols);
        let vectors = ech
            .rows
            .into_iter()
            .map(|r| r.into_iter().map(Rational::from_integer).collect())
            .collect();
        KernelBasis {
            ncols: self.ncols,
            vectors,
            normalized: true,
        }
    }

    /// Normalized vectors as integers.
    pub fn integer_vectors(&self) -> Vec<Vec<BigInt>> {
        self.vectors
            .iter()
            .map(|v| primitive_integer_vector(v))
            .collect()
    }
}

/// `true` iff `L` has full column rank modulo `p`, which certifies that the
/// rational kernel is trivial (rank can only drop under reduction).
pub fn prescreen_trivial(l: &ComponentMatrix, field: PrimeField) -> Result<bool, LinalgError> {
    if l.ncols == 0 {
        return Ok(true);
    }
    if l.nrows() < l.ncols {
        return Ok(false);
    }
    let reduced = l.reduce_mod_p(field)?;
    Ok(rank_mod_p(&reduced, field.modulus()) == l.ncols)
}

/// Kernel of `L` over the rationals, normalized.
///
/// Tall matrices are first cut down to rows independent modulo a large prime;
/// the kernel of that subset is accepted only if it annihilates every row,
/// otherwise the full matrix is eliminated.
pub fn exact_kernel(l: &ComponentMatrix) -> KernelBasis {
    let rows = l.integer_rows();
    let vectors = match tall_matrix_kernel(l, &rows) {
        Some(v) => v,
        None => nullspace_of_integer_rows(rows, l.ncols),
    };
    KernelBasis {
        ncols: l.ncols,
        vectors: vectors
            .into_iter()
            .map(|v| v.into_iter().map(Rational::from_integer).collect())
            .collect(),
        normalized: true,
    }
}

fn tall_matrix_kernel(l: &ComponentMatrix, rows: &[Vec<BigInt>]) -> Option<Vec<Vec<BigInt>>> {
    if l.nrows() <= 2 * l.ncols + 8 {
        return None;
    }
    let field = PrimeField::new(DEFAULT_PRIME).expect("default prime is prime");
    let reduced = l.reduce_mod_p(field).ok()?;
    let keep = independent_rows_mod_p(&reduced, field.modulus());
    let subset = keep.iter().map(|&i| rows[i].clone()).collect();
    let vectors = nullspace_of_integer_rows(subset, l.ncols);
    let annihilates = |v: &Vec<BigInt>| {
        rows.iter().all(|r| {
            r.iter()
                .zip(v)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
                .is_zero()
        })
    };
    vectors.iter().all(annihilates).then_some(vectors)
}

/// Indices of a maximal set of rows that are independent over GF(p), chosen greedily in order.
pub fn independent_rows_mod_p(rows: &[Vec<u64>], p: u64) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    // basis rows, each normalized to a unit pivot at basis_pivots[k]
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut basis_pivots: Vec<usize> = Vec::new();
    let mut keep = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        if basis.len() == ncols {
            break;
        }
        let mut r: Vec<u64> = row.iter().map(|v| v % p).collect();
        for (b, &pc) in basis.iter().zip(&basis_pivots) {
            let f = r[pc];
            if f == 0 {
                continue;
            }
            for j in pc..ncols {
                if b[j] != 0 {
                    r[j] = sub_mod(r[j], mul_mod(f, b[j], p), p);
                }
            }
        }
        if let Some(pc) = r.iter().position(|&v| v != 0) {
            let inv = inv_mod(r[pc], p);
            for v in r[pc..].iter_mut() {
                *v = mul_mod(*v, inv, p);
            }
            basis.push(r);
            basis_pivots.push(pc);
            keep.push(idx);
        }
    }
    keep
}

/// Rank of a dense matrix over GF(p) by Gaussian elimination.
pub fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|v| v % p).collect())
        .collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        if rank == m.len() {
            break;
        }
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = inv_mod(m[rank][c], p);
        for v in m[rank][c..].iter_mut() {
            *v = mul_mod(*v, inv, p);
        }
        let (head, tail) = m.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail.iter_mut() {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for j in c..ncols {
                if pivot_row[j] != 0 {
                    row[j] = sub_mod(row[j], mul_mod(f, pivot_row[j], p), p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over the rationals.
pub fn rational_rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    let ints = rows.iter().map(|r| primitive_integer_vector(r)).collect();
    integer_echelon(ints, ncols).pivots.len()
}

pub fn integer_rank(rows: &[Vec<i64>], ncols: usize) -> usize {
    integer_echelon(to_big(rows), ncols).pivots.len()
}

/// Pivot columns of the reduced row echelon form (the leading columns of the
/// row space, scanning columns left to right).
pub fn pivot_columns(rows: &[Vec<Rational>], ncols: usize) -> Vec<usize> {
    let ints = rows.iter().map(|r| primitive_integer_vector(r)).collect();
    integer_echelon(ints, ncols).pivots
}

/// Normalized nullspace basis of an integer matrix.
pub fn integer_nullspace(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<BigInt>> {
    nullspace_of_integer_rows(to_big(rows), ncols)
}

fn to_big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect()
}

/// Reduced echelon form over the integers: each row primitive with a positive
/// pivot, every pivot column zero outside its pivot row, rows ordered by
/// pivot column.
pub(crate) struct IntEchelon {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

fn make_primitive(row: &mut [BigInt]) {
    let g = content(row);
    if g.is_zero() || g.is_one() {
        return;
    }
    for v in row.iter_mut() {
        *v = &*v / &g;
    }
}

/// Fraction-free Gauss–Jordan elimination. Pivots are chosen as the entry of
/// smallest bit length in the current column; rows are kept primitive after
/// every update so coefficients stay small.
pub(crate) fn integer_echelon(rows: Vec<Vec<BigInt>>, ncols: usize) -> IntEchelon {
    let mut rows: Vec<Vec<BigInt>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|v| !v.is_zero()))
        .map(|mut r| {
            make_primitive(&mut r);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let Some(piv) = (rank..rows.len())
            .filter(|&i| !rows[i][c].is_zero())
            .min_by_key(|&i| {
                (
                    rows[i][c].bits(),
                    rows[i].iter().filter(|v| !v.is_zero()).count(),
                )
            })
        else {
            continue;
        };
        rows.swap(rank, piv);
        if rows[rank][c].is_negative() {
            for v in rows[rank].iter_mut() {
                *v = -&*v;
            }
        }
        let pivot_row = std::mem::take(&mut rows[rank]);
        let pv = &pivot_row[c];
        let nz: Vec<usize> = (c..ncols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == rank || row[c].is_zero() {
                continue;
            }
            let g = pv.gcd(&row[c]);
            let a = pv / &g;
            let b = &row[c] / &g;
            if !a.is_one() {
                for v in row.iter_mut() {
                    if !v.is_zero() {
                        *v *= &a;
                    }
                }
            }
            for &j in &nz {
                row[j] -= &b * &pivot_row[j];
            }
            make_primitive(row);
        }
        rows[rank] = pivot_row;
        pivots.push(c);
        rank += 1;
        // drop rows that became zero below the pivot block
        let mut k = rank;
        while k < rows.len() {
            if rows[k].iter().all(Zero::is_zero) {
                rows.swap_remove(k);
            } else {
                k += 1;
            }
        }
    }
    rows.truncate(rank);
    IntEchelon { rows, pivots }
}

fn nullspace_of_integer_rows(rows: Vec<Vec<BigInt>>, ncols: usize) -> Vec<Vec<BigInt>> {
    let ech = integer_echelon(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    let basis: Vec<Vec<BigInt>> = (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            // scale by the lcm of the pivots so that every entry is integral
            let lcm = ech
                .rows
                .iter()
                .zip(&ech.pivots)
                .filter(|(r, _)| !r[f].is_zero())
                .fold(BigInt::one(), |acc, (r, &p)| acc.lcm(&r[p]));
            let mut v = vec![BigInt::zero(); ncols];
            v[f] = lcm.clone();
            for (r, &p) in ech.rows.iter().zip(&ech.pivots) {
                if !r[f].is_zero() {
                    v[p] = -(&lcm / &r[p]) * &r[f];
                }
            }
            v
        })
        .collect();
    if basis.is_empty() {
        return basis;
    }
    integer_echelon(basis, ncols).rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from_integer(BigInt::from(v))
    }

    fn example8() -> ComponentMatrix {
        ComponentMatrix::from_int_rows(
            3,
            &[
                vec![0, 1, 1],
                vec![1, 0, -1],
                vec![-1, -1, 0],
                vec![-1, -1, 0],
                vec![1, 0, -1],
                vec![0, 1, 1],
            ],
        )
        .unwrap()
    }

    /// The 10x3 matrix of the degree (3,1,1,2,-1) component, untransposed.
    fn cubic_component() -> ComponentMatrix {
        let t = [
            [0, -1, 1, 0, 2, -2, 0, -1, 1, 0],
            [-1, 0, 1, 1, 1, -1, -1, -1, 0, 1],
            [-1, 1, 0, 1, -1, 1, -1, 0, -1, 1],
        ];
        let rows: Vec<Vec<i64>> = (0..10).map(|r| (0..3).map(|c| t[c][r]).collect()).collect();
        ComponentMatrix::from_int_rows(3, &rows).unwrap()
    }

    fn drop_first_column(m: &ComponentMatrix) -> ComponentMatrix {
        ComponentMatrix::from_rows(2, m.rows().iter().map(|r| r[1..].to_vec()).collect()).unwrap()
    }

    #[test]
    fn plucker_component_kernel() {
        let l = example8();
        assert_eq!(l.nrows(), 6);
        let k = exact_kernel(&l);
        assert_eq!(k.vectors, vec![vec![q(1), q(-1), q(1)]]);
        assert!(!prescreen_trivial(&l, PrimeField::new(DEFAULT_PRIME).unwrap()).unwrap());
        let reduced = l.reduce_mod_p(PrimeField::new(101).unwrap()).unwrap();
        assert_eq!(rank_mod_p(&reduced, 101), 2);
    }

    #[test]
    fn cubic_component_kernel_is_the_lift() {
        let l = cubic_component();
        assert_eq!(exact_kernel(&l).vectors, vec![vec![q(1), q(-1), q(1)]]);
        let trimmed = drop_first_column(&l);
        assert!(exact_kernel(&trimmed).is_trivial());
        assert!(prescreen_trivial(&trimmed, PrimeField::new(DEFAULT_PRIME).unwrap()).unwrap());
    }

    #[test]
    fn prescreen_edge_cases() {
        let f = PrimeField::new(DEFAULT_PRIME).unwrap();
        let id = ComponentMatrix::from_int_rows(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])
            .unwrap();
        assert!(prescreen_trivial(&id, f).unwrap());
        let zero = ComponentMatrix::from_int_rows(1, &[vec![0]]).unwrap();
        assert_eq!(zero.nrows(), 0);
        assert!(!prescreen_trivial(&zero, f).unwrap());
        assert_eq!(exact_kernel(&zero).vectors, vec![vec![q(1)]]);
        let frac = ComponentMatrix::from_rows(
            1,
            vec![vec![Rational::new(BigInt::from(1), BigInt::from(7))]],
        )
        .unwrap();
        assert_eq!(
            prescreen_trivial(&frac, PrimeField::new(7).unwrap()),
            Err(LinalgError::BadPrime { p: 7 })
        );
    }

    #[test]
    fn modular_rank_basics() {
        assert_eq!(rank_mod_p(&[vec![0, 0], vec![0, 0]], 7), 0);
        let id: Vec<Vec<u64>> = (0..4)
            .map(|i| (0..4).map(|j| (i == j) as u64).collect())
            .collect();
        assert_eq!(rank_mod_p(&id, 7), 4);
        assert_eq!(rank_mod_p(&[vec![1, 2], vec![2, 4]], 7), 1);
        assert_eq!(rank_mod_p(&[vec![1, 3], vec![2, 4]], 2), 1);
        assert_eq!(rank_mod_p(&[], 7), 0);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let l = ComponentMatrix::from_int_rows(
            5,
            &[
                vec![2, 4, 0, 6, 8],
                vec![1, 2, 3, 0, 1],
                vec![3, 6, 3, 6, 9],
            ],
        )
        .unwrap();
        let k = exact_kernel(&l);
        assert_eq!(k.dim(), 5 - l.rank());
        for v in &k.vectors {
            assert!(l.apply(v).iter().all(Zero::is_zero));
        }
        assert_eq!(k.normalize(), k);
    }

    #[test]
    fn pivots_follow_column_order() {
        let rows = vec![vec![q(1), q(-1), q(1)]];
        assert_eq!(pivot_columns(&rows, 3), vec![0]);
        let rows = vec![vec![q(0), q(2), q(1)], vec![q(0), q(4), q(2)]];
        assert_eq!(pivot_columns(&rows, 3), vec![1]);
    }

    #[test]
    fn integer_nullspace_of_constraints() {
        // x - 2a, x - a - b, x - 2b, y - 2a, y - 2b, z - 2a, z - a - b, z - 2b
        let rows = vec![
            vec![1, 0, 0, -2, 0],
            vec![1, 0, 0, -1, -1],
            vec![1, 0, 0, 0, -2],
            vec![0, 1, 0, -2, 0],
            vec![0, 1, 0, 0, -2],
            vec![0, 0, 1, -2, 0],
            vec![0, 0, 1, -1, -1],
            vec![0, 0, 1, 0, -2],
        ];
        let ns = integer_nullspace(&rows, 5);
        let expected: Vec<BigInt> = [2, 2, 2, 1, 1].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(ns, vec![expected]);
        assert_eq!(integer_rank(&rows, 5), 4);
    }
}
