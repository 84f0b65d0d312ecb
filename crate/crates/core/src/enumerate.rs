//! Monomials of a fixed weighted degree, bucketed by multidegree.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::grading::GradingMatrix;
use crate::polyring::Monomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("grading has no strictly positive weight vector")]
    NoPositiveWeight,
    #[error("weighted degree must be at least 1, got {0}")]
    BadDegree(i64),
    #[error("multidegree coordinate overflowed while enumerating degree {0}")]
    Overflow(i64),
}

/// The monomials `M_β` of one multidegree, in descending graded-lex order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonomialBasis {
    monomials: Vec<Monomial>,
    support: Vec<usize>,
}

impl MonomialBasis {
    pub fn new(mut monomials: Vec<Monomial>) -> Self {
        monomials.sort_by(|a, b| b.cmp(a));
        monomials.dedup();
        let support: BTreeSet<usize> = monomials.iter().flat_map(|m| m.support()).collect();
        Self {
            monomials,
            support: support.into_iter().collect(),
        }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Sorted variable indices occurring in any member.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn position(&self, mono: &Monomial) -> Option<usize> {
        self.monomials.binary_search_by(|m| mono.cmp(m)).ok()
    }
}

/// All monomials of weighted degree `degree`, keyed by `β = Aα` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeLevel {
    pub degree: i64,
    pub components: BTreeMap<Vec<i64>, MonomialBasis>,
}

impl DegreeLevel {
    pub fn monomial_count(&self) -> usize {
        self.components.values().map(MonomialBasis::len).sum()
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// `M_β`, or an empty slice if `β` does not occur at this level.
    pub fn lookup_basis(&self, beta: &[i64]) -> &[Monomial] {
        self.components
            .get(beta)
            .map(MonomialBasis::monomials)
            .unwrap_or(&[])
    }
}

/// Free-function form of [`DegreeLevel::lookup_basis`].
pub fn lookup_basis<'a>(level: &'a DegreeLevel, beta: &[i64]) -> &'a [Monomial] {
    level.lookup_basis(beta)
}

/// Depth-first knapsack over exponent vectors with `a·α = degree`, carrying
/// `β = Aα` along the way.
pub fn enumerate_level(
    grading: &GradingMatrix,
    degree: i64,
) -> Result<DegreeLevel, EnumerateError> {
    let weight = grading
        .positive_weight()
        .ok_or(EnumerateError::NoPositiveWeight)?;
    if degree < 1 {
        return Err(EnumerateError::BadDegree(degree));
    }
    let n = grading.n();
    let columns: Vec<Vec<i64>> = (0..n).map(|j| grading.column(j)).collect();
    let mut walk = Walk {
        weight,
        columns: &columns,
        exps: Vec::new(),
        beta: vec![0; grading.rank()],
        buckets: HashMap::new(),
        overflow: false,
    };
    walk.descend(0, degree);
    if walk.overflow {
        return Err(EnumerateError::Overflow(degree));
    }
    let components = walk
        .buckets
        .into_iter()
        .map(|(beta, monos)| (beta, MonomialBasis::new(monos)))
        .collect();
    Ok(DegreeLevel { degree, components })
}

struct Walk<'a> {
    weight: &'a [i64],
    columns: &'a [Vec<i64>],
    exps: Vec<(usize, u32)>,
    beta: Vec<i64>,
    buckets: HashMap<Vec<i64>, Vec<Monomial>>,
    overflow: bool,
}

impl Walk<'_> {
    fn descend(&mut self, var: usize, remaining: i64) {
        if self.overflow {
            return;
        }
        if remaining == 0 {
            let mono = Monomial::from_pairs(self.exps.clone());
            self.buckets
                .entry(self.beta.clone())
                .or_default()
                .push(mono);
            return;
        }
        if var == self.weight.len() {
            return;
        }
        let w = self.weight[var];
        let max_e = remaining / w;
        // larger exponents of earlier variables first
        for e in (1..=max_e).rev() {
            let Some(next) = self.shifted(var, e) else {
                self.overflow = true;
                return;
            };
            let saved = std::mem::replace(&mut self.beta, next);
            self.exps.push((var, e as u32));
            self.descend(var + 1, remaining - e * w);
            self.exps.pop();
            self.beta = saved;
        }
        self.descend(var + 1, remaining);
    }

    fn shifted(&self, var: usize, e: i64) -> Option<Vec<i64>> {
        self.beta
            .iter()
            .zip(&self.columns[var])
            .map(|(&b, &c)| c.checked_mul(e).and_then(|t| b.checked_add(t)))
            .collect()
    }
}

/// Number of exponent vectors with `a·α = degree`, by dynamic programming.
pub fn count_monomials(weight: &[i64], degree: i64) -> u128 {
    if degree < 0 {
        return 0;
    }
    let mut ways = vec![0u128; degree as usize + 1];
    ways[0] = 1;
    for &w in weight {
        let w = w as usize;
        for s in w..ways.len() {
            ways[s] += ways[s - w];
        }
    }
    ways[degree as usize]
}
