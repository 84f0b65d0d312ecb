use std::cmp::Ordering;
use std::fmt;

/// A monomial stored sparsely as `(variable, exponent)` pairs with strictly
/// increasing variable indices and positive exponents.
///
/// `Ord` is graded lexicographic with `x_0 > x_1 > ...`: higher total degree
/// is greater, ties broken lexicographically on the dense exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: Vec<(u32, u32)>,
}

impl Monomial {
    /// The empty monomial `1`.
    pub fn one() -> Self {
        Self::default()
    }

    pub fn variable(index: usize) -> Self {
        Self {
            exps: vec![(index as u32, 1)],
        }
    }

    /// Builds a monomial from arbitrary `(variable, exponent)` pairs; repeated
    /// variables are merged and zero exponents dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut exps: Vec<(u32, u32)> = pairs
            .into_iter()
            .filter(|&(_, e)| e > 0)
            .map(|(v, e)| (v as u32, e))
            .collect();
        exps.sort_unstable_by_key(|&(v, _)| v);
        let mut merged: Vec<(u32, u32)> = Vec::with_capacity(exps.len());
        for (v, e) in exps {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => merged.push((v, e)),
            }
        }
        Self { exps: merged }
    }

    pub fn from_dense(exponents: &[u32]) -> Self {
        Self {
            exps: exponents
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| (v as u32, e))
                .collect(),
        }
    }

    pub fn to_dense(&self, nvars: usize) -> Vec<u32> {
        let mut dense = vec![0; nvars];
        for &(v, e) in &self.exps {
            dense[v as usize] = e;
        }
        dense
    }

    /// Iterates `(variable, exponent)` pairs in increasing variable order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.exps.iter().map(|&(v, e)| (v as usize, e))
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.exps
            .binary_search_by_key(&(var as u32), |&(v, _)| v)
            .map(|i| self.exps[i].1)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u64 {
        self.exps.iter().map(|&(_, e)| e as u64).sum()
    }

    /// Largest variable index plus one, or zero for the unit monomial.
    pub fn span(&self) -> usize {
        self.exps.last().map_or(0, |&(v, _)| v as usize + 1)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.exps, &other.exps);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { exps: out }
    }

    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial {
            exps: self.exps.iter().map(|&(v, e)| (v, e * k)).collect(),
        }
    }

    /// Divides out one power of `var`; `None` if `var` does not occur.
    pub fn lower(&self, var: usize) -> Option<Monomial> {
        let pos = self
            .exps
            .binary_search_by_key(&(var as u32), |&(v, _)| v)
            .ok()?;
        let mut exps = self.exps.clone();
        if exps[pos].1 == 1 {
            exps.remove(pos);
        } else {
            exps[pos].1 -= 1;
        }
        Some(Monomial { exps })
    }

    /// `Σ weights[v] * e_v` over the support; `None` on overflow.
    pub fn weighted_degree(&self, weights: &[i64]) -> Option<i64> {
        self.exps.iter().try_fold(0i64, |acc, &(v, e)| {
            weights[v as usize]
                .checked_mul(e as i64)
                .and_then(|t| acc.checked_add(t))
        })
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().map(|&(v, _)| v as usize)
    }

    /// Renders the monomial with the given variable names, e.g. `x*z^2`; `1` for the unit.
    pub fn display<'a>(&'a self, names: &'a [String]) -> MonomialDisplay<'a> {
        MonomialDisplay { mono: self, names }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| lex_cmp(&self.exps, &other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic comparison of dense exponent vectors, computed on the sparse form.
fn lex_cmp(a: &[(u32, u32)], b: &[(u32, u32)]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        if x.0 != y.0 {
            // the side carrying the smaller variable index has a positive
            // exponent where the other has zero
            return if x.0 < y.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        if x.1 != y.1 {
            return x.1.cmp(&y.1);
        }
    }
    a.len().cmp(&b.len())
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .map(|&(v, e)| {
                if e == 1 {
                    format!("x{v}")
                } else {
                    format!("x{v}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

pub struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    names: &'a [String],
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mono.is_one() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.mono.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}", self.names[v])?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}
