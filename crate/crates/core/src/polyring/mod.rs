//! Exact sparse multivariate polynomials and ring homomorphisms between
//! polynomial rings.

pub mod coeff;
pub mod monomial;
pub mod poly;

use std::collections::HashSet;

use thiserror::Error;

pub use coeff::{Coefficient, Fp, PrimeField, Rational, Rationals, DEFAULT_PRIME};
pub use monomial::Monomial;
pub use poly::{FpPoly, Polynomial, QPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomials live in different rings ({left} vs {right} variables)")]
    VariableCountMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("weight vector has length {got}, expected {expected}")]
    WeightLengthMismatch { expected: usize, got: usize },
    #[error("a denominator is divisible by the prime {p}")]
    BadPrime { p: u64 },
    #[error("integer overflow while computing a weighted degree")]
    Overflow,
    #[error("invalid ring map: {0}")]
    InvalidMap(String),
}

/// A homomorphism `K[x_1..x_n] -> K[t_1..t_m]` given by the images of the
/// domain variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingMap {
    domain_names: Vec<String>,
    codomain_names: Vec<String>,
    images: Vec<QPoly>,
}

impl RingMap {
    /// Validates names and images. Every image must live in
    /// `codomain_names.len()` variables; names must be distinct and nonempty.
    pub fn new(
        domain_names: Vec<String>,
        codomain_names: Vec<String>,
        images: Vec<QPoly>,
    ) -> Result<Self, PolyError> {
        if images.is_empty() {
            return Err(PolyError::InvalidMap("the map has no images".into()));
        }
        if domain_names.len() != images.len() {
            return Err(PolyError::InvalidMap(format!(
                "{} domain names for {} images",
                domain_names.len(),
                images.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in domain_names.iter().chain(&codomain_names) {
            if name.is_empty() {
                return Err(PolyError::InvalidMap("empty variable name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(PolyError::InvalidMap(format!(
                    "duplicate variable name `{name}`"
                )));
            }
        }
        let m = codomain_names.len();
        for (i, img) in images.iter().enumerate() {
            if img.nvars() != m {
                return Err(PolyError::InvalidMap(format!(
                    "image of `{}` lives in {} variables, expected {m}",
                    domain_names[i],
                    img.nvars()
                )));
            }
        }
        Ok(Self {
            domain_names,
            codomain_names,
            images,
        })
    }

    /// Domain variable count `n`.
    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// Codomain variable count `m`.
    pub fn m(&self) -> usize {
        self.codomain_names.len()
    }

    pub fn images(&self) -> &[QPoly] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &QPoly {
        &self.images[i]
    }

    pub fn domain_names(&self) -> &[String] {
        &self.domain_names
    }

    pub fn codomain_names(&self) -> &[String] {
        &self.codomain_names
    }

    /// Largest total degree of any image (0 if all are constants or zero).
    pub fn max_image_degree(&self) -> u64 {
        self.images
            .iter()
            .filter_map(QPoly::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Substitutes `x_i -> φ(x_i)` in `f` and expands.
    pub fn apply(&self, f: &QPoly) -> Result<QPoly, PolyError> {
        if f.nvars() != self.n() {
            return Err(PolyError::VariableCountMismatch {
                left: f.nvars(),
                right: self.n(),
            });
        }
        let max_exp = f
            .terms()
            .flat_map(|(m, _)| m.iter().map(|(_, e)| e))
            .max()
            .unwrap_or(0);
        let powers = ImagePowers::new(self, max_exp);
        let mut out = QPoly::zero(self.m());
        for (mono, c) in f.terms() {
            let image = powers.monomial_image(mono);
            for (t, d) in image.terms() {
                out.add_term(t.clone(), d * c);
            }
        }
        Ok(out)
    }
}

/// Precomputed powers `φ(x_i)^k` for `k ≤ max_exp`, shared read-only across
/// worker threads.
#[derive(Clone, Debug)]
pub struct ImagePowers {
    m: usize,
    // powers[i][k - 1] = φ(x_i)^k
    powers: Vec<Vec<QPoly>>,
}

impl ImagePowers {
    pub fn new(map: &RingMap, max_exp: u32) -> Self {
        let powers = map
            .images()
            .iter()
            .map(|img| {
                let mut list: Vec<QPoly> = Vec::with_capacity(max_exp as usize);
                for k in 0..max_exp as usize {
                    let next = if k == 0 {
                        img.clone()
                    } else {
                        &list[k - 1] * img
                    };
                    list.push(next);
                }
                list
            })
            .collect();
        Self { m: map.m(), powers }
    }

    fn power(&self, var: usize, e: u32) -> QPoly {
        match self.powers[var].get(e as usize - 1) {
            Some(p) => p.clone(),
            None => {
                let base = &self.powers[var][0];
                base.pow(e)
            }
        }
    }

    /// `φ(x^α)`, multiplying the factor powers pairwise smallest-first.
    pub fn monomial_image(&self, mono: &Monomial) -> QPoly {
        let mut factors: Vec<QPoly> = mono.iter().map(|(v, e)| self.power(v, e)).collect();
        if factors.is_empty() {
            return QPoly::one(self.m);
        }
        while factors.len() > 1 {
            factors.sort_by_key(|f| std::cmp::Reverse(f.len()));
            let a = factors.pop().expect("len > 1");
            let b = factors.pop().expect("len > 1");
            factors.push(&a * &b);
        }
        factors.pop().expect("one factor left")
    }
}
