use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::coeff::{Coefficient, Fp, PrimeField, Rational};
use super::monomial::Monomial;
use super::PolyError;

/// A sparse polynomial in `nvars` variables over the coefficient type `C`.
///
/// Terms are kept in a map ordered by graded-lex; zero coefficients are never
/// stored, so the zero polynomial has no terms.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial<C: Coefficient> {
    nvars: usize,
    field: C::Field,
    terms: BTreeMap<Monomial, C>,
}

/// Polynomials with exact rational coefficients.
pub type QPoly = Polynomial<Rational>;

/// Polynomials over a prime field.
pub type FpPoly = Polynomial<Fp>;

impl<C: Coefficient> Polynomial<C> {
    pub fn zero_in(field: C::Field, nvars: usize) -> Self {
        Self {
            nvars,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant_in(field: C::Field, nvars: usize, c: C) -> Self {
        Self::from_terms_in(field, nvars, [(Monomial::one(), c)])
    }

    pub fn one_in(field: C::Field, nvars: usize) -> Self {
        Self::constant_in(field, nvars, C::one_in(field))
    }

    pub fn variable_in(field: C::Field, nvars: usize, index: usize) -> Self {
        assert!(
            index < nvars,
            "variable {index} out of range for {nvars} variables"
        );
        Self::from_terms_in(
            field,
            nvars,
            [(Monomial::variable(index), C::one_in(field))],
        )
    }

    /// Collects terms, summing repeated monomials and dropping zeros.
    ///
    /// Panics if a monomial mentions a variable outside `0..nvars`.
    pub fn from_terms_in(
        field: C::Field,
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, C)>,
    ) -> Self {
        let mut out = Self::zero_in(field, nvars);
        for (m, c) in terms {
            assert!(
                m.span() <= nvars,
                "monomial {m:?} outside {nvars} variables"
            );
            out.add_term(m, c);
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> C::Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms from the graded-lex leading monomial downwards.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> + '_ {
        self.terms.iter().rev()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    pub fn leading_coefficient(&self) -> Option<&C> {
        self.terms.values().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| C::zero_in(self.field))
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// Sorted list of variables that occur in some term.
    pub fn support(&self) -> Vec<usize> {
        let mut vars: Vec<usize> = self.terms.keys().flat_map(|m| m.support()).collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().plus(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_vars(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::VariableCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.negated());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_vars(other)?;
        let mut out = Self::zero_in(self.field, self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.times(cb));
            }
        }
        Ok(out)
    }

    /// `self^k` by repeated squaring; `f^0 = 1`.
    pub fn pow(&self, mut k: u32) -> Self {
        let mut acc = Self::one_in(self.field, self.nvars);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero_in(self.field, self.nvars);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.times(c));
        }
        out
    }

    /// Multiplies every term by the monomial `m`.
    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        assert!(m.span() <= self.nvars);
        Self {
            nvars: self.nvars,
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.mul(m), c.clone()))
                .collect(),
        }
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn partial_derivative(&self, var: usize) -> Result<Self, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::VariableOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        let mut out = Self::zero_in(self.field, self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                continue;
            }
            let lowered = m.lower(var).expect("exponent is positive");
            out.add_term(lowered, c.times(&C::from_i64_in(e as i64, self.field)));
        }
        Ok(out)
    }

    fn term_weight(m: &Monomial, weights: &[Rational]) -> Rational {
        m.iter().fold(Rational::zero(), |acc, (v, e)| {
            acc + &weights[v] * Rational::from_integer(BigInt::from(e))
        })
    }

    fn check_weights(&self, weights: &[Rational]) -> Result<(), PolyError> {
        if weights.len() != self.nvars {
            return Err(PolyError::WeightLengthMismatch {
                expected: self.nvars,
                got: weights.len(),
            });
        }
        Ok(())
    }

    /// The sum of the terms whose weight `ω·α` is minimal over the support.
    pub fn initial_form(&self, weights: &[Rational]) -> Result<Self, PolyError> {
        self.check_weights(weights)?;
        let weighted: Vec<(Rational, &Monomial, &C)> = self
            .terms
            .iter()
            .map(|(m, c)| (Self::term_weight(m, weights), m, c))
            .collect();
        let Some(min) = weighted.iter().map(|(w, _, _)| w).min().cloned() else {
            return Ok(self.clone());
        };
        let mut out = Self::zero_in(self.field, self.nvars);
        for (w, m, c) in weighted {
            if w == min {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// `true` iff `ω·α` is constant over the support (vacuously for zero).
    pub fn is_homogeneous(&self, weights: &[Rational]) -> Result<bool, PolyError> {
        self.check_weights(weights)?;
        let mut it = self.terms.keys().map(|m| Self::term_weight(m, weights));
        let Some(first) = it.next() else {
            return Ok(true);
        };
        Ok(it.all(|w| w == first))
    }

    /// Integer-weight homogeneity test; `None` as the weight of a term on overflow.
    pub fn is_homogeneous_int(&self, weights: &[i64]) -> Result<bool, PolyError> {
        if weights.len() != self.nvars {
            return Err(PolyError::WeightLengthMismatch {
                expected: self.nvars,
                got: weights.len(),
            });
        }
        let mut it = self.terms.keys().map(|m| m.weighted_degree(weights));
        let Some(first) = it.next() else {
            return Ok(true);
        };
        if first.is_none() {
            return Err(PolyError::Overflow);
        }
        let mut all = true;
        for w in it {
            match w {
                None => return Err(PolyError::Overflow),
                Some(w) => all &= Some(w) == first,
            }
        }
        Ok(all)
    }

    /// Re-embeds the polynomial in a ring with `nvars` variables, which must
    /// cover every variable in use.
    pub fn with_nvars(&self, nvars: usize) -> Result<Self, PolyError> {
        if let Some(max) = self.terms.keys().map(Monomial::span).max() {
            if max > nvars {
                return Err(PolyError::VariableCountMismatch {
                    left: self.nvars,
                    right: nvars,
                });
            }
        }
        Ok(Self {
            nvars,
            field: self.field,
            terms: self.terms.clone(),
        })
    }
}

impl<C: Coefficient> Polynomial<C>
where
    C::Field: Default,
{
    pub fn zero(nvars: usize) -> Self {
        Self::zero_in(C::Field::default(), nvars)
    }

    pub fn one(nvars: usize) -> Self {
        Self::one_in(C::Field::default(), nvars)
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::constant_in(C::Field::default(), nvars, c)
    }

    pub fn variable(nvars: usize, index: usize) -> Self {
        Self::variable_in(C::Field::default(), nvars, index)
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        Self::from_terms_in(C::Field::default(), nvars, terms)
    }
}

impl QPoly {
    /// Builds a polynomial from `(coefficient, dense exponents)` pairs with integer coefficients.
    pub fn from_int_terms(nvars: usize, terms: &[(i64, &[u32])]) -> Self {
        Self::from_terms(
            nvars,
            terms.iter().map(|&(c, e)| {
                assert_eq!(e.len(), nvars);
                (
                    Monomial::from_dense(e),
                    Rational::from_integer(BigInt::from(c)),
                )
            }),
        )
    }

    /// Coefficient-wise reduction modulo `p`.
    pub fn reduce_mod_p(&self, field: PrimeField) -> Result<FpPoly, PolyError> {
        let mut out = FpPoly::zero_in(field, self.nvars);
        for (m, c) in &self.terms {
            let r = field
                .reduce_rational(c)
                .ok_or(PolyError::BadPrime { p: field.modulus() })?;
            out.add_term(m.clone(), field.element(r));
        }
        Ok(out)
    }

    /// Evaluates at a point of GF(p)^nvars given as residues.
    pub fn eval_mod_p(&self, field: PrimeField, point: &[u64]) -> Result<u64, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::WeightLengthMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let p = field.modulus();
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let c = field.reduce_rational(c).ok_or(PolyError::BadPrime { p })?;
            let v = m.iter().fold(c, |t, (var, e)| {
                super::coeff::mul_mod(t, super::coeff::pow_mod(point[var], e as u64, p), p)
            });
            acc = super::coeff::add_mod(acc, v, p);
        }
        Ok(acc)
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::WeightLengthMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (var, e) in m.iter() {
                t *= num_traits::pow(point[var].clone(), e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// `true` when every coefficient is an integer.
    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Renders the polynomial with the given variable names, leading term first.
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

impl<C: Coefficient> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|(m, c)| format!("{c}*{m:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a QPoly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if One::is_one(&abs) {
                write!(f, "{}", m.display(self.names))?;
            } else {
                write!(f, "{abs}*{}", m.display(self.names))?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        /// Panics if the operands live in different numbers of variables.
        impl<'b, C: Coefficient> $tr<&'b Polynomial<C>> for &'b Polynomial<C> {
            type Output = Polynomial<C>;
            fn $method(self, rhs: &'b Polynomial<C>) -> Polynomial<C> {
                self.$checked(rhs)
                    .expect("polynomial operands must share a ring")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl<C: Coefficient> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial {
            nvars: self.nvars,
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.negated()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    fn qr(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn var(n: usize, i: usize) -> QPoly {
        QPoly::variable(n, i)
    }

    fn weights(w: &[i64]) -> Vec<Rational> {
        w.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn addition_cancels_and_doubles() {
        let (x, y) = (var(2, 0), var(2, 1));
        let s = &x + &y;
        assert_eq!(&s + &(-&x), y);
        assert_eq!(&s + &QPoly::zero(2), s);
        let doubled = &s + &s;
        assert_eq!(doubled, s.scale(&q(2)));
        assert_eq!(doubled.coefficient(&Monomial::variable(0)), q(2));
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let err = var(2, 0).checked_add(&var(3, 0)).unwrap_err();
        assert!(matches!(
            err,
            PolyError::VariableCountMismatch { left: 2, right: 3 }
        ));
        assert!(var(2, 0).checked_mul(&var(3, 0)).is_err());
    }

    #[test]
    fn products_and_powers() {
        let (a, b) = (var(2, 0), var(2, 1));
        let diff_sq = &(&a + &b) * &(&a - &b);
        assert_eq!(
            diff_sq,
            QPoly::from_int_terms(2, &[(1, &[2, 0]), (-1, &[0, 2])])
        );
        let f = &a + &b;
        assert_eq!(&f * &QPoly::one(2), f);
        let square = QPoly::from_int_terms(2, &[(1, &[2, 0]), (2, &[1, 1]), (1, &[0, 2])]);
        assert_eq!(&f * &f, square);
        assert_eq!(f.pow(2), square);
        assert_eq!(f.pow(0), QPoly::one(2));
        assert_eq!(f.pow(1), f);
        assert_eq!(QPoly::zero(2).pow(0), QPoly::one(2));
    }

    #[test]
    fn initial_forms() {
        let (x, y) = (var(2, 0), var(2, 1));
        let f = &x + &y;
        assert_eq!(f.initial_form(&weights(&[1, 1])).unwrap(), f);
        assert_eq!(f.initial_form(&weights(&[1, 2])).unwrap(), x);
        let g = QPoly::from_int_terms(2, &[(1, &[2, 0]), (1, &[1, 1]), (1, &[0, 2])]);
        assert_eq!(g.initial_form(&weights(&[0, 1])).unwrap(), x.pow(2));
        assert!(QPoly::zero(2)
            .initial_form(&weights(&[1, 1]))
            .unwrap()
            .is_zero());
        assert!(f.initial_form(&weights(&[1])).is_err());
    }

    #[test]
    fn homogeneity() {
        let f = QPoly::from_int_terms(3, &[(1, &[1, 0, 1]), (-1, &[0, 2, 0])]);
        assert!(f.is_homogeneous(&weights(&[1, 1, 1])).unwrap());
        assert!(f.is_homogeneous_int(&[1, 1, 1]).unwrap());
        let g = QPoly::from_int_terms(1, &[(1, &[1]), (1, &[2])]);
        assert!(!g.is_homogeneous(&weights(&[1])).unwrap());
        assert!(QPoly::zero(4)
            .is_homogeneous(&weights(&[3, 1, 4, 1]))
            .unwrap());
        assert!(g.is_homogeneous(&weights(&[1, 2])).is_err());
    }

    #[test]
    fn partial_derivatives() {
        let f = QPoly::from_int_terms(2, &[(1, &[2, 1])]);
        assert_eq!(
            f.partial_derivative(0).unwrap(),
            QPoly::from_int_terms(2, &[(2, &[1, 1])])
        );
        assert!(QPoly::constant(2, q(7))
            .partial_derivative(0)
            .unwrap()
            .is_zero());
        let g = QPoly::from_int_terms(2, &[(1, &[2, 0]), (-1, &[0, 2])]);
        assert_eq!(
            g.partial_derivative(1).unwrap(),
            QPoly::from_int_terms(2, &[(-2, &[0, 1])])
        );
        assert!(matches!(
            g.partial_derivative(2),
            Err(PolyError::VariableOutOfRange { index: 2, nvars: 2 })
        ));
    }

    #[test]
    fn reduction_mod_p() {
        let f5 = PrimeField::new(5).unwrap();
        let half_x = QPoly::from_terms(1, [(Monomial::variable(0), qr(1, 2))]);
        let r = half_x.reduce_mod_p(f5).unwrap();
        assert_eq!(r.coefficient(&Monomial::variable(0)).value(), 3);
        let g = QPoly::from_int_terms(2, &[(5, &[1, 0]), (1, &[0, 1])]);
        let r = g.reduce_mod_p(f5).unwrap();
        assert_eq!(r, FpPoly::variable_in(f5, 2, 1));
        assert!(QPoly::zero(3).reduce_mod_p(f5).unwrap().is_zero());
        let bad = QPoly::constant(1, qr(1, 5));
        assert!(matches!(
            bad.reduce_mod_p(f5),
            Err(PolyError::BadPrime { p: 5 })
        ));
    }

    #[test]
    fn evaluation() {
        let f = QPoly::from_int_terms(2, &[(3, &[2, 1]), (-1, &[0, 0])]);
        assert_eq!(f.eval(&[q(2), q(5)]).unwrap(), q(59));
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f.eval_mod_p(f7, &[2, 5]).unwrap(), 59 % 7);
    }

    #[test]
    fn display_leading_term_first() {
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let f = QPoly::from_int_terms(3, &[(1, &[1, 0, 1]), (-1, &[0, 2, 0])]);
        assert_eq!(f.display(&names).to_string(), "x*z - y^2");
        let g = QPoly::from_terms(
            3,
            [
                (Monomial::one(), qr(-3, 4)),
                (Monomial::variable(2), qr(2, 1)),
            ],
        );
        assert_eq!(g.display(&names).to_string(), "2*z - 3/4");
        assert_eq!(QPoly::zero(3).display(&names).to_string(), "0");
    }
}
