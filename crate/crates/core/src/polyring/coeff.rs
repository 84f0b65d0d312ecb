//! Coefficient fields: exact rationals and prime fields GF(p) with p < 2^63.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Default prime for screening and random evaluation: the Mersenne prime 2^61 - 1.
pub const DEFAULT_PRIME: u64 = (1 << 61) - 1;

/// A coefficient of a sparse polynomial.
///
/// `Field` is the arithmetic context a value lives in: a unit marker for the
/// rationals, the modulus for a prime field. Constants (zero, one, small
/// integers) can only be produced with a context in hand.
pub trait Coefficient:
    Clone + PartialEq + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    type Field: Copy + Eq + fmt::Debug + Send + Sync + 'static;

    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;

    fn zero_in(field: Self::Field) -> Self;
    fn one_in(field: Self::Field) -> Self;
    fn from_i64_in(value: i64, field: Self::Field) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn field(&self) -> Self::Field;
}

/// Marker context for the field of rational numbers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Coefficient for Rational {
    type Field = Rationals;

    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }

    fn zero_in(_: Rationals) -> Self {
        Rational::zero()
    }
    fn one_in(_: Rationals) -> Self {
        Rational::one()
    }
    fn from_i64_in(value: i64, _: Rationals) -> Self {
        Rational::from_integer(BigInt::from(value))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn field(&self) -> Rationals {
        Rationals
    }
}

/// The prime field GF(p). Arithmetic is on canonical residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Returns `None` unless `p` is a prime below 2^63.
    pub fn new(p: u64) -> Option<Self> {
        (p < (1 << 63) && is_prime(p)).then_some(Self { p })
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn element(self, value: u64) -> Fp {
        Fp {
            value: value % self.p,
            p: self.p,
        }
    }

    /// Reduces an integer into the field.
    pub fn reduce_int(self, value: &BigInt) -> u64 {
        let r = value.mod_floor(&BigInt::from(self.p));
        r.to_u64().expect("residue fits in u64")
    }

    /// Reduces a rational number; `None` if the denominator vanishes mod p.
    pub fn reduce_rational(self, value: &Rational) -> Option<u64> {
        let den = self.reduce_int(value.denom());
        if den == 0 {
            return None;
        }
        let num = self.reduce_int(value.numer());
        Some(mul_mod(num, inv_mod(den, self.p), self.p))
    }
}

/// An element of GF(p). The modulus travels with the value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    p: u64,
}

impl Fp {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn inverse(self) -> Option<Fp> {
        (self.value != 0).then(|| Fp {
            value: inv_mod(self.value, self.p),
            p: self.p,
        })
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add<&Fp> for &Fp {
    type Output = Fp;
    fn add(self, rhs: &Fp) -> Fp {
        debug_assert_eq!(self.p, rhs.p);
        Fp {
            value: add_mod(self.value, rhs.value, self.p),
            p: self.p,
        }
    }
}

impl Sub<&Fp> for &Fp {
    type Output = Fp;
    fn sub(self, rhs: &Fp) -> Fp {
        debug_assert_eq!(self.p, rhs.p);
        Fp {
            value: sub_mod(self.value, rhs.value, self.p),
            p: self.p,
        }
    }
}

impl Mul<&Fp> for &Fp {
    type Output = Fp;
    fn mul(self, rhs: &Fp) -> Fp {
        debug_assert_eq!(self.p, rhs.p);
        Fp {
            value: mul_mod(self.value, rhs.value, self.p),
            p: self.p,
        }
    }
}

impl Neg for &Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            value: sub_mod(0, self.value, self.p),
            p: self.p,
        }
    }
}

impl Coefficient for Fp {
    type Field = PrimeField;

    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }

    fn zero_in(field: PrimeField) -> Self {
        field.element(0)
    }
    fn one_in(field: PrimeField) -> Self {
        field.element(1)
    }
    fn from_i64_in(value: i64, field: PrimeField) -> Self {
        let p = field.p as i128;
        Fp {
            value: (value as i128).rem_euclid(p) as u64,
            p: field.p,
        }
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn is_one(&self) -> bool {
        self.value == 1
    }
    fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo a prime (Fermat).
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n` that stays below 2^63.
pub fn next_prime(n: u64) -> Option<u64> {
    let mut c = n.checked_add(1)?;
    while c < (1 << 63) {
        if is_prime(c) {
            return Some(c);
        }
        c += 1;
    }
    None
}

/// Greatest common divisor of a list of integers (0 for an empty or all-zero list).
pub fn content(values: &[BigInt]) -> BigInt {
    values.iter().fold(
        BigInt::zero(),
        |acc, v| if v.is_zero() { acc } else { acc.gcd(v) },
    )
}

/// Scales a rational vector to a primitive integer vector whose first nonzero entry is positive.
/// The zero vector maps to the zero vector.
pub fn primitive_integer_vector(values: &[Rational]) -> Vec<BigInt> {
    let lcm = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut ints: Vec<BigInt> = values
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect();
    let g = content(&ints);
    if g.is_zero() {
        return ints;
    }
    let flip = ints
        .iter()
        .find(|v| !v.is_zero())
        .is_some_and(|v| v.sign() == Sign::Minus);
    for v in ints.iter_mut() {
        *v = &*v / &g;
        if flip {
            *v = -&*v;
        }
    }
    ints
}

/// `true` if the integer is zero or positive.
pub fn is_nonnegative(v: &BigInt) -> bool {
    !v.is_negative()
}
