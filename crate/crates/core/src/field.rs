//! Exact scalars over the rationals and prime fields.
//!
//! A [`Field`] is a small copyable descriptor; every [`FieldElement`] carries
//! enough of it (the modulus for residues) to be self-describing. Elements are
//! always stored in canonical form, so structural equality is field equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields ({0} vs {1})")]
    MixedFields(Field, Field),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse {text:?} as an element of {field}")]
    Parse { text: String, field: Field },
}

/// The base field: either the rationals or `GF(p)` for a prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(u64),
}

// Residues are multiplied in u128, so anything below 2^63 is safe; the tool
// only targets desk-scale primes anyway.
const MAX_MODULUS: u64 = 1 << 62;

impl Field {
    /// `GF(p)`, with `p` checked for primality by trial division.
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        if is_prime(p) && p < MAX_MODULUS {
            Ok(Field::Prime(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
        }
    }

    /// Number of elements, or `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        match self {
            Field::Rationals => None,
            Field::Prime(p) => Some(*p),
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, k: i64) -> FieldElement {
        match self {
            Field::Rationals => FieldElement::Rational(BigRational::from_integer(BigInt::from(k))),
            Field::Prime(p) => FieldElement::Residue {
                value: k.rem_euclid(*p as i64) as u64,
                modulus: *p,
            },
        }
    }

    /// `num / den` as a field element.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<FieldElement, FieldError> {
        self.from_i64(num).checked_div(&self.from_i64(den))
    }

    /// The element with canonical representative `r` (prime fields only; for
    /// the rationals this is just the integer `r`).
    pub fn residue(&self, r: u64) -> FieldElement {
        match self {
            Field::Rationals => FieldElement::Rational(BigRational::from_integer(BigInt::from(r))),
            Field::Prime(p) => FieldElement::Residue {
                value: r % p,
                modulus: *p,
            },
        }
    }

    /// All elements of a prime field in representative order.
    pub fn elements(&self) -> Option<Vec<FieldElement>> {
        self.order().map(|p| (0..p).map(|r| self.residue(r)).collect())
    }

    /// Parse the wire form: `"n"` or `"n/d"` for rationals, a decimal integer
    /// for residues (reduced modulo `p`).
    pub fn parse(&self, text: &str) -> Result<FieldElement, FieldError> {
        let err = || FieldError::Parse {
            text: text.to_string(),
            field: *self,
        };
        let t = text.trim();
        match self {
            Field::Rationals => {
                let (n, d) = match t.split_once('/') {
                    Some((n, d)) => (
                        BigInt::from_str(n.trim()).map_err(|_| err())?,
                        BigInt::from_str(d.trim()).map_err(|_| err())?,
                    ),
                    None => (BigInt::from_str(t).map_err(|_| err())?, BigInt::one()),
                };
                if d.is_zero() {
                    return Err(err());
                }
                Ok(FieldElement::Rational(BigRational::new(n, d)))
            }
            Field::Prime(p) => {
                let v = BigInt::from_str(t).map_err(|_| err())?;
                let r = v.mod_floor(&BigInt::from(*p));
                let r: u64 = r.try_into().map_err(|_| err())?;
                Ok(self.residue(r))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact scalar in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match self {
            FieldElement::Rational(_) => Field::Rationals,
            FieldElement::Residue { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_zero(),
            FieldElement::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_one(),
            FieldElement::Residue { value, .. } => *value == 1,
        }
    }

    fn same_field(&self, other: &Self) -> Result<(), FieldError> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(FieldError::MixedFields(self.field(), other.field()))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (FieldElement::Rational(x), FieldElement::Rational(y)) => FieldElement::Rational(x + y),
            (
                FieldElement::Residue { value: x, modulus },
                FieldElement::Residue { value: y, .. },
            ) => FieldElement::Residue {
                value: ((*x as u128 + *y as u128) % *modulus as u128) as u64,
                modulus: *modulus,
            },
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        Ok(match (self, other) {
            (FieldElement::Rational(x), FieldElement::Rational(y)) => FieldElement::Rational(x * y),
            (
                FieldElement::Residue { value: x, modulus },
                FieldElement::Residue { value: y, .. },
            ) => FieldElement::Residue {
                value: ((*x as u128 * *y as u128) % *modulus as u128) as u64,
                modulus: *modulus,
            },
            _ => unreachable!(),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        self.checked_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match self {
            FieldElement::Rational(q) => FieldElement::Rational(q.recip()),
            FieldElement::Residue { value, modulus } => FieldElement::Residue {
                value: mod_inverse(*value, *modulus),
                modulus: *modulus,
            },
        })
    }

    fn neg_ref(&self) -> Self {
        match self {
            FieldElement::Rational(q) => FieldElement::Rational(-q),
            FieldElement::Residue { value, modulus } => FieldElement::Residue {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Residue representative, if this is a prime-field element.
    pub fn residue_value(&self) -> Option<u64> {
        match self {
            FieldElement::Residue { value, .. } => Some(*value),
            FieldElement::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::Rational(q) => Some(q),
            FieldElement::Residue { .. } => None,
        }
    }
}

/// Extended Euclid over u64; `m` prime and `a` nonzero mod `m`.
fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

// Mixed-field operands through the operator traits are a programming error:
// matrices and polynomials guarantee a single field for all their entries.
impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: Self) -> FieldElement {
        self.checked_add(rhs).expect("mixed-field addition")
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: Self) -> FieldElement {
        self.checked_sub(rhs).expect("mixed-field subtraction")
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: Self) -> FieldElement {
        self.checked_mul(rhs).expect("mixed-field multiplication")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}

/// Rationals by value, residues by representative. Elements of different
/// fields are ordered by field (rationals first, then by modulus).
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (FieldElement::Rational(x), FieldElement::Rational(y)) => x.cmp(y),
            (
                FieldElement::Residue { value: x, modulus: p },
                FieldElement::Residue { value: y, modulus: q },
            ) => p.cmp(q).then(x.cmp(y)),
            (FieldElement::Rational(_), _) => Ordering::Less,
            (_, FieldElement::Rational(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldElement::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Roots of `t^2 - a t - b` in the base field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Roots {
    /// Both roots with multiplicity, smallest first.
    Split(FieldElement, FieldElement),
    NotSplit,
}

impl Roots {
    pub fn smallest(&self) -> Option<&FieldElement> {
        match self {
            Roots::Split(r, _) => Some(r),
            Roots::NotSplit => None,
        }
    }
}

pub fn quadratic_roots(field: Field, a: &FieldElement, b: &FieldElement) -> Roots {
    // If r is a root the other is a - r (Vieta), so finding one suffices.
    let one_root = match field {
        Field::Rationals => {
            let disc = (a * a).checked_add(&(&field.from_i64(4) * b)).unwrap();
            let q = disc.as_rational().unwrap();
            rational_sqrt(q).map(|s| {
                let s = FieldElement::Rational(s);
                (a - &s).checked_div(&field.from_i64(2)).unwrap()
            })
        }
        Field::Prime(2) => field
            .elements()
            .unwrap()
            .into_iter()
            .find(|t| (&(t * t) - &(a * t)) == *b),
        Field::Prime(p) => {
            let disc = (a * a).checked_add(&(&field.from_i64(4) * b)).unwrap();
            sqrt_mod(disc.residue_value().unwrap(), p).map(|s| {
                (a - &field.residue(s)).checked_div(&field.from_i64(2)).unwrap()
            })
        }
    };
    match one_root {
        Some(r) => {
            let other = a - &r;
            if r <= other {
                Roots::Split(r, other)
            } else {
                Roots::Split(other, r)
            }
        }
        None => Roots::NotSplit,
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

fn pow_mod(base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        e >>= 1;
    }
    acc as u64
}

/// Tonelli-Shanks for an odd prime `p`; `None` for non-residues.
pub(crate) fn sqrt_mod(n: u64, p: u64) -> Option<u64> {
    let n = n % p;
    if n == 0 {
        return Some(0);
    }
    if pow_mod(n, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(n, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let mulm = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(n, q, p);
    let mut r = pow_mod(n, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulm(t2, t2);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mulm(b, b);
        t = mulm(t, c);
        r = mulm(r, b);
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arith() {
        let q = Field::Rationals;
        let half = q.from_ratio(1, 2).unwrap();
        let third = q.from_ratio(1, 3).unwrap();
        assert_eq!((&half + &third).to_string(), "5/6");
        assert_eq!(q.zero().inv(), Err(FieldError::DivisionByZero));
        assert_eq!(q.parse("-2/4").unwrap().to_string(), "-1/2");
        assert_eq!(q.parse("6/3").unwrap().to_string(), "2");
    }

    #[test]
    fn prime_inverse() {
        let f = Field::prime(7).unwrap();
        let three = f.from_i64(3);
        let inv = three.inv().unwrap();
        assert_eq!(inv, f.from_i64(5));
        assert!((&three * &inv).is_one());
        for x in f.elements().unwrap().into_iter().skip(1) {
            assert!((&x * &x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Field::Rationals.one();
        let b = Field::prime(5).unwrap().one();
        assert!(matches!(a.checked_add(&b), Err(FieldError::MixedFields(..))));
    }

    #[test]
    fn characteristic_and_primality() {
        assert_eq!(Field::Rationals.characteristic(), 0);
        assert_eq!(Field::prime(2).unwrap().characteristic(), 2);
        assert_eq!(Field::prime(7).unwrap().characteristic(), 7);
        assert_eq!(Field::prime(9), Err(FieldError::NotPrime(9)));
        assert_eq!(Field::prime(1), Err(FieldError::NotPrime(1)));
    }

    #[test]
    fn roots_examples() {
        let q = Field::Rationals;
        assert_eq!(
            quadratic_roots(q, &q.one(), &q.zero()),
            Roots::Split(q.zero(), q.one())
        );
        assert_eq!(quadratic_roots(q, &q.zero(), &q.from_i64(2)), Roots::NotSplit);
        let f7 = Field::prime(7).unwrap();
        assert_eq!(
            quadratic_roots(f7, &f7.one(), &f7.from_i64(2)),
            Roots::Split(f7.from_i64(2), f7.from_i64(6))
        );
        // (t - 1/2)^2 = t^2 - t + 1/4
        let r = quadratic_roots(q, &q.one(), &q.from_ratio(-1, 4).unwrap());
        let half = q.from_ratio(1, 2).unwrap();
        assert_eq!(r, Roots::Split(half.clone(), half));
    }

    #[test]
    fn roots_match_brute_force_scan() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let f = Field::prime(p).unwrap();
            let elems = f.elements().unwrap();
            for a in &elems {
                for b in &elems {
                    let scan: Vec<_> = elems
                        .iter()
                        .filter(|t| (&(*t * *t) - &(a * *t)) == *b)
                        .cloned()
                        .collect();
                    match quadratic_roots(f, a, b) {
                        Roots::NotSplit => assert!(scan.is_empty()),
                        Roots::Split(r, s) => {
                            for x in [&r, &s] {
                                assert!((&(&(x * x) - &(a * x)) - b).is_zero());
                            }
                            let mut got = vec![r, s];
                            got.dedup();
                            assert_eq!(got, scan, "p={p} a={a} b={b}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tonelli_shanks_on_one_mod_four_primes() {
        for p in [13u64, 17, 41, 97, 257] {
            for n in 0..p {
                match sqrt_mod(n, p) {
                    Some(r) => assert_eq!(r * r % p, n),
                    None => assert!((0..p).all(|x| x * x % p != n)),
                }
            }
        }
    }
}
