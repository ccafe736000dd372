//! Univariate polynomials over the base field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::field::{Field, FieldElement};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial division by zero")]
    DivisionByZero,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("companion matrix needs degree at least 1")]
    DegreeZero,
    #[error("polynomial is not a polynomial in t^2 - t")]
    NotRepresentable,
}

/// Dense coefficient list, constant term first, never with trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    field: Field,
    coeffs: Vec<FieldElement>,
}

impl Polynomial {
    pub fn new(field: Field, mut coeffs: Vec<FieldElement>) -> Polynomial {
        debug_assert!(coeffs.iter().all(|c| c.field() == field));
        while coeffs.last().is_some_and(FieldElement::is_zero) {
            coeffs.pop();
        }
        Polynomial { field, coeffs }
    }

    pub fn from_ints(field: Field, coeffs: &[i64]) -> Polynomial {
        Polynomial::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: Field) -> Polynomial {
        Polynomial { field, coeffs: Vec::new() }
    }

    pub fn one(field: Field) -> Polynomial {
        Polynomial::constant(&field.one())
    }

    pub fn constant(c: &FieldElement) -> Polynomial {
        Polynomial::new(c.field(), vec![c.clone()])
    }

    /// The indeterminate `t`.
    pub fn t(field: Field) -> Polynomial {
        Polynomial::from_ints(field, &[0, 1])
    }

    /// `t - root`.
    pub fn linear(root: &FieldElement) -> Polynomial {
        let f = root.field();
        Polynomial::new(f, vec![-root, f.one()])
    }

    /// `t^2 - t`, the substitution target of the decomposition test.
    pub fn t2_minus_t(field: Field) -> Polynomial {
        Polynomial::from_ints(field, &[0, -1, 1])
    }

    pub fn monomial(c: &FieldElement, k: usize) -> Polynomial {
        let f = c.field();
        let mut coeffs = vec![f.zero(); k];
        coeffs.push(c.clone());
        Polynomial::new(f, coeffs)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// `None` is the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn coeff(&self, k: usize) -> FieldElement {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn leading(&self) -> Option<&FieldElement> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(FieldElement::is_one)
    }

    /// Divide by the leading coefficient; the zero polynomial stays zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let inv = l.inv().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    pub fn scale(&self, s: &FieldElement) -> Polynomial {
        Polynomial::new(self.field, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn divrem(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial), PolyError> {
        let dd = d.degree().ok_or(PolyError::DivisionByZero)?;
        let lead_inv = d.leading().unwrap().inv().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return Ok((Polynomial::zero(self.field), Polynomial::zero(self.field)));
        };
        if sd < dd {
            return Ok((Polynomial::zero(self.field), self.clone()));
        }
        let mut quot = vec![self.field.zero(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] = &rem[k + i] - &(&c * dc);
            }
            quot[k] = c;
        }
        Ok((Polynomial::new(self.field, quot), Polynomial::new(self.field, rem)))
    }

    /// Exact quotient; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (q, r) = self.divrem(d).ok()?;
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Polynomial) -> bool {
        match other.divrem(self) {
            Ok((_, r)) => r.is_zero(),
            Err(_) => other.is_zero(),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).unwrap().1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic lcm.
    pub fn lcm(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(self.field);
        }
        let g = self.gcd(other);
        (self * &other.div_exact(&g).unwrap()).monic()
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| &(&acc * x) + c)
    }

    /// `p(M)` by Horner's rule.
    pub fn eval_matrix(&self, m: &Matrix) -> Matrix {
        assert!(m.is_square(), "eval_matrix: square matrix required");
        let n = m.rows();
        let mut acc = Matrix::zero(self.field, n, n);
        for c in self.coeffs.iter().rev() {
            acc = (&acc * m).shift(&-c);
        }
        acc
    }

    /// `self(inner(t))`.
    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        self.coeffs
            .iter()
            .rev()
            .fold(Polynomial::zero(self.field), |acc, c| &(&acc * inner) + &Polynomial::constant(c))
    }

    /// `f(1 - t)`.
    pub fn substitute_one_minus_t(&self) -> Polynomial {
        self.compose(&Polynomial::from_ints(self.field, &[1, -1]))
    }

    /// The unique `g` with `self(t) = g(t^2 - t)`, if one exists.
    ///
    /// Strips leading terms `c t^{2m}` greedily by subtracting `c (t^2 - t)^m`;
    /// an odd-degree leading term means no such `g` exists.
    pub fn decompose_in_t2_minus_t(&self) -> Result<Polynomial, PolyError> {
        if !self.is_monic() {
            return Err(PolyError::NotMonic);
        }
        let s = Polynomial::t2_minus_t(self.field);
        let top = self.degree().unwrap() / 2;
        let mut powers = Vec::with_capacity(top + 1);
        powers.push(Polynomial::one(self.field));
        for k in 1..=top {
            powers.push(&powers[k - 1] * &s);
        }
        let mut rem = self.clone();
        let mut g = vec![self.field.zero(); top + 1];
        while let Some(d) = rem.degree() {
            if d % 2 == 1 {
                return Err(PolyError::NotRepresentable);
            }
            let c = rem.leading().unwrap().clone();
            let m = d / 2;
            rem = &rem - &powers[m].scale(&c);
            g[m] = c;
        }
        Ok(Polynomial::new(self.field, g))
    }

    /// Strip the largest power of `t - root` dividing `self`; returns the
    /// cofactor and the exponent.
    pub fn strip_root(&self, root: &FieldElement) -> (Polynomial, usize) {
        let lin = Polynomial::linear(root);
        let mut cur = self.clone();
        let mut k = 0;
        if cur.is_zero() {
            return (cur, 0);
        }
        while let Some(q) = cur.div_exact(&lin) {
            cur = q;
            k += 1;
        }
        (cur, k)
    }

    /// Product of `(t - r)` over the given roots.
    pub fn from_roots(field: Field, roots: &[FieldElement]) -> Polynomial {
        roots
            .iter()
            .fold(Polynomial::one(field), |acc, r| &acc * &Polynomial::linear(r))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.field, rhs.field, "mixed-field polynomial addition");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(self.field, (0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.field, self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.field, rhs.field, "mixed-field polynomial product");
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Polynomial::new(self.field, out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let s = c.to_string();
            let (neg, mag) = match s.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            };
            if k == 0 {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.field, self)
    }
}

/// `C(P)` for monic `P = t^n - a_{n-1} t^{n-1} - ... - a_0`: ones on the
/// subdiagonal and `(a_0, ..., a_{n-1})` down the last column.
pub fn companion(p: &Polynomial) -> Result<Matrix, PolyError> {
    let n = p.degree().ok_or(PolyError::NotMonic)?;
    if !p.is_monic() {
        return Err(PolyError::NotMonic);
    }
    if n == 0 {
        return Err(PolyError::DegreeZero);
    }
    let f = p.field();
    let mut m = Matrix::zero(f, n, n);
    for i in 1..n {
        m.set(i, i - 1, f.one());
    }
    for i in 0..n {
        m.set(i, n - 1, -&p.coeff(i));
    }
    Ok(m)
}

/// Incremental echelon basis of Krylov vectors, each tagged with its
/// expression as a combination of `v, Mv, M^2 v, ...`.
struct KrylovReducer {
    basis: Vec<(Vec<FieldElement>, usize, Vec<FieldElement>)>,
}

impl KrylovReducer {
    /// Reduce `w` (whose combination is `combo`) against the basis. Returns
    /// the relation when `w` lies in the span, otherwise stores it.
    fn push(&mut self, mut w: Vec<FieldElement>, mut combo: Vec<FieldElement>) -> Option<Vec<FieldElement>> {
        for (s, p, c) in &self.basis {
            let f = w[*p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in w.iter_mut().zip(s) {
                *x = &*x - &(&f * y);
            }
            for (x, y) in combo.iter_mut().zip(c) {
                *x = &*x - &(&f * y);
            }
        }
        match w.iter().position(|x| !x.is_zero()) {
            None => Some(combo),
            Some(p) => {
                let inv = w[p].inv().unwrap();
                let w: Vec<_> = w.iter().map(|x| x * &inv).collect();
                let combo: Vec<_> = combo.iter().map(|x| x * &inv).collect();
                self.basis.push((w, p, combo));
                None
            }
        }
    }
}

/// The monic annihilator of `v` under `M`: the least-degree monic `g` with
/// `g(M) v = 0`.
pub fn vector_annihilator(m: &Matrix, v: &[FieldElement]) -> Polynomial {
    let f = m.field();
    let n = m.rows();
    let mut red = KrylovReducer { basis: Vec::new() };
    let mut w = v.to_vec();
    for k in 0..=n {
        let mut combo = vec![f.zero(); n + 1];
        combo[k] = f.one();
        if let Some(rel) = red.push(w.clone(), combo) {
            return Polynomial::new(f, rel);
        }
        w = m.mul_vec(&w);
    }
    unreachable!("Krylov sequence must become dependent within n+1 steps")
}

/// Minimal polynomial as the lcm of the annihilators of the standard basis.
pub fn minimal_polynomial(m: &Matrix) -> Polynomial {
    assert!(m.is_square(), "minimal_polynomial: square matrix required");
    let f = m.field();
    let n = m.rows();
    let mut mu = Polynomial::one(f);
    for i in 0..n {
        let mut e = vec![f.zero(); n];
        e[i] = f.one();
        let g = vector_annihilator(m, &e);
        if !g.divides(&mu) {
            mu = mu.lcm(&g);
        }
        if mu.degree() == Some(n) {
            break;
        }
    }
    mu
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    fn qp(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(q(), c)
    }

    #[test]
    fn poly_ops_examples() {
        assert_eq!(qp(&[-1, 0, 1]).gcd(&qp(&[-1, 1])), qp(&[-1, 1]));
        let (qq, r) = qp(&[0, 0, 0, 1]).divrem(&qp(&[0, 0, 1])).unwrap();
        assert_eq!((qq, r), (qp(&[0, 1]), Polynomial::zero(q())));
        // (s + 1) composed with t^2 - t
        assert_eq!(qp(&[1, 1]).compose(&qp(&[0, -1, 1])), qp(&[1, -1, 1]));
        assert_eq!(qp(&[1]).divrem(&Polynomial::zero(q())), Err(PolyError::DivisionByZero));
        assert_eq!(Polynomial::zero(q()).degree(), None);
    }

    #[test]
    fn companion_examples() {
        assert_eq!(companion(&qp(&[-5, 1])).unwrap(), Matrix::from_ints(q(), 1, 1, &[5]));
        assert_eq!(
            companion(&qp(&[-1, -1, 1])).unwrap(),
            Matrix::from_ints(q(), 2, 2, &[0, 1, 1, 1])
        );
        assert_eq!(companion(&qp(&[1, 2])), Err(PolyError::NotMonic));
        assert_eq!(companion(&qp(&[1])), Err(PolyError::DegreeZero));
    }

    #[test]
    fn minimal_polynomial_examples() {
        assert_eq!(minimal_polynomial(&Matrix::identity(q(), 3)), qp(&[-1, 1]));
        let m = Matrix::direct_sum(q(), &[Matrix::jordan_nilpotent(q(), 2), Matrix::zero(q(), 1, 1)]).unwrap();
        assert_eq!(minimal_polynomial(&m), qp(&[0, 0, 1]));
        assert_eq!(minimal_polynomial(&Matrix::from_ints(q(), 2, 2, &[0, 0, 0, 1])), qp(&[0, -1, 1]));
        assert_eq!(minimal_polynomial(&Matrix::zero(q(), 0, 0)), Polynomial::one(q()));
        assert!(minimal_polynomial(&Matrix::identity(q(), 3)).eval_matrix(&Matrix::identity(q(), 3)).is_zero());
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(qp(&[0, -1, 1]).decompose_in_t2_minus_t().unwrap(), qp(&[0, 1]));
        assert_eq!(qp(&[1, -2, 3, -2, 1]).decompose_in_t2_minus_t().unwrap(), qp(&[1, 2, 1]));
        assert_eq!(qp(&[0, 0, 0, 1]).decompose_in_t2_minus_t(), Err(PolyError::NotRepresentable));
        assert_eq!(qp(&[0, 0, 1]).decompose_in_t2_minus_t(), Err(PolyError::NotRepresentable));
        assert_eq!(qp(&[0, 0, 2]).decompose_in_t2_minus_t(), Err(PolyError::NotMonic));
        assert_eq!(qp(&[1]).decompose_in_t2_minus_t().unwrap(), qp(&[1]));
    }

    #[test]
    fn one_minus_t_examples() {
        assert_eq!(qp(&[0, 1]).substitute_one_minus_t(), qp(&[1, -1]));
        assert_eq!(qp(&[0, -1, 1]).substitute_one_minus_t(), qp(&[0, -1, 1]));
        assert_eq!(qp(&[-2, 1]).substitute_one_minus_t(), qp(&[-1, -1]));
    }

    #[test]
    fn strip_root_counts_multiplicity() {
        let p = &Polynomial::from_roots(q(), &[q().zero(), q().zero(), q().one()]) * &qp(&[-2, 1]);
        let (rest, k) = p.strip_root(&q().zero());
        assert_eq!(k, 2);
        let (rest, k1) = rest.strip_root(&q().one());
        assert_eq!(k1, 1);
        assert_eq!(rest, qp(&[-2, 1]));
    }

    #[test]
    fn display() {
        assert_eq!(qp(&[-1, -1, 1]).to_string(), "t^2 - t - 1");
        assert_eq!(qp(&[3, 0, -2]).to_string(), "-2*t^2 + 3");
    }
}
