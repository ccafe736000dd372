//! Structure theory with explicit transforms: invariant factors, the splitting
//! of a matrix along the eigenvalues `{0, 1}`, nullity sequences, and the
//! Jordan form of nilpotent matrices.
//!
//! Every routine that returns a [`SimilarityWitness`] `T` promises
//! `T^-1 M T = normal form`; the matching `check_*` functions re-verify that
//! identity exactly and are run on every call in debug builds.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::field::FieldElement;
use crate::matrix::{Matrix, MatrixError, SimilarityWitness, Vector};
use crate::poly::{companion, minimal_polynomial, vector_annihilator, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonicalError {
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("structure check failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// `n_k(M, lambda)` for `k = 1, 2, ...`, truncated at the first zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullitySequence {
    pub eigenvalue: FieldElement,
    pub values: Vec<usize>,
}

impl NullitySequence {
    /// `n_k`, zero past the stored prefix; `k` starts at 1.
    pub fn n(&self, k: usize) -> usize {
        assert!(k >= 1);
        self.values.get(k - 1).copied().unwrap_or(0)
    }

    /// `j_k = n_k - n_{k+1}`, the number of Jordan blocks of size exactly `k`.
    pub fn j(&self, k: usize) -> usize {
        self.n(k) - self.n(k + 1)
    }

    pub fn algebraic_multiplicity(&self) -> usize {
        self.values.iter().sum()
    }

    /// Jordan block sizes (the conjugate partition), largest first.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::new();
        for k in (1..=self.values.len()).rev() {
            sizes.extend(std::iter::repeat_n(k, self.j(k)));
        }
        sizes
    }
}

/// Nullity sequence from a multiset of block sizes.
pub fn sequence_from_sizes(sizes: &[usize]) -> Vec<usize> {
    let top = sizes.iter().copied().max().unwrap_or(0);
    (1..=top).map(|k| sizes.iter().filter(|&&a| a >= k).count()).collect()
}

pub fn nullity_sequence(m: &Matrix, lambda: &FieldElement) -> NullitySequence {
    assert!(m.is_square(), "nullity_sequence: square matrix required");
    let shifted = m.shift(lambda);
    let mut values = Vec::new();
    let mut prev_rank = m.rows();
    let mut power = Matrix::identity(m.field(), m.rows());
    loop {
        power = &power * &shifted;
        let r = power.rank();
        let nk = prev_rank - r;
        if nk == 0 {
            break;
        }
        values.push(nk);
        prev_rank = r;
    }
    NullitySequence {
        eigenvalue: lambda.clone(),
        values,
    }
}

/// Invariant factors `f_1 | f_2 | ... | f_r`, all monic and non-constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantFactors {
    pub factors: Vec<Polynomial>,
}

impl InvariantFactors {
    pub fn degree_sum(&self) -> usize {
        self.factors.iter().map(|f| f.degree().unwrap_or(0)).sum()
    }

    pub fn is_chain(&self) -> bool {
        self.factors.windows(2).all(|w| w[0].divides(&w[1]))
    }

    /// The Frobenius normal form `C(f_1) + ... + C(f_r)`.
    pub fn frobenius_form(&self, field: crate::field::Field) -> Matrix {
        let blocks: Vec<Matrix> = self.factors.iter().map(|f| companion(f).unwrap()).collect();
        Matrix::direct_sum(field, &blocks).unwrap()
    }
}

fn krylov_vectors(m: &Matrix, v: &[FieldElement], d: usize) -> Vec<Vector> {
    let mut out = Vec::with_capacity(d);
    let mut w = v.to_vec();
    for _ in 0..d {
        let next = m.mul_vec(&w);
        out.push(w);
        w = next;
    }
    out
}

fn unit(field: crate::field::Field, n: usize, i: usize) -> Vector {
    let mut e = vec![field.zero(); n];
    e[i] = field.one();
    e
}

/// A vector whose annihilator under `m` is the minimal polynomial.
///
/// Tries the standard basis, then sums of two basis vectors; failing that,
/// merges basis vectors pairwise, splitting each lcm into coprime factors of
/// the two annihilators so the merged vector realizes the lcm exactly.
pub fn cyclic_vector(m: &Matrix) -> (Vector, Polynomial) {
    let f = m.field();
    let n = m.rows();
    let mu = minimal_polynomial(m);
    if n == 0 {
        return (Vec::new(), mu);
    }
    let basis_anns: Vec<Polynomial> = (0..n).map(|i| vector_annihilator(m, &unit(f, n, i))).collect();
    if let Some(i) = basis_anns.iter().position(|g| g == &mu) {
        return (unit(f, n, i), mu);
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut v = unit(f, n, i);
            v[j] = f.one();
            let g = vector_annihilator(m, &v);
            if g == mu {
                return (v, g);
            }
        }
    }
    let mut v = unit(f, n, 0);
    let mut ann = basis_anns[0].clone();
    for (i, g) in basis_anns.iter().enumerate().skip(1) {
        if g.divides(&ann) {
            continue;
        }
        let (a, b) = coprime_lcm_split(&ann, g);
        let left = ann.div_exact(&a).unwrap().eval_matrix(m);
        let right = g.div_exact(&b).unwrap().eval_matrix(m);
        let x = left.mul_vec(&v);
        let y = right.mul_vec(&unit(f, n, i));
        v = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        ann = (&a * &b).monic();
        debug_assert_eq!(vector_annihilator(m, &v), ann);
        if ann == mu {
            break;
        }
    }
    assert_eq!(ann, mu, "lcm of basis annihilators is the minimal polynomial");
    (v, mu)
}

/// Coprime `(a, b)` with `a | f`, `b | g` and `a b = lcm(f, g)`.
fn coprime_lcm_split(f: &Polynomial, g: &Polynomial) -> (Polynomial, Polynomial) {
    let mut a = f.clone();
    let mut b = g.div_exact(&f.gcd(g)).unwrap();
    loop {
        let d = a.gcd(&b);
        if d.degree() == Some(0) {
            return (a.monic(), b.monic());
        }
        a = a.div_exact(&d).unwrap();
        b = &b * &d;
    }
}

/// Complete the independent columns `cols` to a basis of `K^n` with standard
/// basis vectors, returning the square matrix `[cols | extra]`.
pub fn extend_to_basis(field: crate::field::Field, n: usize, cols: &[Vector]) -> Matrix {
    let given = Matrix::from_columns(field, n, cols);
    let aug = given.hstack(&Matrix::identity(field, n)).unwrap();
    let (_, pivots) = aug.rref();
    let k = cols.len();
    debug_assert!(pivots.iter().take(k).copied().eq(0..k), "columns must be independent");
    let mut all = cols.to_vec();
    for &p in pivots.iter().filter(|&&p| p >= k) {
        all.push(unit(field, n, p - k));
    }
    Matrix::from_columns(field, n, &all)
}

static INVARIANT_FACTOR_CHECKS: AtomicU64 = AtomicU64::new(0);
static SPECTRAL_SPLIT_CHECKS: AtomicU64 = AtomicU64::new(0);

/// Process-wide number of `(invariant_factors_with_transform,
/// split_spectral)` results that passed their exact self-check. Stays at zero
/// in builds without debug assertions, where the checks are skipped.
pub fn structure_checks_passed() -> (u64, u64) {
    (
        INVARIANT_FACTOR_CHECKS.load(Ordering::Relaxed),
        SPECTRAL_SPLIT_CHECKS.load(Ordering::Relaxed),
    )
}

/// Frobenius form with a transform: `T^-1 M T = C(f_1) + ... + C(f_r)`.
///
/// Iterated cyclic decomposition: take a vector whose annihilator is the
/// current minimal polynomial `mu` (degree `d`), split off its Krylov block,
/// and recurse on the invariant complement `{x : phi(M^i x) = 0, i < d}` where
/// `phi` is dual to the last Krylov vector.
pub fn invariant_factors_with_transform(m: &Matrix) -> (InvariantFactors, SimilarityWitness) {
    assert!(m.is_square(), "invariant_factors: square matrix required");
    let f = m.field();
    let n = m.rows();
    let mut blocks: Vec<(Polynomial, Vec<Vector>)> = Vec::new();
    let mut basis = Matrix::identity(f, n);
    let mut cur = m.clone();
    while cur.rows() > 0 {
        let size = cur.rows();
        let (v, mu) = cyclic_vector(&cur);
        let d = mu.degree().unwrap();
        let krylov = krylov_vectors(&cur, &v, d);
        let original: Vec<Vector> = krylov.iter().map(|k| basis.mul_vec(k)).collect();
        blocks.push((mu, original));
        if d == size {
            break;
        }
        let ext = extend_to_basis(f, size, &krylov).inverse().expect("basis");
        let mut phi = ext.row(d - 1);
        let mut conds = Vec::with_capacity(d);
        for _ in 0..d {
            conds.push(phi.clone());
            // phi <- phi * M
            phi = cur.transpose().mul_vec(&phi);
        }
        let complement = Matrix::from_rows(f, conds).unwrap().kernel();
        debug_assert_eq!(complement.len(), size - d);
        let mut cols = krylov;
        cols.extend(complement.iter().cloned());
        let t = Matrix::from_columns(f, size, &cols);
        let local = t.inverse().expect("Krylov block and complement span the space");
        let normal = &(&local * &cur) * &t;
        debug_assert!(normal.submatrix(0..d, d..size).is_zero());
        debug_assert!(normal.submatrix(d..size, 0..d).is_zero());
        cur = normal.submatrix(d..size, d..size);
        basis = &basis * &Matrix::from_columns(f, size, &complement);
    }
    blocks.reverse();
    let factors = InvariantFactors {
        factors: blocks.iter().map(|(p, _)| p.clone()).collect(),
    };
    let cols: Vec<Vector> = blocks.into_iter().flat_map(|(_, c)| c).collect();
    let witness = SimilarityWitness::new(Matrix::from_columns(f, n, &cols)).expect("cyclic decomposition basis");
    if cfg!(debug_assertions) {
        check_invariant_factors(m, &factors, &witness).unwrap();
        INVARIANT_FACTOR_CHECKS.fetch_add(1, Ordering::Relaxed);
    }
    (factors, witness)
}

/// Exact re-verification of a Frobenius decomposition.
pub fn check_invariant_factors(
    m: &Matrix,
    factors: &InvariantFactors,
    witness: &SimilarityWitness,
) -> Result<(), CanonicalError> {
    let fail = |s: &str| Err(CanonicalError::CheckFailed(s.to_string()));
    if factors.degree_sum() != m.rows() {
        return fail("invariant factor degrees do not sum to n");
    }
    if !factors.is_chain() {
        return fail("invariant factors do not form a divisibility chain");
    }
    if factors.factors.iter().any(|p| !p.is_monic() || p.degree() == Some(0)) {
        return fail("invariant factors must be monic and non-constant");
    }
    if witness.pull_back(m)? != factors.frobenius_form(m.field()) {
        return fail("T^-1 M T is not the Frobenius form");
    }
    if let Some(last) = factors.factors.last() {
        if *last != minimal_polynomial(m) {
            return fail("last invariant factor is not the minimal polynomial");
        }
    }
    Ok(())
}

/// `M ~ M1 + M2` with `M1` free of eigenvalues in `{0, 1}` and
/// `M2^p (M2 - I)^q = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralSplit {
    pub m1: Matrix,
    pub m2: Matrix,
    /// `T^-1 M T = M1 + M2`.
    pub witness: SimilarityWitness,
    /// `P` in `mu = P t^p (t-1)^q`.
    pub cofactor: Polynomial,
    pub p: usize,
    pub q: usize,
}

pub fn split_spectral(m: &Matrix) -> SpectralSplit {
    assert!(m.is_square(), "split_spectral: square matrix required");
    let f = m.field();
    let n = m.rows();
    let mu = minimal_polynomial(m);
    let (rest, p) = mu.strip_root(&f.zero());
    let (cofactor, q) = rest.strip_root(&f.one());
    let k1 = cofactor.eval_matrix(m).kernel();
    let unipotent_part = &Polynomial::monomial(&f.one(), p)
        * &Polynomial::from_roots(f, &vec![f.one(); q]);
    let k2 = unipotent_part.eval_matrix(m).kernel();
    let d1 = k1.len();
    let mut cols = k1;
    cols.extend(k2);
    let witness = SimilarityWitness::new(Matrix::from_columns(f, n, &cols)).expect("kernel decomposition");
    let normal = witness.pull_back(m).unwrap();
    let split = SpectralSplit {
        m1: normal.submatrix(0..d1, 0..d1),
        m2: normal.submatrix(d1..n, d1..n),
        witness,
        cofactor,
        p,
        q,
    };
    if cfg!(debug_assertions) {
        check_spectral_split(m, &split).unwrap();
        SPECTRAL_SPLIT_CHECKS.fetch_add(1, Ordering::Relaxed);
    }
    split
}

pub fn check_spectral_split(m: &Matrix, s: &SpectralSplit) -> Result<(), CanonicalError> {
    let f = m.field();
    let fail = |msg: &str| Err(CanonicalError::CheckFailed(msg.to_string()));
    let sum = Matrix::direct_sum(f, &[s.m1.clone(), s.m2.clone()])?;
    if s.witness.pull_back(m)? != sum {
        return fail("T^-1 M T is not M1 + M2");
    }
    let mu1 = minimal_polynomial(&s.m1);
    if mu1.eval(&f.zero()).is_zero() || mu1.eval(&f.one()).is_zero() {
        return fail("M1 has an eigenvalue in {0, 1}");
    }
    let annihilator = &Polynomial::monomial(&f.one(), s.p) * &Polynomial::from_roots(f, &vec![f.one(); s.q]);
    if !annihilator.eval_matrix(&s.m2).is_zero() {
        return fail("M2^p (M2 - I)^q != 0");
    }
    Ok(())
}

/// Basis of the generalized eigenspace `Ker (M - lambda I)^n` and the
/// restriction of `M` to it.
pub fn generalized_eigenspace(m: &Matrix, lambda: &FieldElement) -> (Vec<Vector>, Matrix) {
    let n = m.rows();
    let basis = m.shift(lambda).pow(n as u32).unwrap().kernel();
    let restricted = restrict(m, &basis);
    (basis, restricted)
}

/// Matrix of `M` on the invariant subspace spanned by `basis`.
pub fn restrict(m: &Matrix, basis: &[Vector]) -> Matrix {
    let f = m.field();
    let n = m.rows();
    let k = basis.len();
    let t = extend_to_basis(f, n, basis);
    let image = m * &Matrix::from_columns(f, n, basis);
    let coords = &t.inverse().unwrap() * &image;
    debug_assert!(coords.submatrix(k..n, 0..k).is_zero(), "subspace is not invariant");
    coords.submatrix(0..k, 0..k)
}

/// Jordan form of a nilpotent matrix: block sizes (non-increasing) and a
/// witness with `T^-1 N T = J_{a_1}(0) + J_{a_2}(0) + ...`.
pub fn nilpotent_jordan_with_transform(
    nmat: &Matrix,
) -> Result<(Vec<usize>, SimilarityWitness), CanonicalError> {
    if !nmat.is_square() {
        return Err(CanonicalError::NotSquare(nmat.rows(), nmat.cols()));
    }
    let f = nmat.field();
    let n = nmat.rows();
    if !nmat.pow(n as u32)?.is_zero() {
        return Err(CanonicalError::NotNilpotent);
    }
    let mut powers = vec![Matrix::identity(f, n)];
    while !powers.last().unwrap().is_zero() {
        let next = powers.last().unwrap() * nmat;
        powers.push(next);
    }
    let index = powers.len() - 1;
    let kernels: Vec<Vec<Vector>> = powers.iter().map(Matrix::kernel).collect();

    // (top vector, chain length)
    let mut tops: Vec<(Vector, usize)> = Vec::new();
    for level in (1..=index).rev() {
        let mut span: Vec<Vector> = kernels[level - 1].clone();
        for (x, s) in &tops {
            span.push(powers[s - level].mul_vec(x));
        }
        let mut rank = Matrix::from_columns(f, n, &span).rank();
        for y in &kernels[level] {
            span.push(y.clone());
            let r = Matrix::from_columns(f, n, &span).rank();
            if r > rank {
                rank = r;
                tops.push((y.clone(), level));
            } else {
                span.pop();
            }
        }
    }
    let mut cols = Vec::with_capacity(n);
    for (x, s) in &tops {
        for e in (0..*s).rev() {
            cols.push(powers[e].mul_vec(x));
        }
    }
    let sizes: Vec<usize> = tops.iter().map(|(_, s)| *s).collect();
    let witness = SimilarityWitness::new(Matrix::from_columns(f, n, &cols))?;
    if cfg!(debug_assertions) {
        let blocks: Vec<Matrix> = sizes.iter().map(|&s| Matrix::jordan_nilpotent(f, s)).collect();
        debug_assert_eq!(witness.pull_back(nmat)?, Matrix::direct_sum(f, &blocks)?);
    }
    Ok((sizes, witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn nullity_examples() {
        let j3 = Matrix::jordan_nilpotent(q(), 3);
        assert_eq!(nullity_sequence(&j3, &q().zero()).values, vec![1, 1, 1]);
        let d = Matrix::from_ints(q(), 3, 3, &[0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(nullity_sequence(&d, &q().zero()).values, vec![2]);
        let m = Matrix::direct_sum(q(), &[Matrix::jordan_block(q(), 2, &q().one()), Matrix::zero(q(), 1, 1)]).unwrap();
        let s = nullity_sequence(&m, &q().one());
        assert_eq!(s.values, vec![1, 1]);
        assert_eq!((s.j(1), s.j(2)), (0, 1));
        assert_eq!(s.block_sizes(), vec![2]);
        assert!(nullity_sequence(&m, &q().from_i64(5)).values.is_empty());
    }

    #[test]
    fn invariant_factor_examples() {
        let d = Matrix::from_ints(q(), 2, 2, &[2, 0, 0, 2]);
        let (inv, _) = invariant_factors_with_transform(&d);
        assert_eq!(inv.factors, vec![Polynomial::from_ints(q(), &[-2, 1]); 2]);

        let (inv, _) = invariant_factors_with_transform(&Matrix::jordan_nilpotent(q(), 2));
        assert_eq!(inv.factors, vec![Polynomial::from_ints(q(), &[0, 0, 1])]);

        let m = Matrix::from_ints(q(), 2, 2, &[0, 0, 0, 1]);
        let (inv, w) = invariant_factors_with_transform(&m);
        assert_eq!(inv.factors, vec![Polynomial::from_ints(q(), &[0, -1, 1])]);
        assert_eq!(w.pull_back(&m).unwrap(), Matrix::from_ints(q(), 2, 2, &[0, 0, 1, 1]));
        check_invariant_factors(&m, &inv, &w).unwrap();
    }

    #[test]
    fn invariant_factors_need_merging() {
        // only e1 + e2 + e3 is cyclic, so the coprime merge path is exercised
        let m = Matrix::diagonal(q(), &[q().from_i64(1), q().from_i64(2), q().from_i64(3)]);
        let (inv, w) = invariant_factors_with_transform(&m);
        assert_eq!(inv.factors.len(), 1);
        check_invariant_factors(&m, &inv, &w).unwrap();
        let (v, mu) = cyclic_vector(&m);
        assert_eq!(vector_annihilator(&m, &v), mu);
        assert_eq!(mu.degree(), Some(3));
    }

    #[test]
    fn empty_matrix() {
        let z = Matrix::zero(q(), 0, 0);
        let (inv, w) = invariant_factors_with_transform(&z);
        assert!(inv.factors.is_empty());
        assert_eq!(w.size(), 0);
        let s = split_spectral(&z);
        assert_eq!((s.m1.rows(), s.m2.rows()), (0, 0));
    }

    #[test]
    fn split_examples() {
        let s = split_spectral(&Matrix::from_ints(q(), 2, 2, &[2, 0, 0, 0]));
        assert_eq!(s.m1, Matrix::from_ints(q(), 1, 1, &[2]));
        assert_eq!(s.m2, Matrix::from_ints(q(), 1, 1, &[0]));
        assert_eq!((s.p, s.q), (1, 0));

        let j3 = Matrix::jordan_nilpotent(q(), 3);
        let s = split_spectral(&j3);
        assert_eq!(s.m1.rows(), 0);
        assert_eq!(s.m2.rows(), 3);
        assert_eq!(minimal_polynomial(&s.m2), Polynomial::from_ints(q(), &[0, 0, 0, 1]));

        let c = companion(&Polynomial::from_roots(q(), &[q().zero(), q().one(), q().from_i64(2)])).unwrap();
        let s = split_spectral(&c);
        assert_eq!(s.m1, Matrix::from_ints(q(), 1, 1, &[2]));
        assert_eq!(minimal_polynomial(&s.m2), Polynomial::from_ints(q(), &[0, -1, 1]));
        check_spectral_split(&c, &s).unwrap();
    }

    #[test]
    fn nilpotent_jordan_examples() {
        let (sizes, _) = nilpotent_jordan_with_transform(&Matrix::zero(q(), 3, 3)).unwrap();
        assert_eq!(sizes, vec![1, 1, 1]);
        let j3 = Matrix::jordan_nilpotent(q(), 3);
        let (sizes, w) = nilpotent_jordan_with_transform(&j3).unwrap();
        assert_eq!(sizes, vec![3]);
        assert_eq!(w.pull_back(&j3).unwrap(), j3);
        let m = Matrix::from_ints(q(), 3, 3, &[0, 1, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(nilpotent_jordan_with_transform(&m).unwrap().0, vec![2, 1]);
        assert_eq!(
            nilpotent_jordan_with_transform(&Matrix::identity(q(), 2)).unwrap_err(),
            CanonicalError::NotNilpotent
        );
    }

    #[test]
    fn sequences_and_sizes_agree() {
        let sizes = vec![4, 2, 2, 1];
        let seq = sequence_from_sizes(&sizes);
        assert_eq!(seq, vec![4, 3, 1, 1]);
        let ns = NullitySequence { eigenvalue: q().zero(), values: seq };
        assert_eq!(ns.block_sizes(), sizes);
        assert_eq!(ns.algebraic_multiplicity(), 9);
    }
}
