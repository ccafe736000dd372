//! Quadratic sums: classification of `(a,b,c,d)` instances, the decision
//! procedure for idempotent + square-zero sums, explicit construction of the
//! two summands, and exact verification.
//!
//! Decision: split `M ~ M1 + M2` along the eigenvalues `{0, 1}`. `M` is an
//! idempotent plus a square-zero matrix iff every invariant factor of `M1` is
//! a polynomial in `t^2 - t`, and the nullity sequences of `M2` at `0` and `1`
//! are 2-intertwined.
//!
//! Construction mirrors the decision. The `M1` part is assembled from the
//! block matrices `U_{C(g)} = [[I, C(g)], [I, 0]]`, whose summands
//! `[[I, 0], [I, 0]]` and `[[0, C(g)], [0, 0]]` are visibly idempotent and
//! square-zero. The `M2` part pairs Jordan blocks at `1` with Jordan blocks at
//! `0` and solves each pair with explicit intertwining maps. Every returned
//! certificate has passed [`verify_certificate`].

use std::fmt;

use thiserror::Error;

use crate::canonical::{
    cyclic_vector, generalized_eigenspace, invariant_factors_with_transform, nilpotent_jordan_with_transform,
    nullity_sequence, split_spectral, CanonicalError, SpectralSplit,
};
use crate::field::{quadratic_roots, Field, FieldElement, Roots};
use crate::matrix::{Matrix, MatrixError, SimilarityWitness, Vector};
use crate::poly::{companion, Polynomial};

#[derive(Debug, Clone, Error)]
pub enum QuadError {
    #[error("{quadratic} does not split over the base field ({side} side)")]
    NotSplit { side: Side, quadratic: String },
    #[error("unsupported case {}", .classification.case)]
    UnsupportedCase {
        classification: Box<CaseClassification>,
        necessary: Option<Box<NecessaryReport>>,
    },
    #[error("matrix is not an idempotent plus square-zero sum after reduction")]
    DecisionNo(Box<Decision>),
    #[error("sequence is not non-increasing: {0:?}")]
    MalformedSequence(Vec<usize>),
    #[error("Jordan blocks cannot be paired: sizes {at_1} at 1 and {at_0} at 0 differ by more than 2")]
    Infeasible { at_1: usize, at_0: usize },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("internal post-check failed: {0}")]
    InternalCheckFailed(String),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
}

/// Which quadratic of the pair a statement is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `t^2 - a t - b`
    First,
    /// `t^2 - c t - d`
    Second,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::First => write!(f, "(a,b)"),
            Side::Second => write!(f, "(c,d)"),
        }
    }
}

/// `A^2 = aA + bI` and `B^2 = cB + dI`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadParams {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
}

impl QuadParams {
    pub fn new(a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> QuadParams {
        QuadParams { a, b, c, d }
    }

    pub fn from_ints(field: Field, a: i64, b: i64, c: i64, d: i64) -> QuadParams {
        QuadParams::new(field.from_i64(a), field.from_i64(b), field.from_i64(c), field.from_i64(d))
    }

    /// `(1, 0, 0, 0)`: idempotent plus square-zero.
    pub fn idempotent_square_zero(field: Field) -> QuadParams {
        QuadParams::from_ints(field, 1, 0, 0, 0)
    }

    pub fn field(&self) -> Field {
        self.a.field()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// Both reduced coefficients nonzero: a combination of two idempotents.
    I,
    /// Both zero: a sum of two square-zero matrices.
    II,
    /// Exactly one nonzero: an idempotent plus a square-zero matrix, up to scale.
    III,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::I => write!(f, "I"),
            Case::II => write!(f, "II"),
            Case::III => write!(f, "III"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseClassification {
    pub case: Case,
    /// Smallest root of `t^2 - a t - b`.
    pub alpha: FieldElement,
    /// Smallest root of `t^2 - c t - d`.
    pub beta: FieldElement,
    /// `alpha + beta`.
    pub shift: FieldElement,
    /// `a - 2 alpha`.
    pub reduced_a: FieldElement,
    /// `c - 2 beta`.
    pub reduced_c: FieldElement,
    /// The nonzero reduced coefficient in case III.
    pub scale: Option<FieldElement>,
    /// Case III with the idempotent on the `(c, d)` side.
    pub swapped: bool,
}

/// Jordan blocks at eigenvalue 1 matched with blocks at eigenvalue 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockPairing {
    /// `(size at 1, size at 0)`, both at least 1 and differing by at most 2.
    pub pairs: Vec<(usize, usize)>,
    /// `(eigenvalue, size)` for unmatched blocks, size at most 2.
    pub singletons: Vec<(u8, usize)>,
}

/// First offending index in the intertwining inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntertwiningViolation {
    /// The violated inequality is `left[n + p] <= right[n]`; `u_exceeds_v`
    /// tells which of the two sequences plays `left`.
    pub n: usize,
    pub p: usize,
    pub u_exceeds_v: bool,
    pub left: usize,
    pub right: usize,
}

fn check_non_increasing(s: &[usize]) -> Result<(), QuadError> {
    if s.windows(2).any(|w| w[0] < w[1]) {
        Err(QuadError::MalformedSequence(s.to_vec()))
    } else {
        Ok(())
    }
}

/// First `n >= 1` with `u_{n+p} > v_n` or `v_{n+p} > u_n`.
pub fn intertwining_violation(u: &[usize], v: &[usize], p: usize) -> Result<Option<IntertwiningViolation>, QuadError> {
    check_non_increasing(u)?;
    check_non_increasing(v)?;
    if p == 0 {
        return Err(QuadError::BadParams("intertwining offset must be positive".into()));
    }
    let at = |s: &[usize], k: usize| s.get(k - 1).copied().unwrap_or(0);
    for n in 1..=u.len().max(v.len()) {
        if at(u, n + p) > at(v, n) {
            return Ok(Some(IntertwiningViolation {
                n,
                p,
                u_exceeds_v: true,
                left: at(u, n + p),
                right: at(v, n),
            }));
        }
        if at(v, n + p) > at(u, n) {
            return Ok(Some(IntertwiningViolation {
                n,
                p,
                u_exceeds_v: false,
                left: at(v, n + p),
                right: at(u, n),
            }));
        }
    }
    Ok(None)
}

/// `u_{n+p} <= v_n` and `v_{n+p} <= u_n` for all `n >= 1`.
pub fn is_p_intertwined(u: &[usize], v: &[usize], p: usize) -> Result<bool, QuadError> {
    Ok(intertwining_violation(u, v, p)?.is_none())
}

/// Sort both size lists descending, pad with zeros and align; feasible iff
/// every aligned pair differs by at most 2.
pub fn pair_blocks(sizes_at_1: &[usize], sizes_at_0: &[usize]) -> Result<BlockPairing, QuadError> {
    let mut at1 = sizes_at_1.to_vec();
    let mut at0 = sizes_at_0.to_vec();
    at1.sort_unstable_by(|x, y| y.cmp(x));
    at0.sort_unstable_by(|x, y| y.cmp(x));
    let mut pairing = BlockPairing::default();
    for k in 0..at1.len().max(at0.len()) {
        let a = at1.get(k).copied().unwrap_or(0);
        let b = at0.get(k).copied().unwrap_or(0);
        if a.abs_diff(b) > 2 {
            return Err(QuadError::Infeasible { at_1: a, at_0: b });
        }
        match (a, b) {
            (0, 0) => {}
            (a, 0) => pairing.singletons.push((1, a)),
            (0, b) => pairing.singletons.push((0, b)),
            (a, b) => pairing.pairs.push((a, b)),
        }
    }
    Ok(pairing)
}

/// Pick the smallest root on each side, shift by `alpha + beta`, classify, and
/// in case III divide by the nonzero reduced coefficient.
///
/// The returned matrix is `M - (alpha+beta) I`, further divided by the scale
/// in case III, where it is the input to [`decide`].
pub fn classify_and_reduce(m: &Matrix, params: &QuadParams) -> Result<(CaseClassification, Matrix), QuadError> {
    let field = m.field();
    let alpha = match quadratic_roots(field, &params.a, &params.b) {
        Roots::Split(r, _) => r,
        Roots::NotSplit => {
            return Err(QuadError::NotSplit {
                side: Side::First,
                quadratic: Polynomial::new(field, vec![-params.b.clone(), -params.a.clone(), field.one()]).to_string(),
            })
        }
    };
    let beta = match quadratic_roots(field, &params.c, &params.d) {
        Roots::Split(r, _) => r,
        Roots::NotSplit => {
            return Err(QuadError::NotSplit {
                side: Side::Second,
                quadratic: Polynomial::new(field, vec![-params.d.clone(), -params.c.clone(), field.one()]).to_string(),
            })
        }
    };
    let two = field.from_i64(2);
    let reduced_a = &params.a - &(&two * &alpha);
    let reduced_c = &params.c - &(&two * &beta);
    let shift = &alpha + &beta;
    let shifted = m.shift(&shift);
    let (case, scale, swapped) = match (reduced_a.is_zero(), reduced_c.is_zero()) {
        (false, false) => (Case::I, None, false),
        (true, true) => (Case::II, None, false),
        (false, true) => (Case::III, Some(reduced_a.clone()), false),
        (true, false) => (Case::III, Some(reduced_c.clone()), true),
    };
    let reduced = match &scale {
        Some(s) => shifted.scale(&s.inv().unwrap()),
        None => shifted,
    };
    Ok((
        CaseClassification {
            case,
            alpha,
            beta,
            shift,
            reduced_a,
            reduced_c,
            scale,
            swapped,
        },
        reduced,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailingWitness {
    /// An invariant factor of the part without eigenvalues in `{0, 1}` that is
    /// not a polynomial in `t^2 - t`.
    InvariantFactor { index: usize, factor: Polynomial },
    /// The nullity sequences at 0 (`u`) and 1 (`v`) are not 2-intertwined.
    Intertwining(IntertwiningViolation),
}

impl fmt::Display for FailingWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailingWitness::InvariantFactor { index, factor } => write!(
                f,
                "invariant factor #{} ({}) of the part without eigenvalues 0, 1 is not a polynomial in t^2 - t",
                index + 1,
                factor
            ),
            FailingWitness::Intertwining(v) => {
                let (l, r) = if v.u_exceeds_v { (0, 1) } else { (1, 0) };
                write!(
                    f,
                    "n_{}(M,{}) = {} > n_{}(M,{}) = {}",
                    v.n + v.p,
                    l,
                    v.left,
                    v.n,
                    r,
                    v.right
                )
            }
        }
    }
}

/// Outcome of the idempotent + square-zero test, with diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub yes: bool,
    /// Invariant factors of the part without eigenvalues in `{0, 1}`.
    pub invariant_factors: Vec<Polynomial>,
    /// `g_i` with `f_i(t) = g_i(t^2 - t)`; complete only on success.
    pub g_factors: Vec<Polynomial>,
    pub nullity_at_0: Vec<usize>,
    pub nullity_at_1: Vec<usize>,
    pub pairing: Option<BlockPairing>,
    pub failing_witness: Option<FailingWitness>,
    pub split: SpectralSplit,
}

/// Decide whether `m` is an idempotent plus a square-zero matrix.
pub fn decide(m: &Matrix) -> Decision {
    assert!(m.is_square(), "decide: square matrix required");
    let field = m.field();
    let split = split_spectral(m);
    let (factors, _) = invariant_factors_with_transform(&split.m1);
    let mut g_factors = Vec::with_capacity(factors.factors.len());
    let mut failing_witness = None;
    for (index, f) in factors.factors.iter().enumerate() {
        match f.decompose_in_t2_minus_t() {
            Ok(g) => g_factors.push(g),
            Err(_) => {
                failing_witness = Some(FailingWitness::InvariantFactor {
                    index,
                    factor: f.clone(),
                });
                break;
            }
        }
    }
    let at0 = nullity_sequence(&split.m2, &field.zero()).values;
    let at1 = nullity_sequence(&split.m2, &field.one()).values;
    if failing_witness.is_none() {
        if let Some(v) = intertwining_violation(&at0, &at1, 2).expect("nullity sequences are non-increasing") {
            failing_witness = Some(FailingWitness::Intertwining(v));
        }
    }
    let yes = failing_witness.is_none();
    let pairing = if yes {
        let sizes = |s: &[usize]| crate::canonical::NullitySequence { eigenvalue: field.zero(), values: s.to_vec() }.block_sizes();
        Some(pair_blocks(&sizes(&at1), &sizes(&at0)).expect("2-intertwined sequences always pair"))
    } else {
        None
    };
    Decision {
        yes,
        invariant_factors: factors.factors,
        g_factors,
        nullity_at_0: at0,
        nullity_at_1: at1,
        pairing,
        failing_witness,
        split,
    }
}

/// Classify `params`, then decide the reduced matrix in case III.
pub fn decide_with_params(m: &Matrix, params: &QuadParams) -> Result<(CaseClassification, Decision), QuadError> {
    if !m.is_square() {
        return Err(QuadError::NotSquare(m.rows(), m.cols()));
    }
    let (cls, reduced) = classify_and_reduce(m, params)?;
    if cls.case != Case::III {
        let necessary = necessary_for_case_one(&cls, &reduced);
        return Err(QuadError::UnsupportedCase {
            classification: Box::new(cls),
            necessary,
        });
    }
    let decision = decide(&reduced);
    Ok((cls, decision))
}

fn necessary_for_case_one(cls: &CaseClassification, shifted: &Matrix) -> Option<Box<NecessaryReport>> {
    if cls.case != Case::I {
        return None;
    }
    check_necessary_combination(shifted, &cls.reduced_a, &cls.reduced_c).ok().map(Box::new)
}

/// `U_E = [[I, E], [I, 0]]`.
pub fn u_block(e: &Matrix) -> Matrix {
    let f = e.field();
    let p = e.rows();
    Matrix::block2x2(&Matrix::identity(f, p), e, &Matrix::identity(f, p), &Matrix::zero(f, p, p)).unwrap()
}

fn krylov_matrix(m: &Matrix, v: &[FieldElement]) -> Matrix {
    let n = m.rows();
    let mut cols: Vec<Vector> = Vec::with_capacity(n);
    let mut w = v.to_vec();
    for _ in 0..n {
        let next = m.mul_vec(&w);
        cols.push(w);
        w = next;
    }
    Matrix::from_columns(m.field(), n, &cols)
}

/// Idempotent + square-zero decomposition of a matrix without eigenvalues in
/// `{0, 1}` whose invariant factors are all polynomials in `t^2 - t`.
pub fn construct_case_a(m1: &Matrix) -> Result<(Matrix, Matrix), QuadError> {
    let field = m1.field();
    let n = m1.rows();
    let (factors, frob) = invariant_factors_with_transform(m1);
    let mut a_blocks = Vec::with_capacity(factors.factors.len());
    let mut b_blocks = Vec::with_capacity(factors.factors.len());
    for f in &factors.factors {
        let g = f.decompose_in_t2_minus_t().map_err(|_| {
            QuadError::InternalCheckFailed(format!("invariant factor {f} is not a polynomial in t^2 - t"))
        })?;
        let cg = companion(&g).map_err(|e| QuadError::InternalCheckFailed(e.to_string()))?;
        let k = cg.rows();
        let u = u_block(&cg);
        let (v, ann) = cyclic_vector(&u);
        if &ann != f {
            return Err(QuadError::InternalCheckFailed(format!(
                "U_C(g) has minimal polynomial {ann}, expected {f}"
            )));
        }
        // R^-1 U R = C(f) for the Krylov basis R of the cyclic vector
        let r = SimilarityWitness::new(krylov_matrix(&u, &v))?;
        let id = Matrix::identity(field, k);
        let zero = Matrix::zero(field, k, k);
        let a_model = Matrix::block2x2(&id, &zero, &id, &zero)?;
        let b_model = Matrix::block2x2(&zero, &cg, &zero, &zero)?;
        a_blocks.push(r.pull_back(&a_model)?);
        b_blocks.push(r.pull_back(&b_model)?);
    }
    let a = frob.apply(&Matrix::direct_sum(field, &a_blocks)?)?;
    let b = frob.apply(&Matrix::direct_sum(field, &b_blocks)?)?;
    post_check(m1, &a, &b, n, "case a")?;
    Ok((a, b))
}

fn post_check(m: &Matrix, a: &Matrix, b: &Matrix, n: usize, what: &str) -> Result<(), QuadError> {
    let fail = |s: &str| Err(QuadError::InternalCheckFailed(format!("{what}: {s}")));
    if a.rows() != n || b.rows() != n {
        return fail("wrong size");
    }
    if &(a * a) != a {
        return fail("A^2 != A");
    }
    if !(b * b).is_zero() {
        return fail("B^2 != 0");
    }
    if &(a + b) != m {
        return fail("A + B != M");
    }
    Ok(())
}

/// `[I_small; 0]`, the inclusion of a `small`-dimensional Jordan chain into a
/// `big` one.
fn inclusion(field: Field, big: usize, small: usize) -> Matrix {
    Matrix::identity(field, small)
        .vstack(&Matrix::zero(field, big - small, small))
        .unwrap()
}

/// `[0 | I_small]`, truncating a `big` Jordan chain by `big - small` steps.
fn truncation(field: Field, small: usize, big: usize) -> Matrix {
    Matrix::zero(field, small, big - small)
        .hstack(&Matrix::identity(field, small))
        .unwrap()
}

/// `(X, Y)` with `J_a^2 = XY`, `J_b^2 = YX`, `J_a X = X J_b`, `Y J_a = J_b Y`.
fn intertwiners(field: Field, a: usize, b: usize) -> (Matrix, Matrix) {
    let ja = Matrix::jordan_nilpotent(field, a);
    let jb = Matrix::jordan_nilpotent(field, b);
    if a == b {
        (&ja * &ja, Matrix::identity(field, a))
    } else if a == b + 1 {
        (inclusion(field, a, b), &truncation(field, b, a) * &ja)
    } else if b == a + 1 {
        (&truncation(field, a, b) * &jb, inclusion(field, b, a))
    } else if a == b + 2 {
        (inclusion(field, a, b), truncation(field, b, a))
    } else if b == a + 2 {
        (truncation(field, a, b), inclusion(field, b, a))
    } else {
        unreachable!("paired blocks differ by at most 2")
    }
}

fn alternating_signs(field: Field, n: usize) -> Matrix {
    let diag: Vec<FieldElement> = (0..n)
        .map(|i| if i % 2 == 0 { field.one() } else { -field.one() })
        .collect();
    Matrix::diagonal(field, &diag)
}

/// Summands for the model matrix `(I_a + J_a(0)) + J_b(0)`, `|a - b| <= 2`.
pub fn pair_decomposition(field: Field, a: usize, b: usize) -> Result<(Matrix, Matrix), QuadError> {
    if a == 0 || b == 0 || a.abs_diff(b) > 2 {
        return Err(QuadError::Infeasible { at_1: a, at_0: b });
    }
    let ia = Matrix::identity(field, a);
    let ib = Matrix::identity(field, b);
    let two = field.from_i64(2);
    let n = Matrix::jordan_nilpotent(field, a);
    let n0 = Matrix::jordan_nilpotent(field, b);
    let i_plus_n = &ia + &n;
    let inv1 = (&ia + &n.scale(&two)).inverse()?;
    let inv0 = (&ib - &n0.scale(&two)).inverse()?;
    let b1 = &(&inv1 * &n) * &i_plus_n;
    let b4 = &(&inv0 * &n0) * &(&ib - &n0);
    // intertwiners for N and -N' via the sign flip D J_b D = -J_b
    let (x, y) = intertwiners(field, a, b);
    let d = alternating_signs(field, b);
    let xt = &x * &d;
    let yt = &d * &y;
    let b3 = -&(&(&(&inv1 * &inv1) * &(&i_plus_n * &i_plus_n)) * &xt);
    let bmat = Matrix::block2x2(&b1, &b3, &yt, &b4)?;
    let model = Matrix::direct_sum(field, &[i_plus_n, n0])?;
    let amat = &model - &bmat;
    post_check(&model, &amat, &bmat, a + b, "block pair")?;
    Ok((amat, bmat))
}

/// Summands for a lone Jordan block of size at most 2 at eigenvalue 0 or 1.
fn singleton_decomposition(field: Field, eigenvalue: u8, size: usize) -> Result<(Matrix, Matrix), QuadError> {
    if size > 2 {
        return Err(QuadError::InternalCheckFailed(format!("singleton block of size {size}")));
    }
    let j = Matrix::jordan_nilpotent(field, size);
    Ok(match eigenvalue {
        0 => (Matrix::zero(field, size, size), j),
        _ => (Matrix::identity(field, size), j),
    })
}

/// Idempotent + square-zero decomposition of a matrix with spectrum in
/// `{0, 1}` whose nullity sequences at 0 and 1 are 2-intertwined.
pub fn construct_case_b(m2: &Matrix) -> Result<(Matrix, Matrix, BlockPairing), QuadError> {
    let field = m2.field();
    let n = m2.rows();
    let mut chains: [Vec<Vec<Vector>>; 2] = [Vec::new(), Vec::new()];
    let mut sizes: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (slot, lambda) in [(0usize, field.one()), (1usize, field.zero())] {
        let (basis, restricted) = generalized_eigenspace(m2, &lambda);
        let nil = restricted.shift(&lambda);
        let (block_sizes, w) = nilpotent_jordan_with_transform(&nil)?;
        let embed = Matrix::from_columns(field, n, &basis);
        let cols = (&embed * w.t()).columns();
        let mut offset = 0;
        for &s in &block_sizes {
            chains[slot].push(cols[offset..offset + s].to_vec());
            offset += s;
        }
        sizes[slot] = block_sizes;
    }
    if sizes[0].iter().sum::<usize>() + sizes[1].iter().sum::<usize>() != n {
        return Err(QuadError::InternalCheckFailed(
            "spectrum is not contained in {0, 1}".into(),
        ));
    }
    let pairing = pair_blocks(&sizes[0], &sizes[1])?;
    let mut basis: Vec<Vector> = Vec::with_capacity(n);
    let mut a_blocks = Vec::new();
    let mut b_blocks = Vec::new();
    // nilpotent_jordan sorts block sizes descending, matching pair_blocks' alignment
    for k in 0..sizes[0].len().max(sizes[1].len()) {
        let one = chains[0].get(k);
        let zero = chains[1].get(k);
        let (a, b) = match (one, zero) {
            (Some(c1), Some(c0)) => {
                basis.extend(c1.iter().cloned());
                basis.extend(c0.iter().cloned());
                pair_decomposition(field, c1.len(), c0.len())?
            }
            (Some(c1), None) => {
                basis.extend(c1.iter().cloned());
                singleton_decomposition(field, 1, c1.len())?
            }
            (None, Some(c0)) => {
                basis.extend(c0.iter().cloned());
                singleton_decomposition(field, 0, c0.len())?
            }
            (None, None) => unreachable!(),
        };
        a_blocks.push(a);
        b_blocks.push(b);
    }
    let w = SimilarityWitness::new(Matrix::from_columns(field, n, &basis))?;
    let a = w.apply(&Matrix::direct_sum(field, &a_blocks)?)?;
    let b = w.apply(&Matrix::direct_sum(field, &b_blocks)?)?;
    post_check(m2, &a, &b, n, "case b")?;
    Ok((a, b, pairing))
}

/// An explicit decomposition `M = A + B` for the stated parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub a: Matrix,
    pub b: Matrix,
    pub params: QuadParams,
    pub classification: CaseClassification,
    pub decision: Decision,
}

/// Decide, construct, and verify a decomposition of `m` for `params`.
pub fn construct(m: &Matrix, params: &QuadParams) -> Result<Certificate, QuadError> {
    let field = m.field();
    let n = m.rows();
    let (cls, decision) = decide_with_params(m, params)?;
    if !decision.yes {
        return Err(QuadError::DecisionNo(Box::new(decision)));
    }
    let split = &decision.split;
    let (a1, b1) = construct_case_a(&split.m1)?;
    let (a2, b2, _) = construct_case_b(&split.m2)?;
    let a_red = split.witness.apply(&Matrix::direct_sum(field, &[a1, a2])?)?;
    let b_red = split.witness.apply(&Matrix::direct_sum(field, &[b1, b2])?)?;
    let scale = cls.scale.clone().expect("case III carries a scale");
    let (idem_side, nil_side) = (a_red.scale(&scale), b_red.scale(&scale));
    let (a_part, b_part) = if cls.swapped {
        (nil_side, idem_side)
    } else {
        (idem_side, nil_side)
    };
    let a = &Matrix::scalar(field, n, &cls.alpha) + &a_part;
    let b = &Matrix::scalar(field, n, &cls.beta) + &b_part;
    let cert = Certificate {
        a,
        b,
        params: params.clone(),
        classification: cls,
        decision,
    };
    let report = verify_certificate(m, &cert.a, &cert.b, &cert.params);
    if !report.pass {
        return Err(QuadError::InternalCheckFailed(format!("certificate verification: {report:?}")));
    }
    Ok(cert)
}

/// Per-identity outcome of checking a claimed decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerificationReport {
    pub dimensions: bool,
    pub sum: bool,
    pub first_quadratic: bool,
    pub second_quadratic: bool,
    /// `A` and `B` commute with `(A+B)((a+c)I - (A+B))`; implied by the
    /// quadratic identities, checked as a consistency probe.
    pub commutation: bool,
    pub pass: bool,
}

pub fn verify_certificate(m: &Matrix, a: &Matrix, b: &Matrix, params: &QuadParams) -> VerificationReport {
    let field = m.field();
    let n = m.rows();
    let fields_ok = a.field() == field && b.field() == field && params.field() == field;
    let dims = fields_ok
        && m.is_square()
        && [a, b].iter().all(|x| x.rows() == n && x.cols() == n);
    if !dims {
        return VerificationReport {
            dimensions: false,
            sum: false,
            first_quadratic: false,
            second_quadratic: false,
            commutation: false,
            pass: false,
        };
    }
    let quad = |x: &Matrix, p: &FieldElement, q: &FieldElement| {
        x * x == &x.scale(p) + &Matrix::scalar(field, n, q)
    };
    let sum = &(a + b) == m;
    let first_quadratic = quad(a, &params.a, &params.b);
    let second_quadratic = quad(b, &params.c, &params.d);
    let s = a + b;
    let c = &s * &(&Matrix::scalar(field, n, &(&params.a + &params.c)) - &s);
    let commutation = a * &c == &c * a && b * &c == &c * b;
    VerificationReport {
        dimensions: true,
        sum,
        first_quadratic,
        second_quadratic,
        commutation,
        pass: sum && first_quadratic && second_quadratic && commutation,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NecessaryOutcome {
    /// `(M - alpha I)^n (M - beta I)^n != 0`; the test does not apply.
    NotApplicable,
    /// Sequences are 1-intertwined; decomposability is not settled.
    Inconclusive,
    /// Sequences are not 1-intertwined: `M` is not `alpha P + beta Q` with
    /// `P`, `Q` idempotent.
    NotDecomposable(IntertwiningViolation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NecessaryReport {
    pub alpha: FieldElement,
    pub beta: FieldElement,
    pub at_alpha: Vec<usize>,
    pub at_beta: Vec<usize>,
    pub outcome: NecessaryOutcome,
}

/// Necessary condition for `M = alpha P + beta Q` with idempotents `P`, `Q`
/// when the spectrum of `M` lies in `{alpha, beta}`: the nullity sequences at
/// `alpha` and `beta` must be 1-intertwined.
pub fn check_necessary_combination(
    m: &Matrix,
    alpha: &FieldElement,
    beta: &FieldElement,
) -> Result<NecessaryReport, QuadError> {
    if !m.is_square() {
        return Err(QuadError::NotSquare(m.rows(), m.cols()));
    }
    if alpha == beta || alpha.is_zero() || beta.is_zero() {
        return Err(QuadError::BadParams(format!(
            "need distinct nonzero alpha, beta (got {alpha}, {beta})"
        )));
    }
    let n = m.rows() as u32;
    let annihilated = (&m.shift(alpha).pow(n)? * &m.shift(beta).pow(n)?).is_zero();
    let at_alpha = nullity_sequence(m, alpha).values;
    let at_beta = nullity_sequence(m, beta).values;
    let outcome = if !annihilated {
        NecessaryOutcome::NotApplicable
    } else {
        match intertwining_violation(&at_alpha, &at_beta, 1)? {
            None => NecessaryOutcome::Inconclusive,
            Some(v) => NecessaryOutcome::NotDecomposable(v),
        }
    };
    Ok(NecessaryReport {
        alpha: alpha.clone(),
        beta: beta.clone(),
        at_alpha,
        at_beta,
        outcome,
    })
}
