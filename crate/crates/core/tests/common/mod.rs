#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use splitquad::field::{Field, FieldElement};
use splitquad::matrix::{Matrix, SimilarityWitness};
use splitquad::poly::Polynomial;

pub fn gf(p: u64) -> Field {
    Field::prime(p).unwrap()
}

/// Small rationals `k/d` with `|k| <= 4`, `1 <= d <= 3`, or a uniform residue.
pub fn element<R: Rng>(field: Field, rng: &mut R) -> FieldElement {
    match field {
        Field::Rationals => field
            .from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))
            .unwrap(),
        Field::Prime(p) => field.residue(rng.gen_range(0..p)),
    }
}

pub fn nonzero_element<R: Rng>(field: Field, rng: &mut R) -> FieldElement {
    loop {
        let x = element(field, rng);
        if !x.is_zero() {
            return x;
        }
    }
}

pub fn matrix<R: Rng>(field: Field, n: usize, rng: &mut R) -> Matrix {
    Matrix::new(field, n, n, (0..n * n).map(|_| element(field, rng)).collect()).unwrap()
}

/// Integer matrices with determinant +-1 over Q (a product of a few
/// elementary operations with multipliers +-1, and a permutation), uniform
/// invertible matrices over GF(p).
pub fn witness<R: Rng>(field: Field, n: usize, rng: &mut R) -> SimilarityWitness {
    match field {
        Field::Rationals => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            let mut t = Matrix::permutation(field, &perm);
            for _ in 0..2 * n {
                if n < 2 {
                    break;
                }
                let i = rng.gen_range(0..n);
                let j = (i + rng.gen_range(1..n)) % n;
                let s = field.from_i64(if rng.gen_bool(0.5) { 1 } else { -1 });
                let mut e = Matrix::identity(field, n);
                e.set(i, j, s);
                t = &t * &e;
            }
            SimilarityWitness::new(t).unwrap()
        }
        Field::Prime(_) => loop {
            if let Ok(w) = SimilarityWitness::new(matrix(field, n, rng)) {
                return w;
            }
        },
    }
}

/// `T diag(I_k, 0) T^-1` for random `k` and `T`.
pub fn idempotent<R: Rng>(field: Field, n: usize, rng: &mut R) -> Matrix {
    let k = rng.gen_range(0..=n);
    let diag: Vec<FieldElement> = (0..n).map(|i| if i < k { field.one() } else { field.zero() }).collect();
    witness(field, n, rng).apply(&Matrix::diagonal(field, &diag)).unwrap()
}

/// `T (J_2 + ... + J_2 + 0) T^-1` for a random number of `J_2` blocks.
pub fn square_zero<R: Rng>(field: Field, n: usize, rng: &mut R) -> Matrix {
    let r = rng.gen_range(0..=n / 2);
    let mut blocks = vec![Matrix::jordan_nilpotent(field, 2); r];
    if n > 2 * r {
        blocks.push(Matrix::zero(field, n - 2 * r, n - 2 * r));
    }
    witness(field, n, rng).apply(&Matrix::direct_sum(field, &blocks).unwrap()).unwrap()
}

pub fn monic<R: Rng>(field: Field, degree: usize, rng: &mut R) -> Polynomial {
    let mut c: Vec<FieldElement> = (0..degree).map(|_| element(field, rng)).collect();
    c.push(field.one());
    Polynomial::new(field, c)
}

/// Non-increasing size list with sizes in `1..=max_size`, at most `max_count`
/// copies of each size.
pub fn size_multiset<R: Rng>(rng: &mut R, max_size: usize, max_count: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    for s in (1..=max_size).rev() {
        let weight = if rng.gen_bool(0.6) { 0 } else { rng.gen_range(0..=max_count) };
        sizes.extend(std::iter::repeat_n(s, weight));
    }
    sizes
}
