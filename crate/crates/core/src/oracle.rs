//! Brute-force ground truth over small prime fields.
//!
//! Matrices are keyed by their row-major residue lists. Idempotents and
//! square-zero matrices come from a full scan when `p^(n^2) <= 2^25`, and
//! otherwise from a rank-stratified construction: every idempotent of rank
//! `k` is `U V^T` with `V^T U = I_k`, every square-zero matrix of rank `r` is
//! `U V^T` with `V^T U = 0` and `rank V = r`, where `U` runs over canonical
//! bases of `k`- (resp. `r`-) dimensional subspaces.

use std::collections::HashSet;
use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{Field, FieldElement};
use crate::matrix::Matrix;
use crate::quadsum::decide;

pub const DEFAULT_BUDGET: u64 = 100_000_000;
const FULL_SCAN_LIMIT: u128 = 1 << 25;
const CHUNK: u64 = 1 << 12;

#[derive(Debug, Clone, Error)]
pub enum OracleError {
    #[error("exhaustive enumeration needs a prime field, got {0}")]
    NotFinite(Field),
    #[error("enumeration needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("combination scales must be nonzero, got {0} and {1}")]
    ZeroScale(String, String),
}

pub type Key = Vec<u64>;

fn modulus(field: Field) -> Result<u64, OracleError> {
    field.order().ok_or(OracleError::NotFinite(field))
}

fn saturating_pow(base: u64, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// `p^(n^2)`, saturating.
pub fn matrix_count(p: u64, n: usize) -> u128 {
    saturating_pow(p, n * n)
}

fn guard(needed: u128, budget: u64) -> Result<(), OracleError> {
    if needed > budget as u128 {
        Err(OracleError::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

/// Row-major residues of the `index`-th matrix; entry `k` is digit `k` of
/// `index` in base `p`.
pub fn key_from_index(p: u64, n: usize, mut index: u64) -> Key {
    (0..n * n)
        .map(|_| {
            let d = index % p;
            index /= p;
            d
        })
        .collect()
}

pub fn key_of(m: &Matrix) -> Key {
    m.entries()
        .iter()
        .map(|x| x.residue_value().expect("prime-field matrix"))
        .collect()
}

pub fn matrix_of(field: Field, n: usize, key: &[u64]) -> Matrix {
    Matrix::new(field, n, n, key.iter().map(|&r| field.residue(r)).collect()).expect("key length n^2")
}

fn mul_keys(p: u64, n: usize, a: &[u64], b: &[u64]) -> Key {
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = (out[i * n + j] + x * b[k * n + j]) % p;
            }
        }
    }
    out
}

/// `x * a + y * b` entrywise.
fn combine_keys(p: u64, x: u64, a: &[u64], y: u64, b: &[u64]) -> Key {
    a.iter().zip(b).map(|(&u, &v)| (x * u + y * v) % p).collect()
}

/// Gaussian binomial `[n, k]_p`.
fn gaussian_binomial(p: u64, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let p = p as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num = num.saturating_mul(p.pow((n - i) as u32) - 1);
        den = den.saturating_mul(p.pow((i + 1) as u32) - 1);
    }
    num / den
}

/// Number of idempotent `n x n` matrices over `GF(p)`.
pub fn idempotent_count(p: u64, n: usize) -> u128 {
    (0..=n)
        .map(|k| gaussian_binomial(p, n, k).saturating_mul(saturating_pow(p, k * (n - k))))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// Number of square-zero `n x n` matrices over `GF(p)`.
pub fn square_zero_count(p: u64, n: usize) -> u128 {
    (0..=n / 2)
        .map(|r| {
            let full_rank: u128 = (0..r)
                .map(|i| saturating_pow(p, n - r) - saturating_pow(p, i))
                .fold(1u128, |a, b| a.saturating_mul(b));
            gaussian_binomial(p, n, r).saturating_mul(full_rank)
        })
        .fold(0u128, |a, b| a.saturating_add(b))
}

fn scan(p: u64, n: usize, keep: impl Fn(&[u64]) -> bool + Sync) -> Vec<Key> {
    let total = matrix_count(p, n) as u64;
    let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();
    let mut out = chunks
        .par_iter()
        .map(|&c| {
            (c * CHUNK..((c + 1) * CHUNK).min(total))
                .map(|i| key_from_index(p, n, i))
                .filter(|k| keep(k))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat();
    out.sort_unstable();
    out
}

/// All assignments of `len` digits base `p`, in index order.
fn assignments(p: u64, len: usize) -> impl Iterator<Item = Key> {
    let total = saturating_pow(p, len) as u64;
    (0..total).map(move |i| {
        let mut i = i;
        (0..len)
            .map(|_| {
                let d = i % p;
                i /= p;
                d
            })
            .collect()
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every `k`-dimensional subspace of `GF(p)^n` as its reduced row echelon
/// basis (`k` rows of length `n`).
fn subspaces(p: u64, n: usize, k: usize) -> Vec<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for pivots in combinations(n, k) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| ((c + 1)..n).filter(|j| !pivots.contains(j)).map(move |j| (i, j)))
            .collect();
        for values in assignments(p, free.len()) {
            let mut rows = vec![vec![0u64; n]; k];
            for (i, &c) in pivots.iter().enumerate() {
                rows[i][c] = 1;
            }
            for (&(i, j), &v) in free.iter().zip(&values) {
                rows[i][j] = v;
            }
            out.push(rows);
        }
    }
    out
}

fn pivot_columns(rows: &[Vec<u64>]) -> Vec<usize> {
    rows.iter().map(|r| r.iter().position(|&x| x != 0).unwrap()).collect()
}

/// `U V^T` for `U` given by its columns `basis` and `V^T` by its rows.
fn outer(p: u64, n: usize, basis: &[Vec<u64>], vt: &[Vec<u64>]) -> Key {
    let mut out = vec![0u64; n * n];
    for (u, v) in basis.iter().zip(vt) {
        for i in 0..n {
            if u[i] == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = (out[i * n + j] + u[i] * v[j]) % p;
            }
        }
    }
    out
}

fn structured_idempotents(p: u64, n: usize) -> Vec<Key> {
    let mut out = Vec::new();
    for k in 0..=n {
        for basis in subspaces(p, n, k) {
            let pivots = pivot_columns(&basis);
            let non_pivot: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
            for values in assignments(p, k * non_pivot.len()) {
                // row i of V^T: free on non-pivot coordinates, forced on pivots by V^T U = I
                let vt: Vec<Vec<u64>> = (0..k)
                    .map(|i| {
                        let mut v = vec![0u64; n];
                        for (t, &j) in non_pivot.iter().enumerate() {
                            v[j] = values[i * non_pivot.len() + t];
                        }
                        for (l, &c) in pivots.iter().enumerate() {
                            let dot: u64 = non_pivot.iter().map(|&j| v[j] * basis[l][j] % p).sum::<u64>() % p;
                            let target = u64::from(l == i);
                            v[c] = (target + p - dot) % p;
                        }
                        v
                    })
                    .collect();
                out.push(outer(p, n, &basis, &vt));
            }
        }
    }
    out.sort_unstable();
    out
}

fn rank_mod_p(p: u64, mut rows: Vec<Vec<u64>>) -> usize {
    let field = Field::Prime(p);
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = field.residue(rows[rank][c]).inv().unwrap().residue_value().unwrap();
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let f = row[c] * inv % p;
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of `{x : R x = 0}` for an echelon basis `R` (free-variable form).
fn annihilator(p: u64, n: usize, basis: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let pivots = pivot_columns(basis);
    (0..n)
        .filter(|j| !pivots.contains(j))
        .map(|f| {
            let mut x = vec![0u64; n];
            x[f] = 1;
            for (i, &c) in pivots.iter().enumerate() {
                x[c] = (p - basis[i][f]) % p;
            }
            x
        })
        .collect()
}

fn structured_square_zero(p: u64, n: usize) -> Vec<Key> {
    let mut out = Vec::new();
    for r in 0..=n / 2 {
        for basis in subspaces(p, n, r) {
            let ann = annihilator(p, n, &basis);
            for coeffs in assignments(p, r * ann.len()) {
                let c: Vec<Vec<u64>> = coeffs.chunks(ann.len().max(1)).take(r).map(|x| x.to_vec()).collect();
                if rank_mod_p(p, c.clone()) != r {
                    continue;
                }
                let vt: Vec<Vec<u64>> = c
                    .iter()
                    .map(|row| {
                        (0..n)
                            .map(|j| row.iter().zip(&ann).map(|(&a, v)| a * v[j] % p).sum::<u64>() % p)
                            .collect()
                    })
                    .collect();
                out.push(outer(p, n, &basis, &vt));
            }
        }
    }
    out.sort_unstable();
    out
}

fn idempotent_keys(field: Field, n: usize, budget: u64) -> Result<Vec<Key>, OracleError> {
    let p = modulus(field)?;
    let total = matrix_count(p, n);
    if total <= FULL_SCAN_LIMIT {
        guard(total, budget)?;
        Ok(scan(p, n, |k| mul_keys(p, n, k, k) == k))
    } else {
        guard(idempotent_count(p, n), budget)?;
        Ok(structured_idempotents(p, n))
    }
}

fn square_zero_keys(field: Field, n: usize, budget: u64) -> Result<Vec<Key>, OracleError> {
    let p = modulus(field)?;
    let total = matrix_count(p, n);
    if total <= FULL_SCAN_LIMIT {
        guard(total, budget)?;
        Ok(scan(p, n, |k| mul_keys(p, n, k, k).iter().all(|&x| x == 0)))
    } else {
        guard(square_zero_count(p, n), budget)?;
        Ok(structured_square_zero(p, n))
    }
}

/// All idempotent `n x n` matrices over `GF(p)`, in key order.
pub fn enumerate_idempotents(field: Field, n: usize, budget: u64) -> Result<Vec<Matrix>, OracleError> {
    Ok(idempotent_keys(field, n, budget)?.iter().map(|k| matrix_of(field, n, k)).collect())
}

/// All square-zero `n x n` matrices over `GF(p)`, in key order.
pub fn enumerate_square_zero(field: Field, n: usize, budget: u64) -> Result<Vec<Matrix>, OracleError> {
    Ok(square_zero_keys(field, n, budget)?.iter().map(|k| matrix_of(field, n, k)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtlasVariant {
    /// `P + Q` with `P^2 = P`, `Q^2 = 0`.
    IdempotentSquareZero,
    /// `alpha P + beta Q` with `P`, `Q` idempotent.
    IdempotentCombination { alpha: FieldElement, beta: FieldElement },
}

#[derive(Debug, Clone)]
pub struct SumAtlas {
    pub field: Field,
    pub n: usize,
    pub variant: AtlasVariant,
    pub members: HashSet<Key>,
    /// Summands the atlas was built from, in key order.
    pub first: Vec<Key>,
    pub second: Vec<Key>,
}

impl SumAtlas {
    pub fn contains(&self, m: &Matrix) -> bool {
        self.members.contains(&key_of(m))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn scales(&self) -> (u64, u64) {
        match &self.variant {
            AtlasVariant::IdempotentSquareZero => (1, 1),
            AtlasVariant::IdempotentCombination { alpha, beta } => {
                (alpha.residue_value().unwrap(), beta.residue_value().unwrap())
            }
        }
    }

    /// Summands `(x P, y Q)` adding up to `m`, taking the first `P` in key
    /// order whose partner `Q` is in the second summand set.
    pub fn witness(&self, m: &Matrix) -> Option<(Matrix, Matrix)> {
        let p = self.field.order()?;
        let (x, y) = self.scales();
        let y_inv = self.field.residue(y).inv().ok()?.residue_value()?;
        let target = key_of(m);
        let second: HashSet<&Key> = self.second.iter().collect();
        self.first.iter().find_map(|e| {
            // Q = (M - x P) / y
            let q = combine_keys(p, y_inv, &target, (p - x % p) * y_inv % p, e);
            second.contains(&q).then(|| {
                let xp: Key = e.iter().map(|&v| v * x % p).collect();
                let yq: Key = q.iter().map(|&v| v * y % p).collect();
                (matrix_of(self.field, self.n, &xp), matrix_of(self.field, self.n, &yq))
            })
        })
    }
}

/// The set of all sums of the requested shape.
pub fn build_sum_atlas(field: Field, n: usize, variant: AtlasVariant, budget: u64) -> Result<SumAtlas, OracleError> {
    let p = modulus(field)?;
    let first = idempotent_keys(field, n, budget)?;
    let second = match &variant {
        AtlasVariant::IdempotentSquareZero => square_zero_keys(field, n, budget)?,
        AtlasVariant::IdempotentCombination { alpha, beta } => {
            if alpha.is_zero() || beta.is_zero() {
                return Err(OracleError::ZeroScale(alpha.to_string(), beta.to_string()));
            }
            first.clone()
        }
    };
    guard((first.len() as u128) * (second.len() as u128), budget)?;
    let atlas = SumAtlas {
        field,
        n,
        variant,
        members: HashSet::new(),
        first,
        second,
    };
    let (x, y) = atlas.scales();
    let members = atlas
        .first
        .par_iter()
        .flat_map_iter(|e| atlas.second.iter().map(move |q| combine_keys(p, x, e, y, q)))
        .collect();
    Ok(SumAtlas { members, ..atlas })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub matrix: Matrix,
    pub decide: bool,
    pub atlas: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub field: Field,
    pub n: usize,
    pub matrices: u64,
    pub idempotents: usize,
    pub square_zero: usize,
    pub atlas_members: usize,
    pub decide_yes: u64,
    pub mismatches: Vec<Mismatch>,
}

/// Run `decide` on every `n x n` matrix and compare with atlas membership.
pub fn exhaustive_compare(field: Field, n: usize, budget: u64) -> Result<ComparisonReport, OracleError> {
    let atlas = build_sum_atlas(field, n, AtlasVariant::IdempotentSquareZero, budget)?;
    compare_with_atlas(&atlas, budget)
}

pub fn compare_with_atlas(atlas: &SumAtlas, budget: u64) -> Result<ComparisonReport, OracleError> {
    let field = atlas.field;
    let n = atlas.n;
    let p = modulus(field)?;
    let total = matrix_count(p, n);
    guard(total, budget)?;
    let total = total as u64;
    let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();
    let parts: Vec<(u64, Vec<Mismatch>)> = chunks
        .par_iter()
        .map(|&c| {
            let mut yes = 0u64;
            let mut bad = Vec::new();
            for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let key = key_from_index(p, n, i);
                let m = matrix_of(field, n, &key);
                let d = decide(&m).yes;
                let a = atlas.members.contains(&key);
                yes += u64::from(d);
                if d != a {
                    bad.push(Mismatch {
                        matrix: m,
                        decide: d,
                        atlas: a,
                    });
                }
            }
            (yes, bad)
        })
        .collect();
    let mut report = ComparisonReport {
        field,
        n,
        matrices: total,
        idempotents: atlas.first.len(),
        square_zero: atlas.second.len(),
        atlas_members: atlas.len(),
        decide_yes: 0,
        mismatches: Vec::new(),
    };
    for (yes, bad) in parts {
        report.decide_yes += yes;
        report.mismatches.extend(bad);
    }
    Ok(report)
}

/// One JSON line per `n x n` matrix, in index order, with its membership flag.
pub fn export_atlas_jsonl<W: Write>(atlas: &SumAtlas, out: &mut W, budget: u64) -> anyhow::Result<()> {
    let p = modulus(atlas.field)?;
    let total = matrix_count(p, atlas.n);
    guard(total, budget)?;
    for i in 0..total as u64 {
        let key = key_from_index(p, atlas.n, i);
        let line = serde_json::json!({
            "matrix": crate::wire::matrix_to_json(&matrix_of(atlas.field, atlas.n, &key)),
            "member": atlas.members.contains(&key),
        });
        writeln!(out, "{line}")?;
    }
    Ok(())
}
