//! Exact decision and construction of split quadratic matrix sums.
//!
//! A square matrix `M` over the rationals or `GF(p)` is an `(a,b,c,d)`
//! quadratic sum when `M = A + B` with `A^2 = aA + bI` and `B^2 = cB + dI`.
//! When both quadratics split, the question reduces to the idempotent plus
//! square-zero case, which [`quadsum::decide`] settles from invariant factors
//! and nullity sequences, and [`quadsum::construct`] answers with an explicit,
//! exactly verified pair `(A, B)`.

pub mod canonical;
pub mod cli;
pub mod field;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod quadsum;
pub mod wire;
