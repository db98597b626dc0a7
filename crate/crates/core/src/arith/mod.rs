//! Exact integer arithmetic: divisor sieves, quadratic symbols, discriminants,
//! square predicates and prime streams.

pub mod discriminant;
pub mod divisor;
pub mod kronecker;
pub mod primes;
pub mod squares;

pub use discriminant::{
    enumerate_fundamental_discriminants, is_fundamental_discriminant, FundamentalDiscriminant,
};
pub use divisor::DivisorTable;
pub use kronecker::kronecker;
pub use primes::{PrimeStream, SpfTable};
pub use squares::{is_perfect_square, local_factor_prod, squarefree_kernel};
