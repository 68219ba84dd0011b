//! Numeric foundations: scalars, special functions, q-arithmetic.

pub mod bernoulli;
pub mod big;
pub mod branch;
pub mod polylog;
pub mod qlaurent;
pub mod qseries;
pub mod quad;
pub mod theta;
pub mod scalar;

pub use big::BigC;
pub use branch::{branch_d, branch_d_prime, branch_l, branch_l_prime, BranchDomain};
pub use scalar::{digits_to_bits, e2pi, two_pi_i, Scalar};
