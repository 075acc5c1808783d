//! Phase-space quantum mechanics: exact Moyal calculus, Grassmann dequantisation,
//! a discrete Weyl transform and Wigner/Liouville propagation.

// `!(x > 0.0)` is used deliberately so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod grassmann;
pub mod moyal;
pub mod oracle;
pub mod parse;
pub mod poly;
pub mod random;
pub mod rational;
pub mod run;
pub mod spectral;
pub mod symplectic;
pub mod wigner;

pub use error::{Error, Result};
pub use grassmann::{berezin_integrate, g_mul, grassmann_shift_eval, GrassmannElement};
pub use moyal::{
    bidifferential_power, classical_extended_hamiltonian, dequantise, dequantise_with, hbar2_correction,
    lambda_to_operator, liouville_rhs, marinov_hamiltonian, moyal_bracket, poisson_bracket, quantum_liouville_rhs,
    star_product, DequantReport, ExtendedHamiltonian, ExtendedKind, Mutation, Verdict,
};
pub use parse::parse_poly;
pub use poly::{PolySymbol, VariableId};
pub use rational::{ComplexRational, Rational};
pub use symplectic::{hamiltonian_flow_rhs, SymplecticForm};
