//! L-operators, YBE tensors, transfer matrices, spin-1 Hamiltonians and their spectra.
//!
//! Tensor products are row-major with the first factor slowest. In the YBE the legs are
//! `(1, 2, 3)` with leg 3 the quantum space; in the L-operator the auxiliary space comes
//! first. The local basis is `{+, 0, −}`.

mod basis;
mod eigen;
mod hamiltonian;
mod lattice;
mod linear;

pub use basis::{trinomial, Budget, SectorBasis, SpinMatrices};
pub use eigen::{dense_eigenvalues, eigenspectrum, eigenspectrum_with, krylov_schur, KrylovOptions, Method, Spectrum};
pub use hamiltonian::{
    chain_operator, chain_sector, chemical_potential_residual, coupling_table, hamiltonian_from_couplings,
    hamiltonian_from_log_derivative, total_sz, two_site_from_couplings, two_site_from_log_derivative,
    two_site_from_log_derivative_step, Couplings, ProjectionFit, DERIVATIVE_STEP,
};
pub use lattice::{
    embed_three, l_operator, l_operator_pattern, r_matrix, transfer_matrix, transfer_matrix_weights, transfer_sector,
    ybe_residual, ybe_residual_matrix, ybe_residual_weights, Representation,
};
pub use linear::{kron, max_abs, max_diff, LinearOperator, Storage};
