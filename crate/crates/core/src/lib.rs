//! Polarizable-embedding electrostatics coupled self-consistently to an
//! adaptive-ansatz VQE active-space solver, with electric-field-gradient and
//! nuclear-quadrupole-interaction property extraction.
//!
//! The numeric kernels are generic over the floating scalar (see [`Scalar`]);
//! concrete `f64` aliases for the common types live at the crate root.

pub mod adapt;
pub mod constants;
pub mod efg;
pub mod fci;
pub mod fcidump;
pub mod fixtures;
pub mod hamiltonian;
pub mod jordan_wigner;
pub mod lattice;
pub mod multipole;
pub mod opt;
pub mod pauli;
pub mod pe;
pub mod pool;
pub mod problem;
pub mod report;
pub mod scalar;
pub mod scf;
pub mod siteints;
pub mod statevector;

pub use scalar::Scalar;

/// 3-vector of lengths/fields in atomic units.
pub type Vec3<F> = nalgebra::Vector3<F>;
/// Dense symmetric 3x3 (polarizabilities, quadrupoles, field gradients).
pub type Mat3<F> = nalgebra::Matrix3<F>;

// Concrete f64 aliases for the main domain types.
pub type Vec3f = Vec3<f64>;
pub type Mat3f = Mat3<f64>;
pub type CartesianTensorF = multipole::CartesianTensor<f64>;
pub type EnvironmentModelF = pe::EnvironmentModel<f64>;
pub type EfgTensorF = efg::EfgTensor<f64>;
pub type QubitHamiltonianF = pauli::QubitHamiltonian<f64>;
pub type StateVectorF = statevector::StateVector<f64>;
pub type ActiveSpaceProblemF = problem::ActiveSpaceProblem<f64>;
pub type FullProblemF = problem::FullProblem<f64>;
pub type AdaptAnsatzF = adapt::AdaptAnsatz<f64>;
pub type ScfStateF = scf::ScfState<f64>;  // placeholder-guard
