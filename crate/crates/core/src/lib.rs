//! Low-depth, CNOT-reduced circuit synthesis for the QAOA Max-Cut ansatz.
//!
//! The first cost layer of a QAOA Max-Cut circuit can drop one CNOT per
//! spanning-tree edge (n - 1 in total) provided the tree edges are applied
//! top-down from a root with the parent as control. The price is a forced
//! ordering that can blow up circuit depth. This crate builds rooted spanning
//! trees that trade height against branching ([`tree::build_greedy_tree`]),
//! schedules graph edges into parallel steps ([`schedule`]), emits gate-level
//! circuits ([`circuit`]), simulates them with and without depolarizing noise
//! ([`sim`]), and ships an exact solver for tiny instances ([`oracle`]) plus a
//! CSV-producing experiment driver ([`bench`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root pin the `f64` instantiation used by the CLI and benchmarks.

pub mod bench;
pub mod circuit;
pub mod graph;
pub mod oracle;
pub mod scalar;
pub mod schedule;
pub mod sim;
pub mod tree;

pub use graph::{Edge, Graph, GraphError};
pub use scalar::Scalar;
pub use schedule::{StepSchedule, Strategy, Violation};
pub use tree::{HeuristicConfig, RootedSpanningTree, TreeEdge, TreeError};

/// Gate-level circuit with `f64` angles.
pub type Circuit = circuit::CircuitIR<f64>;
/// Single-precision circuit.
pub type Circuit32 = circuit::CircuitIR<f32>;
/// QAOA angles in `f64`.
pub type Params = circuit::AnsatzParams<f64>;
/// Statevector in `f64`.
pub type State = sim::StateVector<f64>;
/// Single-precision statevector.
pub type State32 = sim::StateVector<f32>;
/// Density matrix in `f64`.
pub type Density = sim::DensityMatrix<f64>;
/// Depolarizing noise configuration in `f64`.
pub type Noise = sim::NoiseParams<f64>;
/// Noisy-simulation outcome in `f64`.
pub type Outcome = sim::SimResult<f64>;
