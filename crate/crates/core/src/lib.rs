//! Differentiable statevector simulation for variational quantum eigensolvers,
//! with sigmoid-gated circuit architecture search, pruning, fine-tuning, the
//! usual baselines, and a depolarizing-noise engine.
//!
//! ```
//! use antibp::{ansatz, hamiltonian, sim};
//!
//! let h = hamiltonian::tfim(4, 1.0, 1.0).unwrap();
//! let c = ansatz::random_layered(4, 3, 7).unwrap();
//! let angles = ansatz::init_angles(c.n_slots(), 7);
//! let e = sim::expectation(&sim::run(&c, &angles).unwrap(), &h).unwrap();
//! assert!(e >= h.exact_ground_energy().unwrap() - 1e-9);
//! ```

pub mod ansatz;
pub mod antibp;
mod error;
pub mod experiment;
pub mod gradients;
pub mod hamiltonian;
pub mod noise;
pub mod seeding;
pub mod sim;

pub use error::{Error, Result};
