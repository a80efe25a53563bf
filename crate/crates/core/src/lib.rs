//! Decides whether a rational function on a genus-0 real curve is equivalent
//! (by post-composition with a Möbius transformation) to a real or pseudoreal
//! function, and certifies the answer.
//!
//! Two independent routes are implemented and cross-checked on every run:
//! a divisor-stability criterion on the preimage of the critical values, and
//! a constructive chain that transports the function across the curve's
//! antiholomorphic involution, factors the result in the Möbius group, and
//! solves a descent equation for the certifying transformation. A separate
//! module mirrors the covering-space side combinatorially with permutation
//! constellations.
//!
//! Everything runs in one of two coefficient modes: exact Gaussian rationals
//! or complex doubles under a configurable tolerance.

pub mod divisor;
pub mod error;
pub mod form;
pub mod generator;
pub mod mobius;
pub mod monodromy;
pub mod ratmap;
pub mod reality;
pub mod roots;
pub mod scalar;
pub mod sphere;

pub use divisor::{
    critical_values, is_tau_stable, match_divisors, preimage_divisor, sigma_divisor,
    sigma_divisor_with, sigma_form_exact, Divisor, SigmaConvention, StabilityWitness,
};
pub use error::{Error, Result};
pub use form::{gcd_forms, resultant, squarefree_decomposition, BinaryForm};
pub use generator::{perturb_map, random_complex_map, scramble_instance, GroundTruth, SeedClass};
pub use mobius::Mobius;
pub use monodromy::{BlockSystem, Constellation, Passport, Perm};
pub use ratmap::{map_equality_residual, maps_equal_up_to_scale, RationalMap};
pub use reality::{
    conj_transport, descent_solve, divisor_criterion, mobius_factor, reality_test, verify_verdict,
    DescentClass, Verdict,
};
pub use roots::{roots_with_multiplicities, RootEntry, RootList};
pub use scalar::{GaussianRational, Mode, Scalar, Tolerance};
pub use sphere::{Involution, SpherePoint};
