//! Spectra, resolvent traces, asymptotic expansions and spectral ζ/η
//! functions for the self-adjoint extensions of a first-order operator
//! with a g/x singularity on (0,1).

pub mod dd;
pub mod error;
pub mod special_functions;
pub mod operator_model;
pub mod quadrature;
pub mod resolvent;
pub mod asymptotics;
pub mod spectral_zeta;
pub mod second_order;
pub mod acceptance;
pub mod cli;
