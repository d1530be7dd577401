#![allow(non_snake_case)]

//! High-precision toolkit for hypergeometric periods, Beilinson regulators and
//! motivic L-values.
//!
//! The library is organised around the affine schemes
//! `(1 - x_0^{n_0}) ... (1 - x_d^{n_d}) = t` whose periods are values of
//! generalized hypergeometric functions.  It provides:
//!
//! * [`numerics`] — configurable-precision real/complex arithmetic and the
//!   special functions (Γ, ψ, Γ(s,x)) everything else consumes,
//! * [`hypergeom`] — pFq series, the regulator function `F`, its connection
//!   formula at `1/t`, and analytic continuation / monodromy via the
//!   hypergeometric ODE,
//! * [`periods`] — torus-cycle quadrature oracles for the period formulas,
//! * [`symbols`] — higher Ross symbols, dlog identities, covering identities
//!   and regulator pairing values,
//! * [`lfunctions`] — point counting, eta-product newforms and completed
//!   L-functions with `L'(·,0)` evaluation,
//! * [`resolver`] — the boundary blow-up rewriting system with its
//!   termination certificate,
//! * [`cli`] — batch verification commands with structured reports.

pub mod cli;
pub mod hypergeom;
pub mod lfunctions;
pub mod linalg;
pub mod numerics;
pub mod periods;
pub mod rational;
pub mod report;
pub mod resolver;
pub mod symbols;

pub use numerics::{Complex, Ctx, Real};
