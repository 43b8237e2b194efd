//! Order-α cosine, sine and Riemann–Liouville families of the Dirichlet
//! Laplacian, the fractional calculus they rest on, and a mild-solution
//! solver for semilinear evolution equations with memory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod families;
pub mod fracalc;
pub mod quad;
pub mod solver;
pub mod specfun;
pub mod spectral;
