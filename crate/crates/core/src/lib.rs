//! Exact computations with the generic Iwahori–Hecke module of a p-adic
//! symmetric space.
//!
//! The crate models the affine Weyl group of type Ã, the generic
//! Iwahori–Hecke algebra `H_t`, the orbit hypergraph `Γ_X` and the module
//! `M_t(Γ_X)` it carries, together with constructors for `SL₂/T` and
//! `SL₂ₙ/Sp₂ₙ` and a finite-field oracle for the rank-one structure
//! constants.

pub mod coxeter;
pub mod hecke;
pub mod hecke_module;
pub mod orbit_graph;
pub mod rank1_oracle;
pub mod ring;
pub mod spaces;

pub use coxeter::{AffinePermutation, CoxeterData, CoxeterError, Side};
pub use hecke::{HeckeElement, HeckeError};
pub use hecke_module::{ModuleError, ModuleVector};
pub use orbit_graph::{GraphError, OrbitGraph, TransitionKind, VertexId};
pub use rank1_oracle::{OracleError, PrimeField, SubgroupRow};
pub use ring::{LaurentPoly, Rational, RingError};
pub use spaces::{MonomialMatrix, QMode, SpaceKind, SpacesError, SymSpaceDescriptor};
