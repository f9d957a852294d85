//! Topological invariants of representation spaces Hom(Γ, G) and character
//! varieties, computed from symbolic presentations and reductive group
//! descriptors, plus numerical verification on explicit unitary matrix
//! representations.

pub mod liegroup;
pub mod theorems;
pub mod matrixrep;
pub mod presentation;
pub mod zmodule;
