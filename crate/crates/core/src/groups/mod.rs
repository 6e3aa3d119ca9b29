//! Finite and finitely generated groups, integer-vector modules, and actions.

pub mod action;
pub mod group;
pub mod intvec;
pub mod perm;

pub use action::{
    Action, AdjointAction, GElem, PermAction, ScaledProjAction, Semidirect, SemidirectElem,
    SignAction, TrivialAction, ZCharAction,
};
pub use group::{
    check_group_axioms, closure, element_order, fingerprint, Closure, Group, GroupFingerprint,
    IntGroup, Symmetric,
};
pub use intvec::{AbSignature, IntVec};
pub use perm::{all_perms, Perm};
