//! Exact arithmetic on the split octonions and the split Albert algebra,
//! the group acting on pairs of Albert elements, its invariants, and the
//! classification and reduction of semistable orbits over Q and F_p.

pub mod field;
pub mod octonion;
pub mod albert;
pub mod group;
pub mod pvs;
pub mod orbits;
pub mod json;
pub mod verify;
