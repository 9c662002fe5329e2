//! Exact-arithmetic engine for Gopakumar–Vafa invariants of K3 surfaces,
//! multiple cover formulas for rank-zero counting invariants, wall-crossing
//! generating-function identities and twisted Mukai-lattice data.

pub mod invariants;
pub mod mukai;
pub mod qseries;
pub mod rational;
pub mod report;
pub mod stability;
pub mod verify;
pub mod wallcross;

pub use rational::Rational;
