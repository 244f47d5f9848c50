//! Exact-arithmetic toolkit for modular Lie theory in small characteristic.
//!
//! The crate builds Chevalley bases of the simple Lie algebras over Z,
//! reduces them mod p, and computes with the resulting restricted Lie
//! algebras: centralisers of p-characters, divisibility bounds for modules
//! of reduced enveloping algebras, Weyl dot-orbit counts on X(T)/pX(T), and
//! explicit baby Verma modules with MeatAxe irreducibility testing at desk
//! scale (rank <= 2).

pub mod chevalley;
pub mod cli;
pub mod divisibility;
pub mod fp;
pub mod linform;
pub mod meataxe;
pub mod rootsystem;
pub mod scenario;
pub mod verma;
pub mod weights;
