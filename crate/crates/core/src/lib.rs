//! Exact computations with Jacobi diagrams and their quotient spaces, Lie algebra
//! weight systems, rational associators, the tangle invariant of quasi-Hopf
//! diagram algebras, and the diagrammatic Etingof-Kazhdan twist.

pub mod diagram;
pub mod ek;
pub mod horizontal;
pub mod lie;
pub mod linalg;
pub mod maps;
pub mod ops;
pub mod spaces;
pub mod sum;
pub mod tangle;
pub mod verify;
