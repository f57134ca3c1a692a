pub mod front;
pub mod kirby;
#[cfg(test)]
mod kirby_tests;
pub mod linalg;
pub mod rewrite;
pub mod surgery;
pub mod verify;

pub type Int = num_bigint::BigInt;
pub type Rat = num_rational::Ratio<Int>;

pub use front::{ClassicalInvariants, ComponentRef, ComponentStructure, DiagramKind, Event, FrontDiagram, FrontError, Handle, Orientation, Site};
pub use kirby::{MoveError, MoveKind, SlideOrientation};
pub use surgery::{ComponentRole, D3Report, HomologyReport, Rational, SurgeryDiagram, SurgeryError};
pub use verify::{check_move, ledger, InvariantLedger, VerificationReport};
