// SPDX-License-Identifier: Apache-2.0

//! Cut-free sequent systems for *-continuous action lattices.
//!
//! Two calculi are implemented over the same rule engine: a wellfounded
//! system whose star-left rule has one premise per natural number, and a
//! non-wellfounded system whose proofs are finite graphs subject to a global
//! progress condition. The crate translates between the two, searches for
//! cyclic proofs, and audits everything against finite action lattices and
//! residuated frames.

pub mod acceptance;
pub mod corpus;
pub mod frames;
pub mod io;
pub mod models;
pub mod progress;
pub mod proof;
pub mod rules;
pub mod search;
pub mod syntax;
pub mod translate;

pub use syntax::{Formula, OccurrencePos, Sequent};
