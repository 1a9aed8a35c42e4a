//! Exact Hall algebras of `Z/t`-graded complexes over quiver representations
//! over small prime fields.

#![no_std]
extern crate alloc;

pub mod coeff;
pub mod error;
pub mod fq;
pub mod rep;
pub mod table;
pub mod complex;
pub mod torus;
pub mod sdh;
pub mod dhall;
pub mod embed;
pub mod report;
pub mod checks;
