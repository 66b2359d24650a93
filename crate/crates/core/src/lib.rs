//! Exact verification of duality statements for Koszul complexes, local
//! cohomology and Tate's D-functor over Iwasawa algebras of tori.

pub mod chainkit;
pub mod cli;
pub mod error;
pub mod exactlin;
pub mod finmod;
pub mod gradedpoly;
pub mod koszul;
pub mod tate;
pub mod theorems;
pub mod tinyring;

pub use error::{Error, Result};
