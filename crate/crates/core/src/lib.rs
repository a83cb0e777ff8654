//! Exact computations in the modular representation theory of GL2 over small
//! finite fields: canonical finite-field towers, cyclotomic arithmetic,
//! conjugacy classes, matrix representations, a MeatAxe, ordinary and Brauer
//! character tables with decomposition matrices, Weyl character checks, and
//! supernatural pro-orders.
//!
//! Everything on a verification path is exact; floating point appears only in
//! the display-only complex approximation helper.

pub mod cyclo;
pub mod ff;
pub mod linalg;
pub mod gl2;
pub mod repmod;
pub mod meataxe;
pub mod chars;
pub mod weyl;
pub mod proorder;

pub(crate) mod memo;
