//! The user guide under `book/`, compiled so that every Rust snippet in it
//! runs as a doc-test against the current library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}

#[doc = include_str!("../../../book/src/entropy.md")]
pub mod entropy {}

#[doc = include_str!("../../../book/src/fitting.md")]
pub mod fitting {}

#[doc = include_str!("../../../book/src/benchmark.md")]
pub mod benchmark {}

#[doc = include_str!("../../../book/src/data.md")]
pub mod data {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
