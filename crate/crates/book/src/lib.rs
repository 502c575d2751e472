//! Compiles every Rust listing of the guide in `book/src` and of the README as a doc-test.
//! Each chapter is a module so a failing listing is easy to locate.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}
#[doc = include_str!("../../../book/src/pullin.md")]
pub mod pullin {}
#[doc = include_str!("../../../book/src/regimes.md")]
pub mod regimes {}
#[doc = include_str!("../../../book/src/time_scales.md")]
pub mod time_scales {}
#[doc = include_str!("../../../book/src/dynamics.md")]
pub mod dynamics {}
#[doc = include_str!("../../../book/src/critical.md")]
pub mod critical {}
#[doc = include_str!("../../../book/src/generic.md")]
pub mod generic {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}
