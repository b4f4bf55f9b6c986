//! The guide's chapters, included here so `cargo test --doc` compiles
//! and runs every code snippet in the book. Chapter files live in
//! `book/src/` and render with `mdbook build book`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/channels.md")]
pub mod channels {}

#[doc = include_str!("../../../book/src/recovery.md")]
pub mod recovery {}

#[doc = include_str!("../../../book/src/algebra.md")]
pub mod algebra {}

#[doc = include_str!("../../../book/src/chains.md")]
pub mod chains {}

#[doc = include_str!("../../../book/src/codes.md")]
pub mod codes {}

#[doc = include_str!("../../../book/src/errors.md")]
pub mod errors {}

#[doc = include_str!("../../../book/src/gates.md")]
pub mod gates {}

#[doc = include_str!("../../../book/src/scaling.md")]
pub mod scaling {}

#[doc = include_str!("../../../book/src/gatecells.md")]
pub mod gatecells {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
