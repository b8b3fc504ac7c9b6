//! Compiles the code blocks of the guide in `book/` as doctests, since
//! mdbook cannot run examples that depend on a local crate. One module per
//! chapter so a failure points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/signals.md")]
pub mod signals {}
#[doc = include_str!("../../../book/src/barcodes.md")]
pub mod barcodes {}
#[doc = include_str!("../../../book/src/entropy.md")]
pub mod entropy {}
#[doc = include_str!("../../../book/src/stability.md")]
pub mod stability {}
#[doc = include_str!("../../../book/src/classification.md")]
pub mod classification {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
