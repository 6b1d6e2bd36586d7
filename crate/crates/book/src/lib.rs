//! The guide's chapters, compiled so their listings run as doc-tests.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}

#[doc = include_str!("../../../book/src/mub.md")]
pub mod mub {}

#[doc = include_str!("../../../book/src/protocol.md")]
pub mod protocol {}

#[doc = include_str!("../../../book/src/security.md")]
pub mod security {}

#[doc = include_str!("../../../book/src/rate.md")]
pub mod rate {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
