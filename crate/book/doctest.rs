// mdbook can't resolve crate dependencies in its own test runner, so each
// chapter becomes a doc module here and `cargo test` runs the snippets.

#[doc = include_str!("src/intro.md")]
pub mod intro {}
#[doc = include_str!("src/ambient.md")]
pub mod ambient {}
#[doc = include_str!("src/warps.md")]
pub mod warps {}
#[doc = include_str!("src/profiles.md")]
pub mod profiles {}
#[doc = include_str!("src/surfaces.md")]
pub mod surfaces {}
#[doc = include_str!("src/geodesics.md")]
pub mod geodesics {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
