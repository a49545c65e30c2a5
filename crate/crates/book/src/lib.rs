//! The guide in `book/`, compiled so every Rust snippet runs as a doc-test.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/normal-and-hermite.md")]
pub mod normal_and_hermite {}

#[doc = include_str!("../../../book/src/cumulants.md")]
pub mod cumulants {}

#[doc = include_str!("../../../book/src/edgeworth.md")]
pub mod edgeworth {}

#[doc = include_str!("../../../book/src/roy-criterion.md")]
pub mod roy_criterion {}

#[doc = include_str!("../../../book/src/counterexample.md")]
pub mod counterexample {}

#[doc = include_str!("../../../book/src/monte-carlo.md")]
pub mod monte_carlo {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
