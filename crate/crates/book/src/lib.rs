//! The guide's chapters, compiled so that every code listing in `book/`
//! runs as a doc-test.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/states.md")]
pub mod states {}

#[doc = include_str!("../../../book/src/bipartite.md")]
pub mod bipartite {}

#[doc = include_str!("../../../book/src/classification.md")]
pub mod classification {}

#[doc = include_str!("../../../book/src/schmidt-number.md")]
pub mod schmidt_number {}

#[doc = include_str!("../../../book/src/mixed-states.md")]
pub mod mixed_states {}

#[doc = include_str!("../../../book/src/coefficients.md")]
pub mod coefficients {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
