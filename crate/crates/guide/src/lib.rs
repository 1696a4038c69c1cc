//! Keeps the book honest: every chapter of `book/` is included here as
//! rustdoc, so `cargo test --doc -p qaoa-landscape-guide` compiles and runs
//! each of its code snippets. mdbook itself cannot execute snippets against
//! external crates, so this crate is the test harness for the guide. One
//! module per chapter so a failing doc-test names its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/problems.md")]
pub mod problems {}

#[doc = include_str!("../../../book/src/simulator.md")]
pub mod simulator {}

#[doc = include_str!("../../../book/src/optimizer.md")]
pub mod optimizer {}

#[doc = include_str!("../../../book/src/landscape.md")]
pub mod landscape {}

#[doc = include_str!("../../../book/src/strategies.md")]
pub mod strategies {}

#[doc = include_str!("../../../book/src/initgraph.md")]
pub mod initgraph {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
