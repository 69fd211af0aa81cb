//! Doc-tests for the guide. Each chapter in `book/src` is included here so
//! its code blocks run under `cargo test`.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/graphs.md")]
mod graphs {}
#[doc = include_str!("../../../book/src/simulation.md")]
mod simulation {}
#[doc = include_str!("../../../book/src/sampling.md")]
mod sampling {}
#[doc = include_str!("../../../book/src/recovery.md")]
mod recovery {}
#[doc = include_str!("../../../book/src/postprocess.md")]
mod postprocess {}
#[doc = include_str!("../../../book/src/metrics.md")]
mod metrics {}
#[doc = include_str!("../../../book/src/experiments.md")]
mod experiments {}
#[doc = include_str!("../../../README.md")]
mod readme {}
