//! Compiles the guide's code snippets as doc-tests so the book can never
//! drift from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/textgrids.md")]
mod textgrids {}
#[doc = include_str!("../../../book/src/labels.md")]
mod labels {}
#[doc = include_str!("../../../book/src/segmentation.md")]
mod segmentation {}
#[doc = include_str!("../../../book/src/linting.md")]
mod linting {}
#[doc = include_str!("../../../book/src/agreement.md")]
mod agreement {}
#[doc = include_str!("../../../book/src/statistics.md")]
mod statistics {}
#[doc = include_str!("../../../book/src/dynamics.md")]
mod dynamics {}
#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
