//! The guide in `book/` compiled as doc-tests, one module per chapter, so
//! every listing there is checked by `cargo test`.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}
#[doc = include_str!("../../../book/src/asymptotics.md")]
pub mod asymptotics {}
#[doc = include_str!("../../../book/src/integral-formula.md")]
pub mod integral_formula {}
#[doc = include_str!("../../../book/src/integral-equation.md")]
pub mod integral_equation {}
#[doc = include_str!("../../../book/src/psor.md")]
pub mod psor {}
#[doc = include_str!("../../../book/src/pricing.md")]
pub mod pricing {}
#[doc = include_str!("../../../book/src/reproducing.md")]
pub mod reproducing {}
