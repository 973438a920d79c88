pub mod cli;
pub mod error;
pub mod fixtures;
pub mod lp;
pub mod market;
pub mod pricing;
pub mod scenario;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-linear-programming.md")]
    mod exact_linear_programming {}
    #[doc = include_str!("../../../book/src/scenarios-and-information.md")]
    mod scenarios_and_information {}
    #[doc = include_str!("../../../book/src/markets.md")]
    mod markets {}
    #[doc = include_str!("../../../book/src/pricing.md")]
    mod pricing {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
