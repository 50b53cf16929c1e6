pub mod closed_forms;
pub mod error;
pub mod geometry;
pub mod integrator;
pub mod jet;
pub mod output;
pub mod quad;
pub mod roots;
pub mod series;
pub mod shooting;
pub mod state;
pub mod tolerances;

pub use error::{Error, Result};
pub use state::{constraints, rhs, State};

/// Book chapters, compiled as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/state.md")]
    pub mod state {}
    #[doc = include_str!("../../../book/src/closed_forms.md")]
    pub mod closed_forms {}
    #[doc = include_str!("../../../book/src/series.md")]
    pub mod series {}
    #[doc = include_str!("../../../book/src/integrator.md")]
    pub mod integrator {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    pub mod geometry {}
    #[doc = include_str!("../../../book/src/shooting.md")]
    pub mod shooting {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
    #[doc = include_str!("../../../book/src/results.md")]
    pub mod results {}
}
