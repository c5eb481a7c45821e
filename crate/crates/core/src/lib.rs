//! Exact cohomology computations for graded Lie algebras and their enveloping
//! algebras.

pub mod algebra;
pub mod classes;
pub mod cohomology;
pub mod complexes;
pub mod enveloping;
pub mod linalg;
pub mod rational;
pub mod spectral;
pub mod cache;
pub mod job;
pub mod report;
pub mod runner;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub mod intro {}
    #[doc = include_str!("../../../book/src/algebras.md")]
    pub mod algebras {}
    #[doc = include_str!("../../../book/src/enveloping.md")]
    pub mod enveloping {}
    #[doc = include_str!("../../../book/src/linalg.md")]
    pub mod linalg {}
    #[doc = include_str!("../../../book/src/complexes.md")]
    pub mod complexes {}
    #[doc = include_str!("../../../book/src/cohomology.md")]
    pub mod cohomology {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    pub mod spectral {}
    #[doc = include_str!("../../../book/src/classes.md")]
    pub mod classes {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
