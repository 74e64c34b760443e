//! Concrete models: polynomial and Weyl algebras, trivial extensions, and
//! the closed-form deformed structure maps.

pub mod closed_form;
pub mod extension;
pub mod poly;
pub mod weyl;
