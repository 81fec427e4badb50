//! Shared state for quotient-dependent computations.

use std::path::PathBuf;

use crate::coeff::Coeff;
use crate::element::Element;
use crate::error::Result;
use crate::ops::ChiInverter;
use crate::quotient::{EqualityCheck, Reducer};
use crate::sl2::Sl2;

/// Owns the block quotients, the solved symmetrization systems and the sl2 memo table.
pub struct Engine {
    reducer: Reducer,
    chi: ChiInverter,
    sl2: Sl2,
}

impl Engine {
    pub fn new(cutoff: usize, cache_dir: Option<PathBuf>) -> Result<Self> {
        Ok(Engine { reducer: Reducer::new(cutoff, cache_dir)?, chi: ChiInverter::new(), sl2: Sl2::new() })
    }

    pub fn reducer(&self) -> &Reducer {
        &self.reducer
    }

    pub fn sl2(&self) -> &Sl2 {
        &self.sl2
    }

    pub fn cutoff(&self) -> usize {
        self.reducer.cutoff()
    }

    /// Inverse symmetrization of an interval (to a star) or a circle (to a circled star).
    pub fn chi_inverse<C: Coeff>(&self, e: &Element<C>, label: &str, max_degree: usize) -> Result<Element<C>> {
        self.chi.invert(&self.reducer, e, label, max_degree)
    }

    pub fn equal_mod_relations<C: Coeff>(&self, a: &Element<C>, b: &Element<C>, max_degree: usize) -> Result<EqualityCheck<C>> {
        self.reducer.equal_mod_relations(a, b, max_degree)
    }
}
