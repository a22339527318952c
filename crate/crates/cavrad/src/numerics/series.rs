//! Convergence-controlled summation of eventually-geometric series.

use super::{NumericsError, Result};
use crate::C64;

/// Controls for [`sum_series`].
#[derive(Debug, Clone, Copy)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
    pub min_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            max_terms: 64,
            min_terms: 2,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) {
        assert!(self.rel_tol > 0.0, "rel_tol must be positive");
        assert!(self.min_terms <= self.max_terms);
    }
}

/// Sum `term(0) + term(1) + ...` until the last term is below `rel_tol`
/// relative to the partial sum, after at least `min_terms` terms.
///
/// Three consecutive growths of the term magnitude after the minimum term
/// count signal divergence.
pub fn sum_series<F: FnMut(usize) -> C64>(
    mut term: F,
    control: SeriesControl,
) -> Result<(C64, usize)> {
    control.validate();
    let mut sum = C64::new(0.0, 0.0);
    let mut prev_mag = f64::INFINITY;
    let mut growths = 0usize;
    for n in 0..control.max_terms {
        let t = term(n);
        sum += t;
        let mag = t.norm();
        if n + 1 >= control.min_terms {
            if mag <= control.rel_tol * sum.norm().max(1e-300) {
                return Ok((sum, n + 1));
            }
            if mag > prev_mag {
                growths += 1;
                if growths >= 3 {
                    return Err(NumericsError::SeriesDiverging { terms: n + 1 });
                }
            } else {
                growths = 0;
            }
        }
        prev_mag = mag;
    }
    Err(NumericsError::NonConvergence {
        error: prev_mag,
        tol: control.rel_tol,
        evaluations: control.max_terms,
    })
}
