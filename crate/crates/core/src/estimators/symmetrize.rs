use rand::seq::SliceRandom;

use super::{Estimator, EstimatorOutput};
use crate::error::Result;
use crate::graph::{Graph, LabelAssignment};
use crate::rng::SeedRng;

/// Runs `base` on a uniformly relabeled copy of `g` and maps the labels back.
pub struct Symmetrized<E> {
    pub base: E,
}

impl<E: Estimator> Estimator for Symmetrized<E> {
    fn estimate(&self, g: &Graph, rng: &mut SeedRng) -> Result<EstimatorOutput> {
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(rng);
        // Node i of the permuted graph is node perm[i] of g.
        let gp = g.permuted(&perm);
        let mut out = self.base.estimate(&gp, rng)?;
        let mut labels = vec![0; g.n()];
        for (i, &p) in perm.iter().enumerate() {
            labels[p] = out.labels.labels()[i];
        }
        out.labels = LabelAssignment::new(labels, out.labels.k())?;
        Ok(out)
    }
}

pub fn symmetrize<E: Estimator>(base: E) -> Symmetrized<E> {
    Symmetrized { base }
}
