//! Explicit lattice families: `J_Γ`, the one-vector family built from
//! `B`/`D` factors and `A_{2n−1}` factors, and the `A`-type family `L_ν`
//! with its comparison lattice `Λ_n(d)`.

mod lnu;
mod section2;

use std::sync::Arc;

use num_traits::One;

use crate::glattice::{FinGroup, GLattice};
use crate::intmat::{Int, IntMatrix};

pub use lnu::{
    elementary_abelian_subgroup, l_nu, lambda_and_n, verify_lemma_3_6, w_nu, LambdaReport, LnuSpec,
    QuotientReport,
};
pub use section2::{
    analyze_section2, klein_embedding, partition, section2_lattice, BdFactor, KleinEmbedding,
    Partition3, Section2Lattice, Section2Report, Section2Spec,
};

/// `J_Γ = Z[Γ]/Z·N` (`N` the norm element) in the basis of the images of
/// the non-identity elements, ordered by group index.
pub fn j_gamma(group: Arc<FinGroup>) -> GLattice {
    let n = group.order();
    let r = n - 1;
    let images = group
        .generators()
        .iter()
        .map(|&g| {
            let mut m = IntMatrix::zeros(r, r);
            for h in 1..n {
                let hg = group.mul(h, g);
                if hg == 0 {
                    for c in 0..r {
                        m.set(h - 1, c, -Int::one());
                    }
                } else {
                    m.set(h - 1, hg - 1, Int::one());
                }
            }
            m
        })
        .collect();
    GLattice::from_generator_images_unchecked(group, images).expect("J_Γ action is unimodular")
}
