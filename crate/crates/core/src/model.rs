//! The structural constants every check is built from, with single-point
//! mutations for sensitivity testing.

use crate::ncalg::{specs, AlgebraSpec};
use crate::qcoeff::LaurentScalar;
use crate::spinor::EpsilonTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Negates the `b c` coefficient of the `d a` reordering rule.
    FlipDaRule,
    /// Negates one entry of the covariant epsilon tensor.
    FlipEpsilon { row: usize, col: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub da_coeff: LaurentScalar,
    pub eps: EpsilonTensor,
    pub eps_hat: EpsilonTensor,
}

impl Default for Model {
    fn default() -> Self {
        Model::standard()
    }
}

impl Model {
    pub fn standard() -> Self {
        Model {
            da_coeff: specs::da_coefficient(),
            eps: EpsilonTensor::covariant(),
            eps_hat: EpsilonTensor::contravariant(),
        }
    }

    pub fn mutated(m: Mutation) -> Self {
        let mut model = Model::standard();
        match m {
            Mutation::FlipDaRule => model.da_coeff = -&model.da_coeff,
            Mutation::FlipEpsilon { row, col } => {
                model.eps = model.eps.with_negated_entry(row, col);
            }
        }
        model
    }

    pub fn sl(&self) -> AlgebraSpec {
        specs::slq2_with_da(self.da_coeff.clone())
    }

    pub fn sl_with_conjugate(&self) -> AlgebraSpec {
        specs::slq2_with_conjugate_da(self.da_coeff.clone())
    }

    pub fn spinor(&self, plane: bool) -> AlgebraSpec {
        specs::spinor_with(self.da_coeff.clone(), plane)
    }
}
