//! Lambdafiability: pure magnets cut out of Φ by a half-plane `f ≥ 0`.

use std::fmt;

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atlas::WeightAtlas;
use crate::attractor::{attractor, AttractorDescription};
use crate::error::{check_rank, Result};
use crate::lattice::{
    rational_halfspace_feasible, FunctionalConstraintSystem, LatticeVector, Relation,
};
use crate::magnet::{weight_set, StableSet, WeightSet};

/// A functional `f: Zⁿ → Z`, identified with its coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearFunctional {
    pub coefficients: LatticeVector,
}

impl LinearFunctional {
    pub fn new(coefficients: LatticeVector) -> Self {
        LinearFunctional { coefficients }
    }

    pub fn rank(&self) -> usize {
        self.coefficients.rank()
    }

    pub fn eval(&self, v: &LatticeVector) -> num_bigint::BigInt {
        self.coefficients.dot(v)
    }
}

impl From<[i64; 2]> for LinearFunctional {
    fn from(v: [i64; 2]) -> Self {
        LinearFunctional::new(v.into())
    }
}

impl fmt::Display for LinearFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficients)
    }
}

impl fmt::Debug for LinearFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficients)
    }
}

/// `{ φ ∈ Φ : f(φ) ≥ 0 }`, always additively stable.
pub fn halfspace_set(f: &LinearFunctional, phi: &WeightSet) -> Result<StableSet> {
    check_rank(phi.rank(), f.rank())?;
    Ok(StableSet::trusted(
        phi.weights()
            .iter()
            .filter(|w| !f.eval(w).is_negative())
            .cloned(),
    ))
}

/// A functional with `{ φ : f(φ) ≥ 0 } = E`, if one exists.
pub fn is_lambdafiable(e: &StableSet, phi: &WeightSet) -> Result<Option<LinearFunctional>> {
    let mut system = FunctionalConstraintSystem::new(phi.rank());
    for w in phi.weights() {
        let relation = if e.contains(w) {
            Relation::Nonneg
        } else {
            Relation::AtMostMinusOne
        };
        system.push(w.clone(), relation)?;
    }
    Ok(rational_halfspace_feasible(&system).map(LinearFunctional::new))
}

pub fn verify_lambda_witness(f: &LinearFunctional, e: &StableSet, phi: &WeightSet) -> bool {
    halfspace_set(f, phi).is_ok_and(|h| &h == e)
}

/// The attractor of `f⁻¹(ℕ)`, i.e. of its purification `{ φ : f(φ) ≥ 0 }`.
pub fn cocharacter_attractor(
    f: &LinearFunctional,
    atlas: &WeightAtlas,
) -> Result<AttractorDescription> {
    let e = halfspace_set(f, &weight_set(atlas))?;
    Ok(attractor(&e, atlas))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaEntry {
    pub magnet: StableSet,
    pub witness: Option<LinearFunctional>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaReport {
    pub entries: Vec<LambdaEntry>,
    pub lambdafiable_count: usize,
    pub non_lambdafiable_count: usize,
}

pub fn lambdafiability_report(pure: &[StableSet], phi: &WeightSet) -> Result<LambdaReport> {
    let entries: Vec<LambdaEntry> = pure
        .par_iter()
        .map(|e| {
            Ok(LambdaEntry {
                magnet: e.clone(),
                witness: is_lambdafiable(e, phi)?,
            })
        })
        .collect::<Result<_>>()?;
    let lambdafiable_count = entries.iter().filter(|x| x.witness.is_some()).count();
    Ok(LambdaReport {
        non_lambdafiable_count: entries.len() - lambdafiable_count,
        lambdafiable_count,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::builtin_p2_double_scalar;

    fn phi() -> WeightSet {
        weight_set(&builtin_p2_double_scalar())
    }

    fn set(vs: &[[i64; 2]]) -> StableSet {
        StableSet::new(vs.iter().map(|&v| LatticeVector::from(v)), &phi()).unwrap()
    }

    #[test]
    fn witnesses() {
        let phi = phi();
        let triple = set(&[[-1, 0], [-1, 1], [0, 1]]);
        assert_eq!(
            is_lambdafiable(&triple, &phi).unwrap(),
            Some([-1, 1].into())
        );
        assert_eq!(is_lambdafiable(&set(&[[0, 1]]), &phi).unwrap(), None);
        let all = StableSet::new(phi.weights().to_vec(), &phi).unwrap();
        assert_eq!(is_lambdafiable(&all, &phi).unwrap(), Some([0, 0].into()));
    }

    #[test]
    fn four_set_witness_vanishes_on_the_opposite_pair() {
        let phi = phi();
        let e = set(&[[0, 1], [0, -1], [1, 0], [1, -1]]);
        let f = is_lambdafiable(&e, &phi).unwrap().unwrap();
        assert_eq!(f.eval(&[0, 1].into()), 0.into());
        assert_eq!(f.eval(&[0, -1].into()), 0.into());
        assert!(f.eval(&[1, 0].into()).is_positive());
        assert!(f.eval(&[1, -1].into()).is_positive());
    }

    #[test]
    fn verification() {
        let phi = phi();
        assert!(verify_lambda_witness(
            &[-1, 1].into(),
            &set(&[[-1, 0], [-1, 1], [0, 1]]),
            &phi
        ));
        assert!(!verify_lambda_witness(
            &[1, 1].into(),
            &set(&[[1, 0], [0, 1]]),
            &phi
        ));
    }

    #[test]
    fn cocharacter_of_diagonal() {
        let atlas = builtin_p2_double_scalar();
        let a = cocharacter_attractor(&[1, 1].into(), &atlas).unwrap();
        assert_eq!(a.magnet, set(&[[-1, 1], [0, 1], [1, 0], [1, -1]]));
    }
}
