//! Finitely generated submonoids of Zⁿ ("magnets").
//!
//! # Membership
//!
//! `v ∈ [G⟩` is decided in two steps. First the integer system `Σ cᵢ·gᵢ = v`
//! is solved without sign conditions; no integer solution means no
//! membership. Otherwise a breadth-first search runs over partial sums
//! `Σ_{k ≤ t} g_{σ(k)}` restricted to the *Steinitz tube*
//!
//! ```text
//! { p ∈ Zⁿ : dist∞(p, [0, v]) ≤ R },   R = mult · n · (Δ + ‖v‖∞)
//! ```
//!
//! where `Δ` is the largest absolute generator entry. By the Steinitz lemma
//! (Grinberg–Sevast'yanov constant `n` for any norm) the summands of any
//! nonnegative representation of `v` can be ordered so that every partial sum
//! stays within `n·(Δ + ‖v‖∞/T)` of the point `(t/T)·v`, hence inside the
//! tube. The search is therefore exact for `mult ≥ 1`; the multiplier can be
//! raised with [`set_bound_multiplier`] (the CLI reads
//! `MAGNET_MEMBERSHIP_BOUND_MULT`).

use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{check_rank, Error, Result};
use crate::lattice::{
    hermite_basis, integer_affine_solutions, rational_halfspace_feasible,
    FunctionalConstraintSystem, LatticeVector, Relation,
};

static BOUND_MULTIPLIER: AtomicU32 = AtomicU32::new(1);

/// Scales the membership search radius. Values below one are rejected.
pub fn set_bound_multiplier(mult: u32) -> Result<()> {
    if mult == 0 {
        return Err(Error::Input(
            "membership bound multiplier must be positive".into(),
        ));
    }
    BOUND_MULTIPLIER.store(mult, Ordering::Relaxed);
    Ok(())
}

pub fn bound_multiplier() -> u32 {
    BOUND_MULTIPLIER.load(Ordering::Relaxed)
}

/// The monoid `[G⟩` generated by a finite set of lattice vectors.
///
/// Generators are kept sorted and deduplicated with the zero vector dropped,
/// so two presentations of the same generator set compare equal. Equality of
/// generated monoids is a different question, see [`MonoidPresentation::same_monoid`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MonoidPresentation {
    rank: usize,
    generators: Vec<LatticeVector>,
}

impl MonoidPresentation {
    pub fn new(rank: usize, generators: impl IntoIterator<Item = LatticeVector>) -> Result<Self> {
        let mut gens = Vec::new();
        for g in generators {
            check_rank(rank, g.rank())?;
            if !g.is_zero() {
                gens.push(g);
            }
        }
        gens.sort();
        gens.dedup();
        Ok(MonoidPresentation {
            rank,
            generators: gens,
        })
    }

    /// The trivial monoid `0`.
    pub fn trivial(rank: usize) -> Self {
        MonoidPresentation {
            rank,
            generators: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[LatticeVector] {
        &self.generators
    }

    pub fn contains(&self, v: &LatticeVector) -> Result<bool> {
        is_member(v, self)
    }

    /// Mutual generator membership.
    pub fn same_monoid(&self, other: &MonoidPresentation) -> Result<bool> {
        check_rank(self.rank, other.rank)?;
        for g in &self.generators {
            if !is_member(g, other)? {
                return Ok(false);
            }
        }
        for g in &other.generators {
            if !is_member(g, self)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Whether some nonnegative integer combination of the generators equals `v`.
pub fn is_member(v: &LatticeVector, monoid: &MonoidPresentation) -> Result<bool> {
    Ok(membership_certificate(v, monoid)?.is_some())
}

/// Nonnegative coefficients (one per generator, in the presentation's order)
/// representing `v`, or `None` if `v` is not in the monoid.
pub fn membership_certificate(
    v: &LatticeVector,
    monoid: &MonoidPresentation,
) -> Result<Option<Vec<BigInt>>> {
    check_rank(monoid.rank, v.rank())?;
    let gens = &monoid.generators;
    if v.is_zero() {
        return Ok(Some(vec![BigInt::zero(); gens.len()]));
    }
    if integer_affine_solutions(gens, v)?.is_none() {
        return Ok(None);
    }
    Ok(tube_search(gens, v))
}

struct Tube<'a> {
    target: &'a LatticeVector,
    radius: BigInt,
}

impl Tube<'_> {
    /// Whether some `t ∈ [0,1]` has `|p_j − t·b_j| ≤ R` for every coordinate.
    fn contains(&self, p: &LatticeVector) -> bool {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::from_integer(1.into());
        for (pj, bj) in p.entries().iter().zip(self.target.entries()) {
            if bj.is_zero() {
                if pj.abs() > self.radius {
                    return false;
                }
                continue;
            }
            let a = BigRational::new(pj - &self.radius, bj.clone());
            let b = BigRational::new(pj + &self.radius, bj.clone());
            let (l, h) = if a <= b { (a, b) } else { (b, a) };
            if l > lo {
                lo = l;
            }
            if h < hi {
                hi = h;
            }
            if lo > hi {
                return false;
            }
        }
        true
    }
}

fn tube_search(gens: &[LatticeVector], target: &LatticeVector) -> Option<Vec<BigInt>> {
    let delta = gens
        .iter()
        .map(LatticeVector::max_abs)
        .max()
        .unwrap_or_default();
    let radius =
        BigInt::from(bound_multiplier()) * BigInt::from(target.rank()) * (delta + target.max_abs());
    let tube = Tube { target, radius };

    let start = LatticeVector::zero(target.rank());
    let mut parent: HashMap<LatticeVector, (LatticeVector, usize)> = HashMap::new();
    let mut queue = VecDeque::from([start.clone()]);
    let mut seen = std::collections::HashSet::from([start.clone()]);
    while let Some(p) = queue.pop_front() {
        for (i, g) in gens.iter().enumerate() {
            let q = &p + g;
            if seen.contains(&q) || !tube.contains(&q) {
                continue;
            }
            seen.insert(q.clone());
            parent.insert(q.clone(), (p.clone(), i));
            if &q == target {
                let mut coeffs = vec![BigInt::zero(); gens.len()];
                let mut cur = q;
                while cur != start {
                    let (prev, i) = parent.remove(&cur).expect("path back to origin");
                    coeffs[i] += 1;
                    cur = prev;
                }
                return Some(coeffs);
            }
            queue.push_back(q);
        }
    }
    None
}

/// Lattice basis (Hermite normal form) of the unit group `N ∩ (−N)`.
///
/// If `Σ cᵢgᵢ` is invertible in `N` then every `gᵢ` with `cᵢ > 0` is a unit,
/// so `U(N)` is generated by the unit generators.
pub fn unit_group(monoid: &MonoidPresentation) -> Result<Vec<LatticeVector>> {
    let mut units = Vec::new();
    for g in &monoid.generators {
        if is_member(&-g, monoid)? {
            units.push(g.clone());
        }
    }
    Ok(hermite_basis(&units))
}

/// Subsets of generators larger than this are not searched in [`is_face`].
pub const FACE_SEARCH_LIMIT: usize = 20;

/// Whether `face` is a face of `monoid`: `face = { n ∈ N : f·n = 0 }` for some
/// functional `f ≥ 0` on `N`.
///
/// Searches candidate zero sets `S` of generators; `S` is realised by a
/// supporting functional iff `f = 0` on `S` and `f ≥ 1` off `S` is feasible.
pub fn is_face(face: &MonoidPresentation, monoid: &MonoidPresentation) -> Result<bool> {
    check_rank(monoid.rank, face.rank)?;
    for g in &face.generators {
        if !is_member(g, monoid)? {
            return Ok(false);
        }
    }
    let n = monoid.generators.len();
    if n > FACE_SEARCH_LIMIT {
        return Err(Error::Capacity(format!(
            "face search over {n} generators exceeds the limit of {FACE_SEARCH_LIMIT}"
        )));
    }
    for mask in 0u32..(1 << n) {
        let mut system = FunctionalConstraintSystem::new(monoid.rank);
        let mut zero_set = Vec::new();
        for (i, g) in monoid.generators.iter().enumerate() {
            if mask & (1 << i) != 0 {
                system.push(g.clone(), Relation::Nonneg)?;
                system.push(-g, Relation::Nonneg)?;
                zero_set.push(g.clone());
            } else {
                system.push(-g, Relation::AtMostMinusOne)?;
            }
        }
        if rational_halfspace_feasible(&system).is_none() {
            continue;
        }
        let candidate = MonoidPresentation::new(monoid.rank, zero_set)?;
        if candidate.same_monoid(face)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(e: &[i64]) -> LatticeVector {
        LatticeVector::from_i64s(e)
    }

    fn monoid(gens: &[&[i64]]) -> MonoidPresentation {
        let rank = gens.first().map_or(2, |g| g.len());
        MonoidPresentation::new(rank, gens.iter().map(|g| v(g))).unwrap()
    }

    #[test]
    fn normalization() {
        let m = monoid(&[&[0, 1], &[0, 0], &[0, 1], &[1, 0]]);
        assert_eq!(m.generators(), &[v(&[0, 1]), v(&[1, 0])]);
        assert!(MonoidPresentation::new(2, [v(&[1, 0, 0])]).is_err());
    }

    #[test]
    fn membership_examples() {
        assert!(is_member(&v(&[1, 1]), &monoid(&[&[1, 0], &[0, 1]])).unwrap());
        assert!(is_member(&v(&[1, 0]), &monoid(&[&[0, 1], &[1, -1]])).unwrap());
        assert!(!is_member(&v(&[1, 0]), &monoid(&[&[2, 0], &[0, 1]])).unwrap());
        assert!(is_member(&v(&[-1, 0]), &monoid(&[&[2, 0], &[-2, 0], &[1, 0]])).unwrap());
        assert!(is_member(&v(&[0, 0]), &MonoidPresentation::trivial(2)).unwrap());
        assert!(!is_member(&v(&[0, 1]), &MonoidPresentation::trivial(2)).unwrap());
        assert!(is_member(&v(&[1]), &monoid(&[&[1, 0]])).is_err());
    }

    #[test]
    fn sign_obstruction_needs_the_search() {
        // integer solutions exist but none are nonnegative
        let m = monoid(&[&[1, 0], &[0, 1]]);
        assert!(!is_member(&v(&[-1, 0]), &m).unwrap());
        let m = monoid(&[&[1, 1], &[1, -1]]);
        assert!(is_member(&v(&[4, 0]), &m).unwrap());
        assert!(!is_member(&v(&[-2, 0]), &m).unwrap());
    }

    #[test]
    fn certificates_add_up() {
        let m = monoid(&[&[2, 1], &[-1, 3], &[0, -1]]);
        for target in [v(&[1, 4]), v(&[3, 2]), v(&[0, 5]), v(&[-3, 5])] {
            let c = membership_certificate(&target, &m).unwrap().unwrap();
            let sum = m
                .generators()
                .iter()
                .zip(&c)
                .fold(LatticeVector::zero(2), |acc, (g, k)| &acc + &g.scale(k));
            assert_eq!(sum, target);
            assert!(c.iter().all(|k| !k.is_negative()));
        }
    }

    #[test]
    fn unit_groups() {
        assert!(unit_group(&monoid(&[&[0, 1]])).unwrap().is_empty());
        assert_eq!(
            unit_group(&monoid(&[&[0, 1], &[0, -1], &[1, 0]])).unwrap(),
            vec![v(&[0, 1])]
        );
        let phi = monoid(&[&[1, 0], &[0, 1], &[1, -1], &[0, -1], &[-1, 1], &[-1, 0]]);
        assert_eq!(unit_group(&phi).unwrap(), vec![v(&[1, 0]), v(&[0, 1])]);
        // (1,1) is a unit only through the combination with (-1,-1)
        let m = monoid(&[&[1, 1], &[-1, -1], &[2, 0]]);
        assert_eq!(unit_group(&m).unwrap(), vec![v(&[1, 1])]);
    }

    #[test]
    fn faces() {
        let trivial = MonoidPresentation::trivial(2);
        assert!(is_face(&trivial, &monoid(&[&[0, 1]])).unwrap());
        assert!(is_face(
            &monoid(&[&[0, 1], &[0, -1]]),
            &monoid(&[&[0, 1], &[0, -1], &[1, 0]])
        )
        .unwrap());
        assert!(!is_face(&monoid(&[&[1, 1]]), &monoid(&[&[1, 0], &[0, 1]])).unwrap());
        assert!(is_face(&monoid(&[&[1, 0]]), &monoid(&[&[1, 0], &[0, 1]])).unwrap());
        // a group has only itself as a face
        let group = monoid(&[&[0, 1], &[0, -1]]);
        assert!(!is_face(&trivial, &group).unwrap());
        assert!(is_face(&group, &group).unwrap());
    }

    #[test]
    fn multiplier_rejects_zero() {
        assert!(set_bound_multiplier(0).is_err());
        assert_eq!(bound_multiplier(), 1);
    }
}
