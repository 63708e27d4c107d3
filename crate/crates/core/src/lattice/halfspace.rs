use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::LatticeVector;
use crate::error::{check_rank, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `f·v ≥ 0`
    Nonneg,
    /// `f·v ≤ −1`, the integral form of `f·v < 0`
    AtMostMinusOne,
}

/// Linear conditions on an unknown functional `f ∈ Hom(Zⁿ, Z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalConstraintSystem {
    rank: usize,
    constraints: Vec<(LatticeVector, Relation)>,
}

impl FunctionalConstraintSystem {
    pub fn new(rank: usize) -> Self {
        FunctionalConstraintSystem {
            rank,
            constraints: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn constraints(&self) -> &[(LatticeVector, Relation)] {
        &self.constraints
    }

    pub fn push(&mut self, vector: LatticeVector, relation: Relation) -> Result<()> {
        check_rank(self.rank, vector.rank())?;
        self.constraints.push((vector, relation));
        Ok(())
    }

    pub fn with(mut self, vector: LatticeVector, relation: Relation) -> Result<Self> {
        self.push(vector, relation)?;
        Ok(self)
    }

    /// Whether `f` satisfies every constraint exactly.
    pub fn is_satisfied_by(&self, f: &LatticeVector) -> bool {
        f.rank() == self.rank
            && self.constraints.iter().all(|(v, rel)| {
                let value = f.dot(v);
                match rel {
                    Relation::Nonneg => !value.is_negative(),
                    Relation::AtMostMinusOne => value <= -BigInt::one(),
                }
            })
    }
}

/// `coeffs · x ≥ bound`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Inequality {
    coeffs: Vec<BigRational>,
    bound: BigRational,
}

impl Inequality {
    /// Scales so the last nonzero coefficient has absolute value one.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self
            .coeffs
            .iter()
            .rev()
            .find(|c| !c.is_zero())
            .map(|c| c.abs())
        {
            for c in &mut self.coeffs {
                *c /= &lead;
            }
            self.bound /= lead;
        }
        self
    }
}

fn dedup(mut rows: Vec<Inequality>) -> Vec<Inequality> {
    rows.sort();
    rows.dedup();
    rows
}

/// Eliminates the last variable. Returns `None` when a contradiction
/// `0 ≥ positive` appears.
fn eliminate(rows: &[Inequality], k: usize) -> Option<Vec<Inequality>> {
    let mut kept = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for r in rows {
        if r.coeffs[k].is_positive() {
            lower.push(r);
        } else if r.coeffs[k].is_negative() {
            upper.push(r);
        } else {
            kept.push(Inequality {
                coeffs: r.coeffs[..k].to_vec(),
                bound: r.bound.clone(),
            });
        }
    }
    for lo in &lower {
        for hi in &upper {
            let a = &lo.coeffs[k];
            let b = -&hi.coeffs[k];
            let coeffs = (0..k)
                .map(|j| &lo.coeffs[j] / a + &hi.coeffs[j] / &b)
                .collect();
            let bound = &lo.bound / a + &hi.bound / &b;
            kept.push(Inequality { coeffs, bound }.normalized());
        }
    }
    let mut out = Vec::with_capacity(kept.len());
    for r in dedup(kept) {
        if r.coeffs.iter().all(Zero::is_zero) {
            if r.bound.is_positive() {
                return None;
            }
        } else {
            out.push(r);
        }
    }
    Some(out)
}

/// Deterministic choice inside `[lo, hi]`: zero if allowed, else the integer
/// closest to zero if one fits, else the nearer endpoint.
fn choose(lo: Option<BigRational>, hi: Option<BigRational>) -> BigRational {
    let zero = BigRational::zero();
    match (&lo, &hi) {
        (Some(l), _) if l.is_positive() => {
            let c = l.ceil();
            match &hi {
                Some(h) if &c > h => l.clone(),
                _ => c,
            }
        }
        (_, Some(h)) if h.is_negative() => {
            let c = h.floor();
            match &lo {
                Some(l) if &c < l => h.clone(),
                _ => c,
            }
        }
        _ => zero,
    }
}

/// Decides exact rational feasibility of the system by Fourier–Motzkin
/// elimination and returns a primitive integer witness.
///
/// A rational solution is scaled by the lcm of its denominators and then
/// divided by the gcd of its entries; both steps keep `f·v ≥ 0` and
/// `f·v ≤ −1` intact, so rational feasibility and integral feasibility agree.
pub fn rational_halfspace_feasible(system: &FunctionalConstraintSystem) -> Option<LatticeVector> {
    let n = system.rank;
    if n == 0 {
        return system
            .constraints
            .iter()
            .all(|(_, rel)| *rel == Relation::Nonneg)
            .then(|| LatticeVector::zero(0));
    }
    let initial: Vec<Inequality> = system
        .constraints
        .iter()
        .map(|(v, rel)| {
            let (sign, bound) = match rel {
                Relation::Nonneg => (BigInt::one(), BigRational::zero()),
                Relation::AtMostMinusOne => (-BigInt::one(), BigRational::one()),
            };
            Inequality {
                coeffs: v
                    .entries()
                    .iter()
                    .map(|e| BigRational::from_integer(e * &sign))
                    .collect(),
                bound,
            }
        })
        .collect();

    // stages[j] constrains variables 0..=j
    let mut stages = vec![dedup(initial)];
    for k in (1..n).rev() {
        let next = eliminate(stages.last().unwrap(), k)?;
        stages.push(next);
    }
    // the last elimination only needs its contradiction check
    eliminate(stages.last().unwrap(), 0)?;
    stages.reverse();

    let mut values: Vec<BigRational> = Vec::with_capacity(n);
    for (j, rows) in stages.iter().enumerate() {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for r in rows {
            let a = &r.coeffs[j];
            if a.is_zero() {
                continue;
            }
            let rest: BigRational = (0..j).map(|i| &r.coeffs[i] * &values[i]).sum();
            let limit = (&r.bound - rest) / a;
            if a.is_positive() {
                lo = Some(lo.map_or(limit.clone(), |l| l.max(limit)));
            } else {
                hi = Some(hi.map_or(limit.clone(), |h| h.min(limit)));
            }
        }
        values.push(choose(lo, hi));
    }

    let denom = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled: Vec<BigInt> = values
        .iter()
        .map(|v| (v * BigRational::from_integer(denom.clone())).to_integer())
        .collect();
    let g = scaled.iter().fold(BigInt::zero(), |acc, e| acc.gcd(e));
    let witness = if g.is_zero() || g.is_one() {
        LatticeVector::new(scaled)
    } else {
        LatticeVector::new(scaled.into_iter().map(|e| e / &g).collect())
    };
    debug_assert!(system.is_satisfied_by(&witness));
    Some(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Relation::*;

    fn v(e: &[i64]) -> LatticeVector {
        LatticeVector::from_i64s(e)
    }

    fn system(rows: &[(&[i64], Relation)]) -> FunctionalConstraintSystem {
        let mut s = FunctionalConstraintSystem::new(rows[0].0.len());
        for (e, rel) in rows {
            s.push(v(e), *rel).unwrap();
        }
        s
    }

    #[test]
    fn empty_system_gives_zero() {
        let s = FunctionalConstraintSystem::new(2);
        assert_eq!(rational_halfspace_feasible(&s), Some(v(&[0, 0])));
    }

    #[test]
    fn single_direction() {
        let s = system(&[(&[0, 1], Nonneg), (&[0, -1], AtMostMinusOne)]);
        assert_eq!(rational_halfspace_feasible(&s), Some(v(&[0, 1])));
    }

    #[test]
    fn pinned_first_coordinate() {
        let s = system(&[
            (&[1, 0], Nonneg),
            (&[-1, 0], Nonneg),
            (&[0, 1], AtMostMinusOne),
        ]);
        assert_eq!(rational_halfspace_feasible(&s), Some(v(&[0, -1])));
    }

    #[test]
    fn all_of_phi_negative_is_infeasible() {
        let phi: [&[i64]; 6] = [&[1, 0], &[0, 1], &[1, -1], &[0, -1], &[-1, 1], &[-1, 0]];
        let rows: Vec<(&[i64], Relation)> = phi.iter().map(|p| (*p, AtMostMinusOne)).collect();
        assert_eq!(rational_halfspace_feasible(&system(&rows)), None);
    }

    #[test]
    fn fractional_solution_is_cleared() {
        // 2y = 3x with x ≥ 1 picks x = 1, y = 3/2 before scaling
        let s = system(&[
            (&[-3, 2], Nonneg),
            (&[3, -2], Nonneg),
            (&[-1, 0], AtMostMinusOne),
        ]);
        let w = rational_halfspace_feasible(&s).unwrap();
        assert_eq!(w, v(&[2, 3]));
        assert!(s.is_satisfied_by(&w));
    }

    #[test]
    fn combined_rows_contradict() {
        let s = system(&[
            (&[2, 1], AtMostMinusOne),
            (&[-2, 1], AtMostMinusOne),
            (&[0, 1], Nonneg),
        ]);
        assert_eq!(rational_halfspace_feasible(&s), None);
    }

    #[test]
    fn rank_checked_on_push() {
        let mut s = FunctionalConstraintSystem::new(2);
        assert!(s.push(v(&[1, 2, 3]), Nonneg).is_err());
    }
}
