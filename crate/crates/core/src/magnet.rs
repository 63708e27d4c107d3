//! Pure magnets as additively stable subsets of the weight set Φ.
//!
//! For a general atlas, "pure magnet" here means exactly an additively
//! stable subset `E ⊆ Φ` (`[E⟩ ∩ Φ = E`), represented by `E` itself.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atlas::WeightAtlas;
use crate::error::{check_rank, Error, Result};
use crate::lattice::LatticeVector;
use crate::monoid::{is_member, MonoidPresentation};

/// The union of all chart weights, sorted lexicographically and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightSet {
    rank: usize,
    weights: Vec<LatticeVector>,
}

impl WeightSet {
    pub fn new(rank: usize, weights: impl IntoIterator<Item = LatticeVector>) -> Result<Self> {
        let mut ws = Vec::new();
        for w in weights {
            check_rank(rank, w.rank())?;
            ws.push(w);
        }
        ws.sort();
        ws.dedup();
        Ok(WeightSet { rank, weights: ws })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights(&self) -> &[LatticeVector] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn contains(&self, v: &LatticeVector) -> bool {
        self.weights.binary_search(v).is_ok()
    }
}

pub fn weight_set(atlas: &WeightAtlas) -> WeightSet {
    let mut weights: Vec<LatticeVector> = atlas
        .charts
        .iter()
        .flat_map(|c| c.weights().cloned())
        .collect();
    weights.sort();
    weights.dedup();
    WeightSet {
        rank: atlas.rank,
        weights,
    }
}

/// An additively stable subset of Φ; the canonical form of a pure magnet.
///
/// Ordered by cardinality, then lexicographically on the sorted elements.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StableSet {
    elements: BTreeSet<LatticeVector>,
}

impl StableSet {
    /// Checks `elements ⊆ Φ` and additive stability.
    pub fn new(elements: impl IntoIterator<Item = LatticeVector>, phi: &WeightSet) -> Result<Self> {
        let elements: BTreeSet<LatticeVector> = elements.into_iter().collect();
        let list: Vec<LatticeVector> = elements.iter().cloned().collect();
        if !is_additively_stable(&list, phi)? {
            return Err(Error::Input(format!(
                "{} is not additively stable",
                StableSet { elements }
            )));
        }
        Ok(StableSet { elements })
    }

    /// For sets known to be stable, e.g. `N ∩ Φ` for a monoid `N`.
    pub(crate) fn trusted(elements: impl IntoIterator<Item = LatticeVector>) -> Self {
        StableSet {
            elements: elements.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        StableSet {
            elements: BTreeSet::new(),
        }
    }

    pub fn elements(&self) -> &BTreeSet<LatticeVector> {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, v: &LatticeVector) -> bool {
        self.elements.contains(v)
    }

    pub fn is_subset(&self, other: &StableSet) -> bool {
        self.elements.is_subset(&other.elements)
    }

    /// The pure magnet `[E⟩`.
    pub fn monoid(&self, rank: usize) -> MonoidPresentation {
        MonoidPresentation::new(rank, self.elements.iter().cloned())
            .expect("elements share the rank")
    }

    /// Generator-list label such as `[(0,1),(1,0)⟩`; the trivial magnet is `0`.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl Ord for StableSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.elements.cmp(&other.elements))
    }
}

impl PartialOrd for StableSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for StableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elements.is_empty() {
            return write!(f, "0");
        }
        write!(f, "[")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "⟩")
    }
}

impl fmt::Debug for StableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The class `m^N(a)` of magnets sharing one attractor, named by its
/// purification.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MagnetClass {
    pub representative: StableSet,
}

impl MagnetClass {
    pub fn of(monoid: &MonoidPresentation, phi: &WeightSet) -> Result<Self> {
        Ok(MagnetClass {
            representative: purify(monoid, phi)?,
        })
    }

    pub fn contains(&self, monoid: &MonoidPresentation, phi: &WeightSet) -> Result<bool> {
        Ok(purify(monoid, phi)? == self.representative)
    }
}

/// `[E⟩ ∩ Φ = E`. Only elements of `Φ ∖ E` need a membership test.
pub fn is_additively_stable(subset: &[LatticeVector], phi: &WeightSet) -> Result<bool> {
    for e in subset {
        check_rank(phi.rank, e.rank())?;
        if !phi.contains(e) {
            return Err(Error::Input(format!("{e} is not a weight of the atlas")));
        }
    }
    let monoid = MonoidPresentation::new(phi.rank, subset.iter().cloned())?;
    for w in &phi.weights {
        if subset.contains(w) {
            continue;
        }
        if is_member(w, &monoid)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest Φ for which subset enumeration is attempted.
pub const ENUMERATION_LIMIT: usize = 24;

pub fn enumerate_pure_magnets(phi: &WeightSet) -> Result<Vec<StableSet>> {
    enumerate_pure_magnets_with(phi, |subset| is_additively_stable(subset, phi))
}

/// Enumeration with a caller-supplied stability test. Every subset of Φ is
/// tested; the output is in canonical order regardless of evaluation order.
pub fn enumerate_pure_magnets_with<F>(phi: &WeightSet, stable: F) -> Result<Vec<StableSet>>
where
    F: Fn(&[LatticeVector]) -> Result<bool> + Sync,
{
    let n = phi.len();
    if n > ENUMERATION_LIMIT {
        return Err(Error::Capacity(format!(
            "|Φ| = {n} exceeds the enumeration limit of {ENUMERATION_LIMIT}"
        )));
    }
    let found: Vec<Option<StableSet>> = (0u64..(1u64 << n))
        .into_par_iter()
        .map(|mask| {
            let subset: Vec<LatticeVector> = phi
                .weights
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, w)| w.clone())
                .collect();
            Ok(stable(&subset)?.then(|| StableSet::trusted(subset)))
        })
        .collect::<Result<_>>()?;
    let mut sets: Vec<StableSet> = found.into_iter().flatten().collect();
    sets.sort();
    Ok(sets)
}

/// `E(L) = L ∩ Φ`, the pure magnet with the same attractor as `L`.
pub fn purify(monoid: &MonoidPresentation, phi: &WeightSet) -> Result<StableSet> {
    check_rank(phi.rank, monoid.rank())?;
    let mut kept = Vec::new();
    for w in &phi.weights {
        if is_member(w, monoid)? {
            kept.push(w.clone());
        }
    }
    Ok(StableSet::trusted(kept))
}

pub fn same_class(a: &MonoidPresentation, b: &MonoidPresentation, phi: &WeightSet) -> Result<bool> {
    check_rank(a.rank(), b.rank())?;
    Ok(purify(a, phi)? == purify(b, phi)?)
}

/// Cover relations of the inclusion order on a list of stable sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseDiagram {
    pub node_count: usize,
    /// `(lower, upper)` index pairs into the input list, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl HasseDiagram {
    pub fn upper_covers(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .filter(move |(a, _)| *a == node)
            .map(|(_, b)| *b)
    }

    pub fn lower_covers(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .filter(move |(_, b)| *b == node)
            .map(|(a, _)| *a)
    }
}

/// Transitive reduction of strict subset inclusion.
pub fn hasse_diagram(pure: &[StableSet]) -> HasseDiagram {
    let n = pure.len();
    let below = |i: usize, j: usize| i != j && pure[i].is_subset(&pure[j]);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if below(i, j) && !(0..n).any(|k| below(i, k) && below(k, j)) {
                edges.push((i, j));
            }
        }
    }
    HasseDiagram {
        node_count: n,
        edges,
    }
}
