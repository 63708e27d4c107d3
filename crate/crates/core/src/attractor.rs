//! Attractors of pure magnets, their connected components, and the
//! stratification of `X` by minimal pure magnets.
//!
//! An attractor is reported on two levels. Chart level: in each chart, the
//! coordinates whose weight lies in the magnet. Orbit level: the orbits that
//! lie entirely in the attractor, i.e. whose support is retained in every
//! chart that meets them. Orbits retained in some charts but not all are
//! listed as partial.
//!
//! Components are computed on charts. Each chart piece is a coordinate
//! subspace through the chart's fixed point, hence connected; two pieces
//! meet exactly when some orbit visible in both charts is retained in both.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::atlas::{WeightAtlas, WeightChart};
use crate::error::{check_rank, Error, Result};
use crate::magnet::{purify, weight_set, StableSet};
use crate::monoid::{is_member, unit_group, MonoidPresentation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttractorDescription {
    pub magnet: StableSet,
    /// Retained coordinate names per chart, in chart order.
    pub chart_parts: BTreeMap<String, Vec<String>>,
    /// `None` when the atlas is not orbit complete.
    pub orbit_ids: Option<Vec<String>>,
    pub partial_orbit_ids: Option<Vec<String>>,
    /// Partition of `orbit_ids`, one block per connected component.
    pub components: Option<Partition>,
    /// The same components as sets of charts.
    pub chart_components: Option<Partition>,
}

impl AttractorDescription {
    pub fn component_count(&self) -> Option<usize> {
        self.components.as_ref().map(Vec::len)
    }

    pub fn chart_part(&self, chart: &str) -> &[String] {
        self.chart_parts.get(chart).map_or(&[], Vec::as_slice)
    }
}

/// Coordinates of `chart` whose weight lies in `monoid`.
pub fn chart_attractor(monoid: &MonoidPresentation, chart: &WeightChart) -> Result<Vec<String>> {
    let mut kept = Vec::new();
    for c in &chart.coordinates {
        check_rank(monoid.rank(), c.weight.rank())?;
        if is_member(&c.weight, monoid)? {
            kept.push(c.name.clone());
        }
    }
    Ok(kept)
}

fn parts_for(e: &StableSet, atlas: &WeightAtlas) -> BTreeMap<String, Vec<String>> {
    atlas
        .charts
        .iter()
        .map(|chart| {
            let kept = chart
                .coordinates
                .iter()
                .filter(|c| e.contains(&c.weight))
                .map(|c| c.name.clone())
                .collect();
            (chart.id.clone(), kept)
        })
        .collect()
}

fn retained_in(
    parts: &BTreeMap<String, Vec<String>>,
    chart: &str,
    support: &BTreeSet<String>,
) -> bool {
    parts
        .get(chart)
        .is_some_and(|kept| support.iter().all(|s| kept.contains(s)))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Chart components, in order of their first chart.
fn chart_blocks(parts: &BTreeMap<String, Vec<String>>, atlas: &WeightAtlas) -> Vec<Vec<usize>> {
    let index: BTreeMap<&str, usize> = atlas
        .charts
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.as_str(), i))
        .collect();
    let mut uf = UnionFind::new(atlas.charts.len());
    for orbit in &atlas.orbits {
        let retained: Vec<usize> = orbit
            .supports
            .iter()
            .filter(|(chart, support)| retained_in(parts, chart, support))
            .filter_map(|(chart, _)| index.get(chart.as_str()).copied())
            .collect();
        for w in retained.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..atlas.charts.len() {
        let root = uf.find(i);
        blocks.entry(root).or_default().push(i);
    }
    blocks.into_values().collect()
}

/// Blocks of ids, one per connected component.
pub type Partition = Vec<Vec<String>>;

/// Components of an attractor as partitions of its orbits and of the charts.
/// `None` when the orbit data is not orbit complete.
pub fn connected_components(
    attr: &AttractorDescription,
    atlas: &WeightAtlas,
) -> Option<(Partition, Partition)> {
    let orbit_ids = attr.orbit_ids.as_ref()?;
    let blocks = chart_blocks(&attr.chart_parts, atlas);
    let block_of = |chart: &str| {
        blocks
            .iter()
            .position(|b| b.iter().any(|&i| atlas.charts[i].id == chart))
    };
    let mut orbits_by_block = vec![Vec::new(); blocks.len()];
    for id in orbit_ids {
        let orbit = atlas.orbit(id)?;
        let block = orbit.supports.keys().find_map(|c| block_of(c))?;
        orbits_by_block[block].push(id.clone());
    }
    let charts = blocks
        .iter()
        .map(|b| b.iter().map(|&i| atlas.charts[i].id.clone()).collect())
        .collect();
    Some((orbits_by_block, charts))
}

/// The attractor of the pure magnet `[E⟩`.
pub fn attractor(e: &StableSet, atlas: &WeightAtlas) -> AttractorDescription {
    let chart_parts = parts_for(e, atlas);
    let mut attr = AttractorDescription {
        magnet: e.clone(),
        chart_parts,
        orbit_ids: None,
        partial_orbit_ids: None,
        components: None,
        chart_components: None,
    };
    if !atlas.orbit_complete {
        return attr;
    }
    let mut full = Vec::new();
    let mut partial = Vec::new();
    for orbit in &atlas.orbits {
        let kept = orbit
            .supports
            .iter()
            .filter(|(c, s)| retained_in(&attr.chart_parts, c, s))
            .count();
        if kept == orbit.supports.len() {
            full.push(orbit.id.clone());
        } else if kept > 0 {
            partial.push(orbit.id.clone());
        }
    }
    attr.orbit_ids = Some(full);
    attr.partial_orbit_ids = Some(partial);
    if let Some((components, charts)) = connected_components(&attr, atlas) {
        attr.components = Some(components);
        attr.chart_components = Some(charts);
    }
    attr
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub magnet: StableSet,
    pub orbits: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratification {
    /// Orbit id to the smallest pure magnet whose attractor contains it.
    pub assignment: BTreeMap<String, StableSet>,
    /// Nonempty fibers of the assignment, in magnet order.
    pub strata: Vec<Stratum>,
}

fn require_orbit_complete(atlas: &WeightAtlas, what: &str) -> Result<()> {
    if atlas.orbit_complete {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{what} needs an orbit-complete atlas"
        )))
    }
}

pub fn stratify(atlas: &WeightAtlas) -> Result<Stratification> {
    require_orbit_complete(atlas, "stratification")?;
    let phi = weight_set(atlas);
    let mut assignment = BTreeMap::new();
    let mut fibers: BTreeMap<StableSet, Vec<String>> = BTreeMap::new();
    for orbit in &atlas.orbits {
        let mut weights = Vec::new();
        for (chart_id, support) in &orbit.supports {
            let chart = atlas.chart(chart_id).ok_or_else(|| {
                Error::Input(format!("orbit {} names unknown chart {chart_id}", orbit.id))
            })?;
            for name in support {
                let coord = chart.coordinate(name).ok_or_else(|| {
                    Error::Input(format!(
                        "orbit {} names unknown coordinate {name}",
                        orbit.id
                    ))
                })?;
                weights.push(coord.weight.clone());
            }
        }
        let minimal = purify(&MonoidPresentation::new(atlas.rank, weights)?, &phi)?;
        fibers
            .entry(minimal.clone())
            .or_default()
            .push(orbit.id.clone());
        assignment.insert(orbit.id.clone(), minimal);
    }
    let strata = fibers
        .into_iter()
        .map(|(magnet, orbits)| Stratum { magnet, orbits })
        .collect();
    Ok(Stratification { assignment, strata })
}

/// Checks that passing from the unit face `F` of `[E⟩` to `[E⟩` is a
/// bijection on connected components of attractors.
pub fn pi0_face_check(e: &StableSet, atlas: &WeightAtlas) -> Result<bool> {
    require_orbit_complete(atlas, "the component check")?;
    let phi = weight_set(atlas);
    let units = unit_group(&e.monoid(atlas.rank))?;
    let face_monoid =
        MonoidPresentation::new(atlas.rank, units.iter().flat_map(|u| [u.clone(), -u]))?;
    let face = purify(&face_monoid, &phi)?;
    if !face.is_subset(e) {
        return Ok(false);
    }
    let small = attractor(&face, atlas).chart_components.unwrap_or_default();
    let large = attractor(e, atlas).chart_components.unwrap_or_default();
    let mut hits = vec![0usize; large.len()];
    for block in &small {
        let owners: BTreeSet<usize> = block
            .iter()
            .filter_map(|c| large.iter().position(|l| l.contains(c)))
            .collect();
        if owners.len() != 1 {
            return Ok(false);
        }
        hits[*owners.first().unwrap()] += 1;
    }
    Ok(hits.iter().all(|&h| h == 1))
}
