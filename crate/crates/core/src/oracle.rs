//! Brute-force recomputation of the enumerative results, sharing no code
//! with the engine beyond the atlas data types.
//!
//! Membership is decided by closing under sums of at most
//! [`ORACLE_SUMMANDS`] generators, lambdafiability by scanning all integer
//! functionals in `[−ORACLE_BOX, ORACLE_BOX]ⁿ`, and components by union-find
//! on a graph whose nodes are (chart, retained support) pairs.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::atlas::WeightAtlas;
use crate::attractor::attractor;
use crate::error::{Error, Result};
use crate::lambda::{is_lambdafiable, verify_lambda_witness};
use crate::magnet::{
    enumerate_pure_magnets, enumerate_pure_magnets_with, is_additively_stable, weight_set,
    StableSet, WeightSet,
};

pub const ORACLE_PHI_LIMIT: usize = 12;
pub const ORACLE_SUMMANDS: usize = 6;
pub const ORACLE_BOX: i64 = 8;

/// Deliberate engine bugs used to show that the oracle notices them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fault {
    #[default]
    None,
    /// The stability test skips the last weight of Φ.
    StabilityOffByOne,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tally {
    pub agree: usize,
    pub total: usize,
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.agree, self.total)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub magnets: Tally,
    pub witnesses: Tally,
    pub attractors: Tally,
    /// The first disagreement found, if any.
    pub mismatch: Option<String>,
}

impl OracleOutcome {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} magnets, {} witnesses, {} attractors agree",
            self.magnets, self.witnesses, self.attractors
        )
    }
}

type Point = Vec<i64>;

fn small(atlas: &WeightAtlas) -> Result<(Vec<Point>, WeightSet)> {
    let phi = weight_set(atlas);
    if phi.len() > ORACLE_PHI_LIMIT {
        return Err(Error::Capacity(format!(
            "|Φ| = {} exceeds the oracle limit of {ORACLE_PHI_LIMIT}",
            phi.len()
        )));
    }
    if atlas.rank > 3 {
        return Err(Error::Capacity(format!(
            "the oracle functional scan needs rank ≤ 3, got {}",
            atlas.rank
        )));
    }
    let points = phi
        .weights()
        .iter()
        .map(|w| {
            w.to_i64s()
                .ok_or_else(|| Error::Capacity(format!("weight {w} too large for the oracle")))
        })
        .collect::<Result<_>>()?;
    Ok((points, phi))
}

fn add(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// All sums of at most `ORACLE_SUMMANDS` elements of `gens`.
fn bounded_sums(gens: &[Point], rank: usize) -> HashSet<Point> {
    let mut reached: HashSet<Point> = HashSet::from([vec![0; rank]]);
    let mut frontier = reached.clone();
    for _ in 0..ORACLE_SUMMANDS {
        let mut next = HashSet::new();
        for p in &frontier {
            for g in gens {
                let q = add(p, g);
                if reached.insert(q.clone()) {
                    next.insert(q);
                }
            }
        }
        frontier = next;
    }
    reached
}

fn naive_stable_sets(phi: &[Point], rank: usize) -> Vec<BTreeSet<Point>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << phi.len()) {
        let subset: Vec<Point> = (0..phi.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| phi[i].clone())
            .collect();
        let sums = bounded_sums(&subset, rank);
        if phi.iter().all(|w| subset.contains(w) || !sums.contains(w)) {
            out.push(subset.into_iter().collect());
        }
    }
    out
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn functionals(rank: usize) -> Vec<Point> {
    let mut all = vec![vec![]];
    for _ in 0..rank {
        all = all
            .into_iter()
            .flat_map(|f: Point| {
                (-ORACLE_BOX..=ORACLE_BOX).map(move |c| {
                    let mut g = f.clone();
                    g.push(c);
                    g
                })
            })
            .collect();
    }
    all
}

fn boxed_lambdafiable(e: &BTreeSet<Point>, phi: &[Point], fs: &[Point]) -> bool {
    fs.iter()
        .any(|f| phi.iter().all(|w| (dot(f, w) >= 0) == e.contains(w)))
}

/// Orbits fully inside the attractor of `e`, and their components.
struct NaiveAttractor {
    parts: BTreeMap<String, BTreeSet<String>>,
    orbits: BTreeSet<String>,
    components: BTreeSet<BTreeSet<String>>,
}

fn naive_attractor(e: &BTreeSet<Point>, atlas: &WeightAtlas) -> NaiveAttractor {
    let parts: BTreeMap<String, BTreeSet<String>> = atlas
        .charts
        .iter()
        .map(|c| {
            let kept = c
                .coordinates
                .iter()
                .filter(|k| k.weight.to_i64s().is_some_and(|w| e.contains(&w)))
                .map(|k| k.name.clone())
                .collect();
            (c.id.clone(), kept)
        })
        .collect();

    // nodes: (chart, support) for every orbit retained in that chart
    let mut nodes: Vec<(String, BTreeSet<String>, String)> = Vec::new();
    for o in &atlas.orbits {
        for (chart, support) in &o.supports {
            if parts.get(chart).is_some_and(|kept| support.is_subset(kept)) {
                nodes.push((chart.clone(), support.clone(), o.id.clone()));
            }
        }
    }
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            i = parent[i];
        }
        i
    }
    for i in 0..nodes.len() {
        for j in 0..i {
            let same_chart = nodes[i].0 == nodes[j].0
                && (nodes[i].1.is_subset(&nodes[j].1) || nodes[j].1.is_subset(&nodes[i].1));
            let same_orbit = nodes[i].2 == nodes[j].2;
            if same_chart || same_orbit {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }

    let orbits: BTreeSet<String> = atlas
        .orbits
        .iter()
        .filter(|o| {
            o.supports
                .iter()
                .all(|(c, s)| parts.get(c).is_some_and(|kept| s.is_subset(kept)))
        })
        .map(|o| o.id.clone())
        .collect();
    let mut groups: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, node) in nodes.iter().enumerate() {
        if orbits.contains(&node.2) {
            let r = root(&mut parent, i);
            groups.entry(r).or_default().insert(node.2.clone());
        }
    }
    NaiveAttractor {
        parts,
        orbits,
        components: groups.into_values().collect(),
    }
}

fn engine_magnets(phi: &WeightSet, fault: Fault) -> Result<Vec<StableSet>> {
    match fault {
        Fault::None => enumerate_pure_magnets(phi),
        Fault::StabilityOffByOne => {
            let shortened = WeightSet::new(
                phi.rank(),
                phi.weights()[..phi.len().saturating_sub(1)].to_vec(),
            )?;
            enumerate_pure_magnets_with(phi, |subset| {
                if subset.iter().all(|w| shortened.contains(w)) {
                    is_additively_stable(subset, &shortened)
                } else {
                    is_additively_stable(subset, phi)
                }
            })
        }
    }
}

fn as_points(e: &StableSet) -> BTreeSet<Point> {
    e.elements().iter().filter_map(|w| w.to_i64s()).collect()
}

fn show(e: &BTreeSet<Point>) -> String {
    let parts: Vec<String> = e
        .iter()
        .map(|p| {
            format!(
                "({})",
                p.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

/// Recomputes stable sets, lambdafiability and attractors naively and
/// compares them with the engine.
pub fn run_oracle(atlas: &WeightAtlas, fault: Fault) -> Result<OracleOutcome> {
    let (points, phi) = small(atlas)?;
    let mut mismatch: Option<String> = None;
    let mut note = |m: String| {
        if mismatch.is_none() {
            mismatch = Some(m);
        }
    };

    let naive = naive_stable_sets(&points, atlas.rank);
    let engine: Vec<BTreeSet<Point>> = engine_magnets(&phi, fault)?.iter().map(as_points).collect();
    let mut magnets = Tally {
        agree: 0,
        total: naive.len(),
    };
    for e in &naive {
        if engine.contains(e) {
            magnets.agree += 1;
        } else {
            note(format!("stable set {} missing from the engine", show(e)));
        }
    }
    for e in &engine {
        if !naive.contains(e) {
            note(format!(
                "engine reports {} as stable, naive closure does not",
                show(e)
            ));
        }
    }

    let fs = functionals(atlas.rank);
    let mut witnesses = Tally { agree: 0, total: 0 };
    let mut attractors = Tally {
        agree: 0,
        total: naive.len(),
    };
    for e in &naive {
        let set = StableSet::new(
            e.iter()
                .map(|p| crate::lattice::LatticeVector::from_i64s(p)),
            &phi,
        );
        let Ok(set) = set else {
            note(format!("{} is not stable for the engine", show(e)));
            continue;
        };

        let boxed = boxed_lambdafiable(e, &points, &fs);
        let found = is_lambdafiable(&set, &phi)?;
        if boxed {
            witnesses.total += 1;
        }
        match (&found, boxed) {
            (Some(f), true) if verify_lambda_witness(f, &set, &phi) => witnesses.agree += 1,
            (Some(f), true) => note(format!("witness {f} for {} fails verification", show(e))),
            (None, false) => {}
            (Some(f), false) => note(format!(
                "engine witness {f} for {}, none in the box",
                show(e)
            )),
            (None, true) => note(format!(
                "{} has a boxed witness, engine found none",
                show(e)
            )),
        }

        let mine = naive_attractor(e, atlas);
        let theirs = attractor(&set, atlas);
        let parts_agree = mine.parts.iter().all(|(c, kept)| {
            theirs
                .chart_part(c)
                .iter()
                .cloned()
                .collect::<BTreeSet<_>>()
                == *kept
        });
        let orbits_agree = atlas.orbit_complete
            && theirs
                .orbit_ids
                .as_ref()
                .is_some_and(|ids| ids.iter().cloned().collect::<BTreeSet<_>>() == mine.orbits);
        let components_agree = atlas.orbit_complete
            && theirs.components.as_ref().is_some_and(|cs| {
                cs.iter()
                    .map(|c| c.iter().cloned().collect::<BTreeSet<_>>())
                    .collect::<BTreeSet<_>>()
                    == mine.components
            });
        if parts_agree && (!atlas.orbit_complete || (orbits_agree && components_agree)) {
            attractors.agree += 1;
        } else {
            note(format!("attractor of {} differs", show(e)));
        }
    }

    Ok(OracleOutcome {
        magnets,
        witnesses,
        attractors,
        mismatch,
    })
}
