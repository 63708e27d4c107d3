//! The space `X` as an atlas of torus-stable linear charts.
//!
//! Each chart is an affine space whose coordinates carry torus weights. The
//! weights alone do not say how charts glue, so torus orbits are part of the
//! model: an orbit records, for each chart it meets, which coordinates are
//! nonzero on it. The builtins and the fan constructor derive this data; JSON
//! atlases must supply it.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coordinate {
    pub name: String,
    pub weight: LatticeVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightChart {
    pub id: String,
    #[serde(rename = "coords")]
    pub coordinates: Vec<Coordinate>,
}

impl WeightChart {
    pub fn new(
        id: impl Into<String>,
        coords: impl IntoIterator<Item = (&'static str, LatticeVector)>,
    ) -> Self {
        WeightChart {
            id: id.into(),
            coordinates: coords
                .into_iter()
                .map(|(name, weight)| Coordinate {
                    name: name.to_string(),
                    weight,
                })
                .collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.coordinates.len()
    }

    pub fn weights(&self) -> impl Iterator<Item = &LatticeVector> {
        self.coordinates.iter().map(|c| &c.weight)
    }

    pub fn coordinate(&self, name: &str) -> Option<&Coordinate> {
        self.coordinates.iter().find(|c| c.name == name)
    }
}

/// A torus orbit, given by its nonvanishing coordinates in each chart that
/// meets it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Orbit {
    pub id: String,
    pub supports: BTreeMap<String, BTreeSet<String>>,
}

impl Orbit {
    /// Support size in any chart where the orbit is visible; zero for an
    /// orbit without supports.
    pub fn dimension(&self) -> usize {
        self.supports.values().next().map_or(0, BTreeSet::len)
    }

    pub fn is_visible_in(&self, chart: &str) -> bool {
        self.supports.contains_key(chart)
    }

    pub fn support(&self, chart: &str) -> Option<&BTreeSet<String>> {
        self.supports.get(chart)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightAtlas {
    pub rank: usize,
    pub charts: Vec<WeightChart>,
    pub orbits: Vec<Orbit>,
    /// `(a, b)`: orbit `b` lies in the closure of orbit `a`.
    pub specializations: Vec<(String, String)>,
    pub orbit_complete: bool,
}

impl WeightAtlas {
    pub fn chart(&self, id: &str) -> Option<&WeightChart> {
        self.charts.iter().find(|c| c.id == id)
    }

    pub fn orbit(&self, id: &str) -> Option<&Orbit> {
        self.orbits.iter().find(|o| o.id == id)
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = &Orbit> {
        self.orbits.iter().filter(|o| o.dimension() == 0)
    }

    /// The orbit whose support in `chart` is exactly `support`.
    pub fn orbit_with_support(&self, chart: &str, support: &BTreeSet<String>) -> Option<&Orbit> {
        self.orbits
            .iter()
            .find(|o| o.support(chart) == Some(support))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Rank,
    DuplicateChart,
    DuplicateCoordinate,
    WeightRank,
    DuplicateOrbit,
    EmptySupports,
    UnknownChart,
    UnknownCoordinate,
    DimensionMismatch,
    UnknownOrbit,
    SpecializationCycle,
    SupportInconsistency,
    OrbitCompleteness,
}

/// One broken atlas invariant, with the ids involved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub ids: Vec<String>,
    pub message: String,
}

impl Violation {
    fn new(kind: ViolationKind, ids: &[&str], message: impl Into<String>) -> Self {
        Violation {
            kind,
            ids: ids.iter().map(|s| s.to_string()).collect(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn braces<'a>(names: impl IntoIterator<Item = &'a String>) -> String {
    let names: Vec<&str> = names.into_iter().map(String::as_str).collect();
    format!("{{{}}}", names.join(","))
}

/// Checks every atlas invariant; an empty list means the atlas is valid.
pub fn validate_atlas(atlas: &WeightAtlas) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();

    if atlas.rank == 0 {
        out.push(Violation::new(Rank, &[], "rank must be positive"));
    }

    let mut chart_ids = HashSet::new();
    for chart in &atlas.charts {
        if !chart_ids.insert(chart.id.as_str()) {
            out.push(Violation::new(
                DuplicateChart,
                &[&chart.id],
                format!("duplicate chart id {}", chart.id),
            ));
        }
        let mut names = HashSet::new();
        for c in &chart.coordinates {
            if !names.insert(c.name.as_str()) {
                out.push(Violation::new(
                    DuplicateCoordinate,
                    &[&chart.id, &c.name],
                    format!("chart {}: duplicate coordinate {}", chart.id, c.name),
                ));
            }
            if c.weight.rank() != atlas.rank {
                out.push(Violation::new(
                    WeightRank,
                    &[&chart.id, &c.name],
                    format!(
                        "chart {}: weight of {} has rank {}, atlas rank is {}",
                        chart.id,
                        c.name,
                        c.weight.rank(),
                        atlas.rank
                    ),
                ));
            }
        }
    }

    let mut orbit_ids = HashSet::new();
    for orbit in &atlas.orbits {
        if !orbit_ids.insert(orbit.id.as_str()) {
            out.push(Violation::new(
                DuplicateOrbit,
                &[&orbit.id],
                format!("duplicate orbit id {}", orbit.id),
            ));
        }
        if orbit.supports.is_empty() {
            out.push(Violation::new(
                EmptySupports,
                &[&orbit.id],
                format!("orbit {} is not visible in any chart", orbit.id),
            ));
        }
        for (chart_id, support) in &orbit.supports {
            let Some(chart) = atlas.chart(chart_id) else {
                out.push(Violation::new(
                    UnknownChart,
                    &[&orbit.id, chart_id],
                    format!("orbit {}: unknown chart {}", orbit.id, chart_id),
                ));
                continue;
            };
            for name in support {
                if chart.coordinate(name).is_none() {
                    out.push(Violation::new(
                        UnknownCoordinate,
                        &[&orbit.id, chart_id, name],
                        format!(
                            "orbit {}: chart {} has no coordinate {}",
                            orbit.id, chart_id, name
                        ),
                    ));
                }
            }
        }
        let sizes: BTreeSet<usize> = orbit.supports.values().map(BTreeSet::len).collect();
        if sizes.len() > 1 {
            out.push(Violation::new(
                DimensionMismatch,
                &[&orbit.id],
                format!("orbit {}: support sizes differ across charts", orbit.id),
            ));
        }
    }

    let mut edges: HashMap<&str, Vec<&str>> = HashMap::new();
    for (a, b) in &atlas.specializations {
        let mut known = true;
        for id in [a, b] {
            if !orbit_ids.contains(id.as_str()) {
                known = false;
                out.push(Violation::new(
                    UnknownOrbit,
                    &[id],
                    format!("specialization refers to unknown orbit {id}"),
                ));
            }
        }
        if known {
            edges.entry(a).or_default().push(b);
        }
    }
    if let Some(cycle) = find_cycle(&atlas.orbits, &edges) {
        let ids: Vec<&str> = cycle.iter().map(String::as_str).collect();
        out.push(Violation::new(
            SpecializationCycle,
            &ids,
            "specialization order not acyclic",
        ));
    }

    for (a, b) in &atlas.specializations {
        let (Some(oa), Some(ob)) = (atlas.orbit(a), atlas.orbit(b)) else {
            continue;
        };
        for (chart, sb) in &ob.supports {
            if let Some(sa) = oa.support(chart) {
                if !sb.is_subset(sa) {
                    out.push(Violation::new(
                        SupportInconsistency,
                        &[a, b, chart],
                        format!(
                            "orbit {b} specializes from {a} but its support {} in chart {chart} is not inside {}",
                            braces(sb),
                            braces(sa)
                        ),
                    ));
                }
            }
        }
    }

    if atlas.orbit_complete {
        for chart in &atlas.charts {
            if chart.dimension() > 24 {
                out.push(Violation::new(
                    OrbitCompleteness,
                    &[&chart.id],
                    format!(
                        "orbit-completeness: chart {} is too large to check",
                        chart.id
                    ),
                ));
                continue;
            }
            let names: Vec<&String> = chart.coordinates.iter().map(|c| &c.name).collect();
            for mask in 0u32..(1 << names.len()) {
                let subset: BTreeSet<String> = names
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, n)| (*n).clone())
                    .collect();
                let matching: Vec<&str> = atlas
                    .orbits
                    .iter()
                    .filter(|o| o.support(&chart.id) == Some(&subset))
                    .map(|o| o.id.as_str())
                    .collect();
                match matching.len() {
                    1 => {}
                    0 => out.push(Violation::new(
                        OrbitCompleteness,
                        &[&chart.id],
                        format!(
                            "orbit-completeness: chart {} support {} unmatched",
                            chart.id,
                            braces(&subset)
                        ),
                    )),
                    _ => {
                        let mut ids = vec![chart.id.as_str()];
                        ids.extend(&matching);
                        out.push(Violation::new(
                            OrbitCompleteness,
                            &ids,
                            format!(
                                "orbit-completeness: chart {} support {} matched by {} orbits",
                                chart.id,
                                braces(&subset),
                                matching.len()
                            ),
                        ));
                    }
                }
            }
        }
    }

    out
}

fn find_cycle(orbits: &[Orbit], edges: &HashMap<&str, Vec<&str>>) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit<'a>(
        node: &'a str,
        edges: &HashMap<&'a str, Vec<&'a str>>,
        marks: &mut HashMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        match marks.get(node) {
            Some(Mark::Done) => return None,
            Some(Mark::Open) => {
                let start = stack.iter().position(|n| *n == node).unwrap_or(0);
                return Some(stack[start..].iter().map(|s| s.to_string()).collect());
            }
            None => {}
        }
        marks.insert(node, Mark::Open);
        stack.push(node);
        for next in edges.get(node).into_iter().flatten() {
            if let Some(cycle) = visit(next, edges, marks, stack) {
                return Some(cycle);
            }
        }
        stack.pop();
        marks.insert(node, Mark::Done);
        None
    }

    let mut marks = HashMap::new();
    for o in orbits {
        let mut stack = Vec::new();
        if let Some(cycle) = visit(&o.id, edges, &mut marks, &mut stack) {
            return Some(cycle);
        }
    }
    None
}

/// Parses and validates an atlas document.
pub fn load_atlas(document: &str) -> Result<WeightAtlas> {
    let atlas: WeightAtlas = serde_json::from_str(document).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let violations = validate_atlas(&atlas);
    if violations.is_empty() {
        Ok(atlas)
    } else {
        Err(Error::InvalidAtlas(violations))
    }
}

pub fn save_atlas(atlas: &WeightAtlas) -> String {
    serde_json::to_string_pretty(atlas).expect("atlas serializes")
}

fn support(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// `G_m²` acting on `P²` by `(λ, β)·[x:y:z] = [λx : βy : z]`, covered by the
/// three standard charts.
pub fn builtin_p2_double_scalar() -> WeightAtlas {
    let charts = vec![
        WeightChart::new("z", [("x", [1, 0].into()), ("y", [0, 1].into())]),
        WeightChart::new("y", [("x", [1, -1].into()), ("z", [0, -1].into())]),
        WeightChart::new("x", [("y", [-1, 1].into()), ("z", [-1, 0].into())]),
    ];

    // orbits of P² are indexed by their nonzero homogeneous coordinates; in
    // chart c the support is that set minus c itself
    let patterns: [(&str, &[&str]); 7] = [
        ("f_x", &["x"]),
        ("f_y", &["y"]),
        ("f_z", &["z"]),
        ("l_xy", &["x", "y"]),
        ("l_xz", &["x", "z"]),
        ("l_yz", &["y", "z"]),
        ("dense", &["x", "y", "z"]),
    ];
    let orbits = patterns
        .iter()
        .map(|(id, nonzero)| Orbit {
            id: id.to_string(),
            supports: nonzero
                .iter()
                .map(|c| {
                    let rest: Vec<&str> = nonzero.iter().copied().filter(|n| n != c).collect();
                    (c.to_string(), support(&rest))
                })
                .collect(),
        })
        .collect();

    let mut specializations = Vec::new();
    for (a, sa) in &patterns {
        for (b, sb) in &patterns {
            if sb.len() + 1 == sa.len() && sb.iter().all(|n| sa.contains(n)) {
                specializations.push((a.to_string(), b.to_string()));
            }
        }
    }

    WeightAtlas {
        rank: 2,
        charts,
        orbits,
        specializations,
        orbit_complete: true,
    }
}

fn det2(u: &LatticeVector, v: &LatticeVector) -> BigInt {
    let (a, b) = (&u.entries()[0], &u.entries()[1]);
    let (c, d) = (&v.entries()[0], &v.entries()[1]);
    a * d - b * c
}

/// Half-plane index for angular sorting: 0 for angles in [0, π), 1 otherwise.
fn half(u: &LatticeVector) -> u8 {
    let (x, y) = (&u.entries()[0], &u.entries()[1]);
    if y.is_positive() || (y.is_zero() && x.is_positive()) {
        0
    } else {
        1
    }
}

/// The smooth complete toric surface of a fan given by its rays in cyclic
/// order (either orientation).
///
/// Rays are numbered counterclockwise starting from the first given ray (a
/// clockwise list is reversed first). Chart `sigma{i}` belongs to the cone
/// spanned by rays `i` and `i+1`; its coordinates `x{i}`, `x{i+1}` carry the
/// dual-basis weights, and `x{j}` vanishes along the curve `ray{j}`. The
/// fixed point of chart `sigma{i}` is `pt{i}`.
pub fn from_smooth_complete_fan(rays: &[LatticeVector]) -> Result<WeightAtlas> {
    for r in rays {
        if r.rank() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: r.rank(),
            });
        }
        if !r.is_primitive() {
            return Err(Error::Input(format!("ray {r} is not primitive")));
        }
    }
    for (i, u) in rays.iter().enumerate() {
        for v in &rays[i + 1..] {
            if det2(u, v).is_zero() && u.dot(v).is_positive() {
                return Err(Error::Input(format!("rays {u} and {v} coincide")));
            }
        }
    }
    let k = rays.len();
    if k < 3 {
        return Err(Error::NonComplete(format!(
            "{k} rays cannot positively span the plane"
        )));
    }

    // orient counterclockwise; the given order must be a rotation of the
    // angular order
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        let (u, v) = (&rays[i], &rays[j]);
        half(u)
            .cmp(&half(v))
            .then_with(|| BigInt::zero().cmp(&det2(u, v)))
    });
    let rotation_of = |seq: &[usize]| {
        let start = seq.iter().position(|&i| i == 0).unwrap();
        (0..k).all(|t| seq[(start + t) % k] == t)
    };
    let mut ccw: Vec<LatticeVector> = rays.to_vec();
    if !rotation_of(&order) {
        let reversed: Vec<usize> = order.iter().rev().copied().collect();
        if !rotation_of(&reversed) {
            return Err(Error::Input("rays are not in cyclic order".into()));
        }
        ccw.reverse();
    }

    for i in 0..k {
        let (u, v) = (&ccw[i], &ccw[(i + 1) % k]);
        if !det2(u, v).is_positive() {
            return Err(Error::NonComplete(format!(
                "rays {u} and {v} span an angle of at least π"
            )));
        }
    }
    for i in 0..k {
        let (u, v) = (&ccw[i], &ccw[(i + 1) % k]);
        let d = det2(u, v);
        if !d.is_one() {
            return Err(Error::NonSmooth(
                u.to_string(),
                v.to_string(),
                d.to_string(),
            ));
        }
    }

    let mut charts = Vec::new();
    let mut dense = BTreeMap::new();
    for i in 0..k {
        let j = (i + 1) % k;
        let (u, v) = (&ccw[i], &ccw[j]);
        let (a, b) = (&u.entries()[0], &u.entries()[1]);
        let (c, d) = (&v.entries()[0], &v.entries()[1]);
        // det = 1: m·u = 1, m·v = 0 and m'·u = 0, m'·v = 1
        let m = LatticeVector::new(vec![d.clone(), -c]);
        let m_prime = LatticeVector::new(vec![-b, a.clone()]);
        let (xi, xj) = (format!("x{i}"), format!("x{j}"));
        charts.push(WeightChart {
            id: format!("sigma{i}"),
            coordinates: vec![
                Coordinate {
                    name: xi.clone(),
                    weight: m,
                },
                Coordinate {
                    name: xj.clone(),
                    weight: m_prime,
                },
            ],
        });
        dense.insert(format!("sigma{i}"), BTreeSet::from([xi, xj]));
    }

    let mut orbits = vec![Orbit {
        id: "dense".into(),
        supports: dense,
    }];
    let mut specializations = Vec::new();
    for i in 0..k {
        let prev = (i + k - 1) % k;
        let next = (i + 1) % k;
        orbits.push(Orbit {
            id: format!("ray{i}"),
            supports: BTreeMap::from([
                (format!("sigma{prev}"), BTreeSet::from([format!("x{prev}")])),
                (format!("sigma{i}"), BTreeSet::from([format!("x{next}")])),
            ]),
        });
        specializations.push(("dense".to_string(), format!("ray{i}")));
    }
    for i in 0..k {
        let j = (i + 1) % k;
        orbits.push(Orbit {
            id: format!("pt{i}"),
            supports: BTreeMap::from([(format!("sigma{i}"), BTreeSet::new())]),
        });
        specializations.push((format!("ray{i}"), format!("pt{i}")));
        specializations.push((format!("ray{j}"), format!("pt{i}")));
    }

    Ok(WeightAtlas {
        rank: 2,
        charts,
        orbits,
        specializations,
        orbit_complete: true,
    })
}
