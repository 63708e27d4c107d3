//! The full analysis of an atlas, and its JSON, text and DOT renderings.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::atlas::{save_atlas, validate_atlas, WeightAtlas};
use crate::attractor::{attractor, pi0_face_check, stratify, AttractorDescription, Stratification};
use crate::error::{Error, Result};
use crate::lambda::{is_lambdafiable, lambdafiability_report, LambdaEntry, LinearFunctional};
use crate::lattice::LatticeVector;
use crate::magnet::{enumerate_pure_magnets, hasse_diagram, purify, weight_set, StableSet};
use crate::monoid::MonoidPresentation;

pub const SCHEMA_VERSION: u32 = 1;
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasSummary {
    pub rank: usize,
    pub chart_count: usize,
    pub orbit_count: usize,
    pub orbit_complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HasseSummary {
    /// `(lower, upper)` indices into `pure_magnets`.
    pub edges: Vec<(usize, usize)>,
    pub edge_count: usize,
    /// Edges touching neither the trivial magnet nor Φ.
    pub intermediate_edge_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub engine_version: String,
    /// SHA-256 of the canonical atlas JSON.
    pub input_digest: String,
    pub atlas: AtlasSummary,
    pub phi: Vec<LatticeVector>,
    pub pure_magnet_count: usize,
    /// Entry `k` counts pure magnets with `k` elements.
    pub cardinality_histogram: Vec<usize>,
    pub pure_magnets: Vec<StableSet>,
    pub hasse: HasseSummary,
    pub attractors: Vec<AttractorDescription>,
    pub stratification: Option<Stratification>,
    /// Outcome of the unit-face component check per pure magnet.
    pub face_checks: Option<Vec<bool>>,
    pub lambdafiable_count: usize,
    pub non_lambdafiable_count: usize,
    pub lambdafiability: Vec<LambdaEntry>,
}

pub fn input_digest(atlas: &WeightAtlas) -> String {
    hex::encode(Sha256::digest(save_atlas(atlas).as_bytes()))
}

fn ensure_valid(atlas: &WeightAtlas) -> Result<()> {
    let violations = validate_atlas(atlas);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidAtlas(violations))
    }
}

pub fn analyze(atlas: &WeightAtlas) -> Result<AnalysisReport> {
    ensure_valid(atlas)?;
    let phi = weight_set(atlas);
    let pure = enumerate_pure_magnets(&phi)?;

    let mut histogram = vec![0; phi.len() + 1];
    for e in &pure {
        histogram[e.len()] += 1;
    }

    let hasse = hasse_diagram(&pure);
    let extreme = |i: usize| pure[i].is_empty() || pure[i].len() == phi.len();
    let intermediate_edge_count = hasse
        .edges
        .iter()
        .filter(|(a, b)| !extreme(*a) && !extreme(*b))
        .count();

    let attractors: Vec<AttractorDescription> =
        pure.par_iter().map(|e| attractor(e, atlas)).collect();
    let (stratification, face_checks) = if atlas.orbit_complete {
        let checks = pure
            .par_iter()
            .map(|e| pi0_face_check(e, atlas))
            .collect::<Result<_>>()?;
        (Some(stratify(atlas)?), Some(checks))
    } else {
        (None, None)
    };
    let lambda = lambdafiability_report(&pure, &phi)?;

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        engine_version: ENGINE_VERSION.to_string(),
        input_digest: input_digest(atlas),
        atlas: AtlasSummary {
            rank: atlas.rank,
            chart_count: atlas.charts.len(),
            orbit_count: atlas.orbits.len(),
            orbit_complete: atlas.orbit_complete,
        },
        phi: phi.weights().to_vec(),
        pure_magnet_count: pure.len(),
        cardinality_histogram: histogram,
        hasse: HasseSummary {
            edge_count: hasse.edges.len(),
            intermediate_edge_count,
            edges: hasse.edges,
        },
        pure_magnets: pure,
        attractors,
        stratification,
        face_checks,
        lambdafiable_count: lambda.lambdafiable_count,
        non_lambdafiable_count: lambda.non_lambdafiable_count,
        lambdafiability: lambda.entries,
    })
}

/// Where an arbitrary magnet `L = [G⟩` lands among the pure magnets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub generators: Vec<LatticeVector>,
    pub purification: StableSet,
    /// Whether `L = [E(L)⟩`.
    pub is_pure: bool,
    pub attractor: AttractorDescription,
    pub witness: Option<LinearFunctional>,
}

pub fn classify(atlas: &WeightAtlas, generators: &[LatticeVector]) -> Result<Classification> {
    ensure_valid(atlas)?;
    let phi = weight_set(atlas);
    let monoid = MonoidPresentation::new(atlas.rank, generators.iter().cloned())?;
    let purification = purify(&monoid, &phi)?;
    let is_pure = purification.monoid(atlas.rank).same_monoid(&monoid)?;
    Ok(Classification {
        generators: generators.to_vec(),
        attractor: attractor(&purification, atlas),
        witness: is_lambdafiable(&purification, &phi)?,
        purification,
        is_pure,
    })
}

pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// One chart piece in the usual notation: the chart's fixed point `{c}`,
/// a line `A^1_w`, or a higher affine space `A^k`.
fn chart_piece(atlas: &WeightAtlas, chart: &str, kept: &[String]) -> String {
    match kept {
        [] => format!("{{{chart}}}"),
        [one] => {
            let w = atlas
                .chart(chart)
                .and_then(|c| c.coordinate(one))
                .map(|c| c.weight.to_string());
            format!("A^1_{} in chart {chart}", w.unwrap_or_default())
        }
        more => format!("A^{} in chart {chart}", more.len()),
    }
}

/// The attractor as a disjoint union of components, each a union of chart
/// pieces, e.g. `{x} ⊔ {y} ⊔ A^1_(0,1) in chart z`.
pub fn describe_attractor(attr: &AttractorDescription, atlas: &WeightAtlas) -> String {
    let Some(blocks) = &attr.chart_components else {
        return atlas
            .charts
            .iter()
            .map(|c| chart_piece(atlas, &c.id, attr.chart_part(&c.id)))
            .collect::<Vec<_>>()
            .join(", ");
    };
    let pieces: Vec<String> = blocks
        .iter()
        .map(|block| {
            let inner: Vec<String> = block
                .iter()
                .map(|c| chart_piece(atlas, c, attr.chart_part(c)))
                .collect();
            if inner.len() == 1 || blocks.len() == 1 {
                inner.join(" ∪ ")
            } else {
                format!("({})", inner.join(" ∪ "))
            }
        })
        .collect();
    pieces.join(" ⊔ ")
}

fn component_note(attr: &AttractorDescription) -> String {
    match attr.component_count() {
        Some(1) => "1 component".to_string(),
        Some(n) => format!("{n} components"),
        None => "components unavailable".to_string(),
    }
}

pub fn render_text(report: &AnalysisReport, atlas: &WeightAtlas) -> String {
    let mut out = String::new();
    let phi: Vec<String> = report.phi.iter().map(ToString::to_string).collect();
    let _ = writeln!(
        out,
        "atlas: rank {}, {} charts, {} orbits",
        report.atlas.rank, report.atlas.chart_count, report.atlas.orbit_count
    );
    let _ = writeln!(out, "Φ = {{{}}}", phi.join(", "));
    let hist: Vec<String> = report
        .cardinality_histogram
        .iter()
        .map(ToString::to_string)
        .collect();
    let _ = writeln!(
        out,
        "pure magnets: {} (by size: {})",
        report.pure_magnet_count,
        hist.join(", ")
    );
    let _ = writeln!(
        out,
        "Hasse edges: {} ({} intermediate)",
        report.hasse.edge_count, report.hasse.intermediate_edge_count
    );
    let _ = writeln!(
        out,
        "lambdafiable: {}, not lambdafiable: {}",
        report.lambdafiable_count, report.non_lambdafiable_count
    );
    let _ = writeln!(out, "\nattractors:");
    for (i, attr) in report.attractors.iter().enumerate() {
        let witness = match &report.lambdafiability[i].witness {
            Some(f) => format!("f = {f}"),
            None => "no f".to_string(),
        };
        let _ = writeln!(
            out,
            "  {}: {}; {}; {}",
            attr.magnet,
            describe_attractor(attr, atlas),
            component_note(attr),
            witness
        );
    }
    if let Some(strat) = &report.stratification {
        let _ = writeln!(out, "\nstrata:");
        for s in &strat.strata {
            let _ = writeln!(out, "  {}: {}", s.magnet, s.orbits.join(", "));
        }
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Hasse diagram of the pure magnets, bottom to top.
pub fn render_dot_poset(report: &AnalysisReport) -> String {
    let mut out = String::from("digraph pure_magnets {\n  rankdir=BT;\n  node [shape=box];\n");
    for (i, e) in report.pure_magnets.iter().enumerate() {
        let _ = writeln!(out, "  n{i} [label=\"{}\"];", dot_escape(&e.label()));
    }
    for (a, b) in &report.hasse.edges {
        let _ = writeln!(out, "  n{a} -> n{b};");
    }
    out.push_str("}\n");
    out
}

/// The lattice of attractors with their chart pieces and component counts.
/// Magnets that index a stratum are drawn with a double border.
pub fn render_dot_strata(report: &AnalysisReport, atlas: &WeightAtlas) -> String {
    let mut out = String::from("digraph attractors {\n  rankdir=BT;\n  node [shape=box];\n");
    let minimal: Vec<&StableSet> = report
        .stratification
        .iter()
        .flat_map(|s| s.strata.iter().map(|st| &st.magnet))
        .collect();
    for (i, attr) in report.attractors.iter().enumerate() {
        let label = format!(
            "{}\\n{}\\n{}",
            attr.magnet,
            describe_attractor(attr, atlas),
            component_note(attr)
        );
        let style = if minimal.contains(&&attr.magnet) {
            ", peripheries=2"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}\"{style}];",
            label.replace('"', "\\\"")
        );
    }
    for (a, b) in &report.hasse.edges {
        let _ = writeln!(out, "  n{a} -> n{b};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::builtin_p2_double_scalar;

    #[test]
    fn p2_counts() {
        let r = analyze(&builtin_p2_double_scalar()).unwrap();
        assert_eq!(r.pure_magnet_count, 29);
        assert_eq!(r.cardinality_histogram, vec![1, 6, 9, 6, 6, 0, 1]);
        assert_eq!((r.lambdafiable_count, r.non_lambdafiable_count), (13, 16));
        assert_eq!(
            (r.hasse.edge_count, r.hasse.intermediate_edge_count),
            (60, 48)
        );
        assert!(r.face_checks.unwrap().iter().all(|&ok| ok));
    }

    #[test]
    fn text_uses_chart_pieces() {
        let atlas = builtin_p2_double_scalar();
        let r = analyze(&atlas).unwrap();
        let i = r
            .pure_magnets
            .iter()
            .position(|e| e.label() == "[(0,1)⟩")
            .unwrap();
        assert_eq!(
            describe_attractor(&r.attractors[i], &atlas),
            "A^1_(0,1) in chart z ⊔ {y} ⊔ {x}"
        );
    }

    #[test]
    fn classification_examples() {
        let atlas = builtin_p2_double_scalar();
        let c = classify(&atlas, &[[1, 1].into()]).unwrap();
        assert!(c.purification.is_empty() && !c.is_pure);
        assert_eq!(c.attractor.component_count(), Some(3));
        let c = classify(&atlas, &[[0, 1].into()]).unwrap();
        assert!(c.is_pure && c.witness.is_none());
        let c = classify(&atlas, &[[0, 1].into(), [0, -1].into(), [1, 0].into()]).unwrap();
        assert_eq!(c.purification.len(), 4);
        // (1,-1) = (1,0) + (0,-1), so the generated monoid is already pure
        assert!(c.is_pure);
        assert_eq!(c.attractor.component_count(), Some(2));
    }
}
