//! Canonical text documents for graphs, ray bundles, minor models, and
//! quasi-isometry certificates.
//!
//! Every document serializes to compact JSON with a trailing newline and a
//! fixed field order, so identical inputs produce byte-identical files.
//! Decoding re-validates everything and reports the list position of the
//! first offending entry.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use thicket_core::bounds::{BoundsError, QiCertificate, Ratio64, SpecRef};
use thicket_core::builder::MinorModel;
use thicket_core::families::FamilyError;
use thicket_core::graph::{GraphError, PathSeq};
use thicket_core::rays::RayBundle;
use thicket_core::{FiniteGraph, VertexId};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("vertex list entry {index}: {cause}")]
    BadVertex { index: usize, cause: GraphError },
    #[error("edge list entry {index}: {cause}")]
    BadEdge { index: usize, cause: GraphError },
    #[error("key {key:?} is not a vertex id")]
    BadKey { key: String },
    #[error("{0}")]
    Graph(GraphError),
    #[error("{0}")]
    Family(FamilyError),
    #[error("{0}")]
    Bounds(BoundsError),
    #[error("ratio {text:?} is not an integer or a p/q fraction")]
    BadRatio { text: String },
    #[error("pattern edge ({first},{second}) has no witness edge in the host")]
    ModelWithoutWitness { first: VertexId, second: VertexId },
}

impl From<GraphError> for FormatError {
    fn from(e: GraphError) -> Self {
        FormatError::Graph(e)
    }
}

impl From<FamilyError> for FormatError {
    fn from(e: FamilyError) -> Self {
        FormatError::Family(e)
    }
}

impl From<BoundsError> for FormatError {
    fn from(e: BoundsError) -> Self {
        FormatError::Bounds(e)
    }
}

/// Compact single-line JSON plus trailing newline: the one true encoding
/// for every document this crate writes.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("documents serialize infallibly");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId)>,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
}

impl GraphDoc {
    pub fn from_graph(g: &FiniteGraph) -> GraphDoc {
        GraphDoc {
            vertices: g.vertices().to_vec(),
            edges: g.edges().to_vec(),
            labels: g
                .labels()
                .iter()
                .map(|(v, text)| (v.to_string(), text.clone()))
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<FiniteGraph, FormatError> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        for (index, &v) in self.vertices.iter().enumerate() {
            if !seen.insert(v) {
                return Err(FormatError::BadVertex {
                    index,
                    cause: GraphError::DuplicateVertex(v),
                });
            }
        }
        let mut edge_seen: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        for (index, &(u, v)) in self.edges.iter().enumerate() {
            let cause = if u == v {
                Some(GraphError::SelfLoop(u))
            } else if !seen.contains(&u) {
                Some(GraphError::UnknownVertex(u))
            } else if !seen.contains(&v) {
                Some(GraphError::UnknownVertex(v))
            } else if !edge_seen.insert((u.min(v), u.max(v))) {
                Some(GraphError::DuplicateEdge(u.min(v), u.max(v)))
            } else {
                None
            };
            if let Some(cause) = cause {
                return Err(FormatError::BadEdge { index, cause });
            }
        }
        let g = FiniteGraph::new(self.vertices.iter().copied(), self.edges.iter().copied())?;
        let labels = self
            .labels
            .iter()
            .map(|(key, text)| match key.parse::<VertexId>() {
                Ok(v) => Ok((v, text.clone())),
                Err(_) => Err(FormatError::BadKey { key: key.clone() }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(g.with_labels(labels)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleDoc {
    pub r_star: u32,
    pub rays: Vec<Vec<VertexId>>,
}

impl BundleDoc {
    pub fn from_bundle(b: &RayBundle) -> BundleDoc {
        BundleDoc {
            r_star: b.r_star,
            rays: b.rays.iter().map(|r| r.vertices().to_vec()).collect(),
        }
    }

    pub fn to_bundle(&self) -> Result<RayBundle, FormatError> {
        let rays = self
            .rays
            .iter()
            .map(|r| PathSeq::new(r.iter().copied()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RayBundle { r_star: self.r_star, rays })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDoc {
    pub pattern: GraphDoc,
    pub host: GraphDoc,
    pub branch_sets: BTreeMap<String, Vec<VertexId>>,
    /// One `[a, b, u, v]` per pattern edge `(a, b)`: the lexicographically
    /// smallest host edge with `u` in the branch set of `a` and `v` in the
    /// branch set of `b`.
    pub witnesses: Vec<[VertexId; 4]>,
}

impl ModelDoc {
    pub fn from_model(m: &MinorModel) -> Result<ModelDoc, FormatError> {
        let mut witnesses = Vec::new();
        for &(a, b) in m.pattern.edges() {
            let set_a = &m.branch_sets[&a];
            let set_b = &m.branch_sets[&b];
            let witness = m
                .host
                .edges()
                .iter()
                .find_map(|&(u, v)| {
                    if set_a.contains(&u) && set_b.contains(&v) {
                        Some([a, b, u, v])
                    } else if set_a.contains(&v) && set_b.contains(&u) {
                        Some([a, b, v, u])
                    } else {
                        None
                    }
                })
                .ok_or(FormatError::ModelWithoutWitness { first: a, second: b })?;
            witnesses.push(witness);
        }
        Ok(ModelDoc {
            pattern: GraphDoc::from_graph(&m.pattern),
            host: GraphDoc::from_graph(&m.host),
            branch_sets: m
                .branch_sets
                .iter()
                .map(|(p, set)| (p.to_string(), set.iter().copied().collect()))
                .collect(),
            witnesses,
        })
    }

    pub fn to_model(&self) -> Result<MinorModel, FormatError> {
        let pattern = self.pattern.to_graph()?;
        let host = self.host.to_graph()?;
        let branch_sets = self
            .branch_sets
            .iter()
            .map(|(key, vs)| match key.parse::<VertexId>() {
                Ok(p) => Ok((p, vs.iter().copied().collect())),
                Err(_) => Err(FormatError::BadKey { key: key.clone() }),
            })
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        Ok(MinorModel { pattern, host, branch_sets })
    }
}

/// Rational wire form: a JSON integer when the value is integral, the
/// string `"p/q"` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatioRepr(pub Ratio64);

pub fn parse_ratio(text: &str) -> Result<Ratio64, FormatError> {
    let bad = || FormatError::BadRatio { text: text.to_string() };
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Ratio64::new(p, q))
        }
        None => {
            let n: i64 = text.trim().parse().map_err(|_| bad())?;
            Ok(Ratio64::from_integer(n))
        }
    }
}

pub fn ratio_display(r: Ratio64) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Serialize for RatioRepr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            serializer.serialize_i64(self.0.to_integer())
        } else {
            serializer.serialize_str(&ratio_display(self.0))
        }
    }
}

impl<'de> Deserialize<'de> for RatioRepr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Int(i64),
            Text(String),
        }
        match Wire::deserialize(deserializer)? {
            Wire::Int(n) => Ok(RatioRepr(Ratio64::from_integer(n))),
            Wire::Text(s) => parse_ratio(&s)
                .map(RatioRepr)
                .map_err(|e| D::Error::custom(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub gamma: RatioRepr,
    pub c: RatioRepr,
    pub map: BTreeMap<String, VertexId>,
    pub source: String,
    pub target: String,
}

impl CertificateDoc {
    pub fn from_certificate(cert: &QiCertificate) -> CertificateDoc {
        CertificateDoc {
            gamma: RatioRepr(cert.gamma),
            c: RatioRepr(cert.c),
            map: cert
                .map
                .iter()
                .map(|(s, t)| (s.to_string(), *t))
                .collect(),
            source: cert.source.id_string(),
            target: cert.target.id_string(),
        }
    }

    pub fn to_certificate(&self) -> Result<QiCertificate, FormatError> {
        let map = self
            .map
            .iter()
            .map(|(key, &t)| match key.parse::<VertexId>() {
                Ok(s) => Ok((s, t)),
                Err(_) => Err(FormatError::BadKey { key: key.clone() }),
            })
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        Ok(QiCertificate::new(
            self.gamma.0,
            self.c.0,
            map,
            SpecRef::parse_id(&self.source)?,
            SpecRef::parse_id(&self.target)?,
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use thicket_core::bounds::identity_certificate;
    use thicket_core::families::{cut_window, FamilySpec};
    use thicket_core::oracle::verify_model;

    #[test]
    fn graph_doc_round_trips_with_labels() {
        let w = cut_window(&FamilySpec::grid_z2(), 2).unwrap();
        let doc = GraphDoc::from_graph(&w.graph);
        let text = to_canonical_json(&doc);
        assert!(text.starts_with("{\"vertices\":[0,"));
        assert!(text.ends_with('\n'));
        let back: GraphDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_graph().unwrap(), w.graph);
    }

    #[test]
    fn graph_doc_decode_reports_positions() {
        let doc = GraphDoc {
            vertices: vec![0, 1, 1],
            edges: vec![],
            labels: BTreeMap::new(),
        };
        let err = doc.to_graph().unwrap_err();
        assert!(matches!(err, FormatError::BadVertex { index: 2, .. }), "{err}");

        let doc = GraphDoc {
            vertices: vec![0, 1, 2],
            edges: vec![(0, 1), (1, 1)],
            labels: BTreeMap::new(),
        };
        assert!(matches!(doc.to_graph().unwrap_err(), FormatError::BadEdge { index: 1, .. }));

        let doc = GraphDoc {
            vertices: vec![0, 1],
            edges: vec![(0, 7)],
            labels: BTreeMap::new(),
        };
        assert!(matches!(doc.to_graph().unwrap_err(), FormatError::BadEdge { index: 0, .. }));

        let doc = GraphDoc {
            vertices: vec![0, 1],
            edges: vec![(0, 1), (1, 0)],
            labels: BTreeMap::new(),
        };
        assert!(matches!(doc.to_graph().unwrap_err(), FormatError::BadEdge { index: 1, .. }));

        let doc = GraphDoc {
            vertices: vec![0],
            edges: vec![],
            labels: [(String::from("zero"), String::from("x"))].into(),
        };
        assert!(matches!(doc.to_graph().unwrap_err(), FormatError::BadKey { .. }));
    }

    #[test]
    fn bundle_doc_round_trips() {
        use thicket_core::rays::{disjoint_rays, verify_bundle};
        let w = cut_window(&FamilySpec::grid_z2(), 6).unwrap();
        let bundle = disjoint_rays(&w, 4, 3).unwrap().expect("grid has four rays");
        let doc = BundleDoc::from_bundle(&bundle);
        let back = doc.to_bundle().unwrap();
        verify_bundle(&w, &back).unwrap();
        assert_eq!(BundleDoc::from_bundle(&back), doc);
    }

    #[test]
    fn model_doc_round_trips_and_reverifies() {
        use thicket_core::builder::build_km_minor;
        use thicket_core::rays::disjoint_rays;
        let w = cut_window(&FamilySpec::grid_z2(), 6).unwrap();
        let bundle = disjoint_rays(&w, 3, 3).unwrap().expect("grid has three rays");
        let model = build_km_minor(&w, &bundle).unwrap();
        let doc = ModelDoc::from_model(&model).unwrap();
        assert_eq!(doc.witnesses.len(), model.pattern.edge_count());
        let back = doc.to_model().unwrap();
        verify_model(&back).unwrap();
        assert_eq!(back, model);

        let text = to_canonical_json(&doc);
        let redecoded: ModelDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(redecoded, doc);
    }

    #[test]
    fn ratio_wire_form_is_integer_or_fraction() {
        assert_eq!(to_canonical_json(&RatioRepr(Ratio64::from_integer(3))), "3\n");
        assert_eq!(to_canonical_json(&RatioRepr(Ratio64::new(3, 2))), "\"3/2\"\n");
        let r: RatioRepr = serde_json::from_str("\"4/2\"").unwrap();
        assert_eq!(r.0, Ratio64::from_integer(2));
        let r: RatioRepr = serde_json::from_str("7").unwrap();
        assert_eq!(r.0, Ratio64::from_integer(7));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn certificate_doc_round_trips() {
        let w = cut_window(&FamilySpec::ladder(), 4).unwrap();
        let cert = identity_certificate(
            &w,
            Ratio64::from_integer(1),
            Ratio64::from_integer(1),
        )
        .unwrap();
        let doc = CertificateDoc::from_certificate(&cert);
        assert_eq!(doc.source, "ladder");
        let back = doc.to_certificate().unwrap();
        assert_eq!(back, cert);
    }
}
