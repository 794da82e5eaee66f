use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::pline::Type2Point;
use crate::scalar::{rat_short, rat_to_string};
use crate::Rat;

/// Per-vertex data filled in by the analysis passes.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Annotations {
    /// Multiplicity over each lattice field, by field name.
    pub multiplicity: BTreeMap<String, u64>,
    /// Multiplicity over the base field `K`.
    pub base_multiplicity: Option<u64>,
    pub field_of_definition: Option<String>,
    /// Other lattice fields of the same degree over which the point is
    /// also defined.
    pub alternative_fields: Vec<String>,
    /// `[M : K]` for the field of definition `M`; a divisor bound.
    pub quotient_bound: Option<u64>,
    /// Number of edge ends at the vertex (informational).
    pub valence: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub id: usize,
    pub point: Type2Point,
    /// White vertex: boundary point of the fundamental domain.
    pub boundary: bool,
    pub annotations: Annotations,
}

/// A straight piece of the tree, traversed from `from` to `to`; one end is
/// an ancestor of the other.
#[derive(Clone, Debug)]
pub struct Segment {
    pub from: Type2Point,
    pub to: Type2Point,
}

impl Segment {
    pub fn reversed(&self) -> Segment {
        Segment {
            from: self.to.clone(),
            to: self.from.clone(),
        }
    }

    /// The point at parameter `t ∈ [0, 1]` from `from` to `to`.
    pub fn point_at(&self, t: &Rat) -> Type2Point {
        let (a, b) = (&self.from, &self.to);
        let r = &a.vradius + t * (&b.vradius - &a.vradius);
        let center = if a.vradius <= b.vradius {
            b.center.clone()
        } else {
            a.center.clone()
        };
        Type2Point::new(center, r)
    }

    /// Parameter of `y` on the segment, if it lies there.
    pub fn locate(&self, y: &Type2Point) -> Option<Rat> {
        let (a, b) = (&self.from, &self.to);
        let (lo, hi) = if a.vradius <= b.vradius {
            (a, b)
        } else {
            (b, a)
        };
        if !(lo.leq(y) && y.leq(hi)) {
            return None;
        }
        let span = &b.vradius - &a.vradius;
        Some((&y.vradius - &a.vradius) / span)
    }

    pub fn length(&self) -> Rat {
        let d = &self.to.vradius - &self.from.vradius;
        if d < Rat::from_integer(0.into()) {
            -d
        } else {
            d
        }
    }
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub id: usize,
    pub ends: (usize, usize),
    pub length: Option<Rat>,
    /// Tree segments from `ends.0` to `ends.1`.
    pub chain: Vec<Segment>,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends.0 == self.ends.1
    }

    pub fn other_end(&self, v: usize) -> usize {
        if self.ends.0 == v {
            self.ends.1
        } else {
            self.ends.0
        }
    }

    /// The chain traversed starting from `v`.
    pub fn chain_from(&self, v: usize) -> Vec<Segment> {
        if self.ends.0 == v {
            self.chain.clone()
        } else {
            self.chain.iter().rev().map(Segment::reversed).collect()
        }
    }

    /// Interior points of the chain where segments meet.
    pub fn chain_joints(&self) -> Vec<Type2Point> {
        self.chain.iter().skip(1).map(|s| s.from.clone()).collect()
    }

    /// Position of `y` along the chain as `(segment index, parameter)`.
    pub fn locate(&self, y: &Type2Point) -> Option<(usize, Rat)> {
        let zero = Rat::from_integer(0.into());
        let one = Rat::from_integer(1.into());
        self.chain.iter().enumerate().find_map(|(k, s)| {
            s.locate(y)
                .filter(|t| *t > zero && *t < one)
                .map(|t| (k, t))
        })
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Gluing {
    pub boundary: usize,
    pub generator: String,
    pub target: usize,
}

/// A finite graph of type-2 points.
#[derive(Clone, Debug, Default)]
pub struct SkeletonGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub gluing: Vec<Gluing>,
    /// `e(K)`, used to print radii in the base normalization.
    pub base_ram_index: u64,
}

impl SkeletonGraph {
    pub fn vertex(&self, id: usize) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn vertex_mut(&mut self, id: usize) -> Option<&mut Vertex> {
        self.vertices.iter_mut().find(|v| v.id == id)
    }

    /// Vertex whose point equals `p` as a type-2 point.
    pub fn find_vertex(&self, p: &Type2Point) -> Option<usize> {
        self.vertices
            .iter()
            .find(|v| v.point.equals(p))
            .map(|v| v.id)
    }

    pub fn black_vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter().filter(|v| !v.boundary)
    }

    /// Number of edge ends at `v` (a loop counts twice).
    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.ends.0 == v) as usize + (e.ends.1 == v) as usize)
            .sum()
    }

    pub fn incident(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|e| e.ends.0 == v || e.ends.1 == v)
            .map(|e| e.id)
            .collect()
    }

    pub fn edge(&self, id: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn num_components(&self) -> usize {
        let idx: HashMap<usize, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id, i))
            .collect();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for e in &self.edges {
            let (a, b) = (
                find(&mut parent, idx[&e.ends.0]),
                find(&mut parent, idx[&e.ends.1]),
            );
            parent[a] = b;
        }
        (0..self.vertices.len())
            .filter(|&i| find(&mut parent, i) == i)
            .count()
    }

    /// First Betti number `E − V + C`.
    pub fn betti(&self) -> usize {
        self.edges.len() + self.num_components() - self.vertices.len()
    }

    pub fn num_loops(&self) -> usize {
        self.edges.iter().filter(|e| e.is_loop()).count()
    }

    /// Non-loop edges whose removal disconnects the graph.
    pub fn num_bridges(&self) -> usize {
        let c = self.num_components();
        self.edges
            .iter()
            .filter(|e| !e.is_loop())
            .filter(|e| {
                let mut g = self.clone();
                g.edges.retain(|f| f.id != e.id);
                g.num_components() > c
            })
            .count()
    }

    /// Multiset of unordered endpoint pairs, keyed by vertex id.
    pub fn edge_multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for e in &self.edges {
            let k = (e.ends.0.min(e.ends.1), e.ends.0.max(e.ends.1));
            *out.entry(k).or_insert(0) += 1;
        }
        out
    }

    pub fn next_edge_id(&self) -> usize {
        self.edges.iter().map(|e| e.id + 1).max().unwrap_or(0)
    }

    /// Radius in the base normalization `v_K(K^×) = Z`.
    pub fn base_radius(&self, r: &Rat) -> Rat {
        r * Rat::from_integer(self.base_ram_index.max(1).into())
    }

    pub fn label(&self, v: &Vertex) -> String {
        let mut s = format!(
            "{}@{}",
            v.point.center,
            rat_short(&self.base_radius(&v.point.vradius))
        );
        if let Some(m) = v.annotations.base_multiplicity {
            let _ = write!(s, " m={m}");
        }
        if let Some(f) = &v.annotations.field_of_definition {
            let _ = write!(s, " def={f}");
        }
        s
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("graph \"{name}\" {{\n");
        for v in &self.vertices {
            let style = if v.boundary { ", style=dashed" } else { "" };
            let _ = writeln!(
                s,
                "  v{} [label=\"{}\"{}];",
                v.id,
                self.label(v).replace('"', "\\\""),
                style
            );
        }
        for e in &self.edges {
            let len = e
                .length
                .as_ref()
                .map(|l| format!(" [label=\"{}\"]", rat_short(&self.base_radius(l))))
                .unwrap_or_default();
            let _ = writeln!(s, "  v{} -- v{}{};", e.ends.0, e.ends.1, len);
        }
        for g in &self.gluing {
            let _ = writeln!(
                s,
                "  // glued v{} to v{} by {}",
                g.boundary, g.target, g.generator
            );
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GraphJson::from(self)).expect("serializable")
    }
}

#[derive(Serialize)]
struct PointJson {
    center: Vec<String>,
    center_display: String,
    vradius: String,
}

impl From<&Type2Point> for PointJson {
    fn from(p: &Type2Point) -> Self {
        PointJson {
            center: p.center.to_coord_strings(),
            center_display: p.center.to_string(),
            vradius: rat_to_string(&p.vradius),
        }
    }
}

#[derive(Serialize)]
struct VertexJson<'a> {
    id: usize,
    point: PointJson,
    boundary: bool,
    annotations: &'a Annotations,
}

#[derive(Serialize)]
struct EdgeJson {
    id: usize,
    ends: (usize, usize),
    length: Option<String>,
    chain: Vec<(PointJson, PointJson)>,
}

#[derive(Serialize)]
struct GraphJson<'a> {
    base_ram_index: u64,
    vertices: Vec<VertexJson<'a>>,
    edges: Vec<EdgeJson>,
    gluing: &'a [Gluing],
    betti: usize,
}

impl<'a> From<&'a SkeletonGraph> for GraphJson<'a> {
    fn from(g: &'a SkeletonGraph) -> Self {
        GraphJson {
            base_ram_index: g.base_ram_index,
            vertices: g
                .vertices
                .iter()
                .map(|v| VertexJson {
                    id: v.id,
                    point: (&v.point).into(),
                    boundary: v.boundary,
                    annotations: &v.annotations,
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeJson {
                    id: e.id,
                    ends: e.ends,
                    length: e.length.as_ref().map(rat_to_string),
                    chain: e
                        .chain
                        .iter()
                        .map(|s| ((&s.from).into(), (&s.to).into()))
                        .collect(),
                })
                .collect(),
            gluing: &g.gluing,
            betti: g.betti(),
        }
    }
}
