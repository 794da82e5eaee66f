use std::collections::HashSet;

use num_traits::Zero;

use super::graph::{Annotations, Edge, Gluing, Segment, SkeletonGraph, Vertex};
use super::SkeletonError;
use crate::pline::Type2Point;
use crate::schottky::SchottkyFigure;
use crate::valtower::{Subfield, SubfieldLattice};
use crate::Rat;

fn vertex(id: usize, point: Type2Point) -> Vertex {
    Vertex {
        id,
        point,
        boundary: false,
        annotations: Annotations::default(),
    }
}

/// Convex hull of finitely many type-2 points: the closure under meets,
/// with an edge from every vertex to its parent.
pub fn convex_hull_tree(points: &[Type2Point]) -> Result<SkeletonGraph, SkeletonError> {
    let first = points.first().ok_or(SkeletonError::Empty)?;
    if points.iter().any(|p| !p.center.same_tower(&first.center)) {
        return Err(SkeletonError::TowerMismatch);
    }
    let mut pts: Vec<Type2Point> = Vec::new();
    for p in points {
        if !pts.iter().any(|q| q.equals(p)) {
            pts.push(p.clone());
        }
    }
    loop {
        let mut fresh = Vec::new();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let m = pts[i].meet(&pts[j]);
                if !pts.iter().chain(&fresh).any(|q| q.equals(&m)) {
                    fresh.push(m);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        pts.extend(fresh);
    }
    let vertices: Vec<Vertex> = pts
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, p)| vertex(i, p))
        .collect();
    let mut edges = Vec::new();
    for (j, y) in pts.iter().enumerate() {
        let parent = pts
            .iter()
            .enumerate()
            .filter(|(i, x)| *i != j && x.leq(y))
            .max_by(|a, b| a.1.vradius.cmp(&b.1.vradius));
        if let Some((i, x)) = parent {
            let seg = Segment {
                from: x.clone(),
                to: y.clone(),
            };
            edges.push(Edge {
                id: edges.len(),
                ends: (i, j),
                length: Some(seg.length()),
                chain: vec![seg],
            });
        }
    }
    Ok(SkeletonGraph {
        vertices,
        edges,
        gluing: Vec::new(),
        base_ram_index: 1,
    })
}

/// Inserts every point of `v(F^×)`-radius in the interior of each edge.
pub fn subdivide_mult1(tree: &SkeletonGraph, field: &Subfield) -> SkeletonGraph {
    let step = Rat::new(1.into(), (field.ram_index() as i64).into());
    let mut out = SkeletonGraph {
        edges: Vec::new(),
        ..tree.clone()
    };
    let mut next_id = tree.vertices.iter().map(|v| v.id + 1).max().unwrap_or(0);
    for e in &tree.edges {
        let mut cur = e.ends.0;
        let mut pieces: Vec<Segment> = Vec::new();
        let emit = |out: &mut SkeletonGraph, a: usize, b: usize, chain: Vec<Segment>| {
            let length = chain
                .iter()
                .map(Segment::length)
                .fold(Rat::zero(), |x, y| x + y);
            let id = out.edges.len();
            out.edges.push(Edge {
                id,
                ends: (a, b),
                length: Some(length),
                chain,
            });
        };
        for seg in &e.chain {
            let (ra, rb) = (&seg.from.vradius, &seg.to.vradius);
            let (lo, hi) = if ra <= rb { (ra, rb) } else { (rb, ra) };
            let mut radii = Vec::new();
            let mut r = (lo / &step).floor() * &step + &step;
            while &r < hi {
                radii.push(r.clone());
                r += &step;
            }
            if ra > rb {
                radii.reverse();
            }
            let mut from = seg.from.clone();
            for r in radii {
                let t = (&r - ra) / (rb - ra);
                let p = seg.point_at(&t);
                pieces.push(Segment {
                    from: from.clone(),
                    to: p.clone(),
                });
                out.vertices.push(vertex(next_id, p.clone()));
                emit(&mut out, cur, next_id, std::mem::take(&mut pieces));
                cur = next_id;
                next_id += 1;
                from = p;
            }
            pieces.push(Segment {
                from,
                to: seg.to.clone(),
            });
        }
        emit(&mut out, cur, e.ends.1, pieces);
    }
    out
}

/// Hull of the `2g` disc boundary points, with the points of the discs
/// `D⁺(γᵢ⁻¹)` marked as boundary, subdivided over `subdivide` if given.
pub fn fundamental_skeleton(
    fig: &SchottkyFigure,
    subdivide: Option<&Subfield>,
) -> Result<SkeletonGraph, SkeletonError> {
    let letters = fig.letters();
    let pts: Vec<Type2Point> = letters
        .iter()
        .map(|&l| fig.plus_disc(l).boundary_point())
        .collect();
    let tree = convex_hull_tree(&pts)?;
    let mut g = match subdivide {
        Some(f) => subdivide_mult1(&tree, f),
        None => tree,
    };
    for (l, p) in letters.iter().zip(&pts) {
        if l.inv {
            let id = g.find_vertex(p).expect("input point is a hull vertex");
            g.vertex_mut(id).unwrap().boundary = true;
        }
    }
    Ok(g)
}

/// Identifies each boundary vertex `η(D⁺(γᵢ⁻¹))` with its image under
/// `γᵢ`, which must be a vertex.
pub fn glue(graph: &SkeletonGraph, fig: &SchottkyFigure) -> Result<SkeletonGraph, SkeletonError> {
    let mut g = graph.clone();
    for (i, gen) in fig.generators().iter().enumerate() {
        let l = crate::schottky::Letter { gen: i, inv: true };
        let b_point = fig.plus_disc(l).boundary_point();
        let b = g
            .find_vertex(&b_point)
            .ok_or_else(|| SkeletonError::GluingMismatch(gen.name.clone()))?;
        let image = gen.matrix.act_type2(&b_point);
        let t = g
            .vertices
            .iter()
            .find(|v| v.id != b && !v.boundary && v.point.equals(&image))
            .map(|v| v.id)
            .ok_or_else(|| SkeletonError::GluingMismatch(gen.name.clone()))?;
        for e in g.edges.iter_mut() {
            if e.ends.0 == b {
                e.ends.0 = t;
            }
            if e.ends.1 == b {
                e.ends.1 = t;
            }
        }
        g.vertices.retain(|v| v.id != b);
        g.gluing.push(Gluing {
            boundary: b,
            generator: gen.name.clone(),
            target: t,
        });
    }
    Ok(g)
}

/// The skeleton of the curve: fundamental skeleton with ends identified.
pub fn glue_mumford(
    fig: &SchottkyFigure,
    lattice: Option<&SubfieldLattice>,
) -> Result<SkeletonGraph, SkeletonError> {
    let mut g = glue(&fundamental_skeleton(fig, lattice.map(|l| l.top()))?, fig)?;
    if let Some(l) = lattice {
        g.base_ram_index = l.base_ram_index();
    }
    Ok(g)
}

/// Joins the edges `a-v` and `v-b` at a valence-two vertex.
fn splice(g: &mut SkeletonGraph, v: usize) {
    let inc = g.incident(v);
    debug_assert_eq!(inc.len(), 2);
    let e1 = g.edge(inc[0]).unwrap().clone();
    let e2 = g.edge(inc[1]).unwrap().clone();
    let a = e1.other_end(v);
    let b = e2.other_end(v);
    let mut chain: Vec<Segment> = e1.chain_from(a);
    chain.extend(e2.chain_from(v));
    let length = match (&e1.length, &e2.length) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    let id = g.next_edge_id();
    g.edges.retain(|e| e.id != e1.id && e.id != e2.id);
    g.edges.push(Edge {
        id,
        ends: (a, b),
        length,
        chain,
    });
    g.vertices.retain(|x| x.id != v);
}

/// Removes leaves and suppresses valence-two vertices until neither is
/// left. Every component has genus zero, so nothing else is contracted.
pub fn stable_contraction(graph: &SkeletonGraph) -> SkeletonGraph {
    let mut g = graph.clone();
    loop {
        if g.vertices.len() <= 1 {
            return g;
        }
        let leaf = g.vertices.iter().map(|v| v.id).find(|&v| g.valence(v) <= 1);
        if let Some(v) = leaf {
            g.edges.retain(|e| e.ends.0 != v && e.ends.1 != v);
            g.vertices.retain(|x| x.id != v);
            continue;
        }
        let two = g
            .vertices
            .iter()
            .map(|v| v.id)
            .find(|&v| g.valence(v) == 2 && g.incident(v).len() == 2);
        match two {
            Some(v) => splice(&mut g, v),
            None => return g,
        }
    }
}

/// Contracts the edge between `v` and its neighbour `u`, merging `v` into
/// `u`; other edges at `v` are extended through the contracted edge.
pub fn contract_into(g: &mut SkeletonGraph, v: usize, via: usize) {
    let e = g.edge(via).unwrap().clone();
    let u = e.other_end(v);
    let lead = e.chain_from(u);
    let lead_len = e.length.clone();
    g.edges.retain(|f| f.id != via);
    for f in g.edges.iter_mut() {
        if f.ends.0 != v && f.ends.1 != v {
            continue;
        }
        if f.ends.0 == v && f.ends.1 == v {
            let mut chain = lead.clone();
            chain.extend(f.chain.iter().cloned());
            chain.extend(e.chain_from(v));
            f.chain = chain;
            f.ends = (u, u);
        } else if f.ends.0 == v {
            let mut chain = lead.clone();
            chain.extend(f.chain.iter().cloned());
            f.chain = chain;
            f.ends.0 = u;
        } else {
            f.chain.extend(e.chain_from(v));
            f.ends.1 = u;
        }
        if let (Some(a), Some(b)) = (&f.length, &lead_len) {
            f.length = Some(a + b);
        }
    }
    g.vertices.retain(|x| x.id != v);
}

/// Contracts every vertex whose field of definition is the top field into
/// a neighbour, preferring neighbours defined over a smaller field.
pub fn contract_l_only(graph: &SkeletonGraph, top: &str) -> SkeletonGraph {
    let mut g = graph.clone();
    let is_top = |g: &SkeletonGraph, id: usize| {
        g.vertex(id)
            .and_then(|v| v.annotations.field_of_definition.as_deref())
            == Some(top)
    };
    let mut stuck = HashSet::new();
    loop {
        let Some(v) = g
            .vertices
            .iter()
            .map(|x| x.id)
            .find(|&x| is_top(&g, x) && !stuck.contains(&x))
        else {
            break;
        };
        let inc: Vec<usize> = g
            .incident(v)
            .into_iter()
            .filter(|&e| !g.edge(e).unwrap().is_loop())
            .collect();
        let via = inc
            .iter()
            .copied()
            .find(|&e| !is_top(&g, g.edge(e).unwrap().other_end(v)))
            .or_else(|| inc.first().copied());
        match via {
            Some(e) => contract_into(&mut g, v, e),
            None => {
                stuck.insert(v);
            }
        }
    }
    g
}
