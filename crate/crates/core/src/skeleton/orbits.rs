use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::graph::{Edge, SkeletonGraph};
use super::SkeletonError;
use crate::pline::Type2Point;
use crate::scalar::rat_short;
use crate::schottky::{reduce_point, DescentDatum, SchottkyFigure};
use crate::valtower::{group_closure, GaloisAuto};
use crate::Rat;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeImage {
    pub edge: usize,
    pub image: usize,
    pub reversed: bool,
}

/// How one Galois element acts on the graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElementAction {
    pub element: String,
    pub vertex_map: Vec<(usize, usize)>,
    pub edge_map: Vec<EdgeImage>,
}

impl ElementAction {
    pub fn is_trivial(&self) -> bool {
        self.vertex_map.iter().all(|(a, b)| a == b)
            && self
                .edge_map
                .iter()
                .all(|e| e.edge == e.image && !e.reversed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub element: String,
    /// `None` when the element acts trivially.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub vertex_orbits: Vec<Vec<usize>>,
    pub edge_orbits: Vec<Vec<usize>>,
    pub actions: Vec<ElementAction>,
    pub faithfulness: Vec<Witness>,
    /// Every nontrivial element moves something.
    pub faithful: bool,
    #[serde(skip)]
    pub quotient: SkeletonGraph,
}

fn point_label(g: &SkeletonGraph, p: &Type2Point) -> String {
    format!("({}, {})", p.center, rat_short(&g.base_radius(&p.vradius)))
}

/// `σ(p)` moved back into the fundamental domain.
fn galois_image(
    fig: &SchottkyFigure,
    sigma: &GaloisAuto,
    p: &Type2Point,
    depth: usize,
) -> Result<(Type2Point, crate::schottky::Word), SkeletonError> {
    reduce_point(fig, &p.apply_auto(sigma), depth)
        .map_err(|_| SkeletonError::Inconclusive(p.to_string()))
}

fn third(k: i64) -> Rat {
    Rat::new(k.into(), 3.into())
}

fn edge_image(
    g: &SkeletonGraph,
    fig: &SchottkyFigure,
    sigma: &GaloisAuto,
    e: &Edge,
    depth: usize,
) -> Result<EdgeImage, SkeletonError> {
    let seg = &e.chain[0];
    let half = Rat::new(1.into(), 2.into());
    let (ym, w) = galois_image(fig, sigma, &seg.point_at(&half), depth)?;
    let back = fig.word_matrix(&w).inverse();
    let ya = back.act_type2(&seg.point_at(&third(1)).apply_auto(sigma));
    let yb = back.act_type2(&seg.point_at(&third(2)).apply_auto(sigma));
    let not_stable = || SkeletonError::NotStable(format!("image of edge {}", e.id));
    let f = g
        .edges
        .iter()
        .find(|f| f.locate(&ym).is_some())
        .ok_or_else(not_stable)?;
    let pa = f.locate(&ya).ok_or_else(not_stable)?;
    let pb = f.locate(&yb).ok_or_else(not_stable)?;
    Ok(EdgeImage {
        edge: e.id,
        image: f.id,
        reversed: pa > pb,
    })
}

fn element_action(
    g: &SkeletonGraph,
    fig: &SchottkyFigure,
    sigma: &GaloisAuto,
    depth: usize,
) -> Result<ElementAction, SkeletonError> {
    let vertex_map = g
        .vertices
        .par_iter()
        .map(|v| {
            let (y, _) = galois_image(fig, sigma, &v.point, depth)?;
            let t = g
                .vertices
                .iter()
                .find(|u| !u.boundary && u.point.equals(&y))
                .ok_or_else(|| SkeletonError::NotStable(format!("image of vertex {}", v.point)))?;
            Ok((v.id, t.id))
        })
        .collect::<Result<Vec<_>, SkeletonError>>()?;
    let edge_map = g
        .edges
        .par_iter()
        .map(|e| edge_image(g, fig, sigma, e, depth))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ElementAction {
        element: sigma.name().to_string(),
        vertex_map,
        edge_map,
    })
}

fn witness(
    g: &SkeletonGraph,
    fig: &SchottkyFigure,
    sigma: &GaloisAuto,
    act: &ElementAction,
    depth: usize,
) -> Result<Option<String>, SkeletonError> {
    if let Some((a, b)) = act.vertex_map.iter().find(|(a, b)| a != b) {
        let (pa, pb) = (&g.vertex(*a).unwrap().point, &g.vertex(*b).unwrap().point);
        return Ok(Some(format!(
            "moves vertex {} to {}",
            point_label(g, pa),
            point_label(g, pb)
        )));
    }
    if let Some(m) = act.edge_map.iter().find(|m| m.edge != m.image) {
        return Ok(Some(format!("maps edge {} to edge {}", m.edge, m.image)));
    }
    if let Some(m) = act.edge_map.iter().find(|m| m.reversed) {
        let e = g.edge(m.edge).unwrap();
        for q in e.chain_joints() {
            let (y, _) = galois_image(fig, sigma, &q, depth)?;
            if !y.equals(&q) {
                return Ok(Some(format!(
                    "reverses edge {}: {} ↦ {}",
                    e.id,
                    point_label(g, &q),
                    point_label(g, &y)
                )));
            }
        }
        return Ok(Some(format!("reverses edge {}", e.id)));
    }
    Ok(None)
}

fn orbits_from(ids: &[usize], maps: &[Vec<(usize, usize)>]) -> Vec<Vec<usize>> {
    let mut rep: BTreeMap<usize, usize> = ids.iter().map(|&i| (i, i)).collect();
    fn find(rep: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let mut r = x;
        while rep[&r] != r {
            r = rep[&r];
        }
        r
    }
    for m in maps {
        for &(a, b) in m {
            let (ra, rb) = (find(&mut rep, a), find(&mut rep, b));
            if ra != rb {
                rep.insert(ra.max(rb), ra.min(rb));
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &i in ids {
        let r = find(&mut rep, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Galois action on a glued skeleton: orbits, a faithfulness report, and
/// the quotient graph.
pub fn galois_orbits(
    graph: &SkeletonGraph,
    datum: &DescentDatum,
    depth: usize,
) -> Result<OrbitReport, SkeletonError> {
    let fig = &datum.figure;
    let group = if datum.galois.is_empty() {
        vec![GaloisAuto::identity(fig.tower())]
    } else {
        group_closure(fig.tower(), &datum.galois)
    };
    let mut actions = Vec::new();
    let mut faithfulness = Vec::new();
    for sigma in &group {
        let act = element_action(graph, fig, sigma, depth)?;
        if !sigma.is_identity() {
            let w = witness(graph, fig, sigma, &act, depth)?;
            faithfulness.push(Witness {
                element: sigma.name().to_string(),
                witness: w,
            });
        }
        actions.push(act);
    }
    let vids: Vec<usize> = graph.vertices.iter().map(|v| v.id).collect();
    let eids: Vec<usize> = graph.edges.iter().map(|e| e.id).collect();
    let vmaps: Vec<_> = actions.iter().map(|a| a.vertex_map.clone()).collect();
    let emaps: Vec<_> = actions
        .iter()
        .map(|a| a.edge_map.iter().map(|m| (m.edge, m.image)).collect())
        .collect();
    let vertex_orbits = orbits_from(&vids, &vmaps);
    let edge_orbits = orbits_from(&eids, &emaps);
    let quotient = quotient_graph(graph, &vertex_orbits, &edge_orbits);
    let faithful = faithfulness.iter().all(|w| w.witness.is_some());
    Ok(OrbitReport {
        vertex_orbits,
        edge_orbits,
        actions,
        faithfulness,
        faithful,
        quotient,
    })
}

fn quotient_graph(g: &SkeletonGraph, vorb: &[Vec<usize>], eorb: &[Vec<usize>]) -> SkeletonGraph {
    let rep = |v: usize| {
        vorb.iter()
            .find(|o| o.contains(&v))
            .map(|o| o[0])
            .unwrap_or(v)
    };
    let vertices = vorb
        .iter()
        .map(|o| g.vertex(o[0]).unwrap().clone())
        .collect();
    let edges = eorb
        .iter()
        .map(|o| {
            let e = g.edge(o[0]).unwrap();
            Edge {
                ends: (rep(e.ends.0), rep(e.ends.1)),
                ..e.clone()
            }
        })
        .collect();
    SkeletonGraph {
        vertices,
        edges,
        gluing: g.gluing.clone(),
        base_ram_index: g.base_ram_index,
    }
}
