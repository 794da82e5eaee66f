use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::graph::SkeletonGraph;
use super::SkeletonError;
use crate::pline::{vdist, Type2Point};
use crate::valtower::{Subfield, SubfieldLattice};

/// Result of a field-of-definition search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldOfDefinition {
    pub field: String,
    pub degree_over_base: usize,
    /// Other fields of the same degree that also work.
    pub alternatives: Vec<String>,
}

/// Whether `η_{a,r}` can be written with a center in `M` and `r ∈ v(M^×)`.
pub fn defined_over(eta: &Type2Point, m: &Subfield) -> bool {
    if !m.has_value(&eta.vradius) {
        return false;
    }
    m.contains(&eta.center)
        || m.center_candidates()
            .iter()
            .any(|c| vdist(&eta.center, c).ge_rat(&eta.vradius))
}

/// The smallest lattice field over which `η` is defined; ties go to the
/// field listed first.
pub fn field_of_definition(
    eta: &Type2Point,
    lat: &SubfieldLattice,
) -> Result<FieldOfDefinition, SkeletonError> {
    let mut order: Vec<&Subfield> = lat.fields().iter().collect();
    order.sort_by_key(|f| f.degree());
    let mut found: Option<&Subfield> = None;
    let mut alternatives = Vec::new();
    for m in order {
        if let Some(f) = found {
            if m.degree() > f.degree() {
                break;
            }
        }
        if defined_over(eta, m) {
            match found {
                None => found = Some(m),
                Some(_) => alternatives.push(m.name().to_string()),
            }
        }
    }
    let f = found.ok_or_else(|| SkeletonError::NotDefinedOverLattice(eta.to_string()))?;
    Ok(FieldOfDefinition {
        field: f.name().to_string(),
        degree_over_base: lat.degree_over_base(f),
        alternatives,
    })
}

/// Least `n ≥ 1` with `n·r ∈ v(F^×)`.
pub fn multiplicity_over(eta: &Type2Point, f: &Subfield) -> u64 {
    f.multiplicity_of(&eta.vradius)
}

/// `[M : K]` for the field of definition `M`: the image of `η` in the
/// quotient has multiplicity dividing this number.
pub fn quotient_multiplicity_bound(
    eta: &Type2Point,
    lat: &SubfieldLattice,
) -> Result<u64, SkeletonError> {
    Ok(field_of_definition(eta, lat)?.degree_over_base as u64)
}

/// Fills in multiplicities, fields of definition, bounds and valences.
pub fn annotate(
    graph: &SkeletonGraph,
    lat: &SubfieldLattice,
) -> Result<SkeletonGraph, SkeletonError> {
    let mut g = graph.clone();
    g.base_ram_index = lat.base_ram_index();
    let results: Vec<_> = g
        .vertices
        .par_iter()
        .map(|v| -> Result<_, SkeletonError> {
            let mult = lat
                .fields()
                .iter()
                .map(|f| (f.name().to_string(), multiplicity_over(&v.point, f)))
                .collect();
            let base = multiplicity_over(&v.point, lat.base());
            let def = field_of_definition(&v.point, lat)?;
            Ok((mult, base, def))
        })
        .collect();
    let valences: Vec<usize> = g.vertices.iter().map(|v| g.valence(v.id)).collect();
    for ((v, r), val) in g.vertices.iter_mut().zip(results).zip(valences) {
        let (mult, base, def) = r?;
        let a = &mut v.annotations;
        a.multiplicity = mult;
        a.base_multiplicity = Some(base);
        a.quotient_bound = Some(def.degree_over_base as u64);
        a.field_of_definition = Some(def.field);
        a.alternative_fields = def.alternatives;
        a.valence = Some(val);
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizationBound {
    /// lcm of the per-vertex quotient bounds.
    pub m: u64,
    /// `[L : K]`.
    pub degree: u64,
    pub divides: bool,
    pub strict_gap: bool,
}

/// `m = lcm` of the quotient multiplicity bounds over the vertices of an
/// annotated graph, compared with `[L : K]`.
pub fn stabilization_bound(
    graph: &SkeletonGraph,
    lat: &SubfieldLattice,
) -> Result<StabilizationBound, SkeletonError> {
    let mut m = 1u64;
    for v in graph.black_vertices() {
        let b = match v.annotations.quotient_bound {
            Some(b) => b,
            None => quotient_multiplicity_bound(&v.point, lat)?,
        };
        m = m.lcm(&b);
    }
    let degree = lat.degree_over_base(lat.top()) as u64;
    Ok(StabilizationBound {
        m,
        degree,
        divides: degree % m == 0,
        strict_gap: m < degree,
    })
}
