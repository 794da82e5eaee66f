use std::collections::BTreeMap;

use mumford_core::examples::{g2p, g2p2, BetaExponents};
use mumford_core::pline::Type2Point;
use mumford_core::schottky::{tate_figure, DescentDatum};
use mumford_core::skeleton::*;
use mumford_core::valtower::{build_tower, Subfield, SubfieldLattice, TowerSpec};
use mumford_core::{FieldElement, Rat};

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn pt(c: &FieldElement, n: i64, d: i64) -> Type2Point {
    Type2Point::new(c.clone(), r(n, d))
}

struct G2 {
    datum: DescentDatum,
    s2: FieldElement,
    i: FieldElement,
    one: FieldElement,
}

fn g2() -> G2 {
    let datum = g2p2();
    let t = datum.figure.tower().clone();
    G2 {
        s2: FieldElement::named(&t, "sqrt2").unwrap(),
        i: FieldElement::named(&t, "i").unwrap(),
        one: FieldElement::one(&t),
        datum,
    }
}

fn has(g: &SkeletonGraph, p: &Type2Point) -> bool {
    g.find_vertex(p).is_some()
}

#[test]
fn hull_of_the_four_disc_points() {
    let g = g2();
    let (a, b) = (&g.one + &g.i, &g.one - &g.i);
    let pts = [
        pt(&g.s2, 2, 1),
        pt(&-&g.s2, 2, 1),
        pt(&a, 3, 2),
        pt(&b, 3, 2),
    ];
    let tree = convex_hull_tree(&pts).unwrap();
    assert_eq!(tree.vertices.len(), 7);
    assert_eq!(tree.edges.len(), 6);
    for (q, val) in [
        (pt(&g.s2, 3, 2), 3),
        (pt(&g.s2, 3, 4), 2),
        (pt(&a, 1, 1), 3),
    ] {
        assert!(has(&tree, &q), "{q}");
        assert_eq!(tree.valence(tree.find_vertex(&q).unwrap()), val);
    }
    // η_{−√2,3/2} is the same point as η_{√2,3/2}.
    assert!(has(&tree, &pt(&-&g.s2, 3, 2)));
}

#[test]
fn hull_trivial_cases() {
    let t = build_tower(&TowerSpec::with_rational_steps(2, &[])).unwrap();
    let z = FieldElement::zero(&t);
    let one = convex_hull_tree(&[pt(&z, 0, 1)]).unwrap();
    assert_eq!((one.vertices.len(), one.edges.len()), (1, 0));
    let path = convex_hull_tree(&[pt(&z, 0, 1), pt(&z, 5, 1)]).unwrap();
    assert_eq!((path.vertices.len(), path.edges.len()), (2, 1));
    assert_eq!(path.edges[0].length, Some(r(5, 1)));
    assert!(matches!(convex_hull_tree(&[]), Err(SkeletonError::Empty)));
    let other = g2();
    let mixed = [pt(&z, 0, 1), pt(&other.one, 0, 1)];
    assert!(matches!(
        convex_hull_tree(&mixed),
        Err(SkeletonError::TowerMismatch)
    ));

    let q = Subfield::new(&t, "Q", vec![]);
    let unit = convex_hull_tree(&[pt(&z, 0, 1), pt(&z, 1, 1)]).unwrap();
    let sub = subdivide_mult1(&unit, &q);
    assert_eq!((sub.vertices.len(), sub.edges.len()), (2, 1));
}

#[test]
fn fundamental_skeleton_over_l() {
    let g = g2();
    let lat = g.datum.lattice.as_ref().unwrap();
    let sf = fundamental_skeleton(&g.datum.figure, Some(lat.top())).unwrap();
    assert_eq!(sf.vertices.len(), 13);
    let (a, b) = (&g.one + &g.i, &g.one - &g.i);
    let white: Vec<_> = sf
        .vertices
        .iter()
        .filter(|v| v.boundary)
        .map(|v| v.point.clone())
        .collect();
    assert_eq!(white.len(), 2);
    assert!(white.iter().any(|p| p.equals(&pt(&-&g.s2, 2, 1))));
    assert!(white.iter().any(|p| p.equals(&pt(&b, 3, 2))));
    let black = [
        pt(&g.s2, 2, 1),
        pt(&g.s2, 7, 4),
        pt(&g.s2, 3, 2),
        pt(&-&g.s2, 7, 4),
        pt(&g.s2, 5, 4),
        pt(&g.s2, 1, 1),
        pt(&g.s2, 3, 4),
        pt(&a, 3, 2),
        pt(&a, 5, 4),
        pt(&a, 1, 1),
        pt(&b, 5, 4),
    ];
    assert_eq!(sf.black_vertices().count(), 11);
    for q in &black {
        assert!(sf.black_vertices().any(|v| v.point.equals(q)), "{q}");
    }
    let plain = fundamental_skeleton(&g.datum.figure, None).unwrap();
    assert_eq!(plain.vertices.len(), 7);
}

#[test]
fn glued_and_stable_graphs() {
    let g = g2();
    let lat = g.datum.lattice.as_ref().unwrap();
    let sy = glue_mumford(&g.datum.figure, Some(lat)).unwrap();
    assert_eq!((sy.vertices.len(), sy.edges.len(), sy.betti()), (11, 12, 2));
    assert!(sy.vertices.iter().all(|v| !v.boundary));
    let st = stable_contraction(&sy);
    assert_eq!(
        (st.vertices.len(), st.num_bridges(), st.num_loops()),
        (2, 1, 2)
    );
    assert_eq!(st.betti(), 2);
    let g2 = g2();
    assert!(has(&st, &pt(&g2.s2, 3, 2)));
    assert!(has(&st, &pt(&(&g2.one + &g2.i), 1, 1)));
}

#[test]
fn tate_skeleton_is_a_loop() {
    let t = build_tower(&TowerSpec::with_rational_steps(2, &[])).unwrap();
    let fig = tate_figure(&t, FieldElement::from_int(&t, 8)).unwrap();
    let sf = fundamental_skeleton(&fig, None).unwrap();
    assert_eq!((sf.vertices.len(), sf.edges.len()), (2, 1));
    let sy = glue(&sf, &fig).unwrap();
    assert_eq!(
        (
            sy.vertices.len(),
            sy.edges.len(),
            sy.betti(),
            sy.num_loops()
        ),
        (1, 1, 1, 1)
    );
    let st = stable_contraction(&sy);
    assert_eq!(st.betti(), 1);
}

#[test]
fn tree_contracts_to_a_point() {
    let g = g2();
    let tree = fundamental_skeleton(&g.datum.figure, None).unwrap();
    let st = stable_contraction(&tree);
    assert_eq!((st.vertices.len(), st.edges.len()), (1, 0));
}

#[test]
fn fields_of_definition() {
    let g = g2();
    let lat = g.datum.lattice.as_ref().unwrap();
    let t = g.datum.figure.tower().clone();
    let z = FieldElement::zero(&t);
    let f = |p: Type2Point| field_of_definition(&p, lat).unwrap().field;
    assert_eq!(f(pt(&g.s2, 3, 2)), "K(√2)");
    assert_eq!(f(pt(&-&g.s2, 3, 2)), "K(√2)");
    assert_eq!(f(pt(&g.s2, 7, 4)), "L");
    assert_eq!(f(pt(&z, 1, 1)), "K");
    // η_{√2, 1/2} = η_{0, 1/2}: K fails on the radius, three quadratic
    // fields succeed.
    let d = field_of_definition(&pt(&g.s2, 1, 2), lat).unwrap();
    assert_eq!(d.field, "K(√2)");
    assert_eq!(d.alternatives, ["K(i)", "K(√-2)"]);

    let ltop = lat.top();
    assert_eq!(multiplicity_over(&pt(&g.s2, 7, 4), ltop), 1);
    assert_eq!(multiplicity_over(&pt(&g.s2, 7, 4), lat.base()), 4);
    let bound = quotient_multiplicity_bound(&pt(&g.s2, 3, 2), lat).unwrap();
    assert_eq!(2 % bound, 0);
}

#[test]
fn not_defined_over_a_small_lattice() {
    let g = g2();
    let t = g.datum.figure.tower().clone();
    let lat = SubfieldLattice::new(
        &t,
        vec![
            Subfield::new(&t, "K", vec![]),
            Subfield::new(&t, "L", vec![g.s2.clone(), g.i.clone()]),
        ],
    )
    .unwrap();
    assert_eq!(
        field_of_definition(&pt(&g.s2, 3, 2), &lat).unwrap().field,
        "L"
    );
    let tiny = build_tower(&TowerSpec::with_rational_steps(2, &[])).unwrap();
    let qlat = SubfieldLattice::new(&tiny, vec![Subfield::new(&tiny, "Q", vec![])]).unwrap();
    let half = pt(&FieldElement::zero(&tiny), 1, 2);
    assert!(matches!(
        field_of_definition(&half, &qlat),
        Err(SkeletonError::NotDefinedOverLattice(_))
    ));
}

#[test]
fn l_only_contraction_and_bound() {
    let g = g2();
    let lat = g.datum.lattice.as_ref().unwrap();
    let sy = annotate(&glue_mumford(&g.datum.figure, Some(lat)).unwrap(), lat).unwrap();
    let y2 = contract_l_only(&sy, lat.top().name());
    let mut fields: BTreeMap<String, usize> = BTreeMap::new();
    for v in &y2.vertices {
        *fields
            .entry(v.annotations.field_of_definition.clone().unwrap())
            .or_default() += 1;
        assert_eq!(2 % v.annotations.quotient_bound.unwrap(), 0);
    }
    assert_eq!(
        fields,
        BTreeMap::from([("K(i)".to_string(), 2), ("K(√2)".to_string(), 3)])
    );
    assert_eq!(y2.betti(), 2);
    for q in [
        pt(&g.s2, 2, 1),
        pt(&g.s2, 3, 2),
        pt(&g.s2, 1, 1),
        pt(&(&g.one + &g.i), 3, 2),
        pt(&(&g.one + &g.i), 1, 1),
    ] {
        assert!(has(&y2, &q), "{q}");
    }
    let b = stabilization_bound(&y2, lat).unwrap();
    assert_eq!(
        b,
        StabilizationBound {
            m: 2,
            degree: 4,
            divides: true,
            strict_gap: true
        }
    );

    let again = contract_l_only(&y2, lat.top().name());
    assert_eq!(again.vertices.len(), y2.vertices.len());
    assert_eq!(again.edges.len(), y2.edges.len());
}

#[test]
fn single_vertex_bound() {
    let t = build_tower(&TowerSpec::with_rational_steps(2, &[])).unwrap();
    let lat = SubfieldLattice::new(&t, vec![Subfield::new(&t, "Q", vec![])]).unwrap();
    let g = annotate(
        &convex_hull_tree(&[pt(&FieldElement::zero(&t), 0, 1)]).unwrap(),
        &lat,
    )
    .unwrap();
    assert_eq!(stabilization_bound(&g, &lat).unwrap().m, 1);
}

#[test]
fn galois_faithfulness_on_the_stable_graph() {
    let g = g2();
    let lat = g.datum.lattice.as_ref().unwrap();
    let sy = glue_mumford(&g.datum.figure, Some(lat)).unwrap();
    let st = stable_contraction(&sy);
    let rep = galois_orbits(&st, &g.datum, 8).unwrap();
    assert!(rep.faithful);
    assert_eq!(rep.faithfulness.len(), 3);
    let w = |name: &str| {
        rep.faithfulness
            .iter()
            .find(|w| w.element == name)
            .unwrap()
            .witness
            .clone()
            .unwrap()
    };
    assert!(
        w("σ").contains("(sqrt2, 7/4)") && w("σ").contains("(-sqrt2, 7/4)"),
        "{}",
        w("σ")
    );
    assert!(
        w("τ").contains("(1 + i, 5/4)") && w("τ").contains("(1 - i, 5/4)"),
        "{}",
        w("τ")
    );

    let full = galois_orbits(&sy, &g.datum, 8).unwrap();
    let sig = &full
        .actions
        .iter()
        .find(|a| a.element == "σ")
        .unwrap()
        .vertex_map;
    let id = |p: Type2Point| sy.find_vertex(&p).unwrap();
    assert!(sig.contains(&(id(pt(&g.s2, 7, 4)), id(pt(&-&g.s2, 7, 4)))));
    let tau = &full
        .actions
        .iter()
        .find(|a| a.element == "τ")
        .unwrap()
        .vertex_map;
    let (a, b) = (&g.one + &g.i, &g.one - &g.i);
    assert!(tau.contains(&(id(pt(&a, 5, 4)), id(pt(&b, 5, 4)))));

    // Orbits before and after contraction agree on the surviving vertices.
    for o in &rep.vertex_orbits {
        for v in o {
            let big = full.vertex_orbits.iter().find(|x| x.contains(v)).unwrap();
            assert!(o.iter().all(|u| big.contains(u)));
        }
    }
    for o in &full.vertex_orbits {
        let kept: Vec<_> = o.iter().filter(|v| st.vertex(**v).is_some()).collect();
        if let Some(first) = kept.first() {
            let small = rep
                .vertex_orbits
                .iter()
                .find(|x| x.contains(first))
                .unwrap();
            assert!(kept.iter().all(|u| small.contains(u)));
        }
    }
}

#[test]
fn trivial_group_gives_singleton_orbits() {
    let g = g2();
    let lat = g.datum.lattice.as_ref().unwrap();
    let sy = glue_mumford(&g.datum.figure, Some(lat)).unwrap();
    let datum = DescentDatum {
        galois: vec![],
        ..g.datum.clone()
    };
    let rep = galois_orbits(&sy, &datum, 8).unwrap();
    assert_eq!(rep.vertex_orbits.len(), sy.vertices.len());
    assert!(rep.faithfulness.is_empty());
    assert!(rep.faithful);
}

#[test]
fn dot_and_json() {
    let g = g2();
    let lat = g.datum.lattice.as_ref().unwrap();
    let sf = annotate(
        &fundamental_skeleton(&g.datum.figure, Some(lat.top())).unwrap(),
        lat,
    )
    .unwrap();
    let dot = sf.to_dot("sf");
    assert!(dot.contains("sqrt2@7/4 m=4 def=L"));
    assert_eq!(dot.matches("style=dashed").count(), 2);
    let j = sf.to_json();
    assert_eq!(j["vertices"].as_array().unwrap().len(), 13);
    assert_eq!(j["edges"].as_array().unwrap().len(), 12);
}

fn family(p: u64) {
    let d = g2p(p, BetaExponents::default()).unwrap();
    let lat = d.lattice.clone().unwrap();
    let t = d.figure.tower().clone();
    let zeta = FieldElement::named(&t, "zeta").unwrap();
    let root = FieldElement::named(&t, "t").unwrap();
    let one = FieldElement::one(&t);
    let pi = &zeta.pow(p as u32) - &one;
    let s = if p == 2 {
        FieldElement::named(&t, "omega").unwrap()
    } else {
        -&one
    };
    let alpha = &s + &root;
    let z = FieldElement::zero(&t);
    let e = Rat::from_integer(lat.base_ram_index().into());
    let at = |c: &FieldElement, n: i64, dd: i64| Type2Point::new(c.clone(), r(n, dd) / &e);
    let pi_ = p as i64;
    let vs = [
        at(&z, 0, 1),
        at(&z, 1, 1),
        at(&zeta, 1, 1),
        at(&(&pi * &zeta), 2, 1),
        at(&alpha, pi_ + 1, pi_),
        at(&(&pi * &alpha), 2 * pi_ + 1, pi_),
    ];
    let sf = fundamental_skeleton(&d.figure, None).unwrap();
    assert_eq!(sf.vertices.len(), 6 + 4 * p as usize);
    assert_eq!(
        sf.vertices.iter().filter(|v| v.boundary).count(),
        2 * p as usize
    );
    for v in &vs {
        assert!(has(&sf, v), "p = {p}: {v}");
    }
    let sy = annotate(&glue_mumford(&d.figure, Some(&lat)).unwrap(), &lat).unwrap();
    assert_eq!(sy.betti(), 2 * p as usize);
    let st = stable_contraction(&sy);
    assert_eq!(
        (st.vertices.len(), st.edges.len(), st.betti()),
        (6, 2 * p as usize + 5, 2 * p as usize)
    );
    let id = |q: &Type2Point| st.find_vertex(q).unwrap();
    let mult = st.edge_multiplicities();
    let count = |a: &Type2Point, b: &Type2Point| {
        let (x, y) = (id(a), id(b));
        mult.get(&(x.min(y), x.max(y))).copied().unwrap_or(0)
    };
    assert_eq!(count(&vs[2], &vs[3]), p as usize);
    assert_eq!(count(&vs[4], &vs[5]), p as usize);
    for (a, b) in [(0, 1), (0, 2), (0, 4), (1, 3), (1, 5)] {
        assert_eq!(count(&vs[a], &vs[b]), 1);
    }
    let y2 = contract_l_only(&sy, lat.top().name());
    for v in &vs {
        assert!(has(&y2, v));
    }
    let b = stabilization_bound(&y2, &lat).unwrap();
    assert_eq!(
        (b.m, b.degree, b.divides, b.strict_gap),
        (p, p * p, true, true)
    );
    let rep = galois_orbits(&st, &d, 8).unwrap();
    assert!(rep.faithful);
    assert!(rep.vertex_orbits.iter().all(|o| o.len() == 1));
    let sizes: Vec<usize> = rep
        .edge_orbits
        .iter()
        .map(Vec::len)
        .filter(|&n| n > 1)
        .collect();
    assert_eq!(sizes, [p as usize, p as usize]);
}

#[test]
fn g2p_family_p2() {
    family(2);
}

#[test]
fn g2p_family_p3() {
    family(3);
}
