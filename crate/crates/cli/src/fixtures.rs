//! Built-in example families with their expected invariants.

use std::collections::BTreeMap;

use anyhow::{anyhow, Context, Result};
use mumford_core::examples::{g2p, g2p2, BetaExponents};
use mumford_core::pline::{vdist, P1Point, Type2Point};
use mumford_core::scalar::rat_short;
use mumford_core::schottky::{
    check_descent_condition_c, in_fundamental_domain, verify_figure, DescentDatum,
};
use mumford_core::skeleton::{
    annotate, contract_l_only, fundamental_skeleton, galois_orbits, glue_mumford,
    stabilization_bound, stable_contraction, SkeletonGraph,
};
use mumford_core::{FieldElement, Rat};
use serde::Serialize;
use serde_json::{json, Value};

/// One expected output and where it comes from.
#[derive(Clone, Debug, Serialize)]
pub struct Expectation {
    pub key: String,
    pub citation: String,
    pub expected: Value,
}

fn expect(key: &str, citation: &str, expected: Value) -> Expectation {
    Expectation {
        key: key.into(),
        citation: citation.into(),
        expected,
    }
}

pub struct ExampleFixture {
    pub name: String,
    pub datum: DescentDatum,
    pub expectations: Vec<Expectation>,
    /// Named type-2 points that observations refer to.
    points: Vec<(String, Type2Point)>,
    p: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub key: String,
    pub citation: String,
    pub expected: Value,
    pub actual: Value,
}

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn named(datum: &DescentDatum, name: &str) -> FieldElement {
    FieldElement::named(datum.figure.tower(), name).expect("generator present")
}

fn label(c: &FieldElement, base_r: &Rat) -> String {
    format!("({c}, {})", rat_short(base_r))
}

pub fn g2p2_fixture() -> ExampleFixture {
    let datum = g2p2();
    let s2 = named(&datum, "sqrt2");
    let i = named(&datum, "i");
    let one = FieldElement::one(datum.figure.tower());
    let (a, b) = (&one + &i, &one - &i);
    let black = [
        (&s2, r(2, 1)),
        (&s2, r(7, 4)),
        (&s2, r(3, 2)),
        (&-&s2, r(7, 4)),
        (&s2, r(5, 4)),
        (&s2, r(1, 1)),
        (&s2, r(3, 4)),
        (&a, r(3, 2)),
        (&a, r(5, 4)),
        (&a, r(1, 1)),
        (&b, r(5, 4)),
    ];
    let points: Vec<(String, Type2Point)> = black
        .iter()
        .map(|(c, x)| (label(c, x), Type2Point::new((*c).clone(), x.clone())))
        .collect();
    let mut black_labels: Vec<String> = points.iter().map(|(l, _)| l.clone()).collect();
    black_labels.sort();
    let expectations = vec![
        expect("verify", "Schottky figure statement: \"is a Schottky group of rank 2\"", json!({"ok": true, "rank": 2})),
        expect(
            "distances",
            "distance table: |√2−(−√2)| = |2^{3/2}|, |(1+i)−(1−i)| = |2¹|, |±√2−(1±i)| = |2^{3/4}|",
            json!({"v(√2 − (−√2))": "3/2", "v((1+i) − (1−i))": "1", "v(√2 − (1+i))": "3/4"}),
        ),
        expect(
            "sf_black_vertices",
            "fundamental domain figure, caption \"Black dots correspond to the points of S_F\"",
            json!(black_labels),
        ),
        expect(
            "sf_white_vertices",
            "fundamental domain figure: white dots are the boundary points of D⁺(γ₁⁻¹) and D⁺(γ₂⁻¹)",
            json!(["(-sqrt2, 2)", "(1 - i, 3/2)"]),
        ),
        expect(
            "glued_shape",
            "right panel of the skeleton figure: the glued graph Σ_Y",
            json!({"vertices": 11, "edges": 12, "betti": 2}),
        ),
        expect(
            "stable_shape",
            "contraction to the stable model: two vertices joined by a bridge, one loop at each",
            json!({"vertices": 2, "bridges": 1, "loops": 2, "betti": 2}),
        ),
        expect(
            "conjugation_table",
            "Galois identities σγ₁σ⁻¹ = γ₁⁻¹, σγ₂σ⁻¹ = γ₂, τγ₁τ⁻¹ = γ₁, τγ₂τ⁻¹ = γ₂⁻¹",
            json!({"exact": true, "table": ["σ(g1) = g1⁻¹", "σ(g2) = g2", "τ(g1) = g1", "τ(g2) = g2⁻¹"]}),
        ),
        expect(
            "faithfulness",
            "minimality of L: σ swaps η(±√2, 7/4), τ swaps η(1±i, 5/4) on the stable graph",
            json!({
                "faithful": true,
                "σ": ["(-sqrt2, 7/4)", "(sqrt2, 7/4)"],
                "τ": ["(1 + i, 5/4)", "(1 - i, 5/4)"],
            }),
        ),
        expect(
            "rational_point",
            "rational point lemma: x = 0 lies in the fundamental domain F",
            json!({"x = 0 in F": true}),
        ),
        expect(
            "fields_after_contract_l",
            "model Y'': vertices defined over K(√2) and K(i) after contracting the L-only points",
            json!({"K(i)": 2, "K(√2)": 3}),
        ),
        expect(
            "quotient_bounds",
            "multiplicity lemma: \"multiplicity dividing 2\"",
            json!({"all_divide": 2, "holds": true}),
        ),
        expect(
            "stabilization_bound",
            "the gap e(X) ≠ [L:K]: bound m = 2 against [L:K] = 4",
            json!({"m": 2, "degree": 4, "divides": true, "strict_gap": true}),
        ),
    ];
    ExampleFixture {
        name: "g2p2".into(),
        datum,
        expectations,
        points,
        p: None,
    }
}

pub fn g2p_fixture(p: u64, beta: BetaExponents) -> Result<ExampleFixture> {
    let datum = g2p(p, beta)?;
    let lat = datum.lattice.as_ref().expect("family has a lattice");
    let e = Rat::from_integer(lat.base_ram_index().into());
    let zeta = named(&datum, "zeta");
    let root = named(&datum, "t");
    let one = FieldElement::one(datum.figure.tower());
    let pi = &zeta.pow(p as u32) - &one;
    let s = if p == 2 {
        named(&datum, "omega")
    } else {
        -&one
    };
    let alpha = &s + &root;
    let zero = FieldElement::zero(datum.figure.tower());
    let pp = p as i64;
    let specs = [
        (zero.clone(), r(0, 1)),
        (zero, r(1, 1)),
        (zeta.clone(), r(1, 1)),
        (&pi * &zeta, r(2, 1)),
        (alpha.clone(), r(pp + 1, pp)),
        (&pi * &alpha, r(2 * pp + 1, pp)),
    ];
    let points: Vec<(String, Type2Point)> = specs
        .iter()
        .enumerate()
        .map(|(k, (c, x))| (format!("v{}", k + 1), Type2Point::new(c.clone(), x / &e)))
        .collect();
    let radii: BTreeMap<String, String> = specs
        .iter()
        .enumerate()
        .map(|(k, (_, x))| (format!("v{}", k + 1), rat_short(x)))
        .collect();
    let mut table = Vec::new();
    for i in 0..p {
        table.push(format!("σ(A{i}) = A{}", (i + 1) % p));
    }
    for i in 0..p {
        table.push(format!("σ(B{i}) = B{i}"));
    }
    for i in 0..p {
        table.push(format!("τ(A{i}) = A{i}"));
    }
    for i in 0..p {
        table.push(format!("τ(B{i}) = B{}", (i + 1) % p));
    }
    let n = p as usize;
    let expectations = vec![
        expect(
            "verify",
            "family statement: a Schottky group of rank 2p",
            json!({"ok": true, "rank": 2 * n}),
        ),
        expect(
            "conjugation_table",
            "conjugation action: σ(Aᵢ) = A_{i+1 mod p}, τ(Bᵢ) = B_{i+1 mod p}, τ(Aᵢ) = Aᵢ, σ(Bᵢ) = Bᵢ",
            json!({"exact": true, "table": table}),
        ),
        expect(
            "vertex_radii",
            "skeleton figure of the family: v₁…v₆ at radii 0, 1, 1, 2, 1+1/p, 2+1/p",
            json!(radii),
        ),
        expect(
            "stable_shape",
            "figure \"The dual graph of Y^stab_k\": six vertices, Betti number 2p",
            json!({"vertices": 6, "edges": 2 * n + 5, "betti": 2 * n}),
        ),
        expect(
            "edge_multiplicities",
            "figure \"The dual graph of Y^stab_k\": \"p edges\" between v₃, v₄ and between v₅, v₆",
            json!({"v1-v2": 1, "v1-v3": 1, "v1-v5": 1, "v2-v4": 1, "v2-v6": 1, "v3-v4": n, "v5-v6": n}),
        ),
        expect(
            "galois_orbits",
            "σ and τ each permute one bundle of p parallel edges cyclically",
            json!({"faithful": true, "nontrivial_edge_orbit_sizes": [n, n]}),
        ),
        expect(
            "rational_point",
            "x = 0 lies in the fundamental domain F",
            json!({"x = 0 in F": true}),
        ),
        expect(
            "stabilization_bound",
            "corollary on the family: \"multiplicity dividing p\" while [L:K] = p²",
            json!({"m": p, "degree": p * p, "divides": true, "strict_gap": true}),
        ),
    ];
    Ok(ExampleFixture {
        name: format!("g2p(p={p})"),
        datum,
        expectations,
        points,
        p: Some(p),
    })
}

impl ExampleFixture {
    fn point(&self, name: &str) -> &Type2Point {
        &self
            .points
            .iter()
            .find(|(l, _)| l == name)
            .expect("fixture point")
            .1
    }

    /// Label of a vertex: a fixture label if the point is a named one.
    fn vertex_label(&self, g: &SkeletonGraph, p: &Type2Point) -> String {
        match self.points.iter().find(|(_, q)| q.equals(p)) {
            Some((l, _)) => l.clone(),
            None => label(&p.center, &g.base_radius(&p.vradius)),
        }
    }

    /// Computes the observed value of every expectation key.
    pub fn observe(&self, depth: usize) -> Result<BTreeMap<String, Value>> {
        match self.p {
            None => self.observe_g2p2(depth),
            Some(p) => self.observe_g2p(p, depth),
        }
    }

    fn common(&self, depth: usize, out: &mut BTreeMap<String, Value>) {
        let fig = &self.datum.figure;
        let rep = verify_figure(fig);
        out.insert("verify".into(), json!({"ok": rep.ok, "rank": rep.rank}));
        let desc = check_descent_condition_c(&self.datum, depth);
        let table: Vec<String> = desc.table.iter().map(|e| e.to_string()).collect();
        out.insert(
            "conjugation_table".into(),
            json!({"exact": desc.ok, "table": table}),
        );
        let zero = FieldElement::zero(fig.tower());
        out.insert(
            "rational_point".into(),
            json!({"x = 0 in F": in_fundamental_domain(fig, &P1Point::Finite(zero))}),
        );
    }

    fn observe_g2p2(&self, depth: usize) -> Result<BTreeMap<String, Value>> {
        let mut out = BTreeMap::new();
        self.common(depth, &mut out);
        let d = &self.datum;
        let fig = &d.figure;
        let lat = d.lattice.as_ref().context("fixture lattice")?;
        let s2 = named(d, "sqrt2");
        let i = named(d, "i");
        let one = FieldElement::one(fig.tower());
        let dist = |x: &FieldElement, y: &FieldElement| vdist(x, y).to_string();
        out.insert(
            "distances".into(),
            json!({
                "v(√2 − (−√2))": dist(&s2, &-&s2),
                "v((1+i) − (1−i))": dist(&(&one + &i), &(&one - &i)),
                "v(√2 − (1+i))": dist(&s2, &(&one + &i)),
            }),
        );

        let sf = fundamental_skeleton(fig, Some(lat.top()))?;
        let labels = |white: bool| {
            let mut v: Vec<String> = sf
                .vertices
                .iter()
                .filter(|v| v.boundary == white)
                .map(|v| self.vertex_label(&sf, &v.point))
                .collect();
            v.sort();
            v
        };
        out.insert("sf_black_vertices".into(), json!(labels(false)));
        out.insert("sf_white_vertices".into(), json!(labels(true)));

        let sy = annotate(&glue_mumford(fig, Some(lat))?, lat)?;
        out.insert(
            "glued_shape".into(),
            json!({"vertices": sy.vertices.len(), "edges": sy.edges.len(), "betti": sy.betti()}),
        );
        let st = stable_contraction(&sy);
        out.insert(
            "stable_shape".into(),
            json!({"vertices": st.vertices.len(), "bridges": st.num_bridges(), "loops": st.num_loops(), "betti": st.betti()}),
        );

        let orbits = galois_orbits(&st, d, depth)?;
        let mut faith = serde_json::Map::new();
        faith.insert("faithful".into(), json!(orbits.faithful));
        for w in &orbits.faithfulness {
            if w.element == "σ" || w.element == "τ" {
                let mut pts = w.witness.as_deref().map(parenthesized).unwrap_or_default();
                pts.sort();
                faith.insert(w.element.clone(), json!(pts));
            }
        }
        out.insert("faithfulness".into(), Value::Object(faith));

        let y2 = contract_l_only(&sy, lat.top().name());
        let mut fields: BTreeMap<String, usize> = BTreeMap::new();
        for v in &y2.vertices {
            let f = v
                .annotations
                .field_of_definition
                .clone()
                .unwrap_or_else(|| "?".into());
            *fields.entry(f).or_default() += 1;
        }
        out.insert("fields_after_contract_l".into(), json!(fields));
        let holds = y2
            .vertices
            .iter()
            .all(|v| v.annotations.quotient_bound.is_some_and(|b| 2 % b == 0));
        out.insert(
            "quotient_bounds".into(),
            json!({"all_divide": 2, "holds": holds}),
        );
        out.insert(
            "stabilization_bound".into(),
            serde_json::to_value(stabilization_bound(&y2, lat)?)?,
        );
        Ok(out)
    }

    fn observe_g2p(&self, p: u64, depth: usize) -> Result<BTreeMap<String, Value>> {
        let mut out = BTreeMap::new();
        self.common(depth, &mut out);
        let d = &self.datum;
        let fig = &d.figure;
        let lat = d.lattice.as_ref().context("fixture lattice")?;
        let mut sf = fundamental_skeleton(fig, None)?;
        sf.base_ram_index = lat.base_ram_index();
        let mut radii = BTreeMap::new();
        for (name, q) in &self.points {
            let v = match sf.find_vertex(q) {
                Some(_) => rat_short(&sf.base_radius(&q.vradius)),
                None => "missing".into(),
            };
            radii.insert(name.clone(), v);
        }
        out.insert("vertex_radii".into(), json!(radii));

        let sy = annotate(&glue_mumford(fig, Some(lat))?, lat)?;
        let st = stable_contraction(&sy);
        out.insert(
            "stable_shape".into(),
            json!({"vertices": st.vertices.len(), "edges": st.edges.len(), "betti": st.betti()}),
        );
        let mut mult = BTreeMap::new();
        for ((a, b), n) in st.edge_multiplicities() {
            let la = self.vertex_label(&st, &st.vertex(a).context("vertex")?.point);
            let lb = self.vertex_label(&st, &st.vertex(b).context("vertex")?.point);
            let (x, y) = if la <= lb { (la, lb) } else { (lb, la) };
            *mult.entry(format!("{x}-{y}")).or_insert(0) += n;
        }
        out.insert("edge_multiplicities".into(), json!(mult));

        let orbits = galois_orbits(&st, d, depth)?;
        let mut sizes: Vec<usize> = orbits
            .edge_orbits
            .iter()
            .map(Vec::len)
            .filter(|&n| n > 1)
            .collect();
        sizes.sort();
        out.insert(
            "galois_orbits".into(),
            json!({"faithful": orbits.faithful, "nontrivial_edge_orbit_sizes": sizes}),
        );

        let y2 = contract_l_only(&sy, lat.top().name());
        let kept = self.points.iter().all(|(_, q)| y2.find_vertex(q).is_some());
        if !kept {
            return Err(anyhow!(
                "contracting the L-only vertices removed one of v1..v6 (p = {p})"
            ));
        }
        out.insert(
            "stabilization_bound".into(),
            serde_json::to_value(stabilization_bound(&y2, lat)?)?,
        );
        Ok(out)
    }

    /// Point `vk` of the family, if this is the `g = 2p` fixture.
    pub fn family_vertex(&self, k: usize) -> Option<&Type2Point> {
        self.p.map(|_| self.point(&format!("v{k}")))
    }

    /// Entries whose observed value differs from the expected one.
    pub fn diff(&self, observed: &BTreeMap<String, Value>) -> Vec<Mismatch> {
        self.expectations
            .iter()
            .filter_map(|e| {
                let actual = observed.get(&e.key).cloned().unwrap_or(Value::Null);
                (actual != e.expected).then(|| Mismatch {
                    key: e.key.clone(),
                    citation: e.citation.clone(),
                    expected: e.expected.clone(),
                    actual,
                })
            })
            .collect()
    }
}

/// The `(…)` groups of a witness string.
fn parenthesized(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = s;
    while let Some(a) = rest.find('(') {
        let Some(b) = rest[a..].find(')') else { break };
        out.push(rest[a..a + b + 1].to_string());
        rest = &rest[a + b + 1..];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parenthesized_groups() {
        assert_eq!(
            parenthesized("reverses edge 3: (sqrt2, 7/4) ↦ (-sqrt2, 7/4)"),
            ["(sqrt2, 7/4)", "(-sqrt2, 7/4)"]
        );
        assert!(parenthesized("maps edge 1 to edge 2").is_empty());
    }
}
