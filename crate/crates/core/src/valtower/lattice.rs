use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{FieldElement, FieldTower, TowerError};
use crate::linalg::EchelonBasis;
use crate::scalar::{denom_u64, Val};
use crate::Rat;

/// JSON form of one lattice entry.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubfieldSpec {
    pub name: String,
    pub generators: Vec<Vec<String>>,
}

/// A subfield of the top field, generated over `Q` by finitely many elements.
#[derive(Clone, Debug)]
pub struct Subfield {
    name: String,
    generators: Vec<FieldElement>,
    span: EchelonBasis<Rat>,
    basis: Vec<FieldElement>,
    ram_index: u64,
}

impl Subfield {
    pub fn new(tower: &Arc<FieldTower>, name: &str, generators: Vec<FieldElement>) -> Self {
        let mut span = EchelonBasis::new(tower.degree());
        let one = FieldElement::one(tower);
        span.insert(one.coords());
        let mut basis = vec![one];
        let mut k = 0;
        while k < basis.len() {
            for g in &generators {
                let y = &basis[k] * g;
                if span.insert(y.coords()) {
                    basis.push(y);
                }
            }
            k += 1;
        }
        let mut f = Subfield {
            name: name.to_string(),
            generators,
            span,
            basis,
            ram_index: 1,
        };
        f.ram_index = f.search_ramification();
        f
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[FieldElement] {
        &self.generators
    }

    /// A `Q`-basis of the field, starting with `1`.
    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    /// Degree over `Q`.
    pub fn degree(&self) -> usize {
        self.span.rank()
    }

    /// Absolute ramification index: `v(F^×) = (1/e) Z`.
    pub fn ram_index(&self) -> u64 {
        self.ram_index
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        self.span.contains(x.coords())
    }

    pub fn contains_field(&self, other: &Subfield) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// Whether `r ∈ v(F^×)`.
    pub fn has_value(&self, r: &Rat) -> bool {
        (r * Rat::from_integer(self.ram_index.into())).is_integer()
    }

    /// Least `n ≥ 1` with `n·r ∈ v(F^×)`.
    pub fn multiplicity_of(&self, r: &Rat) -> u64 {
        denom_u64(&(r * Rat::from_integer(self.ram_index.into())))
    }

    /// Products of at most two generators, including `1`.
    pub fn monomials(&self) -> Vec<FieldElement> {
        let Some(tower) = self.basis.first().map(|b| b.tower().clone()) else {
            return Vec::new();
        };
        let mut out = vec![FieldElement::one(&tower)];
        for (i, g) in self.generators.iter().enumerate() {
            out.push(g.clone());
            for h in &self.generators[i..] {
                out.push(g * h);
            }
        }
        dedup(out)
    }

    /// Small elements of `F` used as alternative centers of type-2 points:
    /// `0` and `±m` for the monomials `m`.
    pub fn center_candidates(&self) -> Vec<FieldElement> {
        let monos = self.monomials();
        let mut out = vec![FieldElement::zero(monos[0].tower())];
        for m in monos {
            out.push(-&m);
            out.push(m);
        }
        dedup(out)
    }

    /// `e(F)` is the lcm of the valuation denominators of sums of up to three
    /// signed monomials; stops early once `e` reaches `[F : Q]`.
    fn search_ramification(&self) -> u64 {
        let deg = self.degree() as u64;
        if deg == 1 {
            return 1;
        }
        let monos = self.monomials();
        let mut e = 1u64;
        let absorb = |x: &FieldElement, e: &mut u64| {
            if let Val::Fin(r) = x.v() {
                *e = e.lcm(&denom_u64(&r));
            }
            *e == deg
        };
        let n = monos.len();
        for a in 0..n {
            if absorb(&monos[a], &mut e) {
                return e;
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                for sb in [false, true] {
                    let y = if sb {
                        &monos[a] - &monos[b]
                    } else {
                        &monos[a] + &monos[b]
                    };
                    if absorb(&y, &mut e) {
                        return e;
                    }
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for (sb, sc) in [(false, false), (false, true), (true, false), (true, true)] {
                        let y = if sb {
                            &monos[a] - &monos[b]
                        } else {
                            &monos[a] + &monos[b]
                        };
                        let y = if sc { &y - &monos[c] } else { &y + &monos[c] };
                        if absorb(&y, &mut e) {
                            return e;
                        }
                    }
                }
            }
        }
        e
    }
}

fn dedup(xs: Vec<FieldElement>) -> Vec<FieldElement> {
    let mut out: Vec<FieldElement> = Vec::with_capacity(xs.len());
    for x in xs {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Named subfields between a base field `K` (the first entry) and the top
/// field `L` (the entry of full degree).
#[derive(Clone, Debug)]
pub struct SubfieldLattice {
    tower: Arc<FieldTower>,
    fields: Vec<Subfield>,
    top: usize,
}

impl SubfieldLattice {
    pub fn new(tower: &Arc<FieldTower>, fields: Vec<Subfield>) -> Result<Self, TowerError> {
        if fields.is_empty() {
            return Err(TowerError::EmptyGenerators);
        }
        let top = fields
            .iter()
            .position(|f| f.degree() == tower.degree())
            .ok_or_else(|| TowerError::UnknownSubfield("top field of full degree".into()))?;
        let base = &fields[0];
        if let Some(f) = fields.iter().find(|f| !f.contains_field(base)) {
            return Err(TowerError::Parse(format!(
                "subfield `{}` does not contain the base `{}`",
                f.name, base.name
            )));
        }
        Ok(SubfieldLattice {
            tower: tower.clone(),
            fields,
            top,
        })
    }

    pub fn from_specs(tower: &Arc<FieldTower>, specs: &[SubfieldSpec]) -> Result<Self, TowerError> {
        let fields = specs
            .iter()
            .map(|s| {
                let gens = s
                    .generators
                    .iter()
                    .map(|c| FieldElement::parse_coords(tower, c))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Subfield::new(tower, &s.name, gens))
            })
            .collect::<Result<Vec<_>, TowerError>>()?;
        SubfieldLattice::new(tower, fields)
    }

    pub fn to_specs(&self) -> Vec<SubfieldSpec> {
        self.fields
            .iter()
            .map(|f| SubfieldSpec {
                name: f.name.clone(),
                generators: f
                    .generators
                    .iter()
                    .map(FieldElement::to_coord_strings)
                    .collect(),
            })
            .collect()
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn fields(&self) -> &[Subfield] {
        &self.fields
    }

    pub fn base(&self) -> &Subfield {
        &self.fields[0]
    }

    pub fn top(&self) -> &Subfield {
        &self.fields[self.top]
    }

    pub fn get(&self, name: &str) -> Result<&Subfield, TowerError> {
        self.fields
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| TowerError::UnknownSubfield(name.to_string()))
    }

    /// `[F : K]`.
    pub fn degree_over_base(&self, f: &Subfield) -> usize {
        f.degree() / self.base().degree()
    }

    /// `e(K)`, used to convert absolute values to the base normalization.
    pub fn base_ram_index(&self) -> u64 {
        self.base().ram_index()
    }
}

/// Ramification index of every field in a lattice description.
pub fn ramification_index(
    tower: &Arc<FieldTower>,
    specs: &[SubfieldSpec],
) -> Result<Vec<(String, u64)>, TowerError> {
    if specs.is_empty() {
        return Err(TowerError::EmptyGenerators);
    }
    let mut out = Vec::new();
    for s in specs {
        let gens = s
            .generators
            .iter()
            .map(|c| FieldElement::parse_coords(tower, c))
            .collect::<Result<Vec<_>, _>>()?;
        out.push((
            s.name.clone(),
            Subfield::new(tower, &s.name, gens).ram_index(),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valtower::{build_tower, TowerSpec};

    #[test]
    fn ramification_examples() {
        let t = build_tower(&TowerSpec::with_rational_steps(
            2,
            &[("sqrt2", &[-2, 0, 1]), ("i", &[1, 0, 1])],
        ))
        .unwrap();
        let s = FieldElement::named(&t, "sqrt2").unwrap();
        let i = FieldElement::named(&t, "i").unwrap();
        let l = Subfield::new(&t, "L", vec![s.clone(), i.clone()]);
        assert_eq!(l.degree(), 4);
        assert_eq!(l.ram_index(), 4);
        let q = Subfield::new(&t, "Q", vec![]);
        assert_eq!(q.ram_index(), 1);
        let qi = Subfield::new(&t, "Q(i)", vec![i.clone()]);
        assert_eq!(qi.ram_index(), 2);
        let lat = SubfieldLattice::new(&t, vec![q, qi, l]).unwrap();
        assert_eq!(lat.top().name(), "L");
        assert!(lat
            .get("Q(i)")
            .unwrap()
            .contains(&(&i + &FieldElement::one(&t))));
        assert!(!lat.get("Q(i)").unwrap().contains(&s));
        assert_eq!(
            ramification_index(&t, &[]).unwrap_err(),
            TowerError::EmptyGenerators
        );
    }
}
