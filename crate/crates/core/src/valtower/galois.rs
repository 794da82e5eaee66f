use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{FieldElement, FieldTower, TowerError};
use crate::Rat;

/// A field automorphism of the top field, given by generator images.
#[derive(Clone, Debug, PartialEq)]
pub struct GaloisAuto {
    name: String,
    images: Vec<FieldElement>,
}

/// JSON form: `{"name": .., "images": {"gen": [coords..]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaloisSpec {
    pub name: String,
    pub images: std::collections::BTreeMap<String, Vec<String>>,
}

impl GaloisAuto {
    /// Builds the automorphism and checks that every image is a root of the
    /// corresponding minimal polynomial with coefficients mapped by the
    /// images of the lower levels.
    pub fn new(name: &str, images: Vec<FieldElement>) -> Result<Self, TowerError> {
        let bad = |reason: String| TowerError::BadAuto {
            name: name.to_string(),
            reason,
        };
        let Some(tower) = images.first().map(|x| x.tower().clone()) else {
            return Ok(GaloisAuto {
                name: name.to_string(),
                images,
            });
        };
        if images.len() != tower.num_levels() {
            return Err(bad(format!(
                "{} images for {} generators",
                images.len(),
                tower.num_levels()
            )));
        }
        if images.iter().any(|x| !x.same_tower(&images[0])) {
            return Err(TowerError::TowerMismatch);
        }
        let g = GaloisAuto {
            name: name.to_string(),
            images,
        };
        for (k, step) in tower.steps().iter().enumerate() {
            let img = &g.images[k];
            let mut acc = FieldElement::zero(&tower);
            for c in step.minpoly.iter().rev() {
                acc = &(&acc * img) + &g.apply_level(&tower, k, c);
            }
            if !acc.is_zero() {
                return Err(bad(format!(
                    "image of `{}` is not a root of its minimal polynomial",
                    step.name
                )));
            }
        }
        Ok(g)
    }

    /// The identity of `tower`.
    pub fn identity(tower: &Arc<FieldTower>) -> Self {
        let images = (0..tower.num_levels())
            .map(|k| FieldElement::generator(tower, k))
            .collect();
        GaloisAuto {
            name: "id".into(),
            images,
        }
    }

    pub fn from_spec(tower: &Arc<FieldTower>, spec: &GaloisSpec) -> Result<Self, TowerError> {
        let mut images = Vec::new();
        for step in tower.steps() {
            let coords = spec
                .images
                .get(&step.name)
                .ok_or_else(|| TowerError::BadAuto {
                    name: spec.name.clone(),
                    reason: format!("missing image for `{}`", step.name),
                })?;
            images.push(FieldElement::parse_coords(tower, coords)?);
        }
        if images.is_empty() {
            return Ok(GaloisAuto {
                name: spec.name.clone(),
                images,
            });
        }
        GaloisAuto::new(&spec.name, images)
    }

    pub fn to_spec(&self) -> GaloisSpec {
        let images = self
            .images
            .iter()
            .zip(
                self.images
                    .first()
                    .map(|x| x.tower().generator_names())
                    .unwrap_or_default(),
            )
            .map(|(x, n)| (n.to_string(), x.to_coord_strings()))
            .collect();
        GaloisSpec {
            name: self.name.clone(),
            images,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn images(&self) -> &[FieldElement] {
        &self.images
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    fn apply_level(&self, tower: &Arc<FieldTower>, level: usize, x: &[Rat]) -> FieldElement {
        if level == 0 {
            return FieldElement::from_rat(tower, x[0].clone());
        }
        let b = tower.level_degree(level - 1);
        let mut acc = FieldElement::zero(tower);
        for block in x.chunks(b).rev() {
            acc = &acc * &self.images[level - 1];
            if block.iter().any(|c| !c.is_zero()) {
                acc = &acc + &self.apply_level(tower, level - 1, block);
            }
        }
        acc
    }

    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        let tower = x.tower();
        let level = tower.min_level(x.coords());
        let n = tower.level_degree(level);
        self.apply_level(tower, level, &x.coords()[..n])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GaloisAuto) -> GaloisAuto {
        GaloisAuto {
            name: format!("{}{}", self.name, other.name),
            images: other.images.iter().map(|x| self.apply(x)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(k, x)| *x == FieldElement::generator(x.tower(), k))
    }

    /// Same map, ignoring names.
    pub fn same_map(&self, other: &GaloisAuto) -> bool {
        self.images == other.images
    }
}

/// Closes a generating set under composition; the identity comes first.
pub fn group_closure(tower: &Arc<FieldTower>, gens: &[GaloisAuto]) -> Vec<GaloisAuto> {
    let mut elems = vec![GaloisAuto::identity(tower)];
    let mut frontier = elems.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for g in gens {
                let y = g.compose(x);
                let name = if x.is_identity() {
                    g.name.clone()
                } else {
                    y.name.clone()
                };
                let y = y.with_name(&name);
                if !elems.iter().any(|e| e.same_map(&y)) {
                    elems.push(y.clone());
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    elems
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::valtower::{build_tower, TowerSpec};

    #[test]
    fn sigma_tau() {
        let t = build_tower(&TowerSpec::with_rational_steps(
            2,
            &[("sqrt2", &[-2, 0, 1]), ("i", &[1, 0, 1])],
        ))
        .unwrap();
        let s = FieldElement::named(&t, "sqrt2").unwrap();
        let i = FieldElement::named(&t, "i").unwrap();
        let sigma = GaloisAuto::new("s", vec![-&s, i.clone()]).unwrap();
        let tau = GaloisAuto::new("t", vec![s.clone(), -&i]).unwrap();
        assert_eq!(sigma.apply(&s), -&s);
        assert_eq!(tau.apply(&s), s);
        let q = FieldElement::from_rat(&t, rat(3, 5));
        assert_eq!(sigma.apply(&q), q);
        let x = &(&s * &i) + &FieldElement::one(&t);
        assert_eq!(
            sigma.apply(&tau.apply(&x)),
            &FieldElement::one(&t) + &(&s * &i)
        );
        assert_eq!(group_closure(&t, &[sigma, tau]).len(), 4);
        assert!(GaloisAuto::new("bad", vec![i.clone(), i]).is_err());
    }
}
