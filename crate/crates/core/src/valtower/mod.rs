//! Towers of finite extensions of `Q` carrying the unique extension of the
//! `p`-adic valuation.
//!
//! A tower is a chain `Q = F₀ ⊂ F₁ ⊂ … ⊂ F_k` where `F_j = F_{j-1}[θ_j]/(f_j)`
//! and `f_j` is monic with coefficients in `F_{j-1}`. Elements are stored as
//! coordinate vectors in the product power basis `θ₁^{i₁}⋯θ_k^{i_k}`, with
//! the lowest level varying fastest, so an element of `F_j` embeds in the
//! top field by zero padding.
//!
//! Valuations are absolute (`v(p) = 1`) and computed as
//! `v(x) = v_p(N(x)) / [F_j : Q]` on the smallest level `F_j` containing `x`.
//! That formula is only a valuation when `p` has a single prime above it in
//! the tower, which is what the unique-extension certificate asserts.

mod element;
mod galois;
mod lattice;

pub use element::FieldElement;
pub use galois::{group_closure, GaloisAuto, GaloisSpec};
pub use lattice::{ramification_index, Subfield, SubfieldLattice, SubfieldSpec};

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{parse_rat, rat_to_string};
use crate::Rat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TowerError {
    #[error("prime must be a prime number >= 2, got {0}")]
    BadPrime(u64),
    #[error("step `{0}`: minimal polynomial is not monic")]
    NotMonic(String),
    #[error("step `{name}`: degree {degree} is below 2")]
    DegreeTooSmall { name: String, degree: usize },
    #[error("step `{name}`: coefficient {index} has {got} coordinates, expected {expected}")]
    CoefficientLength {
        name: String,
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("multiplication failed the associativity spot check")]
    NotAssociative,
    #[error("unique-extension certificate failed sanity check: {0}")]
    CertificateFailed(String),
    #[error("valuation requested but the tower carries no unique-extension certificate")]
    NoCertificate,
    #[error("elements belong to different towers")]
    TowerMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("coordinate vector has length {got}, tower degree is {expected}")]
    CoordLength { got: usize, expected: usize },
    #[error("galois map `{name}`: {reason}")]
    BadAuto { name: String, reason: String },
    #[error("empty generating set")]
    EmptyGenerators,
    #[error("unknown subfield `{0}`")]
    UnknownSubfield(String),
    #[error("{0}")]
    Parse(String),
}

/// One extension step `F_j = F_{j-1}[θ]/(f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TowerStep {
    pub name: String,
    /// Ascending coefficients of the monic minimal polynomial, each given by
    /// its coordinates in the previous level.
    pub minpoly: Vec<Vec<Rat>>,
}

impl TowerStep {
    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }
}

#[derive(Debug, PartialEq)]
pub struct FieldTower {
    prime: u64,
    steps: Vec<TowerStep>,
    /// `level_degree[j] = [F_j : Q]`.
    level_degree: Vec<usize>,
    unique_extension: bool,
}

/// JSON form of a tower.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TowerSpec {
    pub prime: u64,
    #[serde(default)]
    pub steps: Vec<StepSpec>,
    #[serde(default)]
    pub unique_extension_certificate: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StepSpec {
    pub name: String,
    pub minpoly: Vec<Vec<String>>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl TowerSpec {
    /// Convenience for towers whose minimal polynomials have rational
    /// coefficients at every level (coefficients given in ascending order).
    pub fn with_rational_steps(prime: u64, steps: &[(&str, &[i64])]) -> TowerSpec {
        let mut deg = 1usize;
        let mut out = Vec::new();
        for (name, coeffs) in steps {
            let minpoly = coeffs
                .iter()
                .map(|&c| {
                    let mut v = vec!["0".to_string(); deg];
                    v[0] = c.to_string();
                    v
                })
                .collect();
            out.push(StepSpec {
                name: name.to_string(),
                minpoly,
            });
            deg *= coeffs.len() - 1;
        }
        TowerSpec {
            prime,
            steps: out,
            unique_extension_certificate: true,
        }
    }
}

/// Validates a tower description and builds the tower.
pub fn build_tower(spec: &TowerSpec) -> Result<Arc<FieldTower>, TowerError> {
    if !is_prime(spec.prime) {
        return Err(TowerError::BadPrime(spec.prime));
    }
    let mut steps = Vec::new();
    let mut level_degree = vec![1usize];
    for s in &spec.steps {
        if steps.iter().any(|t: &TowerStep| t.name == s.name) {
            return Err(TowerError::DuplicateName(s.name.clone()));
        }
        let prev = *level_degree.last().unwrap();
        let degree = s.minpoly.len().saturating_sub(1);
        if degree < 2 {
            return Err(TowerError::DegreeTooSmall {
                name: s.name.clone(),
                degree,
            });
        }
        let mut minpoly = Vec::new();
        for (index, c) in s.minpoly.iter().enumerate() {
            if c.len() != prev {
                return Err(TowerError::CoefficientLength {
                    name: s.name.clone(),
                    index,
                    got: c.len(),
                    expected: prev,
                });
            }
            let coords = c
                .iter()
                .map(|x| parse_rat(x))
                .collect::<Result<Vec<_>, _>>();
            minpoly.push(coords.map_err(TowerError::Parse)?);
        }
        let lead = minpoly.last().unwrap();
        if !lead[0].is_one() || lead[1..].iter().any(|x| !x.is_zero()) {
            return Err(TowerError::NotMonic(s.name.clone()));
        }
        level_degree.push(prev * degree);
        steps.push(TowerStep {
            name: s.name.clone(),
            minpoly,
        });
    }
    let tower = Arc::new(FieldTower {
        prime: spec.prime,
        steps,
        level_degree,
        unique_extension: spec.unique_extension_certificate,
    });
    tower.spot_check()?;
    Ok(tower)
}

impl FieldTower {
    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn degree(&self) -> usize {
        *self.level_degree.last().unwrap()
    }

    pub fn steps(&self) -> &[TowerStep] {
        &self.steps
    }

    pub fn has_certificate(&self) -> bool {
        self.unique_extension
    }

    pub fn level_degree(&self, level: usize) -> usize {
        self.level_degree[level]
    }

    pub fn num_levels(&self) -> usize {
        self.steps.len()
    }

    pub fn generator_names(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn to_spec(&self) -> TowerSpec {
        TowerSpec {
            prime: self.prime,
            steps: self
                .steps
                .iter()
                .map(|s| StepSpec {
                    name: s.name.clone(),
                    minpoly: s
                        .minpoly
                        .iter()
                        .map(|c| c.iter().map(rat_to_string).collect())
                        .collect(),
                })
                .collect(),
            unique_extension_certificate: self.unique_extension,
        }
    }

    /// Exponent vector of the basis monomial with flat index `idx`.
    pub fn exponents(&self, mut idx: usize) -> Vec<usize> {
        self.steps
            .iter()
            .map(|s| {
                let d = s.degree();
                let e = idx % d;
                idx /= d;
                e
            })
            .collect()
    }

    /// Smallest level containing an element with these coordinates.
    pub(crate) fn min_level(&self, coords: &[Rat]) -> usize {
        let last = coords.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
        self.level_degree.iter().position(|&d| last < d).unwrap()
    }

    pub(crate) fn mul_level(&self, level: usize, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        if level == 0 {
            return vec![&x[0] * &y[0]];
        }
        let b = self.level_degree[level - 1];
        let step = &self.steps[level - 1];
        let d = step.degree();
        let nz = |s: &[Rat]| s.iter().any(|c| !c.is_zero());
        let mut z: Vec<Option<Vec<Rat>>> = vec![None; 2 * d - 1];
        let xb: Vec<&[Rat]> = x.chunks(b).collect();
        let yb: Vec<&[Rat]> = y.chunks(b).collect();
        let xnz: Vec<bool> = xb.iter().map(|s| nz(s)).collect();
        let ynz: Vec<bool> = yb.iter().map(|s| nz(s)).collect();
        for i in 0..d {
            if !xnz[i] {
                continue;
            }
            for j in 0..d {
                if !ynz[j] {
                    continue;
                }
                let p = self.mul_level(level - 1, xb[i], yb[j]);
                add_into(&mut z[i + j], &p);
            }
        }
        for m in (d..2 * d - 1).rev() {
            let Some(t) = z[m].take() else { continue };
            if !nz(&t) {
                continue;
            }
            for (i, c) in step.minpoly[..d].iter().enumerate() {
                if !nz(c) {
                    continue;
                }
                let p = self.mul_level(level - 1, &t, c);
                sub_into(&mut z[m - d + i], &p);
            }
        }
        let mut out = Vec::with_capacity(b * d);
        for block in z.into_iter().take(d) {
            match block {
                Some(v) => out.extend(v),
                None => out.extend(std::iter::repeat_n(Rat::zero(), b)),
            }
        }
        out
    }

    fn spot_check(self: &Arc<Self>) -> Result<(), TowerError> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..4 {
            let x = FieldElement::random(self, &mut rng, 3);
            let y = FieldElement::random(self, &mut rng, 3);
            let z = FieldElement::random(self, &mut rng, 3);
            if &(&x * &y) * &z != &x * &(&y * &z) {
                return Err(TowerError::NotAssociative);
            }
        }
        if !self.unique_extension || self.degree() == 1 {
            return Ok(());
        }
        // A reducible defining polynomial or a split prime shows up as a
        // zero norm or as a violated ultrametric inequality.
        for _ in 0..24 {
            let x = FieldElement::random(self, &mut rng, 4);
            let y = FieldElement::random(self, &mut rng, 4);
            if x.is_zero() || y.is_zero() || (&x + &y).is_zero() {
                continue;
            }
            if x.norm().is_zero() {
                return Err(TowerError::CertificateFailed(format!(
                    "nonzero element {x} has norm zero"
                )));
            }
            let (vx, vy, vs) = (x.valuation()?, y.valuation()?, (&x + &y).valuation()?);
            if vs < vx.clone().min(vy.clone()) {
                return Err(TowerError::CertificateFailed(format!(
                    "v({x} + {y}) = {vs} < min({vx}, {vy})"
                )));
            }
        }
        let _ = rng.gen::<u8>();
        Ok(())
    }
}

fn add_into(slot: &mut Option<Vec<Rat>>, p: &[Rat]) {
    match slot {
        Some(v) => v.iter_mut().zip(p).for_each(|(a, b)| *a += b),
        None => *slot = Some(p.to_vec()),
    }
}

fn sub_into(slot: &mut Option<Vec<Rat>>, p: &[Rat]) {
    match slot {
        Some(v) => v.iter_mut().zip(p).for_each(|(a, b)| *a -= b),
        None => *slot = Some(p.iter().map(|x| -x).collect()),
    }
}
