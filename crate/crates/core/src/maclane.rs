//! Inductive valuations `[v₀, v₁(φ₁) = λ₁, …, vₙ(φₙ) = λₙ]` on `K[x]`.
//!
//! Values are in the base normalization `v_K(K^×) = Z`. Full key-polynomial
//! validity is not decided; construction checks monicity, minimality of
//! each `φ` for the previous level and `λᵢ > vᵢ₋₁(φᵢ)`, and
//! [`MacLaneValuation::oracle_check`] samples the valuation axioms.

use std::fmt;

use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{denom_u64, parse_rat, rat_short, rat_to_string, Val};
use crate::valtower::{Subfield, SubfieldLattice, TowerError};
use crate::{FieldElement, FieldPoly, Rat};

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_240_917;
/// Sample count used by [`compare`] and [`infimum`].
pub const DEFAULT_SAMPLES: usize = 500;

#[derive(Debug, Error)]
pub enum MacLaneError {
    #[error("invalid chain: {0}")]
    Invalid(String),
    #[error("valuations over different base fields `{0}` and `{1}`")]
    BaseMismatch(String, String),
    #[error("chains are structurally incomparable: {0}")]
    StructurallyIncomparable(String),
    #[error("oracle rejected the valuation: {0}")]
    Oracle(String),
    #[error("multiplicity {mult} of `{candidate}` does not divide {m}")]
    BoundViolated {
        candidate: String,
        mult: u64,
        m: u64,
    },
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// One augmentation step `vᵢ(φᵢ) = λᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Augmentation {
    pub phi: FieldPoly,
    pub lambda: Rat,
}

#[derive(Clone, Debug)]
pub struct MacLaneValuation {
    base: Subfield,
    chain: Vec<Augmentation>,
}

fn e_of(base: &Subfield) -> Rat {
    Rat::from_integer(base.ram_index().into())
}

/// The Gauss valuation `v₀(Σ aᵢxⁱ) = minᵢ v_K(aᵢ)`.
pub fn gauss_eval(base: &Subfield, f: &FieldPoly) -> Val {
    let e = e_of(base);
    f.coeffs()
        .iter()
        .map(|a| a.v().scale(&e))
        .min()
        .unwrap_or(Val::Inf)
}

impl MacLaneValuation {
    /// The Gauss valuation over `base`.
    pub fn gauss(base: &Subfield) -> Self {
        MacLaneValuation {
            base: base.clone(),
            chain: Vec::new(),
        }
    }

    /// Builds a chain, checking every step.
    pub fn new(base: &Subfield, chain: Vec<Augmentation>) -> Result<Self, MacLaneError> {
        let mut v = Self::gauss(base);
        for a in chain {
            v = v.augment(a.phi, a.lambda)?;
        }
        Ok(v)
    }

    /// `[self, w(φ) = λ]`.
    pub fn augment(&self, phi: FieldPoly, lambda: Rat) -> Result<Self, MacLaneError> {
        let k = self.chain.len() + 1;
        let bad = |msg: String| Err(MacLaneError::Invalid(format!("step {k}: {msg}")));
        let Some(deg) = phi.degree().filter(|&d| d >= 1) else {
            return bad("key polynomial must have degree at least 1".into());
        };
        if !phi.is_monic() {
            return bad(format!("`{}` is not monic", poly_string(&phi)));
        }
        if let Some(c) = phi.coeffs().iter().find(|c| !self.base.contains(c)) {
            return bad(format!("coefficient {c} is not in {}", self.base.name()));
        }
        if lambda <= Rat::zero() {
            return bad(format!("λ = {} is not positive", rat_short(&lambda)));
        }
        let current = self.evaluate(&phi);
        // Minimality of φ for the current level: its leading term dominates
        // the expansion in the previous key polynomial.
        let expected = match self.chain.last() {
            None => Rat::zero(),
            Some(prev) => {
                let pd = prev.phi.degree().unwrap();
                if deg % pd != 0 {
                    return bad(format!(
                        "deg φ = {deg} is not a multiple of the previous degree {pd}"
                    ));
                }
                &prev.lambda * Rat::from_integer(((deg / pd) as i64).into())
            }
        };
        if current != Val::Fin(expected.clone()) {
            return bad(format!(
                "`{}` is not minimal: value {} instead of {}",
                poly_string(&phi),
                current,
                rat_short(&expected)
            ));
        }
        if !current.fin().is_some_and(|c| &lambda > c) {
            return bad(format!(
                "λ = {} does not exceed the current value {current}",
                rat_short(&lambda)
            ));
        }
        let mut chain = self.chain.clone();
        chain.push(Augmentation { phi, lambda });
        Ok(MacLaneValuation {
            base: self.base.clone(),
            chain,
        })
    }

    pub fn base(&self) -> &Subfield {
        &self.base
    }

    pub fn chain(&self) -> &[Augmentation] {
        &self.chain
    }

    /// Number of augmentations.
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_gauss(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn evaluate(&self, f: &FieldPoly) -> Val {
        self.eval_level(self.chain.len(), f)
    }

    fn eval_level(&self, k: usize, f: &FieldPoly) -> Val {
        if f.is_zero() {
            return Val::Inf;
        }
        if k == 0 {
            return gauss_eval(&self.base, f);
        }
        let aug = &self.chain[k - 1];
        let mut best = Val::Inf;
        let mut shift = Rat::zero();
        for a in f.adic_expansion(&aug.phi) {
            if !a.is_zero() {
                best = best.min(self.eval_level(k - 1, &a).plus_rat(&shift));
            }
            shift += &aug.lambda;
        }
        best
    }

    /// The prefix valuation `v_k`.
    pub fn truncation(&self, k: usize) -> Self {
        MacLaneValuation {
            base: self.base.clone(),
            chain: self.chain[..k.min(self.chain.len())].to_vec(),
        }
    }

    /// `v₀ ⪯ v₁ ⪯ … ⪯ vₙ = v`.
    pub fn truncations(&self) -> Vec<Self> {
        (0..=self.chain.len()).map(|k| self.truncation(k)).collect()
    }

    /// lcm of the denominators of the `λᵢ`.
    pub fn multiplicity(&self) -> u64 {
        self.chain
            .iter()
            .fold(1u64, |m, a| m.lcm(&denom_u64(&a.lambda)))
    }

    /// Identical base and chain.
    pub fn same_chain(&self, other: &Self) -> bool {
        self.base.name() == other.base.name() && self.chain == other.chain
    }

    /// Samples the valuation axioms on random pairs.
    pub fn oracle_check(&self, samples: usize, seed: u64) -> Result<OracleReport, MacLaneError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs: Vec<(FieldPoly, FieldPoly)> = (0..samples)
            .map(|_| (self.random_poly(&mut rng), self.random_poly(&mut rng)))
            .collect();
        let failure = pairs.par_iter().find_map_first(|(f, g)| {
            let (vf, vg) = (self.evaluate(f), self.evaluate(g));
            let prod = self.evaluate(&f.mul(g));
            if prod != vf.plus(&vg) {
                return Some(format!(
                    "v(fg) = {prod} but v(f) + v(g) = {} for f = {}, g = {}",
                    vf.plus(&vg),
                    poly_string(f),
                    poly_string(g)
                ));
            }
            let sum = self.evaluate(&f.add(g));
            if sum < vf.clone().min(vg.clone()) {
                return Some(format!(
                    "v(f + g) = {sum} < min(v(f), v(g)) for f = {}, g = {}",
                    poly_string(f),
                    poly_string(g)
                ));
            }
            None
        });
        match failure {
            Some(msg) => Err(MacLaneError::Oracle(msg)),
            None => Ok(OracleReport { seed, samples }),
        }
    }

    /// Random polynomial over the base: either dense with small coefficients
    /// or a short expansion in the top key polynomial.
    pub fn random_poly<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldPoly {
        let top = self
            .chain
            .iter()
            .map(|a| a.phi.degree().unwrap())
            .max()
            .unwrap_or(1);
        let elt = |rng: &mut R| random_base_element(&self.base, rng);
        if self.chain.is_empty() || rng.gen_bool(0.5) {
            let d = rng.gen_range(0..=2 * top + 1);
            return FieldPoly::new((0..=d).map(|_| elt(rng)).collect());
        }
        let phi = &self.chain[rng.gen_range(0..self.chain.len())].phi;
        let pd = phi.degree().unwrap();
        let mut f = FieldPoly::zero();
        let mut pw = FieldPoly::constant(FieldElement::one(self.base.basis()[0].tower()));
        for _ in 0..rng.gen_range(1..=3) {
            let a = FieldPoly::new((0..pd).map(|_| elt(rng)).collect());
            f = f.add(&a.mul(&pw));
            pw = pw.mul(phi);
        }
        f
    }

    pub fn to_spec(&self) -> MacLaneSpec {
        MacLaneSpec {
            base: self.base.name().to_string(),
            chain: self
                .chain
                .iter()
                .map(|a| StepJson {
                    phi: a
                        .phi
                        .coeffs()
                        .iter()
                        .map(FieldElement::to_coord_strings)
                        .collect(),
                    lambda: rat_to_string(&a.lambda),
                })
                .collect(),
        }
    }

    pub fn from_spec(lat: &SubfieldLattice, spec: &MacLaneSpec) -> Result<Self, MacLaneError> {
        let base = lat.get(&spec.base)?;
        let mut chain = Vec::new();
        for s in &spec.chain {
            let coeffs = s
                .phi
                .iter()
                .map(|c| FieldElement::parse_coords(lat.tower(), c))
                .collect::<Result<Vec<_>, _>>()?;
            let lambda = parse_rat(&s.lambda).map_err(TowerError::Parse)?;
            chain.push(Augmentation {
                phi: FieldPoly::new(coeffs),
                lambda,
            });
        }
        Self::new(base, chain)
    }
}

/// Small random element of `F`: integer combination of its basis, scaled by
/// a random power of `p`.
pub fn random_base_element<R: Rng + ?Sized>(base: &Subfield, rng: &mut R) -> FieldElement {
    let basis = base.basis();
    let tower = basis[0].tower();
    let mut x = FieldElement::zero(tower);
    for b in basis {
        let c = rng.gen_range(-3i64..=3);
        if c != 0 {
            x = &x + &b.scale(&Rat::from_integer(c.into()));
        }
    }
    let k = rng.gen_range(0..3u32);
    &x * &FieldElement::from_int(tower, (tower.prime() as i64).pow(k))
}

impl fmt::Display for MacLaneValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[v0")?;
        for (i, a) in self.chain.iter().enumerate() {
            write!(
                f,
                ", v{}({}) = {}",
                i + 1,
                poly_string(&a.phi),
                rat_short(&a.lambda)
            )?;
        }
        write!(f, "]")
    }
}

/// `x^2 - 2`, `x + (1 + i)`.
pub fn poly_string(f: &FieldPoly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, c) in f.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let text = c.to_string();
        let simple = c.as_rat().is_some();
        let negative = simple && text.starts_with('-');
        let mag = if negative {
            text[1..].to_string()
        } else {
            text
        };
        let sign = if negative { "-" } else { "+" };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let coef = if simple { mag } else { format!("({mag})") };
        let var = match k {
            0 => String::new(),
            1 => "x".into(),
            _ => format!("x^{k}"),
        };
        if var.is_empty() {
            out.push_str(&coef);
        } else if coef == "1" {
            out.push_str(&var);
        } else {
            out.push_str(&format!("{coef}*{var}"));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub samples: usize,
}

/// Valuation JSON.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MacLaneSpec {
    pub base: String,
    pub chain: Vec<StepJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StepJson {
    pub phi: Vec<Vec<String>>,
    pub lambda: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    Incomparable,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Verdict {
    Yes,
    No,
    Unknown,
}

/// Exact sufficient test for `v ⪯ w`: `w(φᵢ) ≥ λᵢ` along `v`'s chain.
pub fn certified_leq(v: &MacLaneValuation, w: &MacLaneValuation) -> bool {
    v.chain.iter().all(|a| w.evaluate(&a.phi).ge_rat(&a.lambda))
}

fn check_base(v: &MacLaneValuation, w: &MacLaneValuation) -> Result<(), MacLaneError> {
    if v.base.name() != w.base.name() {
        return Err(MacLaneError::BaseMismatch(
            v.base.name().into(),
            w.base.name().into(),
        ));
    }
    Ok(())
}

fn key_polys(v: &MacLaneValuation, w: &MacLaneValuation) -> Vec<FieldPoly> {
    v.chain
        .iter()
        .chain(&w.chain)
        .map(|a| a.phi.clone())
        .collect()
}

/// `v ⪯ w`: certified structurally, refuted by any `f` with `v(f) > w(f)`.
fn leq(v: &MacLaneValuation, w: &MacLaneValuation, sample: &[FieldPoly]) -> Verdict {
    let refuted = sample.par_iter().any(|f| v.evaluate(f) > w.evaluate(f));
    match (certified_leq(v, w), refuted) {
        (true, false) => Verdict::Yes,
        (false, true) => Verdict::No,
        _ => Verdict::Unknown,
    }
}

fn comparison_sample(
    v: &MacLaneValuation,
    w: &MacLaneValuation,
    samples: usize,
    seed: u64,
) -> Vec<FieldPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = key_polys(v, w);
    for k in 0..samples {
        let src = if k % 2 == 0 { v } else { w };
        out.push(src.random_poly(&mut rng));
    }
    out
}

/// Order of two valuations with the default seed and sample size.
pub fn compare(v: &MacLaneValuation, w: &MacLaneValuation) -> Result<Comparison, MacLaneError> {
    compare_with(v, w, DEFAULT_SAMPLES, DEFAULT_SEED)
}

pub fn compare_with(
    v: &MacLaneValuation,
    w: &MacLaneValuation,
    samples: usize,
    seed: u64,
) -> Result<Comparison, MacLaneError> {
    check_base(v, w)?;
    let sample = comparison_sample(v, w, samples, seed);
    Ok(match (leq(v, w, &sample), leq(w, v, &sample)) {
        (Verdict::Yes, Verdict::Yes) => Comparison::Equal,
        (Verdict::Yes, Verdict::No) => Comparison::Less,
        (Verdict::No, Verdict::Yes) => Comparison::Greater,
        (Verdict::No, Verdict::No) => Comparison::Incomparable,
        _ => Comparison::Unknown,
    })
}

fn structurally_equal(v: &MacLaneValuation, w: &MacLaneValuation) -> bool {
    certified_leq(v, w) && certified_leq(w, v)
}

/// Lower bound of `v` and `w` at their divergence key: the common prefix,
/// followed by `φ` with `λ := min(v(φ), w(φ))` when that is a valid
/// augmentation. Both choices of `φ` are tried; the larger result wins.
pub fn infimum(
    v: &MacLaneValuation,
    w: &MacLaneValuation,
) -> Result<MacLaneValuation, MacLaneError> {
    check_base(v, w)?;
    let n = v.len().min(w.len());
    let mut k = 0;
    while k < n && structurally_equal(&v.truncation(k + 1), &w.truncation(k + 1)) {
        k += 1;
    }
    let prefix = v.truncation(k);
    if k == v.len() {
        return Ok(v.clone());
    }
    if k == w.len() {
        return Ok(w.clone());
    }
    let candidate = |phi: &FieldPoly| -> MacLaneValuation {
        let lambda = v.evaluate(phi).min(w.evaluate(phi));
        match lambda {
            Val::Fin(l) => prefix
                .augment(phi.clone(), l)
                .unwrap_or_else(|_| prefix.clone()),
            Val::Inf => prefix.clone(),
        }
    };
    let cv = candidate(&v.chain[k].phi);
    let cw = candidate(&w.chain[k].phi);
    for c in [&cv, &cw] {
        if !(certified_leq(c, v) && certified_leq(c, w)) {
            return Err(MacLaneError::StructurallyIncomparable(format!(
                "{c} is not below both {v} and {w}"
            )));
        }
    }
    if certified_leq(&cw, &cv) {
        Ok(cv)
    } else if certified_leq(&cv, &cw) {
        Ok(cw)
    } else {
        Err(MacLaneError::StructurallyIncomparable(format!(
            "{cv} and {cw} are both maximal lower bounds of {v} and {w}"
        )))
    }
}

#[derive(Clone, Debug)]
pub enum InfClosure {
    Closed,
    /// The infimum of members `pair` is not in the set.
    NotClosed {
        pair: (usize, usize),
        infimum: MacLaneValuation,
    },
}

/// Whether every pairwise infimum compares equal to a member.
pub fn inf_closed(set: &[MacLaneValuation]) -> Result<InfClosure, MacLaneError> {
    for i in 0..set.len() {
        for j in i + 1..set.len() {
            let m = infimum(&set[i], &set[j])?;
            let mut present = false;
            for s in set {
                if compare(&m, s)? == Comparison::Equal {
                    present = true;
                    break;
                }
            }
            if !present {
                return Ok(InfClosure::NotClosed {
                    pair: (i, j),
                    infimum: m,
                });
            }
        }
    }
    Ok(InfClosure::Closed)
}

/// All truncations of all members, without structural duplicates.
pub fn principal_candidates(set: &[MacLaneValuation]) -> Vec<MacLaneValuation> {
    let mut out: Vec<MacLaneValuation> = Vec::new();
    for v in set {
        for t in v.truncations() {
            if !out
                .iter()
                .any(|u| u.same_chain(&t) || structurally_equal(u, &t))
            {
                out.push(t);
            }
        }
    }
    out
}

/// `m = lcm` of the multiplicities over `set`; every candidate's
/// multiplicity is checked to divide it.
pub fn stability_index_bound(set: &[MacLaneValuation]) -> Result<u64, MacLaneError> {
    let m = set.iter().fold(1u64, |m, v| m.lcm(&v.multiplicity()));
    for c in principal_candidates(set) {
        let mult = c.multiplicity();
        if m % mult != 0 {
            return Err(MacLaneError::BoundViolated {
                candidate: c.to_string(),
                mult,
                m,
            });
        }
    }
    Ok(m)
}

/// `x − c` as a key polynomial.
pub fn linear(c: &FieldElement) -> FieldPoly {
    FieldPoly::new(vec![-c, FieldElement::one(c.tower())])
}

/// Polynomial from ascending integer coefficients.
pub fn rational_poly(tower: &std::sync::Arc<crate::FieldTower>, coeffs: &[i64]) -> FieldPoly {
    FieldPoly::new(
        coeffs
            .iter()
            .map(|&c| FieldElement::from_int(tower, c))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::valtower::{build_tower, TowerSpec};

    fn q2() -> Subfield {
        let t = build_tower(&TowerSpec::with_rational_steps(2, &[])).unwrap();
        Subfield::new(&t, "Q", vec![])
    }

    fn chain(base: &Subfield, steps: &[(&[i64], Rat)]) -> MacLaneValuation {
        let t = base.basis()[0].tower().clone();
        MacLaneValuation::new(
            base,
            steps
                .iter()
                .map(|(c, l)| Augmentation {
                    phi: rational_poly(&t, c),
                    lambda: l.clone(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn spec_chain() {
        let q = q2();
        let t = q.basis()[0].tower().clone();
        let v = chain(&q, &[(&[0, 1], rat(1, 2)), (&[-2, 0, 1], rat(5, 4))]);
        assert_eq!(v.to_string(), "[v0, v1(x) = 1/2, v2(x^2 - 2) = 5/4]");
        assert_eq!(
            v.evaluate(&rational_poly(&t, &[-2, 0, 1])),
            Val::Fin(rat(5, 4))
        );
        assert_eq!(
            v.truncation(1).evaluate(&rational_poly(&t, &[2, 0, 1])),
            Val::Fin(rat(1, 1))
        );
        assert_eq!(v.multiplicity(), 4);
        v.oracle_check(200, DEFAULT_SEED).unwrap();
    }

    #[test]
    fn rejects_bad_steps() {
        let q = q2();
        let t = q.basis()[0].tower().clone();
        let g = MacLaneValuation::gauss(&q);
        assert!(g.augment(rational_poly(&t, &[0, 2]), rat(1, 1)).is_err());
        assert!(g.augment(rational_poly(&t, &[0, 1]), rat(0, 1)).is_err());
        assert!(g.augment(rational_poly(&t, &[1]), rat(1, 1)).is_err());
        let v1 = g.augment(rational_poly(&t, &[0, 1]), rat(1, 2)).unwrap();
        // x − 1 is not minimal for v₁: v₁(x − 1) = 0 ≠ 1/2.
        assert!(v1.augment(rational_poly(&t, &[-1, 1]), rat(1, 1)).is_err());
        // x² − 2 with λ = 1 does not exceed v₁(x² − 2) = 1.
        assert!(v1
            .augment(rational_poly(&t, &[-2, 0, 1]), rat(1, 1))
            .is_err());
    }
}
