use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::{FieldTower, TowerError};
use crate::linalg::{det_rat_cols, Matrix};
use crate::scalar::{parse_rat, rat_padic_val, rat_short, rat_to_string, Coeff, FieldCoeff, Val};
use crate::Rat;

/// An element of the top field of a tower, in power-basis coordinates.
#[derive(Clone)]
pub struct FieldElement {
    tower: Arc<FieldTower>,
    coords: Vec<Rat>,
}

impl FieldElement {
    pub fn from_coords(tower: &Arc<FieldTower>, coords: Vec<Rat>) -> Result<Self, TowerError> {
        if coords.len() != tower.degree() {
            return Err(TowerError::CoordLength {
                got: coords.len(),
                expected: tower.degree(),
            });
        }
        Ok(FieldElement {
            tower: tower.clone(),
            coords,
        })
    }

    /// Parses `"num/den"` strings; shorter vectors are zero padded, which
    /// embeds an element of a lower level.
    pub fn parse_coords(tower: &Arc<FieldTower>, coords: &[String]) -> Result<Self, TowerError> {
        if coords.len() > tower.degree() {
            return Err(TowerError::CoordLength {
                got: coords.len(),
                expected: tower.degree(),
            });
        }
        let mut v = coords
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(TowerError::Parse)?;
        v.resize(tower.degree(), Rat::zero());
        Ok(FieldElement {
            tower: tower.clone(),
            coords: v,
        })
    }

    pub fn to_coord_strings(&self) -> Vec<String> {
        self.coords.iter().map(rat_to_string).collect()
    }

    pub fn from_rat(tower: &Arc<FieldTower>, r: Rat) -> Self {
        let mut coords = vec![Rat::zero(); tower.degree()];
        coords[0] = r;
        FieldElement {
            tower: tower.clone(),
            coords,
        }
    }

    pub fn from_int(tower: &Arc<FieldTower>, n: i64) -> Self {
        Self::from_rat(tower, Rat::from_integer(n.into()))
    }

    pub fn zero(tower: &Arc<FieldTower>) -> Self {
        Self::from_int(tower, 0)
    }

    pub fn one(tower: &Arc<FieldTower>) -> Self {
        Self::from_int(tower, 1)
    }

    /// The generator `θ_{level+1}` adjoined at step `level`.
    pub fn generator(tower: &Arc<FieldTower>, level: usize) -> Self {
        let mut coords = vec![Rat::zero(); tower.degree()];
        coords[tower.level_degree(level)] = Rat::one();
        FieldElement {
            tower: tower.clone(),
            coords,
        }
    }

    /// Looks a generator up by name.
    pub fn named(tower: &Arc<FieldTower>, name: &str) -> Option<Self> {
        let level = tower.steps().iter().position(|s| s.name == name)?;
        Some(Self::generator(tower, level))
    }

    /// Random element with small integer coordinates in `[-bound, bound]`.
    pub fn random<R: Rng + ?Sized>(tower: &Arc<FieldTower>, rng: &mut R, bound: i64) -> Self {
        let coords = (0..tower.degree())
            .map(|_| Rat::from_integer(rng.gen_range(-bound..=bound).into()))
            .collect();
        FieldElement {
            tower: tower.clone(),
            coords,
        }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    /// The rational value when the element lies in `Q`.
    pub fn as_rat(&self) -> Option<&Rat> {
        self.coords[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| &self.coords[0])
    }

    pub fn same_tower(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tower, &other.tower) || *self.tower == *other.tower
    }

    pub fn check_tower(&self, other: &Self) -> Result<(), TowerError> {
        if self.same_tower(other) {
            Ok(())
        } else {
            Err(TowerError::TowerMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, TowerError> {
        self.check_tower(other)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, TowerError> {
        self.check_tower(other)?;
        Ok(self - other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, TowerError> {
        self.check_tower(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        FieldElement {
            tower: self.tower.clone(),
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.tower);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Columns `x·b_j` of multiplication by `x` on the basis of level `level`.
    fn mult_columns(&self, level: usize) -> Vec<Vec<Rat>> {
        let n = self.tower.level_degree(level);
        let x = &self.coords[..n];
        (0..n)
            .map(|j| {
                let mut e = vec![Rat::zero(); n];
                e[j] = Rat::one();
                self.tower.mul_level(level, x, &e)
            })
            .collect()
    }

    /// Norm from the top field down to `Q`.
    pub fn norm(&self) -> Rat {
        let level = self.tower.min_level(&self.coords);
        let local = det_rat_cols(&self.mult_columns(level));
        let k = self.tower.degree() / self.tower.level_degree(level);
        num_traits::pow(local, k)
    }

    /// Absolute valuation, `v(p) = 1`.
    pub fn valuation(&self) -> Result<Val, TowerError> {
        if !self.tower.has_certificate() {
            return Err(TowerError::NoCertificate);
        }
        if self.is_zero() {
            return Ok(Val::Inf);
        }
        let level = self.tower.min_level(&self.coords);
        if level == 0 {
            let p = self.tower.prime();
            return Ok(Val::Fin(Rat::from_integer(
                rat_padic_val(&self.coords[0], p).unwrap().into(),
            )));
        }
        if level == 1 {
            return Ok(Val::Fin(self.norm_valuation(1)));
        }
        // v(x) = v(N_{F_ℓ/F_{ℓ−1}}(x)) / [F_ℓ : F_{ℓ−1}], the relative norm
        // being the determinant of multiplication by x on 1, θ, …, θ^{n−1}.
        let below = self.tower.level_degree(level - 1);
        let n = self.tower.steps()[level - 1].degree();
        let theta = FieldElement::generator(&self.tower, level - 1);
        let mut y = self.clone();
        let mut cols = Vec::with_capacity(n);
        for k in 0..n {
            let col: Vec<FieldElement> = y.coords[..below * n]
                .chunks(below)
                .map(|c| {
                    let mut coords = vec![Rat::zero(); self.coords.len()];
                    coords[..below].clone_from_slice(c);
                    FieldElement {
                        tower: self.tower.clone(),
                        coords,
                    }
                })
                .collect();
            cols.push(col);
            if k + 1 < n {
                y = &y * &theta;
            }
        }
        let norm = if n <= 4 {
            leibniz_det(&cols)
        } else {
            Matrix::from_cols(&cols).det().expect("square")
        };
        Ok(match norm.valuation()? {
            Val::Fin(v) => Val::Fin(v / Rat::from_integer(n.into())),
            Val::Inf => unreachable!("nonzero element has nonzero norm"),
        })
    }

    /// `v_p(N(x)) / [F_level : Q]` for `x` of level `level ≥ 1`.
    fn norm_valuation(&self, level: usize) -> Rat {
        let local = det_rat_cols(&self.mult_columns(level));
        let vp =
            rat_padic_val(&local, self.tower.prime()).expect("nonzero element has nonzero norm");
        Rat::new(vp.into(), (self.tower.level_degree(level) as i64).into())
    }

    /// Valuation of a nonzero element; panics without a certificate.
    pub fn v(&self) -> Val {
        self.valuation()
            .expect("valuation requires a certified tower")
    }

    pub fn inv(&self) -> Result<Self, TowerError> {
        if self.is_zero() {
            return Err(TowerError::DivisionByZero);
        }
        let level = self.tower.min_level(&self.coords);
        if level == 0 {
            return Ok(Self::from_rat(&self.tower, self.coords[0].recip()));
        }
        let n = self.tower.level_degree(level);
        let m = Matrix::from_cols(&self.mult_columns(level));
        let mut rhs = vec![Rat::zero(); n];
        rhs[0] = Rat::one();
        let mut sol = m.solve(&rhs).ok_or(TowerError::DivisionByZero)?;
        sol.resize(self.tower.degree(), Rat::zero());
        Ok(FieldElement {
            tower: self.tower.clone(),
            coords: sol,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self, TowerError> {
        self.check_tower(other)?;
        Ok(self * &other.inv()?)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && self.same_tower(other)
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl<'a> Add for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &'a FieldElement) -> FieldElement {
        debug_assert!(self.same_tower(rhs));
        FieldElement {
            tower: self.tower.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &'a FieldElement) -> FieldElement {
        debug_assert!(self.same_tower(rhs));
        FieldElement {
            tower: self.tower.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &'a FieldElement) -> FieldElement {
        debug_assert!(self.same_tower(rhs));
        let t = &self.tower;
        let level = t.min_level(&self.coords).max(t.min_level(&rhs.coords));
        let n = t.level_degree(level);
        let mut coords = t.mul_level(level, &self.coords[..n], &rhs.coords[..n]);
        coords.resize(t.degree(), Rat::zero());
        FieldElement {
            tower: t.clone(),
            coords,
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            tower: self.tower.clone(),
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $f(self, rhs: FieldElement) -> FieldElement {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl Coeff for FieldElement {
    fn zero_like(&self) -> Self {
        FieldElement::zero(&self.tower)
    }
    fn one_like(&self) -> Self {
        FieldElement::one(&self.tower)
    }
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

impl FieldCoeff for FieldElement {
    fn inv_ref(&self) -> Option<Self> {
        self.inv().ok()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.tower.generator_names();
        let mut first = true;
        for (idx, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono: Vec<String> = self
                .tower
                .exponents(idx)
                .iter()
                .zip(&names)
                .filter(|(e, _)| **e > 0)
                .map(|(e, n)| {
                    if *e == 1 {
                        n.to_string()
                    } else {
                        format!("{n}^{e}")
                    }
                })
                .collect();
            let mono = mono.join("*");
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{}", rat_short(&mag))?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{}*{mono}", rat_short(&mag))?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({self})")
    }
}

/// Determinant by permutation expansion; avoids field inversions.
fn leibniz_det(cols: &[Vec<FieldElement>]) -> FieldElement {
    fn perms(n: usize) -> Vec<(Vec<usize>, bool)> {
        if n == 0 {
            return vec![(vec![], true)];
        }
        let mut out = Vec::new();
        for (p, even) in perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                // Inserting at `pos` adds `n − 1 − pos` inversions.
                out.push((q, even == (n - 1 - pos).is_multiple_of(2)));
            }
        }
        out
    }
    let n = cols.len();
    let mut acc = cols[0][0].zero_like();
    for (p, even) in perms(n) {
        let mut term = cols[0][p[0]].clone();
        for (j, &i) in p.iter().enumerate().skip(1) {
            if term.is_zero() {
                break;
            }
            term = &term * &cols[j][i];
        }
        acc = if even { &acc + &term } else { &acc - &term };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::valtower::{build_tower, TowerSpec};

    fn l4() -> Arc<FieldTower> {
        build_tower(&TowerSpec::with_rational_steps(
            2,
            &[("sqrt2", &[-2, 0, 1]), ("i", &[1, 0, 1])],
        ))
        .unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let t = l4();
        let s = FieldElement::named(&t, "sqrt2").unwrap();
        let i = FieldElement::named(&t, "i").unwrap();
        let one = FieldElement::one(&t);
        assert_eq!(&s * &s, FieldElement::from_int(&t, 2));
        assert_eq!(&(&one + &i) * &(&one - &i), FieldElement::from_int(&t, 2));
        let inv = (&one + &i).inv().unwrap();
        assert_eq!(inv, (&one - &i).scale(&rat(1, 2)));
        assert_eq!(
            FieldElement::zero(&t).inv().unwrap_err(),
            TowerError::DivisionByZero
        );
        assert_eq!((&s + &i).to_string(), "sqrt2 + i");
        assert_eq!(
            (&(&s * &i).scale(&rat(-1, 2)) - &one).to_string(),
            "-1 - 1/2*sqrt2*i"
        );
    }

    #[test]
    fn norms_and_valuations() {
        let t = l4();
        let s = FieldElement::named(&t, "sqrt2").unwrap();
        let i = FieldElement::named(&t, "i").unwrap();
        let one = FieldElement::one(&t);
        assert_eq!(s.norm(), Rat::from_integer(4.into()));
        assert_eq!(
            FieldElement::from_int(&t, 3).norm(),
            Rat::from_integer(81.into())
        );
        assert_eq!(s.v(), Val::Fin(rat(1, 2)));
        assert_eq!((&s - &(&one + &i)).v(), Val::Fin(rat(3, 4)));
        assert_eq!(s.scale(&rat(2, 1)).v(), Val::Fin(rat(3, 2)));
        assert_eq!(FieldElement::zero(&t).v(), Val::Inf);
        let qi = build_tower(&TowerSpec::with_rational_steps(2, &[("i", &[1, 0, 1])])).unwrap();
        let i2 = FieldElement::named(&qi, "i").unwrap();
        assert_eq!(
            (&FieldElement::one(&qi) + &i2).norm(),
            Rat::from_integer(2.into())
        );
    }

    #[test]
    fn relative_tower() {
        // w² + w + 1 then z³ − 3 over Q(w)
        let spec = TowerSpec::with_rational_steps(3, &[("w", &[1, 1, 1]), ("z", &[-3, 0, 0, 1])]);
        let t = build_tower(&spec).unwrap();
        assert_eq!(t.degree(), 6);
        assert_eq!(
            FieldElement::named(&t, "z").unwrap().v(),
            Val::Fin(rat(1, 3))
        );
        assert_eq!(
            FieldElement::named(&t, "w").unwrap().v(),
            Val::Fin(rat(0, 1))
        );
    }

    #[test]
    fn tower_mismatch() {
        let a = l4();
        let b = build_tower(&TowerSpec::with_rational_steps(3, &[("w", &[1, 1, 1])])).unwrap();
        let x = FieldElement::one(&a);
        let y = FieldElement::one(&b);
        assert_eq!(x.try_add(&y).unwrap_err(), TowerError::TowerMismatch);
    }
}
