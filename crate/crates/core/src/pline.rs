//! The projective line over the top field of a tower: points, discs,
//! Möbius maps and sup-norm (type-2) points `η_{a,r}`.
//!
//! Radii are valuative: `B̄(a, r) = {z : v(z − a) ≥ r}` and
//! `B(a, r) = {z : v(z − a) > r}`, so a larger radius means a smaller disc.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{parse_rat, rat_short, rat_to_string, Val};
use crate::valtower::{FieldElement, FieldTower, GaloisAuto, TowerError};
use crate::Rat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlineError {
    #[error("matrix is singular")]
    Singular,
    #[error("the pole of the map does not lie inside the disc")]
    PoleNotInside,
    #[error("the pole of the map lies inside the closed disc")]
    PoleInsideOrOnBoundary,
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// `v(a − b)`.
pub fn vdist(a: &FieldElement, b: &FieldElement) -> Val {
    (a - b).v()
}

fn fin(v: Val) -> Rat {
    v.fin().cloned().expect("finite valuation")
}

#[derive(Clone, Debug, PartialEq)]
pub enum P1Point {
    Finite(FieldElement),
    Infinity,
}

impl P1Point {
    pub fn finite(&self) -> Option<&FieldElement> {
        match self {
            P1Point::Finite(x) => Some(x),
            P1Point::Infinity => None,
        }
    }
}

impl fmt::Display for P1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1Point::Finite(x) => write!(f, "{x}"),
            P1Point::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Closed,
    Open,
}

impl Boundary {
    fn flip(self) -> Self {
        match self {
            Boundary::Closed => Boundary::Open,
            Boundary::Open => Boundary::Closed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Inside,
    Complement,
}

/// A disc, or with `side = Complement` the complement of that disc in `P¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct Disc {
    pub center: FieldElement,
    pub vradius: Rat,
    pub boundary: Boundary,
    pub side: Side,
}

impl Disc {
    pub fn closed(center: FieldElement, vradius: Rat) -> Disc {
        Disc {
            center,
            vradius,
            boundary: Boundary::Closed,
            side: Side::Inside,
        }
    }

    pub fn open(center: FieldElement, vradius: Rat) -> Disc {
        Disc {
            center,
            vradius,
            boundary: Boundary::Open,
            side: Side::Inside,
        }
    }

    pub fn complement(&self) -> Disc {
        let side = match self.side {
            Side::Inside => Side::Complement,
            Side::Complement => Side::Inside,
        };
        Disc {
            side,
            ..self.clone()
        }
    }

    pub fn is_closed_inside(&self) -> bool {
        self.boundary == Boundary::Closed && self.side == Side::Inside
    }

    /// Whether a point at valuative distance `d` from the center lies in the
    /// underlying disc, ignoring `side`.
    fn ball_has(&self, d: &Val) -> bool {
        match self.boundary {
            Boundary::Closed => d.ge_rat(&self.vradius),
            Boundary::Open => d.gt_rat(&self.vradius),
        }
    }

    fn sided(&self, in_ball: bool) -> bool {
        match self.side {
            Side::Inside => in_ball,
            Side::Complement => !in_ball,
        }
    }

    pub fn contains(&self, x: &P1Point) -> bool {
        match x {
            P1Point::Infinity => self.side == Side::Complement,
            P1Point::Finite(z) => self.sided(self.ball_has(&vdist(z, &self.center))),
        }
    }

    /// Membership of `η_{b,s}` in the Berkovich disc (or its complement).
    pub fn contains_type2(&self, eta: &Type2Point) -> bool {
        let d = vdist(&eta.center, &self.center);
        let in_ball = match self.boundary {
            Boundary::Closed => eta.vradius >= self.vradius && d.ge_rat(&self.vradius),
            Boundary::Open => eta.vradius > self.vradius && d.gt_rat(&self.vradius),
        };
        self.sided(in_ball)
    }

    /// Same center class and radius, ignoring which representative center
    /// is stored.
    pub fn same_set(&self, other: &Disc) -> bool {
        self.boundary == other.boundary
            && self.side == other.side
            && self.vradius == other.vradius
            && self.ball_has(&vdist(&self.center, &other.center))
    }

    /// The type-2 point on the boundary of the disc.
    pub fn boundary_point(&self) -> Type2Point {
        Type2Point::new(self.center.clone(), self.vradius.clone())
    }

    pub fn to_spec(&self) -> DiscSpec {
        DiscSpec {
            center: self.center.to_coord_strings(),
            vradius: rat_to_string(&self.vradius),
            boundary: self.boundary,
            side: self.side,
        }
    }

    pub fn from_spec(tower: &Arc<FieldTower>, s: &DiscSpec) -> Result<Disc, TowerError> {
        Ok(Disc {
            center: FieldElement::parse_coords(tower, &s.center)?,
            vradius: parse_rat(&s.vradius).map_err(TowerError::Parse)?,
            boundary: s.boundary,
            side: s.side,
        })
    }
}

impl fmt::Display for Disc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.side == Side::Complement {
            write!(f, "P1 \\ ")?;
        }
        let (l, r) = match self.boundary {
            Boundary::Closed => ('[', ']'),
            Boundary::Open => ('(', ')'),
        };
        write!(f, "B{l}{}; {}{r}", self.center, rat_short(&self.vradius))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscSpec {
    pub center: Vec<String>,
    pub vradius: String,
    pub boundary: Boundary,
    pub side: Side,
}

/// An element of `PGL₂`, stored as a representative matrix `[[a, b], [c, d]]`.
#[derive(Clone, Debug)]
pub struct Mobius {
    m: [FieldElement; 4],
}

impl Mobius {
    pub fn new(
        a: FieldElement,
        b: FieldElement,
        c: FieldElement,
        d: FieldElement,
    ) -> Result<Self, PlineError> {
        a.check_tower(&b)?;
        a.check_tower(&c)?;
        a.check_tower(&d)?;
        let g = Mobius { m: [a, b, c, d] };
        if g.det().is_zero() {
            return Err(PlineError::Singular);
        }
        Ok(g)
    }

    pub fn identity(tower: &Arc<FieldTower>) -> Self {
        let (o, z) = (FieldElement::one(tower), FieldElement::zero(tower));
        Mobius {
            m: [o.clone(), z.clone(), z, o],
        }
    }

    pub fn diag(a: FieldElement, d: FieldElement) -> Result<Self, PlineError> {
        let z = FieldElement::zero(a.tower());
        Mobius::new(a, z.clone(), z, d)
    }

    pub fn entries(&self) -> &[FieldElement; 4] {
        &self.m
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        self.m[0].tower()
    }

    pub fn det(&self) -> FieldElement {
        let [a, b, c, d] = &self.m;
        &(a * d) - &(b * c)
    }

    /// The adjugate, which represents the inverse in `PGL₂`.
    pub fn inverse(&self) -> Mobius {
        let [a, b, c, d] = &self.m;
        Mobius {
            m: [d.clone(), -b, -c, a.clone()],
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        let [a, b, c, d] = &self.m;
        let [e, f, g, h] = &other.m;
        Mobius {
            m: [
                &(a * e) + &(b * g),
                &(a * f) + &(b * h),
                &(c * e) + &(d * g),
                &(c * f) + &(d * h),
            ],
        }
    }

    /// Equality in `PGL₂`: the representatives are proportional.
    pub fn proj_eq(&self, other: &Mobius) -> bool {
        (0..4).all(|i| (i + 1..4).all(|j| &self.m[i] * &other.m[j] == &self.m[j] * &other.m[i]))
    }

    pub fn is_identity(&self) -> bool {
        let [a, b, c, d] = &self.m;
        b.is_zero() && c.is_zero() && a == d
    }

    /// Applies a field automorphism entrywise.
    pub fn conjugate_by(&self, g: &GaloisAuto) -> Mobius {
        Mobius {
            m: self.m.clone().map(|x| g.apply(&x)),
        }
    }

    /// `γ⁻¹(∞)`.
    pub fn pole(&self) -> P1Point {
        let [_, _, c, d] = &self.m;
        if c.is_zero() {
            P1Point::Infinity
        } else {
            P1Point::Finite(-&d.div(c).expect("nonzero"))
        }
    }

    pub fn apply(&self, x: &P1Point) -> P1Point {
        let [a, b, c, d] = &self.m;
        match x {
            P1Point::Infinity if c.is_zero() => P1Point::Infinity,
            P1Point::Infinity => P1Point::Finite(a.div(c).expect("nonzero")),
            P1Point::Finite(z) => {
                let den = &(c * z) + d;
                if den.is_zero() {
                    P1Point::Infinity
                } else {
                    P1Point::Finite((&(a * z) + b).div(&den).expect("nonzero"))
                }
            }
        }
    }

    /// Decides `γ(x) ∈ D` using only valuations of linear expressions in
    /// `x`, never forming `γ(x)`. Independent of the image formulas below.
    pub fn image_lands_in(&self, x: &P1Point, disc: &Disc) -> bool {
        let [a, b, c, d] = &self.m;
        let z = match x {
            P1Point::Infinity => return disc.contains(&self.apply(x)),
            P1Point::Finite(z) => z,
        };
        let den = &(c * z) + d;
        if den.is_zero() {
            return disc.contains(&P1Point::Infinity);
        }
        let e = &disc.center;
        let num = &(&(&(a - &(e * c)) * z) + b) - &(e * d);
        let dist = match (num.v(), den.v()) {
            (Val::Inf, _) => Val::Inf,
            (Val::Fin(n), Val::Fin(m)) => Val::Fin(n - m),
            (Val::Fin(_), Val::Inf) => unreachable!(),
        };
        disc.sided(disc.ball_has(&dist))
    }

    fn vdet(&self) -> Rat {
        fin(self.det().v())
    }

    /// Whether the pole lies in the closed disc `B̄(center, r)`.
    fn pole_in_closed(&self, center: &FieldElement, r: &Rat) -> bool {
        let [_, _, c, d] = &self.m;
        !c.is_zero() && (&(c * center) + d).v() >= Val::Fin(&fin(c.v()) + r)
    }

    /// Image of an arbitrary disc or disc complement.
    pub fn image_disc(&self, disc: &Disc) -> Disc {
        if disc.side == Side::Complement {
            return self.image_disc(&disc.complement()).complement();
        }
        let [a, _, c, d] = &self.m;
        let (center, r) = (&disc.center, &disc.vradius);
        if c.is_zero() {
            let cen = self
                .apply(&P1Point::Finite(center.clone()))
                .finite()
                .unwrap()
                .clone();
            let vr = r + fin(a.v()) - fin(d.v());
            return Disc {
                center: cen,
                vradius: vr,
                ..disc.clone()
            };
        }
        let vc = fin(c.v());
        let dpole = (&(c * center) + d).v().plus_rat(&-&vc);
        let pole_inside = disc.ball_has(&dpole);
        if !pole_inside {
            let cen = self
                .apply(&P1Point::Finite(center.clone()))
                .finite()
                .unwrap()
                .clone();
            let vr = r + self.vdet() - Rat::from_integer(2.into()) * fin((&(c * center) + d).v());
            Disc {
                center: cen,
                vradius: vr,
                ..disc.clone()
            }
        } else {
            let cen = a.div(c).expect("nonzero");
            let vr = self.vdet() - Rat::from_integer(2.into()) * &vc - r;
            Disc {
                center: cen,
                vradius: vr,
                boundary: disc.boundary.flip(),
                side: Side::Complement,
            }
        }
    }

    /// Image of a closed disc. A pole on the boundary sphere lies in the
    /// closed disc, so every case yields a disc or a disc complement.
    pub fn image_closed_disc(&self, disc: &Disc) -> Disc {
        assert!(disc.is_closed_inside(), "expected a closed disc");
        self.image_disc(disc)
    }

    /// `γ(P¹ ∖ D)` for a closed disc `D` containing the pole of `γ`.
    pub fn image_disc_complement(&self, disc: &Disc) -> Result<Disc, PlineError> {
        assert!(disc.is_closed_inside(), "expected a closed disc");
        if !self.pole_in_closed(&disc.center, &disc.vradius) {
            return Err(PlineError::PoleNotInside);
        }
        Ok(self.image_disc(&disc.complement()))
    }

    /// Image of `η_{a,r}` when the pole lies outside `B̄(a, r)`.
    pub fn type2_image(&self, eta: &Type2Point) -> Result<Type2Point, PlineError> {
        if self.pole_in_closed(&eta.center, &eta.vradius) {
            return Err(PlineError::PoleInsideOrOnBoundary);
        }
        Ok(self
            .image_disc(&Disc::closed(eta.center.clone(), eta.vradius.clone()))
            .boundary_point())
    }

    /// Image of any `η_{a,r}`; a disc containing the pole maps to the
    /// complement of an open disc with the same boundary point.
    pub fn act_type2(&self, eta: &Type2Point) -> Type2Point {
        self.image_disc(&Disc::closed(eta.center.clone(), eta.vradius.clone()))
            .boundary_point()
    }

    pub fn to_spec(&self) -> Vec<Vec<Vec<String>>> {
        vec![
            vec![self.m[0].to_coord_strings(), self.m[1].to_coord_strings()],
            vec![self.m[2].to_coord_strings(), self.m[3].to_coord_strings()],
        ]
    }

    pub fn from_spec(
        tower: &Arc<FieldTower>,
        rows: &[Vec<Vec<String>>],
    ) -> Result<Self, PlineError> {
        let bad = || PlineError::Tower(TowerError::Parse("matrix must be 2x2".into()));
        if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
            return Err(bad());
        }
        let e = |i: usize, j: usize| FieldElement::parse_coords(tower, &rows[i][j]);
        Mobius::new(e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?)
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.m;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

/// The sup-norm point `η_{a,r}` of the closed disc `B̄(a, r)`.
#[derive(Clone, Debug)]
pub struct Type2Point {
    pub center: FieldElement,
    pub vradius: Rat,
}

impl Type2Point {
    pub fn new(center: FieldElement, vradius: Rat) -> Self {
        Type2Point { center, vradius }
    }

    pub fn equals(&self, other: &Type2Point) -> bool {
        self.vradius == other.vradius && vdist(&self.center, &other.center).ge_rat(&self.vradius)
    }

    /// Lowest common ancestor in the tree.
    pub fn meet(&self, other: &Type2Point) -> Type2Point {
        let d = vdist(&self.center, &other.center);
        let mut r = self.vradius.clone().min(other.vradius.clone());
        if let Val::Fin(x) = d {
            r = r.min(x);
        }
        Type2Point::new(self.center.clone(), r)
    }

    /// `self ⪯ other`: `other` lies in the disc of `self`.
    pub fn leq(&self, other: &Type2Point) -> bool {
        self.vradius <= other.vradius && vdist(&self.center, &other.center).ge_rat(&self.vradius)
    }

    pub fn apply_auto(&self, g: &GaloisAuto) -> Type2Point {
        Type2Point::new(g.apply(&self.center), self.vradius.clone())
    }
}

impl PartialEq for Type2Point {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl fmt::Display for Type2Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.center, rat_short(&self.vradius))
    }
}

/// Draws random points of the top field near prescribed discs.
pub struct PointSampler {
    tower: Arc<FieldTower>,
    unif: FieldElement,
    unif_inv: FieldElement,
    vunif: Rat,
}

impl PointSampler {
    /// Uses the element of least positive valuation among `p` and small
    /// combinations of the generators as a step size.
    pub fn new(tower: &Arc<FieldTower>) -> Self {
        let one = FieldElement::one(tower);
        let mut best = (
            Rat::one(),
            FieldElement::from_int(tower, tower.prime() as i64),
        );
        let gens: Vec<_> = (0..tower.num_levels())
            .map(|k| FieldElement::generator(tower, k))
            .collect();
        let mut cands = Vec::new();
        for g in &gens {
            cands.extend([g.clone(), g - &one, g + &one]);
            for h in &gens {
                cands.extend([g - h, g * h, &(g * h) - &one]);
            }
        }
        for x in cands {
            if let Val::Fin(r) = x.v() {
                if r > Rat::zero() && r < best.0 {
                    best = (r, x);
                }
            }
        }
        let (vunif, unif) = best;
        let unif_inv = unif.inv().expect("nonzero");
        PointSampler {
            tower: tower.clone(),
            unif,
            unif_inv,
            vunif,
        }
    }

    fn unif_pow(&self, k: i64) -> FieldElement {
        if k >= 0 {
            self.unif.pow(k as u32)
        } else {
            self.unif_inv.pow((-k) as u32)
        }
    }

    fn random_unit_ish<R: Rng + ?Sized>(&self, rng: &mut R) -> (FieldElement, Rat) {
        loop {
            let y = FieldElement::random(&self.tower, rng, 3);
            if let Val::Fin(v) = y.v() {
                return (y, v);
            }
        }
    }

    /// Random `w` with `v(w) ≥ lo` (or `> lo` when `strict`), mostly close
    /// to the bound.
    fn above<R: Rng + ?Sized>(&self, rng: &mut R, lo: &Rat, strict: bool) -> FieldElement {
        let (y, vy) = self.random_unit_ish(rng);
        let t = (lo - vy) / &self.vunif;
        let k = if strict {
            t.floor().to_integer() + 1
        } else {
            t.ceil().to_integer()
        };
        let k = i64::try_from(k).unwrap() + [0, 0, 1, 2][rng.gen_range(0..4)];
        &y * &self.unif_pow(k)
    }

    /// Random `w` with `v(w) < hi` (or `≤ hi` when not `strict`).
    fn below<R: Rng + ?Sized>(&self, rng: &mut R, hi: &Rat, strict: bool) -> FieldElement {
        let (y, vy) = self.random_unit_ish(rng);
        let t = (hi - vy) / &self.vunif;
        let k = if strict {
            t.ceil().to_integer() - 1
        } else {
            t.floor().to_integer()
        };
        let k = i64::try_from(k).unwrap() - [0, 0, 1, 3][rng.gen_range(0..4)];
        &y * &self.unif_pow(k)
    }

    /// A random point of the underlying ball of `disc` (ignoring `side`).
    pub fn inside_ball<R: Rng + ?Sized>(&self, rng: &mut R, disc: &Disc) -> P1Point {
        let w = self.above(rng, &disc.vradius, disc.boundary == Boundary::Open);
        P1Point::Finite(&disc.center + &w)
    }

    /// A random point outside the underlying ball, occasionally `∞`.
    pub fn outside_ball<R: Rng + ?Sized>(&self, rng: &mut R, disc: &Disc) -> P1Point {
        if rng.gen_range(0..16) == 0 {
            return P1Point::Infinity;
        }
        let w = self.below(rng, &disc.vradius, disc.boundary == Boundary::Closed);
        P1Point::Finite(&disc.center + &w)
    }

    /// A random point of the set described by `disc`.
    pub fn sample_in<R: Rng + ?Sized>(&self, rng: &mut R, disc: &Disc) -> P1Point {
        match disc.side {
            Side::Inside => self.inside_ball(rng, disc),
            Side::Complement => self.outside_ball(rng, disc),
        }
    }

    pub fn sample_out<R: Rng + ?Sized>(&self, rng: &mut R, disc: &Disc) -> P1Point {
        match disc.side {
            Side::Inside => self.outside_ball(rng, disc),
            Side::Complement => self.inside_ball(rng, disc),
        }
    }
}

/// Outcome of checking a computed disc image against sampled points.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ImageCheck {
    pub inside_samples: usize,
    pub outside_samples: usize,
    pub exceptions: usize,
    pub first_exception: Option<String>,
}

impl ImageCheck {
    pub fn ok(&self) -> bool {
        self.exceptions == 0
    }
}

/// Samples `samples` points of `source` and `samples` points of its
/// complement and checks that exactly the former land in `image`.
pub fn check_disc_image<R: Rng + ?Sized>(
    g: &Mobius,
    source: &Disc,
    image: &Disc,
    sampler: &PointSampler,
    rng: &mut R,
    samples: usize,
) -> ImageCheck {
    let mut out = ImageCheck {
        inside_samples: 0,
        outside_samples: 0,
        exceptions: 0,
        first_exception: None,
    };
    for k in 0..2 * samples {
        let want_in = k % 2 == 0;
        let x = if want_in {
            sampler.sample_in(rng, source)
        } else {
            sampler.sample_out(rng, source)
        };
        // The sampler aims for the requested side; recheck to be exact.
        let really_in = source.contains(&x);
        if really_in {
            out.inside_samples += 1;
        } else {
            out.outside_samples += 1;
        }
        if g.image_lands_in(&x, image) != really_in {
            out.exceptions += 1;
            out.first_exception
                .get_or_insert_with(|| format!("{x} (source membership {really_in})"));
        }
    }
    out
}
