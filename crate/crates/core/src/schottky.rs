//! Schottky figures: verification, ping-pong reduction into the fundamental
//! domain, membership of matrices in the group, and Galois descent checks.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::pline::{
    check_disc_image, vdist, Boundary, Disc, DiscSpec, ImageCheck, Mobius, P1Point, PlineError,
    PointSampler, Side, Type2Point,
};
use crate::scalar::{rat_short, Val};
use crate::valtower::{
    build_tower, FieldElement, FieldTower, GaloisAuto, GaloisSpec, SubfieldLattice, SubfieldSpec,
    TowerError, TowerSpec,
};
use crate::Rat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchottkyError {
    #[error("reduction did not reach the fundamental domain within {0} steps")]
    DepthExceeded(usize),
    #[error("membership of {0} is inconclusive at this depth")]
    Inconclusive(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Pline(#[from] PlineError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }
}

/// A freely reduced product of letters, read left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Appends with free cancellation.
    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub matrix: Mobius,
    /// `D⁺(γ)`.
    pub plus: Disc,
    /// `D⁺(γ⁻¹)`.
    pub plus_inv: Disc,
}

/// Generators with paired discs. Discs are closed: either `B̄(a, r)` or, for
/// a disc through `∞`, the complement of an open disc.
#[derive(Clone, Debug)]
pub struct SchottkyFigure {
    tower: Arc<FieldTower>,
    generators: Vec<Generator>,
}

fn is_closed_set(d: &Disc) -> bool {
    matches!(
        (d.boundary, d.side),
        (Boundary::Closed, Side::Inside) | (Boundary::Open, Side::Complement)
    )
}

/// The maximal open subdisc of a closed disc (same center and radius).
pub fn interior(d: &Disc) -> Disc {
    let boundary = match d.boundary {
        Boundary::Closed => Boundary::Open,
        Boundary::Open => Boundary::Closed,
    };
    Disc {
        boundary,
        ..d.clone()
    }
}

impl SchottkyFigure {
    pub fn new(tower: &Arc<FieldTower>, generators: Vec<Generator>) -> Result<Self, SchottkyError> {
        for g in &generators {
            if !is_closed_set(&g.plus) || !is_closed_set(&g.plus_inv) {
                return Err(SchottkyError::Input(format!(
                    "discs of `{}` must be closed",
                    g.name
                )));
            }
        }
        Ok(SchottkyFigure {
            tower: tower.clone(),
            generators,
        })
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.rank())
            .flat_map(|gen| [Letter { gen, inv: false }, Letter { gen, inv: true }])
            .collect()
    }

    pub fn letter_matrix(&self, l: Letter) -> Mobius {
        let m = &self.generators[l.gen].matrix;
        if l.inv {
            m.inverse()
        } else {
            m.clone()
        }
    }

    /// `D⁺` of a letter.
    pub fn plus_disc(&self, l: Letter) -> &Disc {
        let g = &self.generators[l.gen];
        if l.inv {
            &g.plus_inv
        } else {
            &g.plus
        }
    }

    /// `D⁻` of a letter: the maximal open subdisc of `D⁺`.
    pub fn minus_disc(&self, l: Letter) -> Disc {
        interior(self.plus_disc(l))
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let n = &self.generators[l.gen].name;
        if l.inv {
            format!("{n}⁻¹")
        } else {
            n.clone()
        }
    }

    pub fn disc_name(&self, l: Letter) -> String {
        format!("D+({})", self.letter_name(l))
    }

    pub fn word_string(&self, w: &Word) -> String {
        w.0.iter()
            .map(|&l| self.letter_name(l))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn word_matrix(&self, w: &Word) -> Mobius {
        w.0.iter().fold(Mobius::identity(&self.tower), |acc, &l| {
            acc.compose(&self.letter_matrix(l))
        })
    }

    /// Parses `g1 g2⁻¹ g1` (also accepting `^-1` for the inverse).
    pub fn parse_word(&self, s: &str) -> Result<Word, SchottkyError> {
        let mut w = Word::default();
        for tok in s.split_whitespace() {
            let (name, inv) = match tok.strip_suffix("⁻¹").or_else(|| tok.strip_suffix("^-1")) {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let gen = self
                .generators
                .iter()
                .position(|g| g.name == name)
                .ok_or_else(|| SchottkyError::Input(format!("unknown generator `{name}`")))?;
            w.push(Letter { gen, inv });
        }
        Ok(w)
    }

    /// Whether a closed disc `D⁺` contains the Berkovich point.
    fn in_closed_plus(&self, eta: &Type2Point) -> bool {
        self.letters()
            .iter()
            .any(|&l| self.plus_disc(l).contains_type2(eta))
    }

    /// A type-2 point in the interior of the fundamental domain, used as a
    /// base point for membership tests.
    pub fn base_point(&self) -> Option<Type2Point> {
        let pts: Vec<Type2Point> = self
            .letters()
            .iter()
            .map(|&l| self.plus_disc(l).boundary_point())
            .collect();
        let meet = pts
            .iter()
            .skip(1)
            .fold(pts.first()?.clone(), |acc, x| acc.meet(x));
        if !self.in_closed_plus(&meet) {
            return Some(meet);
        }
        let two = Rat::from_integer(2.into());
        pts.iter()
            .map(|p| {
                let d = match vdist(&meet.center, &p.center) {
                    Val::Fin(d) => d.min(p.vradius.clone()),
                    Val::Inf => p.vradius.clone(),
                };
                Type2Point::new(p.center.clone(), (&meet.vradius + d) / &two)
            })
            .find(|x| !self.in_closed_plus(x))
    }
}

/// One failed disjointness condition.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PairFailure {
    pub first: String,
    pub second: String,
    pub distance: String,
    pub radii: [String; 2],
}

/// Check of `γ(P¹ ∖ D⁺(γ⁻¹)) = D⁻(γ)` for one letter `γ`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LetterCheck {
    pub letter: String,
    pub expected: String,
    pub computed: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FigureReport {
    pub ok: bool,
    pub rank: usize,
    pub disjointness_failures: Vec<PairFailure>,
    pub letters: Vec<LetterCheck>,
}

impl FigureReport {
    /// One line per failed condition.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .disjointness_failures
            .iter()
            .map(|f| {
                format!(
                    "{} and {} meet: distance {} vs radii {}, {}",
                    f.first, f.second, f.distance, f.radii[0], f.radii[1]
                )
            })
            .collect();
        out.extend(
            self.letters
                .iter()
                .filter(|c| !c.ok)
                .map(|c| format!("{}: image {} is not {}", c.letter, c.computed, c.expected)),
        );
        out
    }
}

/// Whether two closed discs of `P¹` meet.
fn closed_discs_meet(a: &Disc, b: &Disc) -> bool {
    let d = vdist(&a.center, &b.center);
    match (a.side, b.side) {
        (Side::Inside, Side::Inside) => d.ge_rat(&a.vradius.clone().min(b.vradius.clone())),
        (Side::Complement, Side::Complement) => true,
        (Side::Inside, Side::Complement) => !(a.vradius > b.vradius && d.gt_rat(&b.vradius)),
        (Side::Complement, Side::Inside) => closed_discs_meet(b, a),
    }
}

/// Checks pairwise disjointness of the `2g` discs and the pairing identity
/// for each of the `2g` letters.
pub fn verify_figure(fig: &SchottkyFigure) -> FigureReport {
    let letters = fig.letters();
    let mut disjointness_failures = Vec::new();
    for (i, &a) in letters.iter().enumerate() {
        for &b in &letters[i + 1..] {
            let (da, db) = (fig.plus_disc(a), fig.plus_disc(b));
            if closed_discs_meet(da, db) {
                disjointness_failures.push(PairFailure {
                    first: fig.disc_name(a),
                    second: fig.disc_name(b),
                    distance: vdist(&da.center, &db.center).to_string(),
                    radii: [rat_short(&da.vradius), rat_short(&db.vradius)],
                });
            }
        }
    }
    let checks: Vec<LetterCheck> = letters
        .par_iter()
        .map(|&l| {
            let g = fig.letter_matrix(l);
            let computed = g.image_disc(&fig.plus_disc(l.inverse()).complement());
            let expected = fig.minus_disc(l);
            LetterCheck {
                letter: fig.letter_name(l),
                ok: computed.same_set(&expected),
                expected: expected.to_string(),
                computed: computed.to_string(),
            }
        })
        .collect();
    FigureReport {
        ok: disjointness_failures.is_empty() && checks.iter().all(|c| c.ok),
        rank: fig.rank(),
        disjointness_failures,
        letters: checks,
    }
}

/// Sampled membership check of one computed disc image.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DiscImageSample {
    pub letter: String,
    pub source: String,
    pub image: String,
    pub check: ImageCheck,
}

/// For every letter `γ`, checks the computed images of `D⁺(γ⁻¹)` and of its
/// complement by sampling `samples` points on each side. Pair `k` uses the
/// seed `seed + k`.
pub fn sample_disc_images(fig: &SchottkyFigure, samples: usize, seed: u64) -> Vec<DiscImageSample> {
    let sampler = PointSampler::new(fig.tower());
    let jobs: Vec<(Letter, Disc)> = fig
        .letters()
        .into_iter()
        .flat_map(|l| {
            let d = fig.plus_disc(l.inverse()).clone();
            [(l, d.complement()), (l, d)]
        })
        .collect();
    jobs.par_iter()
        .enumerate()
        .map(|(k, (l, source))| {
            let g = fig.letter_matrix(*l);
            let image = g.image_disc(source);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let check = check_disc_image(&g, source, &image, &sampler, &mut rng, samples);
            DiscImageSample {
                letter: fig.letter_name(*l),
                source: source.to_string(),
                image: image.to_string(),
                check,
            }
        })
        .collect()
}

/// Points on which the group acts and which can be tested against discs.
pub trait Reducible: Clone {
    fn in_disc(&self, d: &Disc) -> bool;
    fn act(&self, g: &Mobius) -> Self;
}

impl Reducible for P1Point {
    fn in_disc(&self, d: &Disc) -> bool {
        d.contains(self)
    }
    fn act(&self, g: &Mobius) -> Self {
        g.apply(self)
    }
}

impl Reducible for Type2Point {
    fn in_disc(&self, d: &Disc) -> bool {
        d.contains_type2(self)
    }
    fn act(&self, g: &Mobius) -> Self {
        g.act_type2(self)
    }
}

/// Whether `x` lies in the fundamental domain.
pub fn in_fundamental_domain<X: Reducible>(fig: &SchottkyFigure, x: &X) -> bool {
    fig.letters().into_iter().all(|l| {
        let closed_excluded = l.inv && x.in_disc(fig.plus_disc(l));
        !x.in_disc(&fig.minus_disc(l)) && !closed_excluded
    })
}

/// Ping-pong reduction: returns `(y, w)` with `y` in the fundamental domain
/// and `x = w·y`.
pub fn reduce_point<X: Reducible>(
    fig: &SchottkyFigure,
    x: &X,
    depth: usize,
) -> Result<(X, Word), SchottkyError> {
    let letters = fig.letters();
    let mut y = x.clone();
    let mut w = Word::default();
    for _ in 0..=depth {
        let step = letters
            .iter()
            .find(|&&l| y.in_disc(&fig.minus_disc(l)))
            .copied()
            .or_else(|| {
                letters
                    .iter()
                    .find(|&&l| l.inv && y.in_disc(fig.plus_disc(l)))
                    .copied()
            });
        let Some(l) = step else { return Ok((y, w)) };
        if w.len() == depth {
            break;
        }
        y = y.act(&fig.letter_matrix(l.inverse()));
        w.push(l);
    }
    Err(SchottkyError::DepthExceeded(depth))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    Yes(Word),
    No,
    Inconclusive,
}

/// Decides `g ∈ Γ` by reducing `g·x₀` for an interior base point `x₀`.
pub fn is_member(fig: &SchottkyFigure, g: &Mobius, depth: usize) -> Membership {
    let Some(x0) = fig.base_point() else {
        return Membership::Inconclusive;
    };
    let y = g.act_type2(&x0);
    match reduce_point(fig, &y, depth) {
        Err(_) => Membership::Inconclusive,
        Ok((z, w)) => {
            if !z.equals(&x0) {
                return Membership::No;
            }
            if fig.word_matrix(&w.inverse()).compose(g).is_identity_proj() {
                Membership::Yes(w)
            } else {
                Membership::No
            }
        }
    }
}

impl Mobius {
    fn is_identity_proj(&self) -> bool {
        self.proj_eq(&Mobius::identity(self.tower()))
    }
}

/// Galois data attached to a figure.
#[derive(Clone, Debug)]
pub struct DescentDatum {
    pub figure: SchottkyFigure,
    pub galois: Vec<GaloisAuto>,
    pub lattice: Option<SubfieldLattice>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConjugationEntry {
    pub galois: String,
    pub generator: String,
    /// `None` when the conjugate is not found in the group.
    pub word: Option<String>,
    pub exact: bool,
}

impl fmt::Display for ConjugationEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.word {
            Some(w) => write!(f, "{}({}) = {}", self.galois, self.generator, w),
            None => write!(f, "{}({}) not in the group", self.galois, self.generator),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DescentReport {
    pub ok: bool,
    pub table: Vec<ConjugationEntry>,
    pub inconclusive: Vec<String>,
}

/// Condition (c): every `σ(γ)` lies in the group, with an explicit word.
pub fn check_descent_condition_c(datum: &DescentDatum, depth: usize) -> DescentReport {
    let fig = &datum.figure;
    let pairs: Vec<(usize, usize)> = (0..datum.galois.len())
        .flat_map(|s| (0..fig.rank()).map(move |g| (s, g)))
        .collect();
    let results: Vec<(ConjugationEntry, bool)> = pairs
        .par_iter()
        .map(|&(s, g)| {
            let sigma = &datum.galois[s];
            let gen = &fig.generators()[g];
            let conj = gen.matrix.conjugate_by(sigma);
            let m = is_member(fig, &conj, depth);
            let (word, exact, inconclusive) = match &m {
                Membership::Yes(w) => {
                    let exact = fig.word_matrix(w).proj_eq(&conj);
                    (
                        Some(if w.is_empty() {
                            "1".into()
                        } else {
                            fig.word_string(w)
                        }),
                        exact,
                        false,
                    )
                }
                Membership::No => (None, false, false),
                Membership::Inconclusive => (None, false, true),
            };
            let entry = ConjugationEntry {
                galois: sigma.name().to_string(),
                generator: gen.name.clone(),
                word,
                exact,
            };
            (entry, inconclusive)
        })
        .collect();
    let inconclusive = results
        .iter()
        .filter(|(_, i)| *i)
        .map(|(e, _)| format!("{}({})", e.galois, e.generator))
        .collect();
    let table: Vec<ConjugationEntry> = results.into_iter().map(|(e, _)| e).collect();
    DescentReport {
        ok: table.iter().all(|e| e.exact),
        table,
        inconclusive,
    }
}

#[derive(Clone, Debug)]
pub struct LimitSample {
    pub word: Word,
    pub point: P1Point,
    /// Number of nested `D⁻` discs around the point, capped.
    pub nesting: usize,
}

/// Images of the `D⁺` centers under all reduced words of length `≤ depth`.
pub fn limit_point_sample(fig: &SchottkyFigure, depth: usize) -> Vec<LimitSample> {
    let letters = fig.letters();
    let mut words = vec![Word::default()];
    let mut frontier = vec![Word::default()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                if w.0.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut v = w.clone();
                v.0.push(l);
                next.push(v);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let cap = depth + 2;
    let jobs: Vec<(Word, Letter)> = words
        .iter()
        .flat_map(|w| letters.iter().map(move |&l| (w.clone(), l)))
        .collect();
    jobs.into_par_iter()
        .map(|(w, l)| {
            let c = P1Point::Finite(fig.plus_disc(l).center.clone());
            let point = fig.word_matrix(&w).apply(&c);
            let nesting = nesting_depth(fig, &point, cap);
            LimitSample {
                word: w,
                point,
                nesting,
            }
        })
        .collect()
}

/// How many successive `D⁻` discs contain the point, up to `cap`.
pub fn nesting_depth(fig: &SchottkyFigure, x: &P1Point, cap: usize) -> usize {
    let letters = fig.letters();
    let mut y = x.clone();
    for k in 0..cap {
        let Some(&l) = letters.iter().find(|&&l| y.in_disc(&fig.minus_disc(l))) else {
            return k;
        };
        y = y.act(&fig.letter_matrix(l.inverse()));
    }
    cap
}

/// JSON form of a figure with optional Galois data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FigureFile {
    pub tower: TowerSpec,
    pub generators: Vec<GeneratorSpec>,
    pub discs: Vec<DiscPairSpec>,
    #[serde(default)]
    pub galois: Vec<GaloisSpec>,
    #[serde(default)]
    pub subfields: Vec<SubfieldSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub matrix: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscPairSpec {
    pub gen: String,
    pub plus: DiscSpec,
    pub plus_inv: DiscSpec,
}

impl FigureFile {
    pub fn load(&self) -> Result<DescentDatum, SchottkyError> {
        let tower = build_tower(&self.tower)?;
        let mut gens = Vec::new();
        for g in &self.generators {
            let matrix = Mobius::from_spec(&tower, &g.matrix)?;
            let pair = self.discs.iter().find(|d| d.gen == g.name).ok_or_else(|| {
                SchottkyError::Input(format!("no discs for generator `{}`", g.name))
            })?;
            gens.push(Generator {
                name: g.name.clone(),
                matrix,
                plus: Disc::from_spec(&tower, &pair.plus)?,
                plus_inv: Disc::from_spec(&tower, &pair.plus_inv)?,
            });
        }
        let figure = SchottkyFigure::new(&tower, gens)?;
        let galois = self
            .galois
            .iter()
            .map(|s| GaloisAuto::from_spec(&tower, s))
            .collect::<Result<Vec<_>, _>>()?;
        let lattice = if self.subfields.is_empty() {
            None
        } else {
            Some(SubfieldLattice::from_specs(&tower, &self.subfields)?)
        };
        Ok(DescentDatum {
            figure,
            galois,
            lattice,
        })
    }

    pub fn from_datum(d: &DescentDatum) -> FigureFile {
        let fig = &d.figure;
        FigureFile {
            tower: fig.tower().to_spec(),
            generators: fig
                .generators()
                .iter()
                .map(|g| GeneratorSpec {
                    name: g.name.clone(),
                    matrix: g.matrix.to_spec(),
                })
                .collect(),
            discs: fig
                .generators()
                .iter()
                .map(|g| DiscPairSpec {
                    gen: g.name.clone(),
                    plus: g.plus.to_spec(),
                    plus_inv: g.plus_inv.to_spec(),
                })
                .collect(),
            galois: d.galois.iter().map(GaloisAuto::to_spec).collect(),
            subfields: d
                .lattice
                .as_ref()
                .map(SubfieldLattice::to_specs)
                .unwrap_or_default(),
        }
    }
}

/// The genus-one figure of `z ↦ qz` with `v(q) = vq`, discs `B̄(0, vq)` and
/// `P¹ ∖ B(0, 0)`.
pub fn tate_figure(
    tower: &Arc<FieldTower>,
    q: FieldElement,
) -> Result<SchottkyFigure, SchottkyError> {
    let vq = q
        .v()
        .fin()
        .cloned()
        .ok_or_else(|| SchottkyError::Input("q = 0".into()))?;
    let zero = FieldElement::zero(tower);
    let gen = Generator {
        name: "g1".into(),
        matrix: Mobius::diag(q, FieldElement::one(tower))?,
        plus: Disc::closed(zero.clone(), vq),
        plus_inv: Disc::open(zero, Rat::from_integer(0.into())).complement(),
    };
    SchottkyFigure::new(tower, vec![gen])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;

    fn tate() -> SchottkyFigure {
        let t = build_tower(&TowerSpec::with_rational_steps(2, &[])).unwrap();
        tate_figure(&t, FieldElement::from_int(&t, 4)).unwrap()
    }

    #[test]
    fn tate_curve() {
        let fig = tate();
        let t = fig.tower().clone();
        assert!(verify_figure(&fig).ok);
        let x = P1Point::Finite(FieldElement::from_int(&t, 8));
        let (y, w) = reduce_point(&fig, &x, 8).unwrap();
        assert_eq!(y, P1Point::Finite(FieldElement::from_int(&t, 2)));
        assert_eq!(fig.word_string(&w), "g1");
        let g = Mobius::diag(FieldElement::from_int(&t, 64), FieldElement::one(&t)).unwrap();
        assert_eq!(
            is_member(&fig, &g, 8),
            Membership::Yes(fig.parse_word("g1 g1 g1").unwrap())
        );
        let h = Mobius::diag(FieldElement::from_int(&t, 2), FieldElement::one(&t)).unwrap();
        assert_eq!(is_member(&fig, &h, 8), Membership::No);
        let zero = FieldElement::zero(&t);
        for s in limit_point_sample(&fig, 3) {
            assert_eq!(s.point, P1Point::Finite(zero.clone()));
        }
        assert_eq!(limit_point_sample(&fig, 0).len(), 2);
    }

    #[test]
    fn word_algebra() {
        let fig = tate();
        let w = fig.parse_word("g1 g1^-1 g1").unwrap();
        assert_eq!(fig.word_string(&w), "g1");
        assert!(fig.parse_word("h").is_err());
        let x0 = fig.base_point().unwrap();
        assert_eq!(x0.vradius, rat_int(1));
        assert!(in_fundamental_domain(&fig, &x0));
    }
}
