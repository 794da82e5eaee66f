//! The two genus-two-and-up example families as descent data.

use std::sync::Arc;

use crate::pline::{Disc, Mobius};
use crate::schottky::{DescentDatum, Generator, SchottkyError, SchottkyFigure};
use crate::valtower::{
    build_tower, FieldTower, GaloisAuto, StepSpec, Subfield, SubfieldLattice, TowerSpec,
};
use crate::{FieldElement, Rat};

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn int(t: &Arc<FieldTower>, n: i64) -> FieldElement {
    FieldElement::from_int(t, n)
}

fn gen(t: &Arc<FieldTower>, name: &str) -> FieldElement {
    FieldElement::named(t, name).expect("generator present")
}

/// `L = Q(√2, i)` at `p = 2`.
pub fn g2p2_tower() -> Arc<FieldTower> {
    build_tower(&TowerSpec::with_rational_steps(
        2,
        &[("sqrt2", &[-2, 0, 1]), ("i", &[1, 0, 1])],
    ))
    .expect("fixed tower")
}

/// The rank-two figure over `Q(√2, i)`: `γ₁ = P A⁻¹ P⁻¹`, `γ₂ = Q A⁻¹ Q⁻¹`
/// with `A = diag(2, 1)`, so that `γ₁` attracts towards `√2` and `γ₂`
/// towards `1 + i`.
pub fn g2p2() -> DescentDatum {
    let t = g2p2_tower();
    let s2 = gen(&t, "sqrt2");
    let i = gen(&t, "i");
    let one = FieldElement::one(&t);
    let p = Mobius::new(-&s2, -&s2, int(&t, -1), one.clone()).unwrap();
    let q = Mobius::new(-(&one + &i), &one - &i, int(&t, -1), one.clone()).unwrap();
    let a_inv = Mobius::diag(one.clone(), int(&t, 2)).unwrap();
    let g1 = p.compose(&a_inv).compose(&p.inverse());
    let g2 = q.compose(&a_inv).compose(&q.inverse());
    let gens = vec![
        Generator {
            name: "g1".into(),
            matrix: g1,
            plus: Disc::closed(s2.clone(), r(2, 1)),
            plus_inv: Disc::closed(-&s2, r(2, 1)),
        },
        Generator {
            name: "g2".into(),
            matrix: g2,
            plus: Disc::closed(&one + &i, r(3, 2)),
            plus_inv: Disc::closed(&one - &i, r(3, 2)),
        },
    ];
    let figure = SchottkyFigure::new(&t, gens).unwrap();
    let sigma = GaloisAuto::new("σ", vec![-&s2, i.clone()]).unwrap();
    let tau = GaloisAuto::new("τ", vec![s2.clone(), -&i]).unwrap();
    let fields = vec![
        Subfield::new(&t, "K", vec![]),
        Subfield::new(&t, "K(√2)", vec![s2.clone()]),
        Subfield::new(&t, "K(i)", vec![i.clone()]),
        Subfield::new(&t, "K(√-2)", vec![&s2 * &i]),
        Subfield::new(&t, "L", vec![s2, i]),
    ];
    let lattice = SubfieldLattice::new(&t, fields).unwrap();
    DescentDatum {
        figure,
        galois: vec![sigma, tau],
        lattice: Some(lattice),
    }
}

/// Exponents of `β = π_K^a` and `β′ = π_K^b` in the `g = 2p` family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BetaExponents {
    pub beta: u32,
    pub beta_prime: u32,
}

impl Default for BetaExponents {
    fn default() -> Self {
        BetaExponents {
            beta: 4,
            beta_prime: 5,
        }
    }
}

/// Tower for the `g = 2p` family: `ζ` a primitive `p²`-th root of unity
/// and `t^p = ζ^p − 1 = π_K`. For `p = 2` an unramified cube root of unity
/// `ω` comes first and plays the role of `s`.
pub fn g2p_tower(p: u64) -> Result<Arc<FieldTower>, SchottkyError> {
    let pu = p as usize;
    let mut steps = Vec::new();
    let mut prev = 1usize;
    let push =
        |steps: &mut Vec<StepSpec>, prev: &mut usize, name: &str, coeffs: Vec<Vec<String>>| {
            *prev *= coeffs.len() - 1;
            steps.push(StepSpec {
                name: name.into(),
                minpoly: coeffs,
            });
        };
    if p == 2 {
        let c = |n: i64| vec![n.to_string()];
        push(&mut steps, &mut prev, "omega", vec![c(1), c(1), c(1)]);
    }
    // Φ_{p²}(x) = Σ_{k<p} x^{kp} over the previous level.
    let base = prev;
    let coord = |n: i64| {
        let mut v = vec!["0".to_string(); base];
        v[0] = n.to_string();
        v
    };
    let mut cyclo = vec![coord(0); pu * (pu - 1) + 1];
    for k in 0..pu {
        cyclo[k * pu] = coord(1);
    }
    push(&mut steps, &mut prev, "zeta", cyclo);
    // t^p − (ζ^p − 1): the constant term is 1 − ζ^p in the level below.
    let mut c0 = vec!["0".to_string(); prev];
    if p == 2 {
        // ζ² = −1, so 1 − ζ² = 2.
        c0[0] = "2".into();
    } else {
        c0[0] = "1".into();
        c0[base * pu] = "-1".into();
    }
    let mut tpoly = vec![vec!["0".to_string(); prev]; pu + 1];
    tpoly[0] = c0;
    tpoly[pu][0] = "1".into();
    push(&mut steps, &mut prev, "t", tpoly);
    let spec = TowerSpec {
        prime: p,
        steps,
        unique_extension_certificate: true,
    };
    Ok(build_tower(&spec)?)
}

/// The rank-`2p` figure with generators `A₀…A_{p−1}, B₀…B_{p−1}`, the
/// Galois generators `σ, τ` and the lattice `K ⊆ K(ζ), K(α) ⊆ L`.
pub fn g2p(p: u64, beta: BetaExponents) -> Result<DescentDatum, SchottkyError> {
    if p < 2 {
        return Err(SchottkyError::Input(format!("p = {p} is not a prime")));
    }
    let t = g2p_tower(p)?;
    let pu = p as u32;
    let one = FieldElement::one(&t);
    let zeta = gen(&t, "zeta");
    let root = gen(&t, "t");
    let zp = zeta.pow(pu);
    let pi = &zp - &one;
    let s = if p == 2 {
        gen(&t, "omega")
    } else {
        int(&t, -1)
    };
    let alpha = &s + &root;
    let b1 = pi.pow(beta.beta);
    let b2 = pi.pow(beta.beta_prime);
    let vpi = r(1, p as i64 - 1);
    let vb1 = &vpi * Rat::from_integer(beta.beta.into());
    let vb2 = &vpi * Rat::from_integer(beta.beta_prime.into());
    let ra = &vpi * r(pu as i64 + 1, pu as i64);
    let rb = &vpi * r(pu as i64 + 2, pu as i64);

    let mut images = Vec::new();
    if p == 2 {
        images.push(gen(&t, "omega"));
    }
    let sigma = GaloisAuto::new("σ", {
        let mut v = images.clone();
        v.push(zeta.pow(pu + 1));
        v.push(root.clone());
        v
    })?;
    let tau = GaloisAuto::new("τ", {
        let mut v = images;
        v.push(zeta.clone());
        v.push(&zp * &root);
        v
    })?;

    let matrix = |x: &FieldElement, b: &FieldElement| {
        Mobius::new(
            &(&one - &(b * &pi)) * x,
            &(&(b - &one) * &pi) * &(x * x),
            &one - b,
            &(b - &pi) * x,
        )
    };
    let mut gens = Vec::new();
    let mut zi = zeta.clone();
    for i in 0..pu {
        gens.push(Generator {
            name: format!("A{i}"),
            matrix: matrix(&zi, &b1)?,
            plus: Disc::closed(zi.clone(), ra.clone()),
            plus_inv: Disc::closed(&pi * &zi, &vb1 - &ra),
        });
        zi = sigma.apply(&zi);
    }
    let mut ai = alpha.clone();
    for i in 0..pu {
        gens.push(Generator {
            name: format!("B{i}"),
            matrix: matrix(&ai, &b2)?,
            plus: Disc::closed(ai.clone(), rb.clone()),
            plus_inv: Disc::closed(&pi * &ai, &vb2 - &rb),
        });
        ai = tau.apply(&ai);
    }
    let figure = SchottkyFigure::new(&t, gens)?;
    let mut kgens = vec![zp.clone()];
    if p == 2 {
        kgens = vec![s.clone()];
    }
    let with = |extra: &[&FieldElement]| {
        let mut v = kgens.clone();
        v.extend(extra.iter().map(|x| (*x).clone()));
        v
    };
    let fields = vec![
        Subfield::new(&t, "K", kgens.clone()),
        Subfield::new(&t, "K(ζ)", with(&[&zeta])),
        Subfield::new(&t, "K(α)", with(&[&root])),
        Subfield::new(&t, "L", with(&[&zeta, &root])),
    ];
    let lattice = SubfieldLattice::new(&t, fields)?;
    Ok(DescentDatum {
        figure,
        galois: vec![sigma, tau],
        lattice: Some(lattice),
    })
}
