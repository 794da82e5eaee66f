//! Dense univariate polynomials over a [`Coeff`] ring.

use crate::scalar::Coeff;

/// Coefficients in ascending degree; trailing zeros are always stripped, so
/// the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Coeff::is_zero_coeff) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// `x`, with coefficients modelled on `like`.
    pub fn x(like: &T) -> Self {
        Poly::new(vec![like.zero_like(), like.one_like()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading()
            .is_some_and(|c| c.sub_ref(&c.one_like()).is_zero_coeff())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add_ref(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(Coeff::neg_ref).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_coeff() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero_coeff() {
                    continue;
                }
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        let one = match self.coeffs.first() {
            Some(c) => Poly::constant(c.one_like()),
            None => return if k == 0 { panic!("0^0") } else { Poly::zero() },
        };
        (0..k).fold(one, |acc, _| acc.mul(self))
    }

    /// Division with remainder by a monic divisor; needs only ring
    /// operations.
    pub fn divrem_monic(&self, divisor: &Self) -> (Self, Self) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let d = divisor.degree().unwrap();
        let Some(n) = self.degree() else {
            return (Poly::zero(), Poly::zero());
        };
        if n < d {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let zero = rem[0].zero_like();
        let mut quot = vec![zero; n - d + 1];
        for k in (0..=n - d).rev() {
            let c = rem[k + d].clone();
            if c.is_zero_coeff() {
                continue;
            }
            for (i, b) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].sub_ref(&c.mul_ref(b));
            }
            quot[k] = c;
        }
        rem.truncate(d);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Expansion `f = Σ aᵢ φⁱ` with `deg aᵢ < deg φ`, for monic `φ`.
    pub fn adic_expansion(&self, phi: &Self) -> Vec<Self> {
        let mut out = Vec::new();
        let mut f = self.clone();
        while !f.is_zero() {
            let (q, r) = f.divrem_monic(phi);
            out.push(r);
            f = q;
        }
        out
    }

    pub fn eval(&self, x: &T) -> Option<T> {
        let mut it = self.coeffs.iter().rev();
        let mut acc = it.next()?.clone();
        for c in it {
            acc = acc.mul_ref(x).add_ref(c);
        }
        Some(acc)
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;
    use crate::Rat;

    fn p(cs: &[i64]) -> Poly<Rat> {
        Poly::new(cs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn divrem_and_expansion() {
        let f = p(&[4, 2, 1]); // x² + 2x + 4
        let phi = p(&[-2, 1]); // x − 2
        let (q, r) = f.divrem_monic(&phi);
        assert_eq!(q, p(&[4, 1]));
        assert_eq!(r, p(&[12]));
        let exp = f.adic_expansion(&phi);
        assert_eq!(exp, vec![p(&[12]), p(&[6]), p(&[1])]);
        assert_eq!(p(&[1, 0, 0]).degree(), Some(0));
        assert!(p(&[0, 0]).is_zero());
    }

    #[test]
    fn generic_over_f64() {
        let f = Poly::new(vec![1.0f64, 2.0, 1.0]);
        assert_eq!(f.mul(&f).coeffs(), &[1.0, 4.0, 6.0, 4.0, 1.0]);
        assert_eq!(f.eval(&2.0), Some(9.0));
    }
}
