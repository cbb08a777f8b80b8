use std::sync::Arc;

use num_traits::{One, Signed};

use super::poly::{LaurentPolynomial, Monomial, Ring};
use crate::error::{Error, Result};

/// A lift `φ` of the absolute Frobenius to an integral (Laurent) polynomial
/// ring, given by the image of each variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusLiftSpec {
    p: u32,
    ring: Arc<Ring>,
    images: Vec<LaurentPolynomial>,
    deltas: Vec<LaurentPolynomial>,
}

impl FrobeniusLiftSpec {
    /// `x_i ↦ x_i^p` for every variable.
    pub fn standard(p: u32, ring: &Arc<Ring>) -> Self {
        let images = (0..ring.nvars()).map(|i| LaurentPolynomial::var(ring, i).pow(p as u64)).collect();
        Self::new(p, ring, images).expect("x^p is a Frobenius lift")
    }

    pub fn new(p: u32, ring: &Arc<Ring>, images: Vec<LaurentPolynomial>) -> Result<Self> {
        if let Some(m) = ring.modulus() {
            return Err(Error::TorsionCoefficients { modulus: m.clone() });
        }
        if images.len() != ring.nvars() {
            return Err(Error::Dimension(format!("{} images for {} variables", images.len(), ring.nvars())));
        }
        let mut deltas = Vec::with_capacity(images.len());
        for (i, image) in images.iter().enumerate() {
            let image = image.in_ring(ring);
            let var = &ring.vars()[i];
            let xp = LaurentPolynomial::var(ring, i).pow(p as u64);
            let diff = &image - &xp;
            let delta = diff.exact_div_p(p, 1).map_err(|_| Error::NotAFrobeniusLift {
                variable: var.name.clone(),
                reason: format!("{image} is not congruent to {}^{p} mod {p}", var.name),
            })?;
            if var.laurent {
                // x must stay invertible: the image has to be a monomial unit
                let ok = image.num_terms() == 1
                    && image.terms().all(|(m, c)| c.abs().is_one() && *m == Monomial(xp_exponents(ring.nvars(), i, p)));
                if !ok {
                    return Err(Error::NotAFrobeniusLift {
                        variable: var.name.clone(),
                        reason: format!("image {image} of an invertible variable must be ±{}^{p}", var.name),
                    });
                }
            }
            deltas.push(delta);
        }
        let images = images.iter().map(|f| f.in_ring(ring)).collect();
        Ok(FrobeniusLiftSpec { p, ring: ring.clone(), images, deltas })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn images(&self) -> &[LaurentPolynomial] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &LaurentPolynomial {
        &self.images[i]
    }

    /// `δ(x_i) = (φ(x_i) − x_i^p) / p`.
    pub fn delta(&self, i: usize) -> &LaurentPolynomial {
        &self.deltas[i]
    }

    pub fn is_standard(&self) -> bool {
        self.deltas.iter().all(LaurentPolynomial::is_zero)
    }

    /// Every image is homogeneous of multidegree `p·e_i`, so `φ` scales weights by `p`.
    pub fn is_graded(&self) -> bool {
        self.images.iter().enumerate().all(|(i, f)| f.is_homogeneous_of(&xp_exponents(self.ring.nvars(), i, self.p)))
    }
}

fn xp_exponents(n: usize, i: usize, p: u32) -> Vec<i64> {
    let mut e = vec![0; n];
    e[i] = p as i64;
    e
}

/// Applies `φ` to `f`. Works for exact and modular coefficient rings over the
/// same variables as the lift.
pub fn frobenius_substitute(f: &LaurentPolynomial, phi: &FrobeniusLiftSpec) -> Result<LaurentPolynomial> {
    if !f.ring().same_variables(phi.ring()) {
        return Err(Error::MismatchedRing("polynomial and Frobenius lift use different variables".into()));
    }
    let images: Vec<LaurentPolynomial> = phi.images().iter().map(|g| g.reduce(f.ring().modulus())).collect();
    let images: Vec<LaurentPolynomial> = images.iter().map(|g| g.in_ring(f.ring())).collect();
    f.substitute(&images)
}
