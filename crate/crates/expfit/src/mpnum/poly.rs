//! Dense univariate polynomial with `Real` coefficients, ascending degree.

use serde::{Deserialize, Serialize};

use super::real::{ComplexVal, Real};
use super::vec::RealVec;

/// Polynomial c₀ + c₁z + … + c_d z^d; the leading coefficient is nonzero
/// after `normalize`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: RealVec,
}

impl Poly {
    pub fn new(coeffs: RealVec) -> Self {
        Poly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn prec(&self) -> u32 {
        self.coeffs.prec()
    }

    /// Drop trailing (near-)zero leading coefficients.
    pub fn normalize(mut self) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.0.last().unwrap().is_zero() {
            self.coeffs.0.pop();
        }
        self
    }

    /// Divide through by the leading coefficient.
    pub fn monic(&self) -> Poly {
        let lead = self.coeffs.0.last().expect("empty polynomial").clone();
        Poly {
            coeffs: RealVec(self.coeffs.iter().map(|c| c / &lead).collect()),
        }
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, z: &Real) -> Real {
        let prec = self.prec().max(z.prec());
        let mut acc = Real::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    /// Horner evaluation at a complex point.
    pub fn eval_complex(&self, z: &ComplexVal) -> ComplexVal {
        let prec = self.prec().max(z.re.prec());
        let mut re = Real::zero(prec);
        let mut im = Real::zero(prec);
        for c in self.coeffs.iter().rev() {
            let nre = &(&re * &z.re) - &(&im * &z.im);
            let nim = &(&re * &z.im) + &(&im * &z.re);
            re = &nre + c;
            im = nim;
        }
        ComplexVal::new(re, im)
    }

    /// Coefficients of the derivative polynomial.
    pub fn derivative(&self) -> Poly {
        let prec = self.prec();
        if self.coeffs.len() <= 1 {
            return Poly::new(RealVec(vec![Real::zero(prec)]));
        }
        Poly::new(RealVec(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| &Real::from_u32(prec, k as u32) * c)
                .collect(),
        ))
    }

    /// Expand Π (z - rₖ) into monic coefficients.
    pub fn from_roots(prec: u32, roots: &RealVec) -> Poly {
        let mut coeffs = vec![Real::one(prec)];
        for r in roots.iter() {
            // multiply by (z - r): new[k] = old[k-1] - r·old[k]
            let mut next = Vec::with_capacity(coeffs.len() + 1);
            next.push(-&(&coeffs[0] * r));
            for k in 1..coeffs.len() {
                next.push(&coeffs[k - 1] - &(&coeffs[k] * r));
            }
            next.push(coeffs.last().unwrap().clone());
            coeffs = next;
        }
        Poly::new(RealVec(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_hand_value() {
        // 1 - 3z + 2z², z = 2 -> 1 - 6 + 8 = 3
        let p = Poly::new(RealVec::from_f64s(64, &[1.0, -3.0, 2.0]));
        let v = p.eval(&Real::from_f64(64, 2.0));
        assert!((v.to_f64() - 3.0).abs() < 1e-15);
    }
}
