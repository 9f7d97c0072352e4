//! Truncated power series (jets) over an arbitrary scalar.
//!
//! A jet of order `k` stores Taylor coefficients `c_0..c_k` around a fixed
//! expansion point; products are Cauchy products cut at the truncation
//! order. Jets over [`crate::scalar::Big`] drive the exact moment
//! generation and the derivative propagation through the whole Hankel
//! pipeline (Toda residuals, free-energy derivatives).

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorJet<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> TaylorJet<S> {
    pub fn from_coeffs(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty());
        TaylorJet { coeffs }
    }

    /// Constant jet `[x, 0, ..., 0]` of the given order.
    pub fn constant(x: S, order: usize) -> Self {
        let p = x.prec();
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(x);
        for _ in 0..order {
            coeffs.push(S::zero(p));
        }
        TaylorJet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &S {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn value(&self) -> &S {
        &self.coeffs[0]
    }

    pub fn prec(&self) -> u32 {
        self.coeffs[0].prec()
    }

    /// Truncate or zero-pad to a new order.
    pub fn resized(&self, order: usize) -> Self {
        let p = self.prec();
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        while coeffs.len() < order + 1 {
            coeffs.push(S::zero(p));
        }
        TaylorJet { coeffs }
    }

    pub fn scale(&self, s: &S) -> Self {
        TaylorJet {
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }
}

fn common_order<S: Scalar>(a: &TaylorJet<S>, b: &TaylorJet<S>) -> usize {
    a.order().min(b.order())
}

impl<S: Scalar> Add for TaylorJet<S> {
    type Output = TaylorJet<S>;
    fn add(self, rhs: Self) -> Self {
        let n = common_order(&self, &rhs);
        TaylorJet {
            coeffs: (0..=n)
                .map(|k| self.coeffs[k].clone() + rhs.coeffs[k].clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Sub for TaylorJet<S> {
    type Output = TaylorJet<S>;
    fn sub(self, rhs: Self) -> Self {
        let n = common_order(&self, &rhs);
        TaylorJet {
            coeffs: (0..=n)
                .map(|k| self.coeffs[k].clone() - rhs.coeffs[k].clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Neg for TaylorJet<S> {
    type Output = TaylorJet<S>;
    fn neg(self) -> Self {
        TaylorJet {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<S: Scalar> Mul for TaylorJet<S> {
    type Output = TaylorJet<S>;
    fn mul(self, rhs: Self) -> Self {
        let n = common_order(&self, &rhs);
        let p = self.prec().max(rhs.prec());
        let mut coeffs = vec![S::zero(p); n + 1];
        for k in 0..=n {
            let mut acc = S::zero(p);
            for i in 0..=k {
                acc = acc + self.coeffs[i].clone() * rhs.coeffs[k - i].clone();
            }
            coeffs[k] = acc;
        }
        TaylorJet { coeffs }
    }
}

impl<S: Scalar> Div for TaylorJet<S> {
    type Output = TaylorJet<S>;
    /// Series division; requires a nonzero constant term in the divisor.
    fn div(self, rhs: Self) -> Self {
        let n = common_order(&self, &rhs);
        let p = self.prec().max(rhs.prec());
        let inv0 = rhs.coeffs[0].recip_s();
        let mut coeffs = vec![S::zero(p); n + 1];
        for k in 0..=n {
            let mut acc = self.coeffs[k].clone();
            for i in 0..k {
                acc = acc - coeffs[i].clone() * rhs.coeffs[k - i].clone();
            }
            coeffs[k] = acc * inv0.clone();
        }
        TaylorJet { coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet(v: &[f64]) -> TaylorJet<f64> {
        TaylorJet::from_coeffs(v.to_vec())
    }

    #[test]
    fn mul_is_truncated_cauchy_product() {
        // (1 + x)^2 = 1 + 2x + x^2
        let a = jet(&[1.0, 1.0, 0.0]);
        let b = a.clone() * a;
        assert_eq!(b.coeffs(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn div_inverts_mul() {
        let a = jet(&[2.0, -1.0, 0.5, 3.0]);
        let b = jet(&[1.5, 0.25, -2.0, 1.0]);
        let q = a.clone() / b.clone();
        let back = q * b;
        for k in 0..=3 {
            assert!((back.coeff(k) - a.coeff(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_jet() {
        let c = TaylorJet::constant(7.0f64, 2);
        assert_eq!(c.coeffs(), &[7.0, 0.0, 0.0]);
    }
}
