//! Gauss-Legendre quadrature, adaptive panel subdivision, and
//! principal-value integrals, generic over the scalar type.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fixed-order Gauss-Legendre rule on [-1, 1].
pub struct GaussLegendre<S: Scalar> {
    pub nodes: Vec<S>,
    pub weights: Vec<S>,
}

impl<S: Scalar> GaussLegendre<S> {
    /// Nodes and weights computed by Newton iteration on the Legendre
    /// recurrence, at the requested working precision.
    pub fn new(order: usize, prec: u32) -> Self {
        assert!(order >= 2);
        let one = S::one(prec);
        let two = S::of(2.0, prec);
        let pi = S::pi(prec);
        let n = order;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        // convergence threshold: a few ulps at the working precision
        let eps = S::of(2.0, prec).powi_s(-(prec as i32) + 4);
        for i in 0..n {
            // Tricomi-style initial guess, then Newton in full precision.
            let mut x = ((pi.clone() * (S::of(i as f64, prec) + S::of(0.75, prec)))
                / (S::of(n as f64, prec) + S::of(0.5, prec)))
            .cos_s();
            let mut dp = one.clone();
            for _ in 0..200 {
                let (p_n, p_nm1) = legendre_pair(&x, n, prec);
                // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
                dp = S::from_i64(n as i64, prec) * (x.clone() * p_n.clone() - p_nm1)
                    / (x.clone() * x.clone() - one.clone());
                let dx = p_n / dp.clone();
                x = x.clone() - dx.clone();
                if dx.abs_s() < eps {
                    break;
                }
            }
            let w = two.clone() / ((one.clone() - x.clone() * x.clone()) * dp.clone() * dp);
            nodes.push(x);
            weights.push(w);
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over `[a, b]` with this rule (no subdivision).
    pub fn integrate<F: Fn(&S) -> S>(&self, f: &F, a: &S, b: &S) -> S {
        let prec = a.prec().max(b.prec());
        let half = S::of(0.5, prec);
        let mid = (a.clone() + b.clone()) * half.clone();
        let rad = (b.clone() - a.clone()) * half;
        let mut acc = S::zero(prec);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let t = mid.clone() + rad.clone() * x.clone();
            acc = acc + w.clone() * f(&t);
        }
        acc * rad
    }
}

fn legendre_pair<S: Scalar>(x: &S, n: usize, prec: u32) -> (S, S) {
    let mut p0 = S::one(prec);
    let mut p1 = x.clone();
    for k in 1..n {
        let kf = S::from_i64(k as i64, prec);
        let next = ((S::of(2.0, prec) * kf.clone() + S::one(prec)) * x.clone() * p1.clone()
            - kf.clone() * p0)
            / (kf + S::one(prec));
        p0 = p1;
        p1 = next;
    }
    (p1, p0)
}

/// Adaptive integration by panel bisection; `tol` is an absolute
/// tolerance on the whole interval.
pub fn integrate_adaptive<S: Scalar, F: Fn(&S) -> S>(
    f: &F,
    a: &S,
    b: &S,
    tol: &S,
    rule: &GaussLegendre<S>,
) -> Result<S> {
    fn rec<S: Scalar, F: Fn(&S) -> S>(
        f: &F,
        a: &S,
        b: &S,
        tol: &S,
        rule: &GaussLegendre<S>,
        whole: S,
        depth: u32,
    ) -> Result<S> {
        if depth > 60 {
            return Err(Error::Quadrature(format!(
                "max subdivision depth on [{}, {}]",
                a.to_f64(),
                b.to_f64()
            )));
        }
        let prec = a.prec().max(b.prec());
        let mid = (a.clone() + b.clone()) * S::of(0.5, prec);
        let left = rule.integrate(f, a, &mid);
        let right = rule.integrate(f, &mid, b);
        let refined = left.clone() + right.clone();
        let diff = (refined.clone() - whole).abs_s();
        // noise floor: once the panel estimates agree to working
        // precision, further refinement only chases roundoff
        let floor = S::of(2.0, prec).powi_s(-(prec as i32) + 6)
            * (left.abs_s() + right.abs_s());
        if diff < tol.clone() || diff <= floor {
            return Ok(refined);
        }
        let half_tol = tol.clone() * S::of(0.5, prec);
        let l = rec(f, a, &mid, &half_tol, rule, left, depth + 1)?;
        let r = rec(f, &mid, b, &half_tol, rule, right, depth + 1)?;
        Ok(l + r)
    }
    let whole = rule.integrate(f, a, b);
    rec(f, a, b, tol, rule, whole, 0)
}

/// Principal value of `int_a^b g(x) / (c - x) dx` with `a < c < b`.
///
/// The singular point is excised symmetrically; on the window the
/// integrand is rewritten as the smooth difference quotient
/// `(g(c - s) - g(c + s)) / s`.
pub fn principal_value<S: Scalar, F: Fn(&S) -> S>(
    g: &F,
    c: &S,
    a: &S,
    b: &S,
    tol: &S,
    rule: &GaussLegendre<S>,
) -> Result<S> {
    let prec = c.prec();
    let half = S::of(0.5, prec);
    let delta = (c.clone() - a.clone()).min_s(&(b.clone() - c.clone())) * half;
    if delta <= S::zero(prec) {
        return Err(Error::Quadrature("singular point outside interval".into()));
    }
    let lo = c.clone() - delta.clone();
    let hi = c.clone() + delta.clone();
    let outer_l = integrate_adaptive(&|x: &S| g(x) / (c.clone() - x.clone()), a, &lo, tol, rule)?;
    let outer_r = integrate_adaptive(&|x: &S| g(x) / (c.clone() - x.clone()), &hi, b, tol, rule)?;
    let window = integrate_adaptive(
        &|s: &S| (g(&(c.clone() - s.clone())) - g(&(c.clone() + s.clone()))) / s.clone(),
        &S::zero(prec),
        &delta,
        tol,
        rule,
    )?;
    Ok(outer_l + outer_r + window)
}

trait MinExt<S> {
    fn min_s(self, other: &S) -> S;
}
impl<S: Scalar> MinExt<S> for S {
    fn min_s(self, other: &S) -> S {
        if self < *other {
            self
        } else {
            other.clone()
        }
    }
}
