//! Model parameters, vertex weights, and the scalar kernels used
//! throughout the engine.
//!
//! The disordered-phase parametrization is
//! `a = sin(gamma - t)`, `b = sin(gamma + t)`, `c = sin(2 gamma)` with
//! `|t| < gamma < pi/2`. Angles are kept in symbolic form (`pi`-rational
//! or an exact binary literal) so that special points like `gamma = pi/3`
//! survive conversion to any working precision without a double-precision
//! round trip.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Safety margin keeping parameters away from the phase boundary, where
/// the weight kernel develops poles and the moments blow up.
pub const PHASE_MARGIN: f64 = 1e-6;

/// An angle that converts exactly into any working precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    /// `pi * num / den`.
    PiTimes(i64, i64),
    /// An exact binary floating-point literal.
    Value(f64),
}

impl Angle {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Angle::PiTimes(n, d) => std::f64::consts::PI * n as f64 / d as f64,
            Angle::Value(v) => v,
        }
    }

    pub fn to_scalar<S: Scalar>(&self, prec: u32) -> S {
        match *self {
            Angle::PiTimes(n, d) => {
                S::pi(prec) * S::from_i64(n, prec) / S::from_i64(d, prec)
            }
            Angle::Value(v) => S::of(v, prec),
        }
    }

    /// Parse either a decimal literal or a token of the form `pi/3`,
    /// `-pi/4`, `2pi/7`, `pi`.
    pub fn parse(s: &str) -> Result<Angle> {
        let s = s.trim();
        if let Ok(v) = s.parse::<f64>() {
            return Ok(Angle::Value(v));
        }
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1, s),
        };
        if let Some(pos) = body.find("pi") {
            let (num_s, rest) = body.split_at(pos);
            let num: i64 = if num_s.is_empty() {
                1
            } else {
                num_s
                    .parse()
                    .map_err(|_| Error::Usage(format!("bad angle token '{s}'")))?
            };
            let den: i64 = match rest.strip_prefix("pi") {
                Some("") => 1,
                Some(d) => d
                    .strip_prefix('/')
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| Error::Usage(format!("bad angle token '{s}'")))?,
                None => unreachable!(),
            };
            if den == 0 {
                return Err(Error::Usage(format!("zero denominator in '{s}'")));
            }
            return Ok(Angle::PiTimes(sign * num, den));
        }
        Err(Error::Usage(format!("cannot parse angle '{s}'")))
    }
}

/// Validated disordered-phase parameters.
#[derive(Clone, Copy, Debug)]
pub struct ModelParams {
    gamma: Angle,
    t: Angle,
}

impl ModelParams {
    pub fn gamma_angle(&self) -> Angle {
        self.gamma
    }
    pub fn t_angle(&self) -> Angle {
        self.t
    }
    pub fn gamma<S: Scalar>(&self, prec: u32) -> S {
        self.gamma.to_scalar(prec)
    }
    pub fn t<S: Scalar>(&self, prec: u32) -> S {
        self.t.to_scalar(prec)
    }
    pub fn zeta<S: Scalar>(&self, prec: u32) -> S {
        self.t::<S>(prec) / self.gamma::<S>(prec)
    }
    pub fn gamma_f64(&self) -> f64 {
        self.gamma.as_f64()
    }
    pub fn t_f64(&self) -> f64 {
        self.t.as_f64()
    }
    pub fn zeta_f64(&self) -> f64 {
        self.t_f64() / self.gamma_f64()
    }
}

/// Boltzmann weights and the anisotropy parameter.
#[derive(Clone, Copy, Debug)]
pub struct VertexWeights {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
}

pub fn make_params(gamma: Angle, t: Angle) -> Result<ModelParams> {
    let g = gamma.as_f64();
    let tv = t.as_f64();
    if !g.is_finite() || !tv.is_finite() {
        return Err(Error::Phase("non-finite parameters".into()));
    }
    if g < PHASE_MARGIN || g > std::f64::consts::FRAC_PI_2 - PHASE_MARGIN {
        return Err(Error::Phase(format!(
            "gamma = {g} outside (0, pi/2) with margin {PHASE_MARGIN}"
        )));
    }
    if g - tv.abs() < PHASE_MARGIN {
        return Err(Error::Phase(format!(
            "|t| = {} too close to gamma = {g} (margin {PHASE_MARGIN})",
            tv.abs()
        )));
    }
    Ok(ModelParams { gamma, t })
}

/// Convenience constructor from plain floating-point values.
pub fn make_params_f64(gamma: f64, t: f64) -> Result<ModelParams> {
    make_params(Angle::Value(gamma), Angle::Value(t))
}

pub fn weights_of(p: &ModelParams) -> VertexWeights {
    let (a, b, c) = weights_at::<f64>(p, 53);
    let delta = (a * a + b * b - c * c) / (2.0 * a * b);
    VertexWeights { a, b, c, delta }
}

/// `(a, b, c)` at a chosen working precision.
pub fn weights_at<S: Scalar>(p: &ModelParams, prec: u32) -> (S, S, S) {
    let g: S = p.gamma(prec);
    let t: S = p.t(prec);
    let a = (g.clone() - t.clone()).sin_s();
    let b = (g.clone() + t).sin_s();
    let c = (g.clone() + g).sin_s();
    (a, b, c)
}

/// phi(t) = sin(2 gamma) / (sin(gamma + t) sin(gamma - t)); this is also
/// the zeroth moment h_0 of the orthogonality weight.
pub fn phi_value<S: Scalar>(p: &ModelParams, prec: u32) -> S {
    let (a, b, c) = weights_at::<S>(p, prec);
    c / (a * b)
}

/// The Laplace weight m(lambda) = sinh(lambda (pi - 2 gamma)/2) / sinh(lambda pi / 2),
/// with the analytic limit (pi - 2 gamma)/pi at lambda = 0.
pub fn m_weight<S: Scalar>(lambda: &S, p: &ModelParams) -> S {
    let prec = lambda.prec();
    let pi = S::pi(prec);
    let g: S = p.gamma(prec);
    let half = S::of(0.5, prec);
    let num_rate = (pi.clone() - (g.clone() + g.clone())) * half.clone();
    let den_rate = pi.clone() * half;
    if lambda.abs_s().to_f64() < 1e-300 {
        return num_rate / den_rate;
    }
    // sinh(ax)/sinh(bx) = exp((a-b)|x|) * (1 - e^{-2a|x|}) / (1 - e^{-2b|x|}),
    // stable for large |x|; both rates are positive in the phase window.
    let x = lambda.abs_s();
    let one = S::one(prec);
    let ea = one.clone() - (-(num_rate.clone() * x.clone() + num_rate.clone() * x.clone())).exp_s();
    let eb = one.clone() - (-(den_rate.clone() * x.clone() + den_rate.clone() * x.clone())).exp_s();
    ((num_rate - den_rate) * x).exp_s() * ea / eb
}

/// The subtracted-coth kernel
/// f(mu) = (pi/2g) coth(mu pi/2g) - (pi/2g - 1) coth(mu (pi/2g - 1)) - sgn(mu),
/// odd, exponentially decaying, with one-sided limits -+1 at the origin.
/// At exactly mu = 0 returns 0 (odd-symmetry convention).
pub fn f_kernel<S: Scalar>(mu: &S, p: &ModelParams) -> S {
    let prec = mu.prec();
    let zero = S::zero(prec);
    if *mu == zero {
        return zero;
    }
    let pi = S::pi(prec);
    let g: S = p.gamma(prec);
    let big_a = pi / (g.clone() + g); // pi / (2 gamma)
    let big_b = big_a.clone() - S::one(prec);
    let sgn = if mu.is_sign_negative_s() {
        -S::one(prec)
    } else {
        S::one(prec)
    };
    if mu.abs_s() <= S::one(prec) {
        // A coth(A mu) - B coth(B mu) - sgn mu
        //   = A [coth(A mu) - 1/(A mu)] - B [coth(B mu) - 1/(B mu)] - sgn mu,
        // which removes the 1/mu pole analytically.
        let ta = (big_a.clone() * mu.clone()).coth_m1x();
        let tb = (big_b.clone() * mu.clone()).coth_m1x();
        big_a * ta - big_b * tb - sgn
    } else {
        // for large |mu| the value is exponentially small; since
        // A - B - 1 = 0, it reduces to 2A/(e^{2A|mu|}-1) - 2B/(e^{2B|mu|}-1),
        // every term of which carries full relative precision
        let x = mu.clone().abs_s();
        let two = S::of(2.0, prec);
        let ea = (two.clone() * big_a.clone() * x.clone()).exp_s() - S::one(prec);
        let eb = (two.clone() * big_b.clone() * x).exp_s() - S::one(prec);
        sgn * (two.clone() * big_a / ea - two * big_b / eb)
    }
}

/// Rescaled potential V_N(mu); at mu = 0 the analytic limit
/// -(1/N) ln((pi - 2 gamma)/pi).
pub fn potential_n<S: Scalar>(mu: &S, n: u32, p: &ModelParams) -> S {
    let prec = mu.prec();
    let pi = S::pi(prec);
    let g: S = p.gamma(prec);
    let zeta: S = p.zeta(prec);
    let nn = S::from_i64(n as i64, prec);
    let big_a = pi.clone() / (g.clone() + g.clone());
    let big_b = big_a.clone() - S::one(prec);
    if mu.abs_s().to_f64() == 0.0 {
        return -(big_b / big_a).ln_s() / nn;
    }
    // ln sinh(x) = |x| + ln(1 - e^{-2|x|}) - ln 2 keeps the ratio stable
    // for large N |mu|.
    let x = nn.clone() * mu.clone();
    let ax = x.abs_s();
    let one = S::one(prec);
    let ln_ratio = (big_b.clone() - big_a.clone()) * ax.clone()
        + (one.clone() - (-( (big_b.clone() + big_b) * ax.clone())).exp_s()).ln_s()
        - (one.clone() - (-((big_a.clone() + big_a) * ax.clone())).exp_s()).ln_s();
    -zeta * mu.clone() - ln_ratio / nn
}

/// V_N'(mu) = sgn(mu) - zeta + f(N mu).
pub fn potential_n_prime<S: Scalar>(mu: &S, n: u32, p: &ModelParams) -> S {
    let prec = mu.prec();
    let zeta: S = p.zeta(prec);
    let sgn = if mu.abs_s().to_f64() == 0.0 {
        S::zero(prec)
    } else if mu.is_sign_negative_s() {
        -S::one(prec)
    } else {
        S::one(prec)
    };
    let nmu = S::from_i64(n as i64, prec) * mu.clone();
    sgn - zeta + f_kernel(&nmu, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn asm_point() -> ModelParams {
        make_params(Angle::PiTimes(1, 3), Angle::Value(0.0)).unwrap()
    }

    #[test]
    fn angle_parsing() {
        assert_eq!(Angle::parse("pi/3").unwrap(), Angle::PiTimes(1, 3));
        assert_eq!(Angle::parse("-pi/4").unwrap(), Angle::PiTimes(-1, 4));
        assert_eq!(Angle::parse("2pi/7").unwrap(), Angle::PiTimes(2, 7));
        assert_eq!(Angle::parse("pi").unwrap(), Angle::PiTimes(1, 1));
        assert_eq!(Angle::parse("0.25").unwrap(), Angle::Value(0.25));
        assert!(Angle::parse("threepi").is_err());
    }

    #[test]
    fn phase_window_enforced() {
        assert!(make_params_f64(std::f64::consts::FRAC_PI_4, 0.1).is_ok());
        // |t| >= gamma
        assert!(matches!(
            make_params(Angle::PiTimes(1, 4), Angle::PiTimes(1, 3)),
            Err(Error::Phase(_))
        ));
        assert!(make_params_f64(1.7, 0.0).is_err());
        assert!(make_params_f64(-0.3, 0.0).is_err());
        // margin
        assert!(make_params_f64(0.5, 0.5 - 1e-9).is_err());
    }

    #[test]
    fn weights_at_special_points() {
        let w = weights_of(&asm_point());
        let s32 = 3.0f64.sqrt() / 2.0;
        assert!((w.a - s32).abs() < 1e-15);
        assert!((w.b - s32).abs() < 1e-15);
        assert!((w.c - s32).abs() < 1e-15);

        let p = make_params(Angle::PiTimes(1, 6), Angle::Value(0.0)).unwrap();
        let w = weights_of(&p);
        assert!((w.a - 0.5).abs() < 1e-15);
        assert!((w.b - 0.5).abs() < 1e-15);
        assert!((w.c - s32).abs() < 1e-15);
        assert!((w.delta + 0.5).abs() < 1e-14);
    }

    #[test]
    fn delta_vanishes_on_free_fermion_line() {
        for k in 0..10 {
            let t = -0.7 + 0.15 * k as f64;
            let p = make_params(Angle::PiTimes(1, 4), Angle::Value(t)).unwrap();
            assert!(weights_of(&p).delta.abs() < 1e-14, "t = {t}");
        }
    }

    #[test]
    fn phi_special_values() {
        let v: f64 = phi_value(&asm_point(), 53);
        assert!((v - 2.0 / 3.0f64.sqrt()).abs() < 1e-15);
        let ff = make_params(Angle::PiTimes(1, 4), Angle::Value(0.0)).unwrap();
        let v: f64 = phi_value(&ff, 53);
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn phi_even_in_t() {
        for k in 1..8 {
            let t = 0.09 * k as f64;
            let pp = make_params_f64(0.9, t).unwrap();
            let pm = make_params_f64(0.9, -t).unwrap();
            let a: f64 = phi_value(&pp, 53);
            let b: f64 = phi_value(&pm, 53);
            assert!((a - b).abs() < 1e-13 * a.abs());
        }
    }

    #[test]
    fn m_weight_limit_symmetry_range() {
        let p = make_params_f64(0.7, 0.2).unwrap();
        let at0 = m_weight(&0.0f64, &p);
        let expect = (std::f64::consts::PI - 1.4) / std::f64::consts::PI;
        assert!((at0 - expect).abs() < 1e-15);
        for k in 1..20 {
            let x = 0.3 * k as f64;
            let mp = m_weight(&x, &p);
            let mm = m_weight(&(-x), &p);
            assert!((mp - mm).abs() < 1e-15);
            assert!(mp > 0.0 && mp < 1.0);
        }
        // near-zero continuity against the limit
        let near = m_weight(&1e-8f64, &p);
        assert!((near - at0).abs() < 1e-8);
    }

    #[test]
    fn f_kernel_limits_and_oddness() {
        let p = make_params_f64(0.7, 0.2).unwrap();
        assert!((f_kernel(&1e-12f64, &p) + 1.0).abs() < 1e-9);
        assert!((f_kernel(&-1e-12f64, &p) - 1.0).abs() < 1e-9);
        assert_eq!(f_kernel(&0.0f64, &p), 0.0);
        for k in 1..10 {
            let x = 0.25 * k as f64;
            assert!((f_kernel(&x, &p) + f_kernel(&(-x), &p)).abs() < 1e-14);
        }
    }

    #[test]
    fn f_kernel_free_fermion_closed_form() {
        // gamma = pi/4: f(mu) = tanh(mu) - 1 for mu > 0
        let p = make_params(Angle::PiTimes(1, 4), Angle::Value(0.1)).unwrap();
        for k in 1..12 {
            let x = 0.2 * k as f64;
            assert!((f_kernel(&x, &p) - (x.tanh() - 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn potential_limits_and_convexity() {
        let p = make_params_f64(0.7, 0.21).unwrap();
        let zeta = p.zeta_f64();
        // V_N -> -zeta mu + |mu| pointwise
        for &mu in &[-1.2f64, -0.4, 0.3, 1.1] {
            let v = potential_n(&mu, 4000, &p);
            assert!((v - (-zeta * mu + mu.abs())).abs() < 1e-3);
        }
        // e^{N V_N(0)} = pi / (pi - 2 gamma)
        let n = 17u32;
        let v0 = potential_n(&0.0f64, n, &p);
        let lhs = (n as f64 * v0).exp();
        let rhs = std::f64::consts::PI / (std::f64::consts::PI - 1.4);
        assert!((lhs - rhs).abs() < 1e-12);
        // V_N' nondecreasing on a grid (monotone up to rounding in the
        // exponentially flat tails)
        let n = 25u32;
        let mut prev = f64::NEG_INFINITY;
        for k in 0..200 {
            let mu = -1.0 + 0.01 * k as f64;
            let d = potential_n_prime(&mu, n, &p);
            assert!(d >= prev - 1e-12, "V_N' decreasing at mu = {mu}");
            prev = d;
        }
    }

    #[test]
    fn potential_prime_matches_finite_difference() {
        let p = make_params_f64(0.8, -0.3).unwrap();
        let n = 7u32;
        for &mu in &[0.4f64, 0.9, -0.6] {
            let h = 1e-6;
            let fd = (potential_n(&(mu + h), n, &p) - potential_n(&(mu - h), n, &p)) / (2.0 * h);
            assert!((potential_n_prime(&mu, n, &p) - fd).abs() < 1e-8);
        }
    }
}
