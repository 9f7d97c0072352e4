//! The limiting equilibrium measure for the kink potential
//! `V(mu) = -zeta mu + |mu|`: support endpoints, density, resolvent,
//! g-function, Lagrange constant and h-function, together with the
//! finite-N corrections (corrected endpoints, the k-kernel, the density
//! correction and the m-transform).
//!
//! Everything here runs in double precision; validation tolerances are
//! at the 1e-8 .. 1e-10 level.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{f_kernel, ModelParams};
use crate::quad::{integrate_adaptive, principal_value, GaussLegendre};

/// Half-width of the truncation window for integrals against `f`; the
/// integrand decays like `exp(-2 (pi/2gamma - 1) |x|)`.
fn f_cutoff(p: &ModelParams) -> f64 {
    let rate = 2.0 * (std::f64::consts::PI / (2.0 * p.gamma_f64()) - 1.0);
    (40.0 / rate).max(40.0 / (std::f64::consts::PI / p.gamma_f64()))
}

#[derive(Clone, Debug)]
pub struct EquilibriumData {
    pub alpha: f64,
    pub beta: f64,
    /// Lagrange multiplier of the variational problem.
    pub l: f64,
    pub params: ModelParams,
}

/// Support endpoints `alpha = -pi tan(pi(1-zeta)/4)`,
/// `beta = pi tan(pi(1+zeta)/4)` and the Lagrange constant
/// `l = 2 ln(beta - alpha) - 2 - 4 ln 2`.
pub fn endpoints(p: &ModelParams) -> EquilibriumData {
    let pi = std::f64::consts::PI;
    let zeta = p.zeta_f64();
    let alpha = -pi * (pi * (1.0 - zeta) / 4.0).tan();
    let beta = pi * (pi * (1.0 + zeta) / 4.0).tan();
    let l = 2.0 * (beta - alpha).ln() - 2.0 - 4.0 * 2.0f64.ln();
    EquilibriumData {
        alpha,
        beta,
        l,
        params: p.clone(),
    }
}

/// The potential `V(mu) = -zeta mu + |mu|` on the real line.
pub fn potential(mu: f64, p: &ModelParams) -> f64 {
    -p.zeta_f64() * mu + mu.abs()
}

/// Resolvent of the equilibrium measure,
/// `omega(z) = (1-zeta)/2 + (2/(i pi)) ln[(sqrt(beta(z-alpha))
///   - i sqrt(-alpha(z-beta))) / sqrt(z(beta-alpha))]`,
/// principal branches, analytic off `[alpha, beta]`.
pub fn resolvent(z: Complex64, p: &ModelParams) -> Result<Complex64> {
    let e = endpoints(p);
    if z.im == 0.0 && z.re > e.alpha && z.re < e.beta {
        return Err(Error::Branch(format!("z = {} lies on the cut", z.re)));
    }
    let (a, b) = (e.alpha, e.beta);
    let num = (b * (z - a)).sqrt() - Complex64::i() * ((-a) * (z - b)).sqrt();
    let den = (z * (b - a)).sqrt();
    let pi = std::f64::consts::PI;
    Ok(Complex64::new((1.0 - p.zeta_f64()) / 2.0, 0.0)
        + (num / den).ln() * 2.0 / (Complex64::i() * pi))
}

/// Equilibrium density
/// `rho(mu) = (2/pi^2) ln[(sqrt(beta(mu-alpha)) + sqrt(-alpha(beta-mu)))
///   / sqrt(|mu|(beta-alpha))]` on `(alpha, beta)`; zero at the
/// endpoints, logarithmically divergent at the origin.
pub fn density(mu: f64, p: &ModelParams) -> f64 {
    let e = endpoints(p);
    let (a, b) = (e.alpha, e.beta);
    if mu <= a || mu >= b {
        return 0.0;
    }
    let pi = std::f64::consts::PI;
    let num = (b * (mu - a)).sqrt() + ((-a) * (b - mu)).sqrt();
    2.0 / (pi * pi) * (num / (mu.abs() * (b - a)).sqrt()).ln()
}

/// Closed form of `int_mu^beta rho`:
/// `-mu rho(mu) + (2/pi) atan sqrt((beta-mu)/(mu-alpha))`.
pub fn partial_integral(mu: f64, p: &ModelParams) -> f64 {
    let e = endpoints(p);
    let pi = std::f64::consts::PI;
    if mu <= e.alpha {
        return 1.0;
    }
    if mu >= e.beta {
        return 0.0;
    }
    let arctan = ((e.beta - mu) / (mu - e.alpha)).sqrt().atan();
    if mu == 0.0 {
        // mu rho(mu) ~ mu ln|mu| -> 0 at the logarithmic singularity
        return 2.0 / pi * arctan;
    }
    -mu * density(mu, p) + 2.0 / pi * arctan
}

/// `g(z) = z omega(z) + 2 ln(sqrt(z-alpha) + sqrt(z-beta)) - (1 + 2 ln 2)`,
/// analytic off `(-inf, beta]`.
pub fn g_function(z: Complex64, p: &ModelParams) -> Result<Complex64> {
    let e = endpoints(p);
    if z.im == 0.0 && z.re <= e.beta {
        return Err(Error::Branch(format!(
            "g has its cut on (-inf, beta]; z = {}",
            z.re
        )));
    }
    g_unchecked(z, &e, p)
}

fn g_unchecked(z: Complex64, e: &EquilibriumData, p: &ModelParams) -> Result<Complex64> {
    let omega = resolvent(z, p)?;
    let root = ((z - e.alpha).sqrt() + (z - e.beta).sqrt()).ln();
    Ok(z * omega + 2.0 * root - (1.0 + 2.0 * 2.0f64.ln()))
}

/// `2 Re g(mu + i0)` via evaluation at small positive imaginary offsets
/// with linear Richardson extrapolation; `Re g` is even in the offset up
/// to the `O(delta)` term removed here.
fn two_re_g_boundary(mu: f64, p: &ModelParams) -> f64 {
    let e = endpoints(p);
    let val = |d: f64| {
        2.0 * g_unchecked(Complex64::new(mu, d), &e, p)
            .expect("off-axis evaluation cannot hit the cut")
            .re
    };
    let v1 = val(1e-5);
    let v2 = val(1e-6);
    (10.0 * v2 - v1) / 9.0
}

/// Sup over the grid of the variational residual
/// `|2 Re g(mu + i0) - V(mu) - l|`; zero on `[alpha, beta]`.
pub fn equilibrium_residual(grid: &[f64], p: &ModelParams) -> f64 {
    let e = endpoints(p);
    grid.iter()
        .map(|&mu| (two_re_g_boundary(mu, p) - potential(mu, p) - e.l).abs())
        .fold(0.0, f64::max)
}

/// The variational quantity `2 Re g(mu) - V(mu) - l` at a real exterior
/// point; strictly negative off the support.
pub fn variational_value(mu: f64, p: &ModelParams) -> f64 {
    let e = endpoints(p);
    two_re_g_boundary(mu, p) - potential(mu, p) - e.l
}

/// `h(z)`, analytic off the imaginary axis, defined by the two explicit
/// logarithmic formulas for `Re z > 0` and `Re z < 0`.
pub fn h_function(z: Complex64, p: &ModelParams) -> Result<Complex64> {
    if z.re == 0.0 {
        return Err(Error::Branch("h is two-valued on the imaginary axis".into()));
    }
    let e = endpoints(p);
    let (a, b) = (e.alpha, e.beta);
    let pi = std::f64::consts::PI;
    if z.re > 0.0 {
        let root = ((z - a) * (z - b)).sqrt();
        let num = (b * (z - a)).sqrt() - Complex64::i() * ((-a) * (z - b)).sqrt();
        let den = (z * (b - a)).sqrt();
        Ok(4.0 * Complex64::i() / (pi * root) * (num / den).ln())
    } else {
        let root = ((a - z) * (b - z)).sqrt();
        let num = ((-a) * (b - z)).sqrt() + Complex64::i() * (b * (a - z)).sqrt();
        let den = ((-z) * (b - a)).sqrt();
        Ok(-4.0 * Complex64::i() / (pi * root) * (num / den).ln())
    }
}

/// Endpoint values `h(alpha) = 4/((-alpha)(beta-alpha))`,
/// `h(beta) = 4/(beta(beta-alpha))`.
pub fn h_endpoint_values(p: &ModelParams) -> (f64, f64) {
    let e = endpoints(p);
    let d = e.beta - e.alpha;
    (4.0 / ((-e.alpha) * d), 4.0 / (e.beta * d))
}

/// Endpoint derivatives `h'(alpha) = 4(beta-3alpha)/(3 alpha^2 (beta-alpha)^2)`,
/// `h'(beta) = 4(alpha-3beta)/(3 beta^2 (beta-alpha)^2)`.
pub fn h_endpoint_derivatives(p: &ModelParams) -> (f64, f64) {
    let e = endpoints(p);
    let d2 = (e.beta - e.alpha) * (e.beta - e.alpha);
    (
        4.0 * (e.beta - 3.0 * e.alpha) / (3.0 * e.alpha * e.alpha * d2),
        4.0 * (e.alpha - 3.0 * e.beta) / (3.0 * e.beta * e.beta * d2),
    )
}

/// `k(mu) = P.V. int f(x)/(mu - x) dx`; even in `mu`, with a `-2 ln|mu|`
/// singularity at the origin and `C/mu^2` decay.
pub fn k_kernel(mu: f64, p: &ModelParams) -> Result<f64> {
    if mu == 0.0 {
        return Err(Error::Quadrature("k diverges at mu = 0".into()));
    }
    let rule = GaussLegendre::<f64>::new(20, 53);
    let lim = f_cutoff(p).max(2.0 * mu.abs());
    let tol = 1e-12;
    // integrand has a jump at x = 0 (from the sgn term in f) and the PV
    // singularity at x = mu; split accordingly
    let g = |x: &f64| f_kernel(x, p);
    let (s, t) = if mu > 0.0 { (0.0, lim) } else { (-lim, 0.0) };
    let smooth_side = if mu > 0.0 {
        integrate_adaptive(&|x: &f64| g(x) / (mu - x), &-lim, &0.0, &tol, &rule)?
    } else {
        integrate_adaptive(&|x: &f64| g(x) / (mu - x), &0.0, &lim, &tol, &rule)?
    };
    let pv_side = principal_value(&g, &mu, &s, &t, &tol, &rule)?;
    Ok(smooth_side + pv_side)
}

/// `int_0^inf k`, evaluated as the `[0, eps]` singular head (using the
/// `-2 ln mu` behaviour) plus the adaptive body on `[eps, m]` plus the
/// analytic tail `C/m + C_4/(3m^3) + C_6/(5m^5)`; the exact value is 0.
pub fn k_integral_total(p: &ModelParams, m: f64) -> Result<f64> {
    let rule = GaussLegendre::<f64>::new(20, 53);
    let eps = 1e-6f64;
    // log substitution mu = e^s removes the ln singularity at 0; the
    // integrand k(e^s) e^s is smooth, so a fixed composite rule beats
    // adaptive panels (k itself carries ~1e-12 quadrature noise that
    // adaptive refinement would chase indefinitely)
    let integrand = |s: &f64| {
        let mu = s.exp();
        k_kernel(mu, p).unwrap() * mu
    };
    let (lo, hi) = (eps.ln(), m.ln());
    let panels = 32;
    let mut body = 0.0;
    for i in 0..panels {
        let a = lo + (hi - lo) * i as f64 / panels as f64;
        let b = lo + (hi - lo) * (i + 1) as f64 / panels as f64;
        body += rule.integrate(&integrand, &a, &b);
    }
    let k0_near = k_kernel(eps, p)? + 2.0 * eps.ln();
    let head = eps * (2.0 - 2.0 * eps.ln() + k0_near);
    let c = k_moment_c(p)?.1;
    let c4 = f_odd_moment(1, p)?;
    let c6 = f_odd_moment(2, p)?;
    Ok(head + body + c / m + c4 / (3.0 * m.powi(3)) + c6 / (5.0 * m.powi(5)))
}

fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let mut t = ys.to_vec();
    for j in 1..n {
        for i in 0..n - j {
            t[i] = (xs[i + j] * t[i] - xs[i] * t[i + 1]) / (xs[i + j] - xs[i]);
        }
    }
    t[0]
}

/// Limits of `h` and `h'` at the support endpoints, by polynomial
/// extrapolation of real-axis values from inside `(alpha, beta)`;
/// independent of the closed-form endpoint expressions.
pub fn h_endpoint_oracle(p: &ModelParams) -> ((f64, f64), (f64, f64)) {
    let e = endpoints(p);
    let xs: Vec<f64> = (0..10).map(|k| 0.2 / (1 << k) as f64).collect();
    let at = |mu: f64| h_function(Complex64::new(mu, 0.0), p).unwrap().re;
    let ya: Vec<f64> = xs.iter().map(|&t| at(e.alpha + t)).collect();
    let yb: Vec<f64> = xs.iter().map(|&t| at(e.beta - t)).collect();
    let ha = neville_at_zero(&xs, &ya);
    let hb = neville_at_zero(&xs, &yb);
    let da: Vec<f64> = xs.iter().zip(&ya).map(|(&t, &y)| (y - ha) / t).collect();
    let db: Vec<f64> = xs.iter().zip(&yb).map(|(&t, &y)| (hb - y) / t).collect();
    (
        (ha, hb),
        (neville_at_zero(&xs, &da), neville_at_zero(&xs, &db)),
    )
}

/// `C = int x f(x) dx` by quadrature, together with the closed form
/// `-2 pi gamma^2 / (3 (pi - 2 gamma))`.
pub fn k_moment_c(p: &ModelParams) -> Result<(f64, f64)> {
    let rule = GaussLegendre::<f64>::new(20, 53);
    let lim = f_cutoff(p);
    // x f(x) is even
    let half =
        integrate_adaptive(&|x: &f64| x * f_kernel(x, p), &0.0, &lim, &1e-13, &rule)?;
    let pi = std::f64::consts::PI;
    let g = p.gamma_f64();
    let closed = -2.0 * pi * g * g / (3.0 * (pi - 2.0 * g));
    Ok((2.0 * half, closed))
}

/// Higher even moments `int x^{2j+1} f(x) dx`, used for tail corrections
/// of integrals of `k`.
pub fn f_odd_moment(j: u32, p: &ModelParams) -> Result<f64> {
    let rule = GaussLegendre::<f64>::new(20, 53);
    let lim = f_cutoff(p);
    let half = integrate_adaptive(
        &|x: &f64| x.powi(2 * j as i32 + 1) * f_kernel(x, p),
        &0.0,
        &lim,
        &1e-13,
        &rule,
    )?;
    Ok(2.0 * half)
}

#[derive(Clone, Copy, Debug)]
pub struct CorrectedEndpoints {
    pub alpha_n: f64,
    pub beta_n: f64,
    pub n: u32,
}

/// Closed-form `O(N^{-2})` corrected endpoints:
/// `alpha_N = alpha + N^{-2} gamma^2 (2 sin(pi zeta/2) - 1)
///   / (3 (pi - 2 gamma) cos(pi zeta/2))`, and the same with `+1` for
/// `beta_N`.
pub fn corrected_endpoints(p: &ModelParams, n: u32) -> CorrectedEndpoints {
    let e = endpoints(p);
    let pi = std::f64::consts::PI;
    let g = p.gamma_f64();
    let half = pi * p.zeta_f64() / 2.0;
    let scale = g * g / (3.0 * (pi - 2.0 * g) * half.cos()) / (n as f64 * n as f64);
    CorrectedEndpoints {
        alpha_n: e.alpha + scale * (2.0 * half.sin() - 1.0),
        beta_n: e.beta + scale * (2.0 * half.sin() + 1.0),
        n,
    }
}

/// Closed forms of the endpoint equations:
/// `F(a, b) = -zeta/2 + (1/pi) arcsin((b+a)/(b-a))`,
/// `G(a, b) = -zeta(b+a)/4 + sqrt(b(-a))/pi
///   + ((b+a)/(2 pi)) arcsin((b+a)/(b-a))`.
pub fn endpoint_fg(a: f64, b: f64, p: &ModelParams) -> (f64, f64) {
    let pi = std::f64::consts::PI;
    let zeta = p.zeta_f64();
    let s = ((b + a) / (b - a)).asin();
    let f = -zeta / 2.0 + s / pi;
    let g = -zeta * (b + a) / 4.0 + (b * (-a)).sqrt() / pi + (b + a) / (2.0 * pi) * s;
    (f, g)
}

/// Finite-N integral corrections to the endpoint equations:
/// `I_F = (1/2pi) int_a^b f(Nx) dx / sqrt((x-a)(b-x))` and the same with
/// an extra factor `x`, computed after the substitution `u = Nx` so the
/// integrand decays exponentially.
#[doc(hidden)]
pub fn debug_endpoint_corrections(
    a: f64,
    b: f64,
    n: u32,
    p: &ModelParams,
) -> Result<(f64, f64)> {
    endpoint_corrections(a, b, n, p)
}

fn endpoint_corrections(a: f64, b: f64, n: u32, p: &ModelParams) -> Result<(f64, f64)> {
    let rule = GaussLegendre::<f64>::new(20, 53);
    let pi = std::f64::consts::PI;
    let nf = n as f64;
    let lim = f_cutoff(p).min(-a * nf * 0.999).min(b * nf * 0.999);
    let base = |u: &f64| {
        let x = u / nf;
        f_kernel(u, p) / ((x - a) * (b - x)).sqrt() / (2.0 * pi * nf)
    };
    // split at 0: f jumps there
    let tol = 1e-13;
    let i_f = integrate_adaptive(&base, &-lim, &0.0, &tol, &rule)?
        + integrate_adaptive(&base, &0.0, &lim, &tol, &rule)?;
    let basex = |u: &f64| base(u) * (u / nf);
    let i_g = integrate_adaptive(&basex, &-lim, &0.0, &tol, &rule)?
        + integrate_adaptive(&basex, &0.0, &lim, &tol, &rule)?;
    Ok((i_f, i_g))
}

/// Damped Newton solution of the finite-N endpoint system
/// `F(a, b) + I_F = 0`, `G(a, b) + I_G = 1`, initialized at the
/// closed-form limiting endpoints.
pub fn endpoints_oracle(p: &ModelParams, n: u32) -> Result<CorrectedEndpoints> {
    let e = endpoints(p);
    let (mut a, mut b) = (e.alpha, e.beta);
    // the finite-N system is F(a, b) = I_F, G(a, b) = 1 - I_G in terms of
    // the real integrals below
    let res = |a: f64, b: f64| -> Result<(f64, f64)> {
        let (f, g) = endpoint_fg(a, b, p);
        let (i_f, i_g) = endpoint_corrections(a, b, n, p)?;
        Ok((f - i_f, g + i_g - 1.0))
    };
    let (mut r1, mut r2) = res(a, b)?;
    let mut norm = r1.abs().max(r2.abs());
    for _ in 0..100 {
        if norm < 1e-13 {
            return Ok(CorrectedEndpoints { alpha_n: a, beta_n: b, n });
        }
        // Jacobian of the closed-form part (the integral corrections
        // vary at O(N^-2) and are left out of the linearization)
        let h = 1e-7;
        let (f0, g0) = endpoint_fg(a, b, p);
        let (fa, ga) = endpoint_fg(a + h, b, p);
        let (fb, gb) = endpoint_fg(a, b + h, p);
        let j11 = (fa - f0) / h;
        let j12 = (fb - f0) / h;
        let j21 = (ga - g0) / h;
        let j22 = (gb - g0) / h;
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-14 {
            return Err(Error::RootFind("singular endpoint Jacobian".into()));
        }
        let da = -(j22 * r1 - j12 * r2) / det;
        let db = -(-j21 * r1 + j11 * r2) / det;
        let mut step = 1.0;
        loop {
            let (na, nb) = (a + step * da, b + step * db);
            if na < 0.0 && nb > 0.0 {
                if let Ok((n1, n2)) = res(na, nb) {
                    let nn = n1.abs().max(n2.abs());
                    if nn < norm || step < 1e-3 {
                        a = na;
                        b = nb;
                        r1 = n1;
                        r2 = n2;
                        norm = nn;
                        break;
                    }
                }
            }
            step *= 0.5;
            if step < 1e-6 {
                return Err(Error::RootFind("endpoint Newton step collapsed".into()));
            }
        }
    }
    if norm < 1e-11 {
        Ok(CorrectedEndpoints { alpha_n: a, beta_n: b, n })
    } else {
        Err(Error::RootFind(format!(
            "endpoint Newton did not converge: residual {norm:.3e}"
        )))
    }
}

/// Finite-N density correction
/// `rho_N^1(mu) = -(sqrt(r_N(mu))/(2 pi^2)) P.V. int f(Nx) dx
///   / ((mu - x) sqrt(r_N(x)))`, with `r_N(x) = (x - alpha_N)(beta_N - x)`.
///
/// The integral is truncated to `|Nx|` below the decay cutoff of `f`;
/// outside that window the integrand is exponentially negligible
/// (including near the principal-value point when `|N mu|` is large).
pub fn density_correction(mu: f64, n: u32, p: &ModelParams) -> Result<f64> {
    let ce = corrected_endpoints(p, n);
    let (a, b) = (ce.alpha_n, ce.beta_n);
    if mu <= a || mu >= b {
        return Err(Error::Quadrature("mu outside the finite-N support".into()));
    }
    let pi = std::f64::consts::PI;
    let nf = n as f64;
    let rule = GaussLegendre::<f64>::new(20, 53);
    let lim = (f_cutoff(p) / nf).min(-a * 0.999).min(b * 0.999);
    let r = |x: f64| (x - a) * (b - x);
    let tol = 1e-13;
    let integral = if mu.abs() >= lim {
        // singular point outside the window: no PV needed
        let h = |x: &f64| f_kernel(&(nf * x), p) / ((mu - x) * r(*x).sqrt());
        integrate_adaptive(&h, &-lim, &0.0, &tol, &rule)?
            + integrate_adaptive(&h, &0.0, &lim, &tol, &rule)?
    } else {
        let g = |x: &f64| f_kernel(&(nf * x), p) / r(*x).sqrt();
        if mu > 0.0 {
            integrate_adaptive(&|x: &f64| g(x) / (mu - x), &-lim, &0.0, &tol, &rule)?
                + principal_value(&g, &mu, &0.0, &lim, &tol, &rule)?
        } else {
            integrate_adaptive(&|x: &f64| g(x) / (mu - x), &0.0, &lim, &tol, &rule)?
                + principal_value(&g, &mu, &-lim, &0.0, &tol, &rule)?
        }
    };
    Ok(-r(mu).sqrt() / (2.0 * pi * pi) * integral)
}

/// `m(z) = sgn(Im z) pi i int f(mu)/(z - mu) dmu`, `Im z != 0`.
pub fn m_transform(z: Complex64, p: &ModelParams) -> Result<Complex64> {
    if z.im == 0.0 {
        return Err(Error::Quadrature("m is defined off the real axis".into()));
    }
    let rule = GaussLegendre::<f64>::new(20, 53);
    let lim = f_cutoff(p).max(2.0 * z.norm());
    let tol = 1e-12;
    let re = |mu: &f64| (f_kernel(mu, p) * (z - mu).inv()).re;
    let im = |mu: &f64| (f_kernel(mu, p) * (z - mu).inv()).im;
    let int_re = integrate_adaptive(&re, &-lim, &0.0, &tol, &rule)?
        + integrate_adaptive(&re, &0.0, &lim, &tol, &rule)?;
    let int_im = integrate_adaptive(&im, &-lim, &0.0, &tol, &rule)?
        + integrate_adaptive(&im, &0.0, &lim, &tol, &rule)?;
    let pi = std::f64::consts::PI;
    Ok(Complex64::i() * pi * z.im.signum() * Complex64::new(int_re, int_im))
}

/// Total mass of `rho` by quadrature, with the logarithmic singularity
/// at the origin tamed by the substitution `mu = +-exp(-s)`.
pub fn density_mass(p: &ModelParams) -> Result<f64> {
    let e = endpoints(p);
    let rule = GaussLegendre::<f64>::new(20, 53);
    let tol = 1e-12;
    let core = 0.5f64.min(-e.alpha / 2.0).min(e.beta / 2.0);
    let outer = integrate_adaptive(&|x: &f64| density(*x, p), &e.alpha, &-core, &tol, &rule)?
        + integrate_adaptive(&|x: &f64| density(*x, p), &core, &e.beta, &tol, &rule)?;
    // inner pieces: mu = exp(-s) maps [0, core] to [ln(1/core), inf)
    let s_max = 45.0;
    let inner_pos = integrate_adaptive(
        &|s: &f64| {
            let mu = (-s).exp();
            density(mu, p) * mu
        },
        &(1.0 / core).ln(),
        &s_max,
        &tol,
        &rule,
    )?;
    let inner_neg = integrate_adaptive(
        &|s: &f64| {
            let mu = -(-s).exp();
            density(mu, p) * (-mu)
        },
        &(1.0 / core).ln(),
        &s_max,
        &tol,
        &rule,
    )?;
    Ok(outer + inner_pos + inner_neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_params_f64;

    fn params(gamma: f64, zeta: f64) -> ModelParams {
        let t = zeta * gamma;
        make_params_f64(gamma, t).unwrap()
    }

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn endpoint_identities() {
        for i in 0..10 {
            let zeta = -0.9 + 0.19 * i as f64;
            let p = params(1.0, zeta);
            let e = endpoints(&p);
            assert!(((-e.alpha) * e.beta - PI * PI).abs() < 1e-10);
            assert!((e.beta - e.alpha - 2.0 * PI / (PI * zeta / 2.0).cos()).abs() < 1e-9);
            assert!((e.beta + e.alpha - 2.0 * PI * (PI * zeta / 2.0).tan()).abs() < 1e-9);
        }
        let e = endpoints(&params(1.0, 0.0));
        assert!((e.alpha + PI).abs() < 1e-12 && (e.beta - PI).abs() < 1e-12);
        assert!((e.l - (2.0 * (2.0 * PI).ln() - 2.0 - 4.0 * 2.0f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn resolvent_endpoint_values_and_decay() {
        let p = params(0.9, 0.3);
        let zeta = p.zeta_f64();
        let e = endpoints(&p);
        let wb = resolvent(Complex64::new(e.beta + 1e-12, 0.0), &p).unwrap();
        assert!((wb.re - (1.0 - zeta) / 2.0).abs() < 1e-5 && wb.im.abs() < 1e-5);
        let wa = resolvent(Complex64::new(e.alpha - 1e-12, 0.0), &p).unwrap();
        assert!((wa.re - (-1.0 - zeta) / 2.0).abs() < 1e-5 && wa.im.abs() < 1e-5);
        for &arg in &[0.3f64, 1.2, 2.5, -0.8] {
            let z = Complex64::from_polar(1e7, arg);
            let w = resolvent(z, &p).unwrap();
            assert!((z * w - 1.0).norm() < 1e-5, "arg = {arg}");
        }
        let z = Complex64::new(1.7, 0.9);
        let w = resolvent(z, &p).unwrap();
        let wc = resolvent(z.conj(), &p).unwrap();
        assert!((w.conj() - wc).norm() < 1e-14);
        assert!(matches!(
            resolvent(Complex64::new(0.5, 0.0), &p),
            Err(Error::Branch(_))
        ));
    }

    #[test]
    fn density_properties() {
        let p = params(1.1, 0.25);
        let e = endpoints(&p);
        assert!(density(e.alpha, &p).abs() < 1e-12);
        assert!(density(e.beta, &p).abs() < 1e-12);
        // closed-form partial integral at the marked points
        assert!((partial_integral(e.alpha, &p) - 1.0).abs() < 1e-12);
        assert!(partial_integral(e.beta, &p).abs() < 1e-12);
        let zeta = p.zeta_f64();
        let at0 = 2.0 / PI * ((e.beta / PI).atan());
        assert!((at0 - (1.0 + zeta) / 2.0).abs() < 1e-12);
        // log singularity: rho(mu) / (-(1/pi^2) ln|mu|) -> 1
        for &mu in &[1e-6f64, 1e-8, 1e-10] {
            let ratio = density(mu, &p) / (-(1.0 / (PI * PI)) * mu.ln());
            assert!((ratio - 1.0).abs() < 3.0 / -mu.ln(), "mu = {mu}");
        }
    }

    #[test]
    fn density_mass_is_one() {
        for &(g, z) in &[(1.0, 0.0), (0.9, 0.35), (1.3, -0.5)] {
            let p = params(g, z);
            let m = density_mass(&p).unwrap();
            assert!((m - 1.0).abs() < 1e-10, "gamma = {g}, zeta = {z}: {m}");
        }
    }

    #[test]
    fn partial_integral_matches_quadrature() {
        let p = params(1.0, 0.2);
        let e = endpoints(&p);
        let rule = GaussLegendre::<f64>::new(20, 53);
        for &mu in &[0.5f64, 1.5, 2.4] {
            let q =
                integrate_adaptive(&|x: &f64| density(*x, &p), &mu, &e.beta, &1e-11, &rule)
                    .unwrap();
            assert!((q - partial_integral(mu, &p)).abs() < 1e-9, "mu = {mu}");
        }
        // negative side, via a difference that avoids the origin
        let q = integrate_adaptive(&|x: &f64| density(*x, &p), &-1.0, &-0.2, &1e-11, &rule)
            .unwrap();
        let diff = partial_integral(-1.0, &p) - partial_integral(-0.2, &p);
        assert!((q - diff).abs() < 1e-9);
    }

    #[test]
    fn resolvent_jump_gives_density() {
        let p = params(0.8, 0.15);
        for &mu in &[-1.5f64, 0.7, 2.0] {
            let d = 1e-7;
            let wp = resolvent(Complex64::new(mu, d), &p).unwrap();
            let wm = resolvent(Complex64::new(mu, -d), &p).unwrap();
            let jump = -((wp - wm) / (2.0 * PI * Complex64::i())).re;
            assert!((jump - density(mu, &p)).abs() < 1e-6, "mu = {mu}");
        }
    }

    #[test]
    fn g_function_properties() {
        let p = params(1.0, 0.3);
        let e = endpoints(&p);
        // g - ln z -> 0 at infinity
        for &arg in &[0.4f64, 2.0, -1.3] {
            let z = Complex64::from_polar(1e6, arg);
            let g = g_function(z, &p).unwrap();
            assert!((g - z.ln()).norm() < 1e-5, "arg = {arg}");
        }
        // g' = omega by central differences
        for &(re, im) in &[(4.0f64, 0.5), (1.0, 2.0), (-2.0, 1.5)] {
            let z = Complex64::new(re, im);
            let h = 1e-6;
            let fd = (g_function(z + h, &p).unwrap() - g_function(z - h, &p).unwrap())
                / (2.0 * h);
            assert!((fd - resolvent(z, &p).unwrap()).norm() < 1e-9);
        }
        // 2 g(beta) - V(beta) = l
        let gb = two_re_g_boundary(e.beta, &p);
        assert!((gb - potential(e.beta, &p) - e.l).abs() < 1e-9);
        assert!(matches!(
            g_function(Complex64::new(e.beta - 0.5, 0.0), &p),
            Err(Error::Branch(_))
        ));
    }

    #[test]
    fn h_function_properties() {
        let p = params(1.05, -0.2);
        let e = endpoints(&p);
        let (ha, hb) = h_endpoint_values(&p);
        // the closed forms are the finite limits of the 0/0 expressions
        let ha_num = h_function(Complex64::new(e.alpha + 1e-9, 0.0), &p).unwrap();
        let hb_num = h_function(Complex64::new(e.beta - 1e-9, 0.0), &p).unwrap();
        assert!((ha_num.re - ha).abs() < 1e-5 && ha_num.im.abs() < 1e-5);
        assert!((hb_num.re - hb).abs() < 1e-5 && hb_num.im.abs() < 1e-5);
        // rho = h sqrt(r) / (2 pi) on a grid avoiding 0, h > 0 there
        for i in 1..20 {
            let mu = e.alpha + (e.beta - e.alpha) * i as f64 / 20.0;
            if mu.abs() < 0.05 {
                continue;
            }
            let h = h_function(Complex64::new(mu, 0.0), &p).unwrap();
            assert!(h.re > 0.0 && h.im.abs() < 1e-9);
            let rho = h.re * ((mu - e.alpha) * (e.beta - mu)).sqrt() / (2.0 * PI);
            assert!((rho - density(mu, &p)).abs() < 1e-10, "mu = {mu}");
        }
        // h'(beta) closed form vs finite differences
        let (hpa, hpb) = h_endpoint_derivatives(&p);
        let h = 1e-5;
        let fd_b = (h_function(Complex64::new(e.beta + h, 0.0), &p).unwrap().re
            - h_function(Complex64::new(e.beta - h, 0.0), &p).unwrap().re)
            / (2.0 * h);
        assert!((fd_b - hpb).abs() < 1e-4 * hpb.abs());
        let fd_a = (h_function(Complex64::new(e.alpha + h, 0.0), &p).unwrap().re
            - h_function(Complex64::new(e.alpha - h, 0.0), &p).unwrap().re)
            / (2.0 * h);
        assert!((fd_a - hpa).abs() < 1e-4 * hpa.abs());
        assert!(matches!(
            h_function(Complex64::new(0.0, 1.0), &p),
            Err(Error::Branch(_))
        ));
    }

    #[test]
    fn variational_conditions() {
        let p = params(1.0, 0.0);
        let e = endpoints(&p);
        let grid: Vec<f64> = (1..100)
            .map(|i| e.alpha + (e.beta - e.alpha) * i as f64 / 100.0)
            .filter(|m| m.abs() > 1e-3)
            .collect();
        let r = equilibrium_residual(&grid, &p);
        assert!(r < 1e-8, "residual = {r:.3e}");
        // refinement consistency
        let coarse: Vec<f64> = grid.iter().step_by(4).copied().collect();
        let rc = equilibrium_residual(&coarse, &p);
        assert!(rc <= r + 1e-12);
        // strict negativity outside the support
        for &mu in &[e.alpha - 0.5, e.beta + 0.5, e.beta + 3.0, e.alpha - 2.0] {
            assert!(variational_value(mu, &p) < -1e-4, "mu = {mu}");
        }
        // another zeta
        let p = params(0.9, 0.4);
        let e = endpoints(&p);
        let grid: Vec<f64> = (1..60)
            .map(|i| e.alpha + (e.beta - e.alpha) * i as f64 / 60.0)
            .filter(|m| m.abs() > 1e-3)
            .collect();
        assert!(equilibrium_residual(&grid, &p) < 1e-8);
    }

    #[test]
    fn k_kernel_properties() {
        let p = params(1.0, 0.2);
        for &mu in &[0.3f64, 1.0, 4.0] {
            let kp = k_kernel(mu, &p).unwrap();
            let km = k_kernel(-mu, &p).unwrap();
            assert!((kp - km).abs() < 1e-8, "mu = {mu}");
        }
        // large-mu decay constant
        let (c_quad, c_closed) = k_moment_c(&p).unwrap();
        assert!((c_quad - c_closed).abs() < 1e-10);
        let mu = 30.0;
        let k = k_kernel(mu, &p).unwrap();
        let c4 = f_odd_moment(1, &p).unwrap();
        let expect = c_closed / (mu * mu) + c4 / mu.powi(4);
        assert!((k - expect).abs() < 1e-3 * expect.abs());
        // free-fermion point: C = -pi^2/12
        let pf = params(PI / 4.0, 0.1);
        let (cq, cc) = k_moment_c(&pf).unwrap();
        assert!((cc + PI * PI / 12.0).abs() < 1e-12);
        assert!((cq - cc).abs() < 1e-10);
    }

    #[test]
    fn k_integral_vanishes() {
        // int_0^inf k = 0, checked as int_0^M k + C/M + C4/(3M^3)
        // + C6/(5M^5) -> 0 with the tail moments from quadrature
        let p = params(1.0, 0.0);
        let total = k_integral_total(&p, 50.0).unwrap();
        assert!(total.abs() < 1e-8, "total = {total:.3e}");
    }

    #[test]
    fn closed_form_partials_match_theory() {
        let p = params(1.0, 0.3);
        let e = endpoints(&p);
        let h = 1e-6;
        let (f0, g0) = endpoint_fg(e.alpha, e.beta, &p);
        let (fa, ga) = endpoint_fg(e.alpha + h, e.beta, &p);
        let (fb, gb) = endpoint_fg(e.alpha, e.beta + h, &p);
        let s = (PI * p.zeta_f64() / 2.0).sin();
        let c = (PI * p.zeta_f64() / 2.0).cos();
        assert!(((fa - f0) / h - (1.0 + s) / (2.0 * PI * PI)).abs() < 1e-6);
        assert!(((fb - f0) / h - (1.0 - s) / (2.0 * PI * PI)).abs() < 1e-6);
        assert!(((ga - g0) / h + c / (2.0 * PI)).abs() < 1e-6);
        assert!(((gb - g0) / h - c / (2.0 * PI)).abs() < 1e-6);
        // and F, G themselves vanish at (alpha, beta)
        assert!(f0.abs() < 1e-12 && (g0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_closed_form_correction() {
        let p = params(1.0, 0.3);
        let n = 1000u32;
        let e = endpoints(&p);
        let oracle = endpoints_oracle(&p, n).unwrap();
        let closed = corrected_endpoints(&p, n);
        let n2 = (n as f64) * (n as f64);
        let db_oracle = n2 * (oracle.beta_n - e.beta);
        let db_closed = n2 * (closed.beta_n - e.beta);
        assert!(
            ((db_oracle - db_closed) / db_closed).abs() < 0.02,
            "oracle {db_oracle}, closed {db_closed}"
        );
        let da_oracle = n2 * (oracle.alpha_n - e.alpha);
        let da_closed = n2 * (closed.alpha_n - e.alpha);
        assert!(((da_oracle - da_closed) / da_closed).abs() < 0.02);
    }

    #[test]
    fn zeta_zero_corrections_are_opposite() {
        let p = params(1.0, 0.0);
        let n = 200u32;
        let e = endpoints(&p);
        let c = corrected_endpoints(&p, n);
        // sin term vanishes: the shifts differ only in sign
        assert!((c.alpha_n - e.alpha + (c.beta_n - e.beta)).abs() < 1e-15);
        let o = endpoints_oracle(&p, n).unwrap();
        assert!((o.alpha_n - e.alpha + (o.beta_n - e.beta)).abs() < 1e-7);
    }

    #[test]
    fn endpoint_width_bridge() {
        // (beta_N - alpha_N)^2/16 - (beta - alpha)^2/16
        //   = N^-2 pi gamma^2 / (6 (pi - 2 gamma) cos^2(pi zeta/2)) + O(N^-4)
        let p = params(1.0, 0.3);
        let e = endpoints(&p);
        let n = 500u32;
        let c = corrected_endpoints(&p, n);
        let lhs = ((c.beta_n - c.alpha_n).powi(2) - (e.beta - e.alpha).powi(2)) / 16.0;
        let g = p.gamma_f64();
        let cz = (PI * p.zeta_f64() / 2.0).cos();
        let rhs = PI * g * g / (6.0 * (PI - 2.0 * g) * cz * cz) / (n as f64 * n as f64);
        assert!(((lhs - rhs) / rhs).abs() < 1e-4, "lhs {lhs}, rhs {rhs}");
    }

    #[test]
    fn density_correction_scaling() {
        let p = params(1.0, 0.2);
        let e = endpoints(&p);
        let r = (-e.alpha).min(e.beta) / 4.0;
        let grid: Vec<f64> = (0..5)
            .map(|i| e.alpha + r + (e.beta - e.alpha - 2.0 * r) * i as f64 / 4.0)
            .map(|m| if m.abs() < 0.05 { m + 0.1 } else { m })
            .collect();
        let sup = |n: u32| -> f64 {
            grid.iter()
                .map(|&mu| {
                    let rho1 = density_correction(mu, n, &p).unwrap();
                    let k = k_kernel(n as f64 * mu, &p).unwrap();
                    (rho1 + k / (2.0 * PI * PI)).abs()
                })
                .fold(0.0, f64::max)
        };
        let s50 = sup(50);
        let s200 = sup(200);
        // O(N^-2) decay of the defect, with slack
        assert!(
            s200 * 200.0 * 200.0 <= 4.0 * s50 * 50.0 * 50.0 + 1e-6,
            "s50 = {s50:.3e}, s200 = {s200:.3e}"
        );
    }

    #[test]
    fn density_correction_symmetry_at_zeta_zero() {
        // f odd and r_N symmetric at zeta = 0 make rho_N^1 even in mu
        // (consistent with the even limit -k(N mu)/(2 pi^2))
        let p = params(1.0, 0.0);
        let n = 100u32;
        for &mu in &[0.4f64, 1.1, 2.0] {
            let plus = density_correction(mu, n, &p).unwrap();
            let minus = density_correction(-mu, n, &p).unwrap();
            assert!((plus - minus).abs() < 1e-10, "mu = {mu}");
        }
    }

    #[test]
    fn density_correction_small_near_endpoint() {
        let p = params(1.0, 0.2);
        let n = 100u32;
        let c = corrected_endpoints(&p, n);
        let mu = c.beta_n - 0.2;
        let rho1 = density_correction(mu, n, &p).unwrap();
        assert!(rho1.abs() < 10.0 / (n as f64 * n as f64), "rho1 = {rho1:.3e}");
    }

    #[test]
    fn m_transform_properties() {
        let p = params(1.0, 0.3);
        let z = Complex64::new(1.3, 0.8);
        let m = m_transform(z, &p).unwrap();
        assert!((m_transform(-z, &p).unwrap() + m).norm() < 1e-9);
        assert!((m_transform(z.conj(), &p).unwrap() - m.conj()).norm() < 1e-9);
        // decay constant along the imaginary axis: z^2 m -> pi i C, with
        // C the first odd moment of f
        let c = k_moment_c(&p).unwrap().1;
        let y = 100.0;
        let zy = Complex64::new(0.0, y);
        let m = m_transform(zy, &p).unwrap();
        assert!((zy * zy * m - PI * Complex64::i() * c).norm() < 1e-2 * c.abs());
        // log split bounded as y -> 0+
        for &y in &[1e-3f64, 1e-4, 1e-5] {
            let zy = Complex64::new(0.0, y);
            let m = m_transform(zy, &p).unwrap();
            let m0 = m + 2.0 * PI * Complex64::i() * zy.ln();
            assert!(m0.norm() < 50.0, "y = {y}: {m0}");
        }
    }
}
