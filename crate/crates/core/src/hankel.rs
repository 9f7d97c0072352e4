//! Exact finite-N computation of the partition function.
//!
//! Moments of the orthogonality weight are generated exactly as Taylor
//! coefficients of `phi(t) = cot(gamma - t) + cot(gamma + t)` via the
//! cotangent ODE recurrences; the Hankel determinant is factorized
//! symmetrically so that the pivots are the normalizing constants `h_n`
//! of the monic orthogonal polynomials. Everything runs at a caller- or
//! adaptively-chosen binary precision.

use std::ops::{Add, Div, Mul, Sub};

use crate::error::{Error, Result};
use crate::jet::TaylorJet;
use crate::params::ModelParams;
use crate::scalar::{agreed_digits, Big, Scalar};

/// Work bound for jet generation; `order * log2(order)` above this is
/// rejected up front.
const JET_WORK_BOUND: f64 = 6.0e4;

/// Ceiling for the adaptive precision search.
pub const MAX_BITS: u32 = 1 << 20;

/// Starting precision of the doubling search.
pub fn start_bits(n: usize) -> u32 {
    256u32.max(16 * n as u32)
}

/// Taylor jet of `phi` around the model's `t`, to the given order.
///
/// Uses `u = cot(gamma - t)`, `v = cot(gamma + t)` with `u' = 1 + u^2`
/// and `v' = -(1 + v^2)`; the coefficient recurrences are
/// `(k+1) u_{k+1} = d_{k0} + sum_i u_i u_{k-i}` and the negated analogue
/// for `v`. Exact at the working precision, `O(order^2)` operations.
pub fn phi_jet<S: Scalar>(p: &ModelParams, order: usize, prec: u32) -> Result<TaylorJet<S>> {
    let work = order as f64 * (order.max(2) as f64).log2();
    if work > JET_WORK_BOUND {
        return Err(Error::Precision(format!(
            "jet order {order} exceeds the work bound"
        )));
    }
    let g: S = p.gamma(prec);
    let t: S = p.t(prec);
    let gm = g.clone() - t.clone();
    let gp = g + t;
    let mut u = Vec::with_capacity(order + 1);
    let mut v = Vec::with_capacity(order + 1);
    u.push(gm.cos_s() / gm.sin_s());
    v.push(gp.cos_s() / gp.sin_s());
    for k in 0..order {
        let mut su = S::zero(prec);
        let mut sv = S::zero(prec);
        for i in 0..=k {
            su = su + u[i].clone() * u[k - i].clone();
            sv = sv + v[i].clone() * v[k - i].clone();
        }
        if k == 0 {
            su = su + S::one(prec);
            sv = sv + S::one(prec);
        }
        let kf = S::from_i64(k as i64 + 1, prec);
        u.push(su / kf.clone());
        v.push(-sv / kf);
    }
    let coeffs = u
        .into_iter()
        .zip(v)
        .map(|(a, b)| a + b)
        .collect::<Vec<_>>();
    Ok(TaylorJet::from_coeffs(coeffs))
}

/// Moments `mu_k = phi^{(k)}(t)`, `k = 0..=2N-2`.
#[derive(Clone, Debug)]
pub struct MomentTable<S: Scalar> {
    pub moments: Vec<S>,
    pub prec: u32,
}

pub fn moment_table<S: Scalar>(p: &ModelParams, n: usize, prec: u32) -> Result<MomentTable<S>> {
    assert!(n >= 1);
    let order = 2 * n - 2;
    let jet = phi_jet::<S>(p, order, prec)?;
    let mut moments = Vec::with_capacity(order + 1);
    let mut kfact = S::one(prec);
    for k in 0..=order {
        if k > 0 {
            kfact = kfact * S::from_i64(k as i64, prec);
        }
        moments.push(kfact.clone() * jet.coeff(k).clone());
    }
    Ok(MomentTable { moments, prec })
}

/// Elements the symmetric factorization runs over: scalars, or jets of
/// scalars when derivatives are propagated through the pipeline.
pub trait PivotElem:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn pivot_ok(&self) -> bool;
    fn zero_of(&self) -> Self;
}

impl<S: Scalar> PivotElem for S {
    fn pivot_ok(&self) -> bool {
        self.is_finite_s() && *self > S::zero(self.prec())
    }
    fn zero_of(&self) -> Self {
        S::zero(self.prec())
    }
}

impl<S: Scalar> PivotElem for TaylorJet<S> {
    fn pivot_ok(&self) -> bool {
        self.value().is_finite_s() && *self.value() > S::zero(self.prec())
    }
    fn zero_of(&self) -> Self {
        TaylorJet::constant(S::zero(self.prec()), self.order())
    }
}

/// LDL^T factorization of the `n x n` Hankel matrix `H[i][j] = m[i+j]`.
/// Returns the pivots (`h_0..h_{n-1}`) and the unit lower factor.
pub fn hankel_ldl<T: PivotElem>(m: &[T], n: usize) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    assert!(m.len() >= 2 * n - 1);
    let mut d: Vec<T> = Vec::with_capacity(n);
    let mut l: Vec<Vec<T>> = (0..n).map(|_| Vec::new()).collect();
    for j in 0..n {
        let mut dj = m[2 * j].clone();
        for k in 0..j {
            dj = dj - l[j][k].clone() * l[j][k].clone() * d[k].clone();
        }
        if !dj.pivot_ok() {
            return Err(Error::Conditioning(format!(
                "pivot {j} is not positive; raise the working precision"
            )));
        }
        for i in (j + 1)..n {
            let mut acc = m[i + j].clone();
            for k in 0..j {
                acc = acc - l[i][k].clone() * l[j][k].clone() * d[k].clone();
            }
            let lij = acc / dj.clone();
            l[i].push(lij);
        }
        d.push(dj);
    }
    Ok((d, l))
}

/// Hankel determinant `tau_N`; `tau_0 = 1` by convention.
pub fn hankel_tau(p: &ModelParams, n: usize, prec: u32) -> Result<Big> {
    if n == 0 {
        return Ok(Big::new(prec, 1.0));
    }
    let mt = moment_table::<Big>(p, n, prec)?;
    let (d, _) = hankel_ldl(&mt.moments, n)?;
    let mut tau = Big::new(prec, 1.0);
    for h in d {
        tau = tau * h;
    }
    Ok(tau)
}

/// Recurrence data `h_n`, `R_n = h_n / h_{n-1}`, `Q_n` extracted from the
/// factorization of the moment matrix.
#[derive(Clone, Debug)]
pub struct RecurrenceTable {
    /// `h_0..=h_nmax`
    pub h: Vec<Big>,
    /// `R_1..=R_nmax` (index 0 holds `R_1`)
    pub r: Vec<Big>,
    /// `Q_0..=Q_{nmax-1}`
    pub q: Vec<Big>,
    pub n_max: usize,
    /// Estimated correct decimal digits (from the doubling check); `None`
    /// when computed at a fixed precision.
    pub certificate: Option<f64>,
}

pub fn recurrence_table(p: &ModelParams, n_max: usize, prec: u32) -> Result<RecurrenceTable> {
    assert!(n_max >= 1);
    let size = n_max + 1;
    let mt = moment_table::<Big>(p, size, prec)?;
    let (d, l) = hankel_ldl(&mt.moments, size)?;
    let h = d;
    let r = (1..=n_max).map(|n| h[n].clone() / h[n - 1].clone()).collect();
    // Monic orthogonal polynomial coefficients are rows of L^{-1}; the
    // subleading coefficient of P_n is s_n = -L[n][n-1], and
    // Q_n = s_n - s_{n+1} = L[n+1][n] - L[n][n-1].
    let sub = |n: usize| -> Big {
        if n == 0 {
            Big::new(prec, 0.0)
        } else {
            -l[n][n - 1].clone()
        }
    };
    let q = (0..n_max).map(|n| sub(n) - sub(n + 1)).collect();
    Ok(RecurrenceTable {
        h,
        r,
        q,
        n_max,
        certificate: None,
    })
}

/// `prod_{n=0}^{N-1} n!` at the working precision.
pub fn factorial_product(n: usize, prec: u32) -> Big {
    let mut prod = Big::new(prec, 1.0);
    let mut fact = Big::new(prec, 1.0);
    for k in 1..n {
        fact = fact * Big::new(prec, k as f64);
        prod = prod * fact.clone();
    }
    prod
}

/// Partition function by the Izergin determinant formula:
/// `Z_N = [sin(gamma+t) sin(gamma-t)]^{N^2} tau_N / (prod n!)^2`.
pub fn partition_z(p: &ModelParams, n: usize, prec: u32) -> Result<Big> {
    let tau = hankel_tau(p, n, prec)?;
    let g: Big = p.gamma(prec);
    let t: Big = p.t(prec);
    let ab = (g.clone() + t.clone()).sin_s() * (g - t).sin_s();
    let fp = factorial_product(n, prec);
    Ok(ab.powi_s((n * n) as i32) * tau / (fp.clone() * fp))
}

/// `F_N = N^{-2} ln[tau_N / (prod n!)^2]`.
pub fn free_energy_f(p: &ModelParams, n: usize, prec: u32) -> Result<Big> {
    let tau = hankel_tau(p, n, prec)?;
    let fp = factorial_product(n, prec);
    let n2 = Big::new(prec, (n * n) as f64);
    Ok((tau.ln_s() - Big::new(prec, 2.0) * fp.ln_s()) / n2)
}

/// `N^{-2} ln Z_N`.
pub fn log_z_over_n2(p: &ModelParams, n: usize, prec: u32) -> Result<Big> {
    let g: Big = p.gamma(prec);
    let t: Big = p.t(prec);
    let ab = (g.clone() + t.clone()).sin_s() * (g - t).sin_s();
    Ok(free_energy_f(p, n, prec)? + ab.ln_s())
}

/// Pivots of the jet-valued factorization: the whole pipeline run over
/// order-2 jets in `t`, so that first and second `t`-derivatives of every
/// `tau_n` come out exactly.
fn jet_pivots(p: &ModelParams, size: usize, prec: u32) -> Result<Vec<TaylorJet<Big>>> {
    let order = 2 * size - 2;
    let jet = phi_jet::<Big>(p, order + 2, prec)?;
    // Order-2 jet of mu_k: coefficient j is (k+j)! a_{k+j} / j!.
    let mut fact = vec![Big::new(prec, 1.0)];
    for k in 1..=(order + 2) {
        let prev = fact[k - 1].clone();
        fact.push(prev * Big::new(prec, k as f64));
    }
    let moments: Vec<TaylorJet<Big>> = (0..=order)
        .map(|k| {
            TaylorJet::from_coeffs(vec![
                fact[k].clone() * jet.coeff(k).clone(),
                fact[k + 1].clone() * jet.coeff(k + 1).clone(),
                fact[k + 2].clone() * jet.coeff(k + 2).clone() / Big::new(prec, 2.0),
            ])
        })
        .collect();
    let (d, _) = hankel_ldl(&moments, size)?;
    Ok(d)
}

/// Relative residual of the Toda equation
/// `tau_N tau_N'' - (tau_N')^2 = tau_{N+1} tau_{N-1}` (derivatives in `t`).
pub fn toda_residual(p: &ModelParams, n: usize, prec: u32) -> Result<Big> {
    assert!(n >= 1);
    let d = jet_pivots(p, n + 1, prec)?;
    let one = TaylorJet::constant(Big::new(prec, 1.0), 2);
    let mut taus = vec![one.clone()]; // tau_0 = 1
    let mut acc = one;
    for dn in &d {
        acc = acc * dn.clone();
        taus.push(acc.clone());
    }
    let value = |j: &TaylorJet<Big>| j.coeff(0).clone();
    let d1 = |j: &TaylorJet<Big>| j.coeff(1).clone();
    let d2 = |j: &TaylorJet<Big>| Big::new(prec, 2.0) * j.coeff(2).clone();
    let tn = &taus[n];
    let lhs = value(tn) * d2(tn) - d1(tn) * d1(tn);
    let rhs = value(&taus[n + 1]) * value(&taus[n - 1]);
    Ok(((lhs - rhs.clone()) / rhs).abs_s())
}

/// Second `t`-derivative of `F_N` (via jets) and `R_N / N^2`; the two are
/// equal as an exact identity.
pub fn f_second_vs_r(p: &ModelParams, n: usize, prec: u32) -> Result<(Big, Big)> {
    assert!(n >= 1);
    let d = jet_pivots(p, n + 1, prec)?;
    let one = TaylorJet::constant(Big::new(prec, 1.0), 2);
    let mut tau_n = one.clone();
    for dn in d.iter().take(n) {
        tau_n = tau_n * dn.clone();
    }
    let t0 = tau_n.coeff(0).clone();
    let t1 = tau_n.coeff(1).clone();
    let t2 = Big::new(prec, 2.0) * tau_n.coeff(2).clone();
    let log_dd = t2 / t0.clone() - (t1.clone() / t0.clone()) * (t1 / t0);
    let n2 = Big::new(prec, (n * n) as f64);
    let r_n = d[n].value().clone() / d[n - 1].value().clone();
    Ok((log_dd / n2.clone(), r_n / n2))
}

/// A value together with its adaptive-precision certificate.
#[derive(Clone, Debug)]
pub struct Certified<T> {
    pub value: T,
    pub bits: u32,
    /// Decimal digits on which the doubling check agreed.
    pub digits: f64,
}

/// Run a re-runnable computation at `p` and `2p` bits, doubling until the
/// canonical output vectors agree to `target_digits` decimal digits.
pub fn adaptive_precision<F>(
    run: F,
    target_digits: f64,
    start: u32,
    max_bits: u32,
) -> Result<Certified<Vec<Big>>>
where
    F: Fn(u32) -> Result<Vec<Big>>,
{
    let mut bits = start;
    let mut lo = run(bits);
    loop {
        let hi_bits = bits * 2;
        if hi_bits > max_bits {
            return Err(Error::NonConvergence(format!(
                "no agreement to {target_digits} digits below {max_bits} bits"
            )));
        }
        let hi = run(hi_bits);
        if let (Ok(a), Ok(b)) = (&lo, &hi) {
            let digits = a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| agreed_digits(x, y))
                .fold(f64::INFINITY, f64::min);
            if digits >= target_digits {
                return Ok(Certified {
                    value: b.clone(),
                    bits: hi_bits,
                    digits,
                });
            }
        }
        bits = hi_bits;
        lo = hi;
    }
}

/// Recurrence table with a doubling-check certificate.
pub fn recurrence_table_certified(
    p: &ModelParams,
    n_max: usize,
    target_digits: f64,
) -> Result<RecurrenceTable> {
    let cert = adaptive_precision(
        |bits| {
            let t = recurrence_table(p, n_max, bits)?;
            let mut v = t.h;
            v.extend(t.r);
            v.extend(t.q);
            Ok(v)
        },
        target_digits,
        start_bits(n_max + 1),
        MAX_BITS,
    )?;
    let v = cert.value;
    let h = v[0..=n_max].to_vec();
    let r = v[n_max + 1..2 * n_max + 1].to_vec();
    let q = v[2 * n_max + 1..].to_vec();
    Ok(RecurrenceTable {
        h,
        r,
        q,
        n_max,
        certificate: Some(cert.digits),
    })
}

/// Partition function with a doubling-check certificate.
pub fn partition_z_certified(
    p: &ModelParams,
    n: usize,
    target_digits: f64,
) -> Result<Certified<Big>> {
    let cert = adaptive_precision(
        |bits| Ok(vec![partition_z(p, n, bits)?]),
        target_digits,
        start_bits(n),
        MAX_BITS,
    )?;
    Ok(Certified {
        value: cert.value[0].clone(),
        bits: cert.bits,
        digits: cert.digits,
    })
}
