//! Floating-point kernels: K-Bessel functions, the beta function on the
//! Levi of the Heisenberg parabolic, generalized Whittaker functions, the
//! archimedean Fourier-Jacobi integral, the Poincare summand and a numeric
//! positivity oracle.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::arith::{q, Q};
use crate::coset::{GramTriple, IndexPair, Mat2Z};
use crate::error::{Error, Result};
use crate::quadspace::{biv_matrix, su2_triple};

pub type C = Complex64;

/// A real vector of `V_{2,2}` in the basis `b3, b4, b-4, b-3`.
pub type V22 = [f64; 4];

/// `y0 = b3 + b-3`.
pub const Y0: V22 = [1.0, 0.0, 0.0, 1.0];
/// `y1 = b4 + b-4`.
pub const Y1: V22 = [0.0, 1.0, 1.0, 0.0];

/// The bilinear form on `V_{2,2}`.
pub fn pair22(x: &V22, y: &V22) -> f64 {
    x[0] * y[3] + x[3] * y[0] + x[1] * y[2] + x[2] * y[1]
}

fn pair22c(x: &V22, y: &[C; 4]) -> C {
    y[3] * x[0] + y[0] * x[3] + y[2] * x[1] + y[1] * x[2]
}

/// The integral matrix `[[m11, m12], [m21, m22]]` as the vector
/// `m11 b3 - m21 b4 + m12 b-4 + m22 b-3`, so that `q = det`.
pub fn mat_to_v22(m: &Mat2Z) -> V22 {
    [m[0][0] as f64, -m[1][0] as f64, m[0][1] as f64, m[1][1] as f64]
}

/// A point `(m, h)` of the Levi `GL2 x SO(2,2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeviPoint {
    pub m: [[f64; 2]; 2],
    pub h: [[f64; 4]; 4],
}

impl LeviPoint {
    pub fn identity() -> Self {
        let mut h = [[0.0; 4]; 4];
        for (i, row) in h.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        LeviPoint { m: [[1.0, 0.0], [0.0, 1.0]], h }
    }

    /// Checks `det m > 0` and that `h` preserves the form to `1e-12`.
    pub fn validate(&self) -> Result<()> {
        let det = self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0];
        if det <= 0.0 {
            return Err(Error::Invalid("det m must be positive".into()));
        }
        for i in 0..4 {
            for j in 0..4 {
                let ci = self.h_col(i);
                let cj = self.h_col(j);
                let mut e = [0.0; 4];
                e[i] = 1.0;
                let mut f = [0.0; 4];
                f[j] = 1.0;
                if (pair22(&ci, &cj) - pair22(&e, &f)).abs() > 1e-12 {
                    return Err(Error::Invalid("h does not preserve the quadratic form".into()));
                }
            }
        }
        Ok(())
    }

    fn h_col(&self, j: usize) -> V22 {
        std::array::from_fn(|i| self.h[i][j])
    }

    fn det_m(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }
}

/// The point `exp(s b1 ^ b-2) (t, u)`: `m = [[1, st], [0, t]]`, `h = u`.
pub fn heisenberg_path(s: f64, t: f64, u: [[f64; 4]; 4]) -> LeviPoint {
    LeviPoint { m: [[1.0, s * t], [0.0, t]], h: u }
}

/// The boost of rapidity `theta` in the plane of `y1` and `b4 - b-4`,
/// which fixes `y0`.
pub fn boost_y1(theta: f64) -> [[f64; 4]; 4] {
    let mut h = LeviPoint::identity().h;
    h[1][1] = theta.exp();
    h[2][2] = (-theta).exp();
    h
}

/// Values of a generalized Whittaker function: entry `v + l` is the
/// coefficient of `x^{l+v} y^{l-v} / ((l+v)! (l-v)!)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WhittakerValue {
    pub ell: usize,
    pub comps: Vec<C>,
}

impl WhittakerValue {
    pub fn get(&self, v: i64) -> C {
        self.comps[(v + self.ell as i64) as usize]
    }

    /// Largest componentwise relative deviation from `other`, measured
    /// against the largest component modulus of `other`.
    pub fn rel_diff(&self, other: &WhittakerValue) -> f64 {
        let scale = other.comps.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let diff = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

/// A vector of `V_l = Sym^{2l}`: entry `v + l` is the coefficient of the
/// monomial `x^{l+v} y^{l-v}`.
#[derive(Clone, Debug, PartialEq)]
pub struct VlVector {
    pub ell: usize,
    pub coeffs: Vec<C>,
}

impl VlVector {
    pub fn zero(ell: usize) -> Self {
        VlVector { ell, coeffs: vec![C::zero(); 2 * ell + 1] }
    }

    pub fn get(&self, v: i64) -> C {
        self.coeffs[(v + self.ell as i64) as usize]
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    fn add_assign(&mut self, other: &VlVector) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn diff_norm(&self, other: &VlVector) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("K-Bessel argument must be positive, got {x}")))
    }
}

/// `K_{n+1/2}(x)` from the terminating expansion.
pub fn bessel_k_half(n: u32, x: f64) -> Result<f64> {
    check_x(x)?;
    let n = n as i64;
    let mut sum = 0.0;
    // term_k = (n+k)! / (k! (n-k)! (2x)^k), built by the ratio of successive terms.
    let mut term = 1.0;
    for k in 0..=n {
        sum += term;
        term *= ((n + k + 1) * (n - k)) as f64 / ((k + 1) as f64 * 2.0 * x);
    }
    Ok((PI / (2.0 * x)).sqrt() * (-x).exp() * sum)
}

fn k_integrand(x: f64, nu: f64, t: f64) -> f64 {
    (nu * t - x * t.cosh()).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp())
}

fn log_integrand(x: f64, nu: f64, t: f64) -> f64 {
    nu * t - x * t.cosh()
}

/// Split point and truncation point for `int_0^inf e^{-x cosh t} cosh(nu t) dt`.
fn k_range(x: f64, nu: f64) -> (f64, f64) {
    let peak = if nu > x { (nu / x).asinh() } else { 0.0 };
    let top = log_integrand(x, nu, peak);
    let mut end = peak + 1.0;
    while log_integrand(x, nu, end) > top - 46.0 {
        end += 0.5;
    }
    (peak, end)
}

/// Which quadrature rule evaluates integer-order K-Bessel functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    DoubleExponential,
    ClenshawCurtis,
}

/// `K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt` by quadrature.
pub fn bessel_k_quad(nu: f64, x: f64, rule: Rule) -> Result<f64> {
    check_x(x)?;
    let nu = nu.abs();
    let (peak, end) = k_range(x, nu);
    let scale = log_integrand(x, nu, peak).exp();
    let tol = scale * 1e-16;
    let f = |t: f64| k_integrand(x, nu, t);
    let piece = |a: f64, b: f64| -> f64 {
        if b <= a {
            return 0.0;
        }
        match rule {
            Rule::DoubleExponential => quadrature::double_exponential::integrate(f, a, b, tol).integral,
            Rule::ClenshawCurtis => quadrature::clenshaw_curtis::integrate(f, a, b, tol).integral,
        }
    };
    let width = (end - peak).max(peak);
    let steps = (width / 2.0).ceil().max(1.0) as usize;
    let mut total = 0.0;
    for (a, b) in [(0.0, peak), (peak, end)] {
        let h = (b - a) / steps as f64;
        for i in 0..steps {
            total += piece(a + i as f64 * h, a + (i + 1) as f64 * h);
        }
    }
    Ok(total)
}

/// `K_nu(x)` for integer or half-integer `nu = twice_nu / 2`: the closed form
/// for half-integers and quadrature for integers.
pub fn bessel_k(twice_nu: i64, x: f64) -> Result<f64> {
    check_x(x)?;
    let t = twice_nu.unsigned_abs();
    if t % 2 == 1 {
        bessel_k_half(((t - 1) / 2) as u32, x)
    } else {
        bessel_k_quad((t / 2) as f64, x, Rule::DoubleExponential)
    }
}

/// `K_0(x), ..., K_n(x)` from `K_0` and `K_1` by the upward recurrence
/// `K_{v+1} = K_{v-1} + (2v / x) K_v`.
pub fn bessel_k_sequence(n: usize, x: f64) -> Result<Vec<f64>> {
    let mut out = vec![bessel_k_quad(0.0, x, Rule::DoubleExponential)?];
    if n >= 1 {
        out.push(bessel_k_quad(1.0, x, Rule::DoubleExponential)?);
    }
    for v in 1..n {
        let next = out[v - 1] + 2.0 * v as f64 / x * out[v];
        out.push(next);
    }
    Ok(out)
}

/// `beta_{[T1,T2]}(r) = sqrt2 i (T1' + i T2', v1 + i v2)` with
/// `T_i' = sum_j m_ji h^-1 T_j`, `v1 = y0 / sqrt2` and `v2 = y1 / sqrt2`.
pub fn beta_fn(t1: &V22, t2: &V22, r: &LeviPoint) -> C {
    let hv = h_times_v(&r.h);
    let z = pair22c(t1, &hv);
    let w = pair22c(t2, &hv);
    beta_from(z, w, &r.m)
}

/// `h (v1 + i v2)`.
fn h_times_v(h: &[[f64; 4]; 4]) -> [C; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    std::array::from_fn(|i| C::new(s * (h[i][0] + h[i][3]), s * (h[i][1] + h[i][2])))
}

fn beta_from(z: C, w: C, m: &[[f64; 2]; 2]) -> C {
    let a = C::new(m[0][0], m[0][1]);
    let g = C::new(m[1][0], m[1][1]);
    C::new(0.0, std::f64::consts::SQRT_2) * (a * z + g * w)
}

/// The generalized Whittaker function
/// `det(m)^l |det m| sum_v (beta / |beta|)^v K_v(|beta|)`.
pub fn whittaker_eval(t1: &V22, t2: &V22, r: &LeviPoint, ell: usize) -> Result<WhittakerValue> {
    let b = beta_fn(t1, t2, r);
    whittaker_from_beta(b, r.det_m(), ell)
}

fn whittaker_from_beta(b: C, det: f64, ell: usize) -> Result<WhittakerValue> {
    let modulus = b.norm();
    if modulus < 1e-14 {
        return Err(Error::Degenerate(format!("|beta| = {modulus:e}")));
    }
    let ks = bessel_k_sequence(ell, modulus)?;
    let phase = b / modulus;
    let pre = det.powi(ell as i32) * det.abs();
    let comps = (-(ell as i64)..=ell as i64)
        .map(|v| phase.powi(v as i32) * (pre * ks[v.unsigned_abs() as usize]))
        .collect();
    Ok(WhittakerValue { ell, comps })
}

fn binom_q(n: u64, k: u64) -> Q {
    let mut r = Q::one();
    for i in 0..k {
        r = r * q((n - i) as i64) / q((i + 1) as i64);
    }
    r
}

fn fact_q(n: u64) -> Q {
    (1..=n).fold(Q::one(), |acc, i| acc * q(i as i64))
}

/// Exact Laurent coefficients `c_e` with
/// `S_v(X) = pi e^{-X} i^v sum_e c_e X^{-e}`, obtained by expanding every
/// half-integer K-Bessel function in the sum.
pub fn s_v_laurent(v: i64) -> Vec<Q> {
    let a = v.unsigned_abs();
    let fact: Vec<Q> = std::iter::once(Q::one())
        .chain((1..=2 * a + 1).scan(Q::one(), |acc, i| {
            *acc = &*acc * q(i as i64);
            Some(acc.clone())
        }))
        .collect();
    let pow2: Vec<Q> = (0..=a + 1).map(|k| crate::arith::qpow(&q(2), k as i64)).collect();
    let mut coeffs: Vec<Q> = Vec::new();
    for k in 0..=a / 2 {
        // Order |v| - k - 1/2 = n + 1/2; the order -1/2 term uses K_{1/2}.
        let n = if a == 0 { 0 } else { a - k - 1 } as usize;
        let k = k as usize;
        let binom = &fact[a as usize] / (&fact[2 * k] * &fact[a as usize - 2 * k]);
        let mut outer = binom * &fact[2 * k] / (&pow2[k + 1] * &fact[k]);
        if k % 2 == 1 {
            outer = -outer;
        }
        for j in 0..=n {
            let inner = &fact[n + j] / (&fact[j] * &fact[n - j] * &pow2[j]);
            let e = k + j;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, Q::zero());
            }
            coeffs[e] += &outer * &inner;
        }
    }
    coeffs
}

fn i_pow(v: i64) -> C {
    match v.rem_euclid(4) {
        0 => C::new(1.0, 0.0),
        1 => C::new(0.0, 1.0),
        2 => C::new(-1.0, 0.0),
        _ => C::new(0.0, -1.0),
    }
}

fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// `S_v(X) = sum_k binom(|v|, 2k) (i sgn(v) X)^{|v|-2k} 2^{(2k-1)/2}
/// Gamma((2k+1)/2) X^{(2k+1)/2 - |v|} K_{|v|-(2k+1)/2}(X)`, evaluated
/// through the exact expansion of the half-integer K-Bessel functions so
/// that the large cancelling terms do not lose precision.
pub fn s_v_sum(v: i64, x: f64) -> Result<C> {
    check_x(x)?;
    let coeffs = s_v_laurent(v);
    let mut poly = 0.0;
    for c in coeffs.iter().rev() {
        poly = poly / x + q_to_f64(c);
    }
    Ok(i_pow(v) * (PI * (-x).exp() * poly))
}

/// The same sum evaluated term by term in floating point.
pub fn s_v_sum_direct(v: i64, x: f64) -> Result<C> {
    check_x(x)?;
    let a = v.unsigned_abs();
    let sg = if v < 0 { -1.0 } else { 1.0 };
    let mut total = C::zero();
    for k in 0..=a / 2 {
        let p = (a - 2 * k) as i32;
        let base = C::new(0.0, sg * x).powi(p);
        let gamma = q_to_f64(&(fact_q(2 * k) / (crate::arith::qpow(&q(4), k as i64) * fact_q(k)))) * PI.sqrt();
        let order2 = 2 * a as i64 - 2 * k as i64 - 1;
        let kv = bessel_k(order2, x)?;
        let coef = q_to_f64(&binom_q(a, 2 * k)) * 2f64.powf((2 * k) as f64 / 2.0 - 0.5) * gamma
            / x.powf(a as f64 - k as f64 - 0.5);
        total += base * (coef * kv);
    }
    Ok(total)
}

/// `sum_{k=0}^m (-1)^k binom(m, k) F(k)` for the polynomial `F` with the
/// given coefficients (constant term first).
pub fn alternating_binomial_sum(m: u64, poly: &[Q]) -> Q {
    let mut total = Q::zero();
    for k in 0..=m {
        let mut fk = Q::zero();
        for c in poly.iter().rev() {
            fk = fk * q(k as i64) + c;
        }
        let term = binom_q(m, k) * fk;
        if k % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Parameters of the archimedean Fourier-Jacobi integral along
/// `exp(s b1 ^ b-2) (t, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArchimedeanInput {
    pub t_vec: V22,
    pub t: f64,
    pub u: [[f64; 4]; 4],
    pub ell: usize,
}

fn apply4(h: &[[f64; 4]; 4], x: &V22) -> V22 {
    std::array::from_fn(|i| (0..4).map(|j| h[i][j] * x[j]).sum())
}

/// Integrates `W_{[y0, T]}(exp(s b1 ^ b-2)(t, u))` over `s` numerically and
/// returns it with the closed form `pi t^l e^{-(2 - t(T, u y1))} / 2 * i^v`.
pub fn archimedean_integral_check(input: &ArchimedeanInput) -> Result<(WhittakerValue, WhittakerValue)> {
    let ArchimedeanInput { t_vec, t, u, ell } = input;
    let (t, ell) = (*t, *ell);
    if pair22(t_vec, t_vec) <= 0.0 || pair22(t_vec, &Y0).abs() > 1e-12 {
        return Err(Error::HypothesisViolated("T must be positive and orthogonal to y0".into()));
    }
    if t <= 0.0 {
        return Err(Error::HypothesisViolated("t must be positive".into()));
    }
    let big_x = 2.0 - t * pair22(t_vec, &apply4(u, &Y1));
    if big_x <= 0.0 {
        return Err(Error::HypothesisViolated(format!("2 - t(T, u y1) = {big_x} is not positive")));
    }
    let n = 2 * ell + 1;
    // Every component is integrated with the same nodes, so values are
    // memoized by node position.
    let cache: RefCell<HashMap<u64, Vec<C>>> = RefCell::new(HashMap::new());
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let eval = |s: f64, idx: usize, im: bool| -> f64 {
        let mut c = cache.borrow_mut();
        let comps = c.entry(s.to_bits()).or_insert_with(|| {
            match whittaker_eval(&Y0, t_vec, &heisenberg_path(s, t, *u), ell) {
                Ok(w) => w.comps,
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    vec![C::zero(); n]
                }
            }
        });
        if im {
            comps[idx].im
        } else {
            comps[idx].re
        }
    };
    // |beta| = sqrt(4 s^2 t^2 + X^2); the integrand decays like e^{-|beta|}.
    let s_max = (big_x + 60.0) / (2.0 * t);
    let knots: Vec<f64> = {
        let scale = (big_x / (2.0 * t)).max(1e-3);
        let mut k = vec![0.0];
        let mut x = scale;
        while x < s_max {
            k.push(x);
            x *= 2.0;
        }
        k.push(s_max);
        k
    };
    let mut total = vec![C::zero(); n];
    let peak = (-big_x).exp() * t.powi(ell as i32 + 1);
    let tol = peak * 1e-14;
    for win in knots.windows(2) {
        for sign in [1.0, -1.0] {
            let (a, b) = (sign * win[0], sign * win[1]);
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            for (idx, slot) in total.iter_mut().enumerate() {
                let re = quadrature::double_exponential::integrate(|s| eval(s, idx, false), a, b, tol).integral;
                let im = quadrature::double_exponential::integrate(|s| eval(s, idx, true), a, b, tol).integral;
                *slot += C::new(re, im);
            }
        }
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let closed_mod = PI * t.powi(ell as i32) * (-big_x).exp() / 2.0;
    let closed = (-(ell as i64)..=ell as i64).map(|v| i_pow(v) * closed_mod).collect();
    Ok((WhittakerValue { ell, comps: total }, WhittakerValue { ell, comps: closed }))
}

/// A real `8 x 8` matrix acting on `V` in the basis `b1, ..., b-1`.
pub type Mat8 = [[f64; 8]; 8];

pub fn mat8_identity() -> Mat8 {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))
}

pub fn mat8_mul(a: &Mat8, b: &Mat8) -> Mat8 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..8).map(|k| a[i][k] * b[k][j]).sum()))
}

fn mat8_apply(a: &Mat8, x: &[f64; 8]) -> [f64; 8] {
    std::array::from_fn(|i| (0..8).map(|k| a[i][k] * x[k]).sum())
}

/// The inverse `J g^t J` of an isometry, with `J` the split Gram matrix.
pub fn so_inverse(g: &Mat8) -> Mat8 {
    std::array::from_fn(|i| std::array::from_fn(|j| g[7 - j][7 - i]))
}

/// The matrix of `x ^ y`, acting by `w -> (y, w) x - (x, w) y`.
pub fn wedge_matrix(x: &[f64; 8], y: &[f64; 8]) -> Mat8 {
    std::array::from_fn(|i| std::array::from_fn(|j| x[i] * y[7 - j] - y[i] * x[7 - j]))
}

/// `exp(a)` by scaling and squaring with a Taylor polynomial.
pub fn mat8_exp(a: &Mat8) -> Mat8 {
    let norm: f64 = a.iter().flatten().map(|x| x.abs()).sum();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale /= 2.0;
        squarings += 1;
    }
    let small: Mat8 = std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] * scale));
    let mut result = mat8_identity();
    let mut term = mat8_identity();
    for k in 1..=20 {
        term = mat8_mul(&term, &small);
        for i in 0..8 {
            for j in 0..8 {
                term[i][j] /= k as f64;
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mat8_mul(&result, &result);
    }
    result
}

/// `exp(theta (u1 ^ u2 + v1 ^ v2))` for the orthonormal positive vectors
/// `u_j = (b_j + b_-j) / sqrt2` and `v_j = (b_{j+2} + b_{-j-2}) / sqrt2`.
pub fn compact_torus(theta: f64) -> Mat8 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let e = |i: usize| -> [f64; 8] {
        let mut x = [0.0; 8];
        x[i] = s;
        x[7 - i] = s;
        x
    };
    let a = wedge_matrix(&e(0), &e(1));
    let b = wedge_matrix(&e(2), &e(3));
    let sum: Mat8 = std::array::from_fn(|i| std::array::from_fn(|j| theta * (a[i][j] + b[i][j])));
    mat8_exp(&sum)
}

struct PrKData {
    /// Nonzero entries `(i, j, E_ji)` of each basis matrix, so that
    /// `tr(M E) = sum M_ij E_ji`.
    sparse: [Vec<(usize, usize, C)>; 3],
    gram_inv: [[C; 3]; 3],
}

fn prk_data() -> &'static PrKData {
    static DATA: OnceLock<PrKData> = OnceLock::new();
    DATA.get_or_init(|| {
        let basis = su2_triple().map(|b| {
            biv_matrix(&b)
                .into_iter()
                .flatten()
                .map(|z| {
                    let (re, im) = z.to_f64();
                    C::new(re, im)
                })
                .collect::<Vec<C>>()
        });
        let tr = |x: &[C], y: &[C]| -> C {
            let mut s = C::zero();
            for i in 0..8 {
                for j in 0..8 {
                    s += x[i * 8 + j] * y[j * 8 + i];
                }
            }
            s
        };
        let g: [[C; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| tr(&basis[i], &basis[j])));
        let sparse = std::array::from_fn(|b| {
            let mut v = Vec::new();
            for i in 0..8 {
                for j in 0..8 {
                    let e = basis[b][j * 8 + i];
                    if e != C::zero() {
                        v.push((i, j, e));
                    }
                }
            }
            v
        });
        PrKData { gram_inv: invert3(&g), sparse }
    })
}

fn invert3(m: &[[C; 3]; 3]) -> [[C; 3]; 3] {
    let cof = |i: usize, j: usize| -> C {
        let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
        let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
        let d = m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]];
        if (i + j).is_multiple_of(2) {
            d
        } else {
            -d
        }
    };
    let det: C = (0..3).map(|j| m[0][j] * cof(0, j)).sum();
    std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i) / det))
}

/// Floating-point projection to the distinguished `su(2)`, written as
/// `(c_xx, c_xy, c_yy)` in the coordinates `e+ = -x^2`, `h+ = 2xy`,
/// `f+ = y^2`.
pub fn pr_k_float(x: &Mat8) -> [C; 3] {
    let d = prk_data();
    let rhs: [C; 3] = std::array::from_fn(|b| d.sparse[b].iter().map(|&(i, j, e)| e * x[i][j]).sum());
    let c: [C; 3] = std::array::from_fn(|i| (0..3).map(|j| d.gram_inv[i][j] * rhs[j]).sum());
    [-c[0], c[1] * 2.0, c[2]]
}

/// [`pr_k_float`] of `x ^ y` without forming the matrix.
pub fn pr_k_wedge(x: &[f64; 8], y: &[f64; 8]) -> [C; 3] {
    let d = prk_data();
    let rhs: [C; 3] = std::array::from_fn(|b| {
        d.sparse[b].iter().map(|&(i, j, e)| e * (x[i] * y[7 - j] - y[i] * x[7 - j])).sum()
    });
    let c: [C; 3] = std::array::from_fn(|i| (0..3).map(|j| d.gram_inv[i][j] * rhs[j]).sum());
    [-c[0], c[1] * 2.0, c[2]]
}

/// The invariant norm `sqrt(|a|^2 + |b|^2 / 2 + |c|^2)` on `Sym^2`.
pub fn sym2_norm(s: &[C; 3]) -> f64 {
    (s[0].norm_sqr() + s[1].norm_sqr() / 2.0 + s[2].norm_sqr()).sqrt()
}

fn sym2_power_float(s: &[C; 3], ell: usize) -> Vec<C> {
    let base = [s[2], s[1], s[0]];
    let mut acc = vec![C::one()];
    for _ in 0..ell {
        let mut next = vec![C::zero(); acc.len() + 2];
        for (i, a) in acc.iter().enumerate() {
            for (k, b) in base.iter().enumerate() {
                next[i + k] += a * b;
            }
        }
        acc = next;
    }
    acc
}

/// `B_{[v1,v2]}(g) = pr_K(Ad(g^-1) v1 ^ v2)^l / |pr_K(Ad(g^-1) v1 ^ v2)|^{2l+1}`.
pub fn bvv(v1: &[f64; 8], v2: &[f64; 8], g: &Mat8, ell: usize) -> Result<VlVector> {
    let gi = so_inverse(g);
    let w1 = mat8_apply(&gi, v1);
    let w2 = mat8_apply(&gi, v2);
    let p = pr_k_wedge(&w1, &w2);
    let n = sym2_norm(&p);
    if n < 1e-12 {
        return Err(Error::Degenerate(format!("projection norm {n:e}")));
    }
    let denom = n.powi(2 * ell as i32 + 1);
    let coeffs = sym2_power_float(&p, ell).into_iter().map(|c| c / denom).collect();
    Ok(VlVector { ell, coeffs })
}

/// Result of a truncated Poincare sum.
#[derive(Clone, Debug, PartialEq)]
pub struct PoincareSum {
    pub value: VlVector,
    /// Norm of the contribution of pairs whose largest entry equals the radius.
    pub last_shell: f64,
    /// Number of pairs summed.
    pub terms: usize,
}

fn vectors_with_q(qv: i64, radius: i64) -> Vec<[i64; 8]> {
    let mut out = Vec::new();
    let side = 2 * radius + 1;
    let total = (side as u64).pow(8);
    for idx in 0..total {
        let mut rem = idx;
        let mut v = [0i64; 8];
        for c in v.iter_mut() {
            *c = (rem % side as u64) as i64 - radius;
            rem /= side as u64;
        }
        let qq: i64 = (0..4).map(|p| v[p] * v[7 - p]).sum();
        if qq == qv {
            out.push(v);
        }
    }
    out
}

fn int_pair(x: &[i64; 8], y: &[i64; 8]) -> i64 {
    (0..8).map(|p| x[p] * y[7 - p]).sum()
}

/// Truncation `sum B_{[v1,v2]}(g)` over integral pairs with
/// `S([v1,v2]) = T` and entries bounded by `radius`.
pub fn q_poincare(t: &GramTriple, ell: usize, g: &Mat8, radius: i64) -> Result<PoincareSum> {
    if ell < 16 || !ell.is_multiple_of(2) {
        return Err(Error::HypothesisViolated("the Poincare sum needs even l >= 16".into()));
    }
    if !t.is_pos_def() {
        return Err(Error::Invalid(format!("{t} is not positive definite")));
    }
    let mut value = VlVector::zero(ell);
    let mut shell = VlVector::zero(ell);
    let mut terms = 0;
    if radius < 1 {
        return Ok(PoincareSum { value, last_shell: 0.0, terms });
    }
    let first = vectors_with_q(t.a, radius);
    let second = if t.c == t.a { first.clone() } else { vectors_with_q(t.c, radius) };
    let to_f = |v: &[i64; 8]| -> [f64; 8] { std::array::from_fn(|i| v[i] as f64) };
    let sup = |v: &[i64; 8]| v.iter().map(|x| x.abs()).max().unwrap_or(0);
    for x in &first {
        for y in &second {
            if int_pair(x, y) != t.b {
                continue;
            }
            let b = bvv(&to_f(x), &to_f(y), g, ell)?;
            value.add_assign(&b);
            if sup(x).max(sup(y)) == radius {
                shell.add_assign(&b);
            }
            terms += 1;
        }
    }
    Ok(PoincareSum { value, last_shell: shell.norm(), terms })
}

/// Which ordering of a pair has nonvanishing beta on the identity component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Positivity {
    Positive,
    Swapped,
    Degenerate,
}

fn rotation_pos(theta: f64) -> [[f64; 4]; 4] {
    // Rotation of (v1, v2) with v1 = (b3 + b-3)/sqrt2, v2 = (b4 + b-4)/sqrt2,
    // fixing v-1 and v-2.
    plane_map(theta, true)
}

fn rotation_neg(theta: f64) -> [[f64; 4]; 4] {
    plane_map(theta, false)
}

fn boosts(s1: f64, s2: f64) -> [[f64; 4]; 4] {
    // b3 -> e^{s1} b3, b-3 -> e^{-s1} b-3 and likewise for b4 with s2.
    let mut h = [[0.0; 4]; 4];
    h[0][0] = s1.exp();
    h[3][3] = (-s1).exp();
    h[1][1] = s2.exp();
    h[2][2] = (-s2).exp();
    h
}

fn plane_map(theta: f64, positive: bool) -> [[f64; 4]; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let sign = if positive { 1.0 } else { -1.0 };
    // Orthonormal-up-to-sign basis e1 = (b3 + sign b-3)/sqrt2, e2 = (b4 + sign b-4)/sqrt2.
    let e1 = [s, 0.0, 0.0, sign * s];
    let e2 = [0.0, s, sign * s, 0.0];
    let (c, sn) = (theta.cos(), theta.sin());
    let mut h = LeviPoint::identity().h;
    // h = I + (c - 1)(e1 e1* + e2 e2*) + sn (e2 e1* - e1 e2*), where e* is the
    // dual functional x -> sign (e, x).
    let dual = |e: &V22| -> V22 {
        let basis: [V22; 4] = std::array::from_fn(|j| {
            let mut x = [0.0; 4];
            x[j] = 1.0;
            x
        });
        std::array::from_fn(|j| sign * pair22(e, &basis[j]))
    };
    let d1 = dual(&e1);
    let d2 = dual(&e2);
    for i in 0..4 {
        for j in 0..4 {
            h[i][j] += (c - 1.0) * (e1[i] * d1[j] + e2[i] * d2[j]) + sn * (e2[i] * d1[j] - e1[i] * d2[j]);
        }
    }
    h
}

fn mat4_mul(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
}

/// Elements `k a k'` of `SO(2,2)^0` on a grid, with the right factor dropped
/// because it only rotates `v1 + i v2` by a phase.
pub fn so22_grid(angles: usize, rapidities: &[f64]) -> Vec<[[f64; 4]; 4]> {
    let mut out = Vec::new();
    for i in 0..angles {
        let th = PI * 2.0 * i as f64 / angles as f64;
        for j in 0..angles {
            let ps = PI * 2.0 * j as f64 / angles as f64;
            let k = mat4_mul(&rotation_pos(th), &rotation_neg(ps));
            for &s1 in rapidities {
                for &s2 in rapidities {
                    out.push(mat4_mul(&k, &boosts(s1, s2)));
                }
            }
        }
    }
    out
}

/// Symmetric 2x2 eigenvectors `(top, bottom)` for the largest and
/// smallest eigenvalue.
fn eigvecs2(g: [[f64; 2]; 2]) -> ([f64; 2], [f64; 2]) {
    let half = 0.5 * (g[0][0] - g[1][1]);
    let r = (half * half + g[0][1] * g[0][1]).sqrt();
    let top_val = 0.5 * (g[0][0] + g[1][1]) + r;
    let top = if g[0][1].abs() > 1e-300 {
        [g[0][1], top_val - g[0][0]]
    } else if g[0][0] >= g[1][1] {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let n = top[0].hypot(top[1]);
    let top = [top[0] / n, top[1] / n];
    (top, [-top[1], top[0]])
}

fn comb(a: f64, x: &V22, b: f64, y: &V22) -> V22 {
    std::array::from_fn(|i| a * x[i] + b * y[i])
}

/// Candidate points `Z = X + iY` of the orbit of `v1 + i v2` near the
/// zero locus of an indefinite pair: `X` is positive in `W = <T1, T2>`
/// and `Y` tilts a positive vector of `W^perp` by `+-eps` towards the
/// negative direction of `W`, so that `Im(-z / w)` takes both signs.
fn indefinite_candidates(t1: &V22, t2: &V22) -> Vec<[C; 4]> {
    let g = [[pair22(t1, t1), pair22(t1, t2)], [pair22(t2, t1), pair22(t2, t2)]];
    if g[0][0] * g[1][1] - g[0][1] * g[0][1] >= 0.0 {
        return Vec::new();
    }
    let (up, un) = eigvecs2(g);
    let p = comb(up[0], t1, up[1], t2);
    let n = comb(un[0], t1, un[1], t2);
    // Euclidean basis of W^perp from the rows of the functionals (T_i, .).
    let j = |t: &V22| -> [f64; 4] { [t[3], t[2], t[1], t[0]] };
    let mut rows: Vec<[f64; 4]> = Vec::new();
    for r in [j(t1), j(t2)] {
        let mut r = r;
        for b in &rows {
            let d: f64 = (0..4).map(|i| r[i] * b[i]).sum();
            r = std::array::from_fn(|i| r[i] - d * b[i]);
        }
        let nr = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        rows.push(r.map(|x| x / nr));
    }
    let mut perp: Vec<[f64; 4]> = Vec::new();
    for k in 0..4 {
        let mut e = [0.0; 4];
        e[k] = 1.0;
        for b in rows.iter().chain(perp.iter()) {
            let d: f64 = (0..4).map(|i| e[i] * b[i]).sum();
            e = std::array::from_fn(|i| e[i] - d * b[i]);
        }
        let ne = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        if ne > 1e-6 && perp.len() < 2 {
            perp.push(e.map(|x| x / ne));
        }
    }
    let (a, b) = (perp[0], perp[1]);
    let (uq, _) = eigvecs2([[pair22(&a, &a), pair22(&a, &b)], [pair22(&b, &a), pair22(&b, &b)]]);
    let qv = comb(uq[0], &a, uq[1], &b);
    let x = p.map(|c| c / pair22(&p, &p).sqrt());
    let qn = qv.map(|c| c / pair22(&qv, &qv).sqrt());
    let nn = n.map(|c| c / (-pair22(&n, &n)).sqrt());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (v1, v2) = (Y0.map(|c| c * s), Y1.map(|c| c * s));
    let mut out = Vec::new();
    for eps in [-0.7, -0.3, 0.3, 0.7] {
        let y = comb(1.0, &qn, eps, &nn).map(|c| c / (1.0 - eps * eps).sqrt());
        let orient = pair22(&x, &v1) * pair22(&y, &v2) - pair22(&x, &v2) * pair22(&y, &v1);
        let y = if orient < 0.0 { y.map(|c| -c) } else { y };
        out.push(std::array::from_fn(|i| C::new(x[i], y[i])));
    }
    out
}

/// Samples `|beta|` for both orderings of `lambda = [T1, T2]` over a grid
/// of `SO(2,2)^0`, together with targeted points near the zero locus of
/// indefinite pairs. For fixed `h`, `beta_{[T1,T2]}((m, h)) = 0` for some
/// `m` with `det m > 0` exactly when `Im(-z / w) > 0`, where
/// `z = (T1, h(v1 + i v2))` and `w = (T2, h(v1 + i v2))`; that zero is
/// located at `m = [[1, 0], [Re(-z/w), Im(-z/w)]]` and evaluated.
pub fn positivity_oracle(l: &IndexPair) -> Result<Positivity> {
    let t1 = mat_to_v22(&l.t1);
    let t2 = mat_to_v22(&l.t2);
    let rap = [-2.0, -1.0, -0.3, 0.0, 0.3, 1.0, 2.0];
    let mut points: Vec<[C; 4]> = so22_grid(12, &rap).iter().map(h_times_v).collect();
    points.extend(indefinite_candidates(&t1, &t2));
    let tol = 1e-8;
    let mut dips = [false, false];
    for hv in &points {
        let z = pair22c(&t1, hv);
        let w = pair22c(&t2, hv);
        for (k, (a, b)) in [(z, w), (w, z)].into_iter().enumerate() {
            if dips[k] {
                continue;
            }
            let scale = a.norm().max(b.norm());
            if scale < tol {
                dips[k] = true;
                continue;
            }
            if b.norm() < tol * scale {
                continue;
            }
            let gamma = -a / b;
            if gamma.im > 0.0 {
                let m = [[1.0, 0.0], [gamma.re, gamma.im]];
                if beta_from(a, b, &m).norm() < tol * scale {
                    dips[k] = true;
                }
            }
        }
    }
    match dips {
        [false, true] => Ok(Positivity::Positive),
        [true, false] => Ok(Positivity::Swapped),
        [true, true] => {
            if crate::coset::gram(l).is_pos_def() {
                Err(Error::Inconclusive("both orderings vanish on the grid".into()))
            } else {
                Ok(Positivity::Degenerate)
            }
        }
        [false, false] => Err(Error::Inconclusive("neither ordering vanishes on the grid".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::{breve, fj_pair};

    #[test]
    fn half_integer_bessel() {
        let k = bessel_k(1, 1.0).unwrap();
        assert!((k - (PI / 2.0).sqrt() * (-1f64).exp()).abs() < 1e-15);
        assert_eq!(bessel_k(-3, 2.0).unwrap(), bessel_k(3, 2.0).unwrap());
        for n in [0u32, 1, 5, 14] {
            for x in [0.05, 0.7, 3.0, 20.0, 50.0] {
                let exact = bessel_k_half(n, x).unwrap();
                let quad = bessel_k_quad(n as f64 + 0.5, x, Rule::DoubleExponential).unwrap();
                assert!(((exact - quad) / exact).abs() < 1e-10, "n={n} x={x}");
            }
        }
        assert!(bessel_k(2, 0.0).is_err());
        assert!(bessel_k(1, -1.0).is_err());
    }

    #[test]
    fn integer_bessel_rules_agree() {
        let k1 = bessel_k(2, 1.0).unwrap();
        assert!((k1 - 0.601_907_230_197_234_6).abs() < 1e-13);
        for nu in [0.0, 1.0, 7.0, 30.0] {
            for x in [0.05, 1.0, 10.0, 50.0] {
                let a = bessel_k_quad(nu, x, Rule::DoubleExponential).unwrap();
                let b = bessel_k_quad(nu, x, Rule::ClenshawCurtis).unwrap();
                assert!(((a - b) / a).abs() < 1e-12, "nu={nu} x={x}");
            }
        }
        assert_eq!(bessel_k(-4, 1.3).unwrap(), bessel_k(4, 1.3).unwrap());
        let seq = bessel_k_sequence(12, 2.5).unwrap();
        for (v, kv) in seq.iter().enumerate() {
            let direct = bessel_k(2 * v as i64, 2.5).unwrap();
            assert!(((kv - direct) / direct).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_examples() {
        let id = LeviPoint::identity();
        assert!((beta_fn(&Y1, &Y0, &id) - C::new(-4.0, 0.0)).norm() < 1e-14);
        assert!(beta_fn(&Y0, &Y1, &id).norm() < 1e-14);
    }

    #[test]
    fn beta_along_heisenberg_path() {
        for &g in &[0.0, 0.4, -0.7] {
            let tv = [g, -1.0, -1.0, -g];
            for &theta in &[0.0, 0.5, -1.2] {
                let u = boost_y1(theta);
                for &t in &[0.3, 1.0, 2.5] {
                    for &s in &[-2.0, 0.0, 0.7, 3.0] {
                        let b = beta_fn(&Y0, &tv, &heisenberg_path(s, t, u));
                        let w = t * pair22(&tv, &apply4(&u, &Y1));
                        let expect = C::new(-2.0 * s * t, 2.0 - w);
                        assert!((b - expect).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn whittaker_phases() {
        let b = C::new(0.0, 1.7);
        let w = whittaker_from_beta(b, 1.0, 4).unwrap();
        for v in -4..=4i64 {
            let k = bessel_k(2 * v, 1.7).unwrap();
            assert!((w.get(v) - i_pow(v) * k).norm() < 1e-12);
        }
        let rotated = whittaker_from_beta(b * C::from_polar(1.0, 0.3), 1.0, 4).unwrap();
        for v in 1..=4i64 {
            let a = rotated.get(v) / w.get(v);
            let c = rotated.get(-v) / w.get(-v);
            assert!((a * c - C::one()).norm() < 1e-12);
            assert!((a - C::from_polar(1.0, 0.3 * v as f64)).norm() < 1e-12);
        }
        assert!(matches!(whittaker_from_beta(C::zero(), 1.0, 2), Err(Error::Degenerate(_))));
    }

    #[test]
    fn whittaker_det_scaling() {
        let r = LeviPoint { m: [[1.0, 0.2], [0.1, 1.3]], h: boost_y1(0.4) };
        let mut r2 = r.clone();
        r2.m = [[2.0, 0.4], [0.2, 2.6]];
        r.validate().unwrap();
        let tv = [0.2, -1.0, -1.0, -0.2];
        let w1 = whittaker_eval(&Y1, &tv, &r, 3).unwrap();
        let w2 = whittaker_eval(&Y1, &tv, &r2, 3).unwrap();
        let b1 = beta_fn(&Y1, &tv, &r);
        let b2 = beta_fn(&Y1, &tv, &r2);
        assert!((b2 - b1 * 2.0).norm() < 1e-12);
        for v in -3..=3i64 {
            let k1 = bessel_k(2 * v, b1.norm()).unwrap();
            let k2 = bessel_k(2 * v, b2.norm()).unwrap();
            let ratio = w2.get(v) / w1.get(v);
            assert!((ratio - C::new(4f64.powi(3) * 4.0 * k2 / k1, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn levi_validation() {
        let mut r = LeviPoint::identity();
        r.h = boost_y1(0.3);
        assert!(r.validate().is_ok());
        r.h[0][1] = 0.5;
        assert!(r.validate().is_err());
        let bad = LeviPoint { m: [[0.0, 1.0], [1.0, 0.0]], ..LeviPoint::identity() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn s_v_identity() {
        let mut worst: f64 = 0.0;
        for v in -22..=22i64 {
            for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
                let s = s_v_sum(v, x).unwrap();
                let expect = i_pow(v) * (PI * (-x).exp() / 2.0);
                worst = worst.max((s - expect).norm() / (PI * (-x).exp() / 2.0));
            }
        }
        assert!(worst < 1e-10, "worst {worst}");
        let s0 = s_v_sum(0, 1.3).unwrap();
        assert!((s0.re - PI * (-1.3f64).exp() / 2.0).abs() < 1e-15);
        for v in 1..=10 {
            let a = s_v_sum(v, 0.8).unwrap();
            let b = s_v_sum(-v, 0.8).unwrap();
            let sign = if v % 2 == 0 { 1.0 } else { -1.0 };
            assert!((b - a * sign).norm() < 1e-14);
        }
    }

    #[test]
    fn direct_sum_matches_for_small_orders() {
        for v in -6..=6 {
            for x in [1.0, 3.0] {
                let a = s_v_sum(v, x).unwrap();
                let b = s_v_sum_direct(v, x).unwrap();
                assert!((a - b).norm() < 1e-9 * a.norm(), "v={v} x={x}");
            }
        }
    }

    #[test]
    fn alternating_sums_vanish() {
        for m in 1..=20u64 {
            for deg in 0..m {
                let poly: Vec<Q> = (0..=deg).map(|i| q((i as i64 * 7 + 3) % 11 - 5)).collect();
                assert!(alternating_binomial_sum(m, &poly).is_zero());
            }
        }
        let kth: Vec<Q> = vec![q(0), q(0), q(1)];
        assert_eq!(alternating_binomial_sum(2, &kth), q(2));
    }

    #[test]
    fn archimedean_integral_small() {
        let input = ArchimedeanInput { t_vec: [0.3, -1.0, -1.0, -0.3], t: 0.8, u: boost_y1(0.2), ell: 4 };
        let (num, closed) = archimedean_integral_check(&input).unwrap();
        assert!(num.rel_diff(&closed) < 1e-6, "{}", num.rel_diff(&closed));
        let m0 = closed.get(0).norm();
        for v in -4..=4i64 {
            assert!((closed.get(v).norm() - m0).abs() < 1e-14);
            assert!((closed.get(v) / m0 - i_pow(v)).norm() < 1e-14);
        }
        let bad = ArchimedeanInput { t_vec: Y0, ..input };
        assert!(archimedean_integral_check(&bad).is_err());
    }

    fn generic_g() -> Mat8 {
        let mut x = [0.0; 8];
        x[0] = 1.0;
        let mut y = [0.0; 8];
        y[2] = 1.0;
        let mut a = wedge_matrix(&x, &y);
        let mut z = [0.0; 8];
        z[5] = 1.0;
        let b = wedge_matrix(&y, &z);
        let mut w = [0.0; 8];
        w[1] = 1.0;
        w[6] = -1.0;
        let c = wedge_matrix(&w, &x);
        for i in 0..8 {
            for j in 0..8 {
                a[i][j] = 0.3 * a[i][j] - 0.2 * b[i][j] + 0.15 * c[i][j];
            }
        }
        mat8_exp(&a)
    }

    #[test]
    fn generic_element_is_isometry() {
        let g = generic_g();
        let gi = so_inverse(&g);
        let p = mat8_mul(&g, &gi);
        for i in 0..8 {
            for j in 0..8 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p[i][j] - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bvv_rotation_invariance() {
        let g = generic_g();
        let v1 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let v2 = [0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0];
        let b = bvv(&v1, &v2, &g, 3).unwrap();
        let th = 0.7f64;
        let r1: [f64; 8] = std::array::from_fn(|i| th.cos() * v1[i] + th.sin() * v2[i]);
        let r2: [f64; 8] = std::array::from_fn(|i| -th.sin() * v1[i] + th.cos() * v2[i]);
        let b2 = bvv(&r1, &r2, &g, 3).unwrap();
        assert!(b.diff_norm(&b2) < 1e-12 * b.norm());
        let id = bvv(&v1, &v2, &mat8_identity(), 3).unwrap();
        assert!(id.norm() > 0.0);
    }

    #[test]
    fn bvv_torus_equivariance() {
        let g = generic_g();
        let v1 = [1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let v2 = [0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        let ell = 3;
        let b = bvv(&v1, &v2, &g, ell).unwrap();
        let th = 0.37;
        let b2 = bvv(&v1, &v2, &mat8_mul(&g, &compact_torus(th)), ell).unwrap();
        for v in -(ell as i64)..=ell as i64 {
            let expect = b.get(v) * C::from_polar(1.0, 2.0 * v as f64 * th);
            assert!((b2.get(v) - expect).norm() < 1e-10 * b.norm(), "v={v}");
        }
    }

    #[test]
    fn poincare_sum_behaviour() {
        let t = GramTriple::new(1, 1, 1);
        let g = generic_g();
        let empty = q_poincare(&t, 16, &g, 0).unwrap();
        assert_eq!(empty.terms, 0);
        assert_eq!(empty.value.norm(), 0.0);
        assert!(q_poincare(&t, 15, &g, 1).is_err());
        let s = q_poincare(&t, 16, &g, 1).unwrap();
        assert!(s.terms > 0);
        // Swapping the hyperbolic planes (b1, b-1) and (b2, b-2) is an
        // integral isometry preserving the box.
        let mut gamma = [[0.0; 8]; 8];
        let perm = [1, 0, 2, 3, 4, 5, 7, 6];
        for (i, &p) in perm.iter().enumerate() {
            gamma[p][i] = 1.0;
        }
        let s2 = q_poincare(&t, 16, &mat8_mul(&gamma, &g), 1).unwrap();
        assert!(s.value.diff_norm(&s2.value) < 1e-9 * s.value.norm());
    }

    #[test]
    fn positivity_examples() {
        let y1 = IndexPair::new([[0, 1], [-1, 0]], [[1, 0], [0, 1]]);
        assert_eq!(mat_to_v22(&y1.t1), Y1);
        assert_eq!(mat_to_v22(&y1.t2), Y0);
        assert_eq!(positivity_oracle(&y1).unwrap(), Positivity::Positive);
        let swapped = IndexPair::new(y1.t2, y1.t1);
        assert_eq!(positivity_oracle(&swapped).unwrap(), Positivity::Swapped);
        for t in [GramTriple::new(1, 0, 1), GramTriple::new(2, 1, 3), GramTriple::new(1, 1, 6)] {
            assert_eq!(positivity_oracle(&breve(&t)).unwrap(), Positivity::Positive);
            assert_eq!(positivity_oracle(&fj_pair(&t)).unwrap(), Positivity::Positive);
        }
        let indefinite = IndexPair::new([[1, 0], [0, 1]], [[1, 0], [0, -1]]);
        assert_eq!(positivity_oracle(&indefinite).unwrap(), Positivity::Degenerate);
    }
}
