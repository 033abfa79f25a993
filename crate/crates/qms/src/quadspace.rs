//! The split eight-dimensional quadratic space `V`, its Lie algebra `^2 V`
//! acting on `V`, the Cartan involution and the projection onto the
//! distinguished `su(2)`.
//!
//! Coordinates are indexed by positions `0..8` standing for
//! `(b1, b2, b3, b4, b-4, b-3, b-2, b-1)`; position `p` pairs with `7 - p`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::arith::{q, qf, solve, Q};
use crate::error::{Error, Result};

/// Gaussian rational `re + i im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussRational {
    pub re: Q,
    pub im: Q,
}

impl GaussRational {
    pub fn new(re: Q, im: Q) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: Q) -> Self {
        GaussRational { re, im: Q::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRational { re: q(re), im: q(im) }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussRational::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        GaussRational { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `re^2 + im^2`.
    pub fn norm_sq(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, c: &Q) -> Self {
        GaussRational { re: &self.re * c, im: &self.im * c }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplicative inverse.
    ///
    /// # Panics
    /// Panics on zero.
    pub fn recip(&self) -> Self {
        let n = self.norm_sq();
        assert!(!n.is_zero(), "division by zero Gaussian rational");
        GaussRational { re: &self.re / &n, im: -&self.im / &n }
    }

    /// Lossy conversion to a floating-point complex pair.
    pub fn to_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
}

impl Zero for GaussRational {
    fn zero() -> Self {
        GaussRational { re: Q::zero(), im: Q::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRational {
    fn one() -> Self {
        GaussRational::real(Q::one())
    }
}

impl<'a> Add<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn add(self, o: &GaussRational) -> GaussRational {
        GaussRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn sub(self, o: &GaussRational) -> GaussRational {
        GaussRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn mul(self, o: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn div(self, o: &GaussRational) -> GaussRational {
        self * &o.recip()
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational { re: -self.re, im: -self.im }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussRational {
            type Output = GaussRational;
            fn $m(self, o: GaussRational) -> GaussRational {
                (&self).$m(&o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&GaussRational> for GaussRational {
    fn add_assign(&mut self, o: &GaussRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussRational> for GaussRational {
    fn sub_assign(&mut self, o: &GaussRational) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

/// Shorthand for a real Gaussian rational from an integer.
pub fn g(n: i64) -> GaussRational {
    GaussRational::from_ints(n, 0)
}

/// Signed index labels of the eight positions.
pub const LABELS: [i32; 8] = [1, 2, 3, 4, -4, -3, -2, -1];

/// Position of `b_i` for `i` in `{+-1, ..., +-4}`.
///
/// # Panics
/// Panics for labels outside that range.
pub fn pos(i: i32) -> usize {
    LABELS
        .iter()
        .position(|&l| l == i)
        .unwrap_or_else(|| panic!("no basis vector b_{i}"))
}

/// The position dual to `p` under the split form.
pub fn dual(p: usize) -> usize {
    7 - p
}

/// A vector of `V` over the Gaussian rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vector8 {
    pub coords: [GaussRational; 8],
}

impl Vector8 {
    pub fn new(coords: [GaussRational; 8]) -> Self {
        Vector8 { coords }
    }

    pub fn zero() -> Self {
        Vector8 { coords: std::array::from_fn(|_| GaussRational::zero()) }
    }

    /// The basis vector at position `p`.
    pub fn basis(p: usize) -> Self {
        let mut v = Vector8::zero();
        v.coords[p] = GaussRational::one();
        v
    }

    /// `b_i` by signed label.
    pub fn b(i: i32) -> Self {
        Vector8::basis(pos(i))
    }

    pub fn from_ints(c: [i64; 8]) -> Self {
        Vector8 { coords: c.map(g) }
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        Vector8 { coords: std::array::from_fn(|p| c * &self.coords[p]) }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

impl Add for &Vector8 {
    type Output = Vector8;
    fn add(self, o: &Vector8) -> Vector8 {
        Vector8 { coords: std::array::from_fn(|p| &self.coords[p] + &o.coords[p]) }
    }
}

impl Sub for &Vector8 {
    type Output = Vector8;
    fn sub(self, o: &Vector8) -> Vector8 {
        Vector8 { coords: std::array::from_fn(|p| &self.coords[p] - &o.coords[p]) }
    }
}

/// The symmetric bilinear form with `(b_i, b_-j) = delta_ij`.
pub fn pair(u: &Vector8, w: &Vector8) -> GaussRational {
    let mut s = GaussRational::zero();
    for p in 0..8 {
        s += &(&u.coords[p] * &w.coords[dual(p)]);
    }
    s
}

/// The quadratic form `q(x) = (x, x) / 2`.
pub fn quad(u: &Vector8) -> GaussRational {
    pair(u, u).scale(&qf(1, 2))
}

/// Square matrix over the Gaussian rationals, row-major.
pub type Mat = Vec<Vec<GaussRational>>;

/// Zero `n x n` matrix.
pub fn mat_zero(n: usize) -> Mat {
    vec![vec![GaussRational::zero(); n]; n]
}

/// Matrix product.
pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut c = vec![vec![GaussRational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    c[i][j] += &(&a[i][l] * &b[l][j]);
                }
            }
        }
    }
    c
}

/// Matrix trace.
pub fn mat_trace(a: &Mat) -> GaussRational {
    let mut s = GaussRational::zero();
    for (i, row) in a.iter().enumerate() {
        s += &row[i];
    }
    s
}

/// Matrix-vector product on `V`.
pub fn mat_apply(a: &Mat, w: &Vector8) -> Vector8 {
    Vector8 {
        coords: std::array::from_fn(|i| {
            let mut s = GaussRational::zero();
            for j in 0..8 {
                if !a[i][j].is_zero() && !w.coords[j].is_zero() {
                    s += &(&a[i][j] * &w.coords[j]);
                }
            }
            s
        }),
    }
}

/// Number of basis bivectors `b_p ^ b_q`, `p < q`.
pub const BIV_DIM: usize = 28;

/// Index of `b_p ^ b_q` (`p < q`) in the fixed lexicographic order.
pub fn biv_index(p: usize, qq: usize) -> usize {
    debug_assert!(p < qq && qq < 8);
    p * (15 - p) / 2 + (qq - p - 1)
}

/// The pair of positions of the basis bivector with index `k`.
pub fn biv_positions(k: usize) -> (usize, usize) {
    let mut idx = 0;
    for p in 0..8 {
        for qq in p + 1..8 {
            if idx == k {
                return (p, qq);
            }
            idx += 1;
        }
    }
    panic!("bivector index {k} out of range")
}

/// An element of `^2 V` stored by its 28 coefficients on `b_p ^ b_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bivector {
    pub coeffs: Vec<GaussRational>,
}

impl Bivector {
    pub fn zero() -> Self {
        Bivector { coeffs: vec![GaussRational::zero(); BIV_DIM] }
    }

    /// Basis bivector with index `k`.
    pub fn basis(k: usize) -> Self {
        let mut x = Bivector::zero();
        x.coeffs[k] = GaussRational::one();
        x
    }

    /// `b_i ^ b_j` by signed labels.
    pub fn bb(i: i32, j: i32) -> Self {
        wedge(&Vector8::b(i), &Vector8::b(j))
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        Bivector { coeffs: self.coeffs.iter().map(|x| c * x).collect() }
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        Bivector { coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Coefficient of `b_p ^ b_q` for arbitrary distinct positions.
    pub fn coeff(&self, p: usize, qq: usize) -> GaussRational {
        match p.cmp(&qq) {
            std::cmp::Ordering::Less => self.coeffs[biv_index(p, qq)].clone(),
            std::cmp::Ordering::Greater => -&self.coeffs[biv_index(qq, p)],
            std::cmp::Ordering::Equal => GaussRational::zero(),
        }
    }
}

impl Add for &Bivector {
    type Output = Bivector;
    fn add(self, o: &Bivector) -> Bivector {
        Bivector { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Bivector {
    type Output = Bivector;
    fn sub(self, o: &Bivector) -> Bivector {
        Bivector { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Bivector {
    type Output = Bivector;
    fn neg(self) -> Bivector {
        Bivector { coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

/// `u ^ w`.
pub fn wedge(u: &Vector8, w: &Vector8) -> Bivector {
    let mut x = Bivector::zero();
    for p in 0..8 {
        for qq in p + 1..8 {
            let c = &(&u.coords[p] * &w.coords[qq]) - &(&u.coords[qq] * &w.coords[p]);
            x.coeffs[biv_index(p, qq)] = c;
        }
    }
    x
}

/// The 8x8 matrix of `x -> X . x`, where `(v ^ w) . x = (w, x) v - (v, x) w`.
pub fn biv_matrix(x: &Bivector) -> Mat {
    let mut m = mat_zero(8);
    for (k, c) in x.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (p, qq) = biv_positions(k);
        m[p][dual(qq)] += c;
        m[qq][dual(p)] -= c;
    }
    m
}

/// Recovers the bivector acting by `m`; fails when `m` is not skew for the
/// split form.
pub fn matrix_to_biv(m: &Mat) -> Result<Bivector> {
    let mut x = Bivector::zero();
    for p in 0..8 {
        for qq in p + 1..8 {
            x.coeffs[biv_index(p, qq)] = m[p][dual(qq)].clone();
        }
    }
    if biv_matrix(&x) != *m {
        return Err(Error::Internal("matrix is not skew for the split form".into()));
    }
    Ok(x)
}

/// Action of a bivector on a vector.
pub fn biv_act(x: &Bivector, w: &Vector8) -> Vector8 {
    mat_apply(&biv_matrix(x), w)
}

/// Matrix commutator bracket `[X, Y]`.
pub fn bracket(x: &Bivector, y: &Bivector) -> Result<Bivector> {
    let mx = biv_matrix(x);
    let my = biv_matrix(y);
    let a = mat_mul(&mx, &my);
    let b = mat_mul(&my, &mx);
    let c: Mat = a
        .iter()
        .zip(&b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(u, v)| u - v).collect())
        .collect();
    matrix_to_biv(&c)
}

/// The involution `iota(b_j) = b_-j`, i.e. position reversal.
pub fn iota(w: &Vector8) -> Vector8 {
    Vector8 { coords: std::array::from_fn(|p| w.coords[dual(p)].clone()) }
}

/// Cartan involution `u ^ v -> iota(u) ^ iota(v)`.
pub fn cartan_theta(x: &Bivector) -> Bivector {
    let mut y = Bivector::zero();
    for (k, c) in x.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (p, qq) = biv_positions(k);
        // iota sends b_p ^ b_q to b_{7-p} ^ b_{7-q} = -(b_{7-q} ^ b_{7-p}).
        let (np, nq) = (dual(qq), dual(p));
        y.coeffs[biv_index(np, nq)] -= c;
    }
    y
}

/// Trace form `tr(XY)` in the eight-dimensional representation.
pub fn trace_form(x: &Bivector, y: &Bivector) -> GaussRational {
    mat_trace(&mat_mul(&biv_matrix(x), &biv_matrix(y)))
}

fn bplus(j: i32) -> Vector8 {
    &Vector8::b(j) + &Vector8::b(-j)
}

fn with_i(x: &Vector8, y: &Vector8, s: i64) -> Vector8 {
    x + &y.scale(&GaussRational::from_ints(0, s))
}

fn sl2_triple(v2_sign: i64) -> [Bivector; 3] {
    let b1 = bplus(1);
    let b2 = bplus(2);
    let b3 = bplus(3);
    let b4 = bplus(4).scale(&g(v2_sign));
    let quarter = qf(1, 4);
    let e = wedge(&with_i(&b1, &b2, -1), &with_i(&b3, &b4, -1)).scale_q(&quarter);
    let f = wedge(&with_i(&b1, &b2, 1), &with_i(&b3, &b4, 1)).scale_q(&-quarter);
    let h = (&wedge(&b1, &b2) + &wedge(&b3, &b4)).scale(&GaussRational::new(q(0), qf(1, 2)));
    [e, h, f]
}

/// The triple `(e+, h+, f+)` spanning the distinguished `su(2)`.
pub fn su2_triple() -> [Bivector; 3] {
    sl2_triple(1)
}

/// The second triple `(e'+, h'+, f'+)`, trace-orthogonal to the first.
pub fn su2_triple_prime() -> [Bivector; 3] {
    sl2_triple(-1)
}

/// An element `c_xx x^2 + c_xy xy + c_yy y^2` of `Sym^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sym2Element {
    pub c_xx: GaussRational,
    pub c_xy: GaussRational,
    pub c_yy: GaussRational,
}

/// Projection onto `span{e+, h+, f+}` for the trace form, written in the
/// coordinates `e+ = -x^2`, `h+ = 2xy`, `f+ = y^2`.
pub fn pr_k(x: &Bivector) -> Sym2Element {
    let basis = su2_triple();
    let gm: Vec<Vec<GaussRational>> = basis
        .iter()
        .map(|u| basis.iter().map(|v| trace_form(u, v)).collect())
        .collect();
    let rhs: Vec<GaussRational> = basis.iter().map(|u| trace_form(x, u)).collect();
    let c = solve_gauss(&gm, &rhs).expect("trace form is nondegenerate on su(2)");
    Sym2Element {
        c_xx: -&c[0],
        c_xy: c[1].scale(&q(2)),
        c_yy: c[2].clone(),
    }
}

/// Solves a square system over the Gaussian rationals by writing it as a
/// real system of twice the size.
pub fn solve_gauss(m: &[Vec<GaussRational>], rhs: &[GaussRational]) -> Option<Vec<GaussRational>> {
    let n = m.len();
    let mut big = vec![vec![Q::zero(); 2 * n]; 2 * n];
    let mut r = vec![Q::zero(); 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = &m[i][j];
            big[i][j] = z.re.clone();
            big[i][j + n] = -z.im.clone();
            big[i + n][j] = z.im.clone();
            big[i + n][j + n] = z.re.clone();
        }
        r[i] = rhs[i].re.clone();
        r[i + n] = rhs[i].im.clone();
    }
    let s = solve(&big, &r)?;
    Some((0..n).map(|i| GaussRational::new(s[i].clone(), s[i + n].clone())).collect())
}

/// Element of `V_l = Sym^{2l}`: coefficient of `x^{l+v} y^{l-v}` at index
/// `v + l`, for `v = -l..=l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VellElement {
    pub ell: usize,
    pub coeffs: Vec<GaussRational>,
}

impl VellElement {
    /// Coefficient of `x^{l+v} y^{l-v}`.
    pub fn get(&self, v: i64) -> &GaussRational {
        &self.coeffs[(v + self.ell as i64) as usize]
    }
}

/// Multinomial expansion of `s^l`.
pub fn sym2_power(s: &Sym2Element, ell: usize) -> VellElement {
    // Polynomials in x with the total degree fixed; index = power of x.
    let base = [s.c_yy.clone(), s.c_xy.clone(), s.c_xx.clone()];
    let mut acc = vec![GaussRational::one()];
    for _ in 0..ell {
        let mut next = vec![GaussRational::zero(); acc.len() + 2];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in base.iter().enumerate() {
                if !b.is_zero() {
                    next[i + k] += &(a * b);
                }
            }
        }
        acc = next;
    }
    VellElement { ell, coeffs: acc }
}
