//! The Lie algebra `g_E` attached to the cubic norm structure `E = Q^3`,
//! its isomorphism `Phi` onto `^2 O`, triality triples, the `S3` actions
//! and the induced action on Bhargava cubes.

use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::arith::{invert, q, qf, Q};
use crate::error::{Error, Result};
use crate::octonion::{conj, from_vector8, oct_mul, to_vector8, trilinear, OctBasis, Octonion};
use crate::quadspace::{
    biv_matrix, g, matrix_to_biv, mat_mul, pos, wedge, Bivector, GaussRational, Mat,
    Vector8, BIV_DIM,
};

/// An element of `E = Q^3` with `N(z) = z1 z2 z3`.
pub type CubicE = [Q; 3];

/// `z^# = (z2 z3, z3 z1, z1 z2)`.
pub fn sharp(z: &CubicE) -> CubicE {
    [&z[1] * &z[2], &z[2] * &z[0], &z[0] * &z[1]]
}

/// `z x w = (z + w)^# - z^# - w^#`.
pub fn cross_e(z: &CubicE, w: &CubicE) -> CubicE {
    [
        &z[1] * &w[2] + &z[2] * &w[1],
        &z[2] * &w[0] + &z[0] * &w[2],
        &z[0] * &w[1] + &z[1] * &w[0],
    ]
}

/// Trace pairing `(x, gamma) = sum x_i gamma_i` between `E` and its dual.
pub fn pair_e(x: &CubicE, gamma: &CubicE) -> Q {
    &x[0] * &gamma[0] + &x[1] * &gamma[1] + &x[2] * &gamma[2]
}

type M3 = [[Q; 3]; 3];

fn m3_zero() -> M3 {
    std::array::from_fn(|_| std::array::from_fn(|_| Q::zero()))
}

fn m3_mul(a: &M3, b: &M3) -> M3 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(Q::zero(), |s, k| s + &a[i][k] * &b[k][j]))
    })
}

fn m3_transpose(a: &M3) -> M3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i].clone()))
}

fn m3_zip(a: &M3, b: &M3, f: impl Fn(&Q, &Q) -> Q) -> M3 {
    std::array::from_fn(|i| std::array::from_fn(|j| f(&a[i][j], &b[i][j])))
}

fn m3_scale(c: &Q, a: &M3) -> M3 {
    std::array::from_fn(|i| std::array::from_fn(|j| c * &a[i][j]))
}

fn e_zip(a: &CubicE, b: &CubicE, f: impl Fn(&Q, &Q) -> Q) -> CubicE {
    std::array::from_fn(|i| f(&a[i], &b[i]))
}

/// Exact Levi-Civita symbol on `{0, 1, 2}`.
fn levi(j: usize, k: usize, l: usize) -> i64 {
    if j == k || k == l || j == l {
        0
    } else if (j + 1) % 3 == k {
        1
    } else {
        -1
    }
}

/// An element of `g_E = (sl3 + E0) + V3 (x) E + V3* (x) E*`.
///
/// `ve[j]` is the `E`-vector paired with `v_{j+1}` and `de[j]` the
/// `E*`-vector paired with `delta_{j+1}`. `e0 = u` stands for `Psi_{2u}`,
/// multiplication by `2u` on `E`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GEElement {
    pub sl3: M3,
    pub e0: CubicE,
    pub ve: M3,
    pub de: M3,
}

/// Dimension of `g_E`.
pub const GE_DIM: usize = 28;

impl GEElement {
    pub fn zero() -> Self {
        GEElement { sl3: m3_zero(), e0: std::array::from_fn(|_| Q::zero()), ve: m3_zero(), de: m3_zero() }
    }

    /// Checks the trace-zero constraints.
    pub fn validate(&self) -> Result<()> {
        let t = &self.sl3[0][0] + &self.sl3[1][1] + &self.sl3[2][2];
        let s = &self.e0[0] + &self.e0[1] + &self.e0[2];
        if !t.is_zero() || !s.is_zero() {
            return Err(Error::Invalid("sl3 part and E0 part must have zero trace".into()));
        }
        Ok(())
    }

    /// The matrix unit `E_jk` (1-based, `j != k`).
    pub fn e_jk(j: usize, k: usize) -> Self {
        let mut x = GEElement::zero();
        x.sl3[j - 1][k - 1] = Q::one();
        x
    }

    /// `v_j (x) x` (1-based `j`).
    pub fn v(j: usize, x: [i64; 3]) -> Self {
        let mut e = GEElement::zero();
        e.ve[j - 1] = x.map(q);
        e
    }

    /// `delta_j (x) gamma` (1-based `j`).
    pub fn delta(j: usize, gamma: [i64; 3]) -> Self {
        let mut e = GEElement::zero();
        e.de[j - 1] = gamma.map(q);
        e
    }

    /// `Psi_{2u}`.
    pub fn psi(u: [i64; 3]) -> Self {
        let mut e = GEElement::zero();
        e.e0 = u.map(q);
        e
    }

    pub fn scale(&self, c: &Q) -> Self {
        GEElement {
            sl3: m3_scale(c, &self.sl3),
            e0: self.e0.clone().map(|z| c * z),
            ve: m3_scale(c, &self.ve),
            de: m3_scale(c, &self.de),
        }
    }

    /// Coordinates in the fixed basis of [`ge_basis`].
    pub fn coords(&self) -> Vec<Q> {
        let mut c = Vec::with_capacity(GE_DIM);
        for j in 0..3 {
            for k in 0..3 {
                if j != k {
                    c.push(self.sl3[j][k].clone());
                }
            }
        }
        // Diagonal in the basis E11 - E22, E22 - E33.
        c.push(self.sl3[0][0].clone());
        c.push(-self.sl3[2][2].clone());
        // E0 in the basis (1, -1, 0), (0, 1, -1).
        c.push(self.e0[0].clone());
        c.push(-self.e0[2].clone());
        for j in 0..3 {
            for i in 0..3 {
                c.push(self.ve[j][i].clone());
            }
        }
        for j in 0..3 {
            for i in 0..3 {
                c.push(self.de[j][i].clone());
            }
        }
        c
    }

    /// Inverse of [`GEElement::coords`].
    pub fn from_coords(c: &[Q]) -> Self {
        let mut x = GEElement::zero();
        let mut it = c.iter();
        for j in 0..3 {
            for k in 0..3 {
                if j != k {
                    x.sl3[j][k] = it.next().cloned().unwrap_or_default();
                }
            }
        }
        let h1 = it.next().cloned().unwrap_or_default();
        let h2 = it.next().cloned().unwrap_or_default();
        x.sl3[0][0] = h1.clone();
        x.sl3[1][1] = &h2 - &h1;
        x.sl3[2][2] = -h2;
        let p1 = it.next().cloned().unwrap_or_default();
        let p2 = it.next().cloned().unwrap_or_default();
        x.e0 = [p1.clone(), &p2 - &p1, -p2];
        for j in 0..3 {
            for i in 0..3 {
                x.ve[j][i] = it.next().cloned().unwrap_or_default();
            }
        }
        for j in 0..3 {
            for i in 0..3 {
                x.de[j][i] = it.next().cloned().unwrap_or_default();
            }
        }
        x
    }
}

impl Add for &GEElement {
    type Output = GEElement;
    fn add(self, o: &GEElement) -> GEElement {
        GEElement {
            sl3: m3_zip(&self.sl3, &o.sl3, |a, b| a + b),
            e0: e_zip(&self.e0, &o.e0, |a, b| a + b),
            ve: m3_zip(&self.ve, &o.ve, |a, b| a + b),
            de: m3_zip(&self.de, &o.de, |a, b| a + b),
        }
    }
}

impl Sub for &GEElement {
    type Output = GEElement;
    fn sub(self, o: &GEElement) -> GEElement {
        self + &(-o)
    }
}

impl Neg for &GEElement {
    type Output = GEElement;
    fn neg(self) -> GEElement {
        self.scale(&q(-1))
    }
}

/// The basis of `g_E` matching [`GEElement::coords`].
pub fn ge_basis() -> Vec<GEElement> {
    (0..GE_DIM)
        .map(|k| {
            let c: Vec<Q> = (0..GE_DIM).map(|i| if i == k { Q::one() } else { Q::zero() }).collect();
            GEElement::from_coords(&c)
        })
        .collect()
}

/// `[delta (x) gamma, v (x) x]` summed over the `V3* (x) E*` part of `a` and
/// the `V3 (x) E` part of `b`.
fn bracket_delta_v(de: &M3, ve: &M3) -> GEElement {
    let mut out = GEElement::zero();
    let third = qf(1, 3);
    for j in 0..3 {
        for k in 0..3 {
            let gamma = &de[j];
            let x = &ve[k];
            let xg = pair_e(x, gamma);
            if !xg.is_zero() {
                // (x, gamma) (v_k (x) delta_j - delta_j(v_k) / 3)
                out.sl3[k][j] += &xg;
                if j == k {
                    for i in 0..3 {
                        out.sl3[i][i] -= &xg * &third;
                    }
                }
            }
            if j == k {
                let u: CubicE = std::array::from_fn(|i| &x[i] * &gamma[i] - &xg * &third);
                out.e0 = e_zip(&out.e0, &u, |a, b| a + b);
            }
        }
    }
    out
}

/// The Lie bracket of `g_E`.
pub fn ge_bracket(a: &GEElement, b: &GEElement) -> GEElement {
    let two = q(2);
    let mut out = GEElement::zero();
    // sl3 part.
    let ab = m3_mul(&a.sl3, &b.sl3);
    let ba = m3_mul(&b.sl3, &a.sl3);
    out.sl3 = m3_zip(&ab, &ba, |x, y| x - y);
    // sl3 and E0 acting on V3 (x) E and V3* (x) E*.
    let act_v = |s: &M3, u: &CubicE, ve: &M3| -> M3 {
        let sv = m3_mul(s, ve);
        std::array::from_fn(|j| std::array::from_fn(|i| &sv[j][i] + &two * &u[i] * &ve[j][i]))
    };
    let act_d = |s: &M3, u: &CubicE, de: &M3| -> M3 {
        let sd = m3_mul(&m3_transpose(s), de);
        std::array::from_fn(|j| std::array::from_fn(|i| -&sd[j][i] - &two * &u[i] * &de[j][i]))
    };
    let av = act_v(&a.sl3, &a.e0, &b.ve);
    let bv = act_v(&b.sl3, &b.e0, &a.ve);
    out.ve = m3_zip(&av, &bv, |x, y| x - y);
    let ad = act_d(&a.sl3, &a.e0, &b.de);
    let bd = act_d(&b.sl3, &b.e0, &a.de);
    out.de = m3_zip(&ad, &bd, |x, y| x - y);
    // [v (x) x, v' (x) x'] = (v ^ v') (x) (x cross x'), v_j ^ v_{j+1} = delta_{j+2}.
    // [delta (x) g, delta' (x) g'] likewise with delta_j ^ delta_{j+1} = v_{j+2}.
    for j in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                let s = levi(j, k, l);
                if s == 0 {
                    continue;
                }
                let sq = q(s);
                let cv = cross_e(&a.ve[j], &b.ve[k]);
                let cd = cross_e(&a.de[j], &b.de[k]);
                for i in 0..3 {
                    out.de[l][i] += &sq * &cv[i];
                    out.ve[l][i] += &sq * &cd[i];
                }
            }
        }
    }
    let p = bracket_delta_v(&a.de, &b.ve);
    let m = bracket_delta_v(&b.de, &a.ve);
    &(&out + &p) - &m
}

fn idx(j: i64) -> usize {
    (((j - 1) % 3 + 3) % 3 + 1) as usize
}

/// `u ^ v` acting on `O` through the norm pairing,
/// `x -> <v, x> u - <u, x> v` with `<x, y> = n(x + y) - n(x) - n(y)`.
/// Since `q = -n` this is the negative of the `q`-wedge of `quadspace`.
pub fn norm_wedge(u: &Octonion, v: &Octonion) -> Bivector {
    -&wedge(&to_vector8(u), &to_vector8(v))
}

fn wo(x: OctBasis, y: OctBasis) -> Bivector {
    norm_wedge(&x.octonion(), &y.octonion())
}

/// The isomorphism `Phi: g_E -> ^2 O`, written in the `b`-basis.
pub fn phi_iso(x: &GEElement) -> Bivector {
    use OctBasis::{Eps1, Eps2};
    let mut out = Bivector::zero();
    let mut add = |c: &Q, b: Bivector| {
        if !c.is_zero() {
            out = &out + &b.scale_q(c);
        }
    };
    for j in 1..=3 {
        for k in 1..=3 {
            // Diagonal entries extend E_jk -> e_k* ^ e_j to the Cartan part.
            add(&x.sl3[j - 1][k - 1], wo(OctBasis::es(k), OctBasis::e(j)));
        }
    }
    let u = &x.e0;
    add(&(&u[0] - &u[2]), wo(Eps1, Eps2));
    for i in 1..=3 {
        add(&u[1], wo(OctBasis::e(i), OctBasis::es(i)));
    }
    for j in 1..=3usize {
        let jp = idx(j as i64 + 1);
        let jm = idx(j as i64 - 1);
        let xv = &x.ve[j - 1];
        add(&xv[0], wo(Eps1, OctBasis::e(j)));
        add(&xv[1], wo(OctBasis::es(jp), OctBasis::es(jm)));
        add(&-xv[2].clone(), wo(Eps2, OctBasis::e(j)));
        let gd = &x.de[j - 1];
        add(&-gd[0].clone(), wo(Eps2, OctBasis::es(j)));
        add(&gd[1], wo(OctBasis::e(jp), OctBasis::e(jm)));
        add(&gd[2], wo(Eps1, OctBasis::es(j)));
    }
    out
}

/// The matrix of [`phi_iso`] in the bases [`ge_basis`] and `b_p ^ b_q`,
/// with real entries; column `k` is the image of basis element `k`.
pub fn phi_matrix() -> Vec<Vec<Q>> {
    let cols: Vec<Bivector> = ge_basis().iter().map(phi_iso).collect();
    (0..BIV_DIM)
        .map(|r| (0..GE_DIM).map(|c| cols[c].coeffs[r].re.clone()).collect())
        .collect()
}

/// Inverse of [`phi_iso`] on real bivectors.
pub fn phi_inverse(x: &Bivector) -> Result<GEElement> {
    static INV: OnceLock<Option<Vec<Vec<Q>>>> = OnceLock::new();
    if x.coeffs.iter().any(|c| !c.is_real()) {
        return Err(Error::Invalid("phi_inverse expects a real bivector".into()));
    }
    let inv = INV
        .get_or_init(|| invert(&phi_matrix()))
        .as_ref()
        .ok_or_else(|| Error::Internal("Phi is singular".into()))?;
    let c: Vec<Q> = (0..GE_DIM)
        .map(|i| (0..BIV_DIM).fold(Q::zero(), |s, r| s + &inv[i][r] * &x.coeffs[r].re))
        .collect();
    Ok(GEElement::from_coords(&c))
}

/// A permutation of `{1, 2, 3}` given by its images `[s(1), s(2), s(3)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Perm(pub [usize; 3]);

impl Perm {
    pub const ID: Perm = Perm([1, 2, 3]);
    /// The 3-cycle `1 -> 2 -> 3 -> 1`.
    pub const C123: Perm = Perm([2, 3, 1]);
    /// The 3-cycle `1 -> 3 -> 2 -> 1`.
    pub const C132: Perm = Perm([3, 1, 2]);

    /// All six permutations.
    pub fn all() -> [Perm; 6] {
        [
            Perm([1, 2, 3]),
            Perm([2, 3, 1]),
            Perm([3, 1, 2]),
            Perm([2, 1, 3]),
            Perm([1, 3, 2]),
            Perm([3, 2, 1]),
        ]
    }

    pub fn is_even(self) -> bool {
        matches!(self.0, [1, 2, 3] | [2, 3, 1] | [3, 1, 2])
    }

    pub fn inverse(self) -> Perm {
        let mut r = [0; 3];
        for i in 0..3 {
            r[self.0[i] - 1] = i + 1;
        }
        Perm(r)
    }

    /// `self o other`.
    pub fn compose(self, other: Perm) -> Perm {
        Perm(std::array::from_fn(|i| self.0[other.0[i] - 1]))
    }

    /// Moves the entry at position `i` to position `s(i)`.
    pub fn apply<T: Clone>(self, x: &[T; 3]) -> [T; 3] {
        let inv = self.inverse();
        std::array::from_fn(|j| x[inv.0[j] - 1].clone())
    }
}

/// The `S3` action on `g_E` induced by permuting the coordinates of `E`.
pub fn s3_act_ge(s: Perm, x: &GEElement) -> GEElement {
    GEElement {
        sl3: x.sl3.clone(),
        e0: s.apply(&x.e0),
        ve: std::array::from_fn(|j| s.apply(&x.ve[j])),
        de: std::array::from_fn(|j| s.apply(&x.de[j])),
    }
}

/// The Cartan involution of `g_E`: `-transpose` on `sl3`, `-1` on `E0`,
/// and `v_j (x) x <-> delta_j (x) x` on the off-diagonal parts.
pub fn theta_e(x: &GEElement) -> GEElement {
    GEElement {
        sl3: m3_scale(&q(-1), &m3_transpose(&x.sl3)),
        e0: x.e0.clone().map(|z| -z),
        ve: x.de.clone(),
        de: x.ve.clone(),
    }
}

/// The `S3` action on `^2 O` transported through `Phi`.
pub fn s3_act_biv(s: Perm, x: &Bivector) -> Result<Bivector> {
    Ok(phi_iso(&s3_act_ge(s, &phi_inverse(x)?)))
}

/// Octonion left multiplication as an 8x8 matrix on `b`-coordinates.
pub fn left_mul_matrix(u: &Octonion) -> Mat {
    op_matrix(|x| oct_mul(u, x))
}

/// Octonion right multiplication as an 8x8 matrix on `b`-coordinates.
pub fn right_mul_matrix(u: &Octonion) -> Mat {
    op_matrix(|x| oct_mul(x, u))
}

/// Octonion conjugation as an 8x8 matrix on `b`-coordinates.
pub fn conj_matrix() -> Mat {
    op_matrix(conj)
}

fn op_matrix(f: impl Fn(&Octonion) -> Octonion) -> Mat {
    let cols: Vec<Vector8> = (0..8)
        .map(|p| to_vector8(&f(&from_vector8(&Vector8::basis(p)))))
        .collect();
    (0..8).map(|i| (0..8).map(|j| cols[j].coords[i].clone()).collect()).collect()
}

fn mat_lin(a: &Mat, ca: &Q, b: &Mat, cb: &Q) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| &x.scale(ca) + &y.scale(cb)).collect())
        .collect()
}

/// The operators `1/2 (l_{u*} l_v - l_{v*} l_u)` and
/// `1/2 (r_{u*} r_v - r_{v*} r_u)` completing `u ^ v` to a triality triple.
pub fn spin_companions(u: &Octonion, v: &Octonion) -> Result<(Bivector, Bivector)> {
    let half = qf(1, 2);
    let (us, vs) = (conj(u), conj(v));
    let l = mat_lin(
        &mat_mul(&left_mul_matrix(&us), &left_mul_matrix(v)),
        &half,
        &mat_mul(&left_mul_matrix(&vs), &left_mul_matrix(u)),
        &-half.clone(),
    );
    let r = mat_lin(
        &mat_mul(&right_mul_matrix(&us), &right_mul_matrix(v)),
        &half,
        &mat_mul(&right_mul_matrix(&vs), &right_mul_matrix(u)),
        &-half.clone(),
    );
    Ok((matrix_to_biv(&l)?, matrix_to_biv(&r)?))
}

/// Nonzero entries `(i, j, k, t)` of the trilinear form on basis vectors,
/// `t = (b_i, b_j, b_k)` in position coordinates.
fn trilinear_tensor() -> &'static [(usize, usize, usize, i64)] {
    static T: OnceLock<Vec<(usize, usize, usize, i64)>> = OnceLock::new();
    T.get_or_init(|| {
        let basis: Vec<Octonion> = (0..8).map(|p| from_vector8(&Vector8::basis(p))).collect();
        let mut out = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    let t = trilinear(&basis[i], &basis[j], &basis[k]);
                    if !t.is_zero() {
                        let t = crate::arith::to_i64(&t).expect("integral structure constants");
                        out.push((i, j, k, t));
                    }
                }
            }
        }
        out
    })
}

/// Checks `(X1 x, y, z) + (x, X2 y, z) + (x, y, X3 z) = 0` on all basis
/// triples, where `( , , )` is the octonion trilinear form.
pub fn verify_triality_triple(x1: &Bivector, x2: &Bivector, x3: &Bivector) -> bool {
    let ms = [biv_matrix(x1), biv_matrix(x2), biv_matrix(x3)];
    let mut acc = vec![GaussRational::zero(); 512];
    let at = |i: usize, j: usize, k: usize| 64 * i + 8 * j + k;
    for &(a, b, c, t) in trilinear_tensor() {
        let tq = q(t);
        // (X1 b_i, b_b, b_c) picks up X1[a][i] (b_a, b_b, b_c), and so on.
        for i in 0..8 {
            if !ms[0][a][i].is_zero() {
                acc[at(i, b, c)] += &ms[0][a][i].scale(&tq);
            }
            if !ms[1][b][i].is_zero() {
                acc[at(a, i, c)] += &ms[1][b][i].scale(&tq);
            }
            if !ms[2][c][i].is_zero() {
                acc[at(a, b, i)] += &ms[2][c][i].scale(&tq);
            }
        }
    }
    acc.iter().all(Zero::is_zero)
}

/// The triality triple `(u ^ v, 1/2 (l_{u*} l_v - l_{v*} l_u),
/// 1/2 (r_{u*} r_v - r_{v*} r_u))` with `u ^ v` taken through the norm
/// pairing.
pub fn spin_triple(u: &Octonion, v: &Octonion) -> Result<[Bivector; 3]> {
    let (x2, x3) = spin_companions(u, v)?;
    Ok([norm_wedge(u, v), x2, x3])
}

/// The six explicit triples `(eps1 ^ e_j, e_{j+1}* ^ e_{j-1}*, -eps2 ^ e_j)`
/// and `(eps1 ^ e_j*, -eps2 ^ e_j*, e_{j+1} ^ e_{j-1})`, `j = 1, 2, 3`.
pub fn explicit_triples() -> Vec<[Bivector; 3]> {
    use OctBasis::{Eps1, Eps2};
    let mut out = Vec::new();
    for j in 1..=3usize {
        let jp = idx(j as i64 + 1);
        let jm = idx(j as i64 - 1);
        out.push([
            wo(Eps1, OctBasis::e(j)),
            wo(OctBasis::es(jp), OctBasis::es(jm)),
            -&wo(Eps2, OctBasis::e(j)),
        ]);
        out.push([
            wo(Eps1, OctBasis::es(j)),
            -&wo(Eps2, OctBasis::es(j)),
            wo(OctBasis::e(jp), OctBasis::e(jm)),
        ]);
    }
    out
}

/// The 3-cycle under which a cube `(-c, (0,0,b), (1,a,1), 0)` becomes
/// `(-c, (0,b,0), (a,1,1), 0)`.
pub const CUBE_CYCLE: Perm = Perm::C132;

/// Conjugation `X -> c X c` by octonion conjugation `c`.
pub fn conj_biv(x: &Bivector) -> Result<Bivector> {
    let c = conj_matrix();
    matrix_to_biv(&mat_mul(&mat_mul(&c, &biv_matrix(x)), &c))
}

/// The `S3` action on triality triples:
/// `s (X1, X2, X3) = (X_{s^-1(1)}, X_{s^-1(2)}, X_{s^-1(3)})`, composed with
/// conjugation by `c` on each entry for odd `s`.
pub fn s3_act_triple(s: Perm, t: &[Bivector; 3]) -> Result<[Bivector; 3]> {
    let p = s.apply(t);
    if s.is_even() {
        Ok(p)
    } else {
        Ok([conj_biv(&p[0])?, conj_biv(&p[1])?, conj_biv(&p[2])?])
    }
}

/// A Bhargava cube `(alpha, beta, gamma, delta)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BhargavaCube {
    pub alpha: i64,
    pub beta: [i64; 3],
    pub gamma: [i64; 3],
    pub delta: i64,
}

/// A 2x2 integer matrix `[[m11, m12], [m21, m22]]`.
pub type Mat2 = [[i64; 2]; 2];

/// Element `m11 b3 - m21 b4 + m12 b-4 + m22 b-3` of `V22` as a length-4
/// coordinate vector on `(b3, b4, b-4, b-3)`.
pub fn mat2_to_v22(m: &Mat2) -> [i64; 4] {
    [m[0][0], -m[1][0], m[0][1], m[1][1]]
}

/// Inverse of [`mat2_to_v22`].
pub fn v22_to_mat2(c: &[i64; 4]) -> Mat2 {
    [[c[0], c[2]], [-c[1], c[3]]]
}

/// The pair `(T1, T2)` attached to a cube:
/// `T1 = g1 b3 - b2 b4 + d b-4 + g3 b-3`, `T2 = -b3 b3 + a b4 - g2 b-4 - b1 b-3`.
pub fn cube_to_pair(w: &BhargavaCube) -> (Mat2, Mat2) {
    let t1 = [w.gamma[0], -w.beta[1], w.delta, w.gamma[2]];
    let t2 = [-w.beta[2], w.alpha, -w.gamma[1], -w.beta[0]];
    (v22_to_mat2(&t1), v22_to_mat2(&t2))
}

/// Inverse of [`cube_to_pair`].
pub fn pair_to_cube(t1: &Mat2, t2: &Mat2) -> BhargavaCube {
    let a = mat2_to_v22(t1);
    let b = mat2_to_v22(t2);
    BhargavaCube {
        alpha: b[1],
        beta: [-b[3], -a[1], -b[0]],
        gamma: [a[0], -b[2], a[3]],
        delta: a[2],
    }
}

/// The element `alpha' E12 + v1 (x) beta' + delta3 (x) gamma' + delta' E23`
/// of `g_E` attached to dual cube coordinates.
pub fn dual_cube_element(w: &BhargavaCube) -> GEElement {
    let mut x = GEElement::zero();
    x.sl3[0][1] = q(w.alpha);
    x.sl3[1][2] = q(w.delta);
    x.ve[0] = w.beta.map(q);
    x.de[2] = w.gamma.map(q);
    x
}

/// Reads dual cube coordinates `(a', b', g', d')` back from a bivector of
/// the form `b1 ^ y1' + b2 ^ y2'`.
pub fn dual_cube_from_bivector(x: &Bivector) -> Result<[Q; 8]> {
    let c = |i: i32, j: i32| x.coeff(pos(i), pos(j));
    let slots = [
        ((1, 4), -1),
        ((1, -3), 1),
        ((2, 4), -1),
        ((1, 3), 1),
        ((2, 3), 1),
        ((1, -4), 1),
        ((2, -3), 1),
        ((2, -4), 1),
    ];
    let mut out: [Q; 8] = std::array::from_fn(|_| Q::zero());
    let mut rest = x.clone();
    for (o, ((i, j), sgn)) in out.iter_mut().zip(slots) {
        let v = c(i, j);
        if !v.is_real() {
            return Err(Error::Internal("complex dual cube coordinate".into()));
        }
        *o = &v.re * q(sgn);
        rest.coeffs[crate::quadspace::biv_index(pos(i), pos(j))] = GaussRational::zero();
    }
    if !rest.is_zero() {
        return Err(Error::Internal("bivector leaves the abelianized radical".into()));
    }
    Ok(out)
}

/// `b1 ^ y1' + b2 ^ y2'` in the `q`-wedge, which is `-Phi` of [`dual_cube_element`],
/// with `y1' = b3' b3 - a' b4 + g2' b-4 + b1' b-3` and
/// `y2' = g1' b3 - b2' b4 + d' b-4 + g3' b-3`.
pub fn dual_cube_bivector(w: &BhargavaCube) -> Bivector {
    let v22 = |c: [i64; 4]| -> Vector8 {
        let mut v = Vector8::zero();
        for (p, lbl) in [3, 4, -4, -3].into_iter().enumerate() {
            v.coords[pos(lbl)] = g(c[p]);
        }
        v
    };
    let y1 = v22([w.beta[2], -w.alpha, w.gamma[1], w.beta[0]]);
    let y2 = v22([w.gamma[0], -w.beta[1], w.delta, w.gamma[2]]);
    &wedge(&Vector8::b(1), &y1) + &wedge(&Vector8::b(2), &y2)
}

/// The character pairing `<w, w'> = (T1, y1') + (T2, y2')`.
pub fn cube_pairing(w: &BhargavaCube, wd: &BhargavaCube) -> i64 {
    let (t1, t2) = cube_to_pair(w);
    let a = mat2_to_v22(&t1);
    let b = mat2_to_v22(&t2);
    let y1 = [wd.beta[2], -wd.alpha, wd.gamma[1], wd.beta[0]];
    let y2 = [wd.gamma[0], -wd.beta[1], wd.delta, wd.gamma[2]];
    let f = |x: &[i64; 4], y: &[i64; 4]| x[0] * y[3] + x[3] * y[0] + x[1] * y[2] + x[2] * y[1];
    f(&a, &y1) + f(&b, &y2)
}

fn cube_from_coords(c: &[i64; 8]) -> BhargavaCube {
    BhargavaCube { alpha: c[0], beta: [c[1], c[2], c[3]], gamma: [c[4], c[5], c[6]], delta: c[7] }
}

fn cube_coords(w: &BhargavaCube) -> [i64; 8] {
    [w.alpha, w.beta[0], w.beta[1], w.beta[2], w.gamma[0], w.gamma[1], w.gamma[2], w.delta]
}

/// The `S3` action on cubes, transported through `Phi` and the character
/// pairing: `<s w, s n> = <w, n>` where `s n` is the transported action on
/// the abelianized Heisenberg radical.
pub fn s3_act_cube(s: Perm, w: &BhargavaCube) -> Result<BhargavaCube> {
    let unit = |i: usize| {
        let mut c = [0i64; 8];
        c[i] = 1;
        cube_from_coords(&c)
    };
    // Matrix of s^-1 on dual coordinates, computed through Phi.
    let sinv = s.inverse();
    let mut act = vec![vec![Q::zero(); 8]; 8];
    for i in 0..8 {
        let image = s3_act_biv(sinv, &dual_cube_bivector(&unit(i)))?;
        let c = dual_cube_from_bivector(&image)?;
        for (r, v) in c.iter().enumerate() {
            act[r][i] = v.clone();
        }
    }
    // Pairing matrix P[i][j] = <unit_i, unit_j>.
    let pm: Vec<Vec<Q>> = (0..8)
        .map(|i| (0..8).map(|j| q(cube_pairing(&unit(i), &unit(j)))).collect())
        .collect();
    // <s w, n> = <w, s^-1 n> for every dual basis vector n = unit_j.
    let wc = cube_coords(w);
    let rhs: Vec<Q> = (0..8)
        .map(|j| {
            (0..8).fold(Q::zero(), |acc, i| {
                let sn: Q = (0..8).fold(Q::zero(), |a, r| a + &pm[i][r] * &act[r][j]);
                acc + q(wc[i]) * sn
            })
        })
        .collect();
    let pt: Vec<Vec<Q>> = (0..8).map(|j| (0..8).map(|i| pm[i][j].clone()).collect()).collect();
    let sol = crate::arith::solve(&pt, &rhs).ok_or_else(|| Error::Internal("pairing is degenerate".into()))?;
    let mut out = [0i64; 8];
    for (o, v) in out.iter_mut().zip(&sol) {
        *o = crate::arith::to_i64(v).ok_or_else(|| Error::Internal("non-integral cube image".into()))?;
    }
    Ok(cube_from_coords(&out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oct(a: i64, v: [i64; 3], p: [i64; 3], d: i64) -> Octonion {
        Octonion::from_ints(a, v, p, d)
    }

    #[test]
    fn cubic_structure() {
        let z = [q(2), q(3), q(5)];
        assert_eq!(sharp(&z), [q(15), q(10), q(6)]);
        let zero = cross_e(&[q(1), q(0), q(0)], &[q(1), q(0), q(0)]);
        assert!(zero.iter().all(Zero::is_zero));
        let w = [q(1), q(-1), q(4)];
        let lhs = cross_e(&z, &w);
        let s = sharp(&[&z[0] + &w[0], &z[1] + &w[1], &z[2] + &w[2]]);
        let (sz, sw) = (sharp(&z), sharp(&w));
        for i in 0..3 {
            assert_eq!(lhs[i], &s[i] - &sz[i] - &sw[i]);
        }
    }

    #[test]
    fn bracket_examples() {
        let x = GEElement::v(1, [1, 0, 0]);
        let y = GEElement::v(2, [1, 0, 0]);
        assert_eq!(ge_bracket(&x, &y), GEElement::zero());
        let e12 = GEElement::e_jk(1, 2);
        let v2 = GEElement::v(2, [3, -1, 2]);
        assert_eq!(ge_bracket(&e12, &v2), GEElement::v(1, [3, -1, 2]));
        for b in ge_basis() {
            assert_eq!(ge_bracket(&b, &b), GEElement::zero());
        }
    }

    #[test]
    fn phi_rule_examples() {
        use OctBasis::*;
        assert_eq!(phi_iso(&GEElement::e_jk(1, 2)), norm_wedge(&E2s.octonion(), &E1.octonion()));
        assert_eq!(phi_iso(&GEElement::v(1, [1, 0, 0])), norm_wedge(&Eps1.octonion(), &E1.octonion()));
        assert_eq!(
            phi_iso(&GEElement::psi([1, 0, -1])),
            norm_wedge(&Eps1.octonion(), &Eps2.octonion()).scale_q(&q(2))
        );
    }

    #[test]
    fn coords_roundtrip() {
        for b in ge_basis() {
            assert_eq!(GEElement::from_coords(&b.coords()), b);
            b.validate().unwrap();
        }
    }

    #[test]
    fn phi_is_bijective() {
        assert!(invert(&phi_matrix()).is_some());
        let x = &GEElement::v(2, [1, 2, 3]) + &GEElement::e_jk(3, 1);
        assert_eq!(phi_inverse(&phi_iso(&x)).unwrap(), x);
    }

    #[test]
    fn permutation_action_examples() {
        let x = GEElement::v(1, [1, 2, 3]);
        assert_eq!(s3_act_ge(Perm::ID, &x), x);
        assert_eq!(s3_act_ge(Perm::C123, &x), GEElement::v(1, [3, 1, 2]));
        let c = Perm::C123;
        assert_eq!(s3_act_ge(c, &s3_act_ge(c, &s3_act_ge(c, &x))), x);
        assert_eq!(c.compose(c).compose(c), Perm::ID);
        for s in Perm::all() {
            assert_eq!(s.compose(s.inverse()), Perm::ID);
        }
    }

    #[test]
    fn theta_commutes_with_s3() {
        for s in Perm::all() {
            for b in ge_basis() {
                assert_eq!(theta_e(&s3_act_ge(s, &b)), s3_act_ge(s, &theta_e(&b)));
            }
        }
    }

    #[test]
    fn explicit_triples_verify() {
        for t in explicit_triples() {
            assert!(verify_triality_triple(&t[0], &t[1], &t[2]));
        }
    }

    #[test]
    fn non_triple_rejected() {
        let x = crate::quadspace::Bivector::bb(1, 2);
        assert!(!verify_triality_triple(&x, &x, &Bivector::zero()));
    }

    #[test]
    fn spin_triple_verifies() {
        let u = oct(1, [2, 0, -1], [0, 1, 3], 2);
        let v = oct(0, [1, 1, 0], [2, -1, 0], -3);
        let t = spin_triple(&u, &v).unwrap();
        assert!(verify_triality_triple(&t[0], &t[1], &t[2]));
        // The q-wedge carries the opposite sign and does not complete the triple.
        let flipped = -&t[0];
        assert!(!verify_triality_triple(&flipped, &t[1], &t[2]));
    }

    #[test]
    fn transported_action_matches_triple_action() {
        let u = oct(1, [0, 2, -1], [1, 0, 1], -1);
        let v = oct(2, [1, -1, 3], [0, 2, 0], 1);
        let t = spin_triple(&u, &v).unwrap();
        let kappa = Perm([2, 1, 3]);
        for s in Perm::all() {
            let moved = s3_act_triple(kappa.compose(s).compose(kappa), &t).unwrap();
            assert!(verify_triality_triple(&moved[0], &moved[1], &moved[2]));
            assert_eq!(s3_act_biv(s, &t[0]).unwrap(), moved[0]);
        }
    }

    #[test]
    fn cube_identification() {
        let (a, b, c) = (3, 7, 5);
        let t1 = v22_to_mat2(&[1, 0, 0, 1]);
        let t2 = v22_to_mat2(&[-b, -c, -a, 0]);
        let w = pair_to_cube(&t1, &t2);
        assert_eq!(w, BhargavaCube { alpha: -c, beta: [0, 0, b], gamma: [1, a, 1], delta: 0 });
        assert_eq!(cube_to_pair(&w), (t1, t2));
        let zero = BhargavaCube { alpha: 0, beta: [0; 3], gamma: [0; 3], delta: 0 };
        assert_eq!(cube_to_pair(&zero), ([[0, 0], [0, 0]], [[0, 0], [0, 0]]));
    }

    #[test]
    fn dual_cube_element_and_bivector_agree_up_to_norm_sign() {
        let w = BhargavaCube { alpha: 2, beta: [1, -3, 4], gamma: [5, 0, -1], delta: 7 };
        let x = dual_cube_element(&w);
        assert_eq!(phi_iso(&x), -&dual_cube_bivector(&w));
        let c = dual_cube_from_bivector(&dual_cube_bivector(&w)).unwrap();
        assert_eq!(c, cube_coords(&w).map(q));
    }

    #[test]
    fn cube_cycle_example() {
        let (a, b, c) = (3, 7, 5);
        let w = BhargavaCube { alpha: -c, beta: [0, 0, b], gamma: [1, a, 1], delta: 0 };
        let moved = s3_act_cube(CUBE_CYCLE, &w).unwrap();
        assert_eq!(moved, BhargavaCube { alpha: -c, beta: [0, b, 0], gamma: [a, 1, 1], delta: 0 });
        let (t1, t2) = cube_to_pair(&moved);
        assert_eq!(mat2_to_v22(&t1), [a, -b, 0, 1]);
        assert_eq!(mat2_to_v22(&t2), [0, -c, -1, 0]);
        let thrice = s3_act_cube(CUBE_CYCLE, &s3_act_cube(CUBE_CYCLE, &moved).unwrap()).unwrap();
        assert_eq!(thrice, w);
        assert_eq!(s3_act_cube(Perm::ID, &w).unwrap(), w);
    }

    #[test]
    fn cube_action_preserves_pairing() {
        let w = BhargavaCube { alpha: 1, beta: [2, 3, -1], gamma: [0, 4, 1], delta: -2 };
        let n = BhargavaCube { alpha: -3, beta: [1, 0, 2], gamma: [5, -1, 1], delta: 1 };
        for s in Perm::all() {
            let sw = s3_act_cube(s, &w).unwrap();
            let sn = s3_act_cube(s, &n).unwrap();
            assert_eq!(cube_pairing(&sw, &sn), cube_pairing(&w, &n));
        }
    }
}
