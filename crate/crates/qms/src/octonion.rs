//! Split octonions in the Zorn vector-matrix model.
//!
//! An element is a 2x2 array `[[a, v], [phi, d]]` with scalars `a, d`, a
//! vector `v` in a three-dimensional space `V3` and a covector `phi` in its
//! dual. The product uses the cross product to identify `e_i ^ e_j` with
//! `e_k*` and `e_i* ^ e_j*` with `e_k` for `(i, j, k)` cyclic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::arith::{q, Q};
use crate::quadspace::{GaussRational, Vector8};

/// Sign applied to the `phi x phi'` term of the product, i.e. to the
/// identification of `V3* ^ V3*` with `V3`.
pub const COVECTOR_WEDGE_SIGN: i64 = -1;

/// A split octonion with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Octonion {
    pub a: Q,
    pub v: [Q; 3],
    pub phi: [Q; 3],
    pub d: Q,
}

/// The eight standard basis elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OctBasis {
    E1,
    E2,
    E3,
    E1s,
    E2s,
    E3s,
    Eps1,
    Eps2,
}

impl OctBasis {
    /// All eight tags.
    pub const ALL: [OctBasis; 8] = [
        OctBasis::E1,
        OctBasis::E2,
        OctBasis::E3,
        OctBasis::E1s,
        OctBasis::E2s,
        OctBasis::E3s,
        OctBasis::Eps1,
        OctBasis::Eps2,
    ];

    /// `e_j` for `j` in `1..=3`.
    pub fn e(j: usize) -> Self {
        [OctBasis::E1, OctBasis::E2, OctBasis::E3][(j + 2) % 3]
    }

    /// `e_j*` for `j` in `1..=3`.
    pub fn es(j: usize) -> Self {
        [OctBasis::E1s, OctBasis::E2s, OctBasis::E3s][(j + 2) % 3]
    }

    /// The octonion carrying this tag.
    pub fn octonion(self) -> Octonion {
        let mut x = Octonion::zero();
        match self {
            OctBasis::E1 => x.v[0] = Q::one(),
            OctBasis::E2 => x.v[1] = Q::one(),
            OctBasis::E3 => x.v[2] = Q::one(),
            OctBasis::E1s => x.phi[0] = Q::one(),
            OctBasis::E2s => x.phi[1] = Q::one(),
            OctBasis::E3s => x.phi[2] = Q::one(),
            OctBasis::Eps1 => x.a = Q::one(),
            OctBasis::Eps2 => x.d = Q::one(),
        }
        x
    }
}

fn dot(x: &[Q; 3], y: &[Q; 3]) -> Q {
    &x[0] * &y[0] + &x[1] * &y[1] + &x[2] * &y[2]
}

fn cross(x: &[Q; 3], y: &[Q; 3]) -> [Q; 3] {
    [
        &x[1] * &y[2] - &x[2] * &y[1],
        &x[2] * &y[0] - &x[0] * &y[2],
        &x[0] * &y[1] - &x[1] * &y[0],
    ]
}

fn scale(c: &Q, x: &[Q; 3]) -> [Q; 3] {
    [c * &x[0], c * &x[1], c * &x[2]]
}

fn add3(x: [Q; 3], y: [Q; 3]) -> [Q; 3] {
    let [x0, x1, x2] = x;
    let [y0, y1, y2] = y;
    [x0 + y0, x1 + y1, x2 + y2]
}

impl Octonion {
    pub fn new(a: Q, v: [Q; 3], phi: [Q; 3], d: Q) -> Self {
        Octonion { a, v, phi, d }
    }

    /// Octonion with small integer coordinates `(a, v, phi, d)`.
    pub fn from_ints(a: i64, v: [i64; 3], phi: [i64; 3], d: i64) -> Self {
        Octonion {
            a: q(a),
            v: v.map(q),
            phi: phi.map(q),
            d: q(d),
        }
    }

    pub fn zero() -> Self {
        Octonion::from_ints(0, [0; 3], [0; 3], 0)
    }

    /// The multiplicative identity `eps1 + eps2`.
    pub fn unit() -> Self {
        Octonion::from_ints(1, [0; 3], [0; 3], 1)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Octonion {
            a: c * &self.a,
            v: scale(c, &self.v),
            phi: scale(c, &self.phi),
            d: c * &self.d,
        }
    }
}

/// Zorn product.
pub fn oct_mul(x: &Octonion, y: &Octonion) -> Octonion {
    let s = q(COVECTOR_WEDGE_SIGN);
    let a = &x.a * &y.a + dot(&y.phi, &x.v);
    let v = add3(
        add3(scale(&x.a, &y.v), scale(&y.d, &x.v)),
        scale(&s, &cross(&x.phi, &y.phi)),
    );
    let phi = add3(
        add3(scale(&y.a, &x.phi), scale(&x.d, &y.phi)),
        cross(&x.v, &y.v),
    );
    let d = dot(&x.phi, &y.v) + &x.d * &y.d;
    Octonion { a, v, phi, d }
}

/// Norm `a d - phi(v)`.
pub fn norm(x: &Octonion) -> Q {
    &x.a * &x.d - dot(&x.phi, &x.v)
}

/// Conjugation: swaps `a` and `d` and negates `v` and `phi`.
pub fn conj(x: &Octonion) -> Octonion {
    Octonion {
        a: x.d.clone(),
        v: x.v.clone().map(|c| -c),
        phi: x.phi.clone().map(|c| -c),
        d: x.a.clone(),
    }
}

/// Trace `a + d`.
pub fn trace(x: &Octonion) -> Q {
    &x.a + &x.d
}

/// Trilinear form `tr(x (y z))`.
pub fn trilinear(x: &Octonion, y: &Octonion, z: &Octonion) -> Q {
    trace(&oct_mul(x, &oct_mul(y, z)))
}

/// Coordinates in the basis `(b1, b2, b3, b4, b-4, b-3, b-2, b-1)`, which
/// corresponds to `(e1, e3*, eps2, e2*, e2, -eps1, e3, e1*)`.
pub fn to_vector8(x: &Octonion) -> Vector8 {
    let c = [
        x.v[0].clone(),
        x.phi[2].clone(),
        x.d.clone(),
        x.phi[1].clone(),
        x.v[1].clone(),
        -x.a.clone(),
        x.v[2].clone(),
        x.phi[0].clone(),
    ];
    Vector8::new(c.map(GaussRational::real))
}

/// Inverse of [`to_vector8`]; imaginary parts must vanish.
///
/// # Panics
/// Panics when a coordinate has nonzero imaginary part.
pub fn from_vector8(w: &Vector8) -> Octonion {
    let c: Vec<Q> = w
        .coords
        .iter()
        .map(|g| {
            assert!(g.im.is_zero(), "octonion coordinates must be rational");
            g.re.clone()
        })
        .collect();
    Octonion {
        a: -c[5].clone(),
        v: [c[0].clone(), c[4].clone(), c[6].clone()],
        phi: [c[7].clone(), c[3].clone(), c[1].clone()],
        d: c[2].clone(),
    }
}

impl Add for &Octonion {
    type Output = Octonion;
    fn add(self, o: &Octonion) -> Octonion {
        Octonion {
            a: &self.a + &o.a,
            v: add3(self.v.clone(), o.v.clone()),
            phi: add3(self.phi.clone(), o.phi.clone()),
            d: &self.d + &o.d,
        }
    }
}

impl Sub for &Octonion {
    type Output = Octonion;
    fn sub(self, o: &Octonion) -> Octonion {
        self + &(-o)
    }
}

impl Neg for &Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        self.scale(&q(-1))
    }
}

impl Mul for &Octonion {
    type Output = Octonion;
    fn mul(self, o: &Octonion) -> Octonion {
        oct_mul(self, o)
    }
}

impl fmt::Display for Octonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, ({}, {}, {})], [({}, {}, {}), {}]]",
            self.a, self.v[0], self.v[1], self.v[2], self.phi[0], self.phi[1], self.phi[2], self.d
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadspace::pair;
    use OctBasis::*;

    fn b(t: OctBasis) -> Octonion {
        t.octonion()
    }

    #[test]
    fn unit_is_identity() {
        let x = Octonion::from_ints(3, [1, -2, 5], [0, 7, -1], 4);
        assert_eq!(oct_mul(&Octonion::unit(), &x), x);
        assert_eq!(oct_mul(&x, &Octonion::unit()), x);
    }

    #[test]
    fn basis_products() {
        assert_eq!(oct_mul(&b(E1), &b(E2)), b(E3s));
        assert_eq!(oct_mul(&b(E1), &b(E1s)), b(Eps1));
    }

    #[test]
    fn norm_trace_conj_examples() {
        assert_eq!(norm(&Octonion::unit()), q(1));
        assert_eq!(norm(&b(E1)), q(0));
        assert_eq!(norm(&(&b(Eps1) + &b(Eps2))), q(1));
        assert_eq!(conj(&Octonion::unit()), Octonion::unit());
        assert_eq!(trace(&b(Eps1)), q(1));
        let x = Octonion::from_ints(1, [2, 3, 4], [5, 6, 7], 8);
        assert_eq!(conj(&conj(&x)), x);
        let sum = &x + &conj(&x);
        assert_eq!(sum, Octonion::unit().scale(&trace(&x)));
    }

    #[test]
    fn trilinear_examples() {
        let u = Octonion::unit();
        assert_eq!(trilinear(&u, &u, &u), q(2));
        assert_eq!(trilinear(&b(Eps1), &b(Eps1), &b(Eps1)), q(1));
    }

    #[test]
    fn vector8_identification() {
        let w = to_vector8(&b(E1));
        assert_eq!(w, Vector8::basis(0));
        let w = to_vector8(&(-&b(Eps1)));
        assert_eq!(w, Vector8::basis(5));
        for t in OctBasis::ALL {
            assert_eq!(from_vector8(&to_vector8(&b(t))), b(t));
        }
    }

    #[test]
    fn quadratic_form_is_minus_norm() {
        let x = Octonion::from_ints(2, [1, -1, 3], [4, 0, -2], -5);
        let w = to_vector8(&x);
        let qx = pair(&w, &w);
        assert_eq!(qx.re, -norm(&x) * q(2));
    }
}
