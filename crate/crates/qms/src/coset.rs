//! Integer 2x2 matrix machinery: Hermite normal form coset representatives,
//! Gram matrices of pairs, strong primitivity and divisor cosets.

use std::fmt;

use crate::arith::{gcd, gcd_all};
use crate::error::{Error, Result};

/// A 2x2 integer matrix `[[m11, m12], [m21, m22]]`.
pub type Mat2Z = [[i64; 2]; 2];

/// The identity matrix.
pub const ID2: Mat2Z = [[1, 0], [0, 1]];

pub fn det2(m: &Mat2Z) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn mul2(a: &Mat2Z, b: &Mat2Z) -> Mat2Z {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn transpose2(m: &Mat2Z) -> Mat2Z {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

/// Adjugate, so that `m adj(m) = det(m) I`.
pub fn adj2(m: &Mat2Z) -> Mat2Z {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

fn lin2(c1: i64, a: &Mat2Z, c2: i64, b: &Mat2Z) -> Mat2Z {
    [
        [c1 * a[0][0] + c2 * b[0][0], c1 * a[0][1] + c2 * b[0][1]],
        [c1 * a[1][0] + c2 * b[1][0], c1 * a[1][1] + c2 * b[1][1]],
    ]
}

/// The bilinear form `(X, Y) = det(X + Y) - det X - det Y` attached to
/// `q = det`.
pub fn det_pair(x: &Mat2Z, y: &Mat2Z) -> i64 {
    x[0][0] * y[1][1] + x[1][1] * y[0][0] - x[0][1] * y[1][0] - x[1][0] * y[0][1]
}

/// The half-integral matrix `[[a, b/2], [b/2, c]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GramTriple {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl GramTriple {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        GramTriple { a, b, c }
    }

    /// `4ac - b^2 = 4 det`.
    pub fn disc(&self) -> i64 {
        4 * self.a * self.c - self.b * self.b
    }

    pub fn is_pos_def(&self) -> bool {
        self.a > 0 && self.disc() > 0
    }

    pub fn content(&self) -> i64 {
        gcd_all(&[self.a, self.b, self.c])
    }

    /// `u^t T u`.
    pub fn transform(&self, u: &Mat2Z) -> GramTriple {
        let (a, b, c) = (self.a, self.b, self.c);
        let [[p, r], [s, t]] = *u;
        GramTriple {
            a: a * p * p + b * p * s + c * s * s,
            b: 2 * a * p * r + b * (p * t + r * s) + 2 * c * s * t,
            c: a * r * r + b * r * t + c * t * t,
        }
    }

    /// Multiplies every entry by `k`.
    pub fn scale(&self, k: i64) -> GramTriple {
        GramTriple { a: k * self.a, b: k * self.b, c: k * self.c }
    }

    /// Divides by `k`, returning `None` unless `k` divides every entry.
    pub fn div(&self, k: i64) -> Option<GramTriple> {
        if k != 0 && self.a % k == 0 && self.b % k == 0 && self.c % k == 0 {
            Some(GramTriple { a: self.a / k, b: self.b / k, c: self.c / k })
        } else {
            None
        }
    }

    /// Canonical representative of the `GL2(Z)`-class of a positive
    /// semidefinite triple: `0 <= b <= a <= c`.
    pub fn reduce(&self) -> Result<GramTriple> {
        let (mut a, mut b, mut c) = (self.a, self.b, self.c);
        if a < 0 || c < 0 || self.disc() < 0 {
            return Err(Error::Invalid(format!("{self} is not positive semidefinite")));
        }
        loop {
            if a == 0 {
                if b != 0 {
                    return Err(Error::Invalid(format!("{self} is not positive semidefinite")));
                }
                return Ok(GramTriple::new(0, 0, c));
            }
            if b.abs() > a || b == -a {
                // b -> b - 2ak with the result in (-a, a].
                let k = (b + a - 1).div_euclid(2 * a);
                c += a * k * k - b * k;
                b -= 2 * a * k;
                continue;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if c == 0 {
                return Ok(GramTriple::new(0, 0, a));
            }
            return Ok(GramTriple::new(a, b.abs(), c));
        }
    }
}

impl fmt::Display for GramTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

/// A pair `lambda = [T1, T2]` of 2x2 integer matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexPair {
    pub t1: Mat2Z,
    pub t2: Mat2Z,
}

impl IndexPair {
    pub fn new(t1: Mat2Z, t2: Mat2Z) -> Self {
        IndexPair { t1, t2 }
    }

    pub fn is_zero(&self) -> bool {
        self.t1 == [[0, 0], [0, 0]] && self.t2 == [[0, 0], [0, 0]]
    }

    /// `k lambda`.
    pub fn scale(&self, k: i64) -> IndexPair {
        IndexPair { t1: lin2(k, &self.t1, 0, &self.t1), t2: lin2(k, &self.t2, 0, &self.t2) }
    }

    /// Right action `[T1, T2] g = [g11 T1 + g21 T2, g12 T1 + g22 T2]`.
    pub fn act(&self, g: &Mat2Z) -> IndexPair {
        IndexPair {
            t1: lin2(g[0][0], &self.t1, g[1][0], &self.t2),
            t2: lin2(g[0][1], &self.t1, g[1][1], &self.t2),
        }
    }

    /// `lambda r^-1` when it is integral.
    pub fn div_right(&self, r: &Mat2Z) -> Option<IndexPair> {
        let d = det2(r);
        if d == 0 {
            return None;
        }
        let p = self.act(&adj2(r));
        let ok = [p.t1, p.t2].iter().flatten().flatten().all(|x| x % d == 0);
        if !ok {
            return None;
        }
        let dv = |m: Mat2Z| m.map(|row| row.map(|x| x / d));
        Some(IndexPair { t1: dv(p.t1), t2: dv(p.t2) })
    }

    /// The four rows `(T1_ij, T2_ij)` of the 4x2 matrix whose columns are
    /// the entries of `T1` and `T2`.
    pub fn columns(&self) -> [[i64; 2]; 4] {
        [
            [self.t1[0][0], self.t2[0][0]],
            [self.t1[0][1], self.t2[0][1]],
            [self.t1[1][0], self.t2[1][0]],
            [self.t1[1][1], self.t2[1][1]],
        ]
    }

    /// Smith elementary divisors `(d1, d2)` of [`IndexPair::columns`], with
    /// `d2 = 0` when the rank is below two.
    pub fn smith_divisors(&self) -> (i64, i64) {
        let rows = self.columns();
        let d1 = gcd_all(&rows.iter().flatten().copied().collect::<Vec<_>>());
        let mut minors = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                minors = gcd(minors, rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0]);
            }
        }
        if d1 == 0 {
            (0, 0)
        } else {
            (d1, minors / d1)
        }
    }
}

impl fmt::Display for IndexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = |m: &Mat2Z| format!("[[{},{}],[{},{}]]", m[0][0], m[0][1], m[1][0], m[1][1]);
        write!(f, "({}, {})", m(&self.t1), m(&self.t2))
    }
}

/// Upper-triangular representatives `[[a, b], [0, d]]`, `ad = n`,
/// `0 <= b < d`, of `GL2(Z) \ {r : |det r| = n}`.
pub fn hnf_left_cosets(n: u64) -> Vec<Mat2Z> {
    let n = n as i64;
    let mut out = Vec::new();
    for a in 1..=n {
        if n % a != 0 {
            continue;
        }
        let d = n / a;
        for b in 0..d {
            out.push([[a, b], [0, d]]);
        }
    }
    out
}

/// Representatives of `{g : |det g| = n} / GL2(Z)`, the transposes of
/// [`hnf_left_cosets`].
pub fn hnf_right_cosets(n: u64) -> Vec<Mat2Z> {
    hnf_left_cosets(n).iter().map(transpose2).collect()
}

/// The Gram matrix `S(lambda) = 1/2 ((T_i, T_j))` as a triple
/// `(det T1, (T1, T2), det T2)`.
pub fn gram(l: &IndexPair) -> GramTriple {
    GramTriple { a: det2(&l.t1), b: det_pair(&l.t1, &l.t2), c: det2(&l.t2) }
}

/// True when the only integral right divisors of `lambda` are unimodular,
/// i.e. both Smith divisors of [`IndexPair::columns`] equal one.
pub fn is_strongly_primitive(l: &IndexPair) -> Result<bool> {
    if l.is_zero() {
        return Err(Error::Invalid("strong primitivity is undefined for the zero pair".into()));
    }
    Ok(l.smith_divisors() == (1, 1))
}

/// The strongly primitive pair `T1 = [[1, 0], [b, a]]`, `T2 = [[0, -1], [c, 0]]`
/// with Gram triple `t`.
pub fn breve(t: &GramTriple) -> IndexPair {
    IndexPair { t1: [[1, 0], [t.b, t.a]], t2: [[0, -1], [t.c, 0]] }
}

/// The pair `T1 = [[a, 0], [b, 1]]`, `T2 = [[0, -1], [c, 0]]` with Gram
/// triple `t`, which corresponds to `(a b3 - b b4 + b-3, -c b4 - b-4)`.
pub fn fj_pair(t: &GramTriple) -> IndexPair {
    IndexPair { t1: [[t.a, 0], [t.b, 1]], t2: [[0, -1], [t.c, 0]] }
}

/// All `(r, lambda r^-1)` with `r` an HNF left-coset representative and
/// `lambda r^-1` integral.
pub fn divisor_cosets(l: &IndexPair) -> Result<Vec<(Mat2Z, IndexPair)>> {
    let (d1, d2) = l.smith_divisors();
    if d2 == 0 {
        return Err(Error::Degenerate(format!(
            "{l} has rank below two, so it has infinitely many divisors"
        )));
    }
    let bound = (d1 * d2) as u64;
    let mut out = Vec::new();
    for n in crate::arith::divisors(bound) {
        for r in hnf_left_cosets(n) {
            if let Some(m) = l.div_right(&r) {
                out.push((r, m));
            }
        }
    }
    Ok(out)
}

/// Reduced positive definite triples `0 <= b <= a <= c` with
/// `4ac - b^2 <= disc_bound`, sorted.
pub fn reduced_triples(disc_bound: i64) -> Vec<GramTriple> {
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= disc_bound {
        for b in 0..=a {
            let mut c = a;
            while 4 * a * c - b * b <= disc_bound {
                if 4 * a * c - b * b > 0 {
                    out.push(GramTriple::new(a, b, c));
                }
                c += 1;
            }
        }
        a += 1;
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sigma1;

    #[test]
    fn hnf_examples() {
        assert_eq!(hnf_left_cosets(1), vec![ID2]);
        assert_eq!(
            hnf_left_cosets(2),
            vec![[[1, 0], [0, 2]], [[1, 1], [0, 2]], [[2, 0], [0, 1]]]
        );
        assert_eq!(hnf_left_cosets(4).len(), 7);
        for n in 1..=30 {
            assert_eq!(hnf_left_cosets(n).len() as u64, sigma1(n));
        }
    }

    #[test]
    fn gram_examples() {
        let t = GramTriple::new(3, -2, 5);
        assert_eq!(gram(&fj_pair(&t)), t);
        let m = [[2, 1], [-1, 3]];
        let d = det2(&m);
        assert_eq!(gram(&IndexPair::new(m, m)), GramTriple::new(d, 2 * d, d));
        assert_eq!(gram(&IndexPair::new([[0, 0], [0, 0]], [[0, 0], [0, 0]])), GramTriple::new(0, 0, 0));
    }

    #[test]
    fn breve_postcondition() {
        for (a, b, c) in [(1, 0, 1), (2, 1, 3), (5, -3, 2), (0, 0, 0), (-1, 4, 2)] {
            let t = GramTriple::new(a, b, c);
            let l = breve(&t);
            assert_eq!(gram(&l), t);
            assert!(is_strongly_primitive(&l).unwrap());
        }
        let l = breve(&GramTriple::new(1, 0, 1));
        assert_eq!(l.t1, ID2);
        assert_eq!(det2(&l.t2), 1);
    }

    #[test]
    fn printed_breve_flips_the_middle_entry() {
        let t = GramTriple::new(2, 1, 3);
        let printed = IndexPair::new([[1, 0], [t.b, t.a]], [[0, 1], [-t.c, 0]]);
        assert_eq!(gram(&printed), GramTriple::new(2, -1, 3));
    }

    #[test]
    fn strong_primitivity_examples() {
        let l = IndexPair::new([[2, 0], [0, 2]], [[0, 2], [2, 0]]);
        assert!(!is_strongly_primitive(&l).unwrap());
        assert!(is_strongly_primitive(&fj_pair(&GramTriple::new(4, 3, 7))).unwrap());
        let z = IndexPair::new([[0, 0], [0, 0]], [[0, 0], [0, 0]]);
        assert!(is_strongly_primitive(&z).is_err());
        // Columns (1,1,0,0) and (0,0,1,1) generate a saturated lattice.
        let l = IndexPair::new([[1, 1], [0, 0]], [[0, 0], [1, 1]]);
        assert!(is_strongly_primitive(&l).unwrap());
    }

    #[test]
    fn divisor_cosets_examples() {
        let mu = breve(&GramTriple::new(1, 0, 1));
        let d = divisor_cosets(&mu).unwrap();
        assert_eq!(d, vec![(ID2, mu)]);
        let d = divisor_cosets(&mu.scale(2)).unwrap();
        let dets: Vec<i64> = d.iter().map(|(r, _)| det2(r)).collect();
        assert_eq!(dets, vec![1, 2, 2, 2, 4]);
        assert_eq!(d[4].0, [[2, 0], [0, 2]]);
        let deg = IndexPair::new([[0, 0], [0, 0]], [[1, 2], [0, 1]]);
        assert!(divisor_cosets(&deg).is_err());
    }

    #[test]
    fn reduced_triple_enumeration() {
        let r = reduced_triples(23);
        assert!(r.contains(&GramTriple::new(1, 1, 6)));
        assert!(r.contains(&GramTriple::new(2, 1, 3)));
        for t in &r {
            assert_eq!(t.reduce().unwrap(), *t);
            assert!(t.disc() <= 23);
        }
        assert_eq!(r.iter().filter(|t| t.disc() == 23).count(), 2);
    }

    #[test]
    fn reduction() {
        assert_eq!(GramTriple::new(3, 5, 4).reduce().unwrap(), GramTriple::new(2, 1, 3));
        assert_eq!(GramTriple::new(1, -1, 1).reduce().unwrap(), GramTriple::new(1, 1, 1));
        assert_eq!(GramTriple::new(4, 0, 0).reduce().unwrap(), GramTriple::new(0, 0, 4));
        assert_eq!(GramTriple::new(1, 2, 1).reduce().unwrap(), GramTriple::new(0, 0, 1));
        assert!(GramTriple::new(1, 3, 1).reduce().is_err());
        let t = GramTriple::new(7, 11, 5);
        let u = [[2, 1], [5, 3]];
        assert_eq!(t.transform(&u).reduce().unwrap(), t.reduce().unwrap());
    }
}
