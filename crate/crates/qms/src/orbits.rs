//! Integral orbit reduction on the split lattice `L = Z^{2n}` under its
//! special orthogonal group: primitive vectors, complementary isotropic
//! planes, isotropic planes and pairs with given Gram matrix.
//!
//! Vectors are written in the basis `b1, ..., bn, b-n, ..., b-1`, so that
//! the Gram matrix is the antidiagonal identity.

use crate::arith::is_squarefree;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use crate::coset::GramTriple;
use crate::error::{Error, Result};

/// An integral vector of the split lattice.
pub type VectorZ = Vec<i128>;

fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

fn small(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Invalid(format!("{x} does not fit in 64 bits")))
}

type MatZ = Vec<Vec<i128>>;

/// The standard split lattice of rank `2n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitLattice {
    pub n: usize,
}

impl SplitLattice {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Invalid(format!("half-rank {n} is below 3")));
        }
        Ok(SplitLattice { n })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Position of `b_i` for `i` in `1..=n` or `-n..=-1`.
    pub fn pos(&self, i: i64) -> usize {
        let n = self.n as i64;
        assert!(i != 0 && i.abs() <= n, "basis index {i} out of range");
        if i > 0 {
            (i - 1) as usize
        } else {
            (2 * n + i) as usize
        }
    }

    /// The basis vector `b_i`.
    pub fn b(&self, i: i64) -> VectorZ {
        let mut v = vec![0; self.dim()];
        v[self.pos(i)] = 1;
        v
    }

    /// `(v, w) = sum_i v_i w_-i + v_-i w_i`.
    pub fn pair(&self, v: &[i128], w: &[i128]) -> Result<i128> {
        let d = self.dim();
        dot((0..d).map(|p| (v[p], w[d - 1 - p])))
    }

    /// `q(v) = (v, v) / 2`.
    pub fn q(&self, v: &[i128]) -> Result<i128> {
        Ok(self.pair(v, v)? / 2)
    }

    /// `S(T1, T2)` as the triple `(q(T1), (T1, T2), q(T2))`.
    pub fn gram(&self, t1: &[i128], t2: &[i128]) -> Result<GramTriple> {
        Ok(GramTriple::new(small(self.q(t1)?)?, small(self.pair(t1, t2)?)?, small(self.q(t2)?)?))
    }

    fn x_part(&self, v: &[i128]) -> Vec<i128> {
        (1..=self.n as i64).map(|i| v[self.pos(i)]).collect()
    }

    fn y_part(&self, v: &[i128]) -> Vec<i128> {
        (1..=self.n as i64).map(|i| v[self.pos(-i)]).collect()
    }
}

/// `(x1 ^ x2, y1 ^ y2) = (x1, y2)(x2, y1) - (x1, y1)(x2, y2)`.
pub fn wedge_pair(l: &SplitLattice, x1: &[i128], x2: &[i128], y1: &[i128], y2: &[i128]) -> Result<i128> {
    let first = mul(l.pair(x1, y2)?, l.pair(x2, y1)?)?;
    let second = mul(l.pair(x1, y1)?, l.pair(x2, y2)?)?;
    first.checked_sub(second).ok_or_else(overflow)
}

/// An integral isometry of determinant one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeIsometry {
    pub lattice: SplitLattice,
    pub g: MatZ,
}

fn identity(d: usize) -> MatZ {
    (0..d).map(|i| (0..d).map(|j| i128::from(i == j)).collect()).collect()
}

fn overflow() -> Error {
    Error::Domain("lattice arithmetic exceeds the 128-bit range".into())
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or_else(overflow)
}

fn dot(mut terms: impl Iterator<Item = (i128, i128)>) -> Result<i128> {
    terms.try_fold(0i128, |acc, (a, b)| acc.checked_add(mul(a, b)?).ok_or_else(overflow))
}

fn mat_vec(m: &MatZ, v: &[i128]) -> Result<Vec<i128>> {
    m.iter().map(|r| dot(r.iter().copied().zip(v.iter().copied()))).collect()
}

fn mat_mul(a: &MatZ, b: &MatZ) -> Result<MatZ> {
    let m = b[0].len();
    a.iter()
        .map(|row| (0..m).map(|j| dot(row.iter().copied().zip(b.iter().map(|r| r[j])))).collect())
        .collect()
}

fn det_bareiss(m: &MatZ) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

impl LatticeIsometry {
    /// Wraps `g` after checking `g^t J g = J` and `det g = 1`.
    pub fn new(lattice: SplitLattice, g: MatZ) -> Result<Self> {
        let d = lattice.dim();
        if g.len() != d || g.iter().any(|r| r.len() != d) {
            return Err(Error::Invalid("matrix has the wrong size".into()));
        }
        for i in 0..d {
            for j in 0..d {
                let ci: Vec<i128> = (0..d).map(|r| g[r][i]).collect();
                let cj: Vec<i128> = (0..d).map(|r| g[r][j]).collect();
                if lattice.pair(&ci, &cj)? != i128::from(i + j == d - 1) {
                    return Err(Error::Internal("matrix does not preserve the split form".into()));
                }
            }
        }
        if !det_bareiss(&g).is_one() {
            return Err(Error::Internal("isometry has determinant -1".into()));
        }
        Ok(LatticeIsometry { lattice, g })
    }

    pub fn identity(lattice: SplitLattice) -> Self {
        LatticeIsometry { lattice, g: identity(lattice.dim()) }
    }

    pub fn apply(&self, v: &[i128]) -> Result<VectorZ> {
        mat_vec(&self.g, v)
    }

    /// `self * other`, acting by `other` first.
    pub fn compose(&self, other: &LatticeIsometry) -> Result<LatticeIsometry> {
        Ok(LatticeIsometry { lattice: self.lattice, g: mat_mul(&self.g, &other.g)? })
    }

    /// The inverse `J g^t J`.
    pub fn inverse(&self) -> LatticeIsometry {
        let d = self.lattice.dim();
        let g = (0..d).map(|i| (0..d).map(|j| self.g[d - 1 - j][d - 1 - i]).collect()).collect();
        LatticeIsometry { lattice: self.lattice, g }
    }

    fn checked(self) -> Result<Self> {
        LatticeIsometry::new(self.lattice, self.g)
    }
}

/// A unimodular `n x n` matrix with its inverse.
#[derive(Clone, Debug)]
struct Unimodular {
    m: MatZ,
    inv: MatZ,
}

impl Unimodular {
    fn identity(n: usize) -> Self {
        Unimodular { m: identity(n), inv: identity(n) }
    }

    /// Left multiplication by the block acting on rows `i, j` as
    /// `[[p, q], [r, s]]` with `ps - qr = 1`.
    fn rows(&mut self, i: usize, j: usize, p: i128, q: i128, r: i128, s: i128) -> Result<()> {
        let n = self.m.len();
        for c in 0..n {
            let (a, b) = (self.m[i][c], self.m[j][c]);
            self.m[i][c] = dot([(p, a), (q, b)].into_iter())?;
            self.m[j][c] = dot([(r, a), (s, b)].into_iter())?;
        }
        // The inverse block [[s, -q], [-r, p]] acts on columns from the right.
        for row in 0..n {
            let (a, b) = (self.inv[row][i], self.inv[row][j]);
            self.inv[row][i] = dot([(a, s), (b, -r)].into_iter())?;
            self.inv[row][j] = dot([(a, -q), (b, p)].into_iter())?;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        let n = self.m.len();
        for c in 0..n {
            self.m[i][c] = -self.m[i][c];
            self.inv[c][i] = -self.inv[c][i];
        }
    }

    fn apply(&self, v: &[i128]) -> Result<Vec<i128>> {
        mat_vec(&self.m, v)
    }

    fn transpose_inverse(&self) -> Unimodular {
        Unimodular { m: transpose(&self.inv), inv: transpose(&self.m) }
    }
}

fn transpose(m: &MatZ) -> MatZ {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

/// A unimodular `M` acting on coordinates `start..` with `M v = g e_start`
/// and `g = gcd >= 0`, built by Euclid on the smallest entry with centered
/// remainders to keep the entries of `M` small.
fn hermite_to_first(v: &[i128], start: usize) -> Result<(Unimodular, i128)> {
    let n = v.len();
    let mut u = Unimodular::identity(n);
    let mut w = v.to_vec();
    loop {
        let piv = (start..n).filter(|&i| w[i] != 0).min_by_key(|&i| w[i].abs());
        let Some(p) = piv else { break };
        let mut changed = false;
        for j in start..n {
            if j == p || w[j] == 0 {
                continue;
            }
            let (mut k, r) = w[j].div_mod_floor(&w[p]);
            if 2 * r.abs() > w[p].abs() {
                k += 1;
            }
            u.rows(p, j, 1, 0, -k, 1)?;
            w[j] -= k * w[p];
            changed = true;
        }
        if !changed {
            if p != start {
                u.rows(start, p, 0, 1, -1, 0)?;
                w.swap(start, p);
                w[p] = -w[p];
            }
            break;
        }
    }
    if w[start] < 0 {
        u.negate_row(start);
        w[start] = -w[start];
    }
    Ok((u, w[start]))
}

impl SplitLattice {
    /// The Levi element `x -> A x`, `y -> A^{-t} y`.
    fn levi(&self, a: &Unimodular) -> LatticeIsometry {
        let d = self.dim();
        let mut g = vec![vec![0; d]; d];
        let ait = a.transpose_inverse();
        for i in 0..self.n {
            for j in 0..self.n {
                g[self.pos(i as i64 + 1)][self.pos(j as i64 + 1)] = a.m[i][j];
                g[self.pos(-(i as i64) - 1)][self.pos(-(j as i64) - 1)] = ait.m[i][j];
            }
        }
        LatticeIsometry { lattice: *self, g }
    }

    /// The Siegel unipotent `x -> x + B y` for skew `B`.
    fn siegel(&self, b: &MatZ) -> LatticeIsometry {
        let mut g = identity(self.dim());
        for i in 0..self.n {
            for j in 0..self.n {
                g[self.pos(i as i64 + 1)][self.pos(-(j as i64) - 1)] = b[i][j];
            }
        }
        LatticeIsometry { lattice: *self, g }
    }

    /// The opposite unipotent `y -> y + C x` for skew `C`.
    fn opposite(&self, c: &MatZ) -> LatticeIsometry {
        let mut g = identity(self.dim());
        for i in 0..self.n {
            for j in 0..self.n {
                g[self.pos(-(i as i64) - 1)][self.pos(j as i64 + 1)] = c[i][j];
            }
        }
        LatticeIsometry { lattice: *self, g }
    }

    /// The Weyl element exchanging `b_i <-> b_-i` and `b_j <-> b_-j`.
    fn weyl_pair(&self, i: i64, j: i64) -> LatticeIsometry {
        let mut g = identity(self.dim());
        for k in [i, j] {
            let (p, m) = (self.pos(k), self.pos(-k));
            g[p][p] = 0;
            g[m][m] = 0;
            g[p][m] = 1;
            g[m][p] = 1;
        }
        LatticeIsometry { lattice: *self, g }
    }
}

/// Sends a primitive `v` to `a b1 + b-1` with `a = q(v)`, working in the
/// sublattice spanned by `b_i, b_-i` for `i >= first`; the returned
/// isometry fixes the other basis vectors. Needs `n - first >= 2`.
fn reduce_vector_from(l: &SplitLattice, v: &[i128], first: usize) -> Result<LatticeIsometry> {
    let n = l.n;
    let a = l.q(v)?;
    let content = v.iter().fold(0, |g, &x| gcd(g, x));
    if content != 1 {
        return Err(Error::NotPrimitive(format!("vector has content {content}")));
    }
    let mut target = vec![0; l.dim()];
    target[l.pos(first as i64 + 1)] = a;
    target[l.pos(-(first as i64) - 1)] = 1;
    if v == target.as_slice() {
        return Ok(LatticeIsometry::identity(*l));
    }
    let mut walk = Walk { g: LatticeIsometry::identity(*l), cur: v.to_vec() };
    let y_content = l.y_part(&walk.cur)[first..].iter().fold(0, |g, &x| gcd(g, x));
    if y_content != 1 {
        // Hermite reduction of the X-part to a' b_first.
        let (u, ap) = hermite_to_first(&l.x_part(&walk.cur), first)?;
        walk.step(l.levi(&u))?;
        if ap != 0 {
            // Clear the Y-part beyond b_-(first+1) with the Levi fixing b_first.
            let (u2, _) = hermite_to_first(&l.y_part(&walk.cur), first + 1)?;
            walk.step(l.levi(&u2.transpose_inverse()))?;
            // Opposite unipotent adding a' b_-(first+2).
            let mut c = vec![vec![0; n]; n];
            c[first + 2][first] = 1;
            c[first][first + 2] = -1;
            walk.step(l.opposite(&c))?;
        }
    }
    // The Y-part is now primitive; send it to b_-first.
    let (u3, gy) = hermite_to_first(&l.y_part(&walk.cur), first)?;
    if gy != 1 {
        return Err(Error::Internal(format!("Y-part has content {gy} after reduction")));
    }
    walk.step(l.levi(&u3.transpose_inverse()))?;
    // Siegel unipotent clearing the X-part off b_first.
    let x = l.x_part(&walk.cur);
    let mut b = vec![vec![0; n]; n];
    for (i, &xi) in x.iter().enumerate().skip(first + 1) {
        b[i][first] = -xi;
        b[first][i] = xi;
    }
    walk.step(l.siegel(&b))?;
    if walk.cur != target {
        return Err(Error::Internal("primitive vector reduction missed its target".into()));
    }
    walk.g.checked()
}

/// An isometry accumulated step by step together with the image of a vector.
struct Walk {
    g: LatticeIsometry,
    cur: VectorZ,
}

impl Walk {
    fn step(&mut self, h: LatticeIsometry) -> Result<()> {
        self.cur = h.apply(&self.cur)?;
        self.g = h.compose(&self.g)?;
        Ok(())
    }
}

/// Reduction of a primitive vector: `g v = a b1 + b-1` with `a = q(v)`.
pub fn reduce_primitive_vector(l: &SplitLattice, v: &[i128]) -> Result<(LatticeIsometry, i128)> {
    if v.len() != l.dim() {
        return Err(Error::Invalid("vector has the wrong length".into()));
    }
    let g = reduce_vector_from(l, v, 0)?;
    Ok((g, l.q(v)?))
}

/// Checks that `D = (T1, T2)^2 - 4 q(T1) q(T2)` is odd and squarefree.
fn check_disc(l: &SplitLattice, t1: &[i128], t2: &[i128]) -> Result<i128> {
    if t1.len() != l.dim() || t2.len() != l.dim() {
        return Err(Error::Invalid("vector has the wrong length".into()));
    }
    let s = l.gram(t1, t2)?;
    let d = s.b as i128 * s.b as i128 - 4 * s.a as i128 * s.c as i128;
    let squarefree = u64::try_from(d.unsigned_abs()).map(is_squarefree).unwrap_or(false);
    if d % 2 == 0 || !squarefree {
        return Err(Error::HypothesisViolated(format!("D = {d} is not odd and squarefree")));
    }
    Ok(d)
}

fn require_n4(l: &SplitLattice) -> Result<()> {
    if l.n < 4 {
        return Err(Error::HypothesisViolated(format!("half-rank {} is below 4", l.n)));
    }
    Ok(())
}

/// The special form `g T1 = a b1 + b-1`, `g T2 = r b1 + s b-1 + m (beta b2 + b-2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialForm {
    pub g: LatticeIsometry,
    pub a: i128,
    pub r: i128,
    pub s: i128,
    pub m: i128,
    pub beta: i128,
}

/// Moves a pair to the special form by two primitive-vector reductions.
pub fn special_form(l: &SplitLattice, t1: &[i128], t2: &[i128]) -> Result<SpecialForm> {
    let (g1, a) = reduce_primitive_vector(l, t1)?;
    let v2 = g1.apply(t2)?;
    let (r, s) = (v2[l.pos(1)], v2[l.pos(-1)]);
    let mut rest = v2;
    rest[l.pos(1)] = 0;
    rest[l.pos(-1)] = 0;
    let m = rest.iter().fold(0, |g, &x| gcd(g, x));
    if m == 0 {
        return Ok(SpecialForm { g: g1, a, r, s, m: 0, beta: 0 });
    }
    let w: Vec<i128> = rest.iter().map(|x| x / m).collect();
    let g2 = reduce_vector_from(l, &w, 1)?;
    let g = g2.compose(&g1)?;
    let beta = g.apply(t2)?[l.pos(2)] / m;
    Ok(SpecialForm { g, a, r, s, m, beta })
}

/// A complementary isotropic pair `(u1, u2)` with
/// `(T1 ^ T2, u1 ^ u2) = 1`.
pub fn find_complementary_plane(l: &SplitLattice, t1: &[i128], t2: &[i128]) -> Result<(VectorZ, VectorZ)> {
    require_n4(l)?;
    check_disc(l, t1, t2)?;
    let sf = special_form(l, t1, t2)?;
    let alpha = mul(sf.a, sf.s)?.checked_sub(sf.r).ok_or_else(overflow)?;
    let (gg, x0, y0) = ext_gcd(alpha, sf.m);
    if gg != 1 {
        return Err(Error::HypothesisViolated(format!("gcd(alpha, m) = {gg}")));
    }
    // alpha x - m y = 1 with y = -y0.
    let (x, y) = (x0, -y0);
    let mut u1 = l.b(1);
    u1[l.pos(3)] = 1;
    let mut u2 = vec![0; l.dim()];
    u2[l.pos(-1)] = x;
    u2[l.pos(2)] = y;
    u2[l.pos(-3)] = -x;
    let inv = sf.g.inverse();
    let (u1, u2) = (inv.apply(&u1)?, inv.apply(&u2)?);
    if wedge_pair(l, t1, t2, &u1, &u2)? != 1 {
        return Err(Error::Internal("complementary plane does not pair to 1".into()));
    }
    Ok((u1, u2))
}

/// `gcd` of the `2 x 2` minors of the coordinate matrix of `u1, u2`.
pub fn wedge_content(u1: &[i128], u2: &[i128]) -> Result<i128> {
    let d = u1.len();
    let mut g = 0;
    for i in 0..d {
        for j in i + 1..d {
            let minor = mul(u1[i], u2[j])?.checked_sub(mul(u1[j], u2[i])?).ok_or_else(overflow)?;
            g = gcd(g, minor);
        }
    }
    Ok(g)
}

/// Isotropic plane reduction: `g u1 = b1`, `g u2 = b2` for an isotropic plane
/// with primitive wedge.
pub fn reduce_isotropic_plane(l: &SplitLattice, u1: &[i128], u2: &[i128]) -> Result<LatticeIsometry> {
    if u1.len() != l.dim() || u2.len() != l.dim() {
        return Err(Error::Invalid("vector has the wrong length".into()));
    }
    if l.q(u1)? != 0 || l.q(u2)? != 0 || l.pair(u1, u2)? != 0 {
        return Err(Error::Invalid("the plane is not isotropic".into()));
    }
    if wedge_content(u1, u2)? != 1 {
        return Err(Error::NotPrimitive("u1 ^ u2 is not primitive".into()));
    }
    let (b1, b2) = (l.b(1), l.b(2));
    if u1 == b1.as_slice() && u2 == b2.as_slice() {
        return Ok(LatticeIsometry::identity(*l));
    }
    // u1 -> b-1 -> b1.
    let g1 = reduce_vector_from(l, u1, 0)?;
    let g = l.weyl_pair(1, 2).compose(&g1)?;
    let v = g.apply(u2)?;
    // v = c b1 + w with w primitive isotropic, orthogonal to b1 and b-1.
    let c = v[l.pos(1)];
    let mut w = v;
    w[l.pos(1)] = 0;
    let g2 = reduce_vector_from(l, &w, 1)?;
    // g2 fixes b1, b-1 and sends w to b-2; swap b2 <-> b-2 together with b3 <-> b-3.
    let g = l.weyl_pair(2, 3).compose(&g2)?.compose(&g)?;
    // Now g u2 = c b1 + b2; the Levi element e2 -> e2 - c e1 finishes.
    let mut a = Unimodular::identity(l.n);
    a.rows(0, 1, 1, -c, 0, 1)?;
    let g = l.levi(&a).compose(&g)?;
    if g.apply(u1)? != b1 || g.apply(u2)? != b2 {
        return Err(Error::Internal("isotropic plane reduction missed its target".into()));
    }
    g.checked()
}

/// Pair reduction: `g T1 = a b1 + b-1`, `g T2 = b b1 + c b2 + b-2`.
pub fn reduce_pair(l: &SplitLattice, t1: &[i128], t2: &[i128]) -> Result<(LatticeIsometry, GramTriple)> {
    require_n4(l)?;
    check_disc(l, t1, t2)?;
    let s = l.gram(t1, t2)?;
    let (c1, c2) = canonical_pair(l, &s);
    if t1 == c1.as_slice() && t2 == c2.as_slice() {
        return Ok((LatticeIsometry::identity(*l), s));
    }
    let (u1, u2) = find_complementary_plane(l, t1, t2)?;
    let g1 = reduce_isotropic_plane(l, &u1, &u2)?;
    let (v1, v2) = (g1.apply(t1)?, g1.apply(t2)?);
    // The Y-parts span a primitive plane; move them to b-1, b-2.
    let (m1, e1) = hermite_to_first(&l.y_part(&v1), 0)?;
    if e1 != 1 {
        return Err(Error::Internal("Y-part of T1 is not primitive".into()));
    }
    let z = m1.apply(&l.y_part(&v2))?;
    let (m2, e2) = hermite_to_first(&z, 1)?;
    if e2 != 1 {
        return Err(Error::Internal("Y-parts do not span a primitive plane".into()));
    }
    let head = m2.apply(&z)?[0];
    let mut m3 = Unimodular::identity(l.n);
    m3.rows(0, 1, 1, -head, 0, 1)?;
    let m21 = Unimodular { m: mat_mul(&m2.m, &m1.m)?, inv: mat_mul(&m1.inv, &m2.inv)? };
    let y_map = Unimodular { m: mat_mul(&m3.m, &m21.m)?, inv: mat_mul(&m21.inv, &m3.inv)? };
    let g2 = l.levi(&y_map.transpose_inverse()).compose(&g1)?;
    let (x1, x2) = (l.x_part(&g2.apply(t1)?), l.x_part(&g2.apply(t2)?));
    let n = l.n;
    let mut b = vec![vec![0; n]; n];
    b[0][1] = s.b as i128 - x2[0];
    b[1][0] = -b[0][1];
    for i in 2..n {
        b[i][0] = -x1[i];
        b[0][i] = x1[i];
        b[i][1] = -x2[i];
        b[1][i] = x2[i];
    }
    let g = l.siegel(&b).compose(&g2)?;
    if g.apply(t1)? != c1 || g.apply(t2)? != c2 {
        return Err(Error::Internal("pair reduction missed the canonical pair".into()));
    }
    Ok((g.checked()?, s))
}

/// The canonical pair `(a b1 + b-1, b b1 + c b2 + b-2)`.
pub fn canonical_pair(l: &SplitLattice, s: &GramTriple) -> (VectorZ, VectorZ) {
    let mut t1 = l.b(-1);
    t1[l.pos(1)] = s.a.into();
    let mut t2 = l.b(-2);
    t2[l.pos(1)] = s.b.into();
    t2[l.pos(2)] = s.c.into();
    (t1, t2)
}

/// The generators used to build random isometries: Levi transvections,
/// Siegel and opposite unipotents and Weyl pairs.
pub fn generator(l: &SplitLattice, kind: usize, i: usize, j: usize, sign: i128) -> LatticeIsometry {
    let n = l.n;
    let (i, j) = (i % n, j % n);
    let j = if i == j { (j + 1) % n } else { j };
    let sign = sign.signum();
    match kind % 4 {
        0 => {
            let mut g = identity(l.dim());
            g[l.pos(i as i64 + 1)][l.pos(j as i64 + 1)] = sign;
            g[l.pos(-(j as i64) - 1)][l.pos(-(i as i64) - 1)] = -sign;
            LatticeIsometry { lattice: *l, g }
        }
        1 => {
            let mut b = vec![vec![0; n]; n];
            b[i][j] = sign;
            b[j][i] = -sign;
            l.siegel(&b)
        }
        2 => {
            let mut c = vec![vec![0; n]; n];
            c[i][j] = sign;
            c[j][i] = -sign;
            l.opposite(&c)
        }
        _ => l.weyl_pair(i as i64 + 1, j as i64 + 1),
    }
}

/// The product of generators indexed by a word of letters, each letter
/// encoding the kind, the indices and the sign of one generator.
pub fn word_isometry(l: &SplitLattice, letters: impl IntoIterator<Item = usize>) -> Result<LatticeIsometry> {
    let mut g = LatticeIsometry::identity(*l);
    for k in letters {
        let sign = if (k / 2048) % 2 == 0 { 1 } else { -1 };
        g = generator(l, k, k / 4, k / 64, sign).compose(&g)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l4() -> SplitLattice {
        SplitLattice::new(4).unwrap()
    }

    fn lcg(seed: &mut u64) -> u64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        *seed >> 33
    }

    fn random_vector(seed: &mut u64, d: usize, r: i128) -> VectorZ {
        (0..d).map(|_| (lcg(seed) % (2 * r as u64 + 1)) as i128 - r).collect()
    }

    fn random_isometry(l: &SplitLattice, seed: &mut u64, len: usize) -> LatticeIsometry {
        let letters: Vec<usize> = (0..len).map(|_| lcg(seed) as usize).collect();
        word_isometry(l, letters).unwrap()
    }

    #[test]
    fn wedge_pair_examples() {
        let l = l4();
        assert_eq!(wedge_pair(&l, &l.b(1), &l.b(2), &l.b(-2), &l.b(-1)).unwrap(), 1);
        let t1 = vec![1, 2, 0, -1, 3, 0, 1, 2];
        let t2 = vec![0, 1, 1, 2, -1, 1, 0, 1];
        let s = l.gram(&t1, &t2).unwrap();
        assert_eq!(wedge_pair(&l, &t1, &t2, &t1, &t2).unwrap(), (s.b * s.b - 4 * s.a * s.c) as i128);
        assert_eq!(wedge_pair(&l, &t1, &t1, &t2, &l.b(3)).unwrap(), 0);
    }

    #[test]
    fn generators_are_isometries() {
        let l = l4();
        for k in 0..64 {
            let g = generator(&l, k, k / 4, k / 16, if k % 2 == 0 { 1 } else { -1 });
            assert!(LatticeIsometry::new(l, g.g.clone()).is_ok(), "generator {k}");
            assert_eq!(g.compose(&g.inverse()).unwrap(), LatticeIsometry::identity(l));
        }
        let mut bad = LatticeIsometry::identity(l).g;
        bad[0][0] = 0;
        bad[0][7] = 1;
        bad[7][7] = 0;
        bad[7][0] = 1;
        assert!(LatticeIsometry::new(l, bad).is_err());
    }

    #[test]
    fn primitive_vector_examples() {
        let l = l4();
        let mut v = l.b(-1);
        v[0] = 5;
        let (g, a) = reduce_primitive_vector(&l, &v).unwrap();
        assert_eq!(g, LatticeIsometry::identity(l));
        assert_eq!(a, 5);
        let (g, a) = reduce_primitive_vector(&l, &l.b(1)).unwrap();
        assert_eq!(a, 0);
        assert_eq!(g.apply(&l.b(1)).unwrap(), l.b(-1));
        let twice: Vec<i128> = l.b(2).iter().map(|x| 2 * x).collect();
        assert!(matches!(reduce_primitive_vector(&l, &twice), Err(Error::NotPrimitive(_))));
    }

    #[test]
    fn random_primitive_vectors() {
        let l = l4();
        let mut seed = 17;
        let mut done = 0;
        while done < 500 {
            let v = random_vector(&mut seed, 8, 20);
            if v.iter().fold(0, |g, &x| gcd(g, x)) != 1 {
                continue;
            }
            let (g, a) = reduce_primitive_vector(&l, &v).unwrap();
            let mut target = l.b(-1);
            target[0] = l.q(&v).unwrap();
            assert_eq!(g.apply(&v).unwrap(), target);
            assert_eq!(a, l.q(&v).unwrap());
            done += 1;
        }
        let l3 = SplitLattice::new(3).unwrap();
        let v = vec![3, -2, 7, 1, 4, -5];
        let (g, a) = reduce_primitive_vector(&l3, &v).unwrap();
        let mut target = l3.b(-1);
        target[0] = a;
        assert_eq!(g.apply(&v).unwrap(), target);
    }

    #[test]
    fn complementary_plane_special_form() {
        let l = l4();
        // a = 2, r = 1, s = 0, m = 1, beta = 1: alpha = -1, D = 1 - 8 = -7.
        let mut t1 = l.b(-1);
        t1[l.pos(1)] = 2;
        let mut t2 = l.b(-2);
        t2[l.pos(1)] = 1;
        t2[l.pos(2)] = 1;
        let sf = special_form(&l, &t1, &t2).unwrap();
        assert_eq!((sf.a, sf.r, sf.s, sf.m, sf.beta), (2, 1, 0, 1, 1));
        let (u1, u2) = find_complementary_plane(&l, &t1, &t2).unwrap();
        let mut e1 = l.b(1);
        e1[l.pos(3)] = 1;
        assert_eq!(u1, e1);
        assert_eq!(l.q(&u1).unwrap(), 0);
        assert_eq!(l.q(&u2).unwrap(), 0);
        assert_eq!(l.pair(&u1, &u2).unwrap(), 0);
        assert_eq!(wedge_pair(&l, &t1, &t2, &u1, &u2).unwrap(), 1);
    }

    #[test]
    fn complementary_plane_hypotheses() {
        let l = l4();
        let mut t1 = l.b(-1);
        t1[0] = 1;
        let mut t2 = l.b(-2);
        t2[1] = 1;
        // D = 0 - 4 = -4 is even.
        assert!(matches!(find_complementary_plane(&l, &t1, &t2), Err(Error::HypothesisViolated(_))));
        let l3 = SplitLattice::new(3).unwrap();
        let a = vec![1, 0, 0, 0, 0, 1];
        let b = vec![1, 1, 0, 0, 1, 0];
        assert!(matches!(find_complementary_plane(&l3, &a, &b), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn isotropic_plane_examples() {
        let l = l4();
        assert_eq!(reduce_isotropic_plane(&l, &l.b(1), &l.b(2)).unwrap(), LatticeIsometry::identity(l));
        let g = reduce_isotropic_plane(&l, &l.b(2), &l.b(1)).unwrap();
        assert_eq!(g.apply(&l.b(2)).unwrap(), l.b(1));
        assert_eq!(g.apply(&l.b(1)).unwrap(), l.b(2));
        let mut seed = 5;
        for _ in 0..50 {
            let gamma = random_isometry(&l, &mut seed, 12);
            let (u1, u2) = (gamma.apply(&l.b(1)).unwrap(), gamma.apply(&l.b(2)).unwrap());
            let g = reduce_isotropic_plane(&l, &u1, &u2).unwrap();
            assert_eq!(g.apply(&u1).unwrap(), l.b(1));
            assert_eq!(g.apply(&u2).unwrap(), l.b(2));
        }
        let twice: Vec<i128> = l.b(2).iter().map(|x| 2 * x).collect();
        assert!(matches!(reduce_isotropic_plane(&l, &l.b(1), &twice), Err(Error::NotPrimitive(_))));
    }

    #[test]
    fn pair_reduction() {
        let l = l4();
        let s = GramTriple::new(2, 1, 3);
        let (c1, c2) = canonical_pair(&l, &s);
        let (g, t) = reduce_pair(&l, &c1, &c2).unwrap();
        assert_eq!(t, s);
        assert_eq!(g.apply(&c1).unwrap(), c1);
        let mut seed = 99;
        for _ in 0..20 {
            let gamma = random_isometry(&l, &mut seed, 15);
            let (t1, t2) = (gamma.apply(&c1).unwrap(), gamma.apply(&c2).unwrap());
            let (g, t) = reduce_pair(&l, &t1, &t2).unwrap();
            assert_eq!(t, s);
            assert_eq!(l.gram(&g.apply(&t1).unwrap(), &g.apply(&t2).unwrap()).unwrap(), s);
            assert_eq!((g.apply(&t1).unwrap(), g.apply(&t2).unwrap()), (c1.clone(), c2.clone()));
        }
    }

    #[test]
    fn overflow_is_reported() {
        let l = l4();
        let big = 1i128 << 100;
        let mut v = l.b(-1);
        v[0] = big;
        v[1] = big + 1;
        v[6] = big;
        assert!(matches!(reduce_primitive_vector(&l, &v), Err(Error::Domain(_))));
    }
}
