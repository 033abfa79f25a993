//! Coefficient tables and the identities relating them: the classical
//! Maass lift, the quaternionic theta lift, the Spezialschar conditions,
//! Fourier-Jacobi extraction and the Dirichlet series factorization.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::arith::{divisors, q, qpow, Q};
use crate::coset::{
    breve, det2, divisor_cosets, fj_pair, gram, hnf_left_cosets, hnf_right_cosets,
    is_strongly_primitive, reduced_triples, GramTriple, IndexPair, Mat2Z,
};
use crate::error::{Error, Result};
use crate::quadspace::GaussRational;

/// Outcome of a relation check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    /// True when every checked relation held.
    pub ok: bool,
    /// Number of relations evaluated.
    pub checked: usize,
    /// Description of the first violated relation.
    pub failure: Option<String>,
}

impl CheckReport {
    fn pass(checked: usize) -> Self {
        CheckReport { ok: true, checked, failure: None }
    }

    fn fail(checked: usize, why: String) -> Self {
        CheckReport { ok: false, checked, failure: Some(why) }
    }
}

/// Coefficients `c(n)` of a half-integral weight form in the plus space.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HalfIntegralTable {
    pub weight: i64,
    pub entries: BTreeMap<i64, GaussRational>,
}

impl HalfIntegralTable {
    pub fn new(weight: i64) -> Self {
        HalfIntegralTable { weight, entries: BTreeMap::new() }
    }

    /// Inserts `c(n)`; rejects indices outside the plus-space support.
    pub fn insert(&mut self, n: i64, value: GaussRational) -> Result<()> {
        if n < 0 || !matches!(n.rem_euclid(4), 0 | 3) {
            return Err(Error::Invalid(format!("c({n}) must vanish in the plus space")));
        }
        self.entries.insert(n, value);
        Ok(())
    }

    /// `c(n)`, which is zero for `n < 0` and `n = 1, 2 mod 4`.
    pub fn get(&self, n: i64) -> Result<GaussRational> {
        if n < 0 || !matches!(n.rem_euclid(4), 0 | 3) {
            return Ok(GaussRational::zero());
        }
        self.entries
            .get(&n)
            .cloned()
            .ok_or_else(|| Error::InsufficientTable(format!("c({n})")))
    }
}

/// Fourier coefficients `a_F(T)` of a genus-two Siegel form, keyed by
/// reduced Gram triples.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SiegelTable {
    pub weight: i64,
    pub cuspidal: bool,
    pub entries: BTreeMap<GramTriple, GaussRational>,
}

impl SiegelTable {
    pub fn new(weight: i64, cuspidal: bool) -> Self {
        SiegelTable { weight, cuspidal, entries: BTreeMap::new() }
    }

    /// Cusp-form table with `a_F(t) = f(t)` on every reduced positive
    /// definite `t` with `4ac - b^2 <= disc_bound`.
    pub fn from_fn(weight: i64, disc_bound: i64, mut f: impl FnMut(&GramTriple) -> GaussRational) -> Self {
        let mut t = SiegelTable::new(weight, true);
        for k in reduced_triples(disc_bound) {
            let v = f(&k);
            t.entries.insert(k, v);
        }
        t
    }

    /// Inserts a value under the reduced form of `t`.
    pub fn insert(&mut self, t: &GramTriple, value: GaussRational) -> Result<()> {
        let r = t.reduce()?;
        if self.cuspidal && !r.is_pos_def() {
            return Err(Error::Invalid(format!("cusp form table key {t} is not positive definite")));
        }
        self.entries.insert(r, value);
        Ok(())
    }

    /// `a_F(t)`, looked up through Gauss reduction. Degenerate keys of a
    /// cusp form give zero.
    pub fn get(&self, t: &GramTriple) -> Result<GaussRational> {
        let r = t.reduce()?;
        if self.cuspidal && !r.is_pos_def() {
            return Ok(GaussRational::zero());
        }
        self.entries
            .get(&r)
            .cloned()
            .ok_or_else(|| Error::InsufficientTable(format!("a_F{r}")))
    }
}

/// Fourier coefficients `a_phi(lambda)` of a quaternionic modular form.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QuatTable {
    pub weight: i64,
    pub entries: BTreeMap<IndexPair, GaussRational>,
}

impl QuatTable {
    pub fn new(weight: i64) -> Self {
        QuatTable { weight, entries: BTreeMap::new() }
    }

    /// Inserts a value; the key must have positive definite Gram matrix.
    pub fn insert(&mut self, l: IndexPair, value: GaussRational) -> Result<()> {
        if !gram(&l).is_pos_def() {
            return Err(Error::Invalid(format!("key {l} is not positive definite")));
        }
        self.entries.insert(l, value);
        Ok(())
    }

    pub fn get(&self, l: &IndexPair) -> Result<GaussRational> {
        self.entries
            .get(l)
            .cloned()
            .ok_or_else(|| Error::InsufficientTable(format!("a_phi{l}")))
    }
}

/// A Dirichlet polynomial `sum_{n <= N} a_n n^-s`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DirichletPoly {
    pub bound: u64,
    pub coeffs: BTreeMap<u64, GaussRational>,
}

impl DirichletPoly {
    pub fn coeff(&self, n: u64) -> GaussRational {
        self.coeffs.get(&n).cloned().unwrap_or_else(GaussRational::zero)
    }

    /// Dirichlet convolution truncated at the smaller bound.
    pub fn mul(&self, other: &DirichletPoly) -> DirichletPoly {
        let bound = self.bound.min(other.bound);
        let mut coeffs = BTreeMap::new();
        for n in 1..=bound {
            let mut s = GaussRational::zero();
            for d in divisors(n) {
                let a = self.coeff(d);
                if a.is_zero() {
                    continue;
                }
                s += &(&a * &other.coeff(n / d));
            }
            if !s.is_zero() {
                coeffs.insert(n, s);
            }
        }
        DirichletPoly { bound, coeffs }
    }
}

fn weight_factor(det: i64, weight: i64) -> Q {
    qpow(&q(det.abs()), weight - 1)
}

/// The classical Maass lift on all reduced positive definite triples with
/// `4ac - b^2 <= bound`:
/// `A(a, b, c) = sum_{d | (a, b, c)} d^{l-1} c((4ac - b^2) / d^2)`.
pub fn classical_maass_lift(c: &HalfIntegralTable, weight: i64, bound: i64) -> Result<SiegelTable> {
    if weight % 2 != 0 || bound < 1 {
        return Err(Error::Invalid("weight must be even and bound positive".into()));
    }
    let mut out = SiegelTable::new(weight, true);
    for t in reduced_triples(bound) {
        let mut s = GaussRational::zero();
        for d in divisors(t.content() as u64) {
            let d = d as i64;
            let v = c.get(t.disc() / (d * d))?;
            s += &v.scale(&weight_factor(d, weight));
        }
        out.entries.insert(t, s);
    }
    Ok(out)
}

/// Checks `a_F(a, b, c) = sum_{d | (a, b, c)} d^{l-1} a_F(ac / d^2, b / d, 1)`
/// for every key of the table.
pub fn classical_maass_check(f: &SiegelTable) -> Result<CheckReport> {
    let mut checked = 0;
    for (t, v) in &f.entries {
        let mut s = GaussRational::zero();
        for d in divisors(t.content() as u64) {
            let d = d as i64;
            let key = GramTriple::new(t.a * t.c / (d * d), t.b / d, 1);
            s += &f.get(&key)?.scale(&weight_factor(d, f.weight));
        }
        checked += 1;
        if s != *v {
            return Ok(CheckReport::fail(checked, format!("relation fails at {t}")));
        }
    }
    Ok(CheckReport::pass(checked))
}

/// Coefficients `c(4n - r^2)` of the Jacobi form attached to `c`, for
/// `0 <= n <= nmax` and `r^2 <= 4n`.
pub fn jacobi_coeffs(c: &HalfIntegralTable, nmax: i64) -> Result<BTreeMap<(i64, i64), GaussRational>> {
    let mut out = BTreeMap::new();
    for n in 0..=nmax {
        let mut r = 0i64;
        while r * r <= 4 * n {
            for rr in if r == 0 { vec![0] } else { vec![r, -r] } {
                out.insert((n, rr), c.get(4 * n - rr * rr)?);
            }
            r += 1;
        }
    }
    Ok(out)
}

/// `theta*(F)` at `lambda`:
/// `sum_r |det r|^{l-1} conj(a_F(S(lambda r^-1)))`.
pub fn theta_star(f: &SiegelTable, l: &IndexPair) -> Result<GaussRational> {
    if !gram(l).is_pos_def() {
        return Err(Error::Invalid(format!("{l} does not have positive definite Gram matrix")));
    }
    let mut s = GaussRational::zero();
    for (r, mu) in divisor_cosets(l)? {
        let v = f.get(&gram(&mu))?;
        if !v.is_zero() {
            s += &v.conj().scale(&weight_factor(det2(&r), f.weight));
        }
    }
    Ok(s)
}

/// A few unimodular matrices used to produce distinct strongly primitive
/// keys with equal Gram matrix.
const UNIMODULAR_SAMPLE: [Mat2Z; 3] = [[[1, 1], [0, 1]], [[0, 1], [1, 0]], [[2, 1], [1, 1]]];

/// Adds `breve(S(lambda r^-1))` for every key and admissible `r`, so that
/// the Spezialschar conditions can be evaluated on the key set.
pub fn close_keys(keys: &BTreeSet<IndexPair>) -> Result<BTreeSet<IndexPair>> {
    let mut out = keys.clone();
    for l in keys {
        for (_, mu) in divisor_cosets(l)? {
            out.insert(breve(&gram(&mu)));
        }
    }
    Ok(out)
}

/// The standard key set for tables up to `det S(lambda) <= detbound`:
/// `breve(t) g` for reduced `t` and right coset representatives `g` with
/// `det(g)^2 det(t) <= detbound`, the pairs `fj_pair(t)`, a few unimodular
/// translates of both, closed under [`close_keys`].
pub fn standard_keys(detbound: i64) -> Result<BTreeSet<IndexPair>> {
    let mut keys = BTreeSet::new();
    for t in reduced_triples(4 * detbound) {
        let mut n: i64 = 1;
        while n * n * t.disc() <= 4 * detbound {
            for g in hnf_right_cosets(n as u64) {
                keys.insert(breve(&t).act(&g));
            }
            n += 1;
        }
        keys.insert(fj_pair(&t));
        for u in &UNIMODULAR_SAMPLE {
            keys.insert(fj_pair(&t).act(u));
            keys.insert(breve(&t).act(u));
        }
    }
    close_keys(&keys)
}

/// Keys `lambda g` for right coset representatives `g` with
/// `det g <= n_max`, closed under [`close_keys`].
pub fn dirichlet_keys(l: &IndexPair, n_max: u64) -> Result<BTreeSet<IndexPair>> {
    let mut keys = BTreeSet::new();
    for n in 1..=n_max {
        for g in hnf_right_cosets(n) {
            keys.insert(l.act(&g));
        }
    }
    close_keys(&keys)
}

/// The largest discriminant `4 det S` among a key set, which bounds the
/// Siegel coefficients the lift needs.
pub fn max_disc(keys: &BTreeSet<IndexPair>) -> i64 {
    keys.iter().map(|k| gram(k).disc()).max().unwrap_or(0)
}

/// `theta*(F)` on an explicit key set.
pub fn theta_star_on(f: &SiegelTable, keys: &BTreeSet<IndexPair>) -> Result<QuatTable> {
    let mut out = QuatTable::new(f.weight);
    for l in keys {
        out.entries.insert(*l, theta_star(f, l)?);
    }
    Ok(out)
}

/// `theta*(F)` on [`standard_keys`]`(detbound)`.
pub fn theta_star_table(f: &SiegelTable, detbound: i64) -> Result<QuatTable> {
    if !f.cuspidal {
        return Err(Error::Invalid("theta* is defined here for cusp form tables".into()));
    }
    if f.entries.is_empty() {
        return Ok(QuatTable::new(f.weight));
    }
    theta_star_on(f, &standard_keys(detbound)?)
}

/// `a_phi^prim(lambda) = a_phi(breve(S(lambda)))`.
pub fn a_prim(phi: &QuatTable, l: &IndexPair) -> Result<GaussRational> {
    if phi.entries.is_empty() {
        return Ok(GaussRational::zero());
    }
    phi.get(&breve(&gram(l)))
}

/// Checks condition (i): strongly primitive keys with equal Gram matrix
/// carry equal coefficients.
pub fn maass_condition_i(phi: &QuatTable) -> Result<CheckReport> {
    let mut seen: BTreeMap<GramTriple, (IndexPair, GaussRational)> = BTreeMap::new();
    let mut checked = 0;
    for (l, v) in &phi.entries {
        if !is_strongly_primitive(l)? {
            continue;
        }
        checked += 1;
        let s = gram(l);
        match seen.get(&s) {
            Some((l0, v0)) if v0 != v => {
                return Ok(CheckReport::fail(checked, format!("a({l0}) != a({l}) with equal Gram {s}")));
            }
            Some(_) => {}
            None => {
                seen.insert(s, (*l, v.clone()));
            }
        }
    }
    Ok(CheckReport::pass(checked))
}

fn divisor_sum(phi: &QuatTable, l: &IndexPair) -> Result<GaussRational> {
    let mut s = GaussRational::zero();
    for (r, mu) in divisor_cosets(l)? {
        s += &phi.get(&breve(&gram(&mu)))?.scale(&weight_factor(det2(&r), phi.weight));
    }
    Ok(s)
}

/// Checks condition (ii): `a(lambda) = sum_r |det r|^{l-1} a^prim(lambda r^-1)`.
pub fn maass_condition_ii(phi: &QuatTable) -> Result<CheckReport> {
    let mut checked = 0;
    for (l, v) in &phi.entries {
        checked += 1;
        if divisor_sum(phi, l)? != *v {
            return Ok(CheckReport::fail(checked, format!("condition (ii) fails at {l}")));
        }
    }
    Ok(CheckReport::pass(checked))
}

/// Spezialschar membership: conditions (i) and (ii), cross-checked against
/// the single combined condition, which is (ii) with `a^prim` replaced by
/// `a(breve(.))` and imposed on every key.
pub fn maass_membership(phi: &QuatTable) -> Result<CheckReport> {
    let first = maass_condition_i(phi)?;
    let separate = if first.ok { maass_condition_ii(phi)? } else { first.clone() };
    let combined = maass_condition_ii(phi)?;
    if separate.ok != combined.ok {
        return Err(Error::Internal(
            "conditions (i)+(ii) disagree with the combined condition".into(),
        ));
    }
    if !first.ok {
        return Ok(first);
    }
    Ok(CheckReport { checked: first.checked + separate.checked, ..separate })
}

/// `conj(a_phi(fj_pair(t)))`, the coefficient extracted through the
/// Fourier-Jacobi expansion and triality.
pub fn fj_extract(phi: &QuatTable, t: &GramTriple) -> Result<GaussRational> {
    if phi.entries.is_empty() {
        return Ok(GaussRational::zero());
    }
    Ok(phi.get(&fj_pair(t))?.conj())
}

fn coprime_to(n: u64, primes: &[u64]) -> bool {
    primes.iter().all(|p| !n.is_multiple_of(*p))
}

/// `D(s) = sum_g a_phi(lambda g) / |det g|^{s + l - 1}` over right cosets
/// with `det g <= n_max` coprime to the primes in `excluded`.
pub fn dirichlet_series(phi: &QuatTable, l: &IndexPair, n_max: u64, excluded: &[u64]) -> Result<DirichletPoly> {
    if !is_strongly_primitive(l)? {
        return Err(Error::Invalid(format!("{l} is not strongly primitive")));
    }
    dirichlet_with(phi, l, n_max, excluded, |m| phi.get(m))
}

fn dirichlet_with(
    phi: &QuatTable,
    l: &IndexPair,
    n_max: u64,
    excluded: &[u64],
    value: impl Fn(&IndexPair) -> Result<GaussRational>,
) -> Result<DirichletPoly> {
    let mut coeffs = BTreeMap::new();
    for n in 1..=n_max {
        if !coprime_to(n, excluded) {
            continue;
        }
        let mut s = GaussRational::zero();
        for g in hnf_right_cosets(n) {
            s += &value(&l.act(&g))?;
        }
        let s = s.scale(&weight_factor(n as i64, phi.weight).recip());
        if !s.is_zero() {
            coeffs.insert(n, s);
        }
    }
    Ok(DirichletPoly { bound: n_max, coeffs })
}

/// Checks the factorization `D = (sum_r |det r|^-s) * (sum_g a^prim(lambda g)
/// / |det g|^{s+l-1})` coefficientwise up to `n_max`, together with the
/// coprimality of every divisor `r` of `lambda g` and of `g r^-1`.
pub fn dirichlet_factor_check(phi: &QuatTable, l: &IndexPair, n_max: u64, excluded: &[u64]) -> Result<CheckReport> {
    let lhs = dirichlet_series(phi, l, n_max, excluded)?;
    let prim = dirichlet_with(phi, l, n_max, excluded, |m| a_prim(phi, m))?;
    let mut zeta = DirichletPoly { bound: n_max, coeffs: BTreeMap::new() };
    for n in 1..=n_max {
        if coprime_to(n, excluded) {
            zeta.coeffs.insert(n, GaussRational::real(q(hnf_left_cosets(n).len() as i64)));
        }
    }
    let mut checked = 0;
    for n in 1..=n_max {
        if !coprime_to(n, excluded) {
            continue;
        }
        for g in hnf_right_cosets(n) {
            for (r, _) in divisor_cosets(&l.act(&g))? {
                let dr = det2(&r) as u64;
                let h = crate::coset::mul2(&g, &crate::coset::adj2(&r));
                let integral = h.iter().flatten().all(|x| x % det2(&r) == 0);
                let dh = n / dr;
                if !integral || !coprime_to(dr, excluded) || !coprime_to(dh, excluded) {
                    return Ok(CheckReport::fail(checked, format!("divisor {r:?} of lambda g for g = {g:?}")));
                }
            }
        }
    }
    let rhs = zeta.mul(&prim);
    for n in 1..=n_max {
        checked += 1;
        if lhs.coeff(n) != rhs.coeff(n) {
            return Ok(CheckReport::fail(checked, format!("coefficient of {n}^-s differs")));
        }
    }
    Ok(CheckReport::pass(checked))
}
