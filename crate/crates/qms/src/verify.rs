//! End-to-end verification pipelines with seeded synthetic data. Each
//! pipeline returns a [`SuiteReport`] carrying the number of cases, the
//! first counterexample and, for numeric checks, the worst error seen.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{invert, is_squarefree, qf, sigma1, Q};
use crate::coset::{breve, fj_pair, gram, hnf_left_cosets, is_strongly_primitive, reduced_triples, GramTriple, IndexPair};
use crate::error::Result;
use crate::lifts::{
    classical_maass_check, classical_maass_lift, dirichlet_factor_check, dirichlet_keys, fj_extract, max_disc,
    maass_membership, standard_keys, theta_star_on, theta_star_table, CheckReport, HalfIntegralTable, QuatTable,
    SiegelTable,
};
use crate::octonion::{conj, norm, oct_mul, trilinear, Octonion};
use crate::orbits::{canonical_pair, reduce_pair, word_isometry, SplitLattice};
use crate::quadspace::{bracket, cartan_theta, GaussRational};
use crate::triality::{
    explicit_triples, ge_basis, ge_bracket, phi_iso, phi_matrix, s3_act_cube, spin_triple, theta_e,
    verify_triality_triple, BhargavaCube, CUBE_CYCLE,
};
use crate::whittaker::{
    archimedean_integral_check, beta_fn, boost_y1, heisenberg_path, pair22, positivity_oracle, s_v_sum,
    ArchimedeanInput, Positivity, C, V22, Y0, Y1,
};

/// Outcome of a verification pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub ok: bool,
    pub checked: usize,
    pub failure: Option<String>,
    /// Worst error for numeric pipelines.
    pub max_error: Option<f64>,
    /// Slowest single case for pipelines with a per-case budget.
    pub max_case_time: Option<Duration>,
}

impl SuiteReport {
    fn pass(checked: usize) -> Self {
        SuiteReport { ok: true, checked, failure: None, max_error: None, max_case_time: None }
    }

    fn fail(checked: usize, why: String) -> Self {
        SuiteReport { ok: false, checked, failure: Some(why), max_error: None, max_case_time: None }
    }

    fn numeric(checked: usize, worst: f64, tol: f64, where_worst: String) -> Self {
        let mut r = if worst < tol {
            SuiteReport::pass(checked)
        } else {
            SuiteReport::fail(checked, format!("error {worst:e} at {where_worst}"))
        };
        r.max_error = Some(worst);
        r
    }
}

impl From<CheckReport> for SuiteReport {
    fn from(c: CheckReport) -> Self {
        SuiteReport { ok: c.ok, checked: c.checked, failure: c.failure, max_error: None, max_case_time: None }
    }
}

/// The deterministic generator used by every pipeline.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_q(rng: &mut ChaCha8Rng) -> Q {
    qf(rng.gen_range(-9..=9), rng.gen_range(1..=4))
}

/// A random Gaussian rational with numerators in `[-20, 20]` and
/// denominators in `1..=6`.
pub fn random_gauss(rng: &mut ChaCha8Rng) -> GaussRational {
    GaussRational::new(qf(rng.gen_range(-20..=20), rng.gen_range(1..=6)), qf(rng.gen_range(-20..=20), rng.gen_range(1..=6)))
}

/// A random octonion with small rational coordinates.
pub fn random_octonion(rng: &mut ChaCha8Rng) -> Octonion {
    Octonion::new(
        small_q(rng),
        std::array::from_fn(|_| small_q(rng)),
        std::array::from_fn(|_| small_q(rng)),
        small_q(rng),
    )
}

fn random_int_octonion(rng: &mut ChaCha8Rng) -> Octonion {
    let mut r = || rng.gen_range(-3..=3);
    Octonion::from_ints(r(), [r(), r(), r()], [r(), r(), r()], r())
}

/// Norm multiplicativity, `conj(xy) = conj(y) conj(x)` and cyclic symmetry
/// of the trilinear form, each on `cases` random rational octonions.
pub fn octonion_suite(seed: u64, cases: usize) -> SuiteReport {
    let mut rng = rng(seed);
    for k in 0..cases {
        let (x, y, z) = (random_octonion(&mut rng), random_octonion(&mut rng), random_octonion(&mut rng));
        let xy = oct_mul(&x, &y);
        if norm(&xy) != norm(&x) * norm(&y) {
            return SuiteReport::fail(3 * k, format!("norm multiplicativity fails for {x:?}, {y:?}"));
        }
        if conj(&xy) != oct_mul(&conj(&y), &conj(&x)) {
            return SuiteReport::fail(3 * k + 1, format!("conjugation fails for {x:?}, {y:?}"));
        }
        let t = trilinear(&x, &y, &z);
        if t != trilinear(&y, &z, &x) || t != trilinear(&z, &x, &y) {
            return SuiteReport::fail(3 * k + 2, format!("trilinear symmetry fails for {x:?}, {y:?}, {z:?}"));
        }
    }
    SuiteReport::pass(3 * cases)
}

/// Bracket preservation of `Phi` on all basis pairs, bijectivity,
/// compatibility with the Cartan involutions, the six explicit triples
/// and `random_triples` spin triples of random integral octonions.
pub fn triality_suite(seed: u64, random_triples: usize) -> Result<SuiteReport> {
    let basis = ge_basis();
    let images: Vec<_> = basis.iter().map(phi_iso).collect();
    let mut checked = 0;
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate() {
            checked += 1;
            if phi_iso(&ge_bracket(x, y)) != bracket(&images[i], &images[j])? {
                return Ok(SuiteReport::fail(checked, format!("Phi does not preserve [e{i}, e{j}]")));
            }
        }
    }
    checked += 1;
    if invert(&phi_matrix()).is_none() {
        return Ok(SuiteReport::fail(checked, "Phi is singular".into()));
    }
    for (i, x) in basis.iter().enumerate() {
        checked += 1;
        if phi_iso(&theta_e(x)) != cartan_theta(&images[i]) {
            return Ok(SuiteReport::fail(checked, format!("Phi does not commute with Theta on e{i}")));
        }
    }
    for (i, t) in explicit_triples().iter().enumerate() {
        checked += 1;
        if !verify_triality_triple(&t[0], &t[1], &t[2]) {
            return Ok(SuiteReport::fail(checked, format!("explicit triple {i} fails")));
        }
    }
    let mut rng = rng(seed);
    for _ in 0..random_triples {
        let (u, v) = (random_int_octonion(&mut rng), random_int_octonion(&mut rng));
        let t = spin_triple(&u, &v)?;
        checked += 1;
        if !verify_triality_triple(&t[0], &t[1], &t[2]) {
            return Ok(SuiteReport::fail(checked, format!("spin triple of {u:?}, {v:?} fails")));
        }
    }
    Ok(SuiteReport::pass(checked))
}

/// The cube transformation `(-c, (0,0,b), (1,a,1), 0) -> (-c, (0,b,0), (a,1,1), 0)`
/// for random `(a, b, c)`.
pub fn cube_suite(seed: u64, cases: usize) -> Result<SuiteReport> {
    let mut rng = rng(seed);
    for k in 0..cases {
        let (a, b, c) = (rng.gen_range(-50..=50), rng.gen_range(-50..=50), rng.gen_range(-50..=50));
        let w = BhargavaCube { alpha: -c, beta: [0, 0, b], gamma: [1, a, 1], delta: 0 };
        let expect = BhargavaCube { alpha: -c, beta: [0, b, 0], gamma: [a, 1, 1], delta: 0 };
        if s3_act_cube(CUBE_CYCLE, &w)? != expect {
            return Ok(SuiteReport::fail(k + 1, format!("cube transformation fails at ({a}, {b}, {c})")));
        }
    }
    Ok(SuiteReport::pass(cases))
}

/// `|hnf_left_cosets(n)| = sigma_1(n)` for `n <= n_max`.
pub fn coset_count_suite(n_max: u64) -> SuiteReport {
    for n in 1..=n_max {
        let count = hnf_left_cosets(n).len() as u64;
        if count != sigma1(n) {
            return SuiteReport::fail(n as usize, format!("{count} cosets of determinant {n}, expected {}", sigma1(n)));
        }
    }
    SuiteReport::pass(n_max as usize)
}

/// A random plus-space table `c(n)` for `0 <= n <= bound`, `n = 0, 3 mod 4`.
pub fn synth_halfintegral(seed: u64, weight: i64, bound: i64) -> HalfIntegralTable {
    let mut rng = rng(seed);
    let mut t = HalfIntegralTable::new(weight);
    for n in (0..=bound).filter(|n| matches!(n % 4, 0 | 3)) {
        t.entries.insert(n, random_gauss(&mut rng));
    }
    t
}

/// A random cusp-form table on all reduced triples with `4ac - b^2 <= disc_bound`.
pub fn synth_siegel(seed: u64, weight: i64, disc_bound: i64) -> SiegelTable {
    let mut rng = rng(seed);
    SiegelTable::from_fn(weight, disc_bound, |_| random_gauss(&mut rng))
}

/// A random quaternionic table on [`standard_keys`]`(detbound)`.
pub fn synth_quaternionic(seed: u64, weight: i64, detbound: i64) -> Result<QuatTable> {
    let mut rng = rng(seed);
    let mut t = QuatTable::new(weight);
    for k in standard_keys(detbound)? {
        t.entries.insert(k, random_gauss(&mut rng));
    }
    Ok(t)
}

/// The Siegel table the lift needs for [`standard_keys`]`(detbound)`.
pub fn synth_siegel_for(seed: u64, weight: i64, detbound: i64) -> Result<SiegelTable> {
    let keys = standard_keys(detbound)?;
    Ok(synth_siegel(seed, weight, max_disc(&keys)))
}

/// `theta*` of random Siegel tables lies in the Spezialschar; the weights
/// cycle through `weights`.
pub fn spezialschar_suite(seed: u64, tables: usize, weights: &[i64], detbound: i64) -> Result<SuiteReport> {
    let keys = standard_keys(detbound)?;
    let disc = max_disc(&keys);
    let mut checked = 0;
    for k in 0..tables {
        let weight = weights[k % weights.len()];
        let f = synth_siegel(seed.wrapping_add(k as u64), weight, disc);
        let phi = theta_star_on(&f, &keys)?;
        let r = maass_membership(&phi)?;
        checked += r.checked;
        if !r.ok {
            let why = r.failure.unwrap_or_default();
            return Ok(SuiteReport::fail(checked, format!("table {k} (weight {weight}): {why}")));
        }
    }
    Ok(SuiteReport::pass(checked))
}

/// `fj_extract(theta*(F), t) = a_F(t)` for every `t` whose Fourier-Jacobi
/// key is covered by the lifted table.
pub fn round_trip_suite(seed: u64, weight: i64, detbound: i64) -> Result<SuiteReport> {
    let f = synth_siegel_for(seed, weight, detbound)?;
    let phi = theta_star_table(&f, detbound)?;
    let mut checked = 0;
    for t in f.entries.keys() {
        if !phi.entries.contains_key(&fj_pair(t)) {
            continue;
        }
        checked += 1;
        if fj_extract(&phi, t)? != f.get(t)? {
            return Ok(SuiteReport::fail(checked, format!("round trip fails at {t}")));
        }
    }
    if checked == 0 {
        return Ok(SuiteReport::fail(0, "no covered triples".into()));
    }
    Ok(SuiteReport::pass(checked))
}

/// Strongly primitive pairs used by the Dirichlet pipeline.
pub fn dirichlet_lambdas(count: usize) -> Result<Vec<IndexPair>> {
    let mut out = Vec::new();
    for t in reduced_triples(40) {
        for l in [breve(&t), fj_pair(&t)] {
            if out.len() < count && t.content() == 1 && is_strongly_primitive(&l)? && !out.contains(&l) {
                out.push(l);
            }
        }
    }
    Ok(out)
}

/// The Dirichlet series factorization up to `n_max` on lifted tables, one
/// per strongly primitive `lambda`.
pub fn dirichlet_suite(seed: u64, weight: i64, lambdas: &[IndexPair], n_max: u64) -> Result<SuiteReport> {
    let mut checked = 0;
    for (k, l) in lambdas.iter().enumerate() {
        let keys = dirichlet_keys(l, n_max)?;
        let f = synth_siegel(seed.wrapping_add(k as u64), weight, max_disc(&keys));
        let phi = theta_star_on(&f, &keys)?;
        let r = dirichlet_factor_check(&phi, l, n_max, &[])?;
        checked += r.checked;
        if !r.ok {
            return Ok(SuiteReport::fail(checked, format!("lambda {l}: {}", r.failure.unwrap_or_default())));
        }
    }
    Ok(SuiteReport::pass(checked))
}

/// The classical Maass relations on lifts of random plus-space tables.
pub fn classical_suite(seed: u64, tables: usize, weight: i64, bound: i64) -> Result<SuiteReport> {
    let mut checked = 0;
    for k in 0..tables {
        let c = synth_halfintegral(seed.wrapping_add(k as u64), weight, bound);
        let f = classical_maass_lift(&c, weight, bound)?;
        let r = classical_maass_check(&f)?;
        checked += r.checked;
        if !r.ok {
            return Ok(SuiteReport::fail(checked, format!("table {k}: {}", r.failure.unwrap_or_default())));
        }
    }
    Ok(SuiteReport::pass(checked))
}

fn i_pow(v: i64) -> C {
    [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)][v.rem_euclid(4) as usize]
}

/// Relative error of `S_v(X)` against `pi e^{-X} i^v / 2`.
pub fn s_v_suite(v_max: i64, xs: &[f64], tol: f64) -> Result<SuiteReport> {
    let mut worst = 0.0f64;
    let mut at = String::new();
    let mut checked = 0;
    for v in -v_max..=v_max {
        for &x in xs {
            let scale = PI * (-x).exp() / 2.0;
            let err = (s_v_sum(v, x)? - i_pow(v) * scale).norm() / scale;
            checked += 1;
            if err > worst {
                worst = err;
                at = format!("v = {v}, X = {x}");
            }
        }
    }
    Ok(SuiteReport::numeric(checked, worst, tol, at))
}

/// The test vector `T = [g, -1, -1, -g]`, orthogonal to `y0` with `(T, T) = 2`.
pub fn archimedean_t(g: f64) -> V22 {
    [g, -1.0, -1.0, -g]
}

/// Quadrature of the archimedean integral against its closed form on
/// `ts x angles x ells`.
pub fn archimedean_suite(ts: &[f64], angles: &[f64], ells: &[usize], tol: f64) -> Result<SuiteReport> {
    let mut worst = 0.0f64;
    let mut at = String::new();
    let mut checked = 0;
    for &t in ts {
        for &theta in angles {
            for &ell in ells {
                let input = ArchimedeanInput { t_vec: archimedean_t(0.3), t, u: boost_y1(theta), ell };
                let (num, closed) = archimedean_integral_check(&input)?;
                let err = num.rel_diff(&closed);
                checked += 1;
                if err > worst {
                    worst = err;
                    at = format!("t = {t}, angle = {theta}, l = {ell}");
                }
            }
        }
    }
    Ok(SuiteReport::numeric(checked, worst, tol, at))
}

fn apply4(h: &[[f64; 4]; 4], x: &V22) -> V22 {
    std::array::from_fn(|i| (0..4).map(|j| h[i][j] * x[j]).sum())
}

/// `beta` from its definition against `-2st + i(2 - t(T, u y1))` along
/// the Heisenberg path, on `points` seeded grid points.
pub fn beta_suite(seed: u64, points: usize, tol: f64) -> SuiteReport {
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    let mut at = String::new();
    for _ in 0..points {
        let g: f64 = rng.gen_range(-1.0..1.0);
        let theta: f64 = rng.gen_range(-1.5..1.5);
        let t: f64 = rng.gen_range(0.1..3.0);
        let s: f64 = rng.gen_range(-3.0..3.0);
        let tv = archimedean_t(g);
        let u = boost_y1(theta);
        let b = beta_fn(&Y0, &tv, &heisenberg_path(s, t, u));
        let expect = C::new(-2.0 * s * t, 2.0 - t * pair22(&tv, &apply4(&u, &Y1)));
        let err = (b - expect).norm();
        if err > worst {
            worst = err;
            at = format!("s = {s}, t = {t}, angle = {theta}, T = {tv:?}");
        }
    }
    SuiteReport::numeric(points, worst, tol, at)
}

/// Random Gram triples with odd squarefree discriminant reduced from
/// `preimages` random preimages each; all preimages must reach the same
/// canonical pair.
pub fn orbit_suite(seed: u64, instances: usize, preimages: usize, word_len: usize) -> Result<SuiteReport> {
    let l = SplitLattice::new(4)?;
    let mut rng = rng(seed);
    let mut done = 0;
    let mut slowest = Duration::ZERO;
    let mut checked = 0;
    while done < instances {
        let t = GramTriple::new(rng.gen_range(-12..=12), rng.gen_range(-12..=12), rng.gen_range(-12..=12));
        let d = t.b * t.b - 4 * t.a * t.c;
        if d % 2 == 0 || !is_squarefree(d.unsigned_abs()) {
            continue;
        }
        let (c1, c2) = canonical_pair(&l, &t);
        let mut finals = BTreeSet::new();
        for _ in 0..preimages {
            let gamma = word_isometry(&l, (0..word_len).map(|_| rng.gen::<u32>() as usize))?;
            let (t1, t2) = (gamma.apply(&c1)?, gamma.apply(&c2)?);
            let start = Instant::now();
            let (g, s) = reduce_pair(&l, &t1, &t2)?;
            slowest = slowest.max(start.elapsed());
            checked += 1;
            let (f1, f2) = (g.apply(&t1)?, g.apply(&t2)?);
            if s != t || l.gram(&f1, &f2)? != t {
                return Ok(SuiteReport::fail(checked, format!("Gram matrix changed for {t}")));
            }
            finals.insert((f1, f2));
        }
        if finals.len() != 1 || !finals.contains(&(c1, c2)) {
            return Ok(SuiteReport::fail(checked, format!("preimages of {t} reach different pairs")));
        }
        done += 1;
    }
    let mut r = SuiteReport::pass(checked);
    r.max_case_time = Some(slowest);
    Ok(r)
}

fn random_pair(rng: &mut ChaCha8Rng) -> IndexPair {
    let mut m = || [[rng.gen_range(-4..=4), rng.gen_range(-4..=4)], [rng.gen_range(-4..=4), rng.gen_range(-4..=4)]];
    IndexPair::new(m(), m())
}

/// Exactly one ordering of a positive definite pair is reported positive;
/// indefinite pairs are reported degenerate.
pub fn positivity_suite(seed: u64, pos_def: usize, indefinite: usize) -> Result<SuiteReport> {
    let mut rng = rng(seed);
    let (mut p, mut n, mut checked) = (0, 0, 0);
    while p < pos_def || n < indefinite {
        let l = random_pair(&mut rng);
        let s = gram(&l);
        let swapped = IndexPair::new(l.t2, l.t1);
        if s.is_pos_def() && p < pos_def {
            p += 1;
            checked += 1;
            let a = positivity_oracle(&l)?;
            let b = positivity_oracle(&swapped)?;
            let positives = [a, b].iter().filter(|x| **x == Positivity::Positive).count();
            if positives != 1 {
                return Ok(SuiteReport::fail(checked, format!("{l}: orderings report {a:?} and {b:?}")));
            }
        } else if s.disc() < 0 && n < indefinite {
            n += 1;
            checked += 1;
            let a = positivity_oracle(&l)?;
            if a != Positivity::Degenerate {
                return Ok(SuiteReport::fail(checked, format!("indefinite {l} reported {a:?}")));
            }
        }
    }
    Ok(SuiteReport::pass(checked))
}
