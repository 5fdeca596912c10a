//! Quantum cluster characters of valued-quiver representations, generic
//! characters from interpolated counting polynomials, and comparisons with
//! the mutation engines.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{d_vector, enumerate_exchange_graph, ExchangeGraph, GraphLimits};
use crate::error::{Error, Result};
use crate::exchange::ExchangeData;
use crate::finfield::{primes, DEFAULT_CAP};
use crate::laurent::{cluster_names, y_names, HalfPow, LaurentPoly, QCoeff};
use crate::matrix::IntMatrix;
use crate::quantum::{QTorusElem, QuantumSeed};
use crate::reps::{build_rigid_rep, ext_dim, grassmannian_counts, reflect, Counts, ValuedQuiver, ValuedRep};

/// Geometric data a character formula needs: the quiver (Euler form, `*v`)
/// and the extended exchange matrix whose columns give `Btilde e`.
#[derive(Clone, Debug)]
pub struct CharacterFrame {
    pub quiver: Arc<ValuedQuiver>,
    pub btilde: IntMatrix,
}

impl CharacterFrame {
    pub fn initial(e: &ExchangeData) -> Result<Self> {
        Ok(CharacterFrame { quiver: Arc::new(ValuedQuiver::from_exchange(e)?), btilde: e.btilde().clone() })
    }

    /// `Btilde e - *v` in `Z^(2n)`.
    pub fn exponent(&self, e: &[i64], v: &[i64]) -> Vec<i64> {
        let n = self.quiver.rank();
        let be = self.btilde.mul_vec(e);
        let sv = self.quiver.star_left(v);
        (0..2 * n).map(|i| be[i] - if i < n { sv[i] } else { 0 }).collect()
    }

    /// Componentwise minimum of the frozen part of `Btilde e` over `support`.
    /// Zero for principal coefficients (`e = 0` is always in the support);
    /// in other frames it is the tropical denominator of the separation formula.
    pub fn frozen_floor<'a, I>(&self, support: I) -> Vec<i64>
    where
        I: IntoIterator<Item = &'a Vec<i64>>,
    {
        let n = self.quiver.rank();
        let mut floor = vec![0; n];
        for (idx, e) in support.into_iter().enumerate() {
            let be = self.btilde.mul_vec(e);
            for i in 0..n {
                floor[i] = if idx == 0 { be[n + i] } else { floor[i].min(be[n + i]) };
            }
        }
        floor
    }

    /// `-<e, v - e>`: the power of `u` attached to `e`.
    pub fn twist(&self, e: &[i64], v: &[i64]) -> i64 {
        let ve: Vec<i64> = v.iter().zip(e).map(|(a, b)| a - b).collect();
        -self.quiver.euler_form(e, &ve)
    }

    /// `sum_e u^{-<e,v-e>} c_e(q) X^{Btilde e - *v}` with `q = u^2`, frozen
    /// exponents shifted by [`Self::frozen_floor`].
    pub fn assemble(&self, v: &[i64], polys: &BTreeMap<Vec<i64>, Vec<BigInt>>, lambda: Arc<IntMatrix>) -> QTorusElem {
        let n = self.quiver.rank();
        let floor = self.frozen_floor(polys.keys());
        QTorusElem::from_terms(
            lambda,
            polys.iter().map(|(e, c)| {
                let mut a = self.exponent(e, v);
                for i in 0..n {
                    a[n + i] -= floor[i];
                }
                (a, QCoeff::from_q_poly(c).shift(HalfPow(self.twist(e, v))))
            }),
        )
    }
}

/// `X_V` with the Grassmannian counts of `V` over its tower's prime field.
pub fn quantum_character(rep: &ValuedRep, e: &ExchangeData, cap: u64) -> Result<QTorusElem> {
    let frame = CharacterFrame::initial(e)?;
    let counts = grassmannian_counts(rep, cap)?;
    Ok(character_from_counts(&frame, &rep.dim_vector(), &counts, Arc::new(e.lambda().clone())))
}

pub fn character_from_counts(frame: &CharacterFrame, v: &[i64], counts: &Counts, lambda: Arc<IntMatrix>) -> QTorusElem {
    let polys = counts.iter().filter(|(_, &c)| c > 0).map(|(e, &c)| (e.clone(), vec![BigInt::from(c)])).collect();
    frame.assemble(v, &polys, lambda)
}

/// `x_V = x^{-*v} sum_e |Gr_e(V)| x^{Btilde e}`.
pub fn classical_character(rep: &ValuedRep, e: &ExchangeData, cap: u64) -> Result<LaurentPoly> {
    Ok(quantum_character(rep, e, cap)?.specialize_q1())
}

#[derive(Clone, Debug)]
pub struct CharacterOptions {
    /// Interpolation primes; extended upward when a degree bound needs more.
    pub primes: Vec<u64>,
    /// Validation prime; defaults to the next prime after the last one used.
    pub held_out: Option<u64>,
    pub attempts: usize,
    pub rng_seed: u64,
    /// Bound on enumerated subspace tuples per `e`.
    pub cap: u64,
    pub field_cap: u64,
}

impl Default for CharacterOptions {
    fn default() -> Self {
        CharacterOptions {
            primes: vec![2, 3, 5, 7, 11, 13],
            held_out: None,
            attempts: 400,
            rng_seed: 0,
            cap: 1 << 24,
            field_cap: DEFAULT_CAP,
        }
    }
}

impl CharacterOptions {
    fn plan(&self, needed: usize) -> (Vec<u64>, u64) {
        let mut ps = self.primes.clone();
        ps.sort_unstable();
        ps.dedup();
        let start = ps.last().copied().unwrap_or(1);
        let mut gen = primes().skip_while(move |&p| p <= start);
        while ps.len() < needed {
            ps.push(gen.next().expect("infinitely many primes"));
        }
        let held = match self.held_out {
            Some(h) if !ps.contains(&h) => h,
            _ => primes().find(|p| p > ps.last().unwrap()).expect("next prime"),
        };
        (ps, held)
    }

    fn seed_for(&self, p: u64) -> u64 {
        self.rng_seed ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

/// Ascending coefficients of the interpolating polynomial, exact over `Q`.
pub fn interpolate(xs: &[i64], ys: &[BigInt]) -> Vec<BigRational> {
    let n = xs.len();
    let mut dd: Vec<BigRational> = ys.iter().map(|y| BigRational::from_integer(y.clone())).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            let den = BigRational::from_integer(BigInt::from(xs[i] - xs[i - j]));
            dd[i] = (&dd[i] - &dd[i - 1]) / den;
        }
    }
    // Horner on the Newton form
    let mut coeffs: Vec<BigRational> = vec![BigRational::zero(); n.max(1)];
    for i in (0..n).rev() {
        // coeffs = coeffs * (x - xs[i]) + dd[i]
        let mut next = vec![BigRational::zero(); n.max(1)];
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k + 1 < next.len() {
                next[k + 1] += c;
            }
            next[k] -= c * BigRational::from_integer(BigInt::from(xs[i]));
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    coeffs
}

pub fn eval_poly(c: &[BigInt], x: i64) -> BigInt {
    c.iter().rev().fold(BigInt::zero(), |acc, a| acc * x + a)
}

/// Interpolated counting polynomials and the generic character built from them.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub v: Vec<i64>,
    pub counts_by_prime: BTreeMap<u64, Counts>,
    pub held_out: u64,
    /// `P_{v,e}(q)`, ascending coefficients; only `e` with nonzero polynomial.
    pub polys: BTreeMap<Vec<i64>, Vec<BigInt>>,
    pub quantum: QTorusElem,
    pub classical: LaurentPoly,
    pub f_poly: LaurentPoly,
    pub g: Vec<i64>,
    pub d: Vec<i64>,
}

impl CharacterTable {
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Term {
            exponent: Vec<i64>,
            coeff: Vec<(i64, String)>,
        }
        let n = self.v.len();
        let p: BTreeMap<String, Vec<String>> = self
            .polys
            .iter()
            .map(|(e, c)| (format!("{e:?}"), c.iter().map(ToString::to_string).collect()))
            .collect();
        let x_terms: Vec<Term> = self
            .quantum
            .terms()
            .map(|(e, c)| Term { exponent: e.clone(), coeff: c.terms().map(|(k, x)| (*k, x.to_string())).collect() })
            .collect();
        let names = cluster_names(n);
        serde_json::json!({
            "v": self.v,
            "P": p,
            "F": self.f_poly.render(&y_names(n)),
            "g": self.g,
            "d": self.d,
            "x_v": self.classical.render(&names),
            "X_v_terms": x_terms,
            "primes": self.counts_by_prime.keys().filter(|&&p| p != self.held_out).collect::<Vec<_>>(),
            "held_out": self.held_out,
        })
    }
}

/// Degree bound `<e, v - e>` for `P_{v,e}`. For rigid `V` every point `E` of
/// `Gr_e(V)` has `Ext^1(E, V/E) = 0`, a quotient of `Ext^1(V, V)`, so the
/// quiver Grassmannian is smooth of dimension `<e, v - e>` when nonempty.
pub fn degree_bound(q: &ValuedQuiver, v: &[i64], e: &[i64]) -> usize {
    let rest: Vec<i64> = v.iter().zip(e).map(|(a, b)| a - b).collect();
    q.euler_form(e, &rest).max(0) as usize
}

fn all_below(v: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &vi in v {
        out = out.into_iter().flat_map(|e| (0..=vi).map(move |x| [e.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Interpolate counting polynomials from representations produced per prime
/// by `make_rep`, and assemble the generic character in `frame`.
pub fn generic_character_with<F>(
    frame: &CharacterFrame,
    v: &[i64],
    lambda: Arc<IntMatrix>,
    opts: &CharacterOptions,
    make_rep: F,
) -> Result<CharacterTable>
where
    F: Fn(u64) -> Result<ValuedRep> + Sync,
{
    if v.iter().any(|&x| x < 0) {
        return Err(Error::Input(format!("dimension vector {v:?} has a negative entry")));
    }
    let es = all_below(v);
    let needed = es.iter().map(|e| degree_bound(&frame.quiver, v, e) + 1).max().unwrap_or(1);
    let (ps, held) = opts.plan(needed);
    let mut all_ps = ps.clone();
    all_ps.push(held);
    let per_prime: Vec<Result<(u64, Counts)>> = all_ps
        .par_iter()
        .map(|&p| {
            let rep = make_rep(p)?;
            if rep.dim_vector() != v {
                return Err(Error::Input(format!("representation has dimension {:?}, expected {v:?}", rep.dims())));
            }
            Ok((p, grassmannian_counts(&rep, opts.cap)?))
        })
        .collect();
    let counts_by_prime: BTreeMap<u64, Counts> = per_prime.into_iter().collect::<Result<_>>()?;

    let xs: Vec<i64> = ps.iter().map(|&p| p as i64).collect();
    let mut polys = BTreeMap::new();
    for e in &es {
        let ys: Vec<BigInt> = ps.iter().map(|p| BigInt::from(counts_by_prime[p][e])).collect();
        let coeffs = interpolate(&xs, &ys);
        let inconsistent = || Error::InterpolationInconsistent { e: e.clone(), prime: held };
        if coeffs.iter().any(|c| !c.is_integer()) || coeffs.len() > degree_bound(&frame.quiver, v, e) + 1 {
            return Err(inconsistent());
        }
        let ints: Vec<BigInt> = coeffs.iter().map(|c| c.to_integer()).collect();
        if eval_poly(&ints, held as i64) != BigInt::from(counts_by_prime[&held][e]) {
            return Err(inconsistent());
        }
        if ints.iter().any(|c| !c.is_zero()) {
            polys.insert(e.clone(), ints);
        }
    }
    let quantum = frame.assemble(v, &polys, lambda);
    let classical = quantum.specialize_q1();
    let n = v.len();
    let f_poly = LaurentPoly::from_terms(n, polys.iter().map(|(e, c)| (e.clone(), eval_poly(c, 1))));
    let g: Vec<i64> = frame.quiver.star_left(v).iter().map(|x| -x).collect();
    let d = d_vector(&classical, n)?;
    Ok(CharacterTable { v: v.to_vec(), counts_by_prime, held_out: held, polys, quantum, classical, f_poly, g, d })
}

/// The generic character `X_v` of the initial seed of `e`, using a sampled
/// rigid representative of `v` at each prime.
pub fn generic_character(e: &ExchangeData, v: &[i64], opts: &CharacterOptions) -> Result<CharacterTable> {
    let frame = CharacterFrame::initial(e)?;
    let q = frame.quiver.clone();
    let dims: Vec<usize> = v.iter().map(|&x| x.max(0) as usize).collect();
    generic_character_with(&frame, v, Arc::new(e.lambda().clone()), opts, |p| {
        let tower = q.tower(p, opts.field_cap)?;
        build_rigid_rep(&q, &tower, &dims, opts.attempts, opts.seed_for(p))
    })
}

/// One cluster variable compared against its character.
#[derive(Clone, Debug, Serialize)]
pub struct VariableCheck {
    pub label: String,
    /// 1-based mutation path from the initial seed to a seed containing it.
    pub path: Vec<usize>,
    pub d: Vec<i64>,
    pub quantum_match: bool,
    pub classical_match: bool,
    pub error: Option<String>,
}

impl VariableCheck {
    pub fn passed(&self) -> bool {
        self.quantum_match && self.classical_match && self.error.is_none()
    }
}

/// Non-initial cluster variables reachable within `max_depth` mutations,
/// as (label, path, classical expansion, quantum expansion).
pub fn non_initial_variables(
    graph: &ExchangeGraph,
    e: &ExchangeData,
    max_depth: usize,
) -> Result<Vec<(String, Vec<usize>, LaurentPoly, QTorusElem)>> {
    let initial = graph.initial_labels();
    let mut out = Vec::new();
    for (label, (poly, node)) in graph.variables() {
        if initial.contains(&label) {
            continue;
        }
        let path = graph.nodes()[node].path.clone();
        if path.len() > max_depth {
            continue;
        }
        let pos = graph.nodes()[node].seed.labels().iter().position(|s| *s == label).expect("member");
        let qs = QuantumSeed::initial(e).mutate_seq(&path)?;
        out.push((label, path, poly, qs.var(pos).clone()));
    }
    Ok(out)
}

/// Generic characters versus mutation: every non-initial quantum cluster
/// variable within `max_depth` equals `X_v` for its d-vector `v`.
pub fn verify_character_vs_mutation(
    e: &ExchangeData,
    max_depth: usize,
    limits: GraphLimits,
    opts: &CharacterOptions,
) -> Result<Vec<VariableCheck>> {
    let graph = enumerate_exchange_graph(e, GraphLimits { allow_truncated: true, ..limits })?;
    let vars = non_initial_variables(&graph, e, max_depth)?;
    let n = e.rank();
    Ok(vars
        .par_iter()
        .map(|(label, path, poly, qvar)| {
            let d = match d_vector(poly, n) {
                Ok(d) => d,
                Err(err) => return failed(label, path, vec![], err),
            };
            match generic_character(e, &d, opts) {
                Ok(t) => VariableCheck {
                    label: label.clone(),
                    path: path.iter().map(|k| k + 1).collect(),
                    d,
                    quantum_match: t.quantum == *qvar,
                    classical_match: t.classical == *poly && qvar.specialize_q1() == *poly,
                    error: None,
                },
                Err(err) => failed(label, path, d, err),
            }
        })
        .collect())
}

fn failed(label: &str, path: &[usize], d: Vec<i64>, err: Error) -> VariableCheck {
    VariableCheck {
        label: label.to_string(),
        path: path.iter().map(|k| k + 1).collect(),
        d,
        quantum_match: false,
        classical_match: false,
        error: Some(err.to_string()),
    }
}

/// `u^{-c} A B` where `A B = q^c B A`: the bar-invariant product of two
/// q-commuting elements.
pub fn normalized_product(a: &QTorusElem, b: &QTorusElem) -> Result<QTorusElem> {
    let c = a.q_commutation_exponent(b)?.ok_or_else(|| Error::Input("elements do not q-commute".into()))?;
    Ok(a.qmul(b)?.scale(&QCoeff::u_pow(-c)))
}

/// A degree-2 cluster monomial compared with the counts of `V_a + V_b`.
#[derive(Clone, Debug, Serialize)]
pub struct MonomialCheck {
    pub labels: (String, String),
    pub v: Vec<i64>,
    pub primes: Vec<u64>,
    pub passed: bool,
    pub error: Option<String>,
}

/// For every pair of non-initial variables sharing a cluster (squares
/// included), the normalized product must equal the character of a direct
/// sum of rigid representatives. The product's coefficients determine the
/// counting polynomials, which are checked against counts at each prime.
pub fn verify_monomials(
    e: &ExchangeData,
    graph: &ExchangeGraph,
    primes: &[u64],
    opts: &CharacterOptions,
) -> Result<Vec<MonomialCheck>> {
    let n = e.rank();
    let vars = non_initial_variables(graph, e, usize::MAX)?;
    let mut pairs = Vec::new();
    for (i, a) in vars.iter().enumerate() {
        for b in &vars[i..] {
            if graph.nodes().iter().any(|node| node.contains(&a.0) && node.contains(&b.0)) {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    let frame = CharacterFrame::initial(e)?;
    let q = frame.quiver.clone();
    Ok(pairs
        .par_iter()
        .map(|(a, b)| {
            let da = d_vector(&a.2, n).expect("nonzero");
            let db = d_vector(&b.2, n).expect("nonzero");
            let v: Vec<i64> = da.iter().zip(&db).map(|(x, y)| x + y).collect();
            let run = || -> Result<bool> {
                let prod = normalized_product(&a.3, &b.3)?;
                // exponent -> e
                let mut by_exp = BTreeMap::new();
                for ee in all_below(&v) {
                    by_exp.insert(frame.exponent(&ee, &v), ee);
                }
                let mut polys = BTreeMap::new();
                for (exp, c) in prod.terms() {
                    let Some(ee) = by_exp.get(exp) else { return Ok(false) };
                    let Some(poly) = c.to_q_poly(HalfPow(-frame.twist(ee, &v))) else { return Ok(false) };
                    polys.insert(ee.clone(), poly);
                }
                for &p in primes {
                    let tower = q.tower(p, opts.field_cap)?;
                    let ua = |d: &[i64]| d.iter().map(|&x| x as usize).collect::<Vec<_>>();
                    let va = build_rigid_rep(&q, &tower, &ua(&da), opts.attempts, opts.seed_for(p))?;
                    let vb = build_rigid_rep(&q, &tower, &ua(&db), opts.attempts, opts.seed_for(p) ^ 1)?;
                    let sum = va.direct_sum(&vb)?;
                    if ext_dim(&sum, &sum)? != 0 {
                        return Ok(false);
                    }
                    let counts = grassmannian_counts(&sum, opts.cap)?;
                    for (ee, &c) in &counts {
                        let expect = polys.get(ee).map_or(BigInt::zero(), |poly| eval_poly(poly, p as i64));
                        if expect != BigInt::from(c) {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            };
            let (passed, error) = match run() {
                Ok(ok) => (ok, None),
                Err(err) => (false, Some(err.to_string())),
            };
            MonomialCheck { labels: (a.0.clone(), b.0.clone()), v, primes: primes.to_vec(), passed, error }
        })
        .collect())
}

/// Generic character of a degree-2 monomial `V_a + V_b`, interpolated over
/// the full prime set; used where enumeration is cheap.
pub fn generic_monomial_character(
    e: &ExchangeData,
    va: &[i64],
    vb: &[i64],
    opts: &CharacterOptions,
) -> Result<CharacterTable> {
    let frame = CharacterFrame::initial(e)?;
    let q = frame.quiver.clone();
    let v: Vec<i64> = va.iter().zip(vb).map(|(x, y)| x + y).collect();
    let ua = |d: &[i64]| d.iter().map(|&x| x as usize).collect::<Vec<_>>();
    generic_character_with(&frame, &v, Arc::new(e.lambda().clone()), opts, |p| {
        let tower = q.tower(p, opts.field_cap)?;
        let a = build_rigid_rep(&q, &tower, &ua(va), opts.attempts, opts.seed_for(p))?;
        let b = build_rigid_rep(&q, &tower, &ua(vb), opts.attempts, opts.seed_for(p) ^ 1)?;
        let s = a.direct_sum(&b)?;
        if ext_dim(&s, &s)? != 0 {
            return Err(Error::NoRigidFound { attempts: 1 });
        }
        Ok(s)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReflectionCheck {
    pub k: usize,
    pub v: Vec<i64>,
    pub reflected: Vec<i64>,
    pub passed: bool,
    pub error: Option<String>,
}

/// Is `lhs * X'_k^s == sum_a c_a u^{Lambda'(a, s e_k)} M'(a + s e_k)` for
/// `rhs = sum_a c_a X'^a` given in frame coordinates of `seed`?
fn equal_in_frame(lhs: &QTorusElem, rhs: &QTorusElem, seed: &QuantumSeed, k: usize) -> Result<bool> {
    let s = rhs.terms().map(|(a, _)| (-a[k]).max(0)).max().unwrap_or(0);
    let lam = seed.exchange().lambda();
    let m = lam.rows();
    let mut sek = vec![0; m];
    sek[k] = s;
    let mut total = QTorusElem::zero(seed.ambient().clone());
    for (a, c) in rhs.terms() {
        let tw: i64 = (0..m).map(|i| a[i] * lam[(i, k)] * s).sum();
        let shifted: Vec<i64> = a.iter().zip(&sek).map(|(x, y)| x + y).collect();
        let mono = seed.frame_monomial(&shifted)?;
        total = total.add(&mono.scale(&c.shift(HalfPow(tw))))?;
    }
    let left = lhs.qmul(&seed.frame_monomial(&sek)?)?;
    Ok(left == total)
}

/// Reflection check at sink or source `k`: for each rigid indecomposable `v`
/// (other than the simple at `k`), the generic character `X_v` equals the
/// character of the reflected representations in the once-mutated frame.
pub fn verify_reflection(
    e: &ExchangeData,
    k: usize,
    vs: &[Vec<i64>],
    opts: &CharacterOptions,
) -> Result<Vec<ReflectionCheck>> {
    if !e.is_sink(k) && !e.is_source(k) {
        return Err(Error::NotSinkOrSource(k + 1));
    }
    let frame = CharacterFrame::initial(e)?;
    let q = frame.quiver.clone();
    let mutated = e.mutate(k)?;
    let seed1 = QuantumSeed::initial(e).mutate(k)?;
    let frame1 = CharacterFrame { quiver: Arc::new(q.reflected(k)?), btilde: mutated.btilde().clone() };
    // X'^a lives in the abstract torus of the mutated seed
    let lam1 = Arc::new(mutated.lambda().clone());
    Ok(vs
        .par_iter()
        .map(|v| {
            let dims: Vec<usize> = v.iter().map(|&x| x as usize).collect();
            let sv = q.s_k(k, v);
            let run = || -> Result<bool> {
                let make = |p: u64| {
                    let tower = q.tower(p, opts.field_cap)?;
                    build_rigid_rep(&q, &tower, &dims, opts.attempts, opts.seed_for(p))
                };
                // surfaces a simple summand at k before s_k(v) is used as a dimension vector
                reflect(&make(opts.primes[0])?, k)?;
                let left = generic_character(e, v, opts)?;
                let right = generic_character_with(&frame1, &sv, lam1.clone(), opts, |p| reflect(&make(p)?, k))?;
                equal_in_frame(&left.quantum, &right.quantum, &seed1, k)
            };
            let (passed, error) = match run() {
                Ok(ok) => (ok, None),
                Err(err) => (false, Some(err.to_string())),
            };
            ReflectionCheck { k: k + 1, v: v.clone(), reflected: sv, passed, error }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::ValuedRep;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn b2() -> ExchangeData {
        ExchangeData::new(&m(&[&[0, 1], &[-2, 0]]), None, None).unwrap()
    }

    fn g2() -> ExchangeData {
        ExchangeData::new(&m(&[&[0, 1], &[-3, 0]]), None, None).unwrap()
    }

    #[test]
    fn interpolation_recovers_polynomials() {
        let xs = [2, 3, 5, 7];
        let f = |x: i64| BigInt::from(x * x * x - 2 * x + 5);
        let ys: Vec<BigInt> = xs.iter().map(|&x| f(x)).collect();
        let c = interpolate(&xs, &ys);
        let ints: Vec<BigInt> = c.iter().map(|x| x.to_integer()).collect();
        assert_eq!(ints, vec![5.into(), (-2).into(), 0.into(), 1.into()]);
        assert_eq!(interpolate(&[2, 3], &[4.into(), 4.into()]).len(), 1);
    }

    #[test]
    fn simple_character_is_first_mutation() {
        let e = b2();
        let frame = CharacterFrame::initial(&e).unwrap();
        let t = frame.quiver.tower(2, DEFAULT_CAP).unwrap();
        let s1 = ValuedRep::simple(frame.quiver.clone(), t, 0).unwrap();
        let x = quantum_character(&s1, &e, DEFAULT_CAP).unwrap();
        let lam = Arc::new(e.lambda().clone());
        let expect = QTorusElem::bar_monomial(vec![-1, 2, 0, 0], lam.clone())
            .add(&QTorusElem::bar_monomial(vec![-1, 0, 1, 0], lam))
            .unwrap();
        assert_eq!(x, expect);
        assert_eq!(x, QuantumSeed::initial(&e).mutate(0).unwrap().var(0).clone());
    }

    #[test]
    fn b2_generic_tables() {
        let e = b2();
        let t = generic_character(&e, &[1, 0], &CharacterOptions::default()).unwrap();
        assert!(t.polys.values().all(|p| p == &vec![BigInt::from(1)]));
        assert_eq!(t.f_poly.render(&y_names(2)), "y1 + 1");
        assert_eq!((t.g.clone(), t.d.clone()), (vec![-1, 2], vec![1, 0]));
        assert_eq!(t.held_out, 17);
        let t = generic_character(&e, &[1, 1], &CharacterOptions::default()).unwrap();
        assert_eq!(t.f_poly.render(&y_names(2)), "y1*y2 + y1 + 1");
        assert_eq!(t.g, vec![-1, 1]);
        let t = generic_character(&e, &[2, 0], &CharacterOptions::default()).unwrap();
        assert_eq!(t.polys[&vec![1, 0]], vec![1.into(), 0.into(), 1.into()]);
        let json = t.to_json();
        assert_eq!(json["v"], serde_json::json!([2, 0]));
    }

    #[test]
    fn square_of_simple_character() {
        let e = b2();
        let x1 = QuantumSeed::initial(&e).mutate(0).unwrap().var(0).clone();
        let t = generic_monomial_character(&e, &[1, 0], &[1, 0], &CharacterOptions::default()).unwrap();
        assert_eq!(t.quantum, normalized_product(&x1, &x1).unwrap());
        assert_eq!(normalized_product(&x1, &x1).unwrap(), x1.qpow(2));
    }

    #[test]
    fn b2_and_g2_variables_match_mutation() {
        for (e, count) in [(b2(), 4), (g2(), 6)] {
            let checks = verify_character_vs_mutation(&e, usize::MAX, GraphLimits::default(), &CharacterOptions::default()).unwrap();
            assert_eq!(checks.len(), count);
            for c in &checks {
                assert!(c.passed(), "{c:?}");
            }
        }
    }

    #[test]
    fn b2_reflections() {
        let e = b2();
        let vs = vec![vec![1, 0], vec![1, 1], vec![1, 2]];
        for c in verify_reflection(&e, 1, &vs, &CharacterOptions::default()).unwrap() {
            assert!(c.passed, "{c:?}");
        }
        let vs = vec![vec![1, 1], vec![1, 2], vec![0, 1]];
        for c in verify_reflection(&e, 0, &vs, &CharacterOptions::default()).unwrap() {
            assert!(c.passed, "{c:?}");
        }
        let bad = verify_reflection(&e, 1, &[vec![0, 1]], &CharacterOptions::default()).unwrap();
        assert!(!bad[0].passed && bad[0].error.as_deref().unwrap().contains("S_2"), "{:?}", bad[0]);
    }
}
