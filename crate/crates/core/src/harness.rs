//! Verification suites over named or user-supplied exchange matrices.
//!
//! Every check returns a [`VerificationReport`]; a failing report carries
//! the matrix, the 1-based mutation path and the rng seed needed to
//! reproduce it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::characters::{
    generic_character, generic_monomial_character, verify_character_vs_mutation, verify_monomials, verify_reflection,
    CharacterOptions,
};
use crate::classical::{
    acyclic_subgraph_connected, d_vector, enumerate_exchange_graph, f_polynomial, g_vector,
    induced_subgraph_connected, ClassicalSeed, ExchangeGraph, GraphLimits,
};
use crate::error::{Error, Result};
use crate::exchange::{ExchangeData, MatrixSpec};
use crate::finfield::{build_tower, enumerate_subspaces, gaussian_binomial};
use crate::laurent::LaurentPoly;
use crate::matrix::IntMatrix;
use crate::reps::ValuedQuiver;

/// Built-in targets: name, `B`, `D` (`None` = minimal symmetrizer).
pub const CATALOG: &[(&str, &[&[i64]], Option<&[i64]>)] = &[
    ("A2", &[&[0, 1], &[-1, 0]], None),
    ("B2", &[&[0, 1], &[-2, 0]], Some(&[2, 1])),
    ("C2", &[&[0, 2], &[-1, 0]], Some(&[1, 2])),
    ("G2", &[&[0, 1], &[-3, 0]], Some(&[3, 1])),
    ("A3", &[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]], None),
    ("B3", &[&[0, 1, 0], &[-1, 0, 1], &[0, -2, 0]], Some(&[2, 2, 1])),
    // acyclic rank-3 example of infinite type; checks run depth-truncated
    ("W3", &[&[0, 2, 2], &[-1, 0, 1], &[-1, -1, 0]], Some(&[1, 2, 2])),
];

pub fn named(name: &str) -> Result<ExchangeData> {
    let (_, b, d) = CATALOG
        .iter()
        .find(|(n, _, _)| n.eq_ignore_ascii_case(name))
        .ok_or_else(|| {
            let known: Vec<&str> = CATALOG.iter().map(|c| c.0).collect();
            Error::Input(format!("unknown matrix type {name:?}; known: {}", known.join(", ")))
        })?;
    let rows: Vec<Vec<i64>> = b.iter().map(|r| r.to_vec()).collect();
    ExchangeData::new(&IntMatrix::from_rows(&rows)?, d.map(|d| d.to_vec()), None)
}

pub fn load_matrix_file(path: &Path) -> Result<ExchangeData> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    let spec: MatrixSpec =
        serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    spec.build()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scope {
    Exhaustive,
    Truncated { depth: usize },
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Exhaustive => f.write_str("exhaustive"),
            Scope::Truncated { depth } => write!(f, "depth<={depth}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub target: String,
    pub scope: Scope,
    pub status: Status,
    /// Number of objects (variables, seeds, pairs, ...) examined.
    pub checked: usize,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl VerificationReport {
    pub fn line(&self) -> String {
        format!("{:<24} {:<6} {:<8} {:<12} {}", self.check, self.target, self.status, self.scope, self.summary)
    }
}

/// Names accepted by [`verify`], in `verify-all` order.
pub const CHECKS: &[&str] = &[
    "mutation-kernel",
    "exchange-graph",
    "denominators",
    "tropical",
    "sign-coherence",
    "distinct-d",
    "d-basis",
    "g-formula",
    "sink-source-reflection",
    "principal-source",
    "rs310",
    "fz4144",
    "characters",
    "counting",
    "reflection",
    "finite-field",
];

/// Statements with no check of their own, each following from a passing check.
pub const IMPLIED: &[(&str, &str)] = &[
    ("tropical", "FZ IV Conjecture 6.11, through FZ IV Proposition 7.16"),
    ("sign-coherence", "FZ IV Conjecture 7.5 and Reading-Stella Conjecture 2.9"),
    ("sink-source-reflection", "Reading-Stella Conjecture 2.7, through their Proposition 2.10"),
];

/// Primes at which degree-2 monomials are compared with direct-sum counts.
pub const MONOMIAL_PRIMES: [u64; 2] = [2, 3];

/// Depth bound for character suites on infinite exchange graphs: already
/// at depth 3 the wild example needs dimension vectors like `(4, 4, 1)`.
pub const WILD_CHAR_DEPTH: usize = 2;

/// Term count beyond which automatic deepening stops. Exact division cost
/// grows with the product of term counts, so one more level past this
/// takes minutes on the wild example.
pub const TERM_BUDGET: usize = 150;

#[derive(Clone, Debug)]
pub struct HarnessOptions {
    pub limits: GraphLimits,
    pub chars: CharacterOptions,
    /// Restrict sink/source checks to this 0-based vertex.
    pub source: Option<usize>,
    /// Mutation-sequence depth for the kernel check.
    pub kernel_depth: usize,
    /// Only variables reached within this many mutations enter character checks.
    pub char_depth: Option<usize>,
    /// Include degree-2 cluster monomials in the counting check.
    pub monomials: bool,
    /// Deepen the exchange graph one level at a time up to `limits.max_depth`,
    /// stopping early once a variable exceeds [`TERM_BUDGET`] terms.
    pub auto_depth: bool,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions {
            limits: GraphLimits { max_seeds: 5000, max_depth: 12, allow_truncated: true },
            chars: CharacterOptions::default(),
            source: None,
            kernel_depth: 5,
            char_depth: None,
            monomials: false,
            auto_depth: true,
        }
    }
}

struct Var {
    label: String,
    poly: LaurentPoly,
    path: Vec<usize>,
    d: Vec<i64>,
}

/// A target with its exchange graph and non-initial variables.
pub struct Target {
    name: String,
    e: ExchangeData,
    graph: ExchangeGraph,
    vars: Vec<Var>,
    depth: usize,
}

impl Target {
    pub fn new(name: &str, e: ExchangeData, opts: &HarnessOptions) -> Result<Self> {
        let (graph, depth) = explore(&e, opts.limits, opts.auto_depth)?;
        let n = e.rank();
        let initial = graph.initial_labels();
        let mut vars = Vec::new();
        for (label, (poly, node)) in graph.variables() {
            if initial.contains(&label) {
                continue;
            }
            let d = d_vector(&poly, n)?;
            vars.push(Var { label, poly, path: graph.nodes()[node].path.clone(), d });
        }
        Ok(Target { name: name.to_string(), e, graph, vars, depth })
    }

    pub fn exchange(&self) -> &ExchangeData {
        &self.e
    }

    pub fn graph(&self) -> &ExchangeGraph {
        &self.graph
    }

    fn scope(&self) -> Scope {
        if self.graph.is_finite() {
            Scope::Exhaustive
        } else {
            Scope::Truncated { depth: self.depth }
        }
    }

    fn report(&self, check: &str, checked: usize, summary: String, fail: Option<Value>, opts: &HarnessOptions) -> VerificationReport {
        self.report_scoped(check, self.scope(), checked, summary, fail, opts)
    }

    fn report_scoped(
        &self,
        check: &str,
        scope: Scope,
        checked: usize,
        summary: String,
        fail: Option<Value>,
        opts: &HarnessOptions,
    ) -> VerificationReport {
        let counterexample = fail.map(|detail| {
            json!({
                "matrix": { "B": self.e.b().to_rows(), "D": self.e.symmetrizer() },
                "rng_seed": opts.chars.rng_seed,
                "primes": opts.chars.primes,
                "detail": detail,
            })
        });
        VerificationReport {
            check: check.to_string(),
            target: self.name.clone(),
            scope,
            status: if counterexample.is_some() { Status::Fail } else { Status::Pass },
            checked,
            summary,
            counterexample,
        }
    }

    fn skipped(&self, check: &str, why: &str) -> VerificationReport {
        VerificationReport {
            check: check.to_string(),
            target: self.name.clone(),
            scope: self.scope(),
            status: Status::Skipped,
            checked: 0,
            summary: why.to_string(),
            counterexample: None,
        }
    }

    /// Character suites on a truncated graph default to [`WILD_CHAR_DEPTH`].
    fn char_depth(&self, opts: &HarnessOptions) -> Option<usize> {
        opts.char_depth.or((!self.graph.is_finite()).then_some(WILD_CHAR_DEPTH))
    }

    fn char_vars(&self, opts: &HarnessOptions) -> Vec<&Var> {
        let depth = self.char_depth(opts);
        self.vars.iter().filter(|v| depth.is_none_or(|m| v.path.len() <= m)).collect()
    }

    fn char_scope(&self, opts: &HarnessOptions) -> Scope {
        match self.char_depth(opts) {
            Some(m) if self.vars.iter().any(|v| v.path.len() > m) => Scope::Truncated { depth: m },
            _ => self.scope(),
        }
    }

    fn reflection_vertices(&self, opts: &HarnessOptions, sources_only: bool) -> Result<Vec<usize>> {
        let n = self.e.rank();
        let ok = |k: usize| self.e.is_source(k) || (!sources_only && self.e.is_sink(k));
        match opts.source {
            Some(k) if k >= n => Err(Error::IndexOutOfRange { index: k + 1, n }),
            Some(k) if !ok(k) => Err(Error::Input(format!(
                "vertex {} is not a {}",
                k + 1,
                if sources_only { "source" } else { "sink or source" }
            ))),
            Some(k) => Ok(vec![k]),
            None => Ok((0..n).filter(|&k| ok(k)).collect()),
        }
    }
}

/// Exchange graph within `limits`; with `auto_depth`, deepened one level at
/// a time until it closes, reaches `limits.max_depth`, or holds a variable
/// with more than [`TERM_BUDGET`] terms. Returns the graph and the depth used.
pub fn explore(e: &ExchangeData, limits: GraphLimits, auto_depth: bool) -> Result<(ExchangeGraph, usize)> {
    let limits = GraphLimits { allow_truncated: true, ..limits };
    if !auto_depth {
        return Ok((enumerate_exchange_graph(e, limits)?, limits.max_depth));
    }
    let mut depth = 1;
    loop {
        let g = enumerate_exchange_graph(e, GraphLimits { max_depth: depth, ..limits })?;
        let largest = g.nodes().iter().flat_map(|node| node.seed.cluster()).map(LaurentPoly::len).max();
        if g.is_finite() || depth >= limits.max_depth || largest.unwrap_or(0) > TERM_BUDGET {
            return Ok((g, depth));
        }
        depth += 1;
    }
}

fn one_based(path: &[usize]) -> Vec<usize> {
    path.iter().map(|k| k + 1).collect()
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Run one named check on a prepared target.
pub fn verify(check: &str, t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    match check {
        "mutation-kernel" => Ok(mutation_kernel(t, opts)),
        "exchange-graph" => Ok(exchange_graph(t, opts)),
        "denominators" => Ok(denominators(t, opts)),
        "tropical" => tropical(t, opts),
        "sign-coherence" => sign_coherence(t, opts),
        "distinct-d" => distinct_d(t, opts),
        "d-basis" => d_basis(t, opts),
        "g-formula" => g_formula(t, opts),
        "sink-source-reflection" => sink_source_reflection(t, opts),
        "principal-source" => principal_source(t, opts),
        "rs310" => rs310(t, opts),
        "fz4144" => fz4144(t, opts),
        "characters" => characters(t, opts),
        "counting" => Ok(counting(t, opts)),
        "reflection" => reflection(t, opts),
        "finite-field" => finite_field(t, opts),
        other => Err(Error::Input(format!("unknown check {other:?}; known: {}", CHECKS.join(", ")))),
    }
}

/// Every check in [`CHECKS`]; suites run in parallel, reports keep order.
pub fn verify_all(t: &Target, opts: &HarnessOptions) -> Result<Vec<VerificationReport>> {
    CHECKS.par_iter().map(|c| verify(c, t, opts)).collect()
}

fn mutation_kernel(t: &Target, opts: &HarnessOptions) -> VerificationReport {
    let n = t.e.rank();
    let d = t.e.symmetrizer().to_vec();
    let mut stack = vec![(t.e.clone(), Vec::<usize>::new())];
    let mut checked = 0;
    while let Some((x, path)) = stack.pop() {
        for k in 0..n {
            let mut p = path.clone();
            p.push(k);
            let bad = |why: &str| Some(json!({ "path": one_based(&p), "violation": why }));
            let fail = match x.mutate(k) {
                Err(err) => bad(&err.to_string()),
                Ok(y) => {
                    checked += 1;
                    let fail = if y.mutate(k).as_ref() != Ok(&x) {
                        bad("mutation is not an involution")
                    } else if y.symmetrizer() != d.as_slice() || !y.is_skew_symmetrizable() {
                        bad("D no longer symmetrizes B")
                    } else if !y.is_compatible() {
                        bad("Btilde^T Lambda != [D 0]")
                    } else {
                        None
                    };
                    if fail.is_none() && p.len() < opts.kernel_depth {
                        stack.push((y, p.clone()));
                    }
                    fail
                }
            };
            if fail.is_some() {
                return t.report_scoped("mutation-kernel", Scope::Truncated { depth: opts.kernel_depth }, checked, String::from("violation"), fail, opts);
            }
        }
    }
    t.report_scoped(
        "mutation-kernel",
        Scope::Truncated { depth: opts.kernel_depth },
        checked,
        format!("{checked} mutations checked"),
        None,
        opts,
    )
}

fn exchange_graph(t: &Target, opts: &HarnessOptions) -> VerificationReport {
    if !t.graph.is_finite() {
        return t.skipped("exchange-graph", &format!("graph truncated at {} seeds", t.graph.len()));
    }
    let fail = (!t.graph.check_regular()).then(|| json!({ "violation": "exchange graph is not n-regular" }));
    t.report("exchange-graph", t.graph.len(), format!("{} seeds, {} variables", t.graph.len(), t.graph.variables().len()), fail, opts)
}

fn denominators(t: &Target, opts: &HarnessOptions) -> VerificationReport {
    let vars = t.char_vars(opts);
    let fails: Vec<Value> = vars
        .par_iter()
        .filter_map(|v| {
            let bad = |why: String| Some(json!({ "variable": v.label, "path": one_based(&v.path), "v": v.d, "violation": why }));
            if v.d.iter().any(|&x| x < 0) {
                return bad("negative denominator entry".into());
            }
            match generic_character(&t.e, &v.d, &opts.chars) {
                Err(err) => bad(err.to_string()),
                Ok(tab) if tab.classical != v.poly => bad("character of the rigid representation differs".into()),
                Ok(tab) if tab.d != v.d => bad(format!("character has d-vector {:?}", tab.d)),
                Ok(_) => None,
            }
        })
        .collect();
    t.report_scoped(
        "denominators",
        t.char_scope(opts),
        vars.len(),
        format!("{} variables checked", vars.len()),
        fails.into_iter().next(),
        opts,
    )
}

fn tropical(t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    let n = t.e.rank();
    let zeta: Vec<Vec<i64>> = (0..n).map(|i| unit(n, i).iter().map(|x| -x).collect()).collect();
    for v in &t.vars {
        let trop = f_polynomial(&v.poly, n).tropical_evaluate(&zeta)?;
        let want: Vec<i64> = v.d.iter().map(|x| -x).collect();
        if trop != want {
            let fail = json!({ "variable": v.label, "path": one_based(&v.path), "d": v.d, "tropical": trop });
            return Ok(t.report("tropical", t.vars.len(), "mismatch".into(), Some(fail), opts));
        }
    }
    Ok(t.report("tropical", t.vars.len(), format!("F(1/y) = y^-d for {} variables", t.vars.len()), None, opts))
}

fn sign_coherence(t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    let n = t.e.rank();
    let initial = t.graph.initial_labels();
    let mut checked = 0;
    for v in &t.vars {
        let bad = |why: String| json!({ "variable": v.label, "path": one_based(&v.path), "d": v.d, "violation": why });
        // (1) non-negative
        if v.d.iter().any(|&x| x < 0) {
            return Ok(t.report("sign-coherence", checked, "negative entry".into(), Some(bad("d has a negative entry".into())), opts));
        }
        // (3) same d-vector in every seed containing the variable
        for node in t.graph.nodes().iter().filter(|node| node.contains(&v.label)) {
            let pos = node.seed.labels().iter().position(|s| *s == v.label).expect("member");
            let d = d_vector(node.seed.var(pos), n)?;
            if d != v.d {
                return Ok(t.report("sign-coherence", checked, "d-vector varies".into(), Some(bad(format!("d = {d:?} at path {:?}", one_based(&node.path)))), opts));
            }
        }
        // (2) v_i = 0 iff compatible with x_i
        if t.graph.is_finite() {
            for (i, xi) in initial.iter().enumerate() {
                let compatible = t.graph.nodes().iter().any(|node| node.contains(&v.label) && node.contains(xi));
                if compatible != (v.d[i] == 0) {
                    return Ok(t.report("sign-coherence", checked, "compatibility".into(), Some(bad(format!("v_{} = {} but compatible = {compatible}", i + 1, v.d[i]))), opts));
                }
            }
        }
        checked += 1;
    }
    if !t.graph.is_finite() {
        return Ok(t.skipped("sign-coherence", "compatibility part needs the full exchange graph"));
    }
    Ok(t.report("sign-coherence", checked, format!("parts (1)-(3) hold for {checked} variables"), None, opts))
}

/// Degree <= 2 cluster monomials keyed by sorted labels.
fn cluster_monomials(t: &Target) -> BTreeMap<Vec<String>, (LaurentPoly, Vec<usize>)> {
    let m = 2 * t.e.rank();
    let mut out = BTreeMap::new();
    out.insert(Vec::new(), (LaurentPoly::one(m), Vec::new()));
    for node in t.graph.nodes() {
        let labels = node.seed.labels();
        for a in 0..labels.len() {
            out.entry(vec![labels[a].clone()]).or_insert_with(|| (node.seed.var(a).clone(), node.path.clone()));
            for b in a..labels.len() {
                let mut key = vec![labels[a].clone(), labels[b].clone()];
                key.sort();
                out.entry(key).or_insert_with(|| (node.seed.var(a) * node.seed.var(b), node.path.clone()));
            }
        }
    }
    out
}

fn distinct_d(t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    let n = t.e.rank();
    let monos = cluster_monomials(t);
    let mut seen: BTreeMap<Vec<i64>, &Vec<String>> = BTreeMap::new();
    for (key, (poly, path)) in &monos {
        let d = d_vector(poly, n)?;
        if let Some(other) = seen.insert(d.clone(), key) {
            let fail = json!({ "monomials": [other, key], "d": d, "path": one_based(path) });
            return Ok(t.report("distinct-d", monos.len(), "collision".into(), Some(fail), opts));
        }
    }
    Ok(t.report("distinct-d", monos.len(), format!("{} monomials of degree <= 2 have distinct d-vectors", monos.len()), None, opts))
}

fn d_basis(t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    let n = t.e.rank();
    for node in t.graph.nodes() {
        let cols = node.seed.cluster().iter().map(|x| d_vector(x, n)).collect::<Result<Vec<_>>>()?;
        let det = IntMatrix::from_rows(&cols)?.det();
        if det.abs() != 1 {
            let fail = json!({ "path": one_based(&node.path), "d_vectors": cols, "det": det });
            return Ok(t.report("d-basis", t.graph.len(), "not a basis".into(), Some(fail), opts));
        }
    }
    Ok(t.report("d-basis", t.graph.len(), format!("every cluster of {} has det +-1", t.graph.len()), None, opts))
}

fn g_formula(t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    let n = t.e.rank();
    let em = t.e.e_matrix();
    for v in &t.vars {
        let g = g_vector(&v.poly, n)?;
        let want: Vec<i64> = em.mul_vec(&v.d).iter().map(|x| -x).collect();
        if g != want {
            let fail = json!({ "variable": v.label, "path": one_based(&v.path), "v": v.d, "g": g, "minus_Ev": want });
            return Ok(t.report("g-formula", t.vars.len(), "mismatch".into(), Some(fail), opts));
        }
    }
    Ok(t.report("g-formula", t.vars.len(), format!("g = -Ev for {} variables", t.vars.len()), None, opts))
}

/// A variable reached by path `P` from the initial seed is reached by
/// `k, P` from the seed mutated once at `k`; its d-vectors in the two
/// algebras must differ by `s_k`.
fn sink_source_reflection(t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    let n = t.e.rank();
    let q = ValuedQuiver::from_exchange(&t.e)?;
    let ks = t.reflection_vertices(opts, false)?;
    let mut checked = 0;
    for &k in &ks {
        let e1 = ExchangeData::new(&t.e.mutate(k)?.b(), Some(t.e.symmetrizer().to_vec()), None)?;
        let root1 = ClassicalSeed::initial(&e1).mutate(k)?;
        for v in &t.vars {
            let node = t.graph.nodes().iter().find(|node| node.path == v.path).expect("node of variable");
            let pos = node.seed.labels().iter().position(|s| *s == v.label).expect("member");
            let x1 = root1.mutate_seq(&v.path)?;
            let d1 = d_vector(x1.var(pos), n)?;
            let want = q.s_k(k, &v.d);
            if d1 != want {
                let mut path = vec![k];
                path.extend(&v.path);
                let fail = json!({ "k": k + 1, "variable": v.label, "path": one_based(&path), "d": v.d, "d_mutated": d1, "s_k_d": want });
                return Ok(t.report("sink-source-reflection", checked, "mismatch".into(), Some(fail), opts));
            }
            checked += 1;
        }
    }
    let ks1 = one_based(&ks);
    Ok(t.report("sink-source-reflection", checked, format!("d transforms by s_k at k in {ks1:?} ({checked} variables)"), None, opts))
}

fn principal_source(t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    let n = t.e.rank();
    let ks = t.reflection_vertices(opts, true)?;
    let mut checked = 0;
    for &k in &ks {
        // y'_j = y_j y_k^{-b_kj - 2 delta_jk}
        let zeta: Vec<Vec<i64>> = (0..n)
            .map(|j| {
                let mut z = unit(n, j);
                z[k] += -t.e.b_entry(k, j) - if j == k { 2 } else { 0 };
                z
            })
            .collect();
        for v in &t.vars {
            let trop = f_polynomial(&v.poly, n).tropical_evaluate(&zeta)?;
            let want = if v.d == unit(n, k) { unit(n, k).iter().map(|x| -x).collect() } else { vec![0; n] };
            if trop != want {
                let fail = json!({ "k": k + 1, "variable": v.label, "path": one_based(&v.path), "v": v.d, "tropical": trop, "expected": want });
                return Ok(t.report("principal-source", checked, "mismatch".into(), Some(fail), opts));
            }
            checked += 1;
        }
    }
    let ks1 = one_based(&ks);
    Ok(t.report("principal-source", checked, format!("F' = 1 except y_k^-1 at S_k, k in {ks1:?} ({checked} variables)"), None, opts))
}

fn rs310(t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    if !t.graph.is_finite() {
        return Ok(t.skipped("rs310", "needs the full exchange graph"));
    }
    let mut fixed: BTreeSet<Vec<String>> = BTreeSet::new();
    for node in t.graph.nodes() {
        for (a, x) in node.key.iter().enumerate() {
            fixed.insert(vec![x.clone()]);
            for y in &node.key[a + 1..] {
                fixed.insert(vec![x.clone(), y.clone()]);
            }
        }
    }
    for f in &fixed {
        let c = induced_subgraph_connected(&t.graph, f)?;
        if !c.connected {
            let (a, b) = c.witness.expect("witness");
            let paths = [one_based(&t.graph.nodes()[a].path), one_based(&t.graph.nodes()[b].path)];
            let fail = json!({ "fixed": f, "disconnected_paths": paths });
            return Ok(t.report("rs310", fixed.len(), "disconnected".into(), Some(fail), opts));
        }
    }
    let singles = fixed.iter().filter(|f| f.len() == 1).count();
    Ok(t.report(
        "rs310",
        fixed.len(),
        format!("connected for {singles} variables and {} compatible pairs", fixed.len() - singles),
        None,
        opts,
    ))
}

fn fz4144(t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    if !t.graph.is_finite() {
        return Ok(t.skipped("fz4144", "needs the full exchange graph"));
    }
    let c = acyclic_subgraph_connected(&t.graph)?;
    let fail = (!c.connected).then(|| {
        let (a, b) = c.witness.expect("witness");
        json!({ "disconnected_paths": [one_based(&t.graph.nodes()[a].path), one_based(&t.graph.nodes()[b].path)] })
    });
    Ok(t.report("fz4144", c.nodes.len(), format!("{} acyclic seeds form a connected subgraph", c.nodes.len()), fail, opts))
}

fn characters(t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    let depth = t.char_depth(opts).unwrap_or(usize::MAX);
    let limits = GraphLimits { allow_truncated: true, max_depth: t.depth.min(depth), ..opts.limits };
    let checks = verify_character_vs_mutation(&t.e, depth, limits, &opts.chars)?;
    let mut fail = checks.iter().find(|c| !c.passed()).map(|c| serde_json::to_value(c).expect("serializable"));
    let mut summary = format!("X_v equals the quantum cluster variable for {} variables", checks.len());
    let mut checked = checks.len();
    if opts.monomials {
        // exact point counts of direct sums, so small primes reach every pair
        let truncated;
        let graph = if t.graph.is_finite() {
            &t.graph
        } else {
            truncated = enumerate_exchange_graph(&t.e, limits)?;
            &truncated
        };
        let pairs = verify_monomials(&t.e, graph, &MONOMIAL_PRIMES, &opts.chars)?;
        if fail.is_none() {
            fail = pairs.iter().find(|m| !m.passed).map(|m| serde_json::to_value(m).expect("serializable"));
        }
        checked += pairs.len();
        summary += &format!(", normalized products match {} degree-2 monomials at p in {MONOMIAL_PRIMES:?}", pairs.len());
    }
    Ok(t.report_scoped("characters", t.char_scope(opts), checked, summary, fail, opts))
}

fn counting(t: &Target, opts: &HarnessOptions) -> VerificationReport {
    let vars = t.char_vars(opts);
    let mut jobs: Vec<(Vec<&Var>, Vec<usize>)> = vars.iter().map(|v| (vec![*v], v.path.clone())).collect();
    if opts.monomials {
        let wanted: BTreeSet<&str> = vars.iter().map(|v| v.label.as_str()).collect();
        let mut pairs = BTreeSet::new();
        for node in t.graph.nodes() {
            for (a, x) in node.key.iter().enumerate() {
                for y in &node.key[a..] {
                    if wanted.contains(x.as_str()) && wanted.contains(y.as_str()) && pairs.insert((x.clone(), y.clone())) {
                        let find = |l: &str| *vars.iter().find(|v| v.label == l).expect("variable");
                        jobs.push((vec![find(x), find(y)], node.path.clone()));
                    }
                }
            }
        }
    }
    // Ok(false): a monomial whose Grassmannians exceed the enumeration cap.
    let outcomes: Vec<std::result::Result<bool, Value>> = jobs
        .par_iter()
        .map(|(parts, path)| {
            let labels: Vec<&str> = parts.iter().map(|v| v.label.as_str()).collect();
            let bad = |why: String| Err(json!({ "variables": labels, "path": one_based(path), "violation": why }));
            let (table, expect) = match parts.as_slice() {
                [a] => (generic_character(&t.e, &a.d, &opts.chars), a.poly.clone()),
                [a, b] => (generic_monomial_character(&t.e, &a.d, &b.d, &opts.chars), &a.poly * &b.poly),
                _ => unreachable!(),
            };
            match table {
                Err(Error::CapExceeded { .. }) if parts.len() == 2 => Ok(false),
                Err(err) => bad(err.to_string()),
                Ok(tab) if tab.classical != expect => bad(format!("character of v = {:?} differs from the cluster monomial", tab.v)),
                Ok(_) => Ok(true),
            }
        })
        .collect();
    let over_cap = outcomes.iter().filter(|o| matches!(o, Ok(false))).count();
    let checked = jobs.len() - over_cap;
    let held = opts.chars.held_out.map_or("next prime".to_string(), |h| h.to_string());
    let mut summary = format!("{checked} rigid v interpolated over {:?}, held out {held}", opts.chars.primes);
    if over_cap > 0 {
        summary += &format!("; {over_cap} monomials beyond the enumeration cap");
    }
    t.report_scoped("counting", t.char_scope(opts), checked, summary, outcomes.into_iter().find_map(|o| o.err()), opts)
}

fn reflection(t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    let n = t.e.rank();
    let ks = t.reflection_vertices(opts, false)?;
    let mut checked = 0;
    for &k in &ks {
        let vs: Vec<Vec<i64>> = t.char_vars(opts).iter().map(|v| v.d.clone()).filter(|d| *d != unit(n, k)).collect();
        let checks = verify_reflection(&t.e, k, &vs, &opts.chars)?;
        checked += checks.len();
        if let Some(c) = checks.iter().find(|c| !c.passed) {
            let fail = serde_json::to_value(c).expect("serializable");
            return Ok(t.report_scoped("reflection", t.char_scope(opts), checked, "mismatch".into(), Some(fail), opts));
        }
    }
    let ks1 = one_based(&ks);
    Ok(t.report_scoped(
        "reflection",
        t.char_scope(opts),
        checked,
        format!("X_V = X'_(Sigma_k V) at k in {ks1:?} ({checked} representations)"),
        None,
        opts,
    ))
}

/// Subspace counts against Gaussian binomials for every field of size <= 9,
/// and the embedding composition law in the target's towers at p = 2, 3.
fn finite_field(t: &Target, opts: &HarnessOptions) -> Result<VerificationReport> {
    let mut checked = 0;
    for (p, d) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1)] {
        let tower = build_tower(p, &[d])?;
        let q = p.pow(d);
        for k in 0..=3usize {
            for e in 0..=k {
                let count = enumerate_subspaces(&tower, d, k, e, opts.chars.cap)?.count() as u128;
                let want = gaussian_binomial(k as u32, e as u32, q).expect("small");
                if count != want {
                    let fail = json!({ "q": q, "k": k, "e": e, "count": count, "gaussian": want });
                    return Ok(t.report_scoped("finite-field", Scope::Exhaustive, checked, "count mismatch".into(), Some(fail), opts));
                }
                checked += 1;
            }
        }
    }
    let q = ValuedQuiver::from_exchange(&t.e)?;
    for p in [2u64, 3] {
        let tower = q.tower(p, opts.chars.field_cap)?;
        let degs: Vec<u32> = tower.degrees().collect();
        for &g in &degs {
            for &d in degs.iter().filter(|&&d| d % g == 0) {
                for &h in degs.iter().filter(|&&h| h % d == 0) {
                    for x in tower.field(g).elements() {
                        if tower.embed(d, h, tower.embed(g, d, x)) != tower.embed(g, h, x) {
                            let fail = json!({ "p": p, "degrees": [g, d, h], "element": x });
                            return Ok(t.report_scoped("finite-field", Scope::Exhaustive, checked, "composition fails".into(), Some(fail), opts));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(t.report_scoped(
        "finite-field",
        Scope::Exhaustive,
        checked,
        format!("{checked} subspace counts and embedding compositions"),
        None,
        opts,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn target(name: &str) -> Target {
        Target::new(name, named(name).unwrap(), &HarnessOptions::default()).unwrap()
    }

    #[test]
    fn catalog_builds() {
        for (name, _, _) in CATALOG {
            let e = named(name).unwrap();
            assert!(e.is_acyclic() && e.is_compatible(), "{name}");
        }
        assert!(matches!(named("E9"), Err(Error::Input(_))));
    }

    #[test]
    fn graph_checks_on_b2() {
        let t = target("B2");
        let opts = HarnessOptions::default();
        for c in ["mutation-kernel", "exchange-graph", "tropical", "sign-coherence", "distinct-d", "d-basis", "g-formula"] {
            let r = verify(c, &t, &opts).unwrap();
            assert_eq!(r.status, Status::Pass, "{r:?}");
        }
        assert_eq!(verify("exchange-graph", &t, &opts).unwrap().checked, 6);
        assert!(verify("frobnicate", &t, &opts).is_err());
    }

    #[test]
    fn principal_source_on_b2_vertex_2() {
        let t = target("B2");
        let opts = HarnessOptions { source: Some(1), ..Default::default() };
        let r = verify("principal-source", &t, &opts).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        assert_eq!(r.checked, 4);
        // vertex 1 is a sink
        let opts = HarnessOptions { source: Some(0), ..Default::default() };
        assert!(verify("principal-source", &t, &opts).is_err());
    }

    #[test]
    fn d_basis_on_a3() {
        let r = verify("d-basis", &target("A3"), &HarnessOptions::default()).unwrap();
        assert_eq!((r.status, r.checked), (Status::Pass, 14));
    }

    #[test]
    fn denominators_on_b2_checks_four_variables() {
        let r = verify("denominators", &target("B2"), &HarnessOptions::default()).unwrap();
        assert_eq!((r.status, r.checked), (Status::Pass, 4), "{r:?}");
    }

    #[test]
    fn wild_target_skips_graph_checks() {
        let opts = HarnessOptions {
            limits: GraphLimits { max_depth: 3, ..HarnessOptions::default().limits },
            auto_depth: false,
            ..Default::default()
        };
        let t = Target::new("W3", named("W3").unwrap(), &opts).unwrap();
        assert_eq!(verify("rs310", &t, &opts).unwrap().status, Status::Skipped);
        assert_eq!(verify("exchange-graph", &t, &opts).unwrap().status, Status::Skipped);
        let r = verify("d-basis", &t, &opts).unwrap();
        assert_eq!((r.status, r.scope), (Status::Pass, Scope::Truncated { depth: 3 }));
    }

    #[test]
    fn failing_report_carries_reproduction_data() {
        let t = target("A2");
        let opts = HarnessOptions::default();
        let r = t.report("x", 1, "forced".into(), Some(json!({ "path": [1] })), &opts);
        assert_eq!(r.status, Status::Fail);
        let c = r.counterexample.unwrap();
        assert_eq!(c["matrix"]["B"], json!([[0, 1], [-1, 0]]));
        assert_eq!(c["rng_seed"], json!(0));
        assert_eq!(c["detail"]["path"], json!([1]));
    }
}
