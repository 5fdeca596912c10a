//! Classical seeds with principal coefficients, their cluster variables
//! as Laurent polynomials in `x_1..x_n, y_1..y_n`, and the exchange graph.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exchange::ExchangeData;
use crate::laurent::{cluster_names, LaurentPoly};

/// Labeled seed: exchange data plus the current cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalSeed {
    exchange: ExchangeData,
    vars: Vec<LaurentPoly>,
    depth: usize,
}

impl ClassicalSeed {
    pub fn initial(e: &ExchangeData) -> Self {
        let n = e.rank();
        let vars = (0..n).map(|i| LaurentPoly::var(2 * n, i)).collect();
        ClassicalSeed { exchange: e.clone(), vars, depth: 0 }
    }

    pub fn exchange(&self) -> &ExchangeData {
        &self.exchange
    }

    pub fn cluster(&self) -> &[LaurentPoly] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &LaurentPoly {
        &self.vars[i]
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn rank(&self) -> usize {
        self.exchange.rank()
    }

    fn monomial_in_cluster(&self, a: &[i64]) -> LaurentPoly {
        let n = self.rank();
        let mut frozen = vec![0; 2 * n];
        frozen[n..].copy_from_slice(&a[n..]);
        let mut out = LaurentPoly::monomial(frozen, 1);
        for i in 0..n {
            debug_assert!(a[i] >= 0);
            if a[i] > 0 {
                out = &out * &self.vars[i].pow(a[i] as u32);
            }
        }
        out
    }

    /// `x'_k = (x^{[b^k]+} + x^{[-b^k]+}) / x_k`, checked to be a Laurent polynomial.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        let n = self.rank();
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k + 1, n });
        }
        let b = self.exchange.btilde().col(k);
        let bp: Vec<i64> = b.iter().map(|&x| x.max(0)).collect();
        let bm: Vec<i64> = b.iter().map(|&x| (-x).max(0)).collect();
        let num = &self.monomial_in_cluster(&bp) + &self.monomial_in_cluster(&bm);
        let new_k = num.exact_div(&self.vars[k])?;
        let mut vars = self.vars.clone();
        vars[k] = new_k;
        Ok(ClassicalSeed { exchange: self.exchange.mutate(k)?, vars, depth: self.depth + 1 })
    }

    pub fn mutate_seq(&self, seq: &[usize]) -> Result<Self> {
        seq.iter().try_fold(self.clone(), |s, &k| s.mutate(k))
    }

    /// Canonical strings of the cluster variables, in label order.
    pub fn labels(&self) -> Vec<String> {
        let names = cluster_names(self.rank());
        self.vars.iter().map(|v| v.render(&names)).collect()
    }
}

/// `F(y) = x(1, ..., 1, y)`.
pub fn f_polynomial(v: &LaurentPoly, n: usize) -> LaurentPoly {
    v.keep_vars(n..2 * n)
}

/// x-exponent of the unique term with zero y-exponent.
pub fn g_vector(v: &LaurentPoly, n: usize) -> Result<Vec<i64>> {
    let mut found = v.terms().filter(|(e, _)| e[n..].iter().all(|&x| x == 0));
    match (found.next(), found.next()) {
        (Some((e, _)), None) => Ok(e[..n].to_vec()),
        _ => Err(Error::NoConstantTerm),
    }
}

pub fn d_vector(v: &LaurentPoly, n: usize) -> Result<Vec<i64>> {
    v.denominator_vector(n)
}

/// `x^g F(yhat)` with `yhat_j = y_j prod_i x_i^{b_ij}` (initial `B`).
pub fn reconstruct_from_g_and_f(g: &[i64], f: &LaurentPoly, e: &ExchangeData) -> LaurentPoly {
    let n = e.rank();
    LaurentPoly::from_terms(
        2 * n,
        f.terms().map(|(y, c)| {
            let mut exp = vec![0; 2 * n];
            for i in 0..n {
                exp[i] = g[i] + (0..n).map(|j| e.b_entry(i, j) * y[j]).sum::<i64>();
                exp[n + i] = y[i];
            }
            (exp, c.clone())
        }),
    )
}

/// Caps for exchange-graph exploration.
#[derive(Clone, Copy, Debug)]
pub struct GraphLimits {
    pub max_seeds: usize,
    pub max_depth: usize,
    pub allow_truncated: bool,
}

impl Default for GraphLimits {
    fn default() -> Self {
        GraphLimits { max_seeds: 10_000, max_depth: 64, allow_truncated: false }
    }
}

/// An unlabeled seed reached by BFS.
#[derive(Clone, Debug)]
pub struct GraphNode {
    pub seed: ClassicalSeed,
    /// Sorted canonical strings of the cluster variables.
    pub key: Vec<String>,
    /// Mutation path (0-based directions) from the initial seed.
    pub path: Vec<usize>,
}

impl GraphNode {
    pub fn contains(&self, var: &str) -> bool {
        self.key.binary_search_by(|s| s.as_str().cmp(var)).is_ok()
    }
}

#[derive(Clone, Debug)]
pub struct ExchangeGraph {
    rank: usize,
    nodes: Vec<GraphNode>,
    neighbors: Vec<Vec<Option<usize>>>,
    finite: bool,
}

impl ExchangeGraph {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True when BFS closed without hitting a cap.
    pub fn is_finite(&self) -> bool {
        self.finite
    }

    pub fn neighbor(&self, node: usize, k: usize) -> Option<usize> {
        self.neighbors[node][k]
    }

    /// Undirected edges `(u, v, k)` with `u < v` and `k` the 0-based direction at `u`.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (u, nb) in self.neighbors.iter().enumerate() {
            for (k, v) in nb.iter().enumerate() {
                if let Some(v) = *v {
                    if u < v {
                        out.push((u, v, k));
                    }
                }
            }
        }
        out
    }

    /// Every edge is seen from both ends and every closed node has `n`
    /// distinct neighbours.
    pub fn check_regular(&self) -> bool {
        self.neighbors.iter().enumerate().all(|(u, nb)| {
            let present: Vec<usize> = nb.iter().flatten().copied().collect();
            let mut dedup = present.clone();
            dedup.sort_unstable();
            dedup.dedup();
            dedup.len() == present.len()
                && present.iter().all(|&v| v != u && self.neighbors[v].contains(&Some(u)))
                && (!self.finite || present.len() == self.rank)
        })
    }

    /// All distinct cluster variables, keyed by canonical string, with the
    /// first node containing each.
    pub fn variables(&self) -> BTreeMap<String, (LaurentPoly, usize)> {
        let mut out = BTreeMap::new();
        for (id, node) in self.nodes.iter().enumerate() {
            for (s, v) in node.seed.labels().into_iter().zip(node.seed.cluster()) {
                out.entry(s).or_insert_with(|| (v.clone(), id));
            }
        }
        out
    }

    /// Canonical strings of the initial cluster variables `x_1..x_n`.
    pub fn initial_labels(&self) -> Vec<String> {
        (1..=self.rank).map(|i| format!("x{i}")).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Node<'a> {
            id: usize,
            #[serde(rename = "B")]
            b: Vec<Vec<i64>>,
            acyclic: bool,
            variables: &'a [String],
        }
        let nodes: Vec<Node> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| Node {
                id,
                b: n.seed.exchange().b().to_rows(),
                acyclic: n.seed.exchange().is_acyclic(),
                variables: &n.key,
            })
            .collect();
        let edges: Vec<[usize; 3]> = self.edges().into_iter().map(|(u, v, k)| [u, v, k + 1]).collect();
        serde_json::json!({ "nodes": nodes, "edges": edges, "finite": self.finite })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph exchange {\n");
        for (id, n) in self.nodes.iter().enumerate() {
            let label = n.key.join("\\n").replace('"', "'");
            s.push_str(&format!("  n{id} [label=\"{label}\"];\n"));
        }
        for (u, v, k) in self.edges() {
            s.push_str(&format!("  n{u} -- n{v} [label=\"{}\"];\n", k + 1));
        }
        s.push_str("}\n");
        s
    }
}

fn seed_key(seed: &ClassicalSeed) -> Vec<String> {
    let mut key = seed.labels();
    key.sort();
    key
}

/// Breadth-first exploration of the exchange graph on unlabeled seeds.
pub fn enumerate_exchange_graph(e: &ExchangeData, limits: GraphLimits) -> Result<ExchangeGraph> {
    if limits.max_seeds == 0 {
        return Err(Error::Input("max_seeds must be positive".into()));
    }
    let n = e.rank();
    let root = ClassicalSeed::initial(e);
    let mut index: HashMap<Vec<String>, usize> = HashMap::new();
    let key = seed_key(&root);
    index.insert(key.clone(), 0);
    let mut nodes = vec![GraphNode { seed: root, key, path: Vec::new() }];
    let mut neighbors = vec![vec![None; n]];
    let mut finite = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for k in 0..n {
            if neighbors[u][k].is_some() {
                continue;
            }
            let next = nodes[u].seed.mutate(k)?;
            let key = seed_key(&next);
            let v = match index.get(&key) {
                Some(&v) => v,
                None => {
                    if nodes[u].path.len() >= limits.max_depth || nodes.len() >= limits.max_seeds {
                        finite = false;
                        continue;
                    }
                    let v = nodes.len();
                    let mut path = nodes[u].path.clone();
                    path.push(k);
                    index.insert(key.clone(), v);
                    nodes.push(GraphNode { seed: next, key, path });
                    neighbors.push(vec![None; n]);
                    queue.push_back(v);
                    v
                }
            };
            neighbors[u][k] = Some(v);
            // mutation is an involution: find the direction at v leading back
            let back = nodes[v].seed.labels();
            let here = nodes[u].seed.labels();
            if let Some(kb) = (0..n).find(|&j| !here.contains(&back[j])) {
                neighbors[v][kb] = Some(u);
            }
        }
    }
    if !finite && !limits.allow_truncated {
        return Err(Error::CapExceeded {
            what: "exchange graph".into(),
            needed: format!("more than {} seeds or depth {}", nodes.len(), limits.max_depth),
            cap: limits.max_seeds as u64,
        });
    }
    Ok(ExchangeGraph { rank: n, nodes, neighbors, finite })
}

/// Result of a connectivity query on an induced subgraph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    pub connected: bool,
    /// Nodes of the induced subgraph.
    pub nodes: Vec<usize>,
    /// Spanning-tree edges when connected.
    pub tree: Vec<(usize, usize)>,
    /// Two nodes in different components when disconnected.
    pub witness: Option<(usize, usize)>,
}

fn induced_connected<P: Fn(&GraphNode) -> bool>(g: &ExchangeGraph, keep: P) -> Result<Connectivity> {
    if !g.finite {
        return Err(Error::GraphTruncated);
    }
    let members: Vec<usize> = (0..g.len()).filter(|&i| keep(&g.nodes[i])).collect();
    let Some(&start) = members.first() else {
        return Ok(Connectivity { connected: true, nodes: members, tree: Vec::new(), witness: None });
    };
    let mut inside = vec![false; g.len()];
    for &m in &members {
        inside[m] = true;
    }
    let mut seen = vec![false; g.len()];
    seen[start] = true;
    let mut tree = Vec::new();
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for v in g.neighbors[u].iter().flatten().copied() {
            if inside[v] && !seen[v] {
                seen[v] = true;
                tree.push((u, v));
                queue.push_back(v);
            }
        }
    }
    let missing = members.iter().copied().find(|&m| !seen[m]);
    Ok(Connectivity {
        connected: missing.is_none(),
        witness: missing.map(|m| (start, m)),
        tree: if missing.is_none() { tree } else { Vec::new() },
        nodes: members,
    })
}

/// Connectivity of the subgraph of seeds containing every variable in `fixed`.
pub fn induced_subgraph_connected(g: &ExchangeGraph, fixed: &[String]) -> Result<Connectivity> {
    induced_connected(g, |node| fixed.iter().all(|v| node.contains(v)))
}

/// Connectivity of the subgraph of seeds whose principal part is acyclic.
pub fn acyclic_subgraph_connected(g: &ExchangeGraph) -> Result<Connectivity> {
    induced_connected(g, |node| node.seed.exchange().is_acyclic())
}

/// Sum of coefficients grouped by y-exponent; used for F-polynomial checks.
pub fn coefficient_sum(p: &LaurentPoly) -> BigInt {
    p.eval_at_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::y_names;
    use crate::matrix::IntMatrix;

    fn ex(rows: &[Vec<i64>]) -> ExchangeData {
        ExchangeData::new(&IntMatrix::from_rows(rows).unwrap(), None, None).unwrap()
    }

    fn b2() -> ExchangeData {
        ex(&[vec![0, 1], vec![-2, 0]])
    }

    #[test]
    fn first_mutation_b2() {
        let s = ClassicalSeed::initial(&b2()).mutate(0).unwrap();
        let names = cluster_names(2);
        assert_eq!(s.var(0).render(&names), "x1^-1*x2^2 + x1^-1*y1");
        assert_eq!(f_polynomial(s.var(0), 2).render(&y_names(2)), "y1 + 1");
        assert_eq!(g_vector(s.var(0), 2).unwrap(), vec![-1, 2]);
        assert_eq!(s.mutate(0).unwrap().cluster(), ClassicalSeed::initial(&b2()).cluster());
    }

    #[test]
    fn second_mutation_b2() {
        let s = ClassicalSeed::initial(&b2()).mutate_seq(&[0, 1]).unwrap();
        assert_eq!(d_vector(s.var(1), 2).unwrap(), vec![1, 1]);
        assert_eq!(f_polynomial(s.var(1), 2).render(&y_names(2)), "y1*y2 + y1 + 1");
        assert_eq!(g_vector(s.var(1), 2).unwrap(), vec![-1, 1]);
    }

    #[test]
    fn initial_variable_conventions() {
        let s = ClassicalSeed::initial(&b2());
        assert_eq!(g_vector(s.var(1), 2).unwrap(), vec![0, 1]);
        assert_eq!(f_polynomial(s.var(1), 2), LaurentPoly::one(2));
        assert_eq!(d_vector(s.var(1), 2).unwrap(), vec![0, -1]);
    }

    #[test]
    fn g_vector_error() {
        let p = LaurentPoly::var(4, 2);
        assert_eq!(g_vector(&p, 2), Err(Error::NoConstantTerm));
    }

    #[test]
    fn separation_of_additions() {
        let e = b2();
        let g = enumerate_exchange_graph(&e, GraphLimits::default()).unwrap();
        for (v, _) in g.variables().values() {
            let f = f_polynomial(v, 2);
            let gv = g_vector(v, 2).unwrap();
            assert_eq!(&reconstruct_from_g_and_f(&gv, &f, &e), v);
        }
    }

    #[test]
    fn small_graphs() {
        let a2 = enumerate_exchange_graph(&ex(&[vec![0, 1], vec![-1, 0]]), GraphLimits::default()).unwrap();
        assert_eq!(a2.len(), 5);
        assert!(a2.is_finite() && a2.check_regular());
        assert_eq!(a2.edges().len(), 5);
        let a1 = enumerate_exchange_graph(&ex(&[vec![0]]), GraphLimits::default()).unwrap();
        assert_eq!(a1.len(), 2);
        assert_eq!(a1.edges().len(), 1);
        assert!(acyclic_subgraph_connected(&a1).unwrap().connected);
    }

    #[test]
    fn connectivity_queries() {
        let a2 = enumerate_exchange_graph(&ex(&[vec![0, 1], vec![-1, 0]]), GraphLimits::default()).unwrap();
        let c = induced_subgraph_connected(&a2, &["x1".to_string()]).unwrap();
        assert!(c.connected);
        assert_eq!(c.nodes.len(), 2);
        let all = induced_subgraph_connected(&a2, &[]).unwrap();
        assert!(all.connected && all.nodes.len() == 5);
        let both = induced_subgraph_connected(&a2, &["x1".into(), "x2".into()]).unwrap();
        assert_eq!(both.nodes, vec![0]);
        let ac = acyclic_subgraph_connected(&a2).unwrap();
        assert_eq!(ac.nodes.len(), 5);
    }

    #[test]
    fn truncation() {
        let wild = ex(&[vec![0, 2, 2], vec![-1, 0, 1], vec![-1, -1, 0]]);
        let lim = GraphLimits { max_seeds: 50, max_depth: 3, allow_truncated: false };
        assert!(matches!(enumerate_exchange_graph(&wild, lim), Err(Error::CapExceeded { .. })));
        let g = enumerate_exchange_graph(&wild, GraphLimits { allow_truncated: true, ..lim }).unwrap();
        assert!(!g.is_finite());
        assert_eq!(induced_subgraph_connected(&g, &[]), Err(Error::GraphTruncated));
    }
}
