//! Skew-symmetrizable exchange matrices with principal coefficients and a
//! compatible quantum form.
//!
//! Indices are 0-based throughout the library. The CLI converts from the
//! 1-based convention at its boundary.

use std::collections::VecDeque;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

fn pos(x: i64) -> i64 {
    x.max(0)
}

/// Exchange matrix `B`, symmetrizer `D`, extended matrix `Btilde` and a
/// compatible skew form `Lambda` (so that `Btilde^T Lambda = [D 0]`).
///
/// The initial data built by [`ExchangeData::new`] has principal
/// coefficients; mutated data keeps a general coefficient block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExchangeData {
    n: usize,
    d: Vec<i64>,
    btilde: IntMatrix,
    lambda: IntMatrix,
}

/// Row-major JSON input: `{"B": [[...]], "D": [...], "Lambda0": [[...]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixSpec {
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<i64>>,
    #[serde(rename = "Lambda0", default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<Vec<Vec<i64>>>,
}

impl MatrixSpec {
    pub fn build(&self) -> Result<ExchangeData> {
        let b = IntMatrix::from_rows(&self.b)?;
        let l0 = self.lambda0.as_ref().map(|m| IntMatrix::from_rows(m)).transpose()?;
        ExchangeData::new(&b, self.d.clone(), l0)
    }
}

/// Mutation directions, validated against the rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationSeq(Vec<usize>);

impl MutationSeq {
    /// Build from 1-based directions.
    pub fn from_one_based(dirs: &[usize], n: usize) -> Result<Self> {
        dirs.iter()
            .map(|&k| {
                if k == 0 || k > n {
                    Err(Error::IndexOutOfRange { index: k, n })
                } else {
                    Ok(k - 1)
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(MutationSeq)
    }

    pub fn directions(&self) -> &[usize] {
        &self.0
    }
}

impl ExchangeData {
    /// Validate `B`, compute (or check) the symmetrizer, and build `Btilde`
    /// and `Lambda` from `Lambda0` (zero when absent).
    pub fn new(b: &IntMatrix, d: Option<Vec<i64>>, lambda0: Option<IntMatrix>) -> Result<Self> {
        if !b.is_square() {
            return Err(Error::NotSquare);
        }
        let n = b.rows();
        let d = match d {
            Some(d) => {
                if d.len() != n || d.iter().any(|&x| x <= 0) || !symmetrizes(b, &d) {
                    return Err(Error::BadSymmetrizer(d));
                }
                d
            }
            None => minimal_symmetrizer(b)?,
        };
        if !quiver_is_acyclic(b) {
            return Err(Error::NotAcyclic);
        }
        let l0 = lambda0.unwrap_or_else(|| IntMatrix::zeros(n, n));
        if l0.rows() != n || !l0.is_skew_symmetric() {
            return Err(Error::Lambda0NotSkew);
        }
        let dm = IntMatrix::diagonal(&d);
        let bt = b.transpose();
        let mut lambda = IntMatrix::zeros(2 * n, 2 * n);
        lambda.set_block(0, 0, &l0);
        lambda.set_block(0, n, &l0.mul(b).add(&dm).neg());
        lambda.set_block(n, 0, &bt.mul(&l0).neg().add(&dm));
        lambda.set_block(n, n, &bt.mul(&l0).mul(b).add(&bt.mul(&dm)));
        let mut btilde = IntMatrix::zeros(2 * n, n);
        btilde.set_block(0, 0, b);
        btilde.set_block(n, 0, &IntMatrix::identity(n));
        let e = ExchangeData { n, d, btilde, lambda };
        debug_assert!(e.is_compatible());
        Ok(e)
    }

    /// Assemble from an arbitrary extended matrix and form, checking
    /// skew-symmetrizability of the principal part and compatibility.
    pub fn from_parts(btilde: IntMatrix, d: Vec<i64>, lambda: IntMatrix) -> Result<Self> {
        let n = btilde.cols();
        if btilde.rows() != 2 * n || lambda.rows() != 2 * n || !lambda.is_square() {
            return Err(Error::NotSquare);
        }
        if !lambda.is_skew_symmetric() {
            return Err(Error::Incompatible);
        }
        let b = btilde.block(0, 0, n, n);
        if d.len() != n || !symmetrizes(&b, &d) {
            return Err(Error::BadSymmetrizer(d));
        }
        let e = ExchangeData { n, d, btilde, lambda };
        if !e.is_compatible() {
            return Err(Error::Incompatible);
        }
        Ok(e)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.d
    }

    /// The principal part `B` (top `n x n` block of `Btilde`).
    pub fn b(&self) -> IntMatrix {
        self.btilde.block(0, 0, self.n, self.n)
    }

    pub fn b_entry(&self, i: usize, j: usize) -> i64 {
        self.btilde[(i, j)]
    }

    pub fn btilde(&self) -> &IntMatrix {
        &self.btilde
    }

    pub fn lambda(&self) -> &IntMatrix {
        &self.lambda
    }

    /// Top-left `n x n` block of `Lambda`.
    pub fn lambda0(&self) -> IntMatrix {
        self.lambda.block(0, 0, self.n, self.n)
    }

    pub fn is_principal(&self) -> bool {
        self.btilde.block(self.n, 0, self.n, self.n) == IntMatrix::identity(self.n)
    }

    pub fn is_acyclic(&self) -> bool {
        quiver_is_acyclic(&self.b())
    }

    /// `Btilde^T Lambda == [D 0]`.
    pub fn is_compatible(&self) -> bool {
        let n = self.n;
        let p = self.btilde.transpose().mul(&self.lambda);
        let mut want = IntMatrix::zeros(n, 2 * n);
        want.set_block(0, 0, &IntMatrix::diagonal(&self.d));
        p == want
    }

    /// `B` is skew-symmetrized by the stored `D`.
    pub fn is_skew_symmetrizable(&self) -> bool {
        symmetrizes(&self.b(), &self.d)
    }

    /// Sink of the quiver: every arrow at `k` points into `k` (`b_kj >= 0`).
    pub fn is_sink(&self, k: usize) -> bool {
        (0..self.n).all(|j| self.btilde[(k, j)] >= 0)
    }

    /// Source of the quiver: every arrow at `k` points out of `k` (`b_kj <= 0`).
    pub fn is_source(&self, k: usize) -> bool {
        (0..self.n).all(|j| self.btilde[(k, j)] <= 0)
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.n {
            Err(Error::IndexOutOfRange { index: k + 1, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Matrix mutation of `(Btilde, Lambda)` in direction `k` (0-based).
    pub fn mutate(&self, k: usize) -> Result<Self> {
        self.check_index(k)?;
        let n = self.n;
        let m = 2 * n;
        let b = &self.btilde;
        let mut nb = IntMatrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                nb[(i, j)] = if i == k || j == k {
                    -b[(i, j)]
                } else {
                    b[(i, j)] + pos(b[(i, k)]) * pos(b[(k, j)]) - pos(-b[(i, k)]) * pos(-b[(k, j)])
                };
            }
        }
        let mut ek = IntMatrix::identity(m);
        for i in 0..m {
            ek[(i, k)] = if i == k { -1 } else { pos(-b[(i, k)]) };
        }
        let lambda = ek.transpose().mul(&self.lambda).mul(&ek);
        let out = ExchangeData { n, d: self.d.clone(), btilde: nb, lambda };
        if !out.is_compatible() || !out.is_skew_symmetrizable() {
            return Err(Error::Incompatible);
        }
        Ok(out)
    }

    pub fn mutate_seq(&self, seq: &MutationSeq) -> Result<Self> {
        seq.directions().iter().try_fold(self.clone(), |e, &k| e.mutate(k))
    }

    /// `e_ii = 1`, `e_ij = min(b_ij, 0)` for `i != j`.
    pub fn e_matrix(&self) -> IntMatrix {
        let n = self.n;
        let mut e = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                e[(i, j)] = if i == j { 1 } else { self.btilde[(i, j)].min(0) };
            }
        }
        e
    }

    /// A vertex order in which every arrow `i -> j` (`b_ij < 0`) has `i`
    /// before `j`, or `None` if the quiver has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        topological_order(&self.b())
    }

    /// Copy with the symmetrizer scaled by `c` and `Lambda` by `c`.
    pub fn rescaled(&self, c: i64) -> Self {
        assert!(c > 0);
        ExchangeData {
            n: self.n,
            d: self.d.iter().map(|x| x * c).collect(),
            btilde: self.btilde.clone(),
            lambda: IntMatrix::from_rows(
                &self.lambda.to_rows().iter().map(|r| r.iter().map(|x| x * c).collect()).collect::<Vec<_>>(),
            )
            .expect("rectangular"),
        }
    }
}

fn symmetrizes(b: &IntMatrix, d: &[i64]) -> bool {
    let n = b.rows();
    (0..n).all(|i| (0..n).all(|j| d[j] * b[(j, i)] == -d[i] * b[(i, j)]))
}

/// Componentwise-minimal positive symmetrizer, normalized per connected
/// component of the underlying graph of `B`.
pub fn minimal_symmetrizer(b: &IntMatrix) -> Result<Vec<i64>> {
    let n = b.rows();
    for i in 0..n {
        if b[(i, i)] != 0 {
            return Err(Error::NotSkewSymmetrizable);
        }
        for j in 0..n {
            let (x, y) = (b[(i, j)], b[(j, i)]);
            if (x == 0) != (y == 0) || (x != 0 && x.signum() == y.signum()) {
                return Err(Error::NotSkewSymmetrizable);
            }
        }
    }
    let mut d: Vec<Option<Ratio<i64>>> = vec![None; n];
    let mut out = vec![0i64; n];
    for root in 0..n {
        if d[root].is_some() {
            continue;
        }
        d[root] = Some(Ratio::from_integer(1));
        let mut comp = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let di = d[i].expect("visited");
            for j in 0..n {
                if b[(i, j)] == 0 {
                    continue;
                }
                // d_j b_ji = -d_i b_ij
                let dj = di * Ratio::new(-b[(i, j)], b[(j, i)]);
                match d[j] {
                    None => {
                        d[j] = Some(dj);
                        comp.push(j);
                        queue.push_back(j);
                    }
                    Some(x) if x != dj => return Err(Error::NotSkewSymmetrizable),
                    Some(_) => {}
                }
            }
        }
        let l = comp.iter().fold(1i64, |acc, &i| acc.lcm(d[i].unwrap().denom()));
        let ints: Vec<i64> = comp.iter().map(|&i| (d[i].unwrap() * l).to_integer()).collect();
        let g = ints.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        for (&i, &x) in comp.iter().zip(&ints) {
            out[i] = x / g;
        }
    }
    Ok(out)
}

fn topological_order(b: &IntMatrix) -> Option<Vec<usize>> {
    let n = b.rows();
    let mut indeg = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if b[(i, j)] < 0 {
                indeg[j] += 1;
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for j in 0..n {
            if b[(i, j)] < 0 {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

pub fn quiver_is_acyclic(b: &IntMatrix) -> bool {
    topological_order(b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn b2_symmetrizer_and_framing() {
        let e = ExchangeData::new(&m(&[&[0, 1], &[-2, 0]]), None, None).unwrap();
        assert_eq!(e.symmetrizer(), &[2, 1]);
        assert_eq!(e.btilde().to_rows(), vec![vec![0, 1], vec![-2, 0], vec![1, 0], vec![0, 1]]);
        assert!(e.is_compatible());
    }

    #[test]
    fn minimal_symmetrizer_brute_force() {
        // minimal D over all divisor pairs up to 6 satisfying d2*(-2) = -d1*1
        let b = m(&[&[0, 1], &[-2, 0]]);
        let mut best = None;
        for s in 2..=12 {
            for d1 in 1..s {
                let d2 = s - d1;
                if symmetrizes(&b, &[d1, d2]) && best.is_none() {
                    best = Some(vec![d1, d2]);
                }
            }
        }
        assert_eq!(minimal_symmetrizer(&b).unwrap(), best.unwrap());
    }

    #[test]
    fn rank_one() {
        let e = ExchangeData::new(&m(&[&[0]]), None, None).unwrap();
        assert_eq!(e.symmetrizer(), &[1]);
        assert_eq!(e.lambda().to_rows(), vec![vec![0, -1], vec![1, 0]]);
    }

    #[test]
    fn rejects_cycle() {
        let b = m(&[&[0, 1, -1], &[-1, 0, 1], &[1, -1, 0]]);
        assert_eq!(ExchangeData::new(&b, None, None), Err(Error::NotAcyclic));
    }

    #[test]
    fn rejects_bad_inputs() {
        let b = m(&[&[0, 1], &[-2, 0]]);
        assert_eq!(ExchangeData::new(&b, Some(vec![1, 1]), None), Err(Error::BadSymmetrizer(vec![1, 1])));
        assert_eq!(
            ExchangeData::new(&m(&[&[0, 1], &[1, 0]]), None, None),
            Err(Error::NotSkewSymmetrizable)
        );
        assert_eq!(
            ExchangeData::new(&b, None, Some(m(&[&[0, 1], &[1, 0]]))),
            Err(Error::Lambda0NotSkew)
        );
        assert_eq!(ExchangeData::new(&m(&[&[0, 1]]), None, None), Err(Error::NotSquare));
    }

    #[test]
    fn mutation_b2() {
        let e = ExchangeData::new(&m(&[&[0, 1], &[-2, 0]]), None, None).unwrap();
        let e1 = e.mutate(0).unwrap();
        assert_eq!(e1.b().to_rows(), vec![vec![0, -1], vec![2, 0]]);
        assert!(e1.is_compatible());
        assert_eq!(e1.mutate(0).unwrap(), e);
        assert!(matches!(e.mutate(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn e_matrix_examples() {
        let b2 = ExchangeData::new(&m(&[&[0, 1], &[-2, 0]]), None, None).unwrap();
        assert_eq!(b2.e_matrix().to_rows(), vec![vec![1, 0], vec![-2, 1]]);
        let a1 = ExchangeData::new(&m(&[&[0]]), None, None).unwrap();
        assert_eq!(a1.e_matrix().to_rows(), vec![vec![1]]);
        let a2 = ExchangeData::new(&m(&[&[0, 1], &[-1, 0]]), None, None).unwrap();
        assert_eq!(a2.e_matrix().to_rows(), vec![vec![1, 0], vec![-1, 1]]);
    }

    #[test]
    fn sink_source() {
        let b2 = ExchangeData::new(&m(&[&[0, 1], &[-2, 0]]), None, None).unwrap();
        assert!(b2.is_sink(0) && !b2.is_source(0));
        assert!(b2.is_source(1) && !b2.is_sink(1));
    }

    #[test]
    fn mutation_seq_bounds() {
        assert!(MutationSeq::from_one_based(&[1, 2], 2).is_ok());
        assert!(MutationSeq::from_one_based(&[0], 2).is_err());
        assert!(MutationSeq::from_one_based(&[3], 2).is_err());
    }
}
