//! The quantum torus over `Z[q^(±1/2)]` in the bar-invariant monomial basis,
//! and quantum seed mutation through toric frames.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exchange::ExchangeData;
use crate::laurent::{add_exps, add_term, divide_exact, Coefficient, LaurentPoly, QCoeff, Terms};
use crate::matrix::IntMatrix;

fn form(lambda: &IntMatrix, a: &[i64], b: &[i64]) -> i64 {
    let mut s = 0;
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            s += ai * lambda[(i, j)] * bj;
        }
    }
    s
}

/// Element of the quantum torus `T_Lambda`, stored in the basis `X^a` where
/// `X^a X^b = q^(a^T Lambda b / 2) X^(a+b)`.
#[derive(Clone, PartialEq, Eq)]
pub struct QTorusElem {
    lambda: Arc<IntMatrix>,
    terms: Terms<QCoeff>,
}

impl QTorusElem {
    pub fn zero(lambda: Arc<IntMatrix>) -> Self {
        QTorusElem { lambda, terms: BTreeMap::new() }
    }

    pub fn one(lambda: Arc<IntMatrix>) -> Self {
        let m = lambda.rows();
        Self::bar_monomial(vec![0; m], lambda)
    }

    /// The basis element `X^a`.
    pub fn bar_monomial(a: Vec<i64>, lambda: Arc<IntMatrix>) -> Self {
        Self::term(a, QCoeff::from_int(1), lambda)
    }

    pub fn term(a: Vec<i64>, c: QCoeff, lambda: Arc<IntMatrix>) -> Self {
        assert_eq!(a.len(), lambda.rows(), "exponent length");
        let mut terms = BTreeMap::new();
        add_term(&mut terms, a, c);
        QTorusElem { lambda, terms }
    }

    /// The ordered product `X_1^(a_1) ... X_m^(a_m)`, converted to the
    /// bar-invariant basis: it equals `q^(1/2 sum_{i<j} lambda_ij a_i a_j) X^a`.
    pub fn ordered_product(a: Vec<i64>, lambda: Arc<IntMatrix>) -> Self {
        let mut s = 0;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                s += lambda[(i, j)] * a[i] * a[j];
            }
        }
        Self::term(a, QCoeff::u_pow(s), lambda)
    }

    pub fn from_terms<I>(lambda: Arc<IntMatrix>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, QCoeff)>,
    {
        let mut t = BTreeMap::new();
        for (e, c) in terms {
            add_term(&mut t, e, c);
        }
        QTorusElem { lambda, terms: t }
    }

    pub fn lambda(&self) -> &Arc<IntMatrix> {
        &self.lambda
    }

    pub fn nvars(&self) -> usize {
        self.lambda.rows()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &QCoeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: &[i64]) -> QCoeff {
        self.terms.get(a).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_lambda(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.lambda, &other.lambda) || self.lambda == other.lambda {
            Ok(())
        } else {
            Err(Error::LambdaMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_lambda(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            add_term(&mut out.terms, e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&QCoeff::from_int(-1)))
    }

    pub fn scale(&self, c: &QCoeff) -> Self {
        QTorusElem::from_terms(self.lambda.clone(), self.terms.iter().map(|(e, x)| (e.clone(), x.times(c))))
    }

    /// Twisted product.
    pub fn qmul(&self, other: &Self) -> Result<Self> {
        self.same_lambda(other)?;
        let mut out = QTorusElem::zero(self.lambda.clone());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let tw = QCoeff::u_pow(form(&self.lambda, a, b));
                add_term(&mut out.terms, add_exps(a, b)?, ca.times(cb).times(&tw));
            }
        }
        Ok(out)
    }

    pub fn qpow(&self, k: u32) -> Self {
        let mut out = QTorusElem::one(self.lambda.clone());
        for _ in 0..k {
            out = out.qmul(self).expect("same lambda");
        }
        out
    }

    /// Solve `y * den = self` for `y`.
    pub fn right_divide(&self, den: &Self) -> Result<Self> {
        self.same_lambda(den)?;
        let lambda = self.lambda.clone();
        let terms = divide_exact(&self.terms, &den.terms, self.nvars(), |a, b| QCoeff::u_pow(form(&lambda, a, b)))?;
        Ok(QTorusElem { lambda: self.lambda.clone(), terms })
    }

    /// Inverse of a single-term element with unit coefficient.
    pub fn monomial_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (a, c) = self.terms.iter().next().expect("one term");
        let inv = c.unit_inverse()?;
        // (c X^a)^-1 = c^-1 X^-a, since X^a X^-a = 1
        let na: Vec<i64> = a.iter().map(|x| -x).collect();
        Some(QTorusElem::term(na, inv, self.lambda.clone()))
    }

    /// Bar involution: `u -> u^-1` on coefficients, basis fixed.
    pub fn bar(&self) -> Self {
        QTorusElem::from_terms(self.lambda.clone(), self.terms.iter().map(|(e, c)| (e.clone(), c.bar())))
    }

    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    /// `u -> 1`.
    pub fn specialize_q1(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.nvars(), self.terms.iter().map(|(e, c)| (e.clone(), c.eval_at_one())))
    }

    /// `self * other = q^k other * self` for the returned `k`, if such a `k` exists.
    pub fn q_commutation_exponent(&self, other: &Self) -> Result<Option<i64>> {
        let ab = self.qmul(other)?;
        let ba = other.qmul(self)?;
        let Some((e, c)) = ab.terms.iter().next() else {
            return Ok(Some(0));
        };
        let c2 = ba.coeff(e);
        // c = u^(2k) c2; read k from the lowest u-powers
        let (Some((&k1, _)), Some((&k2, _))) = (c.terms().next(), c2.terms().next()) else {
            return Ok(None);
        };
        if (k1 - k2) % 2 != 0 {
            return Ok(None);
        }
        let k = (k1 - k2) / 2;
        Ok((ab == ba.scale(&QCoeff::u_pow(2 * k))).then_some(k))
    }

    pub fn has_nonnegative_specialization(&self) -> bool {
        self.terms.values().all(|c| c.eval_at_one() >= BigInt::from(0))
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono = format!("X^{e:?}");
                if *c == QCoeff::from_int(1) {
                    mono
                } else {
                    format!("({})*{mono}", c.render())
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Debug for QTorusElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Current exchange data and cluster, with every cluster variable expressed
/// in the initial quantum torus. Entries `n..2n` are the frozen `X_{n+i}`.
#[derive(Clone, Debug)]
pub struct QuantumSeed {
    exchange: ExchangeData,
    vars: Vec<QTorusElem>,
    ambient: Arc<IntMatrix>,
}

impl QuantumSeed {
    pub fn initial(e: &ExchangeData) -> Self {
        let ambient = Arc::new(e.lambda().clone());
        let m = 2 * e.rank();
        let vars = (0..m)
            .map(|i| {
                let mut a = vec![0; m];
                a[i] = 1;
                QTorusElem::bar_monomial(a, ambient.clone())
            })
            .collect();
        QuantumSeed { exchange: e.clone(), vars, ambient }
    }

    pub fn exchange(&self) -> &ExchangeData {
        &self.exchange
    }

    pub fn ambient(&self) -> &Arc<IntMatrix> {
        &self.ambient
    }

    /// Cluster variable `k` (0-based; `k >= n` are the frozen variables).
    pub fn var(&self, k: usize) -> &QTorusElem {
        &self.vars[k]
    }

    pub fn cluster(&self) -> &[QTorusElem] {
        &self.vars[..self.exchange.rank()]
    }

    /// The frame map `M(a)`: the normalized monomial in the current
    /// variables. Negative powers are allowed only on single-term variables.
    pub fn frame_monomial(&self, a: &[i64]) -> Result<QTorusElem> {
        let lam = self.exchange.lambda();
        let mut s = 0;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                s += lam[(i, j)] * a[i] * a[j];
            }
        }
        let mut out = QTorusElem::term(vec![0; a.len()], QCoeff::u_pow(-s), self.ambient.clone());
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let base = if ai > 0 {
                self.vars[i].clone()
            } else {
                self.vars[i].monomial_inverse().ok_or(Error::NotDivisible)?
            };
            out = out.qmul(&base.qpow(ai.unsigned_abs() as u32))?;
        }
        Ok(out)
    }

    pub fn mutate(&self, k: usize) -> Result<Self> {
        let n = self.exchange.rank();
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k + 1, n });
        }
        let b = self.exchange.btilde().col(k);
        let bp: Vec<i64> = b.iter().map(|&x| x.max(0)).collect();
        let bm: Vec<i64> = b.iter().map(|&x| (-x).max(0)).collect();
        let lam = self.exchange.lambda();
        let mut ek = vec![0; 2 * n];
        ek[k] = 1;
        // M(b - e_k) = u^{Lambda(b, e_k)} M(b) X_k^{-1}
        let num = self
            .frame_monomial(&bp)?
            .scale(&QCoeff::u_pow(form(lam, &bp, &ek)))
            .add(&self.frame_monomial(&bm)?.scale(&QCoeff::u_pow(form(lam, &bm, &ek))))?;
        let new_k = num.right_divide(&self.vars[k])?;
        let mut vars = self.vars.clone();
        vars[k] = new_k;
        Ok(QuantumSeed { exchange: self.exchange.mutate(k)?, vars, ambient: self.ambient.clone() })
    }

    pub fn mutate_seq(&self, seq: &[usize]) -> Result<Self> {
        seq.iter().try_fold(self.clone(), |s, &k| s.mutate(k))
    }

    /// Every pair of current variables q-commutes with the current `Lambda`.
    pub fn check_q_commutation(&self) -> Result<bool> {
        let lam = self.exchange.lambda();
        for i in 0..self.vars.len() {
            for j in i + 1..self.vars.len() {
                if self.vars[i].q_commutation_exponent(&self.vars[j])? != Some(lam[(i, j)]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b2() -> ExchangeData {
        let b = IntMatrix::from_rows(&[vec![0, 1], vec![-2, 0]]).unwrap();
        ExchangeData::new(&b, None, None).unwrap()
    }

    #[test]
    fn basis_and_commutation() {
        let e = b2();
        let lam = Arc::new(e.lambda().clone());
        let x1 = QTorusElem::bar_monomial(vec![1, 0, 0, 0], lam.clone());
        let x2 = QTorusElem::bar_monomial(vec![0, 1, 0, 0], lam.clone());
        let x3 = QTorusElem::bar_monomial(vec![0, 0, 1, 0], lam.clone());
        assert_eq!(lam[(0, 2)], -2);
        assert_eq!(x1.q_commutation_exponent(&x3).unwrap(), Some(-2));
        assert_eq!(x1.qmul(&x2).unwrap(), x2.qmul(&x1).unwrap());
        let inv = QTorusElem::bar_monomial(vec![-1, 0, 0, 0], lam.clone());
        assert_eq!(x1.qmul(&inv).unwrap(), QTorusElem::one(lam.clone()));
        assert!(x1.is_bar_invariant());
        let half = QTorusElem::term(vec![1, 0, 0, 0], QCoeff::u_pow(1), lam.clone());
        assert_eq!(half.bar(), QTorusElem::term(vec![1, 0, 0, 0], QCoeff::u_pow(-1), lam.clone()));
        assert_eq!(half.bar().bar(), half);
        // ordered product X1 X3 = q^{-1} X^(1,0,1,0)
        let p = QTorusElem::ordered_product(vec![1, 0, 1, 0], lam.clone());
        assert_eq!(p, x1.qmul(&x3).unwrap());
    }

    #[test]
    fn first_mutation_b2() {
        let s = QuantumSeed::initial(&b2());
        let s1 = s.mutate(0).unwrap();
        let lam = s.ambient().clone();
        let want = QTorusElem::bar_monomial(vec![-1, 0, 1, 0], lam.clone())
            .add(&QTorusElem::bar_monomial(vec![-1, 2, 0, 0], lam.clone()))
            .unwrap();
        assert_eq!(s1.var(0), &want);
        assert!(s1.var(0).is_bar_invariant());
        assert!(s1.check_q_commutation().unwrap());
        let sq = want.qmul(&want).unwrap();
        assert!(sq.is_bar_invariant());
        let back = s1.mutate(0).unwrap();
        assert_eq!(back.var(0), s.var(0));
        assert_eq!(back.exchange(), s.exchange());
        let names = crate::laurent::cluster_names(2);
        assert_eq!(s1.var(0).specialize_q1().render(&names), "x1^-1*x2^2 + x1^-1*y1");
    }

    #[test]
    fn lambda_mismatch() {
        let e = b2();
        let a = QTorusElem::one(Arc::new(e.lambda().clone()));
        let b = QTorusElem::one(Arc::new(e.mutate(0).unwrap().lambda().clone()));
        assert_eq!(a.qmul(&b), Err(Error::LambdaMismatch));
    }
}
