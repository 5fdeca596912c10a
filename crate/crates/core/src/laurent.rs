//! Sparse multivariate Laurent polynomials over `Z`, and the coefficient ring
//! `Z[u, u^-1]` with `u = q^(1/2)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Coefficient rings usable in sparse Laurent term maps.
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn zero_elem() -> Self;
    fn one_elem() -> Self;
    fn is_zero_elem(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn times(&self, other: &Self) -> Self;
    /// Multiplicative inverse, when `self` is a unit of the ring.
    fn unit_inverse(&self) -> Option<Self>;
}

impl Coefficient for BigInt {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn unit_inverse(&self) -> Option<Self> {
        (self.abs() == <BigInt as One>::one()).then(|| self.clone())
    }
}

pub(crate) type Terms<C> = BTreeMap<Vec<i64>, C>;

pub(crate) fn add_term<C: Coefficient>(terms: &mut Terms<C>, exp: Vec<i64>, c: C) {
    if c.is_zero_elem() {
        return;
    }
    match terms.get_mut(&exp) {
        Some(old) => {
            let s = old.plus(&c);
            if s.is_zero_elem() {
                terms.remove(&exp);
            } else {
                *old = s;
            }
        }
        None => {
            terms.insert(exp, c);
        }
    }
}

pub(crate) fn add_exps(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    a.iter().zip(b).map(|(x, y)| x.checked_add(*y).ok_or(Error::ExponentOverflow)).collect()
}

fn rev(e: &[i64]) -> Vec<i64> {
    e.iter().rev().copied().collect()
}

fn exponent_box<C>(terms: &Terms<C>, nvars: usize) -> (Vec<i64>, Vec<i64>) {
    let mut lo = vec![i64::MAX; nvars];
    let mut hi = vec![i64::MIN; nvars];
    for e in terms.keys() {
        for i in 0..nvars {
            lo[i] = lo[i].min(e[i]);
            hi[i] = hi[i].max(e[i]);
        }
    }
    (lo, hi)
}

/// Exact right division `num = q * den` in a (possibly twisted) Laurent ring
/// where `X^a X^b = twist(a, b) X^(a+b)` with `twist` a unit.
///
/// The monomial order is lexicographic on the reversed exponent vector, so the
/// frozen variables (stored last) dominate. The leading coefficient of `den`
/// must be a unit. Quotient terms are confined to the box forced by per-variable
/// degrees, which makes the loop terminate on non-divisible input.
pub(crate) fn divide_exact<C, T>(num: &Terms<C>, den: &Terms<C>, nvars: usize, twist: T) -> Result<Terms<C>>
where
    C: Coefficient,
    T: Fn(&[i64], &[i64]) -> C,
{
    if den.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let mut quotient = Terms::new();
    if num.is_empty() {
        return Ok(quotient);
    }
    let (lead_e, lead_c) = den
        .iter()
        .max_by(|a, b| rev(a.0).cmp(&rev(b.0)))
        .map(|(e, c)| (e.clone(), c.clone()))
        .expect("nonempty");
    let lead_inv = lead_c.unit_inverse().ok_or(Error::NonUnitLeading)?;
    let (nlo, nhi) = exponent_box(num, nvars);
    let (dlo, dhi) = exponent_box(den, nvars);
    let lo: Vec<i64> = nlo.iter().zip(&dlo).map(|(a, b)| a - b).collect();
    let hi: Vec<i64> = nhi.iter().zip(&dhi).map(|(a, b)| a - b).collect();

    let mut rem: Terms<C> = num.iter().map(|(e, c)| (rev(e), c.clone())).collect();
    while let Some((rk, c)) = rem.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) {
        let e = rev(&rk);
        let t: Vec<i64> = e.iter().zip(&lead_e).map(|(a, b)| a - b).collect();
        if (0..nvars).any(|i| t[i] < lo[i] || t[i] > hi[i]) {
            return Err(Error::NotDivisible);
        }
        let tw = twist(&t, &lead_e).unit_inverse().ok_or(Error::NonUnitLeading)?;
        let s = c.times(&lead_inv).times(&tw);
        for (b, cb) in den {
            let exp = add_exps(&t, b)?;
            let term = s.times(cb).times(&twist(&t, b)).negate();
            add_term(&mut rem, rev(&exp), term);
        }
        debug_assert!(!rem.contains_key(&rk));
        quotient.insert(t, s);
    }
    Ok(quotient)
}

/// Laurent polynomial in `nvars` commuting variables with integer coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(vec![0; nvars], 1)
    }

    pub fn monomial(exp: Vec<i64>, coeff: impl Into<BigInt>) -> Self {
        let nvars = exp.len();
        let mut terms = BTreeMap::new();
        add_term(&mut terms, exp, coeff.into());
        LaurentPoly { nvars, terms }
    }

    /// The `i`-th variable (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, 1)
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, BigInt)>,
    {
        let mut t = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length");
            add_term(&mut t, e, c);
        }
        LaurentPoly { nvars, terms: t }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[i64]) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    fn same_arity(&self, other: &Self) -> Result<()> {
        if self.nvars == other.nvars {
            Ok(())
        } else {
            Err(Error::ArityMismatch(self.nvars, other.nvars))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            add_term(&mut out.terms, e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_arity(other)?;
        let mut out = Self::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                add_term(&mut out.terms, add_exps(a, b)?, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, x)| (e.clone(), x * c)))
    }

    /// Multiply by the monomial `x^(-mono)`.
    pub fn monomial_divide(&self, mono: &[i64]) -> Self {
        assert_eq!(mono.len(), self.nvars);
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(mono).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Exact division; fails with `NotDivisible` if the quotient is not a
    /// Laurent polynomial.
    pub fn exact_div(&self, den: &Self) -> Result<Self> {
        self.same_arity(den)?;
        let terms = divide_exact(&self.terms, &den.terms, self.nvars, |_, _| BigInt::one())?;
        Ok(LaurentPoly { nvars: self.nvars, terms })
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_exponents(&self) -> Result<Vec<i64>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(exponent_box(&self.terms, self.nvars).0)
    }

    pub fn max_exponents(&self) -> Result<Vec<i64>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(exponent_box(&self.terms, self.nvars).1)
    }

    /// `d_i = -min exponent of variable i`, for the first `k` variables.
    pub fn denominator_vector(&self, k: usize) -> Result<Vec<i64>> {
        Ok(self.min_exponents()?.into_iter().take(k).map(|x| -x).collect())
    }

    /// Set every variable outside `keep` to 1 and re-index the kept ones.
    pub fn keep_vars(&self, keep: std::ops::Range<usize>) -> Self {
        let m = keep.len();
        Self::from_terms(m, self.terms.iter().map(|(e, c)| (e[keep.clone()].to_vec(), c.clone())))
    }

    /// Min-plus evaluation: `y^e` maps to `sum_j e_j * zeta_j`, and the result
    /// is the componentwise minimum over terms.
    pub fn tropical_evaluate(&self, zeta: &[Vec<i64>]) -> Result<Vec<i64>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if zeta.len() != self.nvars {
            return Err(Error::ArityMismatch(self.nvars, zeta.len()));
        }
        let dim = zeta.first().map_or(0, Vec::len);
        let mut best: Option<Vec<i64>> = None;
        for e in self.terms.keys() {
            if e.iter().any(|&x| x < 0) {
                return Err(Error::NegativeExponentInF);
            }
            let mut v = vec![0i64; dim];
            for (j, &ej) in e.iter().enumerate() {
                for (vi, zi) in v.iter_mut().zip(&zeta[j]) {
                    *vi += ej * zi;
                }
            }
            best = Some(match best {
                None => v,
                Some(b) => b.iter().zip(&v).map(|(a, c)| *a.min(c)).collect(),
            });
        }
        Ok(best.expect("nonzero"))
    }

    /// Value at all variables equal to 1.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Canonical text: terms in descending lexicographic exponent order, e.g.
    /// `x1^-1*x2^2 + x1^-1*y1`.
    pub fn render(&self, names: &[String]) -> String {
        assert!(names.len() >= self.nvars);
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono = render_monomial(e, names);
            let neg = c.is_negative();
            let a = c.abs();
            let body = match (mono.is_empty(), a.is_one()) {
                (true, _) => a.to_string(),
                (false, true) => mono,
                (false, false) => format!("{a}*{mono}"),
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

pub(crate) fn render_monomial(e: &[i64], names: &[String]) -> String {
    e.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| if x == 1 { names[i].clone() } else { format!("{}^{}", names[i], x) })
        .collect::<Vec<_>>()
        .join("*")
}

/// `x1..xn, y1..yn`.
pub fn cluster_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).chain((1..=n).map(|i| format!("y{i}"))).collect()
}

/// `y1..yn`.
pub fn y_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("y{i}")).collect()
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("z{i}")).collect();
        write!(f, "{}", self.render(&names))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("arity mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs).expect("arity mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("arity mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

/// A power of `u = q^(1/2)`, stored as the integer exponent of `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfPow(pub i64);

/// Element of `Z[u, u^-1]`, `u = q^(1/2)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QCoeff {
    terms: BTreeMap<i64, BigInt>,
}

impl QCoeff {
    pub fn zero() -> Self {
        QCoeff::default()
    }

    pub fn from_int(c: impl Into<BigInt>) -> Self {
        Self::monomial(HalfPow(0), c)
    }

    pub fn monomial(h: HalfPow, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(h.0, c);
        }
        QCoeff { terms }
    }

    /// `u^k`.
    pub fn u_pow(k: i64) -> Self {
        Self::monomial(HalfPow(k), 1)
    }

    /// Lift a polynomial in `q` (ascending coefficients) through `q = u^2`.
    pub fn from_q_poly(coeffs: &[BigInt]) -> Self {
        let mut out = QCoeff::zero();
        for (i, c) in coeffs.iter().enumerate() {
            out = out.plus(&Self::monomial(HalfPow(2 * i as i64), c.clone()));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.terms.iter()
    }

    pub fn shift(&self, h: HalfPow) -> Self {
        QCoeff { terms: self.terms.iter().map(|(k, c)| (k + h.0, c.clone())).collect() }
    }

    /// `u -> u^-1`.
    pub fn bar(&self) -> Self {
        QCoeff { terms: self.terms.iter().map(|(k, c)| (-k, c.clone())).collect() }
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    /// Read back a polynomial in `q = u^2` after multiplying by `u^shift`;
    /// `None` if odd or negative powers remain.
    pub fn to_q_poly(&self, shift: HalfPow) -> Option<Vec<BigInt>> {
        let s = self.shift(shift);
        let mut out = Vec::new();
        for (&k, c) in &s.terms {
            if k < 0 || k % 2 != 0 {
                return None;
            }
            let i = (k / 2) as usize;
            if out.len() <= i {
                out.resize(i + 1, <BigInt as Zero>::zero());
            }
            out[i] = c.clone();
        }
        Some(out)
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (&k, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            let mono = match k {
                0 => String::new(),
                k if k % 2 == 0 => format!("q^{}", k / 2),
                k => format!("q^{{{k}/2}}"),
            };
            let body = match (mono.is_empty(), a.is_one()) {
                (true, _) => a.to_string(),
                (false, true) => mono,
                (false, false) => format!("{a}*{mono}"),
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }

    pub fn to_i64_terms(&self) -> Vec<(i64, i64)> {
        self.terms.iter().map(|(k, c)| (*k, c.to_i64().unwrap_or(i64::MAX))).collect()
    }
}

impl fmt::Debug for QCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl Coefficient for QCoeff {
    fn zero_elem() -> Self {
        QCoeff::default()
    }
    fn one_elem() -> Self {
        QCoeff::from_int(1)
    }
    fn is_zero_elem(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            let e = out.terms.entry(*k).or_default();
            *e += c;
            if Zero::is_zero(e) {
                out.terms.remove(k);
            }
        }
        out
    }
    fn negate(&self) -> Self {
        QCoeff { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
    fn times(&self, other: &Self) -> Self {
        let mut out = QCoeff::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e = out.terms.entry(a + b).or_default();
                *e += ca * cb;
            }
        }
        out.terms.retain(|_, c| !Zero::is_zero(c));
        out
    }
    fn unit_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&k, c) = self.terms.iter().next().expect("one term");
        (c.abs() == <BigInt as One>::one()).then(|| QCoeff::monomial(HalfPow(-k), c.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn poly(nvars: usize, terms: &[(&[i64], i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(nvars, terms.iter().map(|(e, c)| (e.to_vec(), bi(*c))))
    }

    #[test]
    fn difference_of_squares() {
        let x1 = LaurentPoly::var(2, 0);
        let x2 = LaurentPoly::var(2, 1);
        let p = &(&x1 + &x2) * &(&x1 - &x2);
        assert_eq!(p, poly(2, &[(&[2, 0], 1), (&[0, 2], -1)]));
        assert_eq!(&p * &LaurentPoly::one(2), p);
    }

    #[test]
    fn hand_expansion() {
        let a = poly(2, &[(&[0, 0], 1), (&[1, 0], 1)]);
        let b = poly(2, &[(&[0, 0], 1), (&[1, 1], 1)]);
        let want = poly(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[1, 1], 1), (&[2, 1], 1)]);
        assert_eq!(&a * &b, want);
    }

    #[test]
    fn arity_mismatch() {
        let a = LaurentPoly::one(2);
        let b = LaurentPoly::one(3);
        assert_eq!(a.checked_add(&b), Err(Error::ArityMismatch(2, 3)));
    }

    #[test]
    fn monomial_division() {
        let x1sq = poly(1, &[(&[2], 1)]);
        assert_eq!(x1sq.monomial_divide(&[1]), poly(1, &[(&[1], 1)]));
        assert_eq!(LaurentPoly::one(1).monomial_divide(&[1]), poly(1, &[(&[-1], 1)]));
        let p = poly(1, &[(&[0], 1), (&[1], 1)]);
        assert_eq!(p.monomial_divide(&[1]), poly(1, &[(&[-1], 1), (&[0], 1)]));
    }

    #[test]
    fn denominator_vectors() {
        // x1^-1 y1 + x1^-1 x2^2 in (x1, x2, y1, y2)
        let p = poly(4, &[(&[-1, 0, 1, 0], 1), (&[-1, 2, 0, 0], 1)]);
        assert_eq!(p.denominator_vector(2).unwrap(), vec![1, 0]);
        let m = poly(4, &[(&[1, 1, 0, 0], 1)]);
        assert_eq!(m.denominator_vector(2).unwrap(), vec![-1, -1]);
        assert_eq!(LaurentPoly::zero(2).denominator_vector(2), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn tropical_examples() {
        let f = poly(2, &[(&[0, 0], 1), (&[1, 0], 1)]);
        let inv = vec![vec![-1, 0], vec![0, -1]];
        assert_eq!(f.tropical_evaluate(&inv).unwrap(), vec![-1, 0]);
        let g = poly(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[1, 1], 1)]);
        assert_eq!(g.tropical_evaluate(&inv).unwrap(), vec![-1, -1]);
        let src = vec![vec![1, 2], vec![0, -1]];
        assert_eq!(f.tropical_evaluate(&src).unwrap(), vec![0, 0]);
        let bad = poly(2, &[(&[-1, 0], 1)]);
        assert_eq!(bad.tropical_evaluate(&inv), Err(Error::NegativeExponentInF));
    }

    #[test]
    fn exact_division_roundtrip_and_failure() {
        let a = poly(3, &[(&[0, 0, 0], 1), (&[1, 0, 2], 3), (&[-1, 1, 0], -2)]);
        let b = poly(3, &[(&[0, 0, 1], 1), (&[2, -1, 0], 1)]);
        let p = &a * &b;
        assert_eq!(p.exact_div(&b).unwrap(), a);
        let c = poly(3, &[(&[0, 0, 0], 1), (&[1, 0, 0], 1)]);
        assert_eq!(c.exact_div(&b), Err(Error::NotDivisible));
    }

    #[test]
    fn render_canonical() {
        let p = poly(4, &[(&[-1, 0, 1, 0], 1), (&[-1, 2, 0, 0], 1)]);
        assert_eq!(p.render(&cluster_names(2)), "x1^-1*x2^2 + x1^-1*y1");
        let q = poly(2, &[(&[0, 0], -1), (&[1, 0], 2)]);
        assert_eq!(q.render(&y_names(2)), "2*y1 - 1");
    }

    #[test]
    fn qcoeff_basics() {
        let a = QCoeff::u_pow(1);
        assert_eq!(a.bar(), QCoeff::u_pow(-1));
        assert_eq!(a.bar().bar(), a);
        let s = QCoeff::u_pow(1).plus(&QCoeff::u_pow(-1));
        assert!(s.is_bar_invariant());
        assert_eq!(s.render(), "q^{1/2} + q^{-1/2}");
        let p = QCoeff::from_q_poly(&[bi(1), bi(0), bi(1)]);
        assert_eq!(p.to_q_poly(HalfPow(0)).unwrap(), vec![bi(1), bi(0), bi(1)]);
        assert_eq!(QCoeff::u_pow(3).unit_inverse().unwrap(), QCoeff::u_pow(-3));
        assert!(s.unit_inverse().is_none());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
            prop::collection::vec((prop::collection::vec(-2i64..3, 3), -3i64..4), 0..5)
                .prop_map(|ts| LaurentPoly::from_terms(3, ts.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
        }

        proptest! {
            #[test]
            fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&a * &b, &b * &a);
            }

            #[test]
            fn division_inverts_multiplication(a in arb_poly(), e in prop::collection::vec(-2i64..3, 3)) {
                // divisor with a unit leading term in the y-first order
                let mut lead = e.clone();
                lead[2] = 5;
                let d = &LaurentPoly::monomial(e, 2) + &LaurentPoly::monomial(lead, 1);
                let p = &a * &d;
                prop_assert_eq!(p.exact_div(&d).unwrap(), a);
            }

            #[test]
            fn identity_tropical_is_min(f in arb_poly()) {
                let f = f.monomial_divide(&f.min_exponents().unwrap_or(vec![0; 3]));
                prop_assume!(!f.is_zero());
                let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
                prop_assert_eq!(f.tropical_evaluate(&id).unwrap(), f.min_exponents().unwrap());
            }
        }
    }
}
