//! Finite fields `F_{p^d}` as `F_p[t]/(f_d)`, towers of them with compatible
//! embeddings into a common top field, and linear algebra / subspace
//! enumeration over a subfield of the top field.
//!
//! Elements are integer codes `0..p^d`; the base-`p` digits of a code are the
//! coefficients of `1, t, t^2, ...`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Default bound on the size of the top field of a tower.
pub const DEFAULT_CAP: u64 = 1 << 16;

const NONE: u32 = u32::MAX;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= p {
        if p % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// Primes in increasing order, starting at 2.
pub fn primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&p| is_prime(p))
}

// Dense polynomials over F_p, low degree first, no trailing zeros.
fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    // m monic
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + p - (lead * c) % p) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn decode(code: u32, p: u32, d: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(d as usize);
    let mut c = code;
    for _ in 0..d {
        out.push(c % p);
        c /= p;
    }
    out
}

fn encode(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Monic polynomial of degree `d` whose lower coefficients are the digits of `code`.
fn monic_from_code(code: u32, p: u32, d: u32) -> Vec<u32> {
    let mut f = decode(code, p, d);
    f.push(1);
    f
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let d = (f.len() - 1) as u32;
    for k in 1..=d / 2 {
        for code in 0..p.pow(k) {
            let g = monic_from_code(code, p, k);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The monic irreducible of degree `d` over `F_p` with the smallest code.
pub fn smallest_irreducible(p: u32, d: u32) -> Vec<u32> {
    (0..p.pow(d))
        .map(|c| monic_from_code(c, p, d))
        .find(|f| is_irreducible(f, p))
        .expect("irreducibles exist in every degree")
}

/// The field `F_p[t]/(f)` with log/antilog tables.
#[derive(Clone)]
pub struct GF {
    p: u32,
    d: u32,
    size: u32,
    modulus: Vec<u32>,
    primitive: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for GF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}, f={:?})", self.p, self.d, self.modulus)
    }
}

impl GF {
    pub fn new(p: u64, d: u32) -> Result<Self> {
        Self::check(p, d, DEFAULT_CAP)?;
        Self::with_modulus(p, &smallest_irreducible(p as u32, d))
    }

    fn check(p: u64, d: u32, cap: u64) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let size = (p as u128).checked_pow(d).unwrap_or(u128::MAX);
        if d == 0 || size > cap as u128 {
            return Err(Error::CapExceeded { what: "field size".into(), needed: format!("{p}^{d}"), cap });
        }
        Ok(())
    }

    /// Field from an explicit monic irreducible `modulus` (low degree first).
    pub fn with_modulus(p: u64, modulus: &[u32]) -> Result<Self> {
        let d = (modulus.len() - 1) as u32;
        Self::check(p, d, DEFAULT_CAP)?;
        let p32 = p as u32;
        if modulus.last() != Some(&1) || !is_irreducible(modulus, p32) {
            return Err(Error::Input(format!("{modulus:?} is not a monic irreducible over F_{p}")));
        }
        let size = p32.pow(d);
        let mulpoly = |a: u32, b: u32| -> u32 {
            let (x, y) = (decode(a, p32, d), decode(b, p32, d));
            let mut prod = vec![0u32; 2 * d as usize];
            for (i, &xi) in x.iter().enumerate() {
                for (j, &yj) in y.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + xi * yj) % p32;
                }
            }
            let r = poly_rem(&prod, modulus, p32);
            encode(&r, p32)
        };
        let mut exp = vec![0u32; (size - 1) as usize];
        let mut log = vec![NONE; size as usize];
        let mut primitive = 0;
        for g in 1..size {
            let mut x = 1u32;
            let mut order = 0u32;
            loop {
                x = mulpoly(x, g);
                order += 1;
                if x == 1 {
                    break;
                }
            }
            if order == size - 1 {
                primitive = g;
                break;
            }
        }
        let mut x = 1u32;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x;
            log[x as usize] = i as u32;
            x = mulpoly(x, primitive);
        }
        Ok(GF { p: p32, d, size, modulus: modulus.to_vec(), primitive, exp, log })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The smallest-code generator of the multiplicative group.
    pub fn primitive(&self) -> u32 {
        self.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.size
    }

    /// The class of `t`.
    pub fn generator_t(&self) -> u32 {
        if self.d == 1 {
            0
        } else {
            self.p
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.d == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % (self.size as u64 - 1);
        self.exp[s as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let l = self.log[a as usize];
        Some(self.exp[((self.size - 1 - l) % (self.size - 1)) as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let s = (self.log[a as usize] as u64 * (e % (self.size as u64 - 1))) % (self.size as u64 - 1);
        self.exp[s as usize]
    }

    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p as u64)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: u32) -> u64 {
        let n = self.size as u64 - 1;
        let l = self.log[a as usize] as u64;
        n / n.gcd(&l)
    }

    /// Embedding of the prime field.
    pub fn from_int(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    /// Evaluate a polynomial over `F_p` (low degree first) at `x`.
    pub fn eval_prime_poly(&self, f: &[u32], x: u32) -> u32 {
        f.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

/// `F_{p^d}` for every `d` in a divisor-closed degree set, each embedded into
/// the top field `F_{p^L}`, `L` the lcm of the degrees.
///
/// `iota_d` sends `t` to the smallest root of `f_d` in the top field. The
/// embedding `F_{p^g} -> F_{p^d}` is `iota_d^-1 . iota_g`, so the composition
/// law holds by construction.
#[derive(Clone, Debug)]
pub struct FieldTower {
    p: u32,
    top: GF,
    fields: BTreeMap<u32, GF>,
    iota: BTreeMap<u32, Vec<u32>>,
    iota_inv: BTreeMap<u32, Vec<u32>>,
    rel: BTreeMap<(u32, u32), Relative>,
}

/// Data for `F_{p^d}` as a vector space over `F_{p^g}`, all in top-field codes.
#[derive(Clone, Debug)]
struct Relative {
    basis: Vec<u32>,
    dual: Vec<u32>,
    // index top code -> offset into coords, or NONE
    coord_index: Vec<u32>,
    coords: Vec<u32>,
    trace: Vec<u32>,
}

pub fn build_tower(p: u64, degrees: &[u32]) -> Result<FieldTower> {
    FieldTower::new(p, degrees, DEFAULT_CAP)
}

impl FieldTower {
    pub fn new(p: u64, degrees: &[u32], cap: u64) -> Result<Self> {
        Self::build(p, degrees, cap, None)
    }

    /// Same tower with the top field realized by `modulus` instead of the
    /// smallest irreducible; counts must not notice the difference.
    pub fn with_top_modulus(p: u64, degrees: &[u32], modulus: &[u32], cap: u64) -> Result<Self> {
        Self::build(p, degrees, cap, Some(modulus))
    }

    fn build(p: u64, degrees: &[u32], cap: u64, top_modulus: Option<&[u32]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if degrees.is_empty() || degrees.contains(&0) {
            return Err(Error::Input("tower needs positive degrees".into()));
        }
        let top_d = degrees.iter().fold(1u32, |a, &b| a.lcm(&b));
        GF::check(p, top_d, cap)?;
        let mut degs: BTreeSet<u32> = degrees.iter().copied().collect();
        for &a in degrees {
            for &b in degrees {
                degs.insert(a.gcd(&b));
            }
        }
        degs.insert(1);
        degs.insert(top_d);

        let top = match top_modulus {
            Some(m) if m.len() != top_d as usize + 1 => {
                return Err(Error::Input(format!("modulus of degree {} for a degree-{top_d} top field", m.len() - 1)))
            }
            Some(m) => GF::with_modulus(p, m)?,
            None => GF::new(p, top_d)?,
        };
        let mut fields = BTreeMap::new();
        let mut iota = BTreeMap::new();
        let mut iota_inv = BTreeMap::new();
        for &d in &degs {
            let f = if d == top_d { top.clone() } else { GF::new(p, d)? };
            let root = if d == top_d {
                top.generator_t()
            } else {
                top.elements().find(|&x| top.eval_prime_poly(f.modulus(), x) == 0).expect("subfield root exists")
            };
            let p32 = p as u32;
            let mut map = vec![0u32; f.size() as usize];
            let mut inv = vec![NONE; top.size() as usize];
            for code in f.elements() {
                let digits = decode(code, p32, d);
                let img = digits.iter().rev().fold(0, |acc, &c| top.add(top.mul(acc, root), c));
                map[code as usize] = img;
                inv[img as usize] = code;
            }
            if d == top_d {
                debug_assert!(map.iter().enumerate().all(|(i, &x)| i as u32 == x));
            }
            fields.insert(d, f);
            iota.insert(d, map);
            iota_inv.insert(d, inv);
        }
        let mut tower = FieldTower { p: p as u32, top, fields, iota, iota_inv, rel: BTreeMap::new() };
        let pairs: Vec<(u32, u32)> =
            degs.iter().flat_map(|&g| degs.iter().filter(move |&&d| d % g == 0).map(move |&d| (g, d))).collect();
        for (g, d) in pairs {
            let r = tower.relative(g, d);
            tower.rel.insert((g, d), r);
        }
        Ok(tower)
    }

    fn relative(&self, g: u32, d: u32) -> Relative {
        let top = &self.top;
        let m = (d / g) as usize;
        let gamma = self.lift(d, self.fields[&d].primitive());
        let basis: Vec<u32> = (0..m).map(|s| top.pow(gamma, s as u64)).collect();
        let sub_g = self.subfield(g);
        let sub_d = self.subfield(d);
        let qg = (self.p as u64).pow(g);
        let trace: Vec<u32> = (0..top.size())
            .map(|x| {
                if self.iota_inv[&d][x as usize] == NONE {
                    return NONE;
                }
                let mut s = 0;
                let mut y = x;
                for _ in 0..m {
                    s = top.add(s, y);
                    y = top.pow(y, qg);
                }
                s
            })
            .collect();
        let mut coord_index = vec![NONE; top.size() as usize];
        let mut coords = Vec::with_capacity(sub_d.len() * m);
        // odometer over F_g^m
        let mut idx = vec![0usize; m];
        loop {
            let x = idx.iter().zip(&basis).fold(0, |acc, (&i, &b)| top.add(acc, top.mul(sub_g[i], b)));
            coord_index[x as usize] = coords.len() as u32;
            coords.extend(idx.iter().map(|&i| sub_g[i]));
            let mut pos = 0;
            while pos < m {
                idx[pos] += 1;
                if idx[pos] < sub_g.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == m {
                break;
            }
        }
        let dual: Vec<u32> = (0..m)
            .map(|r| {
                *sub_d
                    .iter()
                    .find(|&&y| (0..m).all(|s| trace[top.mul(basis[s], y) as usize] == u32::from(s == r)))
                    .expect("trace form is nondegenerate")
            })
            .collect();
        Relative { basis, dual, coord_index, coords, trace }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn top(&self) -> &GF {
        &self.top
    }

    pub fn top_degree(&self) -> u32 {
        self.top.degree()
    }

    pub fn degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.fields.keys().copied()
    }

    pub fn field(&self, d: u32) -> &GF {
        &self.fields[&d]
    }

    /// `iota_d`: code in `F_{p^d}` to code in the top field.
    pub fn lift(&self, d: u32, x: u32) -> u32 {
        self.iota[&d][x as usize]
    }

    /// Inverse of `iota_d`, if `y` lies in the image.
    pub fn lower(&self, d: u32, y: u32) -> Option<u32> {
        let c = self.iota_inv[&d][y as usize];
        (c != NONE).then_some(c)
    }

    /// Image of `F_{p^d}` in the top field, listed in order of `F_{p^d}` codes.
    pub fn subfield(&self, d: u32) -> &[u32] {
        &self.iota[&d]
    }

    pub fn in_subfield(&self, d: u32, y: u32) -> bool {
        self.iota_inv[&d][y as usize] != NONE
    }

    /// The embedding `F_{p^g} -> F_{p^d}` on codes.
    pub fn embed(&self, g: u32, d: u32, x: u32) -> u32 {
        assert!(d % g == 0, "{g} does not divide {d}");
        self.lower(d, self.lift(g, x)).expect("subfield containment")
    }

    fn rel(&self, g: u32, d: u32) -> &Relative {
        self.rel.get(&(g, d)).unwrap_or_else(|| panic!("degrees {g} | {d} not in tower"))
    }

    /// `F_{p^g}`-basis of `F_{p^d}`: powers of the primitive element of `F_{p^d}`.
    pub fn basis(&self, g: u32, d: u32) -> &[u32] {
        &self.rel(g, d).basis
    }

    /// Basis dual to [`Self::basis`] under the trace form.
    pub fn dual_basis(&self, g: u32, d: u32) -> &[u32] {
        &self.rel(g, d).dual
    }

    /// Coordinates (in `F_{p^g}`, top codes) of `x in F_{p^d}` in [`Self::basis`].
    pub fn coords(&self, g: u32, d: u32, x: u32) -> &[u32] {
        let r = self.rel(g, d);
        let i = r.coord_index[x as usize];
        assert!(i != NONE, "element not in subfield of degree {d}");
        let m = (d / g) as usize;
        &r.coords[i as usize..i as usize + m]
    }

    /// Trace from `F_{p^d}` down to `F_{p^g}`.
    pub fn trace(&self, g: u32, d: u32, x: u32) -> u32 {
        let t = self.rel(g, d).trace[x as usize];
        assert!(t != NONE, "element not in subfield of degree {d}");
        t
    }

    /// Size of the prime-power field `F_{p^d}`.
    pub fn order_of(&self, d: u32) -> u64 {
        (self.p as u64).pow(d)
    }
}

/// Matrix of top-field codes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn block_diag(&self, other: &FMatrix) -> FMatrix {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)];
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for FMatrix {
    type Output = u32;
    fn index(&self, (i, j): (usize, usize)) -> &u32 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for FMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u32 {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row echelon form and rank; zero rows are kept at the bottom.
pub fn rref(f: &GF, m: &FMatrix) -> (FMatrix, usize) {
    let mut a = m.clone();
    let rank = rref_in_place(f, &mut a);
    (a, rank)
}

/// Row-reduce, returning the rank. Pivot rows come first.
pub fn rref_in_place(f: &GF, a: &mut FMatrix) -> usize {
    let (rows, cols) = (a.rows, a.cols);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[(i, c)] != 0) else { continue };
        if piv != r {
            for j in 0..cols {
                a.data.swap(piv * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(a[(r, c)]).expect("nonzero pivot");
        for j in c..cols {
            a[(r, j)] = f.mul(a[(r, j)], inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a[(i, c)];
            if factor == 0 {
                continue;
            }
            for j in c..cols {
                let v = f.mul(factor, a[(r, j)]);
                a[(i, j)] = f.sub(a[(i, j)], v);
            }
        }
        r += 1;
    }
    r
}

pub fn rank(f: &GF, rows: &[Vec<u32>], cols: usize) -> usize {
    rref_in_place(f, &mut FMatrix::from_rows(cols, rows))
}

/// Canonical basis (nonzero RREF rows) of the span of `rows`.
pub fn span_basis(f: &GF, rows: &[Vec<u32>], cols: usize) -> Vec<Vec<u32>> {
    let mut m = FMatrix::from_rows(cols, rows);
    let r = rref_in_place(f, &mut m);
    (0..r).map(|i| m.row(i).to_vec()).collect()
}

/// Basis of `{x : M x = 0}`.
pub fn nullspace(f: &GF, m: &FMatrix) -> Vec<Vec<u32>> {
    let (a, r) = rref(f, m);
    let mut pivots = Vec::with_capacity(r);
    for i in 0..r {
        pivots.push((0..a.cols).find(|&j| a[(i, j)] != 0).expect("pivot row"));
    }
    let mut out = Vec::new();
    for free in (0..a.cols).filter(|j| !pivots.contains(j)) {
        let mut v = vec![0u32; a.cols];
        v[free] = 1;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = f.neg(a[(i, free)]);
        }
        out.push(v);
    }
    out
}

/// Reduce `v` modulo a subspace given by its RREF basis with the given pivots.
pub fn reduce_mod(f: &GF, v: &mut [u32], basis: &[Vec<u32>], pivots: &[usize]) {
    for (b, &pc) in basis.iter().zip(pivots) {
        let c = v[pc];
        if c != 0 {
            for (x, &y) in v.iter_mut().zip(b) {
                *x = f.sub(*x, f.mul(c, y));
            }
        }
    }
}

pub fn pivots_of(basis: &[Vec<u32>]) -> Vec<usize> {
    basis.iter().map(|r| r.iter().position(|&x| x != 0).expect("nonzero row")).collect()
}

/// Gaussian binomial `[k choose e]_q`, or `None` on `u128` overflow.
pub fn gaussian_binomial(k: u32, e: u32, q: u64) -> Option<u128> {
    if e > k {
        return Some(0);
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..e {
        num = num.checked_mul(q.checked_pow(k - i)?.checked_sub(1)?)?;
        den = den.checked_mul(q.checked_pow(i + 1)?.checked_sub(1)?)?;
        let g = num.gcd(&den);
        num /= g;
        den /= g;
    }
    Some(num / den)
}

fn count_cap(k: u32, e: u32, q: u64, cap: u64) -> Result<()> {
    match gaussian_binomial(k, e, q) {
        Some(c) if c <= cap as u128 => Ok(()),
        _ => Err(Error::CapExceeded { what: "subspace enumeration".into(), needed: format!("[{k} choose {e}]_{q}"), cap }),
    }
}

/// Lazily yields every `e`-dimensional subspace of `F^k` exactly once as its
/// RREF basis, where `F` is the subfield of the tower with elements `field`
/// (top codes, `field[0] = 0`, `field[1] = 1`).
pub struct Subspaces<'a> {
    field: &'a [u32],
    k: usize,
    e: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    counter: Vec<usize>,
    done: bool,
}

impl<'a> Subspaces<'a> {
    fn new(field: &'a [u32], k: usize, e: usize) -> Self {
        let mut s = Subspaces { field, k, e, pivots: (0..e).collect(), free: vec![], counter: vec![], done: e > k };
        s.reset_free();
        s
    }

    fn reset_free(&mut self) {
        self.free.clear();
        for (r, &pc) in self.pivots.iter().enumerate() {
            for c in pc + 1..self.k {
                if !self.pivots[r + 1..].contains(&c) {
                    self.free.push((r, c));
                }
            }
        }
        self.counter = vec![0; self.free.len()];
    }

    fn next_pivots(&mut self) -> bool {
        let (k, e) = (self.k, self.e);
        let mut i = e;
        while i > 0 {
            i -= 1;
            if self.pivots[i] < k - e + i {
                self.pivots[i] += 1;
                for j in i + 1..e {
                    self.pivots[j] = self.pivots[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for Subspaces<'_> {
    type Item = Vec<Vec<u32>>;

    fn next(&mut self) -> Option<Vec<Vec<u32>>> {
        if self.done {
            return None;
        }
        let mut basis = vec![vec![0u32; self.k]; self.e];
        for (r, &pc) in self.pivots.iter().enumerate() {
            basis[r][pc] = 1;
        }
        for (&(r, c), &x) in self.free.iter().zip(&self.counter) {
            basis[r][c] = self.field[x];
        }
        // advance
        let q = self.field.len();
        let mut pos = 0;
        while pos < self.counter.len() {
            self.counter[pos] += 1;
            if self.counter[pos] < q {
                break;
            }
            self.counter[pos] = 0;
            pos += 1;
        }
        if pos == self.counter.len() {
            if self.next_pivots() {
                self.reset_free();
            } else {
                self.done = true;
            }
        }
        Some(basis)
    }
}

/// Every `e`-dimensional subspace of `F^k` with `F` given by its elements
/// (top codes, zero first, then one), without a size check.
pub fn subspaces(field: &[u32], k: usize, e: usize) -> Subspaces<'_> {
    Subspaces::new(field, k, e)
}

/// Every `e`-dimensional `F_{p^d}`-subspace of `F_{p^d}^k`, as RREF bases in top-field codes.
pub fn enumerate_subspaces(tower: &FieldTower, d: u32, k: usize, e: usize, cap: u64) -> Result<Subspaces<'_>> {
    count_cap(k as u32, e as u32, tower.order_of(d), cap)?;
    Ok(Subspaces::new(tower.subfield(d), k, e))
}

/// Calls `visit` with a basis of every `e`-dimensional subspace of `F^k`
/// containing the span of `u` (an RREF basis). `F` has elements `field`.
pub fn for_each_subspace_containing<F>(field: &[u32], k: usize, u: &[Vec<u32>], e: usize, mut visit: F)
where
    F: FnMut(&[Vec<u32>]),
{
    let r = u.len();
    if e < r || e > k {
        return;
    }
    let piv = pivots_of(u);
    let rest: Vec<usize> = (0..k).filter(|c| !piv.contains(c)).collect();
    let mut basis: Vec<Vec<u32>> = u.to_vec();
    for w in Subspaces::new(field, k - r, e - r) {
        basis.truncate(r);
        for row in w {
            let mut full = vec![0u32; k];
            for (x, &c) in row.iter().zip(&rest) {
                full[c] = *x;
            }
            basis.push(full);
        }
        visit(&basis);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_embedding_into_f4() {
        let t = build_tower(2, &[1, 2]).unwrap();
        assert_eq!(t.field(2).size(), 4);
        assert_eq!(t.embed(1, 2, 0), 0);
        assert_eq!(t.embed(1, 2, 1), 1);
    }

    #[test]
    fn lagrange_in_f9() {
        let f = GF::new(3, 2).unwrap();
        for x in 1..f.size() {
            assert_eq!(f.pow(x, 8), 1);
        }
    }

    #[test]
    fn smallest_irreducibles() {
        assert_eq!(smallest_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(smallest_irreducible(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(smallest_irreducible(3, 2), vec![1, 0, 1]);
    }

    fn field_axioms(f: &GF) {
        let n = f.size();
        for a in 0..n {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..n {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in [0, 1, n - 1] {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn small_field_axioms() {
        for (p, d) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2)] {
            field_axioms(&GF::new(p, d).unwrap());
        }
    }

    #[test]
    fn cyclic_group_and_frobenius_order() {
        for (p, d) in [(2, 4), (3, 3), (5, 2), (7, 2), (2, 6)] {
            let f = GF::new(p, d).unwrap();
            assert_eq!(f.order(f.primitive()), f.size() as u64 - 1);
            // Frobenius has order exactly d
            let g = f.primitive();
            let mut x = g;
            for i in 1..=d {
                x = f.frobenius(x);
                assert_eq!(x == g, i == d, "p={p} d={d} i={i}");
            }
        }
    }

    #[test]
    fn errors() {
        assert_eq!(build_tower(4, &[1]).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(build_tower(2, &[17]), Err(Error::CapExceeded { .. })));
        assert!(matches!(FieldTower::new(256, &[2], 1 << 16), Err(Error::NotPrime(256))));
        assert!(matches!(FieldTower::new(257, &[2], 1 << 16), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn embeddings_are_homomorphisms_and_compose() {
        for (p, degs) in [(2u64, vec![1, 2, 4]), (3, vec![1, 2, 4]), (2, vec![2, 3]), (2, vec![1, 2, 3, 6])] {
            let t = build_tower(p, &degs).unwrap();
            let ds: Vec<u32> = t.degrees().collect();
            for &g in &ds {
                for &d in ds.iter().filter(|&&d| d % g == 0) {
                    let (fg, fd) = (t.field(g), t.field(d));
                    for x in fg.elements() {
                        for y in fg.elements() {
                            assert_eq!(t.embed(g, d, fg.add(x, y)), fd.add(t.embed(g, d, x), t.embed(g, d, y)));
                            assert_eq!(t.embed(g, d, fg.mul(x, y)), fd.mul(t.embed(g, d, x), t.embed(g, d, y)));
                        }
                        // commutes with Frobenius
                        assert_eq!(t.embed(g, d, fg.frobenius(x)), fd.frobenius(t.embed(g, d, x)));
                        for &h in ds.iter().filter(|&&h| h % g == 0 && d % h == 0) {
                            assert_eq!(t.embed(h, d, t.embed(g, h, x)), t.embed(g, d, x));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn relative_basis_coords_and_trace() {
        let t = build_tower(3, &[1, 2, 4]).unwrap();
        let top = t.top();
        for (g, d) in [(1, 2), (2, 4), (1, 4)] {
            let m = (d / g) as usize;
            let basis = t.basis(g, d).to_vec();
            for &x in t.subfield(d) {
                let c = t.coords(g, d, x);
                assert!(c.iter().all(|&ci| t.in_subfield(g, ci)));
                let back = (0..m).fold(0, |acc, s| top.add(acc, top.mul(c[s], basis[s])));
                assert_eq!(back, x);
                assert!(t.in_subfield(g, t.trace(g, d, x)));
            }
            let dual = t.dual_basis(g, d);
            for s in 0..m {
                for r in 0..m {
                    assert_eq!(t.trace(g, d, top.mul(basis[s], dual[r])), u32::from(s == r));
                }
            }
        }
    }

    #[test]
    fn rref_examples() {
        let f = GF::new(2, 1).unwrap();
        let (_, r) = rref(&f, &FMatrix::identity(3));
        assert_eq!(r, 3);
        let (z, r) = rref(&f, &FMatrix::zeros(2, 3));
        assert_eq!((z, r), (FMatrix::zeros(2, 3), 0));
        let (m, r) = rref(&f, &FMatrix::from_rows(2, &[vec![1, 1], vec![1, 1]]));
        assert_eq!(r, 1);
        assert_eq!(m.to_rows(), vec![vec![1, 1], vec![0, 0]]);
    }

    #[test]
    fn rref_idempotent_and_rank_additive() {
        let f = GF::new(5, 1).unwrap();
        let a = FMatrix::from_rows(3, &[vec![1, 2, 3], vec![2, 4, 1], vec![3, 1, 4]]);
        let b = FMatrix::from_rows(2, &[vec![1, 3], vec![2, 1]]);
        let (ra, ka) = rref(&f, &a);
        assert_eq!(rref(&f, &ra), (ra.clone(), ka));
        let (_, kb) = rref(&f, &b);
        let (_, kab) = rref(&f, &a.block_diag(&b));
        assert_eq!(kab, ka + kb);
    }

    #[test]
    fn nullspace_is_kernel() {
        let f = GF::new(3, 1).unwrap();
        let m = FMatrix::from_rows(4, &[vec![1, 2, 0, 1], vec![0, 1, 1, 2]]);
        let ker = nullspace(&f, &m);
        assert_eq!(ker.len(), 2);
        for v in ker {
            for i in 0..2 {
                let s = (0..4).fold(0, |acc, j| f.add(acc, f.mul(m[(i, j)], v[j])));
                assert_eq!(s, 0);
            }
        }
    }

    fn count_by_brute_force(t: &FieldTower, d: u32, k: usize, e: usize) -> usize {
        // distinct spans of all e-tuples of vectors, compared by canonical RREF
        let f = t.top();
        let field = t.subfield(d);
        let nvec = field.len().pow(k as u32);
        let vec_of = |mut i: usize| -> Vec<u32> {
            (0..k)
                .map(|_| {
                    let x = field[i % field.len()];
                    i /= field.len();
                    x
                })
                .collect()
        };
        let mut seen = BTreeSet::new();
        let mut idx = vec![0usize; e];
        loop {
            let rows: Vec<Vec<u32>> = idx.iter().map(|&i| vec_of(i)).collect();
            let b = span_basis(f, &rows, k);
            if b.len() == e {
                seen.insert(b);
            }
            let mut pos = 0;
            while pos < e {
                idx[pos] += 1;
                if idx[pos] < nvec {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos >= e {
                break;
            }
        }
        seen.len()
    }

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        for (p, d) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1)] {
            let t = build_tower(p, &[d]).unwrap();
            let q = t.order_of(d);
            for k in 0..=3usize {
                for e in 0..=k {
                    let all: Vec<_> = enumerate_subspaces(&t, d, k, e, DEFAULT_CAP).unwrap().collect();
                    let distinct: BTreeSet<_> = all.iter().cloned().collect();
                    assert_eq!(distinct.len(), all.len());
                    assert_eq!(all.len() as u128, gaussian_binomial(k as u32, e as u32, q).unwrap());
                    for b in &all {
                        assert_eq!(span_basis(t.top(), b, k), *b, "canonical RREF");
                    }
                    if q <= 4 && k <= 3 {
                        assert_eq!(count_by_brute_force(&t, d, k, e), all.len());
                    }
                }
            }
        }
    }

    #[test]
    fn lines_in_f4_plane() {
        let t = build_tower(2, &[2]).unwrap();
        assert_eq!(enumerate_subspaces(&t, 2, 2, 1, DEFAULT_CAP).unwrap().count(), 5);
        assert_eq!(enumerate_subspaces(&t, 2, 3, 0, DEFAULT_CAP).unwrap().count(), 1);
        assert_eq!(enumerate_subspaces(&t, 2, 3, 3, DEFAULT_CAP).unwrap().count(), 1);
    }

    #[test]
    fn subspaces_containing_count() {
        let t = build_tower(3, &[1]).unwrap();
        let f = t.top();
        let u = span_basis(f, &[vec![1, 2, 0, 1]], 4);
        let mut n = 0;
        for_each_subspace_containing(t.subfield(1), 4, &u, 2, |b| {
            n += 1;
            let mut rows = b.to_vec();
            rows.push(u[0].clone());
            assert_eq!(rank(f, &rows, 4), 2);
        });
        assert_eq!(n as u128, gaussian_binomial(3, 1, 3).unwrap());
    }

    #[test]
    fn subspace_cap() {
        let t = build_tower(5, &[1]).unwrap();
        assert!(matches!(enumerate_subspaces(&t, 1, 6, 3, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn alternate_modulus_gives_isomorphic_field() {
        // x^2 + x + 2 is irreducible over F_3; it is not the smallest-code choice
        let f = GF::with_modulus(3, &[2, 1, 1]).unwrap();
        assert_ne!(f.modulus(), smallest_irreducible(3, 2).as_slice());
        field_axioms(&f);
        assert!(GF::with_modulus(3, &[2, 0, 1]).is_err());
    }
}
