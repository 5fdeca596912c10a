//! Representations of valued quivers over finite-field towers: Euler form,
//! Hom/Ext, rigid representatives, quiver Grassmannian point counts and
//! reflection functors.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exchange::ExchangeData;
use crate::finfield::{
    for_each_subspace_containing, gaussian_binomial, nullspace, pivots_of, rank, reduce_mod, span_basis, subspaces,
    FMatrix, FieldTower,
};
use crate::matrix::IntMatrix;

/// Arrow `tail -> head`; `copy` numbers parallel arrows from 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub tail: usize,
    pub head: usize,
    pub copy: usize,
    pub valuation: u32,
}

/// The valued quiver of a skew-symmetrizable `B` with symmetrizer `D`:
/// `gcd(|b_ij|, |b_ji|)` arrows `i -> j` whenever `b_ij < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuedQuiver {
    b: IntMatrix,
    d: Vec<u32>,
    arrows: Vec<Arrow>,
}

impl ValuedQuiver {
    pub fn new(b: &IntMatrix, d: &[i64]) -> Result<Self> {
        let n = b.rows();
        if !b.is_square() {
            return Err(Error::NotSquare);
        }
        if d.len() != n || d.iter().any(|&x| x <= 0) {
            return Err(Error::BadSymmetrizer(d.to_vec()));
        }
        for i in 0..n {
            for j in 0..n {
                if d[i] * b[(i, j)] != -d[j] * b[(j, i)] {
                    return Err(Error::BadSymmetrizer(d.to_vec()));
                }
            }
        }
        let d: Vec<u32> = d.iter().map(|&x| x as u32).collect();
        let mut arrows = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if b[(i, j)] < 0 {
                    let m = b[(i, j)].unsigned_abs().gcd(&b[(j, i)].unsigned_abs()) as usize;
                    for copy in 0..m {
                        arrows.push(Arrow { tail: i, head: j, copy, valuation: d[i].gcd(&d[j]) });
                    }
                }
            }
        }
        let q = ValuedQuiver { b: b.clone(), d, arrows };
        if q.topological_order().is_none() {
            return Err(Error::NotAcyclic);
        }
        Ok(q)
    }

    pub fn from_exchange(e: &ExchangeData) -> Result<Self> {
        Self::new(&e.b(), e.symmetrizer())
    }

    /// All arrows reversed: the quiver of `-B`.
    pub fn opposite(&self) -> Self {
        let d: Vec<i64> = self.d.iter().map(|&x| x as i64).collect();
        Self::new(&self.b.neg(), &d).expect("reversal keeps B skew-symmetrizable and acyclic")
    }

    pub fn rank(&self) -> usize {
        self.d.len()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.d
    }

    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_index(&self, tail: usize, head: usize, copy: usize) -> Option<usize> {
        self.arrows.iter().position(|a| a.tail == tail && a.head == head && a.copy == copy)
    }

    pub fn is_sink(&self, k: usize) -> bool {
        self.arrows.iter().all(|a| a.tail != k)
    }

    pub fn is_source(&self, k: usize) -> bool {
        self.arrows.iter().all(|a| a.head != k)
    }

    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.rank();
        let mut indeg = vec![0; n];
        for a in &self.arrows {
            indeg[a.head] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for a in self.arrows.iter().filter(|a| a.tail == i) {
                indeg[a.head] -= 1;
                if indeg[a.head] == 0 {
                    queue.push_back(a.head);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Field degrees a tower must contain for representations of this quiver.
    pub fn tower_degrees(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.d.clone();
        out.extend(self.arrows.iter().map(|a| a.valuation));
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn tower(&self, p: u64, cap: u64) -> Result<Arc<FieldTower>> {
        Ok(Arc::new(FieldTower::new(p, &self.tower_degrees(), cap)?))
    }

    /// `<alpha_i, alpha_j>` on vertex simples.
    pub fn euler_simple(&self, i: usize, j: usize) -> i64 {
        let di = self.d[i] as i64;
        if i == j {
            di
        } else if self.b[(i, j)] < 0 {
            di * self.b[(i, j)]
        } else {
            0
        }
    }

    pub fn euler_form(&self, v: &[i64], w: &[i64]) -> i64 {
        let n = self.rank();
        let mut s = 0;
        for i in 0..n {
            for j in 0..n {
                s += v[i] * self.euler_simple(i, j) * w[j];
            }
        }
        s
    }

    /// Euler form of the framed quiver on `Z^(2n)`; vertex `n+i` carries `d_i`.
    pub fn framed_euler_form(&self, v: &[i64], w: &[i64]) -> i64 {
        let n = self.rank();
        let table = |i: usize, j: usize| -> i64 {
            match (i < n, j < n) {
                (true, true) => self.euler_simple(i, j),
                (true, false) if j == n + i => -(self.d[i] as i64),
                (false, false) if i == j => self.d[i - n] as i64,
                _ => 0,
            }
        };
        let mut s = 0;
        for (i, &vi) in v.iter().enumerate() {
            for (j, &wj) in w.iter().enumerate() {
                s += vi * table(i, j) * wj;
            }
        }
        s
    }

    /// `(v, w) = <v, w> + <w, v>`.
    pub fn symmetric_form(&self, v: &[i64], w: &[i64]) -> i64 {
        self.euler_form(v, w) + self.euler_form(w, v)
    }

    fn unit(&self, i: usize, len: usize) -> Vec<i64> {
        let mut e = vec![0; len];
        e[i] = 1;
        e
    }

    /// `*e = sum_i (1/d_i) <alpha_i, e> alpha_i`.
    pub fn star_left(&self, e: &[i64]) -> Vec<i64> {
        let n = self.rank();
        (0..n)
            .map(|i| {
                let x = self.euler_form(&self.unit(i, n), e);
                let di = self.d[i] as i64;
                assert_eq!(x % di, 0, "<alpha_i, e> divisible by d_i");
                x / di
            })
            .collect()
    }

    /// `e* = sum_{j <= 2n} (1/d_j) <e, alpha_j> alpha_j` in the framed lattice.
    pub fn star_right(&self, e: &[i64]) -> Vec<i64> {
        let n = self.rank();
        let mut ef = e.to_vec();
        ef.resize(2 * n, 0);
        (0..2 * n)
            .map(|j| {
                let x = self.framed_euler_form(&ef, &self.unit(j, 2 * n));
                let dj = self.d[j % n] as i64;
                assert_eq!(x % dj, 0, "<e, alpha_j> divisible by d_j");
                x / dj
            })
            .collect()
    }

    /// The simple reflection `s_k` on dimension vectors.
    pub fn s_k(&self, k: usize, v: &[i64]) -> Vec<i64> {
        let ak = self.unit(k, self.rank());
        let num = 2 * self.symmetric_form(v, &ak);
        let den = self.symmetric_form(&ak, &ak);
        assert_eq!(num % den, 0);
        let mut out = v.to_vec();
        out[k] -= num / den;
        out
    }

    /// The quiver with all arrows at `k` reversed (`mu_k Q` for a sink or source).
    pub fn reflected(&self, k: usize) -> Result<Self> {
        if !self.is_sink(k) && !self.is_source(k) {
            return Err(Error::NotSinkOrSource(k + 1));
        }
        let mut b = self.b.clone();
        for j in 0..self.rank() {
            b[(k, j)] = -b[(k, j)];
            b[(j, k)] = -b[(j, k)];
        }
        let d: Vec<i64> = self.d.iter().map(|&x| x as i64).collect();
        Self::new(&b, &d)
    }

    /// Vertices reachable from `i` along arrows, including `i`.
    pub fn reachable(&self, i: usize) -> Vec<bool> {
        let mut seen = vec![false; self.rank()];
        let mut stack = vec![i];
        seen[i] = true;
        while let Some(x) = stack.pop() {
            for a in self.arrows.iter().filter(|a| a.tail == x) {
                if !seen[a.head] {
                    seen[a.head] = true;
                    stack.push(a.head);
                }
            }
        }
        seen
    }
}

/// A representation: `V_i = F_{p^{d_i}}^{v_i}`, and for each arrow `a: i -> j`
/// with valuation `g` the images `V_a(beta_s e_t)` of the `F_{p^g}`-basis
/// `beta_s e_t` of `V_i` (column `t * d_i/g + s`). Field elements are codes of
/// the top field of the tower.
#[derive(Clone, Debug)]
pub struct ValuedRep {
    quiver: Arc<ValuedQuiver>,
    tower: Arc<FieldTower>,
    dims: Vec<usize>,
    maps: Vec<Vec<Vec<u32>>>,
}

fn check_tower(q: &ValuedQuiver, t: &FieldTower) -> Result<()> {
    let have: Vec<u32> = t.degrees().collect();
    if q.tower_degrees().iter().all(|d| have.contains(d)) {
        Ok(())
    } else {
        Err(Error::TowerMismatch)
    }
}

impl ValuedRep {
    pub fn zero(quiver: Arc<ValuedQuiver>, tower: Arc<FieldTower>) -> Result<Self> {
        check_tower(&quiver, &tower)?;
        let n = quiver.rank();
        let maps = vec![vec![]; quiver.arrows.len()];
        Ok(ValuedRep { quiver, tower, dims: vec![0; n], maps })
    }

    /// The simple representation at vertex `i`.
    pub fn simple(quiver: Arc<ValuedQuiver>, tower: Arc<FieldTower>, i: usize) -> Result<Self> {
        let mut r = Self::zero(quiver, tower)?;
        r.dims[i] = 1;
        r.maps = r.quiver.arrows.iter().map(|a| vec![vec![0; r.dims[a.head]]; r.cols(a)]).collect();
        Ok(r)
    }

    /// Build from explicit images (see the type docs for the layout).
    pub fn from_images(
        quiver: Arc<ValuedQuiver>,
        tower: Arc<FieldTower>,
        dims: Vec<usize>,
        maps: Vec<Vec<Vec<u32>>>,
    ) -> Result<Self> {
        check_tower(&quiver, &tower)?;
        let r = ValuedRep { quiver, tower, dims, maps };
        if r.dims.len() != r.quiver.rank() || r.maps.len() != r.quiver.arrows.len() {
            return Err(Error::Input("dimension vector or arrow count mismatch".into()));
        }
        for (ai, a) in r.quiver.arrows.iter().enumerate() {
            if r.maps[ai].len() != r.cols(a) {
                return Err(Error::Input(format!("arrow {ai}: wrong number of images")));
            }
            let dj = r.quiver.d[a.head];
            for img in &r.maps[ai] {
                if img.len() != r.dims[a.head] || img.iter().any(|&x| !r.tower.in_subfield(dj, x)) {
                    return Err(Error::Input(format!("arrow {ai}: image outside V_{}", a.head + 1)));
                }
            }
        }
        Ok(r)
    }

    /// Build from `F_{p^g}`-matrices of shape `(d_j/g v_j) x (d_i/g v_i)`
    /// in the bases `beta_s e_t`.
    pub fn from_matrices(
        quiver: Arc<ValuedQuiver>,
        tower: Arc<FieldTower>,
        dims: Vec<usize>,
        mats: &[FMatrix],
    ) -> Result<Self> {
        check_tower(&quiver, &tower)?;
        let top = tower.top();
        let mut maps = Vec::with_capacity(mats.len());
        for (a, m) in quiver.arrows.iter().zip(mats) {
            let (di, dj, g) = (quiver.d[a.tail], quiver.d[a.head], a.valuation);
            let (mi, mj) = ((di / g) as usize, (dj / g) as usize);
            if m.rows() != mj * dims[a.head] || m.cols() != mi * dims[a.tail] {
                return Err(Error::Input("matrix shape does not match valuation".into()));
            }
            let basis = tower.basis(g, dj);
            let imgs = (0..m.cols())
                .map(|c| {
                    (0..dims[a.head])
                        .map(|t| (0..mj).fold(0, |acc, u| top.add(acc, top.mul(m[(t * mj + u, c)], basis[u]))))
                        .collect()
                })
                .collect();
            maps.push(imgs);
        }
        Self::from_images(quiver, tower, dims, maps)
    }

    pub fn quiver(&self) -> &Arc<ValuedQuiver> {
        &self.quiver
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_vector(&self) -> Vec<i64> {
        self.dims.iter().map(|&x| x as i64).collect()
    }

    pub fn images(&self, arrow: usize) -> &[Vec<u32>] {
        &self.maps[arrow]
    }

    fn cols(&self, a: &Arrow) -> usize {
        (self.quiver.d[a.tail] / a.valuation) as usize * self.dims[a.tail]
    }

    /// `V_a` as an `F_{p^g}`-matrix.
    pub fn arrow_matrix(&self, arrow: usize) -> FMatrix {
        let a = self.quiver.arrows[arrow];
        let (dj, g) = (self.quiver.d[a.head], a.valuation);
        let mj = (dj / g) as usize;
        let mut m = FMatrix::zeros(mj * self.dims[a.head], self.cols(&a));
        for (c, img) in self.maps[arrow].iter().enumerate() {
            for (t, &x) in img.iter().enumerate() {
                for (u, &y) in self.tower.coords(g, dj, x).iter().enumerate() {
                    m[(t * mj + u, c)] = y;
                }
            }
        }
        m
    }

    /// `V_a(x)` for `x in V_i`.
    pub fn apply(&self, arrow: usize, x: &[u32]) -> Vec<u32> {
        let a = self.quiver.arrows[arrow];
        let top = self.tower.top();
        let (di, g) = (self.quiver.d[a.tail], a.valuation);
        let mi = (di / g) as usize;
        let mut out = vec![0u32; self.dims[a.head]];
        for (t, &xt) in x.iter().enumerate() {
            if xt == 0 {
                continue;
            }
            for (s, &c) in self.tower.coords(g, di, xt).iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (o, &y) in out.iter_mut().zip(&self.maps[arrow][t * mi + s]) {
                    *o = top.add(*o, top.mul(c, y));
                }
            }
        }
        out
    }

    /// The dual representation on the opposite quiver. `V_i` is identified
    /// with its dual by `x . z = sum_t x_t z_t`, and `V_a^T` is the transpose
    /// for the trace forms: `tr(V_a(x) . y) = tr(x . V_a^T(y))` over `F_{p^g}`.
    /// `E -> E^perp` is then a bijection `Gr_e(V) -> Gr_{v-e}(DV)`.
    pub fn dual(&self) -> Result<Self> {
        let q = &self.quiver;
        let op = Arc::new(q.opposite());
        let t = &self.tower;
        let top = t.top();
        let maps = op
            .arrows
            .iter()
            .map(|b| {
                let (i, j, g) = (b.head, b.tail, b.valuation);
                let ai = q.arrow_index(i, j, b.copy).expect("reversed arrow");
                let (di, dj) = (q.d[i], q.d[j]);
                let mi = (di / g) as usize;
                let (beta, dual) = (t.basis(g, di), t.dual_basis(g, di));
                let mut imgs = Vec::new();
                for u in 0..self.dims[j] {
                    for &bj in t.basis(g, dj) {
                        let z: Vec<u32> = (0..self.dims[i])
                            .map(|tt| {
                                (0..mi).fold(0, |acc, r| {
                                    let c = t.trace(g, dj, top.mul(self.maps[ai][tt * mi + r][u], bj));
                                    top.add(acc, top.mul(c, dual[r]))
                                })
                            })
                            .collect();
                        imgs.push(z);
                    }
                }
                debug_assert_eq!(beta.len(), mi);
                imgs
            })
            .collect();
        Self::from_images(op, t.clone(), self.dims.clone(), maps)
    }

    /// `F_{p^{d_j}}`-span of `V_a(E)` for `E` spanned by `basis`, as an RREF basis.
    fn image_span(&self, arrow: usize, basis: &[Vec<u32>]) -> Vec<Vec<u32>> {
        let a = self.quiver.arrows[arrow];
        let top = self.tower.top();
        let beta = self.tower.basis(a.valuation, self.quiver.d[a.tail]);
        let mut gens = Vec::new();
        for b in basis {
            for &bs in beta {
                let x: Vec<u32> = b.iter().map(|&y| top.mul(bs, y)).collect();
                gens.push(self.apply(arrow, &x));
            }
        }
        span_basis(top, &gens, self.dims[a.head])
    }

    /// Does the tuple of subspaces (given by spanning rows) form a subrepresentation?
    pub fn is_subrepresentation(&self, subspaces: &[Vec<Vec<u32>>]) -> bool {
        let top = self.tower.top();
        self.quiver.arrows.iter().enumerate().all(|(ai, a)| {
            let img = self.image_span(ai, &subspaces[a.tail]);
            let mut rows = subspaces[a.head].clone();
            let r0 = rank(top, &rows, self.dims[a.head]);
            rows.extend(img);
            rank(top, &rows, self.dims[a.head]) == r0
        })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.tower, &other.tower) && self.tower.p() != other.tower.p() {
            return Err(Error::TowerMismatch);
        }
        if self.quiver != other.quiver {
            return Err(Error::Input("direct sum over different quivers".into()));
        }
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .quiver
            .arrows
            .iter()
            .enumerate()
            .map(|(ai, a)| {
                let (vj, wj) = (self.dims[a.head], other.dims[a.head]);
                let mut imgs: Vec<Vec<u32>> = self.maps[ai]
                    .iter()
                    .map(|x| {
                        let mut y = x.clone();
                        y.resize(vj + wj, 0);
                        y
                    })
                    .collect();
                imgs.extend(other.maps[ai].iter().map(|x| {
                    let mut y = vec![0; vj];
                    y.extend_from_slice(x);
                    y
                }));
                imgs
            })
            .collect();
        Ok(ValuedRep { quiver: self.quiver.clone(), tower: self.tower.clone(), dims, maps })
    }
}

fn same_setting(v: &ValuedRep, w: &ValuedRep) -> Result<()> {
    if v.quiver != w.quiver {
        return Err(Error::Input("representations of different quivers".into()));
    }
    if !Arc::ptr_eq(&v.tower, &w.tower) && (v.tower.p() != w.tower.p() || v.tower.top_degree() != w.tower.top_degree())
    {
        return Err(Error::TowerMismatch);
    }
    Ok(())
}

/// The intertwiner system `phi_j V_a - W_a phi_i` over `F_p`: returns
/// (number of unknowns, target dimension, rank).
fn intertwiner_system(v: &ValuedRep, w: &ValuedRep) -> (usize, usize, usize) {
    let q = &v.quiver;
    let t = &v.tower;
    let top = t.top();
    let p = t.p();
    let ltop = top.degree() as usize;
    let n = q.rank();

    // equation slots: per arrow, per F_g-basis element of V_i, per component of W_j
    let mut eq_offset = Vec::with_capacity(q.arrows.len());
    let mut neq = 0;
    let mut target = 0;
    for a in &q.arrows {
        eq_offset.push(neq);
        neq += v.cols(a) * w.dims[a.head] * ltop;
        target += (q.d[a.tail] * q.d[a.head] / a.valuation) as usize * v.dims[a.tail] * w.dims[a.head];
    }
    let digits = |x: u32, out: &mut [u32]| {
        let mut x = x;
        for o in out.iter_mut() {
            *o = x % p;
            x /= p;
        }
    };

    let mut columns: Vec<Vec<u32>> = Vec::new();
    for i in 0..n {
        let di = q.d[i];
        let omegas = t.basis(1, di).to_vec();
        for r in 0..w.dims[i] {
            for c in 0..v.dims[i] {
                for &om in &omegas {
                    let mut col = vec![0u32; neq];
                    for (ai, a) in q.arrows.iter().enumerate() {
                        let mi = (q.d[a.tail] / a.valuation) as usize;
                        let len_w = w.dims[a.head];
                        if a.head == i {
                            // + phi_i(V_a(beta_s e_t)): component r gets om * y_c
                            for (col_idx, y) in v.maps[ai].iter().enumerate() {
                                let val = top.mul(om, y[c]);
                                let base = eq_offset[ai] + (col_idx * len_w + r) * ltop;
                                let mut dg = vec![0; ltop];
                                digits(val, &mut dg);
                                for (k, &x) in dg.iter().enumerate() {
                                    col[base + k] = (col[base + k] + x) % p;
                                }
                            }
                        }
                        if a.tail == i {
                            // - W_a(phi_i(beta_s e_t)), nonzero only for t = c
                            let beta = t.basis(a.valuation, di);
                            for (s, &bs) in beta.iter().enumerate() {
                                let mut z = vec![0u32; w.dims[i]];
                                z[r] = top.mul(om, bs);
                                let img = w.apply(ai, &z);
                                let col_idx = c * mi + s;
                                for (comp, &val) in img.iter().enumerate() {
                                    let base = eq_offset[ai] + (col_idx * len_w + comp) * ltop;
                                    let mut dg = vec![0; ltop];
                                    digits(val, &mut dg);
                                    for (k, &x) in dg.iter().enumerate() {
                                        col[base + k] = (col[base + k] + p - x) % p;
                                    }
                                }
                            }
                        }
                    }
                    columns.push(col);
                }
            }
        }
    }
    let unknowns = columns.len();
    let fp = t.field(1);
    let rk = if unknowns == 0 || neq == 0 { 0 } else { rank(fp, &columns, neq) };
    (unknowns, target, rk)
}

/// `dim_{F_p} Hom(V, W)`.
pub fn hom_dim(v: &ValuedRep, w: &ValuedRep) -> Result<i64> {
    same_setting(v, w)?;
    let (unknowns, _, rk) = intertwiner_system(v, w);
    Ok((unknowns - rk) as i64)
}

/// `dim_{F_p} Ext^1(V, W) = dim Hom - <v, w>` (the category is hereditary).
pub fn ext_dim(v: &ValuedRep, w: &ValuedRep) -> Result<i64> {
    Ok(hom_dim(v, w)? - v.quiver.euler_form(&v.dim_vector(), &w.dim_vector()))
}

/// `Ext^1` as the cokernel of the intertwiner map, computed without the Euler form.
pub fn ext_dim_via_cokernel(v: &ValuedRep, w: &ValuedRep) -> Result<i64> {
    same_setting(v, w)?;
    let (_, target, rk) = intertwiner_system(v, w);
    Ok((target - rk) as i64)
}

/// Uniformly sampled representation of dimension `v`.
pub fn random_rep<R: Rng>(
    quiver: &Arc<ValuedQuiver>,
    tower: &Arc<FieldTower>,
    v: &[usize],
    rng: &mut R,
) -> Result<ValuedRep> {
    check_tower(quiver, tower)?;
    let maps = quiver
        .arrows
        .iter()
        .map(|a| {
            let field = tower.subfield(quiver.d[a.head]);
            let ncols = (quiver.d[a.tail] / a.valuation) as usize * v[a.tail];
            (0..ncols).map(|_| (0..v[a.head]).map(|_| field[rng.gen_range(0..field.len())]).collect()).collect()
        })
        .collect();
    Ok(ValuedRep { quiver: quiver.clone(), tower: tower.clone(), dims: v.to_vec(), maps })
}

/// First sampled representation with `Ext^1(V, V) = 0`; deterministic in `rng_seed`.
pub fn build_rigid_rep(
    quiver: &Arc<ValuedQuiver>,
    tower: &Arc<FieldTower>,
    v: &[usize],
    attempts: usize,
    rng_seed: u64,
) -> Result<ValuedRep> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..attempts {
        let r = random_rep(quiver, tower, v, &mut rng)?;
        if ext_dim(&r, &r)? == 0 {
            return Ok(r);
        }
    }
    Err(Error::NoRigidFound { attempts })
}

/// Counts of subrepresentations by dimension vector, for every `0 <= e <= v`.
pub type Counts = BTreeMap<Vec<i64>, u128>;

fn overflow() -> Error {
    Error::CapExceeded { what: "Grassmannian count".into(), needed: "> 2^128".into(), cap: u64::MAX }
}

fn all_dim_vectors(v: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &vi in v {
        out = out.into_iter().flat_map(|e| (0..=vi).map(move |x| [e.clone(), vec![x]].concat())).collect();
    }
    out
}

fn enumeration_bound(rep: &ValuedRep, e: &[usize], vertices: &[usize]) -> Option<u128> {
    vertices.iter().try_fold(1u128, |acc, &i| {
        acc.checked_mul(gaussian_binomial(rep.dims[i] as u32, e[i] as u32, rep.tower.order_of(rep.quiver.d[i]))?)
    })
}

fn non_sinks(q: &ValuedQuiver) -> Vec<usize> {
    q.topological_order().expect("acyclic").into_iter().filter(|&i| !q.is_sink(i)).collect()
}

/// Which of `V` and `DV` needs fewer enumerated subspace tuples for `e`.
fn prefer_dual(rep: &ValuedRep, e: &[usize]) -> bool {
    let q = &rep.quiver;
    let non_sources: Vec<usize> = (0..q.rank()).filter(|&i| !q.is_source(i)).collect();
    let fwd = enumeration_bound(rep, e, &non_sinks(q)).unwrap_or(u128::MAX);
    let back = enumeration_bound(rep, e, &non_sources).unwrap_or(u128::MAX);
    back < fwd
}

fn complement(rep: &ValuedRep, e: &[usize]) -> Vec<usize> {
    rep.dims.iter().zip(e).map(|(v, x)| v - x).collect()
}

/// `|Gr_e(V)|`, counted on `V` or on the dual `DV` (as `|Gr_{v-e}(DV)|`),
/// whichever enumerates fewer tuples.
pub fn grassmannian_count(rep: &ValuedRep, e: &[usize], cap: u64) -> Result<u128> {
    if e.iter().zip(&rep.dims).any(|(a, b)| a > b) {
        return Ok(0);
    }
    if prefer_dual(rep, e) {
        count_forward(&rep.dual()?, &complement(rep, e), cap)
    } else {
        count_forward(rep, e, cap)
    }
}

/// Vertices with outgoing arrows are enumerated in topological order, each
/// `E_j` ranging over subspaces containing the images of the earlier
/// choices; at sinks only the number of such subspaces matters.
fn count_forward(rep: &ValuedRep, e: &[usize], cap: u64) -> Result<u128> {
    let q = &rep.quiver;
    let order = q.topological_order().expect("acyclic");
    let inner: Vec<usize> = order.iter().copied().filter(|&i| !q.is_sink(i)).collect();
    let sinks: Vec<usize> = order.iter().copied().filter(|&i| q.is_sink(i)).collect();
    let bound = enumeration_bound(rep, e, &inner).unwrap_or(u128::MAX);
    if bound > cap as u128 {
        return Err(Error::CapExceeded {
            what: "Grassmannian enumeration".into(),
            needed: format!("{bound} candidate tuples"),
            cap,
        });
    }
    let mut chosen: Vec<Vec<Vec<u32>>> = vec![vec![]; q.rank()];
    let mut total: u128 = 0;
    let mut err = None;
    count_rec(rep, e, &inner, &sinks, 0, &mut chosen, &mut total, &mut err);
    match err {
        Some(x) => Err(x),
        None => Ok(total),
    }
}

fn forced_span(rep: &ValuedRep, j: usize, chosen: &[Vec<Vec<u32>>]) -> Vec<Vec<u32>> {
    let mut gens = Vec::new();
    for (ai, a) in rep.quiver.arrows.iter().enumerate().filter(|(_, a)| a.head == j) {
        gens.extend(rep.image_span(ai, &chosen[a.tail]));
    }
    span_basis(rep.tower.top(), &gens, rep.dims[j])
}

#[allow(clippy::too_many_arguments)]
fn count_rec(
    rep: &ValuedRep,
    e: &[usize],
    inner: &[usize],
    sinks: &[usize],
    pos: usize,
    chosen: &mut Vec<Vec<Vec<u32>>>,
    total: &mut u128,
    err: &mut Option<Error>,
) {
    if err.is_some() {
        return;
    }
    if pos == inner.len() {
        let mut prod: u128 = 1;
        for &j in sinks {
            let r = forced_span(rep, j, chosen).len();
            if r > e[j] {
                return;
            }
            let q = rep.tower.order_of(rep.quiver.d[j]);
            match gaussian_binomial((rep.dims[j] - r) as u32, (e[j] - r) as u32, q).and_then(|c| prod.checked_mul(c)) {
                Some(x) => prod = x,
                None => {
                    *err = Some(overflow());
                    return;
                }
            }
        }
        match total.checked_add(prod) {
            Some(x) => *total = x,
            None => *err = Some(overflow()),
        }
        return;
    }
    let j = inner[pos];
    let u = forced_span(rep, j, chosen);
    if u.len() > e[j] {
        return;
    }
    let field = rep.tower.subfield(rep.quiver.d[j]);
    let mut subs = Vec::new();
    for_each_subspace_containing(field, rep.dims[j], &u, e[j], |b| subs.push(b.to_vec()));
    for b in subs {
        chosen[j] = b;
        count_rec(rep, e, inner, sinks, pos + 1, chosen, total, err);
    }
    chosen[j].clear();
}

/// `|Gr_e(V)|` for every `e <= v`, in parallel over `e`.
pub fn grassmannian_counts(rep: &ValuedRep, cap: u64) -> Result<Counts> {
    let es = all_dim_vectors(&rep.dims);
    let dual = if es.iter().any(|e| prefer_dual(rep, e)) { Some(rep.dual()?) } else { None };
    let results: Vec<Result<(Vec<i64>, u128)>> = es
        .par_iter()
        .map(|e| {
            let c = match &dual {
                Some(d) if prefer_dual(rep, e) => count_forward(d, &complement(rep, e), cap)?,
                _ => count_forward(rep, e, cap)?,
            };
            Ok((e.iter().map(|&x| x as i64).collect(), c))
        })
        .collect();
    results.into_iter().collect()
}

/// Reference implementation: enumerate every tuple of subspaces and test closure.
pub fn grassmannian_counts_exhaustive(rep: &ValuedRep, cap: u64) -> Result<Counts> {
    let n = rep.quiver.rank();
    let all: Vec<usize> = (0..n).collect();
    let mut out = Counts::new();
    for e in all_dim_vectors(&rep.dims) {
        let bound = enumeration_bound(rep, &e, &all).unwrap_or(u128::MAX);
        if bound > cap as u128 {
            return Err(Error::CapExceeded { what: "exhaustive enumeration".into(), needed: bound.to_string(), cap });
        }
        let per_vertex: Vec<Vec<Vec<Vec<u32>>>> = (0..n)
            .map(|i| subspaces(rep.tower.subfield(rep.quiver.d[i]), rep.dims[i], e[i]).collect())
            .collect();
        let mut idx = vec![0usize; n];
        let mut count: u128 = 0;
        'outer: loop {
            let tuple: Vec<Vec<Vec<u32>>> = (0..n).map(|i| per_vertex[i][idx[i]].clone()).collect();
            if rep.is_subrepresentation(&tuple) {
                count += 1;
            }
            for i in 0..n {
                idx[i] += 1;
                if idx[i] < per_vertex[i].len() {
                    continue 'outer;
                }
                idx[i] = 0;
            }
            break;
        }
        out.insert(e.iter().map(|&x| x as i64).collect(), count);
    }
    Ok(out)
}

/// Dimension vector of the subrepresentation equal to `V` on the vertices
/// reachable from `i` and zero elsewhere.
pub fn support_closure_subrep(rep: &ValuedRep, i: usize) -> Vec<i64> {
    let reach = rep.quiver.reachable(i);
    let n = rep.quiver.rank();
    let subspaces: Vec<Vec<Vec<u32>>> = (0..n)
        .map(|j| {
            if reach[j] {
                (0..rep.dims[j])
                    .map(|t| {
                        let mut e = vec![0; rep.dims[j]];
                        e[t] = 1;
                        e
                    })
                    .collect()
            } else {
                vec![]
            }
        })
        .collect();
    assert!(rep.is_subrepresentation(&subspaces), "closure under arrows is a subrepresentation");
    (0..n).map(|j| if reach[j] { rep.dims[j] as i64 } else { 0 }).collect()
}

/// Reflection functor at a sink (`Sigma_k^+`) or source (`Sigma_k^-`),
/// producing a representation of the quiver with arrows at `k` reversed.
pub fn reflect(rep: &ValuedRep, k: usize) -> Result<ValuedRep> {
    let q = &rep.quiver;
    let newq = Arc::new(q.reflected(k)?);
    let t = &rep.tower;
    let top = t.top();
    let dk = q.d[k];

    let mut dims = rep.dims.clone();
    let mut maps: Vec<Vec<Vec<u32>>> = vec![vec![]; newq.arrows.len()];
    for (ai, a) in q.arrows.iter().enumerate() {
        if a.tail != k && a.head != k {
            let ni = newq.arrow_index(a.tail, a.head, a.copy).expect("arrow kept");
            maps[ni] = rep.maps[ai].clone();
        }
    }
    let touching: Vec<usize> = (0..q.arrows.len()).filter(|&ai| q.arrows[ai].tail == k || q.arrows[ai].head == k).collect();

    if q.is_sink(k) {
        // V'_k = ker(sum_a F_{d_k} (x) V_i -> V_k)
        let mut offsets = Vec::new();
        let mut ncols = 0;
        for &ai in &touching {
            offsets.push(ncols);
            ncols += rep.maps[ai].len();
        }
        let mut h = FMatrix::zeros(rep.dims[k], ncols);
        for (&ai, &off) in touching.iter().zip(&offsets) {
            for (c, img) in rep.maps[ai].iter().enumerate() {
                for (r, &x) in img.iter().enumerate() {
                    h[(r, off + c)] = x;
                }
            }
        }
        let rk = span_basis(top, &h.to_rows(), ncols).len();
        if rk < rep.dims[k] {
            return Err(Error::HasSimpleSummand(k + 1));
        }
        let ker = nullspace(top, &h);
        dims[k] = ker.len();
        for (&ai, &off) in touching.iter().zip(&offsets) {
            let a = q.arrows[ai];
            let i = a.tail;
            let g = a.valuation;
            let mi = (q.d[i] / g) as usize;
            let beta_k = t.basis(g, dk);
            let beta_i = t.basis(g, q.d[i]);
            let mut imgs = Vec::with_capacity(ker.len() * beta_k.len());
            for z in &ker {
                for &bk in beta_k {
                    let mut y = vec![0u32; rep.dims[i]];
                    for (tt, yt) in y.iter_mut().enumerate() {
                        for s in 0..mi {
                            let lam = top.mul(bk, z[off + tt * mi + s]);
                            let tr = t.trace(g, dk, lam);
                            *yt = top.add(*yt, top.mul(tr, beta_i[s]));
                        }
                    }
                    imgs.push(y);
                }
            }
            let ni = newq.arrow_index(k, i, a.copy).expect("reversed arrow");
            maps[ni] = imgs;
        }
    } else {
        // V'_k = coker(V_k -> sum_a F_{d_k} (x) V_j)
        let mut offsets = Vec::new();
        let mut ncols = 0;
        for &ai in &touching {
            offsets.push(ncols);
            let a = q.arrows[ai];
            ncols += (q.d[a.head] / a.valuation) as usize * rep.dims[a.head];
        }
        let mut rows = vec![vec![0u32; ncols]; rep.dims[k]];
        for (&ai, &off) in touching.iter().zip(&offsets) {
            let a = q.arrows[ai];
            let (g, dj) = (a.valuation, q.d[a.head]);
            let (mk, mj) = ((dk / g) as usize, (dj / g) as usize);
            let dual = t.dual_basis(g, dk);
            for (r, row) in rows.iter_mut().enumerate() {
                for (s, &ds) in dual.iter().enumerate().take(mk) {
                    let y = &rep.maps[ai][r * mk + s];
                    for (tt, &yt) in y.iter().enumerate() {
                        for (u, &c) in t.coords(g, dj, yt).iter().enumerate() {
                            let idx = off + tt * mj + u;
                            row[idx] = top.add(row[idx], top.mul(ds, c));
                        }
                    }
                }
            }
        }
        let im = span_basis(top, &rows, ncols);
        if im.len() < rep.dims[k] {
            return Err(Error::HasSimpleSummand(k + 1));
        }
        let piv = pivots_of(&im);
        let rest: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
        dims[k] = rest.len();
        for (&ai, &off) in touching.iter().zip(&offsets) {
            let a = q.arrows[ai];
            let j = a.head;
            let mj = (q.d[j] / a.valuation) as usize;
            let mut imgs = Vec::with_capacity(mj * rep.dims[j]);
            for tt in 0..rep.dims[j] {
                for u in 0..mj {
                    let mut x = vec![0u32; ncols];
                    x[off + tt * mj + u] = 1;
                    reduce_mod(top, &mut x, &im, &piv);
                    imgs.push(rest.iter().map(|&c| x[c]).collect());
                }
            }
            let ni = newq.arrow_index(j, k, a.copy).expect("reversed arrow");
            maps[ni] = imgs;
        }
    }
    ValuedRep::from_images(newq, rep.tower.clone(), dims, maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finfield::DEFAULT_CAP;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn b2() -> Arc<ValuedQuiver> {
        Arc::new(ValuedQuiver::new(&m(&[&[0, 1], &[-2, 0]]), &[2, 1]).unwrap())
    }

    fn g2() -> Arc<ValuedQuiver> {
        Arc::new(ValuedQuiver::new(&m(&[&[0, 1], &[-3, 0]]), &[3, 1]).unwrap())
    }

    fn a2() -> Arc<ValuedQuiver> {
        Arc::new(ValuedQuiver::new(&m(&[&[0, 1], &[-1, 0]]), &[1, 1]).unwrap())
    }

    #[test]
    fn quiver_shape() {
        let q = b2();
        assert_eq!(q.arrows(), &[Arrow { tail: 1, head: 0, copy: 0, valuation: 1 }]);
        assert!(q.is_sink(0) && q.is_source(1));
        let kr = Arc::new(ValuedQuiver::new(&m(&[&[0, 2], &[-2, 0]]), &[1, 1]).unwrap());
        assert_eq!(kr.arrows().len(), 2);
        assert_eq!(
            ValuedQuiver::new(&m(&[&[0, 1, -1], &[-1, 0, 1], &[1, -1, 0]]), &[1, 1, 1]).unwrap_err(),
            Error::NotAcyclic
        );
    }

    #[test]
    fn euler_form_table() {
        let q = b2();
        assert_eq!(q.euler_form(&[1, 0], &[1, 0]), 2);
        assert_eq!(q.euler_form(&[0, 1], &[1, 0]), -2);
        assert_eq!(q.euler_form(&[1, 0], &[0, 1]), 0);
        for i in 0..2 {
            let mut a = vec![0; 4];
            let mut b = vec![0; 4];
            a[i] = 1;
            b[2 + i] = 1;
            assert_eq!(q.framed_euler_form(&a, &b), -(q.degrees()[i] as i64));
        }
    }

    #[test]
    fn stars() {
        let q = b2();
        assert_eq!(q.star_left(&[1, 0]), vec![1, -2]);
        assert_eq!(q.star_left(&[0, 1]), vec![0, 1]);
        // Btilde e = *e - e*
        let e = ExchangeData::new(q.b(), Some(vec![2, 1]), None).unwrap();
        for v in [[1, 0], [0, 1], [2, 3], [-1, 4]] {
            let l = q.star_left(&v);
            let r = q.star_right(&v);
            let lhs = e.btilde().mul_vec(&v);
            let rhs: Vec<i64> = (0..4).map(|j| if j < 2 { l[j] } else { 0 } - r[j]).collect();
            assert_eq!(lhs, rhs);
        }
        assert_eq!(e.btilde().mul_vec(&[1, 0]), vec![0, -2, 1, 0]);
        // *alpha_j = alpha_j + sum_i min(b_ij, 0) alpha_i
        let q3 = ValuedQuiver::new(&m(&[&[0, 1, 0], &[-1, 0, 1], &[0, -2, 0]]), &[2, 2, 1]).unwrap();
        for j in 0..3 {
            let mut a = vec![0; 3];
            a[j] = 1;
            let expect: Vec<i64> = (0..3).map(|i| i64::from(i == j) + q3.b()[(i, j)].min(0)).collect();
            assert_eq!(q3.star_left(&a), expect);
        }
    }

    #[test]
    fn star_left_ignores_rescaling() {
        let b = m(&[&[0, 1], &[-2, 0]]);
        let q1 = ValuedQuiver::new(&b, &[2, 1]).unwrap();
        let q2 = ValuedQuiver::new(&b, &[6, 3]).unwrap();
        for v in [[1, 0], [3, -2], [5, 7]] {
            assert_eq!(q1.star_left(&v), q2.star_left(&v));
            assert_eq!(q1.star_right(&v), q2.star_right(&v));
        }
    }

    #[test]
    fn simple_reflection() {
        let q = b2();
        assert_eq!(q.s_k(1, &[1, 0]), vec![1, 2]);
        assert_eq!(q.s_k(0, &[1, 1]), vec![0, 1]);
        assert_eq!(q.s_k(0, &[1, 2]), vec![1, 2]);
    }

    #[test]
    fn hom_ext_of_simples() {
        let q = b2();
        let t = q.tower(2, DEFAULT_CAP).unwrap();
        let s1 = ValuedRep::simple(q.clone(), t.clone(), 0).unwrap();
        let s2 = ValuedRep::simple(q.clone(), t.clone(), 1).unwrap();
        assert_eq!(hom_dim(&s1, &s1).unwrap(), 2);
        assert_eq!(ext_dim(&s1, &s1).unwrap(), 0);
        assert_eq!(hom_dim(&s2, &s1).unwrap(), 0);
        assert_eq!(ext_dim(&s2, &s1).unwrap(), 2);
        assert_eq!(ext_dim_via_cokernel(&s2, &s1).unwrap(), 2);
    }

    #[test]
    fn a2_nonzero_map_is_rigid() {
        let q = a2();
        let t = q.tower(3, DEFAULT_CAP).unwrap();
        let v = ValuedRep::from_images(q.clone(), t.clone(), vec![1, 1], vec![vec![vec![1]]]).unwrap();
        assert_eq!(ext_dim(&v, &v).unwrap(), 0);
        let z = ValuedRep::from_images(q, t, vec![1, 1], vec![vec![vec![0]]]).unwrap();
        assert_eq!(ext_dim(&z, &z).unwrap(), 1);
    }

    #[test]
    fn euler_identity_against_cokernel() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [b2(), g2()] {
            for p in [2u64, 3] {
                let t = q.tower(p, DEFAULT_CAP).unwrap();
                let dims: Vec<Vec<usize>> = all_dim_vectors(&[2, 2]).into_iter().filter(|v| v[0] + v[1] <= 4).collect();
                for v in &dims {
                    for w in &dims {
                        let a = random_rep(&q, &t, v, &mut rng).unwrap();
                        let b = random_rep(&q, &t, w, &mut rng).unwrap();
                        assert_eq!(ext_dim(&a, &b).unwrap(), ext_dim_via_cokernel(&a, &b).unwrap(), "v={v:?} w={w:?}");
                        assert!(ext_dim(&a, &b).unwrap() >= 0);
                    }
                }
            }
        }
    }

    #[test]
    fn rigid_sampling() {
        let q = b2();
        let t = q.tower(2, DEFAULT_CAP).unwrap();
        let s1 = build_rigid_rep(&q, &t, &[1, 0], 10, 1).unwrap();
        assert_eq!(s1.dims(), &[1, 0]);
        let v = build_rigid_rep(&q, &t, &[1, 1], 50, 1).unwrap();
        assert!(v.images(0).iter().any(|x| x[0] != 0));
        // 2 alpha_1 is rigid (S_1 + S_1)
        build_rigid_rep(&q, &t, &[2, 0], 10, 1).unwrap();
        // (1,1) over the Kronecker quiver is not rigid
        let kr = Arc::new(ValuedQuiver::new(&m(&[&[0, 2], &[-2, 0]]), &[1, 1]).unwrap());
        let tk = kr.tower(2, DEFAULT_CAP).unwrap();
        assert_eq!(build_rigid_rep(&kr, &tk, &[1, 1], 30, 1).unwrap_err(), Error::NoRigidFound { attempts: 30 });
        // reproducible
        let a = build_rigid_rep(&q, &t, &[1, 2], 50, 9).unwrap();
        let b = build_rigid_rep(&q, &t, &[1, 2], 50, 9).unwrap();
        assert_eq!(a.maps, b.maps);
    }

    #[test]
    fn counts_for_small_reps() {
        let q = b2();
        let t = q.tower(2, DEFAULT_CAP).unwrap();
        let s1 = ValuedRep::simple(q.clone(), t.clone(), 0).unwrap();
        let ss = s1.direct_sum(&s1).unwrap();
        let c = grassmannian_counts(&ss, DEFAULT_CAP).unwrap();
        assert_eq!(c[&vec![1, 0]], 5);
        let v = build_rigid_rep(&q, &t, &[1, 1], 50, 3).unwrap();
        let c = grassmannian_counts(&v, DEFAULT_CAP).unwrap();
        assert_eq!(c[&vec![0, 0]], 1);
        assert_eq!(c[&vec![1, 0]], 1);
        assert_eq!(c[&vec![0, 1]], 0);
        assert_eq!(c[&vec![1, 1]], 1);
    }

    #[test]
    fn fast_counts_match_exhaustive() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b3 = Arc::new(ValuedQuiver::new(&m(&[&[0, 1, 0], &[-1, 0, 1], &[0, -2, 0]]), &[2, 2, 1]).unwrap());
        for (q, dims) in [(b2(), vec![1usize, 2]), (b2(), vec![2, 2]), (g2(), vec![1, 2]), (a2(), vec![2, 2]), (b3, vec![1, 1, 2])] {
            for p in [2u64, 3] {
                let t = q.tower(p, DEFAULT_CAP).unwrap();
                for _ in 0..3 {
                    let r = random_rep(&q, &t, &dims, &mut rng).unwrap();
                    let c = grassmannian_counts(&r, 1 << 20).unwrap();
                    assert_eq!(c, grassmannian_counts_exhaustive(&r, 1 << 20).unwrap(), "dims {dims:?} p={p}");
                    assert_eq!(c[&vec![0; dims.len()]], 1);
                    assert_eq!(c[&dims.iter().map(|&x| x as i64).collect::<Vec<_>>()], 1);
                }
            }
        }
    }

    #[test]
    fn support_closure() {
        let q = b2();
        let t = q.tower(2, DEFAULT_CAP).unwrap();
        let v = build_rigid_rep(&q, &t, &[1, 1], 50, 3).unwrap();
        assert_eq!(support_closure_subrep(&v, 0), vec![1, 0]);
        assert_eq!(support_closure_subrep(&v, 1), vec![1, 1]);
    }

    #[test]
    fn reflection_dimensions() {
        let q = b2();
        let t = q.tower(3, DEFAULT_CAP).unwrap();
        let s1 = ValuedRep::simple(q.clone(), t.clone(), 0).unwrap();
        let r = reflect(&s1, 1).unwrap();
        assert_eq!(r.dims(), &[1, 2]);
        assert!(r.quiver().is_sink(1));
        let s2 = ValuedRep::simple(q.clone(), t.clone(), 1).unwrap();
        assert_eq!(reflect(&s2, 1).unwrap_err(), Error::HasSimpleSummand(2));
        assert_eq!(reflect(&s1, 0).unwrap_err(), Error::HasSimpleSummand(1));
        let v = build_rigid_rep(&q, &t, &[1, 1], 50, 3).unwrap();
        assert_eq!(reflect(&v, 0).unwrap().dims(), &[0, 1]);
        let a3 = Arc::new(ValuedQuiver::new(&m(&[&[0, 1, 0], &[-1, 0, 1], &[0, -1, 0]]), &[1, 1, 1]).unwrap());
        let ta = a3.tower(2, DEFAULT_CAP).unwrap();
        let x = build_rigid_rep(&a3, &ta, &[1, 1, 1], 50, 1).unwrap();
        assert_eq!(reflect(&x, 1).unwrap_err(), Error::NotSinkOrSource(2));
    }

    #[test]
    fn reflection_dims_follow_s_k_and_double_reflection_is_identity() {
        let b3 = Arc::new(ValuedQuiver::new(&m(&[&[0, 1, 0], &[-1, 0, 1], &[0, -2, 0]]), &[2, 2, 1]).unwrap());
        for (q, vs) in [
            (b2(), vec![vec![1usize, 0], vec![1, 1], vec![1, 2], vec![0, 1]]),
            (g2(), vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![1, 3], vec![2, 3], vec![0, 1]]),
            (b3, vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 1, 1], vec![1, 1, 2], vec![1, 2, 2], vec![1, 0, 0]]),
        ] {
            for p in [2u64, 3] {
                let t = q.tower(p, DEFAULT_CAP).unwrap();
                for v in &vs {
                    let rep = build_rigid_rep(&q, &t, v, 200, 5).unwrap();
                    for k in 0..q.rank() {
                        if !(q.is_sink(k) || q.is_source(k)) {
                            continue;
                        }
                        let Ok(r) = reflect(&rep, k) else {
                            assert!(v[k] > 0 && v.iter().filter(|&&x| x > 0).count() == 1);
                            continue;
                        };
                        let expect = q.s_k(k, &rep.dim_vector());
                        assert_eq!(r.dim_vector(), expect);
                        assert_eq!(ext_dim(&r, &r).unwrap(), 0, "reflection preserves rigidity");
                        let back = reflect(&r, k).unwrap();
                        assert_eq!(back.quiver().as_ref(), q.as_ref());
                        assert_eq!(back.dims(), rep.dims());
                        assert_eq!(hom_dim(&back, &rep).unwrap(), hom_dim(&rep, &rep).unwrap());
                        assert_eq!(hom_dim(&rep, &back).unwrap(), hom_dim(&rep, &rep).unwrap());
                        assert_eq!(
                            grassmannian_counts(&back, DEFAULT_CAP).unwrap(),
                            grassmannian_counts(&rep, DEFAULT_CAP).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn arrow_matrix_round_trip() {
        let q = g2();
        let t = q.tower(2, DEFAULT_CAP).unwrap();
        let v = build_rigid_rep(&q, &t, &[1, 2], 100, 2).unwrap();
        let mat = v.arrow_matrix(0);
        assert_eq!((mat.rows(), mat.cols()), (3, 2));
        let w = ValuedRep::from_matrices(q, t, vec![1, 2], &[mat]).unwrap();
        assert_eq!(w.maps, v.maps);
    }

    #[test]
    fn rigid_representative_does_not_matter() {
        let q = g2();
        let t = q.tower(2, DEFAULT_CAP).unwrap();
        for v in [[1usize, 1], [1, 2], [2, 3]] {
            let a = build_rigid_rep(&q, &t, &v, 200, 1).unwrap();
            let b = build_rigid_rep(&q, &t, &v, 200, 2).unwrap();
            assert_eq!(grassmannian_counts(&a, DEFAULT_CAP).unwrap(), grassmannian_counts(&b, DEFAULT_CAP).unwrap());
        }
    }

    #[test]
    fn counts_do_not_depend_on_the_irreducible() {
        let q = b2();
        let std = q.tower(3, DEFAULT_CAP).unwrap();
        // x^2 + x + 2 instead of x^2 + 1
        let alt = Arc::new(FieldTower::with_top_modulus(3, &q.tower_degrees(), &[2, 1, 1], DEFAULT_CAP).unwrap());
        assert_ne!(std.top().modulus(), alt.top().modulus());
        for v in [[1usize, 1], [1, 2], [2, 2]] {
            let a = build_rigid_rep(&q, &std, &v, 200, 5).unwrap();
            let b = build_rigid_rep(&q, &alt, &v, 200, 5).unwrap();
            assert_eq!(grassmannian_counts(&a, DEFAULT_CAP).unwrap(), grassmannian_counts(&b, DEFAULT_CAP).unwrap(), "{v:?}");
        }
    }

    fn forward_counts(rep: &ValuedRep) -> Counts {
        all_dim_vectors(&rep.dims)
            .into_iter()
            .map(|e| (e.iter().map(|&x| x as i64).collect(), count_forward(rep, &e, DEFAULT_CAP).unwrap()))
            .collect()
    }

    #[test]
    fn dual_counts_complements() {
        for (q, p, vs) in [
            (b2(), 3u64, vec![[1usize, 1], [1, 2], [2, 3]]),
            (g2(), 2, vec![[1, 1], [1, 3], [2, 3], [1, 2]]),
        ] {
            let t = q.tower(p, DEFAULT_CAP).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for v in vs {
                let rep = random_rep(&q, &t, &v, &mut rng).unwrap();
                let d = rep.dual().unwrap();
                assert_eq!(d.quiver().b(), &q.b().neg());
                let fwd = forward_counts(&rep);
                let back = forward_counts(&d);
                for (e, c) in &fwd {
                    let ec: Vec<i64> = e.iter().zip(&v).map(|(x, &y)| y as i64 - x).collect();
                    assert_eq!(back[&ec], *c, "{v:?} {e:?}");
                }
                assert_eq!(grassmannian_counts(&rep, DEFAULT_CAP).unwrap(), fwd);
                // DDV has the counts of V
                assert_eq!(forward_counts(&d.dual().unwrap()), fwd);
            }
        }
    }

    #[test]
    fn dual_counts_match_exhaustive_on_b3() {
        let q = Arc::new(ValuedQuiver::new(&m(&[&[0, 1, 0], &[-1, 0, 1], &[0, -2, 0]]), &[2, 2, 1]).unwrap());
        let t = q.tower(2, DEFAULT_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rep = random_rep(&q, &t, &[1, 1, 2], &mut rng).unwrap();
        let d = rep.dual().unwrap();
        let ex = grassmannian_counts_exhaustive(&d, DEFAULT_CAP).unwrap();
        for (e, c) in grassmannian_counts_exhaustive(&rep, DEFAULT_CAP).unwrap() {
            let ec: Vec<i64> = e.iter().zip([1i64, 1, 2]).map(|(x, y)| y - x).collect();
            assert_eq!(ex[&ec], c);
        }
    }
}
