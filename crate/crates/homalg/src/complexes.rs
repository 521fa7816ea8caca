//! Bounded cochain complexes of finitely generated free `Z`-modules.
//!
//! Complexes are cohomologically graded with differential of degree `+1`.
//! The shift is `(C[k])^m = C^{m+k}` with the differential scaled by
//! `(-1)^k`, and the cone of `f : X -> Y` is `X^{n+1} ⊕ Y^n` with
//! `d(c, x) = (-dc, f(c) + dx)`. These conventions are pinned once and
//! exercised structurally by the test suites.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{HomalgError, Result};
use crate::exactlin::{homology_at, FgAbGroup, IntMatrix, PresentedHom, QuotPres};

/// A bounded cochain complex of free `Z`-modules.
///
/// Stored on its support `[lo, hi]` with `ranks[k] = rank(lo + k)` and
/// `diffs[k] = d(lo + k)` of shape `rank(lo+k+1) × rank(lo+k)`. The
/// representation is normalized (no zero ranks at either end), so structural
/// equality of complexes is `==`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Complex {
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<IntMatrix>,
}

impl Complex {
    /// Build and validate: shapes must cohere and `d∘d = 0` everywhere.
    pub fn new(lo: i64, ranks: Vec<usize>, diffs: Vec<IntMatrix>) -> Result<Self> {
        if !ranks.is_empty() && diffs.len() + 1 != ranks.len() {
            return Err(HomalgError::Shape(format!(
                "{} ranks need {} differentials, got {}",
                ranks.len(),
                ranks.len() - 1,
                diffs.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.rows() != ranks[k + 1] || d.cols() != ranks[k] {
                return Err(HomalgError::Shape(format!(
                    "d({}) is {}x{}, expected {}x{}",
                    lo + k as i64,
                    d.rows(),
                    d.cols(),
                    ranks[k + 1],
                    ranks[k]
                )));
            }
        }
        for k in 0..diffs.len().saturating_sub(1) {
            if !diffs[k + 1].mul(&diffs[k])?.is_zero() {
                return Err(HomalgError::NotAComplex {
                    degree: lo + k as i64,
                });
            }
        }
        Ok(Self::normalized(lo, ranks, diffs))
    }

    fn normalized(mut lo: i64, mut ranks: Vec<usize>, mut diffs: Vec<IntMatrix>) -> Self {
        while ranks.first() == Some(&0) {
            ranks.remove(0);
            if !diffs.is_empty() {
                diffs.remove(0);
            }
            lo += 1;
        }
        while ranks.last() == Some(&0) {
            ranks.pop();
            diffs.pop();
        }
        if ranks.is_empty() {
            return Complex {
                lo: 0,
                ranks: vec![],
                diffs: vec![],
            };
        }
        Complex { lo, ranks, diffs }
    }

    pub fn zero() -> Self {
        Complex {
            lo: 0,
            ranks: vec![],
            diffs: vec![],
        }
    }

    /// `Z^rank` concentrated in a single degree.
    pub fn concentrated(degree: i64, rank: usize) -> Self {
        Self::normalized(degree, vec![rank], vec![])
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Support interval, `None` for the zero complex.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.ranks.is_empty() {
            None
        } else {
            Some((self.lo, self.lo + self.ranks.len() as i64 - 1))
        }
    }

    pub fn rank(&self, n: i64) -> usize {
        if n < self.lo {
            return 0;
        }
        *self.ranks.get((n - self.lo) as usize).unwrap_or(&0)
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    /// Differential leaving degree `n`, materialized with the right shape.
    pub fn d(&self, n: i64) -> IntMatrix {
        if n >= self.lo && ((n - self.lo) as usize) < self.diffs.len() {
            self.diffs[(n - self.lo) as usize].clone()
        } else {
            IntMatrix::zeros(self.rank(n + 1), self.rank(n))
        }
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        let (lo, hi) = self.support().unwrap_or((0, -1));
        lo..=hi
    }

    /// Shifted complex `(C[k])^m = C^{m+k}`, differential scaled by `(-1)^k`.
    pub fn shift(&self, k: i64) -> Complex {
        if self.is_zero() {
            return Complex::zero();
        }
        let diffs = self
            .diffs
            .iter()
            .map(|d| if k.rem_euclid(2) == 0 { d.clone() } else { d.neg() })
            .collect();
        Complex {
            lo: self.lo - k,
            ranks: self.ranks.clone(),
            diffs,
        }
    }

    /// Direct sum, `self`'s coordinates first in every degree.
    pub fn direct_sum(&self, other: &Complex) -> Complex {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (alo, ahi) = self.support().unwrap();
        let (blo, bhi) = other.support().unwrap();
        let lo = alo.min(blo);
        let hi = ahi.max(bhi);
        let ranks: Vec<usize> = (lo..=hi).map(|n| self.rank(n) + other.rank(n)).collect();
        let diffs: Vec<IntMatrix> = (lo..hi).map(|n| self.d(n).block_diag(&other.d(n))).collect();
        Self::normalized(lo, ranks, diffs)
    }

    /// Brutal truncation: degrees outside the window are replaced by zero and
    /// the crossing differentials are dropped.
    pub fn truncate_brutal(&self, mode: Truncate) -> Complex {
        let Some((lo, hi)) = self.support() else {
            return Complex::zero();
        };
        let (new_lo, new_hi) = match mode {
            Truncate::AtMost(n) => (lo, hi.min(n)),
            Truncate::AtLeast(n) => (lo.max(n), hi),
        };
        if new_lo > new_hi {
            return Complex::zero();
        }
        let ranks: Vec<usize> = (new_lo..=new_hi).map(|n| self.rank(n)).collect();
        let diffs: Vec<IntMatrix> = (new_lo..new_hi).map(|n| self.d(n)).collect();
        Self::normalized(new_lo, ranks, diffs)
    }

    /// Cohomology in every degree, in canonical form.
    pub fn homology(&self) -> GradedGroup {
        let mut groups = BTreeMap::new();
        for n in self.degrees() {
            let (g, _) = homology_at(&self.d(n - 1), &self.d(n)).expect("complex validated");
            if !g.is_trivial() {
                groups.insert(n, g);
            }
        }
        GradedGroup { groups }
    }

    /// Cohomology with full presentations, for induced maps and comparisons.
    pub fn homology_presentations(&self) -> BTreeMap<i64, QuotPres> {
        let mut out = BTreeMap::new();
        for n in self.degrees() {
            let (_, pres) = homology_at(&self.d(n - 1), &self.d(n)).expect("complex validated");
            out.insert(n, pres);
        }
        out
    }

    /// Tensor product with the Koszul sign rule
    /// `d(x ⊗ y) = dx ⊗ y + (-1)^{|x|} x ⊗ dy`.
    ///
    /// Degree-`n` basis: blocks `C^s ⊗ D^t` with `s + t = n` ordered by
    /// ascending `s`, first tensor factor major inside each block.
    pub fn tensor(&self, other: &Complex) -> Complex {
        let (Some((alo, ahi)), Some((blo, bhi))) = (self.support(), other.support()) else {
            return Complex::zero();
        };
        let lo = alo + blo;
        let hi = ahi + bhi;
        let block_ranks = |n: i64| -> Vec<(i64, usize, usize)> {
            (alo..=ahi)
                .filter_map(|s| {
                    let t = n - s;
                    let (ra, rb) = (self.rank(s), other.rank(t));
                    (ra > 0 && rb > 0).then_some((s, ra, rb))
                })
                .collect()
        };
        let ranks: Vec<usize> = (lo..=hi)
            .map(|n| block_ranks(n).iter().map(|(_, ra, rb)| ra * rb).sum())
            .collect();
        let mut diffs = Vec::new();
        for n in lo..hi {
            let src_blocks = block_ranks(n);
            let dst_blocks = block_ranks(n + 1);
            let src_off = block_offsets(&src_blocks);
            let dst_off = block_offsets(&dst_blocks);
            let rows = dst_blocks.iter().map(|(_, ra, rb)| ra * rb).sum();
            let cols = src_blocks.iter().map(|(_, ra, rb)| ra * rb).sum();
            let mut d = IntMatrix::zeros(rows, cols);
            for (bi, &(s, ra, rb)) in src_blocks.iter().enumerate() {
                let t = n - s;
                // dx ⊗ y : block (s, t) -> (s + 1, t)
                if let Some(di) = dst_blocks.iter().position(|&(s2, _, _)| s2 == s + 1) {
                    let m = kron(&self.d(s), &IntMatrix::identity(rb));
                    write_block(&mut d, dst_off[di], src_off[bi], &m);
                    debug_assert_eq!(m.rows(), dst_blocks[di].1 * dst_blocks[di].2);
                }
                // (-1)^s x ⊗ dy : block (s, t) -> (s, t + 1)
                if let Some(di) = dst_blocks.iter().position(|&(s2, _, _)| s2 == s) {
                    let mut m = kron(&IntMatrix::identity(ra), &other.d(t));
                    if s.rem_euclid(2) == 1 {
                        m = m.neg();
                    }
                    write_block(&mut d, dst_off[di], src_off[bi], &m);
                }
            }
            diffs.push(d);
        }
        Self::normalized(lo, ranks, diffs)
    }
}

fn block_offsets(blocks: &[(i64, usize, usize)]) -> Vec<usize> {
    let mut off = Vec::with_capacity(blocks.len());
    let mut acc = 0;
    for &(_, ra, rb) in blocks {
        off.push(acc);
        acc += ra * rb;
    }
    off
}

fn write_block(dst: &mut IntMatrix, row0: usize, col0: usize, block: &IntMatrix) {
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            if !block[(i, j)].is_zero() {
                dst[(row0 + i, col0 + j)] = block[(i, j)].clone();
            }
        }
    }
}

/// Kronecker product, row `i_a * b.rows() + i_b`, matching first-factor-major
/// tensor bases.
pub fn kron(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    IntMatrix::from_fn(a.rows() * b.rows(), a.cols() * b.cols(), |i, j| {
        let (ia, ib) = (i / b.rows(), i % b.rows());
        let (ja, jb) = (j / b.cols(), j % b.cols());
        &a[(ia, ja)] * &b[(ib, jb)]
    })
}

/// Truncation window for [`Complex::truncate_brutal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncate {
    AtMost(i64),
    AtLeast(i64),
}

/// A chain map of cochain complexes: `f(n+1) ∘ d = d ∘ f(n)` in all degrees.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComplexMap {
    source: Complex,
    target: Complex,
    comps: BTreeMap<i64, IntMatrix>,
}

impl ComplexMap {
    pub fn new(source: Complex, target: Complex, comps: BTreeMap<i64, IntMatrix>) -> Result<Self> {
        // shape coherence; only degrees where both ranks are nonzero matter
        for (&n, m) in &comps {
            if m.rows() != target.rank(n) || m.cols() != source.rank(n) {
                return Err(HomalgError::Shape(format!(
                    "component at degree {} is {}x{}, expected {}x{}",
                    n,
                    m.rows(),
                    m.cols(),
                    target.rank(n),
                    source.rank(n)
                )));
            }
        }
        let map = ComplexMap {
            source,
            target,
            comps,
        };
        map.check_chain_condition()?;
        Ok(map)
    }

    fn check_chain_condition(&self) -> Result<()> {
        let degrees: Vec<i64> = self.source.degrees().collect();
        for n in degrees {
            let lhs = self.comp(n + 1).mul(&self.source.d(n))?;
            let rhs = self.target.d(n).mul(&self.comp(n))?;
            if lhs != rhs {
                return Err(HomalgError::NotAChainMap { degree: n });
            }
        }
        Ok(())
    }

    pub fn zero(source: Complex, target: Complex) -> Self {
        ComplexMap {
            source,
            target,
            comps: BTreeMap::new(),
        }
    }

    pub fn identity(c: &Complex) -> Self {
        let comps = c
            .degrees()
            .map(|n| (n, IntMatrix::identity(c.rank(n))))
            .collect();
        ComplexMap {
            source: c.clone(),
            target: c.clone(),
            comps,
        }
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn comp(&self, n: i64) -> IntMatrix {
        self.comps
            .get(&n)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.target.rank(n), self.source.rank(n)))
    }

    pub fn components(&self) -> &BTreeMap<i64, IntMatrix> {
        &self.comps
    }

    pub fn compose(&self, inner: &ComplexMap) -> Result<ComplexMap> {
        if inner.target != self.source {
            return Err(HomalgError::Shape("composing non-matching chain maps".into()));
        }
        let mut comps = BTreeMap::new();
        for n in inner.source.degrees() {
            let m = self.comp(n).mul(&inner.comp(n))?;
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
        ComplexMap::new(inner.source.clone(), self.target.clone(), comps)
    }

    /// Map induced on cohomology, one presented homomorphism per degree.
    pub fn induced_map(&self) -> Result<BTreeMap<i64, PresentedHom>> {
        let src_pres = self.source.homology_presentations();
        let tgt_pres = self.target.homology_presentations();
        let mut out = BTreeMap::new();
        let degrees: Vec<i64> = self
            .source
            .degrees()
            .chain(self.target.degrees())
            .collect();
        for n in degrees {
            if out.contains_key(&n) {
                continue;
            }
            let sp = src_pres.get(&n);
            let tp = tgt_pres.get(&n);
            let (sg, tg) = (
                sp.map_or(FgAbGroup::trivial(), |p| p.group().clone()),
                tp.map_or(FgAbGroup::trivial(), |p| p.group().clone()),
            );
            let mat = match (sp, tp) {
                (Some(sp), Some(tp)) => sp.induced_hom(&self.comp(n), tp)?,
                _ => IntMatrix::zeros(tg.num_generators(), sg.num_generators()),
            };
            out.insert(n, PresentedHom::new(sg, tg, mat)?);
        }
        Ok(out)
    }
}

/// Mapping cone: `cone(f)^n = X^{n+1} ⊕ Y^n`, `d(c, x) = (-dc, f(c) + dx)`.
pub fn cone(f: &ComplexMap) -> Complex {
    let x = f.source();
    let y = f.target();
    if x.is_zero() && y.is_zero() {
        return Complex::zero();
    }
    let lo = match (x.support(), y.support()) {
        (Some((xlo, _)), Some((ylo, _))) => (xlo - 1).min(ylo),
        (Some((xlo, _)), None) => xlo - 1,
        (None, Some((ylo, _))) => ylo,
        (None, None) => unreachable!(),
    };
    let hi = match (x.support(), y.support()) {
        (Some((_, xhi)), Some((_, yhi))) => (xhi - 1).max(yhi),
        (Some((_, xhi)), None) => xhi - 1,
        (None, Some((_, yhi))) => yhi,
        (None, None) => unreachable!(),
    };
    let ranks: Vec<usize> = (lo..=hi).map(|n| x.rank(n + 1) + y.rank(n)).collect();
    let diffs: Vec<IntMatrix> = (lo..hi)
        .map(|n| {
            let (rx, ry) = (x.rank(n + 2), y.rank(n + 1));
            let (cx, cy) = (x.rank(n + 1), y.rank(n));
            let mut d = IntMatrix::zeros(rx + ry, cx + cy);
            write_block(&mut d, 0, 0, &x.d(n + 1).neg());
            write_block(&mut d, rx, 0, &f.comp(n + 1));
            write_block(&mut d, rx, cx, &y.d(n));
            d
        })
        .collect();
    Complex::normalized(lo, ranks, diffs)
}

/// Fiber, defined as `cone(f)[-1]`.
pub fn fib(f: &ComplexMap) -> Complex {
    cone(f).shift(-1)
}

/// Strictly commuting cube of complexes. Vertices are indexed by bitmasks in
/// `0..2^dim`; the edge in direction `k` leaves a vertex whose bit `k` is 0.
#[derive(Clone, Debug)]
pub struct Cube {
    dim: usize,
    vertices: Vec<Complex>,
    /// Edge maps keyed by (source mask, direction); missing entries are zero.
    edges: BTreeMap<(usize, usize), ComplexMap>,
}

impl Cube {
    pub fn new(
        dim: usize,
        vertices: Vec<Complex>,
        edges: BTreeMap<(usize, usize), ComplexMap>,
    ) -> Result<Self> {
        if vertices.len() != 1 << dim {
            return Err(HomalgError::Shape(format!(
                "a {}-cube needs {} vertices, got {}",
                dim,
                1 << dim,
                vertices.len()
            )));
        }
        for (&(mask, k), f) in &edges {
            if k >= dim || mask & (1 << k) != 0 || mask >= (1 << dim) {
                return Err(HomalgError::Shape(format!(
                    "edge ({mask:#b}, {k}) is not a cube edge"
                )));
            }
            if f.source() != &vertices[mask] || f.target() != &vertices[mask | (1 << k)] {
                return Err(HomalgError::Validation(format!(
                    "edge ({mask:#b}, {k}) does not match its endpoint complexes"
                )));
            }
        }
        let cube = Cube {
            dim,
            vertices,
            edges,
        };
        cube.check_squares()?;
        Ok(cube)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex(&self, mask: usize) -> &Complex {
        &self.vertices[mask]
    }

    pub fn edge(&self, mask: usize, k: usize) -> ComplexMap {
        self.edges.get(&(mask, k)).cloned().unwrap_or_else(|| {
            ComplexMap::zero(
                self.vertices[mask].clone(),
                self.vertices[mask | (1 << k)].clone(),
            )
        })
    }

    /// Every square face must commute strictly: this is a matrix identity per
    /// degree, not a homotopy.
    fn check_squares(&self) -> Result<()> {
        for mask in 0..(1usize << self.dim) {
            for k in 0..self.dim {
                if mask & (1 << k) != 0 {
                    continue;
                }
                for l in k + 1..self.dim {
                    if mask & (1 << l) != 0 {
                        continue;
                    }
                    let p1 = self.edge(mask | (1 << k), l).compose(&self.edge(mask, k))?;
                    let p2 = self.edge(mask | (1 << l), k).compose(&self.edge(mask, l))?;
                    for n in self.vertices[mask].degrees() {
                        if p1.comp(n) != p2.comp(n) {
                            return Err(HomalgError::Validation(format!(
                                "face at vertex {mask:#b}, directions {k},{l} does not commute"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Total cofiber as a total complex. Vertex `v` contributes shifted by
    /// the number of its zero bits `z(v)`; the differential of `x ∈ F(v)` is
    /// `(-1)^{z(v)} dx + Σ_k (-1)^{z_{>k}(v)} f_k(x)`, the sign convention
    /// obtained by iterating mapping cones direction by direction (so a
    /// 1-cube gives the cone on the nose).
    pub fn total_cofiber(&self) -> Result<Complex> {
        let masks: Vec<usize> = (0..(1usize << self.dim)).collect();
        let zeros = |mask: usize| self.dim - (mask.count_ones() as usize);
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for &m in &masks {
            if let Some((vlo, vhi)) = self.vertices[m].support() {
                lo = lo.min(vlo - zeros(m) as i64);
                hi = hi.max(vhi - zeros(m) as i64);
            }
        }
        if lo > hi {
            return Ok(Complex::zero());
        }
        // degree-n block layout: vertex masks ascending
        let block = |n: i64| -> Vec<(usize, usize)> {
            masks
                .iter()
                .map(|&m| (m, self.vertices[m].rank(n + zeros(m) as i64)))
                .filter(|&(_, r)| r > 0)
                .collect()
        };
        let ranks: Vec<usize> = (lo..=hi)
            .map(|n| block(n).iter().map(|&(_, r)| r).sum())
            .collect();
        let mut diffs = Vec::new();
        for n in lo..hi {
            let src = block(n);
            let dst = block(n + 1);
            let src_off = offsets(&src);
            let dst_off = offsets(&dst);
            let rows = dst.iter().map(|&(_, r)| r).sum();
            let cols = src.iter().map(|&(_, r)| r).sum();
            let mut d = IntMatrix::zeros(rows, cols);
            for (bi, &(mask, _)) in src.iter().enumerate() {
                let z = zeros(mask);
                let m_int = self.vertices[mask].d(n + z as i64);
                let m_int = if z % 2 == 1 { m_int.neg() } else { m_int };
                if let Some(di) = dst.iter().position(|&(m2, _)| m2 == mask) {
                    write_block(&mut d, dst_off[di], src_off[bi], &m_int);
                }
                for k in 0..self.dim {
                    if mask & (1 << k) != 0 {
                        continue;
                    }
                    let tmask = mask | (1 << k);
                    let Some(di) = dst.iter().position(|&(m2, _)| m2 == tmask) else {
                        continue;
                    };
                    // zeros of `mask` strictly above position k
                    let zabove = (k + 1..self.dim).filter(|&l| mask & (1 << l) == 0).count();
                    let mut m_edge = self.edge(mask, k).comp(n + z as i64);
                    if zabove % 2 == 1 {
                        m_edge = m_edge.neg();
                    }
                    write_block(&mut d, dst_off[di], src_off[bi], &m_edge);
                }
            }
            diffs.push(d);
        }
        Complex::new(lo, ranks, diffs)
    }
}

fn offsets(blocks: &[(usize, usize)]) -> Vec<usize> {
    let mut off = Vec::with_capacity(blocks.len());
    let mut acc = 0;
    for &(_, r) in blocks {
        off.push(acc);
        acc += r;
    }
    off
}

/// The cube with a composable chain `C(a) -> C(a-1) -> ... -> C(0)` on its
/// spine and zero objects elsewhere. Adjacent composites must vanish for the
/// square faces to commute strictly.
pub fn spine_cube(chain: &[ComplexMap]) -> Result<Cube> {
    let a = chain.len();
    for i in 0..a.saturating_sub(1) {
        if chain[i].target() != chain[i + 1].source() {
            return Err(HomalgError::Shape(
                "chain maps do not compose head to tail".into(),
            ));
        }
    }
    // chain[i]: C(a - i) -> C(a - i - 1); complexes C(a) ... C(0)
    let complexes: Vec<Complex> = {
        let mut v = vec![chain[0].source().clone()];
        for f in chain {
            v.push(f.target().clone());
        }
        v // v[b] = C(a - b)
    };
    let mut vertices = vec![Complex::zero(); 1 << a];
    let mut edges = BTreeMap::new();
    for b in 0..=a {
        let mask = (1usize << b) - 1; // b low bits set
        vertices[mask] = complexes[b].clone();
        if b < a {
            edges.insert((mask, b), chain[b].clone());
        }
    }
    Cube::new(a, vertices, edges)
}

/// Iterated cofiber of a composable chain with vanishing adjacent composites:
/// `cofib(... cofib(cofib(C(a) -> C(a-1)) -> C(a-2)) ... -> C(0))`.
pub fn iterated_cofiber(chain: &[ComplexMap]) -> Result<Complex> {
    assert!(!chain.is_empty(), "iterated cofiber needs at least one map");
    let mut acc = cone(&chain[0]);
    // projection of the accumulated cone onto its most recent target block
    let mut proj: BTreeMap<i64, IntMatrix> = chain[0]
        .target()
        .degrees()
        .map(|n| {
            let cols = acc.rank(n);
            let tgt = chain[0].target().rank(n);
            let mut p = IntMatrix::zeros(tgt, cols);
            for i in 0..tgt {
                p[(i, cols - tgt + i)] = BigInt::from(1);
            }
            (n, p)
        })
        .collect();
    for f in &chain[1..] {
        let next = f.target().clone();
        let mut comps = BTreeMap::new();
        for n in acc.degrees() {
            let p = proj
                .get(&n)
                .cloned()
                .unwrap_or_else(|| IntMatrix::zeros(f.source().rank(n), acc.rank(n)));
            let m = f.comp(n).mul(&p)?;
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
        let step = ComplexMap::new(acc.clone(), next.clone(), comps)?;
        let new_acc = cone(&step);
        proj = next
            .degrees()
            .map(|n| {
                let cols = new_acc.rank(n);
                let tgt = next.rank(n);
                let mut p = IntMatrix::zeros(tgt, cols);
                for i in 0..tgt {
                    p[(i, cols - tgt + i)] = BigInt::from(1);
                }
                (n, p)
            })
            .collect();
        acc = new_acc;
    }
    Ok(acc)
}

/// Graded abelian group with finite support; trivial degrees are not stored,
/// so equality is degreewise isomorphism.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct GradedGroup {
    groups: BTreeMap<i64, FgAbGroup>,
}

impl GradedGroup {
    pub fn from_map(mut groups: BTreeMap<i64, FgAbGroup>) -> Self {
        groups.retain(|_, g| !g.is_trivial());
        GradedGroup { groups }
    }

    pub fn get(&self, n: i64) -> FgAbGroup {
        self.groups.get(&n).cloned().unwrap_or_else(FgAbGroup::trivial)
    }

    pub fn is_trivial(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &FgAbGroup)> {
        self.groups.iter()
    }

    pub fn support(&self) -> Vec<i64> {
        self.groups.keys().copied().collect()
    }

    /// Equality after shifting `self` by `k`: `self[m + k] == other[m]`.
    pub fn eq_shifted(&self, other: &GradedGroup, k: i64) -> bool {
        let shifted: BTreeMap<i64, FgAbGroup> = self
            .groups
            .iter()
            .map(|(&n, g)| (n - k, g.clone()))
            .collect();
        shifted == other.groups
    }
}

impl fmt::Display for GradedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.groups.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .groups
            .iter()
            .map(|(n, g)| format!("H^{n} = {g}"))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}
