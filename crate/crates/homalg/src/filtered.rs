//! Filtered complexes, strict double complexes, and the dictionary between
//! them: the total complex with its column filtration on one side, graded
//! pieces on the other. Also Day convolution of filtrations, completion of
//! general (non-monomorphic) filtered towers, and the homotopy-object rows
//! of the filtration's first page.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::complexes::{cone, Complex, ComplexMap, GradedGroup};
use crate::error::{HomalgError, Result};
use crate::exactlin::{solve_exact, FgAbGroup, IntMatrix, QuotPres, Subgroup};

/// A complex together with a bounded decreasing filtration by subcomplexes:
/// per degree, a chain of subgroups that is decreasing in the filtration
/// index, stable under the differential, exhaustive at the bottom index and
/// implicitly zero above the top one. Bounded filtrations are automatically
/// complete.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    ambient: Complex,
    p_min: i64,
    /// levels[k][j] = F^{p_min + k} in ambient degree lo + j.
    levels: Vec<Vec<Subgroup>>,
}

impl FilteredComplex {
    pub fn new(ambient: Complex, p_min: i64, levels: Vec<Vec<Subgroup>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(HomalgError::Validation(
                "a filtration needs at least its exhaustive bottom level".into(),
            ));
        }
        let degrees: Vec<i64> = ambient.degrees().collect();
        for (k, level) in levels.iter().enumerate() {
            if level.len() != degrees.len() {
                return Err(HomalgError::Shape(format!(
                    "level {} stores {} degrees, ambient has {}",
                    p_min + k as i64,
                    level.len(),
                    degrees.len()
                )));
            }
            for (j, &n) in degrees.iter().enumerate() {
                if level[j].ambient_rank() != ambient.rank(n) {
                    return Err(HomalgError::Shape(format!(
                        "level {} degree {} lives in Z^{}, ambient rank is {}",
                        p_min + k as i64,
                        n,
                        level[j].ambient_rank(),
                        ambient.rank(n)
                    )));
                }
            }
        }
        let f = FilteredComplex {
            ambient,
            p_min,
            levels,
        };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        let degrees: Vec<i64> = self.ambient.degrees().collect();
        // exhaustive bottom
        for (j, &n) in degrees.iter().enumerate() {
            if !self.levels[0][j].is_full() {
                return Err(HomalgError::Validation(format!(
                    "filtration is not exhaustive at degree {n}"
                )));
            }
        }
        // decreasing and d-stable
        for k in 0..self.levels.len() {
            for (j, &n) in degrees.iter().enumerate() {
                if k + 1 < self.levels.len()
                    && !self.levels[k][j].contains(&self.levels[k + 1][j])
                {
                    return Err(HomalgError::Validation(format!(
                        "filtration is not decreasing at level {}, degree {}",
                        self.p_min + k as i64 + 1,
                        n
                    )));
                }
                let image = self.levels[k][j].map_forward(&self.ambient.d(n))?;
                if !self.level(self.p_min + k as i64, n + 1).contains(&image) {
                    return Err(HomalgError::Validation(format!(
                        "filtration is not d-stable at level {}, degree {}",
                        self.p_min + k as i64,
                        n
                    )));
                }
            }
        }
        Ok(())
    }

    /// The trivial one-jump filtration: everything at `jump`, zero above.
    pub fn one_jump(ambient: Complex, jump: i64) -> Self {
        let levels = vec![ambient
            .degrees()
            .map(|n| Subgroup::full(ambient.rank(n)))
            .collect()];
        FilteredComplex {
            ambient,
            p_min: jump,
            levels,
        }
    }

    pub fn ambient(&self) -> &Complex {
        &self.ambient
    }

    pub fn p_min(&self) -> i64 {
        self.p_min
    }

    pub fn p_max(&self) -> i64 {
        self.p_min + self.levels.len() as i64 - 1
    }

    pub fn filtration_length(&self) -> i64 {
        self.levels.len() as i64
    }

    /// Level subgroup with boundary conventions: full below `p_min`, zero
    /// above `p_max`, and trivial in degrees where the ambient vanishes.
    pub fn level(&self, p: i64, n: i64) -> Subgroup {
        let rank = self.ambient.rank(n);
        if rank == 0 {
            return Subgroup::zero(0);
        }
        if p <= self.p_min {
            return Subgroup::full(rank);
        }
        let k = (p - self.p_min) as usize;
        if k >= self.levels.len() {
            return Subgroup::zero(rank);
        }
        let Some((lo, _)) = self.ambient.support() else {
            return Subgroup::zero(rank);
        };
        self.levels[k][(n - lo) as usize].clone()
    }

    /// Relative cycles `F^p ∩ d^{-1} F^{p+r}` in ambient degree `n`.
    pub fn relative_cycles(&self, p: i64, r: i64, n: i64) -> Result<Subgroup> {
        let base = self.level(p, n);
        if r <= 0 || base.is_zero() {
            return Ok(base);
        }
        let target = self.level(p + r, n + 1);
        let pre = target.preimage(&self.ambient.d(n))?;
        base.intersect(&pre)
    }
}

/// A strict chain-level double complex: columns with horizontal chain maps
/// composing to zero on the nose.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    i_min: i64,
    columns: Vec<Complex>,
    /// horizontal[k] : columns[k] -> columns[k+1]
    horizontal: Vec<ComplexMap>,
}

impl DoubleComplex {
    pub fn new(i_min: i64, columns: Vec<Complex>, horizontal: Vec<ComplexMap>) -> Result<Self> {
        if columns.is_empty() {
            return Err(HomalgError::Validation("double complex needs a column".into()));
        }
        if horizontal.len() + 1 != columns.len() {
            return Err(HomalgError::Shape(format!(
                "{} columns need {} horizontal maps, got {}",
                columns.len(),
                columns.len() - 1,
                horizontal.len()
            )));
        }
        for (k, h) in horizontal.iter().enumerate() {
            if h.source() != &columns[k] || h.target() != &columns[k + 1] {
                return Err(HomalgError::Validation(format!(
                    "horizontal map {k} does not connect its columns"
                )));
            }
        }
        for k in 0..horizontal.len().saturating_sub(1) {
            let composite = horizontal[k + 1].compose(&horizontal[k])?;
            for n in columns[k].degrees() {
                if !composite.comp(n).is_zero() {
                    return Err(HomalgError::Validation(format!(
                        "horizontal composite at column {k} is nonzero in degree {n}"
                    )));
                }
            }
        }
        Ok(DoubleComplex {
            i_min,
            columns,
            horizontal,
        })
    }

    pub fn single_column(i: i64, c: Complex) -> Self {
        DoubleComplex {
            i_min: i,
            columns: vec![c],
            horizontal: vec![],
        }
    }

    /// A row of abelian groups `A^0 -> A^1 -> ...`: each column is a free
    /// group in internal degree 0 and the horizontal maps are the
    /// differentials of an ordinary cochain complex.
    pub fn degenerate_row(row: &Complex) -> Result<Self> {
        let Some((lo, hi)) = row.support() else {
            return DoubleComplex::new(0, vec![Complex::zero()], vec![]);
        };
        let columns: Vec<Complex> = (lo..=hi)
            .map(|n| Complex::concentrated(0, row.rank(n)))
            .collect();
        let horizontal: Vec<ComplexMap> = (lo..hi)
            .map(|n| {
                let m = row.d(n);
                let comps = if m.is_zero() {
                    BTreeMap::new()
                } else {
                    BTreeMap::from([(0, m)])
                };
                ComplexMap::new(
                    columns[(n - lo) as usize].clone(),
                    columns[(n - lo + 1) as usize].clone(),
                    comps,
                )
            })
            .collect::<Result<_>>()?;
        DoubleComplex::new(lo, columns, horizontal)
    }

    pub fn i_min(&self) -> i64 {
        self.i_min
    }

    pub fn i_max(&self) -> i64 {
        self.i_min + self.columns.len() as i64 - 1
    }

    pub fn column(&self, i: i64) -> &Complex {
        &self.columns[(i - self.i_min) as usize]
    }

    pub fn horizontal(&self, i: i64) -> Option<&ComplexMap> {
        if i < self.i_min {
            return None;
        }
        self.horizontal.get((i - self.i_min) as usize)
    }

    pub fn columns(&self) -> &[Complex] {
        &self.columns
    }
}

/// Coordinate offset of one column's block inside the total complex at a
/// given total degree (blocks ordered by ascending column index, rank-zero
/// blocks skipped).
pub fn tot_block_offset(d: &DoubleComplex, n: i64, col: i64) -> Option<usize> {
    tot_blocks(d, n)
        .into_iter()
        .find(|&(i, _, _)| i == col)
        .map(|(_, off, _)| off)
}

/// Block layout of the total complex in one total degree: ascending column
/// index, skipping rank-zero contributions.
fn tot_blocks(d: &DoubleComplex, n: i64) -> Vec<(i64, usize, usize)> {
    let mut out = vec![];
    let mut off = 0;
    for i in d.i_min()..=d.i_max() {
        let r = d.column(i).rank(n - i);
        if r > 0 {
            out.push((i, off, r));
            off += r;
        }
    }
    out
}

/// Pile a double complex up into its total complex with the column
/// filtration. Total degree `n` collects `column(i)` in internal degree
/// `n - i`; the differential of `x` in column `i` is `(-1)^i d_v(x) + h(x)`,
/// and level `p` spans the coordinates of all columns `i ≥ p`.
pub fn piling(d: &DoubleComplex) -> Result<FilteredComplex> {
    let lo_hi: Option<(i64, i64)> = {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for i in d.i_min()..=d.i_max() {
            if let Some((clo, chi)) = d.column(i).support() {
                lo = lo.min(clo + i);
                hi = hi.max(chi + i);
            }
        }
        (lo <= hi).then_some((lo, hi))
    };
    let Some((lo, hi)) = lo_hi else {
        return FilteredComplex::new(Complex::zero(), d.i_min(), vec![vec![]]);
    };

    let ranks: Vec<usize> = (lo..=hi)
        .map(|n| tot_blocks(d, n).iter().map(|&(_, _, r)| r).sum())
        .collect();
    let mut diffs = Vec::new();
    for n in lo..hi {
        let src = tot_blocks(d, n);
        let dst = tot_blocks(d, n + 1);
        let rows = dst.iter().map(|&(_, _, r)| r).sum();
        let cols = src.iter().map(|&(_, _, r)| r).sum();
        let mut m = IntMatrix::zeros(rows, cols);
        for &(i, soff, srank) in &src {
            // vertical part, signed by the column index
            if let Some(&(_, doff, _)) = dst.iter().find(|&&(j, _, _)| j == i) {
                let dv = d.column(i).d(n - i);
                let dv = if i.rem_euclid(2) == 1 { dv.neg() } else { dv };
                for a in 0..dv.rows() {
                    for b in 0..srank {
                        if !dv[(a, b)].is_zero() {
                            m[(doff + a, soff + b)] = dv[(a, b)].clone();
                        }
                    }
                }
            }
            // horizontal part, unsigned
            if let Some(h) = d.horizontal(i) {
                if let Some(&(_, doff, _)) = dst.iter().find(|&&(j, _, _)| j == i + 1) {
                    let hm = h.comp(n - i);
                    for a in 0..hm.rows() {
                        for b in 0..srank {
                            if !hm[(a, b)].is_zero() {
                                m[(doff + a, soff + b)] = hm[(a, b)].clone();
                            }
                        }
                    }
                }
            }
        }
        diffs.push(m);
    }
    let ambient = Complex::new(lo, ranks, diffs)?;

    // Column filtration: level p spans the blocks with column index >= p.
    let mut levels = Vec::new();
    for p in d.i_min()..=d.i_max() {
        let mut per_degree = Vec::new();
        for n in ambient.degrees() {
            let blocks = tot_blocks(d, n);
            let total: usize = blocks.iter().map(|&(_, _, r)| r).sum();
            let picked: Vec<usize> = blocks
                .iter()
                .filter(|&&(i, _, _)| i >= p)
                .flat_map(|&(_, off, r)| off..off + r)
                .collect();
            let mut basis = IntMatrix::zeros(total, picked.len());
            for (j, &coord) in picked.iter().enumerate() {
                basis[(coord, j)] = BigInt::one();
            }
            per_degree.push(Subgroup::from_generators(total, &basis)?);
        }
        levels.push(per_degree);
    }
    FilteredComplex::new(ambient, d.i_min(), levels)
}

/// Homology of the total complex.
pub fn total_homology(d: &DoubleComplex) -> Result<GradedGroup> {
    Ok(piling(d)?.ambient().homology())
}

/// A graded piece or intermediate subquotient `F^p / F^q`, presented as a
/// complex of free modules together with the transforms needed to move
/// between ambient relative cycles and presented coordinates.
#[derive(Clone, Debug)]
pub struct SubquotientPresentation {
    complex: Complex,
    /// per ambient degree: numerator basis, relation matrix (denominator in
    /// numerator coordinates), exact differential lift on numerator
    /// coordinates, and how presented generators embed in numerator coords.
    data: BTreeMap<i64, DegreeData>,
    /// true when every degree is a plain complement of coordinates
    complement_form: bool,
}

#[derive(Clone, Debug)]
struct DegreeData {
    num_basis: IntMatrix,
    rho: IntMatrix,
    lift_g: IntMatrix,
    /// kept numerator coordinates in complement form (empty in cone form)
    kept: Vec<usize>,
}

impl SubquotientPresentation {
    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    /// Ambient representative of a presented degree-`n` vector. Only the
    /// numerator-generator block contributes; resolution coordinates map to
    /// denominator elements and are dropped.
    pub fn lift(&self, n: i64, w: &[BigInt]) -> Result<Vec<BigInt>> {
        let Some(dd) = self.data.get(&n) else {
            return Err(HomalgError::Shape(format!("no data at degree {n}")));
        };
        if w.len() != self.complex.rank(n) {
            return Err(HomalgError::Shape("presented vector has wrong length".into()));
        }
        let gens = if self.complement_form {
            dd.kept.len()
        } else {
            dd.num_basis.cols()
        };
        let mut x = vec![BigInt::zero(); dd.num_basis.cols()];
        for (j, wj) in w.iter().enumerate().take(gens) {
            let idx = if self.complement_form { dd.kept[j] } else { j };
            x[idx] = wj.clone();
        }
        dd.num_basis.mul_vec(&x)
    }

    /// Presented cycle representing the class of an ambient relative cycle
    /// `v ∈ F^p(n)` with `dv ∈ F^q(n+1)`.
    pub fn reduce_relative_cycle(&self, n: i64, v: &[BigInt]) -> Result<Vec<BigInt>> {
        let Some(dd) = self.data.get(&n) else {
            return Err(HomalgError::Shape(format!("no data at degree {n}")));
        };
        let x = solve_exact(&dd.num_basis, v)
            .ok_or_else(|| HomalgError::Containment("vector is not in F^p".into()))?;
        if self.complement_form {
            let mut w = Vec::with_capacity(dd.kept.len());
            for &idx in &dd.kept {
                w.push(x[idx].clone());
            }
            return Ok(w);
        }
        // cone form: complete x to a cycle (x, y) with rho_{n+1} y = -g x
        let gx = dd.lift_g.mul_vec(&x)?;
        let y = if let Some(next) = self.data.get(&(n + 1)) {
            if next.rho.cols() > 0 {
                let neg: Vec<BigInt> = gx.iter().map(|a| -a.clone()).collect();
                solve_exact(&next.rho, &neg).ok_or_else(|| {
                    HomalgError::Containment("vector is not a relative cycle".into())
                })?
            } else {
                if gx.iter().any(|a| !a.is_zero()) {
                    return Err(HomalgError::Containment(
                        "vector is not a relative cycle".into(),
                    ));
                }
                vec![]
            }
        } else {
            vec![]
        };
        let mut w = x;
        w.extend(y);
        debug_assert_eq!(w.len(), self.complex.rank(n));
        Ok(w)
    }
}

/// Presentation of `F^p / F^q` (`p ≤ q`) as a complex of free modules.
///
/// When every degreewise quotient is visibly free — the denominator basis is
/// a signed subset of the numerator basis — the presentation keeps exactly
/// the complementary numerator generators with the induced differential; the
/// column filtration of a total complex always lands in this case, making
/// the round trip with `piling` structural. Otherwise a two-term resolution
/// is folded in as a mapping cone, with torsion-correcting generators one
/// degree down.
pub fn subquotient(f: &FilteredComplex, p: i64, q: i64) -> Result<SubquotientPresentation> {
    if p > q {
        return Err(HomalgError::Order(p, q));
    }
    let degrees: Vec<i64> = f.ambient().degrees().collect();
    if p == q || degrees.is_empty() {
        return Ok(SubquotientPresentation {
            complex: Complex::zero(),
            data: BTreeMap::new(),
            complement_form: true,
        });
    }

    struct Raw {
        a: IntMatrix,
        rho: IntMatrix,
        g: IntMatrix,
        r: IntMatrix,
    }
    let mut raw: BTreeMap<i64, Raw> = BTreeMap::new();
    for &n in &degrees {
        let num = f.level(p, n);
        let den = f.level(q, n);
        let a = num.basis().clone();
        let b = den.basis().clone();
        let mut rho = IntMatrix::zeros(a.cols(), b.cols());
        for j in 0..b.cols() {
            let y = solve_exact(&a, &b.column(j)).ok_or_else(|| {
                HomalgError::Containment("filtration levels are not nested".into())
            })?;
            rho.set_column(j, &y);
        }
        // exact differential lifts on numerator and denominator bases
        let a_next = f.level(p, n + 1);
        let b_next = f.level(q, n + 1);
        let d = f.ambient().d(n);
        let mut g = IntMatrix::zeros(a_next.basis().cols(), a.cols());
        for j in 0..a.cols() {
            let img = d.mul_vec(&a.column(j))?;
            let x = solve_exact(a_next.basis(), &img)
                .ok_or_else(|| HomalgError::Validation("filtration is not d-stable".into()))?;
            g.set_column(j, &x);
        }
        let mut r = IntMatrix::zeros(b_next.basis().cols(), b.cols());
        for j in 0..b.cols() {
            let img = d.mul_vec(&b.column(j))?;
            let x = solve_exact(b_next.basis(), &img)
                .ok_or_else(|| HomalgError::Validation("filtration is not d-stable".into()))?;
            r.set_column(j, &x);
        }
        raw.insert(n, Raw { a, rho, g, r });
    }

    // complement form applies when every rho is a signed selection matrix
    // with distinct pivot rows
    let selection_rows = |rho: &IntMatrix| -> Option<Vec<usize>> {
        let mut rows = Vec::with_capacity(rho.cols());
        for j in 0..rho.cols() {
            let mut pivot = None;
            for i in 0..rho.rows() {
                if rho[(i, j)].is_zero() {
                    continue;
                }
                if pivot.is_some() || !rho[(i, j)].abs().is_one() {
                    return None;
                }
                pivot = Some(i);
            }
            let pr = pivot?;
            if rows.contains(&pr) {
                return None;
            }
            rows.push(pr);
        }
        Some(rows)
    };
    let complement_form = raw.values().all(|rw| selection_rows(&rw.rho).is_some());

    let mut data = BTreeMap::new();
    let mut ranks = Vec::new();
    let mut diffs = Vec::new();
    if complement_form {
        let kept: BTreeMap<i64, Vec<usize>> = raw
            .iter()
            .map(|(&n, rw)| {
                let pivots = selection_rows(&rw.rho).unwrap();
                let kept: Vec<usize> =
                    (0..rw.a.cols()).filter(|i| !pivots.contains(i)).collect();
                (n, kept)
            })
            .collect();
        for &n in &degrees {
            ranks.push(kept[&n].len());
        }
        for w in degrees.windows(2) {
            let (n, m) = (w[0], w[1]);
            debug_assert_eq!(m, n + 1);
            let g = &raw[&n].g;
            let d = IntMatrix::from_fn(kept[&m].len(), kept[&n].len(), |i, j| {
                g[(kept[&m][i], kept[&n][j])].clone()
            });
            diffs.push(d);
        }
        for &n in &degrees {
            let rw = raw.get(&n).unwrap();
            data.insert(
                n,
                DegreeData {
                    num_basis: rw.a.clone(),
                    rho: rw.rho.clone(),
                    lift_g: rw.g.clone(),
                    kept: kept[&n].clone(),
                },
            );
        }
    } else {
        // cone of the relation complex into the generator complex:
        // degree n carries the numerator generators plus the relation
        // generators of degree n + 1, with d(x, y) = (g x + rho y, -r y);
        // the bottom relations land one degree below the ambient support
        raw.insert(
            degrees[0] - 1,
            Raw {
                a: IntMatrix::zeros(0, 0),
                rho: IntMatrix::zeros(0, 0),
                g: IntMatrix::zeros(raw[&degrees[0]].a.cols(), 0),
                r: IntMatrix::zeros(raw[&degrees[0]].rho.cols(), 0),
            },
        );
        let degrees_ext: Vec<i64> = (degrees[0] - 1..=degrees[degrees.len() - 1]).collect();
        let gens = |n: i64| raw.get(&n).map_or(0, |rw| rw.a.cols());
        let rels = |n: i64| raw.get(&n).map_or(0, |rw| rw.rho.cols());
        for &n in &degrees_ext {
            ranks.push(gens(n) + rels(n + 1));
        }
        for w in degrees_ext.windows(2) {
            let (n, m) = (w[0], w[1]);
            let (gn, rn) = (gens(n), rels(m));
            let (gm, rm) = (gens(m), rels(m + 1));
            let mut d = IntMatrix::zeros(gm + rm, gn + rn);
            let g = &raw[&n].g;
            for i in 0..gm {
                for j in 0..gn {
                    d[(i, j)] = g[(i, j)].clone();
                }
            }
            let rho = &raw[&m].rho;
            for i in 0..gm {
                for j in 0..rn {
                    d[(i, gn + j)] = rho[(i, j)].clone();
                }
            }
            if rm > 0 && rn > 0 {
                let r = &raw[&m].r;
                for i in 0..rm {
                    for j in 0..rn {
                        d[(gm + i, gn + j)] = -r[(i, j)].clone();
                    }
                }
            }
            diffs.push(d);
        }
        for &n in &degrees_ext {
            let rw = raw.get(&n).unwrap();
            data.insert(
                n,
                DegreeData {
                    num_basis: rw.a.clone(),
                    rho: rw.rho.clone(),
                    lift_g: rw.g.clone(),
                    kept: vec![],
                },
            );
        }
    }
    let lo = if complement_form {
        degrees[0]
    } else {
        degrees[0] - 1
    };
    // keep the un-normalized frame in `data`; the complex itself trims zeros
    let complex = Complex::new(lo, ranks, diffs)?;
    Ok(SubquotientPresentation {
        complex,
        data,
        complement_form,
    })
}

/// The graded piece `gr^p F = F^p / F^{p+1}` as a presented complex.
pub fn graded_piece(f: &FilteredComplex, p: i64) -> Result<SubquotientPresentation> {
    subquotient(f, p, p + 1)
}

/// Day convolution of two filtered complexes: the ambient tensor product
/// with level `p` generated degreewise by all `F^s ⊗ G^t`, `s + t = p`.
pub fn day_convolution(f: &FilteredComplex, g: &FilteredComplex) -> Result<FilteredComplex> {
    let ambient = f.ambient().tensor(g.ambient());
    let p_min = f.p_min() + g.p_min();
    let p_max = f.p_max() + g.p_max();
    let (Some((alo, ahi)), Some((blo, bhi))) = (f.ambient().support(), g.ambient().support())
    else {
        return FilteredComplex::new(ambient, p_min, vec![vec![]]);
    };
    let mut levels = Vec::new();
    for p in p_min..=p_max {
        let mut per_degree = Vec::new();
        for n in ambient.degrees() {
            let rank = ambient.rank(n);
            let mut gens = IntMatrix::zeros(rank, 0);
            for s in f.p_min()..=f.p_max() {
                let t = p - s;
                // block structure of the tensor degree n: (a-degree s', b-degree t')
                for adeg in alo..=ahi {
                    let bdeg = n - adeg;
                    if bdeg < blo || bdeg > bhi {
                        continue;
                    }
                    let fa = f.level(s, adeg);
                    let gb = g.level(t, bdeg);
                    if fa.is_zero() || gb.is_zero() {
                        continue;
                    }
                    let block = crate::complexes::kron(fa.basis(), gb.basis());
                    // embed into the tensor coordinates of degree n
                    let mut embedded = IntMatrix::zeros(rank, block.cols());
                    let off = tensor_block_offset(f.ambient(), g.ambient(), n, adeg);
                    for i in 0..block.rows() {
                        for j in 0..block.cols() {
                            if !block[(i, j)].is_zero() {
                                embedded[(off + i, j)] = block[(i, j)].clone();
                            }
                        }
                    }
                    gens = gens.hstack(&embedded)?;
                }
            }
            per_degree.push(Subgroup::from_generators(rank, &gens)?);
        }
        levels.push(per_degree);
    }
    FilteredComplex::new(ambient, p_min, levels)
}

/// Offset of the block `C^adeg ⊗ D^{n-adeg}` inside the degree-`n` tensor
/// coordinates (blocks ordered by ascending first-factor degree).
fn tensor_block_offset(c: &Complex, d: &Complex, n: i64, adeg: i64) -> usize {
    let (alo, _) = c.support().expect("nonzero");
    let mut off = 0;
    for s in alo..adeg {
        off += c.rank(s) * d.rank(n - s);
    }
    off
}

/// A general filtered tower of complexes `... -> G^{p+1} -> G^p -> ...` given
/// by chain maps, constant below the bottom index and (for honestly bounded
/// input) zero above the top one. Input to completion.
#[derive(Clone, Debug)]
pub struct GenFilteredComplex {
    p_min: i64,
    levels: Vec<Complex>,
    /// maps[k] : levels[k+1] -> levels[k]
    maps: Vec<ComplexMap>,
}

impl GenFilteredComplex {
    pub fn new(p_min: i64, levels: Vec<Complex>, maps: Vec<ComplexMap>) -> Result<Self> {
        if levels.is_empty() {
            return Err(HomalgError::Validation("tower needs at least one level".into()));
        }
        if maps.len() + 1 != levels.len() {
            return Err(HomalgError::Shape(format!(
                "{} levels need {} maps, got {}",
                levels.len(),
                levels.len() - 1,
                maps.len()
            )));
        }
        for (k, m) in maps.iter().enumerate() {
            if m.source() != &levels[k + 1] || m.target() != &levels[k] {
                return Err(HomalgError::Validation(format!(
                    "tower map {k} does not connect level {} to level {}",
                    k + 1,
                    k
                )));
            }
        }
        Ok(GenFilteredComplex {
            p_min,
            levels,
            maps,
        })
    }

    pub fn p_min(&self) -> i64 {
        self.p_min
    }

    pub fn p_max(&self) -> i64 {
        self.p_min + self.levels.len() as i64 - 1
    }

    pub fn level(&self, p: i64) -> &Complex {
        &self.levels[(p - self.p_min) as usize]
    }

    pub fn map_from_above(&self, p: i64) -> Option<&ComplexMap> {
        // the map G^{p+1} -> G^p
        self.maps.get((p - self.p_min) as usize)
    }

    /// Graded piece `cone(G^{p+1} -> G^p)`; above the top the incoming level
    /// is zero, so the piece is the level itself.
    pub fn graded_piece(&self, p: i64) -> Complex {
        match self.map_from_above(p) {
            Some(m) => cone(m),
            None => {
                if p == self.p_max() {
                    self.level(p).clone()
                } else {
                    Complex::zero()
                }
            }
        }
    }

    /// Composite `G^{p_max} -> G^p` of the stored transition maps.
    fn composite_from_top(&self, p: i64) -> Result<ComplexMap> {
        let mut acc = ComplexMap::identity(self.level(self.p_max()));
        let mut cur = self.p_max();
        while cur > p {
            let step = self.map_from_above(cur - 1).expect("in range");
            acc = step.compose(&acc)?;
            cur -= 1;
        }
        Ok(acc)
    }

    /// Completion: the tower stabilizes at its stored top (zero for honestly
    /// bounded towers), so the limit is that top level and each completed
    /// level is the cone of the composite from it. Levelwise this is
    /// `G^p / G^{+∞}`, and completing twice changes nothing up to
    /// quasi-isomorphism.
    pub fn completion(&self) -> Result<GenFilteredComplex> {
        let mut levels = Vec::new();
        for p in self.p_min..=self.p_max() {
            levels.push(cone(&self.composite_from_top(p)?));
        }
        let mut maps = Vec::new();
        for p in self.p_min..self.p_max() {
            // functorial cone on the square (id on top, transition below)
            let src = &levels[(p + 1 - self.p_min) as usize];
            let tgt = &levels[(p - self.p_min) as usize];
            let top = self.level(self.p_max());
            let below = self.map_from_above(p).expect("in range");
            let mut comps = BTreeMap::new();
            for n in src.degrees() {
                let a = IntMatrix::identity(top.rank(n + 1));
                let b = below.comp(n);
                let m = a.block_diag(&b);
                if !m.is_zero() {
                    comps.insert(n, m);
                }
            }
            maps.push(ComplexMap::new(src.clone(), tgt.clone(), comps)?);
        }
        GenFilteredComplex::new(self.p_min, levels, maps)
    }
}

/// One homotopy-object row of a filtered complex: entry `i` is
/// `H^{i-n}(gr^i F)` and the differentials are the connecting maps of the
/// consecutive-level extensions. This is exactly the row `q = -n` of the
/// first spectral-sequence page with its differential.
#[derive(Clone, Debug)]
pub struct PiRow {
    pub n: i64,
    pub entries: BTreeMap<i64, FgAbGroup>,
    /// maps[i] : entry(i) -> entry(i+1) on canonical generators
    pub maps: BTreeMap<i64, IntMatrix>,
}

pub fn beilinson_pi(f: &FilteredComplex, n: i64) -> Result<PiRow> {
    let mut pieces: BTreeMap<i64, (SubquotientPresentation, Option<QuotPres>)> = BTreeMap::new();
    for i in f.p_min()..=f.p_max() {
        let piece = graded_piece(f, i)?;
        let m = i - n;
        let pres = if piece.complex().rank(m) > 0 || piece.complex().rank(m - 1) > 0 {
            let (_, pres) = crate::exactlin::homology_at(
                &piece.complex().d(m - 1),
                &piece.complex().d(m),
            )?;
            Some(pres)
        } else {
            None
        };
        pieces.insert(i, (piece, pres));
    }
    let mut entries = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for i in f.p_min()..=f.p_max() {
        let (piece, pres) = pieces.get(&i).unwrap();
        let group = pres
            .as_ref()
            .map_or(FgAbGroup::trivial(), |p| p.group().clone());
        if !group.is_trivial() {
            entries.insert(i, group.clone());
        }
        // connecting map into the next graded piece
        let Some((next_piece, Some(next_pres))) = pieces.get(&(i + 1)) else {
            continue;
        };
        let Some(pres) = pres else { continue };
        if group.is_trivial() || next_pres.group().is_trivial() {
            continue;
        }
        let m = i - n;
        let lifts = pres.generator_lifts();
        let mut mat = IntMatrix::zeros(next_pres.group().num_generators(), lifts.cols());
        for j in 0..lifts.cols() {
            // presented cycle -> ambient relative cycle in F^i(m)
            let v = piece.lift(m, &lifts.column(j))?;
            let dv = f.ambient().d(m).mul_vec(&v)?;
            // dv is a relative cycle of gr^{i+1} in degree m+1
            let w = next_piece.reduce_relative_cycle(m + 1, &dv)?;
            let coords = next_pres.reduce(&w)?;
            mat.set_column(j, &coords);
        }
        maps.insert(i, mat);
    }
    Ok(PiRow { n, entries, maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::Truncate;

    fn two_term(d: i64) -> Complex {
        Complex::new(0, vec![1, 1], vec![IntMatrix::from_rows(&[&[d]])]).unwrap()
    }

    fn two_column_times_two() -> DoubleComplex {
        // columns Z at i = 0, 1 in internal degree 0, horizontal multiplication by 2
        let c0 = Complex::concentrated(0, 1);
        let c1 = Complex::concentrated(0, 1);
        let h = ComplexMap::new(
            c0.clone(),
            c1.clone(),
            BTreeMap::from([(0, IntMatrix::from_rows(&[&[2]]))]),
        )
        .unwrap();
        DoubleComplex::new(0, vec![c0, c1], vec![h]).unwrap()
    }

    #[test]
    fn piling_single_column() {
        let c = two_term(2);
        let d = DoubleComplex::single_column(0, c.clone());
        let f = piling(&d).unwrap();
        assert_eq!(f.ambient(), &c);
        assert_eq!(f.p_min(), 0);
        assert_eq!(f.p_max(), 0);
    }

    #[test]
    fn piling_two_columns_is_cone_like() {
        let d = two_column_times_two();
        let f = piling(&d).unwrap();
        let h = f.ambient().homology();
        assert!(h.get(0).is_trivial());
        assert_eq!(h.get(1), FgAbGroup::cyclic(2));
    }

    #[test]
    fn piling_identity_columns_acyclic() {
        let c = two_term(2);
        let id = ComplexMap::identity(&c);
        let d = DoubleComplex::new(0, vec![c.clone(), c.clone()], vec![id]).unwrap();
        let f = piling(&d).unwrap();
        assert!(f.ambient().homology().is_trivial());
    }

    #[test]
    fn degenerate_row_recovers_cohomology() {
        let row = two_term(2).tensor(&two_term(3));
        let d = DoubleComplex::degenerate_row(&row).unwrap();
        let th = total_homology(&d).unwrap();
        assert_eq!(th, row.homology());
    }

    #[test]
    fn graded_piece_of_piling_round_trip() {
        let c0 = two_term(2);
        let c1 = two_term(6);
        let h = ComplexMap::new(
            c0.clone(),
            c1.clone(),
            BTreeMap::from([
                (0, IntMatrix::from_rows(&[&[1]])),
                (1, IntMatrix::from_rows(&[&[3]])),
            ]),
        )
        .unwrap();
        let d = DoubleComplex::new(0, vec![c0.clone(), c1.clone()], vec![h]).unwrap();
        let f = piling(&d).unwrap();
        for p in 0..=1 {
            let piece = graded_piece(&f, p).unwrap();
            let expected = d.column(p).shift(-p);
            assert_eq!(piece.complex(), &expected, "graded piece at {p}");
        }
    }

    #[test]
    fn graded_piece_with_torsion() {
        // 0 ⊆ 2Z ⊆ Z in a single degree: gr^0 = Z/2 presented as a two-term
        // complex, gr^1 = Z.
        let ambient = Complex::concentrated(0, 1);
        let levels = vec![
            vec![Subgroup::full(1)],
            vec![Subgroup::from_generators(1, &IntMatrix::from_rows(&[&[2]])).unwrap()],
        ];
        let f = FilteredComplex::new(ambient, 0, levels).unwrap();
        let gr0 = graded_piece(&f, 0).unwrap();
        let h0 = gr0.complex().homology();
        assert_eq!(h0.get(0), FgAbGroup::cyclic(2));
        assert!(h0.get(-1).is_trivial());
        let gr1 = graded_piece(&f, 1).unwrap();
        assert_eq!(gr1.complex().homology().get(0), FgAbGroup::free(1));
    }

    #[test]
    fn constant_filtration_graded_pieces() {
        let c = two_term(2);
        let f = FilteredComplex::one_jump(c.clone(), 0);
        assert_eq!(graded_piece(&f, 0).unwrap().complex(), &c);
        assert!(graded_piece(&f, 1).unwrap().complex().is_zero());
        assert!(graded_piece(&f, -1).unwrap().complex().is_zero());
    }

    #[test]
    fn intermediate_subquotient_endpoints() {
        let d = two_column_times_two();
        let f = piling(&d).unwrap();
        // width one is the graded piece
        let s = subquotient(&f, 0, 1).unwrap();
        let g = graded_piece(&f, 0).unwrap();
        assert_eq!(s.complex(), g.complex());
        // width zero is the zero complex
        assert!(subquotient(&f, 1, 1).unwrap().complex().is_zero());
        // order violation
        assert!(matches!(
            subquotient(&f, 2, 1),
            Err(HomalgError::Order(2, 1))
        ));
        // full width recovers the homology of the ambient complex
        let full = subquotient(&f, 0, 2).unwrap();
        assert_eq!(full.complex().homology(), f.ambient().homology());
    }

    #[test]
    fn width_two_window_is_a_shifted_cone() {
        // on a column filtration, F^p / F^{p+2} has the homology of the cone
        // on the horizontal map, shifted into total degrees
        let c0 = two_term(2);
        let c1 = two_term(6);
        let h = ComplexMap::new(
            c0.clone(),
            c1.clone(),
            BTreeMap::from([
                (0, IntMatrix::from_rows(&[&[1]])),
                (1, IntMatrix::from_rows(&[&[3]])),
            ]),
        )
        .unwrap();
        let d = DoubleComplex::new(0, vec![c0.clone(), c1.clone()], vec![h.clone()]).unwrap();
        let f = piling(&d).unwrap();
        let window = subquotient(&f, 0, 2).unwrap();
        let expected = cone(&h).shift(-1);
        assert_eq!(window.complex().homology(), expected.homology());
    }

    #[test]
    fn day_unit_law_structural() {
        let d = two_column_times_two();
        let f = piling(&d).unwrap();
        let unit = FilteredComplex::one_jump(Complex::concentrated(0, 1), 0);
        let conv = day_convolution(&f, &unit).unwrap();
        assert_eq!(&conv, &f);
        let conv2 = day_convolution(&unit, &f).unwrap();
        assert_eq!(&conv2, &f);
    }

    #[test]
    fn day_one_jump_adds_jumps() {
        let a = FilteredComplex::one_jump(Complex::concentrated(0, 1), 2);
        let b = FilteredComplex::one_jump(Complex::concentrated(1, 1), 3);
        let conv = day_convolution(&a, &b).unwrap();
        assert_eq!(conv.p_min(), 5);
        assert_eq!(conv.p_max(), 5);
        assert!(conv.level(5, 1).is_full());
        assert!(conv.level(6, 1).is_zero());
    }

    /// The degreewise-image Day convolution only refines the derived one for
    /// filtrations by saturated subgroups. With finite-index steps the
    /// graded pieces collapse: for F = G = (Z ⊇ 2Z ⊇ 0) the convolution has
    /// gr^1 = 2Z/4Z = Z/2, while gr⊗gr would give (Z/2)^2.
    #[test]
    fn day_gr_splitting_needs_saturated_levels() {
        let ambient = Complex::concentrated(0, 1);
        let two = Subgroup::from_generators(1, &IntMatrix::from_rows(&[&[2]])).unwrap();
        let f = FilteredComplex::new(
            ambient.clone(),
            0,
            vec![vec![Subgroup::full(1)], vec![two.clone()]],
        )
        .unwrap();
        let conv = day_convolution(&f, &f).unwrap();
        let gr1 = graded_piece(&conv, 1).unwrap().complex().homology();
        assert_eq!(gr1.get(0), FgAbGroup::cyclic(2)); // not (Z/2)^2
    }

    #[test]
    fn completion_of_complete_tower_is_levelwise_equal() {
        let c = two_term(2);
        let tower = GenFilteredComplex::new(
            0,
            vec![c.clone(), Complex::zero()],
            vec![ComplexMap::zero(Complex::zero(), c.clone())],
        )
        .unwrap();
        let comp = tower.completion().unwrap();
        assert_eq!(comp.level(0), &c);
        assert!(comp.level(1).is_zero());
    }

    #[test]
    fn completion_of_constant_tower_is_acyclic() {
        let c = two_term(2);
        let tower = GenFilteredComplex::new(
            0,
            vec![c.clone(), c.clone(), c.clone()],
            vec![ComplexMap::identity(&c), ComplexMap::identity(&c)],
        )
        .unwrap();
        let comp = tower.completion().unwrap();
        for p in 0..=2 {
            assert!(
                comp.level(p).homology().is_trivial(),
                "level {p} should be acyclic"
            );
        }
    }

    #[test]
    fn completion_is_idempotent_on_homology() {
        let c = two_term(2);
        let trunc = c.truncate_brutal(Truncate::AtMost(0));
        // brutal-truncation projection c -> c^{<=0}
        let m = ComplexMap::new(
            c.clone(),
            trunc.clone(),
            BTreeMap::from([(0, IntMatrix::identity(1))]),
        )
        .unwrap();
        let tower = GenFilteredComplex::new(0, vec![trunc.clone(), c.clone()], vec![m]).unwrap();
        let once = tower.completion().unwrap();
        let twice = once.completion().unwrap();
        for p in 0..=1 {
            assert_eq!(once.level(p).homology(), twice.level(p).homology());
        }
    }

    #[test]
    fn beilinson_row_of_degenerate_row() {
        // F = piling of a degenerate row recovers the row's cohomology with
        // induced maps in the row n = 0.
        let row = two_term(2);
        let d = DoubleComplex::degenerate_row(&row).unwrap();
        let f = piling(&d).unwrap();
        let pi0 = beilinson_pi(&f, 0).unwrap();
        // gr^i is column i in degree i; H^{i-0}(gr^i) = column group
        assert_eq!(pi0.entries.get(&0), Some(&FgAbGroup::free(1)));
        assert_eq!(pi0.entries.get(&1), Some(&FgAbGroup::free(1)));
        let m = pi0.maps.get(&0).unwrap();
        assert_eq!(m.rows(), 1);
        assert_eq!(m.cols(), 1);
        assert_eq!(m[(0, 0)].clone().abs(), BigInt::from(2));
    }

    #[test]
    fn one_jump_pi_rows() {
        let c = two_term(2);
        let f = FilteredComplex::one_jump(c.clone(), 0);
        // row n: single entry at i = 0 with H^{-n}(C)
        let pi = beilinson_pi(&f, -1).unwrap();
        assert_eq!(pi.entries.get(&0), Some(&FgAbGroup::cyclic(2)));
        assert!(pi.maps.is_empty());
    }
}
