//! The spectral sequence of a filtered complex and the Deligne décalage
//! operator.
//!
//! Pages are computed by the classical cycle/boundary formulas
//! `E_r^{p,q} = Z_r^{p,q} / (Z_{r-1}^{p+1,q-1} + d Z_{r-1}^{p-r+1,q+r-2})`
//! with `Z_r^{p,q} = F^p C^{p+q} ∩ d^{-1} F^{p+r} C^{p+q+1}`, all evaluated
//! exactly by subgroup calculus. Décalage is an independent second path to
//! the same data: one application advances the spectral sequence by a page
//! under the reindexing `(p, q) -> (2p + q, -p)`; the cross-checks between
//! the two paths live in the verification suites.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{HomalgError, Result};
use crate::filtered::FilteredComplex;
use crate::exactlin::{quotient, FgAbGroup, IntMatrix, PresentedHom, QuotPres, Subgroup};

/// One entry of a page: the canonical group plus its ambient presentation.
#[derive(Clone, Debug)]
pub struct PageEntry {
    pub group: FgAbGroup,
    pub pres: QuotPres,
}

/// A page of the spectral sequence. Only nonzero entries are stored; the
/// differential out of `(p, q)` has bidegree `(r, 1 - r)`.
#[derive(Clone, Debug)]
pub struct Page {
    pub r: i64,
    pub entries: BTreeMap<(i64, i64), PageEntry>,
    /// differentials keyed by source `(p, q)`, as matrices on canonical
    /// generators of source and target
    pub differentials: BTreeMap<(i64, i64), IntMatrix>,
}

impl Page {
    pub fn group(&self, p: i64, q: i64) -> FgAbGroup {
        self.entries
            .get(&(p, q))
            .map_or(FgAbGroup::trivial(), |e| e.group.clone())
    }

    pub fn support(&self) -> Vec<(i64, i64)> {
        self.entries.keys().copied().collect()
    }

    pub fn differential(&self, p: i64, q: i64) -> Option<&IntMatrix> {
        self.differentials.get(&(p, q))
    }

    /// The homology of this page at every spot, computed from the stored
    /// differentials on presented groups. Used to cross-check the next page.
    pub fn homology_at(&self, p: i64, q: i64) -> Result<FgAbGroup> {
        let g = self.group(p, q);
        if g.is_trivial() {
            return Ok(FgAbGroup::trivial());
        }
        let incoming_key = (p - self.r, q + self.r - 1);
        let src = self.group(incoming_key.0, incoming_key.1);
        let incoming = match self.differentials.get(&incoming_key) {
            Some(m) => PresentedHom::new(src.clone(), g.clone(), m.clone())?,
            None => PresentedHom::new(
                src.clone(),
                g.clone(),
                IntMatrix::zeros(g.num_generators(), src.num_generators()),
            )?,
        };
        let tgt = self.group(p + self.r, q - self.r + 1);
        let outgoing = match self.differentials.get(&(p, q)) {
            Some(m) => PresentedHom::new(g.clone(), tgt.clone(), m.clone())?,
            None => PresentedHom::new(
                g.clone(),
                tgt.clone(),
                IntMatrix::zeros(tgt.num_generators(), g.num_generators()),
            )?,
        };
        PresentedHom::homology_of_pair(&incoming, &outgoing)
    }
}

/// Cycle groups `Z_r^{p,q}` with a per-call cache.
struct ZCache<'a> {
    f: &'a FilteredComplex,
    cache: BTreeMap<(i64, i64, i64), Subgroup>,
}

impl<'a> ZCache<'a> {
    fn new(f: &'a FilteredComplex) -> Self {
        ZCache {
            f,
            cache: BTreeMap::new(),
        }
    }

    /// `Z_r` at filtration index p and total degree n.
    fn z(&mut self, r: i64, p: i64, n: i64) -> Result<Subgroup> {
        let key = (r, p, n);
        if let Some(s) = self.cache.get(&key) {
            return Ok(s.clone());
        }
        let s = self.f.relative_cycles(p, r, n)?;
        self.cache.insert(key, s.clone());
        Ok(s)
    }
}

fn page_support(f: &FilteredComplex) -> Vec<(i64, i64)> {
    let Some((lo, hi)) = f.ambient().support() else {
        return vec![];
    };
    let mut out = vec![];
    for p in f.p_min()..=f.p_max() {
        for n in lo..=hi {
            out.push((p, n - p));
        }
    }
    out
}

/// Pages `E_1 .. E_{r_max}` of the spectral sequence of a filtration by
/// subcomplexes.
pub fn pages(f: &FilteredComplex, r_max: i64) -> Result<Vec<Page>> {
    if r_max < 1 {
        return Err(HomalgError::Domain("r_max must be at least 1".into()));
    }
    let mut zc = ZCache::new(f);
    let support = page_support(f);
    let mut out = Vec::new();
    for r in 1..=r_max {
        let mut entries = BTreeMap::new();
        for &(p, q) in &support {
            let n = p + q;
            let top = zc.z(r, p, n)?;
            if top.is_zero() {
                continue;
            }
            let side = zc.z(r - 1, p + 1, n)?;
            let deep = zc.z(r - 1, p - r + 1, n - 1)?;
            let image = deep.map_forward(&f.ambient().d(n - 1))?;
            let den = side.sum(&image)?;
            let (group, pres) = quotient(&top, &den)?;
            if group.is_trivial() {
                continue;
            }
            entries.insert((p, q), PageEntry { group, pres });
        }
        let mut differentials = BTreeMap::new();
        for (&(p, q), entry) in &entries {
            let target = (p + r, q - r + 1);
            let Some(tentry) = entries.get(&target) else {
                continue;
            };
            let n = p + q;
            let mat = entry.pres.induced_hom(&f.ambient().d(n), &tentry.pres)?;
            let zero = IntMatrix::zeros(mat.rows(), mat.cols());
            if !PresentedHom::hom_eq(&tentry.group, &mat, &zero) {
                differentials.insert((p, q), mat);
            }
        }
        let page = Page {
            r,
            entries,
            differentials,
        };
        check_dd_zero(&page)?;
        out.push(page);
    }
    Ok(out)
}

/// `d_r ∘ d_r = 0`, checked on canonical generators modulo torsion.
fn check_dd_zero(page: &Page) -> Result<()> {
    for (&(p, q), m1) in &page.differentials {
        let mid = (p + page.r, q - page.r + 1);
        if let Some(m2) = page.differentials.get(&mid) {
            let composite = m2.mul(m1)?;
            let tgt = page.group(mid.0 + page.r, mid.1 - page.r + 1);
            let zero = IntMatrix::zeros(composite.rows(), composite.cols());
            if !PresentedHom::hom_eq(&tgt, &composite, &zero) {
                return Err(HomalgError::Validation(format!(
                    "d_r ∘ d_r ≠ 0 at ({p}, {q}) on page {}",
                    page.r
                )));
            }
        }
    }
    Ok(())
}

/// Deligne décalage: the filtration with
/// `(Dec F)^p ∩ C^n = F^{p+n} C^n ∩ d^{-1}(F^{p+n+1} C^{n+1})`.
pub fn decalage(f: &FilteredComplex) -> Result<FilteredComplex> {
    let ambient = f.ambient().clone();
    let Some((lo, hi)) = ambient.support() else {
        return FilteredComplex::new(ambient, f.p_min(), vec![vec![]]);
    };
    let p_min = f.p_min() - hi;
    let p_max = f.p_max() - lo;
    let mut levels = Vec::new();
    for p in p_min..=p_max {
        let mut per_degree = Vec::new();
        for n in lo..=hi {
            per_degree.push(f.relative_cycles(p + n, 1, n)?);
        }
        levels.push(per_degree);
    }
    FilteredComplex::new(ambient, p_min, levels)
}

/// Where a décalage page entry lands in the original spectral sequence:
/// `E_r^{p,q}(Dec F) ≅ E_{r+1}^{2p+q, -p}(F)`.
pub fn decalage_reindex(p: i64, q: i64) -> (i64, i64) {
    (2 * p + q, -p)
}

/// Comparison of one `E_∞` entry against the graded piece of the induced
/// filtration on the homology of the ambient complex.
#[derive(Clone, Debug)]
pub struct ConvergenceEntry {
    pub total_degree: i64,
    pub p: i64,
    pub e_infinity: FgAbGroup,
    pub graded_homology: FgAbGroup,
    pub matched: bool,
}

/// Result of running the spectral sequence to its stable page.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    /// First page index from which all pages agree and all differentials
    /// vanish.
    pub stabilized_at: i64,
    pub e_infinity: Page,
    pub comparisons: Vec<ConvergenceEntry>,
    pub all_match: bool,
}

/// Run the spectral sequence of a bounded filtration to its limit and
/// compare, in every total degree, the stable page against the graded
/// pieces of the induced filtration on homology. Boundedness forces
/// collapse at a finite page, so the comparison is an equality check, not
/// an approximation.
pub fn e_infinity_and_convergence(f: &FilteredComplex) -> Result<ConvergenceReport> {
    let len = f.filtration_length();
    // beyond r = len + 1 both the cycle formulas and the supports freeze
    let r_stable = len + 1;
    let all = pages(f, r_stable + 1)?;
    let e_inf = all[(r_stable - 1) as usize].clone();
    debug_assert!(pages_equal(&e_inf, &all[(r_stable) as usize]));
    let stabilized_at = {
        let mut r = r_stable;
        while r > 1 {
            let prev = &all[(r - 2) as usize];
            if prev.differentials.is_empty() && pages_equal(prev, &e_inf) {
                r -= 1;
            } else {
                break;
            }
        }
        r
    };

    // induced filtration on homology: F^p H^n = im(H^n(F^p) -> H^n)
    let mut comparisons = Vec::new();
    let mut all_match = true;
    let Some((lo, hi)) = f.ambient().support() else {
        return Ok(ConvergenceReport {
            stabilized_at: 1,
            e_infinity: e_inf,
            comparisons,
            all_match,
        });
    };
    for n in lo..=hi {
        let cycles = Subgroup::from_generators(
            f.ambient().rank(n),
            &crate::exactlin::kernel(&f.ambient().d(n)),
        )?;
        let boundaries = Subgroup::image(&f.ambient().d(n - 1));
        let level_image = |p: i64| -> Result<Subgroup> {
            f.level(p, n).intersect(&cycles)?.sum(&boundaries)
        };
        for p in f.p_min()..=f.p_max() {
            let top = level_image(p)?;
            let bot = level_image(p + 1)?;
            let (gr, _) = quotient(&top, &bot)?;
            let ei = e_inf.group(p, n - p);
            let matched = gr == ei;
            all_match &= matched;
            if !gr.is_trivial() || !ei.is_trivial() {
                comparisons.push(ConvergenceEntry {
                    total_degree: n,
                    p,
                    e_infinity: ei,
                    graded_homology: gr,
                    matched,
                });
            }
        }
    }
    Ok(ConvergenceReport {
        stabilized_at,
        e_infinity: e_inf,
        comparisons,
        all_match,
    })
}

fn pages_equal(a: &Page, b: &Page) -> bool {
    let keys: std::collections::BTreeSet<(i64, i64)> = a
        .entries
        .keys()
        .chain(b.entries.keys())
        .copied()
        .collect();
    keys.into_iter().all(|(p, q)| a.group(p, q) == b.group(p, q))
}

/// Representative-independence of the page differential: perturb each
/// generator lift by random elements of the denominator and recompute the
/// induced matrix. Exposed for the test suites.
pub fn differential_is_representative_independent(
    f: &FilteredComplex,
    page: &Page,
    p: i64,
    q: i64,
    fuzz: &mut impl FnMut(usize) -> BigInt,
) -> Result<bool> {
    let Some(entry) = page.entries.get(&(p, q)) else {
        return Ok(true);
    };
    let Some(tentry) = page.entries.get(&(p + page.r, q - page.r + 1)) else {
        return Ok(true);
    };
    let n = p + q;
    let d = f.ambient().d(n);
    let base = entry.pres.induced_hom(&d, &tentry.pres)?;
    // perturb lifts by denominator elements
    let lifts = entry.pres.generator_lifts();
    let den = entry.pres.denominator().basis();
    let mut perturbed = IntMatrix::zeros(tentry.pres.group().num_generators(), lifts.cols());
    for j in 0..lifts.cols() {
        let mut v = lifts.column(j);
        for c in 0..den.cols() {
            let coef = fuzz(c);
            if coef.is_zero() {
                continue;
            }
            for i in 0..v.len() {
                let delta = &den[(i, c)] * &coef;
                v[i] += delta;
            }
        }
        let img = d.mul_vec(&v)?;
        let coords = tentry.pres.reduce(&img)?;
        perturbed.set_column(j, &coords);
    }
    Ok(PresentedHom::hom_eq(
        tentry.pres.group(),
        &base,
        &perturbed,
    ))
}
