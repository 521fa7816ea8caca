//! Weight-graded free noncommutative dgas over `Z`.
//!
//! Generators carry a topological degree and a positive formal weight; the
//! differential lowers the topological degree by one, preserves the weight,
//! and extends by the Leibniz rule `d(xy) = dx·y + (-1)^{|x|} x·dy`. Every
//! weight stratum has a finite word basis, so bigraded homology is exact
//! integer linear algebra.
//!
//! The central family is the tower of free dgas on generators `e_1, ..., e_n`
//! with `e_k` in bidegree `(k-1, k)` and `d e_k = Σ_{i+j=k} (-1)^{i-1} e_i e_j`,
//! which presents the exterior algebra on one generator; the classes
//! `r_n = Σ_{i+j=n} (-1)^{i-1} e_i e_j` are the `n`-fold Massey powers
//! obstructing the extension from one stage to the next.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{HomalgError, Result};
use crate::exactlin::{homology_at, FgAbGroup, IntMatrix, QuotPres};

/// A generator of a free dga: display name, topological degree, weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub topdeg: i64,
    pub weight: i64,
}

/// A word in the generators, by index.
pub type Word = Vec<u32>;

/// Integer linear combination of words, kept in sorted canonical term order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NcPoly {
    terms: BTreeMap<Word, BigInt>,
}

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly::default()
    }

    pub fn one() -> Self {
        NcPoly {
            terms: BTreeMap::from([(vec![], BigInt::one())]),
        }
    }

    pub fn generator(i: u32) -> Self {
        NcPoly {
            terms: BTreeMap::from([(vec![i], BigInt::one())]),
        }
    }

    pub fn monomial(word: Word, coeff: BigInt) -> Self {
        let mut p = NcPoly::zero();
        p.add_term(word, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, word: Word, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> NcPoly {
        if k.is_zero() {
            return NcPoly::zero();
        }
        NcPoly {
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * k)).collect(),
        }
    }

    pub fn neg(&self) -> NcPoly {
        self.scale(&BigInt::from(-1))
    }

    /// Concatenation product, extended bilinearly. No sign: signs live in the
    /// Leibniz rule, not in the multiplication of a free algebra.
    pub fn mul(&self, other: &NcPoly) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w1, c1) in self.terms() {
            for (w2, c2) in other.terms() {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1 * c2);
            }
        }
        out
    }

    /// Render with generator names, canonical term order.
    pub fn display<'a>(&'a self, gens: &'a [Generator]) -> NcPolyDisplay<'a> {
        NcPolyDisplay { poly: self, gens }
    }
}

pub struct NcPolyDisplay<'a> {
    poly: &'a NcPoly,
    gens: &'a [Generator],
}

impl fmt::Display for NcPolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in self.poly.terms() {
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let word_str = if w.is_empty() {
                "1".to_string()
            } else {
                w.iter()
                    .map(|&i| self.gens[i as usize].name.clone())
                    .collect::<Vec<_>>()
                    .join("*")
            };
            if w.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{word_str}")?;
            } else {
                write!(f, "{mag}*{word_str}")?;
            }
        }
        Ok(())
    }
}

/// A free noncommutative dga, given by generators and their differentials.
#[derive(Clone, Debug)]
pub struct FreeDga {
    gens: Vec<Generator>,
    diffs: Vec<NcPoly>,
}

impl FreeDga {
    pub fn new(gens: Vec<Generator>, diffs: Vec<NcPoly>) -> Result<Self> {
        if diffs.len() != gens.len() {
            return Err(HomalgError::Shape(format!(
                "{} generators with {} differentials",
                gens.len(),
                diffs.len()
            )));
        }
        for g in &gens {
            if g.weight < 1 {
                return Err(HomalgError::Domain(format!(
                    "generator {} has weight {} < 1",
                    g.name, g.weight
                )));
            }
        }
        let dga = FreeDga { gens, diffs };
        for (i, d) in dga.diffs.iter().enumerate() {
            if !d.is_zero() {
                let (t, w) = dga.bidegree(d)?;
                if t != dga.gens[i].topdeg - 1 || w != dga.gens[i].weight {
                    return Err(HomalgError::Grading(format!(
                        "d({}) has bidegree ({t}, {w}), expected ({}, {})",
                        dga.gens[i].name,
                        dga.gens[i].topdeg - 1,
                        dga.gens[i].weight
                    )));
                }
            }
        }
        // d² = 0, generator by generator, via the Leibniz expansion
        for i in 0..dga.gens.len() {
            let dd = dga.differential(&dga.diffs[i])?;
            if !dd.is_zero() {
                return Err(HomalgError::Validation(format!(
                    "d²({}) ≠ 0",
                    dga.gens[i].name
                )));
            }
        }
        Ok(dga)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator_differential(&self, i: usize) -> &NcPoly {
        &self.diffs[i]
    }

    pub fn word_topdeg(&self, w: &Word) -> i64 {
        w.iter().map(|&i| self.gens[i as usize].topdeg).sum()
    }

    pub fn word_weight(&self, w: &Word) -> i64 {
        w.iter().map(|&i| self.gens[i as usize].weight).sum()
    }

    /// Bidegree of a homogeneous element; inhomogeneous input is an error.
    pub fn bidegree(&self, x: &NcPoly) -> Result<(i64, i64)> {
        let mut bd: Option<(i64, i64)> = None;
        for (w, _) in x.terms() {
            let cur = (self.word_topdeg(w), self.word_weight(w));
            match bd {
                None => bd = Some(cur),
                Some(prev) if prev != cur => {
                    return Err(HomalgError::Grading(format!(
                        "element mixes bidegrees {prev:?} and {cur:?}"
                    )));
                }
                _ => {}
            }
        }
        bd.ok_or_else(|| HomalgError::Grading("bidegree of zero is undefined".into()))
    }

    /// The differential, extended by `d(xy) = dx·y + (-1)^{|x|} x·dy`.
    pub fn differential(&self, x: &NcPoly) -> Result<NcPoly> {
        let mut out = NcPoly::zero();
        for (word, coeff) in x.terms() {
            let mut prefix_deg = 0i64;
            for (pos, &gi) in word.iter().enumerate() {
                let dg = &self.diffs[gi as usize];
                if !dg.is_zero() {
                    let signed = if prefix_deg.rem_euclid(2) == 0 {
                        coeff.clone()
                    } else {
                        -coeff.clone()
                    };
                    let left = NcPoly::monomial(word[..pos].to_vec(), signed);
                    let right = NcPoly::monomial(word[pos + 1..].to_vec(), BigInt::one());
                    out = out.add(&left.mul(dg).mul(&right));
                }
                prefix_deg += self.gens[gi as usize].topdeg;
            }
        }
        Ok(out)
    }

    /// Lexicographically ordered word basis of one weight stratum.
    pub fn weight_basis(&self, weight: i64) -> Vec<Word> {
        fn rec(dga: &FreeDga, word: &mut Word, remaining: i64, out: &mut Vec<Word>) {
            if remaining == 0 {
                out.push(word.clone());
                return;
            }
            for (i, g) in dga.gens.iter().enumerate() {
                if g.weight <= remaining {
                    word.push(i as u32);
                    rec(dga, word, remaining - g.weight, out);
                    word.pop();
                }
            }
        }
        let mut out = vec![];
        if weight >= 0 {
            let mut word = vec![];
            rec(self, &mut word, weight, &mut out);
        }
        out
    }

    /// Basis of the `(topdeg, weight)` stratum.
    pub fn strand_basis(&self, topdeg: i64, weight: i64) -> Vec<Word> {
        self.weight_basis(weight)
            .into_iter()
            .filter(|w| self.word_topdeg(w) == topdeg)
            .collect()
    }

    /// Coordinates of a homogeneous element in its strand basis.
    pub fn strand_coords(&self, x: &NcPoly, topdeg: i64, weight: i64) -> Result<Vec<BigInt>> {
        let basis = self.strand_basis(topdeg, weight);
        let index: BTreeMap<&Word, usize> =
            basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut out = vec![BigInt::zero(); basis.len()];
        for (w, c) in x.terms() {
            let Some(&i) = index.get(w) else {
                return Err(HomalgError::Grading(format!(
                    "term outside the ({topdeg}, {weight}) stratum"
                )));
            };
            out[i] = c.clone();
        }
        Ok(out)
    }

    /// Matrix of the differential from stratum `(topdeg, weight)` to
    /// `(topdeg - 1, weight)` in the lex bases.
    pub fn strand_matrix(&self, topdeg: i64, weight: i64) -> Result<IntMatrix> {
        let src = self.strand_basis(topdeg, weight);
        let dst = self.strand_basis(topdeg - 1, weight);
        let index: BTreeMap<&Word, usize> = dst.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut m = IntMatrix::zeros(dst.len(), src.len());
        for (j, w) in src.iter().enumerate() {
            let dw = self.differential(&NcPoly::monomial(w.clone(), BigInt::one()))?;
            for (word, c) in dw.terms() {
                let i = *index
                    .get(word)
                    .expect("differential preserves weight and lowers topdeg by one");
                m[(i, j)] = c.clone();
            }
        }
        Ok(m)
    }

    /// Bigraded homology of one stratum, with chosen cycle representatives.
    pub fn bigraded_homology(&self, topdeg: i64, weight: i64) -> Result<StrandHomology> {
        let d_in = self.strand_matrix(topdeg + 1, weight)?;
        let d_out = self.strand_matrix(topdeg, weight)?;
        let (group, pres) = homology_at(&d_in, &d_out)?;
        let basis = self.strand_basis(topdeg, weight);
        let lifts = pres.generator_lifts();
        let representatives = (0..lifts.cols())
            .map(|j| {
                let col = lifts.column(j);
                let mut p = NcPoly::zero();
                for (i, c) in col.iter().enumerate() {
                    p.add_term(basis[i].clone(), c.clone());
                }
                p
            })
            .collect();
        Ok(StrandHomology {
            topdeg,
            weight,
            group,
            representatives,
            pres,
            basis,
        })
    }

    /// Canonical coordinates of a cycle's homology class in a stratum.
    pub fn class_of(&self, x: &NcPoly, strand: &StrandHomology) -> Result<Vec<BigInt>> {
        if x.is_zero() {
            return Ok(vec![BigInt::zero(); strand.group.num_generators()]);
        }
        let coords = self.strand_coords(x, strand.topdeg, strand.weight)?;
        strand.pres.reduce(&coords)
    }

    /// Homology table over all strata of weight up to `max_weight`; only
    /// nontrivial groups are recorded.
    pub fn homology_table(&self, max_weight: i64) -> Result<BTreeMap<(i64, i64), FgAbGroup>> {
        let mut out = BTreeMap::new();
        for w in 0..=max_weight {
            let words = self.weight_basis(w);
            if words.is_empty() {
                continue;
            }
            let mut tds: Vec<i64> = words.iter().map(|wd| self.word_topdeg(wd)).collect();
            tds.sort_unstable();
            tds.dedup();
            for t in tds {
                let h = self.bigraded_homology(t, w)?;
                if !h.group.is_trivial() {
                    out.insert((t, w), h.group);
                }
            }
        }
        Ok(out)
    }

    /// Structural equality up to renaming: same generator bidegrees in
    /// order, identical differentials as index polynomials (signs included).
    pub fn structurally_equal(&self, other: &FreeDga) -> bool {
        self.gens.len() == other.gens.len()
            && self
                .gens
                .iter()
                .zip(&other.gens)
                .all(|(a, b)| a.topdeg == b.topdeg && a.weight == b.weight)
            && self.diffs == other.diffs
    }
}

/// Homology of one `(topdeg, weight)` stratum with representatives.
#[derive(Clone, Debug)]
pub struct StrandHomology {
    pub topdeg: i64,
    pub weight: i64,
    pub group: FgAbGroup,
    pub representatives: Vec<NcPoly>,
    pub pres: QuotPres,
    pub basis: Vec<Word>,
}

/// The free dga on `e_1, ..., e_n` with `e_k` in bidegree `(k-1, k)` and
/// `d e_k = Σ_{i+j=k, i,j ≥ 1} (-1)^{i-1} e_i e_j`.
pub fn lambda_n(n: i64) -> Result<FreeDga> {
    if n < 1 {
        return Err(HomalgError::Domain(format!("lambda_n needs n ≥ 1, got {n}")));
    }
    let gens: Vec<Generator> = (1..=n)
        .map(|k| Generator {
            name: format!("e{k}"),
            topdeg: k - 1,
            weight: k,
        })
        .collect();
    let diffs: Vec<NcPoly> = (1..=n).map(boundary_sum).collect();
    FreeDga::new(gens, diffs)
}

/// `Σ_{i+j=k, i,j ≥ 1} (-1)^{i-1} e_i e_j` as an index polynomial
/// (generator `e_i` has index `i - 1`).
fn boundary_sum(k: i64) -> NcPoly {
    let mut p = NcPoly::zero();
    for i in 1..k {
        let j = k - i;
        let sign = if (i - 1).rem_euclid(2) == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        p.add_term(vec![(i - 1) as u32, (j - 1) as u32], sign);
    }
    p
}

/// Verdicts attached to the `n`-fold Massey power.
#[derive(Clone, Debug)]
pub struct MasseyReport {
    pub n: i64,
    /// `r_n` as an element of the `(n-1)`-stage algebra.
    pub power: NcPoly,
    pub is_cycle: bool,
    /// homology of the `(n-2, n)` stratum of the `(n-1)`-stage algebra
    pub lower_group: FgAbGroup,
    /// the class of `r_n` generates that group
    pub generates: bool,
    /// the class of `r_n` dies in the `n`-stage algebra
    pub vanishes_after_attachment: bool,
}

impl MasseyReport {
    pub fn all_verdicts_hold(&self) -> bool {
        self.is_cycle
            && self.lower_group == FgAbGroup::free(1)
            && self.generates
            && self.vanishes_after_attachment
    }
}

/// The `n`-fold Massey power `r_n = Σ_{i+j=n} (-1)^{i-1} e_i e_j`, as a cycle
/// of the `(n-1)`-stage algebra, together with the checks that it generates
/// the expected homology there and maps to zero one stage up (where it
/// becomes the boundary of `e_n`).
pub fn massey_power(n: i64) -> Result<MasseyReport> {
    if n < 2 {
        return Err(HomalgError::Domain(format!(
            "massey_power needs n ≥ 2, got {n}"
        )));
    }
    let lower = lambda_n(n - 1)?;
    let upper = lambda_n(n)?;
    let power = boundary_sum(n);
    let d_power = lower.differential(&power)?;
    let is_cycle = d_power.is_zero();

    let strand = lower.bigraded_homology(n - 2, n)?;
    let coords = lower.class_of(&power, &strand)?;
    let generates = strand.group == FgAbGroup::free(1)
        && coords.len() == 1
        && coords[0].clone().abs().is_one();

    let upper_strand = upper.bigraded_homology(n - 2, n)?;
    let upper_coords = upper.class_of(&power, &upper_strand)?;
    let vanishes_after_attachment = upper_coords.iter().all(Zero::is_zero);

    Ok(MasseyReport {
        n,
        power,
        is_cycle,
        lower_group: strand.group.clone(),
        generates,
        vanishes_after_attachment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_is_closed() {
        let a = lambda_n(2).unwrap();
        assert!(a.differential(&NcPoly::one()).unwrap().is_zero());
    }

    #[test]
    fn lambda_one_has_zero_differential() {
        let a = lambda_n(1).unwrap();
        assert!(a.generator_differential(0).is_zero());
        // polynomial homology: Z in (0, m) for all m
        for m in 0..6 {
            let h = a.bigraded_homology(0, m).unwrap();
            assert_eq!(h.group, FgAbGroup::free(1), "weight {m}");
        }
    }

    #[test]
    fn lambda_two_boundary_of_e2() {
        let a = lambda_n(2).unwrap();
        // d e_2 = e_1 e_1
        assert_eq!(
            a.generator_differential(1),
            &NcPoly::monomial(vec![0, 0], BigInt::one())
        );
        // d(e_1 e_2) = e_1^3 since |e_1| = 0 and d e_1 = 0
        let x = NcPoly::monomial(vec![0, 1], BigInt::one());
        let dx = a.differential(&x).unwrap();
        assert_eq!(dx, NcPoly::monomial(vec![0, 0, 0], BigInt::one()));
    }

    #[test]
    fn lambda_four_boundary_of_e4() {
        let a = lambda_n(4).unwrap();
        // d e_4 = e_1 e_3 - e_2^2 + e_3 e_1
        let mut expected = NcPoly::zero();
        expected.add_term(vec![0, 2], BigInt::one());
        expected.add_term(vec![1, 1], -BigInt::one());
        expected.add_term(vec![2, 0], BigInt::one());
        assert_eq!(a.generator_differential(3), &expected);
    }

    #[test]
    fn weight_basis_lex_order() {
        let a = lambda_n(2).unwrap();
        let b = a.weight_basis(3);
        assert_eq!(b, vec![vec![0, 0, 0], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn lambda_two_strand_homology() {
        let a = lambda_n(2).unwrap();
        // (1,3): Z generated by e1 e2 - e2 e1
        let h = a.bigraded_homology(1, 3).unwrap();
        assert_eq!(h.group, FgAbGroup::free(1));
        let r3 = {
            let mut p = NcPoly::zero();
            p.add_term(vec![0, 1], BigInt::one());
            p.add_term(vec![1, 0], -BigInt::one());
            p
        };
        let coords = a.class_of(&r3, &h).unwrap();
        assert_eq!(coords.len(), 1);
        assert!(coords[0].clone().abs().is_one());
        // (0,2): basis {e1^2} killed by d e_2
        let h02 = a.bigraded_homology(0, 2).unwrap();
        assert!(h02.group.is_trivial());
    }

    #[test]
    fn massey_powers_small() {
        for n in 2..=4 {
            let rep = massey_power(n).unwrap();
            assert!(rep.all_verdicts_hold(), "massey power {n}: {rep:?}");
        }
    }

    #[test]
    fn massey_r2_is_e1_squared() {
        let rep = massey_power(2).unwrap();
        assert_eq!(rep.power, NcPoly::monomial(vec![0, 0], BigInt::one()));
    }

    #[test]
    fn massey_r3_signs() {
        let rep = massey_power(3).unwrap();
        let mut expected = NcPoly::zero();
        expected.add_term(vec![0, 1], BigInt::one());
        expected.add_term(vec![1, 0], -BigInt::one());
        assert_eq!(rep.power, expected);
    }

    #[test]
    fn domain_errors() {
        assert!(lambda_n(0).is_err());
        assert!(massey_power(1).is_err());
    }

    #[test]
    fn homology_pattern_lambda_two_low_weights() {
        // the homology of the two-stage algebra is exterior-times-polynomial:
        // Z exactly at (m, 3m) and (m, 3m + 1)
        let a = lambda_n(2).unwrap();
        let table = a.homology_table(7).unwrap();
        let mut expected = BTreeMap::new();
        for m in 0..3i64 {
            for eps in 0..2i64 {
                let (t, w) = (m, 3 * m + eps);
                if w <= 7 {
                    expected.insert((t, w), FgAbGroup::free(1));
                }
            }
        }
        assert_eq!(table, expected);
    }

    #[test]
    fn display_polynomials() {
        let a = lambda_n(3).unwrap();
        let r3 = boundary_sum(3);
        assert_eq!(format!("{}", r3.display(a.generators())), "e1*e2 - e2*e1");
    }
}
