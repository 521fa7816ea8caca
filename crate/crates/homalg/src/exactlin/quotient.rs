use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::IntMatrix;
use super::snf::smith_with_inverse;
use super::subgroup::{solve_exact, Subgroup};
use crate::error::{HomalgError, Result};

/// A finitely generated abelian group in canonical form: free rank plus the
/// torsion divisor chain `d_1 | d_2 | ...` with every `d_i ≥ 2`. Equality of
/// values is isomorphism of groups.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct FgAbGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Self {
        let two = BigInt::from(2);
        for i in 0..torsion.len() {
            assert!(torsion[i] >= two, "torsion coefficients must be ≥ 2");
            if i + 1 < torsion.len() {
                assert!(
                    (&torsion[i + 1] % &torsion[i]).is_zero(),
                    "torsion coefficients must form a divisibility chain"
                );
            }
        }
        FgAbGroup { free_rank, torsion }
    }

    pub fn trivial() -> Self {
        FgAbGroup {
            free_rank: 0,
            torsion: vec![],
        }
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free_rank: rank,
            torsion: vec![],
        }
    }

    pub fn cyclic(d: u64) -> Self {
        assert!(d >= 2);
        FgAbGroup {
            free_rank: 0,
            torsion: vec![BigInt::from(d)],
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Number of canonical generators (torsion first, then free).
    pub fn num_generators(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    /// Divisor attached to canonical generator `i`: `Some(d)` for torsion
    /// generators, `None` for free ones.
    pub fn generator_order(&self, i: usize) -> Option<&BigInt> {
        self.torsion.get(i)
    }

    /// Direct sum, renormalized to canonical form.
    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        // Merge torsion chains via elementary divisors per prime would be
        // overkill here: diagonalize the combined relation matrix instead.
        let n = self.num_generators() + other.num_generators();
        let mut rel = IntMatrix::zeros(n, self.torsion.len() + other.torsion.len());
        let mut col = 0;
        for (i, d) in self.torsion.iter().enumerate() {
            rel[(i, col)] = d.clone();
            col += 1;
        }
        let off = self.num_generators();
        for (i, d) in other.torsion.iter().enumerate() {
            rel[(off + i, col)] = d.clone();
            col += 1;
        }
        let f = smith_with_inverse(&rel);
        let mut torsion = vec![];
        let mut killed = 0;
        for i in 0..rel.rows().min(rel.cols()) {
            let d = &f.d[(i, i)];
            if d.is_zero() {
                break;
            }
            if !d.is_one() {
                torsion.push(d.clone());
            }
            killed += 1;
        }
        FgAbGroup::new(n - killed, torsion)
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = vec![];
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// A presented subquotient `num / den` of some `Z^n`, carrying enough data to
/// reduce ambient vectors to canonical coordinates and to lift canonical
/// generators back to ambient representatives.
#[derive(Clone, Debug)]
pub struct QuotPres {
    ambient_rank: usize,
    num: Subgroup,
    den: Subgroup,
    group: FgAbGroup,
    /// Divisor of adapted basis vector i (0 marks a free generator).
    divisors: Vec<BigInt>,
    /// Indices (into the adapted basis) of the kept canonical generators.
    kept: Vec<usize>,
    /// Adapted coordinates: row transform applied to numerator coordinates.
    u: IntMatrix,
    /// Columns express the adapted basis in numerator coordinates.
    u_inv: IntMatrix,
}

impl QuotPres {
    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn numerator(&self) -> &Subgroup {
        &self.num
    }

    pub fn denominator(&self) -> &Subgroup {
        &self.den
    }

    /// Ambient lift of each canonical generator, one column per generator
    /// (torsion generators first, then free ones).
    pub fn generator_lifts(&self) -> IntMatrix {
        let cols: Vec<usize> = self.kept.clone();
        let adapted = self.num.basis().mul(&self.u_inv).expect("shape");
        adapted.select_columns(&cols)
    }

    /// Canonical coordinates of an ambient vector lying in the numerator.
    /// Torsion coordinates are reduced into `[0, d_i)`.
    pub fn reduce(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        let y = solve_exact(self.num.basis(), v).ok_or_else(|| {
            HomalgError::Containment("vector is not in the numerator subgroup".into())
        })?;
        let adapted = self.u.mul_vec(&y)?;
        let mut out = Vec::with_capacity(self.kept.len());
        for (slot, &i) in self.kept.iter().enumerate() {
            let d = &self.divisors[i];
            if d.is_zero() {
                out.push(adapted[i].clone());
            } else {
                out.push(adapted[i].mod_floor(d));
            }
            debug_assert!(slot == out.len() - 1);
        }
        Ok(out)
    }

    /// True when the ambient vector lies in the denominator, i.e. reduces to 0.
    pub fn reduces_to_zero(&self, v: &[BigInt]) -> Result<bool> {
        Ok(self.reduce(v)?.iter().all(Zero::is_zero))
    }

    /// Matrix of the homomorphism induced by the ambient map `t` into `target`,
    /// expressed on canonical generators. The caller is responsible for
    /// `t(num) ⊆ target.num` and `t(den) ⊆ target.den`; the latter is checked.
    pub fn induced_hom(&self, t: &IntMatrix, target: &QuotPres) -> Result<IntMatrix> {
        if t.cols() != self.ambient_rank || t.rows() != target.ambient_rank {
            return Err(HomalgError::Shape(format!(
                "induced_hom: map is {}x{}, source ambient {}, target ambient {}",
                t.rows(),
                t.cols(),
                self.ambient_rank,
                target.ambient_rank
            )));
        }
        // Well-definedness: the denominator must be carried into the denominator.
        let den_basis = self.den.basis();
        for j in 0..den_basis.cols() {
            let img = t.mul_vec(&den_basis.column(j))?;
            if !target.reduces_to_zero(&img)? {
                return Err(HomalgError::Validation(
                    "map does not descend to the quotient".into(),
                ));
            }
        }
        let lifts = self.generator_lifts();
        let mut out = IntMatrix::zeros(target.group.num_generators(), lifts.cols());
        for j in 0..lifts.cols() {
            let img = t.mul_vec(&lifts.column(j))?;
            let coords = target.reduce(&img)?;
            out.set_column(j, &coords);
        }
        Ok(out)
    }
}

/// Quotient `a / b` of subgroups of the same ambient `Z^n`, in canonical form,
/// together with the presentation used to reduce elements.
pub fn quotient(a: &Subgroup, b: &Subgroup) -> Result<(FgAbGroup, QuotPres)> {
    if a.ambient_rank() != b.ambient_rank() {
        return Err(HomalgError::Shape(format!(
            "quotient of subgroup of Z^{} by subgroup of Z^{}",
            a.ambient_rank(),
            b.ambient_rank()
        )));
    }
    // Express b in the basis of a; failure of any column is a containment error.
    let mut m = IntMatrix::zeros(a.rank(), b.rank());
    for j in 0..b.rank() {
        let col = b.basis().column(j);
        let y = solve_exact(a.basis(), &col).ok_or_else(|| {
            HomalgError::Containment("denominator is not contained in numerator".into())
        })?;
        m.set_column(j, &y);
    }
    let f = smith_with_inverse(&m);
    let nrows = a.rank();
    let ncols = b.rank();
    let mut divisors = vec![BigInt::zero(); nrows];
    for (i, d) in divisors.iter_mut().enumerate().take(nrows.min(ncols)) {
        *d = f.d[(i, i)].clone();
    }
    // b has independent columns, so no diagonal entry among the first
    // ncols may vanish.
    debug_assert!(divisors.iter().take(ncols).all(|d| !d.is_zero()));

    let mut torsion = vec![];
    let mut kept = vec![];
    for (i, d) in divisors.iter().enumerate() {
        if d.is_one() {
            continue;
        }
        kept.push(i);
        if !d.is_zero() {
            torsion.push(d.clone());
        }
    }
    let free_rank = divisors.iter().filter(|d| d.is_zero()).count();
    let group = FgAbGroup::new(free_rank, torsion);
    Ok((
        group.clone(),
        QuotPres {
            ambient_rank: a.ambient_rank(),
            num: a.clone(),
            den: b.clone(),
            group,
            divisors,
            kept,
            u: f.u,
            u_inv: f.u_inv,
        },
    ))
}

/// Homology `ker(d_out) / im(d_in)` of two composable integer matrices.
pub fn homology_at(d_in: &IntMatrix, d_out: &IntMatrix) -> Result<(FgAbGroup, QuotPres)> {
    if d_in.rows() != d_out.cols() {
        return Err(HomalgError::Shape(format!(
            "homology_at: d_in is {}x{}, d_out is {}x{}",
            d_in.rows(),
            d_in.cols(),
            d_out.rows(),
            d_out.cols()
        )));
    }
    let composite = d_out.mul(d_in)?;
    if !composite.is_zero() {
        return Err(HomalgError::NotAComplex { degree: 0 });
    }
    let cycles = Subgroup::from_generators(d_in.rows(), &super::subgroup::kernel(d_out))?;
    let boundaries = Subgroup::image(d_in);
    quotient(&cycles, &boundaries)
}

/// A homomorphism between canonically presented groups, as a matrix on
/// canonical generators. Columns are well defined modulo the target's
/// torsion relations.
#[derive(Clone, Debug)]
pub struct PresentedHom {
    pub src: FgAbGroup,
    pub dst: FgAbGroup,
    pub mat: IntMatrix,
}

impl PresentedHom {
    pub fn new(src: FgAbGroup, dst: FgAbGroup, mat: IntMatrix) -> Result<Self> {
        if mat.rows() != dst.num_generators() || mat.cols() != src.num_generators() {
            return Err(HomalgError::Shape(format!(
                "presented hom matrix {}x{} for groups with {} and {} generators",
                mat.rows(),
                mat.cols(),
                dst.num_generators(),
                src.num_generators()
            )));
        }
        let h = PresentedHom { src, dst, mat };
        if !h.is_well_defined() {
            return Err(HomalgError::Validation(
                "matrix does not respect torsion relations".into(),
            ));
        }
        Ok(h)
    }

    /// d_i * (column i) must vanish in the target for each torsion generator.
    fn is_well_defined(&self) -> bool {
        for (i, d) in self.src.torsion().iter().enumerate() {
            for r in 0..self.mat.rows() {
                let val = &self.mat[(r, i)] * d;
                match self.dst.generator_order(r) {
                    Some(ord) => {
                        if !val.mod_floor(ord).is_zero() {
                            return false;
                        }
                    }
                    None => {
                        if !val.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Relation lattice of a group inside its canonical generator lattice.
    fn relation_lattice(g: &FgAbGroup) -> Subgroup {
        let n = g.num_generators();
        let t = g.torsion().len();
        let mut rel = IntMatrix::zeros(n, t);
        for (i, d) in g.torsion().iter().enumerate() {
            rel[(i, i)] = d.clone();
        }
        Subgroup::from_generators(n, &rel).expect("shape")
    }

    /// Two matrices describe the same homomorphism when they agree modulo the
    /// target relations.
    pub fn hom_eq(dst: &FgAbGroup, m1: &IntMatrix, m2: &IntMatrix) -> bool {
        if m1.rows() != m2.rows() || m1.cols() != m2.cols() {
            return false;
        }
        for i in 0..m1.rows() {
            for j in 0..m1.cols() {
                let diff = &m1[(i, j)] - &m2[(i, j)];
                match dst.generator_order(i) {
                    Some(d) => {
                        if !diff.mod_floor(d).is_zero() {
                            return false;
                        }
                    }
                    None => {
                        if !diff.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn compose(&self, inner: &PresentedHom) -> Result<PresentedHom> {
        if self.src != inner.dst {
            return Err(HomalgError::Shape("presented hom composition".into()));
        }
        PresentedHom::new(inner.src.clone(), self.dst.clone(), self.mat.mul(&inner.mat)?)
    }

    pub fn is_zero_hom(&self) -> bool {
        Self::hom_eq(
            &self.dst,
            &self.mat,
            &IntMatrix::zeros(self.mat.rows(), self.mat.cols()),
        )
    }

    /// Surjectivity: generator images plus target relations span everything.
    pub fn is_surjective(&self) -> bool {
        let rel = Self::relation_lattice(&self.dst);
        let span = self
            .mat
            .hstack(rel.basis())
            .expect("shape");
        Subgroup::from_generators(self.dst.num_generators(), &span)
            .expect("shape")
            .is_full()
    }

    /// Isomorphism test: finitely generated abelian groups are Hopfian, so a
    /// surjection between groups with equal invariants is an isomorphism.
    pub fn is_isomorphism(&self) -> bool {
        self.src == self.dst && self.is_surjective()
    }

    /// Homology `ker(outgoing) / im(incoming)` at the middle of a two-step
    /// sequence of presented groups.
    pub fn homology_of_pair(incoming: &PresentedHom, outgoing: &PresentedHom) -> Result<FgAbGroup> {
        if incoming.dst != outgoing.src {
            return Err(HomalgError::Shape("homology_of_pair: groups differ".into()));
        }
        let g = &incoming.dst;
        let n = g.num_generators();
        let rel_g = Self::relation_lattice(g);
        let rel_out = Self::relation_lattice(&outgoing.dst);
        // Cycles: x with outgoing(x) in the target relation lattice.
        let cycles = rel_out.preimage(&outgoing.mat)?;
        // Boundaries: the image of incoming plus the relations of g.
        let img = Subgroup::image(&incoming.mat);
        let boundaries = img.sum(&rel_g)?;
        if !cycles.contains(&boundaries) {
            return Err(HomalgError::Containment(
                "boundaries are not cycles in presented homology".into(),
            ));
        }
        let (h, _) = quotient(&cycles, &boundaries)?;
        debug_assert_eq!(n, cycles.ambient_rank());
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg(rank: usize, cols: &[&[i64]]) -> Subgroup {
        let m = IntMatrix::from_rows(cols).transpose();
        Subgroup::from_generators(rank, &m).unwrap()
    }

    #[test]
    fn z2_mod_2z2() {
        let a = Subgroup::full(2);
        let b = sg(2, &[&[2, 0], &[0, 2]]);
        let (g, _) = quotient(&a, &b).unwrap();
        assert_eq!(g, FgAbGroup::new(0, vec![BigInt::from(2), BigInt::from(2)]));
    }

    #[test]
    fn quotient_by_self_is_trivial() {
        let a = sg(3, &[&[1, 2, 3], &[0, 4, 1]]);
        let (g, _) = quotient(&a, &a).unwrap();
        assert!(g.is_trivial());
    }

    #[test]
    fn z2_mod_span_1_2_is_free() {
        let a = Subgroup::full(2);
        let b = sg(2, &[&[1, 2]]);
        let (g, _) = quotient(&a, &b).unwrap();
        assert_eq!(g, FgAbGroup::free(1));
    }

    #[test]
    fn containment_error() {
        let a = sg(2, &[&[2, 0]]);
        let b = sg(2, &[&[1, 0]]);
        assert!(matches!(
            quotient(&a, &b),
            Err(HomalgError::Containment(_))
        ));
    }

    #[test]
    fn reduction_map_is_additive() {
        let a = Subgroup::full(2);
        let b = sg(2, &[&[2, 4], &[0, 8]]);
        let (_, pres) = quotient(&a, &b).unwrap();
        let x = [BigInt::from(3), BigInt::from(5)];
        let y = [BigInt::from(-1), BigInt::from(7)];
        let xy = [BigInt::from(2), BigInt::from(12)];
        let rx = pres.reduce(&x).unwrap();
        let ry = pres.reduce(&y).unwrap();
        let rxy = pres.reduce(&xy).unwrap();
        // additivity modulo the divisors
        for (i, &k) in pres.kept.iter().enumerate() {
            let d = &pres.divisors[k];
            let s = &rx[i] + &ry[i] - &rxy[i];
            if d.is_zero() {
                assert!(s.is_zero());
            } else {
                assert!(s.mod_floor(d).is_zero());
            }
        }
    }

    #[test]
    fn generator_lifts_reduce_to_unit_vectors() {
        let a = Subgroup::full(2);
        let b = sg(2, &[&[2, 0], &[0, 6]]);
        let (g, pres) = quotient(&a, &b).unwrap();
        assert_eq!(g, FgAbGroup::new(0, vec![BigInt::from(2), BigInt::from(6)]));
        let lifts = pres.generator_lifts();
        for j in 0..lifts.cols() {
            let coords = pres.reduce(&lifts.column(j)).unwrap();
            for (i, c) in coords.iter().enumerate() {
                assert_eq!(c.is_one(), i == j, "lift {j} reduced to {coords:?}");
            }
        }
    }

    #[test]
    fn homology_multiplication_by_two() {
        // Z --2--> Z --0--> 0
        let d_in = IntMatrix::from_rows(&[&[2]]);
        let d_out = IntMatrix::zeros(0, 1);
        let (g, _) = homology_at(&d_in, &d_out).unwrap();
        assert_eq!(g, FgAbGroup::cyclic(2));
    }

    #[test]
    fn homology_zero_differentials() {
        let d_in = IntMatrix::zeros(3, 0);
        let d_out = IntMatrix::zeros(0, 3);
        let (g, _) = homology_at(&d_in, &d_out).unwrap();
        assert_eq!(g, FgAbGroup::free(3));
    }

    #[test]
    fn homology_exact_at_middle() {
        // Z --(1,1)--> Z^2 --(1,-1)--> Z is exact in the middle
        let d_in = IntMatrix::from_rows(&[&[1], &[1]]);
        let d_out = IntMatrix::from_rows(&[&[1, -1]]);
        let (g, _) = homology_at(&d_in, &d_out).unwrap();
        assert!(g.is_trivial());
    }

    #[test]
    fn homology_rejects_nonzero_composite() {
        let d_in = IntMatrix::from_rows(&[&[1]]);
        let d_out = IntMatrix::from_rows(&[&[1]]);
        assert!(matches!(
            homology_at(&d_in, &d_out),
            Err(HomalgError::NotAComplex { .. })
        ));
    }

    #[test]
    fn direct_sum_normalizes() {
        let a = FgAbGroup::new(1, vec![BigInt::from(2)]);
        let b = FgAbGroup::new(0, vec![BigInt::from(3)]);
        // Z/2 + Z/3 = Z/6
        let s = a.direct_sum(&b);
        assert_eq!(s, FgAbGroup::new(1, vec![BigInt::from(6)]));
    }

    #[test]
    fn presented_homology_matches_direct() {
        // 0 -> Z/4 --*2--> Z/8 --proj--> Z/2 with H = ker/im = <2·(Z/8 gen)>...
        // ker(proj) = <2>, im(*2 from Z/4) = <2>: homology trivial.
        let z4 = FgAbGroup::cyclic(4);
        let z8 = FgAbGroup::cyclic(8);
        let z2 = FgAbGroup::cyclic(2);
        let fin = PresentedHom::new(z4.clone(), z8.clone(), IntMatrix::from_rows(&[&[2]])).unwrap();
        let fout = PresentedHom::new(z8, z2, IntMatrix::from_rows(&[&[1]])).unwrap();
        let h = PresentedHom::homology_of_pair(&fin, &fout).unwrap();
        assert!(h.is_trivial());
    }
}
