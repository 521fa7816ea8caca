//! JSON wire formats.
//!
//! Matrices serialize as arrays of rows of decimal strings, so no precision
//! is ever lost to a float or a fixed-width integer. Degree- and
//! level-indexed maps use string keys; everything is emitted from ordered
//! maps, so output is deterministic and every emitted document re-ingests to
//! an equal value. Ingestion runs the full validators, so a structurally
//! broken document is rejected with the offending invariant named.
//!
//! Schemas:
//! * complex: `{"support":[lo,hi],"ranks":{"n":r},"differentials":{"n":[["1","0"],...]}}`
//! * chain map: `{"source":C,"target":C,"components":{"n":[[...]]}}`
//! * filtered complex: `{"ambient":C,"levels":{"p":{"n":[[column],...]}}}`
//! * double complex: `{"columns":{"i":C},"horizontal":{"i":{"components":...}}}`
//! * page: `{"r":r,"entries":{"p,q":{"rank":r,"torsion":["2"]}},"differentials":{"p,q":[[...]]}}`

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::complexes::{Complex, ComplexMap};
use crate::error::{HomalgError, Result};
use crate::exactlin::{FgAbGroup, IntMatrix, Subgroup};
use crate::filtered::{DoubleComplex, FilteredComplex};
use crate::koszul::{Generator, NcPoly};
use crate::specseq::{ConvergenceReport, Page};

fn parse_bigint<E: DeError>(s: &str) -> std::result::Result<BigInt, E> {
    BigInt::from_str(s).map_err(|_| E::custom(format!("not a decimal integer: {s}")))
}

fn parse_i64_key<E: DeError>(s: &str) -> std::result::Result<i64, E> {
    s.parse::<i64>()
        .map_err(|_| E::custom(format!("not an integer key: {s}")))
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self[(i, j)].to_string()).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(deserializer)?;
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                m[(i, j)] = parse_bigint::<D::Error>(s)?;
            }
        }
        Ok(m)
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexDoc {
    support: (i64, i64),
    ranks: BTreeMap<String, usize>,
    differentials: BTreeMap<String, IntMatrix>,
}

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (lo, hi) = self.support().unwrap_or((0, -1));
        let doc = ComplexDoc {
            support: (lo, hi),
            ranks: self.degrees().map(|n| (n.to_string(), self.rank(n))).collect(),
            differentials: self
                .degrees()
                .filter(|&n| n < hi && !self.d(n).is_empty())
                .map(|n| (n.to_string(), self.d(n)))
                .collect(),
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = ComplexDoc::deserialize(deserializer)?;
        let (lo, hi) = doc.support;
        if hi < lo {
            return Ok(Complex::zero());
        }
        let mut ranks = vec![0usize; (hi - lo + 1) as usize];
        for (k, r) in &doc.ranks {
            let n = parse_i64_key::<D::Error>(k)?;
            if n < lo || n > hi {
                return Err(D::Error::custom(format!("rank key {n} outside support")));
            }
            ranks[(n - lo) as usize] = *r;
        }
        let mut diffs = Vec::with_capacity((hi - lo) as usize);
        for n in lo..hi {
            let d = doc
                .differentials
                .get(&n.to_string())
                .cloned()
                .unwrap_or_else(|| {
                    IntMatrix::zeros(ranks[(n - lo + 1) as usize], ranks[(n - lo) as usize])
                });
            diffs.push(d);
        }
        Complex::new(lo, ranks, diffs).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct MapDoc {
    source: Complex,
    target: Complex,
    components: BTreeMap<String, IntMatrix>,
}

impl Serialize for ComplexMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let doc = MapDoc {
            source: self.source().clone(),
            target: self.target().clone(),
            components: self
                .components()
                .iter()
                .map(|(n, m)| (n.to_string(), m.clone()))
                .collect(),
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = MapDoc::deserialize(deserializer)?;
        let mut comps = BTreeMap::new();
        for (k, m) in doc.components {
            comps.insert(parse_i64_key::<D::Error>(&k)?, m);
        }
        ComplexMap::new(doc.source, doc.target, comps).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct FilteredDoc {
    ambient: Complex,
    levels: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
}

impl Serialize for FilteredComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut levels = BTreeMap::new();
        for p in self.p_min()..=self.p_max() {
            let mut per_degree = BTreeMap::new();
            for n in self.ambient().degrees() {
                let sub = self.level(p, n);
                let basis = sub.basis();
                let cols: Vec<Vec<String>> = (0..basis.cols())
                    .map(|j| basis.column(j).iter().map(BigInt::to_string).collect())
                    .collect();
                per_degree.insert(n.to_string(), cols);
            }
            levels.insert(p.to_string(), per_degree);
        }
        FilteredDoc {
            ambient: self.ambient().clone(),
            levels,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FilteredComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = FilteredDoc::deserialize(deserializer)?;
        if doc.levels.is_empty() {
            return Err(D::Error::custom("a filtration needs at least one level"));
        }
        let mut ps = Vec::new();
        for k in doc.levels.keys() {
            ps.push(parse_i64_key::<D::Error>(k)?);
        }
        ps.sort_unstable();
        let p_min = ps[0];
        let p_max = *ps.last().unwrap();
        if ps.len() as i64 != p_max - p_min + 1 {
            return Err(D::Error::custom("filtration levels must be contiguous"));
        }
        let degrees: Vec<i64> = doc.ambient.degrees().collect();
        let mut levels = Vec::new();
        for p in p_min..=p_max {
            let per_degree_doc = &doc.levels[&p.to_string()];
            let mut per_degree = Vec::new();
            for &n in &degrees {
                let rank = doc.ambient.rank(n);
                let sub = match per_degree_doc.get(&n.to_string()) {
                    None => Subgroup::zero(rank),
                    Some(cols) => {
                        let mut basis = IntMatrix::zeros(rank, cols.len());
                        for (j, col) in cols.iter().enumerate() {
                            if col.len() != rank {
                                return Err(D::Error::custom(format!(
                                    "level {p}, degree {n}: column of length {} in rank {rank}",
                                    col.len()
                                )));
                            }
                            for (i, s) in col.iter().enumerate() {
                                basis[(i, j)] = parse_bigint::<D::Error>(s)?;
                            }
                        }
                        Subgroup::from_generators(rank, &basis)
                            .map_err(|e| D::Error::custom(e.to_string()))?
                    }
                };
                per_degree.push(sub);
            }
            levels.push(per_degree);
        }
        FilteredComplex::new(doc.ambient, p_min, levels)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct HorizontalDoc {
    components: BTreeMap<String, IntMatrix>,
}

#[derive(Serialize, Deserialize)]
struct DoubleDoc {
    columns: BTreeMap<String, Complex>,
    horizontal: BTreeMap<String, HorizontalDoc>,
}

impl Serialize for DoubleComplex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut columns = BTreeMap::new();
        let mut horizontal = BTreeMap::new();
        for i in self.i_min()..=self.i_max() {
            columns.insert(i.to_string(), self.column(i).clone());
            if let Some(h) = self.horizontal(i) {
                horizontal.insert(
                    i.to_string(),
                    HorizontalDoc {
                        components: h
                            .components()
                            .iter()
                            .map(|(n, m)| (n.to_string(), m.clone()))
                            .collect(),
                    },
                );
            }
        }
        DoubleDoc {
            columns,
            horizontal,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DoubleComplex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = DoubleDoc::deserialize(deserializer)?;
        if doc.columns.is_empty() {
            return Err(D::Error::custom("a double complex needs a column"));
        }
        let mut is = Vec::new();
        for k in doc.columns.keys() {
            is.push(parse_i64_key::<D::Error>(k)?);
        }
        is.sort_unstable();
        let i_min = is[0];
        let i_max = *is.last().unwrap();
        if is.len() as i64 != i_max - i_min + 1 {
            return Err(D::Error::custom("column indices must be contiguous"));
        }
        let columns: Vec<Complex> = (i_min..=i_max)
            .map(|i| doc.columns[&i.to_string()].clone())
            .collect();
        let mut horizontal = Vec::new();
        for i in i_min..i_max {
            let comps = match doc.horizontal.get(&i.to_string()) {
                None => BTreeMap::new(),
                Some(h) => {
                    let mut out = BTreeMap::new();
                    for (k, m) in &h.components {
                        out.insert(parse_i64_key::<D::Error>(k)?, m.clone());
                    }
                    out
                }
            };
            horizontal.push(
                ComplexMap::new(
                    columns[(i - i_min) as usize].clone(),
                    columns[(i - i_min + 1) as usize].clone(),
                    comps,
                )
                .map_err(|e| D::Error::custom(e.to_string()))?,
            );
        }
        DoubleComplex::new(i_min, columns, horizontal).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Canonical-form group as `{"rank":r,"torsion":["2","4"]}`.
pub fn group_to_json(g: &FgAbGroup) -> serde_json::Value {
    serde_json::json!({
        "rank": g.free_rank(),
        "torsion": g.torsion().iter().map(BigInt::to_string).collect::<Vec<_>>(),
    })
}

impl Serialize for Page {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct PageDoc {
            r: i64,
            entries: BTreeMap<String, serde_json::Value>,
            differentials: BTreeMap<String, IntMatrix>,
        }
        let entries = self
            .entries
            .iter()
            .map(|(&(p, q), e)| (format!("{p},{q}"), group_to_json(&e.group)))
            .collect();
        let differentials = self
            .differentials
            .iter()
            .map(|(&(p, q), m)| (format!("{p},{q}"), m.clone()))
            .collect();
        PageDoc {
            r: self.r,
            entries,
            differentials,
        }
        .serialize(serializer)
    }
}

impl Serialize for ConvergenceReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Comparison {
            total_degree: i64,
            p: i64,
            e_infinity: serde_json::Value,
            graded_homology: serde_json::Value,
            matched: bool,
        }
        #[derive(Serialize)]
        struct ReportDoc {
            stabilized_at: i64,
            e_infinity: Page,
            comparisons: Vec<Comparison>,
            all_match: bool,
        }
        ReportDoc {
            stabilized_at: self.stabilized_at,
            e_infinity: self.e_infinity.clone(),
            comparisons: self
                .comparisons
                .iter()
                .map(|c| Comparison {
                    total_degree: c.total_degree,
                    p: c.p,
                    e_infinity: group_to_json(&c.e_infinity),
                    graded_homology: group_to_json(&c.graded_homology),
                    matched: c.matched,
                })
                .collect(),
            all_match: self.all_match,
        }
        .serialize(serializer)
    }
}

/// Noncommutative polynomials as sorted `[{"word":["e1","e2"],"coeff":"-1"}]`.
pub fn ncpoly_to_json(p: &NcPoly, gens: &[Generator]) -> serde_json::Value {
    let terms: Vec<serde_json::Value> = p
        .terms()
        .map(|(w, c)| {
            serde_json::json!({
                "word": w.iter().map(|&i| gens[i as usize].name.clone()).collect::<Vec<_>>(),
                "coeff": c.to_string(),
            })
        })
        .collect();
    serde_json::Value::Array(terms)
}

/// Bigraded homology tables keyed `"t,w"`, deterministic ordering.
pub fn table_to_json(table: &BTreeMap<(i64, i64), FgAbGroup>) -> serde_json::Value {
    let map: BTreeMap<String, serde_json::Value> = table
        .iter()
        .map(|(&(t, w), g)| (format!("{t},{w}"), group_to_json(g)))
        .collect();
    serde_json::to_value(map).expect("tables serialize")
}

/// Parse a JSON document into any of the ingestable types, reporting the
/// path to the offending element on failure.
pub fn from_json_str<'de, T: Deserialize<'de>>(s: &'de str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(s);
    serde_path_to_error::deserialize(de)
        .map_err(|e| HomalgError::Input(format!("at {}: {}", e.path(), e.inner())))
}

/// Serialize with a trailing newline, pretty and deterministic.
pub fn to_json_string<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)
        .map_err(|e| HomalgError::Input(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}
