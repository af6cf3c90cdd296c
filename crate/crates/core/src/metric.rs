//! Finite pointed (pseudo-)metric spaces with exact rational distances.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::certified::Real;
use crate::error::{Error, Result};
use crate::rational;
use crate::Verdict;

/// A positive exact scaling factor, e.g. `n!`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScaleFactor(BigRational);

impl ScaleFactor {
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_positive() {
            Ok(ScaleFactor(value))
        } else {
            Err(Error::precondition(format!(
                "scale factor must be positive, got {}",
                rational::format(&value)
            )))
        }
    }

    pub fn factorial(n: u64) -> Self {
        ScaleFactor(BigRational::from_integer(rational::factorial(n)))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn recip(&self) -> Self {
        ScaleFactor(self.0.recip())
    }
}

/// Finite pointed space. Distances are stored as a dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<BigRational>,
    basepoint: usize,
    pseudo: bool,
}

impl FiniteMetricSpace {
    /// Builds a space from a square matrix. Only the shape is checked here;
    /// metric axioms are checked by [`validate`](Self::validate).
    pub fn from_rows(
        labels: Vec<String>,
        rows: Vec<Vec<BigRational>>,
        basepoint: usize,
        pseudo: bool,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::structural("a pointed space needs at least one point"));
        }
        if rows.len() != n {
            return Err(Error::structural(format!(
                "distance matrix has {} rows for {} points",
                rows.len(),
                n
            )));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::structural(format!(
                "row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        if basepoint >= n {
            return Err(Error::structural(format!("basepoint index {basepoint} out of range")));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::structural(format!("duplicate label {dup:?}")));
        }
        Ok(FiniteMetricSpace {
            labels,
            dist: rows.into_iter().flatten().collect(),
            basepoint,
            pseudo,
        })
    }

    /// Builds a space from a distance function on indices; only the upper
    /// triangle is queried and mirrored.
    #[allow(clippy::needless_range_loop)]
    pub fn from_fn(
        labels: Vec<String>,
        basepoint: usize,
        mut d: impl FnMut(usize, usize) -> BigRational,
    ) -> Result<Self> {
        let n = labels.len();
        let mut rows = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = d(i, j);
                rows[j][i] = v.clone();
                rows[i][j] = v;
            }
        }
        Self::from_rows(labels, rows, basepoint, false)
    }

    pub fn singleton(label: impl Into<String>) -> Self {
        FiniteMetricSpace {
            labels: vec![label.into()],
            dist: vec![BigRational::zero()],
            basepoint: 0,
            pseudo: false,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn is_pseudo(&self) -> bool {
        self.pseudo
    }

    pub fn d(&self, i: usize, j: usize) -> &BigRational {
        &self.dist[i * self.len() + j]
    }

    pub fn to_base(&self, i: usize) -> &BigRational {
        self.d(i, self.basepoint)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigRational]> {
        self.dist.chunks(self.len())
    }

    pub fn diameter(&self) -> BigRational {
        self.dist.iter().max().cloned().unwrap_or_else(BigRational::zero)
    }

    /// Smallest non-zero distance, if any pair is separated.
    pub fn min_positive_distance(&self) -> Option<BigRational> {
        self.dist.iter().filter(|d| d.is_positive()).min().cloned()
    }

    /// First violated axiom, described, or `None` when all axioms hold.
    pub fn first_violation(&self) -> Option<String> {
        let n = self.len();
        for i in 0..n {
            if !self.d(i, i).is_zero() {
                return Some(format!("d({0},{0}) ≠ 0", self.labels[i]));
            }
            for j in 0..n {
                let dij = self.d(i, j);
                if dij.is_negative() {
                    return Some(format!("d({},{}) < 0", self.labels[i], self.labels[j]));
                }
                if dij != self.d(j, i) {
                    return Some(format!("d({},{}) not symmetric", self.labels[i], self.labels[j]));
                }
                if !self.pseudo && i != j && dij.is_zero() {
                    return Some(format!(
                        "distinct points {} and {} at distance 0",
                        self.labels[i], self.labels[j]
                    ));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.d(i, j) > &(self.d(i, k) + self.d(k, j)) {
                        return Some(format!(
                            "triangle inequality fails for {}, {} via {}",
                            self.labels[i], self.labels[j], self.labels[k]
                        ));
                    }
                }
            }
        }
        None
    }

    /// Exact check of every metric axiom.
    pub fn validate(&self) -> Verdict {
        Verdict::from_bool(self.first_violation().is_none())
    }

    /// Induced subspace on `keep` (ascending, deduplicated). The basepoint is
    /// always retained.
    pub fn subspace(&self, keep: &[usize]) -> Self {
        let mut idx: Vec<usize> = keep.to_vec();
        idx.push(self.basepoint);
        idx.sort_unstable();
        idx.dedup();
        let basepoint = idx.binary_search(&self.basepoint).unwrap();
        let mut dist = Vec::with_capacity(idx.len() * idx.len());
        for &i in &idx {
            for &j in &idx {
                dist.push(self.d(i, j).clone());
            }
        }
        FiniteMetricSpace {
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            dist,
            basepoint,
            pseudo: self.pseudo,
        }
    }

    /// `{y : rlo ≤ d(y,e) ≤ rhi} ∪ {e}`; an empty window leaves `{e}`.
    pub fn annulus(&self, rlo: &BigRational, rhi: &BigRational) -> Self {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| {
                let r = self.to_base(i);
                rlo <= r && r <= rhi
            })
            .collect();
        self.subspace(&keep)
    }

    /// Annulus with real (possibly irrational) endpoints, decided through
    /// certified enclosures. Fails with [`Error::Undecided`] only if some
    /// distance cannot be separated from an endpoint within `max_bits`.
    pub fn annulus_certified(&self, lo: &Real, hi: &Real, max_bits: u32) -> Result<Self> {
        let mut keep = Vec::new();
        for i in 0..self.len() {
            if i == self.basepoint {
                continue;
            }
            if in_window(self.to_base(i), lo, hi, max_bits)? {
                keep.push(i);
            }
        }
        Ok(self.subspace(&keep))
    }

    /// All distances multiplied by `c`.
    pub fn rescale(&self, c: &ScaleFactor) -> Self {
        FiniteMetricSpace {
            labels: self.labels.clone(),
            dist: self.dist.iter().map(|d| d * c.value()).collect(),
            basepoint: self.basepoint,
            pseudo: self.pseudo,
        }
    }

    /// Indices of the closed ball `B(center, r)`.
    pub fn ball(&self, center: usize, r: &BigRational) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.d(center, i) <= r).collect()
    }

    /// Closed ball around the basepoint as a pointed subspace.
    pub fn base_ball(&self, r: &BigRational) -> Self {
        self.subspace(&self.ball(self.basepoint, r))
    }

    /// Copy with new labels (same length).
    pub fn relabel(&self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::structural("relabel: wrong number of labels"));
        }
        let rows = self.rows().map(|r| r.to_vec()).collect();
        Self::from_rows(labels, rows, self.basepoint, self.pseudo)
    }
}

/// Certified test `lo ≤ r ≤ hi` for real window endpoints.
pub fn in_window(r: &BigRational, lo: &Real, hi: &Real, max_bits: u32) -> Result<bool> {
    let undecided = || {
        Error::Undecided(format!(
            "distance {} against window endpoint",
            rational::format(r)
        ))
    };
    let above_lo = lo.cmp_rational(r, max_bits).ok_or_else(undecided)? != Ordering::Greater;
    if !above_lo {
        return Ok(false);
    }
    Ok(hi.cmp_rational(r, max_bits).ok_or_else(undecided)? != Ordering::Less)
}

/// Result of amalgamating pointed spaces along their basepoints.
#[derive(Debug, Clone)]
pub struct Wedge {
    pub space: FiniteMetricSpace,
    /// Part index of each point; `None` for the shared basepoint.
    pub part_of: Vec<Option<usize>>,
    /// Index of each point inside its part (the basepoint maps to each part's
    /// own basepoint, recorded here as `None`).
    pub origin: Vec<Option<usize>>,
}

/// Disjoint union with basepoints identified. Within a part the metric is the
/// part's own; across parts `d(x, x') = d(x, e) + d(e, x')`.
///
/// Labels are `label@k` for part `k`; the shared basepoint keeps the first
/// part's basepoint label (or `e` when `parts` is empty).
pub fn wedge(parts: &[FiniteMetricSpace]) -> Wedge {
    let base_label = parts
        .first()
        .map(|p| p.label(p.basepoint()).to_string())
        .unwrap_or_else(|| "e".to_string());
    wedge_labeled(parts, base_label, |k, l| format!("{l}@{k}"))
}

pub(crate) fn wedge_labeled(
    parts: &[FiniteMetricSpace],
    base_label: String,
    mut label: impl FnMut(usize, &str) -> String,
) -> Wedge {
    let mut labels = vec![base_label];
    let mut part_of = vec![None];
    let mut origin = vec![None];
    for (k, p) in parts.iter().enumerate() {
        for i in 0..p.len() {
            if i != p.basepoint() {
                labels.push(label(k, p.label(i)));
                part_of.push(Some(k));
                origin.push(Some(i));
            }
        }
    }
    let n = labels.len();
    let to_base = |idx: usize| -> BigRational {
        match (part_of[idx], origin[idx]) {
            (Some(k), Some(i)) => parts[k].to_base(i).clone(),
            _ => BigRational::zero(),
        }
    };
    let mut dist = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let d = match (part_of[a], part_of[b]) {
                _ if a == b => BigRational::zero(),
                (Some(ka), Some(kb)) if ka == kb => {
                    parts[ka].d(origin[a].unwrap(), origin[b].unwrap()).clone()
                }
                _ => to_base(a) + to_base(b),
            };
            dist.push(d);
        }
    }
    let pseudo = parts.iter().any(|p| p.is_pseudo());
    Wedge {
        space: FiniteMetricSpace {
            labels,
            dist,
            basepoint: 0,
            pseudo,
        },
        part_of,
        origin,
    }
}

/// Points of the integer line `0, 1, …, n−1` with basepoint `0`.
pub fn line(n: usize) -> FiniteMetricSpace {
    line_at(&(0..n as i64).map(rational::int).collect::<Vec<_>>())
}

/// Points at the given rational coordinates on a line; basepoint is the
/// first coordinate.
pub fn line_at(coords: &[BigRational]) -> FiniteMetricSpace {
    let labels = (0..coords.len()).map(|i| format!("p{i}")).collect();
    FiniteMetricSpace::from_fn(labels, 0, |i, j| (&coords[i] - &coords[j]).abs())
        .expect("line coordinates form a valid shape")
}

/// Two-point space `{e, p}` with `d(e, p) = len`.
pub fn segment(len: BigRational) -> FiniteMetricSpace {
    let labels = vec!["e".to_string(), "p".to_string()];
    FiniteMetricSpace::from_fn(labels, 0, |_, _| len.clone()).unwrap()
}

impl Default for FiniteMetricSpace {
    fn default() -> Self {
        Self::singleton("e")
    }
}

impl ScaleFactor {
    pub fn one() -> Self {
        ScaleFactor(BigRational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::DEFAULT_MAX_BITS;
    use crate::rational::{int, rat};

    fn space(rows: &[&[i64]]) -> FiniteMetricSpace {
        let labels = (0..rows.len()).map(|i| format!("x{i}")).collect();
        let rows = rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
        FiniteMetricSpace::from_rows(labels, rows, 0, false).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert_eq!(FiniteMetricSpace::singleton("e").validate(), Verdict::Holds);
        let bad = space(&[&[0, 1, 3], &[1, 0, 1], &[3, 1, 0]]);
        assert_eq!(bad.validate(), Verdict::Fails);
        assert!(bad.first_violation().unwrap().contains("triangle"));
    }

    #[test]
    fn validate_unit_square_l1() {
        // Unit square corners under the L1 metric: adjacent 1, diagonal 2.
        let sq = space(&[&[0, 1, 1, 2], &[1, 0, 2, 1], &[1, 2, 0, 1], &[2, 1, 1, 0]]);
        assert_eq!(sq.validate(), Verdict::Holds);
    }

    #[test]
    fn validate_unit_square_euclidean_certified() {
        // Euclidean diagonal √2 is enclosed by 7/5 < √2 < 3/2; the
        // inequalities below hold for every value in that bracket, so both
        // rational endpoints certify the axioms.
        for diag in [rat(7, 5), rat(3, 2)] {
            let one = int(1);
            let z = int(0);
            let rows = vec![
                vec![z.clone(), one.clone(), one.clone(), diag.clone()],
                vec![one.clone(), z.clone(), diag.clone(), one.clone()],
                vec![one.clone(), diag.clone(), z.clone(), one.clone()],
                vec![diag.clone(), one.clone(), one.clone(), z.clone()],
            ];
            let labels = ["00", "10", "01", "11"].map(String::from).to_vec();
            let sq = FiniteMetricSpace::from_rows(labels, rows, 0, false).unwrap();
            assert_eq!(sq.validate(), Verdict::Holds);
        }
        assert!(rat(49, 25) < int(2) && int(2) < rat(9, 4));
    }

    #[test]
    fn structural_errors_are_not_verdicts() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let err = FiniteMetricSpace::from_rows(labels.clone(), vec![vec![int(0)]], 0, false);
        assert!(matches!(err, Err(Error::Structural(_))));
        let err = FiniteMetricSpace::from_rows(
            labels,
            vec![vec![int(0), int(1)], vec![int(1)]],
            0,
            false,
        );
        assert!(matches!(err, Err(Error::Structural(_))));
    }

    #[test]
    fn pseudo_flag() {
        let rows = vec![vec![int(0), int(0)], vec![int(0), int(0)]];
        let labels = vec!["a".to_string(), "b".to_string()];
        let strict = FiniteMetricSpace::from_rows(labels.clone(), rows.clone(), 0, false).unwrap();
        assert_eq!(strict.validate(), Verdict::Fails);
        let pseudo = FiniteMetricSpace::from_rows(labels, rows, 0, true).unwrap();
        assert_eq!(pseudo.validate(), Verdict::Holds);
    }

    #[test]
    fn annulus_examples() {
        let y = line(4);
        assert_eq!(y.annulus(&int(1), &int(2)).labels(), ["p0", "p1", "p2"]);
        assert_eq!(y.annulus(&int(1), &int(1)).labels(), ["p0", "p1"]);
        assert_eq!(y.annulus(&int(2), &int(1)).labels(), ["p0"]);
    }

    #[test]
    fn certified_annulus_matches_rational_when_endpoints_rational() {
        let y = line(6);
        let a = y
            .annulus_certified(&Real::exact(int(2)), &Real::exact(int(4)), DEFAULT_MAX_BITS)
            .unwrap();
        assert_eq!(a, y.annulus(&int(2), &int(4)));
        // [1/ln 5, ln 5] ≈ [0.621, 1.609] keeps only p1.
        let b = y
            .annulus_certified(&Real::ln_int(5).recip(), &Real::ln_int(5), DEFAULT_MAX_BITS)
            .unwrap();
        assert_eq!(b.labels(), ["p0", "p1"]);
    }

    #[test]
    fn rescale_examples() {
        let y = line(4);
        assert_eq!(y.rescale(&ScaleFactor::one()), y);
        let half = segment(rat(1, 2)).rescale(&ScaleFactor::new(int(6)).unwrap());
        assert_eq!(half.d(0, 1), &int(3));
        let yn = y.annulus(&int(1), &int(2)).rescale(&ScaleFactor::factorial(3));
        for i in 0..yn.len() {
            for j in 0..yn.len() {
                assert_eq!(yn.d(i, j), &(y.d(i, j) * int(6)));
            }
        }
        assert!(ScaleFactor::new(int(0)).is_err());
    }

    #[test]
    fn wedge_examples() {
        let w = wedge(&[segment(int(1))]);
        assert_eq!(w.space.len(), 2);
        assert_eq!(w.space.d(0, 1), &int(1));

        let w = wedge(&[segment(int(1)), segment(int(2))]);
        assert_eq!(w.space.d(1, 2), &int(3));
        assert_eq!(w.part_of, vec![None, Some(0), Some(1)]);

        let star = wedge(&[segment(int(1)), segment(int(2)), segment(int(3))]);
        assert_eq!(star.space.len(), 4);
        assert_eq!(star.space.validate(), Verdict::Holds);
        assert_eq!(star.space.d(2, 3), &int(5));
    }

    #[test]
    fn wedge_of_nothing_is_a_point() {
        let w = wedge(&[]);
        assert_eq!(w.space.len(), 1);
        assert_eq!(w.space.label(0), "e");
    }

    #[test]
    fn ball_and_diameter() {
        let y = line(5);
        assert_eq!(y.ball(2, &int(1)), vec![1, 2, 3]);
        assert_eq!(y.diameter(), int(4));
        assert_eq!(y.min_positive_distance(), Some(int(1)));
        assert_eq!(y.base_ball(&int(2)).len(), 3);
    }
}
