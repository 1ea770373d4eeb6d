//! Fuzzy classifications of `m` objects into `p` types, and profiles assigning one
//! classification to every individual of `[0, 1]`.

mod generators;
mod interval;

pub use generators::{
    agreeing_pair, constant_column_profile, constant_column_profile_with, example1_profile,
    fill_with_row, indicator_probe_profile, random_profile, uniform_point,
};
pub(crate) use generators::{Locks, ProfileDraft};
pub use interval::IntervalSet;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{PiecewiseFn, DEFAULT_TOL};

/// Numbers of objects and types, with `m >= p >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub m: usize,
    pub p: usize,
}

impl Shape {
    pub fn new(m: usize, p: usize) -> Result<Self> {
        if p < 2 || m < p {
            return Err(Error::Shape(format!(
                "need m >= p >= 2, got m = {m}, p = {p}"
            )));
        }
        Ok(Shape { m, p })
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.m, self.p)
    }
}

/// One element of the set of fuzzy classifications: an `m x p` matrix whose rows
/// sum to one and whose columns sum to at least one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassPoint {
    m: usize,
    p: usize,
    values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum ClassPointViolation {
    EntryRange { object: usize, ty: usize, value: f64 },
    RowSum { object: usize, sum: f64 },
    ColumnSum { ty: usize, sum: f64 },
}

impl fmt::Display for ClassPointViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EntryRange { object, ty, value } => {
                write!(f, "entry ({object}, {ty}) = {value} is outside [0, 1]")
            }
            Self::RowSum { object, sum } => write!(f, "row {object} sums to {sum}, expected 1"),
            Self::ColumnSum { ty, sum } => write!(f, "column {ty} sums to {sum} < 1"),
        }
    }
}

impl ClassPoint {
    /// Builds a matrix without checking the classification constraints; only the
    /// rectangular shape is enforced.
    pub fn from_rows(values: Vec<Vec<f64>>) -> Result<Self> {
        let m = values.len();
        let p = values.first().map_or(0, Vec::len);
        if values.iter().any(|r| r.len() != p) {
            return Err(Error::Shape("rows of unequal length".into()));
        }
        Shape::new(m, p)?;
        Ok(ClassPoint { m, p, values })
    }

    /// Builds a matrix and checks that it is a fuzzy classification.
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        let c = Self::from_rows(values)?;
        c.validate()
            .map_err(|v| Error::argument(format!("not a fuzzy classification: {v}")))?;
        Ok(c)
    }

    /// The classification putting every object entirely in type 0 except object
    /// `t` for `t < p`, which goes to type `t`.
    pub fn vertex_cover(shape: Shape) -> Self {
        let values = (0..shape.m)
            .map(|j| unit_row(shape.p, if j < shape.p { j } else { 0 }))
            .collect();
        ClassPoint {
            m: shape.m,
            p: shape.p,
            values,
        }
    }

    pub fn shape(&self) -> Shape {
        Shape {
            m: self.m,
            p: self.p,
        }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    pub fn get(&self, j: usize, t: usize) -> f64 {
        self.values[j][t]
    }

    pub fn column_sum(&self, t: usize) -> f64 {
        self.values.iter().map(|r| r[t]).sum()
    }

    pub fn validate(&self) -> Result<(), ClassPointViolation> {
        for (j, row) in self.values.iter().enumerate() {
            for (t, &v) in row.iter().enumerate() {
                if !(-DEFAULT_TOL..=1.0 + DEFAULT_TOL).contains(&v) {
                    return Err(ClassPointViolation::EntryRange { object: j, ty: t, value: v });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > DEFAULT_TOL {
                return Err(ClassPointViolation::RowSum { object: j, sum });
            }
        }
        for t in 0..self.p {
            let sum = self.column_sum(t);
            if sum < 1.0 - DEFAULT_TOL {
                return Err(ClassPointViolation::ColumnSum { ty: t, sum });
            }
        }
        Ok(())
    }

    /// Largest entrywise absolute difference. Shapes must agree.
    pub fn max_abs_diff(&self, other: &ClassPoint) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

pub(crate) fn unit_row(p: usize, k: usize) -> Vec<f64> {
    let mut r = vec![0.0; p];
    r[k] = 1.0;
    r
}

/// A continuum profile: one entry function `i -> c_i(x_j)_t` per object and type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileRepr", into = "ProfileRepr")]
pub struct Profile {
    m: usize,
    p: usize,
    entries: Vec<Vec<PiecewiseFn>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileRepr {
    m: usize,
    p: usize,
    objects: Vec<ObjectRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectRepr {
    types: Vec<PiecewiseFn>,
}

impl TryFrom<ProfileRepr> for Profile {
    type Error = Error;

    fn try_from(r: ProfileRepr) -> Result<Self> {
        let p = Profile::new(r.objects.into_iter().map(|o| o.types).collect())?;
        if p.m != r.m || p.p != r.p {
            return Err(Error::Shape(format!(
                "declared {}x{} but objects form {}x{}",
                r.m, r.p, p.m, p.p
            )));
        }
        Ok(p)
    }
}

impl From<Profile> for ProfileRepr {
    fn from(p: Profile) -> Self {
        ProfileRepr {
            m: p.m,
            p: p.p,
            objects: p
                .entries
                .into_iter()
                .map(|types| ObjectRepr { types })
                .collect(),
        }
    }
}

impl Profile {
    /// Checks the rectangular shape only; see [`validate_profile`] for the
    /// classification constraints.
    pub fn new(entries: Vec<Vec<PiecewiseFn>>) -> Result<Self> {
        let m = entries.len();
        let p = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != p) {
            return Err(Error::Shape("objects with unequal type counts".into()));
        }
        Shape::new(m, p)?;
        Ok(Profile { m, p, entries })
    }

    /// Every individual holds the same classification.
    pub fn constant(point: &ClassPoint) -> Self {
        Profile {
            m: point.m,
            p: point.p,
            entries: point
                .values
                .iter()
                .map(|r| r.iter().map(|&v| PiecewiseFn::constant(v)).collect())
                .collect(),
        }
    }

    pub fn shape(&self) -> Shape {
        Shape {
            m: self.m,
            p: self.p,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn entry(&self, j: usize, t: usize) -> &PiecewiseFn {
        &self.entries[j][t]
    }

    pub fn row(&self, j: usize) -> &[PiecewiseFn] {
        &self.entries[j]
    }

    pub fn entries(&self) -> &[Vec<PiecewiseFn>] {
        &self.entries
    }

    /// The classification `c_i` of individual `i`, atoms respected.
    pub fn at(&self, i: f64) -> Result<ClassPoint> {
        if !(0.0..=1.0).contains(&i) {
            return Err(Error::Domain(i));
        }
        Ok(ClassPoint {
            m: self.m,
            p: self.p,
            values: self
                .entries
                .iter()
                .map(|r| r.iter().map(|f| f.value_at(i)).collect())
                .collect(),
        })
    }

    pub fn map_entries(&self, mut f: impl FnMut(&PiecewiseFn) -> PiecewiseFn) -> Profile {
        Profile {
            m: self.m,
            p: self.p,
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(&mut f).collect())
                .collect(),
        }
    }

    /// Exchanges the individuals of the blocks `[start, start + len]` and its translate by `shift`.
    pub fn swap_blocks(&self, start: f64, len: f64, shift: f64) -> Result<Profile> {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|f| f.swap_blocks(start, len, shift)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(Profile {
            m: self.m,
            p: self.p,
            entries,
        })
    }

    /// Relabels objects `x` and `y`.
    pub fn swap_objects(&self, x: usize, y: usize) -> Profile {
        let mut entries = self.entries.clone();
        entries.swap(x, y);
        Profile {
            m: self.m,
            p: self.p,
            entries,
        }
    }

    pub fn row_sum(&self, j: usize) -> PiecewiseFn {
        let terms: Vec<(f64, &PiecewiseFn)> = self.entries[j].iter().map(|f| (1.0, f)).collect();
        PiecewiseFn::linear_combination(&terms)
    }

    pub fn column_sum(&self, t: usize) -> PiecewiseFn {
        let terms: Vec<(f64, &PiecewiseFn)> = self.entries.iter().map(|r| (1.0, &r[t])).collect();
        PiecewiseFn::linear_combination(&terms)
    }
}

/// The first constraint a profile breaks, with its witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum ProfileViolation {
    EntryRange {
        object: usize,
        ty: usize,
        location: f64,
        observed: f64,
    },
    RowSum {
        object: usize,
        location: f64,
        observed: f64,
    },
    ColumnSum {
        ty: usize,
        location: f64,
        observed: f64,
    },
    /// With `m = p` every column sum must be identically one.
    SquareColumn {
        ty: usize,
        location: f64,
        observed: f64,
    },
}

impl fmt::Display for ProfileViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::EntryRange { object, ty, location, observed } => write!(
                f,
                "entry ({object}, {ty}) takes {observed} at i = {location}, outside [0, 1]"
            ),
            Self::RowSum { object, location, observed } => {
                write!(f, "row {object} sums to {observed} at i = {location}")
            }
            Self::ColumnSum { ty, location, observed } => {
                write!(f, "column {ty} sums to {observed} < 1 at i = {location}")
            }
            Self::SquareColumn { ty, location, observed } => write!(
                f,
                "column {ty} of a square profile sums to {observed} at i = {location}"
            ),
        }
    }
}

/// Checks both model constraints for every individual, atom points included.
pub fn validate_profile(c: &Profile) -> Result<(), ProfileViolation> {
    for (j, row) in c.entries.iter().enumerate() {
        for (t, f) in row.iter().enumerate() {
            if let Err(v) = f.check_codomain(0.0, 1.0) {
                return Err(ProfileViolation::EntryRange {
                    object: j,
                    ty: t,
                    location: v.location,
                    observed: v.observed,
                });
            }
        }
    }
    for j in 0..c.m {
        let sum = c.row_sum(j);
        if let Some((location, observed)) = deviation_from_one(&sum, DEFAULT_TOL) {
            return Err(ProfileViolation::RowSum { object: j, location, observed });
        }
    }
    for t in 0..c.p {
        let sum = c.column_sum(t);
        let e = sum.ess_extrema();
        if e.min < 1.0 - DEFAULT_TOL {
            return Err(ProfileViolation::ColumnSum {
                ty: t,
                location: e.argmin,
                observed: e.min,
            });
        }
        if let Some(a) = sum.atoms().iter().find(|a| a.value < 1.0 - DEFAULT_TOL) {
            return Err(ProfileViolation::ColumnSum {
                ty: t,
                location: a.point,
                observed: a.value,
            });
        }
        if c.m == c.p {
            if let Some((location, observed)) = deviation_from_one(&sum, c.m as f64 * DEFAULT_TOL) {
                return Err(ProfileViolation::SquareColumn { ty: t, location, observed });
            }
        }
    }
    Ok(())
}

/// First place where `f` is not identically one: a refined piece with a coefficient
/// of `f - 1` above `tol`, or an atom value off by more than `tol`.
fn deviation_from_one(f: &PiecewiseFn, tol: f64) -> Option<(f64, f64)> {
    for (w, piece) in f.breakpoints().windows(2).zip(f.pieces()) {
        let diff = piece.combine(1.0, &crate::function_space::Poly::constant(1.0), -1.0);
        if diff.max_abs_coeff() > tol {
            let e = diff.extrema(w[0], w[1]);
            let x = if e.max.abs() >= e.min.abs() { e.argmax } else { e.argmin };
            return Some((x, piece.eval(x)));
        }
    }
    f.atoms()
        .iter()
        .find(|a| (a.value - 1.0).abs() > tol)
        .map(|a| (a.point, a.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::Poly;

    #[test]
    fn class_point_validation() {
        assert!(ClassPoint::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).is_ok());
        let bad_row = ClassPoint::from_rows(vec![vec![0.5, 0.4], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(
            bad_row.validate(),
            Err(ClassPointViolation::RowSum { object: 0, .. })
        ));
        let bad_col =
            ClassPoint::from_rows(vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            bad_col.validate(),
            Err(ClassPointViolation::ColumnSum { ty: 1, .. })
        ));
        assert!(ClassPoint::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).is_err());
    }

    #[test]
    fn example1_profile_is_valid() {
        assert_eq!(validate_profile(&example1_profile()), Ok(()));
    }

    #[test]
    fn row_sum_violation_has_row_witness() {
        let mut rows: Vec<Vec<PiecewiseFn>> = ClassPoint::vertex_cover(Shape::new(3, 2).unwrap())
            .rows()
            .iter()
            .map(|r| r.iter().map(|&v| PiecewiseFn::constant(v)).collect())
            .collect();
        rows[2][0] = PiecewiseFn::constant(0.9);
        let c = Profile::new(rows).unwrap();
        match validate_profile(&c) {
            Err(ProfileViolation::RowSum { object, observed, .. }) => {
                assert_eq!(object, 2);
                assert!((observed - 0.9).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_parameter_two_by_two_profile_is_valid() {
        let f = PiecewiseFn::polynomial(Poly::new(vec![0.1, 0.8]));
        let g = PiecewiseFn::linear_combine(1.0, &PiecewiseFn::constant(1.0), -1.0, &f);
        let c = Profile::new(vec![vec![f.clone(), g.clone()], vec![g, f]]).unwrap();
        assert_eq!(validate_profile(&c), Ok(()));
    }

    #[test]
    fn atom_breaking_row_sum_is_caught() {
        let f = PiecewiseFn::constant(0.5).with_atom(0.25, 0.7).unwrap();
        let g = PiecewiseFn::constant(0.5);
        let c = Profile::new(vec![vec![f, g.clone()], vec![g.clone(), g]]).unwrap();
        match validate_profile(&c) {
            Err(ProfileViolation::RowSum { object: 0, location, .. }) => assert_eq!(location, 0.25),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn column_sum_violation_located_at_minimum() {
        // column 1 sum = i + (1 - i) * 0 ... dips below 1 near i = 0
        let i = PiecewiseFn::polynomial(Poly::new(vec![0.0, 1.0]));
        let one_minus_i = PiecewiseFn::polynomial(Poly::new(vec![1.0, -1.0]));
        let c = Profile::new(vec![
            vec![one_minus_i, i],
            vec![PiecewiseFn::constant(1.0), PiecewiseFn::constant(0.0)],
            vec![PiecewiseFn::constant(1.0), PiecewiseFn::constant(0.0)],
        ])
        .unwrap();
        match validate_profile(&c) {
            Err(ProfileViolation::ColumnSum { ty: 1, location, observed }) => {
                assert_eq!(location, 0.0);
                assert_eq!(observed, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn profile_json_round_trip() {
        let c = example1_profile();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.starts_with(r#"{"m":6,"p":3,"objects":[{"types":["#));
        let back: Profile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let wrong = s.replacen(r#""m":6"#, r#""m":5"#, 1);
        assert!(serde_json::from_str::<Profile>(&wrong).is_err());
    }
}
