//! Measurable functions `[0, 1] -> R` represented as piecewise polynomials with
//! finitely many pointwise atom overrides.
//!
//! Pieces live on right-open intervals `[b_k, b_{k+1})`, except the last one which
//! is closed at `1`. Coefficients are expressed in the global variable `i`, not in
//! a per-piece local variable. An atom overrides the value at a single point and is
//! invisible to anything that only looks at the function up to Lebesgue-null sets
//! (`ae_equal`, `ess_bounds`, integration against densities).

mod poly;

pub use poly::{Extrema, Poly, DENSE_SAMPLES};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for coefficient and range comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A pointwise override `f(point) = value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub point: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewiseFn")]
pub struct PiecewiseFn {
    breakpoints: Vec<f64>,
    pieces: Vec<Poly>,
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiecewiseFn {
    breakpoints: Vec<f64>,
    pieces: Vec<Poly>,
    #[serde(default)]
    atoms: Vec<Atom>,
}

impl TryFrom<RawPiecewiseFn> for PiecewiseFn {
    type Error = Error;

    fn try_from(raw: RawPiecewiseFn) -> Result<Self> {
        PiecewiseFn::new(raw.breakpoints, raw.pieces, raw.atoms)
    }
}

/// Where and how a function left its claimed codomain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeViolation {
    pub location: f64,
    pub observed: f64,
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(x))
    }
}

impl PiecewiseFn {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Poly>, mut atoms: Vec<Atom>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidFunction(msg));
        if breakpoints.len() < 2 {
            return bad("need at least the breakpoints 0 and 1".into());
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return bad(format!(
                "breakpoints must start at 0 and end at 1, got {:?}",
                (breakpoints[0], breakpoints.last().unwrap())
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("breakpoints must be strictly increasing".into());
        }
        if pieces.len() + 1 != breakpoints.len() {
            return bad(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                pieces.len()
            ));
        }
        if let Some(k) = pieces.iter().position(|p| !p.is_finite()) {
            return bad(format!("piece {k} has a non-finite coefficient"));
        }
        for a in &atoms {
            if !(0.0..=1.0).contains(&a.point) || !a.value.is_finite() {
                return bad(format!("atom {a:?} must sit in [0, 1] with a finite value"));
            }
        }
        atoms.sort_by(|a, b| a.point.total_cmp(&b.point));
        if atoms.windows(2).any(|w| w[0].point == w[1].point) {
            return bad("atom points must be pairwise distinct".into());
        }
        Ok(PiecewiseFn {
            breakpoints,
            pieces,
            atoms,
        })
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(Poly::constant(c))
    }

    pub fn polynomial(p: Poly) -> Self {
        PiecewiseFn {
            breakpoints: vec![0.0, 1.0],
            pieces: vec![p],
            atoms: Vec::new(),
        }
    }

    /// A function that is constant on each interval between `breakpoints`.
    pub fn step(breakpoints: Vec<f64>, values: &[f64]) -> Result<Self> {
        let pieces = values.iter().map(|&v| Poly::constant(v)).collect();
        Self::new(breakpoints, pieces, Vec::new())
    }

    /// Returns a copy with the value at `point` overridden (replacing any previous atom there).
    pub fn with_atom(mut self, point: f64, value: f64) -> Result<Self> {
        check_unit(point)?;
        self.atoms.retain(|a| a.point != point);
        self.atoms.push(Atom { point, value });
        Self::new(self.breakpoints, self.pieces, self.atoms)
    }

    pub fn without_atoms(&self) -> Self {
        PiecewiseFn {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.clone(),
            atoms: Vec::new(),
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom_at(&self, x: f64) -> Option<f64> {
        self.atoms
            .binary_search_by(|a| a.point.total_cmp(&x))
            .ok()
            .map(|k| self.atoms[k].value)
    }

    /// Index of the piece whose interval contains `x` (right-open, last piece closed).
    pub fn piece_index(&self, x: f64) -> usize {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        k.saturating_sub(1).min(self.pieces.len() - 1)
    }

    /// Value of the polynomial piece at `x`, ignoring atoms.
    pub fn piece_value(&self, x: f64) -> f64 {
        self.pieces[self.piece_index(x)].eval(x)
    }

    pub(crate) fn value_at(&self, x: f64) -> f64 {
        self.atom_at(x).unwrap_or_else(|| self.piece_value(x))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        Ok(self.value_at(x))
    }

    /// Sorted union of the breakpoints of all `fns`.
    pub fn common_refinement(fns: &[&PiecewiseFn]) -> Vec<f64> {
        let mut all: Vec<f64> = fns
            .iter()
            .flat_map(|f| f.breakpoints.iter().copied())
            .collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        all
    }

    /// The piece governing the open interval `(u, v)` of a refinement.
    pub(crate) fn piece_on(&self, u: f64, v: f64) -> &Poly {
        &self.pieces[self.piece_index(0.5 * (u + v))]
    }

    /// Equality up to a Lebesgue-null set: every coefficient of `self - other` on the
    /// common refinement is at most `tol` in magnitude. Atoms are not compared.
    pub fn ae_equal(&self, other: &PiecewiseFn, tol: f64) -> bool {
        let grid = Self::common_refinement(&[self, other]);
        grid.windows(2).all(|w| {
            self.piece_on(w[0], w[1])
                .combine(1.0, other.piece_on(w[0], w[1]), -1.0)
                .max_abs_coeff()
                <= tol
        })
    }

    /// `sum_k a_k f_k` on the common refinement. The result carries an atom at every
    /// point where some `f_k` has one, valued at the pointwise combination there.
    pub fn linear_combination(terms: &[(f64, &PiecewiseFn)]) -> PiecewiseFn {
        let fns: Vec<&PiecewiseFn> = terms.iter().map(|(_, f)| *f).collect();
        let breakpoints = Self::common_refinement(&fns);
        let pieces = breakpoints
            .windows(2)
            .map(|w| {
                terms.iter().fold(Poly::zero(), |acc, (a, f)| {
                    acc.combine(1.0, f.piece_on(w[0], w[1]), *a)
                })
            })
            .collect();
        let mut points: Vec<f64> = fns
            .iter()
            .flat_map(|f| f.atoms.iter().map(|a| a.point))
            .collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        let atoms = points
            .into_iter()
            .map(|q| Atom {
                point: q,
                value: terms.iter().map(|(a, f)| a * f.value_at(q)).sum(),
            })
            .collect();
        PiecewiseFn {
            breakpoints,
            pieces,
            atoms,
        }
    }

    pub fn linear_combine(a: f64, f: &PiecewiseFn, b: f64, g: &PiecewiseFn) -> PiecewiseFn {
        Self::linear_combination(&[(a, f), (b, g)])
    }

    pub fn scale(&self, a: f64) -> PiecewiseFn {
        Self::linear_combination(&[(a, self)])
    }

    /// Extrema over the pieces (closures of their intervals), ignoring atoms.
    pub fn ess_extrema(&self) -> Extrema {
        let mut iter = self
            .breakpoints
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, p)| p.extrema(w[0], w[1]));
        let mut ext = iter.next().expect("at least one piece");
        for e in iter {
            ext.merge(&e);
        }
        ext
    }

    /// `(ess inf, ess sup)`: piece extrema only, atoms excluded.
    pub fn ess_bounds(&self) -> (f64, f64) {
        let e = self.ess_extrema();
        (e.min, e.max)
    }

    /// Pointwise `(inf, sup)` including atom values.
    pub fn bounds(&self) -> (f64, f64) {
        let (mut lo, mut hi) = self.ess_bounds();
        for a in &self.atoms {
            lo = lo.min(a.value);
            hi = hi.max(a.value);
        }
        (lo, hi)
    }

    /// Checks every piece range, piece endpoint value and atom value against
    /// `[lo - DEFAULT_TOL, hi + DEFAULT_TOL]`.
    pub fn check_codomain(&self, lo: f64, hi: f64) -> Result<(), RangeViolation> {
        let (lo_t, hi_t) = (lo - DEFAULT_TOL, hi + DEFAULT_TOL);
        let e = self.ess_extrema();
        if e.min < lo_t {
            return Err(RangeViolation {
                location: e.argmin,
                observed: e.min,
            });
        }
        if e.max > hi_t {
            return Err(RangeViolation {
                location: e.argmax,
                observed: e.max,
            });
        }
        match self
            .atoms
            .iter()
            .find(|a| a.value < lo_t || a.value > hi_t)
        {
            Some(a) => Err(RangeViolation {
                location: a.point,
                observed: a.value,
            }),
            None => Ok(()),
        }
    }

    /// Exchanges the closed blocks `J = [start, start + len]` and `J + shift`.
    ///
    /// The result is `f(i + shift)` on `J`, `f(i - shift)` on `J + shift` and `f(i)`
    /// elsewhere, at every point including block endpoints. Atoms inside either
    /// block travel with it.
    pub fn swap_blocks(&self, start: f64, len: f64, shift: f64) -> Result<PiecewiseFn> {
        let block = SwapBlocks::new(start, len, shift)?;
        let (a, b, c, d) = (block.a, block.b, block.c, block.d);

        let mut grid: Vec<f64> = self.breakpoints.clone();
        grid.extend([a, b, c, d]);
        for &x in &self.breakpoints {
            if block.in_j(x) {
                grid.push(x + shift);
            }
            if block.in_shifted(x) {
                grid.push(x - shift);
            }
        }
        for x in grid.iter_mut() {
            *x = x.clamp(0.0, 1.0);
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup();

        let pieces: Vec<Poly> = grid
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                if block.in_j(mid) {
                    self.pieces[self.piece_index(mid + shift)].shift(shift)
                } else if block.in_shifted(mid) {
                    self.pieces[self.piece_index(mid - shift)].shift(-shift)
                } else {
                    self.pieces[self.piece_index(mid)].clone()
                }
            })
            .collect();
        let mut out = PiecewiseFn {
            breakpoints: grid,
            pieces,
            atoms: Vec::new(),
        };

        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|at| Atom {
                point: block.map(at.point),
                value: at.value,
            })
            .collect();
        for q in [a, b, c, d] {
            if atoms.iter().any(|at| at.point == q) {
                continue;
            }
            let want = self.value_at(block.map(q));
            if (want - out.piece_value(q)).abs() > 1e-12 {
                atoms.push(Atom { point: q, value: want });
            }
        }
        atoms.sort_by(|x, y| x.point.total_cmp(&y.point));
        out.atoms = atoms;
        Ok(out)
    }
}

/// Validated geometry of a block exchange.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SwapBlocks {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    shift: f64,
}

impl SwapBlocks {
    pub(crate) fn new(start: f64, len: f64, shift: f64) -> Result<Self> {
        let (a, b) = (start, start + len);
        let (c, d) = (start + shift, start + len + shift);
        if !(len >= 0.0) || a < 0.0 || b > 1.0 || c < 0.0 || d > 1.0 {
            return Err(Error::argument(format!(
                "blocks [{a}, {b}] and [{c}, {d}] must lie in [0, 1]"
            )));
        }
        if shift.abs() <= len {
            return Err(Error::argument(format!(
                "blocks [{a}, {b}] and [{c}, {d}] overlap"
            )));
        }
        Ok(SwapBlocks { a, b, c, d, shift })
    }

    fn in_j(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    fn in_shifted(&self, x: f64) -> bool {
        self.c <= x && x <= self.d
    }

    /// The involution exchanging the two blocks.
    pub(crate) fn map(&self, x: f64) -> f64 {
        if self.in_j(x) {
            (x + self.shift).clamp(0.0, 1.0)
        } else if self.in_shifted(x) {
            (x - self.shift).clamp(0.0, 1.0)
        } else {
            x
        }
    }
}
