use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{PiecewiseFn, Poly};

/// A finite union of closed intervals inside `[0, 1]`, kept sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(0.0 <= a && a <= b && b <= 1.0) {
                return Err(Error::argument(format!(
                    "[{a}, {b}] is not a closed interval inside [0, 1]"
                )));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(IntervalSet { intervals: merged })
    }

    pub fn empty() -> Self {
        IntervalSet {
            intervals: Vec::new(),
        }
    }

    /// `[0, x]`.
    pub fn prefix(x: f64) -> Result<Self> {
        Self::new(vec![(0.0, x)])
    }

    pub fn whole() -> Self {
        IntervalSet {
            intervals: vec![(0.0, 1.0)],
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// The indicator function, exact at every point including interval endpoints.
    pub fn indicator(&self) -> PiecewiseFn {
        let mut breakpoints = vec![0.0, 1.0];
        for &(a, b) in &self.intervals {
            breakpoints.push(a);
            breakpoints.push(b);
        }
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let pieces = breakpoints
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                Poly::constant(if self.contains(mid) { 1.0 } else { 0.0 })
            })
            .collect();
        let mut f = PiecewiseFn::new(breakpoints, pieces, Vec::new())
            .expect("sorted breakpoints from valid intervals");
        for &(a, b) in &self.intervals {
            for q in [a, b] {
                if f.piece_value(q) != 1.0 {
                    f = f.with_atom(q, 1.0).expect("endpoint inside [0, 1]");
                }
            }
        }
        f
    }
}
