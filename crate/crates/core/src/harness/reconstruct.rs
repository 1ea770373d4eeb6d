//! Rebuilding a density-plus-atoms measure from black-box CDF queries.
//!
//! On each interval `[a, b]` the increments `G(x) = F(x) - F(a)` are sampled on
//! a twelfth-grid and fitted by the lowest-degree polynomial (vanishing at `a`,
//! interpolating at `b`) that reproduces every sample. An interval that no
//! polynomial explains holds a jump or a kink and is split in four. Below
//! [`NARROW`] the search turns into bisection toward the larger increment, down
//! to adjacent floats, so an atom is placed exactly at the first float whose
//! CDF includes it.

use crate::error::{Error, Result};
use crate::function_space::{PiecewiseFn, Poly};
use crate::measure::{Measure, PointMass};

/// Largest residual a fitted CDF piece may leave at a sample.
const FIT_TOL: f64 = 1e-12;

/// Negative increments beyond this mean the black box's CDF decreases.
const MONOTONE_TOL: f64 = 1e-12;

/// Interval width below which the search bisects instead of fitting.
const NARROW: f64 = 1e-9;

/// Black-box calls allowed for one reconstruction.
const QUERY_BUDGET: usize = 200_000;

const SAMPLES: usize = 12;
const CHECKS: [f64; 4] = [1.0 / 24.0, 7.0 / 24.0, 13.0 / 24.0, 23.0 / 24.0];
const DEGREES: [usize; 6] = [0, 1, 2, 3, 4, 6];

pub(crate) struct Reconstruction {
    pub measure: Measure,
    pub queries: usize,
}

struct Builder<'a> {
    cdf: &'a mut dyn FnMut(f64) -> Result<f64>,
    queries: usize,
    pieces: Vec<(f64, f64, Poly)>,
    masses: Vec<PointMass>,
}

fn max_degree(w: f64) -> usize {
    if w >= 1.0 / 64.0 {
        6
    } else if w >= 1e-6 {
        2
    } else {
        1
    }
}

/// Solves `V q = g` for `V[i][j] = s_i^(j+1)` by Gaussian elimination.
fn fit_through(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let d = nodes.len();
    let mut a: Vec<Vec<f64>> = nodes
        .iter()
        .zip(values)
        .map(|(&s, &g)| {
            let mut row: Vec<f64> = (1..=d as i32).map(|j| s.powi(j)).collect();
            row.push(g);
            row
        })
        .collect();
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("nonempty");
        a.swap(col, pivot);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
    }
    let mut q = vec![0.0; d];
    for r in (0..d).rev() {
        let s: f64 = (r + 1..d).map(|c| a[r][c] * q[c]).sum();
        q[r] = (a[r][d] - s) / a[r][r];
    }
    q
}

impl Builder<'_> {
    fn query(&mut self, x: f64) -> Result<f64> {
        self.queries += 1;
        if self.queries > QUERY_BUDGET {
            return Err(Error::Protocol {
                probe: format!("CDF at {x}"),
                reason: format!("no piecewise-polynomial CDF explains the answers within {QUERY_BUDGET} queries"),
            });
        }
        (self.cdf)(x)
    }

    fn non_monotone(a: f64, b: f64, g: f64) -> Error {
        Error::Protocol {
            probe: format!("CDF on [{a}, {b}]"),
            reason: format!("mass {g} is negative: the recovered CDF decreases"),
        }
    }

    fn push_linear(&mut self, a: f64, b: f64, g: f64) -> Result<()> {
        if g < -MONOTONE_TOL {
            return Err(Self::non_monotone(a, b, g));
        }
        if b > a {
            self.pieces.push((a, b, Poly::constant(g.max(0.0) / (b - a))));
        }
        Ok(())
    }

    fn interval(&mut self, a: f64, fa: f64, b: f64, fb: f64) -> Result<()> {
        let w = b - a;
        if w < NARROW {
            return self.narrow(a, fa, b, fb);
        }
        let mut s: Vec<f64> = (1..=SAMPLES).map(|k| k as f64 / SAMPLES as f64).collect();
        s.extend(CHECKS);
        let mut g = Vec::with_capacity(s.len());
        for (k, &sk) in s.iter().enumerate() {
            let f = if k + 1 == SAMPLES { fb } else { self.query(a + w * sk)? };
            g.push(f - fa);
        }
        for &d in DEGREES.iter().filter(|&&d| d <= max_degree(w)) {
            let q = if d == 0 {
                Vec::new()
            } else {
                let nodes: Vec<usize> = (1..=d).map(|i| i * SAMPLES / d - 1).collect();
                let xs: Vec<f64> = nodes.iter().map(|&k| s[k]).collect();
                let gs: Vec<f64> = nodes.iter().map(|&k| g[k]).collect();
                fit_through(&xs, &gs)
            };
            let model = |x: f64| q.iter().enumerate().map(|(j, c)| c * x.powi(j as i32 + 1)).sum::<f64>();
            if s.iter().zip(&g).all(|(&x, &gk)| (model(x) - gk).abs() <= FIT_TOL) {
                if g[SAMPLES - 1] < -MONOTONE_TOL {
                    return Err(Self::non_monotone(a, b, g[SAMPLES - 1]));
                }
                // density in the local variable, then in the global one
                let local = Poly::new(q.iter().enumerate().map(|(j, c)| (j + 1) as f64 * c / w).collect());
                self.pieces.push((a, b, local.rescale(w).shift(-a)));
                return Ok(());
            }
        }
        let quarter = |k: usize| if k == 4 { b } else { a + w * (k as f64 / 4.0) };
        let f_at = |k: usize| if k == 0 { fa } else if k == 4 { fb } else { fa + g[3 * k - 1] };
        for k in 0..4 {
            self.interval(quarter(k), f_at(k), quarter(k + 1), f_at(k + 1))?;
        }
        Ok(())
    }

    fn narrow(&mut self, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> Result<()> {
        loop {
            let mid = a + 0.5 * (b - a);
            if mid <= a || mid >= b {
                let g = fb - fa;
                if g < -MONOTONE_TOL {
                    return Err(Self::non_monotone(a, b, g));
                }
                if g > 0.0 {
                    self.masses.push(PointMass { point: b, mass: g });
                }
                return Ok(());
            }
            let fm = self.query(mid)?;
            if fm - fa >= fb - fm {
                self.push_linear(mid, b, fb - fm)?;
                b = mid;
                fb = fm;
            } else {
                self.push_linear(a, mid, fm - fa)?;
                a = mid;
                fa = fm;
            }
        }
    }
}

/// Reconstructs the measure whose CDF `x -> μ([0, x])` is answered by `cdf`.
pub(crate) fn reconstruct(cdf: &mut dyn FnMut(f64) -> Result<f64>) -> Result<Reconstruction> {
    let mut b = Builder { cdf, queries: 0, pieces: Vec::new(), masses: Vec::new() };
    let f0 = b.query(0.0)?;
    let f1 = b.query(1.0)?;
    if f0 < -MONOTONE_TOL {
        return Err(Builder::non_monotone(0.0, 0.0, f0));
    }
    if f0 > 0.0 {
        b.masses.push(PointMass { point: 0.0, mass: f0 });
    }
    b.interval(0.0, f0, 1.0, f1)?;
    let queries = b.queries;
    let mut pieces = b.pieces;
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut breakpoints = vec![0.0];
    let mut polys = Vec::with_capacity(pieces.len());
    for (lo, hi, poly) in pieces {
        let last = *breakpoints.last().expect("starts with 0");
        if lo > last {
            // a gap left by bisection carries no density
            breakpoints.push(lo);
            polys.push(Poly::zero());
        }
        breakpoints.push(hi);
        polys.push(poly);
    }
    if *breakpoints.last().expect("starts with 0") < 1.0 {
        breakpoints.push(1.0);
        polys.push(Poly::zero());
    }
    let density = PiecewiseFn::new(breakpoints, polys, Vec::new())?;
    let measure = Measure::new(density, b.masses).map_err(|e| Error::Protocol {
        probe: "reconstruction".into(),
        reason: e.to_string(),
    })?;
    Ok(Reconstruction { measure, queries })
}
