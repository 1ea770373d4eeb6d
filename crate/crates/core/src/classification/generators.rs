//! Deterministic profile generators: the worked example, indicator probes, and
//! seeded random families used by the axiom falsifiers.
//!
//! Random families start from a valid constant classification and add
//! perturbations that cannot leave the model: a "rectangle" adds `g` to entries
//! `(j1, t1)` and `(j2, t2)` and subtracts it from `(j1, t2)` and `(j2, t1)`, which
//! keeps every row and column sum; a "row pair" moves `g` between two types of
//! one object and is only used where the column sums have slack. Each move is
//! scaled down so that every entry stays inside `[0, 1]`.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{unit_row, ClassPoint, IntervalSet, Profile, Shape};
use crate::error::{Error, Result};
use crate::function_space::{PiecewiseFn, Poly};
use crate::rng;

/// Breakpoints of random perturbations live on this dyadic grid.
const GRID: usize = 64;

/// Moves smaller than this are not counted as changing a draft.
const MIN_MOVE: f64 = 1e-6;

/// The six-object, three-type profile of the worked example.
pub fn example1_profile() -> Profile {
    let poly = |c: &[f64]| PiecewiseFn::polynomial(Poly::new(c.to_vec()));
    let k = |v: f64| PiecewiseFn::constant(v);
    let delta0 = k(0.0).with_atom(0.0, 1.0).unwrap();
    let delta1 = k(0.0).with_atom(1.0, 1.0).unwrap();
    let middle = k(1.0)
        .with_atom(0.0, 0.0)
        .and_then(|f| f.with_atom(1.0, 0.0))
        .unwrap();
    let rows = vec![
        vec![
            poly(&[0.0, 2.0 / 3.0]),
            k(1.0 / 3.0),
            poly(&[2.0 / 3.0, -2.0 / 3.0]),
        ],
        vec![
            poly(&[1.0, -3.0, 3.0, -1.0]),
            poly(&[0.0, 3.0, -3.0]),
            poly(&[0.0, 0.0, 0.0, 1.0]),
        ],
        vec![delta0, middle, delta1],
        vec![k(1.0), k(0.0), k(0.0)],
        vec![k(0.0), k(1.0), k(0.0)],
        vec![k(0.0), k(0.0), k(1.0)],
    ];
    Profile::new(rows).expect("6x3 example profile")
}

/// Every entry `1/p`; always feasible because `m >= p`.
pub fn uniform_point(shape: Shape) -> ClassPoint {
    ClassPoint::from_rows(vec![vec![1.0 / shape.p as f64; shape.p]; shape.m])
        .expect("shape already validated")
}

/// A valid classification whose object `j` is classified as `row`; the other
/// objects split what each column still needs, plus an even share of the slack.
pub fn fill_with_row(shape: Shape, j: usize, row: &[f64]) -> Result<ClassPoint> {
    let Shape { m, p } = shape;
    if j >= m || row.len() != p {
        return Err(Error::argument(format!("row {j} of length {} does not fit {shape}", row.len())));
    }
    if row.iter().any(|&v| !(0.0..=1.0).contains(&v)) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::argument(format!("{row:?} is not a classification row")));
    }
    let extra = (m - p) as f64 / p as f64;
    let other: Vec<f64> = row
        .iter()
        .map(|&v| (1.0 - v + extra) / (m - 1) as f64)
        .collect();
    let values = (0..m)
        .map(|k| if k == j { row.to_vec() } else { other.clone() })
        .collect();
    ClassPoint::from_rows(values)
}

fn constant_column_point(shape: Shape, t: usize, h: f64) -> Result<ClassPoint> {
    let Shape { m, p } = shape;
    if t >= p {
        return Err(Error::argument(format!("type {t} out of range for {shape}")));
    }
    let hmax = (m - p + 1) as f64;
    if !(h >= 1.0 - 1e-12 && h <= hmax + 1e-12) {
        return Err(Error::argument(format!(
            "column sum {h} is infeasible for {shape}: need 1 <= h <= {hmax}"
        )));
    }
    let mf = m as f64;
    let rest = (mf - h) / (mf * (p - 1) as f64);
    let row: Vec<f64> = (0..p).map(|s| if s == t { h / mf } else { rest }).collect();
    ClassPoint::from_rows(vec![row; m])
}

/// Probe profile used to read interval masses off a black box.
///
/// Object `x_0` is classified as type `t` on `interval` and as type 0 elsewhere.
/// The remaining objects are constants completing a valid profile: with `m > p`
/// they cover every type once and then default to type 0; with `m = p` object
/// `x_1` is the complementary swap and the rest cover the remaining types.
pub fn indicator_probe_profile(m: usize, p: usize, t: usize, interval: &IntervalSet) -> Result<Profile> {
    let shape = Shape::new(m, p)?;
    if t == 0 || t >= p {
        return Err(Error::argument(format!(
            "probe type must contrast with type 0 and lie below p = {p}, got {t}"
        )));
    }
    let ind = interval.indicator();
    let comp = PiecewiseFn::linear_combine(1.0, &PiecewiseFn::constant(1.0), -1.0, &ind);
    let zero = PiecewiseFn::constant(0.0);
    let constant_row = |k: usize| -> Vec<PiecewiseFn> {
        unit_row(p, k).into_iter().map(PiecewiseFn::constant).collect()
    };

    let mut first = vec![zero.clone(); p];
    first[0] = comp.clone();
    first[t] = ind.clone();
    let mut rows = vec![first];
    if m > p {
        rows.extend((0..p).map(constant_row));
        rows.extend((p + 1..m).map(|_| constant_row(0)));
    } else {
        let mut second = vec![zero; p];
        second[0] = ind;
        second[t] = comp;
        rows.push(second);
        rows.extend((1..p).filter(|&k| k != t).map(constant_row));
    }
    debug_assert_eq!(rows.len(), shape.m);
    Profile::new(rows)
}

/// Random piecewise polynomial with `sup |g| = 1`, up to `max_pieces` pieces of
/// degree at most three on the dyadic grid.
pub(crate) fn random_shape(rng: &mut ChaCha8Rng, max_pieces: usize) -> PiecewiseFn {
    let k = rng.gen_range(1..=max_pieces.clamp(1, GRID));
    let mut cuts: Vec<usize> = sample(rng, GRID - 1, k - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut breakpoints = vec![0.0];
    breakpoints.extend(cuts.iter().map(|&c| c as f64 / GRID as f64));
    breakpoints.push(1.0);
    let pieces = breakpoints
        .windows(2)
        .map(|w| {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            let degree = rng.gen_range(0..=3);
            let local = Poly::new((0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect());
            local.rescale(half).shift(-mid)
        })
        .collect();
    let g = PiecewiseFn::new(breakpoints, pieces, Vec::new()).expect("dyadic breakpoints");
    let (lo, hi) = g.ess_bounds();
    let sup = lo.abs().max(hi.abs());
    if sup < 1e-6 {
        return PiecewiseFn::constant(1.0);
    }
    g.scale(1.0 / sup)
}

/// Mutable working copy of a profile while perturbations are applied.
#[derive(Debug, Clone)]
pub(crate) struct ProfileDraft {
    shape: Shape,
    entries: Vec<Vec<PiecewiseFn>>,
}

/// Constraints on which entries a random perturbation pass may touch.
#[derive(Debug, Clone, Default)]
pub(crate) struct Locks {
    /// Entry that must stay exactly as it is.
    pub entry: Option<(usize, usize)>,
    /// Objects whose rows must stay exactly as they are.
    pub rows: Vec<usize>,
    /// Columns whose sums must stay exactly as they are.
    pub column_sums: Vec<usize>,
}

impl ProfileDraft {
    pub(crate) fn from_point(b: &ClassPoint) -> Self {
        Self::from_profile(&Profile::constant(b))
    }

    pub(crate) fn from_profile(c: &Profile) -> Self {
        ProfileDraft {
            shape: c.shape(),
            entries: c.entries().to_vec(),
        }
    }

    pub(crate) fn finish(self) -> Profile {
        Profile::new(self.entries).expect("draft keeps its shape")
    }

    pub(crate) fn entry(&self, j: usize, t: usize) -> &PiecewiseFn {
        &self.entries[j][t]
    }

    fn entry_slack(&self, j: usize, t: usize) -> f64 {
        let (lo, hi) = self.entries[j][t].bounds();
        lo.min(1.0 - hi).max(0.0)
    }

    fn column_slack(&self, t: usize) -> f64 {
        let terms: Vec<(f64, &PiecewiseFn)> = self.entries.iter().map(|r| (1.0, &r[t])).collect();
        let (lo, _) = PiecewiseFn::linear_combination(&terms).bounds();
        (lo - 1.0).max(0.0)
    }

    fn bump(&mut self, j: usize, t: usize, a: f64, g: &PiecewiseFn) {
        self.entries[j][t] = PiecewiseFn::linear_combine(1.0, &self.entries[j][t], a, g);
    }

    /// Adds `scale * g` on the rectangle, with `|scale * g| <= amplitude` and all
    /// entries kept in `[0, 1]`. Returns the size `sup |scale * g|` of the move.
    pub(crate) fn add_rectangle(
        &mut self,
        (j1, j2): (usize, usize),
        (t1, t2): (usize, usize),
        g: &PiecewiseFn,
        amplitude: f64,
    ) -> f64 {
        let (lo, hi) = g.bounds();
        let sup = lo.abs().max(hi.abs());
        if sup == 0.0 || j1 == j2 || t1 == t2 {
            return 0.0;
        }
        let slack = [(j1, t1), (j1, t2), (j2, t1), (j2, t2)]
            .iter()
            .map(|&(j, t)| self.entry_slack(j, t))
            .fold(amplitude, f64::min);
        let a = slack / sup;
        if a <= 0.0 {
            return 0.0;
        }
        self.bump(j1, t1, a, g);
        self.bump(j2, t2, a, g);
        self.bump(j1, t2, -a, g);
        self.bump(j2, t1, -a, g);
        slack
    }

    /// Moves `scale * g` from type `t2` to type `t1` of object `j`, bounded by the
    /// column slack of both types. Returns the size of the move.
    pub(crate) fn add_row_pair(&mut self, j: usize, (t1, t2): (usize, usize), g: &PiecewiseFn, amplitude: f64) -> f64 {
        let (lo, hi) = g.bounds();
        let sup = lo.abs().max(hi.abs());
        if sup == 0.0 || t1 == t2 {
            return 0.0;
        }
        let slack = [
            self.entry_slack(j, t1),
            self.entry_slack(j, t2),
            self.column_slack(t1),
            self.column_slack(t2),
        ]
        .into_iter()
        .fold(amplitude, f64::min);
        let a = slack / sup;
        if a <= 0.0 {
            return 0.0;
        }
        self.bump(j, t1, a, g);
        self.bump(j, t2, -a, g);
        slack
    }

    /// Pointwise version of a rectangle at the single individual `q`. Positive
    /// `delta` raises `(j1, t1)`. Clamped to keep the four values in `[0, 1]`;
    /// returns the applied change.
    pub(crate) fn add_atom_rectangle(
        &mut self,
        q: f64,
        (j1, j2): (usize, usize),
        (t1, t2): (usize, usize),
        delta: f64,
    ) -> f64 {
        if j1 == j2 || t1 == t2 {
            return 0.0;
        }
        let v = |s: &Self, j: usize, t: usize| s.entries[j][t].value_at(q);
        let (v11, v12, v21, v22) = (v(self, j1, t1), v(self, j1, t2), v(self, j2, t1), v(self, j2, t2));
        let up = v12.min(v21).min(1.0 - v11).min(1.0 - v22).max(0.0);
        let down = v11.min(v22).min(1.0 - v12).min(1.0 - v21).max(0.0);
        let d = delta.clamp(-down, up);
        if d == 0.0 {
            return 0.0;
        }
        for (j, t, val) in [(j1, t1, v11 + d), (j2, t2, v22 + d), (j1, t2, v12 - d), (j2, t1, v21 - d)] {
            self.set_atom(j, t, q, val);
        }
        d
    }

    /// Moves `delta` from `(j, t2)` to `(j, t1)` at the single individual `q`,
    /// clamped so entries stay in `[0, 1]` and the column sum of `t2` stays at
    /// least one there.
    pub(crate) fn add_atom_row_pair(&mut self, q: f64, j: usize, (t1, t2): (usize, usize), delta: f64) -> f64 {
        if t1 == t2 {
            return 0.0;
        }
        let v1 = self.entries[j][t1].value_at(q);
        let v2 = self.entries[j][t2].value_at(q);
        let col = |t: usize| self.entries.iter().map(|r| r[t].value_at(q)).sum::<f64>() - 1.0;
        let up = v2.min(1.0 - v1).min(col(t2)).max(0.0);
        let down = v1.min(1.0 - v2).min(col(t1)).max(0.0);
        let d = delta.clamp(-down, up);
        if d == 0.0 {
            return 0.0;
        }
        self.set_atom(j, t1, q, v1 + d);
        self.set_atom(j, t2, q, v2 - d);
        d
    }

    fn set_atom(&mut self, j: usize, t: usize, q: f64, value: f64) {
        let f = std::mem::replace(&mut self.entries[j][t], PiecewiseFn::constant(0.0));
        self.entries[j][t] = f.with_atom(q, value).expect("atom point inside [0, 1]");
    }

    /// Applies `count` random moves of at most `amplitude` each, respecting `locks`.
    /// Returns how many moves changed the draft.
    pub(crate) fn perturb(
        &mut self,
        rng: &mut ChaCha8Rng,
        max_pieces: usize,
        amplitude: f64,
        count: usize,
        locks: &Locks,
    ) -> usize {
        let mut applied = 0;
        let Shape { m, p } = self.shape;
        let free_rows: Vec<usize> = (0..m).filter(|j| !locks.rows.contains(j)).collect();
        let touches = |cells: &[(usize, usize)]| locks.entry.is_some_and(|e| cells.contains(&e));
        for _ in 0..count {
            let row_pair = m > p && rng.gen_bool(0.5);
            for _attempt in 0..8 {
                if row_pair {
                    if free_rows.is_empty() {
                        break;
                    }
                    let j = free_rows[rng.gen_range(0..free_rows.len())];
                    let ts = sample(rng, p, 2);
                    let (t1, t2) = (ts.index(0), ts.index(1));
                    if touches(&[(j, t1), (j, t2)])
                        || locks.column_sums.contains(&t1)
                        || locks.column_sums.contains(&t2)
                    {
                        continue;
                    }
                    let g = random_shape(rng, max_pieces);
                    if self.add_row_pair(j, (t1, t2), &g, amplitude) > MIN_MOVE {
                        applied += 1;
                    }
                } else {
                    if free_rows.len() < 2 {
                        break;
                    }
                    let js = sample(rng, free_rows.len(), 2);
                    let (j1, j2) = (free_rows[js.index(0)], free_rows[js.index(1)]);
                    let ts = sample(rng, p, 2);
                    let (t1, t2) = (ts.index(0), ts.index(1));
                    if touches(&[(j1, t1), (j1, t2), (j2, t1), (j2, t2)]) {
                        continue;
                    }
                    let g = random_shape(rng, max_pieces);
                    if self.add_rectangle((j1, j2), (t1, t2), &g, amplitude) > MIN_MOVE {
                        applied += 1;
                    }
                }
                break;
            }
        }
        applied
    }

    /// Moves the base away from its symmetric starting point with constant moves.
    pub(crate) fn randomize_base(&mut self, rng: &mut ChaCha8Rng, locks: &Locks) {
        let count = self.shape.m + self.shape.p;
        self.perturb(rng, 1, 0.3, count, locks);
    }
}

fn check_generator_args(m: usize, p: usize, pieces: usize, amplitude: f64) -> Result<Shape> {
    let shape = Shape::new(m, p)?;
    if pieces == 0 {
        return Err(Error::argument("need at least one piece"));
    }
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(Error::argument(format!("amplitude {amplitude} must be finite and nonnegative")));
    }
    Ok(shape)
}

/// Seeded random valid profile around the uniform classification.
pub fn random_profile(seed: u64, m: usize, p: usize, pieces: usize, amplitude: f64) -> Result<Profile> {
    let shape = check_generator_args(m, p, pieces, amplitude)?;
    let mut rng = rng::stream(seed, "random_profile", 0);
    let mut draft = ProfileDraft::from_point(&uniform_point(shape));
    draft.perturb(&mut rng, pieces, amplitude, m + p, &Locks::default());
    Ok(draft.finish())
}

/// Seeded valid profile whose type-`t` column sums to `h` for every individual.
pub fn constant_column_profile(seed: u64, m: usize, p: usize, t: usize, h: f64) -> Result<Profile> {
    constant_column_profile_with(seed, m, p, t, h, 3, 0.25)
}

pub fn constant_column_profile_with(
    seed: u64,
    m: usize,
    p: usize,
    t: usize,
    h: f64,
    pieces: usize,
    amplitude: f64,
) -> Result<Profile> {
    let shape = check_generator_args(m, p, pieces, amplitude)?;
    let base = constant_column_point(shape, t, h)?;
    let mut rng = rng::stream(seed, "constant_column", 0);
    let mut draft = ProfileDraft::from_point(&base);
    let locks = Locks {
        column_sums: vec![t],
        ..Locks::default()
    };
    draft.perturb(&mut rng, pieces, amplitude, m + p, &locks);
    Ok(draft.finish())
}

/// Two valid profiles with identical rows for object `j`, differing on other
/// objects over a set of positive measure whenever `m >= 3`. With `m = 2` the
/// other row is determined by row `j` and the two profiles coincide.
pub fn agreeing_pair(seed: u64, m: usize, p: usize, j: usize) -> Result<(Profile, Profile)> {
    let shape = Shape::new(m, p)?;
    if j >= m {
        return Err(Error::argument(format!("object {j} out of range for {shape}")));
    }
    let mut rng = rng::stream(seed, "agreeing_pair", j as u64);
    let mut draft = ProfileDraft::from_point(&uniform_point(shape));
    draft.randomize_base(&mut rng, &Locks::default());
    draft.perturb(&mut rng, 3, 0.2, m + p, &Locks::default());
    let first = draft.clone().finish();
    let locks = Locks {
        rows: vec![j],
        ..Locks::default()
    };
    if m >= 3 {
        // a move can vanish when its entries sit on the boundary; keep drawing
        for _ in 0..64 {
            if draft.perturb(&mut rng, 3, 0.2, 2, &locks) > 0 {
                break;
            }
        }
    }
    Ok((first, draft.finish()))
}
