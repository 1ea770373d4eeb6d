//! Probe families. Probe `k` of a family depends only on `(seed, family, k)`.
//!
//! Families are nested where one axiom implies another, so that a failure of the
//! weaker axiom is always replayed by the stronger one: symmetry probes start
//! with the independence probes, unanimity probes with the zero-unanimity
//! probes, and coherence probes with the unanimity probes.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::witness::WitnessCheck;
use super::ProbeKind;
use crate::classification::{
    fill_with_row, indicator_probe_profile, uniform_point, ClassPoint, IntervalSet, Locks, Profile,
    ProfileDraft, Shape,
};
use crate::function_space::PiecewiseFn;
use crate::rng;

/// Points where almost-everywhere probes plant atoms: both ends, the midpoint,
/// and the usual dictator locations, followed by one random dyadic point.
const SPECIAL_POINTS: [f64; 5] = [0.0, 1.0, 0.5, 0.3, 0.25];

/// Dyadic grid of random block boundaries.
const BLOCK_GRID: u32 = 64;

pub(crate) struct Probe {
    pub profiles: Vec<Profile>,
    pub check: WitnessCheck,
}

#[derive(Clone, Copy)]
pub(crate) struct Families {
    pub shape: Shape,
    pub seed: u64,
    pub kind: ProbeKind,
}

fn random_row(rng: &mut ChaCha8Rng, p: usize, t: usize, h: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..p).map(|s| if s == t { 0.0 } else { rng.gen_range(0.05..1.0) }).collect();
    let total: f64 = w.iter().sum();
    let mut row: Vec<f64> = w.iter().map(|x| (1.0 - h) * x / total).collect();
    row[t] = h;
    row
}

impl Families {
    fn rng(&self, tag: &str, k: usize) -> ChaCha8Rng {
        rng::stream(self.seed, tag, k as u64)
    }

    fn atom_point(&self, rng: &mut ChaCha8Rng, k: usize) -> f64 {
        match SPECIAL_POINTS.get(k % (SPECIAL_POINTS.len() + 1)) {
            Some(&q) => q,
            None => rng.gen_range(0..=BLOCK_GRID) as f64 / BLOCK_GRID as f64,
        }
    }

    /// A random valid profile around a randomized base.
    fn random_draft(&self, rng: &mut ChaCha8Rng, locks: &Locks) -> ProfileDraft {
        let mut draft = ProfileDraft::from_point(&uniform_point(self.shape));
        draft.randomize_base(rng, locks);
        draft.perturb(rng, 4, 0.25, self.shape.m + self.shape.p, locks);
        draft
    }

    /// Plants a few atoms anywhere except the locked entry.
    fn sprinkle_atoms(&self, draft: &mut ProfileDraft, rng: &mut ChaCha8Rng, k: usize, locks: &Locks) {
        let Shape { m, p } = self.shape;
        let q = self.atom_point(rng, k);
        for _ in 0..3 {
            let js = sample(rng, m, 2);
            let ts = sample(rng, p, 2);
            let cells = [
                (js.index(0), ts.index(0)),
                (js.index(0), ts.index(1)),
                (js.index(1), ts.index(0)),
                (js.index(1), ts.index(1)),
            ];
            if locks.entry.is_some_and(|e| cells.contains(&e)) {
                continue;
            }
            let delta = rng.gen_range(-0.5..0.5);
            draft.add_atom_rectangle(q, (js.index(0), js.index(1)), (ts.index(0), ts.index(1)), delta);
        }
    }

    /// Changes entry `(j, t)` at one point while keeping the profile valid.
    fn atom_on_entry(&self, draft: &mut ProfileDraft, rng: &mut ChaCha8Rng, k: usize, (j, t): (usize, usize)) {
        let Shape { m, p } = self.shape;
        let q = self.atom_point(rng, k);
        let up = draft.entry(j, t).value_at(q) < 0.5;
        let delta = if up { 0.5 } else { -0.5 };
        for j2 in (0..m).filter(|&j2| j2 != j) {
            for t2 in (0..p).filter(|&t2| t2 != t) {
                if draft.add_atom_rectangle(q, (j, j2), (t, t2), delta) != 0.0 {
                    return;
                }
            }
        }
        for t2 in (0..p).filter(|&t2| t2 != t) {
            if draft.add_atom_row_pair(q, j, (t, t2), delta) != 0.0 {
                return;
            }
        }
    }

    pub fn optimality(&self, k: usize) -> Probe {
        let Shape { m, p } = self.shape;
        let mut rng = self.rng("optimality", k);
        let t = k % p;
        let hmax = (m - p + 1) as f64;
        let h = match k / p % 3 {
            0 => 1.0,
            1 => hmax,
            _ => rng.gen_range(1.0..=hmax),
        };
        // base: column t holds h spread over the objects, the rest is uniform
        let mf = m as f64;
        let rest = (mf - h) / (mf * (p - 1) as f64);
        let row: Vec<f64> = (0..p).map(|s| if s == t { h / mf } else { rest }).collect();
        let base = ClassPoint::from_rows(vec![row; m]).expect("shape already validated");
        let locks = Locks { column_sums: vec![t], ..Locks::default() };
        let mut draft = ProfileDraft::from_point(&base);
        draft.randomize_base(&mut rng, &locks);
        draft.perturb(&mut rng, 4, 0.25, m + p, &locks);
        if self.kind == ProbeKind::AlmostEverywhere {
            self.sprinkle_atoms(&mut draft, &mut rng, k, &locks);
            let q = self.atom_point(&mut rng, k + 1);
            let j = rng.gen_range(0..m);
            let t2 = (t + 1 + rng.gen_range(0..p - 1)) % p;
            draft.add_atom_row_pair(q, j, (t, t2), 0.5);
        }
        Probe {
            profiles: vec![draft.finish()],
            check: WitnessCheck::ColumnSum { ty: t, expected: h },
        }
    }

    pub fn independence(&self, k: usize) -> Probe {
        let Shape { m, .. } = self.shape;
        let mut rng = self.rng("independence", k);
        let j = k % m;
        let mut draft = self.random_draft(&mut rng, &Locks::default());
        let first = draft.clone();
        let others: Vec<usize> = (0..m).filter(|&x| x != j).collect();
        let second = if others.len() >= 2 && k % 2 == 1 {
            // relabel two other objects: row j is untouched
            let ab = sample(&mut rng, others.len(), 2);
            first.clone().finish().swap_objects(others[ab.index(0)], others[ab.index(1)])
        } else {
            let locks = Locks { rows: vec![j], ..Locks::default() };
            if m >= 3 {
                for _ in 0..64 {
                    if draft.perturb(&mut rng, 3, 0.2, 2, &locks) > 0 {
                        break;
                    }
                }
            }
            draft.finish()
        };
        let mut profiles = vec![first.finish(), second];
        if self.kind == ProbeKind::AlmostEverywhere {
            let mut d = ProfileDraft::from_profile(&profiles[1]);
            let t = rng.gen_range(0..self.shape.p);
            self.atom_on_entry(&mut d, &mut rng, k, (j, t));
            profiles[1] = d.finish();
        }
        Probe { profiles, check: WitnessCheck::Rows { left: j, right: j } }
    }

    /// Relabelling probes: row `x` of the first profile is row `y` of the second.
    pub fn relabelling(&self, k: usize) -> Probe {
        let Shape { m, .. } = self.shape;
        let mut rng = self.rng("symmetry", k);
        let draft = self.random_draft(&mut rng, &Locks::default());
        let c = draft.finish();
        let xy = sample(&mut rng, m, 2);
        let (x, y) = (xy.index(0), xy.index(1));
        let mut d = ProfileDraft::from_profile(&c.swap_objects(x, y));
        let locks = Locks { rows: vec![y], ..Locks::default() };
        d.perturb(&mut rng, 3, 0.2, 2, &locks);
        if self.kind == ProbeKind::AlmostEverywhere {
            let t = rng.gen_range(0..self.shape.p);
            self.atom_on_entry(&mut d, &mut rng, k, (y, t));
        }
        Probe {
            profiles: vec![c, d.finish()],
            check: WitnessCheck::Rows { left: x, right: y },
        }
    }

    /// Entry `(j, t)` constant `h` (almost everywhere for the atom variant).
    fn constant_entry(&self, tag: &str, k: usize, h: f64) -> Probe {
        let Shape { m, p } = self.shape;
        let mut rng = self.rng(tag, k);
        let (j, t) = (k % m, (k / m) % p);
        let row = random_row(&mut rng, p, t, h);
        let base = fill_with_row(self.shape, j, &row).expect("row is a classification row");
        let locks = Locks { entry: Some((j, t)), ..Locks::default() };
        let mut draft = ProfileDraft::from_point(&base);
        draft.randomize_base(&mut rng, &locks);
        draft.perturb(&mut rng, 4, 0.25, m + p, &locks);
        if self.kind == ProbeKind::AlmostEverywhere {
            self.sprinkle_atoms(&mut draft, &mut rng, k, &locks);
            self.atom_on_entry(&mut draft, &mut rng, k, (j, t));
        }
        Probe {
            profiles: vec![draft.finish()],
            check: WitnessCheck::Entry { object: j, ty: t, expected: h },
        }
    }

    pub fn zero_unanimity(&self, k: usize) -> Probe {
        self.constant_entry("zero_unanimity", k, 0.0)
    }

    pub fn unanimity_extra(&self, k: usize) -> Probe {
        let h = match k % 4 {
            0 => 0.75,
            1 => 1.0,
            2 => 0.25,
            _ => rng::stream(self.seed, "unanimity_level", k as u64).gen_range(0.0..=1.0),
        };
        self.constant_entry("unanimity", k, h)
    }

    pub fn coherence_extra(&self, k: usize) -> Profile {
        let mut rng = self.rng("coherence", k);
        let mut draft = self.random_draft(&mut rng, &Locks::default());
        if self.kind == ProbeKind::AlmostEverywhere {
            self.sprinkle_atoms(&mut draft, &mut rng, k, &Locks::default());
        }
        draft.finish()
    }

    /// `(profile, start, len, shift)`. The first nine probes use three systematic
    /// block pairs that together move every individual, on a separating, a
    /// random and a crisp indicator profile; the rest draw random dyadic blocks
    /// and rotate through the three profile families.
    pub fn anonymity(&self, k: usize, grid_n: usize) -> (Profile, f64, f64, f64) {
        const SYSTEMATIC: [(f64, f64, f64); 3] = [(0.0, 31.0 / 64.0, 33.0 / 64.0), (0.0, 0.25, 0.5), (0.25, 0.25, 0.5)];
        let mut rng = self.rng("anonymity", k);
        let (start, len, shift) = match SYSTEMATIC.get(k % 3) {
            Some(&b) if k < 9 => b,
            _ => {
                let g = BLOCK_GRID;
                let l = rng.gen_range(1..=g / 4);
                let s = l + rng.gen_range(1..=g / 4);
                let a = rng.gen_range(0..=g - l - s);
                (a as f64 / g as f64, l as f64 / g as f64, s as f64 / g as f64)
            }
        };
        let family = if k < 9 { k / 3 } else { k % 3 };
        let c = match family {
            0 => separating_profile(self.shape, self.seed, k, grid_n),
            1 => self.random_draft(&mut rng, &Locks::default()).finish(),
            _ => {
                let t = rng.gen_range(1..self.shape.p);
                let b = rng.gen_range(1..BLOCK_GRID) as f64 / BLOCK_GRID as f64;
                let j = IntervalSet::prefix(b).expect("b inside [0, 1]");
                indicator_probe_profile(self.shape.m, self.shape.p, t, &j).expect("probe type in range")
            }
        };
        let c = if self.kind == ProbeKind::AlmostEverywhere {
            let mut d = ProfileDraft::from_profile(&c);
            self.sprinkle_atoms(&mut d, &mut rng, k, &Locks::default());
            d.finish()
        } else {
            c
        };
        (c, start, len, shift)
    }
}

/// A profile constant on each cell `[k/n, (k+1)/n)` whose cell classifications
/// are pairwise distinct. Objects 0 and 1 trade mass between types 0 and 1 by
/// a cell level `v_k`: shuffled, never zero, with distinct magnitudes and
/// alternating signs, so the levels have a small nonzero Lebesgue mean. The
/// sign of every level flips on odd probes so that aggregators switching on
/// the sign of a mean see both cases.
pub(crate) fn separating_profile(shape: Shape, seed: u64, k: usize, n: usize) -> Profile {
    let mut rng = rng::stream(seed, "separating", k as u64);
    let amp = 0.35 / shape.p as f64;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let order = sample(&mut rng, n, n);
    let levels: Vec<f64> = order
        .iter()
        .map(|r| {
            let magnitude = 0.2 + 0.8 * r as f64 / (n.max(2) - 1) as f64;
            let alternate = if r % 2 == 0 { 1.0 } else { -1.0 };
            sign * alternate * amp * magnitude
        })
        .collect();
    let breakpoints: Vec<f64> = (0..=n).map(|c| c as f64 / n as f64).collect();
    let g = PiecewiseFn::step(breakpoints, &levels).expect("uniform cells");
    let mut draft = ProfileDraft::from_point(&uniform_point(shape));
    let applied = draft.add_rectangle((0, 1), (0, 1), &g, amp);
    debug_assert!(applied > 0.0);
    draft.finish()
}
