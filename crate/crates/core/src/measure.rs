//! Probability measures on `[0, 1]` made of a piecewise-polynomial density and
//! finitely many point masses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{PiecewiseFn, Poly};

/// Allowed deviation of the total mass from one.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointMass {
    pub point: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure")]
pub struct Measure {
    density: PiecewiseFn,
    masses: Vec<PointMass>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    density: PiecewiseFn,
    #[serde(default)]
    masses: Vec<PointMass>,
}

impl TryFrom<RawMeasure> for Measure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        Measure::new(raw.density, raw.masses)
    }
}

impl Measure {
    /// Validates nonnegativity, distinct mass points and normalization. Never rescales.
    pub fn new(density: PiecewiseFn, mut masses: Vec<PointMass>) -> Result<Self> {
        if let Err(v) = density.check_codomain(0.0, f64::INFINITY) {
            return Err(Error::InvalidMeasure(format!(
                "density is negative ({}) at {}",
                v.observed, v.location
            )));
        }
        for m in &masses {
            if !(0.0..=1.0).contains(&m.point) || !(m.mass >= 0.0) || !m.mass.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "point mass {m:?} must sit in [0, 1] with a nonnegative mass"
                )));
            }
        }
        masses.sort_by(|a, b| a.point.total_cmp(&b.point));
        if masses.windows(2).any(|w| w[0].point == w[1].point) {
            return Err(Error::InvalidMeasure(
                "mass points must be pairwise distinct".into(),
            ));
        }
        let mu = Measure { density, masses };
        let total = mu.total_mass();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidMeasure(format!(
                "total mass is {total}, expected 1"
            )));
        }
        Ok(mu)
    }

    /// The Lebesgue measure on `[0, 1]`.
    pub fn lebesgue() -> Self {
        Measure {
            density: PiecewiseFn::constant(1.0),
            masses: Vec::new(),
        }
    }

    pub fn dirac(point: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&point) {
            return Err(Error::Domain(point));
        }
        Ok(Measure {
            density: PiecewiseFn::constant(0.0),
            masses: vec![PointMass { point, mass: 1.0 }],
        })
    }

    /// Lebesgue–Stieltjes measure with the given weight function as density.
    pub fn with_density(density: PiecewiseFn) -> Result<Self> {
        Self::new(density, Vec::new())
    }

    /// Convex combination `theta * a + (1 - theta) * b`.
    pub fn mixture(a: &Measure, b: &Measure, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::argument(format!(
                "mixture weight {theta} is outside [0, 1]"
            )));
        }
        let density = PiecewiseFn::linear_combine(theta, &a.density, 1.0 - theta, &b.density)
            .without_atoms();
        let mut masses: Vec<PointMass> = Vec::new();
        let weighted = a
            .masses
            .iter()
            .map(|m| (m.point, theta * m.mass))
            .chain(b.masses.iter().map(|m| (m.point, (1.0 - theta) * m.mass)));
        for (point, mass) in weighted {
            if mass == 0.0 {
                continue;
            }
            match masses.iter_mut().find(|m| m.point == point) {
                Some(m) => m.mass += mass,
                None => masses.push(PointMass { point, mass }),
            }
        }
        Self::new(density, masses)
    }

    pub fn density(&self) -> &PiecewiseFn {
        &self.density
    }

    pub fn masses(&self) -> &[PointMass] {
        &self.masses
    }

    pub fn total_mass(&self) -> f64 {
        self.density_integral(&PiecewiseFn::constant(1.0), 0.0, 1.0)
            + self.masses.iter().map(|m| m.mass).sum::<f64>()
    }

    /// `∫_{[lo, hi]} f · density dλ` on the common refinement, by antiderivatives.
    fn density_integral(&self, f: &PiecewiseFn, lo: f64, hi: f64) -> f64 {
        let grid = PiecewiseFn::common_refinement(&[&self.density, f]);
        grid.windows(2)
            .filter(|w| w[1] > lo && w[0] < hi)
            .map(|w| {
                let (u, v) = (w[0].max(lo), w[1].min(hi));
                let prod: Poly = self.density.piece_on(w[0], w[1]).mul(f.piece_on(w[0], w[1]));
                prod.integral(u, v)
            })
            .sum()
    }

    /// `∫ f dμ`. Density integration ignores atoms of `f`; point masses read the
    /// pointwise value of `f`, atoms included.
    pub fn integrate(&self, f: &PiecewiseFn) -> f64 {
        self.density_integral(f, 0.0, 1.0)
            + self
                .masses
                .iter()
                .map(|m| m.mass * f.value_at(m.point))
                .sum::<f64>()
    }

    /// `μ([0, x])`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(x));
        }
        if x == 1.0 {
            return Ok(self.total_mass());
        }
        Ok(self.density_integral(&PiecewiseFn::constant(1.0), 0.0, x)
            + self
                .masses
                .iter()
                .filter(|m| m.point <= x)
                .map(|m| m.mass)
                .sum::<f64>())
    }

    /// True when the measure is Lebesgue measure: density one almost everywhere and
    /// no point masses.
    pub fn is_lebesgue(&self) -> bool {
        self.masses.iter().all(|m| m.mass == 0.0)
            && self.density.ae_equal(&PiecewiseFn::constant(1.0), 1e-12)
    }

    /// The point carrying all the mass, when the measure is a Dirac measure.
    pub fn point_mass_location(&self) -> Option<f64> {
        let heavy: Vec<&PointMass> = self
            .masses
            .iter()
            .filter(|m| (m.mass - 1.0).abs() <= NORMALIZATION_TOL)
            .collect();
        match heavy.as_slice() {
            [m] => Some(m.point),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_i_squared() -> Measure {
        Measure::with_density(PiecewiseFn::polynomial(Poly::new(vec![0.0, 0.0, 3.0]))).unwrap()
    }

    #[test]
    fn integrate_examples() {
        let mu = three_i_squared();
        let f = PiecewiseFn::polynomial(Poly::new(vec![0.0, 2.0 / 3.0]));
        assert!((mu.integrate(&f) - 0.5).abs() < 1e-15);

        let d = Measure::dirac(0.3).unwrap();
        let sq = PiecewiseFn::polynomial(Poly::new(vec![0.0, 0.0, 1.0]));
        assert!((d.integrate(&sq) - 0.09).abs() < 1e-15);

        let delta0 = PiecewiseFn::constant(0.0).with_atom(0.0, 1.0).unwrap();
        assert_eq!(Measure::lebesgue().integrate(&delta0), 0.0);
        assert_eq!(Measure::dirac(0.0).unwrap().integrate(&delta0), 1.0);
    }

    #[test]
    fn cdf_examples() {
        let mu = three_i_squared();
        assert!((mu.cdf(0.5).unwrap() - 0.125).abs() < 1e-15);
        let d = Measure::dirac(0.3).unwrap();
        assert_eq!(d.cdf(0.2).unwrap(), 0.0);
        assert_eq!(d.cdf(0.3).unwrap(), 1.0);
        assert!((mu.cdf(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(mu.cdf(1.2).is_err());
    }

    #[test]
    fn mixture_examples() {
        let lam = Measure::lebesgue();
        let d = Measure::dirac(0.7).unwrap();
        let mix = Measure::mixture(&lam, &d, 0.5).unwrap();
        assert!((mix.cdf(0.7).unwrap() - 0.85).abs() < 1e-15);

        let mu = three_i_squared();
        let same = Measure::mixture(&mu, &mu, 0.3).unwrap();
        for x in [0.1, 0.5, 0.9] {
            assert!((same.cdf(x).unwrap() - mu.cdf(x).unwrap()).abs() < 1e-15);
        }

        let d0 = Measure::dirac(0.0).unwrap();
        let edge = Measure::mixture(&lam, &d0, 0.0).unwrap();
        assert_eq!(edge.point_mass_location(), Some(0.0));
        assert_eq!(edge.cdf(0.0).unwrap(), 1.0);

        assert!(Measure::mixture(&lam, &d0, 1.5).is_err());
    }

    #[test]
    fn construction_validates_instead_of_rescaling() {
        assert!(Measure::with_density(PiecewiseFn::constant(2.0)).is_err());
        let neg = PiecewiseFn::polynomial(Poly::new(vec![2.0, -2.5]));
        assert!(Measure::new(neg, vec![PointMass { point: 0.9, mass: 0.25 }]).is_err());
        let dup = vec![
            PointMass { point: 0.5, mass: 0.5 },
            PointMass { point: 0.5, mass: 0.5 },
        ];
        assert!(Measure::new(PiecewiseFn::constant(0.0), dup).is_err());
    }

    #[test]
    fn lebesgue_and_dirac_detection() {
        assert!(Measure::lebesgue().is_lebesgue());
        assert!(!three_i_squared().is_lebesgue());
        assert_eq!(Measure::dirac(0.4).unwrap().point_mass_location(), Some(0.4));
        assert_eq!(Measure::lebesgue().point_mass_location(), None);
    }

    #[test]
    fn json_round_trip_validates() {
        let mu = Measure::mixture(&Measure::lebesgue(), &Measure::dirac(0.7).unwrap(), 0.5).unwrap();
        let s = serde_json::to_string(&mu).unwrap();
        let back: Measure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, mu);
        let bad = r#"{"density":{"breakpoints":[0,1],"pieces":[{"coeffs":[2]}]}}"#;
        assert!(serde_json::from_str::<Measure>(bad).is_err());
    }
}
