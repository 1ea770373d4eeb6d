use serde::{Deserialize, Serialize};

/// Interior sample count used for range checks of pieces of degree four or more.
pub const DENSE_SAMPLES: usize = 4096;

/// A real polynomial with ascending-degree coefficients, `coeffs[k]` multiplying `i^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

/// Extreme values of a polynomial over a closed interval, with the points attaining them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub argmin: f64,
    pub max: f64,
    pub argmax: f64,
}

impl Extrema {
    fn new(x: f64, v: f64) -> Self {
        Extrema {
            min: v,
            argmin: x,
            max: v,
            argmax: x,
        }
    }

    fn push(&mut self, x: f64, v: f64) {
        if v < self.min {
            self.min = v;
            self.argmin = x;
        }
        if v > self.max {
            self.max = v;
            self.argmax = x;
        }
    }

    pub(crate) fn merge(&mut self, other: &Extrema) {
        self.push(other.argmin, other.min);
        self.push(other.argmax, other.max);
    }
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Poly { coeffs };
        if p.coeffs.is_empty() {
            p.coeffs.push(0.0);
        }
        p
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    pub fn zero() -> Self {
        Poly::constant(0.0)
    }

    /// Degree after ignoring trailing exact zeros. The zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn scale(&self, a: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| a * c).collect())
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Poly, b: f64) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let x = self.coeffs.get(k).copied().unwrap_or(0.0);
                let y = other.coeffs.get(k).copied().unwrap_or(0.0);
                a * x + b * y
            })
            .collect();
        Poly::new(coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k as f64 + 1.0)),
        );
        Poly::new(out)
    }

    /// Exact integral over `[a, b]` through the antiderivative.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    /// The polynomial `x -> self(x + s)`, re-expanded in `x` (Taylor shift).
    pub fn shift(&self, s: f64) -> Poly {
        let mut b = self.coeffs.clone();
        let n = b.len();
        if s == 0.0 || n <= 1 {
            return Poly::new(b);
        }
        for i in 0..n - 1 {
            for j in (i..n - 1).rev() {
                b[j] += s * b[j + 1];
            }
        }
        Poly::new(b)
    }

    /// The polynomial `x -> self(x / w)`.
    pub fn rescale(&self, w: f64) -> Poly {
        let mut f = 1.0;
        Poly::new(
            self.coeffs
                .iter()
                .map(|&c| {
                    let v = c * f;
                    f /= w;
                    v
                })
                .collect(),
        )
    }

    /// Minimum and maximum over `[a, b]`.
    ///
    /// Up to cubic pieces the critical points come from the closed-form roots of the
    /// derivative; higher degrees fall back to [`DENSE_SAMPLES`] interior samples.
    pub fn extrema(&self, a: f64, b: f64) -> Extrema {
        let mut ext = Extrema::new(a, self.eval(a));
        ext.push(b, self.eval(b));
        if self.degree() <= 3 {
            for x in self.derivative().real_roots_low_degree() {
                if x > a && x < b {
                    ext.push(x, self.eval(x));
                }
            }
        } else {
            let h = (b - a) / (DENSE_SAMPLES + 1) as f64;
            for k in 1..=DENSE_SAMPLES {
                let x = a + h * k as f64;
                ext.push(x, self.eval(x));
            }
        }
        ext
    }

    /// Real roots of a polynomial of degree at most two.
    fn real_roots_low_degree(&self) -> Vec<f64> {
        let c = |k: usize| self.coeffs.get(k).copied().unwrap_or(0.0);
        match self.degree() {
            0 => Vec::new(),
            1 => vec![-c(0) / c(1)],
            2 => {
                let (a, b, cc) = (c(2), c(1), c(0));
                let disc = b * b - 4.0 * a * cc;
                if disc < 0.0 {
                    return Vec::new();
                }
                let sq = disc.sqrt();
                // Numerically stable pair of roots.
                let q = -0.5 * (b + b.signum() * sq);
                if q == 0.0 {
                    return vec![0.0];
                }
                vec![q / a, cc / q]
            }
            _ => unreachable!("derivative of a cubic has degree at most two"),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}
