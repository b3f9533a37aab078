use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::{Error, Result};

/// Radii of the inner (class 0) and outer (class 1) circle.
pub const CIRCLE_RADII: [f64; 2] = [1.0, 2.0];
/// Angular extent of each spiral arm, in full turns.
pub const SPIRAL_REVOLUTIONS: f64 = 1.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticKind {
    /// Standard 2-D normal samples labelled by quadrant (4 classes).
    QuadrantGaussian,
    /// Two concentric circles with radial Gaussian noise.
    Circles,
    /// Two interleaved Archimedean spiral arms.
    Spiral,
}

impl SyntheticKind {
    pub fn n_classes(self) -> usize {
        match self {
            SyntheticKind::QuadrantGaussian => 4,
            SyntheticKind::Circles | SyntheticKind::Spiral => 2,
        }
    }
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadrant_gaussian" | "quadrant" => Ok(SyntheticKind::QuadrantGaussian),
            "circles" => Ok(SyntheticKind::Circles),
            "spiral" => Ok(SyntheticKind::Spiral),
            other => Err(Error::invalid(format!("unknown synthetic kind `{other}`"))),
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntheticKind::QuadrantGaussian => "quadrant_gaussian",
            SyntheticKind::Circles => "circles",
            SyntheticKind::Spiral => "spiral",
        })
    }
}

/// Class of a point off the axes: 0 for x>0,y>0, then counter-clockwise.
pub(crate) fn quadrant_class(x: f64, y: f64) -> usize {
    match (x > 0.0, y > 0.0) {
        (true, true) => 0,
        (false, true) => 1,
        (false, false) => 2,
        (true, false) => 3,
    }
}

/// Generates a 2-D synthetic classification set.
///
/// `noise` is the standard deviation of the radial (circles) or isotropic
/// (spiral) Gaussian perturbation; the quadrant set ignores it. Circles and
/// spiral alternate classes sample by sample, so they are balanced for even
/// `n`.
pub fn generate_synthetic(kind: SyntheticKind, n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if n < 4 {
        return Err(Error::invalid(format!("{kind} needs at least 4 samples, got {n}")));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::invalid("noise must be finite and nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array2::zeros((n, 2));
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let (px, py, class) = match kind {
            SyntheticKind::QuadrantGaussian => loop {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                if a != 0.0 && b != 0.0 {
                    break (a, b, quadrant_class(a, b));
                }
            },
            SyntheticKind::Circles => {
                let class = i % 2;
                let theta = rng.random_range(0.0..2.0 * PI);
                let e: f64 = rng.sample(StandardNormal);
                let r = CIRCLE_RADII[class] + noise * e;
                (r * theta.cos(), r * theta.sin(), class)
            }
            SyntheticKind::Spiral => {
                let class = i % 2;
                let t = 0.1 + 0.9 * rng.random::<f64>();
                let theta = 2.0 * PI * SPIRAL_REVOLUTIONS * t + PI * class as f64;
                let ex: f64 = rng.sample(StandardNormal);
                let ey: f64 = rng.sample(StandardNormal);
                (
                    t * theta.cos() + noise * ex,
                    t * theta.sin() + noise * ey,
                    class,
                )
            }
        };
        x[[i, 0]] = px;
        x[[i, 1]] = py;
        labels.push(class);
    }
    Dataset::new(
        x,
        labels,
        kind.n_classes(),
        vec!["x".into(), "y".into()],
        vec![],
    )
}
