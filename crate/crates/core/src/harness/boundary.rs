use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::bench::into_string;
use super::model::Classifier;
use crate::{Error, Result};

/// Axis-aligned rectangle in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    /// Bounding box of the rows of an N x 2 matrix, padded by `pad` times
    /// its extent on every side.
    pub fn around(points: &Array2<f64>, pad: f64) -> Result<Self> {
        if points.ncols() != 2 || points.nrows() == 0 {
            return Err(Error::invalid("bounds need a nonempty N x 2 matrix"));
        }
        let col = |j: usize| {
            points
                .column(j)
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
        };
        let (x0, x1) = col(0);
        let (y0, y1) = col(1);
        let (px, py) = ((x1 - x0) * pad, (y1 - y0) * pad);
        Ok(Self {
            x_min: x0 - px,
            x_max: x1 + px,
            y_min: y0 - py,
            y_max: y1 + py,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub x: f64,
    pub y: f64,
    pub class: usize,
}

/// Predicted class on a `resolution x resolution` lattice spanning `bounds`
/// (endpoints included), x varying fastest.
pub fn export_decision_grid(
    model: &dyn Classifier,
    bounds: Bounds,
    resolution: usize,
) -> Result<Vec<GridCell>> {
    if model.n_features() != 2 {
        return Err(Error::invalid(format!(
            "decision grids need a 2-feature model, got {}",
            model.n_features()
        )));
    }
    if resolution == 0 {
        return Err(Error::invalid("resolution must be positive"));
    }
    let coord = |lo: f64, hi: f64, i: usize| {
        if resolution == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (resolution - 1) as f64
        }
    };
    let mut lattice = Array2::zeros((resolution * resolution, 2));
    for iy in 0..resolution {
        for ix in 0..resolution {
            let row = iy * resolution + ix;
            lattice[[row, 0]] = coord(bounds.x_min, bounds.x_max, ix);
            lattice[[row, 1]] = coord(bounds.y_min, bounds.y_max, iy);
        }
    }
    let classes = model.predict(lattice.view())?;
    Ok(lattice
        .rows()
        .into_iter()
        .zip(classes)
        .map(|(p, class)| GridCell {
            x: p[0],
            y: p[1],
            class,
        })
        .collect())
}

pub fn grid_csv(cells: &[GridCell]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for c in cells {
        w.serialize(c).map_err(|e| Error::Table(e.to_string()))?;
    }
    into_string(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::ArrayView2;

    struct Constant(usize, usize);

    impl Classifier for Constant {
        fn n_features(&self) -> usize {
            self.1
        }

        fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
            Ok(vec![self.0; x.nrows()])
        }
    }

    const UNIT: Bounds = Bounds {
        x_min: 0.0,
        x_max: 1.0,
        y_min: 0.0,
        y_max: 1.0,
    };

    #[test]
    fn three_by_three_lattice() {
        let cells = export_decision_grid(&Constant(2, 2), UNIT, 3).unwrap();
        assert_eq!(cells.len(), 9);
        let mut pts: Vec<(f64, f64)> = cells.iter().map(|c| (c.x, c.y)).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected = Vec::new();
        for x in [0.0, 0.5, 1.0] {
            for y in [0.0, 0.5, 1.0] {
                expected.push((x, y));
            }
        }
        assert_eq!(pts, expected);
        assert!(cells.iter().all(|c| c.class == 2));
        let csv = grid_csv(&cells).unwrap();
        assert!(csv.starts_with("x,y,class\n"));
        assert_eq!(csv.lines().count(), 10);
    }

    #[test]
    fn rejects_non_planar_models() {
        assert!(export_decision_grid(&Constant(0, 3), UNIT, 3).is_err());
    }
}
