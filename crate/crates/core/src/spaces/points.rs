use std::io::{Read, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::spec::{SpaceKind, SpaceSpec};
use crate::error::{Error, Result};

/// Slack allowed when checking loaded IFS points against the attractor's box.
const BOX_SLACK: f64 = 1e-9;

/// An ordered point sample `x_1, ..., x_n` in a space.
///
/// Coordinates are stored row-major in one flat buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    space: Arc<SpaceSpec>,
    coords: Vec<f64>,
    seed: Option<u64>,
}

impl PointSet {
    /// Builds a point set from rows, checking dimensions and that every point
    /// lies in the space's bounding box.
    pub fn new(space: Arc<SpaceSpec>, rows: &[Vec<f64>], seed: Option<u64>) -> Result<Self> {
        let dim = space.ambient_dim();
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::from_flat(space, coords, seed)
    }

    pub fn from_flat(space: Arc<SpaceSpec>, coords: Vec<f64>, seed: Option<u64>) -> Result<Self> {
        let dim = space.ambient_dim();
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        let ps = Self {
            space,
            coords,
            seed,
        };
        ps.check_bounds()?;
        Ok(ps)
    }

    fn check_bounds(&self) -> Result<()> {
        let (lo, hi) = self.space.bounding_box();
        let slack = match self.space.kind() {
            SpaceKind::IfsAttractor => BOX_SLACK + self.space.truncation_bound(),
            _ => 0.0,
        };
        let torus = self.space.kind() == SpaceKind::FlatTorus;
        for i in 0..self.len() {
            let p = self.point(i);
            let ok = p.iter().enumerate().all(|(k, &x)| {
                x.is_finite()
                    && x >= lo[k] - slack
                    && if torus { x < hi[k] } else { x <= hi[k] + slack }
            });
            if !ok {
                return Err(Error::OutOfBounds { index: i });
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<SpaceSpec> {
        &self.space
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.space.ambient_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.space.ambient_dim()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.space.ambient_dim();
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.space.ambient_dim())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Distance between points `i` and `j` under the space's metric.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.space.distance_unchecked(self.point(i), self.point(j))
    }

    /// Writes one point per row, each coordinate with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        for p in self.iter() {
            w.write_record(p.iter().map(|x| format_f64(*x)))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a headerless CSV of coordinates into a point set on `space`.
    pub fn read_csv<R: Read>(space: Arc<SpaceSpec>, input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(input);
        let mut coords = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.len() != space.ambient_dim() {
                return Err(Error::Parse(format!(
                    "row {}: expected {} columns, found {}",
                    line + 1,
                    space.ambient_dim(),
                    rec.len()
                )));
            }
            for field in rec.iter() {
                let x: f64 = field.parse().map_err(|_| {
                    Error::Parse(format!("row {}: '{field}' is not a number", line + 1))
                })?;
                coords.push(x);
            }
        }
        Self::from_flat(space, coords, None)
    }
}

/// Scientific notation with 17 significant digits; parses back bit-exactly.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Counts the columns of the first data row of a CSV point file.
pub fn csv_column_count(text: &str) -> Option<usize> {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').count())
}

/// Draws `n` i.i.d. points from the space's probability measure.
///
/// Cube and torus sample uniform coordinates. IFS points apply
/// `address_depth` uniformly chosen maps to the first map's fixed point,
/// which lies on the attractor. The output is a pure function of
/// `(spec, n, seed)`.
pub fn sample(spec: &Arc<SpaceSpec>, n: usize, seed: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::TooFewPoints {
            op: "sample",
            min: 1,
            found: 0,
        });
    }
    let dim = spec.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(n * dim);
    match spec.kind() {
        SpaceKind::UnitCube | SpaceKind::FlatTorus => {
            for _ in 0..n * dim {
                coords.push(rng.random::<f64>());
            }
        }
        SpaceKind::IfsAttractor => {
            let maps = spec.maps();
            let base = maps[0].fixed_point();
            let mut x = vec![0.0; dim];
            for _ in 0..n {
                x.copy_from_slice(&base);
                for _ in 0..spec.address_depth() {
                    maps[rng.random_range(0..maps.len())].apply(&mut x);
                }
                coords.extend_from_slice(&x);
            }
        }
    }
    PointSet::from_flat(Arc::clone(spec), coords, Some(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube2() -> Arc<SpaceSpec> {
        Arc::new(SpaceSpec::unit_cube(2).unwrap())
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = cube2();
        let a = sample(&s, 4, 99).unwrap();
        let b = sample(&s, 4, 99).unwrap();
        assert_eq!(a.coords(), b.coords());
        let c = sample(&s, 4, 100).unwrap();
        assert_ne!(a.coords(), c.coords());
    }

    #[test]
    fn zero_points_rejected() {
        assert!(sample(&cube2(), 0, 1).is_err());
    }

    #[test]
    fn uniform_coordinate_means() {
        // Standard error of the mean is sqrt(1/12)/100 ~ 0.0029, so 5 SE ~ 0.0144.
        let ps = sample(&cube2(), 10_000, 2024).unwrap();
        for k in 0..2 {
            let mean = ps.iter().map(|p| p[k]).sum::<f64>() / ps.len() as f64;
            assert!((0.47..=0.53).contains(&mean), "mean {mean}");
        }
    }

    #[test]
    fn gasket_points_stay_in_triangle() {
        let g = Arc::new(
            SpaceSpec::sierpinski_gasket()
                .with_address_depth(20)
                .unwrap(),
        );
        let ps = sample(&g, 10_000, 3).unwrap();
        let tol = 2f64.powi(-20) * g.diameter();
        let s3 = 3f64.sqrt();
        for p in ps.iter() {
            let (x, y) = (p[0], p[1]);
            // Signed distances to the three edges of the unit triangle.
            let d0 = y;
            let d1 = (s3 * x - y) / 2.0;
            let d2 = (s3 * (1.0 - x) - y) / 2.0;
            assert!(d0 >= -tol && d1 >= -tol && d2 >= -tol, "{p:?}");
        }
    }

    #[test]
    fn out_of_box_points_rejected() {
        let s = cube2();
        assert!(matches!(
            PointSet::new(s.clone(), &[vec![0.5, 1.5]], None),
            Err(Error::OutOfBounds { index: 0 })
        ));
        let t = Arc::new(SpaceSpec::flat_torus(1).unwrap());
        assert!(PointSet::new(t, &[vec![1.0]], None).is_err());
        assert!(PointSet::new(s, &[vec![0.5]], None).is_err());
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let g = Arc::new(SpaceSpec::sierpinski_gasket());
        let ps = sample(&g, 200, 11).unwrap();
        let mut buf = Vec::new();
        ps.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 200);
        assert_eq!(csv_column_count(&text), Some(2));
        let back = PointSet::read_csv(g, buf.as_slice()).unwrap();
        assert_eq!(back.coords(), ps.coords());
        assert_eq!(back.seed(), None);
    }

    #[test]
    fn csv_parse_errors() {
        let s = cube2();
        assert!(matches!(
            PointSet::read_csv(s.clone(), "0.1,abc\n".as_bytes()),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            PointSet::read_csv(s, "0.1,0.2,0.3\n".as_bytes()),
            Err(Error::Parse(_))
        ));
    }
}
