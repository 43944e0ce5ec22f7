use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of random maps composed per IFS sample.
pub const DEFAULT_ADDRESS_DEPTH: u32 = 30;

/// Relative tolerance when comparing IFS contraction ratios for equality.
const RATIO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    UnitCube,
    FlatTorus,
    IfsAttractor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    #[default]
    Euclidean,
    Chebyshev,
}

/// A contracting similitude `x -> ratio * x + translation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Similitude {
    pub ratio: f64,
    pub translation: Vec<f64>,
}

impl Similitude {
    pub fn new(ratio: f64, translation: Vec<f64>) -> Self {
        Self { ratio, translation }
    }

    #[inline]
    pub fn apply(&self, x: &mut [f64]) {
        for (xi, ti) in x.iter_mut().zip(&self.translation) {
            *xi = self.ratio * *xi + ti;
        }
    }

    /// The unique fixed point `t / (1 - ratio)`.
    pub fn fixed_point(&self) -> Vec<f64> {
        self.translation
            .iter()
            .map(|t| t / (1.0 - self.ratio))
            .collect()
    }
}

/// A bounded metric space carrying a d-Ahlfors-regular probability measure.
///
/// Constructed only through [`make_space`] or the named constructors, all of
/// which validate the parameters and compute the diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    kind: SpaceKind,
    ambient_dim: usize,
    metric: Metric,
    maps: Vec<Similitude>,
    address_depth: u32,
    diameter: f64,
    bbox: (Vec<f64>, Vec<f64>),
}

impl SpaceSpec {
    pub fn unit_cube(dim: usize) -> Result<Self> {
        Self::build(SpaceKind::UnitCube, dim, Metric::Euclidean, Vec::new(), 1)
    }

    pub fn flat_torus(dim: usize) -> Result<Self> {
        Self::build(SpaceKind::FlatTorus, dim, Metric::Euclidean, Vec::new(), 1)
    }

    pub fn ifs(maps: Vec<Similitude>, address_depth: u32) -> Result<Self> {
        let dim = maps.first().map(|m| m.translation.len()).unwrap_or(0);
        Self::build(
            SpaceKind::IfsAttractor,
            dim,
            Metric::Euclidean,
            maps,
            address_depth,
        )
    }

    /// Sierpinski gasket with unit side and vertices (0,0), (1,0), (1/2, sqrt(3)/2).
    pub fn sierpinski_gasket() -> Self {
        Self::ifs(gasket_maps(), DEFAULT_ADDRESS_DEPTH).expect("gasket parameters are valid")
    }

    /// Sierpinski carpet on the unit square.
    pub fn sierpinski_carpet() -> Self {
        Self::ifs(carpet_maps(), DEFAULT_ADDRESS_DEPTH).expect("carpet parameters are valid")
    }

    pub fn with_metric(self, metric: Metric) -> Result<Self> {
        Self::build(
            self.kind,
            self.ambient_dim,
            metric,
            self.maps,
            self.address_depth,
        )
    }

    pub fn with_address_depth(self, depth: u32) -> Result<Self> {
        Self::build(self.kind, self.ambient_dim, self.metric, self.maps, depth)
    }

    fn build(
        kind: SpaceKind,
        ambient_dim: usize,
        metric: Metric,
        maps: Vec<Similitude>,
        address_depth: u32,
    ) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidSpace("ambient_dim must be >= 1".into()));
        }
        if address_depth == 0 {
            return Err(Error::InvalidSpace("address_depth must be >= 1".into()));
        }
        let (diameter, bbox) = match kind {
            SpaceKind::UnitCube => {
                let diam = match metric {
                    Metric::Euclidean => (ambient_dim as f64).sqrt(),
                    Metric::Chebyshev => 1.0,
                };
                (diam, (vec![0.0; ambient_dim], vec![1.0; ambient_dim]))
            }
            SpaceKind::FlatTorus => {
                let diam = match metric {
                    Metric::Euclidean => (ambient_dim as f64).sqrt() / 2.0,
                    Metric::Chebyshev => 0.5,
                };
                (diam, (vec![0.0; ambient_dim], vec![1.0; ambient_dim]))
            }
            SpaceKind::IfsAttractor => {
                validate_maps(&maps, ambient_dim)?;
                let fixed: Vec<Vec<f64>> = maps.iter().map(Similitude::fixed_point).collect();
                // The convex hull of the attractor is the hull of the fixed points,
                // so its diameter is attained between two of them.
                let mut diam: f64 = 0.0;
                for (i, a) in fixed.iter().enumerate() {
                    for b in &fixed[i + 1..] {
                        diam = diam.max(norm_distance(metric, a, b));
                    }
                }
                let mut lo = vec![f64::INFINITY; ambient_dim];
                let mut hi = vec![f64::NEG_INFINITY; ambient_dim];
                for p in &fixed {
                    for k in 0..ambient_dim {
                        lo[k] = lo[k].min(p[k]);
                        hi[k] = hi[k].max(p[k]);
                    }
                }
                (diam, (lo, hi))
            }
        };
        if !(diameter.is_finite() && diameter > 0.0) {
            return Err(Error::InvalidSpace(format!(
                "diameter must be finite and positive, got {diameter}"
            )));
        }
        Ok(Self {
            kind,
            ambient_dim,
            metric,
            maps: if kind == SpaceKind::IfsAttractor {
                maps
            } else {
                Vec::new()
            },
            address_depth,
            diameter,
            bbox,
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn maps(&self) -> &[Similitude] {
        &self.maps
    }

    pub fn address_depth(&self) -> u32 {
        self.address_depth
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Axis-aligned bounding box `(lo, hi)` of the space.
    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.bbox.0, &self.bbox.1)
    }

    /// Upper bound on the distance between a truncated-address IFS sample
    /// and the attractor: `ratio^depth * diameter`. Zero for cube and torus.
    pub fn truncation_bound(&self) -> f64 {
        match self.kind {
            SpaceKind::IfsAttractor => {
                self.maps[0].ratio.powi(self.address_depth as i32) * self.diameter
            }
            _ => 0.0,
        }
    }

    /// Short tag used in experiment records.
    pub fn tag(&self) -> String {
        match self.kind {
            SpaceKind::UnitCube => format!("cube{}", self.ambient_dim),
            SpaceKind::FlatTorus => format!("torus{}", self.ambient_dim),
            SpaceKind::IfsAttractor => {
                if self.maps == gasket_maps() {
                    "gasket".to_string()
                } else if self.maps == carpet_maps() {
                    "carpet".to_string()
                } else {
                    format!("ifs{}x{}", self.maps.len(), self.ambient_dim)
                }
            }
        }
    }

    /// Distance between two points, with dimension checks.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: a.len(),
            });
        }
        if b.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: b.len(),
            });
        }
        Ok(self.distance_unchecked(a, b))
    }

    #[inline]
    pub(crate) fn distance_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self.kind {
            SpaceKind::FlatTorus => {
                let wrap = |x: f64, y: f64| {
                    let d = (x - y).abs();
                    d.min(1.0 - d)
                };
                match self.metric {
                    Metric::Euclidean => a
                        .iter()
                        .zip(b)
                        .map(|(x, y)| {
                            let d = wrap(*x, *y);
                            d * d
                        })
                        .sum::<f64>()
                        .sqrt(),
                    Metric::Chebyshev => a
                        .iter()
                        .zip(b)
                        .map(|(x, y)| wrap(*x, *y))
                        .fold(0.0, f64::max),
                }
            }
            _ => norm_distance(self.metric, a, b),
        }
    }
}

#[inline]
fn norm_distance(metric: Metric, a: &[f64], b: &[f64]) -> f64 {
    match metric {
        Metric::Euclidean => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        Metric::Chebyshev => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
    }
}

fn validate_maps(maps: &[Similitude], dim: usize) -> Result<()> {
    if maps.is_empty() {
        return Err(Error::InvalidSpace("IFS map list is empty".into()));
    }
    if maps.len() < 2 {
        return Err(Error::InvalidSpace("IFS needs at least 2 maps".into()));
    }
    let first = maps[0].ratio;
    for m in maps {
        if !(m.ratio > 0.0 && m.ratio < 1.0) {
            return Err(Error::InvalidSpace(format!(
                "contraction ratio {} not in (0, 1)",
                m.ratio
            )));
        }
        if m.translation.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.translation.len(),
            });
        }
        if m.translation.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidSpace("non-finite IFS translation".into()));
        }
    }
    for m in maps {
        if (m.ratio - first).abs() > RATIO_TOLERANCE * first {
            return Err(Error::UnequalRatios {
                first,
                other: m.ratio,
            });
        }
    }
    Ok(())
}

fn gasket_maps() -> Vec<Similitude> {
    let h = 3f64.sqrt() / 4.0;
    vec![
        Similitude::new(0.5, vec![0.0, 0.0]),
        Similitude::new(0.5, vec![0.5, 0.0]),
        Similitude::new(0.5, vec![0.25, h]),
    ]
}

fn carpet_maps() -> Vec<Similitude> {
    let mut maps = Vec::with_capacity(8);
    for i in 0..3 {
        for j in 0..3 {
            if i == 1 && j == 1 {
                continue;
            }
            maps.push(Similitude::new(
                1.0 / 3.0,
                vec![i as f64 / 3.0, j as f64 / 3.0],
            ));
        }
    }
    maps
}

/// Dimension `d` of the natural measure: `log m / log(1/r)` for an
/// equal-ratio IFS with `m` maps, the ambient dimension otherwise.
pub fn similarity_dimension(spec: &SpaceSpec) -> f64 {
    match spec.kind {
        SpaceKind::UnitCube | SpaceKind::FlatTorus => spec.ambient_dim as f64,
        SpaceKind::IfsAttractor => {
            let m = spec.maps.len() as f64;
            m.ln() / (1.0 / spec.maps[0].ratio).ln()
        }
    }
}

/// User-facing space parameters, as read from TOML or the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceParams {
    pub kind: ParamKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ifs: Option<IfsParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamKind {
    #[serde(alias = "unit-cube")]
    Cube,
    #[serde(alias = "flat-torus")]
    Torus,
    #[serde(alias = "ifs-attractor")]
    Ifs,
    Gasket,
    Carpet,
}

impl std::str::FromStr for ParamKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cube" | "unit-cube" => Ok(Self::Cube),
            "torus" | "flat-torus" => Ok(Self::Torus),
            "ifs" | "ifs-attractor" => Ok(Self::Ifs),
            "gasket" => Ok(Self::Gasket),
            "carpet" => Ok(Self::Carpet),
            other => Err(Error::Config(format!("unknown space kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsParams {
    pub ratio: Ratios,
    pub translations: Vec<Vec<f64>>,
}

/// One shared ratio, or one ratio per map (which must then all agree).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ratios {
    Shared(f64),
    PerMap(Vec<f64>),
}

impl SpaceParams {
    pub fn new(kind: ParamKind) -> Self {
        Self {
            kind,
            dim: None,
            metric: Metric::Euclidean,
            ifs: None,
            depth: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("space params serialize")
    }
}

impl SpaceSpec {
    /// The explicit parameter table describing this space.
    pub fn to_params(&self) -> SpaceParams {
        let (kind, ifs) = match self.kind {
            SpaceKind::UnitCube => (ParamKind::Cube, None),
            SpaceKind::FlatTorus => (ParamKind::Torus, None),
            SpaceKind::IfsAttractor => (
                ParamKind::Ifs,
                Some(IfsParams {
                    ratio: Ratios::Shared(self.maps[0].ratio),
                    translations: self.maps.iter().map(|m| m.translation.clone()).collect(),
                }),
            ),
        };
        SpaceParams {
            kind,
            dim: Some(self.ambient_dim),
            metric: self.metric,
            ifs,
            depth: (self.kind == SpaceKind::IfsAttractor).then_some(self.address_depth),
        }
    }
}

/// Validates space parameters and builds the space, computing its diameter.
pub fn make_space(params: &SpaceParams) -> Result<SpaceSpec> {
    let depth = params.depth.unwrap_or(DEFAULT_ADDRESS_DEPTH);
    let spec = match params.kind {
        ParamKind::Cube => SpaceSpec::build(
            SpaceKind::UnitCube,
            params.dim.unwrap_or(2),
            params.metric,
            Vec::new(),
            1,
        )?,
        ParamKind::Torus => SpaceSpec::build(
            SpaceKind::FlatTorus,
            params.dim.unwrap_or(2),
            params.metric,
            Vec::new(),
            1,
        )?,
        ParamKind::Gasket | ParamKind::Carpet => {
            if let Some(d) = params.dim {
                if d != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        found: d,
                    });
                }
            }
            let maps = if params.kind == ParamKind::Gasket {
                gasket_maps()
            } else {
                carpet_maps()
            };
            SpaceSpec::build(SpaceKind::IfsAttractor, 2, params.metric, maps, depth)?
        }
        ParamKind::Ifs => {
            let ifs = params
                .ifs
                .as_ref()
                .ok_or_else(|| Error::InvalidSpace("ifs kind requires an [ifs] table".into()))?;
            if ifs.translations.is_empty() {
                return Err(Error::InvalidSpace("IFS map list is empty".into()));
            }
            let ratios: Vec<f64> = match &ifs.ratio {
                Ratios::Shared(r) => vec![*r; ifs.translations.len()],
                Ratios::PerMap(rs) => {
                    if rs.len() != ifs.translations.len() {
                        return Err(Error::InvalidSpace(format!(
                            "{} ratios for {} translations",
                            rs.len(),
                            ifs.translations.len()
                        )));
                    }
                    rs.clone()
                }
            };
            let dim = ifs.translations[0].len();
            if let Some(d) = params.dim {
                if d != dim {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: dim,
                    });
                }
            }
            let maps = ratios
                .into_iter()
                .zip(ifs.translations.iter().cloned())
                .map(|(r, t)| Similitude::new(r, t))
                .collect();
            SpaceSpec::build(SpaceKind::IfsAttractor, dim, params.metric, maps, depth)?
        }
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_diameter() {
        let s = SpaceSpec::unit_cube(2).unwrap();
        assert_eq!(s.diameter(), 2f64.sqrt());
        let s = s.with_metric(Metric::Chebyshev).unwrap();
        assert_eq!(s.diameter(), 1.0);
    }

    #[test]
    fn torus_diameter() {
        assert_eq!(SpaceSpec::flat_torus(2).unwrap().diameter(), 2f64.sqrt() / 2.0);
    }

    #[test]
    fn gasket_is_valid_with_unit_diameter() {
        let g = SpaceSpec::sierpinski_gasket();
        assert_eq!(g.kind(), SpaceKind::IfsAttractor);
        assert!((g.diameter() - 1.0).abs() < 1e-15);
        assert_eq!(g.tag(), "gasket");
    }

    #[test]
    fn carpet_diameter_is_square_diagonal() {
        let c = SpaceSpec::sierpinski_carpet();
        assert!((c.diameter() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unequal_ratios_rejected() {
        let mut p = SpaceParams::new(ParamKind::Ifs);
        p.ifs = Some(IfsParams {
            ratio: Ratios::PerMap(vec![0.5, 1.0 / 3.0]),
            translations: vec![vec![0.0, 0.0], vec![0.5, 0.0]],
        });
        assert!(matches!(make_space(&p), Err(Error::UnequalRatios { .. })));
    }

    #[test]
    fn empty_maps_and_zero_dim_rejected() {
        let mut p = SpaceParams::new(ParamKind::Ifs);
        p.ifs = Some(IfsParams {
            ratio: Ratios::Shared(0.5),
            translations: vec![],
        });
        assert!(matches!(make_space(&p), Err(Error::InvalidSpace(_))));

        let mut p = SpaceParams::new(ParamKind::Cube);
        p.dim = Some(0);
        let err = make_space(&p).unwrap_err();
        assert!(err.to_string().contains("ambient_dim"));

        assert!(SpaceSpec::ifs(vec![Similitude::new(0.5, vec![0.0])], 5).is_err());
        assert!(SpaceSpec::ifs(
            vec![
                Similitude::new(1.5, vec![0.0]),
                Similitude::new(1.5, vec![1.0])
            ],
            5
        )
        .is_err());
    }

    #[test]
    fn dimensions_closed_form() {
        let g = similarity_dimension(&SpaceSpec::sierpinski_gasket());
        assert!((g - 3f64.ln() / 2f64.ln()).abs() < 1e-14);
        assert!((g - 1.584_962_5).abs() < 1e-7);
        let c = similarity_dimension(&SpaceSpec::sierpinski_carpet());
        assert!((c - 1.892_789_2).abs() < 1e-7);
        assert_eq!(similarity_dimension(&SpaceSpec::unit_cube(2).unwrap()), 2.0);
    }

    #[test]
    fn distance_examples() {
        let cube = SpaceSpec::unit_cube(2).unwrap();
        assert_eq!(cube.distance(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        let d = cube.distance(&[0.0, 0.0], &[0.3, 0.4]).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        let torus = SpaceSpec::flat_torus(1).unwrap();
        let d = torus.distance(&[0.1], &[0.9]).unwrap();
        assert!((d - 0.2).abs() < 1e-15);
        assert!(matches!(
            cube.distance(&[0.0], &[0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        let cheb = cube.with_metric(Metric::Chebyshev).unwrap();
        assert_eq!(cheb.distance(&[0.0, 0.0], &[0.25, 0.5]).unwrap(), 0.5);
    }

    #[test]
    fn toml_round_trip_and_keys() {
        let g = SpaceSpec::sierpinski_gasket();
        let text = g.to_params().to_toml();
        assert!(text.contains("kind = \"ifs\""));
        assert!(text.contains("depth = 30"));
        assert!(text.contains("[ifs]"));
        assert!(text.contains("translations"));
        let back = make_space(&SpaceParams::from_toml(&text).unwrap()).unwrap();
        assert_eq!(back, g);

        let p = SpaceParams::from_toml("kind = \"cube\"\ndim = 3\nmetric = \"chebyshev\"\n").unwrap();
        let s = make_space(&p).unwrap();
        assert_eq!(s.ambient_dim(), 3);
        assert_eq!(s.diameter(), 1.0);
    }
}
