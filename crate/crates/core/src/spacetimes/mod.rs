//! Analytic model spacetimes.
//!
//! Chart conventions (units with `c = G = 1`):
//!
//! * `minkowski`, `cone`: coordinates `(x_1, …, x_n, t)` with the time
//!   coordinate last, metric `-dt² + Σ dx_i²`.
//! * `warped`: coordinates `(y_1, …, y_n, r)` for `-dr² + θ(r)² ĝ` with a flat
//!   fiber `ĝ` (or a circle when `n = 1`); `r` is the time function.
//! * `schwarzschild_interior`: the standard `(t, r, θ, φ)` with `0 < r < 2m`
//!   and `-∂_r` future directed.
//!
//! A [`SpacetimeDescriptor`] is the serialized form; [`Spacetime`] is the
//! validated, typed model every operation runs on.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub mod rays;
pub mod schwarzschild;
mod sets;
pub mod warped;

pub use sets::{AchronalSet, AchronalSetDescriptor, SetKind, SetShape};
pub use warped::{Fiber, WarpProfile, WarpedProduct};

/// Chart tag carried by every [`Event`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Minkowski,
    Cone,
    Warped,
    SchwarzschildInterior,
}

/// A point of a model spacetime in chart coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub chart: Chart,
    pub coords: Vec<f64>,
}

impl Event {
    pub fn new(chart: Chart, coords: Vec<f64>) -> Self {
        Self { chart, coords }
    }
}

/// Serialized description of a model spacetime.
///
/// Recognised `params`:
///
/// | kind | params |
/// |------|--------|
/// | `minkowski` | none |
/// | `cone` | `a` (region `‖x‖ ≤ a`, `t ≥ ‖x‖√(1+a²)/a`) or `aperture` (`t² ≥ aperture·‖x‖²`, `aperture > 1`) |
/// | `warped` | `profile` (0 constant `scale`, 1 linear `θ(r)=r`, 2 `θ = 𝔰_kappa(r)`), `scale`, `kappa`, `fiber_radius` (circle fiber, `dim = 2` only) |
/// | `schwarzschild_interior` | `m`, optional slab `a`, `b` |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeDescriptor {
    pub kind: Chart,
    pub dim: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl SpacetimeDescriptor {
    pub fn new(kind: Chart, dim: usize) -> Self {
        Self {
            kind,
            dim,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_owned(), value);
        self
    }

    pub fn build(&self) -> Result<Spacetime> {
        Spacetime::from_descriptor(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConeShape {
    /// `{‖x‖ ≤ a, t ≥ ‖x‖√(1+a²)/a}`.
    Truncated { a: f64 },
    /// `{t ≥ 0, t² ≥ aperture·‖x‖²}` with `aperture > 1`.
    Aperture { aperture: f64 },
}

impl ConeShape {
    /// Largest `‖x‖/t` of a point in the cone.
    pub fn max_speed(&self) -> f64 {
        match *self {
            ConeShape::Truncated { a } => a / (1.0 + a * a).sqrt(),
            ConeShape::Aperture { aperture } => 1.0 / aperture.sqrt(),
        }
    }

    /// Spatial radius cap, if any.
    pub fn radius_cap(&self) -> f64 {
        match *self {
            ConeShape::Truncated { a } => a,
            ConeShape::Aperture { .. } => f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    Minkowski,
    Cone(ConeShape),
    Warped(WarpedProduct),
    Schwarzschild { mass: f64 },
}

const MEMBERSHIP_TOL: f64 = 1e-12;

/// A validated model spacetime.
#[derive(Clone, Debug, PartialEq)]
pub struct Spacetime {
    descriptor: SpacetimeDescriptor,
    geometry: Geometry,
}

fn param(desc: &SpacetimeDescriptor, key: &str) -> Option<f64> {
    desc.params.get(key).copied()
}

impl Spacetime {
    pub fn from_descriptor(desc: &SpacetimeDescriptor) -> Result<Self> {
        if desc.dim < 2 {
            return Err(Error::invalid(format!("spacetime dimension must be >= 2, got {}", desc.dim)));
        }
        if let Some((k, v)) = desc.params.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("parameter {k} = {v} is not finite")));
        }
        let geometry = match desc.kind {
            Chart::Minkowski => Geometry::Minkowski,
            Chart::Cone => {
                let shape = match (param(desc, "a"), param(desc, "aperture")) {
                    (Some(a), None) if a > 0.0 => ConeShape::Truncated { a },
                    (None, Some(ap)) if ap > 1.0 => ConeShape::Aperture { aperture: ap },
                    _ => {
                        return Err(Error::invalid(
                            "cone needs exactly one of a > 0 or aperture > 1",
                        ))
                    }
                };
                Geometry::Cone(shape)
            }
            Chart::Warped => Geometry::Warped(WarpedProduct::from_params(desc.dim, &desc.params)?),
            Chart::SchwarzschildInterior => {
                if desc.dim != 4 {
                    return Err(Error::invalid("schwarzschild_interior has dimension 4"));
                }
                let mass = param(desc, "m").unwrap_or(1.0);
                if !(mass > 0.0) {
                    return Err(Error::invalid(format!("mass must be positive, got {mass}")));
                }
                if let (Some(a), Some(b)) = (param(desc, "a"), param(desc, "b")) {
                    if b < a {
                        return Err(Error::invalid(format!("slab [{a}, {b}] is reversed")));
                    }
                }
                Geometry::Schwarzschild { mass }
            }
        };
        Ok(Self {
            descriptor: desc.clone(),
            geometry,
        })
    }

    pub fn minkowski(dim: usize) -> Result<Self> {
        SpacetimeDescriptor::new(Chart::Minkowski, dim).build()
    }

    /// The truncated cone `{‖x‖ ≤ a, t ≥ ‖x‖√(1+a²)/a}`.
    pub fn truncated_cone(dim: usize, a: f64) -> Result<Self> {
        SpacetimeDescriptor::new(Chart::Cone, dim).with("a", a).build()
    }

    /// The conical region `{t ≥ 0, t² ≥ aperture·‖x‖²}`.
    pub fn aperture_cone(dim: usize, aperture: f64) -> Result<Self> {
        SpacetimeDescriptor::new(Chart::Cone, dim)
            .with("aperture", aperture)
            .build()
    }

    pub fn schwarzschild(mass: f64) -> Result<Self> {
        SpacetimeDescriptor::new(Chart::SchwarzschildInterior, 4)
            .with("m", mass)
            .build()
    }

    pub fn descriptor(&self) -> &SpacetimeDescriptor {
        &self.descriptor
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn chart(&self) -> Chart {
        self.descriptor.kind
    }

    pub fn dim(&self) -> usize {
        self.descriptor.dim
    }

    /// Index of the time-function coordinate (`t`, or `r` for the curved charts).
    pub fn time_index(&self) -> usize {
        match self.geometry {
            Geometry::Schwarzschild { .. } => 1,
            _ => self.dim() - 1,
        }
    }

    /// Coordinate indices other than [`time_index`](Self::time_index).
    pub fn spatial_indices(&self) -> Vec<usize> {
        let ti = self.time_index();
        (0..self.dim()).filter(|&i| i != ti).collect()
    }

    pub fn mass(&self) -> Option<f64> {
        match self.geometry {
            Geometry::Schwarzschild { mass } => Some(mass),
            _ => None,
        }
    }

    /// Builds and validates an event of this spacetime.
    pub fn event(&self, coords: Vec<f64>) -> Result<Event> {
        let e = Event::new(self.chart(), coords);
        self.check_event(&e)?;
        Ok(e)
    }

    pub fn check_event(&self, e: &Event) -> Result<()> {
        if e.chart != self.chart() {
            return Err(Error::invalid(format!(
                "event chart {:?} does not match spacetime chart {:?}",
                e.chart,
                self.chart()
            )));
        }
        if e.coords.len() != self.dim() {
            return Err(Error::invalid(format!(
                "event has {} coordinates, spacetime has dimension {}",
                e.coords.len(),
                self.dim()
            )));
        }
        if e.coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("event coordinates must be finite"));
        }
        if !self.in_chart(&e.coords) {
            return Err(Error::invalid(format!(
                "event {:?} lies outside the {:?} chart domain",
                e.coords,
                self.chart()
            )));
        }
        Ok(())
    }

    /// Whether raw coordinates lie in the chart domain.
    pub fn in_chart(&self, c: &[f64]) -> bool {
        match &self.geometry {
            Geometry::Minkowski => true,
            Geometry::Cone(shape) => {
                let t = c[c.len() - 1];
                let rho = spatial_norm(c);
                match *shape {
                    ConeShape::Truncated { a } => {
                        rho <= a * (1.0 + MEMBERSHIP_TOL)
                            && t >= rho * (1.0 + a * a).sqrt() / a - MEMBERSHIP_TOL
                    }
                    ConeShape::Aperture { aperture } => {
                        t >= -MEMBERSHIP_TOL && t * t * (1.0 + MEMBERSHIP_TOL) >= aperture * rho * rho
                    }
                }
            }
            Geometry::Warped(w) => w.profile.in_domain(c[c.len() - 1]),
            Geometry::Schwarzschild { mass } => c[1] > 0.0 && c[1] < 2.0 * mass,
        }
    }

    pub fn contains(&self, e: &Event) -> bool {
        self.check_event(e).is_ok()
    }

    /// A time function: strictly increasing along future causal curves.
    pub fn time_function(&self, e: &Event) -> f64 {
        match self.geometry {
            Geometry::Schwarzschild { .. } => -e.coords[1],
            _ => e.coords[self.dim() - 1],
        }
    }

    /// Time separation `τ(x, y)`; zero unless `x ≤ y`.
    pub fn tau(&self, x: &Event, y: &Event) -> Result<f64> {
        self.check_event(x)?;
        self.check_event(y)?;
        self.tau_unchecked(&x.coords, &y.coords)
    }

    pub(crate) fn tau_unchecked(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match &self.geometry {
            Geometry::Minkowski | Geometry::Cone(_) => Ok(minkowski_tau(x, y)),
            Geometry::Warped(w) => {
                let (r0, r1) = (x[x.len() - 1], y[y.len() - 1]);
                let d = w.fiber_distance(x, y);
                w.maximize_tau(r0, r1, d)
            }
            Geometry::Schwarzschild { mass } => {
                if !same_schwarzschild_direction(x, y) {
                    return Err(Error::Unsupported(
                        "Schwarzschild interior time separation is only available between events \
                         sharing (t, θ, φ)"
                            .into(),
                    ));
                }
                if y[1] >= x[1] {
                    return Ok(0.0);
                }
                Ok(schwarzschild::tau_to_singularity(*mass, x[1])?
                    - schwarzschild::tau_to_singularity(*mass, y[1])?)
            }
        }
    }

    /// Causal relation `x ≤ y`.
    pub fn causal(&self, x: &Event, y: &Event) -> Result<bool> {
        self.check_event(x)?;
        self.check_event(y)?;
        self.causal_unchecked(&x.coords, &y.coords)
    }

    pub(crate) fn causal_unchecked(&self, x: &[f64], y: &[f64]) -> Result<bool> {
        if x == y {
            return Ok(true);
        }
        match &self.geometry {
            Geometry::Minkowski | Geometry::Cone(_) => {
                let dt = y[y.len() - 1] - x[x.len() - 1];
                Ok(dt > 0.0 && dt * dt >= spatial_dist2(x, y))
            }
            Geometry::Warped(w) => {
                let (r0, r1) = (x[x.len() - 1], y[y.len() - 1]);
                if r1 <= r0 {
                    return Ok(false);
                }
                Ok(w.fiber_distance(x, y) <= w.profile.null_reach(r0, r1))
            }
            Geometry::Schwarzschild { .. } => {
                if !same_schwarzschild_direction(x, y) {
                    return Err(Error::Unsupported(
                        "Schwarzschild interior causality is only available between events \
                         sharing (t, θ, φ)"
                            .into(),
                    ));
                }
                Ok(y[1] < x[1])
            }
        }
    }

    /// The `t`-intermediate point of the maximizing geodesic from `x` to `y`.
    pub fn geodesic_point(&self, x: &Event, y: &Event, t: f64) -> Result<Event> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain("t", t, "[0, 1]"));
        }
        if self.tau(x, y)? <= 0.0 {
            return Err(Error::NotChronological);
        }
        let coords = match &self.geometry {
            Geometry::Minkowski | Geometry::Cone(_) => lerp(&x.coords, &y.coords, t),
            Geometry::Warped(w) => w.geodesic_point(&x.coords, &y.coords, t)?,
            Geometry::Schwarzschild { mass } => {
                let m = *mass;
                let tx = schwarzschild::tau_to_singularity(m, x.coords[1])?;
                let ty = schwarzschild::tau_to_singularity(m, y.coords[1])?;
                let r = schwarzschild::radius_at_tau(m, tx - t * (tx - ty))?;
                let mut c = x.coords.clone();
                c[1] = r;
                c
            }
        };
        Ok(Event::new(self.chart(), coords))
    }

    /// Density of the volume measure with respect to chart Lebesgue measure.
    pub fn volume_density(&self, e: &Event) -> f64 {
        self.density_at(&e.coords)
    }

    pub(crate) fn density_at(&self, c: &[f64]) -> f64 {
        match &self.geometry {
            Geometry::Minkowski | Geometry::Cone(_) => 1.0,
            Geometry::Warped(w) => w.volume_density(c[c.len() - 1]),
            Geometry::Schwarzschild { .. } => c[1] * c[1] * c[2].sin().abs(),
        }
    }

    /// An upper bound of [`volume_density`](Self::volume_density) over a coordinate box.
    pub fn density_bound(&self, bounds: &[(f64, f64)]) -> f64 {
        match &self.geometry {
            Geometry::Minkowski | Geometry::Cone(_) => 1.0,
            Geometry::Warped(w) => {
                let (lo, hi) = bounds[bounds.len() - 1];
                w.density_bound(lo, hi)
            }
            Geometry::Schwarzschild { mass } => {
                let r = bounds[1].1.min(2.0 * mass).max(bounds[1].0.abs());
                r * r
            }
        }
    }
}

impl TryFrom<&SpacetimeDescriptor> for Spacetime {
    type Error = Error;

    fn try_from(d: &SpacetimeDescriptor) -> Result<Self> {
        Spacetime::from_descriptor(d)
    }
}

pub(crate) fn spatial_norm(c: &[f64]) -> f64 {
    c[..c.len() - 1].iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn spatial_dist2(x: &[f64], y: &[f64]) -> f64 {
    x[..x.len() - 1]
        .iter()
        .zip(&y[..y.len() - 1])
        .map(|(a, b)| (b - a) * (b - a))
        .sum()
}

/// Minkowski time separation with the time coordinate last.
pub(crate) fn minkowski_tau(x: &[f64], y: &[f64]) -> f64 {
    let dt = y[y.len() - 1] - x[x.len() - 1];
    if dt <= 0.0 {
        return 0.0;
    }
    let q = dt * dt - spatial_dist2(x, y);
    if q > 0.0 {
        q.sqrt()
    } else {
        0.0
    }
}

pub(crate) fn lerp(x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + t * (b - a)).collect()
}

fn same_schwarzschild_direction(x: &[f64], y: &[f64]) -> bool {
    const TOL: f64 = 1e-12;
    (x[0] - y[0]).abs() <= TOL && (x[2] - y[2]).abs() <= TOL && (x[3] - y[3]).abs() <= TOL
}
