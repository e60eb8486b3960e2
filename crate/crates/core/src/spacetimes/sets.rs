use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::{schwarzschild, Geometry, Spacetime};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Point,
    TauLevel,
    CoordinateSlice,
    Hyperboloid,
    SingularSet,
}

/// Serialized description of an achronal set.
///
/// | kind | params |
/// |------|--------|
/// | `point` | `c0 … c{dim-1}` |
/// | `coordinate_slice` | `value`: the level of the time coordinate (`t`, or `r` in warped and Schwarzschild charts) |
/// | `hyperboloid` | `c0 …` center, `radius` (the set `τ(center, ·) = radius`) |
/// | `tau_level` | `level > 0` together with a `base` descriptor: `{τ_base = level}` |
/// | `singular_set` | none (Schwarzschild `r = 0`) |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AchronalSetDescriptor {
    pub kind: SetKind,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<AchronalSetDescriptor>>,
}

impl AchronalSetDescriptor {
    pub fn new(kind: SetKind) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
            base: None,
        }
    }

    pub fn point(coords: &[f64]) -> Self {
        let mut d = Self::new(SetKind::Point);
        for (i, c) in coords.iter().enumerate() {
            d.params.insert(format!("c{i}"), *c);
        }
        d
    }

    pub fn slice(value: f64) -> Self {
        Self::new(SetKind::CoordinateSlice).with("value", value)
    }

    pub fn hyperboloid(center: &[f64], radius: f64) -> Self {
        let mut d = Self::point(center).with("radius", radius);
        d.kind = SetKind::Hyperboloid;
        d
    }

    pub fn singular() -> Self {
        Self::new(SetKind::SingularSet)
    }

    pub fn level(base: AchronalSetDescriptor, level: f64) -> Self {
        let mut d = Self::new(SetKind::TauLevel).with("level", level);
        d.base = Some(Box::new(base));
        d
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_owned(), value);
        self
    }

    /// Resolves the descriptor against `st` and checks achronality.
    pub fn build(&self, st: &Spacetime) -> Result<AchronalSet> {
        AchronalSet::new(st, self)
    }
}

/// The concrete shape of a resolved achronal set.
#[derive(Clone, Debug, PartialEq)]
pub enum SetShape {
    Point(Vec<f64>),
    /// Level set of the time coordinate (`t` or `r`).
    Slice(f64),
    Hyperboloid { center: Vec<f64>, radius: f64 },
    Singular,
}

/// A validated achronal set of a particular spacetime.
#[derive(Clone, Debug, PartialEq)]
pub struct AchronalSet {
    pub shape: SetShape,
    /// `Some((V, t))` when the set was described as the level set `V_t`.
    pub level_of: Option<(SetShape, f64)>,
}

fn center(st: &Spacetime, d: &AchronalSetDescriptor) -> Result<Vec<f64>> {
    (0..st.dim())
        .map(|i| {
            d.params
                .get(&format!("c{i}"))
                .copied()
                .ok_or_else(|| Error::invalid(format!("{:?} descriptor is missing c{i}", d.kind)))
        })
        .collect()
}

fn req(d: &AchronalSetDescriptor, key: &str) -> Result<f64> {
    let v = d
        .params
        .get(key)
        .copied()
        .ok_or_else(|| Error::invalid(format!("{:?} descriptor is missing {key}", d.kind)))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{key} = {v} is not finite")))
    }
}

const ACHRONALITY_PAIRS: usize = 1000;

impl AchronalSet {
    pub fn new(st: &Spacetime, d: &AchronalSetDescriptor) -> Result<Self> {
        let set = Self::resolve(st, d)?;
        set.check_supported(st)?;
        set.check_achronal(st)?;
        Ok(set)
    }

    fn resolve(st: &Spacetime, d: &AchronalSetDescriptor) -> Result<Self> {
        let shape = match d.kind {
            SetKind::Point => {
                let c = center(st, d)?;
                st.check_event(&super::Event::new(st.chart(), c.clone()))?;
                SetShape::Point(c)
            }
            SetKind::CoordinateSlice => SetShape::Slice(req(d, "value")?),
            SetKind::Hyperboloid => {
                let radius = req(d, "radius")?;
                if !(radius > 0.0) {
                    return Err(Error::invalid(format!("hyperboloid radius must be positive, got {radius}")));
                }
                SetShape::Hyperboloid {
                    center: center(st, d)?,
                    radius,
                }
            }
            SetKind::SingularSet => SetShape::Singular,
            SetKind::TauLevel => {
                let level = req(d, "level")?;
                if !(level > 0.0) {
                    return Err(Error::invalid(format!("tau level must be positive, got {level}")));
                }
                let base = d
                    .base
                    .as_ref()
                    .ok_or_else(|| Error::invalid("tau_level descriptor needs a base set"))?;
                let base = Self::resolve(st, base)?.shape;
                let shape = level_set(st, &base, level)?;
                return Ok(Self {
                    shape,
                    level_of: Some((base, level)),
                });
            }
        };
        Ok(Self { shape, level_of: None })
    }

    fn check_supported(&self, st: &Spacetime) -> Result<()> {
        let ok = match (&self.shape, st.geometry()) {
            (SetShape::Singular, Geometry::Schwarzschild { .. }) => true,
            (SetShape::Singular, _) => false,
            (SetShape::Slice(_), _) => true,
            (SetShape::Point(_), Geometry::Schwarzschild { .. }) => false,
            (SetShape::Point(_), _) => true,
            (SetShape::Hyperboloid { .. }, Geometry::Minkowski | Geometry::Cone(_)) => true,
            (SetShape::Hyperboloid { .. }, _) => false,
        };
        if !ok {
            return Err(Error::Unsupported(format!(
                "achronal set {:?} has no time separation formula in the {:?} chart",
                self.shape,
                st.chart()
            )));
        }
        if let (SetShape::Slice(v), Geometry::Schwarzschild { mass }) = (&self.shape, st.geometry()) {
            if !(*v > 0.0 && *v < 2.0 * mass) {
                return Err(Error::domain("slice r", *v, format!("(0, {})", 2.0 * mass)));
            }
        }
        Ok(())
    }

    /// Sampled chronology test: no two sampled points of the set may be
    /// chronologically related. Level sets of the time coordinate pass
    /// without sampling.
    fn check_achronal(&self, st: &Spacetime) -> Result<()> {
        let SetShape::Hyperboloid { center, radius } = &self.shape else {
            return Ok(());
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0x5e7);
        let n = st.dim() - 1;
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let g = (1.0 + w.iter().map(|v| v * v).sum::<f64>()).sqrt();
            let mut p: Vec<f64> = w.iter().zip(center).map(|(wi, ci)| ci + radius * wi).collect();
            p.push(center[n] + radius * g);
            p
        };
        for _ in 0..ACHRONALITY_PAIRS {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            if super::minkowski_tau(&x, &y) > 1e-9 * radius {
                return Err(Error::Hypothesis(format!(
                    "hyperboloid points {x:?} and {y:?} are chronologically related"
                )));
            }
        }
        Ok(())
    }

    /// Signed time separation `τ_V(x)`: positive in `I⁺(V)`, negative in `I⁻(V)`.
    pub fn tau_signed(&self, st: &Spacetime, x: &super::Event) -> Result<f64> {
        st.check_event(x)?;
        self.tau_signed_coords(st, &x.coords)
    }

    pub(crate) fn tau_signed_coords(&self, st: &Spacetime, x: &[f64]) -> Result<f64> {
        match (&self.shape, st.geometry()) {
            (SetShape::Point(p), Geometry::Minkowski | Geometry::Cone(_)) => {
                let f = super::minkowski_tau(p, x);
                if f > 0.0 {
                    Ok(f)
                } else {
                    Ok(-super::minkowski_tau(x, p))
                }
            }
            (SetShape::Point(p), Geometry::Warped(_)) => {
                let f = st.tau_unchecked(p, x)?;
                if f > 0.0 {
                    Ok(f)
                } else {
                    Ok(-st.tau_unchecked(x, p)?)
                }
            }
            (SetShape::Slice(v), Geometry::Schwarzschild { mass }) => {
                Ok(schwarzschild::tau_to_singularity(*mass, *v)? - schwarzschild::tau_to_singularity(*mass, x[1])?)
            }
            (SetShape::Slice(v), _) => Ok(x[x.len() - 1] - v),
            (SetShape::Hyperboloid { center, radius }, _) => {
                let f = super::minkowski_tau(center, x);
                if f > 0.0 {
                    Ok(f - radius)
                } else {
                    Ok(f64::NEG_INFINITY)
                }
            }
            (SetShape::Singular, Geometry::Schwarzschild { mass }) => {
                Ok(-schwarzschild::tau_to_singularity(*mass, x[1])?)
            }
            _ => Err(Error::Unsupported(format!("τ_V for {:?}", self.shape))),
        }
    }
}

/// `{τ_base = level}` for the supported base shapes.
fn level_set(st: &Spacetime, base: &SetShape, level: f64) -> Result<SetShape> {
    Ok(match (base, st.geometry()) {
        (SetShape::Point(c), Geometry::Minkowski | Geometry::Cone(_)) => SetShape::Hyperboloid {
            center: c.clone(),
            radius: level,
        },
        (SetShape::Hyperboloid { center, radius }, _) => SetShape::Hyperboloid {
            center: center.clone(),
            radius: radius + level,
        },
        (SetShape::Slice(v), Geometry::Schwarzschild { mass }) => {
            let base_tau = schwarzschild::tau_to_singularity(*mass, *v)?;
            if level >= base_tau {
                return Err(Error::domain("level", level, format!("(0, {base_tau})")));
            }
            SetShape::Slice(schwarzschild::radius_at_tau(*mass, base_tau - level)?)
        }
        (SetShape::Slice(v), _) => SetShape::Slice(v + level),
        (SetShape::Singular, Geometry::Schwarzschild { .. }) => {
            return Err(Error::Unsupported(
                "the singular set has no future; use a coordinate_slice in r instead".into(),
            ))
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "level sets of {base:?} in the {:?} chart",
                st.chart()
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetimes::{Chart, SpacetimeDescriptor};
    use approx::assert_abs_diff_eq;

    #[test]
    fn point_signed_separation() {
        let st = Spacetime::minkowski(2).unwrap();
        let v = AchronalSetDescriptor::point(&[0.0, 0.0]).build(&st).unwrap();
        let x = st.event(vec![0.3, 1.0]).unwrap();
        assert_abs_diff_eq!(v.tau_signed(&st, &x).unwrap(), 0.91f64.sqrt(), epsilon = 1e-15);
        assert_eq!(v.tau_signed(&st, &st.event(vec![2.0, 1.0]).unwrap()).unwrap(), 0.0);
        assert_abs_diff_eq!(
            v.tau_signed(&st, &st.event(vec![0.0, -2.0]).unwrap()).unwrap(),
            -2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn singular_set_in_schwarzschild() {
        let st = Spacetime::schwarzschild(1.0).unwrap();
        let v = AchronalSetDescriptor::singular().build(&st).unwrap();
        let x = st.event(vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(
            v.tau_signed(&st, &x).unwrap(),
            -(std::f64::consts::FRAC_PI_2 - 1.0),
            epsilon = 1e-15
        );
        let st2 = Spacetime::minkowski(2).unwrap();
        assert!(AchronalSetDescriptor::singular().build(&st2).is_err());
    }

    #[test]
    fn level_sets_shift_by_the_level() {
        let st = Spacetime::minkowski(3).unwrap();
        let base = AchronalSetDescriptor::point(&[0.0, 0.0, 0.0]);
        let v = base.build(&st).unwrap();
        let vt = AchronalSetDescriptor::level(base, 0.7).build(&st).unwrap();
        assert!(matches!(vt.shape, SetShape::Hyperboloid { radius, .. } if radius == 0.7));
        for c in [[0.1, 0.2, 1.5], [0.5, -0.3, 2.0], [0.0, 0.0, 0.9]] {
            let w = st.event(c.to_vec()).unwrap();
            let a = vt.tau_signed(&st, &w).unwrap();
            let b = v.tau_signed(&st, &w).unwrap() - 0.7;
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }

        let s = Spacetime::schwarzschild(1.0).unwrap();
        let slice = AchronalSetDescriptor::slice(1.5);
        let v = slice.build(&s).unwrap();
        let vt = AchronalSetDescriptor::level(slice, 0.3).build(&s).unwrap();
        let w = s.event(vec![0.0, 0.4, 1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(
            vt.tau_signed(&s, &w).unwrap(),
            v.tau_signed(&s, &w).unwrap() - 0.3,
            epsilon = 1e-9
        );
    }

    #[test]
    fn warped_point_uses_the_maximization() {
        let st = SpacetimeDescriptor::new(Chart::Warped, 2)
            .with("profile", 0.0)
            .build()
            .unwrap();
        let v = AchronalSetDescriptor::point(&[0.0, 1.0]).build(&st).unwrap();
        let x = st.event(vec![0.6, 2.0]).unwrap();
        assert_abs_diff_eq!(v.tau_signed(&st, &x).unwrap(), 0.8, epsilon = 1e-7);
        let x = st.event(vec![0.6, 0.0]).unwrap();
        assert_abs_diff_eq!(v.tau_signed(&st, &x).unwrap(), -0.8, epsilon = 1e-7);
    }

    #[test]
    fn descriptor_json_shape() {
        let d = AchronalSetDescriptor::level(AchronalSetDescriptor::point(&[0.0, 0.0]), 1.0);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"tau_level","params":{"level":1.0},"base":{"kind":"point","params":{"c0":0.0,"c1":0.0}}}"#
        );
        let back: AchronalSetDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn missing_params_are_reported() {
        let st = Spacetime::minkowski(2).unwrap();
        assert!(AchronalSetDescriptor::new(SetKind::CoordinateSlice).build(&st).is_err());
        assert!(AchronalSetDescriptor::new(SetKind::TauLevel).with("level", 1.0).build(&st).is_err());
        assert!(AchronalSetDescriptor::hyperboloid(&[0.0, 0.0], -1.0).build(&st).is_err());
    }
}
