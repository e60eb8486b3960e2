//! Closed-form ray families of `τ_V` for the analytic achronal sets.
//!
//! A ray is addressed by a label `α` and parametrized by the signed value
//! `s = τ_V` along it, so `τ_V(X_α(s)) = s`.

use super::{schwarzschild, Geometry, SetShape, Spacetime};
use crate::spacetimes::AchronalSet;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum RayFamily {
    /// Timelike lines through `center` in a flat chart. The label is the
    /// spatial part of the future unit direction; `s = τ(center, x) − offset`
    /// on the future side (`offset` is the hyperboloid radius, 0 for a point)
    /// and `s = −τ(x, center)` on the past side of a point.
    Radial { center: Vec<f64>, offset: f64 },
    /// Lines of constant spatial (fiber) coordinates orthogonal to a slice of
    /// the time coordinate; `s = time − value`.
    Vertical { value: f64 },
    /// Radial lines `r ↦ (t, r, θ, φ)` of the Schwarzschild interior. The
    /// label is `(t, θ, φ)` and `s = base − τ_Σ(r)`, with `base = τ_Σ(r0)`
    /// for a slice `r = r0` and `0` for the singular set.
    Infall { mass: f64, base: f64 },
}

impl RayFamily {
    pub fn for_set(st: &Spacetime, v: &AchronalSet) -> Result<Self> {
        match (&v.shape, st.geometry()) {
            (SetShape::Point(c), Geometry::Minkowski | Geometry::Cone(_)) => Ok(RayFamily::Radial {
                center: c.clone(),
                offset: 0.0,
            }),
            (SetShape::Hyperboloid { center, radius }, _) => Ok(RayFamily::Radial {
                center: center.clone(),
                offset: *radius,
            }),
            (SetShape::Slice(r0), Geometry::Schwarzschild { mass }) => Ok(RayFamily::Infall {
                mass: *mass,
                base: schwarzschild::tau_to_singularity(*mass, *r0)?,
            }),
            (SetShape::Singular, Geometry::Schwarzschild { mass }) => Ok(RayFamily::Infall {
                mass: *mass,
                base: 0.0,
            }),
            (SetShape::Slice(v), Geometry::Minkowski | Geometry::Cone(_) | Geometry::Warped(_)) => {
                Ok(RayFamily::Vertical { value: *v })
            }
            (shape, _) => Err(Error::Unsupported(format!(
                "no closed-form rays for {shape:?} in the {:?} chart",
                st.chart()
            ))),
        }
    }

    /// Number of label coordinates.
    pub fn label_dim(&self, st: &Spacetime) -> usize {
        match self {
            RayFamily::Infall { .. } => 3,
            _ => st.dim() - 1,
        }
    }

    /// Ray label and `τ_V` of a chart point, or `None` when the point lies on
    /// no ray (outside `I^±(V)` or on the ray endpoints).
    pub fn foot(&self, x: &[f64]) -> Option<(Vec<f64>, f64)> {
        match self {
            RayFamily::Radial { center, offset } => {
                let n = x.len() - 1;
                let fut = super::minkowski_tau(center, x);
                let (tau, sign) = if fut > 0.0 {
                    (fut, 1.0)
                } else if *offset == 0.0 {
                    (super::minkowski_tau(x, center), -1.0)
                } else {
                    return None;
                };
                if tau <= 0.0 {
                    return None;
                }
                let label = (0..n).map(|i| sign * (x[i] - center[i]) / tau).collect();
                Some((label, sign * tau - offset))
            }
            RayFamily::Vertical { value } => {
                let n = x.len() - 1;
                let s = x[n] - value;
                if s == 0.0 {
                    return None;
                }
                Some((x[..n].to_vec(), s))
            }
            RayFamily::Infall { mass, base } => {
                let tau = schwarzschild::tau_to_singularity(*mass, x[1]).ok()?;
                let s = base - tau;
                if s == 0.0 {
                    return None;
                }
                Some((vec![x[0], x[2], x[3]], s))
            }
        }
    }

    /// The chart point `X_α(s)`, or `None` when `s` is off the ray.
    pub fn point(&self, label: &[f64], s: f64) -> Option<Vec<f64>> {
        match self {
            RayFamily::Radial { center, offset } => {
                let g = (1.0 + label.iter().map(|w| w * w).sum::<f64>()).sqrt();
                let len = s + offset;
                if *offset > 0.0 && len <= 0.0 {
                    return None;
                }
                let mut p: Vec<f64> = label.iter().zip(center).map(|(w, c)| c + len * w).collect();
                p.push(center[label.len()] + len * g);
                Some(p)
            }
            RayFamily::Vertical { value } => {
                let mut p = label.to_vec();
                p.push(value + s);
                Some(p)
            }
            RayFamily::Infall { mass, base } => {
                let tau = base - s;
                if !(tau > 0.0 && tau < std::f64::consts::PI * mass) {
                    return None;
                }
                let r = schwarzschild::radius_at_tau(*mass, tau).ok()?;
                Some(vec![label[0], r, label[1], label[2]])
            }
        }
    }

    /// Largest `s` with `X_α(s)` still inside the chart; rays leave a
    /// truncated cone through its spatial cap.
    pub fn chart_exit(&self, st: &Spacetime, label: &[f64]) -> f64 {
        match (self, st.geometry()) {
            (RayFamily::Radial { center, offset }, Geometry::Cone(shape)) => {
                let w = label.iter().map(|v| v * v).sum::<f64>().sqrt();
                let c = super::spatial_norm(center);
                if w == 0.0 {
                    f64::INFINITY
                } else {
                    (shape.radius_cap() - c) / w - offset
                }
            }
            _ => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetimes::AchronalSetDescriptor;
    use approx::assert_abs_diff_eq;

    #[test]
    fn radial_rays_are_isometric() {
        let st = Spacetime::minkowski(3).unwrap();
        let v = AchronalSetDescriptor::point(&[0.1, 0.0, 0.2]).build(&st).unwrap();
        let fam = RayFamily::for_set(&st, &v).unwrap();
        for c in [[0.3, 0.4, 2.0], [-0.2, 0.1, 0.8], [0.0, 0.5, -1.0]] {
            let (label, s) = fam.foot(&c).unwrap();
            assert_abs_diff_eq!(v.tau_signed_coords(&st, &c).unwrap(), s, epsilon = 1e-12);
            let p = fam.point(&label, s).unwrap();
            for (a, b) in p.iter().zip(&c) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
            // points further along the ray keep τ_V = s
            let q = fam.point(&label, s + 0.3).unwrap();
            assert_abs_diff_eq!(v.tau_signed_coords(&st, &q).unwrap(), s + 0.3, epsilon = 1e-12);
        }
        assert!(fam.foot(&[2.0, 0.0, 0.0]).is_none());
    }

    #[test]
    fn infall_rays_in_schwarzschild() {
        let st = Spacetime::schwarzschild(1.0).unwrap();
        let v = AchronalSetDescriptor::slice(1.8).build(&st).unwrap();
        let fam = RayFamily::for_set(&st, &v).unwrap();
        let x = [0.3, 0.9, 1.2, 2.0];
        let (label, s) = fam.foot(&x).unwrap();
        assert!(s > 0.0);
        assert_abs_diff_eq!(v.tau_signed_coords(&st, &x).unwrap(), s, epsilon = 1e-12);
        let p = fam.point(&label, s).unwrap();
        assert_abs_diff_eq!(p[1], 0.9, epsilon = 1e-12);
        let sing = AchronalSetDescriptor::singular().build(&st).unwrap();
        let fam = RayFamily::for_set(&st, &sing).unwrap();
        let (_, s) = fam.foot(&x).unwrap();
        assert!(s < 0.0);
    }

    #[test]
    fn truncated_cone_exit() {
        let st = Spacetime::truncated_cone(2, 1.0).unwrap();
        let v = AchronalSetDescriptor::point(&[0.0, 0.0]).build(&st).unwrap();
        let fam = RayFamily::for_set(&st, &v).unwrap();
        let label = [1.0];
        let exit = fam.chart_exit(&st, &label);
        let p = fam.point(&label, exit).unwrap();
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-14);
        assert!(st.in_chart(&p));
    }
}
