use serde::{Deserialize, Serialize};

use crate::sampler::CausalSample;
use crate::transport::{solve_lp_optimal, DiscreteMeasure, TransportPlan, MARGINAL_TOL};
use crate::{Error, Result};

/// A discrete transport ray: a connected component of the support graph of
/// the optimal plan, with its members ordered by the time function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroMeanRay {
    pub members: Vec<usize>,
    /// `Σ w_i |f_i|` over the members.
    pub mass: f64,
    /// `Σ w_i f_i` over the members.
    pub balance: f64,
    pub tolerance: f64,
    pub balanced: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroMeanReport {
    pub rays: Vec<ZeroMeanRay>,
    pub plan: TransportPlan,
    /// Total mass of the positive part before normalization.
    pub scale: f64,
    pub all_balanced: bool,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Splits a zero-mean function `f` on the sample into rays on which it
/// integrates to zero, using an `ℓ₁`-optimal plan from `f⁺` to `f⁻`.
pub fn localize_zero_mean(sample: &CausalSample, f: &[f64]) -> Result<ZeroMeanReport> {
    if f.len() != sample.len() {
        return Err(Error::invalid(format!(
            "f has {} values for {} events",
            f.len(),
            sample.len()
        )));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("f must be finite"));
    }
    let signed: Vec<f64> = f.iter().zip(&sample.weights).map(|(v, w)| v * w).collect();
    let total_abs: f64 = signed.iter().map(|v| v.abs()).sum();
    let total: f64 = signed.iter().sum();
    if total_abs == 0.0 {
        return Err(Error::invalid("f vanishes identically"));
    }
    if total.abs() > MARGINAL_TOL * total_abs {
        return Err(Error::invalid(format!("f does not have zero mean: Σ w f = {total}")));
    }
    let (plus, minus): (Vec<usize>, Vec<usize>) = {
        let plus = (0..f.len()).filter(|&i| signed[i] > 0.0).collect();
        let minus = (0..f.len()).filter(|&i| signed[i] < 0.0).collect();
        (plus, minus)
    };
    let scale: f64 = plus.iter().map(|&i| signed[i]).sum();
    let pw: Vec<f64> = plus.iter().map(|&i| signed[i]).collect();
    let mw: Vec<f64> = minus.iter().map(|&i| -signed[i]).collect();
    let mu = DiscreteMeasure::normalized(plus, &pw)?;
    let nu = DiscreteMeasure::normalized(minus, &mw)?;
    let plan = solve_lp_optimal(sample, &mu, &nu, 1.0)?;
    if !plan.feasible || !plan.timelike {
        return Err(Error::Infeasible(
            "the positive and negative parts of f admit no timelike coupling".into(),
        ));
    }

    let mut parent: Vec<usize> = (0..f.len()).collect();
    for e in &plan.entries {
        let (a, b) = (find(&mut parent, e.i), find(&mut parent, e.j));
        parent[a.max(b)] = a.min(b);
    }
    let st = sample.spacetime();
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in (0..f.len()).filter(|&i| signed[i] != 0.0) {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let rays: Vec<ZeroMeanRay> = groups
        .into_values()
        .map(|mut members| {
            members.sort_by(|&a, &b| {
                st.time_function(&sample.events[a])
                    .total_cmp(&st.time_function(&sample.events[b]))
                    .then(a.cmp(&b))
            });
            let mass: f64 = members.iter().map(|&i| signed[i].abs()).sum();
            let balance: f64 = members.iter().map(|&i| signed[i]).sum();
            let tolerance = MARGINAL_TOL * mass;
            ZeroMeanRay {
                members,
                mass,
                balance,
                tolerance,
                balanced: balance.abs() <= tolerance,
            }
        })
        .collect();
    let all_balanced = rays.iter().all(|r| r.balanced);
    Ok(ZeroMeanReport {
        rays,
        plan,
        scale,
        all_balanced,
    })
}
