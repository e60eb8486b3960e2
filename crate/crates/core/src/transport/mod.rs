//! Discrete `ℓ_p` optimal transport between measures on a causal sample.
//!
//! The cost of moving mass from `x` to `y` is `τ(x, y)^p` when `x ≤ y` and
//! `−∞` otherwise. Non-causal pairs are left out of the flow network
//! altogether, so `−∞` never appears as a number inside the solver.

use serde::{Deserialize, Serialize};

use crate::sampler::CausalSample;
use crate::spacetimes::{Event, SpacetimeDescriptor};
use crate::{Error, Result};

mod flow;
mod monotone;

pub use monotone::{check_cyclical_monotonicity, MonotonicityAudit};

/// Default exponent of the `ℓ_p` problem.
pub const DEFAULT_P: f64 = 0.5;
/// Marginal tolerance of plans.
pub const MARGINAL_TOL: f64 = 1e-12;
const BRUTE_FORCE_CAP: usize = 8;

/// Probability measure on events of a [`CausalSample`], by index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub support: Vec<usize>,
    pub masses: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(support: Vec<usize>, masses: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != masses.len() {
            return Err(Error::invalid("measure needs matching, non-empty support and masses"));
        }
        if masses.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
            return Err(Error::invalid("measure masses must be positive"));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MARGINAL_TOL {
            return Err(Error::invalid(format!("measure masses sum to {total}, not 1")));
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("measure support indices must be distinct"));
        }
        Ok(Self { support, masses })
    }

    pub fn uniform(support: Vec<usize>) -> Result<Self> {
        let n = support.len();
        Self::new(support, vec![1.0 / n as f64; n])
    }

    /// Normalizes arbitrary positive weights.
    pub fn normalized(support: Vec<usize>, weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        Self::new(support, weights.iter().map(|w| w / total).collect())
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    fn check(&self, sample: &CausalSample) -> Result<()> {
        if let Some(&i) = self.support.iter().find(|&&i| i >= sample.len()) {
            return Err(Error::invalid(format!("support index {i} is outside the sample")));
        }
        Ok(())
    }
}

/// One atom of a coupling: `mass` moved from sample event `i` to event `j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub i: usize,
    pub j: usize,
    pub mass: f64,
}

/// Dual prices certifying optimality: `u_i + v_j ≥ τ(x_i, y_j)^p` on causal
/// pairs, with duality gap `Σ μ u + Σ ν v − Σ π c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub gap: f64,
    pub max_violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub entries: Vec<PlanEntry>,
    /// `(Σ mass·τ^p)^{1/p}`, or `−∞` when no causal coupling exists.
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub value: f64,
    pub p: f64,
    pub feasible: bool,
    pub timelike: bool,
    pub mu: DiscreteMeasure,
    pub nu: DiscreteMeasure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<DualCertificate>,
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain("p", p, "(0, 1]"))
    }
}

fn infeasible(mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> TransportPlan {
    TransportPlan {
        entries: Vec::new(),
        value: f64::NEG_INFINITY,
        p,
        feasible: false,
        timelike: false,
        mu: mu.clone(),
        nu: nu.clone(),
        certificate: None,
    }
}

impl TransportPlan {
    /// Wraps a given coupling, checking marginals and recomputing its value.
    pub fn from_entries(
        sample: &CausalSample,
        mu: &DiscreteMeasure,
        nu: &DiscreteMeasure,
        entries: Vec<PlanEntry>,
        p: f64,
    ) -> Result<Self> {
        check_p(p)?;
        mu.check(sample)?;
        nu.check(sample)?;
        for (measure, by_row) in [(mu, true), (nu, false)] {
            for (&k, &m) in measure.support.iter().zip(&measure.masses) {
                let s: f64 = entries
                    .iter()
                    .filter(|e| if by_row { e.i == k } else { e.j == k })
                    .map(|e| e.mass)
                    .sum();
                if (s - m).abs() > MARGINAL_TOL {
                    return Err(Error::invalid(format!("plan marginal at event {k} is {s}, expected {m}")));
                }
            }
        }
        let mut total = 0.0;
        let mut causal = true;
        let mut timelike = true;
        for e in &entries {
            if !sample.causal(e.i, e.j)? {
                causal = false;
            }
            let t = sample.tau(e.i, e.j)?;
            if t <= 0.0 {
                timelike = false;
            }
            total += e.mass * t.powf(p);
        }
        Ok(Self {
            entries,
            value: if causal { total.max(0.0).powf(1.0 / p) } else { f64::NEG_INFINITY },
            p,
            feasible: causal,
            timelike: causal && timelike,
            mu: mu.clone(),
            nu: nu.clone(),
            certificate: None,
        })
    }

    /// `Σ mass·τ^p`, the linear objective.
    pub fn objective(&self) -> f64 {
        if self.feasible {
            self.value.powf(self.p)
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Maximizes `Σ π_ij τ(x_i, y_j)^p` over causal couplings of `mu` and `nu`.
pub fn solve_lp_optimal(
    sample: &CausalSample,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
) -> Result<TransportPlan> {
    check_p(p)?;
    mu.check(sample)?;
    nu.check(sample)?;
    let mut weights = vec![vec![None; nu.len()]; mu.len()];
    for (a, &i) in mu.support.iter().enumerate() {
        for (b, &j) in nu.support.iter().enumerate() {
            if sample.causal(i, j)? {
                weights[a][b] = Some(sample.tau(i, j)?.powf(p));
            }
        }
    }
    let sol = flow::max_weight_transport(&mu.masses, &nu.masses, &weights);
    if sol.shipped < 1.0 - MARGINAL_TOL {
        return Ok(infeasible(mu, nu, p));
    }
    let mut entries: Vec<PlanEntry> = sol
        .flows
        .iter()
        .map(|&(a, b, mass)| PlanEntry {
            i: mu.support[a],
            j: nu.support[b],
            mass,
        })
        .collect();
    entries.sort_by_key(|e| (e.i, e.j));
    let mut plan = TransportPlan::from_entries(sample, mu, nu, entries, p)?;

    let primal: f64 = sol.flows.iter().map(|&(a, b, f)| f * weights[a][b].unwrap_or(0.0)).sum();
    let dual: f64 = mu.masses.iter().zip(&sol.u).map(|(m, u)| m * u).sum::<f64>()
        + nu.masses.iter().zip(&sol.v).map(|(m, v)| m * v).sum::<f64>();
    let mut max_violation = 0.0f64;
    for (a, row) in weights.iter().enumerate() {
        for (b, w) in row.iter().enumerate() {
            if let Some(c) = w {
                max_violation = max_violation.max(c - sol.u[a] - sol.v[b]);
            }
        }
    }
    plan.certificate = Some(DualCertificate {
        u: sol.u,
        v: sol.v,
        gap: dual - primal,
        max_violation,
    });
    Ok(plan)
}

/// Exact optimum for uniform measures with equally many atoms (at most 8)
/// by enumerating all permutations.
pub fn brute_force_optimal(
    sample: &CausalSample,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    p: f64,
) -> Result<TransportPlan> {
    check_p(p)?;
    mu.check(sample)?;
    nu.check(sample)?;
    let n = mu.len();
    if n > BRUTE_FORCE_CAP || nu.len() > BRUTE_FORCE_CAP {
        return Err(Error::SizeCap(format!(
            "brute force handles at most {BRUTE_FORCE_CAP} atoms per side, got {}×{}",
            n,
            nu.len()
        )));
    }
    let uniform = |m: &DiscreteMeasure| m.masses.iter().all(|&x| (x - 1.0 / n as f64).abs() <= MARGINAL_TOL);
    if nu.len() != n || !uniform(mu) || !uniform(nu) {
        return Err(Error::invalid("brute force needs uniform measures with equally many atoms"));
    }
    let mut cost = vec![vec![None; n]; n];
    for a in 0..n {
        for b in 0..n {
            let (i, j) = (mu.support[a], nu.support[b]);
            if sample.causal(i, j)? {
                cost[a][b] = Some(sample.tau(i, j)?.powf(p));
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let total: Option<f64> = perm.iter().enumerate().map(|(a, &b)| cost[a][b]).sum();
        if let Some(t) = total {
            if best.as_ref().is_none_or(|(v, _)| t > *v) {
                best = Some((t, perm.clone()));
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let Some((_, perm)) = best else {
        return Ok(infeasible(mu, nu, p));
    };
    let mass = 1.0 / n as f64;
    let mut entries: Vec<PlanEntry> = perm
        .iter()
        .enumerate()
        .map(|(a, &b)| PlanEntry {
            i: mu.support[a],
            j: nu.support[b],
            mass,
        })
        .collect();
    entries.sort_by_key(|e| (e.i, e.j));
    TransportPlan::from_entries(sample, mu, nu, entries, p)
}

/// Rearranges into the next permutation in lexicographic order.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// A finite measure on explicit events, e.g. an intermediate measure of a
/// displacement interpolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventMeasure {
    pub events: Vec<Event>,
    pub masses: Vec<f64>,
}

/// Pushes every plan entry to the `t`-intermediate point of its geodesic.
pub fn displacement(plan: &TransportPlan, sample: &CausalSample, t: f64) -> Result<EventMeasure> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain("t", t, "[0, 1]"));
    }
    if !plan.feasible {
        return Err(Error::Infeasible("displacement of an infeasible plan".into()));
    }
    let marginal = |m: &DiscreteMeasure| EventMeasure {
        events: m.support.iter().map(|&i| sample.events[i].clone()).collect(),
        masses: m.masses.clone(),
    };
    for e in &plan.entries {
        if sample.tau(e.i, e.j)? <= 0.0 {
            return Err(Error::NotChronological);
        }
    }
    if t == 0.0 {
        return Ok(marginal(&plan.mu));
    }
    if t == 1.0 {
        return Ok(marginal(&plan.nu));
    }
    let st = sample.spacetime();
    let mut events = Vec::with_capacity(plan.entries.len());
    let mut masses = Vec::with_capacity(plan.entries.len());
    for e in &plan.entries {
        events.push(st.geodesic_point(&sample.events[e.i], &sample.events[e.j], t)?);
        masses.push(e.mass);
    }
    Ok(EventMeasure { events, masses })
}

/// `ℓ_p` between two event measures, solved on their joint sample.
pub fn lp_between(st: &SpacetimeDescriptor, a: &EventMeasure, b: &EventMeasure, p: f64) -> Result<TransportPlan> {
    let mut events = a.events.clone();
    events.extend(b.events.iter().cloned());
    let weights: Vec<f64> = a.masses.iter().chain(&b.masses).copied().collect();
    let mut sample = CausalSample::from_events(st, events, weights)?;
    if !sample.has_matrices() {
        sample.fill_matrices()?;
    }
    let na = a.events.len();
    let mu = DiscreteMeasure::normalized((0..na).collect(), &a.masses)?;
    let nu = DiscreteMeasure::normalized((na..na + b.events.len()).collect(), &b.masses)?;
    solve_lp_optimal(&sample, &mu, &nu, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetimes::Chart;
    use approx::assert_abs_diff_eq;

    fn mink2() -> SpacetimeDescriptor {
        SpacetimeDescriptor::new(Chart::Minkowski, 2)
    }

    fn sample(coords: &[[f64; 2]]) -> CausalSample {
        CausalSample::from_coords(&mink2(), coords.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn dirac_to_dirac() {
        let s = sample(&[[0.0, 0.0], [0.3, 1.0]]);
        let mu = DiscreteMeasure::uniform(vec![0]).unwrap();
        let nu = DiscreteMeasure::uniform(vec![1]).unwrap();
        for p in [0.5, 1.0] {
            let plan = solve_lp_optimal(&s, &mu, &nu, p).unwrap();
            assert_eq!(plan.entries.len(), 1);
            assert_abs_diff_eq!(plan.value, 0.91f64.sqrt(), epsilon = 1e-14);
            assert!(plan.timelike);
        }
    }

    #[test]
    fn two_by_two_matches_the_better_matching() {
        let s = sample(&[[0.0, 0.0], [0.5, 0.1], [0.1, 2.0], [0.7, 1.5]]);
        let mu = DiscreteMeasure::uniform(vec![0, 1]).unwrap();
        let nu = DiscreteMeasure::uniform(vec![2, 3]).unwrap();
        let p = 0.5;
        let c = |i, j| s.tau(i, j).unwrap().powf(p);
        let straight = 0.5 * (c(0, 2) + c(1, 3));
        let crossed = 0.5 * (c(0, 3) + c(1, 2));
        let plan = solve_lp_optimal(&s, &mu, &nu, p).unwrap();
        assert_abs_diff_eq!(plan.objective(), straight.max(crossed), epsilon = 1e-14);
        let bf = brute_force_optimal(&s, &mu, &nu, p).unwrap();
        assert_abs_diff_eq!(bf.value, plan.value, epsilon = 1e-12);
        let cert = plan.certificate.unwrap();
        assert!(cert.gap.abs() < 1e-12 && cert.max_violation < 1e-12);
    }

    #[test]
    fn infeasible_pairs_give_minus_infinity() {
        // spacelike pair; the target is only in the future of the first point
        let s = sample(&[[0.0, 0.0], [3.0, 0.0], [0.0, 1.0]]);
        let mu = DiscreteMeasure::uniform(vec![0, 1]).unwrap();
        let nu = DiscreteMeasure::uniform(vec![2]).unwrap();
        let plan = solve_lp_optimal(&s, &mu, &nu, 0.5).unwrap();
        assert!(!plan.feasible);
        assert_eq!(plan.value, f64::NEG_INFINITY);
        assert!(plan.to_json().unwrap().contains(r#""value": "-inf""#));
    }

    #[test]
    fn displacement_endpoints_and_midpoint() {
        let s = sample(&[[0.0, 0.0], [0.0, 2.0]]);
        let mu = DiscreteMeasure::uniform(vec![0]).unwrap();
        let nu = DiscreteMeasure::uniform(vec![1]).unwrap();
        let plan = solve_lp_optimal(&s, &mu, &nu, 0.5).unwrap();
        assert_eq!(displacement(&plan, &s, 0.0).unwrap().events[0].coords, vec![0.0, 0.0]);
        assert_eq!(displacement(&plan, &s, 1.0).unwrap().events[0].coords, vec![0.0, 2.0]);
        assert_eq!(displacement(&plan, &s, 0.5).unwrap().events[0].coords, vec![0.0, 1.0]);
    }

    #[test]
    fn brute_force_size_cap() {
        let coords: Vec<[f64; 2]> = (0..18).map(|k| [0.0, k as f64]).collect();
        let s = sample(&coords);
        let mu = DiscreteMeasure::uniform((0..9).collect()).unwrap();
        let nu = DiscreteMeasure::uniform((9..18).collect()).unwrap();
        assert!(matches!(brute_force_optimal(&s, &mu, &nu, 0.5), Err(Error::SizeCap(_))));
    }

    #[test]
    fn permutations_are_lexicographic() {
        let mut v = vec![0, 1, 2];
        let mut seen = vec![v.clone()];
        while next_permutation(&mut v) {
            seen.push(v.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![0, 2, 1]);
        assert_eq!(seen[5], vec![2, 1, 0]);
    }

    #[test]
    fn measures_validate() {
        assert!(DiscreteMeasure::new(vec![0, 0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![0, 1], vec![0.5, 0.4]).is_err());
        assert!(DiscreteMeasure::new(vec![0], vec![1.0]).is_ok());
    }
}
