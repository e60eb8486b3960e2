use rand::seq::index::sample as choose;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{PlanEntry, TransportPlan};
use crate::sampler::CausalSample;
use crate::{Error, Result};

const EXHAUSTIVE_MAX: usize = 4;
const SAMPLED_CYCLES: usize = 100_000;
const AUDIT_SEED: u64 = 0xc1c1e;

/// Outcome of a cyclical monotonicity audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityAudit {
    pub monotone: bool,
    pub cycles_checked: u64,
    /// Plan entries `(x_1, y_1), …, (x_L, y_L)` whose cyclic shift
    /// `(x_2, y_1), …, (x_1, y_L)` gains `excess` in `Σ τ^p`.
    pub witness: Option<Vec<PlanEntry>>,
    pub excess: f64,
}

struct Audit<'a> {
    cost: Vec<Vec<f64>>,
    entries: &'a [PlanEntry],
    checked: u64,
    witness: Option<(Vec<usize>, f64)>,
}

impl Audit<'_> {
    /// Gain of the cyclic shift along `cycle`, `−∞` if it uses a non-causal pair.
    fn gain(&self, cycle: &[usize]) -> f64 {
        let l = cycle.len();
        let (mut kept, mut shifted) = (0.0, 0.0);
        for k in 0..l {
            let a = cycle[k];
            kept += self.cost[a][a];
            shifted += self.cost[cycle[(k + 1) % l]][a];
        }
        if shifted == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let tol = 1e-12 * (1.0 + kept.abs());
        shifted - kept - tol
    }

    fn visit(&mut self, cycle: &[usize]) {
        self.checked += 1;
        let g = self.gain(cycle);
        if g > 0.0 && self.witness.as_ref().is_none_or(|(_, best)| g > *best) {
            self.witness = Some((cycle.to_vec(), g));
        }
    }

    fn exhaustive(&mut self, cycle: &mut Vec<usize>, len: usize) {
        if cycle.len() == len {
            let c = cycle.clone();
            self.visit(&c);
            return;
        }
        for a in cycle[0] + 1..self.entries.len() {
            if !cycle.contains(&a) {
                cycle.push(a);
                self.exhaustive(cycle, len);
                cycle.pop();
            }
        }
    }
}

/// Looks for a cycle of plan entries of length at most `max_cycle` whose
/// cyclic reshuffle increases `Σ τ^p`. Cycles of length up to 4 are
/// enumerated; longer ones are sampled.
pub fn check_cyclical_monotonicity(
    plan: &TransportPlan,
    sample: &CausalSample,
    max_cycle: usize,
) -> Result<MonotonicityAudit> {
    if !plan.feasible {
        return Err(Error::Infeasible("cannot audit an infeasible plan".into()));
    }
    let entries = &plan.entries;
    let k = entries.len();
    let mut cost = vec![vec![f64::NEG_INFINITY; k]; k];
    for (a, ea) in entries.iter().enumerate() {
        for (b, eb) in entries.iter().enumerate() {
            if sample.causal(ea.i, eb.j)? {
                cost[a][b] = sample.tau(ea.i, eb.j)?.powf(plan.p);
            }
        }
    }
    let mut audit = Audit {
        cost,
        entries,
        checked: 0,
        witness: None,
    };
    let top = max_cycle.min(k);
    for len in 2..=top.min(EXHAUSTIVE_MAX) {
        for first in 0..k {
            audit.exhaustive(&mut vec![first], len);
        }
    }
    if top > EXHAUSTIVE_MAX {
        let mut rng = ChaCha8Rng::seed_from_u64(AUDIT_SEED);
        for _ in 0..SAMPLED_CYCLES {
            let len = rng.gen_range(EXHAUSTIVE_MAX + 1..=top);
            let cycle = choose(&mut rng, k, len).into_vec();
            audit.visit(&cycle);
        }
    }
    Ok(match audit.witness {
        Some((cycle, excess)) => MonotonicityAudit {
            monotone: false,
            cycles_checked: audit.checked,
            witness: Some(cycle.iter().map(|&a| entries[a]).collect()),
            excess,
        },
        None => MonotonicityAudit {
            monotone: true,
            cycles_checked: audit.checked,
            witness: None,
            excess: 0.0,
        },
    })
}
