//! Poisson sprinkling, lattices and Monte-Carlo volumes of coordinate regions.
//!
//! Random draws come from ChaCha8 substreams: worker `w` of a run seeded with
//! `seed` uses stream `w` of `ChaCha8Rng::seed_from_u64(seed)`. The number of
//! workers is fixed by [`SprinkleOptions::workers`], not by the thread pool, so
//! results do not depend on how many threads rayon happens to use.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spacetimes::rays::RayFamily;
use crate::spacetimes::{
    AchronalSet, AchronalSetDescriptor, Chart, Event, Geometry, Spacetime, SpacetimeDescriptor,
};
use crate::{Error, Result};

/// Constraint cutting a region out of its coordinate box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predicate {
    #[default]
    Everywhere,
    /// `lo < τ_set(x) < hi`.
    TauBand {
        set: AchronalSetDescriptor,
        lo: f64,
        hi: f64,
    },
    /// The cone `C(V, S)`: points on a `τ_V`-maximizing ray from `V` before it
    /// meets `S`.
    ConeBetween {
        v: AchronalSetDescriptor,
        s: AchronalSetDescriptor,
    },
    All {
        parts: Vec<Predicate>,
    },
}

/// A coordinate box of a spacetime intersected with the chart domain and a
/// predicate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionDescriptor {
    pub st: SpacetimeDescriptor,
    pub bounds: Vec<[f64; 2]>,
    #[serde(default)]
    pub predicate: Predicate,
}

impl RegionDescriptor {
    pub fn new(st: SpacetimeDescriptor, bounds: Vec<[f64; 2]>) -> Self {
        Self {
            st,
            bounds,
            predicate: Predicate::Everywhere,
        }
    }

    pub fn with_predicate(mut self, predicate: Predicate) -> Self {
        self.predicate = predicate;
        self
    }

    pub fn build(&self) -> Result<Region> {
        Region::new(self)
    }
}

#[derive(Clone, Debug)]
enum Compiled {
    Everywhere,
    Band { set: AchronalSet, lo: f64, hi: f64 },
    Cone(Box<ConeTest>),
    All(Vec<Compiled>),
}

#[derive(Clone, Debug)]
struct ConeTest {
    rays: RayFamily,
    s: AchronalSet,
    /// `Some(t)` when `S = V_t`: every ray of `V` meets `S` at `s = t`.
    level: Option<f64>,
}

/// A validated region, ready for sampling.
#[derive(Clone, Debug)]
pub struct Region {
    descriptor: RegionDescriptor,
    st: Spacetime,
    bounds: Vec<(f64, f64)>,
    predicate: Compiled,
    density_max: f64,
}

fn compile(st: &Spacetime, p: &Predicate) -> Result<Compiled> {
    Ok(match p {
        Predicate::Everywhere => Compiled::Everywhere,
        Predicate::TauBand { set, lo, hi } => {
            if !(lo < hi) {
                return Err(Error::invalid(format!("empty τ band ({lo}, {hi})")));
            }
            Compiled::Band {
                set: set.build(st)?,
                lo: *lo,
                hi: *hi,
            }
        }
        Predicate::ConeBetween { v, s } => {
            let v = v.build(st)?;
            let s = s.build(st)?;
            let level = match &s.level_of {
                Some((base, t)) if *base == v.shape => Some(*t),
                _ => None,
            };
            Compiled::Cone(Box::new(ConeTest {
                rays: RayFamily::for_set(st, &v)?,
                s,
                level,
            }))
        }
        Predicate::All { parts } => Compiled::All(parts.iter().map(|q| compile(st, q)).collect::<Result<_>>()?),
    })
}

impl ConeTest {
    fn contains(&self, st: &Spacetime, x: &[f64]) -> Result<bool> {
        let Some((label, sx)) = self.rays.foot(x) else {
            return Ok(false);
        };
        if sx <= 0.0 {
            return Ok(false);
        }
        if let Some(t) = self.level {
            return Ok(sx <= t && self.rays.chart_exit(st, &label) >= t);
        }
        if self.s.tau_signed_coords(st, x)? > 0.0 {
            return Ok(false);
        }
        // τ_S increases along the ray; look for a point at or beyond S
        let exit = self.rays.chart_exit(st, &label);
        let reaches = |s: f64| -> Result<bool> {
            match self.rays.point(&label, s) {
                Some(p) if st.in_chart(&p) => Ok(self.s.tau_signed_coords(st, &p)? >= 0.0),
                _ => Ok(false),
            }
        };
        if exit.is_finite() {
            return reaches(exit);
        }
        let mut s = sx.max(1.0);
        for _ in 0..64 {
            if reaches(s)? {
                return Ok(true);
            }
            s *= 2.0;
        }
        Ok(false)
    }
}

fn holds(st: &Spacetime, p: &Compiled, x: &[f64]) -> Result<bool> {
    Ok(match p {
        Compiled::Everywhere => true,
        Compiled::Band { set, lo, hi } => {
            let t = set.tau_signed_coords(st, x)?;
            *lo < t && t < *hi
        }
        Compiled::Cone(c) => c.contains(st, x)?,
        Compiled::All(parts) => {
            for q in parts {
                if !holds(st, q, x)? {
                    return Ok(false);
                }
            }
            true
        }
    })
}

impl Region {
    pub fn new(d: &RegionDescriptor) -> Result<Self> {
        let st = d.st.build()?;
        if d.bounds.len() != st.dim() {
            return Err(Error::invalid(format!(
                "region box has {} sides, spacetime has dimension {}",
                d.bounds.len(),
                st.dim()
            )));
        }
        let bounds: Vec<(f64, f64)> = d.bounds.iter().map(|b| (b[0], b[1])).collect();
        for &(lo, hi) in &bounds {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::invalid(format!("region box side [{lo}, {hi}] is not a finite interval")));
            }
        }
        let predicate = compile(&st, &d.predicate)?;
        let density_max = st.density_bound(&bounds);
        Ok(Self {
            descriptor: d.clone(),
            st,
            bounds,
            predicate,
            density_max,
        })
    }

    pub fn descriptor(&self) -> &RegionDescriptor {
        &self.descriptor
    }

    pub fn spacetime(&self) -> &Spacetime {
        &self.st
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn box_volume(&self) -> f64 {
        self.bounds.iter().map(|(lo, hi)| hi - lo).product()
    }

    /// Chart membership and predicate.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.bounds.len() || !self.bounds.iter().zip(x).all(|(&(lo, hi), &v)| lo <= v && v <= hi) {
            return Ok(false);
        }
        if !self.st.in_chart(x) {
            return Ok(false);
        }
        holds(&self.st, &self.predicate, x)
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.bounds.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SprinkleOptions {
    /// Number of independent substreams the draws are split across.
    pub workers: usize,
    /// Fill τ and causal matrices when the sample has at most this many
    /// events; `None` picks a chart-dependent default.
    pub matrix_cap: Option<usize>,
}

impl Default for SprinkleOptions {
    fn default() -> Self {
        Self {
            workers: 16,
            matrix_cap: None,
        }
    }
}

const MIN_ACCEPTANCE: f64 = 1e-4;
const MIN_TRIALS_FOR_REJECTION: u64 = 100_000;
const TAU_CLAMP: f64 = 1e-12;

fn default_matrix_cap(chart: Chart) -> usize {
    match chart {
        Chart::Minkowski | Chart::Cone => 2048,
        Chart::Warped => 128,
        Chart::SchwarzschildInterior => 0,
    }
}

fn split(n: usize, workers: usize) -> Vec<usize> {
    (0..workers).map(|w| n / workers + usize::from(w < n % workers)).collect()
}

fn stream(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

/// Finite weighted sample of a spacetime region.
#[derive(Clone, Debug, PartialEq)]
pub struct CausalSample {
    pub spacetime: SpacetimeDescriptor,
    pub events: Vec<Event>,
    pub weights: Vec<f64>,
    /// Standard error of the total weight as an estimate of the region volume
    /// (zero for explicit samples and lattices).
    pub volume_stderr: f64,
    pub seed: u64,
    /// `τ(x_i, x_j)`; empty when the matrices were not filled.
    pub tau_matrix: Vec<Vec<f64>>,
    /// `x_i ≤ x_j`; empty when the matrices were not filled.
    pub causal_matrix: Vec<Vec<bool>>,
    st: Spacetime,
}

/// Monte-Carlo volume with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub stderr: f64,
}

/// Draws `n` events i.i.d. from the normalized volume measure of the region.
pub fn sprinkle(region: &RegionDescriptor, n: usize, seed: u64) -> Result<CausalSample> {
    sprinkle_with(region, n, seed, SprinkleOptions::default())
}

pub fn sprinkle_with(region: &RegionDescriptor, n: usize, seed: u64, opts: SprinkleOptions) -> Result<CausalSample> {
    if n == 0 {
        return Err(Error::invalid("sprinkle needs n >= 1"));
    }
    let workers = opts.workers.max(1);
    let reg = region.build()?;
    let chunks: Vec<Result<(Vec<Vec<f64>>, u64)>> = split(n, workers)
        .into_par_iter()
        .enumerate()
        .map(|(w, quota)| {
            let mut rng = stream(seed, w);
            let mut pts = Vec::with_capacity(quota);
            let mut trials = 0u64;
            while pts.len() < quota {
                let x = reg.draw(&mut rng);
                let u: f64 = rng.gen();
                trials += 1;
                if u * reg.density_max < reg.st.density_at(&x) && reg.contains(&x)? {
                    pts.push(x);
                } else if trials >= MIN_TRIALS_FOR_REJECTION && (pts.len() as f64) < MIN_ACCEPTANCE * trials as f64 {
                    return Err(Error::DegenerateRegion {
                        rate: pts.len() as f64 / trials as f64,
                    });
                }
            }
            Ok((pts, trials))
        })
        .collect();
    let mut coords = Vec::with_capacity(n);
    let mut trials = 0u64;
    for c in chunks {
        let (pts, t) = c?;
        trials += t;
        coords.extend(pts);
    }
    let volume = reg.box_volume() * reg.density_max * n as f64 / trials as f64;
    let chart = reg.st.chart();
    let events = coords.into_iter().map(|c| Event::new(chart, c)).collect();
    let mut sample = CausalSample::assemble(reg.st.clone(), events, vec![volume / n as f64; n], seed);
    // n is fixed and the trial count negative binomial: relative variance (1 − p)/n
    let acceptance = n as f64 / trials as f64;
    sample.volume_stderr = volume * ((1.0 - acceptance).max(0.0) / n as f64).sqrt();
    let cap = opts.matrix_cap.unwrap_or_else(|| default_matrix_cap(chart));
    if n <= cap {
        sample.fill_matrices()?;
    }
    Ok(sample)
}

/// Cell-centre lattice of the region with `per_axis` cells along each box
/// side; each retained centre carries its cell volume times the density.
pub fn lattice(region: &RegionDescriptor, per_axis: usize) -> Result<CausalSample> {
    if per_axis == 0 {
        return Err(Error::invalid("lattice needs at least one cell per axis"));
    }
    let reg = region.build()?;
    let dim = reg.bounds.len();
    let h: Vec<f64> = reg.bounds.iter().map(|(lo, hi)| (hi - lo) / per_axis as f64).collect();
    let cell: f64 = h.iter().product();
    let total = per_axis.checked_pow(dim as u32).ok_or_else(|| Error::SizeCap("lattice too large".into()))?;
    let mut events = Vec::new();
    let mut weights = Vec::new();
    for k in 0..total {
        let mut rest = k;
        let x: Vec<f64> = (0..dim)
            .map(|i| {
                let j = rest % per_axis;
                rest /= per_axis;
                reg.bounds[i].0 + (j as f64 + 0.5) * h[i]
            })
            .collect();
        if reg.contains(&x)? {
            weights.push(cell * reg.st.density_at(&x));
            events.push(Event::new(reg.st.chart(), x));
        }
    }
    if events.is_empty() {
        return Err(Error::DegenerateRegion { rate: 0.0 });
    }
    let mut sample = CausalSample::assemble(reg.st.clone(), events, weights, 0);
    if sample.len() <= default_matrix_cap(reg.st.chart()) {
        sample.fill_matrices()?;
    }
    Ok(sample)
}

/// Plain Monte-Carlo integral of the volume density over the region.
pub fn estimate_volume(region: &RegionDescriptor, n: usize, seed: u64) -> Result<VolumeEstimate> {
    estimate_volume_with(region, n, seed, SprinkleOptions::default().workers)
}

pub fn estimate_volume_with(region: &RegionDescriptor, n: usize, seed: u64, workers: usize) -> Result<VolumeEstimate> {
    if n < 2 {
        return Err(Error::invalid("estimate_volume needs n >= 2"));
    }
    let reg = region.build()?;
    let box_vol = reg.box_volume();
    let parts: Vec<Result<(f64, f64, usize)>> = split(n, workers.max(1))
        .into_par_iter()
        .enumerate()
        .map(|(w, quota)| {
            let mut rng = stream(seed, w);
            let (mut s1, mut s2, mut hits) = (0.0, 0.0, 0usize);
            for _ in 0..quota {
                let x = reg.draw(&mut rng);
                if reg.contains(&x)? {
                    let f = box_vol * reg.st.density_at(&x);
                    s1 += f;
                    s2 += f * f;
                    hits += 1;
                }
            }
            Ok((s1, s2, hits))
        })
        .collect();
    let (mut s1, mut s2, mut hits) = (0.0, 0.0, 0usize);
    for p in parts {
        let (a, b, h) = p?;
        s1 += a;
        s2 += b;
        hits += h;
    }
    if hits == 0 {
        return Err(Error::DegenerateRegion { rate: 0.0 });
    }
    let nf = n as f64;
    let mean = s1 / nf;
    let var = ((s2 / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    Ok(VolumeEstimate {
        value: mean,
        stderr: (var / nf).sqrt(),
    })
}

#[derive(Serialize, Deserialize)]
struct EventLine {
    chart: Chart,
    coords: Vec<f64>,
    weight: f64,
}

impl CausalSample {
    fn assemble(st: Spacetime, events: Vec<Event>, weights: Vec<f64>, seed: u64) -> Self {
        Self {
            spacetime: st.descriptor().clone(),
            events,
            weights,
            volume_stderr: 0.0,
            seed,
            tau_matrix: Vec::new(),
            causal_matrix: Vec::new(),
            st,
        }
    }

    /// Builds a sample from explicit events; matrices are filled when the
    /// chart supports two-point `τ` and the sample is small enough.
    pub fn from_events(st: &SpacetimeDescriptor, events: Vec<Event>, weights: Vec<f64>) -> Result<Self> {
        let spacetime = st.build()?;
        if events.len() != weights.len() {
            return Err(Error::invalid("events and weights differ in length"));
        }
        for (e, w) in events.iter().zip(&weights) {
            spacetime.check_event(e)?;
            if !(*w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("weight {w} is not positive")));
            }
        }
        let mut s = Self::assemble(spacetime, events, weights, 0);
        if s.len() <= default_matrix_cap(s.st.chart()) {
            s.fill_matrices()?;
        }
        Ok(s)
    }

    /// Events with unit weights at the given coordinates.
    pub fn from_coords(st: &SpacetimeDescriptor, coords: Vec<Vec<f64>>) -> Result<Self> {
        let n = coords.len();
        let events = coords.into_iter().map(|c| Event::new(st.kind, c)).collect();
        Self::from_events(st, events, vec![1.0; n])
    }

    pub fn spacetime(&self) -> &Spacetime {
        &self.st
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn has_matrices(&self) -> bool {
        !self.events.is_empty() && self.tau_matrix.len() == self.events.len()
    }

    /// Computes the full τ and causal matrices (quadratic in the sample size).
    pub fn fill_matrices(&mut self) -> Result<()> {
        if let Geometry::Schwarzschild { .. } = self.st.geometry() {
            return Err(Error::Unsupported(
                "two-point τ is not available in the Schwarzschild interior".into(),
            ));
        }
        let n = self.events.len();
        let st = &self.st;
        let events = &self.events;
        let rows: Vec<Result<(Vec<f64>, Vec<bool>)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut tau = vec![0.0; n];
                let mut causal = vec![false; n];
                for j in 0..n {
                    let (x, y) = (&events[i].coords, &events[j].coords);
                    if i == j {
                        causal[j] = true;
                        continue;
                    }
                    let t = st.tau_unchecked(x, y)?;
                    tau[j] = if t < TAU_CLAMP { 0.0 } else { t };
                    causal[j] = tau[j] > 0.0 || st.causal_unchecked(x, y)?;
                }
                Ok((tau, causal))
            })
            .collect();
        let mut tau_matrix = Vec::with_capacity(n);
        let mut causal_matrix = Vec::with_capacity(n);
        for r in rows {
            let (t, c) = r?;
            tau_matrix.push(t);
            causal_matrix.push(c);
        }
        self.tau_matrix = tau_matrix;
        self.causal_matrix = causal_matrix;
        Ok(())
    }

    /// `τ(x_i, x_j)`, from the matrix when present.
    pub fn tau(&self, i: usize, j: usize) -> Result<f64> {
        if self.has_matrices() {
            return Ok(self.tau_matrix[i][j]);
        }
        let t = self.st.tau_unchecked(&self.events[i].coords, &self.events[j].coords)?;
        Ok(if t < TAU_CLAMP { 0.0 } else { t })
    }

    /// `x_i ≤ x_j`, from the matrix when present.
    pub fn causal(&self, i: usize, j: usize) -> Result<bool> {
        if self.has_matrices() {
            return Ok(self.causal_matrix[i][j]);
        }
        if i == j {
            return Ok(true);
        }
        Ok(self.tau(i, j)? > 0.0 || self.st.causal_unchecked(&self.events[i].coords, &self.events[j].coords)?)
    }

    /// One JSON object per line: `{"chart", "coords", "weight"}`.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for (e, &weight) in self.events.iter().zip(&self.weights) {
            let line = EventLine {
                chart: e.chart,
                coords: e.coords.clone(),
                weight,
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(st: &SpacetimeDescriptor, r: R) -> Result<Self> {
        let mut events = Vec::new();
        let mut weights = Vec::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let ev: EventLine = serde_json::from_str(&line)?;
            events.push(Event::new(ev.chart, ev.coords));
            weights.push(ev.weight);
        }
        Self::from_events(st, events, weights)
    }
}
