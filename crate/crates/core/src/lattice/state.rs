//! Occupation state on `ℤ` with exact birth-rate bookkeeping.
//!
//! The birth intensity `S(x) = Σ_y η(y) a⁽ᵈ⁾(x - y)` is split at a cutoff `K`.
//! The near part `|x - y| ≤ K` is stored per site and the clamped rates
//! `min(1, S_near)` live in Fenwick trees, so near births are drawn directly.
//! Jumps beyond `K` are proposed at the constant rate `N Σ_{|k|>K} a⁽ᵈ⁾(k)`
//! and thinned to the missing rate `min(1, S) - min(1, S_near)`, which keeps
//! the dynamics exact whatever `K` is.
//!
//! Sites are stored in chunks of 1024 that exist only near particles, so a
//! distant outpost costs a few chunks rather than the whole gap. Since the
//! intensity only grows, a site whose near intensity has reached one is
//! frozen and skipped by later updates.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, Error, Result};
use crate::fenwick::FenwickTree;
use crate::kernel::power_sum_from;

pub const CHUNK_BITS: u32 = 10;
pub const CHUNK: usize = 1 << CHUNK_BITS;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatticeParams {
    pub alpha: f64,
    /// Target one-sided tail mass beyond the near cutoff.
    pub eps_tail: f64,
    /// Upper bound on the near cutoff regardless of `eps_tail`.
    pub k_cut_max: usize,
    /// Memory cap on stored sites.
    pub max_sites: usize,
    /// Every rate is multiplied by this constant.
    pub rate_multiplier: f64,
}

impl Default for LatticeParams {
    fn default() -> Self {
        LatticeParams {
            alpha: 3.0,
            eps_tail: 1e-12,
            k_cut_max: 1024,
            max_sites: 1 << 23,
            rate_multiplier: 1.0,
        }
    }
}

impl LatticeParams {
    pub fn new(alpha: f64) -> Self {
        LatticeParams {
            alpha,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(self.eps_tail > 0.0) {
            return Err(Error::Config("eps_tail must be positive".into()));
        }
        if self.k_cut_max < 1 {
            return Err(Error::Config("k_cut_max must be at least 1".into()));
        }
        if !(self.rate_multiplier > 0.0 && self.rate_multiplier.is_finite()) {
            return Err(Error::Config("rate_multiplier must be positive".into()));
        }
        if self.max_sites < 4 * CHUNK {
            return Err(Error::Config(format!("max_sites must be at least {}", 4 * CHUNK)));
        }
        Ok(())
    }

    /// Smallest `K ≤ k_cut_max` with `Σ_{k>K} k^{-2α} ≤ eps_tail`.
    pub fn k_cut(&self) -> usize {
        let p = 2.0 * self.alpha;
        let mut k = 1usize;
        while k < self.k_cut_max && power_sum_from(p, k as u64 + 1) > self.eps_tail {
            k = (k * 2).min(self.k_cut_max);
        }
        // Tighten by bisection between k/2 and k.
        let (mut lo, mut hi) = (k / 2, k);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if power_sum_from(p, mid as u64 + 1) > self.eps_tail {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi.max(1)
    }
}

/// Jump lengths `k > K` with probability proportional to `k^{-p}`, by
/// rounding down a Pareto variate and correcting with a rejection step.
#[derive(Clone, Debug)]
pub struct FarJumps {
    p: f64,
    k_cut: u64,
    /// `Σ_{k>K} k^{-p}`.
    pub one_sided_mass: f64,
    bound: f64,
}

impl FarJumps {
    pub fn new(p: f64, k_cut: u64) -> Self {
        let k1 = (k_cut + 1) as f64;
        FarJumps {
            p,
            k_cut,
            one_sided_mass: power_sum_from(p, k_cut + 1),
            bound: ((k1 + 1.0) / k1).powf(p),
        }
    }

    /// `∫_k^{k+1} y^{-p} dy`, written to avoid cancellation for large `k`.
    fn cell_mass(&self, k: f64) -> f64 {
        let e = 1.0 - self.p;
        -k.powf(e) * (e * (1.0 / k).ln_1p()).exp_m1() / (self.p - 1.0)
    }

    /// A jump length, or an error if it would leave the representable range.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64> {
        let k1 = (self.k_cut + 1) as f64;
        loop {
            let u: f64 = 1.0 - rng.random::<f64>();
            let y = k1 * u.powf(-1.0 / (self.p - 1.0));
            if !(y < 4.0e18) {
                return Err(Error::Resource(format!("far jump of length {y:e} exceeds the lattice range")));
            }
            let k = y.floor();
            let accept = k.powf(-self.p) / (self.bound * self.cell_mass(k));
            if rng.random::<f64>() < accept {
                return Ok(k as u64);
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Chunk {
    base: i64,
    counts: Vec<u32>,
    /// Near intensity; exact until the site saturates, frozen afterwards.
    near: Vec<f64>,
    rates: FenwickTree,
    /// Union-find links to the next unsaturated offset (`CHUNK` = none).
    open: Vec<u16>,
    n: u64,
}

impl Chunk {
    fn new(base: i64) -> Self {
        Chunk {
            base,
            counts: vec![0; CHUNK],
            near: vec![0.0; CHUNK],
            rates: FenwickTree::new(CHUNK),
            open: (0..=CHUNK as u16).collect(),
            n: 0,
        }
    }

    fn next_open(&mut self, mut i: usize) -> usize {
        while self.open[i] as usize != i {
            let up = self.open[self.open[i] as usize];
            self.open[i] = up;
            i = up as usize;
        }
        i
    }

    fn saturated(&self, i: usize) -> bool {
        self.open[i] as usize != i
    }

    /// Adds `c · w[|site - y|]` to the open sites at offsets `lo..=hi`,
    /// returning the change in the chunk's total rate.
    fn add_intensity(&mut self, lo: usize, hi: usize, y: i64, c: f64, w: &[f64]) -> f64 {
        let mut delta = 0.0;
        let mut i = self.next_open(lo);
        while i <= hi {
            let d = (self.base + i as i64 - y).unsigned_abs() as usize;
            let s = self.near[i] + c * w[d];
            self.near[i] = s;
            let r = s.min(1.0);
            delta += r - self.rates.weight(i);
            self.rates.set(i, r);
            if s >= 1.0 {
                self.open[i] = (i + 1) as u16;
            }
            i = self.next_open(i + 1);
        }
        delta
    }
}

/// Result of one proposal drawn from the dominating rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Proposal {
    Birth(i64),
    Rejected,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirthEvent {
    pub t: f64,
    pub site: i64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LatticeCounters {
    pub births: u64,
    pub proposals: u64,
    pub far_proposals: u64,
    pub far_births: u64,
    pub far_exact_sums: u64,
}

/// Discrepancy between incremental and from-scratch rate bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateAudit {
    pub incremental_total: f64,
    pub recomputed_total: f64,
    pub max_site_error: f64,
}

impl RateAudit {
    pub fn relative_total_error(&self) -> f64 {
        (self.incremental_total - self.recomputed_total).abs() / self.recomputed_total.max(1e-300)
    }
}

#[derive(Clone, Debug)]
pub struct LatticeState {
    params: LatticeParams,
    k_cut: usize,
    /// `w[d] = a⁽ᵈ⁾(d)` for `0 ≤ d ≤ K + 1`.
    w: Vec<f64>,
    far: FarJumps,
    chunks: Vec<Chunk>,
    index: HashMap<i64, usize>,
    top: FenwickTree,
    pub time: f64,
    n: u64,
    left_tip: i64,
    right_tip: i64,
    pub counters: LatticeCounters,
    births_since_rebuild: u64,
}

impl LatticeState {
    /// A single particle at the origin.
    pub fn new(params: LatticeParams) -> Result<Self> {
        let mut s = Self::empty(params)?;
        s.birth(0)?;
        s.counters = LatticeCounters::default();
        Ok(s)
    }

    /// One particle at each listed site (repeats allowed).
    pub fn from_sites(params: LatticeParams, sites: &[i64]) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::Domain("initial configuration must be non-empty".into()));
        }
        let mut s = Self::empty(params)?;
        for &x in sites {
            s.birth(x)?;
        }
        s.counters = LatticeCounters::default();
        Ok(s)
    }

    fn empty(params: LatticeParams) -> Result<Self> {
        params.validate()?;
        let k_cut = params.k_cut();
        let p = 2.0 * params.alpha;
        let w = (0..=k_cut + 1)
            .map(|d| if d <= 1 { 1.0 } else { (d as f64).powf(-p) })
            .collect();
        Ok(LatticeState {
            far: FarJumps::new(p, k_cut as u64),
            params,
            k_cut,
            w,
            chunks: Vec::new(),
            index: HashMap::new(),
            top: FenwickTree::new(16),
            time: 0.0,
            n: 0,
            left_tip: i64::MAX,
            right_tip: i64::MIN,
            counters: LatticeCounters::default(),
            births_since_rebuild: 0,
        })
    }

    pub fn params(&self) -> &LatticeParams {
        &self.params
    }

    pub fn k_cut(&self) -> usize {
        self.k_cut
    }

    pub fn n_particles(&self) -> u64 {
        self.n
    }

    pub fn left_tip(&self) -> i64 {
        self.left_tip
    }

    pub fn right_tip(&self) -> i64 {
        self.right_tip
    }

    pub fn stored_sites(&self) -> usize {
        self.chunks.len() * CHUNK
    }

    pub fn count_at(&self, x: i64) -> u32 {
        let (id, off) = split(x);
        self.index.get(&id).map_or(0, |&s| self.chunks[s].counts[off])
    }

    /// Occupied sites in increasing order with their counts.
    pub fn occupied(&self) -> Vec<(i64, u32)> {
        let mut slots: Vec<usize> = (0..self.chunks.len()).filter(|&s| self.chunks[s].n > 0).collect();
        slots.sort_by_key(|&s| self.chunks[s].base);
        let mut out = Vec::new();
        for s in slots {
            let c = &self.chunks[s];
            for (i, &k) in c.counts.iter().enumerate() {
                if k > 0 {
                    out.push((c.base + i as i64, k));
                }
            }
        }
        out
    }

    /// Total of the clamped near rates, `Σ_x min(1, S_near(x))`.
    pub fn near_rate_total(&self) -> f64 {
        self.top.total()
    }

    /// Rate of far-jump proposals, `2 N Σ_{k>K} k^{-2α}`.
    pub fn far_proposal_rate(&self) -> f64 {
        2.0 * self.n as f64 * self.far.one_sided_mass
    }

    /// Dominating event rate in the process's own time units.
    pub fn rate_bound(&self) -> f64 {
        self.near_rate_total() + self.far_proposal_rate()
    }

    /// `S(x)` summed over all particles.
    pub fn intensity_at(&self, x: i64) -> f64 {
        let p = 2.0 * self.params.alpha;
        let mut s = 0.0;
        for c in &self.chunks {
            if c.n == 0 {
                continue;
            }
            for (i, &k) in c.counts.iter().enumerate() {
                if k > 0 {
                    let d = (c.base + i as i64 - x).unsigned_abs();
                    s += k as f64 * if d <= 1 { 1.0 } else { (d as f64).powf(-p) };
                }
            }
        }
        s
    }

    /// Exact birth rate `b(x) = min(1, S(x))`.
    pub fn rate_at(&self, x: i64) -> f64 {
        self.intensity_at(x).min(1.0)
    }

    /// `b(x)`, answered from the saturation flag when possible.
    pub fn birth_rate(&self, x: i64) -> f64 {
        if let Some((s, off)) = self.slot_of(x) {
            if self.chunks[s].saturated(off) {
                return 1.0;
            }
        }
        self.rate_at(x)
    }

    fn slot_of(&self, x: i64) -> Option<(usize, usize)> {
        let (id, off) = split(x);
        self.index.get(&id).map(|&s| (s, off))
    }

    fn ensure_chunk(&mut self, id: i64) -> Result<usize> {
        if let Some(&s) = self.index.get(&id) {
            return Ok(s);
        }
        if (self.chunks.len() + 1) * CHUNK > self.params.max_sites {
            return Err(Error::Resource(format!(
                "stored sites would exceed the cap of {}",
                self.params.max_sites
            )));
        }
        let base = id << CHUNK_BITS;
        let mut chunk = Chunk::new(base);
        // Seed the new chunk's intensity from particles already within reach.
        let k = self.k_cut as i64;
        let lo_id = (base - k).div_euclid(CHUNK as i64);
        let hi_id = (base + CHUNK as i64 - 1 + k).div_euclid(CHUNK as i64);
        for nid in lo_id..=hi_id {
            let Some(&ns) = self.index.get(&nid) else { continue };
            let nb = &self.chunks[ns];
            if nb.n == 0 {
                continue;
            }
            for (i, &cnt) in nb.counts.iter().enumerate() {
                if cnt == 0 {
                    continue;
                }
                let y = nb.base + i as i64;
                let lo = (y - k).max(base);
                let hi = (y + k).min(base + CHUNK as i64 - 1);
                if lo <= hi {
                    chunk.add_intensity((lo - base) as usize, (hi - base) as usize, y, cnt as f64, &self.w);
                }
            }
        }
        let slot = self.chunks.len();
        let total = chunk.rates.total();
        self.chunks.push(chunk);
        self.index.insert(id, slot);
        if slot >= self.top.len() {
            let mut ws: Vec<f64> = self.chunks.iter().map(|c| c.rates.total()).collect();
            ws.resize((2 * slot).max(16), 0.0);
            self.top = FenwickTree::from_weights(ws);
        } else {
            self.top.set(slot, total);
        }
        Ok(slot)
    }

    /// Adds one particle at `x` and updates all rates.
    pub fn birth(&mut self, x: i64) -> Result<()> {
        let k = self.k_cut as i64;
        let (lo, hi) = (x.checked_sub(k), x.checked_add(k));
        let (Some(lo), Some(hi)) = (lo, hi) else {
            return Err(Error::Resource(format!("site {x} too close to the integer range limit")));
        };
        let lo_id = lo.div_euclid(CHUNK as i64);
        let hi_id = hi.div_euclid(CHUNK as i64);
        for id in lo_id..=hi_id {
            self.ensure_chunk(id)?;
        }
        for id in lo_id..=hi_id {
            let slot = self.index[&id];
            let c = &mut self.chunks[slot];
            let a = lo.max(c.base);
            let b = hi.min(c.base + CHUNK as i64 - 1);
            let delta = c.add_intensity((a - c.base) as usize, (b - c.base) as usize, x, 1.0, &self.w);
            if delta != 0.0 {
                self.top.add(slot, delta);
            }
        }
        let (slot, off) = self.slot_of(x).expect("chunk created above");
        let c = &mut self.chunks[slot];
        c.counts[off] += 1;
        c.n += 1;
        self.n += 1;
        self.left_tip = self.left_tip.min(x);
        self.right_tip = self.right_tip.max(x);
        self.counters.births += 1;
        self.births_since_rebuild += 1;
        if self.births_since_rebuild >= 1 << 16 {
            self.rebuild();
        }
        Ok(())
    }

    /// Recomputes all Fenwick trees from stored weights.
    pub fn rebuild(&mut self) {
        for c in &mut self.chunks {
            c.rates.rebuild();
        }
        let mut ws: Vec<f64> = self.chunks.iter().map(|c| c.rates.total()).collect();
        ws.resize(self.top.len().max(ws.len()), 0.0);
        self.top = FenwickTree::from_weights(ws);
        self.births_since_rebuild = 0;
    }

    fn pick_particle<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let mut r = rng.random_range(0..self.n);
        for c in &self.chunks {
            if r >= c.n {
                r -= c.n;
                continue;
            }
            for (i, &k) in c.counts.iter().enumerate() {
                if r < k as u64 {
                    return c.base + i as i64;
                }
                r -= k as u64;
            }
        }
        unreachable!("particle index within total count")
    }

    /// Accepts a far proposal landing at `x` with probability
    /// `(min(1, S) - min(1, S_near)) / S_far`.
    fn accept_far<R: Rng + ?Sized>(&mut self, x: i64, rng: &mut R) -> bool {
        let u: f64 = rng.random();
        let s_near = match self.slot_of(x) {
            Some((s, off)) => {
                if self.chunks[s].saturated(off) {
                    return false;
                }
                self.chunks[s].near[off]
            }
            None => 0.0,
        };
        let wk = self.w[self.k_cut + 1];
        if s_near + self.n as f64 * wk <= 1.0 {
            return true;
        }
        // Chunk-level bound on the far intensity.
        let k = self.k_cut as i64;
        let p = 2.0 * self.params.alpha;
        let mut bound = 0.0;
        for c in &self.chunks {
            if c.n == 0 {
                continue;
            }
            let gap = if x < c.base {
                c.base - x
            } else if x >= c.base + CHUNK as i64 {
                x - (c.base + CHUNK as i64 - 1)
            } else {
                0
            };
            let d = gap.max(k + 1) as f64;
            bound += c.n as f64 * d.powf(-p);
        }
        if s_near + bound <= 1.0 {
            return true;
        }
        self.counters.far_exact_sums += 1;
        let mut s_far = 0.0;
        for c in &self.chunks {
            if c.n == 0 {
                continue;
            }
            for (i, &cnt) in c.counts.iter().enumerate() {
                if cnt > 0 {
                    let d = (c.base + i as i64 - x).unsigned_abs();
                    if d > self.k_cut as u64 {
                        s_far += cnt as f64 * (d as f64).powf(-p);
                    }
                }
            }
        }
        let gain = (s_near + s_far).min(1.0) - s_near;
        u * s_far < gain
    }

    /// Draws one proposal from the dominating rate without advancing time.
    pub fn propose<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Proposal> {
        self.counters.proposals += 1;
        let near = self.near_rate_total();
        let total = near + self.far_proposal_rate();
        let v = rng.random::<f64>() * total;
        if v < near {
            let Some((slot, resid)) = self.top.find(v) else {
                return Ok(Proposal::Rejected);
            };
            let c = &self.chunks[slot];
            match c.rates.find(resid) {
                Some((off, _)) if c.rates.weight(off) > 0.0 => Ok(Proposal::Birth(c.base + off as i64)),
                _ => Ok(Proposal::Rejected),
            }
        } else {
            self.counters.far_proposals += 1;
            let y = self.pick_particle(rng);
            let k = self.far.sample(rng)?;
            let x = if rng.random::<bool>() {
                y.checked_add(k as i64)
            } else {
                y.checked_sub(k as i64)
            };
            let Some(x) = x else {
                return Err(Error::Resource("far jump overflowed the lattice range".into()));
            };
            if self.accept_far(x, rng) {
                self.counters.far_births += 1;
                Ok(Proposal::Birth(x))
            } else {
                Ok(Proposal::Rejected)
            }
        }
    }

    /// Exponential waiting time to the next proposal, in real time.
    pub fn waiting_time<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e: f64 = Exp1.sample(rng);
        e / (self.rate_bound() * self.params.rate_multiplier)
    }

    /// Advances to the next birth, applying it.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<BirthEvent> {
        loop {
            self.time += self.waiting_time(rng);
            if let Proposal::Birth(x) = self.propose(rng)? {
                self.birth(x)?;
                return Ok(BirthEvent { t: self.time, site: x });
            }
        }
    }

    /// Recomputes every stored near rate from the particle list and compares
    /// with the incremental values.
    pub fn audit(&self) -> RateAudit {
        let occupied = self.occupied();
        let k = self.k_cut as i64;
        let mut max_err: f64 = 0.0;
        let mut recomputed = 0.0;
        for c in &self.chunks {
            for i in 0..CHUNK {
                let x = c.base + i as i64;
                let lo = occupied.partition_point(|&(y, _)| y < x - k);
                let mut s = 0.0;
                for &(y, cnt) in &occupied[lo..] {
                    if y > x + k {
                        break;
                    }
                    s += cnt as f64 * self.w[(y - x).unsigned_abs() as usize];
                }
                let r = s.min(1.0);
                recomputed += r;
                max_err = max_err.max((r - c.rates.weight(i)).abs());
            }
        }
        RateAudit {
            incremental_total: self.near_rate_total(),
            recomputed_total: recomputed,
            max_site_error: max_err,
        }
    }
}

#[inline]
fn split(x: i64) -> (i64, usize) {
    (x >> CHUNK_BITS, (x & (CHUNK as i64 - 1)) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::lattice_kernel_mass;
    use crate::rng::stream;
    use proptest::prelude::*;

    #[test]
    fn initial_rate_is_kernel_mass() {
        for &alpha in &[1.25, 3.0] {
            let s = LatticeState::new(LatticeParams::new(alpha)).unwrap();
            let mass = lattice_kernel_mass(alpha).unwrap();
            // Near part plus the far proposals, which are all accepted here.
            let total = s.near_rate_total() + s.far_proposal_rate();
            assert!((total - mass).abs() < 1e-9, "alpha {alpha}: {total} vs {mass}");
            assert_eq!(s.rate_at(0), 1.0);
            assert_eq!(s.rate_at(5), 5f64.powf(-2.0 * alpha));
        }
    }

    #[test]
    fn k_cut_respects_eps_and_cap() {
        let p = LatticeParams::new(3.0);
        let k = p.k_cut();
        assert!(power_sum_from(6.0, k as u64 + 1) <= 1e-12);
        assert!(power_sum_from(6.0, k as u64) > 1e-12);
        assert_eq!(LatticeParams::new(1.25).k_cut(), 1024);
    }

    #[test]
    fn far_jumps_follow_power_law() {
        let f = FarJumps::new(2.5, 4);
        let mut rng = stream(3);
        let n = 200_000;
        let mut hist = [0u64; 4];
        for _ in 0..n {
            let k = f.sample(&mut rng).unwrap();
            assert!(k >= 5);
            if k <= 8 {
                hist[(k - 5) as usize] += 1;
            }
        }
        for (j, &h) in hist.iter().enumerate() {
            let k = (j + 5) as f64;
            let expect = k.powf(-2.5) / f.one_sided_mass;
            let got = h as f64 / n as f64;
            let se = (expect * (1.0 - expect) / n as f64).sqrt();
            assert!((got - expect).abs() < 5.0 * se, "k {k}: {got} vs {expect}");
        }
    }

    #[test]
    fn tips_only_move_outward_and_time_increases() {
        let mut s = LatticeState::new(LatticeParams::new(1.5)).unwrap();
        let mut rng = stream(1);
        let (mut l, mut r, mut t) = (0, 0, 0.0);
        for _ in 0..3000 {
            let ev = s.step(&mut rng).unwrap();
            assert!(ev.t > t);
            t = ev.t;
            assert!(s.left_tip() <= l && s.right_tip() >= r);
            l = s.left_tip();
            r = s.right_tip();
            assert!(s.count_at(ev.site) >= 1);
        }
        assert_eq!(s.n_particles(), 3001);
    }

    #[test]
    fn occupied_sites_have_unit_rate() {
        let mut s = LatticeState::new(LatticeParams::new(2.0)).unwrap();
        let mut rng = stream(8);
        for _ in 0..500 {
            s.step(&mut rng).unwrap();
        }
        for (x, _) in s.occupied() {
            assert_eq!(s.rate_at(x), 1.0);
            let (slot, off) = s.slot_of(x).unwrap();
            assert_eq!(s.chunks[slot].rates.weight(off), 1.0);
        }
    }

    #[test]
    fn resource_cap_is_reported() {
        let params = LatticeParams {
            max_sites: 4 * CHUNK,
            ..LatticeParams::new(3.0)
        };
        let mut s = LatticeState::new(params).unwrap();
        s.birth(1 << 20).unwrap();
        assert!(matches!(s.birth(1 << 24), Err(Error::Resource(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn incremental_rates_match_recomputation(seed in 0u64..1000, alpha in 0.8f64..3.5, steps in 1usize..400) {
            let params = LatticeParams { k_cut_max: 64, ..LatticeParams::new(alpha) };
            let mut s = LatticeState::new(params).unwrap();
            let mut rng = stream(seed);
            for _ in 0..steps {
                s.step(&mut rng).unwrap();
            }
            let audit = s.audit();
            prop_assert!(audit.relative_total_error() < 1e-9, "{audit:?}");
            prop_assert!(audit.max_site_error < 1e-12, "{audit:?}");
            let sum: u64 = s.occupied().iter().map(|&(_, c)| c as u64).sum();
            prop_assert_eq!(sum, s.n_particles());
        }
    }
}
