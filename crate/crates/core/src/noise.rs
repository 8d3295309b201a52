//! Seedable driving noise: Brownian paths on grids, Brownian-bridge
//! refinement, coarsening, Poisson event times and an on-demand forward
//! sampler for randomly timed schemes.
//!
//! Paths are stored as the values `W_{t_k}`; increments are differences of
//! stored values. Refinement keeps the coarse values untouched and coarsening
//! selects values, so `coarsen(refine(p)) == p` holds bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::sde::TimeGrid;

/// Identifies one independent random stream: `(master_seed, path_index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub path_index: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64, path_index: u64) -> Self {
        SeedSpec {
            master_seed,
            path_index,
        }
    }

    /// A stream for a different purpose (bridge level, jump times, ...) on the
    /// same path. Distinct tags give unrelated keys.
    pub fn substream(&self, tag: u64) -> SeedSpec {
        SeedSpec {
            master_seed: splitmix64(self.master_seed ^ splitmix64(tag.wrapping_add(0x5851_F42D_4C95_7F2D))),
            path_index: self.path_index,
        }
    }

    /// ChaCha keyed by the master seed, with the path index as stream id.
    /// The stream is a pure function of the spec.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut s = self.master_seed;
        for chunk in key.chunks_exact_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.path_index);
        rng
    }
}

/// A Brownian path sampled at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl NoisePath {
    pub fn from_values(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes().len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} grid nodes",
                values.len(),
                grid.nodes().len()
            )));
        }
        if values[0] != 0.0 {
            return Err(invalid("Brownian path must start at 0"));
        }
        Ok(NoisePath { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// `W_{t_k}` for every node.
    pub fn cumulative(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn increment(&self, k: usize) -> f64 {
        self.values[k + 1] - self.values[k]
    }

    pub fn increments(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    pub fn terminal(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

/// Independent Gaussian increments with variances equal to the grid spacings.
pub fn sample_path(grid: &TimeGrid, seed: SeedSpec) -> NoisePath {
    let mut rng = seed.rng();
    let nodes = grid.nodes();
    let mut values = Vec::with_capacity(nodes.len());
    let mut w = 0.0;
    values.push(w);
    for pair in nodes.windows(2) {
        let z: f64 = rng.sample(StandardNormal);
        w += (pair[1] - pair[0]).sqrt() * z;
        values.push(w);
    }
    NoisePath {
        grid: grid.clone(),
        values,
    }
}

/// Samples the path at the nodes of `fine` conditionally on its values at the
/// coarse nodes (Brownian bridge). Coarse values are copied unchanged.
pub fn refine_bridge(path: &NoisePath, fine: &TimeGrid, seed: SeedSpec) -> Result<NoisePath> {
    let embed = fine.embedding_of(&path.grid)?;
    let mut rng = seed.rng();
    let nodes = fine.nodes();
    let mut values = vec![0.0; nodes.len()];
    for (c, pair) in embed.windows(2).enumerate() {
        let (i0, i1) = (pair[0], pair[1]);
        let (t1, w1) = (nodes[i1], path.values[c + 1]);
        let (mut t, mut w) = (nodes[i0], path.values[c]);
        values[i0] = w;
        for j in i0 + 1..i1 {
            let u = nodes[j];
            let z: f64 = rng.sample(StandardNormal);
            w = bridge_sample(t, w, t1, w1, u, z);
            t = u;
            values[j] = w;
        }
        values[i1] = w1;
    }
    Ok(NoisePath {
        grid: fine.clone(),
        values,
    })
}

/// `W_u` given `W_s = ws`, `W_t = wt` and a standard normal draw `z`.
#[inline]
fn bridge_sample(s: f64, ws: f64, t: f64, wt: f64, u: f64, z: f64) -> f64 {
    let span = t - s;
    let mean = ws + (u - s) / span * (wt - ws);
    let var = (u - s) * (t - u) / span;
    mean + var.max(0.0).sqrt() * z
}

/// Restricts the path to the nodes of `coarse`; coarse increments are the
/// telescoped sums of the fine ones.
pub fn coarsen(path: &NoisePath, coarse: &TimeGrid) -> Result<NoisePath> {
    let embed = path.grid.embedding_of(coarse)?;
    Ok(NoisePath {
        grid: coarse.clone(),
        values: embed.iter().map(|&i| path.values[i]).collect(),
    })
}

/// Event times of a homogeneous Poisson process on `(0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpTrain {
    event_times: Vec<f64>,
    rate: f64,
}

impl JumpTrain {
    pub fn new(event_times: Vec<f64>, rate: f64, horizon: f64) -> Result<Self> {
        if event_times.windows(2).any(|w| w[0] >= w[1])
            || event_times.iter().any(|t| !(*t > 0.0 && *t <= horizon))
        {
            return Err(invalid("event times must be strictly increasing in (0, T]"));
        }
        Ok(JumpTrain { event_times, rate })
    }

    pub fn empty() -> Self {
        JumpTrain {
            event_times: Vec::new(),
            rate: 0.0,
        }
    }

    pub fn event_times(&self) -> &[f64] {
        &self.event_times
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.event_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.event_times.is_empty()
    }
}

/// Exponential inter-arrival sampling of a rate-`rate` Poisson process.
pub fn sample_jumps(rate: f64, horizon: f64, seed: SeedSpec) -> Result<JumpTrain> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(invalid(format!("jump rate must be nonnegative, got {rate}")));
    }
    if !(horizon > 0.0) {
        return Err(invalid("horizon must be positive"));
    }
    if rate == 0.0 {
        return Ok(JumpTrain::empty());
    }
    let exp = Exp::new(rate).map_err(|e| invalid(e.to_string()))?;
    let mut rng = seed.rng();
    let mut times = Vec::new();
    let mut t = 0.0;
    loop {
        let gap: f64 = rng.sample(exp);
        t += gap;
        if t > horizon {
            break;
        }
        // exponential gaps are a.s. positive; a zero draw would break strictness
        if gap > 0.0 {
            times.push(t);
        }
    }
    Ok(JumpTrain {
        event_times: times,
        rate,
    })
}

/// Serves `W` at increasing, a-priori unknown times, consistently with an
/// already sampled base path: a requested time inside a base interval is
/// bridged between the latest served point and the next base node, and a
/// time within tolerance of a base node snaps onto it.
#[derive(Debug)]
pub struct OnDemandBrownian<'a> {
    base: &'a NoisePath,
    rng: ChaCha8Rng,
    time: f64,
    value: f64,
    /// Index of the first base node strictly after `time`.
    next: usize,
    tol: f64,
}

impl<'a> OnDemandBrownian<'a> {
    pub fn new(base: &'a NoisePath, seed: SeedSpec) -> Self {
        OnDemandBrownian {
            base,
            rng: seed.rng(),
            time: 0.0,
            value: 0.0,
            next: 1,
            tol: base.grid.tolerance(),
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn horizon(&self) -> f64 {
        self.base.grid.horizon()
    }

    /// Moves to `target` (clamped to the horizon) and returns the time
    /// actually reached together with `W` there.
    pub fn advance_to(&mut self, target: f64) -> (f64, f64) {
        let nodes = self.base.grid.nodes();
        let values = &self.base.values;
        let last = nodes.len() - 1;
        let target = target.min(nodes[last]);
        // pass over base nodes strictly before the target
        while self.next < last && nodes[self.next] < target - self.tol {
            self.time = nodes[self.next];
            self.value = values[self.next];
            self.next += 1;
        }
        let right = nodes[self.next];
        if (right - target).abs() <= self.tol || target >= right {
            self.time = right;
            self.value = values[self.next];
            if self.next < last {
                self.next += 1;
            }
        } else {
            let z: f64 = self.rng.sample(StandardNormal);
            self.value = bridge_sample(self.time, self.value, right, values[self.next], target, z);
            self.time = target;
        }
        (self.time, self.value)
    }
}
