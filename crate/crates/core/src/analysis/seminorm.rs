//! Sobolev–Slobodeckij seminorm
//! `|b|_κ = (∫∫ |b(x) − b(y)|² / |x − y|^{2κ+1} dx dy)^{1/2}`
//! and the strong order `(1 + κ)/2` it predicts for Euler–Maruyama.
//!
//! The quadrature uses `n` equal cells on `[−R, R]`. `b` is represented by
//! its cell-midpoint values; a cell holding a discontinuity is split at it.
//! Off-diagonal cell pairs use the exact kernel mass of the pair, the
//! diagonal uses a first-order Taylor model of `b` inside the cell, and the
//! split cells add the exact jump contribution across the discontinuity.
//! Outside `[−R, R]`, `b` is taken to equal its limit `b(R)`.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::sde::{PiecewiseDrift, SmoothCoefficient};

/// A function that is smooth away from finitely many jumps.
pub trait PiecewiseSmooth {
    fn value(&self, x: f64) -> f64;
    fn slope(&self, x: f64) -> f64;
    /// `(position, right limit − left limit)` for every breakpoint.
    fn jumps(&self) -> Vec<(f64, f64)>;
}

impl PiecewiseSmooth for SmoothCoefficient {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn slope(&self, x: f64) -> f64 {
        self.derivative(x)
    }

    fn jumps(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }
}

impl PiecewiseSmooth for PiecewiseDrift {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn slope(&self, x: f64) -> f64 {
        self.derivative(x)
    }

    fn jumps(&self) -> Vec<(f64, f64)> {
        (0..self.breakpoints().len())
            .map(|k| {
                let (left, right) = self.one_sided_limits(k).expect("index in range");
                (self.breakpoints()[k], right - left)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeminormResult {
    pub kappa: f64,
    pub value: f64,
    pub resolution: usize,
    pub truncation: f64,
}

/// Largest admissible deviation of `b` from its limit beyond `R`.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// `(1 + κ)/2` for `κ ∈ [0, 1)`.
pub fn predicted_order(kappa: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(invalid(format!("κ must lie in [0, 1), got {kappa}")));
    }
    Ok(0.5 * (1.0 + kappa))
}

/// Second antiderivative of `t^{−1−2κ}`.
fn kernel_f(kappa: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    if kappa == 0.5 {
        -t.ln()
    } else {
        t.powf(1.0 - 2.0 * kappa) / ((-2.0 * kappa) * (1.0 - 2.0 * kappa))
    }
}

/// Second antiderivative of `t^{1−2κ}`.
fn moment_f(kappa: f64, t: f64) -> f64 {
    t.powf(3.0 - 2.0 * kappa) / ((2.0 - 2.0 * kappa) * (3.0 - 2.0 * kappa))
}

/// `∫_p^q ∫_r^s |y − x|^{−1−2κ} dy dx` for `q ≤ r` (κ < 1/2 when `q = r`).
fn pair_mass(kappa: f64, (p, q): (f64, f64), (r, s): (f64, f64)) -> f64 {
    kernel_f(kappa, s - p) - kernel_f(kappa, r - p) - kernel_f(kappa, s - q) + kernel_f(kappa, (r - q).max(0.0))
}

#[derive(Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    v: f64,
}

pub fn sobolev_seminorm<B: PiecewiseSmooth + ?Sized>(
    b: &B,
    kappa: f64,
    truncation: f64,
    resolution: usize,
) -> Result<SeminormResult> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(invalid(format!("κ must lie in (0, 1), got {kappa}")));
    }
    if !(truncation > 0.0 && truncation.is_finite()) {
        return Err(invalid(format!("truncation radius must be positive, got {truncation}")));
    }
    if resolution < 2 {
        return Err(invalid("resolution must be at least 2 cells"));
    }
    let (r, n) = (truncation, resolution);
    let limit = b.value(r);
    let tail_gap = (0..=64)
        .flat_map(|i| {
            let x = r * (1.0 + 3.0 * i as f64 / 64.0);
            [x, -x]
        })
        .map(|x| (b.value(x) - limit).abs())
        .fold(0.0, f64::max);
    if !(tail_gap <= TAIL_TOLERANCE) {
        return Err(invalid(format!(
            "b is not within {TAIL_TOLERANCE:e} of a common limit outside [−{r}, {r}] (deviation {tail_gap:e})"
        )));
    }
    let jumps: Vec<(f64, f64)> = b.jumps().into_iter().filter(|(_, j)| *j != 0.0).collect();
    if let Some((z, _)) = jumps.iter().find(|(z, _)| z.abs() >= r) {
        return Err(invalid(format!("breakpoint {z} lies outside the truncation [−{r}, {r}]")));
    }
    let result = |value: f64| SeminormResult {
        kappa,
        value,
        resolution,
        truncation,
    };
    if !jumps.is_empty() && kappa >= 0.5 {
        return Ok(result(f64::INFINITY));
    }

    let h = 2.0 * r / n as f64;
    let x: Vec<f64> = (0..n).map(|i| -r + (i as f64 + 0.5) * h).collect();
    let v: Vec<f64> = x.iter().map(|&x| b.value(x) - limit).collect();

    let mut total = 0.0;
    for d in 1..n {
        let w = if d == 1 && kappa >= 0.5 {
            // adjacent cells of a smooth b: Taylor model instead of the
            // non-integrable piecewise-constant mass
            let slope = |i: usize| (v[i + 1] - v[i]) / h;
            let s: f64 = (0..n - 1).map(|i| slope(i).powi(2)).sum();
            total += 2.0 * s * (moment_f(kappa, 2.0 * h) - 2.0 * moment_f(kappa, h));
            continue;
        } else {
            let dh = d as f64 * h;
            kernel_f(kappa, dh + h) - 2.0 * kernel_f(kappa, dh) + kernel_f(kappa, dh - h)
        };
        let s: f64 = v[..n - d].iter().zip(&v[d..]).map(|(a, c)| (a - c).powi(2)).sum();
        total += 2.0 * w * s;
    }

    let diagonal = 2.0 * moment_f(kappa, h);
    total += diagonal * x.iter().map(|&x| b.slope(x).powi(2)).sum::<f64>();

    // Cells split by a discontinuity.
    let mut split: Vec<(usize, Vec<Segment>)> = Vec::new();
    for &(z, _) in &jumps {
        let pos = (z + r) / h;
        let i = (pos.floor() as usize).min(n - 1);
        let (lo, hi) = (-r + i as f64 * h, -r + (i + 1) as f64 * h);
        if z - lo <= 1e-12 * h || hi - z <= 1e-12 * h {
            continue;
        }
        if let Some((_, segs)) = split.iter_mut().find(|(j, _)| *j == i) {
            let last = segs.pop().expect("split cell has segments");
            segs.push(Segment {
                lo: last.lo,
                hi: z,
                v: b.value(0.5 * (last.lo + z)) - limit,
            });
            segs.push(Segment {
                lo: z,
                hi: last.hi,
                v: b.value(0.5 * (z + last.hi)) - limit,
            });
        } else {
            split.push((
                i,
                vec![
                    Segment {
                        lo,
                        hi: z,
                        v: b.value(0.5 * (lo + z)) - limit,
                    },
                    Segment {
                        lo: z,
                        hi,
                        v: b.value(0.5 * (z + hi)) - limit,
                    },
                ],
            ));
        }
    }
    let split_at = |j: usize| split.iter().position(|(i, _)| *i == j);
    for (a, (i, segs)) in split.iter().enumerate() {
        for w in 0..segs.len() {
            for u in w + 1..segs.len() {
                let m = pair_mass(kappa, (segs[w].lo, segs[w].hi), (segs[u].lo, segs[u].hi));
                total += 2.0 * m * (segs[w].v - segs[u].v).powi(2);
            }
        }
        for j in 0..n {
            if j == *i || split_at(j).is_some_and(|b| b < a) {
                continue;
            }
            let other: Vec<Segment> = match split_at(j) {
                Some(b) => split[b].1.clone(),
                None => vec![Segment {
                    lo: -r + j as f64 * h,
                    hi: -r + (j + 1) as f64 * h,
                    v: v[j],
                }],
            };
            let d = i.abs_diff(j) as f64 * h;
            let approx = kernel_f(kappa, d + h) - 2.0 * kernel_f(kappa, d) + kernel_f(kappa, d - h);
            let mut exact = 0.0;
            for s in segs {
                for o in &other {
                    let m = if s.hi <= o.lo + 1e-15 {
                        pair_mass(kappa, (s.lo, s.hi), (o.lo, o.hi))
                    } else {
                        pair_mass(kappa, (o.lo, o.hi), (s.lo, s.hi))
                    };
                    exact += m * (s.v - o.v).powi(2);
                }
            }
            total += 2.0 * (exact - approx * (v[*i] - v[j]).powi(2));
        }
    }

    // Pairs with one point outside [−R, R], where b equals its limit.
    let tail: f64 = x
        .iter()
        .zip(&v)
        .map(|(&x, &v)| v * v * h * ((r - x).powf(-2.0 * kappa) + (r + x).powf(-2.0 * kappa)) / (2.0 * kappa))
        .sum();
    total += 2.0 * tail;

    Ok(result(total.max(0.0).sqrt()))
}
