//! Importance-sampled Monte Carlo estimator.
//!
//! A sample draws an anchor point uniformly in the support box, a direction
//! uniformly in the direction set and a radius from a density matched to
//! the radial singularity: `r = c U^{1/(1−s)}` on the near side and
//! `r = c U^{-1/s}` on the far side. The anchor serves as `x` for region A
//! and as `y` for region B.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Directions, ModularResult, Problem};
use crate::error::Result;
use crate::exec::map_indexed;

const BLOCK: usize = 4096;

/// Running mean and centered second moment.
#[derive(Debug, Clone, Copy, Default)]
struct Stats {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Stats {
    fn push(&mut self, v: f64) {
        self.count += 1.0;
        let d = v - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, o: Stats) -> Stats {
        if o.count == 0.0 {
            return self;
        }
        if self.count == 0.0 {
            return o;
        }
        let count = self.count + o.count;
        let d = o.mean - self.mean;
        Stats {
            count,
            mean: self.mean + d * o.count / count,
            m2: self.m2 + o.m2 + d * d * self.count * o.count / count,
        }
    }

    /// Variance of the mean.
    fn var_of_mean(&self) -> f64 {
        if self.count < 2.0 {
            0.0
        } else {
            self.m2 / (self.count - 1.0) / self.count
        }
    }
}

pub(super) fn evaluate(p: &Problem<'_>, samples: usize) -> Result<ModularResult> {
    let n = p.n();
    let bbox = p.u.bbox().clone();
    let measure = bbox.volume() * p.direction_measure()?;
    let s = p.s;
    let oms = 1.0 - s;
    let c = p.plan.far_cutoff;
    let ln_c = c.ln();
    let c_pow = c.powf(oms);
    let blocks = samples.div_ceil(BLOCK);

    let per_block = map_indexed(p.plan.exec, blocks, |b| {
        let count = BLOCK.min(samples - b * BLOCK);
        let near_count = count * 3 / 4;
        let mut rng = ChaCha8Rng::seed_from_u64(p.plan.seed);
        rng.set_stream(b as u64);
        let mut near = Stats::default();
        let mut far = Stats::default();
        let mut x = [0.0; 3];
        for j in 0..count {
            for i in 0..n {
                x[i] = bbox.lo[i] + (bbox.hi[i] - bbox.lo[i]) * rng.random::<f64>();
            }
            let w = direction(&mut rng, n, p.dirs);
            let (x, w) = (&x[..n], &w[..n]);
            let uniform = 1.0 - rng.random::<f64>();
            let ux = p.amp * p.u.value(x).abs();
            let exit = if ux > 0.0 { p.u.bbox().exit_distance(x, w) } else { f64::INFINITY };
            if j < near_count {
                let lnr = ln_c + uniform.ln() / oms;
                let r = if lnr < -700.0 { 0.0 } else { lnr.exp() };
                let mut v = p.phi_near(x, w, r, c_pow * uniform);
                if r > exit {
                    v += p.phi_b(x, w, r, ux);
                }
                near.push(v / uniform);
            } else {
                let r = c * (-uniform.ln() / s).exp();
                let mut v = p.phi_a(x, w, r);
                if r > exit {
                    v += p.phi_b(x, w, r, ux);
                }
                far.push(v / (s * uniform));
            }
        }
        (near, far)
    });
    let (near, far) = per_block
        .into_iter()
        .fold((Stats::default(), Stats::default()), |(a, b), (c, d)| (a.merge(c), b.merge(d)));

    let scaled_value = measure * (near.mean + oms * far.mean);
    let scaled_err = measure * (near.var_of_mean() + oms * oms * far.var_of_mean()).sqrt();
    let near_field = measure * near.mean / oms;
    let far_field = measure * far.mean;
    Ok(ModularResult {
        value: near_field + far_field,
        near_field,
        far_field,
        scaled_value,
        tail_bound: 0.0,
        scaled_tail_bound: 0.0,
        far_bound: 0.0,
        mc_stderr: Some(scaled_err / oms),
        scaled_stderr: Some(scaled_err),
    })
}

fn direction<R: Rng>(rng: &mut R, n: usize, dirs: Directions) -> [f64; 3] {
    let mut w = [0.0; 3];
    match dirs {
        Directions::Axis(k) => {
            w[k] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        }
        Directions::Sphere => match n {
            1 => w[0] = if rng.random::<bool>() { 1.0 } else { -1.0 },
            2 => {
                let th = 2.0 * PI * rng.random::<f64>();
                w[0] = th.cos();
                w[1] = th.sin();
            }
            _ => {
                let z = 2.0 * rng.random::<f64>() - 1.0;
                let ph = 2.0 * PI * rng.random::<f64>();
                let rho = (1.0 - z * z).max(0.0).sqrt();
                w = [rho * ph.cos(), rho * ph.sin(), z];
            }
        },
    }
    w
}
