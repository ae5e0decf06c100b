//! Gauss-Legendre rules, composite panels and a fixed-order pairwise sum.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the Legendre recurrence, started from the
    /// Chebyshev-like asymptotic guess.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let m = order.div_ceil(2);
        let nf = order as f64;
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[order - 1 - i] = z;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[m - 1] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Sum in a balanced binary tree. The order is a function of the length only.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Split `[a, b]` at the sorted interior `breaks` and return the subintervals.
pub(crate) fn split_at_breaks(a: f64, b: f64, breaks: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(breaks.len() + 1);
    let mut lo = a;
    for &c in breaks {
        if c > lo && c < b {
            out.push((lo, c));
            lo = c;
        }
    }
    out.push((lo, b));
    out
}

/// Axis-aligned box in up to three dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Aabb {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Aabb {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        Self { lo, hi }
    }

    pub fn cube(center: &[f64], half: f64) -> Self {
        Self {
            lo: center.iter().map(|c| c - half).collect(),
            hi: center.iter().map(|c| c + half).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| *x >= *l && *x <= *h)
    }

    /// Distance along `p + r·dir`, r ≥ 0, at which the ray leaves the box.
    /// Assumes `p` is inside.
    pub fn exit_distance(&self, p: &[f64], dir: &[f64]) -> f64 {
        let mut t = f64::INFINITY;
        for i in 0..self.dim() {
            let d = dir[i];
            if d > 0.0 {
                t = t.min((self.hi[i] - p[i]) / d);
            } else if d < 0.0 {
                t = t.min((self.lo[i] - p[i]) / d);
            }
        }
        t.max(0.0)
    }
}

/// Tensor-product composite Gauss-Legendre nodes over a box.
/// Points are returned padded to three coordinates.
pub fn tensor_nodes(domain: &Aabb, panels: usize, gl: &GaussLegendre) -> Vec<([f64; 3], f64)> {
    let n = domain.dim();
    let axes: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|i| {
            let h = (domain.hi[i] - domain.lo[i]) / panels as f64;
            (0..panels)
                .flat_map(|k| {
                    let a = domain.lo[i] + h * k as f64;
                    gl.mapped(a, a + h).collect::<Vec<_>>()
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    match n {
        1 => {
            for &(x, w) in &axes[0] {
                out.push(([x, 0.0, 0.0], w));
            }
        }
        2 => {
            for &(x, wx) in &axes[0] {
                for &(y, wy) in &axes[1] {
                    out.push(([x, y, 0.0], wx * wy));
                }
            }
        }
        3 => {
            for &(x, wx) in &axes[0] {
                for &(y, wy) in &axes[1] {
                    for &(z, wz) in &axes[2] {
                        out.push(([x, y, z], wx * wy * wz));
                    }
                }
            }
        }
        _ => panic!("tensor_nodes supports dimensions 1..=3"),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for order in [1usize, 2, 5, 8, 16, 33] {
            let gl = GaussLegendre::new(order);
            let deg = 2 * order - 1;
            let v = gl.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "order {order}");
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 4950.0);
    }

    #[test]
    fn box_exit_distance() {
        let b = Aabb::cube(&[0.0, 0.0], 1.0);
        assert!((b.exit_distance(&[0.0, 0.0], &[1.0, 0.0]) - 1.0).abs() < 1e-15);
        let d = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b.exit_distance(&[0.5, 0.0], &[d, d]) - 0.5 / d).abs() < 1e-14);
    }

    #[test]
    fn tensor_nodes_volume() {
        let b = Aabb::new(vec![-1.0, 0.0], vec![2.0, 0.5]);
        let gl = GaussLegendre::new(4);
        let w: f64 = tensor_nodes(&b, 3, &gl).iter().map(|(_, w)| w).sum();
        assert!((w - 1.5).abs() < 1e-13);
    }
}
