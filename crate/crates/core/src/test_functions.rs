//! Compactly supported test functions with exact gradients.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::Aabb;

/// Radius used by the bank; chosen above 1 so the support sits inside B_R(0)
/// with R > 1.
pub const DEFAULT_RADIUS: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `(1 − |S(x − c)|²/R²)³₊` with `S = diag(scales)`.
    PolyBump { center: [f64; 3], scales: [f64; 3], radius: f64 },
    /// `∏ cos²(π (x_i − c_i) / (2 h_i))` on the box `|x_i − c_i| ≤ h_i`.
    CosBump { center: [f64; 3], half: [f64; 3] },
    /// `(1 − |x − c|/R)₊`; Lipschitz only.
    Tent { center: [f64; 3], radius: f64 },
    Zero { radius: f64 },
}

/// Up to two positive distances at which a ray crosses the support boundary.
#[derive(Debug, Clone, Copy, Default)]
pub struct Crossings {
    vals: [f64; 2],
    len: usize,
}

impl Crossings {
    fn push(&mut self, r: f64) {
        if r > 0.0 && r.is_finite() && self.len < 2 {
            self.vals[self.len] = r;
            self.len += 1;
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.vals[..self.len]
    }

    pub fn last(&self) -> Option<f64> {
        self.as_slice().last().copied()
    }
}

#[derive(Debug, Clone)]
pub struct TestFunction {
    pub id: String,
    pub dim: usize,
    pub shape: Shape,
    /// Radius of a ball about the origin containing the support.
    pub support_radius: f64,
    pub sup_u: f64,
    /// Upper bound on `‖∇u‖_∞`.
    pub sup_grad: f64,
    /// Upper bound on the second derivatives.
    pub c2_bound: f64,
    /// True for C² (or C^{1,1}) members; false for the Lipschitz controls.
    pub smooth: bool,
    bbox: Aabb,
}

impl TestFunction {
    pub fn new(id: &str, dim: usize, shape: Shape) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let (lo, hi): (Vec<f64>, Vec<f64>) = match &shape {
            Shape::PolyBump { center, scales, radius } => (0..dim)
                .map(|i| (center[i] - radius / scales[i], center[i] + radius / scales[i]))
                .unzip(),
            Shape::CosBump { center, half } => (0..dim)
                .map(|i| (center[i] - half[i], center[i] + half[i]))
                .unzip(),
            Shape::Tent { center, radius } => (0..dim)
                .map(|i| (center[i] - radius, center[i] + radius))
                .unzip(),
            Shape::Zero { radius } => (0..dim).map(|_| (-radius, *radius)).unzip(),
        };
        let bbox = Aabb::new(lo, hi);
        let support_radius = (0..dim)
            .map(|i| bbox.lo[i].abs().max(bbox.hi[i].abs()).powi(2))
            .sum::<f64>()
            .sqrt();
        let (sup_u, sup_grad, c2_bound, smooth) = match &shape {
            Shape::PolyBump { scales, radius, .. } => {
                let smax = scales[..dim].iter().cloned().fold(0.0, f64::max);
                // max of 6ρ(1−ρ²)² on [0,1] is attained at ρ = 1/√5
                let g = 6.0 / 5f64.sqrt() * 0.64 * smax / radius;
                (1.0, g, 6.0 * smax * smax / (radius * radius), true)
            }
            Shape::CosBump { half, .. } => {
                let g = (0..dim)
                    .map(|i| (PI / (2.0 * half[i])).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let hmin = half[..dim].iter().cloned().fold(f64::INFINITY, f64::min);
                (1.0, g, dim as f64 * PI * PI / (2.0 * hmin * hmin), true)
            }
            Shape::Tent { radius, .. } => (1.0, 1.0 / radius, f64::INFINITY, false),
            Shape::Zero { .. } => (0.0, 0.0, 0.0, true),
        };
        Ok(Self {
            id: id.to_string(),
            dim,
            shape,
            support_radius,
            sup_u,
            sup_grad,
            c2_bound,
            smooth,
            bbox,
        })
    }

    /// Box containing the support.
    pub fn bbox(&self) -> &Aabb {
        &self.bbox
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.shape, Shape::Zero { .. })
    }

    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        let n = self.dim;
        match &self.shape {
            Shape::PolyBump { center, scales, radius } => {
                let rho2 = scaled_r2(x, center, scales, n) / (radius * radius);
                if rho2 >= 1.0 {
                    0.0
                } else {
                    let v = 1.0 - rho2;
                    v * v * v
                }
            }
            Shape::CosBump { center, half } => {
                let mut prod = 1.0;
                for i in 0..n {
                    let z = x[i] - center[i];
                    if z.abs() >= half[i] {
                        return 0.0;
                    }
                    let c = (PI * z / (2.0 * half[i])).cos();
                    prod *= c * c;
                }
                prod
            }
            Shape::Tent { center, radius } => {
                let d = dist(x, center, n);
                (1.0 - d / radius).max(0.0)
            }
            Shape::Zero { .. } => 0.0,
        }
    }

    /// Exact gradient, written into the first n entries of the result.
    #[inline]
    pub fn gradient(&self, x: &[f64]) -> [f64; 3] {
        let n = self.dim;
        let mut g = [0.0; 3];
        match &self.shape {
            Shape::PolyBump { center, scales, radius } => {
                let r2 = radius * radius;
                let rho2 = scaled_r2(x, center, scales, n) / r2;
                if rho2 < 1.0 {
                    let v = 1.0 - rho2;
                    let f = -6.0 * v * v / r2;
                    for i in 0..n {
                        g[i] = f * scales[i] * scales[i] * (x[i] - center[i]);
                    }
                }
            }
            Shape::CosBump { center, half } => {
                let mut c2 = [1.0; 3];
                let mut ds = [0.0; 3];
                for i in 0..n {
                    let z = x[i] - center[i];
                    if z.abs() >= half[i] {
                        return g;
                    }
                    let a = PI / (2.0 * half[i]);
                    let c = (a * z).cos();
                    c2[i] = c * c;
                    ds[i] = -a * (2.0 * a * z).sin();
                }
                for i in 0..n {
                    let mut v = ds[i];
                    for j in 0..n {
                        if j != i {
                            v *= c2[j];
                        }
                    }
                    g[i] = v;
                }
            }
            Shape::Tent { center, radius } => {
                let d = dist(x, center, n);
                if d < *radius && d > 0.0 {
                    for i in 0..n {
                        g[i] = -(x[i] - center[i]) / (radius * d);
                    }
                }
            }
            Shape::Zero { .. } => {}
        }
        g
    }

    pub fn grad_norm(&self, x: &[f64]) -> f64 {
        let g = self.gradient(x);
        g[..self.dim].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `(u(x) − u(x − r w)) / r`. For tiny r the midpoint gradient
    /// `∇u(x − r w/2)·w` is used instead, which is second-order accurate and
    /// free of cancellation.
    #[inline]
    pub fn diff_quotient(&self, x: &[f64], w: &[f64], r: f64) -> f64 {
        let n = self.dim;
        let mut y = [0.0; 3];
        if r < 1e-5 {
            for i in 0..n {
                y[i] = x[i] - 0.5 * r * w[i];
            }
            let g = self.gradient(&y[..n]);
            return (0..n).map(|i| g[i] * w[i]).sum();
        }
        for i in 0..n {
            y[i] = x[i] - r * w[i];
        }
        (self.value(x) - self.value(&y[..n])) / r
    }

    /// Positive distances at which `p + r·dir` crosses the boundary of the
    /// support, sorted.
    pub fn crossings(&self, p: &[f64], dir: &[f64]) -> Crossings {
        let n = self.dim;
        let mut out = Crossings::default();
        match &self.shape {
            Shape::PolyBump { center, scales, radius } => {
                ellipsoid_hits(p, dir, center, scales, *radius, n, &mut out);
            }
            Shape::Tent { center, radius } => {
                ellipsoid_hits(p, dir, center, &[1.0; 3], *radius, n, &mut out);
            }
            Shape::CosBump { .. } => {
                let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
                for i in 0..n {
                    if dir[i] != 0.0 {
                        let a = (self.bbox.lo[i] - p[i]) / dir[i];
                        let b = (self.bbox.hi[i] - p[i]) / dir[i];
                        t0 = t0.max(a.min(b));
                        t1 = t1.min(a.max(b));
                    } else if p[i] < self.bbox.lo[i] || p[i] > self.bbox.hi[i] {
                        return out;
                    }
                }
                if t0 < t1 {
                    out.push(t0);
                    out.push(t1);
                }
            }
            Shape::Zero { .. } => {}
        }
        out
    }
}

fn scaled_r2(x: &[f64], c: &[f64; 3], s: &[f64; 3], n: usize) -> f64 {
    (0..n).map(|i| (s[i] * (x[i] - c[i])).powi(2)).sum()
}

fn dist(x: &[f64], c: &[f64; 3], n: usize) -> f64 {
    (0..n).map(|i| (x[i] - c[i]).powi(2)).sum::<f64>().sqrt()
}

fn ellipsoid_hits(
    p: &[f64],
    d: &[f64],
    c: &[f64; 3],
    s: &[f64; 3],
    radius: f64,
    n: usize,
    out: &mut Crossings,
) {
    let (mut a, mut b, mut cc) = (0.0, 0.0, -radius * radius);
    for i in 0..n {
        let q = s[i] * (p[i] - c[i]);
        let e = s[i] * d[i];
        a += e * e;
        b += 2.0 * q * e;
        cc += q * q;
    }
    if a == 0.0 {
        return;
    }
    let disc = b * b - 4.0 * a * cc;
    if disc <= 0.0 {
        return;
    }
    let sq = disc.sqrt();
    // numerically stable roots
    let qv = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
    let (mut r0, mut r1) = if qv != 0.0 { (qv / a, cc / qv) } else { (0.0, 0.0) };
    if r0 > r1 {
        std::mem::swap(&mut r0, &mut r1);
    }
    out.push(r0);
    out.push(r1);
}

/// The bank of test functions in dimension n.
pub fn bank(n: usize) -> Result<Vec<TestFunction>> {
    if !(1..=3).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    ["polybump", "cosbump", "polybump-shift", "polybump-aniso", "cosbump-aniso", "tent", "zero"]
        .iter()
        .map(|id| by_id(id, n))
        .collect()
}

/// Look up a bank member by its string identifier.
pub fn by_id(id: &str, n: usize) -> Result<TestFunction> {
    let r = DEFAULT_RADIUS;
    let shape = match id {
        "polybump" => Shape::PolyBump { center: [0.0; 3], scales: [1.0; 3], radius: r },
        "polybump-shift" => Shape::PolyBump {
            center: [0.25, -0.1, 0.15],
            scales: [1.0; 3],
            radius: r,
        },
        "polybump-aniso" => Shape::PolyBump {
            center: [0.0; 3],
            scales: [1.25, 1.0, 1.5],
            radius: r,
        },
        "cosbump" => Shape::CosBump { center: [0.0; 3], half: [r; 3] },
        "cosbump-aniso" => Shape::CosBump { center: [0.0; 3], half: [r, 1.2, 1.0] },
        "tent" => Shape::Tent { center: [0.0; 3], radius: 1.0 },
        "zero" => Shape::Zero { radius: r },
        _ => return Err(Error::Config(format!("unknown test function '{id}'"))),
    };
    TestFunction::new(id, n, shape)
}

/// Largest Euclidean deviation between the exact gradient and central
/// differences with step `h` over `points`.
pub fn finite_difference_check(u: &TestFunction, points: &[[f64; 3]], h: f64) -> f64 {
    let n = u.dim;
    let mut worst: f64 = 0.0;
    for p in points {
        let g = u.gradient(&p[..n]);
        let mut dev2 = 0.0;
        for i in 0..n {
            let mut a = *p;
            let mut b = *p;
            a[i] += h;
            b[i] -= h;
            let fd = (u.value(&a[..n]) - u.value(&b[..n])) / (2.0 * h);
            dev2 += (fd - g[i]).powi(2);
        }
        worst = worst.max(dev2.sqrt());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn interior_points(u: &TestFunction, count: usize, seed: u64) -> Vec<[f64; 3]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = u.bbox().clone();
        let mut pts = Vec::new();
        while pts.len() < count {
            let mut p = [0.0; 3];
            for i in 0..u.dim {
                p[i] = rng.random_range(b.lo[i]..b.hi[i]);
            }
            if u.value(&p[..u.dim]) > 1e-3 {
                pts.push(p);
            }
        }
        pts
    }

    #[test]
    fn polybump_at_origin() {
        let u = by_id("polybump", 2).unwrap();
        assert_eq!(u.value(&[0.0, 0.0]), 1.0);
        assert_eq!(u.gradient(&[0.0, 0.0]), [0.0; 3]);
    }

    #[test]
    fn smooth_members_pass_finite_differences() {
        for n in 1..=3 {
            for u in bank(n).unwrap().iter().filter(|u| u.smooth && !u.is_zero()) {
                let pts = interior_points(u, 100, 11);
                let dev = finite_difference_check(u, &pts, 1e-5);
                assert!(dev <= 1e-6, "{} n={n}: {dev}", u.id);
            }
        }
        let z = by_id("zero", 2).unwrap();
        assert_eq!(finite_difference_check(&z, &[[0.1, 0.2, 0.0]], 1e-5), 0.0);
    }

    #[test]
    fn tent_fails_at_its_kink() {
        let u = by_id("tent", 1).unwrap();
        assert!(!u.smooth);
        let dev = finite_difference_check(&u, &[[1e-6, 0.0, 0.0]], 1e-5);
        assert!(dev > 0.5);
    }

    #[test]
    fn support_and_sup_metadata() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3 {
            for u in bank(n).unwrap() {
                let b = u.bbox().clone();
                for _ in 0..10_000 {
                    let mut p = [0.0; 3];
                    for i in 0..n {
                        p[i] = rng.random_range(-4.0..4.0);
                    }
                    let v = u.value(&p[..n]);
                    assert!(v.abs() <= u.sup_u + 1e-15);
                    assert!(u.grad_norm(&p[..n]) <= u.sup_grad + 1e-12, "{}", u.id);
                    if !b.contains(&p[..n]) {
                        assert_eq!(v, 0.0);
                        assert_eq!(u.gradient(&p[..n]), [0.0; 3]);
                    }
                }
            }
        }
    }

    #[test]
    fn cosbump_energy_reference() {
        // ∫ u'² for cos²(πx/(2R)) on [-R, R] equals π²/(4R)
        let u = by_id("cosbump", 1).unwrap();
        let gl = GaussLegendre::new(20);
        let h = 2.0 * DEFAULT_RADIUS / 64.0;
        let v: f64 = (0..64)
            .map(|k| {
                let a = -DEFAULT_RADIUS + h * k as f64;
                gl.integrate(a, a + h, |x| u.gradient(&[x])[0].powi(2))
            })
            .sum();
        assert!((v - PI * PI / (4.0 * DEFAULT_RADIUS)).abs() < 1e-12);
    }

    #[test]
    fn diff_quotient_is_continuous_across_switch() {
        let u = by_id("polybump-aniso", 2).unwrap();
        let x = [0.3, -0.2];
        let w = [0.6, 0.8];
        let a = u.diff_quotient(&x, &w, 1.0001e-5);
        let b = u.diff_quotient(&x, &w, 0.9999e-5);
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn crossings_hit_the_boundary() {
        for id in ["polybump", "polybump-aniso", "cosbump", "tent"] {
            let u = by_id(id, 2).unwrap();
            let p = [0.1, 0.2];
            let d = [0.8, -0.6];
            let c = u.crossings(&p, &d);
            assert_eq!(c.as_slice().len(), 1, "{id}");
            let r = c.last().unwrap();
            let inside = [p[0] + (r - 1e-9) * d[0], p[1] + (r - 1e-9) * d[1]];
            let outside = [p[0] + (r + 1e-9) * d[0], p[1] + (r + 1e-9) * d[1]];
            assert_eq!(u.value(&outside), 0.0);
            if id != "tent" {
                assert!(u.value(&inside) < 1e-12);
            } else {
                assert!(u.value(&inside) > 0.0);
            }
        }
    }
}
