//! Quadrature on the unit sphere S^{n-1} and the moments
//! `K_{n,κ} = (1/κ) ∫ |w_n|^κ dS` and `K_{log,n,p} = (1/p) ∫ |w_n|^p log|w_n| dS`.

use std::f64::consts::PI;

use statrs::function::gamma::{digamma, gamma};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Nodes on S^{n-1} (stored padded to three coordinates) with positive weights.
#[derive(Debug, Clone)]
pub struct SphereRule {
    dim: usize,
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl SphereRule {
    /// * n = 1: the two points ±1, unit weights.
    /// * n = 2: `order` equispaced angles (offset by half a step), weights 2π/order.
    /// * n = 3: Gauss-Legendre in the polar cosine on each of [-1, 0] and
    ///   [0, 1] (`order` points each) times `2·order` equispaced azimuths.
    pub fn new(n: usize, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::Domain("sphere rule order must be positive".into()));
        }
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match n {
            1 => {
                nodes.push([-1.0, 0.0, 0.0]);
                nodes.push([1.0, 0.0, 0.0]);
                weights.extend([1.0, 1.0]);
            }
            2 => {
                let h = 2.0 * PI / order as f64;
                for j in 0..order {
                    let th = h * (j as f64 + 0.5);
                    nodes.push([th.cos(), th.sin(), 0.0]);
                    weights.push(h);
                }
            }
            3 => {
                let gl = GaussLegendre::new(order);
                let naz = 2 * order;
                let h = 2.0 * PI / naz as f64;
                for (a, b) in [(-1.0, 0.0), (0.0, 1.0)] {
                    for (z, wz) in gl.mapped(a, b) {
                        let rho = (1.0 - z * z).max(0.0).sqrt();
                        for k in 0..naz {
                            let ph = h * (k as f64 + 0.5);
                            nodes.push([rho * ph.cos(), rho * ph.sin(), z]);
                            weights.push(wz * h);
                        }
                    }
                }
            }
            _ => return Err(Error::UnsupportedDimension(n)),
        }
        Ok(Self { dim: n, nodes, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterator over `(w, weight)` with `w` truncated to n coordinates.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(w, &q)| (&w[..self.dim], q))
    }

    /// Last coordinate of each node.
    pub fn last_coordinate(&self, i: usize) -> f64 {
        self.nodes[i][self.dim - 1]
    }

    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(w, q)| q * f(w)).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn sphere_rule(n: usize, order: usize) -> Result<SphereRule> {
    SphereRule::new(n, order)
}

/// `nω_n`, the (n-1)-dimensional measure of the unit sphere in ℝⁿ.
pub fn surface_measure(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let nf = n as f64;
    let omega = PI.powf(nf / 2.0) / gamma(nf / 2.0 + 1.0);
    Ok(nf * omega)
}

/// `K_{n,κ}` by quadrature with `rule`.
pub fn moment_k(kappa: f64, rule: &SphereRule) -> Result<f64> {
    if kappa <= 0.0 {
        return Err(Error::Domain(format!("moment order must be positive, got {kappa}")));
    }
    let n = rule.dim();
    let s = rule.integrate(|w| w[n - 1].abs().powf(kappa));
    Ok(s / kappa)
}

/// Closed form `(1/κ)·2π^{(n-1)/2} Γ((κ+1)/2) / Γ((n+κ)/2)`.
pub fn moment_k_exact(n: usize, kappa: f64) -> Result<f64> {
    if kappa <= 0.0 {
        return Err(Error::Domain(format!("moment order must be positive, got {kappa}")));
    }
    Ok(abs_moment(n, kappa) / kappa)
}

fn abs_moment(n: usize, kappa: f64) -> f64 {
    let nf = n as f64;
    2.0 * PI.powf((nf - 1.0) / 2.0) * gamma((kappa + 1.0) / 2.0) / gamma((nf + kappa) / 2.0)
}

/// `K_{log,n,p}` by quadrature. Nodes with `|w_n| < 1e-300` contribute zero
/// (the integrand extends continuously by 0 there).
pub fn moment_klog(p: f64, rule: &SphereRule) -> Result<f64> {
    if p <= 0.0 {
        return Err(Error::Domain(format!("moment order must be positive, got {p}")));
    }
    let n = rule.dim();
    let s = rule.integrate(|w| {
        let a = w[n - 1].abs();
        if a < 1e-300 {
            0.0
        } else {
            a.powf(p) * a.ln()
        }
    });
    Ok(s / p)
}

/// Closed form obtained by differentiating the Gamma expression in κ:
/// `∫|w_n|^p log|w_n| dS = M(p)·½(ψ((p+1)/2) − ψ((n+p)/2))`.
pub fn moment_klog_exact(n: usize, p: f64) -> Result<f64> {
    if p <= 0.0 {
        return Err(Error::Domain(format!("moment order must be positive, got {p}")));
    }
    let nf = n as f64;
    let m = abs_moment(n, p);
    Ok(m * 0.5 * (digamma((p + 1.0) / 2.0) - digamma((nf + p) / 2.0)) / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_measures() {
        assert!((surface_measure(1).unwrap() - 2.0).abs() < 1e-14);
        assert!((surface_measure(2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((surface_measure(3).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!(surface_measure(0).is_err());
    }

    #[test]
    fn rules_have_unit_nodes_and_total_measure() {
        for (n, order) in [(1, 1), (2, 64), (3, 16)] {
            let r = sphere_rule(n, order).unwrap();
            for (w, _) in r.iter() {
                let norm: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
            }
            let total = surface_measure(n).unwrap();
            assert!((r.total_weight() - total).abs() < 1e-10 * total);
        }
        assert!(sphere_rule(4, 8).is_err());
    }

    #[test]
    fn s0_rule_is_two_points() {
        let r = sphere_rule(1, 5).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.total_weight(), 2.0);
    }

    #[test]
    fn s2_rule_integrates_second_moment() {
        let r = sphere_rule(3, 32).unwrap();
        let v = r.integrate(|w| w[2] * w[2]);
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn odd_moments_vanish() {
        for (n, order) in [(1, 1), (2, 64), (3, 16)] {
            let r = sphere_rule(n, order).unwrap();
            for k in [1, 3, 5] {
                let v = r.integrate(|w| w[n - 1].powi(k));
                assert!(v.abs() < 1e-12, "n={n} k={k}: {v}");
            }
        }
    }

    #[test]
    fn moment_examples() {
        let s0 = sphere_rule(1, 1).unwrap();
        assert!((moment_k(2.0, &s0).unwrap() - 1.0).abs() < 1e-15);
        for p in [1.5, 2.0, 3.3] {
            assert!((moment_k(p, &s0).unwrap() - 2.0 / p).abs() < 1e-15);
            assert_eq!(moment_klog(p, &s0).unwrap(), 0.0);
        }
        let s1 = sphere_rule(2, 64).unwrap();
        assert!((moment_k(2.0, &s1).unwrap() - PI / 2.0).abs() < 1e-13);
        assert!(moment_k(0.0, &s1).is_err());
    }

    #[test]
    fn klog_matches_brute_force_and_is_negative() {
        // (1/2) ∫₀^{2π} cos²θ log|cosθ| dθ by a fine midpoint rule
        let m = 2_000_000;
        let h = 2.0 * PI / m as f64;
        let brute: f64 = (0..m)
            .map(|j| {
                let c = (h * (j as f64 + 0.5)).cos().abs();
                c * c * c.ln() * h
            })
            .sum::<f64>()
            / 2.0;
        let rule = sphere_rule(2, 4096).unwrap();
        let q = moment_klog(2.0, &rule).unwrap();
        assert!(q < 0.0);
        assert!((q - brute).abs() < 1e-8, "{q} vs {brute}");
        assert!((moment_klog_exact(2, 2.0).unwrap() - brute).abs() < 1e-8);
    }

    #[test]
    fn moment_rule_matches_gamma_closed_form() {
        for kappa in [1.5, 2.0, 3.0, 4.7] {
            for (n, order) in [(1, 1), (2, 8192), (3, 256)] {
                let r = sphere_rule(n, order).unwrap();
                let q = moment_k(kappa, &r).unwrap();
                let e = moment_k_exact(n, kappa).unwrap();
                assert!((q - e).abs() <= 1e-8 * e, "n={n} kappa={kappa}: {q} vs {e}");
            }
        }
    }

    #[test]
    fn scaled_moment_decreases_in_kappa() {
        for n in 1..=3 {
            let mut prev = f64::INFINITY;
            for k in 0..20 {
                let kappa = 1.0 + 0.25 * k as f64;
                let v = moment_k_exact(n, kappa).unwrap() * kappa;
                assert!(v <= prev + 1e-15);
                prev = v;
            }
        }
    }
}
