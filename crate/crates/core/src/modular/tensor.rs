//! Deterministic tensor-product estimator.

use super::{Directions, ModularResult, Problem};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::quadrature::{pairwise_sum, split_at_breaks, tensor_nodes, GaussLegendre};
use crate::sphere::SphereRule;

/// Log-r panel widths start here near the cutoff and grow geometrically
/// toward r = 0, where the integrand is a smooth power of r.
const LOG_WIDTH_START: f64 = 0.5;
const LOG_WIDTH_GROWTH: f64 = 1.5;
const LOG_WIDTH_MAX: f64 = 4.0;
/// Far-field panels in log r stay uniform at this width.
const FAR_LOG_WIDTH: f64 = 0.5;

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    /// `(1−s)·∫_{r<c}` over region A.
    a_near_scaled: f64,
    /// Unscaled `∫_{r<c}` over region B.
    b_near: f64,
    far: f64,
    tail_near_scaled: f64,
    tail_far: f64,
}

impl Sums {
    fn add_scaled(&mut self, o: &Sums, k: f64) {
        self.a_near_scaled += k * o.a_near_scaled;
        self.b_near += k * o.b_near;
        self.far += k * o.far;
        self.tail_near_scaled += k * o.tail_near_scaled;
        self.tail_far += k * o.tail_far;
    }
}

struct Radial<'p, 'a> {
    p: &'p Problem<'a>,
    gl: GaussLegendre,
    one_minus_s: f64,
    gamma: f64,
    /// `C₂·max{L^{p⁻}, L^{p⁺}}` with `L` bounding the difference quotient.
    near_const: f64,
}

pub(super) fn evaluate(p: &Problem<'_>, panels: usize, order: usize) -> Result<ModularResult> {
    let n = p.n();
    let nodes = tensor_nodes(p.u.bbox(), panels, &GaussLegendre::new(order));
    let dirs: Vec<([f64; 3], f64)> = match p.dirs {
        Directions::Sphere => {
            let rule = SphereRule::new(n, p.plan.sphere_order_for(n))?;
            rule.nodes().iter().copied().zip(rule.weights().iter().copied()).collect()
        }
        Directions::Axis(k) => {
            let mut e = [0.0; 3];
            e[k] = 1.0;
            let mut m = [0.0; 3];
            m[k] = -1.0;
            vec![(e, 1.0), (m, 1.0)]
        }
    };
    let b = p.spec.bounds();
    let lip = p.amp * p.u.sup_grad;
    let ctx = Radial {
        p,
        gl: GaussLegendre::new(p.plan.gl_order),
        one_minus_s: 1.0 - p.s,
        gamma: 1.0 / (p.s * b.p_minus),
        near_const: b.c2 * b.max_pow(lip),
    };
    let per_node = map_indexed(p.plan.exec, nodes.len(), |i| {
        let (x, wx) = &nodes[i];
        let mut acc = Sums::default();
        for (w, ww) in &dirs {
            let s = ctx.node_dir(&x[..n], &w[..n]);
            acc.add_scaled(&s, *ww);
        }
        let mut out = Sums::default();
        out.add_scaled(&acc, *wx);
        out
    });
    let col = |f: fn(&Sums) -> f64| pairwise_sum(&per_node.iter().map(f).collect::<Vec<_>>());
    let a_near_scaled = col(|s| s.a_near_scaled);
    let b_near = col(|s| s.b_near);
    let far = col(|s| s.far);
    let tail_near_scaled = col(|s| s.tail_near_scaled);
    let tail_far = col(|s| s.tail_far);

    let oms = ctx.one_minus_s;
    let scaled_value = a_near_scaled + oms * (b_near + far);
    let near_field = a_near_scaled / oms + b_near;
    let scaled_tail = tail_near_scaled + oms * tail_far;
    if scaled_tail > p.plan.tail_tol * scaled_value.max(f64::MIN_POSITIVE) {
        return Err(Error::InsufficientRadialDepth { bound: scaled_tail, tol: p.plan.tail_tol });
    }
    Ok(ModularResult {
        value: near_field + far,
        near_field,
        far_field: far,
        scaled_value,
        tail_bound: scaled_tail / oms,
        scaled_tail_bound: scaled_tail,
        far_bound: 0.0,
        mc_stderr: None,
        scaled_stderr: None,
    })
}

impl Radial<'_, '_> {
    fn node_dir(&self, x: &[f64], w: &[f64]) -> Sums {
        let p = self.p;
        let n = p.n();
        let c = p.plan.far_cutoff;
        let mut out = Sums::default();

        let mut back = [0.0; 3];
        for i in 0..n {
            back[i] = -w[i];
        }
        let cross = p.u.crossings(x, &back[..n]);
        let cross = cross.as_slice();

        // region A, near field
        if p.plan.use_rho_substitution {
            let r_switch = c * (-p.plan.near_log_span).exp();
            let log_part = if r_switch < c {
                self.log_panels(r_switch, c, cross, true, |r| {
                    p.phi_near(x, w, r, (self.one_minus_s * r.ln()).exp())
                })
            } else {
                0.0
            };
            let rho0 = (self.one_minus_s * r_switch.ln()).exp();
            let (rho_part, rho_min) = self.dyadic(rho0, p.plan.radial_levels, |rho| {
                let lnr = rho.ln() / self.one_minus_s;
                let r = if lnr < -700.0 { 0.0 } else { lnr.exp() };
                p.phi_near(x, w, r, rho) / rho
            });
            out.a_near_scaled = self.one_minus_s * log_part + rho_part;
            out.tail_near_scaled = self.near_const * rho_min.powf(p.spec.bounds().p_minus)
                / p.spec.bounds().p_minus;
        } else {
            let levels = p.plan.radial_levels;
            let mut parts = Vec::with_capacity(levels + 2);
            let mut hi = c;
            for _ in 0..levels {
                let lo = 0.5 * hi;
                for (a, b) in split_at_breaks(lo, hi, cross) {
                    parts.push(self.gl.integrate(a, b, |r| {
                        p.phi_near(x, w, r, (self.one_minus_s * r.ln()).exp()) / r
                    }));
                }
                hi = lo;
            }
            let pm = p.spec.bounds().p_minus;
            let expo = self.one_minus_s * pm;
            out.a_near_scaled = self.one_minus_s * pairwise_sum(&parts);
            out.tail_near_scaled = self.near_const * hi.powf(expo) / pm;
        }

        // region A, far field
        let r_last = cross.last().copied().unwrap_or(0.0);
        let a = c.max(1.0).max(r_last);
        let mut far = 0.0;
        if a > c {
            far += self.log_panels(c, a, cross, false, |r| p.phi_a(x, w, r));
        }
        let ux = p.amp * p.u.value(x).abs();
        if ux > 0.0 {
            let (v, t) = self.far_tail(a, ux, |r| p.phi_a_outside(x, w, r, ux));
            far += v;
            out.tail_far += t;

            // region B with y = x: pairs (y + r w, y) whose first point has left the box
            let e = p.u.bbox().exit_distance(x, w);
            if e < c {
                out.b_near = self.log_panels(e, c, &[], true, |r| p.phi_b(x, w, r, ux));
            }
            let lo = e.max(c);
            let a = lo.max(1.0);
            if a > lo {
                far += self.log_panels(lo, a, &[], false, |r| p.phi_b(x, w, r, ux));
            }
            let (v, t) = self.far_tail(a, ux, |r| p.phi_b(x, w, r, ux));
            far += v;
            out.tail_far += t;
        }
        out.far = far;
        out
    }

    /// `∫_{r_lo}^{r_hi} f(r) dr/r` on panels in `log r`, split at `breaks`.
    /// With `graded`, widths grow away from `r_hi`; otherwise they are uniform.
    fn log_panels<F: Fn(f64) -> f64>(&self, r_lo: f64, r_hi: f64, breaks: &[f64], graded: bool, f: F) -> f64 {
        let (l_lo, l_hi) = (r_lo.ln(), r_hi.ln());
        let mut pts = vec![l_hi];
        let mut width = if graded { LOG_WIDTH_START } else { FAR_LOG_WIDTH };
        let mut l = l_hi;
        while l - width > l_lo {
            l -= width;
            pts.push(l);
            if graded {
                width = (width * LOG_WIDTH_GROWTH).min(LOG_WIDTH_MAX);
            }
        }
        pts.push(l_lo);
        pts.extend(breaks.iter().filter(|b| **b > r_lo && **b < r_hi).map(|b| b.ln()));
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let parts: Vec<f64> = pts
            .windows(2)
            .map(|ab| self.gl.integrate(ab[0], ab[1], |l| f(l.exp())))
            .collect();
        pairwise_sum(&parts)
    }

    /// `∫₀^{top} f` over dyadic panels; returns the value and the omitted
    /// lower endpoint.
    fn dyadic<F: Fn(f64) -> f64>(&self, top: f64, levels: usize, f: F) -> (f64, f64) {
        let mut parts = Vec::with_capacity(levels);
        let mut hi = top;
        for _ in 0..levels {
            let lo = 0.5 * hi;
            parts.push(self.gl.integrate(lo, hi, &f));
            hi = lo;
        }
        (pairwise_sum(&parts), hi)
    }

    /// `∫_a^∞ f(r) dr/r` through `r = a z^{-γ}`, valid for `a ≥ 1`, where
    /// `f(r) = G(·, ·, U r^{-s})`. Returns the value and its tail bound.
    fn far_tail<F: Fn(f64) -> f64>(&self, a: f64, big_u: f64, f: F) -> (f64, f64) {
        let g = self.gamma;
        let (v, eps) = self.dyadic(1.0, self.p.plan.far_radial_levels, |z| {
            let r = a * (-g * z.ln()).exp();
            if r.is_finite() {
                f(r) / z
            } else {
                0.0
            }
        });
        let b = self.p.spec.bounds();
        let tail = g * b.c2 * b.max_pow(big_u) * a.powf(-self.p.s * b.p_minus) * eps;
        (g * v, tail)
    }
}
