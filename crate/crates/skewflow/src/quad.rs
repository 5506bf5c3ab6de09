//! Composite Simpson quadrature with a fixed panel count.
//!
//! Fixed panel density (rather than adaptive subdivision) keeps residuals
//! deterministic and reproducible across runs.

use crate::error::{Result, SkewflowError};

/// Composite Simpson rule with `n_panels` panels over [s, t].
///
/// Exact on polynomials of degree <= 3; error O(((t-s)/n_panels)^4) per unit
/// length for smooth integrands. Non-finite samples abort with the offending
/// location.
pub fn simpson<F>(fun: F, s: f64, t: f64, n_panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(t >= s) {
        return Err(SkewflowError::TimeDomain {
            t,
            s,
            context: "quadrature interval requires t >= s",
        });
    }
    if n_panels == 0 {
        return Err(SkewflowError::InvalidGrid(
            "quadrature needs at least one panel".into(),
        ));
    }
    if t == s {
        return Ok(0.0);
    }

    let (nodes, weights) = simpson_nodes(s, t, n_panels);
    let mut acc = 0.0;
    for (&tau, &w) in nodes.iter().zip(weights.iter()) {
        let v = fun(tau);
        if !v.is_finite() {
            return Err(SkewflowError::Quadrature {
                location: tau,
                value: v,
            });
        }
        acc += w * v;
    }
    Ok(acc)
}

/// Nodes and weights of the composite Simpson rule (2 * n_panels + 1 nodes).
///
/// Exposed so sweeps can evaluate an expensive integrand once per node and
/// reuse the values across many weighted sums.
pub fn simpson_nodes(s: f64, t: f64, n_panels: usize) -> (Vec<f64>, Vec<f64>) {
    let n = n_panels.max(1);
    let h = (t - s) / n as f64;
    let m = 2 * n + 1;
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for i in 0..m {
        nodes.push(s + h * (i as f64) / 2.0);
        let w = if i == 0 || i == m - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        weights.push(w * h / 6.0);
    }
    // Pin the last node to t exactly.
    nodes[m - 1] = t;
    (nodes, weights)
}

/// Panel count for a target density per unit length (at least one panel).
pub fn panels_for(len: f64, per_unit: usize) -> usize {
    ((len * per_unit as f64).ceil() as usize).max(1)
}

/// Default panel density used by quadrature-backed cocycles and integral
/// criteria.
pub const DEFAULT_PANELS_PER_UNIT: usize = 64;
