use serde::{Deserialize, Serialize};

use super::RelativePartition;
use crate::admg::Admg;

/// Structure parameters of a learning problem and the sample sizes the
/// finite-sample bounds ask for at the requested accuracy.
///
/// Logarithmic factors hidden by the bounds are kept as the explicit `ln`
/// terms below with unit constants, so the sizes are orders of magnitude
/// rather than tight requirements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// largest c-component
    pub k: usize,
    /// largest in-degree
    pub d: usize,
    /// c-components touched by the intervention
    pub ell: usize,
    /// largest alphabet
    pub sigma: usize,
    /// total-variation share of the high-dimensional part
    pub eps_q: f64,
    /// pointwise relative accuracy asked of each low-dimensional table
    pub eps_r: f64,
    pub m_q: f64,
    pub m_r: f64,
    pub m_required: f64,
}

impl Budget {
    pub fn new(g: &Admg, part: &RelativePartition, epsilon: f64, delta: f64, alpha: f64) -> Budget {
        let k = part.c_components.iter().map(|c| c.len()).max().unwrap_or(0);
        let d = g.max_in_degree();
        let ell = part.ell;
        let sigma = g.cardinalities().iter().copied().max().unwrap_or(1);
        let n = g.num_vars() as f64;
        let s = sigma as f64;
        let fan_in = (k * d + d) as f64;

        let eps_q = epsilon / 2.0;
        // KL ≤ 2ε² keeps TV ≤ ε through Pinsker
        let kl = 2.0 * eps_q * eps_q;
        let m_q = n * s.powf(fan_in) / (alpha.powi(part.c_low.len() as i32) * kl)
            * (n * s.powf(fan_in + 1.0) / delta).ln().max(1.0);

        let (eps_r, m_r) = if ell == 0 {
            (eps_q, 0.0)
        } else {
            let kf = k as f64;
            let lf = ell as f64;
            let eps_r = epsilon / (2.0 * (3.0 * kf).powf(kf + 1.0) * lf * s.powf(kf * lf));
            let m_r = fan_in.max(1.0) / (alpha * alpha * eps_r * eps_r) * (s * kf * lf / delta).ln().max(1.0);
            (eps_r, m_r)
        };
        Budget {
            k,
            d,
            ell,
            sigma,
            eps_q,
            eps_r,
            m_q,
            m_r,
            m_required: m_q.max(m_r).ceil(),
        }
    }
}
