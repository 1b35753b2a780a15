//! Distances between distributions given as tables, evaluators and
//! samplers, and exact checks of the identities the learner relies on.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::admg::{Admg, Assignment, ConfigIter, Symbol, VarId, VarSet};
use crate::learn::{learn, ConditionalTable, DistHandle, FactorKind, LearnConfig, LearnError, LearnedInterventional, RelativePartition};
use crate::oracle::{CausalBayesNet, OracleError};
use crate::rng::{cumulative, draw_from_cdf, seeded, SeededRng};
use crate::table::{PmfTable, TableError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("tables cover {left:?} and {right:?}")]
    ScopeMismatch { left: VarSet, right: VarSet },
    #[error("first distribution puts mass where the second has none")]
    InfiniteKl,
    #[error("reference evaluator is zero at a drawn point")]
    ZeroEvaluatorMass,
    #[error("net projects to a different graph than the learned model")]
    GraphMismatch,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Table(#[from] TableError),
}

fn same_layout(a: &PmfTable, b: &PmfTable) -> Result<(), VerifyError> {
    if a.vars() != b.vars() || a.cards() != b.cards() {
        return Err(VerifyError::ScopeMismatch {
            left: a.scope(),
            right: b.scope(),
        });
    }
    Ok(())
}

/// `½ Σ |a − b|`.
pub fn exact_tv(a: &PmfTable, b: &PmfTable) -> Result<f64, VerifyError> {
    same_layout(a, b)?;
    Ok(0.5 * a.probs().iter().zip(b.probs()).map(|(p, q)| (p - q).abs()).sum::<f64>())
}

/// `Σ a ln(a / b)` with `0 ln 0 = 0`.
pub fn exact_kl(a: &PmfTable, b: &PmfTable) -> Result<f64, VerifyError> {
    same_layout(a, b)?;
    kl_slices(a.probs(), b.probs())
}

fn kl_slices(a: &[f64], b: &[f64]) -> Result<f64, VerifyError> {
    let mut total = 0.0;
    for (p, q) in a.iter().zip(b) {
        if *p > 0.0 {
            if *q <= 0.0 {
                return Err(VerifyError::InfiniteKl);
            }
            total += p * (p / q).ln();
        }
    }
    Ok(total)
}

/// The largest total variation Pinsker's inequality allows for a given KL.
pub fn pinsker_bound(kl: f64) -> f64 {
    (0.5 * kl).sqrt()
}

/// Draws needed by [`estimate_tv`]: `⌈2 ε⁻² ln(2/δ)⌉`.
pub fn tv_sample_size(epsilon: f64, delta: f64) -> usize {
    (2.0 / (epsilon * epsilon) * (2.0 / delta).ln()).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvEstimate {
    pub estimate: f64,
    pub samples: usize,
}

/// Monte-Carlo estimate of `d_TV(P, Q)` as the mean of
/// `max(0, 1 − q(x)/p(x))` over draws `x ∼ P`.
pub fn estimate_tv<X>(
    mut sample_p: impl FnMut(&mut SeededRng) -> X,
    eval_p: impl Fn(&X) -> f64,
    eval_q: impl Fn(&X) -> f64,
    epsilon: f64,
    delta: f64,
    seed: u64,
) -> Result<TvEstimate, VerifyError> {
    if !(epsilon > 0.0 && delta > 0.0 && delta < 1.0) {
        return Err(VerifyError::Invalid("need epsilon > 0 and 0 < delta < 1".into()));
    }
    let m = tv_sample_size(epsilon, delta);
    let mut rng = seeded(seed);
    let mut terms = Vec::with_capacity(m);
    for _ in 0..m {
        let x = sample_p(&mut rng);
        let p = eval_p(&x);
        if p <= 0.0 {
            return Err(VerifyError::ZeroEvaluatorMass);
        }
        terms.push((1.0 - eval_q(&x) / p).max(0.0));
    }
    Ok(TvEstimate {
        estimate: crate::table::pairwise_sum(&terms) / m as f64,
        samples: m,
    })
}

/// Inverse-CDF sampler over the cells of a table.
pub struct TableSampler {
    cdf: Vec<f64>,
}

impl TableSampler {
    pub fn new(t: &PmfTable) -> Self {
        TableSampler {
            cdf: cumulative(t.probs()),
        }
    }

    /// Cell index of one draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        draw_from_cdf(&self.cdf, rng.random())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorError {
    pub target: String,
    pub kind: FactorKind,
    /// largest absolute difference between a learned row and the row the
    /// same pipeline produces from the exact distribution
    pub worst_row_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub tv: f64,
    /// `KL(P_x ‖ P̂_x)`; absent when infinite
    pub kl: Option<f64>,
    pub pinsker_bound: Option<f64>,
    pub factors: Vec<FactorError>,
}

/// Compares the learned evaluator with the oracle's `P_x(V ∖ X)`.
pub fn compare_to_oracle(li: &LearnedInterventional, net: &CausalBayesNet) -> Result<OracleReport, VerifyError> {
    if net.latent_project()? != *li.graph() {
        return Err(VerifyError::GraphMismatch);
    }
    let truth = net.exact_interventional(li.intervention())?.marginalize(li.targets());
    let got = li.full_table()?;
    let tv = exact_tv(&truth, &got)?;
    let kl = exact_kl(&truth, &got).ok();

    let joint = net.exact_observational()?;
    let reference = learn(
        DistHandle::Table { table: &joint, eta: 0.0 },
        li.graph(),
        li.intervention(),
        &LearnConfig::default(),
    )?;
    let factors = li
        .factors()
        .iter()
        .zip(reference.factors())
        .map(|(f, r)| FactorError {
            target: li.graph().name(f.table.target()).to_string(),
            kind: f.kind,
            worst_row_error: f
                .table
                .rows()
                .iter()
                .zip(r.table.rows())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        })
        .collect();
    Ok(OracleReport {
        tv,
        kl,
        pinsker_bound: kl.map(pinsker_bound),
        factors,
    })
}

/// Outcome of [`sandwich`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    /// smallest `P(Pa⁺(C_i) = z)` over the components meeting `X`
    pub alpha: f64,
    pub lower: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub holds: bool,
}

/// Exact conditionals `P(v | Z_v)` on effective parents.
fn exact_conditionals(g: &Admg, joint: &PmfTable, vars: VarSet) -> Result<BTreeMap<VarId, ConditionalTable>, VerifyError> {
    let order = g.topological_order();
    vars.iter()
        .map(|v| {
            ConditionalTable::from_joint(v, g.effective_parents(order, v), g.cardinalities(), joint)
                .map(|t| (v, t))
                .map_err(VerifyError::Invalid)
        })
        .collect()
}

/// Checks `α^{|C_low|} ≤ P(v) / Q(w) ≤ 1` at every `v`, where `w` is the
/// restriction of `v` to the components disjoint from `X` and `Q` their
/// exact product of conditionals. Ratios are compared with slack `tol`.
pub fn sandwich(g: &Admg, joint: &PmfTable, part: &RelativePartition, tol: f64) -> Result<SandwichReport, VerifyError> {
    if joint.scope() != g.vars() {
        return Err(VerifyError::Invalid("joint table must cover every observable".into()));
    }
    let mut alpha = 1.0f64;
    for c in &part.c_components[..part.ell] {
        let marg = joint.marginalize(g.pa_plus(*c));
        alpha = alpha.min(marg.probs().iter().copied().fold(f64::INFINITY, f64::min));
    }
    let lower = alpha.powi(part.c_low.len() as i32);
    let q = exact_conditionals(g, joint, part.c_high)?;
    let (mut min_ratio, mut max_ratio) = (f64::INFINITY, 0.0f64);
    for i in 0..joint.len() {
        let cfg = joint.config_of(i);
        let mut values = vec![0 as Symbol; g.num_vars()];
        for (v, s) in joint.vars().iter().zip(&cfg) {
            values[v.0] = *s;
        }
        let qw: f64 = q.values().map(|t| t.prob(&values)).product();
        let ratio = joint.probs()[i] / qw;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
    }
    Ok(SandwichReport {
        alpha,
        lower,
        min_ratio,
        max_ratio,
        holds: min_ratio >= lower - tol && max_ratio <= 1.0 + tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KlDecomposition {
    /// fixing of the components meeting `X` with the largest gap
    pub worst_fixing: Vec<(String, Symbol)>,
    pub direct: f64,
    pub decomposed: f64,
    pub max_gap: f64,
}

/// For every fixing `c` of `C_low`, compares `KL(Q_c ‖ Q̂_c)` computed over
/// the joint of the remaining variables with
/// `Σ_i Σ_a Q_c[Z_i = a] · KL(P[· | a] ‖ Q̂[· | a])`.
pub fn kl_decomposition(
    g: &Admg,
    joint: &PmfTable,
    part: &RelativePartition,
    q_hat: &BTreeMap<VarId, ConditionalTable>,
) -> Result<KlDecomposition, VerifyError> {
    let q = exact_conditionals(g, joint, part.c_high)?;
    if q_hat.keys().ne(q.keys()) {
        return Err(VerifyError::Invalid("learned factors do not cover the high part".into()));
    }
    let cards = g.cardinalities();
    let low = part.c_low.to_vec();
    let high = part.c_high.to_vec();
    let mut best = KlDecomposition {
        worst_fixing: Vec::new(),
        direct: 0.0,
        decomposed: 0.0,
        max_gap: -1.0,
    };
    let mut values = vec![0 as Symbol; g.num_vars()];
    for c in ConfigIter::new(&low, cards) {
        for (v, s) in low.iter().zip(&c) {
            values[v.0] = *s;
        }
        // Q_c and Q̂_c over the high part
        let mut qc = PmfTable::zeros(part.c_high, cards)?;
        let mut direct = 0.0;
        for (i, w) in ConfigIter::new(&high, cards).enumerate() {
            for (v, s) in high.iter().zip(&w) {
                values[v.0] = *s;
            }
            let p: f64 = q.values().map(|t| t.prob(&values)).product();
            let p_hat: f64 = q_hat.values().map(|t| t.prob(&values)).product();
            qc.probs_mut()[i] = p;
            if p > 0.0 {
                if p_hat <= 0.0 {
                    return Err(VerifyError::InfiniteKl);
                }
                direct += p * (p / p_hat).ln();
            }
        }
        let mut decomposed = 0.0;
        for (v, t) in &q {
            let t_hat = &q_hat[v];
            let z = t.given_set();
            let zh = z.intersection(part.c_high);
            let mass = qc.marginalize(zh);
            let zv = z.to_vec();
            for (r, a) in ConfigIter::new(&zv, cards).enumerate() {
                // rows whose C_low coordinates disagree with c carry no mass
                if zv.iter().zip(&a).any(|(u, s)| part.c_low.contains(*u) && values[u.0] != *s) {
                    continue;
                }
                let mut at = Assignment::empty();
                for (u, s) in zv.iter().zip(&a) {
                    if zh.contains(*u) {
                        at.set(*u, *s);
                    }
                }
                let weight = mass.get(&at).expect("mass covers the high coordinates");
                if weight > 0.0 {
                    decomposed += weight * kl_slices(t.row(r), t_hat.row(r))?;
                }
            }
        }
        let gap = (direct - decomposed).abs();
        if gap > best.max_gap {
            best = KlDecomposition {
                worst_fixing: low.iter().zip(&c).map(|(v, s)| (g.name(*v).to_string(), *s)).collect(),
                direct,
                decomposed,
                max_gap: gap,
            };
        }
    }
    Ok(best)
}
