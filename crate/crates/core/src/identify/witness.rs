//! Numerical search for two nets that certify a failed identification.
//!
//! Both nets realize the same ADMG and agree on the observational
//! distribution, yet disagree on `P_x(y)`. The search parameterizes every
//! CPT row by softmax logits, moves from a random start along the null
//! space of the observational Jacobian in the direction that changes the
//! interventional table most, and then projects back onto the observational
//! level set with Gauss–Newton steps.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::admg::{Admg, Assignment, ConfigIter, VarId, VarSet};
use crate::oracle::{CausalBayesNet, Node, OracleError};
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessConfig {
    pub hidden_cardinality: usize,
    pub restarts: usize,
    /// largest acceptable observational distance
    pub observational_tolerance: f64,
    /// smallest acceptable interventional distance
    pub interventional_gap: f64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            hidden_cardinality: 3,
            restarts: 20,
            observational_tolerance: 1e-9,
            interventional_gap: 1e-3,
        }
    }
}

/// Two nets over the same ADMG that no observational data can tell apart
/// but that answer `P_x(y)` differently at `x`.
#[derive(Debug, Clone)]
pub struct IndistinguishablePair {
    pub first: CausalBayesNet,
    pub second: CausalBayesNet,
    pub x: Assignment,
    pub observational_tv: f64,
    pub interventional_tv: f64,
}

/// Layout of the logit vector: one block of `rows × card` logits per node.
struct Template {
    names: Vec<String>,
    cards: Vec<usize>,
    hidden: Vec<bool>,
    parents: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    len: usize,
}

impl Template {
    fn new(g: &Admg, hidden_card: usize) -> Self {
        let n = g.num_vars();
        let bi = g.bidirected_edges();
        let mut names: Vec<String> = g.names().to_vec();
        let mut cards = g.cardinalities().to_vec();
        let mut hidden = vec![false; n];
        let mut parents: Vec<Vec<usize>> = (0..n).map(|v| g.parents(VarId(v)).iter().map(|p| p.0).collect()).collect();
        for (h, (a, b)) in bi.iter().enumerate() {
            parents[a.0].push(n + h);
            parents[b.0].push(n + h);
            names.push(format!("U_{}_{}", g.name(*a), g.name(*b)));
            cards.push(hidden_card);
            hidden.push(true);
        }
        parents.resize(names.len(), Vec::new());
        let mut offsets = Vec::with_capacity(names.len());
        let mut len = 0;
        for i in 0..names.len() {
            offsets.push(len);
            let rows: usize = parents[i].iter().map(|&p| cards[p]).product();
            len += rows * cards[i];
        }
        Template {
            names,
            cards,
            hidden,
            parents,
            offsets,
            len,
        }
    }

    fn net(&self, theta: &[f64]) -> CausalBayesNet {
        let nodes = (0..self.names.len())
            .map(|i| {
                let end = self.offsets.get(i + 1).copied().unwrap_or(self.len);
                let cpt = theta[self.offsets[i]..end]
                    .chunks(self.cards[i])
                    .flat_map(softmax)
                    .collect();
                Node {
                    name: self.names[i].clone(),
                    cardinality: self.cards[i],
                    hidden: self.hidden[i],
                    parents: self.parents[i].clone(),
                    cpt,
                }
            })
            .collect();
        CausalBayesNet::new(nodes).expect("template nets are valid")
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let s: f64 = e.iter().sum();
    let mut row: Vec<f64> = e.iter().map(|v| v / s).collect();
    // keep every row summing to 1 within the net validator's tolerance
    let drift = 1.0 - row.iter().sum::<f64>();
    row[0] += drift;
    row
}

struct Maps<'a> {
    template: &'a Template,
    xs: Vec<Assignment>,
    y: VarSet,
}

impl Maps<'_> {
    fn observational(&self, theta: &[f64]) -> Result<Vec<f64>, OracleError> {
        Ok(self.template.net(theta).exact_observational()?.probs().to_vec())
    }

    /// `P_x(y)` for every `x`, concatenated.
    fn interventional(&self, theta: &[f64]) -> Result<Vec<f64>, OracleError> {
        let net = self.template.net(theta);
        let mut out = Vec::new();
        for x in &self.xs {
            out.extend_from_slice(net.exact_interventional(x)?.marginalize(self.y).probs());
        }
        Ok(out)
    }

    fn jacobian(
        &self,
        theta: &[f64],
        f: impl Fn(&[f64]) -> Result<Vec<f64>, OracleError>,
    ) -> Result<DMatrix<f64>, OracleError> {
        const H: f64 = 1e-6;
        let mut probe = theta.to_vec();
        let mut cols = Vec::with_capacity(theta.len());
        for j in 0..theta.len() {
            probe[j] = theta[j] + H;
            let up = f(&probe)?;
            probe[j] = theta[j] - H;
            let down = f(&probe)?;
            probe[j] = theta[j];
            cols.push(DVector::from_iterator(up.len(), up.iter().zip(&down).map(|(a, b)| (a - b) / (2.0 * H))));
        }
        Ok(DMatrix::from_columns(&cols))
    }
}

fn half_l1(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(p, q)| (p - q).abs()).sum::<f64>()
}

/// Largest per-`x` total variation between two concatenated `P_x(y)` tables.
fn worst_tv(a: &[f64], b: &[f64], block: usize) -> (usize, f64) {
    a.chunks(block)
        .zip(b.chunks(block))
        .map(|(p, q)| half_l1(p, q))
        .enumerate()
        .fold((0, 0.0), |best, (i, tv)| if tv > best.1 { (i, tv) } else { best })
}

/// Searches for an [`IndistinguishablePair`] for `P_x(y)` on `g`.
///
/// Returns `None` when no restart succeeds, which for an identifiable query
/// is the expected outcome.
pub fn find_indistinguishable_pair(
    g: &Admg,
    x: VarSet,
    y: VarSet,
    seed: u64,
    config: &WitnessConfig,
) -> Result<Option<IndistinguishablePair>, OracleError> {
    let template = Template::new(g, config.hidden_cardinality);
    let xl = x.to_vec();
    let xs: Vec<Assignment> = ConfigIter::new(&xl, g.cardinalities())
        .map(|cfg| Assignment::from_pairs(xl.iter().copied().zip(cfg)))
        .collect();
    let block: usize = y.iter().map(|v| g.cardinality(v)).product();
    let maps = Maps { template: &template, xs, y };
    let mut rng = seeded(seed);

    for _ in 0..config.restarts {
        let theta0: Vec<f64> = (0..template.len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let obs0 = maps.observational(&theta0)?;
        let int0 = maps.interventional(&theta0)?;

        let j_obs = maps.jacobian(&theta0, |t| maps.observational(t))?;
        let j_int = maps.jacobian(&theta0, |t| maps.interventional(t))?;
        let Some(dir) = steepest_null_direction(&j_obs, &j_int) else {
            continue;
        };

        for step in [2.0, 1.0, 0.5, 0.25] {
            let mut theta: Vec<f64> = theta0.iter().zip(dir.iter()).map(|(t, d)| t + step * d).collect();
            if !project(&maps, &mut theta, &obs0)? {
                continue;
            }
            let obs = maps.observational(&theta)?;
            let obs_tv = half_l1(&obs, &obs0);
            let (at, int_tv) = worst_tv(&maps.interventional(&theta)?, &int0, block);
            if obs_tv <= config.observational_tolerance && int_tv >= config.interventional_gap {
                return Ok(Some(IndistinguishablePair {
                    first: template.net(&theta0),
                    second: template.net(&theta),
                    x: maps.xs[at].clone(),
                    observational_tv: obs_tv,
                    interventional_tv: int_tv,
                }));
            }
        }
    }
    Ok(None)
}

/// Unit vector in the null space of `j_obs` along which `j_int` grows
/// fastest.
fn steepest_null_direction(j_obs: &DMatrix<f64>, j_int: &DMatrix<f64>) -> Option<DVector<f64>> {
    let p = j_obs.ncols();
    // pad to square so the decomposition returns a full basis of R^p
    let mut square = DMatrix::zeros(p.max(j_obs.nrows()), p);
    square.rows_mut(0, j_obs.nrows()).copy_from(j_obs);
    let svd = square.svd(false, true);
    let v_t = svd.v_t?;
    let top = svd.singular_values.max();
    let null: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= 1e-7 * top.max(1.0))
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if null.is_empty() {
        return None;
    }
    let basis = DMatrix::from_columns(&null);
    let reduced = j_int * &basis;
    let svd = reduced.svd(false, true);
    let v_t = svd.v_t?;
    let (best, gain) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, 0.0), |b, (i, s)| if *s > b.1 { (i, *s) } else { b });
    if gain < 1e-6 {
        return None;
    }
    let d = basis * v_t.row(best).transpose();
    let norm = d.norm();
    Some(d / norm)
}

/// Gauss–Newton on `obs(θ) = target`. Returns whether it converged.
fn project(maps: &Maps<'_>, theta: &mut [f64], target: &[f64]) -> Result<bool, OracleError> {
    for _ in 0..60 {
        let obs = maps.observational(theta)?;
        let residual = DVector::from_iterator(obs.len(), obs.iter().zip(target).map(|(a, b)| a - b));
        if residual.amax() < 1e-14 {
            return Ok(true);
        }
        let j = maps.jacobian(theta, |t| maps.observational(t))?;
        let Ok(delta) = j.svd(true, true).solve(&residual, 1e-12) else {
            return Ok(false);
        };
        if delta.iter().any(|d| !d.is_finite()) {
            return Ok(false);
        }
        for (t, d) in theta.iter_mut().zip(delta.iter()) {
            *t -= d;
        }
    }
    let obs = maps.observational(theta)?;
    Ok(half_l1(&obs, target) < 1e-10)
}
