use crate::admg::{Symbol, VarId, VarSet};
use crate::rng::{cumulative, draw_from_cdf};
use crate::table::PmfTable;

/// `P̂[target | given]` as one row per configuration of `given`.
///
/// `given` is ascending with the first variable most significant; each row
/// holds `card` probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    target: VarId,
    card: usize,
    given: Vec<VarId>,
    given_cards: Vec<usize>,
    rows: Vec<f64>,
    counts: Option<Vec<u64>>,
    cdf: Vec<f64>,
}

impl ConditionalTable {
    /// Builds the table from already-normalized rows.
    pub fn new(
        target: VarId,
        given: VarSet,
        host_cards: &[usize],
        rows: Vec<f64>,
        counts: Option<Vec<u64>>,
    ) -> Result<Self, String> {
        let given: Vec<VarId> = given.to_vec();
        if given.contains(&target) {
            return Err("a variable cannot condition on itself".into());
        }
        let given_cards: Vec<usize> = given.iter().map(|v| host_cards[v.0]).collect();
        let card = host_cards[target.0];
        let n_rows: usize = given_cards.iter().product();
        if rows.len() != n_rows * card {
            return Err(format!("expected {} cells, got {}", n_rows * card, rows.len()));
        }
        if let Some(c) = &counts {
            if c.len() != rows.len() {
                return Err("count table does not match the probability table".into());
            }
        }
        for (r, row) in rows.chunks(card).enumerate() {
            let total: f64 = row.iter().sum();
            if row.iter().any(|p| !(0.0..=1.0 + 1e-12).contains(p)) || (total - 1.0).abs() > 1e-12 {
                return Err(format!("row {r} is not a distribution (sums to {total})"));
            }
        }
        let cdf = rows.chunks(card).flat_map(cumulative).collect();
        Ok(ConditionalTable {
            target,
            card,
            given,
            given_cards,
            rows,
            counts,
            cdf,
        })
    }

    /// Add-1 estimate from joint counts laid out over `given ∪ {target}`.
    pub fn add_one(target: VarId, given: VarSet, host_cards: &[usize], joint_counts: &[u64]) -> Result<Self, String> {
        let counts = regroup(target, given, host_cards, joint_counts);
        let card = host_cards[target.0];
        let rows = counts
            .chunks(card)
            .flat_map(|row| {
                let total: u64 = row.iter().sum();
                let denom = (total + card as u64) as f64;
                row.iter().map(move |c| (*c as f64 + 1.0) / denom)
            })
            .collect();
        ConditionalTable::new(target, given, host_cards, rows, Some(counts))
    }

    /// Exact conditional from a joint table over at least `given ∪ {target}`.
    /// Rows with zero mass become uniform.
    pub fn from_joint(target: VarId, given: VarSet, host_cards: &[usize], joint: &PmfTable) -> Result<Self, String> {
        let marg = joint.marginalize(given.with(target));
        let cells = regroup(target, given, host_cards, marg.probs());
        let card = host_cards[target.0];
        let rows = cells
            .chunks(card)
            .flat_map(|row| normalize_or_uniform(row.to_vec()))
            .collect();
        ConditionalTable::new(target, given, host_cards, rows, None)
    }

    pub fn target(&self) -> VarId {
        self.target
    }

    pub fn cardinality(&self) -> usize {
        self.card
    }

    pub fn given(&self) -> &[VarId] {
        &self.given
    }

    pub fn given_set(&self) -> VarSet {
        self.given.iter().collect()
    }

    pub fn num_rows(&self) -> usize {
        self.given_cards.iter().product()
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.rows[r * self.card..(r + 1) * self.card]
    }

    pub fn counts(&self) -> Option<&[u64]> {
        self.counts.as_deref()
    }

    /// Row index of the conditioning values read from a dense host-indexed
    /// vector.
    pub fn row_index(&self, values: &[Symbol]) -> usize {
        self.given
            .iter()
            .zip(&self.given_cards)
            .fold(0, |acc, (v, c)| acc * c + values[v.0] as usize)
    }

    /// `P̂[values[target] | values[given]]`.
    pub fn prob(&self, values: &[Symbol]) -> f64 {
        self.rows[self.row_index(values) * self.card + values[self.target.0] as usize]
    }

    /// Inverse-CDF draw of the target given the conditioning values.
    pub fn draw(&self, values: &[Symbol], u: f64) -> Symbol {
        let r = self.row_index(values);
        draw_from_cdf(&self.cdf[r * self.card..(r + 1) * self.card], u) as Symbol
    }
}

/// Reorders a joint table over `given ∪ {target}` (ascending layout) into
/// rows indexed by `given` with the target varying fastest.
fn regroup<T: Copy + Default>(target: VarId, given: VarSet, host_cards: &[usize], joint: &[T]) -> Vec<T> {
    let all = given.with(target).to_vec();
    let pos = all.iter().position(|v| *v == target).expect("target in its own joint");
    let cards: Vec<usize> = all.iter().map(|v| host_cards[v.0]).collect();
    let card = cards[pos];
    let inner: usize = cards[pos + 1..].iter().product();
    let mut out = vec![T::default(); joint.len()];
    for (i, value) in joint.iter().enumerate() {
        let t = (i / inner) % card;
        let high = i / (inner * card);
        let low = i % inner;
        out[(high * inner + low) * card + t] = *value;
    }
    out
}

pub(crate) fn normalize_or_uniform(mut row: Vec<f64>) -> Vec<f64> {
    let total: f64 = row.iter().sum();
    if total > 0.0 {
        row.iter_mut().for_each(|p| *p /= total);
    } else {
        let u = 1.0 / row.len() as f64;
        row.iter_mut().for_each(|p| *p = u);
    }
    let drift = 1.0 - row.iter().sum::<f64>();
    if let Some(m) = row.iter_mut().max_by(|a, b| a.total_cmp(b)) {
        *m += drift;
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_one_rows() {
        // target 0 binary, given {1} binary; counts: given=0 → (3,1), given=1 → (0,0)
        let cards = [2, 2];
        // joint layout over {0,1}: index = v0*2 + v1
        let joint = [3, 0, 1, 0];
        let t = ConditionalTable::add_one(VarId(0), VarSet::singleton(VarId(1)), &cards, &joint).unwrap();
        assert!((t.row(0)[0] - 4.0 / 6.0).abs() < 1e-15);
        assert!((t.row(0)[1] - 2.0 / 6.0).abs() < 1e-15);
        assert_eq!(t.row(1), &[0.5, 0.5]);
        assert_eq!(t.counts().unwrap(), &[3, 1, 0, 0]);
        assert_eq!(t.prob(&[0, 0]), 4.0 / 6.0);
        assert_eq!(t.prob(&[1, 1]), 0.5);
    }

    #[test]
    fn regroup_moves_target_last() {
        // vars {0,1,2}, target 1, cards 2,3,2
        let cards = [2, 3, 2];
        let joint: Vec<u64> = (0..12).collect();
        let out = regroup(VarId(1), VarSet::from_bits(0b101), &cards, &joint);
        for v0 in 0..2 {
            for v1 in 0..3 {
                for v2 in 0..2 {
                    let src = (v0 * 3 + v1) * 2 + v2;
                    let dst = (v0 * 2 + v2) * 3 + v1;
                    assert_eq!(out[dst], joint[src]);
                }
            }
        }
    }

    #[test]
    fn draws_follow_rows() {
        let cards = [3];
        let t = ConditionalTable::new(VarId(0), VarSet::EMPTY, &cards, vec![0.2, 0.0, 0.8], None).unwrap();
        assert_eq!(t.draw(&[0], 0.1), 0);
        assert_eq!(t.draw(&[0], 0.2), 2);
        assert_eq!(t.draw(&[0], 0.99), 2);
    }

    #[test]
    fn rejects_bad_rows() {
        let cards = [2];
        assert!(ConditionalTable::new(VarId(0), VarSet::EMPTY, &cards, vec![0.6, 0.6], None).is_err());
        assert!(ConditionalTable::new(VarId(0), VarSet::EMPTY, &cards, vec![1.0], None).is_err());
    }
}
