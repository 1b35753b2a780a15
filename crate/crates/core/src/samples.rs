//! Batches of observational samples and their CSV form.
//!
//! The CSV layout is a header row of variable names followed by one row of
//! integer symbols per sample. Columns may appear in any order; they are
//! matched to the host graph by name.

use std::io::{Read, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::admg::{Assignment, Symbol, VarId, VarSet};
use crate::table::{state_count, PmfTable, TableError};

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv header is missing variable `{0}`")]
    MissingColumn(String),
    #[error("csv column `{0}` is not a declared variable")]
    UnknownColumn(String),
    #[error("row {row}: value `{value}` of `{var}` is not a symbol below {cardinality}")]
    BadValue {
        row: usize,
        var: String,
        value: String,
        cardinality: usize,
    },
    #[error(transparent)]
    Table(#[from] TableError),
}

/// `m` samples over `n` variables stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSet {
    n_vars: usize,
    len: usize,
    data: Vec<Symbol>,
}

const COUNT_CHUNK: usize = 1 << 14;

impl SampleSet {
    pub fn new(n_vars: usize) -> Self {
        SampleSet {
            n_vars,
            len: 0,
            data: Vec::new(),
        }
    }

    /// Wraps row-major data; panics if the length is not a multiple of
    /// `n_vars` or `n_vars` is 0.
    pub fn from_rows(n_vars: usize, data: Vec<Symbol>) -> Self {
        assert!(n_vars > 0 && data.len().is_multiple_of(n_vars), "ragged sample data");
        SampleSet {
            n_vars,
            len: data.len() / n_vars,
            data,
        }
    }

    pub fn push(&mut self, row: &[Symbol]) {
        debug_assert_eq!(row.len(), self.n_vars);
        self.data.extend_from_slice(row);
        self.len += 1;
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> &[Symbol] {
        &self.data[i * self.n_vars..(i + 1) * self.n_vars]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Symbol]> {
        (0..self.len).map(|i| self.row(i))
    }

    /// Sample `i` as an assignment over all variables.
    pub fn assignment(&self, i: usize) -> Assignment {
        Assignment::from_pairs(self.row(i).iter().enumerate().map(|(v, s)| (VarId(v), *s)))
    }

    /// Joint counts over `vars`, laid out like a [`PmfTable`] over `vars`.
    ///
    /// Counting runs in parallel over fixed-size chunks; integer merging keeps
    /// the result independent of scheduling.
    pub fn counts(&self, vars: VarSet, host_cards: &[usize]) -> Result<Vec<u64>, TableError> {
        let cells = state_count(vars, host_cards)?;
        let layout = PmfTable::zeros(vars, host_cards)?;
        if self.n_vars == 0 {
            return Ok(vec![self.len as u64]);
        }
        let n = self.n_vars;
        let chunk = COUNT_CHUNK * n;
        let counts = self
            .data
            .par_chunks(chunk)
            .map(|block| {
                let mut local = vec![0u64; cells];
                for row in block.chunks_exact(n) {
                    local[layout.index_dense(row)] += 1;
                }
                local
            })
            .reduce(
                || vec![0u64; cells],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        Ok(counts)
    }

    /// Empirical distribution over `vars`.
    pub fn empirical(&self, vars: VarSet, host_cards: &[usize]) -> Result<PmfTable, TableError> {
        let counts = self.counts(vars, host_cards)?;
        let m = self.len().max(1) as f64;
        PmfTable::new(vars, host_cards, counts.into_iter().map(|c| c as f64 / m).collect())
    }

    /// Keeps only the columns in `vars`, re-indexed densely in ascending order.
    pub fn project(&self, vars: VarSet) -> SampleSet {
        let keep = vars.to_vec();
        let mut data = Vec::with_capacity(self.len() * keep.len());
        for row in self.rows() {
            data.extend(keep.iter().map(|v| row[v.0]));
        }
        SampleSet {
            n_vars: keep.len(),
            len: self.len,
            data,
        }
    }

    pub fn write_csv<W: Write>(&self, names: &[String], out: W) -> Result<(), SampleError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(names)?;
        let mut rec = Vec::with_capacity(self.n_vars);
        for row in self.rows() {
            rec.clear();
            rec.extend(row.iter().map(|s| s.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// Reads samples whose header names exactly the variables in `names`.
    pub fn read_csv<R: Read>(names: &[String], cards: &[usize], input: R) -> Result<SampleSet, SampleError> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let header = r.headers()?.clone();
        let mut column_of = Vec::with_capacity(header.len());
        for h in header.iter() {
            let v = names
                .iter()
                .position(|n| n == h)
                .ok_or_else(|| SampleError::UnknownColumn(h.to_string()))?;
            column_of.push(v);
        }
        if let Some(missing) = names.iter().enumerate().find(|(i, _)| !column_of.contains(i)) {
            return Err(SampleError::MissingColumn(missing.1.clone()));
        }
        let n = names.len();
        let mut out = SampleSet::new(n);
        let mut row = vec![0 as Symbol; n];
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            for (field, &v) in rec.iter().zip(&column_of) {
                let bad = || SampleError::BadValue {
                    row: i + 1,
                    var: names[v].clone(),
                    value: field.to_string(),
                    cardinality: cards[v],
                };
                let s: usize = field.parse().map_err(|_| bad())?;
                if s >= cards[v] {
                    return Err(bad());
                }
                row[v] = s as Symbol;
            }
            out.push(&row);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn counts_and_empirical() {
        let s = SampleSet::from_rows(2, vec![0, 1, 1, 1, 1, 0, 1, 1]);
        let both: VarSet = [VarId(0), VarId(1)].iter().collect();
        assert_eq!(s.counts(both, &[2, 2]).unwrap(), vec![0, 1, 1, 2]);
        let first = VarSet::singleton(VarId(0));
        assert_eq!(s.empirical(first, &[2, 2]).unwrap().probs(), &[0.25, 0.75]);
        assert_eq!(s.project(VarSet::singleton(VarId(1))).row(2), &[0]);
    }

    #[test]
    fn csv_round_trip_with_reordered_columns() {
        let s = SampleSet::from_rows(2, vec![0, 2, 1, 0]);
        let mut buf = Vec::new();
        s.write_csv(&names(&["A", "B"]), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "A,B\n0,2\n1,0\n");
        let back = SampleSet::read_csv(&names(&["A", "B"]), &[2, 3], buf.as_slice()).unwrap();
        assert_eq!(back, s);
        let swapped = "B,A\n2,0\n0,1\n";
        let back = SampleSet::read_csv(&names(&["A", "B"]), &[2, 3], swapped.as_bytes()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn csv_rejects_bad_input() {
        let n = names(&["A", "B"]);
        assert!(matches!(
            SampleSet::read_csv(&n, &[2, 2], "A\n0\n".as_bytes()),
            Err(SampleError::MissingColumn(_))
        ));
        assert!(matches!(
            SampleSet::read_csv(&n, &[2, 2], "A,C\n0,0\n".as_bytes()),
            Err(SampleError::UnknownColumn(_))
        ));
        assert!(matches!(
            SampleSet::read_csv(&n, &[2, 2], "A,B\n0,2\n".as_bytes()),
            Err(SampleError::BadValue { .. })
        ));
    }
}
