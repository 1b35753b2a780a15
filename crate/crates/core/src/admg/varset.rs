//! Variable identifiers, bitset variable sets and partial assignments.

use std::fmt;

/// Maximum number of observable variables a graph may declare.
///
/// [`VarSet`] is a single `u64` bitset; graphs beyond this size need a
/// growable set behind the same interface.
pub const MAX_VARS: usize = 64;

/// A symbol index `0..cardinality` for one variable.
pub type Symbol = u16;

/// Dense index of an observable variable in its host graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A set of variables of one host graph, iterated in ascending index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VarSet(u64);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    #[inline]
    pub fn from_bits(bits: u64) -> Self {
        VarSet(bits)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_VARS);
        if n == MAX_VARS {
            VarSet(u64::MAX)
        } else {
            VarSet((1u64 << n) - 1)
        }
    }

    #[inline]
    pub fn singleton(v: VarId) -> Self {
        VarSet(1u64 << v.0)
    }

    #[inline]
    pub fn contains(self, v: VarId) -> bool {
        v.0 < MAX_VARS && self.0 & (1u64 << v.0) != 0
    }

    #[inline]
    pub fn insert(&mut self, v: VarId) {
        self.0 |= 1u64 << v.0;
    }

    #[inline]
    pub fn remove(&mut self, v: VarId) {
        self.0 &= !(1u64 << v.0);
    }

    #[inline]
    pub fn with(self, v: VarId) -> Self {
        VarSet(self.0 | (1u64 << v.0))
    }

    #[inline]
    pub fn union(self, other: VarSet) -> Self {
        VarSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: VarSet) -> Self {
        VarSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: VarSet) -> Self {
        VarSet(self.0 & !other.0)
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, other: VarSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<VarId> {
        if self.0 == 0 {
            None
        } else {
            Some(VarId(self.0.trailing_zeros() as usize))
        }
    }

    pub fn iter(self) -> VarSetIter {
        VarSetIter(self.0)
    }

    pub fn to_vec(self) -> Vec<VarId> {
        self.iter().collect()
    }
}

impl FromIterator<VarId> for VarSet {
    fn from_iter<I: IntoIterator<Item = VarId>>(iter: I) -> Self {
        let mut s = VarSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl<'a> FromIterator<&'a VarId> for VarSet {
    fn from_iter<I: IntoIterator<Item = &'a VarId>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

impl IntoIterator for VarSet {
    type Item = VarId;
    type IntoIter = VarSetIter;
    fn into_iter(self) -> VarSetIter {
        self.iter()
    }
}

pub struct VarSetIter(u64);

impl Iterator for VarSetIter {
    type Item = VarId;

    #[inline]
    fn next(&mut self) -> Option<VarId> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(VarId(i))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for VarSetIter {}

/// A partial assignment of symbols to the variables of a host graph.
///
/// Values are stored densely by variable index; only members of `domain`
/// are meaningful.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    domain: VarSet,
    values: Vec<Symbol>,
}

impl Assignment {
    pub fn empty() -> Self {
        Assignment::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarId, Symbol)>>(pairs: I) -> Self {
        let mut a = Assignment::empty();
        for (v, s) in pairs {
            a.set(v, s);
        }
        a
    }

    pub fn domain(&self) -> VarSet {
        self.domain
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn get(&self, v: VarId) -> Option<Symbol> {
        if self.domain.contains(v) {
            Some(self.values[v.0])
        } else {
            None
        }
    }

    pub fn set(&mut self, v: VarId, s: Symbol) {
        if self.values.len() <= v.0 {
            self.values.resize(v.0 + 1, 0);
        }
        self.values[v.0] = s;
        self.domain.insert(v);
    }

    pub fn unset(&mut self, v: VarId) {
        self.domain.remove(v);
    }

    /// Pairs in ascending variable order.
    pub fn iter(&self) -> impl Iterator<Item = (VarId, Symbol)> + '_ {
        self.domain.iter().map(move |v| (v, self.values[v.0]))
    }

    /// Restriction to `vars ∩ domain`.
    pub fn restrict(&self, vars: VarSet) -> Assignment {
        Assignment::from_pairs(self.iter().filter(|(v, _)| vars.contains(*v)))
    }

    /// Union of two assignments; values of `other` win on overlap.
    pub fn merged(&self, other: &Assignment) -> Assignment {
        let mut out = self.clone();
        for (v, s) in other.iter() {
            out.set(v, s);
        }
        out
    }

    /// Dense value vector of length `n`; unassigned slots are 0.
    pub fn to_dense(&self, n: usize) -> Vec<Symbol> {
        let mut out = vec![0; n];
        for (v, s) in self.iter() {
            if v.0 < n {
                out[v.0] = s;
            }
        }
        out
    }

    /// Checks every assigned symbol against the given cardinalities.
    pub fn is_valid_for(&self, cards: &[usize]) -> bool {
        self.iter()
            .all(|(v, s)| v.0 < cards.len() && (s as usize) < cards[v.0])
    }
}

/// Enumerates every joint configuration of `vars`, the last listed variable
/// varying fastest.
pub struct ConfigIter<'a> {
    vars: &'a [VarId],
    cards: &'a [usize],
    current: Vec<Symbol>,
    done: bool,
}

impl<'a> ConfigIter<'a> {
    pub fn new(vars: &'a [VarId], cards: &'a [usize]) -> Self {
        let done = vars.iter().any(|v| cards[v.0] == 0);
        ConfigIter {
            vars,
            cards,
            current: vec![0; vars.len()],
            done,
        }
    }
}

impl Iterator for ConfigIter<'_> {
    type Item = Vec<Symbol>;

    fn next(&mut self) -> Option<Vec<Symbol>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut i = self.vars.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            let card = self.cards[self.vars[i].0];
            self.current[i] += 1;
            if (self.current[i] as usize) < card {
                break;
            }
            self.current[i] = 0;
        }
        Some(out)
    }
}
