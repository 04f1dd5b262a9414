//! Independence oracles over a dense ground set `0..n`.
//!
//! Two concrete matroids ship here: [`PartitionMatroid`] and [`UniformMatroid`].
//! Anything else can plug in by implementing [`Matroid`]; the default
//! [`Matroid::tracker`] then falls back to repeated `is_independent` queries.

use crate::error::{invalid, Error, Result};

/// Independence structure over the ground set `0..ground_size()`.
pub trait Matroid: Send + Sync {
    fn ground_size(&self) -> usize;

    /// Size of the largest independent set.
    fn rank(&self) -> usize;

    /// Membership test for the family of independent sets.
    fn is_independent(&self, set: &[usize]) -> Result<bool>;

    /// Whether `set + e` is independent. `set` must itself be independent.
    fn can_extend(&self, set: &[usize], e: usize) -> Result<bool> {
        check_ids(set, self.ground_size())?;
        check_id(e, self.ground_size())?;
        if set.contains(&e) {
            return Err(Error::DuplicateElement { id: e });
        }
        debug_assert!(self.is_independent(set)?, "can_extend called on a dependent set");
        let mut extended = Vec::with_capacity(set.len() + 1);
        extended.extend_from_slice(set);
        extended.push(e);
        self.is_independent(&extended)
    }

    /// Minimum number of independent sets whose union is `set`.
    ///
    /// Only partition matroids have a closed form; other implementations
    /// report the operation as unsupported.
    fn violation_ratio(&self, _set: &[usize]) -> Result<usize> {
        Err(Error::Unsupported(
            "violation ratio is only available for partition matroids",
        ))
    }

    fn as_partition(&self) -> Option<&PartitionMatroid> {
        None
    }

    /// Incremental independence state for growing a set from empty.
    fn tracker(&self) -> Box<dyn IndependenceTracker + '_> {
        Box::new(OracleTracker {
            matroid: self.as_dyn(),
            members: Vec::new(),
        })
    }

    #[doc(hidden)]
    fn as_dyn(&self) -> &dyn Matroid;
}

/// An independent set under construction.
pub trait IndependenceTracker {
    /// Whether `e` can be added while staying independent. False for members.
    fn can_add(&self, e: usize) -> bool;
    fn add(&mut self, e: usize);
    fn members(&self) -> &[usize];
    fn len(&self) -> usize {
        self.members().len()
    }
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

struct OracleTracker<'a> {
    matroid: &'a dyn Matroid,
    members: Vec<usize>,
}

impl IndependenceTracker for OracleTracker<'_> {
    fn can_add(&self, e: usize) -> bool {
        !self.members.contains(&e) && self.matroid.can_extend(&self.members, e).unwrap_or(false)
    }

    fn add(&mut self, e: usize) {
        self.members.push(e);
    }

    fn members(&self) -> &[usize] {
        &self.members
    }
}

pub(crate) fn check_id(e: usize, n: usize) -> Result<()> {
    if e < n {
        Ok(())
    } else {
        Err(Error::UnknownElement { id: e, n })
    }
}

pub(crate) fn check_ids(set: &[usize], n: usize) -> Result<()> {
    set.iter().try_for_each(|&e| check_id(e, n))
}

/// At most `budgets[j]` elements from each part `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMatroid {
    part_of: Vec<usize>,
    budgets: Vec<usize>,
    parts: Vec<Vec<usize>>,
}

impl PartitionMatroid {
    /// `part_of[e]` is the part index of element `e`. Every part must be
    /// non-empty and every budget at least one.
    pub fn new(part_of: Vec<usize>, budgets: Vec<usize>) -> Result<Self> {
        if let Some(j) = budgets.iter().position(|&b| b == 0) {
            return Err(invalid("budgets", format!("part {j} has budget 0")));
        }
        Self::build(part_of, budgets)
    }

    /// Builds from explicit parts, e.g. `[[0, 1], [2, 3]]`.
    pub fn from_parts(parts: &[Vec<usize>], budgets: Vec<usize>) -> Result<Self> {
        let n: usize = parts.iter().map(Vec::len).sum();
        let mut part_of = vec![usize::MAX; n];
        for (j, part) in parts.iter().enumerate() {
            for &e in part {
                check_id(e, n)?;
                if part_of[e] != usize::MAX {
                    return Err(invalid("parts", format!("element {e} appears in two parts")));
                }
                part_of[e] = j;
            }
        }
        Self::new(part_of, budgets)
    }

    /// Same parts with different capacities. Zero capacities are allowed,
    /// which the per-round baseline constraints need.
    pub fn with_budgets(&self, budgets: Vec<usize>) -> Result<Self> {
        if budgets.len() != self.budgets.len() {
            return Err(invalid(
                "budgets",
                format!("expected {} budgets, got {}", self.budgets.len(), budgets.len()),
            ));
        }
        Ok(Self {
            part_of: self.part_of.clone(),
            budgets,
            parts: self.parts.clone(),
        })
    }

    fn build(part_of: Vec<usize>, budgets: Vec<usize>) -> Result<Self> {
        if part_of.is_empty() {
            return Err(invalid("part_of", "ground set must be non-empty"));
        }
        let q = budgets.len();
        let mut parts = vec![Vec::new(); q];
        for (e, &j) in part_of.iter().enumerate() {
            if j >= q {
                return Err(invalid("part_of", format!("element {e} assigned to part {j} of {q}")));
            }
            parts[j].push(e);
        }
        if let Some(j) = parts.iter().position(Vec::is_empty) {
            return Err(invalid("part_of", format!("part {j} is empty")));
        }
        Ok(Self {
            part_of,
            budgets,
            parts,
        })
    }

    pub fn num_parts(&self) -> usize {
        self.budgets.len()
    }

    pub fn part_of(&self, e: usize) -> usize {
        self.part_of[e]
    }

    pub fn budget(&self, j: usize) -> usize {
        self.budgets[j]
    }

    pub fn budgets(&self) -> &[usize] {
        &self.budgets
    }

    /// Elements of part `j` in increasing id order.
    pub fn part(&self, j: usize) -> &[usize] {
        &self.parts[j]
    }

    /// `|set ∩ P_j|` for every part.
    pub fn part_counts(&self, set: &[usize]) -> Result<Vec<usize>> {
        check_ids(set, self.part_of.len())?;
        let mut counts = vec![0; self.num_parts()];
        for &e in set {
            counts[self.part_of[e]] += 1;
        }
        Ok(counts)
    }

    pub fn partition_tracker(&self) -> PartitionTracker<'_> {
        PartitionTracker {
            matroid: self,
            counts: vec![0; self.num_parts()],
            member: vec![false; self.part_of.len()],
            members: Vec::new(),
        }
    }
}

impl Matroid for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.part_of.len()
    }

    fn rank(&self) -> usize {
        self.parts.iter().zip(&self.budgets).map(|(p, &b)| b.min(p.len())).sum()
    }

    fn is_independent(&self, set: &[usize]) -> Result<bool> {
        let counts = self.part_counts(set)?;
        Ok(counts.iter().zip(&self.budgets).all(|(c, b)| c <= b))
    }

    fn can_extend(&self, set: &[usize], e: usize) -> Result<bool> {
        check_id(e, self.ground_size())?;
        if set.contains(&e) {
            return Err(Error::DuplicateElement { id: e });
        }
        let counts = self.part_counts(set)?;
        debug_assert!(counts.iter().zip(&self.budgets).all(|(c, b)| c <= b));
        let j = self.part_of[e];
        Ok(counts[j] < self.budgets[j])
    }

    fn violation_ratio(&self, set: &[usize]) -> Result<usize> {
        let counts = self.part_counts(set)?;
        Ok(counts
            .iter()
            .zip(&self.budgets)
            .map(|(&c, &b)| match (c, b) {
                (0, _) => 0,
                // an occupied zero-capacity part cannot be covered at all
                (_, 0) => usize::MAX,
                (c, b) => c.div_ceil(b),
            })
            .max()
            .unwrap_or(0))
    }

    fn as_partition(&self) -> Option<&PartitionMatroid> {
        Some(self)
    }

    fn tracker(&self) -> Box<dyn IndependenceTracker + '_> {
        Box::new(self.partition_tracker())
    }

    fn as_dyn(&self) -> &dyn Matroid {
        self
    }
}

/// O(1) extension checks via per-part counters.
pub struct PartitionTracker<'a> {
    matroid: &'a PartitionMatroid,
    counts: Vec<usize>,
    member: Vec<bool>,
    members: Vec<usize>,
}

impl PartitionTracker<'_> {
    pub fn count(&self, j: usize) -> usize {
        self.counts[j]
    }

    pub fn contains(&self, e: usize) -> bool {
        self.member[e]
    }

    /// Part `j` still has capacity.
    pub fn has_room(&self, j: usize) -> bool {
        self.counts[j] < self.matroid.budgets[j]
    }
}

impl IndependenceTracker for PartitionTracker<'_> {
    fn can_add(&self, e: usize) -> bool {
        !self.member[e] && self.has_room(self.matroid.part_of[e])
    }

    fn add(&mut self, e: usize) {
        debug_assert!(self.can_add(e));
        self.counts[self.matroid.part_of[e]] += 1;
        self.member[e] = true;
        self.members.push(e);
    }

    fn members(&self) -> &[usize] {
        &self.members
    }
}

/// Cardinality constraint `|S| ≤ capacity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformMatroid {
    n: usize,
    capacity: usize,
}

impl UniformMatroid {
    pub fn new(n: usize, capacity: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "ground set must be non-empty"));
        }
        Ok(Self { n, capacity })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}

impl Matroid for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn rank(&self) -> usize {
        self.capacity
    }

    fn is_independent(&self, set: &[usize]) -> Result<bool> {
        check_ids(set, self.n)?;
        Ok(set.len() <= self.capacity)
    }

    fn can_extend(&self, set: &[usize], e: usize) -> Result<bool> {
        check_ids(set, self.n)?;
        check_id(e, self.n)?;
        if set.contains(&e) {
            return Err(Error::DuplicateElement { id: e });
        }
        Ok(set.len() < self.capacity)
    }

    fn tracker(&self) -> Box<dyn IndependenceTracker + '_> {
        Box::new(UniformTracker {
            capacity: self.capacity,
            member: vec![false; self.n],
            members: Vec::new(),
        })
    }

    fn as_dyn(&self) -> &dyn Matroid {
        self
    }
}

struct UniformTracker {
    capacity: usize,
    member: Vec<bool>,
    members: Vec<usize>,
}

impl IndependenceTracker for UniformTracker {
    fn can_add(&self, e: usize) -> bool {
        !self.member[e] && self.members.len() < self.capacity
    }

    fn add(&mut self, e: usize) {
        self.member[e] = true;
        self.members.push(e);
    }

    fn members(&self) -> &[usize] {
        &self.members
    }
}
