//! Datasets, categorical variables and the partitions they induce.
//!
//! Row weights are kept as integer masses over a common denominator, so every
//! block probability is an exact rational. Floating point only appears once a
//! logarithm is taken in [`crate::entropy`].

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use indexmap::IndexMap;
use num_integer::Integer;
use num_rational::Ratio;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Exact probability.
pub type Prob = Ratio<u64>;

/// Label used for empty cells when they are kept as a category.
pub const NA_LABEL: &str = "<NA>";

/// Per-row probability masses, stored as integers over a shared total.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RowWeights {
    masses: Vec<u64>,
    total: u64,
}

impl RowWeights {
    /// Uniform weight `1/rows` on every row.
    pub fn uniform(rows: usize) -> Result<Self> {
        if rows == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(Self {
            masses: vec![1; rows],
            total: rows as u64,
        })
    }

    /// Arbitrary positive rational weights. They must sum to exactly one.
    pub fn from_rationals(weights: &[Prob]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut denom: u128 = 1;
        for (i, w) in weights.iter().enumerate() {
            if *w.numer() == 0 {
                return Err(Error::InvalidWeights(format!("row {i} has zero weight")));
            }
            denom = denom.lcm(&(*w.denom() as u128));
            if denom > u64::MAX as u128 {
                return Err(Error::InvalidWeights(
                    "common denominator overflows 64 bits".into(),
                ));
            }
        }
        let mut masses = Vec::with_capacity(weights.len());
        let mut sum: u128 = 0;
        for w in weights {
            let m = *w.numer() as u128 * (denom / *w.denom() as u128);
            sum += m;
            if sum > denom {
                return Err(Error::InvalidWeights("weights sum to more than 1".into()));
            }
            masses.push(m as u64);
        }
        if sum != denom {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {sum}/{denom}, expected 1"
            )));
        }
        Ok(Self {
            masses,
            total: denom as u64,
        })
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn mass(&self, row: usize) -> u64 {
        self.masses[row]
    }

    pub fn masses(&self) -> &[u64] {
        &self.masses
    }

    /// Denominator shared by all masses; masses sum to this value.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn weight(&self, row: usize) -> Prob {
        Ratio::new(self.masses[row], self.total)
    }

    pub fn is_uniform(&self) -> bool {
        self.masses.iter().all(|&m| m == self.masses[0])
    }
}

/// A categorical column: one label per row, coded against its alphabet.
///
/// Labels are NFC-normalized on construction. The alphabet holds exactly the
/// labels that occur, in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CategoricalVariable {
    name: String,
    codes: Vec<u32>,
    alphabet: Vec<String>,
    compound: bool,
}

impl CategoricalVariable {
    pub fn new<I, S>(name: impl Into<String>, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut index: HashMap<String, u32> = HashMap::new();
        let mut alphabet = Vec::new();
        let codes = labels
            .into_iter()
            .map(|l| {
                let label: String = l.as_ref().nfc().collect();
                *index.entry(label).or_insert_with_key(|k| {
                    alphabet.push(k.clone());
                    (alphabet.len() - 1) as u32
                })
            })
            .collect();
        Self {
            name: name.into(),
            codes,
            alphabet,
            compound: false,
        }
    }

    /// Single-label column of the given length.
    pub fn constant(name: impl Into<String>, label: &str, rows: usize) -> Self {
        Self::new(name, std::iter::repeat_n(label, rows))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn label(&self, row: usize) -> &str {
        &self.alphabet[self.codes[row] as usize]
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.codes
            .iter()
            .map(|&c| self.alphabet[c as usize].as_str())
    }

    /// Distinct labels in first-occurrence order.
    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    /// Alphabet index of each row's label.
    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    /// True when labels are encoded pairs produced by [`crate::algebra::joint`].
    pub fn is_compound(&self) -> bool {
        self.compound
    }

    pub(crate) fn into_compound(mut self) -> Self {
        self.compound = true;
        self
    }

    pub fn is_constant(&self) -> bool {
        self.alphabet.len() <= 1
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Applies a label map. Collisions merge categories, so pass an injective
    /// map to obtain an indiscernible copy.
    pub fn relabeled<F>(&self, name: impl Into<String>, mut f: F) -> Self
    where
        F: FnMut(&str) -> String,
    {
        let mapped: Vec<String> = self.alphabet.iter().map(|l| f(l)).collect();
        Self::new(name, self.codes.iter().map(|&c| &mapped[c as usize]))
    }

    /// Keeps only the rows for which `keep` is true.
    pub fn filter_rows(&self, keep: &[bool]) -> Self {
        let mut out = Self::new(
            self.name.clone(),
            self.labels().zip(keep).filter(|(_, &k)| k).map(|(l, _)| l),
        );
        out.compound = self.compound;
        out
    }
}

/// A finite sample space of weighted rows with named categorical columns.
#[derive(Debug, Clone)]
pub struct Dataset {
    weights: Arc<RowWeights>,
    columns: IndexMap<String, CategoricalVariable>,
}

impl Dataset {
    pub fn new(weights: RowWeights) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(Self {
            weights: Arc::new(weights),
            columns: IndexMap::new(),
        })
    }

    /// Empty dataset with uniformly weighted rows.
    pub fn uniform(rows: usize) -> Result<Self> {
        Self::new(RowWeights::uniform(rows)?)
    }

    /// Uniformly weighted dataset built from named label columns.
    pub fn from_columns<I, N, L, S>(columns: I) -> Result<Self>
    where
        I: IntoIterator<Item = (N, L)>,
        N: Into<String>,
        L: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let vars: Vec<CategoricalVariable> = columns
            .into_iter()
            .map(|(n, l)| CategoricalVariable::new(n, l))
            .collect();
        let rows = vars.first().map(|v| v.len()).ok_or(Error::EmptyDataset)?;
        let mut ds = Self::uniform(rows)?;
        for v in vars {
            ds.add_column(v)?;
        }
        Ok(ds)
    }

    pub fn add_column(&mut self, var: CategoricalVariable) -> Result<()> {
        if var.len() != self.row_count() {
            return Err(Error::Structural(format!(
                "column `{}` has {} entries, dataset has {} rows",
                var.name(),
                var.len(),
                self.row_count()
            )));
        }
        if self.columns.contains_key(var.name()) {
            return Err(Error::NameCollision(var.name().to_string()));
        }
        self.columns.insert(var.name().to_string(), var);
        Ok(())
    }

    pub fn with_column(mut self, var: CategoricalVariable) -> Result<Self> {
        self.add_column(var)?;
        Ok(self)
    }

    pub fn row_count(&self) -> usize {
        self.weights.len()
    }

    pub fn row_weight(&self, row: usize) -> Prob {
        self.weights.weight(row)
    }

    pub fn weights(&self) -> &Arc<RowWeights> {
        &self.weights
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns.keys().cloned().collect()
    }

    pub fn columns(&self) -> impl Iterator<Item = &CategoricalVariable> + '_ {
        self.columns.values()
    }

    pub fn column(&self, name: &str) -> Result<&CategoricalVariable> {
        self.columns
            .get(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn column_at(&self, index: usize) -> Option<&CategoricalVariable> {
        self.columns.get_index(index).map(|(_, v)| v)
    }

    /// Partition induced by the named column.
    pub fn partition(&self, name: &str) -> Result<Partition> {
        induced_partition(self.column(name)?, self)
    }

    /// Copy containing only the rows where `keep` is true, reweighted uniformly.
    pub fn retain_rows(&self, keep: &[bool]) -> Result<Self> {
        if keep.len() != self.row_count() {
            return Err(Error::Structural("row mask length mismatch".into()));
        }
        let rows = keep.iter().filter(|&&k| k).count();
        let mut out = Self::uniform(rows)?;
        for v in self.columns() {
            out.add_column(v.filter_rows(keep))?;
        }
        Ok(out)
    }
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        *self.weights == *other.weights
            && self.columns.len() == other.columns.len()
            && self.columns.iter().zip(&other.columns).all(|(a, b)| a == b)
    }
}

/// A finite partition of the weighted rows.
///
/// Blocks are identified by the first row they contain; `block_of[row]` gives
/// the block index, numbered in first-occurrence order. Two partitions of the
/// same rows are equal as sets of blocks exactly when their `block_of`
/// vectors are equal.
#[derive(Debug, Clone)]
pub struct Partition {
    weights: Arc<RowWeights>,
    block_of: Vec<u32>,
    masses: Vec<u64>,
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.weights, &other.weights) || self.weights == other.weights)
            && self.block_of == other.block_of
    }
}

impl Eq for Partition {}

impl Partition {
    /// The trivial partition with one block holding every row.
    pub fn trivial(weights: Arc<RowWeights>) -> Self {
        let rows = weights.len();
        let total = weights.total();
        Self {
            weights,
            block_of: vec![0; rows],
            masses: vec![total],
        }
    }

    /// Partition whose blocks are the level sets of `labels`.
    pub fn from_labels<T: Hash + Eq>(weights: Arc<RowWeights>, labels: &[T]) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::Structural(format!(
                "{} labels for {} rows",
                labels.len(),
                weights.len()
            )));
        }
        let mut ids: HashMap<&T, u32> = HashMap::new();
        let mut masses = Vec::new();
        let block_of = labels
            .iter()
            .enumerate()
            .map(|(row, l)| {
                let next = ids.len() as u32;
                let id = *ids.entry(l).or_insert(next);
                if id == next {
                    masses.push(0);
                }
                masses[id as usize] += weights.mass(row);
                id
            })
            .collect();
        Ok(Self {
            weights,
            block_of,
            masses,
        })
    }

    /// Partition from explicit row-index blocks. Blocks must be nonempty,
    /// disjoint and cover every row.
    pub fn from_blocks(weights: Arc<RowWeights>, blocks: &[Vec<usize>]) -> Result<Self> {
        let rows = weights.len();
        let mut labels = vec![usize::MAX; rows];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Structural(format!("block {b} is empty")));
            }
            for &r in block {
                if r >= rows {
                    return Err(Error::Structural(format!("row {r} out of range")));
                }
                if labels[r] != usize::MAX {
                    return Err(Error::Structural(format!("row {r} in two blocks")));
                }
                labels[r] = b;
            }
        }
        if let Some(r) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Structural(format!("row {r} not covered")));
        }
        Self::from_labels(weights, &labels)
    }

    pub fn weights(&self) -> &Arc<RowWeights> {
        &self.weights
    }

    pub fn row_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_count(&self) -> usize {
        self.masses.len()
    }

    /// Block index of every row (first-occurrence numbering).
    pub fn block_of(&self) -> &[u32] {
        &self.block_of
    }

    /// Integer mass of each block; divide by [`Self::total_mass`] for probabilities.
    pub fn block_masses(&self) -> &[u64] {
        &self.masses
    }

    pub fn total_mass(&self) -> u64 {
        self.weights.total()
    }

    pub fn block_probs(&self) -> Vec<Prob> {
        let total = self.total_mass();
        self.masses.iter().map(|&m| Ratio::new(m, total)).collect()
    }

    /// Row indices of each block, in block order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (row, &b) in self.block_of.iter().enumerate() {
            blocks[b as usize].push(row);
        }
        blocks
    }

    pub fn is_trivial(&self) -> bool {
        self.block_count() == 1
    }

    pub(crate) fn check_universe(&self, other: &Partition) -> Result<()> {
        if Arc::ptr_eq(&self.weights, &other.weights) || self.weights == other.weights {
            Ok(())
        } else {
            Err(Error::Structural(
                "partitions are over different row universes".into(),
            ))
        }
    }

    pub fn canonical(&self) -> CanonicalClass {
        let mut blocks = self.blocks();
        // Disjoint blocks have distinct first rows, so this order is total.
        blocks.sort_by(|a, b| {
            let ma = self.masses[self.block_of[a[0]] as usize];
            let mb = self.masses[self.block_of[b[0]] as usize];
            mb.cmp(&ma).then(a[0].cmp(&b[0]))
        });
        let total = self.total_mass();
        let signature = blocks
            .iter()
            .map(|b| Ratio::new(self.masses[self.block_of[b[0]] as usize], total))
            .collect();
        CanonicalClass { blocks, signature }
    }
}

/// Partition induced by a column: one block per occurring label.
pub fn induced_partition(var: &CategoricalVariable, dataset: &Dataset) -> Result<Partition> {
    if var.len() != dataset.row_count() {
        return Err(Error::Structural(format!(
            "variable `{}` has {} entries, dataset has {} rows",
            var.name(),
            var.len(),
            dataset.row_count()
        )));
    }
    Partition::from_labels(dataset.weights().clone(), var.codes())
}

/// Common refinement: all nonempty pairwise block intersections.
pub fn join(p: &Partition, q: &Partition) -> Result<Partition> {
    p.check_universe(q)?;
    let pairs: Vec<(u32, u32)> = p
        .block_of
        .iter()
        .copied()
        .zip(q.block_of.iter().copied())
        .collect();
    Partition::from_labels(p.weights.clone(), &pairs)
}

/// True when every block of `q` lies inside a block of `p` (`p ≤ q`).
pub fn is_coarser(p: &Partition, q: &Partition) -> Result<bool> {
    p.check_universe(q)?;
    let mut host = vec![u32::MAX; q.block_count()];
    for (&pb, &qb) in p.block_of.iter().zip(&q.block_of) {
        let h = &mut host[qb as usize];
        if *h == u32::MAX {
            *h = pb;
        } else if *h != pb {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Joint probability masses of two variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    row_alphabet: Vec<String>,
    col_alphabet: Vec<String>,
    masses: Vec<Vec<u64>>,
    total: u64,
}

impl ContingencyTable {
    pub fn row_alphabet(&self) -> &[String] {
        &self.row_alphabet
    }

    pub fn col_alphabet(&self) -> &[String] {
        &self.col_alphabet
    }

    pub fn cell(&self, i: usize, j: usize) -> Prob {
        Ratio::new(self.masses[i][j], self.total)
    }

    /// Cell probability addressed by labels.
    pub fn get(&self, row_label: &str, col_label: &str) -> Option<Prob> {
        let i = self.row_alphabet.iter().position(|l| l == row_label)?;
        let j = self.col_alphabet.iter().position(|l| l == col_label)?;
        Some(self.cell(i, j))
    }

    /// Raw integer masses; with uniform weights these are row counts.
    pub fn masses(&self) -> &[Vec<u64>] {
        &self.masses
    }

    pub fn total_mass(&self) -> u64 {
        self.total
    }

    pub fn row_marginals(&self) -> Vec<Prob> {
        self.masses
            .iter()
            .map(|row| Ratio::new(row.iter().sum(), self.total))
            .collect()
    }

    pub fn col_marginals(&self) -> Vec<Prob> {
        (0..self.col_alphabet.len())
            .map(|j| Ratio::new(self.masses.iter().map(|r| r[j]).sum(), self.total))
            .collect()
    }

    pub fn total_probability(&self) -> Prob {
        Ratio::new(self.masses.iter().flatten().sum(), self.total)
    }
}

pub fn contingency(
    x: &CategoricalVariable,
    y: &CategoricalVariable,
    dataset: &Dataset,
) -> Result<ContingencyTable> {
    for v in [x, y] {
        if v.len() != dataset.row_count() {
            return Err(Error::Structural(format!(
                "variable `{}` has {} entries, dataset has {} rows",
                v.name(),
                v.len(),
                dataset.row_count()
            )));
        }
    }
    let w = dataset.weights();
    let mut masses = vec![vec![0u64; y.alphabet().len()]; x.alphabet().len()];
    for (row, (&i, &j)) in x.codes().iter().zip(y.codes()).enumerate() {
        masses[i as usize][j as usize] += w.mass(row);
    }
    Ok(ContingencyTable {
        row_alphabet: x.alphabet().to_vec(),
        col_alphabet: y.alphabet().to_vec(),
        masses,
        total: w.total(),
    })
}

/// Canonical representative of an indiscernibility class.
///
/// Blocks are sorted by descending probability, then by smallest row. Equality
/// of two classes is equality of the induced partitions; [`Self::signature`]
/// carries the weaker histogram-only information.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalClass {
    blocks: Vec<Vec<usize>>,
    signature: Vec<Prob>,
}

impl CanonicalClass {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Block probabilities in descending order.
    pub fn signature(&self) -> &[Prob] {
        &self.signature
    }

    /// Same histogram up to relabeling, regardless of which rows carry it.
    pub fn same_signature(&self, other: &Self) -> bool {
        self.signature == other.signature
    }
}

impl fmt::Display for CanonicalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            let rows: Vec<String> = block.iter().map(|r| r.to_string()).collect();
            write!(f, "{{{}}}@{}", rows.join(","), self.signature[i])?;
        }
        Ok(())
    }
}

pub fn canonicalize(var: &CategoricalVariable, dataset: &Dataset) -> Result<CanonicalClass> {
    Ok(induced_partition(var, dataset)?.canonical())
}
