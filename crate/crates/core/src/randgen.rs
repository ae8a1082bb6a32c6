//! Seeded dataset generator for property runs.
//!
//! The bit stream is SplitMix64, fully specified here so that any other
//! implementation can reproduce a witness from its seed:
//!
//! ```text
//! state <- state + 0x9E3779B97F4A7C15            (wrapping)
//! z <- state
//! z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9       (wrapping)
//! z <- (z ^ (z >> 27)) * 0x94D049BB133111EB       (wrapping)
//! output z ^ (z >> 31)
//! ```
//!
//! A draw from `0..n` rejects raw outputs below `(2^64 - n) mod n` and
//! returns `x mod n` for the first accepted `x`. A draw from an inclusive
//! range `lo..=hi` is `lo + below(hi - lo + 1)`.
//!
//! Column `i` is named `c{i}`. Labels are single lowercase letters
//! `a, b, c, ...` (`s26`, `s27`, ... past `z`); derived columns get a
//! per-column prefix so their label sets never collide with their source.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::model::{CategoricalVariable, Dataset};

/// SplitMix64 bit generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    pub fn in_range(&mut self, range: &RangeInclusive<usize>) -> usize {
        let span = (range.end() - range.start()) as u64 + 1;
        range.start() + self.below(span) as usize
    }

    pub fn coin(&mut self) -> bool {
        self.below(2) == 1
    }
}

/// How generated columns relate to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationMode {
    /// Every column drawn independently.
    Independent,
    /// Odd columns are coarsenings of the preceding column, so
    /// `c{2k+1} ≤ c{2k}` in the refinement order.
    Refined,
    /// Each column after the first is a relabeled copy of its predecessor
    /// with, half the time, one row's label redrawn.
    NoisyCopy,
    /// Each column after the first is, at random: fresh, constant, a
    /// relabeling, a coarsening, a noisy copy, or the joint of earlier columns.
    Arbitrary,
}

impl std::str::FromStr for CorrelationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(Self::Independent),
            "refined" => Ok(Self::Refined),
            "noisy-copy" => Ok(Self::NoisyCopy),
            "arbitrary" => Ok(Self::Arbitrary),
            other => Err(Error::Config(format!("unknown correlation mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub rows: RangeInclusive<usize>,
    pub alphabet_size: RangeInclusive<usize>,
    pub mode: CorrelationMode,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            rows: 2..=12,
            alphabet_size: 1..=4,
            mode: CorrelationMode::Arbitrary,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn mode(mut self, mode: CorrelationMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() || *self.rows.start() == 0 {
            return Err(Error::Config(format!(
                "row range {:?} must be nonempty and start at 1 or more",
                self.rows
            )));
        }
        if self.alphabet_size.is_empty() || *self.alphabet_size.start() == 0 {
            return Err(Error::Config(format!(
                "alphabet range {:?} must be nonempty and start at 1 or more",
                self.alphabet_size
            )));
        }
        Ok(())
    }
}

fn symbol(prefix: &str, i: usize) -> String {
    if i < 26 {
        format!("{prefix}{}", (b'a' + i as u8) as char)
    } else {
        format!("{prefix}s{i}")
    }
}

struct Builder<'a> {
    rng: SplitMix64,
    cfg: &'a GenConfig,
    rows: usize,
    columns: Vec<Vec<usize>>,
    prefixes: Vec<String>,
}

impl Builder<'_> {
    fn fresh(&mut self) -> Vec<usize> {
        let k = self.rng.in_range(&self.cfg.alphabet_size) as u64;
        (0..self.rows).map(|_| self.rng.below(k) as usize).collect()
    }

    fn alphabet_bound(src: &[usize]) -> usize {
        src.iter().max().map_or(1, |m| m + 1)
    }

    /// Random map of source codes into a smaller code set.
    fn coarsen(&mut self, src: &[usize]) -> Vec<usize> {
        let k = self.rng.in_range(&self.cfg.alphabet_size) as u64;
        let map: Vec<usize> = (0..Self::alphabet_bound(src))
            .map(|_| self.rng.below(k) as usize)
            .collect();
        src.iter().map(|&c| map[c]).collect()
    }

    /// Injective permutation of source codes.
    fn relabel(&mut self, src: &[usize]) -> Vec<usize> {
        let n = Self::alphabet_bound(src);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.rng.below(i as u64 + 1) as usize;
            perm.swap(i, j);
        }
        src.iter().map(|&c| perm[c]).collect()
    }

    fn noisy_copy(&mut self, src: &[usize]) -> Vec<usize> {
        let mut out = self.relabel(src);
        if self.rng.coin() {
            let row = self.rng.below(self.rows as u64) as usize;
            let k = *self.cfg.alphabet_size.end() as u64;
            out[row] = self.rng.below(k) as usize;
        }
        out
    }

    fn joint(&mut self, a: &[usize], b: &[usize]) -> Vec<usize> {
        let width = Self::alphabet_bound(b);
        a.iter().zip(b).map(|(&x, &y)| x * width + y).collect()
    }

    fn pick_earlier(&mut self) -> Vec<usize> {
        let i = self.rng.below(self.columns.len() as u64) as usize;
        self.columns[i].clone()
    }

    fn next_column(&mut self, index: usize) -> Vec<usize> {
        if index == 0 {
            return self.fresh();
        }
        match self.cfg.mode {
            CorrelationMode::Independent => self.fresh(),
            CorrelationMode::Refined => {
                if index % 2 == 1 {
                    let src = self.columns[index - 1].clone();
                    self.coarsen(&src)
                } else {
                    self.fresh()
                }
            }
            CorrelationMode::NoisyCopy => {
                let src = self.columns[index - 1].clone();
                self.noisy_copy(&src)
            }
            CorrelationMode::Arbitrary => match self.rng.below(6) {
                0 => self.fresh(),
                1 => vec![0; self.rows],
                2 => {
                    let src = self.pick_earlier();
                    self.relabel(&src)
                }
                3 => {
                    let src = self.pick_earlier();
                    self.coarsen(&src)
                }
                4 => {
                    let src = self.pick_earlier();
                    self.noisy_copy(&src)
                }
                _ => {
                    let a = self.pick_earlier();
                    let b = self.pick_earlier();
                    self.joint(&a, &b)
                }
            },
        }
    }
}

/// Largest column count for which [`Coverage::Auto`] enumerates every tuple.
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// Which index tuples a validator visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// Every tuple up to [`EXHAUSTIVE_LIMIT`] columns, seeded samples above.
    Auto {
        seed: u64,
        samples: usize,
    },
    Exhaustive,
    Sampled {
        seed: u64,
        samples: usize,
    },
}

impl Default for Coverage {
    fn default() -> Self {
        Coverage::Auto {
            seed: 0,
            samples: 10_000,
        }
    }
}

impl Coverage {
    pub fn is_exhaustive_for(&self, n: usize) -> bool {
        match self {
            Coverage::Exhaustive => true,
            Coverage::Auto { .. } => n <= EXHAUSTIVE_LIMIT,
            Coverage::Sampled { .. } => false,
        }
    }

    /// Index tuples of length `arity` over `0..n`. Exhaustive enumeration is
    /// lexicographic; sampled tuples draw each coordinate with [`SplitMix64`].
    pub fn tuples(&self, n: usize, arity: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return Vec::new();
        }
        if self.is_exhaustive_for(n) {
            let total = n.pow(arity as u32);
            return (0..total)
                .map(|mut k| {
                    let mut t = vec![0; arity];
                    for slot in t.iter_mut().rev() {
                        *slot = k % n;
                        k /= n;
                    }
                    t
                })
                .collect();
        }
        let (seed, samples) = match *self {
            Coverage::Auto { seed, samples } | Coverage::Sampled { seed, samples } => {
                (seed, samples)
            }
            Coverage::Exhaustive => unreachable!(),
        };
        let mut rng = SplitMix64::new(seed);
        (0..samples)
            .map(|_| (0..arity).map(|_| rng.below(n as u64) as usize).collect())
            .collect()
    }
}

/// Generates a dataset with `columns` uniformly weighted columns.
pub fn gen_dataset(cfg: &GenConfig, columns: usize) -> Result<Dataset> {
    cfg.validate()?;
    if columns == 0 {
        return Err(Error::Config("at least one column is required".into()));
    }
    let mut rng = SplitMix64::new(cfg.seed);
    let rows = rng.in_range(&cfg.rows);
    let mut b = Builder {
        rng,
        cfg,
        rows,
        columns: Vec::with_capacity(columns),
        prefixes: Vec::with_capacity(columns),
    };
    for i in 0..columns {
        let col = b.next_column(i);
        b.columns.push(col);
        // Column 0 uses bare letters; later columns get a distinct prefix.
        b.prefixes.push(if i == 0 {
            String::new()
        } else {
            format!("{i}")
        });
    }
    let mut ds = Dataset::uniform(rows)?;
    for (i, (codes, prefix)) in b.columns.iter().zip(&b.prefixes).enumerate() {
        let labels = codes.iter().map(|&c| symbol(prefix, c));
        ds.add_column(CategoricalVariable::new(format!("c{i}"), labels))?;
    }
    Ok(ds)
}

/// Column count used for `seed` in a [`population`]: 3, 4 or 5.
pub fn columns_for_seed(seed: u64) -> usize {
    3 + (seed % 3) as usize
}

/// `count` datasets for consecutive seeds starting at `first_seed`, with the
/// default row and alphabet ranges and [`columns_for_seed`] columns.
pub fn population(
    first_seed: u64,
    count: usize,
    mode: CorrelationMode,
) -> impl Iterator<Item = (u64, Result<Dataset>)> {
    (0..count as u64).map(move |k| {
        let seed = first_seed.wrapping_add(k);
        let cfg = GenConfig::with_seed(seed).mode(mode);
        (seed, gen_dataset(&cfg, columns_for_seed(seed)))
    })
}

/// Index pairs `(coarser, finer)` that [`CorrelationMode::Refined`]
/// guarantees for a dataset with `columns` columns.
pub fn refined_pairs(columns: usize) -> Vec<(usize, usize)> {
    (1..columns).step_by(2).map(|i| (i, i - 1)).collect()
}
