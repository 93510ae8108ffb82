//! Seeded train/dev/test partitioning.
//!
//! The shuffle is a Fisher-Yates pass driven by `ChaCha8Rng::seed_from_u64`
//! (rand_chacha 0.3), with indices drawn by rejection sampling on raw
//! `next_u64` output. Both the generator stream and the sampling are pinned
//! here, so a seed produces the same split on every platform.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Origin, PairInstance};
use crate::error::{Error, Result};

/// Train/dev/test proportions; each positive, summing to 1 within 1e-6.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratios([f64; 3]);

impl Ratios {
    pub fn new(train: f64, dev: f64, test: f64) -> Result<Self> {
        let r = [train, dev, test];
        let ok = r.iter().all(|x| x.is_finite() && *x > 0.0)
            && (r.iter().sum::<f64>() - 1.0).abs() <= 1e-6;
        if ok {
            Ok(Ratios(r))
        } else {
            Err(Error::InvalidRatios(r))
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    /// Bucket sizes for `n` items by largest remainder; ties in the
    /// fractional part go to the earlier bucket.
    pub fn sizes(&self, n: usize) -> [usize; 3] {
        let quotas = self.0.map(|r| r * n as f64);
        let mut sizes = quotas.map(|q| q.floor() as usize);
        let assigned: usize = sizes.iter().sum();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            let fa = quotas[a] - quotas[a].floor();
            let fb = quotas[b] - quotas[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for &bucket in order.iter().take(n.saturating_sub(assigned)) {
            sizes[bucket] += 1;
        }
        sizes
    }
}

impl Default for Ratios {
    fn default() -> Self {
        Ratios([0.6, 0.2, 0.2])
    }
}

impl FromStr for Ratios {
    type Err = String;
    /// `"0.6,0.2,0.2"` or `"6:2:2"` (normalized).
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = if s.contains(':') {
            s.split(':').collect()
        } else {
            s.split(',').collect()
        };
        let values = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<Vec<f64>, String>>()?;
        let [a, b, c] = values[..] else {
            return Err(format!("expected three ratios, got {}", values.len()));
        };
        let total = if s.contains(':') { a + b + c } else { 1.0 };
        Ratios::new(a / total, b / total, c / total).map_err(|e| e.to_string())
    }
}

impl fmt::Display for Ratios {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitMode {
    /// Shuffle instances individually.
    #[default]
    InstanceLevel,
    /// Shuffle slugs and keep each slug's instances together. Distinct-corpus
    /// instances have no slug and are treated as singleton units.
    SlugLevel,
}

impl SplitMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitMode::InstanceLevel => "instance_level",
            SplitMode::SlugLevel => "slug_level",
        }
    }
}

impl FromStr for SplitMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "instance" | "instance_level" => Ok(SplitMode::InstanceLevel),
            "slug" | "slug_level" => Ok(SplitMode::SlugLevel),
            _ => Err(format!(
                "unknown split mode {s:?} (instance_level|slug_level)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Split {
    pub train: Vec<PairInstance>,
    pub dev: Vec<PairInstance>,
    pub test: Vec<PairInstance>,
}

impl Split {
    pub const BUCKETS: [&'static str; 3] = ["train", "dev", "test"];

    pub fn buckets(&self) -> [(&'static str, &[PairInstance]); 3] {
        [
            ("train", &self.train),
            ("dev", &self.dev),
            ("test", &self.test),
        ]
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.dev.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    let n = n as u64;
    let limit = u64::MAX - u64::MAX % n;
    loop {
        let v = rng.next_u64();
        if v < limit {
            return (v % n) as usize;
        }
    }
}

/// Fisher-Yates permutation of `0..n`.
pub(crate) fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = below(&mut rng, i + 1);
        idx.swap(i, j);
    }
    idx
}

/// Partitions `instances` into train/dev/test. In instance-level mode each
/// bucket is within one instance of its quota; in slug-level mode the quota
/// applies to slugs.
pub fn split(instances: &[PairInstance], ratios: Ratios, seed: u64, mode: SplitMode) -> Split {
    // Units are groups of instance indices that must land together.
    let units: Vec<Vec<usize>> = match mode {
        SplitMode::InstanceLevel => (0..instances.len()).map(|i| vec![i]).collect(),
        SplitMode::SlugLevel => {
            let mut index: HashMap<&str, usize> = HashMap::new();
            let mut units: Vec<Vec<usize>> = Vec::new();
            for (i, inst) in instances.iter().enumerate() {
                match &inst.origin {
                    Origin::Parallel(slug) => {
                        let u = *index.entry(slug.as_str()).or_insert_with(|| {
                            units.push(Vec::new());
                            units.len() - 1
                        });
                        units[u].push(i);
                    }
                    Origin::Distinct => units.push(vec![i]),
                }
            }
            units
        }
    };

    let order = shuffled_indices(units.len(), seed);
    let [n_train, n_dev, _] = ratios.sizes(units.len());
    let mut out = Split::default();
    for (pos, &u) in order.iter().enumerate() {
        let bucket = if pos < n_train {
            &mut out.train
        } else if pos < n_train + n_dev {
            &mut out.dev
        } else {
            &mut out.test
        };
        bucket.extend(units[u].iter().map(|&i| instances[i].clone()));
    }
    out
}
