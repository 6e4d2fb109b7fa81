//! Compares the naive quadratic LCS, Hunt–Szymanski and the hierarchical aligner
//! on identical inputs, grouped by original sentence length.

pub mod synth;

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use tagalign_core::{align_tokens, lcs_dp_oracle, lcs_hunt_szymanski, Normalizer, Tier};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchPair {
    pub orig: Vec<String>,
    pub pred: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("benchmark corpus is empty")]
    EmptyCorpus,
    #[error("repetitions must be at least 1")]
    NoRepetitions,
    #[error("bucket edges must be strictly increasing and non-empty")]
    BadBuckets,
    #[error("pair {index}: alignment lengths differ (naive {naive}, hunt-szymanski {hs}, hierarchical {hier})")]
    Mismatch {
        index: usize,
        naive: usize,
        hs: usize,
        hier: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    NaiveDp,
    HuntSzymanski,
    Hierarchical,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::NaiveDp,
        Algorithm::HuntSzymanski,
        Algorithm::Hierarchical,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::NaiveDp => "LCS O(N^2)",
            Algorithm::HuntSzymanski => "LCS O(N log N)",
            Algorithm::Hierarchical => "LCS hierarchical",
        }
    }

    fn run(self, pair: &BenchPair) -> usize {
        match self {
            Algorithm::NaiveDp => lcs_dp_oracle(&pair.pred, &pair.orig).len(),
            Algorithm::HuntSzymanski => lcs_hunt_szymanski(&pair.pred, &pair.orig).len(),
            Algorithm::Hierarchical => align_tokens(&pair.orig, &pair.pred, &Normalizer::Identity)
                .0
                .len(),
        }
    }
}

/// Bucket boundaries on original length. `[0, 60, 100, 200]` gives `0-60`,
/// `60-100`, `100-200`; longer inputs land in a final open bucket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Buckets(Vec<usize>);

impl Buckets {
    pub fn new(edges: Vec<usize>) -> Result<Self, BenchError> {
        if edges.len() < 2 || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BenchError::BadBuckets);
        }
        Ok(Self(edges))
    }

    pub fn ranges(&self) -> Vec<(usize, usize)> {
        self.0.windows(2).map(|w| (w[0], w[1])).collect()
    }

    fn index(&self, len: usize) -> usize {
        self.0[1..]
            .iter()
            .position(|&hi| len < hi)
            .unwrap_or(self.0.len() - 1)
    }

    fn label(&self, k: usize) -> String {
        match self.0.get(k + 1) {
            Some(hi) => format!("{}-{}", self.0[k], hi),
            None => format!("{}+", self.0[k]),
        }
    }
}

impl Default for Buckets {
    fn default() -> Self {
        Self(vec![0, 60, 100, 200])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub algorithm: Algorithm,
    /// Median over repetitions of the mean time per pair.
    pub mean_ns: f64,
    /// Naive time divided by this algorithm's time.
    pub speedup: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TierCounts {
    pub exact: usize,
    pub subsequence: usize,
    pub lcs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketReport {
    pub bucket: String,
    pub samples: usize,
    pub timings: Vec<Timing>,
    pub tiers: TierCounts,
}

impl BucketReport {
    pub fn speedup(&self, algorithm: Algorithm) -> f64 {
        self.timings
            .iter()
            .find(|t| t.algorithm == algorithm)
            .map_or(f64::NAN, |t| t.speedup)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub repetitions: usize,
    pub warmup: usize,
    pub buckets: Vec<BucketReport>,
}

impl BenchReport {
    pub fn bucket(&self, name: &str) -> Option<&BucketReport> {
        self.buckets.iter().find(|b| b.bucket == name)
    }

    /// Speedup table: one row per algorithm, one column per bucket.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<18}", "Sequence Length");
        for b in &self.buckets {
            let _ = write!(out, " | {:>9}", b.bucket);
        }
        out.push('\n');
        let _ = write!(out, "{:<18}", "samples");
        for b in &self.buckets {
            let _ = write!(out, " | {:>9}", b.samples);
        }
        out.push('\n');
        for alg in Algorithm::ALL {
            let _ = write!(out, "{:<18}", alg.label());
            for b in &self.buckets {
                let _ = write!(out, " | {:>8.1}x", b.speedup(alg));
            }
            out.push('\n');
        }
        out
    }
}

pub fn run_benchmark(
    corpus: &[BenchPair],
    repetitions: usize,
    warmup: usize,
) -> Result<BenchReport, BenchError> {
    run_benchmark_with(corpus, repetitions, warmup, &Buckets::default())
}

/// Checks that all three algorithms agree on every pair, then times each bucket.
/// Timing covers alignment only; the corpus is already tokenized.
pub fn run_benchmark_with(
    corpus: &[BenchPair],
    repetitions: usize,
    warmup: usize,
    buckets: &Buckets,
) -> Result<BenchReport, BenchError> {
    if corpus.is_empty() {
        return Err(BenchError::EmptyCorpus);
    }
    if repetitions == 0 {
        return Err(BenchError::NoRepetitions);
    }

    let mut grouped: Vec<Vec<&BenchPair>> = vec![Vec::new(); buckets.0.len()];
    let mut tiers = vec![TierCounts::default(); buckets.0.len()];
    for (index, pair) in corpus.iter().enumerate() {
        let naive = Algorithm::NaiveDp.run(pair);
        let hs = Algorithm::HuntSzymanski.run(pair);
        let (al, stats) = align_tokens(&pair.orig, &pair.pred, &Normalizer::Identity);
        if naive != hs || naive != al.len() {
            return Err(BenchError::Mismatch {
                index,
                naive,
                hs,
                hier: al.len(),
            });
        }
        let k = buckets.index(pair.orig.len());
        grouped[k].push(pair);
        let t = &mut tiers[k];
        match stats.tier {
            Tier::Exact => t.exact += 1,
            Tier::Subsequence => t.subsequence += 1,
            Tier::Lcs => t.lcs += 1,
        }
    }

    let mut reports = Vec::new();
    for (k, pairs) in grouped.iter().enumerate() {
        if pairs.is_empty() {
            continue;
        }
        let mut samples: [Vec<f64>; 3] = Default::default();
        for rep in 0..warmup + repetitions {
            for (slot, alg) in Algorithm::ALL.into_iter().enumerate() {
                let start = Instant::now();
                for pair in pairs {
                    black_box(alg.run(black_box(pair)));
                }
                let per_pair = start.elapsed().as_nanos() as f64 / pairs.len() as f64;
                if rep >= warmup {
                    samples[slot].push(per_pair);
                }
            }
        }
        let medians: Vec<f64> = samples.iter_mut().map(|s| median(s)).collect();
        let timings = Algorithm::ALL
            .into_iter()
            .zip(&medians)
            .map(|(algorithm, &mean_ns)| Timing {
                algorithm,
                mean_ns,
                speedup: if algorithm == Algorithm::NaiveDp {
                    1.0
                } else {
                    medians[0] / mean_ns
                },
            })
            .collect();
        reports.push(BucketReport {
            bucket: buckets.label(k),
            samples: pairs.len(),
            timings,
            tiers: tiers[k],
        });
    }
    Ok(BenchReport {
        repetitions,
        warmup,
        buckets: reports,
    })
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}
