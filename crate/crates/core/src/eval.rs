//! Strict entity-level micro precision/recall/F1 and the unlabeled / noisy /
//! boundary error breakdown.

use std::collections::BTreeMap;
use std::ops::AddAssign;

use serde::Serialize;

use crate::decode::EntitySpan;
use crate::error::{Error, Result};

/// Per-sentence outcome for each gold entity. Categories are disjoint and sum to
/// the number of gold spans.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ErrorCounts {
    pub correct: usize,
    /// Boundary error: right type, wrong extent.
    pub be: usize,
    /// Noisy error: overlapping prediction of another type.
    pub ne: usize,
    /// Unlabeled error: no overlapping prediction at all.
    pub ue: usize,
}

impl ErrorCounts {
    pub fn total(&self) -> usize {
        self.correct + self.be + self.ne + self.ue
    }
}

impl AddAssign for ErrorCounts {
    fn add_assign(&mut self, o: Self) {
        self.correct += o.correct;
        self.be += o.be;
        self.ne += o.ne;
        self.ue += o.ue;
    }
}

/// Classifies every gold span of one sentence. The first rule that applies wins:
/// exact match, then same-type overlap (BE), then other-type overlap (NE), else UE.
pub fn classify_errors(gold: &[EntitySpan], pred: &[EntitySpan]) -> ErrorCounts {
    let mut out = ErrorCounts::default();
    for g in gold {
        if pred.iter().any(|p| p.same_entity(g)) {
            out.correct += 1;
        } else if pred.iter().any(|p| p.label == g.label && p.overlaps(g)) {
            out.be += 1;
        } else if pred.iter().any(|p| p.overlaps(g)) {
            out.ne += 1;
        } else {
            out.ue += 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Counts {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Self) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.fn_ += o.fn_;
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeScore {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub ue: usize,
    pub ne: usize,
    pub be: usize,
    pub ue_rate: f64,
    pub ne_rate: f64,
    pub be_rate: f64,
    pub gold_entities: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_type: Option<BTreeMap<String, TypeScore>>,
}

/// Mergeable corpus accumulator; chunks may be scored independently and summed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tally {
    pub counts: Counts,
    pub errors: ErrorCounts,
    pub per_type: BTreeMap<String, Counts>,
}

impl Tally {
    pub fn add_sentence(&mut self, gold: &[EntitySpan], pred: &[EntitySpan]) {
        let mut used = vec![false; gold.len()];
        for p in pred {
            let hit = gold
                .iter()
                .enumerate()
                .find(|(k, g)| !used[*k] && g.same_entity(p))
                .map(|(k, _)| k);
            let slot = self.per_type.entry(p.label.clone()).or_default();
            match hit {
                Some(k) => {
                    used[k] = true;
                    self.counts.tp += 1;
                    slot.tp += 1;
                }
                None => {
                    self.counts.fp += 1;
                    slot.fp += 1;
                }
            }
        }
        for (g, _) in gold.iter().zip(&used).filter(|(_, u)| !**u) {
            self.counts.fn_ += 1;
            self.per_type.entry(g.label.clone()).or_default().fn_ += 1;
        }
        self.errors += classify_errors(gold, pred);
    }

    pub fn merge(&mut self, other: Tally) {
        self.counts += other.counts;
        self.errors += other.errors;
        for (k, v) in other.per_type {
            *self.per_type.entry(k).or_default() += v;
        }
    }

    pub fn report(&self, per_type: bool) -> EvalReport {
        let c = self.counts;
        let gold = self.errors.total();
        EvalReport {
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            precision: c.precision(),
            recall: c.recall(),
            f1: c.f1(),
            ue: self.errors.ue,
            ne: self.errors.ne,
            be: self.errors.be,
            ue_rate: ratio(self.errors.ue, gold),
            ne_rate: ratio(self.errors.ne, gold),
            be_rate: ratio(self.errors.be, gold),
            gold_entities: gold,
            per_type: per_type.then(|| {
                self.per_type
                    .iter()
                    .map(|(k, c)| {
                        let score = TypeScore {
                            tp: c.tp,
                            fp: c.fp,
                            fn_: c.fn_,
                            f1: c.f1(),
                        };
                        (k.clone(), score)
                    })
                    .collect()
            }),
        }
    }
}

/// Scores parallel corpora: a prediction is correct iff a not-yet-matched gold
/// span in the same sentence has the same start, end and type.
pub fn micro_prf(gold: &[Vec<EntitySpan>], pred: &[Vec<EntitySpan>]) -> Result<EvalReport> {
    micro_prf_with(gold, pred, false)
}

pub fn micro_prf_with(
    gold: &[Vec<EntitySpan>],
    pred: &[Vec<EntitySpan>],
    per_type: bool,
) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::CorpusMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut tally = Tally::default();
    for (g, p) in gold.iter().zip(pred) {
        tally.add_sentence(g, p);
    }
    Ok(tally.report(per_type))
}
