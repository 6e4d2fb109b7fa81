//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tagalign_bench::{run_benchmark, synth::noisy_corpus, Algorithm};
use tagalign_cli::process_all;
use tagalign_core::dataset::{load_dataset, write_jsonl, Format, InstanceRecord};
use tagalign_core::{
    build_target, classify_errors, corrupt, evaluate, gold_spans, lcs_dp_oracle,
    lcs_hunt_szymanski, process_record, EntitySpan, ErrorCounts, EvalReport, NoiseConfig,
    ProcessOptions, ProcessedRecord, TaggedSequence, TaggingScheme, TargetVariant, Tier,
};

const NEWS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/news.conll");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn news() -> Vec<InstanceRecord> {
    load_dataset(Path::new(NEWS), Format::Conll, TaggingScheme::Bio)
        .expect("fixture loads")
        .records
}

fn gold_seq(rec: &InstanceRecord) -> TaggedSequence {
    rec.gold_sequence(TaggingScheme::Bio).unwrap().unwrap()
}

fn with_generations(
    records: &[InstanceRecord],
    mut generation: impl FnMut(usize, &TaggedSequence) -> String,
) -> Vec<InstanceRecord> {
    records
        .iter()
        .enumerate()
        .map(|(k, r)| InstanceRecord {
            generation: Some(generation(k, &gold_seq(r))),
            ..r.clone()
        })
        .collect()
}

fn score(records: &[InstanceRecord]) -> (EvalReport, Vec<ProcessedRecord>) {
    let out = process_all(records, &ProcessOptions::default(), 1);
    let report = evaluate(records, &out, TaggingScheme::Bio, false).expect("ids line up");
    (report, out)
}

fn lcs_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0usize;
    let mut mismatches = 0usize;
    for k in 0..10_000 {
        let vocab = [5u32, 50, 5000][k % 3];
        let side = |rng: &mut ChaCha8Rng| -> Vec<String> {
            let n = rng.gen_range(0..=200);
            (0..n)
                .map(|_| format!("t{}", rng.gen_range(0..vocab)))
                .collect()
        };
        let pred = side(&mut rng);
        let orig = if rng.gen_bool(0.5) {
            side(&mut rng)
        } else {
            // Edited copy, the common case for generations.
            let mut edited = Vec::with_capacity(pred.len());
            for t in &pred {
                if rng.gen_bool(0.9) {
                    edited.push(if rng.gen_bool(0.05) {
                        format!("x{t}")
                    } else {
                        t.clone()
                    });
                }
            }
            edited
        };
        checked += 1;
        mismatches += usize::from(lcs_dp_oracle(&pred, &orig) != lcs_hunt_szymanski(&pred, &orig));
    }

    let alphabet = ["a", "b", "c"];
    let mut strings: Vec<Vec<&str>> = vec![vec![]];
    let mut frontier: Vec<Vec<&str>> = vec![vec![]];
    for _ in 0..8 {
        frontier = frontier
            .iter()
            .flat_map(|s| alphabet.iter().map(move |a| [s.as_slice(), &[*a]].concat()))
            .collect();
        strings.extend(frontier.iter().cloned());
    }
    for p in &strings {
        for o in &strings {
            checked += 1;
            if lcs_dp_oracle(p, o) != lcs_hunt_szymanski(p, o) {
                mismatches += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(120),
        format!(
            "{checked} pairs, {mismatches} mismatches, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn speedup() -> Outcome {
    let corpus = noisy_corpus(&[(1, 60), (60, 100), (100, 200)], 200, 0.02, 42);
    let report = match run_benchmark(&corpus, 5, 2) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let floors = [("0-60", 2.0), ("60-100", 4.0), ("100-200", 5.0)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (bucket, floor) in floors {
        let s = report
            .bucket(bucket)
            .map_or(0.0, |b| b.speedup(Algorithm::Hierarchical));
        pass &= s >= floor;
        parts.push(format!("{bucket}: {s:.1}x (floor {floor}x)"));
    }
    outcome(
        pass,
        format!(
            "{}; gate passed on {} pairs",
            parts.join(", "),
            corpus.len()
        ),
    )
}

fn round_trip(records: &[InstanceRecord]) -> Outcome {
    let variant = TargetVariant::TokenByToken(TaggingScheme::Bio);
    let recs = with_generations(records, |_, seq| {
        build_target(seq, &variant).expect("fixture renders")
    });
    let (r, _) = score(&recs);
    outcome(
        r.f1 == 1.0 && r.tp == r.gold_entities,
        format!(
            "{} sentences, {} entities, F1 {:.3}",
            records.len(),
            r.gold_entities,
            r.f1
        ),
    )
}

fn omission_robustness(records: &[InstanceRecord]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [0.1, 0.3, 0.5] {
        let recs = with_generations(records, |k, seq| {
            corrupt(seq, &NoiseConfig::omission_only(p, 1000 + k as u64))
        });
        let (r, _) = score(&recs);
        pass &= r.f1 == 1.0;
        parts.push(format!("p={p}: F1 {:.3}", r.f1));
    }
    outcome(pass, parts.join(", "))
}

fn self_correction_example() -> Outcome {
    let rec = |generation: &str| InstanceRecord {
        id: "fog".into(),
        tokens: "What was the fog rated ?"
            .split(' ')
            .map(str::to_owned)
            .collect(),
        label_set: vec!["title".into()],
        generation: Some(generation.into()),
        gold_tags: Some(
            ["O", "O", "B-title", "I-title", "O", "O"]
                .map(String::from)
                .to_vec(),
        ),
    };
    let opts = ProcessOptions::default();
    let final_rec = rec("What(O) was(O) the(B-title) fog(I-title) rated(O) ?(O)");
    let final_out = process_record(&final_rec, &opts);
    let want = EntitySpan {
        text: "the fog".into(),
        ..EntitySpan::new(2, 4, "title")
    };
    let medium = process_record(&rec("What(O) was(O) the(O) fog(O)"), &opts);
    let gold = gold_spans(&gold_seq(&final_rec));
    let errs = classify_errors(&gold, &medium.entities);
    outcome(
        final_out.entities == [want] && errs.ue == 1,
        format!(
            "final entities {:?}; medium highest-beam UE {}",
            final_out
                .entities
                .iter()
                .map(|e| (e.start, e.end, &e.label, &e.text))
                .collect::<Vec<_>>(),
            errs.ue
        ),
    )
}

fn span(start: usize, end: usize, label: &str) -> EntitySpan {
    EntitySpan::new(start, end, label)
}

/// Independent reference: token-index sets instead of interval arithmetic.
fn classify_by_token_sets(gold: &[EntitySpan], pred: &[EntitySpan]) -> ErrorCounts {
    let shares =
        |a: &EntitySpan, b: &EntitySpan| (a.start..a.end).any(|t| (b.start..b.end).contains(&t));
    let mut out = ErrorCounts::default();
    for g in gold {
        let exact = pred
            .iter()
            .any(|p| (p.start, p.end, &p.label) == (g.start, g.end, &g.label));
        let same_type = pred.iter().any(|p| p.label == g.label && shares(p, g));
        let any = pred.iter().any(|p| shares(p, g));
        match (exact, same_type, any) {
            (true, _, _) => out.correct += 1,
            (_, true, _) => out.be += 1,
            (_, _, true) => out.ne += 1,
            _ => out.ue += 1,
        }
    }
    out
}

fn error_taxonomy() -> Outcome {
    let counts = |correct, be, ne, ue| ErrorCounts {
        correct,
        be,
        ne,
        ue,
    };
    let fixture: Vec<(Vec<EntitySpan>, Vec<EntitySpan>, ErrorCounts)> = vec![
        (
            vec![span(0, 2, "PER")],
            vec![span(0, 2, "PER")],
            counts(1, 0, 0, 0),
        ),
        (
            vec![span(0, 2, "PER")],
            vec![span(1, 3, "PER")],
            counts(0, 1, 0, 0),
        ),
        (
            vec![span(0, 3, "LOC")],
            vec![span(0, 1, "LOC")],
            counts(0, 1, 0, 0),
        ),
        (
            vec![span(0, 2, "PER")],
            vec![span(0, 2, "ORG")],
            counts(0, 0, 1, 0),
        ),
        (
            vec![span(2, 4, "LOC")],
            vec![span(3, 5, "ORG")],
            counts(0, 0, 1, 0),
        ),
        (vec![span(0, 1, "PER")], vec![], counts(0, 0, 0, 1)),
        (
            vec![span(0, 2, "PER")],
            vec![span(2, 3, "PER")],
            counts(0, 0, 0, 1),
        ),
        // Same-type overlap outranks an exact span of another type.
        (
            vec![span(0, 3, "PER")],
            vec![span(0, 3, "ORG"), span(1, 2, "PER")],
            counts(0, 1, 0, 0),
        ),
        (
            vec![span(0, 2, "PER")],
            vec![span(0, 2, "PER"), span(1, 3, "ORG")],
            counts(1, 0, 0, 0),
        ),
        (
            vec![
                span(0, 1, "PER"),
                span(2, 4, "LOC"),
                span(5, 6, "ORG"),
                span(7, 9, "MISC"),
            ],
            vec![span(0, 1, "PER"), span(2, 3, "LOC"), span(5, 6, "PER")],
            counts(1, 1, 1, 1),
        ),
        (vec![], vec![span(0, 1, "PER")], counts(0, 0, 0, 0)),
        (
            vec![span(0, 1, "PER"), span(1, 2, "PER")],
            vec![span(0, 2, "PER")],
            counts(0, 2, 0, 0),
        ),
    ];
    let hand_ok = fixture
        .iter()
        .filter(|(g, p, want)| classify_errors(g, p) == *want)
        .count();

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let types = ["PER", "LOC", "ORG"];
    let random_spans = |rng: &mut ChaCha8Rng, disjoint: bool| {
        let mut out = Vec::new();
        let mut pos = 0;
        for _ in 0..rng.gen_range(0..5) {
            let start = if disjoint {
                pos + rng.gen_range(0..3)
            } else {
                rng.gen_range(0..12)
            };
            let end = start + rng.gen_range(1..4);
            out.push(span(start, end, types[rng.gen_range(0..types.len())]));
            pos = end;
        }
        out
    };
    let cases = 20_000;
    let mut bad = 0;
    for _ in 0..cases {
        let gold = random_spans(&mut rng, true);
        let disjoint = rng.gen_bool(0.5);
        let pred = random_spans(&mut rng, disjoint);
        let got = classify_errors(&gold, &pred);
        if got.total() != gold.len() || got != classify_by_token_sets(&gold, &pred) {
            bad += 1;
        }
    }
    outcome(
        hand_ok == fixture.len() && bad == 0,
        format!(
            "hand fixture {hand_ok}/{}; random {cases} sentences, {bad} violations",
            fixture.len()
        ),
    )
}

fn tier_histogram(out: &[ProcessedRecord]) -> [usize; 3] {
    let mut h = [0; 3];
    for r in out {
        match r.stats.tier {
            Some(Tier::Exact) => h[0] += 1,
            Some(Tier::Subsequence) => h[1] += 1,
            _ => h[2] += 1,
        }
    }
    h
}

fn fast_path(records: &[InstanceRecord]) -> Outcome {
    let variant = TargetVariant::TokenByToken(TaggingScheme::Bio);
    let clean = with_generations(records, |_, seq| build_target(seq, &variant).unwrap());
    let clean_hist = tier_histogram(&score(&clean).1);

    let omitted = with_generations(records, |k, seq| {
        corrupt(seq, &NoiseConfig::omission_only(0.3, 5000 + k as u64))
    });
    let (_, out) = score(&omitted);
    // A record the noise left untouched is a clean generation and must go Exact.
    let (touched, untouched): (Vec<_>, Vec<_>) = omitted.iter().zip(&out).partition(|(rec, _)| {
        rec.generation != clean.iter().find(|c| c.id == rec.id).unwrap().generation
    });
    let touched_hist = tier_histogram(
        &touched
            .iter()
            .map(|(_, o)| (*o).clone())
            .collect::<Vec<_>>(),
    );
    let untouched_exact = untouched
        .iter()
        .all(|(_, o)| o.stats.tier == Some(Tier::Exact));

    outcome(
        clean_hist == [records.len(), 0, 0] && touched_hist == [0, touched.len(), 0] && untouched_exact,
        format!(
            "clean {clean_hist:?} (exact, subsequence, lcs); omitted {touched_hist:?} over {} records, {} untouched",
            touched.len(),
            untouched.len()
        ),
    )
}

fn determinism(records: &[InstanceRecord]) -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let corpus: Vec<InstanceRecord> = (0..10_000)
        .map(|k| {
            let base = &records[k % records.len()];
            InstanceRecord {
                id: format!("r{k}"),
                generation: Some(corrupt(
                    &gold_seq(base),
                    &NoiseConfig::mixture(0.15, k as u64),
                )),
                ..base.clone()
            }
        })
        .collect();
    let input = dir.path().join("in.jsonl");
    let mut buf = Vec::new();
    write_jsonl(&corpus, &mut buf).unwrap();
    fs::write(&input, buf).unwrap();

    let run = |jobs: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(format!("out{jobs}.jsonl"));
        let status = Command::new(env!("CARGO_BIN_EXE_tagalign"))
            .args(["process", "--jobs", jobs, "-i"])
            .arg(&input)
            .arg("-o")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        fs::read(&out).map_err(|e| e.to_string())
    };
    match (run("1"), run("8")) {
        (Ok(a), Ok(b)) => outcome(
            a == b && a.iter().filter(|&&c| c == b'\n').count() == corpus.len(),
            format!(
                "{} records, {} bytes, identical: {}",
                corpus.len(),
                a.len(),
                a == b
            ),
        ),
        (a, b) => outcome(
            false,
            format!("process failed: {:?} / {:?}", a.err(), b.err()),
        ),
    }
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    // libtest flags such as --nocapture or a name filter are accepted and ignored.
    let records = news();
    let criteria: Vec<Criterion<'_>> = vec![
        ("lcs-equivalence", Box::new(lcs_equivalence)),
        ("speedup-floors", Box::new(speedup)),
        ("round-trip-f1", Box::new(|| round_trip(&records))),
        (
            "omission-robustness",
            Box::new(|| omission_robustness(&records)),
        ),
        ("self-correction-example", Box::new(self_correction_example)),
        ("error-taxonomy", Box::new(error_taxonomy)),
        ("fast-path-dispatch", Box::new(|| fast_path(&records))),
        ("process-determinism", Box::new(|| determinism(&records))),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
