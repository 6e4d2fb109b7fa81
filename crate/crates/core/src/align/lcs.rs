//! Longest-common-subsequence alignment, two independent routes.
//!
//! Both routes return the same alignment: among all maximum-length alignments the
//! one whose sequence of original indices is lexicographically smallest, ties on
//! that broken by the lexicographically smallest predicted indices. Empty tokens
//! never match anything.

use std::cell::RefCell;

use rustc_hash::FxHashMap;

use super::Alignment;

/// Equality with the cheap rejections inlined ahead of the byte comparison.
#[inline]
fn same(a: &str, b: &str) -> bool {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    a.len() == b.len() && a.first() == b.first() && (a.len() <= 1 || a[1..] == b[1..])
}

#[inline]
fn matches(a: &str, b: &str) -> bool {
    !a.is_empty() && same(a, b)
}

/// Quadratic dynamic-programming LCS. Serves as the reference for
/// [`lcs_hunt_szymanski`] and as the naive baseline in benchmarks.
pub fn lcs_dp_oracle<P: AsRef<str>, O: AsRef<str>>(pred: &[P], orig: &[O]) -> Alignment {
    let (m, n) = (pred.len(), orig.len());
    let width = n + 1;
    // suffix[i * width + j] = LCS length of pred[i..] and orig[j..]
    // Small tables live on the stack.
    let cells = (m + 1) * width;
    let mut inline = [0u32; 128];
    let mut heap = Vec::new();
    let suffix: &mut [u32] = if cells <= inline.len() {
        &mut inline[..cells]
    } else {
        heap.resize(cells, 0);
        &mut heap
    };
    for i in (0..m).rev() {
        let p = pred[i].as_ref();
        let (row, below) = suffix[i * width..(i + 2) * width].split_at_mut(width);
        for j in (0..n).rev() {
            row[j] = if matches(p, orig[j].as_ref()) {
                below[j + 1] + 1
            } else {
                below[j].max(row[j + 1])
            };
        }
    }
    let suffix = &*suffix;
    let at = |i: usize, j: usize| suffix[i * width + j];
    let usable = |i: usize, j: usize, k: u32| {
        matches(pred[i].as_ref(), orig[j].as_ref()) && at(i + 1, j + 1) + 1 == k
    };

    let mut pairs = Vec::with_capacity(at(0, 0) as usize);
    let (mut i, mut j, mut k) = (0, 0, at(0, 0));
    while k > 0 {
        // Staircase walk: keep the column while some later row still reaches k,
        // which lands on the smallest column that can start a length-k tail.
        let (mut r, mut c) = (i, j);
        while !usable(r, c, k) {
            if at(r + 1, c) == k {
                r += 1;
            } else {
                c += 1;
            }
        }
        let row = (i..=r)
            .find(|&q| usable(q, c, k))
            .expect("walk ended on a usable cell");
        pairs.push((row, c));
        i = row + 1;
        j = c + 1;
        k -= 1;
    }
    Alignment::from_pairs_unchecked(pairs)
}

/// Hunt–Szymanski LCS over match-position lists with binary-searched thresholds.
/// Runs in O((n + r) log n) for r matching position pairs, which is near-linear
/// when tokens rarely repeat.
pub fn lcs_hunt_szymanski<P: AsRef<str>, O: AsRef<str>>(pred: &[P], orig: &[O]) -> Alignment {
    let prefix = pred
        .iter()
        .zip(orig)
        .take_while(|(p, o)| matches(p.as_ref(), o.as_ref()))
        .count();
    let (pred_rest, orig_rest) = (&pred[prefix..], &orig[prefix..]);
    let mut pairs: Vec<(usize, usize)> =
        Vec::with_capacity(prefix + pred_rest.len().min(orig_rest.len()));
    pairs.extend((0..prefix).map(|t| (t, t)));
    if pred_rest.is_empty() || orig_rest.is_empty() {
        return Alignment::from_pairs_unchecked(pairs);
    }

    // Short originals are scanned directly. Otherwise first[tok] is the smallest
    // column holding tok and next_col chains the rest in ascending order, with
    // u32::MAX as the terminator.
    const SCAN_LIMIT: usize = 16;
    const END: u32 = u32::MAX;
    let scan = orig_rest.len() <= SCAN_LIMIT;
    let mut first: FxHashMap<&str, u32> = FxHashMap::default();
    let mut next_col = Vec::new();
    if !scan {
        first.reserve(orig_rest.len());
        next_col = vec![END; orig_rest.len()];
        for (j, tok) in orig_rest.iter().enumerate().rev() {
            let tok = tok.as_ref();
            if !tok.is_empty() {
                if let Some(prev) = first.insert(tok, j as u32) {
                    next_col[j] = prev;
                }
            }
        }
    }

    // Rows are processed back to front. levels[k].0 is the largest column j such
    // that the current suffix of pred and orig[j..] share k + 1 tokens; it is
    // strictly decreasing in k. Every match is filed under the length of the
    // longest common subsequence starting with it: levels[k].1 heads a list of
    // rank-k matches threaded through the third field of `found`.
    SCRATCH.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (levels, found) = &mut *guard;
        levels.clear();
        found.clear();
        // Columns must arrive in ascending order: an update only raises
        // levels[rank].0 to j, which never affects the count for a larger column in
        // the same row.
        let mut visit = |j: u32, i: u32| {
            let rank = levels.partition_point(|&(t, _)| t > j);
            let id = found.len() as u32;
            if rank == levels.len() {
                levels.push((j, id));
                found.push((j, i, END));
            } else {
                let slot = &mut levels[rank];
                found.push((j, i, slot.1));
                *slot = (j, id);
            }
        };
        for i in (0..pred_rest.len()).rev() {
            let tok = pred_rest[i].as_ref();
            if scan {
                if tok.is_empty() {
                    continue;
                }
                for (j, o) in orig_rest.iter().enumerate() {
                    if same(o.as_ref(), tok) {
                        visit(j as u32, i as u32);
                    }
                }
            } else if let Some(&head) = first.get(tok) {
                let mut j = head;
                while j != END {
                    visit(j, i as u32);
                    j = next_col[j as usize];
                }
            }
        }

        // Walk ranks from the longest down, taking the smallest (column, row) that
        // extends the previous pick. Every rank-k match after it is a valid
        // continuation, so each rank list is scanned once.
        let mut last: Option<(u32, u32)> = None;
        for &(_, head) in levels.iter().rev() {
            let mut pick = (END, END);
            let mut at = head;
            while at != END {
                let (j, i, next) = found[at as usize];
                if last.is_none_or(|(lj, li)| j > lj && i > li) && (j, i) < pick {
                    pick = (j, i);
                }
                at = next;
            }
            debug_assert!(
                pick.0 != END,
                "a match of every rank extends the previous pick"
            );
            pairs.push((pick.1 as usize + prefix, pick.0 as usize + prefix));
            last = Some(pick);
        }
    });
    Alignment::from_pairs_unchecked(pairs)
}

type Scratch = (Vec<(u32, u32)>, Vec<(u32, u32, u32)>);

thread_local! {
    /// Rank thresholds and match lists, reused across calls on a thread.
    static SCRATCH: RefCell<Scratch> = const { RefCell::new((Vec::new(), Vec::new())) };
}
