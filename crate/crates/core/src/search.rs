//! Exhaustive search for extended 1-perfect codes at desk scale.
//!
//! A set C in H(n,q) is extended 1-perfect exactly when |C| = q^(n-1)/b
//! with b = 1 + (n-1)(q-1) and the minimum distance is at least 4, so the
//! search enumerates cliques of that size in the distance->=4 graph.
//! Translation by any vector preserves both properties, so the default
//! mode only enumerates codes through the zero word and recovers the
//! total count as N0 * q^n / |C| by double counting the pairs (code,
//! codeword).

use crate::error::Error;
use crate::exact::ser_bigint;
use crate::graph::{hamming_distance, vertex_count, Word};
use crate::Limits;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

/// Largest candidate pool the clique search will take on.
pub const POOL_CAP: usize = 10_000;

/// Parameters of one search run.
#[derive(Clone, Debug)]
pub struct SearchTask {
    pub n: usize,
    pub q: u64,
    /// Enumerate only codes through the zero word and scale up by
    /// translation, instead of enumerating every code directly.
    pub normalize: bool,
    /// Upper bound on the number of found codes kept in the report.
    pub max_examples: usize,
}

impl SearchTask {
    pub fn new(n: usize, q: u64) -> Self {
        SearchTask {
            n,
            q,
            normalize: true,
            max_examples: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub n: usize,
    pub q: u64,
    /// Radius-1 ball size in H(n-1,q).
    pub ball: u128,
    /// Required code cardinality q^(n-1)/ball, 0 when that is not an integer.
    pub target_size: u128,
    /// True when the ball size does not divide q^(n-1); no code can exist.
    pub vacuous: bool,
    pub pool_size: usize,
    pub normalized: bool,
    /// Total number of extended 1-perfect codes in H(n,q).
    #[serde(serialize_with = "ser_bigint")]
    pub count: BigInt,
    /// Codes through the zero word, when the normalized route was used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_containing: Option<u128>,
    pub examples: Vec<Vec<Word>>,
}

/// Enumerates every extended 1-perfect code in H(n,q), up to the pool cap.
pub fn exhaustive_search(task: &SearchTask, limits: &Limits) -> Result<SearchReport, Error> {
    let (n, q) = (task.n, task.q);
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "extended codes need length >= 2, got {n}"
        )));
    }
    if q < 2 {
        return Err(Error::InvalidParameter(format!("alphabet size {q} < 2")));
    }
    let total = vertex_count(n, q)?;
    limits.check_visits(total)?;
    let ball = 1 + (n as u128 - 1) * (q as u128 - 1);
    let half = total / q as u128;
    if half % ball != 0 {
        return Ok(SearchReport {
            n,
            q,
            ball,
            target_size: 0,
            vacuous: true,
            pool_size: 0,
            normalized: task.normalize,
            count: BigInt::zero(),
            zero_containing: task.normalize.then_some(0),
            examples: Vec::new(),
        });
    }
    let target = half / ball;
    let target_usize = usize::try_from(target).map_err(|_| Error::CapExceeded {
        needed: target,
        cap: POOL_CAP as u128,
    })?;

    let mut pool = Vec::new();
    for rank in 0..total {
        let word = Word::from_rank(n, q, rank)?;
        if !task.normalize || word.weight() >= 4 {
            pool.push(word);
        }
        if pool.len() > POOL_CAP {
            return Err(Error::CapExceeded {
                needed: pool.len() as u128,
                cap: POOL_CAP as u128,
            });
        }
    }

    let adj = build_distance_graph(&pool)?;
    let need = if task.normalize {
        target_usize - 1
    } else {
        target_usize
    };
    let (cliques, example_indices) = count_cliques(&adj, need, task.max_examples);

    let zero = Word::zero(n, q)?;
    let examples: Vec<Vec<Word>> = example_indices
        .into_iter()
        .map(|indices| {
            let mut code: Vec<Word> = Vec::with_capacity(target_usize);
            if task.normalize {
                code.push(zero.clone());
            }
            code.extend(indices.into_iter().map(|i| pool[i].clone()));
            code
        })
        .collect();

    let count = if task.normalize {
        let numerator = BigInt::from(cliques) * BigInt::from(total);
        let (count, rem) = numerator.div_rem(&BigInt::from(target));
        if !rem.is_zero() {
            return Err(Error::Internal(format!(
                "translation count {cliques} * {total} is not divisible by {target}"
            )));
        }
        count
    } else {
        BigInt::from(cliques)
    };

    Ok(SearchReport {
        n,
        q,
        ball,
        target_size: target,
        vacuous: false,
        pool_size: pool.len(),
        normalized: task.normalize,
        count,
        zero_containing: task.normalize.then_some(cliques),
        examples,
    })
}

/// Total number of extended 1-perfect codes in H(n,q).
pub fn count_extended_perfect(n: usize, q: u64, limits: &Limits) -> Result<BigInt, Error> {
    let mut task = SearchTask::new(n, q);
    task.max_examples = 0;
    Ok(exhaustive_search(&task, limits)?.count)
}

/// Bitset adjacency rows of the distance->=4 graph on the pool.
fn build_distance_graph(pool: &[Word]) -> Result<Vec<Vec<u64>>, Error> {
    let blocks = pool.len().div_ceil(64);
    (0..pool.len())
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0u64; blocks];
            for (j, other) in pool.iter().enumerate() {
                if j != i && hamming_distance(&pool[i], other)? >= 4 {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
            Ok(row)
        })
        .collect()
}

struct Sink {
    count: u128,
    examples: Vec<Vec<usize>>,
    max_examples: usize,
}

/// Counts cliques of the given size, branching over the smallest member in
/// parallel. Branches are folded in index order, so counts and retained
/// examples do not depend on the thread count.
fn count_cliques(adj: &[Vec<u64>], need: usize, max_examples: usize) -> (u128, Vec<Vec<usize>>) {
    if need == 0 {
        let examples = if max_examples > 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
        return (1, examples);
    }
    if need > adj.len() {
        return (0, Vec::new());
    }
    let branches: Vec<(u128, Vec<Vec<usize>>)> = (0..adj.len())
        .into_par_iter()
        .map(|first| {
            let mut sink = Sink {
                count: 0,
                examples: Vec::new(),
                max_examples,
            };
            let mut chosen = vec![first];
            let allowed = restrict_above(&adj[first], first);
            extend_clique(adj, &mut chosen, &allowed, need - 1, &mut sink);
            (sink.count, sink.examples)
        })
        .collect();
    let mut count = 0u128;
    let mut examples = Vec::new();
    for (branch_count, branch_examples) in branches {
        count += branch_count;
        for e in branch_examples {
            if examples.len() < max_examples {
                examples.push(e);
            }
        }
    }
    (count, examples)
}

fn extend_clique(
    adj: &[Vec<u64>],
    chosen: &mut Vec<usize>,
    allowed: &[u64],
    need: usize,
    sink: &mut Sink,
) {
    if need == 0 {
        sink.count += 1;
        if sink.examples.len() < sink.max_examples {
            sink.examples.push(chosen.clone());
        }
        return;
    }
    if popcount(allowed) < need {
        return;
    }
    for_each_bit(allowed, |i| {
        chosen.push(i);
        let mut next = intersect(allowed, &adj[i]);
        clear_through(&mut next, i);
        extend_clique(adj, chosen, &next, need - 1, sink);
        chosen.pop();
    });
}

fn popcount(blocks: &[u64]) -> usize {
    blocks.iter().map(|b| b.count_ones() as usize).sum()
}

fn intersect(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

/// Zeroes all bits at positions <= i.
fn clear_through(blocks: &mut [u64], i: usize) {
    let block = i / 64;
    for b in blocks.iter_mut().take(block) {
        *b = 0;
    }
    if block < blocks.len() {
        blocks[block] &= (!0u64).checked_shl(i as u32 % 64 + 1).unwrap_or(0);
    }
}

fn restrict_above(src: &[u64], i: usize) -> Vec<u64> {
    let mut out = src.to_vec();
    clear_through(&mut out, i);
    out
}

fn for_each_bit(blocks: &[u64], mut f: impl FnMut(usize)) {
    for (b, &block) in blocks.iter().enumerate() {
        let mut w = block;
        while w != 0 {
            f(b * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{verify_extended_all, Code};

    fn run(n: usize, q: u64, normalize: bool) -> SearchReport {
        let mut task = SearchTask::new(n, q);
        task.normalize = normalize;
        task.max_examples = 10;
        exhaustive_search(&task, &Limits::default()).unwrap()
    }

    #[test]
    fn binary_length_4_has_eight_codes() {
        let report = run(4, 2, true);
        assert_eq!(report.target_size, 2);
        assert_eq!(report.zero_containing, Some(1));
        assert_eq!(report.count, BigInt::from(8));
        assert_eq!(report.examples.len(), 1);
        // The only code through zero is the repetition pair.
        let words = &report.examples[0];
        assert_eq!(words[0].symbols(), &[0, 0, 0, 0]);
        assert_eq!(words[1].symbols(), &[1, 1, 1, 1]);
    }

    #[test]
    fn full_enumeration_agrees_with_translation_count() {
        let normalized = run(4, 2, true);
        let full = run(4, 2, false);
        assert_eq!(normalized.count, full.count);
        assert_eq!(full.count, BigInt::from(8));
        assert_eq!(full.zero_containing, None);
        // All eight are complement pairs.
        for code in &full.examples {
            assert_eq!(code.len(), 2);
            assert_eq!(hamming_distance(&code[0], &code[1]).unwrap(), 4);
        }
    }

    #[test]
    fn length_2_codes_are_the_singletons() {
        for q in [2u64, 3, 4, 5, 7] {
            let report = run(2, q, true);
            assert_eq!(report.target_size, 1);
            assert_eq!(report.zero_containing, Some(1));
            assert_eq!(report.count, BigInt::from(q * q), "q={q}");
            assert_eq!(report.examples[0].len(), 1);
        }
        let full = run(2, 4, false);
        assert_eq!(full.count, BigInt::from(16));
    }

    #[test]
    fn excluded_parameters_yield_zero() {
        // (5,3) passes the sphere-packing condition (ball 9 divides 81)
        // but the divisibility screen rules it out; the search agrees.
        let report = run(5, 3, true);
        assert!(!report.vacuous);
        assert_eq!(report.target_size, 9);
        assert_eq!(report.pool_size, 112);
        assert_eq!(report.count, BigInt::zero());
        assert!(report.examples.is_empty());
    }

    #[test]
    fn non_dividing_ball_is_vacuous() {
        let report = run(3, 2, true);
        assert!(report.vacuous);
        assert_eq!(report.count, BigInt::zero());
        let report = run(6, 2, true);
        assert!(report.vacuous, "ball 6 does not divide 32");
    }

    #[test]
    fn found_codes_pass_every_verification_route() {
        let report = run(4, 2, false);
        for words in &report.examples {
            let code = Code::from_words(words.clone()).unwrap();
            let reports = verify_extended_all(&code, &Limits::default()).unwrap();
            for r in reports {
                assert!(r.accepted(), "route {:?}", r.route);
            }
        }
    }

    #[test]
    fn counts_do_not_depend_on_thread_count() {
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let quad = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let mut task = SearchTask::new(5, 3);
        task.max_examples = 3;
        let a = single
            .install(|| exhaustive_search(&task, &Limits::default()))
            .unwrap();
        let b = quad
            .install(|| exhaustive_search(&task, &Limits::default()))
            .unwrap();
        assert_eq!(a.count, b.count);
        assert_eq!(a.examples, b.examples);

        let mut task = SearchTask::new(4, 2);
        task.normalize = false;
        task.max_examples = 10;
        let a = single
            .install(|| exhaustive_search(&task, &Limits::default()))
            .unwrap();
        let b = quad
            .install(|| exhaustive_search(&task, &Limits::default()))
            .unwrap();
        assert_eq!(a.count, b.count);
        assert_eq!(a.examples, b.examples);
    }

    #[test]
    fn count_helper_matches_search() {
        assert_eq!(
            count_extended_perfect(4, 2, &Limits::default()).unwrap(),
            BigInt::from(8)
        );
        assert_eq!(
            count_extended_perfect(2, 3, &Limits::default()).unwrap(),
            BigInt::from(9)
        );
    }

    #[test]
    fn visit_cap_is_enforced() {
        let limits = Limits {
            vertex_visits: 100,
            ..Limits::default()
        };
        assert!(matches!(
            exhaustive_search(&SearchTask::new(5, 3), &limits),
            Err(Error::CapExceeded { .. })
        ));
    }
}
