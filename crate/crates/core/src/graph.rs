//! Hamming graphs H(n,q) and their distance partitions.
//!
//! Vertices are length-n words over the alphabet {0, ..., q-1}. The
//! distance-i graph H_i(n,q) joins words at Hamming distance exactly i;
//! i = 1 gives the Hamming graph itself. A partition of the vertex set is
//! equitable for H_i when the number of cell-b neighbors of a vertex in
//! cell a depends only on (a, b); those counts form the quotient matrix.
//!
//! Vertices are ranked lexicographically: a word maps to the base-q integer
//! read with the leftmost symbol most significant. All whole-graph scans are
//! guarded by [`Limits::vertex_visits`].

use crate::error::Error;
use crate::exact::{binomial, RationalMatrix};
use crate::Limits;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use std::fmt;

/// A vertex of H(n,q): the symbols plus the alphabet size that fixes the
/// ambient graph. Length is implicit in the symbol vector.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    q: u64,
    symbols: Vec<u16>,
}

impl Word {
    pub fn new(symbols: Vec<u16>, q: u64) -> Result<Self, Error> {
        if q < 2 {
            return Err(Error::InvalidParameter(format!("alphabet size {q} < 2")));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s as u64 >= q) {
            return Err(Error::InvalidElement { label: bad as u64, q });
        }
        Ok(Word { q, symbols })
    }

    pub fn zero(n: usize, q: u64) -> Result<Self, Error> {
        Word::new(vec![0; n], q)
    }

    pub fn n(&self) -> usize {
        self.symbols.len()
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn symbols(&self) -> &[u16] {
        &self.symbols
    }

    /// Lexicographic rank: leftmost symbol most significant.
    pub fn rank(&self) -> u128 {
        self.symbols
            .iter()
            .fold(0u128, |acc, &s| acc * self.q as u128 + s as u128)
    }

    pub fn from_rank(n: usize, q: u64, rank: u128) -> Result<Self, Error> {
        let mut symbols = vec![0u16; n];
        let mut rest = rank;
        for slot in symbols.iter_mut().rev() {
            *slot = (rest % q as u128) as u16;
            rest /= q as u128;
        }
        if rest != 0 {
            return Err(Error::InvalidParameter(format!(
                "rank {rank} out of range for H({n},{q})"
            )));
        }
        Word::new(symbols, q)
    }

    /// Number of nonzero symbols.
    pub fn weight(&self) -> usize {
        self.symbols.iter().filter(|&&s| s != 0).count()
    }

    /// Word with coordinate `coord` removed.
    pub fn puncture(&self, coord: usize) -> Result<Word, Error> {
        if coord >= self.symbols.len() {
            return Err(Error::InvalidParameter(format!(
                "coordinate {coord} out of range for length {}",
                self.symbols.len()
            )));
        }
        let mut symbols = self.symbols.clone();
        symbols.remove(coord);
        Word::new(symbols, self.q)
    }
}

impl serde::Serialize for Word {
    /// A word serializes as its symbol array; the ambient (n,q) context is
    /// carried by the surrounding report.
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.symbols.iter())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(q={}, [{}])", self.q, self)
    }
}

/// Number of coordinates where the words differ. Errors when the words do
/// not live in the same H(n,q).
pub fn hamming_distance(u: &Word, v: &Word) -> Result<usize, Error> {
    if u.n() != v.n() || u.q != v.q {
        return Err(Error::ContextMismatch {
            n_left: u.n(),
            q_left: u.q,
            n_right: v.n(),
            q_right: v.q,
        });
    }
    Ok(u.symbols
        .iter()
        .zip(&v.symbols)
        .filter(|(a, b)| a != b)
        .count())
}

/// Size of the distance-i sphere around any vertex: C(n,i) (q-1)^i.
pub fn sphere_size(n: u64, q: u64, i: u64) -> Result<BigInt, Error> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("alphabet size {q} < 2")));
    }
    if i > n {
        return Err(Error::InvalidParameter(format!("distance {i} exceeds length {n}")));
    }
    let choose = binomial(&BigInt::from(n), &BigInt::from(i));
    Ok(choose * BigInt::from(q - 1).pow(i as u32))
}

/// Number of vertices of H(n,q) as a u128, or an error if it overflows.
pub fn vertex_count(n: usize, q: u64) -> Result<u128, Error> {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(q as u128).ok_or(Error::CapExceeded {
            needed: u128::MAX,
            cap: u128::MAX,
        })?;
    }
    Ok(acc)
}

/// A partition of the vertex set of H(n,q) into consecutive cell ids
/// 0..cell_count, stored as one cell id per vertex rank.
#[derive(Clone, Debug)]
pub struct Partition {
    n: usize,
    q: u64,
    cells: Vec<u32>,
    cell_count: usize,
}

impl Partition {
    pub fn new(n: usize, q: u64, cells: Vec<u32>) -> Result<Self, Error> {
        let expected = vertex_count(n, q)?;
        if cells.len() as u128 != expected {
            return Err(Error::DimensionMismatch {
                left: format!("{expected} vertices"),
                right: format!("{} assignments", cells.len()),
            });
        }
        let cell_count = cells.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut seen = vec![false; cell_count];
        for &c in &cells {
            seen[c as usize] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidParameter("partition has an empty cell".into()));
        }
        Ok(Partition {
            n,
            q,
            cells,
            cell_count,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn cell_of_rank(&self, rank: usize) -> u32 {
        self.cells[rank]
    }

    pub fn cell_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.cell_count];
        for &c in &self.cells {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// One line per vertex: "rank cell", ranks ascending.
    pub fn export_text(&self) -> String {
        let mut out = String::with_capacity(self.cells.len() * 4);
        for (rank, &cell) in self.cells.iter().enumerate() {
            out.push_str(&format!("{rank} {cell}\n"));
        }
        out
    }
}

/// Distance partition of a code: cell i holds the vertices at distance
/// exactly i from the code, so the covering radius is cell_count - 1.
#[derive(Clone, Debug)]
pub struct DistancePartitionRecord {
    pub partition: Partition,
    pub covering_radius: usize,
    pub cell_sizes: Vec<u64>,
}

/// Multi-source breadth-first search from the given centers, layering the
/// vertex set by exact distance to the nearest center.
pub fn distance_partition(centers: &[Word], limits: &Limits) -> Result<DistancePartitionRecord, Error> {
    let first = centers.first().ok_or(Error::EmptyCode)?;
    let n = first.n();
    let q = first.q();
    for w in centers {
        if w.n() != n || w.q() != q {
            return Err(Error::ContextMismatch {
                n_left: n,
                q_left: q,
                n_right: w.n(),
                q_right: w.q(),
            });
        }
    }
    let total = vertex_count(n, q)?;
    let degree = n as u128 * (q as u128 - 1);
    limits.check_visits(total.saturating_mul(degree.max(1)))?;
    let total = total as usize;

    let mut cells = vec![u32::MAX; total];
    let mut frontier: Vec<usize> = Vec::new();
    for w in centers {
        let rank = w.rank() as usize;
        if cells[rank] == u32::MAX {
            cells[rank] = 0;
            frontier.push(rank);
        }
    }
    // Place values q^(n-1-j) for each coordinate j.
    let pow: Vec<usize> = (0..n)
        .map(|j| (q as usize).pow((n - 1 - j) as u32))
        .collect();
    let mut layer = 0u32;
    let mut digits = vec![0u16; n];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &rank in &frontier {
            let mut rest = rank;
            for j in 0..n {
                digits[j] = (rest / pow[j]) as u16;
                rest %= pow[j];
            }
            for j in 0..n {
                let base = rank - digits[j] as usize * pow[j];
                for s in 0..q as usize {
                    if s as u16 == digits[j] {
                        continue;
                    }
                    let neighbor = base + s * pow[j];
                    if cells[neighbor] == u32::MAX {
                        cells[neighbor] = layer + 1;
                        next.push(neighbor);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer += 1;
        frontier = next;
    }
    let partition = Partition::new(n, q, cells)?;
    let cell_sizes = partition.cell_sizes();
    Ok(DistancePartitionRecord {
        partition,
        covering_radius: layer as usize,
        cell_sizes,
    })
}

/// Witness that a partition is not equitable for the distance-i graph: two
/// vertices of the same cell whose cell-count vectors differ.
#[derive(Clone, Debug)]
pub struct InequitabilityWitness {
    pub cell: u32,
    pub reference_rank: u128,
    pub conflicting_rank: u128,
    pub reference_counts: Vec<u64>,
    pub conflicting_counts: Vec<u64>,
}

/// Result of an empirical quotient computation.
#[derive(Clone, Debug)]
pub enum QuotientOutcome {
    Equitable(RationalMatrix),
    Inequitable(InequitabilityWitness),
}

/// Visits every vertex of the distance-i sphere around `rank`, passing each
/// neighbor rank to `f`. `digits` must hold the base-q digits of `rank`.
fn for_each_at_distance(
    digits: &[u16],
    pow: &[usize],
    q: usize,
    rank: usize,
    dist: usize,
    f: &mut impl FnMut(usize),
) {
    fn recurse(
        digits: &[u16],
        pow: &[usize],
        q: usize,
        current: usize,
        start: usize,
        remaining: usize,
        f: &mut impl FnMut(usize),
    ) {
        if remaining == 0 {
            f(current);
            return;
        }
        let n = digits.len();
        // Need `remaining` more positions among start..n.
        for j in start..=n - remaining {
            let base = current - digits[j] as usize * pow[j];
            for s in 0..q {
                if s as u16 == digits[j] {
                    continue;
                }
                recurse(digits, pow, q, base + s * pow[j], j + 1, remaining - 1, f);
            }
        }
    }
    if dist == 0 {
        f(rank);
        return;
    }
    recurse(digits, pow, q, rank, 0, dist, f);
}

fn counts_for_vertex(
    partition: &Partition,
    pow: &[usize],
    digits: &mut [u16],
    rank: usize,
    dist: usize,
) -> Vec<u64> {
    let q = partition.q() as usize;
    let mut rest = rank;
    for (j, d) in digits.iter_mut().enumerate() {
        *d = (rest / pow[j]) as u16;
        rest %= pow[j];
    }
    let mut counts = vec![0u64; partition.cell_count()];
    for_each_at_distance(digits, pow, q, rank, dist, &mut |neighbor| {
        counts[partition.cell_of_rank(neighbor) as usize] += 1;
    });
    counts
}

/// Empirical quotient matrix of `partition` in the distance-`dist` graph.
///
/// Counts, for the lowest-ranked vertex of each cell, its distance-`dist`
/// neighbors per cell; then checks every other vertex against its cell's
/// reference vector. Returns the integer count matrix when the partition is
/// equitable, otherwise the lowest-ranked conflicting vertex as a witness.
pub fn quotient_matrix(
    partition: &Partition,
    dist: usize,
    limits: &Limits,
) -> Result<QuotientOutcome, Error> {
    let n = partition.n();
    let q = partition.q();
    if dist > n {
        return Err(Error::InvalidParameter(format!(
            "distance {dist} exceeds word length {n}"
        )));
    }
    let total = vertex_count(n, q)?;
    let sphere = sphere_size(n as u64, q, dist as u64)?
        .to_u128()
        .ok_or(Error::CapExceeded {
            needed: u128::MAX,
            cap: limits.vertex_visits,
        })?;
    limits.check_visits(total.saturating_mul(sphere.max(1)))?;
    let total = total as usize;

    let pow: Vec<usize> = (0..n)
        .map(|j| (q as usize).pow((n - 1 - j) as u32))
        .collect();
    let r = partition.cell_count();

    // Reference vertex per cell: the lowest rank in that cell.
    let mut reference = vec![usize::MAX; r];
    for rank in 0..total {
        let c = partition.cell_of_rank(rank) as usize;
        if reference[c] == usize::MAX {
            reference[c] = rank;
        }
    }
    let mut reference_counts = Vec::with_capacity(r);
    {
        let mut digits = vec![0u16; n];
        for &rank in &reference {
            reference_counts.push(counts_for_vertex(partition, &pow, &mut digits, rank, dist));
        }
    }

    // Scan all vertices in parallel; keep the lowest conflicting rank.
    let conflict = (0..total)
        .into_par_iter()
        .map_init(
            || vec![0u16; n],
            |digits, rank| {
                let counts = counts_for_vertex(partition, &pow, digits, rank, dist);
                let cell = partition.cell_of_rank(rank) as usize;
                if counts != reference_counts[cell] {
                    Some((rank, counts))
                } else {
                    None
                }
            },
        )
        .flatten()
        .min_by_key(|(rank, _)| *rank);

    if let Some((rank, counts)) = conflict {
        let cell = partition.cell_of_rank(rank);
        return Ok(QuotientOutcome::Inequitable(InequitabilityWitness {
            cell,
            reference_rank: reference[cell as usize] as u128,
            conflicting_rank: rank as u128,
            reference_counts: reference_counts[cell as usize].clone(),
            conflicting_counts: counts,
        }));
    }
    let rows: Vec<Vec<crate::exact::Rational>> = reference_counts
        .iter()
        .map(|row| row.iter().map(|&c| crate::exact::rat_int(c)).collect())
        .collect();
    Ok(QuotientOutcome::Equitable(RationalMatrix::from_rows(rows)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;

    fn w(q: u64, symbols: &[u16]) -> Word {
        Word::new(symbols.to_vec(), q).unwrap()
    }

    #[test]
    fn distance_counts_differing_coordinates() {
        assert_eq!(hamming_distance(&w(2, &[0, 0, 0, 0]), &w(2, &[1, 1, 1, 1])).unwrap(), 4);
        assert_eq!(hamming_distance(&w(3, &[0, 1, 2]), &w(3, &[0, 2, 2])).unwrap(), 1);
        assert_eq!(hamming_distance(&w(5, &[4, 4]), &w(5, &[4, 4])).unwrap(), 0);
    }

    #[test]
    fn distance_rejects_mismatched_contexts() {
        let err = hamming_distance(&w(2, &[0, 0, 0, 0]), &w(5, &[0, 0, 0, 0, 0]));
        assert!(matches!(err, Err(Error::ContextMismatch { .. })));
    }

    #[test]
    fn word_validation_rejects_out_of_range_symbols() {
        assert!(Word::new(vec![0, 2], 2).is_err());
        assert!(Word::new(vec![0], 1).is_err());
    }

    #[test]
    fn rank_round_trip_is_lexicographic() {
        let word = w(3, &[1, 0, 2]);
        assert_eq!(word.rank(), 9 + 0 + 2);
        assert_eq!(Word::from_rank(3, 3, 11).unwrap(), word);
        // Rank order equals lexicographic order over a sample.
        let mut all: Vec<Word> = (0..27u128).map(|r| Word::from_rank(3, 3, r).unwrap()).collect();
        let by_rank = all.clone();
        all.sort();
        assert_eq!(all, by_rank);
    }

    #[test]
    fn sphere_sizes_match_closed_form() {
        assert_eq!(sphere_size(4, 2, 4).unwrap(), BigInt::from(1));
        assert_eq!(sphere_size(6, 4, 6).unwrap(), BigInt::from(729));
        assert_eq!(sphere_size(9, 7, 0).unwrap(), BigInt::from(1));
        assert_eq!(sphere_size(4, 2, 1).unwrap(), BigInt::from(4));
        assert!(sphere_size(3, 2, 5).is_err());
    }

    #[test]
    fn sphere_sizes_sum_to_vertex_count() {
        for (n, q) in [(4u64, 2u64), (5, 3), (3, 4)] {
            let total: BigInt = (0..=n).map(|i| sphere_size(n, q, i).unwrap()).sum();
            assert_eq!(total, BigInt::from(q).pow(n as u32));
        }
    }

    #[test]
    fn distance_partition_of_single_vertex_in_h2q() {
        // {(0,0)} in H(2,3): layer sizes 1, 4, 4.
        let rec = distance_partition(&[w(3, &[0, 0])], &Limits::default()).unwrap();
        assert_eq!(rec.covering_radius, 2);
        assert_eq!(rec.cell_sizes, vec![1, 4, 4]);
    }

    #[test]
    fn distance_partition_layers_by_weight_for_zero_word() {
        let rec = distance_partition(&[w(2, &[0, 0, 0, 0])], &Limits::default()).unwrap();
        assert_eq!(rec.covering_radius, 4);
        assert_eq!(rec.cell_sizes, vec![1, 4, 6, 4, 1]);
        for rank in 0..16u128 {
            let word = Word::from_rank(4, 2, rank).unwrap();
            assert_eq!(
                rec.partition.cell_of_rank(rank as usize) as usize,
                word.weight()
            );
        }
    }

    #[test]
    fn distance_partition_respects_visit_cap() {
        let tight = Limits {
            vertex_visits: 10,
            materialize_words: 1 << 20,
        };
        let err = distance_partition(&[w(2, &[0, 0, 0, 0])], &tight);
        assert!(matches!(err, Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn quotient_of_single_vertex_partition_in_h2q_matches_known_form() {
        // Distance partition of {(0,0)} in H(2,q) has quotient
        // [[0, 2(q-1), 0], [1, q-2, q-1], [0, 2, 2(q-2)]].
        for q in [2u64, 3, 4, 5] {
            let rec = distance_partition(&[w(q, &[0, 0])], &Limits::default()).unwrap();
            let outcome = quotient_matrix(&rec.partition, 1, &Limits::default()).unwrap();
            let qi = q as i64;
            let expected = RationalMatrix::from_i64_rows(&[
                &[0, 2 * (qi - 1), 0],
                &[1, qi - 2, qi - 1],
                &[0, 2, 2 * (qi - 2)],
            ]);
            match outcome {
                QuotientOutcome::Equitable(m) => assert_eq!(m, expected, "q={q}"),
                QuotientOutcome::Inequitable(wit) => panic!("unexpected witness {wit:?}"),
            }
        }
    }

    #[test]
    fn quotient_row_sums_equal_sphere_size() {
        let rec = distance_partition(&[w(2, &[0, 0, 0, 0])], &Limits::default()).unwrap();
        for dist in 0..=4usize {
            if let QuotientOutcome::Equitable(m) =
                quotient_matrix(&rec.partition, dist, &Limits::default()).unwrap()
            {
                let expected = rat_int(sphere_size(4, 2, dist as u64).unwrap());
                for sum in m.row_sums() {
                    assert_eq!(sum, expected);
                }
            } else {
                panic!("weight partition of H(4,2) is equitable at distance {dist}");
            }
        }
    }

    #[test]
    fn inequitable_partition_yields_lowest_rank_witness() {
        // Split H(2,2) as {00} vs rest: 01 and 11 then disagree on their
        // neighbor counts into cell 0.
        let cells = vec![0u32, 1, 1, 1];
        let partition = Partition::new(2, 2, cells).unwrap();
        match quotient_matrix(&partition, 1, &Limits::default()).unwrap() {
            QuotientOutcome::Inequitable(wit) => {
                assert_eq!(wit.cell, 1);
                assert_eq!(wit.reference_rank, 1);
                assert_eq!(wit.conflicting_rank, 3);
                assert_ne!(wit.reference_counts, wit.conflicting_counts);
            }
            QuotientOutcome::Equitable(m) => panic!("unexpectedly equitable: {m:?}"),
        }
    }

    #[test]
    fn partition_export_lists_rank_and_cell() {
        let rec = distance_partition(&[w(2, &[0, 0])], &Limits::default()).unwrap();
        let text = rec.partition.export_text();
        assert_eq!(text, "0 0\n1 1\n2 1\n3 2\n");
    }

    #[test]
    fn partition_with_empty_cell_is_rejected() {
        let cells = vec![0u32, 2, 2, 2];
        assert!(Partition::new(2, 2, cells).is_err());
    }

    #[test]
    fn puncture_removes_the_coordinate() {
        let word = w(3, &[1, 2, 0]);
        assert_eq!(word.puncture(1).unwrap(), w(3, &[1, 0]));
        assert!(word.puncture(3).is_err());
    }
}
