//! Code families, code files, and verification routes.
//!
//! A code is a nonempty set of words of H(n,q), stored either as an
//! explicit sorted word list or as a parity-check/basis pair over a finite
//! field. Verification offers one route for 1-perfect codes (ball tiling)
//! and three independent routes for extended 1-perfect codes:
//!
//!   partition  three-cell distance partition whose distance-1 quotient is
//!              the canonical extended perfect quotient,
//!   puncture   every coordinate puncturing is 1-perfect,
//!   fast       cardinality q^(n-1)/(1+(n-1)(q-1)) plus minimum distance 4.
//!
//! The three extended routes agree on every code; the fast route never
//! materializes the word list of a linear code.

use crate::error::Error;
use crate::exact::{ser_bigint, ser_bigint_opt, RationalMatrix};
use crate::gf::{null_space, FieldElement, FieldSpec};
use crate::graph::{
    distance_partition, hamming_distance, quotient_matrix, vertex_count, QuotientOutcome, Word,
};
use crate::spectral::{extended_perfect_quotient, perfect_quotient};
use crate::Limits;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt::Write as _;

/// Parity-check and generator data of a linear code over a finite field.
#[derive(Clone, Debug)]
pub struct LinearRepr {
    field: FieldSpec,
    check: Vec<Vec<FieldElement>>,
    basis: Vec<Vec<FieldElement>>,
}

impl LinearRepr {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn check(&self) -> &[Vec<FieldElement>] {
        &self.check
    }

    pub fn basis(&self) -> &[Vec<FieldElement>] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// A nonempty set of words of H(n,q).
#[derive(Clone, Debug)]
pub struct Code {
    n: usize,
    q: u64,
    words: Option<Vec<Word>>,
    linear: Option<LinearRepr>,
    comment: Vec<String>,
}

impl Code {
    /// Builds a code from explicit words; duplicates collapse, orderings are
    /// normalized. All words must share one (n,q) context.
    pub fn from_words(words: Vec<Word>) -> Result<Self, Error> {
        let first = words.first().ok_or(Error::EmptyCode)?;
        let (n, q) = (first.n(), first.q());
        for w in &words {
            if w.n() != n || w.q() != q {
                return Err(Error::ContextMismatch {
                    n_left: n,
                    q_left: q,
                    n_right: w.n(),
                    q_right: w.q(),
                });
            }
        }
        let mut words = words;
        words.sort();
        words.dedup();
        Ok(Code {
            n,
            q,
            words: Some(words),
            linear: None,
            comment: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn words(&self) -> Option<&[Word]> {
        self.words.as_deref()
    }

    pub fn linear(&self) -> Option<&LinearRepr> {
        self.linear.as_ref()
    }

    pub fn comment(&self) -> &[String] {
        &self.comment
    }

    pub fn size(&self) -> BigInt {
        match (&self.words, &self.linear) {
            (Some(w), _) => BigInt::from(w.len()),
            (None, Some(l)) => BigInt::from(self.q).pow(l.dimension() as u32),
            (None, None) => unreachable!("code without words or basis"),
        }
    }

    pub fn is_materialized(&self) -> bool {
        self.words.is_some()
    }

    /// Returns the explicit word list, expanding a linear span on demand.
    /// The expansion is refused when the span exceeds the materialization
    /// cap.
    pub fn materialized_words(&self, limits: &Limits) -> Result<Vec<Word>, Error> {
        if let Some(words) = &self.words {
            return Ok(words.clone());
        }
        let linear = self.linear.as_ref().expect("code without words or basis");
        let span = self.size();
        let needed = span.to_u128().unwrap_or(u128::MAX);
        if needed > limits.materialize_words {
            return Err(Error::CapExceeded {
                needed,
                cap: limits.materialize_words,
            });
        }
        let field = &linear.field;
        let mut labels: Vec<Vec<u16>> = vec![vec![0; self.n]];
        for row in &linear.basis {
            let mut next = Vec::with_capacity(labels.len() * field.order() as usize);
            for base in &labels {
                for c in field.elements() {
                    let mut v = base.clone();
                    for (slot, sym) in v.iter_mut().zip(row) {
                        let base_el = field.element(*slot as u64)?;
                        *slot = field.add(base_el, field.mul(c, *sym)?)?.label();
                    }
                    next.push(v);
                }
            }
            labels = next;
        }
        let mut words = labels
            .into_iter()
            .map(|v| Word::new(v, self.q))
            .collect::<Result<Vec<_>, _>>()?;
        words.sort();
        words.dedup();
        if BigInt::from(words.len()) != span {
            return Err(Error::Internal(
                "basis rows are not linearly independent".to_string(),
            ));
        }
        Ok(words)
    }

    /// Expands and stores the word list in place.
    pub fn materialize(&mut self, limits: &Limits) -> Result<(), Error> {
        if self.words.is_none() {
            self.words = Some(self.materialized_words(limits)?);
        }
        Ok(())
    }

    pub fn contains(&self, word: &Word) -> Result<bool, Error> {
        if word.n() != self.n || word.q() != self.q {
            return Err(Error::ContextMismatch {
                n_left: self.n,
                q_left: self.q,
                n_right: word.n(),
                q_right: word.q(),
            });
        }
        if let Some(words) = &self.words {
            return Ok(words.binary_search(word).is_ok());
        }
        let linear = self.linear.as_ref().expect("code without words or basis");
        let field = &linear.field;
        for row in &linear.check {
            let mut acc = FieldElement::ZERO;
            for (h, s) in row.iter().zip(word.symbols()) {
                let sym = field.element(*s as u64)?;
                acc = field.add(acc, field.mul(*h, sym)?)?;
            }
            if acc != FieldElement::ZERO {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn word_from_elements(v: &[FieldElement], q: u64) -> Result<Word, Error> {
    Word::new(v.iter().map(|e| e.label()).collect(), q)
}

/// Projective representatives of GF(q)^t: every nonzero vector whose first
/// nonzero entry is 1, in label-vector order (first entry most significant).
fn projective_columns(field: &FieldSpec, t: u32) -> Vec<Vec<FieldElement>> {
    let q = field.order();
    let mut columns = Vec::new();
    let mut digits = vec![FieldElement::ZERO; t as usize];
    loop {
        if digits
            .iter()
            .find(|e| **e != FieldElement::ZERO)
            .is_some_and(|lead| *lead == FieldElement::ONE)
        {
            columns.push(digits.clone());
        }
        // Odometer increment, least significant digit last.
        let mut pos = t as usize;
        loop {
            if pos == 0 {
                return columns;
            }
            pos -= 1;
            let next = digits[pos].label() + 1;
            if next < q as u16 {
                digits[pos] = FieldElement(next);
                break;
            }
            digits[pos] = FieldElement::ZERO;
        }
    }
}

fn linear_code_from_check(
    field: FieldSpec,
    check: Vec<Vec<FieldElement>>,
    comment: Vec<String>,
    limits: &Limits,
) -> Result<Code, Error> {
    let n = check.first().map(|r| r.len()).unwrap_or(0);
    if n == 0 {
        return Err(Error::InvalidParameter(
            "parity check matrix has no columns".to_string(),
        ));
    }
    let q = field.order();
    let basis = null_space(&check, &field)?;
    let mut code = Code {
        n,
        q,
        words: None,
        linear: Some(LinearRepr {
            field,
            check,
            basis,
        }),
        comment,
    };
    let span = code.size();
    if span.to_u128().is_some_and(|s| s <= limits.materialize_words) {
        code.materialize(limits)?;
    }
    Ok(code)
}

/// The single-vertex code {(0,0)} in H(2,q), extended 1-perfect for every
/// alphabet size.
pub fn trivial_code(q: u64) -> Result<Code, Error> {
    let mut code = Code::from_words(vec![Word::zero(2, q)?])?;
    code.comment = vec![format!("family=trivial q={q}")];
    Ok(code)
}

/// The 1-perfect Hamming code of length (q^t-1)/(q-1) over GF(q): parity
/// check columns are the projective representatives of GF(q)^t.
pub fn hamming_code(field: &FieldSpec, t: u32, limits: &Limits) -> Result<Code, Error> {
    if t < 1 {
        return Err(Error::InvalidParameter("hamming code needs t >= 1".to_string()));
    }
    if (field.order() as u128).checked_pow(t).is_none() {
        return Err(Error::InvalidParameter(format!(
            "q^t overflows for q={}, t={t}",
            field.order()
        )));
    }
    let columns = projective_columns(field, t);
    let n = columns.len();
    let check: Vec<Vec<FieldElement>> = (0..t as usize)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    let mut comment = vec![format!("family=hamming q={} t={t}", field.order())];
    if field.m() > 1 {
        comment.push(format!("modulus={}", field.modulus_string()));
    }
    let code = linear_code_from_check(field.clone(), check, comment, limits)?;
    debug_assert_eq!(code.n(), n);
    Ok(code)
}

/// The extended binary Hamming code of length 2^t: the length-(2^t - 1)
/// Hamming code plus an overall parity coordinate.
pub fn extended_binary_hamming_code(t: u32, limits: &Limits) -> Result<Code, Error> {
    if t < 1 {
        return Err(Error::InvalidParameter(
            "extended binary hamming code needs t >= 1".to_string(),
        ));
    }
    let field = FieldSpec::new(2, 1)?;
    let columns = projective_columns(&field, t);
    let n = columns.len() + 1;
    let mut check: Vec<Vec<FieldElement>> = (0..t as usize)
        .map(|i| {
            let mut row: Vec<FieldElement> = columns.iter().map(|c| c[i]).collect();
            row.push(FieldElement::ZERO);
            row
        })
        .collect();
    check.push(vec![FieldElement::ONE; n]);
    let comment = vec![format!("family=extended-hamming q=2 t={t}")];
    linear_code_from_check(field, check, comment, limits)
}

/// The extended 1-perfect code of length q+2 over GF(q), q = 2^m: parity
/// check columns are the hyperoval points (1, a, a^2) for a in GF(q),
/// followed by (0,1,0) and (0,0,1). Any three columns are linearly
/// independent in characteristic 2, so the minimum distance is 4.
pub fn hyperoval_code(m: u32, modulus: Option<&[u16]>, limits: &Limits) -> Result<Code, Error> {
    if m < 1 {
        return Err(Error::InvalidParameter("hyperoval code needs m >= 1".to_string()));
    }
    let field = FieldSpec::with_modulus(2, m, modulus.map(|c| c.to_vec()))?;
    let q = field.order();
    let mut check = vec![Vec::new(), Vec::new(), Vec::new()];
    for a in field.elements() {
        check[0].push(FieldElement::ONE);
        check[1].push(a);
        check[2].push(field.mul(a, a)?);
    }
    for (i, row) in check.iter_mut().enumerate() {
        row.push(if i == 1 { FieldElement::ONE } else { FieldElement::ZERO });
        row.push(if i == 2 { FieldElement::ONE } else { FieldElement::ZERO });
    }
    let comment = vec![
        format!("family=hyperoval q={q} m={m}"),
        format!("modulus={}", field.modulus_string()),
    ];
    linear_code_from_check(field, check, comment, limits)
}

/// Deletes one coordinate from every word; the result is a set (coinciding
/// images collapse).
pub fn puncture(code: &Code, coord: usize, limits: &Limits) -> Result<Code, Error> {
    if code.n() < 2 {
        return Err(Error::InvalidParameter(
            "cannot puncture a length-1 code".to_string(),
        ));
    }
    if coord >= code.n() {
        return Err(Error::InvalidParameter(format!(
            "coordinate {coord} out of range for length {}",
            code.n()
        )));
    }
    let words = code.materialized_words(limits)?;
    let punctured: Result<Vec<Word>, Error> = words.iter().map(|w| w.puncture(coord)).collect();
    Code::from_words(punctured?)
}

/// Renders a code file: comment lines, an "n q" header, then one word per
/// line in sorted order.
pub fn code_to_string(code: &Code, limits: &Limits) -> Result<String, Error> {
    let words = code.materialized_words(limits)?;
    let mut out = String::new();
    for line in code.comment() {
        writeln!(out, "# {line}").expect("string write");
    }
    writeln!(out, "{} {}", code.n(), code.q()).expect("string write");
    for w in &words {
        writeln!(out, "{w}").expect("string write");
    }
    Ok(out)
}

/// Parses a code file: '#' lines and blank lines are ignored, the first
/// data line must read "n q", every further data line is one word of n
/// symbols. Repeated words are rejected.
pub fn parse_code(text: &str) -> Result<Code, Error> {
    let mut header: Option<(usize, u64)> = None;
    let mut words: Vec<Word> = Vec::new();
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if tokens.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "expected header line \"n q\"".to_string(),
                    });
                }
                let n: usize = tokens[0].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid word length {:?}", tokens[0]),
                })?;
                let q: u64 = tokens[1].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid alphabet size {:?}", tokens[1]),
                })?;
                if n < 1 || q < 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("header needs n >= 1 and q >= 2, got n={n}, q={q}"),
                    });
                }
                header = Some((n, q));
            }
            Some((n, q)) => {
                if tokens.len() != n {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected {n} symbols, found {}", tokens.len()),
                    });
                }
                let symbols: Result<Vec<u16>, Error> = tokens
                    .iter()
                    .map(|tok| {
                        tok.parse::<u16>().map_err(|_| Error::Parse {
                            line: line_no,
                            message: format!("invalid symbol {tok:?}"),
                        })
                    })
                    .collect();
                let word = Word::new(symbols?, q).map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
                if !seen.insert(word.clone()) {
                    return Err(Error::DuplicateWord { line: line_no });
                }
                words.push(word);
            }
        }
    }
    if header.is_none() {
        return Err(Error::Parse {
            line: 0,
            message: "missing header line \"n q\"".to_string(),
        });
    }
    Code::from_words(words)
}

/// The verification verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
}

/// Which verification route produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Tiling,
    Partition,
    Puncture,
    Fast,
}

/// Concrete evidence for a rejection.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureWitness {
    /// A vertex covered the wrong number of times by radius-1 balls.
    Vertex { word: Word, covered: u64 },
    /// A vertex at distance greater than 2 from the code.
    DistantVertex { word: Word, distance: usize },
    /// Covering radius below 2: the code is too dense.
    Radius { covering_radius: usize },
    /// Two vertices of one distance cell with different cell-count rows.
    Inequitable {
        cell: u32,
        reference: Word,
        conflicting: Word,
    },
    /// Two codewords closer than the required minimum distance.
    Pair {
        left: Word,
        right: Word,
        distance: usize,
    },
    /// Equitable distance partition with the wrong quotient matrix.
    Quotient { matrix: RationalMatrix },
    /// A puncturing that is not 1-perfect.
    Coordinate {
        coord: usize,
        inner: Box<FailureWitness>,
    },
    /// Cardinality mismatch.
    Count {
        #[serde(serialize_with = "ser_bigint")]
        size: BigInt,
        #[serde(serialize_with = "ser_bigint_opt")]
        expected: Option<BigInt>,
    },
}

/// Outcome of one verification route.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub route: Route,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient: Option<RationalMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<FailureWitness>,
    pub detail: String,
}

impl VerificationReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    fn accept(route: Route, quotient: Option<RationalMatrix>, detail: String) -> Self {
        VerificationReport {
            verdict: Verdict::Accept,
            route,
            quotient,
            witness: None,
            detail,
        }
    }

    fn reject(route: Route, witness: FailureWitness, detail: String) -> Self {
        VerificationReport {
            verdict: Verdict::Reject,
            route,
            quotient: None,
            witness: Some(witness),
            detail,
        }
    }
}

/// Checks that radius-1 balls around the codewords tile H(n,q) exactly.
/// On acceptance the report carries the two-cell quotient matrix.
pub fn verify_perfect(code: &Code, limits: &Limits) -> Result<VerificationReport, Error> {
    let words = code.materialized_words(limits)?;
    let n = code.n();
    let q = code.q();
    let q16 = u16::try_from(q).map_err(|_| {
        Error::InvalidParameter(format!("alphabet size {q} exceeds the symbol range"))
    })?;
    let total = vertex_count(n, q)?;
    let ball = 1 + (n as u128) * (q as u128 - 1);
    let needed = total + words.len() as u128 * ball;
    limits.check_visits(needed)?;
    let mut counts = vec![0u8; total as usize];
    let mut place = vec![0u128; n];
    let mut acc = 1u128;
    for i in (0..n).rev() {
        place[i] = acc;
        acc *= q as u128;
    }
    for w in &words {
        let rank = w.rank();
        counts[rank as usize] = counts[rank as usize].saturating_add(1);
        for (i, &s) in w.symbols().iter().enumerate() {
            for other in 0..q16 {
                if other == s {
                    continue;
                }
                let neighbor =
                    rank - (s as u128) * place[i] + (other as u128) * place[i];
                counts[neighbor as usize] = counts[neighbor as usize].saturating_add(1);
            }
        }
    }
    if let Some(rank) = counts.iter().position(|&c| c != 1) {
        let covered = counts[rank] as u64;
        let word = Word::from_rank(n, q, rank as u128)?;
        let detail = if covered == 0 {
            format!("vertex {word} is not covered by any radius-1 ball")
        } else {
            format!("vertex {word} is covered {covered} times")
        };
        return Ok(VerificationReport::reject(
            Route::Tiling,
            FailureWitness::Vertex { word, covered },
            detail,
        ));
    }
    Ok(VerificationReport::accept(
        Route::Tiling,
        Some(perfect_quotient(n as u64, q)?),
        format!("radius-1 balls around {} words tile H({n},{q})", words.len()),
    ))
}

fn require_extended_length(code: &Code) -> Result<(), Error> {
    if code.n() < 2 {
        return Err(Error::InvalidParameter(
            "extended verification needs word length >= 2".to_string(),
        ));
    }
    Ok(())
}

/// Extended route 1: the distance partition must have exactly three cells
/// and its distance-1 quotient must equal the canonical extended perfect
/// quotient.
pub fn verify_extended_partition(
    code: &Code,
    limits: &Limits,
) -> Result<VerificationReport, Error> {
    require_extended_length(code)?;
    let words = code.materialized_words(limits)?;
    let n = code.n();
    let q = code.q();
    let record = distance_partition(&words, limits)?;
    if record.covering_radius != 2 {
        if record.covering_radius < 2 {
            return Ok(VerificationReport::reject(
                Route::Partition,
                FailureWitness::Radius {
                    covering_radius: record.covering_radius,
                },
                format!(
                    "covering radius {} (an extended 1-perfect code has covering radius 2)",
                    record.covering_radius
                ),
            ));
        }
        let total = vertex_count(n, q)? as usize;
        let far = (0..total)
            .find(|&r| record.partition.cell_of_rank(r) > 2)
            .expect("covering radius > 2 implies a far vertex");
        let word = Word::from_rank(n, q, far as u128)?;
        let distance = record.partition.cell_of_rank(far) as usize;
        return Ok(VerificationReport::reject(
            Route::Partition,
            FailureWitness::DistantVertex {
                word: word.clone(),
                distance,
            },
            format!("vertex {word} is at distance {distance} from the code"),
        ));
    }
    match quotient_matrix(&record.partition, 1, limits)? {
        QuotientOutcome::Inequitable(w) => {
            let reference = Word::from_rank(n, q, w.reference_rank)?;
            let conflicting = Word::from_rank(n, q, w.conflicting_rank)?;
            let detail = format!(
                "distance cell {} is not equitable: {} sees {:?}, {} sees {:?}",
                w.cell, reference, w.reference_counts, conflicting, w.conflicting_counts
            );
            Ok(VerificationReport::reject(
                Route::Partition,
                FailureWitness::Inequitable {
                    cell: w.cell,
                    reference,
                    conflicting,
                },
                detail,
            ))
        }
        QuotientOutcome::Equitable(m) => {
            let canonical = extended_perfect_quotient(n as u64, q)?;
            if m == canonical {
                Ok(VerificationReport::accept(
                    Route::Partition,
                    Some(m),
                    format!(
                        "distance partition of H({n},{q}) is equitable with the canonical quotient"
                    ),
                ))
            } else {
                Ok(VerificationReport::reject(
                    Route::Partition,
                    FailureWitness::Quotient { matrix: m },
                    "equitable distance partition with a non-canonical quotient".to_string(),
                ))
            }
        }
    }
}

/// Extended route 2: every coordinate puncturing must be 1-perfect.
pub fn verify_extended_puncture(
    code: &Code,
    limits: &Limits,
) -> Result<VerificationReport, Error> {
    require_extended_length(code)?;
    let n = code.n();
    for coord in 0..n {
        let punctured = puncture(code, coord, limits)?;
        let report = verify_perfect(&punctured, limits)?;
        if !report.accepted() {
            let inner = report.witness.expect("rejection carries a witness");
            let detail = format!(
                "puncturing coordinate {coord} is not 1-perfect: {}",
                report.detail
            );
            return Ok(VerificationReport::reject(
                Route::Puncture,
                FailureWitness::Coordinate {
                    coord,
                    inner: Box::new(inner),
                },
                detail,
            ));
        }
    }
    Ok(VerificationReport::accept(
        Route::Puncture,
        None,
        format!("all {n} coordinate puncturings are 1-perfect"),
    ))
}

/// Extended route 3: cardinality q^(n-1)/(1+(n-1)(q-1)) together with
/// minimum distance at least 4. Works directly on a linear representation
/// without materializing words.
pub fn verify_extended_fast(code: &Code, limits: &Limits) -> Result<VerificationReport, Error> {
    require_extended_length(code)?;
    let n = code.n();
    let q = code.q();
    let ball = BigInt::from(1) + BigInt::from(n as u64 - 1) * BigInt::from(q - 1);
    let total = BigInt::from(q).pow(n as u32 - 1);
    let (target, rem) = total.div_rem(&ball);
    if !rem.is_zero() {
        return Ok(VerificationReport::reject(
            Route::Fast,
            FailureWitness::Count {
                size: code.size(),
                expected: None,
            },
            format!("1+(n-1)(q-1) = {ball} does not divide q^(n-1) for n={n}, q={q}"),
        ));
    }
    let size = code.size();
    if size != target {
        return Ok(VerificationReport::reject(
            Route::Fast,
            FailureWitness::Count {
                size: size.clone(),
                expected: Some(target.clone()),
            },
            format!("code has {size} words, an extended 1-perfect code has {target}"),
        ));
    }
    if let Some((left, right, distance)) = min_distance_violation(code, 4, limits)? {
        let detail = format!("codewords {left} and {right} are at distance {distance} < 4");
        return Ok(VerificationReport::reject(
            Route::Fast,
            FailureWitness::Pair {
                left,
                right,
                distance,
            },
            detail,
        ));
    }
    Ok(VerificationReport::accept(
        Route::Fast,
        None,
        format!("cardinality q^(n-1)/(1+(n-1)(q-1)) = {target} and minimum distance >= 4"),
    ))
}

/// Runs all three extended routes in a fixed order.
pub fn verify_extended_all(
    code: &Code,
    limits: &Limits,
) -> Result<Vec<VerificationReport>, Error> {
    Ok(vec![
        verify_extended_partition(code, limits)?,
        verify_extended_puncture(code, limits)?,
        verify_extended_fast(code, limits)?,
    ])
}

struct NormalizedMessages<'a> {
    field: &'a FieldSpec,
    dim: usize,
    lead: usize,
    digits: Vec<u16>,
    done: bool,
}

/// Iterates the projective representatives of the message space: every
/// nonzero message whose first nonzero digit is 1. Scaling a codeword does
/// not change its weight, so these suffice for minimum-weight scans.
fn normalized_messages(field: &FieldSpec, dim: usize) -> NormalizedMessages<'_> {
    let mut digits = vec![0u16; dim];
    if dim > 0 {
        digits[0] = 1;
    }
    NormalizedMessages {
        field,
        dim,
        lead: 0,
        digits,
        done: dim == 0,
    }
}

impl Iterator for NormalizedMessages<'_> {
    type Item = Vec<u16>;

    fn next(&mut self) -> Option<Vec<u16>> {
        if self.done {
            return None;
        }
        let current = self.digits.clone();
        let q = self.field.order() as u16;
        let mut pos = self.dim;
        loop {
            if pos == self.lead + 1 {
                self.lead += 1;
                if self.lead >= self.dim {
                    self.done = true;
                } else {
                    for d in self.digits.iter_mut() {
                        *d = 0;
                    }
                    self.digits[self.lead] = 1;
                }
                break;
            }
            pos -= 1;
            if self.digits[pos] + 1 < q {
                self.digits[pos] += 1;
                break;
            }
            self.digits[pos] = 0;
        }
        Some(current)
    }
}

fn encode_elements(
    linear: &LinearRepr,
    message: &[u16],
    n: usize,
) -> Result<Vec<FieldElement>, Error> {
    let field = &linear.field;
    let mut word = vec![FieldElement::ZERO; n];
    for (digit, row) in message.iter().zip(&linear.basis) {
        if *digit == 0 {
            continue;
        }
        let c = field.element(*digit as u64)?;
        for (slot, sym) in word.iter_mut().zip(row) {
            *slot = field.add(*slot, field.mul(c, *sym)?)?;
        }
    }
    Ok(word)
}

fn encode_weight(linear: &LinearRepr, message: &[u16], n: usize) -> Result<usize, Error> {
    let word = encode_elements(linear, message, n)?;
    Ok(word.iter().filter(|e| **e != FieldElement::ZERO).count())
}

fn encode_word(linear: &LinearRepr, message: &[u16], n: usize, q: u64) -> Result<Word, Error> {
    let word = encode_elements(linear, message, n)?;
    word_from_elements(&word, q)
}

fn normalized_message_count(q: u64, dim: usize) -> BigInt {
    // (q^dim - 1) / (q - 1)
    let total = BigInt::from(q).pow(dim as u32) - 1;
    total / BigInt::from(q - 1)
}

fn check_linear_scan_budget(code: &Code, linear: &LinearRepr, limits: &Limits) -> Result<(), Error> {
    let messages = normalized_message_count(code.q(), linear.dimension());
    let per = (code.n() as u128).saturating_mul(linear.dimension().max(1) as u128);
    let needed = messages
        .to_u128()
        .unwrap_or(u128::MAX)
        .saturating_mul(per);
    limits.check_visits(needed)
}

/// Minimum distance of the code; None for a single-word code. Linear codes
/// use a minimum-weight scan over normalized messages, explicit codes use a
/// pairwise scan.
pub fn min_distance(code: &Code, limits: &Limits) -> Result<Option<usize>, Error> {
    if code.size() == BigInt::from(1) {
        return Ok(None);
    }
    if let (None, Some(linear)) = (&code.words, &code.linear) {
        check_linear_scan_budget(code, linear, limits)?;
        let mut best = usize::MAX;
        for message in normalized_messages(&linear.field, linear.dimension()) {
            let w = encode_weight(linear, &message, code.n())?;
            if w > 0 && w < best {
                best = w;
                if best == 1 {
                    break;
                }
            }
        }
        return Ok(Some(best));
    }
    let words = code.materialized_words(limits)?;
    let pairs = (words.len() as u128) * (words.len() as u128 - 1) / 2;
    limits.check_visits(pairs.saturating_mul(code.n() as u128))?;
    let mut best = usize::MAX;
    for i in 0..words.len() {
        for j in (i + 1)..words.len() {
            let d = hamming_distance(&words[i], &words[j])?;
            if d < best {
                best = d;
                if best == 1 {
                    return Ok(Some(1));
                }
            }
        }
    }
    Ok(Some(best))
}

/// Finds a pair of codewords at distance below `bound`, if any. Early-exits
/// on the first violation.
pub fn min_distance_violation(
    code: &Code,
    bound: usize,
    limits: &Limits,
) -> Result<Option<(Word, Word, usize)>, Error> {
    if code.size() == BigInt::from(1) {
        return Ok(None);
    }
    if let (None, Some(linear)) = (&code.words, &code.linear) {
        check_linear_scan_budget(code, linear, limits)?;
        for message in normalized_messages(&linear.field, linear.dimension()) {
            let w = encode_weight(linear, &message, code.n())?;
            if w > 0 && w < bound {
                let word = encode_word(linear, &message, code.n(), code.q())?;
                let zero = Word::zero(code.n(), code.q())?;
                return Ok(Some((zero, word, w)));
            }
        }
        return Ok(None);
    }
    let words = code.materialized_words(limits)?;
    let pairs = (words.len() as u128) * (words.len() as u128 - 1) / 2;
    limits.check_visits(pairs.saturating_mul(code.n() as u128))?;
    for i in 0..words.len() {
        for j in (i + 1)..words.len() {
            let d = hamming_distance(&words[i], &words[j])?;
            if d < bound {
                return Ok(Some((words[i].clone(), words[j].clone(), d)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn trivial_code_is_extended_perfect_by_all_routes() {
        for q in [2u64, 3, 5, 9] {
            let code = trivial_code(q).unwrap();
            assert_eq!(code.size(), BigInt::from(1));
            for report in verify_extended_all(&code, &limits()).unwrap() {
                assert!(report.accepted(), "route {:?} at q={q}", report.route);
            }
        }
    }

    #[test]
    fn binary_hamming_codes_are_perfect() {
        let field = FieldSpec::new(2, 1).unwrap();
        for t in [2u32, 3, 4] {
            let code = hamming_code(&field, t, &limits()).unwrap();
            assert_eq!(code.n(), (1 << t) - 1);
            let report = verify_perfect(&code, &limits()).unwrap();
            assert!(report.accepted(), "t={t}: {}", report.detail);
            assert_eq!(
                report.quotient.unwrap(),
                perfect_quotient(code.n() as u64, 2).unwrap()
            );
        }
    }

    #[test]
    fn ternary_hamming_code_is_perfect() {
        let field = FieldSpec::new(3, 1).unwrap();
        let code = hamming_code(&field, 2, &limits()).unwrap();
        assert_eq!(code.n(), 4);
        assert_eq!(code.size(), BigInt::from(9));
        assert!(verify_perfect(&code, &limits()).unwrap().accepted());
        assert_eq!(min_distance(&code, &limits()).unwrap(), Some(3));
    }

    #[test]
    fn quaternary_hamming_code_is_perfect() {
        let field = FieldSpec::new(2, 2).unwrap();
        let code = hamming_code(&field, 2, &limits()).unwrap();
        assert_eq!(code.n(), 5);
        assert_eq!(code.size(), BigInt::from(64));
        assert!(verify_perfect(&code, &limits()).unwrap().accepted());
    }

    #[test]
    fn extended_binary_hamming_passes_all_routes() {
        for t in [2u32, 3, 4] {
            let code = extended_binary_hamming_code(t, &limits()).unwrap();
            assert_eq!(code.n(), 1 << t);
            for report in verify_extended_all(&code, &limits()).unwrap() {
                assert!(report.accepted(), "t={t} route {:?}", report.route);
            }
        }
    }

    #[test]
    fn smallest_hyperoval_code_is_the_binary_repetition_code() {
        let code = hyperoval_code(1, None, &limits()).unwrap();
        assert_eq!(code.n(), 4);
        let words = code.words().unwrap();
        assert_eq!(words.len(), 2);
        assert_eq!(words[0], Word::zero(4, 2).unwrap());
        assert_eq!(words[1], Word::new(vec![1, 1, 1, 1], 2).unwrap());
    }

    #[test]
    fn hyperoval_code_over_gf4_passes_all_routes() {
        let code = hyperoval_code(2, None, &limits()).unwrap();
        assert_eq!(code.n(), 6);
        assert_eq!(code.q(), 4);
        assert_eq!(code.size(), BigInt::from(64));
        assert_eq!(min_distance(&code, &limits()).unwrap(), Some(4));
        for report in verify_extended_all(&code, &limits()).unwrap() {
            assert!(report.accepted(), "route {:?}", report.route);
        }
    }

    #[test]
    fn hyperoval_code_accepts_alternative_modulus() {
        // x^3 + x^2 + 1 instead of the default x^3 + x + 1.
        let code = hyperoval_code(3, Some(&[1, 0, 1, 1]), &limits()).unwrap();
        assert_eq!(code.n(), 10);
        assert!(!code.is_materialized());
        assert_eq!(code.size(), BigInt::from(8u64).pow(7));
        let report = verify_extended_fast(&code, &limits()).unwrap();
        assert!(report.accepted(), "{}", report.detail);
    }

    #[test]
    fn fast_route_works_without_materialization() {
        let code = hyperoval_code(3, None, &limits()).unwrap();
        assert!(!code.is_materialized());
        assert_eq!(min_distance(&code, &limits()).unwrap(), Some(4));
        assert!(verify_extended_fast(&code, &limits()).unwrap().accepted());
    }

    #[test]
    fn perfect_rejection_carries_lowest_uncovered_vertex() {
        let code = Code::from_words(vec![Word::zero(3, 2).unwrap()]).unwrap();
        let report = verify_perfect(&code, &limits()).unwrap();
        assert!(!report.accepted());
        match report.witness.unwrap() {
            FailureWitness::Vertex { word, covered } => {
                assert_eq!(word, Word::new(vec![0, 1, 1], 2).unwrap());
                assert_eq!(covered, 0);
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn extended_routes_reject_a_dense_code() {
        let words = vec![
            Word::new(vec![0, 0], 2).unwrap(),
            Word::new(vec![0, 1], 2).unwrap(),
        ];
        let code = Code::from_words(words).unwrap();
        let partition = verify_extended_partition(&code, &limits()).unwrap();
        assert!(!partition.accepted());
        assert!(matches!(
            partition.witness,
            Some(FailureWitness::Radius { covering_radius: 1 })
        ));
        let fast = verify_extended_fast(&code, &limits()).unwrap();
        assert!(!fast.accepted());
    }

    #[test]
    fn extended_routes_reject_a_close_pair() {
        // Two words in H(4,2): the cardinality 2^3/4 = 2 is right, but the
        // pair sits at distance 2.
        let words = vec![
            Word::new(vec![0, 0, 0, 0], 2).unwrap(),
            Word::new(vec![0, 0, 1, 1], 2).unwrap(),
        ];
        let code = Code::from_words(words).unwrap();
        let fast = verify_extended_fast(&code, &limits()).unwrap();
        assert!(!fast.accepted());
        match fast.witness {
            Some(FailureWitness::Pair { distance, .. }) => assert_eq!(distance, 2),
            other => panic!("expected a pair witness, got {other:?}"),
        }
        let puncture_report = verify_extended_puncture(&code, &limits()).unwrap();
        assert!(!puncture_report.accepted());
    }

    #[test]
    fn roundtrip_through_code_file() {
        let code = extended_binary_hamming_code(3, &limits()).unwrap();
        let text = code_to_string(&code, &limits()).unwrap();
        let parsed = parse_code(&text).unwrap();
        assert_eq!(parsed.n(), code.n());
        assert_eq!(parsed.q(), code.q());
        assert_eq!(parsed.words().unwrap(), code.words().unwrap());
    }

    #[test]
    fn parse_rejects_duplicates_and_bad_symbols() {
        let dup = "2 2\n0 1\n0 1\n";
        assert!(matches!(
            parse_code(dup),
            Err(Error::DuplicateWord { line: 3 })
        ));
        let bad = "2 2\n0 2\n";
        assert!(matches!(parse_code(bad), Err(Error::Parse { line: 2, .. })));
        let short = "3 2\n0 1\n";
        assert!(matches!(parse_code(short), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_code("# only comments\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_ignores_comments_and_blank_lines() {
        let text = "# family=trivial q=3\n\n2 3\n0 0\n";
        let code = parse_code(text).unwrap();
        assert_eq!(code.n(), 2);
        assert_eq!(code.q(), 3);
        assert_eq!(code.size(), BigInt::from(1));
    }

    #[test]
    fn puncture_collapses_coinciding_images() {
        let words = vec![
            Word::new(vec![0, 0], 2).unwrap(),
            Word::new(vec![1, 0], 2).unwrap(),
        ];
        let code = Code::from_words(words).unwrap();
        let punctured = puncture(&code, 0, &limits()).unwrap();
        assert_eq!(punctured.size(), BigInt::from(1));
    }

    #[test]
    fn contains_uses_syndrome_for_linear_codes() {
        let code = hyperoval_code(3, None, &limits()).unwrap();
        assert!(!code.is_materialized());
        let zero = Word::zero(10, 8).unwrap();
        assert!(code.contains(&zero).unwrap());
        let mut symbols = vec![0u16; 10];
        symbols[0] = 1;
        let one_off = Word::new(symbols, 8).unwrap();
        assert!(!code.contains(&one_off).unwrap());
    }

    #[test]
    fn normalized_messages_cover_projective_space() {
        let field = FieldSpec::new(3, 1).unwrap();
        let msgs: Vec<Vec<u16>> = normalized_messages(&field, 3).collect();
        // (3^3 - 1) / 2 = 13 representatives.
        assert_eq!(msgs.len(), 13);
        assert!(msgs.contains(&vec![1, 0, 0]));
        assert!(msgs.contains(&vec![0, 1, 2]));
        assert!(msgs.iter().all(|m| m.iter().any(|&d| d != 0)));
    }

    #[test]
    fn materialization_cap_is_enforced() {
        let tight = Limits {
            materialize_words: 8,
            ..Limits::default()
        };
        let code = extended_binary_hamming_code(3, &tight).unwrap();
        // Construction leaves the code symbolic; materialization errors.
        assert!(!code.is_materialized());
        assert!(matches!(
            code.materialized_words(&tight),
            Err(Error::CapExceeded { .. })
        ));
        // The fast route still works.
        assert!(verify_extended_fast(&code, &tight).unwrap().accepted());
    }
}
