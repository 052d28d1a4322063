//! Exact-arithmetic toolkit for perfect and extended perfect codes in
//! Hamming graphs H(n,q).
//!
//! A code C in H(n,q) is 1-perfect when the radius-1 balls around its words
//! tile the vertex set, and extended perfect when every coordinate puncturing
//! is 1-perfect in H(n-1,q). The crate constructs the known families, checks
//! candidate codes by three independent routes, computes the spectral data of
//! their distance partitions (quotient matrices, Jordan form, Krawtchouk
//! transforms) in exact rational arithmetic, and runs the number-theoretic
//! screens that rule parameters in or out. A backtracking search provides an
//! independent oracle at small scale.
//!
//! Module map:
//! * [`exact`]: big integers, reduced rationals, rational matrices.
//! * [`gf`]: finite field arithmetic GF(p^m) and null spaces.
//! * [`graph`]: words, distance partitions, empirical quotient matrices.
//! * [`codes`]: code constructions, puncturing, the three verification routes.
//! * [`spectral`]: closed-form quotients, Jordan triple, Krawtchouk values.
//! * [`feasibility`]: existence screens, classification, refutation witnesses.
//! * [`search`]: exhaustive backtracking search for extended perfect codes.

pub mod codes;
pub mod error;
pub mod exact;
pub mod feasibility;
pub mod gf;
pub mod graph;
pub mod search;
pub mod spectral;

pub use error::Error;

/// Re-exported so downstream crates can name the integer types that appear
/// in this crate's public signatures.
pub use num_bigint;

/// Resource guards for exhaustive enumeration.
///
/// `vertex_visits` caps the number of vertex inspections a graph-wide scan
/// may plan (distance partitions, empirical quotients, ball tilings).
/// `materialize_words` caps how many codewords a linear construction will
/// expand into an explicit word list; larger codes keep only their
/// parity-check form.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub vertex_visits: u128,
    pub materialize_words: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            vertex_visits: 1 << 30,
            materialize_words: 1 << 20,
        }
    }
}

impl Limits {
    /// Fails with `Error::CapExceeded` when `needed` exceeds the visit cap.
    pub fn check_visits(&self, needed: u128) -> Result<(), Error> {
        if needed > self.vertex_visits {
            Err(Error::CapExceeded {
                needed,
                cap: self.vertex_visits,
            })
        } else {
            Ok(())
        }
    }
}
