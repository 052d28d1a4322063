//! Closed-form spectral data for distance partitions of extended perfect
//! codes in H(n,q).
//!
//! The distance partition of an extended perfect code has three cells and a
//! fixed distance-1 quotient S. The dual transform S' = (n(q-1) I - S)/q
//! has eigenvalues ((nq-n-q+2)/q, n, 0) with an explicit eigenvector matrix
//! Q, giving the Jordan form S' = Q J Q^{-1}. Writing e = (nq-n-q+2)/q and
//! x = (n+q-2)/q (so e + x = n), the quotient of the same partition in the
//! distance-i graph is Q diag(K_i(e), K_i(n), K_i(0)) Q^{-1}, where K_i is
//! the Krawtchouk polynomial of degree i for H(n,q). Entry (3,1) of the
//! distance-n quotient collapses to
//!
//!   ( -n m1 + e m2 + x m3 ) / (q^2 e x),
//!
//! with m1 = (-1)^e (q-1)^x, m2 = (-1)^n, m3 = (q-1)^n; its integrality is
//! a strong necessary condition for existence.

use crate::error::Error;
use crate::exact::{
    alternating_sign, binomial, mat_mul, rat, rat_int, Rational, RationalMatrix,
};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Largest x = (n+q-2)/q for which (q-1)^x is expanded explicitly; beyond
/// this the modular screens in the feasibility module take over.
const EXPANSION_CAP: u64 = 1 << 20;

/// Derived spectral parameters of the pair (n,q).
#[derive(Clone, Debug)]
pub struct SpectralContext {
    pub n: u64,
    pub q: u64,
    /// x = (n+q-2)/q.
    pub x: Rational,
    /// e = (nq-n-q+2)/q, the leading dual eigenvalue.
    pub e: Rational,
    /// True when e (equivalently x) is an integer, i.e. q divides n-2.
    pub eigen_integral: bool,
}

impl SpectralContext {
    pub fn new(n: u64, q: u64) -> Result<Self, Error> {
        check_params(n, q)?;
        let x = rat(BigInt::from(n + q - 2), BigInt::from(q));
        let e = rat(
            BigInt::from(n) * (q - 1) - BigInt::from(q) + 2,
            BigInt::from(q),
        );
        let eigen_integral = x.is_integer();
        Ok(SpectralContext {
            n,
            q,
            x,
            e,
            eigen_integral,
        })
    }

    pub fn x_int(&self) -> Option<BigInt> {
        self.x.is_integer().then(|| self.x.to_integer())
    }

    pub fn e_int(&self) -> Option<BigInt> {
        self.e.is_integer().then(|| self.e.to_integer())
    }
}

fn check_params(n: u64, q: u64) -> Result<(), Error> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("word length {n} < 2")));
    }
    if q < 2 {
        return Err(Error::InvalidParameter(format!("alphabet size {q} < 2")));
    }
    Ok(())
}

/// Distance-1 quotient of the two-cell distance partition of a 1-perfect
/// code in H(n,q): [[0, n(q-1)], [1, n(q-1)-1]].
pub fn perfect_quotient(n: u64, q: u64) -> Result<RationalMatrix, Error> {
    if n < 1 || q < 2 {
        return Err(Error::InvalidParameter(format!(
            "perfect quotient needs n >= 1, q >= 2, got n={n}, q={q}"
        )));
    }
    let degree = BigInt::from(n) * (q - 1);
    RationalMatrix::from_rows(vec![
        vec![rat_int(0), rat_int(degree.clone())],
        vec![rat_int(1), rat_int(degree - 1)],
    ])
}

/// Distance-1 quotient of the three-cell distance partition of an extended
/// perfect code in H(n,q):
/// [[0, n(q-1), 0], [1, q-2, (n-1)(q-1)], [0, n, n(q-2)]].
pub fn extended_perfect_quotient(n: u64, q: u64) -> Result<RationalMatrix, Error> {
    check_params(n, q)?;
    let n = BigInt::from(n);
    let q = BigInt::from(q);
    let one = BigInt::one();
    RationalMatrix::from_rows(vec![
        vec![rat_int(0), rat_int(&n * (&q - &one)), rat_int(0)],
        vec![
            rat_int(1),
            rat_int(&q - 2),
            rat_int((&n - &one) * (&q - &one)),
        ],
        vec![rat_int(0), rat_int(n.clone()), rat_int(&n * (&q - 2))],
    ])
}

/// Dual transform S' = (n(q-1) I - S) / q. Defined for any square quotient
/// matrix of a partition of H(n,q).
pub fn dual_transform(s: &RationalMatrix, n: u64, q: u64) -> Result<RationalMatrix, Error> {
    check_params(n, q)?;
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    let degree = rat_int(BigInt::from(n) * (q - 1));
    let scaled_identity = RationalMatrix::identity(s.rows()).scale(&degree);
    let diff = scaled_identity.sub(s)?;
    Ok(diff.scale(&rat(1, q as i64)))
}

/// Jordan form data of the dual transform of the extended perfect quotient:
/// S' = Q J Q^{-1} with J = diag((nq-n-q+2)/q, n, 0).
#[derive(Clone, Debug)]
pub struct JordanTriple {
    pub context: SpectralContext,
    pub q_mat: RationalMatrix,
    pub j: RationalMatrix,
    pub q_inv: RationalMatrix,
}

/// Builds (Q, J, Q^{-1}) from their closed forms and verifies S'Q = QJ and
/// Q Q^{-1} = I before returning.
pub fn jordan_triple(n: u64, q: u64) -> Result<JordanTriple, Error> {
    let context = SpectralContext::new(n, q)?;
    let nb = BigInt::from(n);
    let qb = BigInt::from(q);
    let one = BigInt::one();
    let qm1 = &qb - &one;
    let qm2 = &qb - 2u32;
    // e_num = nq - n - q + 2 = q*e, x_num = n + q - 2 = q*x.
    let e_num = &nb * &qm1 - &qm2;
    let x_num = &nb + &qm2;

    let q_mat = RationalMatrix::from_rows(vec![
        vec![rat_int(1), rat_int(1), rat_int(1)],
        vec![
            rat(qm2.clone(), &nb * &qm1),
            rat(-one.clone(), qm1.clone()),
            rat_int(1),
        ],
        vec![
            rat(-one.clone(), (&nb - &one) * &qm1),
            rat(one.clone(), &qm1 * &qm1),
            rat_int(1),
        ],
    ])?;

    let j = RationalMatrix::from_rows(vec![
        vec![rat(e_num.clone(), qb.clone()), rat_int(0), rat_int(0)],
        vec![rat_int(0), rat_int(nb.clone()), rat_int(0)],
        vec![rat_int(0), rat_int(0), rat_int(0)],
    ])?;

    let den1 = &e_num * &x_num;
    let den2 = &qb * &x_num;
    let den3 = &qb * &e_num;
    let nn1q1 = &nb * (&nb - &one) * &qm1;
    let q1sq = &qm1 * &qm1;
    let q_inv = RationalMatrix::from_rows(vec![
        vec![
            rat(nn1q1.clone(), den1.clone()),
            rat(&nn1q1 * &qm2, den1.clone()),
            rat(-(&nn1q1 * &qm1), den1.clone()),
        ],
        vec![
            rat(q1sq.clone(), den2.clone()),
            rat(-(&nb * &q1sq), den2.clone()),
            rat((&nb - &one) * &q1sq, den2.clone()),
        ],
        vec![
            rat(one.clone(), den3.clone()),
            rat(&nb * &qm1, den3.clone()),
            rat((&nb - &one) * &q1sq, den3),
        ],
    ])?;

    // Both identities are cheap 3x3 products; fail loudly if the closed
    // forms ever disagree with each other.
    let s_prime = dual_transform(&extended_perfect_quotient(n, q)?, n, q)?;
    if mat_mul(&s_prime, &q_mat)? != mat_mul(&q_mat, &j)? {
        return Err(Error::Internal(format!(
            "eigenvector identity S'Q = QJ failed for n={n}, q={q}"
        )));
    }
    if mat_mul(&q_mat, &q_inv)? != RationalMatrix::identity(3) {
        return Err(Error::Internal(format!(
            "inverse identity Q Qinv = I failed for n={n}, q={q}"
        )));
    }
    Ok(JordanTriple {
        context,
        q_mat,
        j,
        q_inv,
    })
}

/// Closed form of det Q: -q (nq-n-q+2)(n+q-2) / (n(n-1)(q-1)^3).
pub fn jordan_q_det_closed(n: u64, q: u64) -> Result<Rational, Error> {
    check_params(n, q)?;
    let nb = BigInt::from(n);
    let qb = BigInt::from(q);
    let one = BigInt::one();
    let qm1 = &qb - &one;
    let e_num = &nb * &qm1 - (&qb - 2u32);
    let x_num = &nb + &qb - 2u32;
    Ok(rat(
        -(&qb * &e_num * &x_num),
        &nb * (&nb - &one) * (&qm1 * &qm1 * &qm1),
    ))
}

/// Krawtchouk polynomial K_r(x) for H(n,q), evaluated at an integer x:
///
///   K_r(x, q, n) = sum_{j=0}^{r} (-1)^j q^(r-j) C(n-r+j, j) C(n-x, r-j),
///
/// with C(a,b) = 0 outside 0 <= b <= a.
pub fn krawtchouk(r: u64, x: &BigInt, q: u64, n: u64) -> Result<BigInt, Error> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("alphabet size {q} < 2")));
    }
    if r > n {
        return Err(Error::InvalidParameter(format!(
            "degree {r} exceeds word length {n}"
        )));
    }
    let nb = BigInt::from(n);
    let qb = BigInt::from(q);
    let n_minus_x = &nb - x;
    let mut sum = BigInt::zero();
    for j in 0..=r {
        let term = qb.pow((r - j) as u32)
            * binomial(&BigInt::from(n - r + j), &BigInt::from(j))
            * binomial(&n_minus_x, &BigInt::from(r - j));
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

/// Top-degree closed form K_n(x, q, n) = (-1)^x (q-1)^(n-x) for 0 <= x <= n.
pub fn krawtchouk_top(x: u64, q: u64, n: u64) -> Result<BigInt, Error> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("alphabet size {q} < 2")));
    }
    if x > n {
        return Err(Error::InvalidParameter(format!(
            "evaluation point {x} exceeds word length {n}"
        )));
    }
    let value = BigInt::from(q - 1).pow((n - x) as u32);
    Ok(alternating_sign(&BigInt::from(x)) * value)
}

/// Closed-form quotient of the extended perfect distance partition in the
/// distance-i graph: Q diag(K_i(e), K_i(n), K_i(0)) Q^{-1}.
///
/// Requires the dual eigenvalue e to be integral (q divides n-2); otherwise
/// the partition cannot exist and the evaluation points are undefined.
pub fn distance_quotient_closed(n: u64, q: u64, dist: u64) -> Result<RationalMatrix, Error> {
    if dist > n {
        return Err(Error::InvalidParameter(format!(
            "distance {dist} exceeds word length {n}"
        )));
    }
    let triple = jordan_triple(n, q)?;
    let e = triple
        .context
        .e_int()
        .ok_or(Error::NonIntegralEigenvalue { n: n.to_string(), q })?;
    let k_e = krawtchouk(dist, &e, q, n)?;
    let k_n = krawtchouk(dist, &BigInt::from(n), q, n)?;
    let k_0 = krawtchouk(dist, &BigInt::zero(), q, n)?;
    let m = RationalMatrix::from_rows(vec![
        vec![rat_int(k_e), rat_int(0), rat_int(0)],
        vec![rat_int(0), rat_int(k_n), rat_int(0)],
        vec![rat_int(0), rat_int(0), rat_int(k_0)],
    ])?;
    mat_mul(&mat_mul(&triple.q_mat, &m)?, &triple.q_inv)
}

/// Closed form for entry (3,1) (1-indexed) of the distance-n quotient:
/// (-n m1 + e m2 + x m3) / (q^2 e x) with m1 = (-1)^e (q-1)^x,
/// m2 = (-1)^n, m3 = (q-1)^n. Requires integral e and x.
pub fn distance_n_corner_entry(n: u64, q: u64) -> Result<Rational, Error> {
    let context = SpectralContext::new(n, q)?;
    let x = context
        .x_int()
        .ok_or(Error::NonIntegralEigenvalue { n: n.to_string(), q })?;
    let e = context.e_int().expect("x integral implies e integral");
    if n > EXPANSION_CAP {
        return Err(Error::CapExceeded {
            needed: n as u128,
            cap: EXPANSION_CAP as u128,
        });
    }
    let x_u32 = x.to_u32().ok_or(Error::CapExceeded {
        needed: u128::MAX,
        cap: EXPANSION_CAP as u128,
    })?;
    let qm1 = BigInt::from(q - 1);
    let m1 = alternating_sign(&e) * qm1.pow(x_u32);
    let m2 = alternating_sign(&BigInt::from(n));
    let m3 = qm1.pow(n as u32);
    let numerator = -BigInt::from(n) * m1 + &e * m2 + &x * m3;
    let denominator = BigInt::from(q) * BigInt::from(q) * &e * &x;
    Ok(rat(numerator, denominator))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{mat_det, mat_inverse};

    #[test]
    fn extended_quotients_match_known_values() {
        let m42 = extended_perfect_quotient(4, 2).unwrap();
        assert_eq!(
            m42,
            RationalMatrix::from_i64_rows(&[&[0, 4, 0], &[1, 0, 3], &[0, 4, 0]])
        );
        let m64 = extended_perfect_quotient(6, 4).unwrap();
        assert_eq!(
            m64,
            RationalMatrix::from_i64_rows(&[&[0, 18, 0], &[1, 2, 15], &[0, 6, 12]])
        );
        // Symbolic H(2,q) form for a few alphabet sizes.
        for q in [2i64, 3, 5, 9] {
            let m = extended_perfect_quotient(2, q as u64).unwrap();
            let expected = RationalMatrix::from_i64_rows(&[
                &[0, 2 * (q - 1), 0],
                &[1, q - 2, q - 1],
                &[0, 2, 2 * (q - 2)],
            ]);
            assert_eq!(m, expected);
        }
    }

    #[test]
    fn perfect_quotient_form() {
        assert_eq!(
            perfect_quotient(4, 3).unwrap(),
            RationalMatrix::from_i64_rows(&[&[0, 8], &[1, 7]])
        );
        assert_eq!(
            perfect_quotient(7, 2).unwrap(),
            RationalMatrix::from_i64_rows(&[&[0, 7], &[1, 6]])
        );
    }

    #[test]
    fn dual_transform_of_h42_quotient() {
        let s = extended_perfect_quotient(4, 2).unwrap();
        let sp = dual_transform(&s, 4, 2).unwrap();
        let expected = RationalMatrix::from_rows(vec![
            vec![rat_int(2), rat_int(-2), rat_int(0)],
            vec![rat(-1, 2), rat_int(2), rat(-3, 2)],
            vec![rat_int(0), rat_int(-2), rat_int(2)],
        ])
        .unwrap();
        assert_eq!(sp, expected);
    }

    #[test]
    fn dual_transform_of_h64_quotient() {
        let s = extended_perfect_quotient(6, 4).unwrap();
        let sp = dual_transform(&s, 6, 4).unwrap();
        let expected = RationalMatrix::from_rows(vec![
            vec![rat(9, 2), rat(-9, 2), rat_int(0)],
            vec![rat(-1, 4), rat_int(4), rat(-15, 4)],
            vec![rat_int(0), rat(-3, 2), rat(3, 2)],
        ])
        .unwrap();
        assert_eq!(sp, expected);
    }

    #[test]
    fn jordan_eigenvalues() {
        let t82 = jordan_triple(8, 2).unwrap();
        assert_eq!(*t82.j.get(0, 0), rat_int(4));
        assert_eq!(*t82.j.get(1, 1), rat_int(8));
        assert_eq!(*t82.j.get(2, 2), rat_int(0));
        let t64 = jordan_triple(6, 4).unwrap();
        assert_eq!(*t64.j.get(0, 0), rat_int(4));
        // (nq-n-q+2)/q at (5,3) is 9/3 = 3: integral.
        let t53 = jordan_triple(5, 3).unwrap();
        assert_eq!(*t53.j.get(0, 0), rat_int(3));
        assert!(t53.context.eigen_integral);
        // (5,4) gives 13/4: flagged non-integral.
        let t54 = jordan_triple(5, 4).unwrap();
        assert_eq!(*t54.j.get(0, 0), rat(13, 4));
        assert!(!t54.context.eigen_integral);
    }

    #[test]
    fn jordan_det_matches_closed_form() {
        for (n, q) in [(4u64, 2u64), (6, 4), (8, 2), (10, 3), (23, 16)] {
            let triple = jordan_triple(n, q).unwrap();
            assert_eq!(
                mat_det(&triple.q_mat).unwrap(),
                jordan_q_det_closed(n, q).unwrap(),
                "det Q at ({n},{q})"
            );
        }
    }

    #[test]
    fn jordan_inverse_matches_elimination() {
        let triple = jordan_triple(6, 4).unwrap();
        assert_eq!(mat_inverse(&triple.q_mat).unwrap(), triple.q_inv);
    }

    #[test]
    fn context_satisfies_e_plus_x_equals_n() {
        for n in 2u64..=40 {
            for q in 2u64..=16 {
                let c = SpectralContext::new(n, q).unwrap();
                assert_eq!(&c.e + &c.x, rat_int(n as i64));
                assert_eq!(c.eigen_integral, (n - 2) % q == 0);
            }
        }
    }

    #[test]
    fn krawtchouk_known_values() {
        assert_eq!(krawtchouk(1, &BigInt::from(0), 2, 4).unwrap(), BigInt::from(4));
        assert_eq!(krawtchouk(4, &BigInt::from(2), 2, 4).unwrap(), BigInt::from(1));
        assert_eq!(krawtchouk(6, &BigInt::from(0), 4, 6).unwrap(), BigInt::from(729));
    }

    #[test]
    fn krawtchouk_degree_one_is_linear() {
        // K_1(x) = n(q-1) - qx.
        for n in 2u64..=10 {
            for q in 2u64..=5 {
                for x in 0..=n {
                    let expected = BigInt::from(n * (q - 1)) - BigInt::from(q * x);
                    assert_eq!(krawtchouk(1, &BigInt::from(x), q, n).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn krawtchouk_top_matches_summation() {
        for n in 1u64..=12 {
            for q in 2u64..=5 {
                for x in 0..=n {
                    assert_eq!(
                        krawtchouk(n, &BigInt::from(x), q, n).unwrap(),
                        krawtchouk_top(x, q, n).unwrap(),
                        "K_n({x}) for H({n},{q})"
                    );
                }
            }
        }
    }

    #[test]
    fn krawtchouk_at_zero_counts_spheres() {
        for n in 1u64..=10 {
            for q in 2u64..=4 {
                for r in 0..=n {
                    assert_eq!(
                        krawtchouk(r, &BigInt::zero(), q, n).unwrap(),
                        crate::graph::sphere_size(n, q, r).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn distance_one_closed_quotient_recovers_distance_partition_form() {
        for (n, q) in [(4u64, 2u64), (8, 2), (6, 4), (10, 4), (18, 16)] {
            assert_eq!(
                distance_quotient_closed(n, q, 1).unwrap(),
                extended_perfect_quotient(n, q).unwrap(),
                "distance-1 quotient at ({n},{q})"
            );
        }
    }

    #[test]
    fn distance_n_closed_quotient_special_cases() {
        // H(4,2) and H(8,2): the distance-n quotient is the identity.
        assert_eq!(
            distance_quotient_closed(4, 2, 4).unwrap(),
            RationalMatrix::identity(3)
        );
        assert_eq!(
            distance_quotient_closed(8, 2, 8).unwrap(),
            RationalMatrix::identity(3)
        );
        // H(6,4): entry (3,1) is 11.
        let m = distance_quotient_closed(6, 4, 6).unwrap();
        assert_eq!(*m.get(2, 0), rat_int(11));
    }

    #[test]
    fn distance_quotient_requires_integral_eigenvalue() {
        assert!(matches!(
            distance_quotient_closed(5, 4, 5),
            Err(Error::NonIntegralEigenvalue { .. })
        ));
    }

    #[test]
    fn corner_entry_closed_form_values() {
        assert_eq!(distance_n_corner_entry(6, 4).unwrap(), rat_int(11));
        assert_eq!(distance_n_corner_entry(8, 2).unwrap(), rat_int(0));
        // (22,4): 367746761/3, not an integer, so no such code exists.
        assert_eq!(distance_n_corner_entry(22, 4).unwrap(), rat(367746761, 3));
        assert!(!distance_n_corner_entry(22, 4).unwrap().is_integer());
    }

    #[test]
    fn corner_entry_matches_full_matrix() {
        for (n, q) in [(4u64, 2u64), (6, 4), (8, 2), (10, 4), (14, 3), (22, 4)] {
            let matrix = distance_quotient_closed(n, q, n).unwrap();
            let closed = distance_n_corner_entry(n, q).unwrap();
            assert_eq!(*matrix.get(2, 0), closed, "corner entry at ({n},{q})");
        }
    }
}
