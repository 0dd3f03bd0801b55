//! Extended real numbers with the two Dedekind additions and both residuations.
//!
//! The extended reals carry two distinct extensions of `+`: the inf-addition,
//! dominated by `+∞`, and the sup-addition, dominated by `-∞`. Each addition
//! has an adjoint "difference" (residuation) that replaces subtraction. All
//! values are exact rationals; there is no floating point anywhere.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Parse a rational from `"p"` or `"p/q"` notation.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let numer = BigInt::from_str(num_str.trim())
        .map_err(|_| Error::rational(format!("malformed rational '{s}'")))?;
    let denom = BigInt::from_str(den_str.trim())
        .map_err(|_| Error::rational(format!("malformed rational '{s}'")))?;
    if denom.is_zero() {
        return Err(Error::rational(format!("zero denominator in '{s}'")));
    }
    Ok(Rat::new(numer, denom))
}

/// Render a rational as `"p"` or `"p/q"` in lowest terms.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Convenience constructor for small rationals.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Extended real: `-∞`, an exact rational, or `+∞`.
///
/// Finite values are stored in lowest terms with positive denominator
/// (guaranteed by `BigRational`). The order is total with
/// `-∞ < finite < +∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum XReal {
    NegInf,
    Finite(Rat),
    PosInf,
}

impl XReal {
    pub fn zero() -> Self {
        XReal::Finite(Rat::zero())
    }

    pub fn finite(r: Rat) -> Self {
        XReal::Finite(r)
    }

    pub fn from_int(n: i64) -> Self {
        XReal::Finite(rat(n, 1))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, XReal::Finite(_))
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            XReal::Finite(r) => Some(r),
            _ => None,
        }
    }

    /// Multiplication by `-1`, the duality between the inf- and sup-structures:
    /// `(-1)·(±∞) = ∓∞`.
    pub fn negate(&self) -> XReal {
        match self {
            XReal::NegInf => XReal::PosInf,
            XReal::Finite(r) => XReal::Finite(-r),
            XReal::PosInf => XReal::NegInf,
        }
    }
}

impl PartialOrd for XReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for XReal {
    fn cmp(&self, other: &Self) -> Ordering {
        use XReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) => Ordering::Less,
            (_, NegInf) => Ordering::Greater,
            (PosInf, _) => Ordering::Greater,
            (_, PosInf) => Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XReal::NegInf => write!(f, "-inf"),
            XReal::Finite(r) => write!(f, "{}", rat_to_string(r)),
            XReal::PosInf => write!(f, "+inf"),
        }
    }
}

impl FromStr for XReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "+inf" | "inf" => Ok(XReal::PosInf),
            "-inf" => Ok(XReal::NegInf),
            other => Ok(XReal::Finite(parse_rat(other)?)),
        }
    }
}

impl Serialize for XReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for XReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e| D::Error::custom(format!("{e}")))
    }
}

/// Serialize `Vec<Rat>` as a list of `"p/q"` strings.
pub mod serde_rats {
    use super::{rat_to_string, Rat};
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(rat_to_string).collect();
        strings.serialize(s)
    }
}

/// Serialize `Option<Vec<Rat>>` as an optional list of `"p/q"` strings.
pub mod serde_rats_opt {
    use super::{rat_to_string, Rat};
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rat>>, s: S) -> Result<S::Ok, S::Error> {
        let strings: Option<Vec<String>> = v
            .as_ref()
            .map(|v| v.iter().map(rat_to_string).collect());
        strings.serialize(s)
    }
}

/// Inf-addition: `+∞` dominates. The full 3×3 tag table, written out.
pub fn inf_add(a: &XReal, b: &XReal) -> XReal {
    use XReal::*;
    match (a, b) {
        (PosInf, _) | (_, PosInf) => PosInf,
        (NegInf, NegInf) => NegInf,
        (NegInf, Finite(_)) | (Finite(_), NegInf) => NegInf,
        (Finite(x), Finite(y)) => Finite(x + y),
    }
}

/// Sup-addition: `-∞` dominates. Dual of [`inf_add`].
pub fn sup_add(a: &XReal, b: &XReal) -> XReal {
    use XReal::*;
    match (a, b) {
        (NegInf, _) | (_, NegInf) => NegInf,
        (PosInf, PosInf) => PosInf,
        (PosInf, Finite(_)) | (Finite(_), PosInf) => PosInf,
        (Finite(x), Finite(y)) => Finite(x + y),
    }
}

/// Inf-residuation: `idif(a, b) = inf { t : a ≤ inf_add(b, t) }`.
///
/// Identity: `idif(a, b) = sup_add(a, -b)`.
pub fn idif(a: &XReal, b: &XReal) -> XReal {
    sup_add(a, &b.negate())
}

/// Sup-residuation: `sdif(a, b) = sup { t : sup_add(b, t) ≤ a }`.
///
/// Identity: `sdif(a, b) = inf_add(a, -b)`.
pub fn sdif(a: &XReal, b: &XReal) -> XReal {
    inf_add(a, &b.negate())
}

/// Scaling in the conlinear structure: `t ≥ 0` or `t = -1`.
///
/// `0·(±∞) = 0` and `(-1)·(±∞) = ∓∞`; other negative factors are undefined.
pub fn scale(t: &Rat, a: &XReal) -> Result<XReal, Error> {
    if t.is_zero() {
        return Ok(XReal::zero());
    }
    if *t == -Rat::one() {
        return Ok(a.negate());
    }
    if t.is_negative() {
        return Err(Error::InvalidScale(rat_to_string(t)));
    }
    Ok(match a {
        XReal::NegInf => XReal::NegInf,
        XReal::PosInf => XReal::PosInf,
        XReal::Finite(r) => XReal::Finite(t * r),
    })
}

/// Lattice infimum; `inf ∅ = +∞`.
pub fn inf_of<'a, I: IntoIterator<Item = &'a XReal>>(items: I) -> XReal {
    items
        .into_iter()
        .fold(XReal::PosInf, |acc, x| if *x < acc { x.clone() } else { acc })
}

/// Lattice supremum; `sup ∅ = -∞`.
pub fn sup_of<'a, I: IntoIterator<Item = &'a XReal>>(items: I) -> XReal {
    items
        .into_iter()
        .fold(XReal::NegInf, |acc, x| if *x > acc { x.clone() } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Definitional oracle for the inf-addition, evaluated symbolically from
    /// `inf { a + b : a, b ∈ Q, r ≤ a, s ≤ b }`: the set is empty iff either
    /// bound is +∞ (inf ∅ = +∞), unbounded below iff either bound is -∞,
    /// and attained at (r, s) otherwise.
    fn def_inf_add(r: &XReal, s: &XReal) -> XReal {
        use XReal::*;
        match (r, s) {
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }

    /// Definitional oracle for the sup-addition, from
    /// `sup { a + b : a ≤ r, b ≤ s }` (sup ∅ = -∞).
    fn def_sup_add(r: &XReal, s: &XReal) -> XReal {
        use XReal::*;
        match (r, s) {
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }

    /// Symbolic grid used by the exhaustive checks.
    fn grid() -> Vec<XReal> {
        vec![
            XReal::NegInf,
            XReal::from_int(-1),
            XReal::zero(),
            XReal::from_int(1),
            XReal::PosInf,
        ]
    }

    /// `idif` from its defining infimum, enumerated over a symbolic candidate
    /// set. The predicate `a ≤ inf_add(b, t)` is monotone in `t`, and on the
    /// 5-point grid the defining infimum is always attained at a grid point
    /// extended by finite probes.
    fn def_idif(a: &XReal, b: &XReal) -> XReal {
        let mut candidates = grid();
        candidates.extend([XReal::from_int(-2), XReal::from_int(2)]);
        candidates.sort();
        let sat: Vec<XReal> = candidates
            .into_iter()
            .filter(|t| *a <= def_inf_add(b, t))
            .collect();
        inf_of(sat.iter())
    }

    fn def_sdif(a: &XReal, b: &XReal) -> XReal {
        let mut candidates = grid();
        candidates.extend([XReal::from_int(-2), XReal::from_int(2)]);
        candidates.sort();
        let sat: Vec<XReal> = candidates
            .into_iter()
            .filter(|t| def_sup_add(b, t) <= *a)
            .collect();
        sup_of(sat.iter())
    }

    #[test]
    fn inf_add_examples() {
        assert_eq!(inf_add(&XReal::PosInf, &XReal::NegInf), XReal::PosInf);
        assert_eq!(
            inf_add(&XReal::Finite(rat(3, 2)), &XReal::Finite(rat(-1, 2))),
            XReal::from_int(1)
        );
        assert_eq!(inf_add(&XReal::NegInf, &XReal::from_int(7)), XReal::NegInf);
    }

    #[test]
    fn sup_add_examples() {
        assert_eq!(sup_add(&XReal::NegInf, &XReal::PosInf), XReal::NegInf);
        assert_eq!(sup_add(&XReal::from_int(2), &XReal::from_int(2)), XReal::from_int(4));
        assert_eq!(sup_add(&XReal::PosInf, &XReal::from_int(5)), XReal::PosInf);
    }

    #[test]
    fn idif_examples() {
        assert_eq!(idif(&XReal::from_int(5), &XReal::from_int(3)), XReal::from_int(2));
        // Derived via the symbolic enumeration oracle.
        assert_eq!(def_idif(&XReal::from_int(1), &XReal::NegInf), XReal::PosInf);
        assert_eq!(idif(&XReal::from_int(4), &XReal::NegInf), XReal::PosInf);
        assert_eq!(def_idif(&XReal::NegInf, &XReal::PosInf), XReal::NegInf);
        assert_eq!(idif(&XReal::NegInf, &XReal::PosInf), XReal::NegInf);
    }

    #[test]
    fn sdif_examples() {
        assert_eq!(sdif(&XReal::from_int(5), &XReal::from_int(3)), XReal::from_int(2));
        assert_eq!(def_sdif(&XReal::PosInf, &XReal::PosInf), XReal::PosInf);
        assert_eq!(sdif(&XReal::PosInf, &XReal::PosInf), XReal::PosInf);
        assert_eq!(def_sdif(&XReal::from_int(3), &XReal::PosInf), XReal::NegInf);
        assert_eq!(sdif(&XReal::from_int(3), &XReal::PosInf), XReal::NegInf);
    }

    #[test]
    fn scale_examples() {
        assert_eq!(scale(&Rat::zero(), &XReal::PosInf).unwrap(), XReal::zero());
        assert_eq!(scale(&rat(-1, 1), &XReal::PosInf).unwrap(), XReal::NegInf);
        assert_eq!(
            scale(&rat(2, 1), &XReal::Finite(rat(3, 2))).unwrap(),
            XReal::from_int(3)
        );
        assert!(scale(&rat(-2, 1), &XReal::from_int(1)).is_err());
    }

    #[test]
    fn inf_sup_of_conventions() {
        assert_eq!(inf_of([].iter()), XReal::PosInf);
        assert_eq!(sup_of([].iter()), XReal::NegInf);
        let xs = vec![XReal::from_int(3), XReal::NegInf, XReal::from_int(7)];
        assert_eq!(inf_of(xs.iter()), XReal::NegInf);
    }

    #[test]
    fn truth_tables_match_definitions() {
        for a in grid() {
            for b in grid() {
                assert_eq!(inf_add(&a, &b), def_inf_add(&a, &b), "inf_add({a}, {b})");
                assert_eq!(sup_add(&a, &b), def_sup_add(&a, &b), "sup_add({a}, {b})");
                assert_eq!(idif(&a, &b), def_idif(&a, &b), "idif({a}, {b})");
                assert_eq!(sdif(&a, &b), def_sdif(&a, &b), "sdif({a}, {b})");
            }
        }
    }

    #[test]
    fn residuation_adjunction() {
        // a ≤ b ⊕ t  ⇔  a ⊖ b ≤ t, over the full symbolic cube.
        for a in grid() {
            for b in grid() {
                for t in grid() {
                    let lhs = a <= inf_add(&b, &t);
                    let rhs = idif(&a, &b) <= t;
                    assert_eq!(lhs, rhs, "adjunction fails at ({a}, {b}, {t})");
                }
            }
        }
    }

    #[test]
    fn negation_duality() {
        for a in grid() {
            for b in grid() {
                assert_eq!(
                    inf_add(&a, &b).negate(),
                    sup_add(&a.negate(), &b.negate())
                );
                assert_eq!(idif(&a, &b), sup_add(&a, &b.negate()));
                assert_eq!(sdif(&a, &b), inf_add(&a, &b.negate()));
            }
        }
    }

    #[test]
    fn additions_distribute_over_lattice_ops() {
        let g = grid();
        // inf_add distributes over inf_of, sup_add over sup_of (finite lists).
        for a in &g {
            for b in &g {
                for c in &g {
                    let list = [b.clone(), c.clone()];
                    assert_eq!(
                        inf_add(a, &inf_of(list.iter())),
                        inf_of([inf_add(a, b), inf_add(a, c)].iter())
                    );
                    assert_eq!(
                        sup_add(a, &sup_of(list.iter())),
                        sup_of([sup_add(a, b), sup_add(a, c)].iter())
                    );
                }
            }
        }
    }

    #[test]
    fn json_encoding_round_trip() {
        for v in [
            XReal::PosInf,
            XReal::NegInf,
            XReal::Finite(rat(3, 2)),
            XReal::from_int(-4),
        ] {
            let s = serde_json::to_string(&v).unwrap();
            let back: XReal = serde_json::from_str(&s).unwrap();
            assert_eq!(v, back);
        }
        assert_eq!(
            serde_json::to_string(&XReal::Finite(rat(3, 2))).unwrap(),
            "\"3/2\""
        );
        assert!(serde_json::from_str::<XReal>("\"1/0\"").is_err());
    }
}
