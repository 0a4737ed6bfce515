use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact arbitrary-precision rational. Always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats as `p` when integral, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `-p`, or `p/q` (`q` nonzero).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// A cost: an exact rational or `+inf`.
///
/// `Infinity` is the maximum of the total order and absorbs addition.
/// There is deliberately no multiplication; weighted sums are taken over
/// finite parts only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtRat {
    Finite(Rational),
    Infinity,
}

impl ExtRat {
    pub fn zero() -> Self {
        ExtRat::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRat::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRat::Infinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRat::Finite(r) => Some(r),
            ExtRat::Infinity => None,
        }
    }

    pub fn into_finite(self) -> Option<Rational> {
        match self {
            ExtRat::Finite(r) => Some(r),
            ExtRat::Infinity => None,
        }
    }
}

impl From<Rational> for ExtRat {
    fn from(r: Rational) -> Self {
        ExtRat::Finite(r)
    }
}

impl From<i64> for ExtRat {
    fn from(n: i64) -> Self {
        ExtRat::Finite(int(n))
    }
}

impl Add for ExtRat {
    type Output = ExtRat;

    fn add(self, rhs: ExtRat) -> ExtRat {
        match (self, rhs) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => ExtRat::Finite(a + b),
            _ => ExtRat::Infinity,
        }
    }
}

impl<'a> Add<&'a ExtRat> for ExtRat {
    type Output = ExtRat;

    fn add(self, rhs: &'a ExtRat) -> ExtRat {
        match (self, rhs) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => ExtRat::Finite(a + b),
            _ => ExtRat::Infinity,
        }
    }
}

impl Sum for ExtRat {
    fn sum<I: Iterator<Item = ExtRat>>(iter: I) -> ExtRat {
        let mut acc = Rational::zero();
        for v in iter {
            match v {
                ExtRat::Finite(r) => acc += r,
                ExtRat::Infinity => return ExtRat::Infinity,
            }
        }
        ExtRat::Finite(acc)
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Finite(r) => f.write_str(&format_rational(r)),
            ExtRat::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseExtRatError(pub String);

impl fmt::Display for ParseExtRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}` is not an integer, p/q, or inf", self.0)
    }
}

impl std::error::Error for ParseExtRatError {}

impl FromStr for ExtRat {
    type Err = ParseExtRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "+inf" {
            return Ok(ExtRat::Infinity);
        }
        parse_rational(t)
            .map(ExtRat::Finite)
            .ok_or_else(|| ParseExtRatError(s.to_string()))
    }
}

/// Sum of finite values; convenient in LP-side code.
pub fn sum_rationals<'a, I: IntoIterator<Item = &'a Rational>>(iter: I) -> Rational {
    iter.into_iter().fold(Rational::zero(), |acc, r| acc + r)
}

pub fn is_nonneg(r: &Rational) -> bool {
    !r.is_negative()
}

pub fn one() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn infinity_absorbs_and_is_maximal() {
        let a = ExtRat::from(rat(-7, 3));
        assert_eq!(a.clone() + ExtRat::Infinity, ExtRat::Infinity);
        assert_eq!(ExtRat::Infinity + a.clone(), ExtRat::Infinity);
        assert!(a < ExtRat::Infinity);
        assert_eq!(
            vec![a.clone(), ExtRat::Infinity, a]
                .into_iter()
                .sum::<ExtRat>(),
            ExtRat::Infinity
        );
        assert_eq!(
            Vec::<ExtRat>::new().into_iter().sum::<ExtRat>(),
            ExtRat::zero()
        );
    }

    #[test]
    fn parse_and_print() {
        assert_eq!("inf".parse::<ExtRat>().unwrap(), ExtRat::Infinity);
        assert_eq!("6/4".parse::<ExtRat>().unwrap(), ExtRat::from(rat(3, 2)));
        assert_eq!("-2".parse::<ExtRat>().unwrap().to_string(), "-2");
        assert_eq!(ExtRat::from(rat(2, -4)).to_string(), "-1/2");
        assert!("1/0".parse::<ExtRat>().is_err());
        assert!("x".parse::<ExtRat>().is_err());
    }

    fn arb_rat() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..50).prop_map(|(p, q)| rat(p, q))
    }

    fn arb_ext() -> impl Strategy<Value = ExtRat> {
        prop_oneof![
            9 => arb_rat().prop_map(ExtRat::Finite),
            1 => Just(ExtRat::Infinity),
        ]
    }

    proptest! {
        #[test]
        fn addition_is_associative(a in arb_ext(), b in arb_ext(), c in arb_ext()) {
            prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a + (b + c));
        }

        #[test]
        fn canonical_form(p in -1000i64..1000, q in 1i64..1000) {
            let r = rat(p, q);
            prop_assert!(num_traits::Signed::is_positive(r.denom()));
            prop_assert!(num_integer::Integer::gcd(r.numer(), r.denom()).is_one());
        }

        #[test]
        fn text_roundtrip(a in arb_ext()) {
            prop_assert_eq!(a.to_string().parse::<ExtRat>().unwrap(), a);
        }

        #[test]
        fn total_order_infinity_max(a in arb_ext()) {
            prop_assert!(a <= ExtRat::Infinity);
        }
    }
}
