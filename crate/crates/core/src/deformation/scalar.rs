//! Exact rationals for the elimination hot path: machine-word fractions that
//! fall back to big rationals on overflow.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::jet::Rational;

/// A rational number. `Small(n, d)` is kept in lowest terms with `d > 0`, and
/// every value that fits is stored small, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Q {
    Small(i64, i64),
    Big(Rational),
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Q {
    pub(crate) fn zero() -> Q {
        Q::Small(0, 1)
    }

    pub(crate) fn one() -> Q {
        Q::Small(1, 1)
    }

    pub(crate) fn int(n: i64) -> Q {
        Q::Small(n, 1)
    }

    pub(crate) fn ratio(n: i64, d: i64) -> Q {
        Q::from_i128(n as i128, d as i128)
    }

    pub(crate) fn is_zero(&self) -> bool {
        matches!(self, Q::Small(0, _))
    }

    pub(crate) fn is_one(&self) -> bool {
        matches!(self, Q::Small(1, 1))
    }

    fn from_i128(n: i128, d: i128) -> Q {
        let g = gcd(n, d);
        let (mut n, mut d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Q::Small(n, d),
            _ => Q::Big(Rational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    pub(crate) fn from_rational(r: &Rational) -> Q {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Q::Small(n, d),
            _ => Q::Big(r.clone()),
        }
    }

    pub(crate) fn to_rational(&self) -> Rational {
        match self {
            Q::Small(n, d) => Rational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Q::Big(r) => r.clone(),
        }
    }

    fn big(&self) -> Rational {
        self.to_rational()
    }

    pub(crate) fn recip(&self) -> Q {
        match self {
            Q::Small(n, d) => Q::from_i128(*d as i128, *n as i128),
            Q::Big(r) => Q::from_rational(&r.recip()),
        }
    }
}

impl Add for &Q {
    type Output = Q;
    fn add(self, o: &Q) -> Q {
        match (self, o) {
            (Q::Small(0, _), x) | (x, Q::Small(0, _)) => x.clone(),
            (Q::Small(a, b), Q::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Q::from_i128(a + c, b)
                } else {
                    Q::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Q::from_rational(&(self.big() + o.big())),
        }
    }
}

impl Sub for &Q {
    type Output = Q;
    fn sub(self, o: &Q) -> Q {
        self + &-o
    }
}

impl Mul for &Q {
    type Output = Q;
    fn mul(self, o: &Q) -> Q {
        match (self, o) {
            (Q::Small(0, _), _) | (_, Q::Small(0, _)) => Q::zero(),
            (Q::Small(1, 1), x) | (x, Q::Small(1, 1)) => x.clone(),
            (Q::Small(a, b), Q::Small(c, d)) => {
                Q::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Q::from_rational(&(self.big() * o.big())),
        }
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        match self {
            Q::Small(n, d) => match n.checked_neg() {
                Some(m) => Q::Small(m, *d),
                None => Q::from_rational(&-self.big()),
            },
            Q::Big(r) => Q::from_rational(&-r),
        }
    }
}
