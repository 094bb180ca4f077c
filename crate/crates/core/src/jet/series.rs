//! Truncated power series in one local parameter `t`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{MPoly, Rational};
use super::SeriesError;

/// Coefficient of a series term: a polynomial in the deformation parameters.
/// With zero parameters this is just a rational number.
pub type ParamScalar = MPoly;

/// Vanishing order of a series.
///
/// `Infinite` means the series is zero up to its truncation order. It
/// compares greater than every finite order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(k) => Some(k),
            Order::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Order::Infinite
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// A power series `sum c_k t^k` known exactly for `k <= trunc_order`.
///
/// Coefficients live in the polynomial ring of `arity` parameters. Terms above
/// the truncation order are unknown and never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    arity: usize,
    trunc: u32,
    coeffs: BTreeMap<u32, ParamScalar>,
}

impl TruncSeries {
    pub fn zero(arity: usize, trunc: u32) -> Self {
        TruncSeries {
            arity,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    /// `c * t^k`, dropped if `k > trunc`.
    pub fn monomial(k: u32, c: ParamScalar, trunc: u32) -> Self {
        let mut s = TruncSeries::zero(c.nvars(), trunc);
        s.add_term(k, c);
        s
    }

    /// Parameter-free `c * t^k`.
    pub fn rational_monomial(k: u32, c: Rational, trunc: u32) -> Self {
        Self::monomial(k, MPoly::constant(0, c), trunc)
    }

    /// Just `t^k`.
    pub fn t_pow(k: u32, trunc: u32) -> Self {
        Self::rational_monomial(k, Rational::one(), trunc)
    }

    pub fn constant(c: ParamScalar, trunc: u32) -> Self {
        Self::monomial(0, c, trunc)
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated exponents
    /// are summed and terms above `trunc` dropped.
    pub fn from_terms<I>(arity: usize, trunc: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, ParamScalar)>,
    {
        let mut s = TruncSeries::zero(arity, trunc);
        for (k, c) in terms {
            assert_eq!(c.nvars(), arity, "coefficient arity mismatch");
            s.add_term(k, c);
        }
        s
    }

    /// Parameter-free series from `(exponent, rational)` pairs.
    pub fn from_rationals<I>(trunc: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, Rational)>,
    {
        Self::from_terms(
            0,
            trunc,
            terms.into_iter().map(|(k, c)| (k, MPoly::constant(0, c))),
        )
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn trunc_order(&self) -> u32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u32, &ParamScalar)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: u32) -> ParamScalar {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| MPoly::zero(self.arity))
    }

    /// Coefficient of `t^k` as a rational; panics if the series has parameters
    /// and that coefficient is not constant.
    pub fn rational_coeff(&self, k: u32) -> Rational {
        self.coeff(k)
            .as_constant()
            .expect("coefficient depends on parameters")
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    fn add_term(&mut self, k: u32, c: ParamScalar) {
        if k > self.trunc || c.is_zero() {
            return;
        }
        match self.coeffs.entry(k) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Lowers the truncation order to `min(current, n)`.
    pub fn truncate(&self, n: u32) -> TruncSeries {
        let trunc = self.trunc.min(n);
        TruncSeries {
            arity: self.arity,
            trunc,
            coeffs: self
                .coeffs
                .range(..=trunc)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Smallest exponent carrying a nonzero coefficient.
    pub fn order(&self) -> Order {
        self.coeffs
            .keys()
            .next()
            .map_or(Order::Infinite, |&k| Order::Finite(k))
    }

    /// Coefficient-wise sum, difference or product. The result is truncated at
    /// the smaller of the two truncation orders.
    pub fn arith(&self, other: &TruncSeries, op: ArithOp) -> Result<TruncSeries, SeriesError> {
        if self.arity != other.arity {
            return Err(SeriesError::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        let trunc = self.trunc.min(other.trunc);
        let mut out = TruncSeries::zero(self.arity, trunc);
        match op {
            ArithOp::Add | ArithOp::Sub => {
                for (k, c) in self.coeffs.range(..=trunc) {
                    out.add_term(*k, c.clone());
                }
                for (k, c) in other.coeffs.range(..=trunc) {
                    let c = if op == ArithOp::Sub { -c } else { c.clone() };
                    out.add_term(*k, c);
                }
            }
            ArithOp::Mul => {
                for (i, a) in self.coeffs.range(..=trunc) {
                    for (j, b) in other.coeffs.range(..=trunc - i) {
                        out.add_term(i + j, a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by a parameter polynomial.
    pub fn scale(&self, c: &ParamScalar) -> TruncSeries {
        assert_eq!(c.nvars(), self.arity, "scalar arity mismatch");
        let mut out = TruncSeries::zero(self.arity, self.trunc);
        for (k, v) in &self.coeffs {
            out.add_term(*k, v * c);
        }
        out
    }

    pub fn scale_rational(&self, c: &Rational) -> TruncSeries {
        let mut out = TruncSeries::zero(self.arity, self.trunc);
        for (k, v) in &self.coeffs {
            out.add_term(*k, v.scale(c));
        }
        out
    }

    /// Multiplies by `t^k`. The product is exact, so the truncation order
    /// moves up by `k` as well.
    pub fn shift(&self, k: u32) -> TruncSeries {
        TruncSeries {
            arity: self.arity,
            trunc: self.trunc.saturating_add(k),
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e + k, c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> TruncSeries {
        let mut acc = TruncSeries::constant(MPoly::one(self.arity), self.trunc);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Term-wise `d/dt`; the truncation order drops by one.
    pub fn derivative(&self) -> TruncSeries {
        let mut out = TruncSeries::zero(self.arity, self.trunc.saturating_sub(1));
        for (k, c) in &self.coeffs {
            if *k > 0 {
                out.add_term(k - 1, c.scale(&Rational::from_integer(BigInt::from(*k))));
            }
        }
        out
    }

    /// The antiderivative vanishing at `t = 0`; the truncation order rises by one.
    pub fn integrate(&self) -> TruncSeries {
        let mut out = TruncSeries::zero(self.arity, self.trunc + 1);
        for (k, c) in &self.coeffs {
            out.add_term(
                k + 1,
                c.scale(&Rational::new(BigInt::one(), BigInt::from(k + 1))),
            );
        }
        out
    }

    /// Exact quotient `self / den`.
    ///
    /// The division runs over the fraction field of the parameter ring and
    /// fails unless every quotient coefficient is a polynomial and no negative
    /// power of `t` is needed. The quotient is known up to
    /// `min(N_num, N_den) - ord(den)`.
    pub fn divide_exact(&self, den: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        if self.arity != den.arity {
            return Err(SeriesError::ArityMismatch {
                left: self.arity,
                right: den.arity,
            });
        }
        let n = self.trunc.min(den.trunc);
        let den = den.truncate(n);
        let j0 = den.order().finite().ok_or(SeriesError::ZeroDivisor)?;
        let lead = den.coeffs[&j0].clone();
        let mut rem = self.truncate(n);
        if let Some((&k, _)) = rem.coeffs.range(..j0).next() {
            return Err(SeriesError::NotDivisible { exponent: k });
        }
        let qtrunc = n - j0;
        let mut q = TruncSeries::zero(self.arity, qtrunc);
        for k in 0..=qtrunc {
            let Some(c) = rem.coeffs.get(&(k + j0)).cloned() else {
                continue;
            };
            let qk = c
                .exact_div(&lead)
                .ok_or(SeriesError::NotDivisible { exponent: k + j0 })?;
            for (j, d) in den.coeffs.iter() {
                let e = j + k;
                if e > n {
                    break;
                }
                rem.add_term(e, -&(&qk * d));
            }
            q.add_term(k, qk);
        }
        Ok(q)
    }

    /// Substitutes numeric values for all parameters.
    pub fn eval_params(&self, values: &[Rational]) -> TruncSeries {
        assert_eq!(values.len(), self.arity);
        TruncSeries::from_terms(
            0,
            self.trunc,
            self.coeffs
                .iter()
                .map(|(k, c)| (*k, MPoly::constant(0, c.eval(values)))),
        )
    }

    /// The special fiber: every parameter set to zero.
    pub fn special_fiber(&self) -> TruncSeries {
        self.eval_params(&vec![Rational::zero(); self.arity])
    }

    /// Re-reads a parameter-free series as a series over `arity` parameters
    /// (constant in all of them).
    pub fn with_arity(&self, arity: usize) -> TruncSeries {
        assert_eq!(self.arity, 0, "only parameter-free series can be lifted");
        TruncSeries::from_terms(
            arity,
            self.trunc,
            self.coeffs
                .iter()
                .map(|(k, c)| (*k, MPoly::constant(arity, c.constant_term()))),
        )
    }

    /// Renders the series with the given parameter names, e.g.
    /// `t^3 + (s1 + 1/2)*t^5 + O(t^21)`.
    pub fn display_with<'a>(
        &'a self,
        var: &'a str,
        params: &'a [String],
    ) -> impl fmt::Display + 'a {
        SeriesDisplay {
            series: self,
            var,
            params,
        }
    }
}

struct SeriesDisplay<'a> {
    series: &'a TruncSeries,
    var: &'a str,
    params: &'a [String],
}

impl fmt::Display for SeriesDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = self.var;
        for (i, (k, c)) in self.series.terms().enumerate() {
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            // a lone negative term is written with a leading minus
            let negative = c.len() == 1 && c.terms().all(|(_, q)| q < &Rational::zero());
            let c = if negative { -c } else { c.clone() };
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let constant = c.len() == 1 && c.terms().all(|(e, _)| e.iter().all(|&v| v == 0));
            let shown = c.display_with(self.params);
            match (constant, c.len() == 1, mono.is_empty()) {
                (true, _, true) | (false, true, true) => write!(f, "{shown}")?,
                (false, false, true) => write!(f, "({shown})")?,
                (true, _, false) if c.constant_term().is_one() => write!(f, "{mono}")?,
                (_, true, false) => write!(f, "{shown}*{mono}")?,
                (_, false, false) => write!(f, "({shown})*{mono}")?,
            }
        }
        if self.series.is_zero() {
            write!(f, "0")?;
        }
        write!(f, " + O({var}^{})", self.series.trunc + 1)
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.arity).map(|i| format!("s{i}")).collect();
        let shown = self.display_with("t", &names).to_string();
        f.write_str(&shown)
    }
}

macro_rules! series_op {
    ($tr:ident, $m:ident, $op:expr) => {
        /// Panics on parameter-arity mismatch; use [`TruncSeries::arith`] for
        /// the checked form.
        impl $tr for &TruncSeries {
            type Output = TruncSeries;
            fn $m(self, rhs: &TruncSeries) -> TruncSeries {
                self.arith(rhs, $op).expect("series arity mismatch")
            }
        }
        impl $tr for TruncSeries {
            type Output = TruncSeries;
            fn $m(self, rhs: TruncSeries) -> TruncSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
series_op!(Add, add, ArithOp::Add);
series_op!(Sub, sub, ArithOp::Sub);
series_op!(Mul, mul, ArithOp::Mul);

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries {
            arity: self.arity,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

/// Substitutes the coordinate series of a branch into a polynomial in the
/// ambient coordinates (`(x, y)` or `(x, y, p)`).
///
/// The result is truncated at the smallest truncation order of the branch.
pub fn poly_eval_along(f: &MPoly, branch: &[TruncSeries]) -> Result<TruncSeries, SeriesError> {
    if f.nvars() != branch.len() {
        return Err(SeriesError::CoordinateMismatch {
            expected: f.nvars(),
            found: branch.len(),
        });
    }
    let arity = branch.first().map_or(0, TruncSeries::arity);
    if let Some(b) = branch.iter().find(|b| b.arity() != arity) {
        return Err(SeriesError::ArityMismatch {
            left: arity,
            right: b.arity(),
        });
    }
    let trunc = branch
        .iter()
        .map(TruncSeries::trunc_order)
        .min()
        .unwrap_or(u32::MAX);
    let mut powers: Vec<Vec<TruncSeries>> = branch
        .iter()
        .map(|_| vec![TruncSeries::constant(MPoly::one(arity), trunc)])
        .collect();
    let mut out = TruncSeries::zero(arity, trunc);
    for (e, c) in f.terms() {
        let mut term = TruncSeries::constant(MPoly::constant(arity, c.clone()), trunc);
        for (i, &k) in e.iter().enumerate() {
            while powers[i].len() <= k as usize {
                let next = powers[i].last().unwrap() * &branch[i];
                powers[i].push(next);
            }
            term = &term * &powers[i][k as usize];
        }
        out = &out + &term;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::poly::{int, rat};

    fn s(trunc: u32, terms: &[(u32, Rational)]) -> TruncSeries {
        TruncSeries::from_rationals(trunc, terms.iter().cloned())
    }

    #[test]
    fn product_with_parameter() {
        // (s + 3t^2) * (10/3) t^7 = (10/3) s t^7 + 10 t^9
        let a = TruncSeries::from_terms(
            1,
            20,
            [(0, MPoly::var(1, 0)), (2, MPoly::constant(1, int(3)))],
        );
        let b = TruncSeries::monomial(7, MPoly::constant(1, rat(10, 3)), 20);
        let expected = TruncSeries::from_terms(
            1,
            20,
            [
                (7, MPoly::var(1, 0).scale(&rat(10, 3))),
                (9, MPoly::constant(1, int(10))),
            ],
        );
        assert_eq!(&a * &b, expected);
    }

    #[test]
    fn min_rule_and_identity() {
        let a = s(10, &[(2, int(1))]);
        let b = s(6, &[(3, int(1))]);
        let p = &a * &b;
        assert_eq!(p, s(6, &[(5, int(1))]));
        let zero = TruncSeries::zero(0, 10);
        assert_eq!(&a + &zero, a);
        // t^4 * t^4 would be t^8 > 6: silently unknown, not fabricated
        let c = s(6, &[(4, int(1))]);
        assert!((&c * &c).is_zero());
        assert_eq!((&c * &c).trunc_order(), 6);
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let a = TruncSeries::zero(0, 3);
        let b = TruncSeries::zero(2, 3);
        assert!(matches!(
            a.arith(&b, ArithOp::Add),
            Err(SeriesError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn derivative_examples() {
        let f = s(10, &[(3, int(1)), (2, rat(9, 8))]);
        assert_eq!(f.derivative(), s(9, &[(2, int(3)), (1, rat(9, 4))]));
        assert!(s(10, &[(0, int(7))]).derivative().is_zero());
        assert_eq!(s(12, &[(10, int(1))]).derivative(), s(11, &[(9, int(10))]));
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(s(12, &[(9, int(10))]).integrate(), s(13, &[(10, int(1))]));
        let s1s3 = MPoly::monomial(vec![1, 0, 1], int(1));
        let f = TruncSeries::monomial(1, s1s3.clone(), 10);
        assert_eq!(
            f.integrate(),
            TruncSeries::monomial(2, s1s3.scale(&rat(1, 2)), 11)
        );
        assert!(TruncSeries::zero(0, 4).integrate().is_zero());
    }

    #[test]
    fn order_examples() {
        assert_eq!(s(9, &[(3, int(1)), (5, int(1))]).order(), Order::Finite(3));
        assert_eq!(TruncSeries::zero(0, 9).order(), Order::Infinite);
        assert_eq!(s(9, &[(1, rat(3, 2))]).order(), Order::Finite(1));
        assert!(Order::Finite(1000) < Order::Infinite);
    }

    #[test]
    fn division_examples() {
        let sv = MPoly::var(1, 0);
        let num = TruncSeries::from_terms(
            1,
            20,
            [(7, sv.scale(&rat(10, 3))), (9, MPoly::constant(1, int(10)))],
        );
        let den =
            TruncSeries::from_terms(1, 20, [(0, sv.clone()), (2, MPoly::constant(1, int(3)))]);
        let q = num.divide_exact(&den).unwrap();
        assert_eq!(
            q,
            TruncSeries::monomial(7, MPoly::constant(1, rat(10, 3)), 20)
        );

        assert_eq!(
            s(20, &[(5, int(1))])
                .divide_exact(&s(20, &[(2, int(1))]))
                .unwrap(),
            s(18, &[(3, int(1))])
        );
        assert_eq!(
            s(20, &[(1, int(1))]).divide_exact(&s(20, &[(2, int(1))])),
            Err(SeriesError::NotDivisible { exponent: 1 })
        );
        assert_eq!(
            s(20, &[(1, int(1))]).divide_exact(&TruncSeries::zero(0, 20)),
            Err(SeriesError::ZeroDivisor)
        );
        // t^2 / (s + t) is not polynomial in s
        let den = TruncSeries::from_terms(1, 10, [(0, sv.clone()), (1, MPoly::one(1))]);
        let num = TruncSeries::monomial(2, MPoly::one(1), 10);
        assert!(matches!(
            num.divide_exact(&den),
            Err(SeriesError::NotDivisible { .. })
        ));
    }

    #[test]
    fn division_by_unit_yields_series() {
        // 1 / (1 - t) = 1 + t + t^2 + ...
        let den = s(6, &[(0, int(1)), (1, int(-1))]);
        let q = s(6, &[(0, int(1))]).divide_exact(&den).unwrap();
        assert_eq!(q, s(6, &(0..=6).map(|k| (k, int(1))).collect::<Vec<_>>()));
    }

    #[test]
    fn eval_along_branch() {
        let branch = [
            s(20, &[(2, int(1))]),
            s(20, &[(3, int(1))]),
            s(20, &[(1, rat(3, 2))]),
        ];
        let p = MPoly::var(3, 2);
        let f = p.pow(2).scale(&rat(1, 2));
        assert_eq!(
            poly_eval_along(&f, &branch).unwrap(),
            s(20, &[(2, rat(9, 8))])
        );
        let g = &MPoly::var(3, 0) + &p;
        assert_eq!(
            poly_eval_along(&g, &branch).unwrap(),
            s(20, &[(2, int(1)), (1, rat(3, 2))])
        );
        assert_eq!(
            poly_eval_along(&MPoly::one(3), &branch).unwrap(),
            s(20, &[(0, int(1))])
        );
        assert!(poly_eval_along(&MPoly::one(2), &branch).is_err());
    }

    #[test]
    fn display_format() {
        let f = TruncSeries::from_terms(
            1,
            8,
            [
                (2, MPoly::constant(1, rat(1, 2))),
                (3, &MPoly::var(1, 0) + &MPoly::one(1)),
            ],
        );
        let names = vec!["s1".to_string()];
        assert_eq!(
            f.display_with("t", &names).to_string(),
            "1/2*t^2 + (1 + s1)*t^3 + O(t^9)"
        );
        let g = TruncSeries::from_terms(
            1,
            8,
            [
                (1, MPoly::constant(1, rat(-3, 2))),
                (2, MPoly::var(1, 0)),
                (4, MPoly::var(1, 0).scale(&rat(-1, 3))),
            ],
        );
        assert_eq!(
            g.display_with("t", &names).to_string(),
            "-3/2*t + s1*t^2 - 1/3*s1*t^4 + O(t^9)"
        );
    }
}
