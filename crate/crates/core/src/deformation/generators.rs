//! Denominator generators of the deformation modules, evaluated as dense jets
//! `t^0 .. t^n` along each branch.

use std::collections::HashMap;

use crate::jet::{Order, TruncSeries};

use super::scalar::Q;

use super::ModulePreset;

/// Coefficients of `t^0 .. t^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Jet(pub(crate) Vec<Q>);

impl Jet {
    pub(crate) fn zero(n: u32) -> Jet {
        Jet(vec![Q::zero(); n as usize + 1])
    }

    pub(crate) fn from_series(s: &TruncSeries, n: u32) -> Jet {
        let mut j = Jet::zero(n);
        for (k, c) in s.terms() {
            if k <= n {
                j.0[k as usize] =
                    Q::from_rational(&c.as_constant().expect("parameter-free series"));
            }
        }
        j
    }

    fn one(n: u32) -> Jet {
        let mut j = Jet::zero(n);
        j.0[0] = Q::one();
        j
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.iter().all(Q::is_zero)
    }

    fn support(&self) -> Vec<(usize, &Q)> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    fn mul(&self, other: &Jet) -> Jet {
        let n = self.0.len();
        let mut out = vec![Q::zero(); n];
        let (lhs, rhs) = (self.support(), other.support());
        for &(i, a) in &lhs {
            for &(j, b) in &rhs {
                if i + j >= n {
                    break;
                }
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Jet(out)
    }

    fn scale(&self, c: &Q) -> Jet {
        Jet(self.0.iter().map(|v| v * c).collect())
    }

    fn add(&self, other: &Jet) -> Jet {
        Jet(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Multiplies by `t^k`.
    fn shift(&self, k: u32) -> Jet {
        let n = self.0.len();
        let mut out = vec![Q::zero(); n];
        for (i, v) in self.0.iter().enumerate() {
            if i + (k as usize) < n {
                out[i + k as usize] = v.clone();
            }
        }
        Jet(out)
    }
}

/// A generator: per branch, the two slot jets.
#[derive(Clone, Debug)]
pub(crate) struct DenseVector {
    pub(crate) slots: Vec<[Jet; 2]>,
}

/// Parameter-free coordinate series of one branch, in the coordinates the
/// active preset needs.
#[derive(Clone, Debug)]
pub(crate) struct BranchData {
    pub(crate) x: TruncSeries,
    pub(crate) y: TruncSeries,
    pub(crate) p: Option<TruncSeries>,
}

fn ord(s: &TruncSeries) -> Option<u32> {
    match s.order() {
        Order::Finite(k) => Some(k),
        Order::Infinite => None,
    }
}

/// Lazily evaluated monomials `x^a y^b p^k` along every branch, truncated at
/// `t^n`. Orders are tracked so that monomials vanishing mod `t^(n+1)` are
/// never multiplied out.
struct Monomials<'a> {
    n: u32,
    branches: &'a [BranchData],
    orders: Vec<[Option<u32>; 3]>,
    powers: Vec<[Vec<Jet>; 3]>,
    bases: Vec<[Option<Jet>; 3]>,
    cache: HashMap<[u32; 3], Vec<Jet>>,
}

impl<'a> Monomials<'a> {
    fn new(branches: &'a [BranchData], n: u32) -> Self {
        let orders = branches
            .iter()
            .map(|b| [ord(&b.x), ord(&b.y), b.p.as_ref().and_then(ord)])
            .collect();
        let powers = branches
            .iter()
            .map(|_| [vec![Jet::one(n)], vec![Jet::one(n)], vec![Jet::one(n)]])
            .collect();
        Monomials {
            n,
            branches,
            orders,
            powers,
            bases: vec![[None, None, None]; branches.len()],
            cache: HashMap::new(),
        }
    }

    /// `t`-order of the monomial on branch `i`, `None` if it vanishes there.
    fn order_on(&self, i: usize, e: [u32; 3]) -> Option<u32> {
        let mut total = 0;
        for (v, &k) in e.iter().enumerate() {
            if k > 0 {
                total += self.orders[i][v]? * k;
            }
        }
        Some(total)
    }

    fn base(&mut self, i: usize, v: usize) -> &Jet {
        let (b, n) = (&self.branches[i], self.n);
        self.bases[i][v].get_or_insert_with(|| match v {
            0 => Jet::from_series(&b.x, n),
            1 => Jet::from_series(&b.y, n),
            _ => Jet::from_series(b.p.as_ref().expect("p requested"), n),
        })
    }

    fn power(&mut self, i: usize, v: usize, k: u32) -> &Jet {
        while self.powers[i][v].len() <= k as usize {
            let base = self.base(i, v).clone();
            let next = self.powers[i][v].last().unwrap().mul(&base);
            self.powers[i][v].push(next);
        }
        &self.powers[i][v][k as usize]
    }

    /// The monomial on branch `i`, from a cached neighbour when possible.
    fn evaluate(&mut self, i: usize, e: [u32; 3]) -> Jet {
        for v in (0..3).rev() {
            if e[v] == 0 {
                continue;
            }
            let mut prev = e;
            prev[v] -= 1;
            if let Some(jets) = self.cache.get(&prev) {
                let lower = jets[i].clone();
                return lower.mul(self.power(i, v, 1));
            }
        }
        let mut j = self.power(i, 0, e[0]).clone();
        for (v, &k) in e.iter().enumerate().skip(1) {
            if k > 0 {
                j = j.mul(self.power(i, v, k));
            }
        }
        j
    }

    /// `c * x^a y^b p^k` along every branch; exponents may be negative, in
    /// which case the term is zero (the derivative of a constant).
    fn get(&mut self, e: [i64; 3], c: &Q) -> Vec<Jet> {
        let r = self.branches.len();
        if e.iter().any(|v| *v < 0) || c.is_zero() {
            return vec![Jet::zero(self.n); r];
        }
        let e = [e[0] as u32, e[1] as u32, e[2] as u32];
        if !self.cache.contains_key(&e) {
            let jets = (0..r)
                .map(|i| match self.order_on(i, e) {
                    Some(o) if o <= self.n => self.evaluate(i, e),
                    _ => Jet::zero(self.n),
                })
                .collect();
            self.cache.insert(e, jets);
        }
        let jets = &self.cache[&e];
        if c.is_one() {
            jets.clone()
        } else {
            jets.iter().map(|j| j.scale(c)).collect()
        }
    }
}

fn rat(n: i64, d: i64) -> Q {
    Q::ratio(n, d)
}

fn combine(a: Vec<Jet>, b: Vec<Jet>) -> Vec<Jet> {
    a.iter().zip(&b).map(|(u, v)| u.add(v)).collect()
}

fn push(out: &mut Vec<DenseVector>, s1: Vec<Jet>, s2: Vec<Jet>) {
    let v = DenseVector {
        slots: s1.into_iter().zip(s2).map(|(a, b)| [a, b]).collect(),
    };
    if v.slots.iter().any(|s| !s[0].is_zero() || !s[1].is_zero()) {
        out.push(v);
    }
}

/// The denominator generators at working order `n`, grouped by the power of
/// `p` they carry. Level 0 holds the velocity multiples and every generator
/// without `p`; level `k` holds the hat or fake generators built on `p^k`.
pub(crate) struct Generators<'a> {
    preset: ModulePreset,
    branches: &'a [BranchData],
    n: u32,
    mons: Monomials<'a>,
}

impl<'a> Generators<'a> {
    pub(crate) fn new(preset: ModulePreset, branches: &'a [BranchData], n: u32) -> Self {
        Generators {
            preset,
            branches,
            n,
            mons: Monomials::new(branches, n),
        }
    }

    /// Highest level that can hold a generator.
    pub(crate) fn top_level(&self) -> u32 {
        match self.preset {
            ModulePreset::Hat | ModulePreset::Fake => self.n + 1,
            _ => 0,
        }
    }

    /// Every generator, all levels.
    pub(crate) fn all(&mut self) -> Vec<DenseVector> {
        (0..=self.top_level())
            .flat_map(|k| self.level(k, None))
            .collect()
    }

    /// Lowest `t`-order any of the monomials reaches on any branch.
    fn low_order(&self, es: &[[i64; 3]]) -> Option<u32> {
        es.iter()
            .filter(|e| e.iter().all(|v| *v >= 0))
            .flat_map(|e| {
                let e = [e[0] as u32, e[1] as u32, e[2] as u32];
                (0..self.branches.len()).filter_map(move |i| self.mons.order_on(i, e))
            })
            .filter(|o| *o <= self.n)
            .min()
    }

    /// The generators of level `k`. With `above = Some(s)`, generators whose
    /// terms all have degree above `s` are left out.
    pub(crate) fn level(&mut self, k: u32, above: Option<u32>) -> Vec<DenseVector> {
        let n = self.n;
        let r = self.branches.len();
        let preset = self.preset;
        let mut out = Vec::new();
        let wanted = |lo: Option<u32>| match (lo, above) {
            (None, _) => false,
            (Some(lo), Some(s)) => lo <= s,
            (Some(_), None) => true,
        };
        let zero = || vec![Jet::zero(n); r];
        let one = rat(1, 1);
        let bound = n + 1;
        let ki = k as i64;

        if k == 0 {
            // t^j times the velocity, branch by branch
            for (i, b) in self.branches.iter().enumerate() {
                let second = match preset {
                    ModulePreset::Fake => b.p.as_ref().expect("fake module needs p"),
                    _ => &b.y,
                };
                let v1 = Jet::from_series(&b.x.derivative(), n);
                let v2 = Jet::from_series(&second.derivative(), n);
                for j in 1..=n {
                    let mut s1 = zero();
                    let mut s2 = zero();
                    s1[i] = v1.shift(j);
                    s2[i] = v2.shift(j);
                    push(&mut out, s1, s2);
                }
            }
        }

        match preset {
            ModulePreset::Plain
            | ModulePreset::Equimultiple
            | ModulePreset::Arrow
            | ModulePreset::Hat => {
                if k == 0 {
                    let second_in_ideal = |a: u32, b: u32| match preset {
                        ModulePreset::Arrow | ModulePreset::Hat => b >= 1 || a >= 2,
                        _ => a + b >= 1,
                    };
                    for [a, b] in pairs(bound) {
                        let e = [a as i64, b as i64, 0];
                        if !wanted(self.low_order(&[e])) {
                            continue;
                        }
                        let m = self.mons.get(e, &one);
                        if a + b >= 1 {
                            push(&mut out, m.clone(), zero());
                        }
                        if second_in_ideal(a, b) {
                            push(&mut out, zero(), m);
                        }
                    }
                } else if preset == ModulePreset::Hat {
                    // O_Z-multiples h (p^k, k/(k+1) p^(k+1))
                    for [c, d] in pairs(bound.saturating_sub(k)) {
                        let (c, d) = (c as i64, d as i64);
                        if !wanted(self.low_order(&[[c, d, ki]])) {
                            continue;
                        }
                        let s1 = self.mons.get([c, d, ki], &one);
                        let s2 = self.mons.get([c, d, ki + 1], &rat(ki, ki + 1));
                        push(&mut out, s1, s2);
                    }
                }
            }
            ModulePreset::Fake => {
                for [a, b] in pairs(bound.saturating_sub(k)) {
                    let (ai, bi) = (a as i64, b as i64);
                    let (fa, fb) = (Q::int(ai), Q::int(bi));
                    let alpha_terms = [[ai, bi, ki], [ai - 1, bi, ki + 1], [ai, bi - 1, ki + 2]];
                    if a + b + k >= 1 && wanted(self.low_order(&alpha_terms)) {
                        // alpha = x^a y^b p^k in the maximal ideal of C{x, y, p}
                        let s1 = self.mons.get([ai, bi, ki], &one);
                        let w = rat(-1, ki + 1);
                        let s2 = combine(
                            self.mons.get([ai - 1, bi, ki + 1], &(&w * &fa)),
                            self.mons.get([ai, bi - 1, ki + 2], &(&w * &fb)),
                        );
                        push(&mut out, s1, s2);
                    }
                    let beta_terms = [[ai - 1, bi, 0], [ai, bi - 1, 1]];
                    if k == 0 && (b >= 1 || a >= 2) && wanted(self.low_order(&beta_terms)) {
                        // beta0 = x^a y^b in (x^2, y)
                        let s2 = combine(
                            self.mons.get([ai - 1, bi, 0], &fa),
                            self.mons.get([ai, bi - 1, 1], &fb),
                        );
                        push(&mut out, zero(), s2);
                    }
                }
            }
        }
        out
    }
}

/// Exponent pairs `(a, b)` with `a + b <= bound`. Every coordinate has order
/// at least 1, so larger monomials vanish mod `t^(n+1)` when `bound >= n`.
fn pairs(bound: u32) -> impl Iterator<Item = [u32; 2]> {
    (0..=bound).flat_map(move |a| (0..=bound - a).map(move |b| [a, b]))
}
