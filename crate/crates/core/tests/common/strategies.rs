use legendrian::deformation::ModulePreset;
use legendrian::germ::{AnyGerm, PlaneGerm};
use legendrian::jet::{MPoly, Rational, TruncSeries};
use proptest::prelude::*;

/// `x = t^m + tail`, `y = lead t^oy + tail`.
#[derive(Clone, Debug)]
pub struct BranchSpec {
    pub m: u32,
    pub x_tail: Vec<Rational>,
    pub oy: u32,
    pub y_lead: Rational,
    pub y_tail: Vec<Rational>,
}

impl BranchSpec {
    pub fn series(&self, trunc: u32) -> (TruncSeries, TruncSeries) {
        let one = Rational::from_integer(1.into());
        let x = TruncSeries::from_rationals(
            trunc,
            std::iter::once((self.m, one)).chain(
                self.x_tail
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (self.m + 1 + i as u32, c.clone())),
            ),
        );
        let y = TruncSeries::from_rationals(
            trunc,
            std::iter::once((self.oy, self.y_lead.clone())).chain(
                self.y_tail
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (self.oy + 1 + i as u32, c.clone())),
            ),
        );
        (x, y)
    }
}

#[derive(Clone, Debug)]
pub struct GermSpec {
    pub branches: Vec<BranchSpec>,
    pub trunc: u32,
}

impl GermSpec {
    pub fn plane(&self) -> PlaneGerm {
        PlaneGerm::from_series(self.branches.iter().map(|b| b.series(self.trunc)).collect())
            .expect("valid plane germ")
    }

    pub fn any(&self) -> AnyGerm {
        AnyGerm::Plane(self.plane())
    }

    pub fn generic(&self) -> bool {
        self.branches.iter().all(|b| b.oy >= 2 * b.m)
    }
}

pub fn small_rat() -> impl Strategy<Value = Rational> {
    (-3i64..=3, 1i64..=3).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

pub fn nonzero_rat() -> impl Strategy<Value = Rational> {
    (prop_oneof![-3i64..=-1, 1i64..=3], 1i64..=3)
        .prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn branch(
    m: u32,
    oy: impl Strategy<Value = u32>,
    x_tail: usize,
    y_tail: usize,
) -> impl Strategy<Value = BranchSpec> {
    (
        oy,
        prop::collection::vec(small_rat(), 0..=x_tail),
        nonzero_rat(),
        prop::collection::vec(small_rat(), 0..=y_tail),
    )
        .prop_map(move |(oy, x_tail, y_lead, y_tail)| BranchSpec {
            m,
            x_tail,
            oy,
            y_lead,
            y_tail,
        })
}

/// Germs with tangent cone `{y = 0}`, arbitrary tails.
pub fn plane_germ(max_branches: usize, max_m: u32, trunc: u32) -> impl Strategy<Value = GermSpec> {
    let b = (1..=max_m).prop_flat_map(|m| branch(m, m + 1..=3 * m + 2, 4, 5));
    prop::collection::vec(b, 1..=max_branches)
        .prop_map(move |branches| GermSpec { branches, trunc })
}

/// Small germs for the dense oracle: multiplicities at most 2.
pub fn oracle_germ() -> impl Strategy<Value = GermSpec> {
    let b = (1..=2u32).prop_flat_map(|m| branch(m, m + 1..=2 * m + 4, 3, 4));
    prop::collection::vec(b, 1..=2).prop_map(|branches| GermSpec {
        branches,
        trunc: 20,
    })
}

fn coprime(a: u32, b: u32) -> bool {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a == 1
}

/// Reduced germs of finite codimension: `x = t^m` exactly, `ord y` prime to
/// `m`, and distinct branches. With `generic`, `ord y > 2m` on every branch.
pub fn reduced_germ(max_m: u32, generic: bool) -> impl Strategy<Value = GermSpec> {
    let b = (1..=max_m).prop_flat_map(move |m| {
        let low = if generic { 2 * m + 1 } else { m + 1 };
        let oy = (low..=low + 3).prop_filter("ord y prime to m", move |oy| coprime(*oy, m));
        branch(m, oy, 0, 3)
    });
    prop::collection::vec(b, 1..=2)
        .prop_filter("distinct branches", |bs| {
            bs.len() < 2 || {
                let (a, b) = (&bs[0], &bs[1]);
                a.m != b.m
                    || a.oy != b.oy
                    || num_traits::Signed::abs(&a.y_lead) != num_traits::Signed::abs(&b.y_lead)
            }
        })
        .prop_map(|branches| GermSpec {
            branches,
            trunc: 96,
        })
}

pub fn preset() -> impl Strategy<Value = ModulePreset> {
    prop::sample::select(ModulePreset::ALL.to_vec())
}

/// A few terms `c x^a y^b p^k` with `1 <= a + b + k <= 3`.
pub fn alpha() -> impl Strategy<Value = MPoly> {
    let term = (0u32..=3, 0u32..=3, 0u32..=3, nonzero_rat())
        .prop_filter("in the maximal ideal, degree <= 3", |(a, b, k, _)| {
            (1..=3).contains(&(a + b + k))
        });
    prop::collection::vec(term, 1..=4)
        .prop_map(|ts| MPoly::from_terms(3, ts.into_iter().map(|(a, b, k, c)| (vec![a, b, k], c))))
}

/// A few terms `c x^a y^b` in the ideal `(x^2, y)` of degree at most 4.
pub fn beta0() -> impl Strategy<Value = MPoly> {
    let term = (0u32..=4, 0u32..=3, nonzero_rat())
        .prop_filter("in (x^2, y), degree <= 4", |(a, b, _)| {
            (b >= &1 || a >= &2) && a + b <= 4
        });
    prop::collection::vec(term, 0..=3)
        .prop_map(|ts| MPoly::from_terms(2, ts.into_iter().map(|(a, b, c)| (vec![a, b], c))))
}

/// Arbitrary polynomials in `(x, y, p)` of degree at most 4, constants allowed.
pub fn any_alpha() -> impl Strategy<Value = MPoly> {
    let term = (0u32..=4, 0u32..=4, 0u32..=4, nonzero_rat())
        .prop_filter("degree <= 4", |(a, b, k, _)| a + b + k <= 4);
    prop::collection::vec(term, 0..=5)
        .prop_map(|ts| MPoly::from_terms(3, ts.into_iter().map(|(a, b, k, c)| (vec![a, b, k], c))))
}

/// `(a, b, c)` with `a != 0`; `d` is solved from `ad - bc = 1`.
pub fn symplectic() -> impl Strategy<Value = [Rational; 4]> {
    (nonzero_rat(), small_rat(), small_rat()).prop_map(|(a, b, c)| {
        let one = Rational::from_integer(1.into());
        let d = (one + &b * &c) / &a;
        [a, b, c, d]
    })
}

pub fn round_trip_case() -> impl Strategy<Value = GermSpec> {
    plane_germ(3, 4, 40)
}

pub fn paraboloidal_case() -> impl Strategy<Value = (GermSpec, [Rational; 4])> {
    (plane_germ(2, 3, 30), symplectic())
}

pub fn infinitesimal_case() -> impl Strategy<Value = (MPoly, MPoly, u32)> {
    (any_alpha(), beta0(), 3u32..=8)
}

/// Arrow and hat need generic position, so they draw generic germs.
pub fn stability_case() -> impl Strategy<Value = (ModulePreset, GermSpec)> {
    preset().prop_flat_map(|p| {
        let generic = matches!(p, ModulePreset::Arrow | ModulePreset::Hat);
        (Just(p), reduced_germ(3, generic))
    })
}

pub fn start_case() -> impl Strategy<Value = (ModulePreset, GermSpec, u32)> {
    (stability_case(), 1u32..=40).prop_map(|((p, g), start)| (p, g, start))
}

pub fn oracle_case() -> impl Strategy<Value = (ModulePreset, GermSpec, u32)> {
    (preset(), oracle_germ(), 2u32..=8)
}

pub fn fake_case() -> impl Strategy<Value = (GermSpec, u32, MPoly, MPoly)> {
    (reduced_germ(3, false), 4u32..=16, alpha(), beta0())
}

pub fn hat_case() -> impl Strategy<Value = (GermSpec, u32, MPoly, MPoly)> {
    (reduced_germ(3, true), 6u32..=16, alpha(), beta0())
}
