//! Parametrized plane, Legendrian and fake-plane curve germs, the conormal
//! and projection functors between them, and position classification.
//!
//! Every germ lives in the affine chart `(x, y, p)` with contact form
//! `dy - p dx`; plane germs are expected to have tangent cone `{y = 0}`.

mod family;

use std::fmt;

use thiserror::Error;

use crate::jet::{Order, SeriesError, TruncSeries};

pub use family::{
    family_conormal, family_fake_conormal, family_is_equimultiple, family_preserves_multiplicity,
    DeformationFamily, FamilyKind, SpecialFiber,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GermError {
    #[error("branch {branch}: coordinate {coord} does not vanish at t = 0")]
    NotAtOrigin { branch: usize, coord: &'static str },
    #[error("branch {branch}: all coordinates vanish identically")]
    Degenerate { branch: usize },
    #[error("branch {branch}: coordinate series carry parameters")]
    HasParameters { branch: usize },
    #[error("a germ needs at least one branch")]
    NoBranches,
    #[error("branch {branch}: dy/dt != p dx/dt (Legendrian condition fails at t^{exponent})")]
    NotLegendrian { branch: usize, exponent: u32 },
    #[error("branch {branch}: tangent cone is not {{y = 0}} (ord y = {ord_y} <= ord x = {ord_x})")]
    TangentNotY0 {
        branch: usize,
        ord_x: Order,
        ord_y: Order,
    },
    #[error("branch {branch}: not in the chart (x, y, p): {detail}")]
    NotInChart { branch: usize, detail: String },
    #[error("branch {branch}: conormal of the family is undefined: {source}")]
    ConormalUndefined { branch: usize, source: SeriesError },
    #[error("family is malformed: {0}")]
    InvalidFamily(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

fn check_parameter_free(branch: usize, coords: &[&TruncSeries]) -> Result<(), GermError> {
    if coords.iter().any(|c| c.arity() != 0) {
        return Err(GermError::HasParameters { branch });
    }
    Ok(())
}

fn check_vanishing(branch: usize, named: &[(&'static str, &TruncSeries)]) -> Result<(), GermError> {
    for (coord, s) in named {
        if !s.coeff(0).is_zero() {
            return Err(GermError::NotAtOrigin { branch, coord });
        }
    }
    if named.iter().all(|(_, s)| s.is_zero()) {
        return Err(GermError::Degenerate { branch });
    }
    Ok(())
}

/// Returns the first exponent where `dy/dt - p dx/dt` is nonzero.
fn legendrian_defect(x: &TruncSeries, y: &TruncSeries, p: &TruncSeries) -> Option<u32> {
    let defect = &y.derivative() - &(p * &x.derivative());
    defect.order().finite()
}

/// One branch `t -> (x(t), y(t))` of a plane curve germ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneBranch {
    x: TruncSeries,
    y: TruncSeries,
}

impl PlaneBranch {
    pub fn new(x: TruncSeries, y: TruncSeries) -> Result<Self, GermError> {
        Self::validated(0, x, y)
    }

    fn validated(branch: usize, x: TruncSeries, y: TruncSeries) -> Result<Self, GermError> {
        check_parameter_free(branch, &[&x, &y])?;
        check_vanishing(branch, &[("x", &x), ("y", &y)])?;
        Ok(PlaneBranch { x, y })
    }

    pub fn x(&self) -> &TruncSeries {
        &self.x
    }

    pub fn y(&self) -> &TruncSeries {
        &self.y
    }

    /// `min(ord x, ord y)`.
    pub fn multiplicity(&self) -> u32 {
        branch_multiplicity(&[&self.x, &self.y])
    }

    pub fn coords(&self) -> [&TruncSeries; 2] {
        [&self.x, &self.y]
    }
}

/// One branch `t -> (x(t), y(t), p(t))` of a Legendrian curve germ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegendrianBranch {
    x: TruncSeries,
    y: TruncSeries,
    p: TruncSeries,
}

impl LegendrianBranch {
    /// Validates the branch, including `dy/dt = p dx/dt` up to the common
    /// truncation order.
    pub fn new(x: TruncSeries, y: TruncSeries, p: TruncSeries) -> Result<Self, GermError> {
        Self::validated(0, x, y, p)
    }

    fn validated(
        branch: usize,
        x: TruncSeries,
        y: TruncSeries,
        p: TruncSeries,
    ) -> Result<Self, GermError> {
        check_parameter_free(branch, &[&x, &y, &p])?;
        check_vanishing(branch, &[("x", &x), ("y", &y), ("p", &p)])?;
        if let Some(exponent) = legendrian_defect(&x, &y, &p) {
            return Err(GermError::NotLegendrian { branch, exponent });
        }
        Ok(LegendrianBranch { x, y, p })
    }

    pub fn x(&self) -> &TruncSeries {
        &self.x
    }

    pub fn y(&self) -> &TruncSeries {
        &self.y
    }

    pub fn p(&self) -> &TruncSeries {
        &self.p
    }

    pub fn multiplicity(&self) -> u32 {
        branch_multiplicity(&[&self.x, &self.y, &self.p])
    }

    pub fn coords(&self) -> [&TruncSeries; 3] {
        [&self.x, &self.y, &self.p]
    }
}

/// One branch `t -> (x(t), p(t))` of a fake plane projection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FakeBranch {
    x: TruncSeries,
    p: TruncSeries,
}

impl FakeBranch {
    pub fn new(x: TruncSeries, p: TruncSeries) -> Result<Self, GermError> {
        Self::validated(0, x, p)
    }

    fn validated(branch: usize, x: TruncSeries, p: TruncSeries) -> Result<Self, GermError> {
        check_parameter_free(branch, &[&x, &p])?;
        check_vanishing(branch, &[("x", &x), ("p", &p)])?;
        Ok(FakeBranch { x, p })
    }

    pub fn x(&self) -> &TruncSeries {
        &self.x
    }

    pub fn p(&self) -> &TruncSeries {
        &self.p
    }

    pub fn coords(&self) -> [&TruncSeries; 2] {
        [&self.x, &self.p]
    }
}

fn branch_multiplicity(coords: &[&TruncSeries]) -> u32 {
    coords
        .iter()
        .filter_map(|c| c.order().finite())
        .min()
        .expect("validated branches are never identically zero")
}

macro_rules! germ_type {
    ($(#[$doc:meta])* $name:ident, $branch:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq, Eq)]
        pub struct $name {
            branches: Vec<$branch>,
        }

        impl $name {
            pub fn new(branches: Vec<$branch>) -> Result<Self, GermError> {
                if branches.is_empty() {
                    return Err(GermError::NoBranches);
                }
                Ok($name { branches })
            }

            pub fn branches(&self) -> &[$branch] {
                &self.branches
            }

            pub fn branch_count(&self) -> usize {
                self.branches.len()
            }
        }
    };
}

germ_type!(
    /// A plane curve germ given by the parametrizations of its branches.
    PlaneGerm,
    PlaneBranch
);
germ_type!(
    /// A Legendrian curve germ in `(x, y, p)` space.
    LegendrianGerm,
    LegendrianBranch
);
germ_type!(
    /// The `(x, p)` shadow of a Legendrian germ.
    FakeGerm,
    FakeBranch
);

impl PlaneGerm {
    /// Builds a germ from raw coordinate pairs, validating each branch and
    /// reporting its index on failure.
    pub fn from_series(branches: Vec<(TruncSeries, TruncSeries)>) -> Result<Self, GermError> {
        let branches = branches
            .into_iter()
            .enumerate()
            .map(|(i, (x, y))| PlaneBranch::validated(i, x, y))
            .collect::<Result<_, _>>()?;
        Self::new(branches)
    }
}

impl LegendrianGerm {
    pub fn from_series(
        branches: Vec<(TruncSeries, TruncSeries, TruncSeries)>,
    ) -> Result<Self, GermError> {
        let branches = branches
            .into_iter()
            .enumerate()
            .map(|(i, (x, y, p))| LegendrianBranch::validated(i, x, y, p))
            .collect::<Result<_, _>>()?;
        Self::new(branches)
    }
}

impl FakeGerm {
    pub fn from_series(branches: Vec<(TruncSeries, TruncSeries)>) -> Result<Self, GermError> {
        let branches = branches
            .into_iter()
            .enumerate()
            .map(|(i, (x, p))| FakeBranch::validated(i, x, p))
            .collect::<Result<_, _>>()?;
        Self::new(branches)
    }
}

/// Position of a branch and its conormal relative to the fiber `{x = y = 0}`.
///
/// With tangent cone `{y = 0}` (`ord y > ord x`):
/// * `CaseII`: `ord x < ord y < 2 ord x`, the conormal is tangent to the fiber;
/// * `CaseIII`: `ord y = 2 ord x`, generic position, tangent cone not `{y = p = 0}`;
/// * `CaseIV`: `ord y > 2 ord x`, tangent cone of the conormal is `{y = p = 0}`.
///
/// `CaseI` is reported when `y` vanishes up to its truncation order and that
/// order is too low to tell the other cases apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PositionCase {
    CaseI,
    CaseII,
    CaseIII,
    CaseIV,
}

impl fmt::Display for PositionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PositionCase::CaseI => "CASE_I",
            PositionCase::CaseII => "CASE_II",
            PositionCase::CaseIII => "CASE_III",
            PositionCase::CaseIV => "CASE_IV",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PositionClass {
    pub case: PositionCase,
    pub tangent_cone_is_y0: bool,
    pub generic_position: bool,
    /// Multiplicity of the conormal equals that of the plane branch.
    pub mult_equal: bool,
}

/// Classifies a plane branch with tangent cone `{y = 0}`.
pub fn position_classify(b: &PlaneBranch) -> Result<PositionClass, GermError> {
    let ord_x = b.x.order();
    let ord_y = b.y.order();
    if ord_y <= ord_x {
        return Err(GermError::TangentNotY0 {
            branch: 0,
            ord_x,
            ord_y,
        });
    }
    let mx = ord_x.finite().expect("ord x < ord y forces a finite ord x");
    let case = match ord_y {
        Order::Finite(oy) if oy < 2 * mx => PositionCase::CaseII,
        Order::Finite(oy) if oy == 2 * mx => PositionCase::CaseIII,
        Order::Finite(_) => PositionCase::CaseIV,
        // y vanishes to order > N, so every case with ord y <= N is excluded.
        Order::Infinite if b.y.trunc_order() >= 2 * mx => PositionCase::CaseIV,
        Order::Infinite => PositionCase::CaseI,
    };
    let generic = matches!(case, PositionCase::CaseIII | PositionCase::CaseIV);
    Ok(PositionClass {
        case,
        tangent_cone_is_y0: true,
        generic_position: generic,
        mult_equal: generic,
    })
}

/// Classifies every branch of a germ.
pub fn classify_germ(z: &PlaneGerm) -> Result<Vec<PositionClass>, GermError> {
    z.branches
        .iter()
        .enumerate()
        .map(|(i, b)| {
            position_classify(b).map_err(|e| match e {
                GermError::TangentNotY0 { ord_x, ord_y, .. } => GermError::TangentNotY0 {
                    branch: i,
                    ord_x,
                    ord_y,
                },
                other => other,
            })
        })
        .collect()
}

fn conormal_branch(i: usize, b: &PlaneBranch) -> Result<LegendrianBranch, GermError> {
    let (ord_x, ord_y) = (b.x.order(), b.y.order());
    if ord_y <= ord_x {
        return Err(GermError::NotInChart {
            branch: i,
            detail: format!("ord y = {ord_y} <= ord x = {ord_x}"),
        });
    }
    let p =
        b.y.derivative()
            .divide_exact(&b.x.derivative())
            .map_err(|e| GermError::NotInChart {
                branch: i,
                detail: e.to_string(),
            })?;
    // p has a lower truncation order than x and y; the Legendrian identity
    // holds exactly up to that order.
    LegendrianBranch::validated(i, b.x.clone(), b.y.clone(), p)
}

/// The conormal `(x, y, y'/x')` of each branch.
pub fn conormal(z: &PlaneGerm) -> Result<LegendrianGerm, GermError> {
    let branches = z
        .branches
        .iter()
        .enumerate()
        .map(|(i, b)| conormal_branch(i, b))
        .collect::<Result<_, _>>()?;
    LegendrianGerm::new(branches)
}

/// Drops `p`.
pub fn plane_projection(l: &LegendrianGerm) -> PlaneGerm {
    PlaneGerm {
        branches: l
            .branches
            .iter()
            .map(|b| PlaneBranch {
                x: b.x.clone(),
                y: b.y.clone(),
            })
            .collect(),
    }
}

/// Drops `y`.
pub fn fake_projection(l: &LegendrianGerm) -> FakeGerm {
    FakeGerm {
        branches: l
            .branches
            .iter()
            .map(|b| FakeBranch {
                x: b.x.clone(),
                p: b.p.clone(),
            })
            .collect(),
    }
}

/// Recovers `y = integral of p dx/dt` (vanishing at `t = 0`) on each branch.
pub fn fake_conormal(sigma: &FakeGerm) -> LegendrianGerm {
    LegendrianGerm {
        branches: sigma
            .branches
            .iter()
            .map(|b| {
                let y = (&b.p * &b.x.derivative()).integrate();
                LegendrianBranch {
                    x: b.x.clone(),
                    y,
                    p: b.p.clone(),
                }
            })
            .collect(),
    }
}

/// A germ of any of the three kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyGerm {
    Plane(PlaneGerm),
    Legendrian(LegendrianGerm),
    Fake(FakeGerm),
}

impl AnyGerm {
    pub fn kind_name(&self) -> &'static str {
        match self {
            AnyGerm::Plane(_) => "plane",
            AnyGerm::Legendrian(_) => "legendrian",
            AnyGerm::Fake(_) => "fake",
        }
    }

    /// Plane germs pass through; Legendrian and fake germs are projected
    /// (a fake germ through its conormal).
    pub fn to_plane(&self) -> PlaneGerm {
        match self {
            AnyGerm::Plane(z) => z.clone(),
            AnyGerm::Legendrian(l) => plane_projection(l),
            AnyGerm::Fake(s) => plane_projection(&fake_conormal(s)),
        }
    }

    /// The conormal of a plane germ, the fake conormal of a fake germ.
    pub fn to_legendrian(&self) -> Result<LegendrianGerm, GermError> {
        match self {
            AnyGerm::Plane(z) => conormal(z),
            AnyGerm::Legendrian(l) => Ok(l.clone()),
            AnyGerm::Fake(s) => Ok(fake_conormal(s)),
        }
    }
}
