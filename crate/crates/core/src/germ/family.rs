//! Deformations of parametrizations over a parameter space `(s_1, ..., s_l)`.

use std::fmt;

use super::{FakeGerm, GermError, LegendrianGerm, PlaneGerm};
use crate::jet::{Order, Rational, TruncSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// Branches `(X_i, Y_i)`.
    Plane,
    /// Branches `(X_i, Y_i, P_i)` with `dY/dt = P dX/dt`.
    Legendrian,
    /// Branches `(X_i, P_i)`.
    Fake,
}

impl FamilyKind {
    pub fn coordinate_names(self) -> &'static [&'static str] {
        match self {
            FamilyKind::Plane => &["x", "y"],
            FamilyKind::Legendrian => &["x", "y", "p"],
            FamilyKind::Fake => &["x", "p"],
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Plane => "plane",
            FamilyKind::Legendrian => "legendrian",
            FamilyKind::Fake => "fake",
        })
    }
}

/// A family of parametrizations whose coefficients are polynomials in the
/// parameters. Setting every parameter to zero gives the special fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationFamily {
    kind: FamilyKind,
    param_count: usize,
    branches: Vec<Vec<TruncSeries>>,
}

impl DeformationFamily {
    /// Checks coordinate counts and arities, that every section passes through
    /// the origin (no `t^0` terms, even parameter-dependent ones), that the
    /// special fiber is a valid germ, and for Legendrian families that
    /// `dY/dt = P dX/dt` holds identically in the parameters.
    pub fn new(
        kind: FamilyKind,
        param_count: usize,
        branches: Vec<Vec<TruncSeries>>,
    ) -> Result<Self, GermError> {
        let width = kind.coordinate_names().len();
        for (i, b) in branches.iter().enumerate() {
            if b.len() != width {
                return Err(GermError::InvalidFamily(format!(
                    "branch {i} has {} coordinates, a {kind} family needs {width}",
                    b.len()
                )));
            }
            for (c, name) in b.iter().zip(kind.coordinate_names()) {
                if c.arity() != param_count {
                    return Err(GermError::InvalidFamily(format!(
                        "branch {i}: coordinate {name} has {} parameters, expected {param_count}",
                        c.arity()
                    )));
                }
                if !c.coeff(0).is_zero() {
                    return Err(GermError::InvalidFamily(format!(
                        "branch {i}: coordinate {name} has a t^0 term"
                    )));
                }
            }
            if kind == FamilyKind::Legendrian {
                let defect = &b[1].derivative() - &(&b[2] * &b[0].derivative());
                if let Some(exponent) = defect.order().finite() {
                    return Err(GermError::NotLegendrian {
                        branch: i,
                        exponent,
                    });
                }
            }
        }
        let family = DeformationFamily {
            kind,
            param_count,
            branches,
        };
        family.special_fiber()?;
        Ok(family)
    }

    /// The family with no parameters whose only fiber is `z`.
    pub fn constant_plane(z: &PlaneGerm) -> Self {
        DeformationFamily {
            kind: FamilyKind::Plane,
            param_count: 0,
            branches: z
                .branches()
                .iter()
                .map(|b| vec![b.x().clone(), b.y().clone()])
                .collect(),
        }
    }

    pub fn constant_legendrian(l: &LegendrianGerm) -> Self {
        DeformationFamily {
            kind: FamilyKind::Legendrian,
            param_count: 0,
            branches: l
                .branches()
                .iter()
                .map(|b| vec![b.x().clone(), b.y().clone(), b.p().clone()])
                .collect(),
        }
    }

    pub fn constant_fake(sigma: &FakeGerm) -> Self {
        DeformationFamily {
            kind: FamilyKind::Fake,
            param_count: 0,
            branches: sigma
                .branches()
                .iter()
                .map(|b| vec![b.x().clone(), b.p().clone()])
                .collect(),
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn branches(&self) -> &[Vec<TruncSeries>] {
        &self.branches
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// `s1, ..., sl`.
    pub fn param_names(&self) -> Vec<String> {
        (1..=self.param_count).map(|j| format!("s{j}")).collect()
    }

    /// The fiber over a rational parameter point, as parameter-free series.
    pub fn fiber(&self, values: &[Rational]) -> Vec<Vec<TruncSeries>> {
        assert_eq!(
            values.len(),
            self.param_count,
            "parameter point has wrong length"
        );
        self.branches
            .iter()
            .map(|b| b.iter().map(|c| c.eval_params(values)).collect())
            .collect()
    }

    /// The fiber over the origin, validated as a germ of the family's kind.
    pub fn special_fiber(&self) -> Result<SpecialFiber, GermError> {
        let fiber: Vec<Vec<TruncSeries>> = self
            .branches
            .iter()
            .map(|b| b.iter().map(TruncSeries::special_fiber).collect())
            .collect();
        Ok(match self.kind {
            FamilyKind::Plane => SpecialFiber::Plane(PlaneGerm::from_series(
                fiber
                    .into_iter()
                    .map(|mut c| (c.remove(0), c.remove(0)))
                    .collect(),
            )?),
            FamilyKind::Legendrian => SpecialFiber::Legendrian(LegendrianGerm::from_series(
                fiber
                    .into_iter()
                    .map(|mut c| (c.remove(0), c.remove(0), c.remove(0)))
                    .collect(),
            )?),
            FamilyKind::Fake => SpecialFiber::Fake(FakeGerm::from_series(
                fiber
                    .into_iter()
                    .map(|mut c| (c.remove(0), c.remove(0)))
                    .collect(),
            )?),
        })
    }
}

/// The special fiber of a family, tagged by kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecialFiber {
    Plane(PlaneGerm),
    Legendrian(LegendrianGerm),
    Fake(FakeGerm),
}

impl SpecialFiber {
    /// Multiplicity of each branch of the fiber.
    pub fn multiplicities(&self) -> Vec<u32> {
        match self {
            SpecialFiber::Plane(z) => z.branches().iter().map(|b| b.multiplicity()).collect(),
            SpecialFiber::Legendrian(l) => l.branches().iter().map(|b| b.multiplicity()).collect(),
            SpecialFiber::Fake(s) => s
                .branches()
                .iter()
                .map(|b| super::branch_multiplicity(&[b.x(), b.p()]))
                .collect(),
        }
    }
}

fn require_kind(phi: &DeformationFamily, kind: FamilyKind) -> Result<(), GermError> {
    if phi.kind != kind {
        return Err(GermError::InvalidFamily(format!(
            "expected a {kind} family, found a {} family",
            phi.kind
        )));
    }
    Ok(())
}

/// `P_i = (dY_i/dt) / (dX_i/dt)`, exactly in the parameters.
pub fn family_conormal(phi: &DeformationFamily) -> Result<DeformationFamily, GermError> {
    require_kind(phi, FamilyKind::Plane)?;
    let branches = phi
        .branches
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let p = b[1]
                .derivative()
                .divide_exact(&b[0].derivative())
                .map_err(|source| GermError::ConormalUndefined { branch: i, source })?;
            Ok(vec![b[0].clone(), b[1].clone(), p])
        })
        .collect::<Result<_, GermError>>()?;
    DeformationFamily::new(FamilyKind::Legendrian, phi.param_count, branches)
}

/// `Y_i = integral of P_i dX_i/dt`, vanishing at `t = 0`.
pub fn family_fake_conormal(sigma: &DeformationFamily) -> Result<DeformationFamily, GermError> {
    require_kind(sigma, FamilyKind::Fake)?;
    let branches = sigma
        .branches
        .iter()
        .map(|b| {
            let y = (&b[1] * &b[0].derivative()).integrate();
            vec![b[0].clone(), y, b[1].clone()]
        })
        .collect();
    DeformationFamily::new(FamilyKind::Legendrian, sigma.param_count, branches)
}

/// Per-branch equimultiplicity, decided structurally: a coefficient that is a
/// nonzero polynomial in the parameters counts as present.
///
/// Plane families must keep `ord X_i = m_i` and `ord Y_i >= 2 m_i`, so that
/// every fiber has tangent `{y = 0}` and a conormal in generic position.
/// Legendrian and fake families need every coordinate of order `>= m_i`.
pub fn family_is_equimultiple(phi: &DeformationFamily) -> Result<Vec<bool>, GermError> {
    let m = phi.special_fiber()?.multiplicities();
    Ok(phi
        .branches
        .iter()
        .zip(m)
        .map(|(b, mi)| match phi.kind {
            FamilyKind::Plane => {
                b[0].order().finite() == Some(mi) && b[1].order() >= Order::Finite(2 * mi)
            }
            FamilyKind::Legendrian | FamilyKind::Fake => {
                b.iter().all(|c| c.order() >= Order::Finite(mi))
            }
        })
        .collect())
}

/// Per-branch check that every coordinate keeps order at least the special
/// fiber multiplicity, without any tangent or position condition.
pub fn family_preserves_multiplicity(phi: &DeformationFamily) -> Result<Vec<bool>, GermError> {
    let m = phi.special_fiber()?.multiplicities();
    Ok(phi
        .branches
        .iter()
        .zip(m)
        .map(|(b, mi)| b.iter().all(|c| c.order() >= Order::Finite(mi)))
        .collect())
}
