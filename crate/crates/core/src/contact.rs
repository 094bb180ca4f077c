//! Contact transformations of `(x, y, p)` space for the form `dy - p dx`,
//! their action on Legendrian germs, and first-order relative contact
//! extensions.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::germ::{GermError, LegendrianBranch, LegendrianGerm};
use crate::jet::{int, poly_eval_along, MPoly, Rational, SeriesError, TruncSeries};

const X: usize = 0;
const Y: usize = 1;
const P: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContactError {
    #[error("ad - bc = {0}, expected 1")]
    NotSymplectic(Rational),
    #[error("not an automorphism germ at the origin: {0}")]
    NotAutomorphism(String),
    #[error("the lift leaves the chart (x, y, p): db/dx(0, 0) = {0} is nonzero")]
    ChartLost(Rational),
    #[error("branch {branch}: image is not a curve germ at the chart origin: {detail}")]
    LeavesChart { branch: usize, detail: String },
    #[error("not a contact map: {0}")]
    NotContact(String),
    #[error("beta0 is not in the ideal (x^2, y): {0}")]
    Beta0NotAdmissible(String),
    #[error("component must be a polynomial in {expected} variables, found {found}")]
    Arity { expected: usize, found: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// A map `(x, y, p) -> (X, Y, P)` given by polynomials.
///
/// When `degree` is set the components are jets: only their terms of total
/// degree `<= degree` are meaningful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContactMap {
    x: MPoly,
    y: MPoly,
    p: MPoly,
    degree: Option<u32>,
}

impl ContactMap {
    pub fn new(x: MPoly, y: MPoly, p: MPoly, degree: Option<u32>) -> Result<Self, ContactError> {
        for c in [&x, &y, &p] {
            if c.nvars() != 3 {
                return Err(ContactError::Arity {
                    expected: 3,
                    found: c.nvars(),
                });
            }
        }
        let trunc = |c: MPoly| match degree {
            Some(d) => c.truncate_degree(d),
            None => c,
        };
        Ok(ContactMap {
            x: trunc(x),
            y: trunc(y),
            p: trunc(p),
            degree,
        })
    }

    pub fn identity() -> Self {
        ContactMap {
            x: MPoly::var(3, X),
            y: MPoly::var(3, Y),
            p: MPoly::var(3, P),
            degree: None,
        }
    }

    /// `(x, y, p) -> (p, y - p x, -x)`.
    pub fn legendre() -> Self {
        make_paraboloidal(&int(0), &int(-1), &int(1), &int(0)).expect("ad - bc = 1")
    }

    pub fn components(&self) -> [&MPoly; 3] {
        [&self.x, &self.y, &self.p]
    }

    pub fn degree(&self) -> Option<u32> {
        self.degree
    }

    fn fixes_origin(&self) -> bool {
        self.components()
            .iter()
            .all(|c| c.constant_term().is_zero())
    }

    /// Highest total degree at which the contact defect is known exactly.
    fn exact_defect_degree(&self) -> Option<u32> {
        self.degree.map(|d| d.saturating_sub(1))
    }
}

/// The paraboloidal map
/// `(x, y, p) -> (c p + d x, y + ac/2 p^2 + bc x p + bd/2 x^2, a p + b x)`.
pub fn make_paraboloidal(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
) -> Result<ContactMap, ContactError> {
    let det = a * d - b * c;
    if !det.is_one() {
        return Err(ContactError::NotSymplectic(det));
    }
    let half = Rational::new(1.into(), 2.into());
    let mono = |e: [u32; 3], k: Rational| MPoly::monomial(e.to_vec(), k);
    let x = &mono([0, 0, 1], c.clone()) + &mono([1, 0, 0], d.clone());
    let y = &(&(&MPoly::var(3, Y) + &mono([0, 0, 2], &half * a * c)) + &mono([1, 0, 1], b * c))
        + &mono([2, 0, 0], &half * b * d);
    let p = &mono([0, 0, 1], a.clone()) + &mono([1, 0, 0], b.clone());
    ContactMap::new(x, y, p, None)
}

/// Lifts a plane automorphism germ `(x, y) -> (a, b)` preserving the
/// direction `{y = 0}` at the origin. The slope component
/// `(b_y p + b_x) / (a_y p + a_x)` is expanded to total degree `degree`.
pub fn lift_plane_automorphism(
    a: &MPoly,
    b: &MPoly,
    degree: u32,
) -> Result<ContactMap, ContactError> {
    for c in [a, b] {
        if c.nvars() != 2 {
            return Err(ContactError::Arity {
                expected: 2,
                found: c.nvars(),
            });
        }
    }
    if !a.constant_term().is_zero() || !b.constant_term().is_zero() {
        return Err(ContactError::NotAutomorphism(
            "the origin is not fixed".into(),
        ));
    }
    let at0 = |f: &MPoly, i: usize| f.derivative(i).constant_term();
    let (ax, ay, bx, by) = (at0(a, 0), at0(a, 1), at0(b, 0), at0(b, 1));
    if (&ax * &by - &ay * &bx).is_zero() {
        return Err(ContactError::NotAutomorphism(
            "the Jacobian at the origin is singular".into(),
        ));
    }
    if !bx.is_zero() {
        return Err(ContactError::ChartLost(bx));
    }
    let embed = |f: &MPoly| f.substitute(&[MPoly::var(3, X), MPoly::var(3, Y)]);
    let pv = MPoly::var(3, P);
    let num = &(&embed(&b.derivative(1)) * &pv) + &embed(&b.derivative(0));
    let den = &(&embed(&a.derivative(1)) * &pv) + &embed(&a.derivative(0));
    let inv = truncated_inverse(&den, degree);
    let p = (&num * &inv).truncate_degree(degree);
    ContactMap::new(embed(a), embed(b), p, Some(degree))
}

/// `1 / f` up to total degree `degree`, for `f` with a nonzero constant term.
fn truncated_inverse(f: &MPoly, degree: u32) -> MPoly {
    let f0 = f.constant_term();
    let inv0 = f0.recip();
    // 1/f = (1/f0) * sum_k (-e)^k with e = (f - f0)/f0 of order >= 1
    let e = (f - &MPoly::constant(f.nvars(), f0)).scale(&-&inv0);
    let mut acc = MPoly::one(f.nvars());
    let mut power = MPoly::one(f.nvars());
    for _ in 0..degree {
        power = (&power * &e).truncate_degree(degree);
        if power.is_zero() {
            break;
        }
        acc = &acc + &power;
    }
    acc.scale(&inv0)
}

/// Applies `chi` to every branch. The image must stay at the chart origin.
pub fn apply_contact_map(
    chi: &ContactMap,
    l: &LegendrianGerm,
) -> Result<LegendrianGerm, ContactError> {
    let branches = l
        .branches()
        .iter()
        .enumerate()
        .map(|(i, b)| apply_to_branch(chi, i, b))
        .collect::<Result<Vec<_>, _>>()?;
    LegendrianGerm::new(branches).map_err(|e| ContactError::LeavesChart {
        branch: 0,
        detail: e.to_string(),
    })
}

fn apply_to_branch(
    chi: &ContactMap,
    i: usize,
    b: &LegendrianBranch,
) -> Result<LegendrianBranch, ContactError> {
    let coords: Vec<TruncSeries> = b.coords().into_iter().cloned().collect();
    let mut image = chi
        .components()
        .into_iter()
        .map(|c| poly_eval_along(c, &coords))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(d) = chi.degree {
        // the unknown terms of the jet have degree > d, hence t-order > d * m
        let known = (d + 1) * b.multiplicity() - 1;
        for s in &mut image {
            *s = s.truncate(known.min(s.trunc_order()));
        }
    }
    let mut it = image.into_iter();
    let (x, y, p) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
    LegendrianBranch::new(x, y, p).map_err(|e| ContactError::LeavesChart {
        branch: i,
        detail: match e {
            GermError::NotAtOrigin { coord, .. } => {
                format!("coordinate {coord} does not vanish at t = 0")
            }
            other => other.to_string(),
        },
    })
}

/// Expands `chi^*(dy - p dx)` and returns the factor `f` with
/// `chi^*(dy - p dx) = f (dy - p dx)`, up to total degree `degree`.
///
/// For jets the comparison stops at the highest degree the jet determines.
pub fn contact_check(chi: &ContactMap, degree: u32) -> Result<MPoly, ContactError> {
    let cmp = chi.exact_defect_degree().map_or(degree, |d| d.min(degree));
    let [cx, cy, cp] = chi.components();
    // chi^* omega = A_x dx + A_y dy + A_p dp
    let coefficient =
        |i: usize| (&cy.derivative(i) - &(cp * &cx.derivative(i))).truncate_degree(cmp);
    let (a_x, a_y, a_p) = (coefficient(X), coefficient(Y), coefficient(P));
    if !a_p.is_zero() {
        return Err(ContactError::NotContact(format!(
            "the dp coefficient {a_p:?} does not vanish"
        )));
    }
    let pv = MPoly::var(3, P);
    let mismatch = (&a_x + &(&pv * &a_y)).truncate_degree(cmp);
    if !mismatch.is_zero() {
        return Err(ContactError::NotContact(format!(
            "the dx coefficient differs from -p times the dy coefficient by {mismatch:?}"
        )));
    }
    if a_y.constant_term().is_zero() {
        return Err(ContactError::NotContact(
            "the factor vanishes at the origin".into(),
        ));
    }
    Ok(a_y)
}

/// `second o first`. Requires `first` to fix the origin when either map is a
/// jet, so that truncation degrees compose.
pub fn compose(first: &ContactMap, second: &ContactMap) -> Result<ContactMap, ContactError> {
    let degree = match (first.degree, second.degree) {
        (None, None) => None,
        (a, b) => {
            if !first.fixes_origin() {
                return Err(ContactError::NotContact(
                    "cannot compose jets through a map that moves the origin".into(),
                ));
            }
            Some(a.unwrap_or(u32::MAX).min(b.unwrap_or(u32::MAX)))
        }
    };
    let inner: Vec<MPoly> = first.components().into_iter().cloned().collect();
    let outer = second.components().map(|c| c.substitute(&inner));
    let [x, y, p] = outer;
    ContactMap::new(x, y, p, degree)
}

/// First-order relative contact extension: with `e^2 = 0`,
/// `(x, y, p) -> (x + e alpha, y + e beta, p + e gamma)` is contact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinitesimalContact {
    pub alpha: MPoly,
    pub beta: MPoly,
    pub gamma: MPoly,
    pub beta0: MPoly,
    pub degree: u32,
}

/// `beta = beta0 + sum_{k>=1} (k-1)/k alpha_{k-1} p^k` and
/// `gamma = beta_x + p (beta_y - alpha_x) - p^2 alpha_y`, where `alpha_k` is
/// the coefficient of `p^k` in `alpha`; all truncated at total degree
/// `degree`. `beta0` is a polynomial in `(x, y)`.
pub fn infinitesimal_extend(
    alpha: &MPoly,
    beta0: &MPoly,
    degree: u32,
) -> Result<InfinitesimalContact, ContactError> {
    if alpha.nvars() != 3 {
        return Err(ContactError::Arity {
            expected: 3,
            found: alpha.nvars(),
        });
    }
    let beta0_3 = embed_beta0(beta0)?;
    let mut beta = beta0_3.clone();
    for (e, c) in alpha.terms() {
        let k = e[P] + 1;
        if k >= 2 {
            let w = Rational::new((k - 1).into(), k.into());
            beta = &beta + &MPoly::monomial(vec![e[X], e[Y], k], c * w);
        }
    }
    let pv = MPoly::var(3, P);
    let gamma = &(&beta.derivative(X) + &(&pv * &(&beta.derivative(Y) - &alpha.derivative(X))))
        - &(&pv.pow(2) * &alpha.derivative(Y));
    Ok(InfinitesimalContact {
        alpha: alpha.truncate_degree(degree),
        beta: beta.truncate_degree(degree),
        gamma: gamma.truncate_degree(degree),
        beta0: beta0.clone(),
        degree,
    })
}

fn embed_beta0(beta0: &MPoly) -> Result<MPoly, ContactError> {
    if beta0.nvars() != 2 {
        return Err(ContactError::Arity {
            expected: 2,
            found: beta0.nvars(),
        });
    }
    if let Some((e, _)) = beta0.terms().find(|(e, _)| e[1] == 0 && e[0] < 2) {
        return Err(ContactError::Beta0NotAdmissible(format!(
            "term x^{} y^{} is not in the ideal",
            e[0], e[1]
        )));
    }
    Ok(beta0.substitute(&[MPoly::var(3, X), MPoly::var(3, Y)]))
}

/// `gamma` built coefficient by coefficient in `p`:
/// `gamma_0 = d beta0/dx`, `gamma_1 = d beta0/dy - d alpha_0/dx`, and for
/// `k >= 2`, `gamma_k = -(1/k) d alpha_{k-1}/dx - (1/(k-1)) d alpha_{k-2}/dy`.
pub fn gamma_by_recurrence(
    alpha: &MPoly,
    beta0: &MPoly,
    degree: u32,
) -> Result<MPoly, ContactError> {
    if alpha.nvars() != 3 {
        return Err(ContactError::Arity {
            expected: 3,
            found: alpha.nvars(),
        });
    }
    let b0 = embed_beta0(beta0)?;
    let pv = MPoly::var(3, P);
    let coeff = |k: u32| alpha.coefficient_in(P, k);
    let top = alpha.degree_in(P).map_or(0, |d| d + 2);
    let mut gamma = &b0.derivative(X) + &(&pv * &(&b0.derivative(Y) - &coeff(0).derivative(X)));
    for k in 2..=top {
        let gk = &coeff(k - 1)
            .derivative(X)
            .scale(&Rational::new((-1).into(), k.into()))
            - &coeff(k - 2)
                .derivative(Y)
                .scale(&Rational::new(1.into(), (k - 1).into()));
        gamma = &gamma + &(&gk * &pv.pow(k));
    }
    Ok(gamma.truncate_degree(degree))
}

impl InfinitesimalContact {
    /// The first-order factor `f'' = beta_y - p alpha_y`.
    pub fn factor(&self) -> MPoly {
        (&self.beta.derivative(Y) - &(&MPoly::var(3, P) * &self.alpha.derivative(Y)))
            .truncate_degree(self.degree)
    }

    /// `d beta - p d alpha - gamma dx - f'' (dy - p dx)`, the coefficient of
    /// `e` in `d(y + e beta) - (p + e gamma) d(x + e alpha) - (1 + e f'')(dy - p dx)`,
    /// as `[dx, dy, dp]` coefficients up to the degree where they are exact.
    pub fn first_order_defect(&self) -> [MPoly; 3] {
        let pv = MPoly::var(3, P);
        let f2 = self.factor();
        let d = self.degree.saturating_sub(1);
        let dx = &(&(&self.beta.derivative(X) - &(&pv * &self.alpha.derivative(X))) - &self.gamma)
            + &(&pv * &f2);
        let dy = &(&self.beta.derivative(Y) - &(&pv * &self.alpha.derivative(Y))) - &f2;
        let dp = &self.beta.derivative(P) - &(&pv * &self.alpha.derivative(P));
        [dx, dy, dp].map(|c| c.truncate_degree(d))
    }
}
