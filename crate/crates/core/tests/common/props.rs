use legendrian::contact::{
    apply_contact_map, contact_check, gamma_by_recurrence, infinitesimal_extend, make_paraboloidal,
    ContactMap,
};
use legendrian::deformation::{
    compute_module, compute_module_with, ModuleGerm, ModuleOptions, ModulePreset, VectorJet,
    DEFAULT_MAX_ORDER,
};
use legendrian::germ::{
    conormal, fake_conormal, fake_projection, plane_projection, LegendrianGerm,
};
use legendrian::jet::{poly_eval_along, MPoly, Rational, TruncSeries};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::oracle;
use super::strategies::GermSpec;

type Outcome = Result<(), TestCaseError>;

fn fail(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

/// Equality up to the smaller truncation order.
fn agree(a: &TruncSeries, b: &TruncSeries) -> bool {
    let n = a.trunc_order().min(b.trunc_order());
    a.truncate(n) == b.truncate(n)
}

/// `dy/dt - p dx/dt` vanishes to the known order.
fn is_legendrian(x: &TruncSeries, y: &TruncSeries, p: &TruncSeries) -> bool {
    (&y.derivative() - &(p * &x.derivative())).is_zero()
}

pub fn round_trips(spec: GermSpec) -> Outcome {
    let z = spec.plane();
    let l = conormal(&z).map_err(fail)?;
    prop_assert_eq!(&plane_projection(&l), &z);
    for (b, zb) in l.branches().iter().zip(z.branches()) {
        prop_assert!(agree(&(b.p() * &zb.x().derivative()), &zb.y().derivative()));
    }
    let sigma = fake_projection(&l);
    let back = fake_conormal(&sigma);
    prop_assert_eq!(&fake_projection(&back), &sigma);
    for (b, zb) in back.branches().iter().zip(z.branches()) {
        prop_assert!(b.y().trunc_order() <= zb.y().trunc_order());
        prop_assert!(agree(b.y(), zb.y()));
        prop_assert!(is_legendrian(b.x(), b.y(), b.p()));
    }
    Ok(())
}

pub fn paraboloidal(spec: GermSpec, abcd: [Rational; 4]) -> Outcome {
    let [a, b, c, d] = &abcd;
    let chi = make_paraboloidal(a, b, c, d).map_err(fail)?;
    let l = conormal(&spec.plane()).map_err(fail)?;
    let image: LegendrianGerm = apply_contact_map(&chi, &l).map_err(fail)?;
    for (src, img) in l.branches().iter().zip(image.branches()) {
        prop_assert!(is_legendrian(img.x(), img.y(), img.p()));
        // X = c p + d x, P = a p + b x computed directly
        let x = &src.p().scale_rational(c) + &src.x().scale_rational(d);
        let p = &src.p().scale_rational(a) + &src.x().scale_rational(b);
        prop_assert!(agree(img.x(), &x));
        prop_assert!(agree(img.p(), &p));
    }
    prop_assert_eq!(contact_check(&chi, 6).map_err(fail)?, MPoly::one(3));
    let back = legendrian::contact::compose(&chi, &ContactMap::legendre()).map_err(fail)?;
    prop_assert_eq!(contact_check(&back, 6).map_err(fail)?, MPoly::one(3));
    Ok(())
}

pub fn infinitesimal(alpha: MPoly, beta0: MPoly, degree: u32) -> Outcome {
    let ic = infinitesimal_extend(&alpha, &beta0, degree).map_err(fail)?;
    let low = degree - 1;
    let (x, y, p) = (0, 1, 2);
    let pv = MPoly::var(3, p);
    // d beta/dp = p d alpha/dp
    prop_assert_eq!(
        ic.beta.derivative(p).truncate_degree(low),
        (&pv * &alpha.derivative(p)).truncate_degree(low)
    );
    // gamma = beta_x + p (beta_y - alpha_x) - p^2 alpha_y
    let gamma = &(&ic.beta.derivative(x)
        + &(&pv * &(&ic.beta.derivative(y) - &alpha.derivative(x))))
        - &(&(&pv * &pv) * &alpha.derivative(y));
    prop_assert_eq!(ic.gamma.truncate_degree(low), gamma.truncate_degree(low));
    // beta - beta0 is divisible by p
    let b0 = beta0
        .substitute(&[MPoly::var(3, x), MPoly::var(3, y)])
        .truncate_degree(degree);
    prop_assert_eq!(ic.beta.coefficient_in(p, 0), b0);
    prop_assert_eq!(
        gamma_by_recurrence(&alpha, &beta0, degree).map_err(fail)?,
        ic.gamma.clone()
    );
    // d(y + e beta) - (p + e gamma) d(x + e alpha) = (1 + e f'') (dy - p dx) mod e^2
    let f2 = &ic.beta.derivative(y) - &(&pv * &alpha.derivative(y));
    let dx =
        &(&(&ic.beta.derivative(x) - &(&pv * &alpha.derivative(x))) - &ic.gamma) + &(&pv * &f2);
    let dy = &(&ic.beta.derivative(y) - &(&pv * &alpha.derivative(y))) - &f2;
    let dp = &ic.beta.derivative(p) - &(&pv * &alpha.derivative(p));
    for c in [dx, dy, dp] {
        prop_assert!(c.truncate_degree(low).is_zero());
    }
    for c in ic.first_order_defect() {
        prop_assert!(c.is_zero());
    }
    Ok(())
}

pub fn stability(preset: ModulePreset, spec: GermSpec) -> Outcome {
    let g = spec.any();
    let basis = compute_module(preset, &g).map_err(fail)?;
    let mg = ModuleGerm::new(preset, &g).map_err(fail)?;
    for k in 1..=3 {
        let dim = mg
            .quotient_space(basis.trunc_order + k)
            .map_err(fail)?
            .dimension();
        prop_assert_eq!(dim, basis.dimension, "dimension changes at N + {}", k);
    }
    prop_assert!(basis.space().is_basis(&basis.basis()).map_err(fail)?);
    Ok(())
}

pub fn start_independence(preset: ModulePreset, spec: GermSpec, start: u32) -> Outcome {
    let g = spec.any();
    let basis = compute_module(preset, &g).map_err(fail)?;
    let options = ModuleOptions {
        start: Some(start),
        max_order: DEFAULT_MAX_ORDER,
    };
    let other = compute_module_with(preset, &g, &options).map_err(fail)?;
    prop_assert_eq!(other.dimension, basis.dimension);
    prop_assert_eq!(other.monomials, basis.monomials);
    Ok(())
}

pub fn oracle_agreement(preset: ModulePreset, spec: GermSpec, n: u32) -> Outcome {
    let g = spec.any();
    let raw: Vec<_> = spec.branches.iter().map(|b| b.series(spec.trunc)).collect();
    let expected = oracle::dimension(preset, &raw, n).map_err(fail)?;
    match (expected, ModuleGerm::new(preset, &g)) {
        (None, Err(legendrian::deformation::ModuleError::NotGenericPosition { .. })) => Ok(()),
        (Some(dim), Ok(mg)) => {
            let space = mg.quotient_space(n).map_err(fail)?;
            prop_assert_eq!(space.dimension(), dim);
            Ok(())
        }
        (e, m) => Err(fail(format!("oracle {e:?} vs module {:?}", m.map(|_| ())))),
    }
}

fn along(f: &MPoly, l: &LegendrianGerm, n: u32) -> Result<Vec<TruncSeries>, TestCaseError> {
    l.branches()
        .iter()
        .map(|b| {
            let coords: Vec<TruncSeries> = b.coords().into_iter().cloned().collect();
            poly_eval_along(f, &coords)
                .map(|s| s.truncate(n))
                .map_err(fail)
        })
        .collect()
}

/// `(alpha(psi), gamma(psi))` lies in the denominator of the fake module.
pub fn fake_consistency(spec: GermSpec, n: u32, alpha: MPoly, beta0: MPoly) -> Outcome {
    let g = spec.any();
    let psi = conormal(&spec.plane()).map_err(fail)?;
    let space = ModuleGerm::new(ModulePreset::Fake, &g)
        .and_then(|mg| mg.quotient_space(n))
        .map_err(fail)?;
    let ic = infinitesimal_extend(&alpha, &beta0, n + 2).map_err(fail)?;
    let v = VectorJet {
        slot1: along(&ic.alpha, &psi, n)?,
        slot2: along(&ic.gamma, &psi, n)?,
    };
    prop_assert!(space.contains(&v).map_err(fail)?);
    Ok(())
}

/// `(alpha(psi), beta(psi))` lies in the denominator of the hat module.
pub fn hat_consistency(spec: GermSpec, n: u32, alpha: MPoly, beta0: MPoly) -> Outcome {
    let g = spec.any();
    let psi = conormal(&spec.plane()).map_err(fail)?;
    let space = ModuleGerm::new(ModulePreset::Hat, &g)
        .and_then(|mg| mg.quotient_space(n))
        .map_err(fail)?;
    let ic = infinitesimal_extend(&alpha, &beta0, n + 2).map_err(fail)?;
    let v = VectorJet {
        slot1: along(&ic.alpha, &psi, n)?,
        slot2: along(&ic.beta, &psi, n)?,
    };
    prop_assert!(space.contains(&v).map_err(fail)?);
    Ok(())
}
