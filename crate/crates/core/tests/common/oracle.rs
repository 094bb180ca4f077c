//! Brute-force quotient dimensions: dense coefficient vectors, every monomial
//! generator up to total degree `N`, plain Gaussian elimination.

use legendrian::deformation::ModulePreset;
use legendrian::jet::{Rational, TruncSeries};
use num_traits::{One, Zero};

type Dense = Vec<Rational>;

fn dense(s: &TruncSeries, len: usize) -> Dense {
    (0..len as u32).map(|k| s.rational_coeff(k)).collect()
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![Rational::zero(); n];
    for i in 0..n {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..n - i {
            out[i + j] += &a[i] * &b[j];
        }
    }
    out
}

fn deriv(a: &Dense) -> Dense {
    let mut out: Dense = (1..a.len())
        .map(|k| &a[k] * Rational::from_integer(k.into()))
        .collect();
    out.push(Rational::zero());
    out
}

fn ord(a: &Dense) -> Option<usize> {
    a.iter().position(|c| !c.is_zero())
}

/// `num / den` where `den` has order `d`; the last `d` coefficients of the
/// quotient are unknown and dropped.
fn div(num: &Dense, den: &Dense) -> Dense {
    let d = ord(den).expect("nonzero denominator");
    let len = num.len() - d;
    let mut q = vec![Rational::zero(); len];
    for j in 0..len {
        let mut acc = num[j + d].clone();
        for i in 0..j {
            acc -= &q[i] * &den[d + j - i];
        }
        q[j] = acc / &den[d];
    }
    q
}

struct Branch {
    coords: [Dense; 3],
    dx: Dense,
    dy: Dense,
    dp: Dense,
    m: usize,
    ord_y: usize,
}

fn shift(a: &Dense, k: usize) -> Dense {
    let n = a.len();
    let mut out = vec![Rational::zero(); n];
    if k < n {
        out[k..].clone_from_slice(&a[..n - k]);
    }
    out
}

fn monomial(b: &Branch, e: [u32; 3], len: usize) -> Dense {
    let mut out = vec![Rational::zero(); len];
    out[0] = Rational::one();
    for (v, &k) in e.iter().enumerate() {
        for _ in 0..k {
            if out.iter().all(Zero::is_zero) {
                return out;
            }
            out = mul(&out, &b.coords[v]);
        }
    }
    out
}

/// Dimension of the quotient of `preset` at order `n` for the plane germ
/// with the given `(x, y)` branches, or `None` when the preset needs generic
/// position and the germ is not. Errors if a generator falls below a floor.
pub fn dimension(
    preset: ModulePreset,
    germ: &[(TruncSeries, TruncSeries)],
    n: u32,
) -> Result<Option<usize>, String> {
    let len = n as usize + 1;
    let wide = len + 4;
    let branches: Vec<Branch> = germ
        .iter()
        .map(|(x, y)| {
            let (xw, yw) = (dense(x, wide), dense(y, wide));
            let p = div(&deriv(&yw), &deriv(&xw));
            let cut = |v: &Dense| v[..len].to_vec();
            let m = ord(&xw).unwrap().min(ord(&yw).unwrap_or(usize::MAX));
            let ord_y = ord(&yw).unwrap_or(usize::MAX);
            Branch {
                dx: cut(&deriv(&xw)),
                dy: cut(&deriv(&yw)),
                dp: cut(&deriv(&p)),
                coords: [cut(&xw), cut(&yw), cut(&p)],
                m,
                ord_y,
            }
        })
        .collect();
    let generic = branches.iter().all(|b| b.ord_y >= 2 * b.m);
    if matches!(preset, ModulePreset::Arrow | ModulePreset::Hat) && !generic {
        return Ok(None);
    }
    let r = branches.len();
    let floors: Vec<[usize; 2]> = branches
        .iter()
        .map(|b| match preset {
            ModulePreset::Plain | ModulePreset::Fake => [1, 1],
            ModulePreset::Equimultiple => [b.m, b.m],
            ModulePreset::Arrow | ModulePreset::Hat => [b.m, 2 * b.m],
        })
        .collect();

    // a generator is one dense pair per branch, flattened
    let mut rows: Vec<Dense> = Vec::new();
    let flatten = |pairs: Vec<[Dense; 2]>| -> Dense {
        pairs
            .into_iter()
            .flat_map(|[a, b]| a.into_iter().chain(b))
            .collect()
    };
    let zero = || vec![Rational::zero(); len];
    for (i, b) in branches.iter().enumerate() {
        let second = if preset == ModulePreset::Fake {
            &b.dp
        } else {
            &b.dy
        };
        for j in 1..len {
            let mut pairs: Vec<[Dense; 2]> = (0..r).map(|_| [zero(), zero()]).collect();
            pairs[i] = [shift(&b.dx, j), shift(second, j)];
            rows.push(flatten(pairs));
        }
    }
    let per_branch = |f: &dyn Fn(&Branch) -> [Dense; 2]| flatten(branches.iter().map(f).collect());
    // derivatives of degree n + 1 monomials still reach t^n
    let top = n + 1;
    for a in 0..=top {
        for bb in 0..=top - a {
            for k in 0..=top - a - bb {
                let with_p = k > 0;
                match preset {
                    ModulePreset::Plain
                    | ModulePreset::Equimultiple
                    | ModulePreset::Arrow
                    | ModulePreset::Hat => {
                        if !with_p {
                            if a + bb >= 1 {
                                rows.push(per_branch(&|b| [monomial(b, [a, bb, 0], len), zero()]));
                            }
                            let second_ok = match preset {
                                ModulePreset::Arrow | ModulePreset::Hat => bb >= 1 || a >= 2,
                                _ => a + bb >= 1,
                            };
                            if second_ok {
                                rows.push(per_branch(&|b| [zero(), monomial(b, [a, bb, 0], len)]));
                            }
                        } else if preset == ModulePreset::Hat {
                            let w = Rational::new(k.into(), (k + 1).into());
                            rows.push(per_branch(&|b| {
                                let s2 = monomial(b, [a, bb, k + 1], len)
                                    .into_iter()
                                    .map(|c| c * &w)
                                    .collect();
                                [monomial(b, [a, bb, k], len), s2]
                            }));
                        }
                    }
                    ModulePreset::Fake => {
                        if a + bb + k >= 1 {
                            // alpha = x^a y^b p^k, its second slot
                            // -(1/(k+1)) (d_x alpha p + d_y alpha p^2)
                            rows.push(per_branch(&|b| {
                                let mut s2 = zero();
                                let w = Rational::new((-1).into(), (k + 1).into());
                                if a >= 1 {
                                    let t = monomial(b, [a - 1, bb, k + 1], len);
                                    let c = &w * Rational::from_integer(a.into());
                                    s2 = s2.iter().zip(&t).map(|(u, v)| u + v * &c).collect();
                                }
                                if bb >= 1 {
                                    let t = monomial(b, [a, bb - 1, k + 2], len);
                                    let c = &w * Rational::from_integer(bb.into());
                                    s2 = s2.iter().zip(&t).map(|(u, v)| u + v * &c).collect();
                                }
                                [monomial(b, [a, bb, k], len), s2]
                            }));
                        }
                        if k == 0 && (bb >= 1 || a >= 2) {
                            // beta0 = x^a y^b: (0, d_x beta0 + d_y beta0 p)
                            rows.push(per_branch(&|b| {
                                let mut s2 = zero();
                                if a >= 1 {
                                    let t = monomial(b, [a - 1, bb, 0], len);
                                    let c = Rational::from_integer(a.into());
                                    s2 = s2.iter().zip(&t).map(|(u, v)| u + v * &c).collect();
                                }
                                if bb >= 1 {
                                    let t = monomial(b, [a, bb - 1, 1], len);
                                    let c = Rational::from_integer(bb.into());
                                    s2 = s2.iter().zip(&t).map(|(u, v)| u + v * &c).collect();
                                }
                                [zero(), s2]
                            }));
                        }
                    }
                }
            }
        }
    }

    let numerator: usize = floors
        .iter()
        .flatten()
        .map(|f| len.saturating_sub(*f))
        .sum();
    let col = |branch: usize, slot: usize, degree: usize| (2 * branch + slot) * len + degree;
    for row in &rows {
        for (i, f) in floors.iter().enumerate() {
            for slot in 0..2 {
                if (0..f[slot].min(len)).any(|d| !row[col(i, slot, d)].is_zero()) {
                    return Err(format!(
                        "generator below the floor on branch {i}, slot {slot}"
                    ));
                }
            }
        }
    }

    let mut pivots: Vec<(usize, Dense)> = Vec::new();
    for mut row in rows {
        if pivots.len() == numerator {
            break;
        }
        for (c, p) in &pivots {
            if !row[*c].is_zero() {
                let f = row[*c].clone();
                for (u, v) in row.iter_mut().zip(p) {
                    if !v.is_zero() {
                        *u -= &f * v;
                    }
                }
            }
        }
        if let Some(c) = row.iter().position(|v| !v.is_zero()) {
            let inv = row[c].recip();
            for v in row.iter_mut() {
                *v *= &inv;
            }
            pivots.push((c, row));
        }
    }
    Ok(Some(numerator - pivots.len()))
}
