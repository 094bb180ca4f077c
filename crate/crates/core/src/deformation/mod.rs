//! Deformation modules of plane and Legendrian curve germs as finite
//! quotients of truncated vector-field spaces, and the families they induce.
//!
//! Every module has the shape `(numerator) / (denominator)` where the
//! numerator is `sum_i t_i^(f_i1) C{t_i} d1 + t_i^(f_i2) C{t_i} d2` and the
//! denominator is spanned by `m phi'` plus ideal-generated parts. Working
//! modulo `t^(N+1)` turns both into finite-dimensional spaces.

mod generators;
mod linalg;
mod scalar;

use std::fmt;

use thiserror::Error;

use crate::germ::{
    family_conormal, family_fake_conormal, position_classify, AnyGerm, DeformationFamily,
    FamilyKind, GermError, LegendrianGerm, PlaneGerm,
};
use crate::jet::{MPoly, Order, Rational, TruncSeries};

use generators::{BranchData, DenseVector, Generators, Jet};
use linalg::{Echelon, Layout, SparseRow};
use scalar::Q;

pub use linalg::{Coord, Slot};

/// Default upper bound on the working truncation order.
pub const DEFAULT_MAX_ORDER: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModulePreset {
    /// Floors `(1, 1)`; denominator `m phi' + (x, y) dx + (x, y) dy`.
    Plain,
    /// Floors `(m, m)`; same denominator.
    Equimultiple,
    /// Floors `(m, 2m)`; denominator `m phi' + (x, y) dx + (x^2, y) dy`.
    Arrow,
    /// The arrow module modulo the `O_Z`-module generated by
    /// `p^k dx + k/(k+1) p^(k+1) dy`, `k >= 1`.
    Hat,
    /// Floors `(1, 1)` on `(dx, dp)`; denominator `m sigma' + I^f`.
    Fake,
}

impl ModulePreset {
    pub const ALL: [ModulePreset; 5] = [
        ModulePreset::Plain,
        ModulePreset::Equimultiple,
        ModulePreset::Arrow,
        ModulePreset::Hat,
        ModulePreset::Fake,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModulePreset::Plain => "plain",
            ModulePreset::Equimultiple => "em",
            ModulePreset::Arrow => "arrow",
            ModulePreset::Hat => "hat",
            ModulePreset::Fake => "fake",
        }
    }

    /// Names of the two slots.
    pub fn slot_names(self) -> [&'static str; 2] {
        match self {
            ModulePreset::Fake => ["x", "p"],
            _ => ["x", "y"],
        }
    }

    fn needs_generic_position(self) -> bool {
        matches!(self, ModulePreset::Arrow | ModulePreset::Hat)
    }
}

impl fmt::Display for ModulePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModulePreset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ModulePreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset {s:?} (expected plain, em, arrow, hat or fake)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("branch {branch}: conormal not in generic position (ord y = {ord_y} < 2 ord x = {twice_ord_x})")]
    NotGenericPosition {
        branch: usize,
        ord_y: Order,
        twice_ord_x: u32,
    },
    #[error("generator has a nonzero t^{degree} term on branch {branch} below the floor {floor}")]
    GeneratorBelowFloor {
        branch: usize,
        degree: u32,
        floor: u32,
    },
    #[error("not saturated at N = {n}: monomials up to t^{saturation} are outside the span, window {window} needed")]
    NotSaturated {
        n: u32,
        saturation: u32,
        window: u32,
    },
    #[error("dimension does not stabilize up to the order cap {cap}")]
    Diverging { cap: u32 },
    #[error("germ is only known to order {available}, the module needs order {needed}")]
    InsufficientPrecision { needed: u32, available: u32 },
    #[error("vector has {found} branches, the module has {expected}")]
    BranchMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Germ(#[from] GermError),
}

/// A vector field along the germ: per branch, the two slot series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorJet {
    pub slot1: Vec<TruncSeries>,
    pub slot2: Vec<TruncSeries>,
}

impl VectorJet {
    /// `t_branch^degree` in `slot`, zero elsewhere, truncated at `n`.
    pub fn monomial(branches: usize, coord: Coord, n: u32) -> Self {
        let mut v = VectorJet {
            slot1: vec![TruncSeries::zero(0, n); branches],
            slot2: vec![TruncSeries::zero(0, n); branches],
        };
        let s = TruncSeries::t_pow(coord.degree, n);
        match coord.slot {
            Slot::First => v.slot1[coord.branch] = s,
            Slot::Second => v.slot2[coord.branch] = s,
        }
        v
    }

    pub fn branch_count(&self) -> usize {
        self.slot1.len()
    }

    fn slot(&self, s: Slot) -> &[TruncSeries] {
        match s {
            Slot::First => &self.slot1,
            Slot::Second => &self.slot2,
        }
    }

    fn from_dense(d: &DenseVector, n: u32) -> Self {
        let series = |j: &Jet| {
            TruncSeries::from_rationals(
                n,
                j.0.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (k as u32, c.to_rational())),
            )
        };
        VectorJet {
            slot1: d.slots.iter().map(|s| series(&s[0])).collect(),
            slot2: d.slots.iter().map(|s| series(&s[1])).collect(),
        }
    }
}

/// The numerator modulo `t^(N+1)` together with the span of the denominator.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    layout: Layout,
    echelon: Echelon,
}

impl QuotientSpace {
    fn from_rows(layout: Layout, rows: impl IntoIterator<Item = SparseRow>) -> Self {
        let mut echelon = Echelon::new();
        for row in rows {
            echelon.insert(row);
        }
        echelon.reduce();
        QuotientSpace { layout, echelon }
    }

    /// Builds the space from explicit generators. Terms above `n` are dropped.
    pub fn new(floors: &[[u32; 2]], generators: &[VectorJet], n: u32) -> Result<Self, ModuleError> {
        let layout = Layout::new(floors, n);
        let rows = generators
            .iter()
            .map(|g| vector_row(&layout, g))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_rows(layout, rows))
    }

    pub fn trunc_order(&self) -> u32 {
        self.layout.n()
    }

    /// The same quotient at a lower working order `n`: the denominator span
    /// read modulo `t^(n+1)`.
    pub fn truncate(&self, n: u32) -> QuotientSpace {
        if n >= self.layout.n() {
            return self.clone();
        }
        let layout = Layout::new(self.layout.floors(), n);
        let echelon = self.echelon.truncated(layout.len());
        QuotientSpace { layout, echelon }
    }

    pub fn floors(&self) -> &[[u32; 2]] {
        self.layout.floors()
    }

    pub fn branch_count(&self) -> usize {
        self.layout.floors().len()
    }

    /// Dimension of the truncated numerator.
    pub fn ambient_dimension(&self) -> usize {
        self.layout.len()
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Codimension of the denominator span.
    pub fn dimension(&self) -> usize {
        self.layout.len() - self.echelon.rank()
    }

    /// Coordinates not hit by a pivot: their monomials form the canonical
    /// basis of the quotient. Listed by slot, then branch, then degree.
    pub fn complement(&self) -> Vec<Coord> {
        let mut out: Vec<Coord> = (0..self.layout.len())
            .filter(|&i| !self.echelon.is_pivot(i))
            .map(|i| self.layout.coord(i))
            .collect();
        out.sort_by_key(Coord::report_key);
        out
    }

    /// Least `s` such that every monomial of degree in `(s, N]` lies in the
    /// span.
    pub fn saturation_order(&self) -> u32 {
        saturation(&self.layout, &self.echelon)
    }

    /// Canonical representative: coefficients on complement coordinates.
    pub fn normal_form(&self, v: &VectorJet) -> Result<Vec<(Coord, Rational)>, ModuleError> {
        let row = vector_row(&self.layout, v)?;
        let mut out: Vec<(Coord, Rational)> = self
            .echelon
            .normal_form(row)
            .into_iter()
            .map(|(i, c)| (self.layout.coord(i), c.to_rational()))
            .collect();
        out.sort_by_key(|(c, _)| c.report_key());
        Ok(out)
    }

    /// Whether `v` lies in the denominator span (modulo `t^(N+1)`).
    pub fn contains(&self, v: &VectorJet) -> Result<bool, ModuleError> {
        Ok(self.normal_form(v)?.is_empty())
    }

    /// Whether the classes of `vectors` are linearly independent in the
    /// quotient.
    pub fn independent(&self, vectors: &[VectorJet]) -> Result<bool, ModuleError> {
        let mut e = Echelon::new();
        for v in vectors {
            let row = self.echelon.normal_form(vector_row(&self.layout, v)?);
            if !e.insert(row) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Independent in the quotient and as many as its dimension.
    pub fn is_basis(&self, vectors: &[VectorJet]) -> Result<bool, ModuleError> {
        Ok(vectors.len() == self.dimension() && self.independent(vectors)?)
    }
}

fn saturation(layout: &Layout, echelon: &Echelon) -> u32 {
    (0..layout.len())
        .filter(|&i| !echelon.contains_unit(i))
        .map(|i| layout.coord(i).degree)
        .max()
        .unwrap_or(0)
}

fn vector_row(layout: &Layout, v: &VectorJet) -> Result<SparseRow, ModuleError> {
    let r = layout.floors().len();
    if v.branch_count() != r || v.slot2.len() != r {
        return Err(ModuleError::BranchMismatch {
            expected: r,
            found: v.branch_count(),
        });
    }
    let mut row = SparseRow::new();
    for slot in [Slot::First, Slot::Second] {
        for (branch, s) in v.slot(slot).iter().enumerate() {
            for (degree, c) in s.terms() {
                let c = c.as_constant().expect("vector jets are parameter-free");
                put(
                    layout,
                    &mut row,
                    Coord {
                        branch,
                        slot,
                        degree,
                    },
                    Q::from_rational(&c),
                )?;
            }
        }
    }
    Ok(row)
}

fn dense_row(layout: &Layout, v: &DenseVector) -> Result<SparseRow, ModuleError> {
    let mut row = SparseRow::new();
    for (branch, slots) in v.slots.iter().enumerate() {
        for (si, jet) in slots.iter().enumerate() {
            for (degree, c) in jet.0.iter().enumerate() {
                if !c.is_zero() {
                    let coord = Coord {
                        branch,
                        slot: Slot::from_index(si),
                        degree: degree as u32,
                    };
                    put(layout, &mut row, coord, c.clone())?;
                }
            }
        }
    }
    Ok(row)
}

fn put(layout: &Layout, row: &mut SparseRow, coord: Coord, c: Q) -> Result<(), ModuleError> {
    if coord.degree > layout.n() || c.is_zero() {
        return Ok(());
    }
    match layout.index_of(&coord) {
        Some(i) => {
            row.insert(i, c);
            Ok(())
        }
        None => Err(ModuleError::GeneratorBelowFloor {
            branch: coord.branch,
            degree: coord.degree,
            floor: layout.floors()[coord.branch][coord.slot.index()],
        }),
    }
}

/// The germ data a module computation runs on.
#[derive(Clone, Debug)]
pub struct ModuleGerm {
    preset: ModulePreset,
    branches: Vec<BranchData>,
    multiplicities: Vec<u32>,
}

impl ModuleGerm {
    /// Prepares `germ` for `preset`. Plane presets use the plane projection
    /// of a Legendrian or fake germ; the fake preset uses the conormal of a
    /// plane germ. The arrow and hat presets need every branch in generic
    /// position.
    pub fn new(preset: ModulePreset, germ: &AnyGerm) -> Result<Self, ModuleError> {
        match preset {
            ModulePreset::Fake => {
                let l = germ.to_legendrian()?;
                Ok(Self::legendrian(&l))
            }
            _ => Self::plane(preset, &germ.to_plane()),
        }
    }

    fn plane(preset: ModulePreset, z: &PlaneGerm) -> Result<Self, ModuleError> {
        if preset.needs_generic_position() {
            for (i, b) in z.branches().iter().enumerate() {
                let class = position_classify(b).map_err(|e| match e {
                    GermError::TangentNotY0 { ord_x, ord_y, .. } => GermError::TangentNotY0 {
                        branch: i,
                        ord_x,
                        ord_y,
                    },
                    other => other,
                })?;
                if !class.generic_position {
                    return Err(ModuleError::NotGenericPosition {
                        branch: i,
                        ord_y: b.y().order(),
                        twice_ord_x: 2 * b.x().order().finite().unwrap_or(0),
                    });
                }
            }
        }
        let p = if preset == ModulePreset::Hat {
            let l = crate::germ::conormal(z)?;
            l.branches().iter().map(|b| Some(b.p().clone())).collect()
        } else {
            vec![None; z.branch_count()]
        };
        let branches = z
            .branches()
            .iter()
            .zip(p)
            .map(|(b, p)| BranchData {
                x: b.x().clone(),
                y: b.y().clone(),
                p,
            })
            .collect();
        Ok(ModuleGerm {
            preset,
            branches,
            multiplicities: z.branches().iter().map(|b| b.multiplicity()).collect(),
        })
    }

    fn legendrian(l: &LegendrianGerm) -> Self {
        ModuleGerm {
            preset: ModulePreset::Fake,
            branches: l
                .branches()
                .iter()
                .map(|b| BranchData {
                    x: b.x().clone(),
                    y: b.y().clone(),
                    p: Some(b.p().clone()),
                })
                .collect(),
            multiplicities: l.branches().iter().map(|b| b.multiplicity()).collect(),
        }
    }

    pub fn preset(&self) -> ModulePreset {
        self.preset
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Width of the pure-monomial window required for saturation.
    pub fn window(&self) -> u32 {
        self.multiplicities.iter().map(|m| 2 * m).max().unwrap_or(0)
    }

    /// Highest order up to which every generator is determined by the germ.
    pub fn precision(&self) -> u32 {
        self.branches
            .iter()
            .flat_map(|b| [Some(&b.x), Some(&b.y), b.p.as_ref()])
            .flatten()
            .map(TruncSeries::trunc_order)
            .min()
            .unwrap_or(0)
    }

    /// Slot-wise lower bounds on the `t`-order of numerator vectors.
    pub fn floors(&self) -> Vec<[u32; 2]> {
        self.multiplicities
            .iter()
            .map(|&m| match self.preset {
                ModulePreset::Plain | ModulePreset::Fake => [1, 1],
                ModulePreset::Equimultiple => [m, m],
                ModulePreset::Arrow | ModulePreset::Hat => [m, 2 * m],
            })
            .collect()
    }

    /// Denominator generators truncated at `n`.
    pub fn denominator_generators(&self, n: u32) -> Result<Vec<VectorJet>, ModuleError> {
        self.check_precision(n)?;
        Ok(Generators::new(self.preset, &self.branches, n)
            .all()
            .iter()
            .map(|d| VectorJet::from_dense(d, n))
            .collect())
    }

    /// The quotient at working order `n`, without any saturation check.
    ///
    /// Generators are added one `p`-level at a time; a generator whose terms
    /// all lie above the current saturation order is already in the span and
    /// is never evaluated.
    pub fn quotient_space(&self, n: u32) -> Result<QuotientSpace, ModuleError> {
        self.check_precision(n)?;
        let layout = Layout::new(&self.floors(), n);
        let mut gens = Generators::new(self.preset, &self.branches, n);
        let mut echelon = Echelon::new();
        for k in 0..=gens.top_level() {
            let above = if k == 0 {
                None
            } else {
                echelon.reduce();
                let s = saturation(&layout, &echelon);
                if s < k {
                    // p^k has order at least k
                    break;
                }
                Some(s)
            };
            let mut rows = gens
                .level(k, above)
                .iter()
                .map(|d| dense_row(&layout, d))
                .collect::<Result<Vec<_>, _>>()?;
            // short rows with high leading columns first keep pivot rows sparse
            rows.sort_by_key(|r| (std::cmp::Reverse(r.keys().next().copied()), r.len()));
            for row in rows {
                echelon.insert(row);
            }
        }
        echelon.reduce();
        Ok(QuotientSpace { layout, echelon })
    }

    fn check_precision(&self, n: u32) -> Result<(), ModuleError> {
        let available = self.precision();
        if n > available {
            return Err(ModuleError::InsufficientPrecision {
                needed: n,
                available,
            });
        }
        Ok(())
    }

    /// Starting order for the automatic search.
    fn initial_order(&self) -> u32 {
        let top = self
            .branches
            .iter()
            .map(|b| b.y.order().finite().or(b.x.order().finite()).unwrap_or(1))
            .max()
            .unwrap_or(1);
        2 * top + self.window()
    }
}

/// Floors per branch for `preset`.
pub fn numerator_floors(
    preset: ModulePreset,
    germ: &AnyGerm,
) -> Result<Vec<[u32; 2]>, ModuleError> {
    Ok(ModuleGerm::new(preset, germ)?.floors())
}

/// Denominator generators of `preset` on `germ`, truncated at `n`.
pub fn denominator_generators(
    preset: ModulePreset,
    germ: &AnyGerm,
    n: u32,
) -> Result<Vec<VectorJet>, ModuleError> {
    ModuleGerm::new(preset, germ)?.denominator_generators(n)
}

/// A computed module: the canonical monomial basis of the quotient.
#[derive(Clone, Debug)]
pub struct ModuleBasis {
    pub preset: ModulePreset,
    pub dimension: usize,
    /// Basis monomials, ordered by slot, then branch, then degree.
    pub monomials: Vec<Coord>,
    pub trunc_order: u32,
    pub saturation_order: u32,
    pub floors: Vec<[u32; 2]>,
    space: QuotientSpace,
}

impl ModuleBasis {
    /// The basis as vector jets truncated at the working order.
    pub fn basis(&self) -> Vec<VectorJet> {
        let r = self.floors.len();
        self.monomials
            .iter()
            .map(|c| VectorJet::monomial(r, *c, self.trunc_order))
            .collect()
    }

    pub fn space(&self) -> &QuotientSpace {
        &self.space
    }

    pub fn branch_count(&self) -> usize {
        self.floors.len()
    }
}

/// Reads off the canonical basis of `space`, checking that every monomial of
/// degree above `N - window` lies in the denominator span.
pub fn quotient_basis(
    preset: ModulePreset,
    space: QuotientSpace,
    window: u32,
) -> Result<ModuleBasis, ModuleError> {
    let n = space.trunc_order();
    let saturation = space.saturation_order();
    if n < saturation + window {
        return Err(ModuleError::NotSaturated {
            n,
            saturation,
            window,
        });
    }
    Ok(ModuleBasis {
        preset,
        dimension: space.dimension(),
        monomials: space.complement(),
        trunc_order: n,
        saturation_order: saturation,
        floors: space.floors().to_vec(),
        space,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModuleOptions {
    /// First working order tried; a heuristic from the germ when unset.
    pub start: Option<u32>,
    /// Largest working order tried.
    pub max_order: u32,
}

impl Default for ModuleOptions {
    fn default() -> Self {
        ModuleOptions {
            start: None,
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

/// Computes the module with default options.
pub fn compute_module(preset: ModulePreset, germ: &AnyGerm) -> Result<ModuleBasis, ModuleError> {
    compute_module_with(preset, germ, &ModuleOptions::default())
}

/// Searches for a working order `N` at which the quotient is saturated and
/// has the same dimension at `N`, `N + 1` and `N + 2`, doubling `N` until
/// the order cap or the precision of the germ is reached.
pub fn compute_module_with(
    preset: ModulePreset,
    germ: &AnyGerm,
    options: &ModuleOptions,
) -> Result<ModuleBasis, ModuleError> {
    let mg = ModuleGerm::new(preset, germ)?;
    let precision = mg.precision();
    let limit = options.max_order.min(precision);
    let window = mg.window();
    let too_small = |needed: u32| {
        if precision < options.max_order {
            ModuleError::InsufficientPrecision {
                needed,
                available: precision,
            }
        } else {
            ModuleError::Diverging {
                cap: options.max_order,
            }
        }
    };
    let floor_max = mg.floors().iter().flatten().copied().max().unwrap_or(1);
    let mut n = options
        .start
        .unwrap_or_else(|| mg.initial_order())
        .max(floor_max);
    if n + 2 > limit {
        if limit < floor_max + 2 {
            return Err(too_small(floor_max + 2));
        }
        n = limit - 2;
    }
    loop {
        if let Some(basis) = try_order(&mg, n, window)? {
            return Ok(basis);
        }
        if n + 2 >= limit {
            return Err(too_small(2 * n));
        }
        n = (2 * n).min(limit - 2);
    }
}

fn try_order(mg: &ModuleGerm, n: u32, window: u32) -> Result<Option<ModuleBasis>, ModuleError> {
    let top = mg.quotient_space(n + 2)?;
    let base = top.truncate(n);
    if n < base.saturation_order() + window {
        return Ok(None);
    }
    for k in 1..=2 {
        if top.truncate(n + k).dimension() != base.dimension() {
            return Ok(None);
        }
    }
    quotient_basis(mg.preset, base, window).map(Some)
}

/// The family `phi + sum_j s_j v_j` over the basis (a fake family for the
/// fake preset), before any conormal is taken.
pub fn emit_base_family(
    basis: &ModuleBasis,
    germ: &AnyGerm,
) -> Result<DeformationFamily, ModuleError> {
    let l = basis.monomials.len();
    let (kind, coords): (FamilyKind, Vec<[TruncSeries; 2]>) = match basis.preset {
        ModulePreset::Fake => {
            let psi = germ.to_legendrian()?;
            let c = psi
                .branches()
                .iter()
                .map(|b| [b.x().clone(), b.p().clone()])
                .collect();
            (FamilyKind::Fake, c)
        }
        _ => {
            let z = germ.to_plane();
            let c = z
                .branches()
                .iter()
                .map(|b| [b.x().clone(), b.y().clone()])
                .collect();
            (FamilyKind::Plane, c)
        }
    };
    if coords.len() != basis.branch_count() {
        return Err(ModuleError::BranchMismatch {
            expected: basis.branch_count(),
            found: coords.len(),
        });
    }
    let mut branches: Vec<Vec<TruncSeries>> = coords
        .iter()
        .map(|c| c.iter().map(|s| s.with_arity(l)).collect())
        .collect();
    for (j, m) in basis.monomials.iter().enumerate() {
        let target = &mut branches[m.branch][m.slot.index()];
        let term = TruncSeries::monomial(m.degree, MPoly::var(l, j), target.trunc_order());
        *target = &*target + &term;
    }
    Ok(DeformationFamily::new(kind, l, branches)?)
}

/// The deformation family carried by the basis: plane families for the plain,
/// equimultiple and arrow presets, and Legendrian families (through the
/// conormal, resp. fake conormal) for the hat and fake presets.
pub fn emit_family(basis: &ModuleBasis, germ: &AnyGerm) -> Result<DeformationFamily, ModuleError> {
    let base = emit_base_family(basis, germ)?;
    Ok(match basis.preset {
        ModulePreset::Hat => family_conormal(&base)?,
        ModulePreset::Fake => family_fake_conormal(&base)?,
        _ => base,
    })
}
