//! Musielak function families and their pointwise analytic primitives.
//!
//! A family bundles the two-point Young function `Φ(x, y, t)`, its
//! derivative `φ(x, y, t) = a(x, y, |t|) t`, the declared growth indices
//! of the ratio `t φ / Φ`, and doubling constants. Everything downstream
//! (modulars, operators, the solver) consumes families through this type.
//!
//! Built-in kinds cover the two special cases the framework generalizes —
//! constant/variable exponent powers and a log-perturbed Orlicz function —
//! plus fully custom evaluators with declared indices. Indices of custom
//! families are a declaration the code consistency-checks by sampling, not
//! a proof.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{dist, BoxDomain, Point};
use crate::quad1d::adaptive_simpson;
use crate::report::VerificationReport;
use crate::rng;

/// Largest argument accepted by evaluators; beyond this power families
/// overflow and results stop being meaningful.
pub const T_MAX: f64 = 1e12;

/// Variable exponent `p(x, y)` as a named built-in expression.
#[derive(Debug, Clone)]
pub enum ExponentField {
    /// `p(x, y) = a0 + coef · (x + y)`; symmetric by construction.
    Affine { a0: f64, coef: [f64; 2] },
    /// `p(x, y) = a0 + slope · |x - y|`; symmetric by construction.
    DistanceBased { a0: f64, slope: f64 },
}

impl ExponentField {
    pub fn eval(&self, x: Point, y: Point) -> f64 {
        match self {
            ExponentField::Affine { a0, coef } => {
                a0 + coef[0] * (x[0] + y[0]) + coef[1] * (x[1] + y[1])
            }
            ExponentField::DistanceBased { a0, slope } => a0 + slope * dist(x, y),
        }
    }

    /// Exact bounds of `p` over the closed box product.
    fn bounds(&self, domain: &BoxDomain) -> (f64, f64) {
        match self {
            ExponentField::Affine { a0, coef } => {
                let mut lo = *a0;
                let mut hi = *a0;
                for ax in 0..domain.dim() {
                    let (l, u) = (domain.lower()[ax], domain.upper()[ax]);
                    let (cl, cu) = if coef[ax] >= 0.0 {
                        (coef[ax] * 2.0 * l, coef[ax] * 2.0 * u)
                    } else {
                        (coef[ax] * 2.0 * u, coef[ax] * 2.0 * l)
                    };
                    lo += cl;
                    hi += cu;
                }
                (lo, hi)
            }
            ExponentField::DistanceBased { a0, slope } => {
                let d = domain.diameter();
                if *slope >= 0.0 {
                    (*a0, a0 + slope * d)
                } else {
                    (a0 + slope * d, *a0)
                }
            }
        }
    }

    /// Bounds of the diagonal trace `p(x, x)`.
    fn diagonal_bounds(&self, domain: &BoxDomain) -> (f64, f64) {
        match self {
            ExponentField::Affine { a0, coef } => {
                let mut lo = *a0;
                let mut hi = *a0;
                for ax in 0..domain.dim() {
                    let (l, u) = (domain.lower()[ax], domain.upper()[ax]);
                    let (cl, cu) = if coef[ax] >= 0.0 {
                        (coef[ax] * 2.0 * l, coef[ax] * 2.0 * u)
                    } else {
                        (coef[ax] * 2.0 * u, coef[ax] * 2.0 * l)
                    };
                    lo += cl;
                    hi += cu;
                }
                (lo, hi)
            }
            ExponentField::DistanceBased { a0, .. } => (*a0, *a0),
        }
    }
}

/// User-supplied evaluators with declared structure.
#[derive(Clone)]
pub struct CustomFamily {
    pub phi_big: Arc<dyn Fn(Point, Point, f64) -> f64 + Send + Sync>,
    pub phi_small: Arc<dyn Fn(Point, Point, f64) -> f64 + Send + Sync>,
    pub index_lo: f64,
    pub index_hi: f64,
    pub symmetric: bool,
    pub reflection_symmetric: bool,
}

impl std::fmt::Debug for CustomFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CustomFamily")
            .field("index_lo", &self.index_lo)
            .field("index_hi", &self.index_hi)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum FamilyKind {
    /// `Φ(t) = coeff · t^p`.
    PowerConstant { p: f64, coeff: f64 },
    /// `Φ(x, y, t) = t^{p(x,y)}`.
    PowerVariable { exponent: ExponentField },
    /// `Φ(t) = t^p ln(1 + t)`; growth indices (p, p + 1).
    OrliczLog { p: f64 },
    Custom(CustomFamily),
}

/// Evaluator bundle for one Musielak family over a fixed domain closure.
#[derive(Debug, Clone)]
pub struct MusielakFamily {
    kind: FamilyKind,
    domain: BoxDomain,
    /// Declared lower growth index of `t φ / Φ`.
    pub index_lo: f64,
    /// Declared upper growth index.
    pub index_hi: f64,
    /// Doubling constant: `Φ(x,y,2t) <= K1 Φ(x,y,t)`; `2^{index_hi}`.
    pub delta2_k1: f64,
    pub symmetric: bool,
    /// Whether `Φ` is invariant under mirror reflection of both points
    /// across a box face (needed by the reflection-extension bound).
    pub reflection_symmetric: bool,
}

impl MusielakFamily {
    pub fn power_constant(p: f64, coeff: f64, domain: &BoxDomain) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidFamily(format!("exponent p must lie in (1, inf), got {p}")));
        }
        if !(coeff > 0.0) {
            return Err(Error::InvalidFamily(format!("coefficient must be positive, got {coeff}")));
        }
        Ok(MusielakFamily {
            kind: FamilyKind::PowerConstant { p, coeff },
            domain: domain.clone(),
            index_lo: p,
            index_hi: p,
            delta2_k1: 2f64.powf(p),
            symmetric: true,
            reflection_symmetric: true,
        })
    }

    /// The p-growth family scaled so the density a is `|t|^{p-2}`,
    /// i.e. `Φ(t) = t^p / p`.
    pub fn power_mean(p: f64, domain: &BoxDomain) -> Result<Self> {
        Self::power_constant(p, 1.0 / p, domain)
    }

    pub fn power_variable(exponent: ExponentField, domain: &BoxDomain) -> Result<Self> {
        let (lo, hi) = exponent.bounds(domain);
        if !(lo > 1.0) || !hi.is_finite() {
            return Err(Error::InvalidFamily(format!(
                "variable exponent range [{lo}, {hi}] must lie in (1, inf)"
            )));
        }
        let refl = matches!(exponent, ExponentField::DistanceBased { .. });
        Ok(MusielakFamily {
            kind: FamilyKind::PowerVariable { exponent },
            domain: domain.clone(),
            index_lo: lo,
            index_hi: hi,
            delta2_k1: 2f64.powf(hi),
            symmetric: true,
            reflection_symmetric: refl,
        })
    }

    pub fn orlicz_log(p: f64, domain: &BoxDomain) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidFamily(format!("exponent p must lie in (1, inf), got {p}")));
        }
        Ok(MusielakFamily {
            kind: FamilyKind::OrliczLog { p },
            domain: domain.clone(),
            index_lo: p,
            index_hi: p + 1.0,
            delta2_k1: 2f64.powf(p + 1.0),
            symmetric: true,
            reflection_symmetric: true,
        })
    }

    pub fn custom(custom: CustomFamily, domain: &BoxDomain) -> Result<Self> {
        if !(custom.index_lo > 1.0) || !(custom.index_hi >= custom.index_lo) || !custom.index_hi.is_finite() {
            return Err(Error::InvalidFamily(format!(
                "declared indices ({}, {}) must satisfy 1 < lo <= hi < inf",
                custom.index_lo, custom.index_hi
            )));
        }
        Ok(MusielakFamily {
            index_lo: custom.index_lo,
            index_hi: custom.index_hi,
            delta2_k1: 2f64.powf(custom.index_hi),
            symmetric: custom.symmetric,
            reflection_symmetric: custom.reflection_symmetric,
            kind: FamilyKind::Custom(custom),
            domain: domain.clone(),
        })
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            FamilyKind::PowerConstant { .. } => "power-constant",
            FamilyKind::PowerVariable { .. } => "power-variable",
            FamilyKind::OrliczLog { .. } => "orlicz-log",
            FamilyKind::Custom(_) => "custom",
        }
    }

    fn check_point(&self, p: Point, name: &str) -> Result<()> {
        let slack = 1e-9 * self.domain.diameter().max(1.0);
        if !self.domain.contains(p, slack) {
            return Err(Error::Input(format!(
                "{name} = {p:?} lies outside the domain closure"
            )));
        }
        Ok(())
    }

    /// `Φ(x, y, t)` for `t >= 0` (callers pass |t|).
    pub fn eval_phi_big(&self, x: Point, y: Point, t: f64) -> Result<f64> {
        self.check_point(x, "x")?;
        self.check_point(y, "y")?;
        if !(t >= 0.0) {
            return Err(Error::Input(format!("t must be nonnegative, got {t}")));
        }
        if t > T_MAX {
            return Err(Error::Input(format!("t = {t} exceeds the evaluation cap {T_MAX}")));
        }
        Ok(self.phi_big_raw(x, y, t))
    }

    /// `φ(x, y, t)` with odd extension in `t`.
    pub fn eval_phi_small(&self, x: Point, y: Point, t: f64) -> Result<f64> {
        self.check_point(x, "x")?;
        self.check_point(y, "y")?;
        if t.abs() > T_MAX {
            return Err(Error::Input(format!("t = {t} exceeds the evaluation cap {T_MAX}")));
        }
        Ok(self.phi_small_raw(x, y, t))
    }

    /// Unchecked evaluation; the pair engines validate their node sets once
    /// up front instead of per call.
    #[inline]
    pub(crate) fn phi_big_raw(&self, x: Point, y: Point, t: f64) -> f64 {
        match &self.kind {
            FamilyKind::PowerConstant { p, coeff } => {
                if *p == 2.0 {
                    coeff * t * t
                } else {
                    coeff * t.powf(*p)
                }
            }
            FamilyKind::PowerVariable { exponent } => t.powf(exponent.eval(x, y)),
            FamilyKind::OrliczLog { p } => {
                if t == 0.0 {
                    0.0
                } else {
                    t.powf(*p) * t.ln_1p()
                }
            }
            FamilyKind::Custom(c) => (c.phi_big)(x, y, t),
        }
    }

    #[inline]
    pub(crate) fn phi_small_raw(&self, x: Point, y: Point, t: f64) -> f64 {
        let s = t.signum();
        let t = t.abs();
        let v = match &self.kind {
            FamilyKind::PowerConstant { p, coeff } => {
                if *p == 2.0 {
                    2.0 * coeff * t
                } else {
                    coeff * p * t.powf(p - 1.0)
                }
            }
            FamilyKind::PowerVariable { exponent } => {
                let p = exponent.eval(x, y);
                p * t.powf(p - 1.0)
            }
            FamilyKind::OrliczLog { p } => {
                if t == 0.0 {
                    0.0
                } else {
                    p * t.powf(p - 1.0) * t.ln_1p() + t.powf(*p) / (1.0 + t)
                }
            }
            FamilyKind::Custom(c) => (c.phi_small)(x, y, t),
        };
        if t == 0.0 {
            0.0
        } else {
            s * v
        }
    }

    /// `sup_{(x,y)} Φ(x, y, 1)` — the fractional boundedness constant.
    pub fn sup_phi_at_one(&self) -> f64 {
        match &self.kind {
            FamilyKind::PowerConstant { coeff, .. } => *coeff,
            FamilyKind::PowerVariable { .. } => 1.0,
            FamilyKind::OrliczLog { .. } => std::f64::consts::LN_2,
            FamilyKind::Custom(_) => {
                let mut rng = rng::seeded(0x5eed);
                let mut sup = 0.0_f64;
                for _ in 0..512 {
                    let x = sample_point(&self.domain, &mut rng);
                    let y = sample_point(&self.domain, &mut rng);
                    sup = sup.max(self.phi_big_raw(x, y, 1.0));
                }
                sup
            }
        }
    }

    /// Generalized inverse `φ̄(x, y, u) = sup{ s : φ(x, y, s) <= u }`,
    /// by monotone bracketing and bisection.
    pub fn phi_small_inverse(&self, x: Point, y: Point, u: f64) -> Result<f64> {
        if u < 0.0 {
            return Err(Error::Input(format!("inverse argument must be nonnegative, got {u}")));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        let mut hi = 1.0_f64;
        let mut prev = self.phi_small_raw(x, y, hi);
        let mut grow = 0;
        while prev < u {
            hi *= 2.0;
            grow += 1;
            if hi > T_MAX || grow > 200 {
                return Err(Error::Divergence(format!(
                    "derivative never reaches {u} below the evaluation cap"
                )));
            }
            let cur = self.phi_small_raw(x, y, hi);
            if cur < prev * (1.0 - 1e-9) {
                return Err(Error::InvalidFamily(
                    "derivative is not monotone increasing".into(),
                ));
            }
            prev = cur;
        }
        let mut lo = 0.0_f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.phi_small_raw(x, y, mid) <= u {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi.max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Conjugate function `Φ̄(x, y, t) = ∫_0^t φ̄(x, y, τ) dτ`.
    ///
    /// Power kinds use the Legendre closed form; other kinds invert the
    /// derivative numerically and integrate with adaptive Simpson
    /// (absolute tolerance 1e-10).
    pub fn conjugate_phi(&self, x: Point, y: Point, t: f64) -> Result<f64> {
        self.check_point(x, "x")?;
        self.check_point(y, "y")?;
        if !(t >= 0.0) {
            return Err(Error::Input(format!("t must be nonnegative, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            FamilyKind::PowerConstant { p, coeff } => Ok(power_conjugate(*p, *coeff, t)),
            FamilyKind::PowerVariable { exponent } => {
                Ok(power_conjugate(exponent.eval(x, y), 1.0, t))
            }
            _ => adaptive_simpson(
                |tau| self.phi_small_inverse(x, y, tau).unwrap_or(f64::NAN),
                0.0,
                t,
                1e-10,
            ),
        }
    }

    /// Diagonal view `Φ̂_x(t) = Φ(x, x, t)`.
    pub fn hat(&self) -> HatFamily {
        let (lo, hi) = match &self.kind {
            FamilyKind::PowerVariable { exponent } => exponent.diagonal_bounds(&self.domain),
            _ => (self.index_lo, self.index_hi),
        };
        HatFamily {
            fam: self.clone(),
            index_lo: lo,
            index_hi: hi,
            delta2_k2: 2f64.powf(hi),
        }
    }
}

/// Conjugate of `c t^p`: `t^{p'} / (p' (c p)^{p'-1})` with `p' = p/(p-1)`.
fn power_conjugate(p: f64, coeff: f64, t: f64) -> f64 {
    let pc = p / (p - 1.0);
    t.powf(pc) / (pc * (coeff * p).powf(pc - 1.0))
}

/// Diagonal restriction of a family: the base Musielak function of the
/// Lebesgue-type space.
#[derive(Debug, Clone)]
pub struct HatFamily {
    fam: MusielakFamily,
    pub index_lo: f64,
    pub index_hi: f64,
    pub delta2_k2: f64,
}

impl HatFamily {
    pub fn family(&self) -> &MusielakFamily {
        &self.fam
    }

    pub fn phi_big(&self, x: Point, t: f64) -> Result<f64> {
        self.fam.eval_phi_big(x, x, t)
    }

    pub fn phi_small(&self, x: Point, t: f64) -> Result<f64> {
        self.fam.eval_phi_small(x, x, t)
    }

    #[inline]
    pub(crate) fn phi_big_raw(&self, x: Point, t: f64) -> f64 {
        self.fam.phi_big_raw(x, x, t)
    }

    pub fn conjugate(&self, x: Point, t: f64) -> Result<f64> {
        self.fam.conjugate_phi(x, x, t)
    }

    /// Whether `Φ̂_x` actually depends on `x`.
    pub fn is_x_independent(&self) -> bool {
        match &self.fam.kind {
            FamilyKind::PowerConstant { .. } | FamilyKind::OrliczLog { .. } => true,
            FamilyKind::PowerVariable { exponent } => {
                let (lo, hi) = exponent.diagonal_bounds(&self.fam.domain);
                (hi - lo).abs() < 1e-15
            }
            FamilyKind::Custom(_) => false,
        }
    }

    /// `inf_x Φ̂_x(1)`, the constant behind the polynomial lower bound.
    pub fn inf_phi_at_one(&self) -> f64 {
        match &self.fam.kind {
            FamilyKind::PowerConstant { coeff, .. } => *coeff,
            FamilyKind::PowerVariable { .. } => 1.0,
            FamilyKind::OrliczLog { .. } => std::f64::consts::LN_2,
            FamilyKind::Custom(_) => {
                let mut rng = rng::seeded(0x5eed);
                let mut inf = f64::INFINITY;
                for _ in 0..512 {
                    let x = sample_point(&self.fam.domain, &mut rng);
                    inf = inf.min(self.phi_big_raw(x, 1.0));
                }
                inf
            }
        }
    }

    /// Inverse of `Φ̂_x` in `t`, by bisection with geometric bracketing.
    pub fn phi_inverse(&self, x: Point, value: f64) -> Result<f64> {
        if value < 0.0 {
            return Err(Error::Input(format!("inverse argument must be nonnegative, got {value}")));
        }
        if value == 0.0 {
            return Ok(0.0);
        }
        match &self.fam.kind {
            FamilyKind::PowerConstant { p, coeff } => Ok((value / coeff).powf(1.0 / p)),
            FamilyKind::PowerVariable { exponent } => {
                let p = exponent.eval(x, x);
                Ok(value.powf(1.0 / p))
            }
            _ => {
                let mut hi = 1.0_f64;
                let mut grow = 0;
                while self.phi_big_raw(x, hi) < value {
                    hi *= 2.0;
                    grow += 1;
                    if hi > T_MAX || grow > 200 {
                        return Err(Error::Divergence(
                            "inverse bracket escaped the evaluation cap".into(),
                        ));
                    }
                }
                let mut lo = 0.0_f64;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.phi_big_raw(x, mid) <= value {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-15 * hi.max(1e-300) {
                        break;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }
}

/// Bulk evaluator for the conjugate of the diagonal family.
///
/// Power kinds go through the closed form. Other x-independent kinds are
/// tabulated once on a log grid (log-log linear interpolation; relative
/// error well below the 1e-6 suite tolerances). x-dependent custom kinds
/// fall back to the honest per-call path.
pub struct HatConjugate {
    hat: HatFamily,
    table: Option<ConjugateTable>,
}

struct ConjugateTable {
    log_lo: f64,
    step: f64,
    log_values: Vec<f64>,
}

const TABLE_POINTS: usize = 16384;
const TABLE_LO: f64 = 1e-9;
const TABLE_HI: f64 = 1e9;

impl HatConjugate {
    pub fn new(hat: &HatFamily) -> Result<Self> {
        let needs_table = matches!(
            hat.family().kind,
            FamilyKind::OrliczLog { .. } | FamilyKind::Custom(_)
        ) && hat.is_x_independent()
            || matches!(hat.family().kind, FamilyKind::OrliczLog { .. });
        let table = if needs_table {
            let x = hat.family().domain.node_coord(0);
            let log_lo = TABLE_LO.ln();
            let log_hi = TABLE_HI.ln();
            let step = (log_hi - log_lo) / (TABLE_POINTS - 1) as f64;
            let mut log_values = Vec::with_capacity(TABLE_POINTS);
            for i in 0..TABLE_POINTS {
                let t = (log_lo + i as f64 * step).exp();
                let v = hat.conjugate(x, t)?;
                log_values.push(v.max(1e-300).ln());
            }
            Some(ConjugateTable {
                log_lo,
                step,
                log_values,
            })
        } else {
            None
        };
        Ok(HatConjugate {
            hat: hat.clone(),
            table,
        })
    }

    pub fn eval(&self, x: Point, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        if let Some(table) = &self.table {
            if (TABLE_LO..=TABLE_HI).contains(&t) {
                let pos = (t.ln() - table.log_lo) / table.step;
                let i = (pos.floor() as usize).min(TABLE_POINTS - 2);
                let frac = pos - i as f64;
                let lv = table.log_values[i] * (1.0 - frac) + table.log_values[i + 1] * frac;
                return Ok(lv.exp());
            }
        }
        self.hat.conjugate(x, t)
    }
}

pub fn sample_point(domain: &BoxDomain, rng: &mut ChaCha8Rng) -> Point {
    let mut p = [0.0; 2];
    for ax in 0..domain.dim() {
        p[ax] = rng::uniform(rng, domain.lower()[ax], domain.upper()[ax]);
    }
    p
}

/// Sampled extrema of the growth ratio `t φ(x,y,t) / Φ(x,y,t)` over a
/// log-spaced t grid and random point pairs. For declared families the
/// sampled interval must sit inside `[index_lo, index_hi]` up to 1e-9.
pub fn estimate_indices(
    fam: &MusielakFamily,
    sample_count: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if sample_count < 1 {
        return Err(Error::Input("sample_count must be at least 1".into()));
    }
    let mut rng = rng::seeded(seed);
    let t_grid: Vec<f64> = (0..200)
        .map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / 199.0))
        .collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..sample_count {
        let x = sample_point(&fam.domain, &mut rng);
        let y = sample_point(&fam.domain, &mut rng);
        for &t in &t_grid {
            let big = fam.phi_big_raw(x, y, t);
            if !(big > 0.0) {
                return Err(Error::InvalidFamily(format!(
                    "Φ vanishes at t = {t} > 0"
                )));
            }
            let ratio = t * fam.phi_small_raw(x, y, t) / big;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    Ok((lo, hi))
}

/// Randomized check of the four scaling inequalities that quantify
/// (Φ1)-growth: for σ > 1, `σ^{φ⁻} Φ(t) <= Φ(σ t) <= σ^{φ⁺} Φ(t)`, and the
/// mirror pair for σ in (0, 1).
pub fn check_growth_lemma(fam: &MusielakFamily, samples: usize, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new("growth");
    let tol = 1e-6;
    let mut rng = rng::seeded(seed);
    for _ in 0..samples {
        let x = sample_point(&fam.domain, &mut rng);
        let y = sample_point(&fam.domain, &mut rng);
        let t = rng::log_uniform(&mut rng, 1e-4, 1e4);
        let up = rng::log_uniform(&mut rng, 1.0 + 1e-6, 1e3);
        let down = rng::log_uniform(&mut rng, 1e-3, 1.0 - 1e-6);
        let base = fam.phi_big_raw(x, y, t);

        // σ > 1: Φ(σt) >= σ^{φ-} Φ(t) and Φ(σt) <= σ^{φ+} Φ(t)
        let scaled_up = fam.phi_big_raw(x, y, up * t);
        report.record(up.powf(fam.index_lo) * base, scaled_up, tol);
        report.record(scaled_up, up.powf(fam.index_hi) * base, tol);

        // σ in (0,1): Φ(σt) >= σ^{φ+} Φ(t) and Φ(t) <= σ^{φ-} Φ(t/σ)
        let scaled_down = fam.phi_big_raw(x, y, down * t);
        report.record(down.powf(fam.index_hi) * base, scaled_down, tol);
        report.record(base, down.powf(fam.index_lo) * fam.phi_big_raw(x, y, t / down), tol);
    }
    report.set_constant("K1", fam.delta2_k1);
    report.set_constant("index_lo", fam.index_lo);
    report.set_constant("index_hi", fam.index_hi);
    report
}

/// Randomized check of the conjugate bound `Φ̄(φ(t)) <= φ⁺ Φ(t)`.
pub fn check_conjugate_lemma(
    fam: &MusielakFamily,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("conjugate");
    let tol = 1e-6;
    let mut rng = rng::seeded(seed);
    for _ in 0..samples {
        let x = sample_point(&fam.domain, &mut rng);
        let y = sample_point(&fam.domain, &mut rng);
        let t = rng::log_uniform(&mut rng, 1e-3, 1e3);
        let lhs = fam.conjugate_phi(x, y, fam.phi_small_raw(x, y, t))?;
        let rhs = fam.index_hi * fam.phi_big_raw(x, y, t);
        report.record(lhs, rhs, tol);
    }
    report.set_constant("index_hi", fam.index_hi);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_domain() -> BoxDomain {
        BoxDomain::new_1d(0.0, 1.0, 33).unwrap()
    }

    #[test]
    fn power_family_closed_forms() {
        let dom = unit_domain();
        let fam = MusielakFamily::power_constant(2.0, 1.0, &dom).unwrap();
        let x = [0.2, 0.0];
        let y = [0.8, 0.0];
        assert!((fam.eval_phi_big(x, y, 3.0).unwrap() - 9.0).abs() < 1e-14);
        assert_eq!(fam.eval_phi_big(x, y, 0.0).unwrap(), 0.0);
        assert!((fam.eval_phi_small(x, y, 3.0).unwrap() - 6.0).abs() < 1e-14);
        assert_eq!(fam.eval_phi_small(x, y, 0.0).unwrap(), 0.0);
        // odd extension
        assert!((fam.eval_phi_small(x, y, -3.0).unwrap() + 6.0).abs() < 1e-14);
    }

    #[test]
    fn variable_exponent_evaluates_directly() {
        let dom = unit_domain();
        let field = ExponentField::DistanceBased { a0: 2.0, slope: 1.0 };
        let fam = MusielakFamily::power_variable(field, &dom).unwrap();
        // p(0, 1) = 3, so Φ(0, 1, 2) = 2^3 = 8.
        let v = fam.eval_phi_big([0.0, 0.0], [1.0, 0.0], 2.0).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
        assert!((fam.index_lo - 2.0).abs() < 1e-14);
        assert!((fam.index_hi - 3.0).abs() < 1e-14);
    }

    #[test]
    fn evaluation_domain_and_sign_guards() {
        let dom = unit_domain();
        let fam = MusielakFamily::power_constant(2.0, 1.0, &dom).unwrap();
        assert!(fam.eval_phi_big([2.0, 0.0], [0.5, 0.0], 1.0).is_err());
        assert!(fam.eval_phi_big([0.5, 0.0], [0.5, 0.0], -1.0).is_err());
        assert!(fam.eval_phi_big([0.5, 0.0], [0.5, 0.0], 2e12).is_err());
    }

    #[test]
    fn custom_derivative_matches_finite_difference() {
        let dom = unit_domain();
        let custom = CustomFamily {
            phi_big: Arc::new(|_, _, t: f64| t * t / 2.0 + t.powi(4) / 4.0),
            phi_small: Arc::new(|_, _, t: f64| t + t.powi(3)),
            index_lo: 2.0,
            index_hi: 4.0,
            symmetric: true,
            reflection_symmetric: true,
        };
        let fam = MusielakFamily::custom(custom, &dom).unwrap();
        let (x, y) = ([0.3, 0.0], [0.7, 0.0]);
        let t = 1.5;
        let h = 1e-5;
        let fd = (fam.eval_phi_big(x, y, t + h).unwrap() - fam.eval_phi_big(x, y, t - h).unwrap())
            / (2.0 * h);
        let an = fam.eval_phi_small(x, y, t).unwrap();
        assert!((fd - an).abs() / an.abs() < 1e-6);
    }

    #[test]
    fn conjugate_of_half_square_is_self() {
        let dom = unit_domain();
        let fam = MusielakFamily::power_constant(2.0, 0.5, &dom).unwrap();
        let x = [0.5, 0.0];
        let v = fam.conjugate_phi(x, x, 1.0).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert_eq!(fam.conjugate_phi(x, x, 0.0).unwrap(), 0.0);
        // Conjugate bound spot value: Φ̄(φ(2)) = Φ̄(2) = 2 <= φ⁺ Φ(2) = 2·2 = 4.
        let lhs = fam.conjugate_phi(x, x, fam.eval_phi_small(x, x, 2.0).unwrap()).unwrap();
        assert!(lhs <= fam.index_hi * fam.eval_phi_big(x, x, 2.0).unwrap() + 1e-12);
    }

    #[test]
    fn numeric_conjugate_matches_closed_form() {
        let dom = unit_domain();
        // Force the numeric path through a custom copy of Φ(t) = t^3.
        let custom = CustomFamily {
            phi_big: Arc::new(|_, _, t: f64| t.powi(3)),
            phi_small: Arc::new(|_, _, t: f64| 3.0 * t * t),
            index_lo: 3.0,
            index_hi: 3.0,
            symmetric: true,
            reflection_symmetric: true,
        };
        let fam = MusielakFamily::custom(custom, &dom).unwrap();
        let x = [0.5, 0.0];
        for t in [0.3, 1.0, 4.0] {
            let numeric = fam.conjugate_phi(x, x, t).unwrap();
            let exact = power_conjugate(3.0, 1.0, t);
            assert!(
                (numeric - exact).abs() <= 1e-8 * exact.max(1.0),
                "t={t}: numeric {numeric} vs exact {exact}"
            );
        }
    }

    #[test]
    fn young_inequality_consistency() {
        let dom = unit_domain();
        let fam = MusielakFamily::orlicz_log(2.0, &dom).unwrap();
        let mut r = rng::seeded(11);
        for _ in 0..50 {
            let x = sample_point(&dom, &mut r);
            let y = sample_point(&dom, &mut r);
            let t = rng::log_uniform(&mut r, 1e-2, 1e2);
            let u = rng::log_uniform(&mut r, 1e-2, 1e2);
            let lhs = t * u;
            let rhs = fam.phi_big_raw(x, y, t) + fam.conjugate_phi(x, y, u).unwrap();
            assert!(lhs <= rhs + 1e-8 * rhs.max(1.0), "t={t} u={u}");
        }
    }

    #[test]
    fn index_estimates_bracket_declared_ranges() {
        let dom = unit_domain();
        let fam = MusielakFamily::power_constant(3.0, 1.0, &dom).unwrap();
        let (lo, hi) = estimate_indices(&fam, 8, 7).unwrap();
        assert!((lo - 3.0).abs() < 1e-9 && (hi - 3.0).abs() < 1e-9);

        let field = ExponentField::DistanceBased { a0: 2.0, slope: 2.0 };
        let fam = MusielakFamily::power_variable(field, &dom).unwrap();
        let (lo, hi) = estimate_indices(&fam, 64, 7).unwrap();
        assert!(lo >= 2.0 - 1e-9 && hi <= 4.0 + 1e-9);
        assert!(lo < 2.2 && hi > 3.5, "sampling should approach the range: ({lo}, {hi})");

        let fam = MusielakFamily::orlicz_log(2.0, &dom).unwrap();
        let (lo, hi) = estimate_indices(&fam, 8, 7).unwrap();
        assert!(lo >= 2.0 - 1e-9 && hi <= 3.0 + 1e-9, "got ({lo}, {hi})");
    }

    #[test]
    fn growth_lemma_has_no_violations() {
        let dom = unit_domain();
        for fam in [
            MusielakFamily::power_constant(2.0, 1.0, &dom).unwrap(),
            MusielakFamily::orlicz_log(2.0, &dom).unwrap(),
        ] {
            let report = check_growth_lemma(&fam, 2000, 42);
            assert!(report.passed(), "{}: {:?}", fam.kind_name(), report);
        }
    }

    #[test]
    fn growth_equality_edge_for_powers() {
        // Power families saturate the σ > 1 inequalities: Φ(3·1) = 3² Φ(1).
        let dom = unit_domain();
        let fam = MusielakFamily::power_constant(2.0, 1.0, &dom).unwrap();
        let x = [0.5, 0.0];
        let lhs = fam.phi_big_raw(x, x, 3.0);
        let rhs = 3f64.powf(2.0) * fam.phi_big_raw(x, x, 1.0);
        assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn convexity_by_midpoint_sampling() {
        let dom = unit_domain();
        let fam = MusielakFamily::orlicz_log(2.5, &dom).unwrap();
        let mut r = rng::seeded(3);
        for _ in 0..200 {
            let x = sample_point(&dom, &mut r);
            let y = sample_point(&dom, &mut r);
            let t1 = rng::log_uniform(&mut r, 1e-3, 1e3);
            let t2 = rng::log_uniform(&mut r, 1e-3, 1e3);
            let mid = fam.phi_big_raw(x, y, 0.5 * (t1 + t2));
            let avg = 0.5 * (fam.phi_big_raw(x, y, t1) + fam.phi_big_raw(x, y, t2));
            assert!(mid <= avg * (1.0 + 1e-12));
        }
    }

    #[test]
    fn hat_conjugate_table_matches_direct() {
        let dom = unit_domain();
        let fam = MusielakFamily::orlicz_log(2.0, &dom).unwrap();
        let hat = fam.hat();
        let bulk = HatConjugate::new(&hat).unwrap();
        let x = [0.5, 0.0];
        for t in [1e-4, 0.037, 1.0, 55.0, 2.0e6] {
            let a = bulk.eval(x, t).unwrap();
            let b = hat.conjugate(x, t).unwrap();
            assert!(
                (a - b).abs() <= 2e-6 * b.max(1e-12),
                "t={t}: table {a} vs direct {b}"
            );
        }
    }

    #[test]
    fn distance_exponent_hat_is_constant() {
        let dom = unit_domain();
        let field = ExponentField::DistanceBased { a0: 2.0, slope: 1.0 };
        let fam = MusielakFamily::power_variable(field, &dom).unwrap();
        let hat = fam.hat();
        assert!((hat.index_lo - 2.0).abs() < 1e-14);
        assert!((hat.index_hi - 2.0).abs() < 1e-14);
        assert!(hat.is_x_independent());
    }
}
