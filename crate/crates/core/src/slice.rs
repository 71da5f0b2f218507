//! Latitude-slice integrals, conical and hyperplane section functions, the
//! equator transform, and the chain of identities linking them at `z = 0`.
//!
//! For a pole `ξ` and `z = sin ψ ∈ (−1, 1)` the cone `C(ξ, z)` meets the unit
//! sphere in the same latitude sphere as the hyperplane `ξ⊥ + zξ`: a copy of
//! `S^{n-2}` of radius `cos ψ`. Hence
//!
//! ```text
//!     ∫_{S^{n-1} ∩ C(ξ,z)} f = cos^{n-2}ψ · ∫_{S^{n-2}} f(η, ψ) dη
//!     vol_{n-1}(K ∩ C(ξ,z))  = cos^{n-2}ψ · ∫_{S^{n-2}} ρ(η, ψ)^{n-1}/(n-1) dη
//! ```
//!
//! and differentiating at `z = 0` gives `∫_{S^{n-2}} ∂f/∂ψ (η, 0) dη`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fd::{central_ladder, FdOptions, Ladder};
use crate::field::{RadialField, ScalarField};
use crate::linalg;
use crate::roots::{bracketed_root, sign_changes, RootOptions};
use crate::sphere::{self, make_frame, Direction, EquatorFrame, EquatorQuadrature, MAX_DIM};
use crate::{Error, Result};

/// `ψ = arcsin z`, rejecting `|z| ≥ 1`.
pub fn latitude_of(z: f64) -> Result<f64> {
    if z > -1.0 && z < 1.0 {
        Ok(libm::asin(z))
    } else {
        Err(Error::HeightOutOfRange(z))
    }
}

fn check_dims(n: usize, frame: &EquatorFrame, rule: &EquatorQuadrature) -> Result<()> {
    for found in [frame.dim(), rule.dim()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    Ok(())
}

/// `∫_{S^{n-2}} f(η, ψ) dη`, without the `cos^{n-2}ψ` factor.
pub fn latitude_integral(f: &ScalarField, frame: &EquatorFrame, psi: f64, rule: &EquatorQuadrature) -> f64 {
    let n = frame.dim();
    let mut x = [0.0; MAX_DIM];
    rule.iter()
        .map(|(eta, w)| {
            frame.embed_into(eta, psi, &mut x);
            w * f.value(&x[..n])
        })
        .sum()
}

/// `∫_{S^{n-1} ∩ C(ξ,z)} f`, equivalently over `S^{n-1} ∩ (ξ⊥ + zξ)`.
pub fn slice_integral(f: &ScalarField, frame: &EquatorFrame, z: f64, rule: &EquatorQuadrature) -> Result<f64> {
    check_dims(f.dim(), frame, rule)?;
    let psi = latitude_of(z)?;
    let scale = linalg::powi(libm::cos(psi), f.dim() as i32 - 2);
    Ok(scale * latitude_integral(f, frame, psi, rule))
}

/// Conical section function `C_{K,ξ}(z) = vol_{n-1}(K ∩ C(ξ, z))`.
pub fn conical_section(k: &RadialField, frame: &EquatorFrame, z: f64, rule: &EquatorQuadrature) -> Result<f64> {
    slice_integral(&k.to_scalar_field(), frame, z, rule)
}

/// Hyperplane section `vol_{n-1}(K ∩ (ξ⊥ + zξ))`.
///
/// For each equator node the boundary of the section along the ray from the
/// foot point `zξ` in direction `η` is found by solving
/// `ρ(η, ψ) sin ψ = z`; the section radius there is `ρ(η, ψ*) cos ψ*`. The
/// section must be star-shaped about `zξ` (true for convex bodies): a meridian
/// with more than one crossing is an error.
pub fn hyperplane_section(
    k: &RadialField,
    frame: &EquatorFrame,
    z: f64,
    rule: &EquatorQuadrature,
    root: RootOptions,
) -> Result<f64> {
    let n = k.dim();
    check_dims(n, frame, rule)?;
    latitude_of(z)?;
    let power = n as i32 - 1;
    let mut x = [0.0; MAX_DIM];
    if z == 0.0 {
        return Ok(rule
            .iter()
            .map(|(eta, w)| {
                frame.embed_into(eta, 0.0, &mut x);
                w * linalg::powi(k.radius(&x[..n]), power)
            })
            .sum::<f64>()
            / power as f64);
    }

    let sign = z.signum();
    let height = z.abs();
    let ratio = height / k.rho_min();
    let hi = if ratio < 1.0 {
        (libm::asin(ratio) + 1e-3).min(FRAC_PI_2)
    } else {
        FRAC_PI_2
    };
    let mut total = 0.0;
    for (eta, w) in rule.iter() {
        let g = |psi: f64| {
            let mut y = [0.0; MAX_DIM];
            frame.embed_into(eta, sign * psi, &mut y);
            k.radius(&y[..n]) * libm::sin(psi) - height
        };
        if root.scan_points > 0 && sign_changes(g, 0.0, FRAC_PI_2, root.scan_points) > 1 {
            return Err(Error::RootBracketing {
                z,
                reason: "meridian crosses the boundary more than once",
            });
        }
        let psi = bracketed_root(g, 0.0, hi, root)
            .or_else(|| bracketed_root(g, 0.0, FRAC_PI_2, root))
            .ok_or(Error::RootBracketing {
                z,
                reason: "no boundary crossing above the foot point",
            })?;
        frame.embed_into(eta, sign * psi, &mut x);
        let r = k.radius(&x[..n]) * libm::cos(psi);
        total += w * linalg::powi(r, power);
    }
    Ok(total / power as f64)
}

/// Equator transform `A f (ξ) = ∫_{S^{n-1} ∩ ξ⊥} ∂f/∂ψ`, the derivative taken
/// along meridians towards the pole of `frame`.
pub fn equator_transform(f: &ScalarField, frame: &EquatorFrame, rule: &EquatorQuadrature) -> Result<f64> {
    check_dims(f.dim(), frame, rule)?;
    let n = f.dim();
    let pole = frame.pole().as_slice();
    let mut x = [0.0; MAX_DIM];
    let mut total = 0.0;
    for (eta, w) in rule.iter() {
        // At ψ = 0 the meridian tangent is the pole itself.
        frame.lift_into(eta, &mut x);
        total += w * f.derivative_along(&x[..n], pole);
    }
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::Derivative)
    }
}

/// Which section function a curve samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectionKind {
    Conical,
    Hyperplane,
    SliceIntegral,
}

impl SectionKind {
    pub fn name(self) -> &'static str {
        match self {
            SectionKind::Conical => "conical",
            SectionKind::Hyperplane => "hyperplane",
            SectionKind::SliceIntegral => "slice_integral",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "conical" => Some(SectionKind::Conical),
            "hyperplane" => Some(SectionKind::Hyperplane),
            "slice_integral" | "slice" => Some(SectionKind::SliceIntegral),
            _ => None,
        }
    }
}

/// A body or field together with the section function to evaluate.
#[derive(Debug, Clone, Copy)]
pub enum CurveSource<'a> {
    Conical(&'a RadialField),
    Hyperplane(&'a RadialField),
    SliceIntegral(&'a ScalarField),
}

impl CurveSource<'_> {
    pub fn kind(&self) -> SectionKind {
        match self {
            CurveSource::Conical(_) => SectionKind::Conical,
            CurveSource::Hyperplane(_) => SectionKind::Hyperplane,
            CurveSource::SliceIntegral(_) => SectionKind::SliceIntegral,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            CurveSource::Conical(k) | CurveSource::Hyperplane(k) => k.dim(),
            CurveSource::SliceIntegral(f) => f.dim(),
        }
    }

    /// Field whose equator transform is this curve's slope at `z = 0`.
    pub fn matching_field(&self) -> ScalarField {
        match self {
            CurveSource::Conical(k) => k.to_scalar_field(),
            CurveSource::Hyperplane(k) => k.hyperplane_field(),
            CurveSource::SliceIntegral(f) => (*f).clone(),
        }
    }

    pub fn evaluate(&self, frame: &EquatorFrame, z: f64, rule: &EquatorQuadrature, root: RootOptions) -> Result<f64> {
        match self {
            CurveSource::Conical(k) => conical_section(k, frame, z, rule),
            CurveSource::Hyperplane(k) => hyperplane_section(k, frame, z, rule, root),
            CurveSource::SliceIntegral(f) => slice_integral(f, frame, z, rule),
        }
    }
}

/// Settings for [`derivative_at_zero`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeOptions {
    pub fd: FdOptions,
    pub root: RootOptions,
    /// When set, the transform is evaluated in a second frame completed from
    /// this seed, so the two sides use different equator nodes.
    pub transform_seed: Option<u64>,
}

impl Default for DerivativeOptions {
    fn default() -> Self {
        Self {
            fd: FdOptions::default(),
            root: RootOptions::default(),
            transform_seed: Some(0x7f4a_7c15),
        }
    }
}

/// Slope of a section function at `z = 0` by finite differences, next to the
/// equator transform of the matching field.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeAtZero {
    pub xi: Direction,
    pub kind: SectionKind,
    pub fd_value: f64,
    pub transform_value: f64,
    pub fd_steps: Vec<(f64, f64)>,
    pub residual: f64,
    /// False when the Richardson extrapolants do not settle, which flags a
    /// direction where the section function may not be differentiable.
    pub ladder_monotone: bool,
}

impl DerivativeAtZero {
    /// Richardson limit recomputed from `fd_steps`.
    pub fn richardson_limit(&self) -> f64 {
        *Ladder::extrapolate(&self.fd_steps).last().unwrap_or(&f64::NAN)
    }

    pub fn recomputed_residual(&self) -> f64 {
        (self.richardson_limit() - self.transform_value).abs()
    }
}

pub fn derivative_at_zero(
    source: CurveSource<'_>,
    frame: &EquatorFrame,
    rule: &EquatorQuadrature,
    opts: DerivativeOptions,
) -> Result<DerivativeAtZero> {
    let ladder = central_ladder(|z| source.evaluate(frame, z, rule, opts.root), 0.0, opts.fd)?;
    let transform_frame = match opts.transform_seed {
        Some(seed) => make_frame(*frame.pole(), seed),
        None => frame.clone(),
    };
    let transform_value = equator_transform(&source.matching_field(), &transform_frame, rule)?;
    let fd_value = ladder.value();
    Ok(DerivativeAtZero {
        xi: *frame.pole(),
        kind: source.kind(),
        fd_value,
        transform_value,
        residual: (fd_value - transform_value).abs(),
        ladder_monotone: ladder.is_monotone(),
        fd_steps: ladder.steps,
    })
}

/// Samples of a section function over a grid of `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionCurve {
    pub xi: Direction,
    pub kind: SectionKind,
    pub zs: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn section_curve(
    source: CurveSource<'_>,
    frame: &EquatorFrame,
    zs: &[f64],
    rule: &EquatorQuadrature,
    root: RootOptions,
) -> Result<SectionCurve> {
    if let Some(z) = zs.iter().find(|z| !(**z > -1.0 && **z < 1.0)) {
        return Err(Error::HeightOutOfRange(*z));
    }
    if zs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("z grid must be strictly increasing".into()));
    }
    let values = zs
        .iter()
        .map(|&z| source.evaluate(frame, z, rule, root))
        .collect::<Result<Vec<_>>>()?;
    Ok(SectionCurve {
        xi: *frame.pole(),
        kind: source.kind(),
        zs: zs.to_vec(),
        values,
    })
}

/// Terms of the difference quotient of the slice integral at `z ≠ 0`:
///
/// ```text
///     [S(z) − S(0)] / z = ∫ [(f(η,ψ) − f(η,0)) / ψ]·[ψ / sin ψ] dη
///                       + ∫ f(η,ψ) dη · (cos^{n-2}ψ − 1) / sin ψ
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eq4Terms {
    pub z: f64,
    pub psi: f64,
    /// `[S(z) − S(0)] / z`
    pub quotient: f64,
    /// First summand; tends to the equator transform.
    pub main: f64,
    /// Second summand; `O(|ψ|)`.
    pub tail: f64,
    /// `vol(S^{n-2}) · sup|f| · (1 − cos^{n-2}ψ) / |sin ψ|`
    pub tail_bound: f64,
}

pub fn eq4_terms(f: &ScalarField, frame: &EquatorFrame, z: f64, rule: &EquatorQuadrature) -> Result<Eq4Terms> {
    if z == 0.0 {
        return Err(Error::InvalidParameter("difference quotient needs z != 0".into()));
    }
    check_dims(f.dim(), frame, rule)?;
    let n = f.dim();
    let psi = latitude_of(z)?;
    let s = libm::sin(psi);
    let cos_pow = linalg::powi(libm::cos(psi), n as i32 - 2);
    let at_zero = latitude_integral(f, frame, 0.0, rule);
    let at_psi = latitude_integral(f, frame, psi, rule);

    let mut x0 = [0.0; MAX_DIM];
    let mut x1 = [0.0; MAX_DIM];
    let main: f64 = rule
        .iter()
        .map(|(eta, w)| {
            frame.embed_into(eta, 0.0, &mut x0);
            frame.embed_into(eta, psi, &mut x1);
            w * ((f.value(&x1[..n]) - f.value(&x0[..n])) / psi) * (psi / s)
        })
        .sum();
    let tail = at_psi * (cos_pow - 1.0) / s;
    let sup = f.sup_bound().unwrap_or_else(|| f.probe_sup());
    let tail_bound = sphere::sphere_volume(n - 2) * sup * (1.0 - cos_pow) / s.abs();
    Ok(Eq4Terms {
        z,
        psi,
        quotient: (cos_pow * at_psi - at_zero) / z,
        main,
        tail,
        tail_bound,
    })
}

/// Sampled check of the dominating constant `c = L(f)·π/2` for the
/// difference quotients `|f(η,ψ) − f(η,0)| / |sin ψ|`, `0 < |ψ| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorantCheck {
    pub probes: usize,
    pub constant: f64,
    pub max_quotient: f64,
    pub violations: usize,
}

pub fn majorant_check(f: &ScalarField, probes: usize, seed: u64) -> Result<MajorantCheck> {
    let lipschitz = f
        .lipschitz_bound()
        .ok_or_else(|| Error::InvalidParameter("majorant check needs a Lipschitz bound".into()))?;
    let n = f.dim();
    let constant = lipschitz * PI / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_quotient: f64 = 0.0;
    let mut violations = 0;
    let mut x0 = [0.0; MAX_DIM];
    let mut x1 = [0.0; MAX_DIM];
    let mut frame = make_frame(sphere::random_direction(n, &mut rng), 0);
    for i in 0..probes {
        if i % 64 == 0 {
            frame = make_frame(sphere::random_direction(n, &mut rng), i as u64);
        }
        let eta = random_equator_point(n, &mut rng);
        let mut psi = 0.0;
        while psi == 0.0 {
            psi = rng.gen_range(-1.0..=1.0);
        }
        frame.embed_into(&eta[..n - 1], 0.0, &mut x0);
        frame.embed_into(&eta[..n - 1], psi, &mut x1);
        let q = (f.value(&x1[..n]) - f.value(&x0[..n])).abs() / libm::sin(psi).abs();
        max_quotient = max_quotient.max(q);
        if q > constant {
            violations += 1;
        }
    }
    Ok(MajorantCheck {
        probes,
        constant,
        max_quotient,
        violations,
    })
}

/// Uniform point of `S^{n-2}` in frame coordinates.
pub(crate) fn random_equator_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> [f64; MAX_DIM] {
    let mut eta = [0.0; MAX_DIM];
    if n == 2 {
        eta[0] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    } else {
        let d = sphere::random_direction(n - 1, rng);
        eta[..n - 1].copy_from_slice(d.as_slice());
    }
    eta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies;
    use crate::sphere::equator_rule;

    fn e3_frame() -> EquatorFrame {
        make_frame(Direction::axis(3, 2).unwrap(), 0)
    }

    #[test]
    fn constant_field_slices() {
        let f = ScalarField::constant(3, 0.5);
        let rule = equator_rule(3, 64).unwrap();
        let frame = make_frame(Direction::new(&[1.0, -2.0, 0.5]).unwrap(), 4);
        for z in [-0.9, -0.3, 0.0, 0.6] {
            let got = slice_integral(&f, &frame, z, &rule).unwrap();
            assert!((got - PI * libm::sqrt(1.0 - z * z)).abs() < 1e-13);
        }
    }

    #[test]
    fn planar_slice_is_two_point_sum() {
        let f = ScalarField::from_fn(2, |x: &[f64]| libm::exp(x[0]) + x[1]);
        let frame = make_frame(Direction::new(&[0.6, 0.8]).unwrap(), 0);
        let rule = equator_rule(2, 2).unwrap();
        let b = frame.basis()[0].as_slice();
        let expected = f.value(b) + f.value(&[-b[0], -b[1]]);
        assert!((slice_integral(&f, &frame, 0.0, &rule).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn height_field_slice() {
        // f = x₃ is constant (= z) on the latitude circle: z · 2π · √(1−z²).
        let f = ScalarField::linear(&[0.0, 0.0, 1.0]);
        let rule = equator_rule(3, 128).unwrap();
        let got = slice_integral(&f, &e3_frame(), 0.5, &rule).unwrap();
        assert!((got - PI * libm::sqrt(3.0) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn z_outside_open_interval_rejected() {
        let f = ScalarField::constant(3, 1.0);
        let rule = equator_rule(3, 8).unwrap();
        for z in [1.0, -1.0, 1.5, f64::NAN] {
            assert!(slice_integral(&f, &e3_frame(), z, &rule).is_err());
        }
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let f = ScalarField::constant(3, 1.0);
        let rule = equator_rule(4, 8).unwrap();
        assert!(matches!(
            slice_integral(&f, &e3_frame(), 0.0, &rule),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn conical_examples() {
        let rule3 = equator_rule(3, 512).unwrap();
        let ball = bodies::ball(3, 1.0).unwrap();
        let frame = make_frame(Direction::new(&[0.2, 0.3, -0.9]).unwrap(), 1);
        assert!((conical_section(&ball, &frame, 0.0, &rule3).unwrap() - PI).abs() < 1e-13);
        assert!((conical_section(&ball, &frame, 0.6, &rule3).unwrap() - 0.8 * PI).abs() < 1e-13);

        let disk = bodies::shifted_ball(1.0, &[0.5, 0.0]).unwrap();
        let rule2 = equator_rule(2, 2).unwrap();
        let f2 = make_frame(Direction::axis(2, 0).unwrap(), 0);
        let got = conical_section(&disk, &f2, 0.0, &rule2).unwrap();
        assert!((got - 2.0 * libm::sqrt(0.75)).abs() < 1e-15);
    }

    #[test]
    fn hyperplane_examples() {
        let rule3 = equator_rule(3, 256).unwrap();
        let ball = bodies::ball(3, 1.0).unwrap();
        let frame = make_frame(Direction::new(&[0.5, -0.5, 0.7]).unwrap(), 2);
        for z in [-0.5, 0.0, 0.3, 0.5, 0.9] {
            let got = hyperplane_section(&ball, &frame, z, &rule3, RootOptions::default()).unwrap();
            assert!((got - PI * (1.0 - z * z)).abs() < 1e-12, "z={z}");
        }

        let disk = bodies::shifted_ball(1.0, &[0.5, 0.0]).unwrap();
        let rule2 = equator_rule(2, 2).unwrap();
        let f2 = make_frame(Direction::axis(2, 0).unwrap(), 0);
        // Chord of |p − c| ≤ 1 on the line x₁ = z.
        for z in [-0.4, 0.2, 0.7] {
            let chord = 2.0 * libm::sqrt(1.0 - (z - 0.5) * (z - 0.5));
            let got = hyperplane_section(&disk, &f2, z, &rule2, RootOptions::default()).unwrap();
            assert!((got - chord).abs() < 1e-12, "z={z}: {got} vs {chord}");
        }
    }

    #[test]
    fn hyperplane_matches_conical_at_zero() {
        let k = bodies::ellipsoid(&[1.5, 1.0, 0.7]).unwrap();
        let rule = equator_rule(3, 128).unwrap();
        let frame = make_frame(Direction::new(&[0.3, 0.1, 0.4]).unwrap(), 0);
        let c = conical_section(&k, &frame, 0.0, &rule).unwrap();
        let h = hyperplane_section(&k, &frame, 0.0, &rule, RootOptions::default()).unwrap();
        assert!((c - h).abs() < 1e-10);
    }

    #[test]
    fn hyperplane_rejects_height_beyond_body() {
        let k = bodies::ball(3, 0.5).unwrap();
        let rule = equator_rule(3, 16).unwrap();
        let err = hyperplane_section(&k, &e3_frame(), 0.7, &rule, RootOptions::default());
        assert!(matches!(err, Err(Error::RootBracketing { .. })));
    }

    #[test]
    fn transform_of_linear_field() {
        let e = [0.3, -0.4, 0.5];
        let f = ScalarField::linear(&e);
        let rule = equator_rule(3, 64).unwrap();
        let xi = Direction::new(&[1.0, 1.0, -0.2]).unwrap();
        let frame = make_frame(xi, 9);
        let got = equator_transform(&f, &frame, &rule).unwrap();
        let expected = 2.0 * PI * crate::linalg::dot(xi.as_slice(), &e);
        assert!((got - expected).abs() < 1e-13);
        let fd = equator_transform(&f.without_derivative(), &frame, &rule).unwrap();
        assert!((fd - expected).abs() < 1e-9);
    }

    #[test]
    fn transform_flags_nonfinite_derivative() {
        let f = ScalarField::from_fns(3, |_: &[f64]| 0.0, |_: &[f64], _: &[f64]| f64::NAN);
        let rule = equator_rule(3, 8).unwrap();
        assert_eq!(equator_transform(&f, &e3_frame(), &rule), Err(Error::Derivative));
    }

    #[test]
    fn derivative_examples() {
        let rule = equator_rule(3, 512).unwrap();
        let ball = bodies::ball(3, 1.0).unwrap();
        let frame = make_frame(Direction::new(&[0.1, 0.9, 0.2]).unwrap(), 0);
        for src in [CurveSource::Conical(&ball), CurveSource::Hyperplane(&ball)] {
            let d = derivative_at_zero(src, &frame, &rule, DerivativeOptions::default()).unwrap();
            assert!(d.fd_value.abs() < 1e-8 && d.transform_value.abs() < 1e-12);
            assert!(d.residual < 1e-8);
        }

        let lin = ScalarField::linear(&[0.0, 0.0, 1.0]);
        let d = derivative_at_zero(CurveSource::SliceIntegral(&lin), &e3_frame(), &rule, DerivativeOptions::default())
            .unwrap();
        assert!((d.transform_value - 2.0 * PI).abs() < 1e-12);
        assert!((d.fd_value - 2.0 * PI).abs() < 1e-9);
        assert_eq!(d.fd_steps.len(), 4);
        assert!((d.recomputed_residual() - d.residual).abs() < 1e-15);
    }

    #[test]
    fn shifted_ball_conical_slope_matches_transform() {
        let k = bodies::shifted_ball(1.0, &[0.1, 0.0, 0.0]).unwrap();
        let rule = equator_rule(3, 512).unwrap();
        for xi in sphere::fibonacci_directions(12) {
            let frame = make_frame(xi, 3);
            let d = derivative_at_zero(CurveSource::Conical(&k), &frame, &rule, DerivativeOptions::default()).unwrap();
            assert!(d.residual < 1e-6, "{d:?}");
        }
    }

    #[test]
    fn hyperplane_slope_uses_matching_field() {
        // Planar shifted disk, ξ = e₁: the chord 2√(1 − (z − ½)²) has slope
        // 2·½/√¾ at 0, which is the transform of ln ρ, not of ρ.
        let disk = bodies::shifted_ball(1.0, &[0.5, 0.0]).unwrap();
        let rule = equator_rule(2, 2).unwrap();
        let frame = make_frame(Direction::axis(2, 0).unwrap(), 0);
        let d = derivative_at_zero(CurveSource::Hyperplane(&disk), &frame, &rule, DerivativeOptions::default()).unwrap();
        let slope = 1.0 / libm::sqrt(0.75);
        assert!((d.fd_value - slope).abs() < 1e-9);
        assert!((d.transform_value - slope).abs() < 1e-12);
        let conical_transform = equator_transform(&disk.to_scalar_field(), &frame, &rule).unwrap();
        assert!((conical_transform - 1.0).abs() < 1e-12);
    }

    #[test]
    fn section_curve_examples() {
        let rule = equator_rule(3, 256).unwrap();
        let ball = bodies::ball(3, 1.0).unwrap();
        let frame = e3_frame();
        let c = section_curve(CurveSource::Conical(&ball), &frame, &[-0.5, 0.0, 0.5], &rule, RootOptions::default())
            .unwrap();
        let edge = PI * libm::sqrt(0.75);
        for (v, e) in c.values.iter().zip([edge, PI, edge]) {
            assert!((v - e).abs() < 1e-13);
        }
        let h = section_curve(CurveSource::Hyperplane(&ball), &frame, &[0.0, 0.5], &rule, RootOptions::default())
            .unwrap();
        assert!((h.values[0] - PI).abs() < 1e-13 && (h.values[1] - 0.75 * PI).abs() < 1e-12);

        assert!(section_curve(CurveSource::Conical(&ball), &frame, &[0.5, 0.0], &rule, RootOptions::default()).is_err());
        assert!(section_curve(CurveSource::Conical(&ball), &frame, &[0.0, 1.0], &rule, RootOptions::default()).is_err());
    }

    #[test]
    fn eq4_terms_add_up() {
        let k = bodies::shifted_ball(1.0, &[0.2, -0.1, 0.05]).unwrap();
        let f = k.to_scalar_field();
        let rule = equator_rule(3, 256).unwrap();
        let frame = make_frame(Direction::new(&[0.4, 0.4, 0.8]).unwrap(), 0);
        let limit = equator_transform(&f, &frame, &rule).unwrap();
        let mut prev_gap = f64::INFINITY;
        for z in [0.1, 0.01, 0.001] {
            let t = eq4_terms(&f, &frame, z, &rule).unwrap();
            assert!((t.quotient - (t.main + t.tail)).abs() < 1e-10);
            assert!(t.tail.abs() <= t.tail_bound);
            let gap = (t.quotient - limit).abs();
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        assert!(eq4_terms(&f, &frame, 0.0, &rule).is_err());
    }

    #[test]
    fn majorant_holds_for_ellipsoid() {
        let k = bodies::ellipsoid(&[1.4, 1.0, 0.8]).unwrap();
        let check = majorant_check(&k.to_scalar_field(), 5_000, 1).unwrap();
        assert_eq!(check.violations, 0);
        assert!(check.max_quotient > 0.0 && check.max_quotient < check.constant);
        assert!(majorant_check(&ScalarField::from_fn(3, |_: &[f64]| 0.0), 10, 0).is_err());
    }
}
