//! Reference metrics: Taub-NUT and Eguchi-Hanson in cohomogeneity-one
//! form, the constant-curvature warped products over SU(2), and the
//! closure conditions of the hyper-Kähler 2-forms over H3 and E(2).
//!
//! The radial metrics are parameterized by `r`; with `dt = h dr`, time
//! derivatives are `f' / h` and `f'' / h^2 - f' h' / h^3` (primes are
//! `d/dr`), all computed analytically.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{check_nonzero, ricci_rhs, Direction, FlowConfig, FlowJet, FlowState};
use crate::lie::{Group, SignPattern};
use crate::oracle::{oracle_riemann, FrameMetricJet};
use crate::scalar::{int, lit, max_abs, to_f64, Field, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialMetric {
    TaubNut,
    EguchiHanson,
}

impl SpecialMetric {
    /// Bracket constants of the frame in which the metric is diagonal.
    ///
    /// Taub-NUT lives on the Milnor frame of SU(2). Eguchi-Hanson, with
    /// `a = b = r` and `c -> r`, is asymptotic to flat space over the
    /// round sphere of radius `r`, whose coframe satisfies
    /// `d th^i = 2 th^j ^ th^k`; in the Milnor frame it is not Ricci-flat.
    pub fn frame_brackets<T: Field>(self) -> [T; 3] {
        match self {
            SpecialMetric::TaubNut => Group::SU2.structure(),
            SpecialMetric::EguchiHanson => [int(-2); 3],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SpecialMetric::TaubNut => "taub-nut",
            SpecialMetric::EguchiHanson => "eguchi-hanson",
        }
    }
}

impl std::str::FromStr for SpecialMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', ' '], "-").as_str() {
            "taub-nut" | "taubnut" => Ok(SpecialMetric::TaubNut),
            "eguchi-hanson" | "eguchihanson" => Ok(SpecialMetric::EguchiHanson),
            _ => Err(Error::Domain(format!("unknown special metric `{s}`"))),
        }
    }
}

/// Coefficients of a radial metric at one radius, with `t`-derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpecialJet<T> {
    pub metric: SpecialMetric,
    pub m: T,
    pub r: T,
    /// `dt/dr`.
    pub h: T,
    /// Proper time `t(r)` with `t(m) = 0`, where it has a closed form.
    pub t: Option<T>,
    pub jet: FlowJet<T>,
}

impl<T: Real> SpecialJet<T> {
    pub fn frame_metric(&self) -> FrameMetricJet<T> {
        FrameMetricJet::new(
            self.metric.frame_brackets(),
            SignPattern::ALL_PLUS,
            self.jet.state.coeffs(),
            self.jet.d1,
            self.jet.d2,
        )
    }

    /// Largest entry of the oracle Ricci tensor.
    pub fn ricci_max(&self) -> Result<f64> {
        let ric = oracle_riemann(&self.frame_metric())?.ricci();
        Ok(max_abs(ric.into_iter().flatten()))
    }
}

fn check_radius<T: Real>(m: T, r: T) -> Result<()> {
    if !(m > T::zero()) || !m.is_finite() {
        return Err(Error::Domain(format!("m must be positive, got {m}")));
    }
    if !(r > m) || !r.is_finite() {
        return Err(Error::Domain(format!("r must exceed m = {m}, got {r}")));
    }
    Ok(())
}

/// Turns `r`-derivatives `(f, f', f'')` into a jet in `t`, given `h, h'`.
fn radial_jet<T: Real>(t: T, f: [(T, T, T); 3], h: T, dh: T) -> FlowJet<T> {
    let state = FlowState::from_coeffs(t, f.map(|x| x.0));
    let d1 = f.map(|(_, d, _)| d / h);
    let d2 = f.map(|(_, d, dd)| dd / (h * h) - d * dh / (h * h * h));
    FlowJet::new(state, d1, d2)
}

/// Taub-NUT: `a = b = sqrt(r^2 - m^2)`, `c = 2m sqrt((r - m)/(r + m))`,
/// `h = sqrt((r + m)/(r - m))`.
pub fn taub_nut_jet<T: Real>(m: T, r: T) -> Result<SpecialJet<T>> {
    check_radius(m, r)?;
    let (one, two) = (T::one(), lit::<T>(2.0));
    let a = (r * r - m * m).sqrt();
    let da = r / a;
    let dda = -m * m / (a * a * a);
    let u = (r - m) / (r + m);
    let du = two * m / ((r + m) * (r + m));
    let ddu = -lit::<T>(4.0) * m / ((r + m) * (r + m) * (r + m));
    let su = u.sqrt();
    let c = two * m * su;
    let dc = m * du / su;
    let ddc = m * (-du * du / (two * u * su) + ddu / su);
    let h = one / su;
    let dh = -du / (two * u * su);
    let t = a + m * (r / m).acosh();
    Ok(SpecialJet {
        metric: SpecialMetric::TaubNut,
        m,
        r,
        h,
        t: Some(t),
        jet: radial_jet(t, [(a, da, dda), (a, da, dda), (c, dc, ddc)], h, dh),
    })
}

/// Eguchi-Hanson: `a = b = r`, `c = r sqrt(1 - (m/r)^4)`,
/// `h = (1 - (m/r)^4)^(-1/2)`.
pub fn eguchi_hanson_jet<T: Real>(m: T, r: T) -> Result<SpecialJet<T>> {
    check_radius(m, r)?;
    let (zero, one, two) = (T::zero(), T::one(), lit::<T>(2.0));
    let m4 = m.powi(4);
    let w = r * r - m4 / (r * r);
    let dw = two * r + two * m4 / r.powi(3);
    let ddw = two - lit::<T>(6.0) * m4 / r.powi(4);
    let c = w.sqrt();
    let dc = dw / (two * c);
    let ddc = ddw / (two * c) - dw * dw / (lit::<T>(4.0) * w * c);
    let v = one - m4 / r.powi(4);
    let dv = lit::<T>(4.0) * m4 / r.powi(5);
    let h = one / v.sqrt();
    let dh = -dv / (two * v * v.sqrt());
    Ok(SpecialJet {
        metric: SpecialMetric::EguchiHanson,
        m,
        r,
        h,
        t: None,
        jet: radial_jet(zero, [(r, one, zero), (r, one, zero), (c, dc, ddc)], h, dh),
    })
}

/// `m * 100^(i/n)` for `i = 1..=n`: log-spaced radii in `(m, 100 m]`.
pub fn radius_grid<T: Real>(m: T, n: usize) -> Vec<T> {
    let n_t = T::from_usize(n.max(1)).unwrap();
    (1..=n).map(|i| m * lit::<T>(100.0).powf(T::from_usize(i).unwrap() / n_t)).collect()
}

/// `da/dt = offset + (flow of SU(2) with this direction and scale)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Convention<T> {
    pub direction: Direction,
    pub scale: T,
    pub offset: T,
}

impl<T: Real> Convention<T> {
    fn rhs(&self, s: &FlowState<T>) -> Result<[T; 3]> {
        let cfg = FlowConfig::new(Group::SU2).with_direction(self.direction).with_scale(self.scale);
        Ok(ricci_rhs(&cfg, s)?.map(|x| x + self.offset))
    }

    /// `ds/dt - rhs`.
    pub fn residuals(&self, jet: &FlowJet<T>) -> Result<[T; 3]> {
        let rhs = self.rhs(&jet.state)?;
        Ok(std::array::from_fn(|i| jet.d1[i] - rhs[i]))
    }

    pub fn describe(&self) -> String {
        let offset = if self.offset == T::zero() { String::new() } else { format!(" {:+}", self.offset) };
        format!("{} SU(2) flow at scale {}{offset}", self.direction, self.scale)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConventionFit<T> {
    pub convention: Convention<T>,
    /// Largest residual relative to `max(1, |ds/dt|)`.
    pub max_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residuals<T> {
    pub da: T,
    pub db: T,
    pub dc: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecialSample<T> {
    pub r: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<T>,
    /// Residuals under the matched convention, or the printed one when
    /// nothing matches.
    pub residuals: Residuals<T>,
    pub ricci_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecialReport<T> {
    pub metric: SpecialMetric,
    pub m: T,
    pub samples: Vec<SpecialSample<T>>,
    pub matched_convention: Option<Convention<T>>,
    pub candidates: Vec<ConventionFit<T>>,
    /// The coefficient system as usually quoted for this metric.
    pub printed_convention: Convention<T>,
    pub agrees_with_printed: bool,
    pub frame_brackets: [T; 3],
    /// Scale of the matched convention.
    pub fitted_scale: Option<T>,
    pub max_ricci: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl<T: Serialize> SpecialReport<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn scan_conventions<T: Real>(
    metric: SpecialMetric,
    m: T,
    jets: Vec<SpecialJet<T>>,
    offset: T,
    printed: Convention<T>,
    tol: f64,
) -> Result<SpecialReport<T>> {
    let mut candidates = Vec::new();
    for direction in [Direction::Forward, Direction::Backward] {
        for scale in [T::one(), lit(2.0)] {
            let convention = Convention { direction, scale, offset };
            let mut worst = 0.0f64;
            for j in &jets {
                let res = convention.residuals(&j.jet)?;
                for i in 0..3 {
                    worst = worst.max(to_f64(res[i]).abs() / to_f64(j.jet.d1[i]).abs().max(1.0));
                }
            }
            candidates.push(ConventionFit { convention, max_residual: worst });
        }
    }
    let matched = candidates
        .iter()
        .filter(|c| c.max_residual < tol)
        .min_by(|x, y| x.max_residual.total_cmp(&y.max_residual))
        .map(|c| c.convention);
    let reported = matched.unwrap_or(printed);
    let mut samples = Vec::with_capacity(jets.len());
    let mut max_ricci = 0.0f64;
    for j in &jets {
        let [da, db, dc] = reported.residuals(&j.jet)?;
        let ricci_max = j.ricci_max()?;
        max_ricci = max_ricci.max(ricci_max);
        samples.push(SpecialSample { r: j.r, t: j.t, residuals: Residuals { da, db, dc }, ricci_max });
    }
    Ok(SpecialReport {
        metric,
        m,
        samples,
        matched_convention: matched,
        candidates,
        printed_convention: printed,
        agrees_with_printed: matched == Some(printed),
        frame_brackets: metric.frame_brackets(),
        fitted_scale: matched.map(|c| c.scale),
        max_ricci,
        tolerance: tol,
        pass: matched.is_some() && max_ricci < tol,
    })
}

/// Checks which SU(2) flow the Taub-NUT coefficients follow, and that the
/// metric is Ricci-flat, at each radius.
pub fn verify_backward_flow<T: Real>(m: T, radii: &[T], tol: f64) -> Result<SpecialReport<T>> {
    let jets = radii.iter().map(|&r| taub_nut_jet(m, r)).collect::<Result<Vec<_>>>()?;
    let printed = Convention { direction: Direction::Backward, scale: lit(2.0), offset: T::zero() };
    scan_conventions(SpecialMetric::TaubNut, m, jets, T::zero(), printed, tol)
}

/// Same scan for Eguchi-Hanson, whose coefficients follow an SU(2) flow
/// shifted by the constant 2.
pub fn verify_modified_flow<T: Real>(m: T, radii: &[T], tol: f64) -> Result<SpecialReport<T>> {
    let jets = radii.iter().map(|&r| eguchi_hanson_jet(m, r)).collect::<Result<Vec<_>>>()?;
    let two = lit::<T>(2.0);
    let printed = Convention { direction: Direction::Backward, scale: two, offset: two };
    scan_conventions(SpecialMetric::EguchiHanson, m, jets, two, printed, tol)
}

/// One residual per 2-form; all vanish exactly when the forms are closed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosureResiduals<T> {
    pub r1: T,
    pub r2: T,
    pub r3: T,
}

impl<T: Field> ClosureResiduals<T> {
    pub fn as_array(&self) -> [T; 3] {
        [self.r1, self.r2, self.r3]
    }
}

/// Linear closure conditions `M (da, db, dc) = v`, as `(M, v)`.
fn closure_system<T: Field>(group: Group, s: &FlowState<T>) -> Result<([[T; 3]; 3], [T; 3])> {
    let (a, b, c, zero) = (s.a, s.b, s.c, T::zero());
    match group {
        Group::H3 => Ok(([[zero, c, b], [c, zero, a], [b, a, zero]], [a, zero, zero])),
        Group::E2 => Ok(([[c, zero, a], [b, a, zero], [zero, c, b]], [zero, c - a, a - c])),
        _ => Err(Error::UnsupportedGroup { group, operation: "hyper-Kähler closure" }),
    }
}

/// Closure residuals of the three 2-forms built from `jet` over H3 or E(2).
pub fn hyperkahler_residuals<T: Field>(group: Group, jet: &FlowJet<T>) -> Result<ClosureResiduals<T>> {
    let (mat, v) = closure_system(group, &jet.state)?;
    let row = |i: usize| mat[i][0] * jet.d1[0] + mat[i][1] * jet.d1[1] + mat[i][2] * jet.d1[2];
    // H3 states the first condition as a - (b'c + bc') = 0
    let sign = if group == Group::H3 { -T::one() } else { T::one() };
    Ok(ClosureResiduals { r1: sign * (row(0) - v[0]), r2: row(1) - v[1], r3: row(2) - v[2] })
}

/// The unique derivatives `(da, db, dc)` that close all three forms.
pub fn closure_derivatives<T: Field>(group: Group, state: &FlowState<T>) -> Result<[T; 3]> {
    check_nonzero(&state.coeffs())?;
    let (mat, v) = closure_system(group, state)?;
    let det3 = |m: &[[T; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let det = det3(&mat);
    Ok(std::array::from_fn(|col| {
        let mut replaced = mat;
        for row in 0..3 {
            replaced[row][col] = v[row];
        }
        det3(&replaced) / det
    }))
}

/// Warped products `dt^2 + f(t)^2 (round 3-sphere)` of constant curvature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureFamily {
    /// `f = t`: flat.
    Linear,
    /// `f = 1`: a product, curved only along the sphere.
    Product,
    /// `f = sin t`: curvature `+1`.
    Sin,
    /// `f = sinh t`: curvature `-1`.
    Sinh,
}

impl CurvatureFamily {
    pub const ALL: [CurvatureFamily; 4] =
        [CurvatureFamily::Linear, CurvatureFamily::Product, CurvatureFamily::Sin, CurvatureFamily::Sinh];

    /// The constant sectional curvature, if the family has one.
    pub fn curvature<T: Real>(self) -> Option<T> {
        match self {
            CurvatureFamily::Linear => Some(T::zero()),
            CurvatureFamily::Product => None,
            CurvatureFamily::Sin => Some(T::one()),
            CurvatureFamily::Sinh => Some(-T::one()),
        }
    }
}

/// Metric jet of `family` at time `t`, over the coframe with
/// `d th^i = 2 th^j ^ th^k`.
pub fn constant_curvature_family<T: Real>(family: CurvatureFamily, t: T) -> FrameMetricJet<T> {
    let (f, df, ddf) = match family {
        CurvatureFamily::Linear => (t, T::one(), T::zero()),
        CurvatureFamily::Product => (T::one(), T::zero(), T::zero()),
        CurvatureFamily::Sin => (t.sin(), t.cos(), -t.sin()),
        CurvatureFamily::Sinh => (t.sinh(), t.cosh(), t.sinh()),
    };
    FrameMetricJet::new(SpecialMetric::EguchiHanson.frame_brackets(), SignPattern::ALL_PLUS, [f; 3], [df; 3], [ddf; 3])
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::flow::left_invariant_ricci;
    use crate::integrator::{integrate, IntegratorSettings};
    use crate::testutil::positive_rational_state;
    use crate::Rational;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * y.abs().max(1.0)
    }

    #[test]
    fn taub_nut_values() {
        let s = 3f64.sqrt();
        let j = taub_nut_jet(1.0, 2.0).unwrap();
        let [a, b, c] = j.jet.state.coeffs();
        assert!(close(a, s, 1e-15) && close(b, s, 1e-15) && close(c, 2.0 / s, 1e-15) && close(j.h, s, 1e-15));
        assert!(close(j.jet.d1[0], 2.0 / 3.0, 1e-14));
        assert!(close(j.jet.d1[2], 2.0 / 9.0, 1e-14));
        let far = taub_nut_jet(1.0, 1e8).unwrap();
        assert!(close(far.jet.state.c, 2.0, 1e-7));
        assert!(taub_nut_jet(1.0, 1.0).is_err());
        assert!(taub_nut_jet(-1.0, 2.0).is_err());
    }

    #[test]
    fn eguchi_hanson_values() {
        let r = 2f64.sqrt();
        let j = eguchi_hanson_jet(1.0, r).unwrap();
        assert!(close(j.jet.state.c, 1.5f64.sqrt(), 1e-15));
        assert!(close(j.h, 2.0 / 3f64.sqrt(), 1e-15));
        assert!(close(j.jet.d1[0], 3f64.sqrt() / 2.0, 1e-15));
        assert!(close(j.jet.d1[2], 1.25, 1e-14));
        assert!(eguchi_hanson_jet(1.0, 0.5).is_err());
    }

    #[test]
    fn proper_time_derivative_is_h() {
        let (m, r, eps) = (1.3, 2.7, 1e-6);
        let tp = taub_nut_jet(m, r + eps).unwrap().t.unwrap();
        let tm = taub_nut_jet(m, r - eps).unwrap().t.unwrap();
        assert!(close((tp - tm) / (2.0 * eps), taub_nut_jet(m, r).unwrap().h, 1e-8));
    }

    #[test]
    fn analytic_second_derivatives_match_differences() {
        for metric in [SpecialMetric::TaubNut, SpecialMetric::EguchiHanson] {
            let jet = |r: f64| match metric {
                SpecialMetric::TaubNut => taub_nut_jet(1.0, r).unwrap(),
                SpecialMetric::EguchiHanson => eguchi_hanson_jet(1.0, r).unwrap(),
            };
            let (r, eps) = (1.7, 1e-5);
            let j = jet(r);
            // d/dt (f') = (1/h) d/dr (f')
            for i in 0..3 {
                let fd = (jet(r + eps).jet.d1[i] - jet(r - eps).jet.d1[i]) / (2.0 * eps) / j.h;
                assert!(close(j.jet.d2[i], fd, 1e-7), "{metric:?} {i}");
            }
        }
    }

    #[test]
    fn taub_nut_follows_the_unit_backward_flow() {
        let report = verify_backward_flow(1.0, &radius_grid(1.0, 30), 1e-10).unwrap();
        let matched = report.matched_convention.unwrap();
        assert_eq!(matched.direction, Direction::Backward);
        assert_eq!(matched.scale, 1.0);
        assert!(!report.agrees_with_printed);
        assert!(report.pass, "{report:?}");
        // the printed scale misses by a factor of two
        let printed = report.candidates.iter().find(|c| c.convention == report.printed_convention).unwrap();
        assert!(printed.max_residual > 0.1);
    }

    #[test]
    fn taub_nut_residual_at_r2() {
        let j = taub_nut_jet(1.0f64, 2.0).unwrap();
        let conv = Convention { direction: Direction::Backward, scale: 1.0, offset: 0.0 };
        assert!(conv.residuals(&j.jet).unwrap().iter().all(|r| r.abs() < 1e-15));
        assert!(j.ricci_max().unwrap() < 1e-10);
    }

    #[test]
    fn eguchi_hanson_follows_the_shifted_forward_flow() {
        let report = verify_modified_flow(1.0, &radius_grid(1.0, 30), 1e-10).unwrap();
        let matched = report.matched_convention.unwrap();
        assert_eq!((matched.direction, matched.scale, matched.offset), (Direction::Forward, 2.0, 2.0));
        assert!(!report.agrees_with_printed);
        assert!(report.max_ricci < 1e-10, "{}", report.max_ricci);
        assert!(report.pass);
        let v: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        for key in ["metric", "m", "samples", "matched_convention"] {
            assert!(v.get(key).is_some());
        }
        assert_eq!(v["metric"], "eguchi-hanson");
    }

    #[test]
    fn eguchi_hanson_is_not_flat_in_the_milnor_frame() {
        let j = eguchi_hanson_jet(1.0, 2.0).unwrap();
        let milnor = FrameMetricJet::new(Group::SU2.structure(), SignPattern::ALL_PLUS, j.jet.state.coeffs(), j.jet.d1, j.jet.d2);
        let ric = oracle_riemann(&milnor).unwrap().ricci();
        assert!(max_abs(ric.into_iter().flatten()) > 0.1);
    }

    #[test]
    fn hyperkahler_examples() {
        let r = |n, d| Rational::new(n, d);
        let one = r(1, 1);
        let h3 = FlowJet::from_flow(&FlowConfig::new(Group::H3), FlowState::initial(one, one, one)).unwrap();
        assert_eq!(hyperkahler_residuals(Group::H3, &h3).unwrap().as_array(), [r(0, 1); 3]);

        let e2 = FlowJet::from_flow(&FlowConfig::new(Group::E2), FlowState::initial(r(4, 1), one, one)).unwrap();
        assert_eq!(e2.d1, [r(-15, 2), r(9, 8), r(15, 8)]);
        assert_eq!(hyperkahler_residuals(Group::E2, &e2).unwrap().as_array(), [r(0, 1); 3]);

        let still = FlowJet::stationary(FlowState::initial(one, one, one));
        assert_eq!(hyperkahler_residuals(Group::H3, &still).unwrap().as_array(), [one, r(0, 1), r(0, 1)]);
        assert!(hyperkahler_residuals(Group::SU2, &still).is_err());
    }

    proptest! {
        #[test]
        fn closure_is_equivalent_to_the_flow(s in positive_rational_state()) {
            for g in [Group::H3, Group::E2] {
                let cfg = FlowConfig::new(g);
                let jet = FlowJet::from_flow(&cfg, s).unwrap();
                prop_assert_eq!(hyperkahler_residuals(g, &jet).unwrap().as_array(), [Rational::from_integer(0); 3]);
                prop_assert_eq!(closure_derivatives(g, &s).unwrap(), ricci_rhs(&cfg, &s).unwrap());
            }
        }
    }

    #[test]
    fn closure_along_trajectories() {
        let settings = IntegratorSettings::default();
        for (g, init) in [(Group::H3, FlowState::initial(1.0, 2.0, 3.0)), (Group::E2, FlowState::initial(3.0, 1.0, 0.5))] {
            let traj = integrate(&FlowConfig::new(g), &init, 5.0, &settings).unwrap();
            for jet in traj.samples() {
                let res = hyperkahler_residuals(g, jet).unwrap();
                assert!(max_abs(res.as_array()) < 1e-10);
            }
        }
    }

    #[test]
    fn constant_curvature_examples() {
        for family in [CurvatureFamily::Linear, CurvatureFamily::Sin, CurvatureFamily::Sinh] {
            let k = family.curvature::<f64>().unwrap();
            for t in [0.3, std::f64::consts::FRAC_PI_4, 1.2] {
                let r = oracle_riemann(&constant_curvature_family(family, t)).unwrap();
                for x in r.sectional_curvatures().as_array() {
                    assert!((x - k).abs() < 1e-12, "{family:?} t={t}: {x}");
                }
                // constant curvature: R(X,Y)Z = k (<Y,Z> X - <X,Z> Y)
                for i in 0..4 {
                    for j in 0..4 {
                        for kk in 0..4 {
                            for l in 0..4 {
                                let mut expected = 0.0;
                                if j == kk && i == l {
                                    expected += k * r.metric[j] * r.metric[i];
                                }
                                if i == kk && j == l {
                                    expected -= k * r.metric[i] * r.metric[j];
                                }
                                assert!((r.lowered(i, j, kk, l) - expected).abs() < 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn product_family_carries_the_sphere_ricci() {
        let m = constant_curvature_family(CurvatureFamily::Product, 0.7f64);
        let ric = oracle_riemann(&m).unwrap().ricci();
        let expected = left_invariant_ricci(m.structure, [1.0; 3]).unwrap();
        assert_eq!(ric[0][0], 0.0);
        for i in 0..3 {
            assert!((ric[i + 1][i + 1] - expected[i]).abs() < 1e-14);
        }
        assert!(expected.iter().all(|x| *x > 0.0));
    }
}
