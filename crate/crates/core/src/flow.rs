//! Ricci flow of diagonal left-invariant metrics
//! `g3 = a (th1)^2 + b (th2)^2 + c (th3)^2` in a Milnor frame.
//!
//! All five systems for the unimodular groups are instances of one formula:
//!
//! ```text
//! da/dt = s k [(n2 b - n3 c)^2 - n1^2 a^2] / (2 b c)     (and cyclic)
//! ```
//!
//! where `s = +1` for the forward flow `dg/dt = -k Rc` and `s = -1` for the
//! backward flow. With `k = 1` this is the normalization used for H3, E(1,1),
//! E(2) and SL(2,R); `k = 2` gives the classical SU(2) system without the 1/2.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::Group;
use crate::scalar::{frac, int, sq, to_f64, Field, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `dg/dt = -k Rc`.
    Forward,
    /// `dg/dt = +k Rc`, the forward flow with `t -> -t`.
    Backward,
}

impl Direction {
    pub fn sign<T: Field>(self) -> T {
        match self {
            Direction::Forward => T::one(),
            Direction::Backward => -T::one(),
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "forward" | "fwd" => Ok(Direction::Forward),
            "backward" | "bwd" => Ok(Direction::Backward),
            _ => Err(Error::Config(format!("unknown flow direction `{s}`"))),
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

/// Which flow drives the coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowConfig<T> {
    pub group: Group,
    pub direction: Direction,
    pub scale: T,
}

impl<T: Field> FlowConfig<T> {
    /// Forward flow with unit scale.
    pub fn new(group: Group) -> Self {
        FlowConfig { group, direction: Direction::Forward, scale: T::one() }
    }

    pub fn with_scale(mut self, scale: T) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    /// Overall factor `s k` in front of `-Rc`.
    pub fn factor(&self) -> T {
        self.direction.sign::<T>() * self.scale
    }
}

/// Coefficients `(a, b, c)` of the 3-metric at time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowState<T> {
    pub t: T,
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Field> FlowState<T> {
    pub fn new(t: T, a: T, b: T, c: T) -> Self {
        FlowState { t, a, b, c }
    }

    /// State at `t = 0`.
    pub fn initial(a: T, b: T, c: T) -> Self {
        FlowState { t: T::zero(), a, b, c }
    }

    pub fn from_coeffs(t: T, [a, b, c]: [T; 3]) -> Self {
        FlowState { t, a, b, c }
    }

    pub fn coeffs(&self) -> [T; 3] {
        [self.a, self.b, self.c]
    }

    /// Fails when any coefficient vanishes.
    pub fn check_nonsingular(&self) -> Result<()> {
        check_nonzero(&self.coeffs())
    }
}

pub(crate) fn check_nonzero<T: Field>(f: &[T; 3]) -> Result<()> {
    match f.iter().position(|x| x.is_zero()) {
        Some(index) => Err(Error::ZeroCoefficient { index }),
        None => Ok(()),
    }
}

/// A state together with its first and second time derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowJet<T> {
    pub state: FlowState<T>,
    pub d1: [T; 3],
    pub d2: [T; 3],
}

impl<T: Field> FlowJet<T> {
    pub fn new(state: FlowState<T>, d1: [T; 3], d2: [T; 3]) -> Self {
        FlowJet { state, d1, d2 }
    }

    /// Jet of the flow through `state`: derivatives from the flow equations.
    pub fn from_flow(cfg: &FlowConfig<T>, state: FlowState<T>) -> Result<Self> {
        Ok(FlowJet { state, d1: ricci_rhs(cfg, &state)?, d2: jet_second(cfg, &state)? })
    }

    /// Constant coefficients.
    pub fn stationary(state: FlowState<T>) -> Self {
        FlowJet { state, d1: [T::zero(); 3], d2: [T::zero(); 3] }
    }
}

/// Milnor-frame components `Rc(F_i, F_i)` of the left-invariant metric
/// `g1 (th1)^2 + g2 (th2)^2 + g3 (th3)^2`; off-diagonal entries vanish.
pub fn left_invariant_ricci<T: Field>(n: [T; 3], g: [T; 3]) -> Result<[T; 3]> {
    check_nonzero(&g)?;
    let two = int::<T>(2);
    Ok(std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        (sq(n[i] * g[i]) - sq(n[j] * g[j] - n[k] * g[k])) / (two * g[j] * g[k])
    }))
}

/// `(da/dt, db/dt, dc/dt)` for the configured flow.
pub fn ricci_rhs<T: Field>(cfg: &FlowConfig<T>, s: &FlowState<T>) -> Result<[T; 3]> {
    let ric = left_invariant_ricci(cfg.group.structure(), s.coeffs())?;
    let factor = cfg.factor();
    Ok(ric.map(|r| -factor * r))
}

/// Jacobian `d(rhs_i)/d(f_m)` of [`ricci_rhs`] with respect to `(a, b, c)`.
pub fn rhs_jacobian<T: Field>(cfg: &FlowConfig<T>, s: &FlowState<T>) -> Result<[[T; 3]; 3]> {
    let f = s.coeffs();
    check_nonzero(&f)?;
    let n: [T; 3] = cfg.group.structure();
    let factor = cfg.factor();
    let two = int::<T>(2);
    let mut jac = [[T::zero(); 3]; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let diff = n[j] * f[j] - n[k] * f[k];
        let numer = sq(diff) - sq(n[i] * f[i]);
        jac[i][i] = -factor * sq(n[i]) * f[i] / (f[j] * f[k]);
        jac[i][j] = factor * (two * n[j] * diff * f[j] - numer) / (two * sq(f[j]) * f[k]);
        jac[i][k] = factor * (-two * n[k] * diff * f[k] - numer) / (two * f[j] * sq(f[k]));
    }
    Ok(jac)
}

/// Second time derivatives along the flow, `f'' = J(f) rhs(f)`.
pub fn jet_second<T: Field>(cfg: &FlowConfig<T>, s: &FlowState<T>) -> Result<[T; 3]> {
    let d1 = ricci_rhs(cfg, s)?;
    let jac = rhs_jacobian(cfg, s)?;
    Ok(jac.map(|row| row[0] * d1[0] + row[1] * d1[1] + row[2] * d1[2]))
}

/// A functional of `(a, b, c)` that is constant along some flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Invariant {
    #[serde(rename = "ab")]
    AB,
    #[serde(rename = "ac")]
    AC,
    #[serde(rename = "b/c")]
    BOverC,
    #[serde(rename = "b(c-a)")]
    BTimesCMinusA,
    #[serde(rename = "b(c+a)")]
    BTimesCPlusA,
}

impl Invariant {
    /// Value at `s`; `None` where the functional is undefined.
    pub fn eval<T: Field>(self, s: &FlowState<T>) -> Option<T> {
        let FlowState { a, b, c, .. } = *s;
        match self {
            Invariant::AB => Some(a * b),
            Invariant::AC => Some(a * c),
            Invariant::BOverC => (!c.is_zero()).then(|| b / c),
            Invariant::BTimesCMinusA => Some(b * (c - a)),
            Invariant::BTimesCPlusA => Some(b * (c + a)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Invariant::AB => "ab",
            Invariant::AC => "ac",
            Invariant::BOverC => "b/c",
            Invariant::BTimesCMinusA => "b(c-a)",
            Invariant::BTimesCPlusA => "b(c+a)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantSet {
    pub group: Group,
    pub invariants: Vec<Invariant>,
    /// False for groups with no conservation laws on record.
    pub cataloged: bool,
}

/// Known conserved functionals of the unit-scale flow on `g`.
pub fn conserved_quantities(g: Group) -> InvariantSet {
    use Invariant::*;
    let (invariants, cataloged) = match g {
        Group::H3 => (vec![AB, AC, BOverC], true),
        Group::E11 => (vec![AC, BTimesCMinusA], true),
        Group::E2 => (vec![AC, BTimesCPlusA], true),
        Group::SU2 => (vec![], true),
        Group::SL2R | Group::R3 => (vec![], false),
    };
    InvariantSet { group: g, invariants, cataloged }
}

/// Boundary of the existence interval of the Heisenberg flow through
/// `init`: the time where `(3/2)(t - t0) + b0 c0 / a0` vanishes.
///
/// Lies in the past of `init.t` when `a0 b0 c0 > 0` and in the future
/// otherwise.
pub fn heisenberg_blowup_time<T: Real>(init: &FlowState<T>) -> Result<T> {
    init.check_nonsingular()?;
    Ok(init.t - frac::<T>(2, 3) * init.b * init.c / init.a)
}

/// Exact solution of the unit-scale forward flow on H3.
pub fn heisenberg_closed_form<T: Real>(init: &FlowState<T>, t: T) -> Result<FlowState<T>> {
    init.check_nonsingular()?;
    let s0 = init.b * init.c / init.a;
    let s = frac::<T>(3, 2) * (t - init.t) + s0;
    let ratio = s / s0;
    if !(ratio > T::zero()) {
        return Err(Error::BeyondBlowup {
            t: to_f64(t),
            blowup_time: to_f64(heisenberg_blowup_time(init)?),
        });
    }
    let grow = ratio.cbrt();
    Ok(FlowState { t, a: init.a / grow, b: init.b * grow, c: init.c * grow })
}

/// `(b, a/c)` coordinates for the E(1,1) and E(2) flows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReducedState<T> {
    pub b: T,
    pub ratio: T,
}

impl<T: Field> ReducedState<T> {
    pub fn from_state(s: &FlowState<T>) -> Result<Self> {
        s.check_nonsingular()?;
        Ok(ReducedState { b: s.b, ratio: s.a / s.c })
    }
}

fn reduced_domain<T: Field>(r: &ReducedState<T>) -> Result<()> {
    if !(r.ratio > T::zero()) {
        return Err(Error::Domain(format!("ratio a/c must be positive, got {:?}", r.ratio)));
    }
    if r.b.is_zero() {
        return Err(Error::ZeroCoefficient { index: 1 });
    }
    Ok(())
}

/// `(db/dt, d(a/c)/dt)` of the unit-scale forward flow on E(1,1) or E(2).
pub fn reduced_rhs<T: Field>(g: Group, r: &ReducedState<T>) -> Result<(T, T)> {
    reduced_domain(r)?;
    let one = T::one();
    let two = int::<T>(2);
    let rho = r.ratio;
    let ratio_dot = (one - rho * rho) / r.b;
    match g {
        Group::E11 => Ok((sq(one + rho) / (two * rho), ratio_dot)),
        Group::E2 => Ok((sq(one - rho) / (two * rho), ratio_dot)),
        _ => Err(Error::UnsupportedGroup { group: g, operation: "reduced ratio system" }),
    }
}

/// First integral tying `b` to the ratio `a/c`:
/// `b = k0 sqrt(r) / |1 - r|` on E(1,1), `b = l0 sqrt(r) / (1 + r)` on E(2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioRelation<T> {
    pub group: Group,
    pub constant: T,
}

impl<T: Real> RatioRelation<T> {
    /// `b` predicted from the ratio `a/c`.
    pub fn predicted_b(&self, ratio: T) -> T {
        match self.group {
            Group::E11 => self.constant * ratio.sqrt() / (T::one() - ratio).abs(),
            _ => self.constant * ratio.sqrt() / (T::one() + ratio),
        }
    }
}

pub fn ratio_relation<T: Real>(g: Group, init: &FlowState<T>) -> Result<RatioRelation<T>> {
    let r = ReducedState::from_state(init)?;
    reduced_domain(&r)?;
    let constant = match g {
        Group::E11 => {
            if r.ratio == T::one() {
                return Err(Error::DegenerateRatio);
            }
            r.b * (T::one() - r.ratio).abs() / r.ratio.sqrt()
        }
        Group::E2 => r.b * (T::one() + r.ratio) / r.ratio.sqrt(),
        _ => return Err(Error::UnsupportedGroup { group: g, operation: "ratio relation" }),
    };
    Ok(RatioRelation { group: g, constant })
}
