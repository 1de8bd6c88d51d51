//! Adaptive Dormand-Prince 5(4) integration of the flow systems.
//!
//! The solver keeps the continuous extension of every accepted step, so a
//! [`Trajectory`] can be evaluated anywhere inside its time span. Steps that
//! would push a coefficient through zero are rejected and shrunk; when the
//! step size underflows, or a coefficient grows past the blow-up threshold,
//! integration stops with [`Termination::BlowUpDetected`] and the partial
//! trajectory is returned. Conserved quantities are monitored, never
//! enforced.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{conserved_quantities, ricci_rhs, FlowConfig, FlowJet, FlowState, Invariant};
use crate::scalar::{frac, lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegratorSettings<T> {
    pub rtol: T,
    pub atol: T,
    /// Initial step; estimated from the problem when `None`.
    pub h_init: Option<T>,
    /// Largest step; the whole span when `None`.
    pub h_max: Option<T>,
    pub max_steps: usize,
    /// A coefficient above this magnitude counts as blow-up.
    pub blowup_threshold: T,
    /// Steps below this size count as blow-up.
    pub min_step: T,
}

impl<T: Real> Default for IntegratorSettings<T> {
    fn default() -> Self {
        IntegratorSettings {
            rtol: lit(1e-10),
            atol: lit(1e-12),
            h_init: None,
            h_max: None,
            max_steps: 200_000,
            blowup_threshold: lit(1e12),
            min_step: lit(1e-14),
        }
    }
}

impl<T: Real> IntegratorSettings<T> {
    pub fn with_tolerances(mut self, rtol: T, atol: T) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: T| x > T::zero() && x.is_finite();
        if !positive(self.rtol) || !positive(self.atol) {
            return Err(Error::Settings("rtol and atol must be positive".into()));
        }
        if self.h_init.is_some_and(|h| !positive(h)) || self.h_max.is_some_and(|h| !positive(h)) {
            return Err(Error::Settings("step sizes must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::Settings("max_steps must be at least 1".into()));
        }
        if !positive(self.blowup_threshold) || !positive(self.min_step) {
            return Err(Error::Settings("blow-up threshold and minimum step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedEnd,
    BlowUpDetected,
    StepBudget,
}

// Dormand-Prince 5(4) tableau, stored as exact fractions.
const C: [(i64, i64); 7] = [(0, 1), (1, 5), (3, 10), (4, 5), (8, 9), (1, 1), (1, 1)];
const A: [[(i64, i64); 6]; 7] = [
    [(0, 1); 6],
    [(1, 5), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)],
    [(3, 40), (9, 40), (0, 1), (0, 1), (0, 1), (0, 1)],
    [(44, 45), (-56, 15), (32, 9), (0, 1), (0, 1), (0, 1)],
    [(19372, 6561), (-25360, 2187), (64448, 6561), (-212, 729), (0, 1), (0, 1)],
    [(9017, 3168), (-355, 33), (46732, 5247), (49, 176), (-5103, 18656), (0, 1)],
    [(35, 384), (0, 1), (500, 1113), (125, 192), (-2187, 6784), (11, 84)],
];
/// Fifth minus fourth order weights.
const E: [(i64, i64); 7] = [
    (71, 57600),
    (0, 1),
    (-71, 16695),
    (71, 1920),
    (-17253, 339200),
    (22, 525),
    (-1, 40),
];
/// Continuous extension weights.
const D: [(i64, i64); 7] = [
    (-12715105075, 11282082432),
    (0, 1),
    (87487479700, 32700410799),
    (-10690763975, 1880347072),
    (701980252875, 199316789632),
    (-1453857185, 822651844),
    (69997945, 29380423),
];

type Vec3<T> = [T; 3];

fn axpy<T: Real>(y: &Vec3<T>, h: T, terms: &[(T, &Vec3<T>)]) -> Vec3<T> {
    std::array::from_fn(|i| y[i] + h * terms.iter().fold(T::zero(), |acc, (w, k)| acc + *w * k[i]))
}

fn rms<T: Real>(v: impl Iterator<Item = T>) -> T {
    let (sum, n) = v.fold((T::zero(), 0usize), |(s, n), x| (s + x * x, n + 1));
    (sum / T::from_usize(n).unwrap()).sqrt()
}

/// One continuous-extension segment `[t0, t0 + h]`.
#[derive(Clone, Debug)]
struct Segment<T> {
    t0: T,
    h: T,
    cont: [Vec3<T>; 5],
}

impl<T: Real> Segment<T> {
    fn hi(&self) -> T {
        self.t0.max(self.t0 + self.h)
    }

    fn eval(&self, t: T) -> Vec3<T> {
        let s = (t - self.t0) / self.h;
        let s1 = T::one() - s;
        let c = &self.cont;
        std::array::from_fn(|i| c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i]))))
    }

    fn eval_derivative(&self, t: T) -> Vec3<T> {
        let s = (t - self.t0) / self.h;
        let s1 = T::one() - s;
        let c = &self.cont;
        std::array::from_fn(|i| {
            let r = c[3][i] + s1 * c[4][i];
            let q = c[2][i] + s * r;
            let p = c[1][i] + s1 * q;
            let dq = r - s * c[4][i];
            let dp = -q + s1 * dq;
            (p + s * dp) / self.h
        })
    }
}

/// Dense output of one integration.
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub config: FlowConfig<T>,
    /// State the integration started from.
    pub initial: FlowState<T>,
    /// Requested end time.
    pub t_target: T,
    pub terminated: Termination,
    /// Conserved-quantity drift over the whole trajectory.
    pub invariant_drift: DriftReport<T>,
    samples: Vec<FlowJet<T>>,
    segments: Vec<Segment<T>>,
}

impl<T: Real> Trajectory<T> {
    /// Accepted step endpoints in increasing time order.
    pub fn samples(&self) -> &[FlowJet<T>] {
        &self.samples
    }

    /// `(earliest, latest)` time covered.
    pub fn span(&self) -> (T, T) {
        (self.samples[0].state.t, self.samples[self.samples.len() - 1].state.t)
    }

    /// The state where integration stopped.
    pub fn final_state(&self) -> FlowState<T> {
        let (lo, hi) = self.span();
        let t = if self.t_target >= self.initial.t { hi } else { lo };
        self.state_at(t).expect("endpoint lies in the span")
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    fn segment(&self, t: T) -> Result<&Segment<T>> {
        let (lo, hi) = self.span();
        if !(t >= lo && t <= hi) {
            return Err(Error::Domain(format!("t = {t} outside trajectory span [{lo}, {hi}]")));
        }
        let idx = self.segments.partition_point(|s| s.hi() < t);
        Ok(&self.segments[idx.min(self.segments.len() - 1)])
    }

    /// Interpolated state.
    pub fn state_at(&self, t: T) -> Result<FlowState<T>> {
        if self.segments.is_empty() {
            return Ok(self.initial);
        }
        Ok(FlowState::from_coeffs(t, self.segment(t)?.eval(t)))
    }

    /// Time derivative of the interpolant (not of the flow).
    pub fn interpolant_derivative(&self, t: T) -> Result<Vec3<T>> {
        if self.segments.is_empty() {
            return Ok([T::zero(); 3]);
        }
        Ok(self.segment(t)?.eval_derivative(t))
    }

    /// Flow-consistent jet at an interpolated state.
    pub fn jet_at(&self, t: T) -> Result<FlowJet<T>> {
        FlowJet::from_flow(&self.config, self.state_at(t)?)
    }

    /// `n` evenly spaced times covering the span, or, after an early stop,
    /// its first 90 percent; the last stretch before a singularity is left
    /// out because curvature formulas lose all absolute precision there.
    pub fn sample_times(&self, n: usize) -> Vec<T> {
        let (lo, hi) = self.span();
        let (mut start, mut stop) = if self.t_target >= self.initial.t { (lo, hi) } else { (hi, lo) };
        if self.terminated != Termination::ReachedEnd {
            stop = start + lit::<T>(0.9) * (stop - start);
        }
        if stop < start {
            std::mem::swap(&mut start, &mut stop);
        }
        match n {
            0 => vec![],
            1 => vec![start],
            _ => {
                let step = (stop - start) / T::from_usize(n - 1).unwrap();
                (0..n).map(|i| if i == n - 1 { stop } else { start + step * T::from_usize(i).unwrap() }).collect()
            }
        }
    }

    /// CSV with header `t,a,b,c,da,db,dc,dda,ddb,ddc`, one row per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,a,b,c,da,db,dc,dda,ddb,ddc")?;
        for jet in &self.samples {
            let s = &jet.state;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                s.t, s.a, s.b, s.c, jet.d1[0], jet.d1[1], jet.d1[2], jet.d2[0], jet.d2[1], jet.d2[2]
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

struct Controller<T> {
    err_old: T,
}

impl<T: Real> Controller<T> {
    const SAFE: f64 = 0.9;
    const FAC_MIN: f64 = 0.2;
    const FAC_MAX: f64 = 10.0;
    const BETA: f64 = 0.04;

    /// Step multiplier after an accepted step with scaled error `err`.
    fn accept(&mut self, err: T) -> T {
        let expo = lit::<T>(0.2 - Self::BETA * 0.75);
        let fac = err.powf(expo) / self.err_old.powf(lit(Self::BETA)) / lit(Self::SAFE);
        let fac = fac.max(lit(1.0 / Self::FAC_MAX)).min(lit(1.0 / Self::FAC_MIN));
        self.err_old = err.max(lit(1e-4));
        T::one() / fac
    }

    fn reject(&self, err: T) -> T {
        let expo = lit::<T>(0.2 - Self::BETA * 0.75);
        T::one() / (err.powf(expo) / lit(Self::SAFE)).min(lit(1.0 / Self::FAC_MIN))
    }
}

struct Stepper<'a, T> {
    cfg: &'a FlowConfig<T>,
    settings: &'a IntegratorSettings<T>,
}

struct StepResult<T> {
    y_new: Vec3<T>,
    k_last: Vec3<T>,
    err: T,
    cont: [Vec3<T>; 5],
}

impl<T: Real> Stepper<'_, T> {
    fn rhs(&self, t: T, y: &Vec3<T>) -> Option<Vec3<T>> {
        let d = ricci_rhs(self.cfg, &FlowState::from_coeffs(t, *y)).ok()?;
        d.iter().all(|x| x.is_finite()).then_some(d)
    }

    /// One Dormand-Prince step; `None` if a stage hits a singular state.
    fn step(&self, t: T, y: &Vec3<T>, k1: &Vec3<T>, h: T) -> Option<StepResult<T>> {
        let mut k: Vec<Vec3<T>> = Vec::with_capacity(7);
        k.push(*k1);
        for s in 1..7 {
            let terms: Vec<(T, &Vec3<T>)> = (0..s).map(|j| (frac(A[s][j].0, A[s][j].1), &k[j])).collect();
            let ys = axpy(y, h, &terms);
            let ts = t + frac::<T>(C[s].0, C[s].1) * h;
            k.push(self.rhs(ts, &ys)?);
        }
        // row 7 of A holds the fifth-order weights
        let terms: Vec<(T, &Vec3<T>)> = (0..6).map(|j| (frac(A[6][j].0, A[6][j].1), &k[j])).collect();
        let y_new = axpy(y, h, &terms);
        let err_terms: Vec<(T, &Vec3<T>)> = (0..7).map(|j| (frac(E[j].0, E[j].1), &k[j])).collect();
        let err_vec = axpy(&[T::zero(); 3], h, &err_terms);
        let (rtol, atol) = (self.settings.rtol, self.settings.atol);
        let err = rms((0..3).map(|i| err_vec[i] / (atol + rtol * y[i].abs().max(y_new[i].abs()))));

        let ydiff: Vec3<T> = std::array::from_fn(|i| y_new[i] - y[i]);
        let bspl: Vec3<T> = std::array::from_fn(|i| h * k[0][i] - ydiff[i]);
        let dense_terms: Vec<(T, &Vec3<T>)> = (0..7).map(|j| (frac(D[j].0, D[j].1), &k[j])).collect();
        let cont = [
            *y,
            ydiff,
            bspl,
            std::array::from_fn(|i| ydiff[i] - h * k[6][i] - bspl[i]),
            axpy(&[T::zero(); 3], h, &dense_terms),
        ];
        Some(StepResult { y_new, k_last: k[6], err, cont })
    }

    fn initial_step(&self, t0: T, y0: &Vec3<T>, f0: &Vec3<T>, dir: T, h_max: T) -> T {
        let (rtol, atol) = (self.settings.rtol, self.settings.atol);
        let sk: Vec3<T> = y0.map(|y| atol + rtol * y.abs());
        let d0 = rms((0..3).map(|i| y0[i] / sk[i]));
        let d1 = rms((0..3).map(|i| f0[i] / sk[i]));
        let tiny = lit::<T>(1e-5);
        let mut h0 = if d0 < tiny || d1 < tiny { lit(1e-6) } else { lit::<T>(0.01) * d0 / d1 };
        h0 = h0.min(h_max);
        let y1 = axpy(y0, dir * h0, &[(T::one(), f0)]);
        let Some(f1) = self.rhs(t0 + dir * h0, &y1) else {
            return h0 * lit(1e-3);
        };
        let d2 = rms((0..3).map(|i| (f1[i] - f0[i]) / sk[i])) / h0;
        let dmax = d1.max(d2);
        let h1 = if dmax <= lit(1e-15) {
            lit::<T>(1e-6).max(h0 * lit(1e-3))
        } else {
            (lit::<T>(0.01) / dmax).powf(lit(0.2))
        };
        (h0 * lit(100.0)).min(h1).min(h_max)
    }
}

fn same_signs<T: Real>(y: &Vec3<T>, y_new: &Vec3<T>) -> bool {
    y.iter().zip(y_new).all(|(a, b)| b.is_finite() && !b.is_zero() && a.signum() == b.signum())
}

/// Integrate the flow from `init` to `t_end` (either direction in time).
pub fn integrate<T: Real>(
    cfg: &FlowConfig<T>,
    init: &FlowState<T>,
    t_end: T,
    settings: &IntegratorSettings<T>,
) -> Result<Trajectory<T>> {
    settings.validate()?;
    init.check_nonsingular()?;
    if t_end == init.t || !t_end.is_finite() {
        return Err(Error::Domain(format!("t_end must differ from the initial time {}", init.t)));
    }
    let stepper = Stepper { cfg, settings };
    let span = (t_end - init.t).abs();
    let dir = (t_end - init.t).signum();
    let h_max = settings.h_max.unwrap_or(span).min(span);

    let mut t = init.t;
    let mut y = init.coeffs();
    let mut k1 = stepper
        .rhs(t, &y)
        .ok_or_else(|| Error::Domain("right-hand side is not finite at the initial state".into()))?;
    let mut h = settings.h_init.unwrap_or_else(|| stepper.initial_step(t, &y, &k1, dir, h_max)).min(h_max);
    let mut controller = Controller { err_old: lit(1e-4) };
    let mut rejected_last = false;

    let mut samples = vec![FlowJet::from_flow(cfg, *init)?];
    let mut segments: Vec<Segment<T>> = Vec::new();
    let mut terminated = Termination::StepBudget;

    for _ in 0..settings.max_steps {
        let remaining = (t_end - t).abs();
        if remaining <= lit::<T>(1e-13) * span.max(T::one()) {
            terminated = Termination::ReachedEnd;
            break;
        }
        if h < settings.min_step {
            terminated = Termination::BlowUpDetected;
            break;
        }
        let last = h >= remaining;
        let h_step = if last { remaining } else { h };
        let signed_h = dir * h_step;

        let Some(res) = stepper.step(t, &y, &k1, signed_h).filter(|r| same_signs(&y, &r.y_new)) else {
            h = h_step * lit(0.25);
            rejected_last = true;
            continue;
        };

        if res.err <= T::one() {
            let t_new = if last { t_end } else { t + signed_h };
            segments.push(Segment { t0: t, h: t_new - t, cont: res.cont });
            t = t_new;
            y = res.y_new;
            k1 = res.k_last;
            samples.push(FlowJet::from_flow(cfg, FlowState::from_coeffs(t, y))?);
            let mut fac = controller.accept(res.err);
            if rejected_last {
                fac = fac.min(T::one());
            }
            rejected_last = false;
            h = (h_step * fac).min(h_max);
            if y.iter().any(|v| v.abs() > settings.blowup_threshold) {
                terminated = Termination::BlowUpDetected;
                break;
            }
            if last {
                terminated = Termination::ReachedEnd;
                break;
            }
        } else {
            h = h_step * controller.reject(res.err);
            rejected_last = true;
        }
    }

    if dir < T::zero() {
        samples.reverse();
        segments.reverse();
    }
    let invariants = conserved_quantities(cfg.group).invariants;
    let mut traj = Trajectory {
        config: *cfg,
        initial: *init,
        t_target: t_end,
        terminated,
        invariant_drift: DriftReport { entries: vec![], undefined: vec![] },
        samples,
        segments,
    };
    traj.invariant_drift = check_invariants(&traj, &invariants)?;
    Ok(traj)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Past,
    Future,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlowupEstimate<T> {
    /// Estimated end of the maximal existence interval.
    pub time: T,
    /// `|time - t0|`.
    pub distance: T,
    pub side: Side,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BlowupSearch<T> {
    Finite(BlowupEstimate<T>),
    /// No singularity within `horizon` of the initial time.
    Open { horizon: T },
}

impl<T> BlowupSearch<T> {
    pub fn finite(self) -> Option<BlowupEstimate<T>> {
        match self {
            BlowupSearch::Finite(e) => Some(e),
            BlowupSearch::Open { .. } => None,
        }
    }
}

/// Locate the finite end of the existence interval on one side of `init`
/// by integrating until the step size collapses.
pub fn estimate_blowup<T: Real>(
    cfg: &FlowConfig<T>,
    init: &FlowState<T>,
    side: Side,
    horizon: T,
    settings: &IntegratorSettings<T>,
) -> Result<BlowupSearch<T>> {
    if !(horizon > T::zero()) {
        return Err(Error::Settings("search horizon must be positive".into()));
    }
    let t_end = match side {
        Side::Past => init.t - horizon,
        Side::Future => init.t + horizon,
    };
    let traj = integrate(cfg, init, t_end, settings)?;
    match traj.terminated {
        Termination::BlowUpDetected => {
            let (lo, hi) = traj.span();
            let time = if side == Side::Past { lo } else { hi };
            Ok(BlowupSearch::Finite(BlowupEstimate { time, distance: (time - init.t).abs(), side }))
        }
        Termination::ReachedEnd => Ok(BlowupSearch::Open { horizon }),
        Termination::StepBudget => Err(Error::Settings(
            "step budget exhausted before reaching the horizon or a singularity".into(),
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftEntry<T> {
    pub invariant: Invariant,
    /// Value at the initial state.
    pub reference: T,
    pub max_abs_drift: T,
    /// `max |F(t) - F(0)| / |F(0)|`; equals the absolute drift when `F(0) = 0`.
    pub max_rel_drift: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftReport<T> {
    pub entries: Vec<DriftEntry<T>>,
    /// `(sample index, invariant)` pairs where the functional is undefined.
    pub undefined: Vec<(usize, Invariant)>,
}

impl<T: Real> DriftReport<T> {
    pub fn max_rel_drift(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, e| m.max(e.max_rel_drift))
    }

    pub fn get(&self, inv: Invariant) -> Option<&DriftEntry<T>> {
        self.entries.iter().find(|e| e.invariant == inv)
    }
}

/// Drift of each functional over the trajectory samples, relative to its
/// value at the initial state.
pub fn check_invariants<T: Real>(traj: &Trajectory<T>, invariants: &[Invariant]) -> Result<DriftReport<T>> {
    let mut entries = Vec::with_capacity(invariants.len());
    let mut undefined = Vec::new();
    for &inv in invariants {
        let Some(reference) = inv.eval(&traj.initial) else {
            return Err(Error::Domain(format!("{} is undefined at the initial state", inv.name())));
        };
        let mut max_abs = T::zero();
        for (i, jet) in traj.samples().iter().enumerate() {
            match inv.eval(&jet.state) {
                Some(v) => max_abs = max_abs.max((v - reference).abs()),
                None => undefined.push((i, inv)),
            }
        }
        let max_rel = if reference.is_zero() { max_abs } else { max_abs / reference.abs() };
        entries.push(DriftEntry { invariant: inv, reference, max_abs_drift: max_abs, max_rel_drift: max_rel });
    }
    Ok(DriftReport { entries, undefined })
}

/// Fixed-step Dormand-Prince endpoint, for order checks.
#[cfg(test)]
pub(crate) fn fixed_step_endpoint<T: Real>(cfg: &FlowConfig<T>, init: &FlowState<T>, t_end: T, n: usize) -> Vec3<T> {
    let settings = IntegratorSettings::default();
    let stepper = Stepper { cfg, settings: &settings };
    let h = (t_end - init.t) / T::from_usize(n).unwrap();
    let mut y = init.coeffs();
    let mut t = init.t;
    let mut k1 = stepper.rhs(t, &y).unwrap();
    for _ in 0..n {
        let res = stepper.step(t, &y, &k1, h).unwrap();
        y = res.y_new;
        k1 = res.k_last;
        t = t + h;
    }
    y
}
