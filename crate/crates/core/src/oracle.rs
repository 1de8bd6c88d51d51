//! Independent curvature engine for diagonal metrics
//! `dt^2 + e1 f1^2 (th1)^2 + e2 f2^2 (th2)^2 + e3 f3^2 (th3)^2`.
//!
//! Everything here comes from Koszul's formula and the bracket relations
//! `[F2, F3] = n1 F1`, `[F3, F1] = n2 F2`, `[F1, F2] = n3 F3`, with
//! `[F0, Fi] = 0`. None of the closed-form curvature expressions in
//! [`crate::spacetime`] are consulted, which is what makes the results
//! usable as a cross-check.

use crate::error::Result;
use crate::flow::{check_nonzero, FlowJet};
use crate::lie::{Group, SignPattern};
use crate::scalar::{frac, int, lit, Field, Real};
use crate::spacetime::{ConnectionTable, SectionalCurvatures};

type Tensor3<T> = [[[T; 4]; 4]; 4];
type Tensor4<T> = [[[[T; 4]; 4]; 4]; 4];

/// Metric coefficients with their first two time derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameMetricJet<T> {
    /// Bracket constants `(n1, n2, n3)`.
    pub structure: [T; 3],
    pub signs: SignPattern,
    pub f: [T; 3],
    pub df: [T; 3],
    pub ddf: [T; 3],
}

impl<T: Field> FrameMetricJet<T> {
    pub fn new(structure: [T; 3], signs: SignPattern, f: [T; 3], df: [T; 3], ddf: [T; 3]) -> Self {
        FrameMetricJet { structure, signs, f, df, ddf }
    }

    /// Metric over `group` with coefficients taken from a flow jet.
    pub fn from_flow_jet(group: Group, signs: SignPattern, jet: &FlowJet<T>) -> Self {
        FrameMetricJet::new(group.structure(), signs, jet.state.coeffs(), jet.d1, jet.d2)
    }

    /// Diagonal metric entries and their first and second derivatives,
    /// indexed `0..4` with `F0 = d/dt` first.
    fn metric(&self) -> ([T; 4], [T; 4], [T; 4]) {
        let eps = self.signs.metric_signs::<T>();
        let two = int::<T>(2);
        let mut g = [T::one(); 4];
        let mut dg = [T::zero(); 4];
        let mut ddg = [T::zero(); 4];
        for i in 0..3 {
            let (f, df, ddf) = (self.f[i], self.df[i], self.ddf[i]);
            g[i + 1] = eps[i + 1] * f * f;
            dg[i + 1] = two * eps[i + 1] * f * df;
            ddg[i + 1] = two * eps[i + 1] * (df * df + f * ddf);
        }
        (g, dg, ddg)
    }

    /// `c[i][j][l]`: coefficient of `F_l` in `[F_i, F_j]`.
    fn brackets(&self) -> Tensor3<T> {
        let mut c = [[[T::zero(); 4]; 4]; 4];
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            c[j + 1][k + 1][i + 1] = self.structure[i];
            c[k + 1][j + 1][i + 1] = -self.structure[i];
        }
        c
    }
}

/// `g(nabla_{F_i} F_j, F_k)` by Koszul's formula for a diagonal metric `g`
/// whose only time derivative is `dg`.
fn koszul_lowered<T: Field>(g: &[T; 4], dg: &[T; 4], c: &Tensor3<T>) -> Tensor3<T> {
    let half = frac::<T>(1, 2);
    let delta = |a: usize, b: usize| if a == b { T::one() } else { T::zero() };
    let mut out = [[[T::zero(); 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let derivs = delta(i, 0) * delta(j, k) * dg[j] + delta(j, 0) * delta(k, i) * dg[k]
                    - delta(k, 0) * delta(i, j) * dg[i];
                let brackets = c[i][j][k] * g[k] - c[j][k][i] * g[i] - c[i][k][j] * g[j];
                out[i][j][k] = half * (derivs + brackets);
            }
        }
    }
    out
}

/// Connection coefficients and their time derivatives, both raised.
fn raised_connection<T: Field>(m: &FrameMetricJet<T>) -> Result<(Tensor3<T>, Tensor3<T>)> {
    check_nonzero(&m.f)?;
    let (g, dg, ddg) = m.metric();
    let c = m.brackets();
    let low = koszul_lowered(&g, &dg, &c);
    // Koszul is linear in the metric, so d/dt of the lowered symbols is the
    // same expression evaluated on the derivatives.
    let dlow = koszul_lowered(&dg, &ddg, &c);
    let mut gamma = [[[T::zero(); 4]; 4]; 4];
    let mut dgamma = [[[T::zero(); 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                gamma[i][j][k] = low[i][j][k] / g[k];
                dgamma[i][j][k] = dlow[i][j][k] / g[k] - low[i][j][k] * dg[k] / (g[k] * g[k]);
            }
        }
    }
    Ok((gamma, dgamma))
}

/// Levi-Civita connection from Koszul's formula.
pub fn oracle_connection<T: Field>(m: &FrameMetricJet<T>) -> Result<ConnectionTable<T>> {
    Ok(ConnectionTable { gamma: raised_connection(m)?.0 })
}

/// Frame components of the curvature operator
/// `R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannComponents<T> {
    /// `mixed[i][j][k][p]`: coefficient of `F_p` in `R(F_i, F_j) F_k`.
    pub mixed: Tensor4<T>,
    /// Diagonal metric entries `g(F_i, F_i)`.
    pub metric: [T; 4],
}

impl<T: Field> RiemannComponents<T> {
    /// `R_ijkl = g(R(F_i, F_j) F_k, F_l)`.
    pub fn lowered(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        self.mixed[i][j][k][l] * self.metric[l]
    }

    /// `Rc(F_j, F_k) = sum_i <coefficient of F_i in R(F_i, F_j) F_k>`.
    pub fn ricci(&self) -> [[T; 4]; 4] {
        std::array::from_fn(|j| std::array::from_fn(|k| (0..4).fold(T::zero(), |acc, i| acc + self.mixed[i][j][k][i])))
    }

    /// `<R(F_i, F_j) F_j, F_i> / (<F_i, F_i> <F_j, F_j>)`.
    pub fn sectional(&self, i: usize, j: usize) -> T {
        self.lowered(i, j, j, i) / (self.metric[i] * self.metric[j])
    }

    pub fn sectional_curvatures(&self) -> SectionalCurvatures<T> {
        SectionalCurvatures {
            k01: self.sectional(0, 1),
            k02: self.sectional(0, 2),
            k03: self.sectional(0, 3),
            k12: self.sectional(1, 2),
            k13: self.sectional(1, 3),
            k23: self.sectional(2, 3),
        }
    }

    /// Violations of `R_ijkl = -R_jikl = -R_ijlk = R_klij`.
    pub fn symmetry_residuals(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(3 * 256);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let r = self.lowered(i, j, k, l);
                        out.push(r + self.lowered(j, i, k, l));
                        out.push(r + self.lowered(i, j, l, k));
                        out.push(r - self.lowered(k, l, i, j));
                    }
                }
            }
        }
        out
    }

    /// Violations of `R_ijkl + R_jkil + R_kijl = 0`.
    pub fn bianchi_residuals(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(256);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        out.push(self.lowered(i, j, k, l) + self.lowered(j, k, i, l) + self.lowered(k, i, j, l));
                    }
                }
            }
        }
        out
    }
}

/// Full curvature of the metric described by `m`.
pub fn oracle_riemann<T: Field>(m: &FrameMetricJet<T>) -> Result<RiemannComponents<T>> {
    let (gamma, dgamma) = raised_connection(m)?;
    let c = m.brackets();
    let (g, _, _) = m.metric();
    let mut mixed = [[[[T::zero(); 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for p in 0..4 {
                    // only F0 differentiates the (time dependent) coefficients
                    let mut v = T::zero();
                    if i == 0 {
                        v = v + dgamma[j][k][p];
                    }
                    if j == 0 {
                        v = v - dgamma[i][k][p];
                    }
                    for q in 0..4 {
                        v = v + gamma[j][k][q] * gamma[i][q][p] - gamma[i][k][q] * gamma[j][q][p];
                        v = v - c[i][j][q] * gamma[q][k][p];
                    }
                    mixed[i][j][k][p] = v;
                }
            }
        }
    }
    Ok(RiemannComponents { mixed, metric: g })
}

/// First and second derivatives of `f` at `t` by central differences,
/// with steps scaled to `scale` (the typical size of `t`).
pub fn finite_difference_jet<T: Real>(f: impl Fn(T) -> [T; 3], t: T, scale: T) -> ([T; 3], [T; 3]) {
    let scale = scale.abs().max(T::one());
    let h1 = T::epsilon().cbrt() * scale;
    // the second difference loses precision as h^-2, so it needs a larger
    // step than the first difference
    let h2 = T::epsilon().sqrt().sqrt() * scale;
    let two = lit::<T>(2.0);
    let (p1, m1) = (f(t + h1), f(t - h1));
    let (p2, m2, c) = (f(t + h2), f(t - h2), f(t));
    let d1 = std::array::from_fn(|i| (p1[i] - m1[i]) / (two * h1));
    let d2 = std::array::from_fn(|i| (p2[i] - two * c[i] + m2[i]) / (h2 * h2));
    (d1, d2)
}
