//! Standard and confluent Darboux transformations of `Φ'' + (ε - U) Φ = 0`.
//!
//! Derivatives of transformation functions beyond the first are never sampled:
//! each `f^{(k)}` is rewritten as `Σ a_i u_i + b_i u_i'` by repeated use of the
//! governing equation, with the coefficients carried as derivative jets of `U`.

use std::sync::Arc;

use crate::error::{check_finite, Error, Result};
use crate::model::Residual;
use crate::numerics::{derivative, parameter_derivative, Steps};
use crate::pointmap::SchrodingerForm;
use crate::RealFn;

/// Largest chain length handled.
pub const MAX_ORDER: usize = 4;

/// Default Wronskian floor relative to the Hadamard bound of its matrix.
pub const DEFAULT_FLOOR: f64 = 1e-12;

/// Background potential `U(y)` at fixed energy, with derivatives.
pub trait Background: Send + Sync {
    /// `[U, U', …, U^{(order)}]` at `y`.
    fn jet(&self, y: f64, order: usize) -> Result<Vec<f64>>;

    fn value(&self, y: f64) -> Result<f64> {
        Ok(self.jet(y, 0)?[0])
    }
}

/// `U(y) = c + Σ c_k e^{r_k y}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    pub constant: f64,
    pub terms: Vec<(f64, f64)>,
}

impl Background for ExpSum {
    fn jet(&self, y: f64, order: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; order + 1];
        out[0] = self.constant;
        for &(c, r) in &self.terms {
            let e = c * (r * y).exp();
            let mut rk = 1.0;
            for slot in out.iter_mut() {
                *slot += e * rk;
                rk *= r;
            }
        }
        for v in &out {
            check_finite(y, *v, "background jet")?;
        }
        Ok(out)
    }
}

/// A [`SchrodingerForm`] frozen at energy `E`; derivatives up to third order by stencils.
#[derive(Clone)]
pub struct SampledBackground {
    pub form: SchrodingerForm,
    pub energy: f64,
    pub steps: Steps,
}

impl Background for SampledBackground {
    fn jet(&self, y: f64, order: usize) -> Result<Vec<f64>> {
        if order > 3 {
            return Err(Error::Capability(format!("sampled background supports derivatives up to 3, asked for {order}")));
        }
        let f = |t: f64| self.form.potential(self.energy, t);
        let mut out = vec![check_finite(y, f(y), "background")?];
        for k in 1..=order {
            out.push(derivative(f, y, k, self.steps.spatial_at(k, y))?);
        }
        Ok(out)
    }
}

/// A solution `u` with its derivative, tagged with its spectral parameter.
#[derive(Clone)]
pub struct TransformationFunction {
    pub u: RealFn,
    pub du: RealFn,
    pub eps: f64,
}

impl TransformationFunction {
    pub fn new(u: RealFn, du: RealFn, eps: f64) -> Self {
        Self { u, du, eps }
    }
}

impl std::fmt::Debug for TransformationFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformationFunction").field("eps", &self.eps).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    /// Distinct energies; `u_j'' = (U - ε_j) u_j`.
    Standard,
    /// One energy; `u_1'' = (U - ε) u_1`, `u_j'' = (U - ε) u_j - u_{j-1}`.
    Confluent,
}

/// Transformation functions over a fixed background.
#[derive(Clone)]
pub struct DarbouxChain {
    pub kind: ChainKind,
    pub funcs: Vec<TransformationFunction>,
    pub background: Arc<dyn Background>,
    pub floor: f64,
}

impl std::fmt::Debug for DarbouxChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DarbouxChain")
            .field("kind", &self.kind)
            .field("eps", &self.eps())
            .finish()
    }
}

struct Column<'a> {
    u: &'a RealFn,
    du: &'a RealFn,
    eps: f64,
    coupled: Option<usize>,
}

fn jet_deriv(a: &[f64]) -> Vec<f64> {
    let mut out = a[1..].to_vec();
    out.push(0.0);
    out
}

// Leibniz product; entries past the shorter input are left at zero.
fn jet_mul(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    let avail = a.len().min(b.len()).min(len);
    for (k, slot) in out.iter_mut().enumerate().take(avail) {
        let mut binom = 1.0;
        let mut s = 0.0;
        for i in 0..=k {
            s += binom * a[i] * b[k - i];
            binom = binom * (k - i) as f64 / (i + 1) as f64;
        }
        *slot = s;
    }
    out
}

fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap_or(c);
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            if f != 0.0 {
                for k in c..n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    det
}

/// `W`, `W'`, `W''` and the Hadamard bound of the Wronskian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WronskianJet {
    pub w: f64,
    pub w1: f64,
    pub w2: f64,
    pub hadamard: f64,
}

impl DarbouxChain {
    /// The identity transformation.
    pub fn empty(background: Arc<dyn Background>) -> Self {
        Self {
            kind: ChainKind::Standard,
            funcs: Vec::new(),
            background,
            floor: DEFAULT_FLOOR,
        }
    }

    /// Builds a chain without residual validation.
    pub fn unchecked(
        kind: ChainKind,
        funcs: Vec<TransformationFunction>,
        background: Arc<dyn Background>,
    ) -> Result<Self> {
        if funcs.len() > MAX_ORDER {
            return Err(Error::Capability(format!("chain order {} exceeds {MAX_ORDER}", funcs.len())));
        }
        match kind {
            ChainKind::Standard => {
                for (i, a) in funcs.iter().enumerate() {
                    if funcs[..i].iter().any(|b| b.eps == a.eps) {
                        return Err(Error::Contract(format!("repeated transformation energy {}", a.eps)));
                    }
                }
            }
            ChainKind::Confluent => {
                if funcs.iter().any(|f| f.eps != funcs[0].eps) {
                    return Err(Error::Contract("confluent chain needs a single transformation energy".into()));
                }
            }
        }
        Ok(Self { kind, funcs, background, floor: DEFAULT_FLOOR })
    }

    /// Builds a chain and checks every member against its equation on `validation`.
    pub fn validated(
        kind: ChainKind,
        funcs: Vec<TransformationFunction>,
        background: Arc<dyn Background>,
        validation: &[f64],
        tol: f64,
    ) -> Result<Self> {
        let chain = Self::unchecked(kind, funcs, background)?;
        let res = chain.member_residuals(validation)?;
        for (j, r) in res.iter().enumerate() {
            if !(*r <= tol) {
                return Err(Error::Construction(format!(
                    "transformation function {} has relative residual {r:e} (tolerance {tol:e})",
                    j + 1
                )));
            }
        }
        Ok(chain)
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn order(&self) -> usize {
        self.funcs.len()
    }

    pub fn eps(&self) -> Vec<f64> {
        self.funcs.iter().map(|f| f.eps).collect()
    }

    fn coupling(&self, j: usize) -> Option<usize> {
        match self.kind {
            ChainKind::Confluent if j > 0 => Some(j - 1),
            _ => None,
        }
    }

    /// Sup over `nodes` of each member's residual `u'' - (U - ε) u (+ u_{j-1})`,
    /// relative to the sup of the terms. `u''` is a first-derivative stencil on `u'`.
    pub fn member_residuals(&self, nodes: &[f64]) -> Result<Vec<f64>> {
        let steps = Steps::default();
        let mut out = Vec::with_capacity(self.funcs.len());
        for (j, f) in self.funcs.iter().enumerate() {
            let (mut worst, mut scale) = (0.0_f64, 0.0_f64);
            for &y in nodes {
                let u2 = derivative(|t| (f.du)(t), y, 1, steps.spatial_at(1, y))?;
                let k = (self.background.value(y)? - f.eps) * (f.u)(y);
                let c = self.coupling(j).map_or(0.0, |i| (self.funcs[i].u)(y));
                let r = check_finite(y, u2 - k + c, "chain residual")?;
                worst = worst.max(r.abs());
                scale = scale.max(u2.abs()).max(k.abs()).max(c.abs());
            }
            out.push(if scale == 0.0 { worst } else { worst / scale });
        }
        Ok(out)
    }

    fn columns<'a>(&'a self, extra: Option<&'a TransformationFunction>) -> Vec<Column<'a>> {
        let mut cols: Vec<Column<'a>> = self
            .funcs
            .iter()
            .enumerate()
            .map(|(j, f)| Column { u: &f.u, du: &f.du, eps: f.eps, coupled: self.coupling(j) })
            .collect();
        if let Some(f) = extra {
            cols.push(Column { u: &f.u, du: &f.du, eps: f.eps, coupled: None });
        }
        cols
    }

    /// `table[k][j] = f_j^{(k)}(y)` for `k ≤ max_order`.
    fn derivative_table(&self, cols: &[Column<'_>], y: f64, max_order: usize) -> Result<Vec<Vec<f64>>> {
        let n = cols.len();
        let len = max_order + 1;
        let vals: Vec<f64> = cols.iter().map(|c| (c.u)(y)).collect();
        let ders: Vec<f64> = cols.iter().map(|c| (c.du)(y)).collect();
        for (v, d) in vals.iter().zip(&ders) {
            check_finite(y, *v, "transformation function")?;
            check_finite(y, *d, "transformation function derivative")?;
        }
        let ujet = if max_order >= 2 { self.background.jet(y, max_order - 2)? } else { Vec::new() };
        let mut table = vec![vec![0.0; n]; len];
        for (j, _) in cols.iter().enumerate() {
            let mut a = vec![vec![0.0; len]; n];
            let mut b = vec![vec![0.0; len]; n];
            a[j][0] = 1.0;
            for (k, row) in table.iter_mut().enumerate() {
                row[j] = (0..n).map(|i| a[i][0] * vals[i] + b[i][0] * ders[i]).sum();
                if k == max_order {
                    break;
                }
                let mut na: Vec<Vec<f64>> = Vec::with_capacity(n);
                let mut nb: Vec<Vec<f64>> = Vec::with_capacity(n);
                for i in 0..n {
                    let mut shifted = ujet.clone();
                    if let Some(s) = shifted.first_mut() {
                        *s -= cols[i].eps;
                    }
                    let mut ai = jet_deriv(&a[i]);
                    for (x, p) in ai.iter_mut().zip(jet_mul(&b[i], &shifted, len)) {
                        *x += p;
                    }
                    let bi: Vec<f64> = a[i].iter().zip(jet_deriv(&b[i])).map(|(x, y)| x + y).collect();
                    na.push(ai);
                    nb.push(bi);
                }
                for i in 0..n {
                    if let Some(c) = cols[i].coupled {
                        for (x, bb) in na[c].iter_mut().zip(&b[i]) {
                            *x -= bb;
                        }
                    }
                }
                a = na;
                b = nb;
            }
        }
        Ok(table)
    }

    fn wronskian_jet_of(&self, cols: &[Column<'_>], y: f64) -> Result<WronskianJet> {
        let m = cols.len();
        if m == 0 {
            return Ok(WronskianJet { w: 1.0, w1: 0.0, w2: 0.0, hadamard: 1.0 });
        }
        if m > MAX_ORDER + 1 {
            return Err(Error::Capability(format!("Wronskian of {m} functions exceeds the supported size")));
        }
        let t = self.derivative_table(cols, y, m + 1)?;
        let pick = |rows: &[usize]| determinant(rows.iter().map(|&r| t[r].clone()).collect());
        let base: Vec<usize> = (0..m).collect();
        let w = pick(&base);
        let mut r1 = base.clone();
        r1[m - 1] = m;
        let w1 = pick(&r1);
        let w2 = if m == 1 {
            t[2][0]
        } else {
            let mut ra = base.clone();
            ra[m - 2] = m - 1;
            ra[m - 1] = m;
            let mut rb = base.clone();
            rb[m - 1] = m + 1;
            pick(&ra) + pick(&rb)
        };
        let hadamard = (0..m)
            .map(|j| (0..m).map(|k| t[k][j] * t[k][j]).sum::<f64>().sqrt())
            .product();
        Ok(WronskianJet { w, w1, w2, hadamard })
    }

    /// `W_{u_1..u_n}` and its first two derivatives at `y`.
    pub fn wronskian_jet(&self, y: f64) -> Result<WronskianJet> {
        self.wronskian_jet_of(&self.columns(None), y)
    }

    /// `W_{u_1..u_n}(y)`, or `W_{u_1..u_n,Φ}(y)` when `include` is given.
    pub fn wronskian(&self, y: f64, include: Option<&TransformationFunction>) -> Result<f64> {
        Ok(self.wronskian_jet_of(&self.columns(include), y)?.w)
    }

    fn checked_denominator(&self, y: f64) -> Result<WronskianJet> {
        let j = self.wronskian_jet(y)?;
        let floor = self.floor * j.hadamard;
        if !(j.w.abs() > floor) {
            return Err(Error::Singularity { at: y, wronskian: j.w, floor });
        }
        Ok(j)
    }

    /// `Û = U - 2 (log W)''`.
    pub fn transformed_potential(&self, y: f64) -> Result<f64> {
        let u = self.background.value(y)?;
        if self.funcs.is_empty() {
            return Ok(u);
        }
        let j = self.checked_denominator(y)?;
        check_finite(y, u - 2.0 * (j.w2 * j.w - j.w1 * j.w1) / (j.w * j.w), "transformed potential")
    }

    /// `Φ̂ = W_{u_1..u_n,Φ} / W_{u_1..u_n}`.
    pub fn transformed_solution(&self, phi: &TransformationFunction, y: f64) -> Result<f64> {
        Ok(self.transformed_solution_with_derivative(phi, y)?.0)
    }

    /// `(Φ̂, Φ̂')` from the jets of both Wronskians.
    pub fn transformed_solution_with_derivative(&self, phi: &TransformationFunction, y: f64) -> Result<(f64, f64)> {
        if self.funcs.is_empty() {
            return Ok(((phi.u)(y), (phi.du)(y)));
        }
        let den = self.checked_denominator(y)?;
        let num = self.wronskian_jet_of(&self.columns(Some(phi)), y)?;
        let v = num.w / den.w;
        let d = (num.w1 * den.w - num.w * den.w1) / (den.w * den.w);
        Ok((check_finite(y, v, "transformed solution")?, check_finite(y, d, "transformed solution derivative")?))
    }

    /// Samples `Φ̂` and `Û` over `nodes`.
    pub fn apply(&self, phi: &TransformationFunction, nodes: &[f64]) -> Result<DarbouxOutput> {
        let mut out = DarbouxOutput {
            nodes: nodes.to_vec(),
            phi_hat: Vec::with_capacity(nodes.len()),
            u_hat: Vec::with_capacity(nodes.len()),
            wronskian_floor: f64::INFINITY,
        };
        for &y in nodes {
            out.phi_hat.push(self.transformed_solution(phi, y)?);
            out.u_hat.push(self.transformed_potential(y)?);
            if !self.funcs.is_empty() {
                out.wronskian_floor = out.wronskian_floor.min(self.wronskian(y, None)?.abs());
            }
        }
        Ok(out)
    }

    /// `Φ̂'' + (ε - Û) Φ̂` at `y`, with ε the spectral parameter carried by `phi`
    /// and scale `|Φ̂| + |Φ̂''|`. The second derivative is a first-derivative
    /// stencil on the analytic `Φ̂'`, its step shrunk to a small fraction of
    /// `|W/W'|` (the local distance to a pole of `Φ̂`).
    pub fn intertwining_residual(&self, phi: &TransformationFunction, y: f64) -> Result<Residual> {
        let mut h = Steps::default().spatial_at(1, y);
        if !self.funcs.is_empty() {
            let j = self.wronskian_jet(y)?;
            if j.w1 != 0.0 {
                h = h.min(0.01 * (j.w / j.w1).abs());
            }
        }
        let spectral = phi.eps;
        let (v, _) = self.transformed_solution_with_derivative(phi, y)?;
        let d2 = derivative(
            |t| self.transformed_solution_with_derivative(phi, t).map_or(f64::NAN, |p| p.1),
            y,
            1,
            h,
        )?;
        let uh = self.transformed_potential(y)?;
        let value = check_finite(y, d2 + (spectral - uh) * v, "intertwining residual")?;
        Ok(Residual { value, scale: v.abs() + d2.abs() })
    }
}

/// Transformed solution and potential sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxOutput {
    pub nodes: Vec<f64>,
    pub phi_hat: Vec<f64>,
    pub u_hat: Vec<f64>,
    /// Smallest `|W|` met on the grid.
    pub wronskian_floor: f64,
}

/// A one-parameter solution family `ε ↦ (Φ_ε(y), Φ_ε'(y))`.
pub type SolutionFamily = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;

/// `u_1 = Φ_{ε_1}` and `u_2 = ∂Φ_ε/∂ε |_{ε_1}`, both channels by the ε-stencil.
pub fn confluent_pair(family: SolutionFamily, eps1: f64) -> [TransformationFunction; 2] {
    let h = Steps::default().parameter_at(eps1);
    let (f0, f1) = (family.clone(), family.clone());
    let u1 = TransformationFunction::new(
        Arc::new(move |y| f0(eps1, y).0),
        Arc::new(move |y| f1(eps1, y).1),
        eps1,
    );
    let (g0, g1) = (family.clone(), family);
    let u2 = TransformationFunction::new(
        Arc::new(move |y| parameter_derivative(|e, t| g0(e, t).0, eps1, y, h).unwrap_or(f64::NAN)),
        Arc::new(move |y| parameter_derivative(|e, t| g1(e, t).1, eps1, y, h).unwrap_or(f64::NAN)),
        eps1,
    );
    [u1, u2]
}

/// Confluent chain `u_1 = Φ_{ε_1}`, `u_2 = ∂Φ_ε/∂ε |_{ε_1}`, validated on `validation`.
pub fn build_confluent_chain(
    family: SolutionFamily,
    eps1: f64,
    order: usize,
    background: Arc<dyn Background>,
    validation: &[f64],
    tol: f64,
) -> Result<DarbouxChain> {
    if order != 2 {
        return Err(Error::Capability(format!("confluent chains are built for order 2 only, asked for {order}")));
    }
    let [u1, u2] = confluent_pair(family, eps1);
    let s1 = validation.iter().fold(0.0_f64, |m, &y| m.max((u1.u)(y).abs()));
    let s2 = validation.iter().fold(0.0_f64, |m, &y| m.max((u2.u)(y).abs()));
    if !(s2 > 1e-12 * s1) {
        return Err(Error::Construction("solution family does not depend on the energy; u_2 vanishes".into()));
    }
    DarbouxChain::validated(ChainKind::Confluent, vec![u1, u2], background, validation, tol)
}
