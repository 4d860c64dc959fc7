//! Dormand–Prince 5(4) integration of autonomous systems.

use crate::poly::{rational_to_f64, Poly};

use super::FlowError;

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    /// Local error tolerance (absolute and relative).
    pub tol: f64,
    /// Integration stops with an escape error once `|x|∞` exceeds this.
    pub escape_radius: f64,
    pub max_steps: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig { tol: 1e-9, escape_radius: 1e6, max_steps: 1_000_000 }
    }
}

impl FlowConfig {
    pub fn with_tol(tol: f64) -> Self {
        FlowConfig { tol, ..Self::default() }
    }
}

/// Polynomial vector field with float coefficients, laid out for fast evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledField {
    dim: usize,
    comps: Vec<Vec<(Vec<u32>, f64)>>,
}

impl CompiledField {
    pub fn new(components: &[Poly]) -> Self {
        let dim = components.first().map_or(0, Poly::nvars);
        let comps = components
            .iter()
            .map(|p| p.terms().map(|(m, c)| (m.exponents().to_vec(), rational_to_f64(c))).collect())
            .collect();
        CompiledField { dim, comps }
    }

    /// `Σ cᵢ vᵢ` for fields on the same space.
    pub fn combination(fields: &[CompiledField], coeffs: &[f64]) -> Self {
        let dim = fields.first().map_or(0, |f| f.dim);
        let r = fields.first().map_or(0, |f| f.comps.len());
        let mut comps = vec![Vec::new(); r];
        for (f, &c) in fields.iter().zip(coeffs) {
            if c == 0.0 {
                continue;
            }
            for (a, comp) in f.comps.iter().enumerate() {
                comps[a].extend(comp.iter().map(|(e, v)| (e.clone(), v * c)));
            }
        }
        CompiledField { dim, comps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_components(&self) -> usize {
        self.comps.len()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, comp) in out.iter_mut().zip(&self.comps) {
            let mut s = 0.0;
            for (e, c) in comp {
                let mut t = *c;
                for (xi, &k) in x.iter().zip(e) {
                    if k > 0 {
                        t *= xi.powi(k as i32);
                    }
                }
                s += t;
            }
            *o = s;
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.comps.len()];
        self.eval_into(x, &mut out);
        out
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns the 5th-order solution and the error estimate.
fn dp_step<F: FnMut(&[f64], &mut [f64])>(f: &mut F, y: &[f64], h: f64, k: &mut [Vec<f64>; 7]) -> (Vec<f64>, Vec<f64>) {
    let n = y.len();
    let mut tmp = vec![0.0; n];
    f(y, &mut k[0]);
    for s in 1..7 {
        for i in 0..n {
            let mut acc = y[i];
            for (j, kj) in k.iter().take(s).enumerate() {
                acc += h * A[s][j] * kj[i];
            }
            tmp[i] = acc;
        }
        f(&tmp, &mut k[s]);
    }
    let mut y5 = vec![0.0; n];
    let mut err = vec![0.0; n];
    for i in 0..n {
        let mut s5 = 0.0;
        let mut s4 = 0.0;
        for s in 0..7 {
            s5 += B5[s] * k[s][i];
            s4 += B4[s] * k[s][i];
        }
        y5[i] = y[i] + h * s5;
        err[i] = h * (s5 - s4);
    }
    (y5, err)
}

/// Integrate `ẏ = f(y)` from `y0` over time `t` (either sign) with adaptive steps.
pub fn integrate<F: FnMut(&[f64], &mut [f64])>(mut f: F, y0: &[f64], t: f64, cfg: &FlowConfig) -> Result<Vec<f64>, FlowError> {
    if !t.is_finite() || y0.iter().any(|v| !v.is_finite()) {
        return Err(FlowError::NonFinite);
    }
    if t == 0.0 || y0.is_empty() {
        return Ok(y0.to_vec());
    }
    let n = y0.len();
    let dir = t.signum();
    let total = t.abs();
    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    let mut y = y0.to_vec();
    let mut done = 0.0_f64;
    let mut h = total.min(0.1);
    let min_h = 1e-14 * total.max(1.0);
    let mut steps = 0;
    while total - done > 1e-15 * total {
        if steps >= cfg.max_steps {
            return Err(FlowError::StepLimit { time: dir * done });
        }
        steps += 1;
        h = h.min(total - done);
        let (y5, e) = dp_step(&mut f, &y, dir * h, &mut k);
        let mut err = 0.0_f64;
        let mut finite = true;
        for i in 0..n {
            if !y5[i].is_finite() {
                finite = false;
                break;
            }
            let sc = cfg.tol * (1.0 + y[i].abs().max(y5[i].abs()));
            err = err.max((e[i] / sc).abs());
        }
        if !finite || err.is_nan() {
            h *= 0.2;
            if h < min_h {
                return Err(FlowError::FiniteEscape { time: dir * done });
            }
            continue;
        }
        if err <= 1.0 {
            done += h;
            y = y5;
            if y.iter().any(|v| v.abs() > cfg.escape_radius) {
                return Err(FlowError::FiniteEscape { time: dir * done });
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < min_h {
            return Err(FlowError::FiniteEscape { time: dir * done });
        }
    }
    Ok(y)
}

/// Fixed-step Dormand–Prince (5th-order solution), used to measure convergence order.
pub fn integrate_fixed<F: FnMut(&[f64], &mut [f64])>(mut f: F, y0: &[f64], t: f64, steps: usize) -> Vec<f64> {
    let n = y0.len();
    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    let h = t / steps as f64;
    let mut y = y0.to_vec();
    for _ in 0..steps {
        y = dp_step(&mut f, &y, h, &mut k).0;
    }
    y
}

/// Time-`t` flow of a polynomial vector field from `x0`.
pub fn flow(field: &CompiledField, x0: &[f64], t: f64, cfg: &FlowConfig) -> Result<Vec<f64>, FlowError> {
    if x0.len() != field.dim() {
        return Err(FlowError::DimensionMismatch { expected: field.dim(), found: x0.len() });
    }
    integrate(|y, out| field.eval_into(y, out), x0, t, cfg)
}
