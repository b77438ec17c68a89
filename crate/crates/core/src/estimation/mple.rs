//! Maximum pseudo-likelihood: logistic regression of each free dyad's
//! observed state on its change scores at the observed phase network.
//! For dyad-independent models this is the exact conditional MLE.

use nalgebra::{DMatrix, DVector};

use super::data::PhaseData;
use super::layout::ParamLayout;

/// Coefficients are clamped to this magnitude; larger values only arise
/// from separated data, which the MC-MLE stage reports as degenerate.
const MAX_COEF: f64 = 30.0;

pub(crate) struct DesignRow {
    pub x: Vec<f64>,
    pub y: bool,
}

pub(crate) fn design(data: &PhaseData, layout: &ParamLayout) -> Vec<DesignRow> {
    let k = data.model.dim();
    let mut delta = vec![0.0; k];
    let mut rows = Vec::new();
    for (t, obs) in data.observations.iter().enumerate() {
        let mut y = obs.observed.clone();
        for &d in &obs.space.free {
            let present = y.has(d);
            // change score of adding d, evaluated with d absent
            if present {
                y.toggle(d);
            }
            data.model.delta_on(&y, &obs.space.anchor, d, &mut delta);
            if present {
                y.toggle(d);
            }
            rows.push(DesignRow {
                x: layout.project(t, &delta),
                y: present,
            });
        }
    }
    rows
}

/// Newton–Raphson (IRLS) fit of the pseudo-likelihood. Returns zeros for
/// coordinates the data cannot inform.
pub fn mple(data: &PhaseData, layout: &ParamLayout) -> Vec<f64> {
    let p = layout.dim();
    let rows = design(data, layout);
    let mut theta = DVector::<f64>::zeros(p);
    if p == 0 || rows.is_empty() {
        return theta.as_slice().to_vec();
    }
    for _ in 0..100 {
        let mut grad = DVector::<f64>::zeros(p);
        let mut hess = DMatrix::<f64>::zeros(p, p);
        for r in &rows {
            let x = DVector::from_column_slice(&r.x);
            let mu = logistic(x.dot(&theta));
            grad.axpy((r.y as u8 as f64) - mu, &x, 1.0);
            hess.ger(mu * (1.0 - mu), &x, &x, 1.0);
        }
        // a small ridge keeps separated or collinear designs solvable
        for i in 0..p {
            hess[(i, i)] += 1e-9;
        }
        let step = match hess.clone().cholesky() {
            Some(c) => c.solve(&grad),
            None => break,
        };
        theta += &step;
        theta.apply(|v| *v = v.clamp(-MAX_COEF, MAX_COEF));
        if step.amax() < 1e-10 {
            break;
        }
    }
    theta.as_slice().to_vec()
}

#[inline]
pub(crate) fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
