//! Eigenstates of M_κ(A), semiclassical measures of states, Husimi densities
//! on grids, and Egorov-drift measurements for eigenstate-induced measures.

use crate::error::{QcatError, Result};
use crate::linalg::{self, C};
use crate::quantization::{anti_wick, op_plus, weyl, TrigObservable};
use crate::symplectic::{AdaptedFrame, IntSymplecticMatrix};
use crate::torus::{coherent_state, QuantumTorus, TorusOperator, TorusState};
use ndarray::Array1;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct EigenData {
    pub eigenphases: Array1<f64>,
    pub eigenvectors: linalg::CMat,
    pub residuals: Vec<f64>,
}

/// Full spectral decomposition of a unitary operator; deterministic ordering
/// by eigenphase with a first-significant-component tie-break, orthonormal
/// bases inside degenerate clusters.
pub fn eigensystem(m: &TorusOperator) -> Result<EigenData> {
    let ud = m.unitarity_defect();
    if ud > 1e-10 {
        return Err(QcatError::Validation(format!(
            "eigensystem input not unitary: defect {ud:.3e}"
        )));
    }
    let (phases, vecs) = linalg::unitary_eig(&m.matrix);
    let n = m.matrix.nrows();
    let mut residuals = Vec::with_capacity(n);
    for c in 0..n {
        let v = vecs.column(c).to_owned();
        let mv = m.matrix.dot(&v);
        let lam = C::from_polar(1.0, phases[c]);
        let res = mv
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - lam * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if res > 1e-8 {
            return Err(QcatError::DecompositionFailure(format!(
                "residual {res:.3e} at column {c}"
            )));
        }
        residuals.push(res);
    }
    Ok(EigenData {
        eigenphases: phases,
        eigenvectors: vecs,
        residuals,
    })
}

impl EigenData {
    pub fn state(&self, idx: usize, qt: &QuantumTorus) -> TorusState {
        TorusState {
            coeffs: self.eigenvectors.column(idx).to_owned(),
            qt: qt.clone(),
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        let g = linalg::mul_ah_b(&self.eigenvectors, &self.eigenvectors);
        linalg::max_abs(&(&g - &linalg::ident(self.eigenvectors.nrows())))
    }
}

/// Multiplicative order of A modulo N (classical period of the cat map).
pub fn classical_period(a: &IntSymplecticMatrix, n: u64, cap: u64) -> Option<u64> {
    let side = a.side();
    let modn = |m: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        m.iter()
            .map(|row| row.iter().map(|x| x.rem_euclid(n as i64)).collect())
            .collect()
    };
    let ident: Vec<Vec<i64>> = (0..side)
        .map(|i| (0..side).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut acc = modn(&a.entries);
    for p in 1..=cap {
        if acc == ident {
            return Some(p);
        }
        // acc = acc·A mod N
        let mut next = vec![vec![0i64; side]; side];
        for i in 0..side {
            for j in 0..side {
                let mut s = 0i64;
                for k in 0..side {
                    s += acc[i][k] * a.entries[k][j];
                }
                next[i][j] = s.rem_euclid(n as i64);
            }
        }
        acc = next;
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantizer {
    Weyl,
    AntiWick,
    OpPlus,
}

impl std::str::FromStr for Quantizer {
    type Err = QcatError;
    fn from_str(s: &str) -> Result<Quantizer> {
        match s {
            "weyl" => Ok(Quantizer::Weyl),
            "anti_wick" | "anti-wick" => Ok(Quantizer::AntiWick),
            "op_plus" | "op-plus" => Ok(Quantizer::OpPlus),
            _ => Err(QcatError::Validation(format!("unknown quantizer {s:?}"))),
        }
    }
}

pub fn quantize(
    qt: &QuantumTorus,
    a: &TrigObservable,
    quantizer: Quantizer,
    frame: Option<&AdaptedFrame>,
    aw_grid: usize,
    allow_alias: bool,
) -> Result<TorusOperator> {
    match quantizer {
        Quantizer::Weyl => weyl(qt, a, allow_alias),
        Quantizer::AntiWick => anti_wick(qt, a, aw_grid),
        Quantizer::OpPlus => {
            let frame = frame.ok_or_else(|| {
                QcatError::Validation("op_plus needs an adapted frame".into())
            })?;
            op_plus(qt, a, frame, allow_alias)
        }
    }
}

/// ⟨ψ|Op(a)|ψ⟩ for the chosen quantizer.
pub fn measure_of_state(
    qt: &QuantumTorus,
    psi: &TorusState,
    quantizer: Quantizer,
    a: &TrigObservable,
    frame: Option<&AdaptedFrame>,
    aw_grid: usize,
) -> Result<C> {
    if (psi.norm() - 1.0).abs() > 1e-10 {
        return Err(QcatError::Validation("state must be unit-norm".into()));
    }
    let op = quantize(qt, a, quantizer, frame, aw_grid, false)?;
    Ok(op.expectation(psi))
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureGrid {
    pub resolution: usize,
    pub d: usize,
    /// row-major over the 2d-torus grid (d = 1: x rows, ξ columns)
    pub density: Vec<f64>,
    pub total: f64,
}

/// Husimi density N^d|⟨ψ|ρ,κ⟩|² on a midpoint grid, normalized to total 1.
pub fn husimi_grid(qt: &QuantumTorus, psi: &TorusState, resolution: usize) -> Result<MeasureGrid> {
    if qt.d != 1 {
        return Err(QcatError::Validation("husimi_grid implemented for d = 1".into()));
    }
    let g = resolution;
    let mut density = Vec::with_capacity(g * g);
    let mut total_raw = 0.0f64;
    for i in 0..g {
        let x = (i as f64 + 0.5) / g as f64;
        for j in 0..g {
            let xi = (j as f64 + 0.5) / g as f64;
            let coh = coherent_state(qt, &[x, xi], 1e-14)?;
            let ov = coh.inner(psi).norm_sqr() * qt.n as f64;
            density.push(ov);
            total_raw += ov;
        }
    }
    let cell = 1.0 / (g * g) as f64;
    let total = total_raw * cell;
    for v in density.iter_mut() {
        *v /= total;
    }
    Ok(MeasureGrid {
        resolution: g,
        d: qt.d,
        density,
        total: 1.0,
    })
}

impl MeasureGrid {
    /// ∫ a dμ by the midpoint rule over the stored grid.
    pub fn integrate(&self, a: &TrigObservable) -> C {
        let g = self.resolution;
        let cell = 1.0 / (g * g) as f64;
        let mut s = C::new(0.0, 0.0);
        for i in 0..g {
            let x = (i as f64 + 0.5) / g as f64;
            for j in 0..g {
                let xi = (j as f64 + 0.5) / g as f64;
                s += a.value(&[x, xi]) * self.density[i * g + j] * cell;
            }
        }
        s
    }
}

/// |μ^N(a∘Aᵗ) − μ^N(a)| per t for an eigenstate ψ.
pub fn egorov_drift(
    qt: &QuantumTorus,
    psi: &TorusState,
    a: &TrigObservable,
    mat: &IntSymplecticMatrix,
    quantizer: Quantizer,
    frame: Option<&AdaptedFrame>,
    aw_grid: usize,
    t_max: i64,
) -> Result<Vec<f64>> {
    let base = measure_of_state(qt, psi, quantizer, a, frame, aw_grid)?;
    let mut out = Vec::new();
    for t in 0..=t_max {
        let at = a.compose(mat, t);
        let m = measure_of_state(qt, psi, quantizer, &at, frame, aw_grid)?;
        out.push((m - base).norm());
    }
    Ok(out)
}
