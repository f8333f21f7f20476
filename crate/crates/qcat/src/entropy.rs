//! Classical KS-entropy estimation, quantum entropies h_{2m} and their
//! p-translated variants, the Maassen–Uffink entropic-uncertainty verifier,
//! the c(A,n) estimator, the subadditivity chain, and the end-to-end entropy
//! certificate built on the discretized resolution of identity.

use crate::error::{QcatError, Result};
use crate::linalg::{self, CMat, CVec, C};
use crate::quantization::{periodized_gaussian_op_with, GaussianFrame, MultiplierTable};
use crate::spectra::{MeasureGrid, Quantizer};
use crate::symplectic::{ehrenfest_times, lyapunov_data, AdaptedFrame, IntSymplecticMatrix};
use crate::torus::{translation_action, QuantumTorus, TorusOperator, TorusState, TWO_PI};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

/// η(x) = −x log x with η(0) = 0 (the entropy summand convention).
pub fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Band-limited function on T^{2d} in mode language:
/// a(ρ) = Σ_k c_k e^{2πi⟨k,ρ⟩}, k ∈ Z^{2d}.
#[derive(Debug, Clone)]
pub struct Symbol {
    pub modes: BTreeMap<Vec<i64>, C>,
    pub d: usize,
}

impl Symbol {
    pub fn one(d: usize) -> Symbol {
        let mut modes = BTreeMap::new();
        modes.insert(vec![0i64; 2 * d], C::new(1.0, 0.0));
        Symbol { modes, d }
    }

    pub fn mul(&self, other: &Symbol) -> Symbol {
        assert_eq!(self.d, other.d, "symbol dimension mismatch");
        let mut modes: BTreeMap<Vec<i64>, C> = BTreeMap::new();
        for (k1, c1) in &self.modes {
            for (k2, c2) in &other.modes {
                let k: Vec<i64> = k1.iter().zip(k2.iter()).map(|(a, b)| a + b).collect();
                *modes.entry(k).or_insert_with(|| C::new(0.0, 0.0)) += c1 * c2;
            }
        }
        modes.retain(|_, c| c.norm() > 1e-18);
        Symbol { modes, d: self.d }
    }

    /// a ∘ Aᵗ: modes map k ↦ (Aᵀ)ᵗ k.
    pub fn compose_pow(&self, a: &IntSymplecticMatrix, t: i64) -> Symbol {
        let at = a.int_pow(t);
        let n = at.side();
        let mut modes: BTreeMap<Vec<i64>, C> = BTreeMap::new();
        for (k, c) in &self.modes {
            let mut kk = vec![0i64; n];
            for (j, out) in kk.iter_mut().enumerate() {
                let mut s = 0i64;
                for i in 0..n {
                    s += at.entries[i][j] * k[i];
                }
                *out = s;
            }
            *modes.entry(kk).or_insert_with(|| C::new(0.0, 0.0)) += c;
        }
        Symbol { modes, d: self.d }
    }

    pub fn value(&self, rho: &[f64]) -> C {
        let mut s = C::new(0.0, 0.0);
        for (k, c) in &self.modes {
            let ang: f64 = k.iter().zip(rho.iter()).map(|(a, b)| *a as f64 * b).sum();
            s += c * C::from_polar(1.0, TWO_PI * ang);
        }
        s
    }

    /// ∫ a dLeb = the zero-mode coefficient (exact for band-limited symbols).
    pub fn mean(&self) -> f64 {
        self.modes
            .get(&vec![0i64; 2 * self.d])
            .map(|c| c.re)
            .unwrap_or(0.0)
    }

    pub fn band(&self) -> i64 {
        self.modes
            .keys()
            .flat_map(|k| k.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Translate to the r-indexed observable language (r = Jk).
    pub fn to_observable(&self) -> Result<crate::quantization::TrigObservable> {
        let d = self.d;
        let coeffs = self
            .modes
            .iter()
            .map(|(k, c)| {
                let mut r = vec![0i64; 2 * d];
                for cc in 0..d {
                    r[cc] = -k[d + cc];
                    r[d + cc] = k[cc];
                }
                (r, *c)
            })
            .collect();
        crate::quantization::TrigObservable::new(d, coeffs)
    }
}

/// Fejér value F_K(u)/K = (sin Kπu / (K sin πu))², the smooth bump of the
/// trigonometric partition of unity.
fn phi_val(k: usize, u: f64) -> f64 {
    let fu = u - u.floor();
    let dist = fu.min(1.0 - fu);
    if dist < 1e-9 {
        return 1.0;
    }
    let kf = k as f64;
    let s = (PI * fu).sin();
    let t = (kf * PI * fu).sin();
    (t * t) / (kf * kf * s * s)
}

/// φ_i = (1/K) F_K(x₁ − i/K) as a band-K−1 symbol in the x₁ coordinate.
fn fejer_symbol(k: usize, center: f64, d: usize) -> Symbol {
    let mut modes = BTreeMap::new();
    let kb = k as i64 - 1;
    for j in -kb..=kb {
        let amp = (1.0 - j.abs() as f64 / k as f64) / k as f64;
        let mut key = vec![0i64; 2 * d];
        key[0] = j;
        modes.insert(key, C::from_polar(amp, -TWO_PI * j as f64 * center));
    }
    Symbol { modes, d }
}

/// Smooth partition of unity {φ_i}: Σφ_i ≡ 1, φ_i ≥ 0, P_i = √φ_i.
/// Bumps live in the x₁ coordinate (cells of the projected K-cover).
#[derive(Debug, Clone)]
pub struct SmoothPartition {
    pub k: usize,
    pub delta0: f64,
    pub g: usize,
    pub d: usize,
    /// φ_i = P_i² as band-limited symbols
    pub phi: Vec<Symbol>,
    /// P_i sampled on the x₁ grid {t/G}
    pub samples: Vec<Vec<f64>>,
    pub sum_sq_defect: f64,
}

pub fn build_partition(k: usize, delta0: f64, g: usize, d: usize) -> Result<SmoothPartition> {
    if k < 2 {
        return Err(QcatError::Validation("partition needs K >= 2".into()));
    }
    if !(delta0 > 0.0 && delta0 < 0.5) {
        return Err(QcatError::Validation(format!(
            "support diameter delta0 = {delta0} must lie in (0, 1/2)"
        )));
    }
    if 2.0 * delta0 * k as f64 + 1e-12 < 1.0 {
        return Err(QcatError::Coverage(format!(
            "K = {k} cells of diameter 2·{delta0} cannot cover the circle"
        )));
    }
    if g < 4 * k {
        return Err(QcatError::Validation(format!(
            "grid resolution {g} too small for K = {k}"
        )));
    }
    let phi: Vec<Symbol> = (0..k).map(|i| fejer_symbol(k, i as f64 / k as f64, d)).collect();
    let mut samples: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..g)
                .map(|t| phi_val(k, t as f64 / g as f64 - i as f64 / k as f64).sqrt())
                .collect()
        })
        .collect();
    // final pointwise renormalization (a no-op up to rounding for Fejér bumps)
    for t in 0..g {
        let s: f64 = samples.iter().map(|p| p[t] * p[t]).sum();
        let r = s.sqrt();
        for p in samples.iter_mut() {
            p[t] /= r;
        }
    }
    let sum_sq_defect = (0..g)
        .map(|t| (samples.iter().map(|p| p[t] * p[t]).sum::<f64>() - 1.0).abs())
        .fold(0.0f64, f64::max);
    if sum_sq_defect > 1e-10 {
        return Err(QcatError::MathInvariant(format!(
            "partition of unity defect {sum_sq_defect:.3e} after renormalization"
        )));
    }
    Ok(SmoothPartition {
        k,
        delta0,
        g,
        d,
        phi,
        samples,
        sum_sq_defect,
    })
}

fn spectral_norm(a: &IntSymplecticMatrix) -> f64 {
    let n = a.side();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a.entries[i][j] as f64);
    m.svd(false, false).singular_values[0]
}

/// Cylinder data of the refinement P_α = Π_{j=−m}^{m−1} P_{α_j}∘A^j,
/// evaluated on the G×G grid (d = 1). For m = 0 the family is {P_i}.
#[derive(Debug, Clone)]
pub struct CylinderFamily {
    pub alphas: Vec<Vec<usize>>,
    /// grid means of P_α²
    pub leb: Vec<f64>,
    pub m: usize,
    /// max grid-point defect of Σ_α P_α² − 1
    pub sum_defect: f64,
}

pub fn refine(p: &SmoothPartition, a: &IntSymplecticMatrix, m: usize) -> Result<CylinderFamily> {
    if p.d != 1 || a.d != 1 {
        return Err(QcatError::Validation(
            "refine grid evaluation implemented for d = 1".into(),
        ));
    }
    if m == 0 {
        let alphas: Vec<Vec<usize>> = (0..p.k).map(|i| vec![i]).collect();
        let leb: Vec<f64> = p.phi.iter().map(|s| s.mean()).collect();
        return Ok(CylinderFamily {
            alphas,
            leb,
            m,
            sum_defect: p.sum_sq_defect,
        });
    }
    let guard = 4.0 * spectral_norm(a).powi(m as i32) * p.k as f64;
    if (p.g as f64) < guard {
        return Err(QcatError::RefinementAliasing(format!(
            "grid resolution {} < 4·||A||^m·K = {guard:.1}",
            p.g
        )));
    }
    let total = (p.k as f64).powi(2 * m as i32);
    if total > 1e6 {
        return Err(QcatError::ResourceBudget(format!(
            "K^(2m) = {total:.3e} cylinders exceed the enumeration budget"
        )));
    }
    let total = total as usize;
    let k = p.k;
    let g = p.g;
    // x₁-row of A^j for j = −m..m−1
    let rows: Vec<(f64, f64)> = (0..2 * m)
        .map(|lvl| {
            let aj = a.int_pow(lvl as i64 - m as i64);
            (aj.entries[0][0] as f64, aj.entries[0][1] as f64)
        })
        .collect();
    let mut leb = vec![0.0f64; total];
    let mut cur = vec![0.0f64; total];
    let mut next = vec![0.0f64; total];
    let mut phis = vec![vec![0.0f64; k]; 2 * m];
    let mut sum_defect = 0.0f64;
    for i in 0..g {
        let x = (i as f64 + 0.5) / g as f64;
        for j in 0..g {
            let xi = (j as f64 + 0.5) / g as f64;
            let mut sprod = 1.0;
            for (lvl, (ra, rb)) in rows.iter().enumerate() {
                let u = ra * x + rb * xi;
                let mut s = 0.0;
                for (c, slot) in phis[lvl].iter_mut().enumerate() {
                    let v = phi_val(k, u - c as f64 / k as f64);
                    *slot = v;
                    s += v;
                }
                sprod *= s;
            }
            sum_defect = sum_defect.max((sprod - 1.0).abs());
            cur[0] = 1.0;
            let mut len = 1usize;
            for lp in phis.iter() {
                for t in 0..len {
                    let base = cur[t];
                    for (c, pv) in lp.iter().enumerate() {
                        next[t * k + c] = base * pv;
                    }
                }
                std::mem::swap(&mut cur, &mut next);
                len *= k;
            }
            for (acc, v) in leb.iter_mut().zip(cur.iter()) {
                *acc += v;
            }
        }
    }
    let cell = 1.0 / (g * g) as f64;
    for v in leb.iter_mut() {
        *v *= cell;
    }
    let alphas: Vec<Vec<usize>> = (0..total)
        .map(|mut idx| {
            let mut alpha = vec![0usize; 2 * m];
            for slot in alpha.iter_mut().rev() {
                *slot = idx % k;
                idx /= k;
            }
            alpha
        })
        .collect();
    Ok(CylinderFamily {
        alphas,
        leb,
        m,
        sum_defect,
    })
}

/// P_α² = Π_{j=−m}^{m−1} φ_{α_j}∘A^{j+p} as a symbol (m = 0: φ_{α_0}∘A^p).
pub fn cylinder_symbol(
    p: &SmoothPartition,
    a: &IntSymplecticMatrix,
    alpha: &[usize],
    m: usize,
    p_shift: i64,
) -> Symbol {
    if m == 0 {
        return p.phi[alpha[0]].compose_pow(a, p_shift);
    }
    let mut sym = Symbol::one(p.d);
    for (idx, &ai) in alpha.iter().enumerate() {
        let j = idx as i64 - m as i64 + p_shift;
        sym = sym.mul(&p.phi[ai].compose_pow(a, j));
    }
    sym
}

/// Shared context for μ^N(·) weights through the positive quantizers'
/// Fourier multipliers, with a ⟨ψ|T_r|ψ⟩ cache.
struct WeightCtx<'a> {
    qt: &'a QuantumTorus,
    psi: &'a TorusState,
    quantizer: Quantizer,
    table: Option<MultiplierTable>,
    cache: HashMap<Vec<i64>, C>,
}

impl<'a> WeightCtx<'a> {
    fn new(
        qt: &'a QuantumTorus,
        psi: &'a TorusState,
        quantizer: Quantizer,
        frame: Option<&AdaptedFrame>,
    ) -> Result<WeightCtx<'a>> {
        if (psi.norm() - 1.0).abs() > 1e-8 {
            return Err(QcatError::Validation("state must be unit-norm".into()));
        }
        let table = match quantizer {
            Quantizer::Weyl => {
                return Err(QcatError::Validation(
                    "quantum entropy needs a positive quantizer (anti_wick or op_plus)".into(),
                ))
            }
            Quantizer::AntiWick => None,
            Quantizer::OpPlus => {
                let frame = frame.ok_or_else(|| {
                    QcatError::Validation("op_plus entropy needs an adapted frame".into())
                })?;
                Some(MultiplierTable::new(frame, qt))
            }
        };
        Ok(WeightCtx {
            qt,
            psi,
            quantizer,
            table,
            cache: HashMap::new(),
        })
    }

    fn mult(&self, r: &[i64]) -> f64 {
        match self.quantizer {
            Quantizer::OpPlus => self.table.as_ref().unwrap().mu(r),
            Quantizer::AntiWick => {
                let n2: i64 = r.iter().map(|x| x * x).sum();
                (-PI * PI * self.qt.hbar() * n2 as f64).exp()
            }
            Quantizer::Weyl => 1.0,
        }
    }

    fn texp(&mut self, r: Vec<i64>) -> Result<C> {
        if let Some(v) = self.cache.get(&r) {
            return Ok(*v);
        }
        let act = translation_action(self.qt, &r)?;
        let psi = &self.psi.coeffs;
        let mut s = C::new(0.0, 0.0);
        for j in 0..psi.len() {
            s += psi[j].conj() * act.val[j] * psi[act.src[j]];
        }
        self.cache.insert(r, s);
        Ok(s)
    }

    /// μ^N(sym) = Σ_k c_k · mult(Jk) · ⟨ψ|T_{Jk}|ψ⟩.
    fn weight(&mut self, sym: &Symbol) -> Result<f64> {
        let band = sym.band();
        let limit = self.qt.n as f64 / 2.0;
        if band as f64 >= limit {
            return Err(QcatError::Aliasing { band, limit });
        }
        let d = self.qt.d;
        let mut tot = C::new(0.0, 0.0);
        for (k, c) in &sym.modes {
            let mut r = vec![0i64; 2 * d];
            for cc in 0..d {
                r[cc] = -k[d + cc];
                r[d + cc] = k[cc];
            }
            let mu = self.mult(&r);
            if mu == 0.0 {
                continue;
            }
            tot += c * mu * self.texp(r)?;
        }
        Ok(tot.re)
    }
}

fn entropy_of_weights(ws: &[f64]) -> Result<f64> {
    let mut h = 0.0;
    let mut sum = 0.0;
    for &w in ws {
        if w < -1e-6 {
            return Err(QcatError::QuantizerPositivity(format!(
                "cylinder weight {w:.3e} below tolerance"
            )));
        }
        let w = w.max(0.0);
        sum += w;
        h += eta(w);
    }
    if (sum - 1.0).abs() > 1e-6 {
        return Err(QcatError::MathInvariant(format!(
            "cylinder weights sum to {sum} (expected 1)"
        )));
    }
    Ok(h)
}

/// p-translated entropy h^p_{2m}(ψ_N, P) with the strict convention
/// h^p_0 = 0 (empty refinement).
fn h_shifted(
    ctx: &mut WeightCtx,
    part: &SmoothPartition,
    a: &IntSymplecticMatrix,
    m: usize,
    p_shift: i64,
) -> Result<f64> {
    if m == 0 {
        return Ok(0.0);
    }
    let total = (part.k as f64).powi(2 * m as i32);
    if total > 1e6 {
        return Err(QcatError::ResourceBudget(format!(
            "K^(2m) = {total:.3e} cylinders exceed the enumeration budget"
        )));
    }
    let total = total as usize;
    // composed bumps per refinement level
    let comp: Vec<Vec<Symbol>> = (0..2 * m)
        .map(|lvl| {
            let j = lvl as i64 - m as i64 + p_shift;
            part.phi.iter().map(|s| s.compose_pow(a, j)).collect()
        })
        .collect();
    let mut ws = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut alpha = vec![0usize; 2 * m];
        for slot in alpha.iter_mut().rev() {
            *slot = idx % part.k;
            idx /= part.k;
        }
        let mut sym = Symbol::one(part.d);
        for (lvl, &ai) in alpha.iter().enumerate() {
            sym = sym.mul(&comp[lvl][ai]);
        }
        ws.push(ctx.weight(&sym)?);
    }
    entropy_of_weights(&ws)
}

/// h_{2m}(ψ_N, P) under A^{p_shift} translation. For m = 0 the family is
/// {P_i} itself (the unrefined partition), matching `refine`.
pub fn quantum_entropy(
    qt: &QuantumTorus,
    psi: &TorusState,
    part: &SmoothPartition,
    a: &IntSymplecticMatrix,
    m: usize,
    quantizer: Quantizer,
    frame: Option<&AdaptedFrame>,
    p_shift: i64,
) -> Result<f64> {
    let mut ctx = WeightCtx::new(qt, psi, quantizer, frame)?;
    if m == 0 {
        let ws: Vec<f64> = part
            .phi
            .iter()
            .map(|s| ctx.weight(&s.compose_pow(a, p_shift)))
            .collect::<Result<_>>()?;
        return entropy_of_weights(&ws);
    }
    h_shifted(&mut ctx, part, a, m, p_shift)
}

#[derive(Debug, Clone, Serialize)]
pub struct TripleSlack {
    pub n: usize,
    pub m: usize,
    pub p: i64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainedSlack {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubadditivityReport {
    pub triples: Vec<TripleSlack>,
    pub chained: ChainedSlack,
    pub m_e: i64,
    pub q: i64,
    pub r: i64,
}

/// Verifies h^p_{2(n+m)} ≤ h^{n+p}_{2m} + h^{−m+p}_{2n} on fixed triples and
/// the chained inequality h_{2m_E} ≤ h^{−qm₀}_{2r} + Σ_j h^{−(q+1−2j)m₀+r}_{2m₀}
/// with m_E = q·m₀ + r. Slacks are reported; sign policy is the caller's.
pub fn subadditivity_check(
    qt: &QuantumTorus,
    psi: &TorusState,
    part: &SmoothPartition,
    a: &IntSymplecticMatrix,
    m0: usize,
    epsilon: f64,
    quantizer: Quantizer,
    frame: Option<&AdaptedFrame>,
) -> Result<SubadditivityReport> {
    if m0 == 0 {
        return Err(QcatError::Validation("m0 must be positive".into()));
    }
    let lyap = lyapunov_data(a)?;
    let (m_e, _) = ehrenfest_times(qt.n, epsilon, &lyap);
    let mut ctx = WeightCtx::new(qt, psi, quantizer, frame)?;
    let mut triples = Vec::new();
    for (n, m, p) in [(0usize, m0, 0i64), (1, 1, 0), (1, 1, 1), (2, 1, 0)] {
        let lhs = h_shifted(&mut ctx, part, a, n + m, p)?;
        let rhs = h_shifted(&mut ctx, part, a, m, n as i64 + p)?
            + h_shifted(&mut ctx, part, a, n, -(m as i64) + p)?;
        triples.push(TripleSlack {
            n,
            m,
            p,
            lhs,
            rhs,
            slack: rhs - lhs,
        });
    }
    let q = m_e / m0 as i64;
    let r = m_e % m0 as i64;
    let lhs = h_shifted(&mut ctx, part, a, m_e as usize, 0)?;
    let mut rhs = h_shifted(&mut ctx, part, a, r as usize, -q * m0 as i64)?;
    for j in 1..=q {
        let p = -(q + 1 - 2 * j) * m0 as i64 + r;
        rhs += h_shifted(&mut ctx, part, a, m0, p)?;
    }
    Ok(SubadditivityReport {
        triples,
        chained: ChainedSlack {
            lhs,
            rhs,
            slack: rhs - lhs,
        },
        m_e,
        q,
        r,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EupReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub renorm_defect: f64,
    pub renormalized: bool,
}

/// Maassen–Uffink verifier: lhs = Ση(‖π_iψ‖²) + Ση(‖π_iUψ‖²),
/// rhs = −2 log max_{i,j}‖π_i U π_j†‖. The family is renormalized by
/// (Σπ†π)^{−1/2} when its partition-of-identity defect exceeds 1e−8.
pub fn eup_check(pi_family: &[CMat], u: &CMat, psi: &CVec) -> Result<EupReport> {
    if pi_family.is_empty() {
        return Err(QcatError::Validation("empty partition family".into()));
    }
    let n = u.nrows();
    let psi_norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (psi_norm - 1.0).abs() > 1e-8 {
        return Err(QcatError::Validation(format!(
            "state norm {psi_norm} != 1"
        )));
    }
    let mut s = CMat::zeros((n, n));
    for pi in pi_family {
        if pi.ncols() != n {
            return Err(QcatError::Dimension(
                "partition member column count != dim".into(),
            ));
        }
        s += &linalg::mul_ah_b(pi, pi);
    }
    let renorm_defect = linalg::max_abs(&(&s - &linalg::ident(n)));
    let mut family: Vec<CMat> = pi_family.to_vec();
    let renormalized = renorm_defect > 1e-8;
    if renormalized {
        let r = linalg::psd_inv_sqrt(&s, 1e-12).map_err(|min| {
            QcatError::InvalidPartition(format!(
                "frame operator has eigenvalue {min:.3e}; renormalization impossible"
            ))
        })?;
        for pi in family.iter_mut() {
            *pi = linalg::mul(pi, &r);
        }
    }
    let upsi = linalg::matvec(u, psi);
    let mut lhs = 0.0;
    for pi in &family {
        let w1: f64 = linalg::matvec(pi, psi).iter().map(|z| z.norm_sqr()).sum();
        let w2: f64 = linalg::matvec(pi, &upsi).iter().map(|z| z.norm_sqr()).sum();
        lhs += eta(w1.min(1.0)) + eta(w2.min(1.0));
    }
    let mut cmax = 0.0f64;
    for pi in &family {
        let piu = linalg::mul(pi, u);
        for pj in &family {
            cmax = cmax.max(linalg::op_norm2(&linalg::mul_a_bh(&piu, pj)));
        }
    }
    let rhs = -2.0 * cmax.ln();
    Ok(EupReport {
        lhs,
        rhs,
        margin: lhs - rhs,
        renorm_defect,
        renormalized,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CBoundEstimate {
    pub c_hat: f64,
    pub theorem_rhs: f64,
    pub samples: usize,
    pub refine_rounds: usize,
    pub seed: u64,
    pub n: i64,
    pub delta: f64,
    pub epsilon: f64,
}

/// ĉ(A,n): max over sampled (ρ,ρ′,ρ₀,ρ₀′) of ‖Op^w(T_ρG^{ρ₀})·Mⁿ·Op^w(T_{ρ′}G^{ρ₀′})†‖
/// with local grid refinement around the argmax; theorem_rhs is the Theorem-5.2
/// envelope |det B(ℏ)|·ℏ^{−δ−εΛ₊/λmax}·e^{−nΛ₀} without the unknown constant.
#[allow(clippy::too_many_arguments)]
pub fn c_bound_estimate(
    qt: &QuantumTorus,
    frame: &AdaptedFrame,
    a: &IntSymplecticMatrix,
    propagator_m: &TorusOperator,
    n: i64,
    samples: usize,
    refine_rounds: usize,
    seed: u64,
    delta: f64,
    epsilon: f64,
) -> Result<CBoundEstimate> {
    if samples < 64 {
        return Err(QcatError::Validation("c_bound needs samples >= 64".into()));
    }
    let lyap = lyapunov_data(a)?;
    let (_, n_e) = ehrenfest_times(qt.n, epsilon, &lyap);
    if n < 0 || n > n_e {
        return Err(QcatError::Validation(format!(
            "n = {n} outside [0, n_E = {n_e}]"
        )));
    }
    let gf = GaussianFrame::new(frame, qt);
    let mn = propagator_m.unitary_power(n);
    let dd = 2 * qt.d;
    let eval = |tuple: &[f64]| -> Result<f64> {
        let (rho, rest) = tuple.split_at(dd);
        let (rhop, rest) = rest.split_at(dd);
        let (rho0, rho0p) = rest.split_at(dd);
        let o1 = periodized_gaussian_op_with(qt, &gf, rho, rho0)?;
        let o2 = periodized_gaussian_op_with(qt, &gf, rhop, rho0p)?;
        let x = linalg::mul_a_bh(&linalg::mul(&o1.matrix, &mn.matrix), &o2.matrix);
        Ok(linalg::op_norm2(&x))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let mut best_tuple = vec![0.0f64; 4 * dd];
    for _ in 0..samples {
        let tuple: Vec<f64> = (0..4 * dd).map(|_| rng.gen::<f64>()).collect();
        let v = eval(&tuple)?;
        if v > best {
            best = v;
            best_tuple = tuple;
        }
    }
    for round in 1..=refine_rounds {
        let width = 0.25 / (1 << round) as f64;
        for _ in 0..16 {
            let tuple: Vec<f64> = best_tuple
                .iter()
                .map(|&x| {
                    let y = x + rng.gen_range(-width..width);
                    y - y.floor()
                })
                .collect();
            let v = eval(&tuple)?;
            if v > best {
                best = v;
                best_tuple = tuple;
            }
        }
    }
    let theorem_rhs = gf.det_b
        * qt.hbar()
            .powf(-(delta + epsilon * lyap.lambda_plus / lyap.lambda_max))
        * (-(n as f64) * lyap.lambda_zero).exp();
    Ok(CBoundEstimate {
        c_hat: best,
        theorem_rhs,
        samples,
        refine_rounds,
        seed,
        n,
        delta,
        epsilon,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyCertificate {
    pub n: i64,
    pub m: usize,
    pub g_rho: usize,
    pub g_rho0: usize,
    pub frame_defect: f64,
    pub partition_sum_defect: f64,
    pub h2m: f64,
    pub weight_sum: f64,
    pub eup: EupReport,
    pub sup_leb_grid: f64,
    pub c_hat_grid: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Corollary-5.1 certificate on the discretized Eq.(16) family: quadrature
/// operators O_{ρ,ρ₀} on midpoint grids, frame renormalization F^{−1/2},
/// cylinder-weighted members A_α, EUP with U = Mⁿ, and the certified lower
/// bound h_{2m} ≥ −log sup_α Leb_grid(P_α²) − log ĉ_grid.
#[allow(clippy::too_many_arguments)]
pub fn entropy_certificate(
    qt: &QuantumTorus,
    psi: &TorusState,
    part: &SmoothPartition,
    a: &IntSymplecticMatrix,
    m: usize,
    n: i64,
    frame: &AdaptedFrame,
    propagator_m: &TorusOperator,
    g_rho: usize,
    g_rho0: usize,
) -> Result<EntropyCertificate> {
    if qt.d != 1 {
        return Err(QcatError::Validation(
            "entropy_certificate implemented for d = 1".into(),
        ));
    }
    if (psi.norm() - 1.0).abs() > 1e-8 {
        return Err(QcatError::Validation("state must be unit-norm".into()));
    }
    let dim = qt.dim();
    let gf = GaussianFrame::new(frame, qt);
    let mids = |g: usize| -> Vec<f64> { (0..g).map(|i| (i as f64 + 0.5) / g as f64).collect() };
    let grho = mids(g_rho);
    let grho0 = mids(g_rho0);
    // quadrature family and cached O†O
    let mut ops: Vec<(Vec<f64>, CMat)> = Vec::with_capacity(g_rho * g_rho * g_rho0 * g_rho0);
    for &rx in &grho {
        for &rxi in &grho {
            for &ox in &grho0 {
                for &oxi in &grho0 {
                    let o = periodized_gaussian_op_with(qt, &gf, &[rx, rxi], &[ox, oxi])?;
                    ops.push((vec![ox, oxi], o.matrix));
                }
            }
        }
    }
    let w = 1.0 / ops.len() as f64;
    let gram: Vec<CMat> = ops
        .iter()
        .map(|(_, o)| {
            let mut g = linalg::mul_ah_b(o, o);
            g.mapv_inplace(|z| z * w);
            g
        })
        .collect();
    let mut f = CMat::zeros((dim, dim));
    for g in &gram {
        f += g;
    }
    let frame_defect = linalg::max_abs(&(&f - &linalg::ident(dim)));
    let fmh = linalg::psd_inv_sqrt(&f, 1e-10).map_err(|min| {
        QcatError::InvalidPartition(format!(
            "frame operator eigenvalue {min:.3e}: renormalization impossible"
        ))
    })?;
    // cylinder symbols and A_α = Σ w P_α²(ρ₀) O†O
    let family = if m == 0 {
        (0..part.k).map(|i| vec![i]).collect::<Vec<_>>()
    } else {
        let total = (part.k as f64).powi(2 * m as i32);
        if total > 1e4 {
            return Err(QcatError::ResourceBudget(format!(
                "certificate with {total:.3e} cylinders is out of budget"
            )));
        }
        (0..total as usize)
            .map(|mut idx| {
                let mut alpha = vec![0usize; 2 * m];
                for slot in alpha.iter_mut().rev() {
                    *slot = idx % part.k;
                    idx /= part.k;
                }
                alpha
            })
            .collect()
    };
    let symbols: Vec<Symbol> = family
        .iter()
        .map(|alpha| cylinder_symbol(part, a, alpha, m, 0))
        .collect();
    let mut a_ops: Vec<CMat> = Vec::with_capacity(symbols.len());
    for sym in &symbols {
        let mut acc = CMat::zeros((dim, dim));
        for ((rho0, _), g) in ops.iter().zip(gram.iter()) {
            let p2 = sym.value(rho0).re;
            acc.scaled_add(C::new(p2, 0.0), g);
        }
        a_ops.push(acc);
    }
    let mut asum = CMat::zeros((dim, dim));
    for aa in &a_ops {
        asum += aa;
    }
    let partition_sum_defect = linalg::max_abs(&(&asum - &f));
    if partition_sum_defect > 1e-8 {
        return Err(QcatError::MathInvariant(format!(
            "Σ_α A_α − F defect {partition_sum_defect:.3e}"
        )));
    }
    // h_{2m} from q_α = ⟨ψ|F^{−1/2} A_α F^{−1/2}|ψ⟩
    let sandwiched: Vec<CMat> = a_ops
        .iter()
        .map(|aa| linalg::mul(&linalg::mul(&fmh, aa), &fmh))
        .collect();
    let mut ws = Vec::with_capacity(sandwiched.len());
    for s in &sandwiched {
        let sp = linalg::matvec(s, &psi.coeffs);
        let q: C = psi
            .coeffs
            .iter()
            .zip(sp.iter())
            .map(|(x, y)| x.conj() * y)
            .sum();
        ws.push(q.re);
    }
    let weight_sum: f64 = ws.iter().sum();
    let h2m = entropy_of_weights(&ws)?;
    // exact EUP on the renormalized family with U = Mⁿ
    let mn = propagator_m.unitary_power(n);
    let pis: Vec<CMat> = sandwiched.iter().map(linalg::psd_sqrt).collect();
    let eup = eup_check(&pis, &mn.matrix, &psi.coeffs)?;
    if eup.margin < -1e-8 {
        return Err(QcatError::MathInvariant(format!(
            "EUP margin {:.3e} below tolerance",
            eup.margin
        )));
    }
    // certified lower bound
    let mut sup_leb_grid = 0.0f64;
    for sym in &symbols {
        let mut acc = 0.0;
        for &ox in &grho0 {
            for &oxi in &grho0 {
                acc += sym.value(&[ox, oxi]).re;
            }
        }
        sup_leb_grid = sup_leb_grid.max(acc / (g_rho0 * g_rho0) as f64);
    }
    let y = linalg::mul(&linalg::mul(&fmh, &mn.matrix), &fmh);
    let oy: Vec<CMat> = ops.iter().map(|(_, o)| linalg::mul(o, &y)).collect();
    let mut c_hat_grid = 0.0f64;
    for o1y in &oy {
        for (_, o2) in &ops {
            let x = linalg::mul_a_bh(o1y, o2);
            // Frobenius bound prunes pairs that cannot beat the current max
            if linalg::frobenius(&x) <= c_hat_grid {
                continue;
            }
            c_hat_grid = c_hat_grid.max(linalg::op_norm2(&x));
        }
    }
    let rhs = -sup_leb_grid.ln() - c_hat_grid.ln();
    let margin = h2m - rhs;
    if margin < -1e-6 {
        return Err(QcatError::MathInvariant(format!(
            "certificate margin {margin:.3e}: discretization-renormalization bug"
        )));
    }
    Ok(EntropyCertificate {
        n,
        m,
        g_rho,
        g_rho0,
        frame_defect,
        partition_sum_defect,
        h2m,
        weight_sum,
        eup,
        sup_leb_grid,
        c_hat_grid,
        rhs,
        margin,
    })
}

/// Classical measure fed to the cylinder-mass estimator.
pub enum ClassicalMeasure<'a> {
    Lebesgue,
    /// density weights sampled at each orbit start point
    Grid(&'a MeasureGrid),
    /// w·δ_{fixed point 0} + (1−w)·Lebesgue
    DeltaLebesgueMixture { delta_weight: f64 },
}

/// Per-m values of (1/2m)Ση(μ(Q_α)) for the true K-cell partition, via exact
/// rational orbits (2i+1)/(2G) carried as integers mod 2G.
pub fn classical_entropy(
    mu: &ClassicalMeasure,
    k: usize,
    a: &IntSymplecticMatrix,
    m_max: usize,
    g: usize,
) -> Result<Vec<f64>> {
    if a.d != 1 {
        return Err(QcatError::Validation(
            "classical_entropy implemented for d = 1".into(),
        ));
    }
    if k < 2 || m_max == 0 || g == 0 {
        return Err(QcatError::Validation(
            "need K >= 2, m_max >= 1, G >= 1".into(),
        ));
    }
    if (g as f64) < k as f64 * spectral_norm(a).powi(m_max as i32) {
        return Err(QcatError::RefinementAliasing(format!(
            "grid resolution {g} < K·||A||^m_max"
        )));
    }
    if 2.0 * m_max as f64 * (k as f64).ln() > 85.0 {
        return Err(QcatError::ResourceBudget(
            "cylinder keys exceed the integer packing width".into(),
        ));
    }
    let ainv = a.inverse();
    let two_g = 2 * g as i64;
    let ki = k as i64;
    // start points and weights
    let npts = g * g;
    let mut weights = vec![1.0 / npts as f64; npts];
    let mut leb_scale = 1.0f64;
    let mut delta_weight = 0.0f64;
    match mu {
        ClassicalMeasure::Lebesgue => {}
        ClassicalMeasure::DeltaLebesgueMixture { delta_weight: w } => {
            if !(0.0..=1.0).contains(w) {
                return Err(QcatError::Validation("mixture weight outside [0,1]".into()));
            }
            leb_scale = 1.0 - w;
            delta_weight = *w;
        }
        ClassicalMeasure::Grid(mg) => {
            let res = mg.resolution;
            let mut total = 0.0f64;
            for i in 0..g {
                let px = (2 * i + 1) as f64 / two_g as f64;
                let ci = ((px * res as f64) as usize).min(res - 1);
                for j in 0..g {
                    let py = (2 * j + 1) as f64 / two_g as f64;
                    let cj = ((py * res as f64) as usize).min(res - 1);
                    let w = mg.density[ci * res + cj];
                    weights[i * g + j] = w;
                    total += w;
                }
            }
            if total <= 0.0 {
                return Err(QcatError::Validation("measure grid has no mass".into()));
            }
            for w in weights.iter_mut() {
                *w /= total;
            }
        }
    }
    let mut out = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let mut masses: HashMap<(u128, u128), f64> = HashMap::new();
        for i in 0..g {
            for j in 0..g {
                let w = weights[i * g + j] * leb_scale;
                if w == 0.0 {
                    continue;
                }
                let mut x = (2 * i as i64 + 1) % two_g;
                let mut y = (2 * j as i64 + 1) % two_g;
                for _ in 0..m {
                    let nx = (ainv.entries[0][0] * x + ainv.entries[0][1] * y).rem_euclid(two_g);
                    let ny = (ainv.entries[1][0] * x + ainv.entries[1][1] * y).rem_euclid(two_g);
                    x = nx;
                    y = ny;
                }
                let mut key1: u128 = 0;
                let mut key2: u128 = 0;
                let kk = (ki * ki) as u128;
                for t in 0..2 * m {
                    let s = ((x * ki / two_g) * ki + y * ki / two_g) as u128;
                    if t < m {
                        key1 = key1 * kk + s;
                    } else {
                        key2 = key2 * kk + s;
                    }
                    let nx = (a.entries[0][0] * x + a.entries[0][1] * y).rem_euclid(two_g);
                    let ny = (a.entries[1][0] * x + a.entries[1][1] * y).rem_euclid(two_g);
                    x = nx;
                    y = ny;
                }
                *masses.entry((key1, key2)).or_insert(0.0) += w;
            }
        }
        if delta_weight > 0.0 {
            // the fixed point 0 sits in cell 0 at every time: key pair (0,0)
            *masses.entry((0, 0)).or_insert(0.0) += delta_weight;
        }
        let h: f64 = masses.values().map(|&p| eta(p)).sum();
        out.push(h / (2.0 * m as f64));
    }
    Ok(out)
}

/// KS-rate estimate from per-m values of (1/2m)H_{2m}: the last entropy
/// increment (H_{2m_max} − H_{2(m_max−1)})/2.
pub fn classical_extrapolation(per_m: &[f64]) -> f64 {
    match per_m.len() {
        0 => 0.0,
        1 => per_m[0],
        l => {
            let h_last = per_m[l - 1] * 2.0 * l as f64;
            let h_prev = per_m[l - 2] * 2.0 * (l - 1) as f64;
            (h_last - h_prev) / 2.0
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantumEntropyPoint {
    pub m: usize,
    pub quantizer: Quantizer,
    pub value: f64,
}

/// Aggregated entropy artifact (assembled by the CLI front end).
#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    pub h_classical: Vec<f64>,
    pub h_classical_extrapolation: f64,
    pub h_quantum: Vec<QuantumEntropyPoint>,
    pub lambda_bounds: (f64, f64),
    pub c_estimate: Option<CBoundEstimate>,
    pub certificate: Option<f64>,
    pub eta_convention: String,
}

impl EntropyReport {
    pub fn eta_note() -> String {
        "eta(x) = -x log x with eta(0) = 0; natural logarithms throughout".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::eigensystem;
    use crate::symplectic::golden_cat;
    use crate::torus::{coherent_state, find_kappa, propagator};
    use proptest::prelude::*;

    fn golden_qt(n: u64) -> QuantumTorus {
        let kap = find_kappa(&golden_cat(), n).unwrap().remove(0);
        QuantumTorus::new(n, 1, kap).unwrap()
    }

    fn golden_frame() -> AdaptedFrame {
        AdaptedFrame::d1_hyperbolic(&golden_cat()).unwrap()
    }

    fn uniform_state(qt: &QuantumTorus) -> TorusState {
        let dim = qt.dim();
        let amp = C::new(1.0 / (dim as f64).sqrt(), 0.0);
        TorusState {
            coeffs: CVec::from_elem(dim, amp),
            qt: qt.clone(),
        }
    }

    fn first_eigenstate(qt: &QuantumTorus, a: &IntSymplecticMatrix) -> (TorusState, TorusOperator) {
        let m = propagator(a, qt).unwrap();
        let eig = eigensystem(&m).unwrap();
        (eig.state(0, qt), m)
    }

    #[test]
    fn eta_identities() {
        assert_eq!(eta(0.0), 0.0);
        assert_eq!(eta(1.0), 0.0);
        assert!(eta(0.5) > 0.0);
        assert!((eta(0.5) - 0.5 * 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn partition_k2_is_cos_sin() {
        let p = build_partition(2, 0.25, 64, 1).unwrap();
        assert!(p.sum_sq_defect < 1e-12);
        // φ₀ = cos²(πx), φ₁ = sin²(πx)
        for t in 0..64 {
            let x = t as f64 / 64.0;
            let c2 = (PI * x).cos().powi(2);
            assert!((p.samples[0][t] * p.samples[0][t] - c2).abs() < 1e-12);
            assert!((p.phi[0].value(&[x, 0.3]).re - c2).abs() < 1e-12);
            assert!((p.phi[1].value(&[x, 0.3]).re - (1.0 - c2)).abs() < 1e-12);
        }
    }

    #[test]
    fn partition_guards() {
        assert!(matches!(
            build_partition(1, 0.4, 64, 1),
            Err(QcatError::Validation(_))
        ));
        assert!(matches!(
            build_partition(2, 0.2, 64, 1),
            Err(QcatError::Coverage(_))
        ));
        assert!(matches!(
            build_partition(2, 0.6, 64, 1),
            Err(QcatError::Validation(_))
        ));
        // K = 5 partition of unity on the grid
        let p = build_partition(5, 0.12, 200, 1).unwrap();
        assert!(p.sum_sq_defect < 1e-10);
    }

    #[test]
    fn refine_count_and_mass() {
        let p = build_partition(2, 0.25, 256, 1).unwrap();
        let fam = refine(&p, &golden_cat(), 2).unwrap();
        assert_eq!(fam.alphas.len(), 16);
        assert!(fam.sum_defect < 1e-10, "sum defect {}", fam.sum_defect);
        let total: f64 = fam.leb.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        // m = 0 edge: the family is {P_i} itself
        let f0 = refine(&p, &golden_cat(), 0).unwrap();
        assert_eq!(f0.alphas.len(), 2);
        assert!((f0.leb[0] - 0.5).abs() < 1e-12);
        // aliasing guard
        let small = build_partition(2, 0.25, 16, 1).unwrap();
        assert!(matches!(
            refine(&small, &golden_cat(), 3),
            Err(QcatError::RefinementAliasing(_))
        ));
    }

    #[test]
    fn refine_sum_defect_high_resolution() {
        let p = build_partition(2, 0.25, 1024, 1).unwrap();
        let fam = refine(&p, &golden_cat(), 3).unwrap();
        assert_eq!(fam.alphas.len(), 64);
        assert!(fam.sum_defect < 1e-8, "sum defect {}", fam.sum_defect);
    }

    #[test]
    fn refine_sup_leb_decay_rate() {
        // sup_α Leb(P_α²) ~ e^{−2m(Λ₊−ε)} needs log K > Λ₊, hence K = 3.
        let p = build_partition(3, 0.2, 640, 1).unwrap();
        let a = golden_cat();
        let mut logs = Vec::new();
        for m in 1..=4usize {
            let fam = refine(&p, &a, m).unwrap();
            let sup = fam.leb.iter().cloned().fold(0.0f64, f64::max);
            logs.push((m as f64, sup.ln()));
        }
        // least-squares slope of ln(sup) vs m
        let n = logs.len() as f64;
        let sx: f64 = logs.iter().map(|(x, _)| x).sum();
        let sy: f64 = logs.iter().map(|(_, y)| y).sum();
        let sxx: f64 = logs.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = logs.iter().map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let exponent = -slope;
        let target = 2.0 * 0.9624236501192069;
        assert!(
            (exponent - target).abs() < 0.2 * target,
            "fitted exponent {exponent} vs 2Λ₊ = {target}"
        );
    }

    #[test]
    fn quantum_entropy_symmetric_two_cell() {
        let qt = golden_qt(32);
        let psi = uniform_state(&qt);
        let part = build_partition(2, 0.25, 64, 1).unwrap();
        let h = quantum_entropy(
            &qt,
            &psi,
            &part,
            &golden_cat(),
            0,
            Quantizer::OpPlus,
            Some(&golden_frame()),
            0,
        )
        .unwrap();
        assert!((h - 2.0f64.ln()).abs() < 1e-6, "h = {h}");
    }

    #[test]
    fn quantum_entropy_concentrated_coherent() {
        // coherent state deep inside one of K = 4 cells at large N
        let qt = QuantumTorus::new(2048, 1, vec![0.0, 0.0]).unwrap();
        let psi = coherent_state(&qt, &[0.0, 0.5], 1e-14).unwrap();
        let part = build_partition(4, 0.2, 64, 1).unwrap();
        let h = quantum_entropy(
            &qt,
            &psi,
            &part,
            &golden_cat(),
            0,
            Quantizer::AntiWick,
            None,
            0,
        )
        .unwrap();
        assert!(h <= 0.05, "h = {h}");
        assert!(h >= 0.0);
    }

    #[test]
    fn quantum_entropy_guards() {
        let qt = golden_qt(16);
        let psi = uniform_state(&qt);
        let part = build_partition(2, 0.25, 64, 1).unwrap();
        assert!(matches!(
            quantum_entropy(&qt, &psi, &part, &golden_cat(), 1, Quantizer::Weyl, None, 0),
            Err(QcatError::Validation(_))
        ));
        assert!(matches!(
            quantum_entropy(
                &qt,
                &psi,
                &part,
                &golden_cat(),
                10,
                Quantizer::AntiWick,
                None,
                0
            ),
            Err(QcatError::ResourceBudget(_))
        ));
    }

    #[test]
    fn anti_wick_vs_op_plus_consistency() {
        let a = golden_cat();
        let frame = golden_frame();
        let part = build_partition(2, 0.25, 64, 1).unwrap();
        let mut gaps = Vec::new();
        for n in [32u64, 64] {
            let qt = golden_qt(n);
            let (psi, _) = first_eigenstate(&qt, &a);
            let h_aw =
                quantum_entropy(&qt, &psi, &part, &a, 1, Quantizer::AntiWick, None, 0).unwrap();
            let h_op =
                quantum_entropy(&qt, &psi, &part, &a, 1, Quantizer::OpPlus, Some(&frame), 0)
                    .unwrap();
            assert!(h_aw >= 0.0 && h_op >= 0.0);
            assert!(h_aw <= (4.0f64).ln() + 1e-9);
            gaps.push((h_aw - h_op).abs());
        }
        assert!(gaps.iter().all(|g| *g < 0.2), "gaps {gaps:?}");
    }

    #[test]
    fn subadditivity_golden_64() {
        let a = golden_cat();
        let qt = golden_qt(64);
        let (psi, _) = first_eigenstate(&qt, &a);
        let part = build_partition(2, 0.25, 64, 1).unwrap();
        let rep = subadditivity_check(
            &qt,
            &psi,
            &part,
            &a,
            1,
            0.1,
            Quantizer::OpPlus,
            Some(&golden_frame()),
        )
        .unwrap();
        assert_eq!(rep.m_e, 2);
        for t in &rep.triples {
            assert!(
                t.slack >= -1e-3,
                "Eq.(24) violated at (n,m,p)=({},{},{}): slack {}",
                t.n,
                t.m,
                t.p,
                t.slack
            );
        }
        // n = 0 triple is an exact equality (empty refinement)
        let t0 = &rep.triples[0];
        assert_eq!(t0.n, 0);
        assert!(t0.slack.abs() < 1e-10, "slack {}", t0.slack);
        assert!(rep.chained.slack >= -1e-3, "chained slack {}", rep.chained.slack);
    }

    #[test]
    fn eup_trivial_and_dft() {
        // single-member partition {Id}
        let id = linalg::ident(5);
        let mut psi = CVec::zeros(5);
        psi[0] = C::new(1.0, 0.0);
        let rep = eup_check(&[id.clone()], &id, &psi).unwrap();
        assert!(rep.lhs.abs() < 1e-12 && rep.rhs.abs() < 1e-12);
        // basis projectors against the DFT: equality case lhs = rhs = log N
        let n = 8usize;
        let mut dft = CMat::zeros((n, n));
        let scale = 1.0 / (n as f64).sqrt();
        for i in 0..n {
            for j in 0..n {
                dft[[i, j]] = C::from_polar(scale, -TWO_PI * (i * j) as f64 / n as f64);
            }
        }
        let projectors: Vec<CMat> = (0..n)
            .map(|j| {
                let mut p = CMat::zeros((n, n));
                p[[j, j]] = C::new(1.0, 0.0);
                p
            })
            .collect();
        let mut e0 = CVec::zeros(n);
        e0[0] = C::new(1.0, 0.0);
        let rep = eup_check(&projectors, &dft, &e0).unwrap();
        assert!((rep.lhs - (n as f64).ln()).abs() < 1e-10);
        assert!((rep.rhs - (n as f64).ln()).abs() < 1e-10);
        assert!(rep.margin.abs() < 1e-9);
    }

    #[test]
    fn eup_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        fn cmat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
            CMat::from_shape_fn((r, c), |_| {
                C::new(
                    rand::Rng::gen::<f64>(rng) - 0.5,
                    rand::Rng::gen::<f64>(rng) - 0.5,
                )
            })
        }
        for trial in 0..200 {
            let n = [4usize, 8, 16, 32][trial % 4];
            let members = 2 + trial % 3;
            // random family (renormalized inside eup_check)
            let family: Vec<CMat> = (0..members).map(|_| cmat(&mut rng, n, n)).collect();
            // random unitary by Gram-Schmidt
            let x = cmat(&mut rng, n, n);
            let mut u = CMat::zeros((n, n));
            for c in 0..n {
                let mut v: CVec = x.column(c).to_owned();
                for cc in 0..c {
                    let prev = u.column(cc);
                    let ov: C = prev.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                    for i in 0..n {
                        let sub = ov * u[[i, cc]];
                        v[i] -= sub;
                    }
                }
                let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for (i, z) in v.iter().enumerate() {
                    u[[i, c]] = z / nrm;
                }
            }
            let mut psi = CVec::from_shape_fn(n, |_| {
                C::new(
                    rand::Rng::gen::<f64>(&mut rng) - 0.5,
                    rand::Rng::gen::<f64>(&mut rng) - 0.5,
                )
            });
            let nrm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            psi.mapv_inplace(|z| z / nrm);
            let rep = eup_check(&family, &u, &psi).unwrap();
            assert!(
                rep.margin >= -1e-8,
                "trial {trial}: EUP margin {}",
                rep.margin
            );
        }
    }

    #[test]
    fn c_bound_monotone_and_sane() {
        let a = golden_cat();
        let qt = golden_qt(16);
        let frame = golden_frame();
        let m = propagator(&a, &qt).unwrap();
        let small =
            c_bound_estimate(&qt, &frame, &a, &m, 1, 64, 0, 11, 0.01, 0.1).unwrap();
        let big = c_bound_estimate(&qt, &frame, &a, &m, 1, 128, 0, 11, 0.01, 0.1).unwrap();
        assert!(small.c_hat <= big.c_hat + 1e-12);
        assert!(small.c_hat > 0.0 && small.c_hat.is_finite());
        // n = 0 sanity: bounded product of bounded operators
        let zero = c_bound_estimate(&qt, &frame, &a, &m, 0, 64, 1, 3, 0.01, 0.1).unwrap();
        assert!(zero.c_hat > 0.0 && zero.c_hat.is_finite());
        // theorem envelope: |det B| = 1/ℏ for the hyperbolic d=1 frame
        let gf = GaussianFrame::new(&frame, &qt);
        assert!((gf.det_b * qt.hbar() - 1.0).abs() < 1e-8);
        assert!(matches!(
            c_bound_estimate(&qt, &frame, &a, &m, 1, 8, 0, 11, 0.01, 0.1),
            Err(QcatError::Validation(_))
        ));
    }

    #[test]
    fn certificate_golden_16() {
        let a = golden_cat();
        let qt = golden_qt(16);
        let frame = golden_frame();
        let (psi, m) = first_eigenstate(&qt, &a);
        let part = build_partition(2, 0.25, 64, 1).unwrap();
        let lyap = lyapunov_data(&a).unwrap();
        let (_, n_e) = ehrenfest_times(16, 0.1, &lyap);
        assert_eq!(n_e, 4);
        let cert =
            entropy_certificate(&qt, &psi, &part, &a, 1, n_e, &frame, &m, 4, 4).unwrap();
        assert!(
            (cert.frame_defect - 0.132).abs() < 0.02,
            "frame defect {}",
            cert.frame_defect
        );
        assert!((cert.weight_sum - 1.0).abs() < 1e-8);
        assert!(cert.eup.margin >= -1e-8);
        assert!(cert.margin >= -1e-6, "margin {}", cert.margin);
        assert!(cert.h2m >= 0.0 && cert.h2m <= (4.0f64).ln() + 1e-9);
        assert!(cert.sup_leb_grid > 0.0 && cert.sup_leb_grid <= 1.0 + 1e-12);
    }

    #[test]
    fn classical_entropy_frozen_golden() {
        let a = golden_cat();
        let per_m = classical_entropy(&ClassicalMeasure::Lebesgue, 10, &a, 5, 2048).unwrap();
        let frozen = [2.9957, 2.1025, 1.7493, 1.5581, 1.4298];
        for (v, f) in per_m.iter().zip(frozen.iter()) {
            assert!((v - f).abs() < 5e-4, "per-m values {per_m:?}");
        }
        let extrap = classical_extrapolation(&per_m);
        assert!((extrap - 0.9166).abs() < 5e-3, "extrapolation {extrap}");
    }

    #[test]
    fn classical_entropy_point_mass_and_mixture() {
        let a = golden_cat();
        // pure point mass at the fixed point: h = 0 at every m
        let pm = classical_entropy(
            &ClassicalMeasure::DeltaLebesgueMixture { delta_weight: 1.0 },
            10,
            &a,
            3,
            512,
        )
        .unwrap();
        for v in &pm {
            assert!(v.abs() < 1e-12);
        }
        // ½(δ₀ + Leb) at m = 5
        let mix = classical_entropy(
            &ClassicalMeasure::DeltaLebesgueMixture { delta_weight: 0.5 },
            10,
            &a,
            5,
            2048,
        )
        .unwrap();
        assert!((mix[4] - 0.7842).abs() < 5e-4, "mixture value {}", mix[4]);
    }

    #[test]
    fn classical_entropy_grid_measure_matches_lebesgue() {
        let a = golden_cat();
        let res = 64usize;
        let mg = MeasureGrid {
            resolution: res,
            d: 1,
            density: vec![1.0; res * res],
            total: 1.0,
        };
        let leb = classical_entropy(&ClassicalMeasure::Lebesgue, 4, &a, 2, 64).unwrap();
        let grid = classical_entropy(&ClassicalMeasure::Grid(&mg), 4, &a, 2, 64).unwrap();
        for (x, y) in leb.iter().zip(grid.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
        // resolution guard
        assert!(matches!(
            classical_entropy(&ClassicalMeasure::Lebesgue, 10, &a, 5, 256),
            Err(QcatError::RefinementAliasing(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eta_concavity(a in 0.0..1.0f64, b in 0.0..1.0f64, t in 0.0..1.0f64) {
            let mix = eta(t * a + (1.0 - t) * b);
            prop_assert!(mix >= t * eta(a) + (1.0 - t) * eta(b) - 1e-12);
        }

        #[test]
        fn symbol_product_is_pointwise(x in 0.0..1.0f64, xi in 0.0..1.0f64) {
            let p = build_partition(3, 0.2, 64, 1).unwrap();
            let s0 = p.phi[0].compose_pow(&golden_cat(), 1);
            let s1 = p.phi[1].compose_pow(&golden_cat(), -1);
            let prod = s0.mul(&s1);
            let lhs = prod.value(&[x, xi]);
            let rhs = s0.value(&[x, xi]) * s1.value(&[x, xi]);
            prop_assert!((lhs - rhs).norm() < 1e-10);
        }
    }
}
