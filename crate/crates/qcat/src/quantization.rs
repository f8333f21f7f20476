//! The three quantization procedures: Weyl (Fourier series of translations),
//! anti-Wick (coherent-state averaging), and the Lyapunov-adapted positive
//! quantization Op⁺ (Weyl of the symbol convolved with the Moyal square of an
//! adapted Gaussian), plus the periodization operators T_ρ and the
//! resolution-of-identity machinery they generate.

use crate::error::{QcatError, Result};
use crate::linalg::{self, CMat, C};
use crate::symplectic::{adapted_scaling_matrix, invert_real, AdaptedFrame, IntSymplecticMatrix};
use crate::torus::{translation_action, QuantumTorus, TorusOperator, TWO_PI};
use ndarray::{Array1, Array2};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Band-limited observable a(ρ) = Σ_r a_r e^{−2πi⟨Jr,ρ⟩}.
#[derive(Debug, Clone)]
pub struct TrigObservable {
    pub coeffs: BTreeMap<Vec<i64>, C>,
    pub d: usize,
    pub real: bool,
}

impl TrigObservable {
    pub fn new(d: usize, coeffs: BTreeMap<Vec<i64>, C>) -> Result<TrigObservable> {
        for r in coeffs.keys() {
            if r.len() != 2 * d {
                return Err(QcatError::Dimension(format!(
                    "coefficient index length {} != 2d = {}",
                    r.len(),
                    2 * d
                )));
            }
        }
        let real = coeffs.iter().all(|(r, a)| {
            let neg: Vec<i64> = r.iter().map(|x| -x).collect();
            match coeffs.get(&neg) {
                Some(b) => (a - b.conj()).norm() < 1e-14,
                None => a.norm() < 1e-14,
            }
        });
        Ok(TrigObservable { coeffs, d, real })
    }

    pub fn constant(d: usize, c: f64) -> TrigObservable {
        let mut m = BTreeMap::new();
        m.insert(vec![0i64; 2 * d], C::new(c, 0.0));
        TrigObservable::new(d, m).unwrap()
    }

    /// cos(2π x₁): coefficients ½ at r = ±(0,…,0, 1, 0,…,0) (ξ₁ slot).
    pub fn cos_x1(d: usize) -> TrigObservable {
        let mut m = BTreeMap::new();
        let mut rp = vec![0i64; 2 * d];
        rp[d] = 1;
        let mut rm = vec![0i64; 2 * d];
        rm[d] = -1;
        m.insert(rp, C::new(0.5, 0.0));
        m.insert(rm, C::new(0.5, 0.0));
        TrigObservable::new(d, m).unwrap()
    }

    pub fn band(&self) -> i64 {
        self.coeffs
            .keys()
            .flat_map(|r| r.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn value(&self, rho: &[f64]) -> C {
        let d = self.d;
        let mut s = C::new(0.0, 0.0);
        for (r, a) in &self.coeffs {
            // ⟨Jr, ρ⟩ with Jr = (−r_ξ, r_x)
            let mut ang = 0.0;
            for c in 0..d {
                ang += -(r[d + c] as f64) * rho[c] + (r[c] as f64) * rho[d + c];
            }
            s += a * C::from_polar(1.0, -TWO_PI * ang);
        }
        s
    }

    pub fn conj(&self) -> TrigObservable {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(r, a)| (r.iter().map(|x| -x).collect(), a.conj()))
            .collect();
        TrigObservable::new(self.d, coeffs).unwrap()
    }

    /// a ∘ Aᵗ: coefficient indices map r ↦ A^{−t} r.
    pub fn compose(&self, a: &IntSymplecticMatrix, t: i64) -> TrigObservable {
        let m = a.int_pow(-t);
        let coeffs = self
            .coeffs
            .iter()
            .map(|(r, v)| (m.apply(r), *v))
            .collect();
        TrigObservable::new(self.d, coeffs).unwrap()
    }

    /// Pointwise scaling of coefficients (Fourier-multiplier application).
    pub fn multiplied(&self, f: impl Fn(&[i64]) -> f64) -> TrigObservable {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(r, v)| (r.clone(), v * f(r)))
            .collect();
        TrigObservable::new(self.d, coeffs).unwrap()
    }
}

/// Op_κ^w(a) = Σ_r a_r U_κ(r/N).
pub fn weyl(qt: &QuantumTorus, a: &TrigObservable, allow_alias: bool) -> Result<TorusOperator> {
    if a.d != qt.d {
        return Err(QcatError::Dimension("observable/torus dimension mismatch".into()));
    }
    let band = a.band();
    let limit = qt.n as f64 / 2.0;
    if !allow_alias && band as f64 >= limit {
        return Err(QcatError::Aliasing { band, limit });
    }
    let dim = qt.dim();
    let mut m = CMat::zeros((dim, dim));
    for (r, coeff) in &a.coeffs {
        if coeff.norm() == 0.0 {
            continue;
        }
        let act = translation_action(qt, r)?;
        for j in 0..dim {
            m[[j, act.src[j]]] += coeff * act.val[j];
        }
    }
    Ok(TorusOperator { matrix: m, qt: qt.clone() })
}

/// Batch of normalized d=1 coherent states at fixed x and all ξ on the grid;
/// returns a (G × N) row-per-state matrix.
fn coherent_batch_d1(qt: &QuantumTorus, x: f64, xis: &[f64]) -> CMat {
    let n = qt.n as usize;
    let nf = qt.n as f64;
    let hb = qt.hbar();
    let k1 = qt.kappa[0];
    let th = qt.kappa[1] / TWO_PI;
    let amp = (PI * hb).powf(-0.25);
    let l = (2.0 * hb * (1e15f64).ln()).sqrt();
    let n_lo = (x - l - 1.0).floor() as i64;
    let n_hi = (x + l + 1.0).ceil() as i64;
    let g = xis.len();
    let mut cmat = CMat::zeros((g, n));
    for img in n_lo..=n_hi {
        for j in 0..n {
            let y = (j as f64 + th) / nf - img as f64;
            let env = amp * (-(y - x).powi(2) / (2.0 * hb)).exp();
            if env < amp * 1e-15 {
                continue;
            }
            let base = k1 * img as f64;
            let yx = y - x / 2.0;
            for (k, &xi) in xis.iter().enumerate() {
                cmat[[k, j]] += C::from_polar(env, xi / hb * yx + base);
            }
        }
    }
    for mut row in cmat.rows_mut() {
        let nrm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in row.iter_mut() {
            *z /= nrm;
        }
    }
    cmat
}

/// Op_κ^{AW}(a) by midpoint quadrature of the coherent-state average
/// (d = 1; see module docs — higher d is out of numerical reach here).
pub fn anti_wick_fn(
    qt: &QuantumTorus,
    f: &dyn Fn(f64, f64) -> f64,
    g: usize,
) -> Result<TorusOperator> {
    if qt.d != 1 {
        return Err(QcatError::Validation(
            "anti_wick quadrature implemented for d = 1".into(),
        ));
    }
    if g == 0 {
        return Err(QcatError::Validation("grid must be positive".into()));
    }
    let n = qt.n as usize;
    let xis: Vec<f64> = (0..g).map(|k| (k as f64 + 0.5) / g as f64).collect();
    let mut aw = CMat::zeros((n, n));
    for ix in 0..g {
        let x = (ix as f64 + 0.5) / g as f64;
        let cmat = coherent_batch_d1(qt, x, &xis);
        // C† D C with D = diag(f(x, ξ_k))
        let mut dc = cmat.clone();
        for (k, mut row) in dc.rows_mut().into_iter().enumerate() {
            let w = C::new(f(x, xis[k]), 0.0);
            for z in row.iter_mut() {
                *z *= w;
            }
        }
        aw += &linalg::mul_ah_b(&cmat, &dc);
    }
    let scale = qt.n as f64 / (g * g) as f64;
    aw.mapv_inplace(|z| z * scale);
    Ok(TorusOperator { matrix: aw, qt: qt.clone() })
}

pub fn anti_wick(qt: &QuantumTorus, a: &TrigObservable, g: usize) -> Result<TorusOperator> {
    let obs = a.clone();
    anti_wick_fn(qt, &move |x, xi| obs.value(&[x, xi]).re, g)
}

/// The Moyal-square Fourier multiplier of the adapted Gaussian:
/// μ_r = (G_ℏ ♯ G_ℏ)^∧(−Jr) = exp(−π/2(‖s‖² + ‖A(ℏ)s‖²)),
/// s = B(ℏ)^{−T} J r, A(ℏ) = πℏ B(ℏ) J B(ℏ)ᵀ.
pub struct MultiplierTable {
    pub b: Array2<f64>,
    b_inv_t: Array2<f64>,
    ah: Array2<f64>,
    pub hbar: f64,
    pub d: usize,
}

fn j_mat(d: usize) -> Array2<f64> {
    let n = 2 * d;
    let mut j = Array2::zeros((n, n));
    for c in 0..d {
        j[[c, c + d]] = -1.0;
        j[[c + d, c]] = 1.0;
    }
    j
}

impl MultiplierTable {
    pub fn new(frame: &AdaptedFrame, qt: &QuantumTorus) -> MultiplierTable {
        let hbar = qt.hbar();
        let b = adapted_scaling_matrix(frame, hbar);
        let b_inv_t = invert_real(&b.t().to_owned());
        let j = j_mat(qt.d);
        let ah = b.dot(&j).dot(&b.t()).mapv(|x| x * PI * hbar);
        MultiplierTable { b, b_inv_t, ah, hbar, d: qt.d }
    }

    pub fn mu(&self, r: &[i64]) -> f64 {
        let d = self.d;
        // J r = (−r_ξ, r_x)
        let jr = Array1::from_shape_fn(2 * d, |i| {
            if i < d {
                -(r[d + i] as f64)
            } else {
                r[i - d] as f64
            }
        });
        let s = self.b_inv_t.dot(&jr);
        let as_ = self.ah.dot(&s);
        let q = s.dot(&s) + as_.dot(&as_);
        (-PI / 2.0 * q).exp()
    }
}

/// Appendix-A quadrature oracle for μ_r (d = 1):
/// K(ρ₀) = 2∫e^{−2πi⟨ρ₁,ρ₀⟩}G(ρ₁)G(A(ℏ)ρ₁−ρ₀)dρ₁, μ_r = ∫K(ρ₀)e^{−2πi⟨s,ρ₀⟩}dρ₀.
pub fn multiplier_quadrature(table: &MultiplierTable, r: &[i64]) -> C {
    assert_eq!(table.d, 1, "quadrature oracle is d=1");
    let ah = &table.ah;
    let jr = [-(r[1] as f64), r[0] as f64];
    let s = table.b_inv_t.dot(&Array1::from(vec![jr[0], jr[1]]));
    let l = 4.0f64;
    let n = 96usize;
    let step = 2.0 * l / n as f64;
    let w = step * step;
    let grid: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * step - l).collect();
    let g1: Vec<Vec<f64>> = grid
        .iter()
        .map(|&x| grid.iter().map(|&y| (-PI * (x * x + y * y)).exp()).collect())
        .collect();
    let mut mu = C::new(0.0, 0.0);
    for &x0 in &grid {
        for &y0 in &grid {
            let mut k = C::new(0.0, 0.0);
            for (i, &x1) in grid.iter().enumerate() {
                for (jj, &y1) in grid.iter().enumerate() {
                    let ax = ah[[0, 0]] * x1 + ah[[0, 1]] * y1 - x0;
                    let ay = ah[[1, 0]] * x1 + ah[[1, 1]] * y1 - y0;
                    let amp = g1[i][jj] * (-PI * (ax * ax + ay * ay)).exp();
                    if amp < 1e-18 {
                        continue;
                    }
                    k += C::from_polar(amp, -TWO_PI * (x1 * x0 + y1 * y0));
                }
            }
            k *= C::new(2.0 * w, 0.0);
            mu += k * C::from_polar(w, -TWO_PI * (s[0] * x0 + s[1] * y0));
        }
    }
    mu
}

/// MultiplierTable with the Appendix-A cross-check (3 indices, d = 1).
pub fn moyal_square_multiplier(
    frame: &AdaptedFrame,
    qt: &QuantumTorus,
) -> Result<MultiplierTable> {
    let table = MultiplierTable::new(frame, qt);
    let mu0 = table.mu(&vec![0i64; 2 * qt.d]);
    if (mu0 - 1.0).abs() > 1e-10 {
        return Err(QcatError::MathInvariant(format!("μ₀ = {mu0} != 1")));
    }
    if qt.d == 1 {
        for r in [[1i64, 2], [3, -1], [0, 2]] {
            let cf = table.mu(&r);
            let q = multiplier_quadrature(&table, &r);
            let diff = (C::new(cf, 0.0) - q).norm();
            if diff > 1e-4 {
                return Err(QcatError::MathInvariant(format!(
                    "multiplier closed form vs quadrature differ by {diff:.3e} at r={r:?}"
                )));
            }
        }
    }
    Ok(table)
}

/// Op_κ⁺(a) = Op_κ^w({a_r μ_r}).
pub fn op_plus(
    qt: &QuantumTorus,
    a: &TrigObservable,
    frame: &AdaptedFrame,
    allow_alias: bool,
) -> Result<TorusOperator> {
    let table = MultiplierTable::new(frame, qt);
    op_plus_with_table(qt, a, &table, allow_alias)
}

pub fn op_plus_with_table(
    qt: &QuantumTorus,
    a: &TrigObservable,
    table: &MultiplierTable,
    allow_alias: bool,
) -> Result<TorusOperator> {
    let damped = a.multiplied(|r| table.mu(r));
    weyl(qt, &damped, allow_alias)
}

/// Adapted-Gaussian Fourier data for the periodization operators T_ρ.
pub struct GaussianFrame {
    pub b: Array2<f64>,
    pub b_inv_t: Array2<f64>,
    pub det_b: f64,
    pub d: usize,
}

impl GaussianFrame {
    pub fn new(frame: &AdaptedFrame, qt: &QuantumTorus) -> GaussianFrame {
        let b = adapted_scaling_matrix(frame, qt.hbar());
        let b_inv_t = invert_real(&b.t().to_owned());
        let det_b = {
            let n = b.nrows();
            let na = nalgebra::DMatrix::from_fn(n, n, |i, j| b[[i, j]]);
            na.determinant().abs()
        };
        GaussianFrame { b, b_inv_t, det_b, d: qt.d }
    }

    /// Ĝ_ℏ^{ρ₀}(v) = e^{−2πi⟨v,ρ₀⟩} 2^{d/2} |det B|^{−1/2} e^{−π‖B^{−T}v‖²}
    pub fn ghat(&self, v: &[f64], rho0: &[f64]) -> C {
        let vv = Array1::from(v.to_vec());
        let bv = self.b_inv_t.dot(&vv);
        let amp = 2.0f64.powf(self.d as f64 / 2.0).sqrt().powi(2); // 2^{d/2}
        let _ = amp;
        let mag = 2.0f64.powf(self.d as f64 / 2.0) / self.det_b.sqrt()
            * (-PI * bv.dot(&bv)).exp();
        let ang: f64 = v.iter().zip(rho0.iter()).map(|(a, b)| a * b).sum();
        C::from_polar(mag, -TWO_PI * ang)
    }

    /// G_ℏ(w − ρ₀) = 2^{d/2}|det B|^{1/2} e^{−π‖B(w−ρ₀)‖²}
    pub fn gval(&self, w: &[f64], rho0: &[f64]) -> f64 {
        let diff = Array1::from_shape_fn(2 * self.d, |i| w[i] - rho0[i]);
        let bw = self.b.dot(&diff);
        2.0f64.powf(self.d as f64 / 2.0) * self.det_b.sqrt() * (-PI * bw.dot(&bw)).exp()
    }

    /// Index cutoff so that the Gaussian transform tail is below `tol`.
    pub fn rmax(&self, tol: f64) -> i64 {
        let l = ((1.0 / tol).ln() / PI).sqrt();
        // ‖B^{-T}v‖ ≥ ‖v‖ / ‖Bᵀ‖; bound ‖Bᵀ‖ by its Frobenius norm
        let bnorm = self.b.iter().map(|x| x * x).sum::<f64>().sqrt();
        (l * bnorm).ceil() as i64 + 2
    }
}

/// Fourier coefficients t_r of T_ρ(G_ℏ^{ρ₀}): t_r = e^{iπ⟨r,ρ⟩/N}·Ĝ_ℏ^{ρ₀}(−ρ−Jr).
pub fn t_coeffs(
    qt: &QuantumTorus,
    gf: &GaussianFrame,
    rho: &[f64],
    rho0: &[f64],
    tol: f64,
) -> Vec<(Vec<i64>, C)> {
    let d = qt.d;
    let rmax = gf.rmax(tol);
    let nf = qt.n as f64;
    let mut out = Vec::new();
    let side = (2 * rmax + 1) as usize;
    let total = side.pow(2 * d as u32);
    for flat in 0..total {
        let mut idx = flat;
        let mut r = vec![0i64; 2 * d];
        for c in (0..2 * d).rev() {
            r[c] = (idx % side) as i64 - rmax;
            idx /= side;
        }
        // v = −ρ − Jr, Jr = (−r_ξ, r_x)
        let mut v = vec![0.0f64; 2 * d];
        for c in 0..d {
            v[c] = -rho[c] + r[d + c] as f64;
            v[d + c] = -rho[d + c] - r[c] as f64;
        }
        let ghat = gf.ghat(&v, rho0);
        if ghat.norm() < tol {
            continue;
        }
        let ang: f64 = r.iter().zip(rho.iter()).map(|(a, b)| *a as f64 * b).sum();
        let t = C::from_polar(1.0, PI * ang / nf) * ghat;
        out.push((r, t));
    }
    out
}

/// Op_κ^w(T_ρ(G_ℏ^{ρ₀})).
pub fn periodized_gaussian_op(
    qt: &QuantumTorus,
    rho: &[f64],
    rho0: &[f64],
    frame: &AdaptedFrame,
) -> Result<TorusOperator> {
    let gf = GaussianFrame::new(frame, qt);
    periodized_gaussian_op_with(qt, &gf, rho, rho0)
}

pub fn periodized_gaussian_op_with(
    qt: &QuantumTorus,
    gf: &GaussianFrame,
    rho: &[f64],
    rho0: &[f64],
) -> Result<TorusOperator> {
    let dim = qt.dim();
    let mut m = CMat::zeros((dim, dim));
    for (r, t) in t_coeffs(qt, gf, rho, rho0, 1e-15) {
        let act = translation_action(qt, &r)?;
        for j in 0..dim {
            m[[j, act.src[j]]] += t * act.val[j];
        }
    }
    Ok(TorusOperator { matrix: m, qt: qt.clone() })
}

/// Direct Eq.(11) lattice sum T_ρ(G_ℏ^{ρ₀})(ρ′) — Poisson-check oracle.
pub fn t_direct(
    qt: &QuantumTorus,
    gf: &GaussianFrame,
    rho: &[f64],
    rho0: &[f64],
    rhop: &[f64],
) -> C {
    let d = qt.d;
    let nf = qt.n as f64;
    let rmax = 4i64;
    let side = (2 * rmax + 1) as usize;
    let total = side.pow(2 * d as u32);
    let mut tot = C::new(0.0, 0.0);
    for flat in 0..total {
        let mut idx = flat;
        let mut r = vec![0i64; 2 * d];
        for c in (0..2 * d).rev() {
            r[c] = (idx % side) as i64 - rmax;
            idx /= side;
        }
        // w = ρ′ + r − Jρ/(2N); Jρ = (−ρ_ξ, ρ_x)
        let mut w = vec![0.0f64; 2 * d];
        for c in 0..d {
            w[c] = rhop[c] + r[c] as f64 + rho[d + c] / (2.0 * nf);
            w[d + c] = rhop[d + c] + r[d + c] as f64 - rho[c] / (2.0 * nf);
        }
        let f = gf.gval(&w, rho0);
        let ang: f64 = r
            .iter()
            .zip(rhop.iter())
            .zip(rho.iter())
            .map(|((ri, rpi), rhoi)| (*ri as f64 + rpi) * rhoi)
            .sum();
        tot += C::from_polar(f, TWO_PI * ang);
    }
    tot
}

/// Fourier-series evaluation of T_ρ(G_ℏ^{ρ₀})(ρ′) from t_coeffs.
pub fn t_fourier(
    qt: &QuantumTorus,
    gf: &GaussianFrame,
    rho: &[f64],
    rho0: &[f64],
    rhop: &[f64],
) -> C {
    let d = qt.d;
    let mut tot = C::new(0.0, 0.0);
    for (r, t) in t_coeffs(qt, gf, rho, rho0, 1e-16) {
        // e^{−2πi⟨Jr,ρ′⟩}, Jr = (−r_ξ, r_x)
        let mut ang = 0.0;
        for c in 0..d {
            ang += -(r[d + c] as f64) * rhop[c] + (r[c] as f64) * rhop[d + c];
        }
        tot += t * C::from_polar(1.0, -TWO_PI * ang);
    }
    tot
}

/// Prop 4.2 quadrature defect (d = 1):
/// ‖(1/G²)Σ_ρ Op^w(T_ρF₁)†Op^w(T_ρF₂) − Op^w(T₀(F̄₁♯F₂))‖_max, with the
/// right-hand side computed by direct plane quadrature of
/// c_n = ∫ e^{iπ⟨n,ρ⟩/N} conj(F̂₁(Jn−ρ)) F̂₂(−ρ) dρ.
pub fn prop42_defect(
    qt: &QuantumTorus,
    frame: &AdaptedFrame,
    rho01: [f64; 2],
    rho02: [f64; 2],
    g: usize,
) -> Result<f64> {
    if qt.d != 1 {
        return Err(QcatError::Validation("prop42_defect implemented for d = 1".into()));
    }
    let gf = GaussianFrame::new(frame, qt);
    let n = qt.dim();
    let mut lhs = CMat::zeros((n, n));
    for i in 0..g {
        for j in 0..g {
            let rho = [(i as f64 + 0.5) / g as f64, (j as f64 + 0.5) / g as f64];
            let o1 = periodized_gaussian_op_with(qt, &gf, &rho, &rho01)?;
            let o2 = periodized_gaussian_op_with(qt, &gf, &rho, &rho02)?;
            lhs += &linalg::mul_ah_b(&o1.matrix, &o2.matrix);
        }
    }
    lhs.mapv_inplace(|z| z / (g * g) as f64);
    let rmax = gf.rmax(1e-13);
    let lq = 30.0f64;
    let nq = 240usize;
    let step = 2.0 * lq / nq as f64;
    let w2 = step * step;
    let grid: Vec<f64> = (0..nq).map(|i| (i as f64 + 0.5) * step - lq).collect();
    let mut rhs = CMat::zeros((n, n));
    let nf = qt.n as f64;
    for n1 in -rmax..=rmax {
        for n2 in -rmax..=rmax {
            let jn = [-(n2 as f64), n1 as f64];
            let mut c = C::new(0.0, 0.0);
            for &x in &grid {
                for &y in &grid {
                    let f2 = gf.ghat(&[-x, -y], &rho02);
                    if f2.norm() < 1e-15 {
                        continue;
                    }
                    let f1 = gf.ghat(&[jn[0] - x, jn[1] - y], &rho01).conj();
                    if f1.norm() < 1e-15 {
                        continue;
                    }
                    c += C::from_polar(w2, PI * (n1 as f64 * x + n2 as f64 * y) / nf) * f1 * f2;
                }
            }
            if c.norm() < 1e-14 {
                continue;
            }
            let act = translation_action(qt, &[n1, n2])?;
            for j in 0..n {
                rhs[[j, act.src[j]]] += c * act.val[j];
            }
        }
    }
    Ok(linalg::max_abs(&(&lhs - &rhs)))
}

/// Quadrature defect of the Eq.(12) resolution of identity on a (ρ, ρ₀)
/// midpoint grid (d = 1), computed through the factorized form: the ρ₀
/// average reduces to a delta on r′ ≡ r (mod G₀) with an explicit phase.
pub fn eq12_defect(qt: &QuantumTorus, frame: &AdaptedFrame, g_rho: usize, g_rho0: usize) -> Result<f64> {
    if qt.d != 1 {
        return Err(QcatError::Validation("eq12_defect implemented for d = 1".into()));
    }
    let gf = GaussianFrame::new(frame, qt);
    let n = qt.dim();
    let nf = qt.n as f64;
    let rmax = gf.rmax(1e-14);
    let grid: Vec<f64> = (0..g_rho).map(|i| (i as f64 + 0.5) / g_rho as f64).collect();
    // α_r over the ρ-grid: amplitude × e^{iπ⟨r,ρ⟩/N}
    let mut alpha: BTreeMap<(i64, i64), Vec<C>> = BTreeMap::new();
    for r1 in -rmax..=rmax {
        for r2 in -rmax..=rmax {
            let mut vals = Vec::with_capacity(g_rho * g_rho);
            let mut keep = false;
            for &rx in &grid {
                for &rxi in &grid {
                    // v = −ρ − Jr = (−ρ_x + r2, −ρ_ξ − r1); amplitude part of ĝ
                    let v = [-rx + r2 as f64, -rxi - r1 as f64];
                    let bv = gf.b_inv_t.dot(&Array1::from(vec![v[0], v[1]]));
                    let amp = 2.0f64.sqrt() / gf.det_b.sqrt() * (-PI * bv.dot(&bv)).exp();
                    if amp > 1e-14 {
                        keep = true;
                    }
                    let ang = PI * (r1 as f64 * rx + r2 as f64 * rxi) / nf;
                    vals.push(C::from_polar(amp, ang));
                }
            }
            if keep {
                alpha.insert((r1, r2), vals);
            }
        }
    }
    // midpoint mean of e^{2πik·ρ₀} per axis
    let mean_phase = |k: i64| -> C {
        let mut s = C::new(0.0, 0.0);
        for i in 0..g_rho0 {
            s += C::from_polar(1.0, TWO_PI * k as f64 * (i as f64 + 0.5) / g_rho0 as f64);
        }
        s / g_rho0 as f64
    };
    let mut translations: BTreeMap<(i64, i64), crate::torus::TranslationAction> = BTreeMap::new();
    let mut s = CMat::zeros((n, n));
    let keys: Vec<(i64, i64)> = alpha.keys().copied().collect();
    let span = (2 * rmax / g_rho0 as i64) + 1;
    for &(r1, r2) in &keys {
        for m1 in -span..=span {
            for m2 in -span..=span {
                let rp = (r1 + g_rho0 as i64 * m1, r2 + g_rho0 as i64 * m2);
                let (Some(ar), Some(arp)) = (alpha.get(&(r1, r2)), alpha.get(&rp)) else {
                    continue;
                };
                let mut c: C = ar
                    .iter()
                    .zip(arp.iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                c /= (g_rho * g_rho) as f64;
                // ρ₀ phase factor: J(r′−r) = (−Δr₂, Δr₁)
                let k1d = -(rp.1 - r2);
                let k2d = rp.0 - r1;
                c *= mean_phase(k1d) * mean_phase(k2d);
                if c.norm() < 1e-17 {
                    continue;
                }
                for key in [(r1, r2), rp] {
                    translations.entry(key).or_insert_with(|| {
                        translation_action(qt, &[key.0, key.1]).expect("valid r")
                    });
                }
                let tr = &translations[&(r1, r2)];
                let trp = &translations[&rp];
                // c · T_r† T_r′ : (T_r† T_r′)[m_r(j), m_rp(j)] += conj(val_r[j])·val_rp[j]
                for j in 0..n {
                    s[[tr.src[j], trp.src[j]]] += c * tr.val[j].conj() * trp.val[j];
                }
            }
        }
    }
    Ok(linalg::max_abs(&(&s - &linalg::ident(n))))
}

/// Coherent-state resolution-of-identity defect on a G×G midpoint grid (d=1).
pub fn coherent_roi_defect(qt: &QuantumTorus, g: usize) -> Result<f64> {
    let id = anti_wick_fn(qt, &|_, _| 1.0, g)?;
    Ok(linalg::max_abs(&(&id.matrix - &linalg::ident(qt.dim()))))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EgorovPoint {
    pub t: i64,
    pub defect: f64,
    pub predictor: f64,
    pub ratio: f64,
}

/// Eq.(15) drift: ‖Op⁺(a∘Aᵗ) − M^{−t}Op⁺(a)Mᵗ‖ with predictor ‖AᵗB(ℏ)⁻¹‖∞.
pub fn egorov_plus_drift(
    qt: &QuantumTorus,
    a: &TrigObservable,
    frame: &AdaptedFrame,
    mat: &IntSymplecticMatrix,
    propagator: &TorusOperator,
    t_range: &[i64],
    allow_alias: bool,
) -> Result<Vec<EgorovPoint>> {
    let table = MultiplierTable::new(frame, qt);
    let op_a = op_plus_with_table(qt, a, &table, allow_alias)?;
    let b = adapted_scaling_matrix(frame, qt.hbar());
    let b_inv = invert_real(&b);
    let mut out = Vec::new();
    for &t in t_range {
        let at = mat.int_pow(t);
        let lhs = op_plus_with_table(qt, &a.compose(mat, t), &table, allow_alias)?;
        let mt = propagator.unitary_power(t);
        let rhs = mt.adjoint().mul(&op_a).mul(&mt);
        let defect = linalg::op_norm2(&(&lhs.matrix - &rhs.matrix));
        let atb = at.as_f64().dot(&b_inv);
        let predictor = atb
            .rows()
            .into_iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        let ratio = if predictor > 0.0 { defect / predictor } else { 0.0 };
        out.push(EgorovPoint { t, defect, predictor, ratio });
    }
    Ok(out)
}
