//! Concrete realization of H_N(κ): coordinate vectors, translation operators
//! U_κ(r/N), toral coherent states, the κ_A congruence solver, and the
//! metaplectic propagator M_κ(A) built by group averaging.

use crate::error::{QcatError, Result};
use crate::linalg::{self, CMat, CVec, C};
use crate::symplectic::IntSymplecticMatrix;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// The quantum phase space at level N: H_N(κ) ≅ C^{N^d}.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumTorus {
    pub n: u64,
    pub d: usize,
    /// (κ₁, κ₂) ∈ [0,2π)^{2d}: first d position phases, last d momentum phases
    pub kappa: Vec<f64>,
}

impl QuantumTorus {
    pub fn new(n: u64, d: usize, kappa: Vec<f64>) -> Result<QuantumTorus> {
        if n == 0 || d == 0 {
            return Err(QcatError::Validation("N and d must be positive".into()));
        }
        if kappa.len() != 2 * d {
            return Err(QcatError::Validation(format!(
                "kappa must have length 2d = {}, got {}",
                2 * d,
                kappa.len()
            )));
        }
        if kappa.iter().any(|k| !k.is_finite()) {
            return Err(QcatError::Validation("kappa entries must be finite".into()));
        }
        let kappa = kappa
            .into_iter()
            .map(|k| k.rem_euclid(TWO_PI))
            .collect();
        Ok(QuantumTorus { n, d, kappa })
    }

    pub fn hbar(&self) -> f64 {
        1.0 / (TWO_PI * self.n as f64)
    }

    pub fn dim(&self) -> usize {
        (self.n as usize).pow(self.d as u32)
    }

    /// Decode a flat index into the multi-index (j₁,…,j_d), j_d fastest.
    pub fn decode(&self, mut i: usize) -> Vec<usize> {
        let n = self.n as usize;
        let mut j = vec![0usize; self.d];
        for c in (0..self.d).rev() {
            j[c] = i % n;
            i /= n;
        }
        j
    }

    pub fn encode(&self, j: &[usize]) -> usize {
        let n = self.n as usize;
        j.iter().fold(0usize, |acc, &jc| acc * n + jc)
    }
}

#[derive(Debug, Clone)]
pub struct TorusState {
    pub coeffs: CVec,
    pub qt: QuantumTorus,
}

impl TorusState {
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> TorusState {
        let n = self.norm();
        if n > 0.0 {
            self.coeffs.mapv_inplace(|z| z / n);
        }
        self
    }

    pub fn inner(&self, other: &TorusState) -> C {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct TorusOperator {
    pub matrix: CMat,
    pub qt: QuantumTorus,
}

impl TorusOperator {
    pub fn identity(qt: &QuantumTorus) -> TorusOperator {
        TorusOperator {
            matrix: linalg::ident(qt.dim()),
            qt: qt.clone(),
        }
    }

    pub fn adjoint(&self) -> TorusOperator {
        TorusOperator {
            matrix: linalg::adjoint(&self.matrix),
            qt: self.qt.clone(),
        }
    }

    pub fn mul(&self, other: &TorusOperator) -> TorusOperator {
        TorusOperator {
            matrix: self.matrix.dot(&other.matrix),
            qt: self.qt.clone(),
        }
    }

    pub fn apply(&self, psi: &TorusState) -> TorusState {
        TorusState {
            coeffs: self.matrix.dot(&psi.coeffs),
            qt: psi.qt.clone(),
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        let g = linalg::mul_ah_b(&self.matrix, &self.matrix);
        linalg::max_abs(&(&g - &linalg::ident(self.matrix.nrows())))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::max_abs(&(&self.matrix - &linalg::adjoint(&self.matrix)))
    }

    /// U^t for unitary U (negative t through the adjoint).
    pub fn unitary_power(&self, t: i64) -> TorusOperator {
        let base = if t >= 0 { self.clone() } else { self.adjoint() };
        let mut acc = TorusOperator::identity(&self.qt);
        for _ in 0..t.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn expectation(&self, psi: &TorusState) -> C {
        psi.inner(&self.apply(psi))
    }
}

/// Sparse action of a translation operator: row j reads val[j]·x[src[j]].
pub struct TranslationAction {
    pub src: Vec<usize>,
    pub val: Vec<C>,
}

impl TranslationAction {
    pub fn to_matrix(&self) -> CMat {
        let dim = self.src.len();
        let mut m = CMat::zeros((dim, dim));
        for j in 0..dim {
            m[[j, self.src[j]]] = self.val[j];
        }
        m
    }

    /// U · X
    pub fn left_mul(&self, x: &CMat) -> CMat {
        let dim = self.src.len();
        let mut out = CMat::zeros((dim, x.ncols()));
        for j in 0..dim {
            let row = x.row(self.src[j]);
            let mut orow = out.row_mut(j);
            for (o, z) in orow.iter_mut().zip(row.iter()) {
                *o = self.val[j] * z;
            }
        }
        out
    }

    /// X · U†  (U†[m, j] = conj(val[j]) with m = src[j])
    pub fn right_mul_adjoint(&self, x: &CMat) -> CMat {
        let dim = self.src.len();
        let mut out = CMat::zeros((x.nrows(), dim));
        for j in 0..dim {
            let vc = self.val[j].conj();
            let col = x.column(self.src[j]);
            let mut ocol = out.column_mut(j);
            for (o, z) in ocol.iter_mut().zip(col.iter()) {
                *o = vc * z;
            }
        }
        out
    }
}

/// Sparse form of U_κ(r/N) for r ∈ Z^{2d}: per-axis cyclic shift by a_c with
/// modulation e^{2πi b_c (j_c+θ_c)/N}, boundary phase e^{iκ₁q} per wrap, and
/// the global symmetrization phase e^{−iπ⟨a,b⟩/N}.
pub fn translation_action(qt: &QuantumTorus, r: &[i64]) -> Result<TranslationAction> {
    let d = qt.d;
    if r.len() != 2 * d {
        return Err(QcatError::Dimension(format!(
            "translation vector must have length 2d = {}, got {}",
            2 * d,
            r.len()
        )));
    }
    let n = qt.n as i64;
    let nf = qt.n as f64;
    let dim = qt.dim();
    let (a, b) = r.split_at(d);
    let ab: i64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
    let ph0 = C::from_polar(1.0, -PI * ab as f64 / nf);
    let mut src = vec![0usize; dim];
    let mut val = vec![C::new(0.0, 0.0); dim];
    for (i, s) in src.iter_mut().enumerate() {
        let j = qt.decode(i);
        let mut v = ph0;
        let mut m = vec![0usize; d];
        for c in 0..d {
            let k1 = qt.kappa[c];
            let th = qt.kappa[d + c] / TWO_PI;
            let k = j[c] as i64 - a[c];
            let q = k.div_euclid(n);
            m[c] = (k - q * n) as usize;
            let ang = TWO_PI * b[c] as f64 * (j[c] as f64 + th) / nf + k1 * q as f64;
            v *= C::from_polar(1.0, ang);
        }
        *s = qt.encode(&m);
        val[i] = v;
    }
    Ok(TranslationAction { src, val })
}

/// Dense U_κ(r/N).
pub fn translation(qt: &QuantumTorus, r: &[i64]) -> Result<TorusOperator> {
    Ok(TorusOperator {
        matrix: translation_action(qt, r)?.to_matrix(),
        qt: qt.clone(),
    })
}

/// σ(r, r′) = ⟨r, J r′⟩ with J = [[0,−I],[I,0]] (integer-exact).
pub fn sigma(r: &[i64], rp: &[i64]) -> i64 {
    let d = r.len() / 2;
    let mut s = 0i64;
    for c in 0..d {
        s += -r[c] * rp[d + c] + r[d + c] * rp[c];
    }
    s
}

/// Toral coherent state |ρ,κ⟩: lattice periodization of the plane Gaussian,
/// normalized; tensor product over axes for d > 1.
pub fn coherent_state(qt: &QuantumTorus, rho: &[f64], tail_tol: f64) -> Result<TorusState> {
    if rho.len() != 2 * qt.d {
        return Err(QcatError::Dimension(format!(
            "coherent-state center must have length 2d = {}, got {}",
            2 * qt.d,
            rho.len()
        )));
    }
    if !(tail_tol > 0.0) {
        return Err(QcatError::Validation("tail_tol must be positive".into()));
    }
    let mut axes = Vec::with_capacity(qt.d);
    for c in 0..qt.d {
        let axis = coherent_axis(qt, rho[c], rho[qt.d + c], qt.kappa[c], qt.kappa[qt.d + c], tail_tol);
        let nrm = axis.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        axes.push(axis.mapv(|z| z / nrm));
    }
    let dim = qt.dim();
    let coeffs = CVec::from_shape_fn(dim, |i| {
        let j = qt.decode(i);
        j.iter()
            .enumerate()
            .fold(C::new(1.0, 0.0), |acc, (c, &jc)| acc * axes[c][jc])
    });
    Ok(TorusState { coeffs, qt: qt.clone() })
}

/// Unnormalized single-axis periodized Gaussian (exposed for the √N
/// pre-normalization invariant).
pub fn coherent_axis(
    qt: &QuantumTorus,
    x0: f64,
    xi0: f64,
    k1: f64,
    k2: f64,
    tail_tol: f64,
) -> CVec {
    let n = qt.n as usize;
    let nf = qt.n as f64;
    let hb = qt.hbar();
    let th = k2 / TWO_PI;
    // envelope e^{-(y-x0)^2/(2ℏ)} < tail_tol once |y-x0| > L
    let l = (2.0 * hb * (1.0 / tail_tol).ln()).sqrt();
    let n_lo = (x0 - l - 1.0).floor() as i64;
    let n_hi = (x0 + l + 1.0).ceil() as i64;
    let amp = (PI * hb).powf(-0.25);
    let mut c = CVec::zeros(n);
    for img in n_lo..=n_hi {
        for j in 0..n {
            let y = (j as f64 + th) / nf - img as f64;
            let env = amp * (-(y - x0).powi(2) / (2.0 * hb)).exp();
            if env.abs() < tail_tol * amp {
                continue;
            }
            let ph = xi0 / hb * (y - x0 / 2.0) + k1 * img as f64;
            c[j] += C::from_polar(env, ph);
        }
    }
    c
}

/// Solve (A^{−T} − Id)w ≡ −πN·v_A (mod 2π) for the admissible κ set.
pub fn find_kappa(a: &IntSymplecticMatrix, n: u64) -> Result<Vec<Vec<f64>>> {
    if !crate::symplectic::check_quantizable(a) {
        return Err(QcatError::NotQuantizable(format!("{:?}", a.entries)));
    }
    let d = a.d;
    let ai = a.inverse();
    let two_d = 2 * d;
    // B = Ai^T - Id (integer), v_A,k = Σ_l Ai[l][k]·Ai[l+d][k] mod 2
    let mut bm = vec![vec![0i64; two_d]; two_d];
    for i in 0..two_d {
        for j in 0..two_d {
            bm[i][j] = ai.entries[j][i] - if i == j { 1 } else { 0 };
        }
    }
    let v: Vec<i64> = (0..two_d)
        .map(|k| {
            let s: i64 = (0..d).map(|l| ai.entries[l][k] * ai.entries[l + d][k]).sum();
            s.rem_euclid(2)
        })
        .collect();
    let det = {
        let na = nalgebra::DMatrix::from_fn(two_d, two_d, |i, j| bm[i][j] as f64);
        na.determinant().round() as i64
    };
    if det == 0 {
        return Err(QcatError::NotQuantizable(
            "det(A^{-T} - Id) = 0 despite quantizability check".into(),
        ));
    }
    let l = det.unsigned_abs() as usize;
    let total = (l as f64).powi(two_d as i32);
    if total > 1e6 {
        return Err(QcatError::ResourceBudget(format!(
            "kappa enumeration needs {total:.0} candidates"
        )));
    }
    let nb = nalgebra::DMatrix::from_fn(two_d, two_d, |i, j| bm[i][j] as f64);
    let lu = nb.lu();
    let mut sols: Vec<Vec<f64>> = Vec::new();
    let mut mvec = vec![0usize; two_d];
    loop {
        let u = nalgebra::DVector::from_fn(two_d, |k, _| {
            -PI * n as f64 * v[k] as f64 + TWO_PI * mvec[k] as f64
        });
        let w = lu.solve(&u).ok_or_else(|| {
            QcatError::ConsistencyFailure("singular congruence matrix".into())
        })?;
        let mut kap = vec![0.0f64; two_d];
        for c in 0..d {
            kap[c] = (-w[c]).rem_euclid(TWO_PI);
            kap[d + c] = w[d + c].rem_euclid(TWO_PI);
        }
        let dup = sols.iter().any(|s| {
            s.iter().zip(&kap).all(|(a, b)| {
                let diff = (a - b).rem_euclid(TWO_PI);
                diff < 1e-9 || diff > TWO_PI - 1e-9
            })
        });
        if !dup {
            sols.push(kap);
        }
        // odometer over {0..L-1}^{2d}
        let mut carry = true;
        for mc in mvec.iter_mut() {
            if carry {
                *mc += 1;
                if *mc == l {
                    *mc = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    if sols.is_empty() {
        return Err(QcatError::ConsistencyFailure(
            "no kappa candidates produced".into(),
        ));
    }
    sols.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(sols)
}

/// Metaplectic propagator M_κ(A) by Schur group-averaging over the
/// translation representation: a two-stage average of U(Ar/N)·X·U(r/N)†
/// over momentum then position shifts of a seeded random X projects onto
/// the (one-dimensional) intertwiner space.
pub fn propagator(a: &IntSymplecticMatrix, qt: &QuantumTorus) -> Result<TorusOperator> {
    if a.d != qt.d {
        return Err(QcatError::Dimension(format!(
            "matrix half-dimension {} != torus d {}",
            a.d, qt.d
        )));
    }
    if !crate::symplectic::check_quantizable(a) {
        return Err(QcatError::NotQuantizable(format!("{:?}", a.entries)));
    }
    let dim = qt.dim();
    let n = qt.n as usize;
    let d = qt.d;
    for seed in 0..8u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut y = Array2::from_shape_fn((dim, dim), |_| {
            C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        for half in [1usize, 0usize] {
            let mut z = CMat::zeros((dim, dim));
            let mut t = vec![0usize; d];
            loop {
                let mut r = vec![0i64; 2 * d];
                for c in 0..d {
                    r[half * d + c] = t[c] as i64;
                }
                let ar = a.apply(&r);
                let u = translation_action(qt, &ar)?;
                let v = translation_action(qt, &r)?;
                let term = u.left_mul(&v.right_mul_adjoint(&y));
                z += &term;
                let mut carry = true;
                for tc in t.iter_mut() {
                    if carry {
                        *tc += 1;
                        if *tc == n {
                            *tc = 0;
                        } else {
                            carry = false;
                        }
                    }
                }
                if carry {
                    break;
                }
            }
            y = z.mapv(|w| w / (n as f64).powi(d as i32));
        }
        let s = (y.iter().map(|z| z.norm_sqr()).sum::<f64>() / dim as f64).sqrt();
        if s < 1e-6 {
            continue; // degenerate seed, retry
        }
        let mut m = y.mapv(|z| z / s);
        // phase fix: first row-major entry above half the max modulus → positive real
        let mx = linalg::max_abs(&m);
        let pivot = m
            .iter()
            .find(|z| z.norm() > 0.5 * mx)
            .copied()
            .expect("nonzero matrix has a pivot");
        let ph = pivot.conj() / pivot.norm();
        m.mapv_inplace(|z| z * ph);
        let op = TorusOperator { matrix: m, qt: qt.clone() };
        let ud = op.unitarity_defect();
        let id = check_intertwining(&op, a, qt)?;
        if ud <= 1e-10 && id <= 1e-8 {
            return Ok(op);
        }
        return Err(QcatError::ConstructionFailure(format!(
            "propagator defects: unitarity {ud:.3e}, intertwining {id:.3e} \
             (kappa not in the admissible set for A?)"
        )));
    }
    Err(QcatError::ConstructionFailure(
        "all averaging seeds degenerate".into(),
    ))
}

/// max over generators e_k of ‖M·U(e_k/N)·M† − U(Ae_k/N)‖₂.
pub fn check_intertwining(
    m: &TorusOperator,
    a: &IntSymplecticMatrix,
    qt: &QuantumTorus,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..2 * qt.d {
        let mut e = vec![0i64; 2 * qt.d];
        e[k] = 1;
        let ae = a.apply(&e);
        let u = translation(qt, &e)?;
        let ua = translation(qt, &ae)?;
        let lhs = m.mul(&u).mul(&m.adjoint());
        worst = worst.max(linalg::op_norm2(&(&lhs.matrix - &ua.matrix)));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{golden_cat, IntSymplecticMatrix};

    fn qt1(n: u64, kappa: (f64, f64)) -> QuantumTorus {
        QuantumTorus::new(n, 1, vec![kappa.0, kappa.1]).unwrap()
    }

    #[test]
    fn translation_zero_is_identity() {
        let qt = qt1(8, (0.7, 1.3));
        let t = translation(&qt, &[0, 0]).unwrap();
        assert!(linalg::max_abs(&(&t.matrix - &linalg::ident(8))) == 0.0);
    }

    #[test]
    fn translation_unitary() {
        let qt = qt1(8, (0.7, 1.3));
        let t = translation(&qt, &[2, 3]).unwrap();
        assert!(t.unitarity_defect() < 1e-12);
    }

    #[test]
    fn heisenberg_group_law_d1() {
        let qt = qt1(8, (0.7, 1.3));
        let nf = qt.n as f64;
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for ap in -2i64..=2 {
                    for bp in -2i64..=2 {
                        let l = translation(&qt, &[a, b])
                            .unwrap()
                            .mul(&translation(&qt, &[ap, bp]).unwrap());
                        let ph = C::from_polar(1.0, PI * sigma(&[a, b], &[ap, bp]) as f64 / nf);
                        let r = translation(&qt, &[a + ap, b + bp]).unwrap();
                        let rhs = r.matrix.mapv(|z| z * ph);
                        assert!(linalg::max_abs(&(&l.matrix - &rhs)) < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn heisenberg_group_law_d2() {
        let qt = QuantumTorus::new(4, 2, vec![0.3, 1.1, 2.0, 0.5]).unwrap();
        let nf = qt.n as f64;
        let vals: Vec<Vec<i64>> = {
            let mut v = Vec::new();
            for a in -1i64..=1 {
                for b in -1i64..=1 {
                    for c in -1i64..=1 {
                        for e in -1i64..=1 {
                            v.push(vec![a, b, c, e]);
                        }
                    }
                }
            }
            v
        };
        // spot-check a deterministic subset (full quad loop is in acceptance)
        for (i, r) in vals.iter().enumerate().step_by(7) {
            for (j, rp) in vals.iter().enumerate().step_by(11) {
                let _ = (i, j);
                let l = translation(&qt, r).unwrap().mul(&translation(&qt, rp).unwrap());
                let ph = C::from_polar(1.0, PI * sigma(r, rp) as f64 / nf);
                let sum: Vec<i64> = r.iter().zip(rp.iter()).map(|(x, y)| x + y).collect();
                let rhs = translation(&qt, &sum).unwrap().matrix.mapv(|z| z * ph);
                assert!(linalg::max_abs(&(&l.matrix - &rhs)) < 1e-13);
            }
        }
    }

    #[test]
    fn integer_translation_scalar() {
        let qt = qt1(8, (0.7, 1.3));
        let n = qt.n as i64;
        for nn in -1i64..=1 {
            for mm in -1i64..=1 {
                let u = translation(&qt, &[nn * n, mm * n]).unwrap();
                let ang = PI * qt.n as f64 * (nn * mm) as f64 - qt.kappa[0] * nn as f64
                    + qt.kappa[1] * mm as f64;
                let s = C::from_polar(1.0, ang);
                let id = linalg::ident(qt.dim()).mapv(|z| z * s);
                assert!(linalg::max_abs(&(&u.matrix - &id)) < 1e-12);
            }
        }
    }

    #[test]
    fn find_kappa_golden() {
        let g = golden_cat();
        let k8 = find_kappa(&g, 8).unwrap();
        assert_eq!(k8.len(), 1);
        assert!(k8[0].iter().all(|&x| x.abs() < 1e-9 || (x - TWO_PI).abs() < 1e-9));
        let k15 = find_kappa(&g, 15).unwrap();
        assert_eq!(k15.len(), 1);
        assert!((k15[0][0] - PI).abs() < 1e-9 && (k15[0][1] - PI).abs() < 1e-9);
    }

    #[test]
    fn find_kappa_minus_id() {
        let mid = IntSymplecticMatrix::new(vec![vec![-1, 0], vec![0, -1]]).unwrap();
        let ks = find_kappa(&mid, 5).unwrap();
        assert_eq!(ks.len(), 4);
        for k in &ks {
            let qt = QuantumTorus::new(5, 1, k.clone()).unwrap();
            let m = propagator(&mid, &qt).unwrap();
            assert!(check_intertwining(&m, &mid, &qt).unwrap() < 1e-10);
            // M² is a scalar phase (parity squared)
            let m2 = m.mul(&m);
            let s = m2.matrix[[0, 0]];
            let id = linalg::ident(5).mapv(|z| z * s);
            assert!(linalg::max_abs(&(&m2.matrix - &id)) < 1e-10);
        }
    }

    #[test]
    fn find_kappa_rejects_shear() {
        let shear = IntSymplecticMatrix::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert!(matches!(
            find_kappa(&shear, 8),
            Err(QcatError::NotQuantizable(_))
        ));
    }

    #[test]
    fn propagator_golden_16() {
        let g = golden_cat();
        let k = find_kappa(&g, 16).unwrap().remove(0);
        let qt = QuantumTorus::new(16, 1, k).unwrap();
        let m = propagator(&g, &qt).unwrap();
        assert!(m.unitarity_defect() < 1e-10);
        assert!(check_intertwining(&m, &g, &qt).unwrap() < 1e-10);
        // iterates: M^t U(r) M^{-t} = U(A^t r)
        for t in 1..=2i64 {
            let mt = m.unitary_power(t);
            let at = g.int_pow(t);
            let d = check_intertwining(&mt, &at, &qt).unwrap();
            assert!(d < 1e-8 * t as f64 + 1e-9, "t={t} defect {d}");
        }
    }

    #[test]
    fn propagator_fault_injection() {
        // corrupting one phase must blow up the intertwining defect
        let g = golden_cat();
        let k = find_kappa(&g, 16).unwrap().remove(0);
        let qt = QuantumTorus::new(16, 1, k).unwrap();
        let m = propagator(&g, &qt).unwrap();
        let mut bad = m.clone();
        for j in 0..16 {
            bad.matrix[[3, j]] = -bad.matrix[[3, j]];
        }
        let d = check_intertwining(&bad, &g, &qt).unwrap();
        assert!(d >= 0.1, "fault not detected: {d}");
    }

    #[test]
    fn propagator_d2_diamond() {
        let g = golden_cat();
        let b = IntSymplecticMatrix::new(vec![vec![3, 2], vec![1, 1]]).unwrap();
        let gb = crate::symplectic::diamond_int(&g, &b);
        let ks = find_kappa(&gb, 6).unwrap();
        assert!(!ks.is_empty());
        let qt = QuantumTorus::new(6, 2, ks[0].clone()).unwrap();
        let m = propagator(&gb, &qt).unwrap();
        assert!(m.unitarity_defect() < 1e-10);
        assert!(check_intertwining(&m, &gb, &qt).unwrap() < 1e-9);
    }

    #[test]
    fn coherent_norm_and_prenorm() {
        let qt = qt1(16, (0.0, 0.0));
        let c = coherent_state(&qt, &[0.3, 0.8], 1e-14).unwrap();
        assert!((c.norm() - 1.0).abs() < 1e-12);
        let raw = coherent_axis(&qt, 0.3, 0.8, 0.0, 0.0, 1e-14);
        let nrm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((nrm - 4.0).abs() < 1e-6, "pre-norm {nrm}");
    }

    #[test]
    fn coherent_overlap_decay() {
        let qt = qt1(32, (0.0, 0.0));
        let ca = coherent_state(&qt, &[0.2, 0.3], 1e-14).unwrap();
        let cb = coherent_state(&qt, &[0.7, 0.8], 1e-14).unwrap();
        assert!(ca.inner(&cb).norm() <= (-8.0f64).exp());
    }

    #[test]
    fn coherent_covariance() {
        let qt = qt1(16, (0.7, 1.3));
        let rho = [0.3, 0.55];
        let r = [3i64, -2];
        let nf = qt.n as f64;
        let shifted = [rho[0] + r[0] as f64 / nf, rho[1] + r[1] as f64 / nf];
        let c1 = coherent_state(&qt, &rho, 1e-15).unwrap();
        let c2 = coherent_state(&qt, &shifted, 1e-15).unwrap();
        let u = translation(&qt, &r).unwrap();
        let ratio = c2.inner(&u.apply(&c1));
        assert!((ratio.norm() - 1.0).abs() < 1e-10, "covariance |ratio| = {}", ratio.norm());
    }

    #[test]
    fn coherent_d2_product() {
        let qt = QuantumTorus::new(4, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let c = coherent_state(&qt, &[0.2, 0.6, 0.1, 0.9], 1e-14).unwrap();
        assert!((c.norm() - 1.0).abs() < 1e-12);
        assert_eq!(c.coeffs.len(), 16);
    }
}
