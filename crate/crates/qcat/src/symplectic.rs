//! Integer symplectic matrix analysis: symplecticity and quantizability
//! certificates, Lyapunov data, the ⋄-product, the adapted scaling matrix
//! B(ℏ), and Ehrenfest-time arithmetic.

use crate::error::{QcatError, Result};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Integer matrix in Sp(2d, Z), certified at construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntSymplecticMatrix {
    pub entries: Vec<Vec<i64>>,
    pub d: usize,
}

fn int_det(m: &[Vec<i64>]) -> i128 {
    // Bareiss fraction-free elimination
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let piv = (k + 1..n).find(|&i| a[i][k] != 0);
            match piv {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// M^T J M == J in exact integer arithmetic, J = [[0, −I], [I, 0]].
pub fn check_symplectic(m: &[Vec<i64>]) -> Result<bool> {
    let n = m.len();
    if n == 0 || n % 2 != 0 || m.iter().any(|r| r.len() != n) {
        return Err(QcatError::Dimension(format!(
            "symplectic check needs a square matrix of even side, got {n}"
        )));
    }
    let d = n / 2;
    let j_at = |r: usize, c: usize| -> i64 {
        if r < d && c == r + d {
            -1
        } else if r >= d && c == r - d {
            1
        } else {
            0
        }
    };
    for r in 0..n {
        for c in 0..n {
            // (M^T J M)[r][c] = sum_{p,q} M[p][r] J[p][q] M[q][c]
            let mut acc: i128 = 0;
            for p in 0..n {
                let (q, jv) = if p < d { (p + d, -1i128) } else { (p - d, 1i128) };
                acc += (m[p][r] as i128) * jv * (m[q][c] as i128);
            }
            if acc != j_at(r, c) as i128 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl IntSymplecticMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        if !check_symplectic(&entries)? {
            return Err(QcatError::NotSymplectic(format!("{entries:?}")));
        }
        let d = entries.len() / 2;
        Ok(IntSymplecticMatrix { entries, d })
    }

    pub fn side(&self) -> usize {
        2 * self.d
    }

    pub fn as_f64(&self) -> Array2<f64> {
        let n = self.side();
        Array2::from_shape_fn((n, n), |(i, j)| self.entries[i][j] as f64)
    }

    /// Exact integer inverse (= J^{-1} M^T J for symplectic M).
    pub fn inverse(&self) -> IntSymplecticMatrix {
        let n = self.side();
        let d = self.d;
        // A^{-1} = J^T A^T J with J = [[0,-I],[I,0]]; entrywise:
        // (J^T A^T J)[i][j] = sigma_i sigma_j A[j'][i'] with index swap across blocks
        let mut inv = vec![vec![0i64; n]; n];
        let part = |i: usize| -> (usize, i64) {
            if i < d {
                (i + d, 1)
            } else {
                (i - d, -1)
            }
        };
        for i in 0..n {
            for j in 0..n {
                let (ip, si) = part(i);
                let (jp, sj) = part(j);
                inv[i][j] = si * sj * self.entries[jp][ip];
            }
        }
        IntSymplecticMatrix { entries: inv, d }
    }

    pub fn mat_mul(&self, other: &IntSymplecticMatrix) -> IntSymplecticMatrix {
        let n = self.side();
        let mut out = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc: i128 = 0;
                for k in 0..n {
                    acc += self.entries[i][k] as i128 * other.entries[k][j] as i128;
                }
                out[i][j] = i64::try_from(acc).expect("integer overflow in matrix product");
            }
        }
        IntSymplecticMatrix { entries: out, d: self.d }
    }

    /// A^t for t ∈ Z (negative powers via the exact symplectic inverse).
    pub fn int_pow(&self, t: i64) -> IntSymplecticMatrix {
        let base = if t >= 0 { self.clone() } else { self.inverse() };
        let mut acc = IntSymplecticMatrix::identity(self.d);
        for _ in 0..t.unsigned_abs() {
            acc = acc.mat_mul(&base);
        }
        acc
    }

    pub fn identity(d: usize) -> IntSymplecticMatrix {
        let n = 2 * d;
        let mut e = vec![vec![0i64; n]; n];
        for i in 0..n {
            e[i][i] = 1;
        }
        IntSymplecticMatrix { entries: e, d }
    }

    /// Apply to an integer vector.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        let n = self.side();
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[i][j] * v[j]).sum())
            .collect()
    }
}

/// det(M − Id) ≠ 0 in exact integer arithmetic.
pub fn check_quantizable(m: &IntSymplecticMatrix) -> bool {
    let n = m.side();
    let mut shifted = m.entries.clone();
    for (i, row) in shifted.iter_mut().enumerate().take(n) {
        row[i] -= 1;
    }
    int_det(&shifted) != 0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LyapunovData {
    /// distinct positive exponents, ascending
    pub exponents: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub neutral_halfdim: usize,
    pub lambda_max: f64,
    pub lambda_plus: f64,
    pub lambda_zero: f64,
}

/// Spectrum of A clustered by modulus; exponents log|β| for |β| > 1.
pub fn lyapunov_data(m: &IntSymplecticMatrix) -> Result<LyapunovData> {
    let n = m.side();
    let na = nalgebra::DMatrix::from_fn(n, n, |i, j| m.entries[i][j] as f64);
    let eig = na.complex_eigenvalues();
    let tol = 1e-8;
    let mut logs: Vec<f64> = eig.iter().map(|z| z.norm().ln()).collect();
    logs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &l in &logs {
        if l.abs() > tol && l.abs() <= 10.0 * tol {
            return Err(QcatError::IllConditionedSpectrum(format!(
                "eigenvalue modulus ambiguously near 1 (log modulus {l:.3e})"
            )));
        }
    }
    let neutral = logs.iter().filter(|l| l.abs() <= tol).count();
    if neutral % 2 != 0 {
        return Err(QcatError::IllConditionedSpectrum(
            "odd count of unit-modulus eigenvalues".into(),
        ));
    }
    let mut exponents: Vec<f64> = Vec::new();
    let mut multiplicities: Vec<usize> = Vec::new();
    for &l in logs.iter().filter(|l| **l > tol) {
        match exponents.last() {
            Some(&last) if (l - last).abs() <= 1e-8 * l.abs().max(1.0) => {
                *multiplicities.last_mut().unwrap() += 1;
                // keep a running mean for the cluster representative
                let k = *multiplicities.last().unwrap() as f64;
                let e = exponents.last_mut().unwrap();
                *e += (l - *e) / k;
            }
            _ => {
                exponents.push(l);
                multiplicities.push(1);
            }
        }
    }
    let lambda_max = exponents.last().copied().unwrap_or(0.0);
    let lambda_plus: f64 = exponents
        .iter()
        .zip(&multiplicities)
        .map(|(l, &d)| l * d as f64)
        .sum();
    let lambda_zero: f64 = exponents
        .iter()
        .zip(&multiplicities)
        .map(|(l, &d)| (l - lambda_max / 2.0).max(0.0) * d as f64)
        .sum();
    Ok(LyapunovData {
        exponents,
        multiplicities,
        neutral_halfdim: neutral / 2,
        lambda_max,
        lambda_plus,
        lambda_zero,
    })
}

/// (Λ₀, Λ₊): the paper's lower bound and the Ruelle upper bound.
pub fn entropy_bounds(l: &LyapunovData) -> (f64, f64) {
    (l.lambda_zero, l.lambda_plus)
}

/// Block-interleaving ⋄-product of two even-sided matrices.
pub fn diamond(m1: &Array2<f64>, m2: &Array2<f64>) -> Result<Array2<f64>> {
    let n1 = m1.nrows();
    let n2 = m2.nrows();
    if n1 % 2 != 0 || n2 % 2 != 0 || m1.ncols() != n1 || m2.ncols() != n2 {
        return Err(QcatError::Dimension("⋄-product needs even-sided square inputs".into()));
    }
    let (d1, d2) = (n1 / 2, n2 / 2);
    let d = d1 + d2;
    let mut out = Array2::zeros((2 * d, 2 * d));
    // M1 occupies x-coords 0..d1 and ξ-coords d..d+d1; M2 the rest.
    for i in 0..n1 {
        for j in 0..n1 {
            let r = if i < d1 { i } else { i - d1 + d };
            let c = if j < d1 { j } else { j - d1 + d };
            out[[r, c]] = m1[[i, j]];
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            let r = if i < d2 { d1 + i } else { i - d2 + d + d1 };
            let c = if j < d2 { d1 + j } else { j - d2 + d + d1 };
            out[[r, c]] = m2[[i, j]];
        }
    }
    Ok(out)
}

pub fn diamond_int(m1: &IntSymplecticMatrix, m2: &IntSymplecticMatrix) -> IntSymplecticMatrix {
    let a = diamond(&m1.as_f64(), &m2.as_f64()).expect("even sides by construction");
    let n = a.nrows();
    let entries: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| a[[i, j]].round() as i64).collect())
        .collect();
    IntSymplecticMatrix { entries, d: n / 2 }
}

/// Lyapunov-adapted frame: conjugator Q and per-x-coordinate exponents
/// (0 entries mark neutral coordinates scaled by ε₀).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaptedFrame {
    pub conjugator_q: Vec<Vec<f64>>,
    /// (half-dim, exponent λ_i⁺) per ⋄-block, in coordinate order; exponent 0 = neutral
    pub block_order: Vec<(usize, f64)>,
    pub epsilon0: f64,
    pub lambda_max: f64,
}

impl AdaptedFrame {
    /// d=1 hyperbolic frame: Q columns are the unstable/stable eigenvectors,
    /// symplectically normalized (σ(v₊, v₋) = 1).
    pub fn d1_hyperbolic(a: &IntSymplecticMatrix) -> Result<AdaptedFrame> {
        if a.d != 1 {
            return Err(QcatError::Dimension("d1_hyperbolic needs a 2×2 matrix".into()));
        }
        let l = lyapunov_data(a)?;
        if l.exponents.len() != 1 {
            return Err(QcatError::UnsupportedFrame(
                "d=1 frame requires a hyperbolic matrix".into(),
            ));
        }
        let lam = l.lambda_max;
        let m = a.as_f64();
        // eigenvector for eigenvalue e^{±λ} of the 2×2 matrix
        let evec = |mu: f64| -> [f64; 2] {
            let (a11, a12, a21, a22) = (m[[0, 0]], m[[0, 1]], m[[1, 0]], m[[1, 1]]);
            // (A - mu)v = 0; take the more stable row
            let r1 = [a11 - mu, a12];
            let r2 = [a21, a22 - mu];
            let pick = if r1[0].hypot(r1[1]) >= r2[0].hypot(r2[1]) { r1 } else { r2 };
            let v = [-pick[1], pick[0]];
            let n = v[0].hypot(v[1]);
            [v[0] / n, v[1] / n]
        };
        // trace sign selects ±e^{λ} branch for the unstable direction
        let tr = m[[0, 0]] + m[[1, 1]];
        let sgn = if tr >= 0.0 { 1.0 } else { -1.0 };
        let vu = evec(sgn * lam.exp());
        let vs = evec(sgn * (-lam).exp());
        // σ(v₊, v₋) = v₊ᵀ J v₋ = -x₊ξ₋ + ξ₊x₋ ... with J=[[0,-1],[1,0]]:
        let sym = vu[0] * vs[1] - vu[1] * vs[0];
        let scale = 1.0 / sym;
        let vs = [vs[0] * scale, vs[1] * scale];
        Ok(AdaptedFrame {
            conjugator_q: vec![vec![vu[0], vs[0]], vec![vu[1], vs[1]]],
            block_order: vec![(1, lam)],
            epsilon0: 0.05,
            lambda_max: lam,
        })
    }

    /// Identity-conjugator frame from LyapunovData (⋄-block coordinate order
    /// assumed: neutral block first, then exponents ascending).
    pub fn standard(l: &LyapunovData, epsilon0: f64) -> Result<AdaptedFrame> {
        if l.lambda_max <= 0.0 {
            return Err(QcatError::UnsupportedFrame(
                "purely neutral spectrum: Theorem 1.1 is trivial there".into(),
            ));
        }
        let d: usize = l.neutral_halfdim + l.multiplicities.iter().sum::<usize>();
        let n = 2 * d;
        let mut q = vec![vec![0.0; n]; n];
        for (i, row) in q.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let mut block_order = Vec::new();
        if l.neutral_halfdim > 0 {
            block_order.push((l.neutral_halfdim, 0.0));
        }
        for (lam, &m) in l.exponents.iter().zip(&l.multiplicities) {
            block_order.push((m, *lam));
        }
        Ok(AdaptedFrame {
            conjugator_q: q,
            block_order,
            epsilon0,
            lambda_max: l.lambda_max,
        })
    }

    pub fn halfdim(&self) -> usize {
        self.block_order.iter().map(|(m, _)| m).sum()
    }

    pub fn q_matrix(&self) -> Array2<f64> {
        let n = 2 * self.halfdim();
        Array2::from_shape_fn((n, n), |(i, j)| self.conjugator_q[i][j])
    }

    /// Symplecticity defect of Q (must be ≤ 1e−10).
    pub fn q_defect(&self) -> f64 {
        let q = self.q_matrix();
        let d = self.halfdim();
        let n = 2 * d;
        let mut j = Array2::zeros((n, n));
        for i in 0..d {
            j[[i, i + d]] = -1.0;
            j[[i + d, i]] = 1.0;
        }
        let lhs = q.t().dot(&j).dot(&q);
        (&lhs - &j).iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// B(ℏ) = Q · diag(D₁(ℏ), D₁(ℏ)) · Q⁻¹ with D₁ = diag(ℏ^{−γ_j⁺}) per block,
/// γ_j⁺ = λ_j⁺/(2λ_max), γ₀⁺ = ε₀/(2λ_max).
pub fn adapted_scaling_matrix(frame: &AdaptedFrame, hbar: f64) -> Array2<f64> {
    let d = frame.halfdim();
    let n = 2 * d;
    let mut gamma = Vec::with_capacity(d);
    for &(m, lam) in &frame.block_order {
        let g = if lam == 0.0 {
            frame.epsilon0 / (2.0 * frame.lambda_max)
        } else {
            lam / (2.0 * frame.lambda_max)
        };
        for _ in 0..m {
            gamma.push(g);
        }
    }
    let mut diag = Array2::zeros((n, n));
    for i in 0..d {
        let s = hbar.powf(-gamma[i]);
        diag[[i, i]] = s;
        diag[[i + d, i + d]] = s;
    }
    let q = frame.q_matrix();
    let qinv = invert_real(&q);
    q.dot(&diag).dot(&qinv)
}

pub fn invert_real(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let na = nalgebra::DMatrix::from_fn(n, n, |i, j| a[[i, j]]);
    let inv = na.try_inverse().expect("singular conjugator");
    Array2::from_shape_fn((n, n), |(i, j)| inv[(i, j)])
}

/// Ehrenfest times (m_E, n_E) with ℏ = 1/(2πN); bracket rounded to nearest
/// (the convention consistent with every worked example in the source).
pub fn ehrenfest_times(n: u64, epsilon: f64, l: &LyapunovData) -> (i64, i64) {
    assert!(l.lambda_max > 0.0, "Ehrenfest times need lambda_max > 0");
    let m_e = ((1.0 - epsilon) * (n as f64).ln() / (2.0 * l.lambda_max)).round() as i64;
    let hbar = 1.0 / (2.0 * std::f64::consts::PI * n as f64);
    let n_e = ((1.0 - epsilon) * hbar.ln().abs() / l.lambda_max).round() as i64;
    (m_e.max(0), n_e.max(0))
}

pub fn golden_cat() -> IntSymplecticMatrix {
    IntSymplecticMatrix::new(vec![vec![2, 1], vec![1, 1]]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symplectic_basics() {
        assert!(check_symplectic(&vec![vec![1, 0], vec![0, 1]]).unwrap());
        assert!(check_symplectic(&vec![vec![2, 1], vec![1, 1]]).unwrap());
        assert!(!check_symplectic(&vec![vec![2, 0], vec![0, 1]]).unwrap());
        assert!(check_symplectic(&vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).is_err());
    }

    #[test]
    fn quantizability() {
        let golden = golden_cat();
        assert!(check_quantizable(&golden));
        let shear = IntSymplecticMatrix::new(vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert!(!check_quantizable(&shear));
        let shear2 = IntSymplecticMatrix::new(vec![vec![1, 0], vec![1, 1]]).unwrap();
        let padded = diamond_int(&shear2, &golden);
        assert!(!check_quantizable(&padded));
    }

    #[test]
    fn golden_lyapunov() {
        let l = lyapunov_data(&golden_cat()).unwrap();
        let lam = ((3.0 + 5.0f64.sqrt()) / 2.0).ln();
        assert_eq!(l.exponents.len(), 1);
        assert_eq!(l.multiplicities, vec![1]);
        assert_eq!(l.neutral_halfdim, 0);
        assert!((l.lambda_max - lam).abs() < 1e-10);
        assert!((l.lambda_plus - 0.962_423_650_119_206_9).abs() < 1e-10);
        assert!((l.lambda_zero - 0.481_211_825_059_603_4).abs() < 1e-10);
    }

    #[test]
    fn diamond_lyapunov_examples() {
        let g = golden_cat();
        let gg = diamond_int(&g, &g);
        assert!(check_symplectic(&gg.entries).unwrap());
        let l = lyapunov_data(&gg).unwrap();
        assert_eq!(l.multiplicities, vec![2]);
        assert!((l.lambda_plus - 1.924_847_300_238_413_8).abs() < 1e-9);
        assert!((l.lambda_zero - 0.962_423_650_119_206_9).abs() < 1e-9);

        let b = IntSymplecticMatrix::new(vec![vec![3, 2], vec![1, 1]]).unwrap();
        let gb = diamond_int(&g, &b);
        let l = lyapunov_data(&gb).unwrap();
        let lam_b = (2.0 + 3.0f64.sqrt()).ln();
        assert!((l.lambda_max - lam_b).abs() < 1e-9);
        let lam_g = ((3.0 + 5.0f64.sqrt()) / 2.0).ln();
        let expect = (lam_g - lam_b / 2.0).max(0.0) + (lam_b - lam_b / 2.0).max(0.0);
        assert!((l.lambda_zero - expect).abs() < 1e-9);
        assert!((l.lambda_zero - 0.962_424).abs() < 1e-4);
    }

    #[test]
    fn diamond_block_formula() {
        let m1 = ndarray::arr2(&[[1.0, 2.0], [3.0, 4.0]]);
        let m2 = ndarray::arr2(&[[5.0, 6.0], [7.0, 8.0]]);
        let dm = diamond(&m1, &m2).unwrap();
        let expect = ndarray::arr2(&[
            [1.0, 0.0, 2.0, 0.0],
            [0.0, 5.0, 0.0, 6.0],
            [3.0, 0.0, 4.0, 0.0],
            [0.0, 7.0, 0.0, 8.0],
        ]);
        assert_eq!(dm, expect);
        // associativity, exactly
        let m3 = ndarray::arr2(&[[9.0, 1.0], [2.0, 3.0]]);
        let l = diamond(&diamond(&m1, &m2).unwrap(), &m3).unwrap();
        let r = diamond(&m1, &diamond(&m2, &m3).unwrap()).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn modulus_quadruple_symmetry() {
        for m in [
            golden_cat(),
            IntSymplecticMatrix::new(vec![vec![3, 2], vec![1, 1]]).unwrap(),
            diamond_int(&golden_cat(), &IntSymplecticMatrix::new(vec![vec![0, -1], vec![1, 0]]).unwrap()),
        ] {
            let n = m.side();
            let na = nalgebra::DMatrix::from_fn(n, n, |i, j| m.entries[i][j] as f64);
            let mut logs: Vec<f64> = na.complex_eigenvalues().iter().map(|z| z.norm().ln()).collect();
            logs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for k in 0..n {
                assert!((logs[k] + logs[n - 1 - k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn scaling_matrix_golden() {
        let frame = AdaptedFrame::d1_hyperbolic(&golden_cat()).unwrap();
        assert!(frame.q_defect() < 1e-10);
        let hbar = 1.0 / (2.0 * std::f64::consts::PI * 32.0);
        let b = adapted_scaling_matrix(&frame, hbar);
        let expect = hbar.powf(-0.5);
        assert!((b[[0, 0]] - expect).abs() < 1e-8 * expect);
        assert!((b[[1, 1]] - expect).abs() < 1e-8 * expect);
        assert!(b[[0, 1]].abs() < 1e-8 * expect);
        // det B(ℏ) = ℏ^{−2 Σ dᵢγᵢ} = ℏ^{−1} for d=1 single exponent
        let det = b[[0, 0]] * b[[1, 1]] - b[[0, 1]] * b[[1, 0]];
        assert!((det - 1.0 / hbar).abs() < 1e-6 / hbar);
    }

    #[test]
    fn b_inverse_norm_trend() {
        let frame = AdaptedFrame::d1_hyperbolic(&golden_cat()).unwrap();
        let mut prev = f64::INFINITY;
        for n in [16u64, 32, 64, 128, 256] {
            let hbar = 1.0 / (2.0 * std::f64::consts::PI * n as f64);
            let b = adapted_scaling_matrix(&frame, hbar);
            let binv = invert_real(&b);
            let norm = binv.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(norm < prev);
            assert!(norm <= 2.0 * hbar.powf(0.5));
            prev = norm;
        }
    }

    #[test]
    fn ehrenfest_arithmetic() {
        let l = lyapunov_data(&golden_cat()).unwrap();
        let (me, ne) = ehrenfest_times(128, 0.1, &l);
        assert_eq!((me, ne), (2, 6));
        let (me64, _) = ehrenfest_times(64, 0.1, &l);
        assert_eq!(me64, 2);
        let (me0, ne0) = ehrenfest_times(128, 1.0, &l);
        assert_eq!((me0, ne0), (0, 0));
    }

    #[test]
    fn lambda_zero_monotone() {
        // increasing any non-maximal exponent (lambda_max fixed) never decreases Λ₀
        let mk = |exps: &[f64]| {
            let lm = exps.iter().cloned().fold(0.0, f64::max);
            let lz: f64 = exps.iter().map(|l| (l - lm / 2.0).max(0.0)).sum();
            lz
        };
        let base = [0.3, 0.7, 1.0];
        assert!(mk(&[0.5, 0.7, 1.0]) >= mk(&base));
        assert!(mk(&[0.3, 0.9, 1.0]) >= mk(&base));
    }

    #[test]
    fn int_pow_and_inverse() {
        let g = golden_cat();
        let gi = g.inverse();
        assert_eq!(gi.entries, vec![vec![1, -1], vec![-1, 2]]);
        let e = g.mat_mul(&gi);
        assert_eq!(e.entries, IntSymplecticMatrix::identity(1).entries);
        let g3 = g.int_pow(3);
        let g3i = g.int_pow(-3);
        assert_eq!(
            g3.mat_mul(&g3i).entries,
            IntSymplecticMatrix::identity(1).entries
        );
    }
}
