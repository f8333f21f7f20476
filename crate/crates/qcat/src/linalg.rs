//! Dense complex linear algebra helpers: Hermitian eigendecomposition,
//! unitary eigendecomposition via the commuting Hermitian pair, operator
//! 2-norms, and PSD square roots.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

pub type C = Complex64;
pub type CMat = Array2<C>;
pub type CVec = Array1<C>;

pub fn ident(n: usize) -> CMat {
    Array2::from_diag_elem(n, C::new(1.0, 0.0))
}

pub fn adjoint(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

pub fn mul(a: &CMat, b: &CMat) -> CMat {
    a.dot(b)
}

/// A† B
pub fn mul_ah_b(a: &CMat, b: &CMat) -> CMat {
    adjoint(a).dot(b)
}

/// A B†
pub fn mul_a_bh(a: &CMat, b: &CMat) -> CMat {
    a.dot(&adjoint(b))
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn matvec(a: &CMat, v: &CVec) -> CVec {
    a.dot(v)
}

fn adj_vec(a: &CMat, v: &CVec) -> CVec {
    // A† v without materializing the adjoint
    let n = a.ncols();
    let mut out = CVec::zeros(n);
    for (i, row) in a.rows().into_iter().enumerate() {
        let vi = v[i].conj();
        for (j, z) in row.iter().enumerate() {
            out[j] += (z * vi).conj();
        }
    }
    out
}

/// Operator 2-norm (largest singular value) by power iteration on A†A.
/// Deterministic start vectors; adequate for defect measurements and
/// max-estimators (converges geometrically with the singular-value gap).
pub fn op_norm2(a: &CMat) -> f64 {
    let (m, n) = (a.nrows(), a.ncols());
    if m == 0 || n == 0 {
        return 0.0;
    }
    let scale = max_abs(a);
    if scale == 0.0 {
        return 0.0;
    }
    let mut best = 0.0f64;
    for start in 0..2 {
        let mut v = CVec::zeros(n);
        // simple deterministic pseudo-random fill, different per restart
        let mut s: u64 = 0x9e3779b97f4a7c15u64.wrapping_add(start as u64);
        for j in 0..n {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let re = ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let im = ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5;
            v[j] = C::new(re, im);
        }
        let mut nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= nv;
        }
        let mut prev = 0.0f64;
        for it in 0..500 {
            let w = matvec(a, &v);
            let mut u = adj_vec(a, &w);
            nv = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nv == 0.0 {
                break;
            }
            for z in u.iter_mut() {
                *z /= nv;
            }
            v = u;
            let est = nv.sqrt();
            if it > 4 && (est - prev).abs() <= 1e-12 * est.max(1e-300) {
                prev = est;
                break;
            }
            prev = est;
        }
        best = best.max(prev);
    }
    best
}

/// Hermitian eigendecomposition, eigenvalues ascending, eigenvectors as
/// orthonormal columns of the returned matrix.
///
/// Backend: cyclic complex Jacobi rotations. Slower than a tridiagonal QL
/// solver but reliably accurate on matrices with degenerate spectra, which
/// dominate this codebase (symmetrized propagators, projector Gram blocks).
pub fn eigh(a: &CMat) -> (Array1<f64>, CMat) {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    // work on the Hermitian average to shed tiny asymmetries in the input
    for i in 0..n {
        m[[i, i]] = C::new(m[[i, i]].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[[i, j]] + m[[j, i]].conj()) * 0.5;
            m[[i, j]] = avg;
            m[[j, i]] = avg.conj();
        }
    }
    let mut v = ident(n);
    let fro = frobenius(&m).max(1e-300);
    let tol = 1e-15 * fro;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[[p, q]].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let z = m[[p, q]];
                let az = z.norm();
                if az <= 1e-300 {
                    continue;
                }
                let app = m[[p, p]].re;
                let aqq = m[[q, q]].re;
                let tau = (aqq - app) / (2.0 * az);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = z / az * (t * c); // complex sine carrying the phase of a_pq
                // rows/columns p,q of M: M <- U† M U with U = [[c, s], [-s̄, c]]
                for r in 0..n {
                    let mrp = m[[r, p]];
                    let mrq = m[[r, q]];
                    m[[r, p]] = mrp * c - mrq * s.conj();
                    m[[r, q]] = mrp * s + mrq * c;
                }
                for r in 0..n {
                    let mpr = m[[p, r]];
                    let mqr = m[[q, r]];
                    m[[p, r]] = mpr * c - mqr * s;
                    m[[q, r]] = mpr * s.conj() + mqr * c;
                }
                m[[p, q]] = C::new(0.0, 0.0);
                m[[q, p]] = C::new(0.0, 0.0);
                m[[p, p]] = C::new(m[[p, p]].re, 0.0);
                m[[q, q]] = C::new(m[[q, q]].re, 0.0);
                for r in 0..n {
                    let vrp = v[[r, p]];
                    let vrq = v[[r, q]];
                    v[[r, p]] = vrp * c - vrq * s.conj();
                    v[[r, q]] = vrp * s + vrq * c;
                }
            }
        }
    }
    let raw: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| raw[i].partial_cmp(&raw[j]).unwrap());
    let vals = Array1::from_iter(idx.iter().map(|&i| raw[i]));
    let vecs = Array2::from_shape_fn((n, n), |(r, c)| v[[r, idx[c]]]);
    (vals, vecs)
}

/// f(A) for Hermitian A through its eigendecomposition.
pub fn hermitian_fn(a: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(a);
    let mut scaled = vecs.clone();
    for (c, mut col) in scaled.columns_mut().into_iter().enumerate() {
        let fv = C::new(f(vals[c]), 0.0);
        for z in col.iter_mut() {
            *z *= fv;
        }
    }
    mul_a_bh(&scaled, &vecs)
}

/// PSD square root (eigenvalues clipped at 0).
pub fn psd_sqrt(a: &CMat) -> CMat {
    hermitian_fn(a, |x| x.max(0.0).sqrt())
}

/// Inverse PSD square root; eigenvalues below `floor` are rejected.
pub fn psd_inv_sqrt(a: &CMat, floor: f64) -> Result<CMat, f64> {
    let (vals, vecs) = eigh(a);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < floor {
        return Err(min);
    }
    let mut scaled = vecs.clone();
    for (c, mut col) in scaled.columns_mut().into_iter().enumerate() {
        let fv = C::new(1.0 / vals[c].sqrt(), 0.0);
        for z in col.iter_mut() {
            *z *= fv;
        }
    }
    Ok(mul_a_bh(&scaled, &vecs))
}

/// Eigendecomposition of a unitary matrix via the commuting Hermitian pair
/// H = (M+M†)/2, K = (M−M†)/(2i): Jacobi-free, cluster-safe. Within each
/// eigencluster of H, a second Hermitian decomposition of the compressed K
/// separates the ±θ branches; orthonormality inside degenerate clusters is
/// inherited from the Hermitian solver.
/// Returns (eigenphases in (−π,π], eigenvector columns).
pub fn unitary_eig(m: &CMat) -> (Array1<f64>, CMat) {
    let n = m.nrows();
    let mh = adjoint(m);
    let h = (m + &mh).mapv(|z| z * C::new(0.5, 0.0));
    let k = (m - &mh).mapv(|z| z * C::new(0.0, -0.5));
    let (hv, hw) = eigh(&h);
    // cluster H eigenvalues
    let mut phases = vec![0.0f64; n];
    let mut vecs = CMat::zeros((n, n));
    let mut start = 0usize;
    while start < n {
        let mut end = start + 1;
        while end < n && (hv[end] - hv[end - 1]).abs() <= 1e-9 {
            end += 1;
        }
        let cols = hw.slice(ndarray::s![.., start..end]).to_owned();
        if end - start == 1 {
            let v = cols.column(0).to_owned();
            let kv = matvec(&k, &v);
            let s: C = v.iter().zip(kv.iter()).map(|(a, b)| a.conj() * b).sum();
            phases[start] = s.re.atan2(hv[start]);
            vecs.column_mut(start).assign(&v);
        } else {
            // compress K to the cluster and rediagonalize
            let kc = mul_ah_b(&cols, &mul(&k, &cols));
            let (_kvals, kw) = eigh(&kc);
            let sub = mul(&cols, &kw);
            for (off, col) in sub.columns().into_iter().enumerate() {
                let v = col.to_owned();
                let mv = matvec(m, &v);
                let lam: C = v.iter().zip(mv.iter()).map(|(a, b)| a.conj() * b).sum();
                phases[start + off] = lam.im.atan2(lam.re);
                vecs.column_mut(start + off).assign(&v);
            }
        }
        start = end;
    }
    // deterministic order: by eigenphase, tie-break on first significant component
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        phases[i]
            .partial_cmp(&phases[j])
            .unwrap()
            .then_with(|| {
                let ci = first_sig(&vecs, i);
                let cj = first_sig(&vecs, j);
                ci.cmp(&cj)
            })
    });
    let out_p = Array1::from_iter(idx.iter().map(|&i| phases[i]));
    let out_v = Array2::from_shape_fn((n, n), |(r, c)| vecs[[r, idx[c]]]);
    (out_p, out_v)
}

fn first_sig(vecs: &CMat, col: usize) -> usize {
    let c = vecs.column(col);
    let mx = c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    c.iter().position(|z| z.norm() > 0.5 * mx).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rand_mat(n: usize, seed: u64) -> CMat {
        let mut s = seed;
        Array2::from_shape_fn((n, n), |_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let re = ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let im = ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5;
            C::new(re, im)
        })
    }

    #[test]
    fn eigh_reconstructs() {
        let x = rand_mat(17, 7);
        let h = (&x + &adjoint(&x)).mapv(|z| z * C::new(0.5, 0.0));
        let (vals, vecs) = eigh(&h);
        let mut rec = CMat::zeros((17, 17));
        for c in 0..17 {
            let v = vecs.column(c);
            for i in 0..17 {
                for j in 0..17 {
                    rec[[i, j]] += v[i] * v[j].conj() * C::new(vals[c], 0.0);
                }
            }
        }
        assert!(max_abs(&(&rec - &h)) < 1e-12);
        let g = mul_ah_b(&vecs, &vecs);
        assert!(max_abs(&(&g - &ident(17))) < 1e-12);
    }

    #[test]
    fn op_norm_matches_eigh() {
        let x = rand_mat(23, 3);
        let g = mul_ah_b(&x, &x);
        let (vals, _) = eigh(&g);
        let exact = vals[22].sqrt();
        let pw = op_norm2(&x);
        assert!((pw - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn unitary_eig_degenerate_cluster() {
        // permutation-like unitary with degeneracies: circulant shift on C^6
        let n = 6;
        let mut m = CMat::zeros((n, n));
        for j in 0..n {
            m[[(j + 1) % n, j]] = C::new(1.0, 0.0);
        }
        let (phases, vecs) = unitary_eig(&m);
        for c in 0..n {
            let v = vecs.column(c).to_owned();
            let mv = matvec(&m, &v);
            let lam = C::from_polar(1.0, phases[c]);
            let res: f64 = mv
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - lam * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-10, "residual {res} at column {c}");
        }
        let g = mul_ah_b(&vecs, &vecs);
        assert!(max_abs(&(&g - &ident(n))) < 1e-10);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let x = rand_mat(11, 9);
        let g = mul_ah_b(&x, &x);
        let r = psd_sqrt(&g);
        assert!(max_abs(&(&mul(&r, &r) - &g)) < 1e-10);
    }
}
