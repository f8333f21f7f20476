#!/usr/bin/env python3
"""Smoke test for the qcat_py extension module.

Builds nothing itself: it locates the cdylib produced by
`cargo build -p qcat-py`, copies it next to this script as qcat_py.so,
imports it, and exercises the main bindings end to end.
"""

import math
import pathlib
import shutil
import sys

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def locate_extension():
    candidates = [
        ROOT / "target" / "debug" / "libqcat_py.so",
        ROOT / "target" / "release" / "libqcat_py.so",
        ROOT / "target" / "debug" / "libqcat_py.dylib",
        ROOT / "target" / "release" / "libqcat_py.dylib",
    ]
    for src in candidates:
        if src.exists():
            dst = HERE / "qcat_py.so"
            if not dst.exists() or src.stat().st_mtime > dst.stat().st_mtime:
                shutil.copyfile(src, dst)
            return dst
    sys.exit("build the extension first: cargo build -p qcat-py")


locate_extension()
sys.path.insert(0, str(HERE))
import qcat_py  # noqa: E402

GOLDEN = [[2, 1], [1, 1]]
N = 16

# symplectic layer
A = qcat_py.SymplecticMatrix(GOLDEN)
assert A.d == 1 and A.quantizable()
lmax, l0, lplus = A.lyapunov()
assert abs(lmax - math.log((3 + math.sqrt(5)) / 2)) < 1e-12
assert abs(l0 - lmax / 2) < 1e-12 and abs(lplus - lmax) < 1e-12
m_e, n_e = A.ehrenfest_times(N, 0.1)
assert m_e >= 1 and n_e >= m_e

try:
    qcat_py.SymplecticMatrix([[2, 0], [0, 1]])
except ValueError:
    pass
else:
    raise AssertionError("non-symplectic matrix must be rejected")

# Hilbert space and translations
kappa = qcat_py.find_kappa(A, N)[0]
qt = qcat_py.QuantumTorus(N, 1, kappa)
assert qt.dim == N and abs(qt.hbar - 1.0 / (2.0 * math.pi * N)) < 1e-15

u = qcat_py.translation(qt, [1, 0])
v = qcat_py.translation(qt, [0, 1])
assert u.unitarity_defect() < 1e-12 and v.unitarity_defect() < 1e-12
# U(r)U(r') and U(r')U(r) differ by the symplectic phase e^{2πi σ/N}
lhs = u.mul(v).matrix
rhs = v.mul(u).matrix
phase = complex(math.cos(2 * math.pi / N), -math.sin(2 * math.pi / N))
defect = max(
    abs(lhs[i][j] - phase * rhs[i][j]) for i in range(N) for j in range(N)
)
assert defect < 1e-12, defect

# propagator, eigensystem, Egorov-side sanity
M = qcat_py.propagator(A, qt)
assert M.unitarity_defect() < 1e-10
assert qcat_py.intertwining_defect(M, A) < 1e-8
phases, vectors, residuals = M.eigensystem()
assert len(phases) == N and max(residuals) < 1e-8
psi = qcat_py.State(qt, [row[0] for row in vectors]).normalized()
assert abs(psi.norm() - 1.0) < 1e-12

# quantization of cos(2πx): all three quantizers agree to O(1/N)
cos_x = {(1, 0): 0.5 + 0j, (-1, 0): 0.5 + 0j}
ops = {
    "weyl": qcat_py.quantize(qt, cos_x, "weyl"),
    "anti_wick": qcat_py.quantize(qt, cos_x, "anti_wick"),
    "op_plus": qcat_py.quantize(qt, cos_x, "op_plus", A),
}
for name, op in ops.items():
    assert op.hermiticity_defect() < 1e-10, name
    mu = qcat_py.measure_of_state(psi, cos_x, name, A)
    assert abs(mu.imag) < 1e-10
    # eigenstate measures of cos are small (equidistribution-ish even at N=16)
    assert abs(mu.real) < 0.5, (name, mu)
w, aw = ops["weyl"].matrix, ops["anti_wick"].matrix
diff = max(abs(w[i][j] - aw[i][j]) for i in range(N) for j in range(N))
assert 1e-6 < diff < 0.5

# coherent state: Husimi mass concentrates near its center
rho = [0.25, 0.5]
coh = qcat_py.coherent_state(qt, rho).normalized()
h = coh.husimi(32)
flat = [(val, (i + 0.5) / 32, (j + 0.5) / 32) for i, row in enumerate(h) for j, val in enumerate(row)]
peak = max(flat)
assert abs(peak[1] - rho[0]) < 0.1 and abs(peak[2] - rho[1]) < 0.1, peak

# entropic uncertainty: position projectors vs the propagator's eigenbasis
proj = []
for i in range(N):
    p = [[0j] * N for _ in range(N)]
    p[i][i] = 1 + 0j
    proj.append(p)
e0 = [1 + 0j] + [0j] * (N - 1)
lhs, rhs, margin = qcat_py.eup_check(proj, vectors, e0)
assert margin >= -1e-10, margin

print("qcat_py smoke test: all checks passed")
