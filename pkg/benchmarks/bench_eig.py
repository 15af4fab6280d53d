#!/usr/bin/env python3
"""Benchmark the compiled Jacobi kernels against the pure-Python fallbacks.

Eigensolver cases, both Hermitian families:
  * partial transposes of protocol output states (near-diagonal, the actual
    hot path inside the dense cross-checks), and
  * dense random Hermitian matrices (worst case, every sweep works hard).

Singular-value cases run the one-sided kernel on random complex matrices.
numpy.linalg is the accuracy reference. Run from the repo root:

    python3 benchmarks/bench_eig.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from weakrev import GhzParams, ProtocolParams, mask_first_m, partial_transpose, protocol_dense
from weakrev import _jacobi_py

try:
    from weakrev import _jacobi as _compiled
except ImportError:
    _compiled = None


def protocol_pt_matrix(n: int) -> np.ndarray:
    gp = GhzParams(theta=math.pi / 2, n=n)
    pp = ProtocolParams(s=0.3, p=0.4, r=0.5)
    state = protocol_dense(gp, pp)
    return partial_transpose(state, mask_first_m(n, n // 2)).matrix


def random_hermitian(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (raw + raw.conj().T) / 2.0


def random_complex(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def time_backend(module, matrix: np.ndarray, repeat: int) -> tuple[float, int, float]:
    """Best wall time over `repeat` runs, sweep count, max eigenvalue error."""
    best = math.inf
    diag = None
    sweeps = 0
    for _ in range(repeat):
        work = np.array(matrix, dtype=np.complex128, order="C")
        t0 = time.perf_counter()
        diag, _, sweeps, converged = module.jacobi_eigh(work, False, 64)
        best = min(best, time.perf_counter() - t0)
        if not converged:
            raise RuntimeError("benchmark matrix failed to converge")
    reference = np.linalg.eigvalsh(matrix)
    err = float(np.max(np.abs(np.sort(np.asarray(diag)) - reference)))
    return best, sweeps, err


def time_svd_backend(module, matrix: np.ndarray, repeat: int) -> tuple[float, int, float]:
    """Same shape of result as time_backend, for the one-sided SVD kernel."""
    best = math.inf
    sigma = None
    sweeps = 0
    for _ in range(repeat):
        work = np.ascontiguousarray(matrix.T, dtype=np.complex128)
        t0 = time.perf_counter()
        sigma, sweeps, converged = module.jacobi_svd(work, 64)
        best = min(best, time.perf_counter() - t0)
        if not converged:
            raise RuntimeError("benchmark matrix failed to converge")
    reference = np.linalg.svd(matrix, compute_uv=False)
    err = float(np.max(np.abs(np.sort(np.asarray(sigma))[::-1] - reference)))
    return best, sweeps, err


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="runs per case, best kept")
    args = parser.parse_args()

    cases = [(f"protocol-pt n={n}", protocol_pt_matrix(n)) for n in (6, 8)]
    cases += [(f"random dim={d}", random_hermitian(d, seed=20260816 + d)) for d in (16, 32, 64)]

    backends = [("python", _jacobi_py)]
    if _compiled is not None:
        backends.insert(0, ("compiled", _compiled))
    else:
        print("compiled extension not built; benchmarking the fallback only")

    svd_cases = [(f"svd random dim={d}", random_complex(d, seed=911 + d)) for d in (16, 32, 64)]

    header = f"{'case':<18} {'dim':>4}  {'backend':<8} {'sweeps':>6} {'time':>10}  {'max err':>9}  {'speedup':>7}"
    print(header)
    print("-" * len(header))
    for timer, group in ((time_backend, cases), (time_svd_backend, svd_cases)):
        for name, matrix in group:
            times = {}
            for label, module in backends:
                elapsed, sweeps, err = timer(module, matrix, args.repeat)
                times[label] = elapsed
                speedup = ""
                if label == "python" and "compiled" in times:
                    speedup = f"{times['python'] / times['compiled']:6.1f}x"
                print(f"{name:<18} {matrix.shape[0]:>4}  {label:<8} {sweeps:>6} "
                      f"{1e3 * elapsed:>8.2f}ms  {err:>9.2e}  {speedup:>7}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
