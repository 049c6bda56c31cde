"""Compare the compiled and pure-Python Bloch kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Times the right-hand side alone and a full steady-state integration, and
checks that both backends land on the same state.
"""

import argparse
import timeit

from ramanoam import _pykernels, bloch
from ramanoam.bloch import DensityMatrix, LambdaSystem

try:
    from ramanoam import _ckernels
except ImportError:
    _ckernels = None


def bench(repeat):
    s = LambdaSystem(gamma_p=0.05, omega_c=0.1, omega_s=0.02, delta_c=0.3, delta_s=0.25)
    params, x = s.params(), DensityMatrix.pure("c").to_vector()
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    rows = {}
    for name, k in backends.items():
        n = 20000
        t_rhs = min(timeit.repeat(lambda: k.rhs(params, x), number=n, repeat=repeat)) / n
        res = None

        def solve():
            nonlocal res
            res = bloch.integrate_to_steady_state(s, DensityMatrix.pure("c"), backend=k)

        t_int = min(timeit.repeat(solve, number=1, repeat=repeat))
        rows[name] = (t_rhs, t_int, res)
    print(f"{'backend':<8} {'rhs [us]':>10} {'integrate [ms]':>15} {'steps':>7}")
    for name, (t_rhs, t_int, res) in rows.items():
        print(f"{name:<8} {t_rhs * 1e6:10.3f} {t_int * 1e3:15.3f} {res.n_steps:7d}")
    if "cython" in rows:
        py, cy = rows["python"], rows["cython"]
        print(f"speed-up: rhs x{py[0] / cy[0]:.1f}, integrate x{py[1] / cy[1]:.1f}")
        print(f"state difference: {py[2].rho.max_abs_diff(cy[2].rho):.2e}")
    else:
        print("compiled extension not built; only the fallback was timed")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    bench(ap.parse_args().repeat)


if __name__ == "__main__":
    main()
