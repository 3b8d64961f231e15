"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--cells 4096] [--repeat 20]

Times one monotone step per numerical flux, a batch of steps, and one ENO
right-hand side per order, and checks that both backends agree.
"""

import argparse
import timeit

import numpy as np

from shocklab import kernels
from shocklab.kernels import fallback


def bench(fn, repeat):
    fn()  # warm up
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--cells", type=int, default=4096)
    p.add_argument("--repeat", type=int, default=20)
    p.add_argument("--batch", type=int, default=200, help="steps per batched call")
    args = p.parse_args(argv)
    if kernels.compiled is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")
    comp = kernels.compiled
    rng = np.random.default_rng(0)
    u = np.sort(rng.uniform(-1.0, 2.0, args.cells))[::-1].copy()
    lam = 0.3 / 2.0

    rows = []
    for name, code in kernels.SCHEME_CODES.items():
        call = (u, 2.0, -1.0, lam, code, lam)
        a, b = fallback.monotone_step(*call), np.asarray(comp.monotone_step(*call))
        assert np.array_equal(a, b), name
        rows.append((f"step {name}", bench(lambda: fallback.monotone_step(*call), args.repeat),
                     bench(lambda: comp.monotone_step(*call), args.repeat)))
        batch = call + (args.batch,)
        rows.append((f"{args.batch} steps {name}", bench(lambda: fallback.monotone_steps(*batch), max(3, args.repeat // 5)),
                     bench(lambda: comp.monotone_steps(*batch), max(3, args.repeat // 5))))
    for order in (2, 3):
        coef = kernels.eno_coefficients(order)
        call = (u, order, 2.0, -1.0, coef, 1.0 / args.cells)
        np.testing.assert_allclose(fallback.eno_rhs(*call), comp.eno_rhs(*call), atol=1e-9)
        rows.append((f"eno{order} rhs", bench(lambda: fallback.eno_rhs(*call), args.repeat),
                     bench(lambda: comp.eno_rhs(*call), args.repeat)))

    print(f"{args.cells} cells, best of {args.repeat}")
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'compiled [ms]':>15}{'speedup':>10}")
    for name, slow, fast in rows:
        print(f"{name:<22}{slow * 1e3:>12.3f}{fast * 1e3:>15.3f}{slow / fast:>10.1f}")


if __name__ == "__main__":
    main()
