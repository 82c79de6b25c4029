#!/usr/bin/env python3
"""Benchmark the compiled word kernels against the NumPy fallback.

Times the three kernel entry points directly (both modules are importable
side by side) and one end-to-end reduced-norm run per backend in a fresh
interpreter, since the backend is selected at import time via
IDEALCSTAR_PURE.

Usage: python3 benchmarks/bench_backends.py [--radius 12] [--json]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import idealcstar._speed.fallback as fallback

try:
    import idealcstar._speed._freewords as compiled
except ImportError:
    compiled = None


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_rows(radius):
    import idealcstar as ic

    rows = []
    backends = [("fallback", fallback)]
    if compiled is not None:
        backends.insert(0, ("compiled", compiled))

    for name, mod in backends:
        rows.append((f"free_ball(F2, R={radius})", name,
                     timeit(mod.free_ball, 4, radius)))

    ball6 = ic.ball(ic.model_from_name("F2"), 6)
    letters, lengths = ball6.letters_matrix(), ball6.lengths
    for name, mod in backends:
        rows.append((f"pair_dist(B6 x B6, {len(ball6)}^2)", name,
                     timeit(mod.pair_dist, letters, lengths, letters, lengths)))

    codes, _ = fallback.free_ball(4, radius)
    big, _ = fallback.free_ball(4, radius + 1)
    word = [0, 2]
    for name, mod in backends:
        rows.append((f"left_mult_index(B{radius}, |u|=2)", name,
                     timeit(mod.left_mult_index, codes, word, 4, big)))
    return rows


def end_to_end_rows(radius, repeat=2):
    """Fresh interpreter per run (backend selection happens at import time).

    Wall clock here is dominated by the backend-independent sparse power
    iteration, so treat it as a consistency check more than a kernel race;
    the best of `repeat` runs damps scheduler noise.
    """
    script = (
        "import time, idealcstar as ic\n"
        "t0 = time.perf_counter()\n"
        "x = ic.GroupRingElement.gensum(ic.model_from_name('F2'))\n"
        f"est = ic.reduced_norm_lower(x, {radius}, budget=None)\n"
        "print(f'{ic.kernel_backend} {est.value:.9f} "
        "{time.perf_counter() - t0:.3f}')\n"
    )
    rows = []
    for pure in ("0", "1"):
        env = dict(os.environ, IDEALCSTAR_PURE=pure)
        best, value, backend = float("inf"), None, None
        for _ in range(repeat):
            out = subprocess.run([sys.executable, "-c", script], env=env,
                                 capture_output=True, text=True, check=True)
            backend, val, seconds = out.stdout.split()
            best = min(best, float(seconds))
            value = float(val)
        rows.append((f"reduced_norm_lower(gensum F2, R={radius})", backend,
                     best, value))
    return rows


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--radius", type=int, default=12)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()

    kernels = kernel_rows(min(args.radius, 12))
    e2e = end_to_end_rows(args.radius)

    if args.json:
        payload = {
            "kernels": [{"task": t, "backend": b, "seconds": s}
                        for t, b, s in kernels],
            "end_to_end": [{"task": t, "backend": b, "seconds": s, "value": v}
                           for t, b, s, v in e2e],
        }
        print(json.dumps(payload, indent=2))
        return

    width = max(len(t) for t, *_ in kernels + e2e) + 2
    print(f"{'task':<{width}}{'backend':<10}{'seconds':>10}")
    for task, backend, seconds in kernels:
        print(f"{task:<{width}}{backend:<10}{seconds:>10.4f}")
    for task, backend, seconds, value in e2e:
        print(f"{task:<{width}}{backend:<10}{seconds:>10.2f}   "
              f"value={value:.9f}")
    values = {v for *_, v in e2e}
    if len(values) > 1:
        print("warning: backends disagree on the end-to-end value")


if __name__ == "__main__":
    main()
