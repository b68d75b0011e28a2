"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json]
"""
import argparse
import json
import timeit

import numpy as np

from holonomy_lab._kernels import backends


def workloads(rng):
    n = 10_000
    H2 = rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))
    H2 = H2 + np.conj(np.swapaxes(H2, 1, 2))
    A = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    A = A + A.conj().T
    s = rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3))
    s /= np.linalg.norm(s, axis=1)[:, None]
    t = 2 * np.pi * np.arange(n) / n
    xy = np.column_stack([np.cos(t), np.sin(t)])
    return {
        "eigh2_batch[10k]": lambda k: k.eigh2_batch(H2),
        "jacobi_eigh[8x8]": lambda k: k.jacobi_eigh(A),
        "link_overlaps[10k]": lambda k: k.link_overlaps(s, True),
        "transport[10k]": lambda k: k.transport(s),
        "unit_product_angle[10k]": lambda k: k.unit_product_angle(k.link_overlaps(s, True)),
        "segment_angle_sum[10k]": lambda k: k.segment_angle_sum(xy, 0.0, 0.0, True),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true", help="print machine-readable results")
    args = ap.parse_args()

    mods = backends()
    jobs = workloads(np.random.default_rng(0))
    results = {}
    for name, job in jobs.items():
        row = {}
        for label, mod in mods.items():
            number = 3 if "jacobi" in name or label == "compiled" else 1
            best = min(timeit.repeat(lambda: job(mod), number=number, repeat=args.repeat)) / number
            row[label] = best
        results[name] = row

    if args.json:
        print(json.dumps(results, indent=2))
        return
    labels = list(mods)
    print(f"{'kernel':<26}" + "".join(f"{l:>14}" for l in labels) + ("     speedup" if len(labels) > 1 else ""))
    for name, row in results.items():
        line = f"{name:<26}" + "".join(f"{row[l] * 1e3:>12.3f}ms" for l in labels)
        if "compiled" in row and "python" in row:
            line += f"{row['python'] / row['compiled']:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
