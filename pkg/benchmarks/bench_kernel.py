"""Compare the compiled evaluation kernel against the pure-Python fallback.

The optimizer calls CompiledNetwork.evaluate in a tight loop, so this is
the number that decides whether a search budget of 20k is comfortable or
painful. Run from the repository root:

    python3 benchmarks/bench_kernel.py [--evals 2000]
"""

import argparse
import importlib
import time

import numpy as np

import smatvplan.engine as engine
from smatvplan.engine import RegulatorKnob, compile_network
from smatvplan.netio import build_case_study


def random_knob_vectors(compiled, rng, count):
    base = compiled.knob_values(None)
    vectors = np.tile(base, (count, 1))
    for col, knob in enumerate(compiled.knobs):
        if isinstance(knob, RegulatorKnob):
            picks = rng.integers(len(knob.positions_db), size=count)
            vectors[:, col] = np.asarray(knob.positions_db)[picks]
    return vectors


def run(compiled, vectors):
    start = time.perf_counter()
    sink = 0.0
    for row in vectors:
        out_min, _, _ = compiled.evaluate(row)
        sink += float(out_min[0])
    elapsed = time.perf_counter() - start
    return elapsed, sink


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--evals", type=int, default=2000,
                        help="evaluations per backend (default 2000)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    net = build_case_study()
    compiled = compile_network(net)
    rng = np.random.default_rng(args.seed)
    vectors = random_knob_vectors(compiled, rng, args.evals)

    backends = {"python": importlib.import_module("smatvplan._kernel_py")}
    try:
        backends["cython"] = importlib.import_module("smatvplan._kernel")
    except ImportError:
        print("compiled kernel not built; benchmarking the fallback only")

    original = engine._kernel_mod
    results = {}
    try:
        for name, module in sorted(backends.items()):
            engine._kernel_mod = module
            run(compiled, vectors[:50])  # warmup
            elapsed, sink = run(compiled, vectors)
            results[name] = (elapsed, sink)
            print(f"{name:>7}: {args.evals} evaluations in {elapsed:7.3f} s "
                  f"({args.evals / elapsed:9.1f}/s)")
    finally:
        engine._kernel_mod = original

    if len(results) == 2:
        py_t, py_sink = results["python"]
        cy_t, cy_sink = results["cython"]
        assert abs(py_sink - cy_sink) < 1e-6, "backends disagree"
        print(f"speedup: {py_t / cy_t:.1f}x "
              f"({compiled.n_rows} rows, {len(compiled.knobs)} knobs)")


if __name__ == "__main__":
    main()
