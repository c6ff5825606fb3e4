"""Compare the numba kernels with the pure-numpy/Python fallback.

Each backend runs in its own interpreter because the choice is made at
import time from SHOCKFRONT_DISABLE_NUMBA. The first call of each workload
is reported separately so JIT compilation does not hide in the averages.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys
import time


def workloads():
    from shockfront.angular import build_shock_wave
    from shockfront.eos import PerfectGas
    from shockfront.riemann import SymmetryConfig, to_riemann
    from shockfront.scenario import parse_data
    from shockfront.smooth import evolve_smooth

    model, cfg = PerfectGas(2.0), SymmetryConfig(3)
    w0 = to_riemann(model, (2.25, 2.5))

    def smooth():
        evolve_smooth(model, cfg, lambda r: (0 * r + w0[0], 0 * r + w0[1]), 2.0, 12.0, 1.0, nr=400, nt=400)

    right = parse_data(model, cfg, {"type": "constant", "rho": 1.0, "u": 0.0}, "right")
    left = parse_data(model, cfg, {"type": "stationary", "rho": 20.0, "u": "jump", "range": [0.8, 30.0],
                                   "bump": {"center": 0.93, "width": 0.05, "amplitude": 5.0, "component": "w1"}},
                      "left", jump_from=lambda s: tuple(float(x[0]) for x in right.profile([s])))
    num = {"left_lo": 0.85, "left_boundary": "frozen", "extend_left": "natural", "extend_right": "natural"}

    def shock():
        build_shock_wave(model, cfg, left.at_radius(1.0), right.at_radius(1.0), 1.0, 0.02, numerics=num,
                         with_bound=False)

    return {"evolve_smooth 400x400": smooth, "build_shock_wave 200 rows": shock}


def child(repeat):
    from shockfront._accel import backend
    out = {"backend": backend(), "timings": {}}
    for name, fn in workloads().items():
        t0 = time.perf_counter()
        fn()
        first = time.perf_counter() - t0
        runs = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            runs.append(time.perf_counter() - t0)
        out["timings"][name] = {"first": first, "best": min(runs)}
    print(json.dumps(out))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        return child(args.repeat)
    results = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, SHOCKFRONT_DISABLE_NUMBA=flag)
        proc = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(args.repeat)],
                              env=env, capture_output=True, text=True, check=True)
        results[label] = json.loads(proc.stdout.strip().splitlines()[-1])
    print(f"{'workload':<28}{'numba first':>13}{'numba best':>12}{'numpy best':>12}{'speedup':>9}")
    for name in results["numba"]["timings"]:
        a, b = results["numba"]["timings"][name], results["numpy"]["timings"][name]
        print(f"{name:<28}{a['first']:>12.3f}s{a['best']:>11.3f}s{b['best']:>11.3f}s{b['best'] / a['best']:>8.1f}x")


if __name__ == "__main__":
    main()
