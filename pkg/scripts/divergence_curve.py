"""Trace partial sums of |f|^p for an indicator on a diffuse interval, and the fitted growth rate.

    python3 scripts/divergence_curve.py --p 1.5 --value 2 --modes 4,8,16,32,64
"""
import argparse
import json

from schattenlab.measure_space import MeasureSpace, SimpleFunction
from schattenlab.multiplication_rep import TruncationSchedule, diagnose_divergence, trace_power_partial


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=float, default=1.0)
    ap.add_argument("--value", type=float, default=1.0)
    ap.add_argument("--length", type=float, default=1.0, help="interval [0, length)")
    ap.add_argument("--modes", default="4,8,16,32,64")
    args = ap.parse_args()

    space = MeasureSpace.lebesgue(0.0, args.length)
    f = SimpleFunction.constant_on(space, args.value)
    modes = [int(m) for m in args.modes.split(",")]
    partials = [(m, trace_power_partial(space, f, args.p, TruncationSchedule(m))) for m in modes]
    for m, v in partials:
        print(f"M={m:>4}  partial={v:.6g}")
    res = diagnose_divergence(partials)
    expected = 2 * abs(args.value) ** args.p * args.length
    print(json.dumps({"diagnosis": type(res).__name__, **vars(res), "expected_rate": expected}))


if __name__ == "__main__":
    main()
