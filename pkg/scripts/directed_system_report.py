"""Print the row dimensions and exactness of each column for a measure context or a group context.

    python3 scripts/directed_system_report.py --group Z4
    python3 scripts/directed_system_report.py --atoms 3 --modes 1
"""
import argparse

from schattenlab import group_rep as gr
from schattenlab.directed_system import GroupContext, MeasureContext, verify_system
from schattenlab.measure_space import AtomEntry, DiffusePiece, MeasureSpace
from schattenlab.multiplication_rep import TruncationSchedule
from schattenlab.schatten import parse_exponent

GROUPS = {"Z": gr.cyclic, "S": gr.symmetric, "D": gr.dihedral}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--group", help="e.g. Z4, S3, D4 (regular representation)")
    ap.add_argument("--atoms", type=int, default=3)
    ap.add_argument("--modes", type=int, default=1)
    ap.add_argument("--grid", default="1,1.5,2,3,inf")
    args = ap.parse_args()

    grid = [parse_exponent(t) for t in args.grid.split(",")]
    if args.group:
        ctx = GroupContext(gr.regular_rep(GROUPS[args.group[0]](int(args.group[1:]))))
    else:
        atoms = tuple(AtomEntry(f"a{i}", 1.0 + i) for i in range(args.atoms))
        ctx = MeasureContext(MeasureSpace(atoms, (DiffusePiece.uniform(0.0, 1.5),)), TruncationSchedule(args.modes))
    rep = verify_system(ctx, grid)
    print("column   " + "  ".join(f"{c:>6}" for c in rep["columns"]))
    for row, dims in rep["rows"].items():
        # E_0 and E_inf share the node at p = inf
        dims = dims + dims[-1:] if rep["note"] else dims
        print(f"{row:<8} " + "  ".join(f"{d:>6}" for d in dims))
    print("exact    " + "  ".join(f"{'yes' if e['passed'] else 'NO':>6}" for e in rep["exactness"]))
    print(f"coherent triples: {sum(rep['coherence'].values())}/{len(rep['coherence'])}; passed: {rep['passed']}")


if __name__ == "__main__":
    main()
