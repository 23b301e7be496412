"""Tabulate End of the structure object on both sides for small index tuples.

Columns: shape, indices, cpm_hom (h^-1, h^0, h^1), perf_hom, Cech oracle.
"""
import argparse
from itertools import product

from rgk.cpm import CYCLE, PATH, cpm_hom, dualizable_from_indices, structure_object
from rgk.mirror import cech_oracle, chain, perf_hom, ring, structure_sheaf


def tuples(max_sum):
    for s in range(2, max_sum + 1):
        for m in range(2, s + 1):
            for a in product(range(1, s + 1), repeat=m):
                if sum(a) == s:
                    yield a


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-sum", type=int, default=5)
    args = ap.parse_args()
    print(f"{'shape':6} {'indices':16} {'cpm':12} {'perf':12} cech")
    bad = 0
    for a in tuples(args.max_sum):
        for shape, mk in ((PATH, chain), (CYCLE, ring)):
            O = structure_object(dualizable_from_indices(shape, a))
            h = cpm_hom(O, O)
            S = mk(*a)
            p = perf_hom(S, structure_sheaf(S), structure_sheaf(S))
            p = (p.get(-1, 0), p.get(0, 0), p.get(1, 0))
            c = cech_oracle(S)
            flag = "" if h == p and h[1:] == c else "  <-- mismatch"
            bad += bool(flag)
            print(f"{shape:6} {str(a):16} {str(h):12} {str(p):12} {c}{flag}")
    print(f"{bad} mismatches")


if __name__ == "__main__":
    main()
