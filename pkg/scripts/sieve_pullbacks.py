"""Probe the pullback axiom for star-generated sieves.

Along open restrictions the pullback of a covering sieve always covers; along
contractions it can fail.  Prints the first few failures of the second kind.
"""
import argparse
import random

from rgk.cpm import is_covering, local_contractions, pullback_sieve, sieve, star_sieve, uncovered
from rgk.ribbon import random_ribbon_graph


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graphs", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--show", type=int, default=3)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    opens_ok = contr_ok = opens = contrs = 0
    shown = 0
    for _ in range(args.graphs):
        X = random_ribbon_graph(rng, rng.randint(1, 4), extra_edges=rng.randint(0, 1), free_edges=1)
        U = star_sieve(X)
        for f in local_contractions(X):
            P = pullback_sieve(f, U)
            restricting = f.target.graph.vertices and set(f.target.graph.vertices) == set(f.open_vertices)
            ok = is_covering(P)
            if restricting:
                opens += 1
                opens_ok += ok
            else:
                contrs += 1
                contr_ok += ok
                if not ok and shown < args.show:
                    shown += 1
                    print(f"contraction of {sorted(f.open_vertices)} leaves {uncovered(P)} uncovered")
    print(f"open restrictions: {opens_ok}/{opens} pullbacks cover")
    print(f"with contractions: {contr_ok}/{contrs} pullbacks cover")


if __name__ == "__main__":
    main()
