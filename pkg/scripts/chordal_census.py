"""Count chordal ribbon graphs by vertex number, genus and dualizability."""
import argparse
from collections import Counter

from rgk.cpm import dualizable
from rgk.ribbon import RibbonError, all_chordal_graphs, genus


def genus_or_open(R):
    try:
        return str(genus(R))
    except RibbonError:
        return "open"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-vertices", type=int, default=3)
    args = ap.parse_args()
    for n in range(1, args.max_vertices + 1):
        graphs = list(all_chordal_graphs(n))
        by_genus = Counter(genus_or_open(C.ribbon) for C in graphs)
        duals = Counter((dualizable(C).indices.shape, dualizable(C).indices.values) for C in graphs if dualizable(C))
        print(f"n={n}: {len(graphs)} graphs, genus {dict(sorted(by_genus.items()))}, "
              f"{sum(duals.values())} dualizable")
        for (shape, a), k in sorted(duals.items()):
            print(f"    {shape} {a}: {k}")


if __name__ == "__main__":
    main()
