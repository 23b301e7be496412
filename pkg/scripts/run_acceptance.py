"""Run the acceptance checks with a configurable seed and sizes, one line each."""
import argparse
import dataclasses
import json
import sys

from rgk.acceptance import Config, run_all


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for f in dataclasses.fields(Config):
        ap.add_argument("--" + f.name.replace("_", "-"), type=int, default=f.default)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    cfg = Config(**{f.name: getattr(args, f.name) for f in dataclasses.fields(Config)})
    outcomes = run_all(cfg)
    if args.json:
        print(json.dumps([dict(number=o.number, name=o.name, passed=o.passed, detail=o.detail,
                               oracle=o.oracle, seconds=round(o.seconds, 2)) for o in outcomes], indent=2))
    else:
        for o in outcomes:
            print(f"{o.line()}  ({o.seconds:.1f}s)")
    return 0 if all(o.passed for o in outcomes) else 1


if __name__ == "__main__":
    sys.exit(main())
