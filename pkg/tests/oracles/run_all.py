"""Regenerate tests/frozen_values.json from every oracle module.

Each oracle computes reference numbers by a route independent of the library
(adaptive quadrature, symbolic algebra, closed-form mass identities, Monte
Carlo).  Total runtime is a few minutes; the expensive Monte-Carlo Gram check
can be skipped with --skip-mc (its previous output is then reused if
present).
"""

import argparse
import json
import pathlib
import sys

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

import oracle_adjoint
import oracle_calibration
import oracle_kernel
import oracle_log_integrals
import oracle_moments


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--skip-mc", action="store_true",
                    help="reuse cached Monte-Carlo Gram output")
    ap.add_argument("--out", default=str(HERE.parent / "frozen_values.json"))
    args = ap.parse_args(argv)

    merged = {}
    for name, mod in [("kernel", oracle_kernel), ("adjoint", oracle_adjoint),
                      ("moments", oracle_moments),
                      ("log_integrals", oracle_log_integrals),
                      ("calibration", oracle_calibration)]:
        print(f"[oracle] {name} ...", flush=True)
        merged[name] = mod.main()

    cache = HERE / "gram_mc_out.json"
    if args.skip_mc and cache.exists():
        print("[oracle] gram_mc (cached)", flush=True)
        merged["gram_mc"] = json.loads(cache.read_text())
    else:
        print("[oracle] gram_mc ...", flush=True)
        import oracle_gram_mc
        merged["gram_mc"] = oracle_gram_mc.main()
        cache.write_text(json.dumps(merged["gram_mc"], indent=2))

    out = pathlib.Path(args.out)
    out.write_text(json.dumps(merged, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
