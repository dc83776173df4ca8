"""Submodule and prime counts for Severi-Brauer curves over a point.

Prints the enumerated counts next to 1 + 2^n + |K| and (n+1) + |K|, and for
each instance the covers of the zero submodule (which decide whether it is
prime).
"""

import argparse
from dataclasses import dataclass

from ttg.geometry import SBModel, sb_expected_counts, sb_submodule_lattice
from ttg.order import covers
from ttg.spectrum import spectrum


@dataclass
class TableConfig:
    max_closed: int = 4
    max_copies: int = 4


def rows(cfg: TableConfig):
    for n in range(1, cfg.max_closed + 1):
        for k in range(cfg.max_copies + 1):
            L = sb_submodule_lattice(SBModel.over_point(n, k))
            exp_subs, exp_primes = sb_expected_counts(n, k)
            zero_covers = sorted(L.labels[c] for c in covers(L, L.bottom))
            yield n, k, len(L), exp_subs, len(spectrum(L)), exp_primes, zero_covers


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-closed", type=int, default=TableConfig.max_closed)
    ap.add_argument("--max-copies", type=int, default=TableConfig.max_copies)
    args = ap.parse_args()
    cfg = TableConfig(args.max_closed, args.max_copies)
    print(f"{'n':>2} {'|K|':>3} {'subs':>5} {'want':>5} {'primes':>6} {'want':>5}  covers of 0")
    for n, k, subs, es, primes, ep, zc in rows(cfg):
        mark = "" if (subs, primes) == (es, ep) else "  <- differs"
        print(f"{n:>2} {k:>3} {subs:>5} {es:>5} {primes:>6} {ep:>5}  {', '.join(zc)}{mark}")


if __name__ == "__main__":
    main()
