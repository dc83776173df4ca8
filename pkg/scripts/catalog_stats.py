"""Spectrum statistics over the seeded lattice catalog.

For each lattice size: how many lattices, average prime count, how many are
distributive (spectrum recovers the lattice as down-sets), and how many have
an empty spectrum.
"""

import argparse
from collections import defaultdict
from dataclasses import dataclass

from ttg.catalog import DEFAULT_SEED, lattice_catalog
from ttg.spectrum import spectrum


@dataclass
class StatsConfig:
    seed: int = DEFAULT_SEED
    random_count: int = 500


def is_distributive(L) -> bool:
    n = len(L)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if L.meet(a, L.join(b, c)) != L.join(L.meet(a, b), L.meet(a, c)):
                    return False
    return True


def collect(cfg: StatsConfig):
    table = defaultdict(lambda: [0, 0, 0, 0])
    for L in lattice_catalog(cfg.seed, cfg.random_count):
        row = table[len(L)]
        primes = len(spectrum(L))
        row[0] += 1
        row[1] += primes
        # a finite lattice is distributive iff it has as many elements as closed sets of its spectrum
        row[2] += is_distributive(L)
        row[3] += primes == 0
    return dict(sorted(table.items()))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=StatsConfig.seed)
    ap.add_argument("--random-count", type=int, default=StatsConfig.random_count)
    args = ap.parse_args()
    stats = collect(StatsConfig(args.seed, args.random_count))
    print(f"{'size':>4} {'count':>5} {'avg primes':>10} {'distributive':>12} {'empty':>5}")
    for size, (count, primes, dist, empty) in stats.items():
        print(f"{size:>4} {count:>5} {primes / count:>10.2f} {dist:>12} {empty:>5}")


if __name__ == "__main__":
    main()
