"""Random finite sets and expressions for law checking.

Generated expressions are drawn around a small per-trial pool so that heads
of arrows frequently coincide with elements of other generated sets; purely
independent sampling makes most applications empty and the laws vacuous.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import Arrow, CanonSet, Leaf, ProofExpr


@dataclass(frozen=True)
class Universe:
    atoms: tuple[str, ...] = ("a", "b", "c")
    max_rank: int = 3
    max_size: int = 4

    def describe(self) -> str:
        return (
            f"atoms={','.join(self.atoms)} max_rank={self.max_rank} "
            f"max_size={self.max_size}"
        )


def trial_rng(seed: int, trial: int) -> random.Random:
    """Independent substream for one trial."""
    return random.Random(f"{seed}/{trial}")


class Sampler:
    def __init__(self, rng: random.Random, universe: Universe = Universe()):
        self.rng = rng
        self.universe = universe
        leaves = [Leaf(a) for a in universe.atoms]
        pool = list(leaves)
        for _ in range(2):
            head = rng.sample(leaves, rng.randint(0, min(2, len(leaves))))
            pool.append(Arrow(head, rng.choice(leaves)))
        self.pool = [e for e in pool if e.rank <= universe.max_rank]

    def expr(self, max_rank: int | None = None) -> ProofExpr:
        rng = self.rng
        if max_rank is None:
            max_rank = self.universe.max_rank
        if max_rank == 0 or rng.random() < 0.3:
            candidates = [e for e in self.pool if e.rank <= max_rank]
            return rng.choice(candidates)
        body = self.expr(max_rank - 1)
        head = self.set(max_rank - 1, rng.randint(0, 2))
        return Arrow(head, body)

    def set(self, max_rank: int | None = None, size: int | None = None) -> CanonSet:
        if max_rank is None:
            max_rank = self.universe.max_rank
        if size is None:
            size = self.rng.randint(0, self.universe.max_size)
        items = []
        for _ in range(size):
            if self.rng.random() < 0.4:
                items.append(self.rng.choice([e for e in self.pool if e.rank <= max_rank]))
            else:
                items.append(self.expr(max_rank))
        return CanonSet(items)

    def _subset(self, items, k: int) -> list:
        items = list(dict.fromkeys(items))
        return self.rng.sample(items, min(k, len(items)))

    def _fill(self, planted: list, max_rank: int) -> CanonSet:
        size = self.rng.randint(len(planted), max(len(planted), self.universe.max_size))
        extra = self.set(max_rank, size - len(planted)).items
        return CanonSet(planted + list(extra))

    def s_triple(self) -> tuple[CanonSet, CanonSet, CanonSet]:
        """(X, Y, Z) where, half the time, X and Y carry arrows that fire on Z."""
        rng = self.rng
        r_max = self.universe.max_rank
        Z = self.set(r_max - 1)
        if rng.random() < 0.5 or r_max < 3:
            return self.set(), self.set(), Z
        support = list(Z) + self.pool
        bodies = self._subset(self.pool, rng.randint(0, 2))
        s = rng.choice([e for e in self.pool if e.rank <= r_max - 2])
        tau = self._subset([e for e in support if e.rank <= r_max - 1], rng.randint(0, 1))
        planted_x = Arrow(tau, Arrow(bodies, s))
        if planted_x.rank > r_max:
            return self.set(), self.set(), Z
        planted_y = []
        for r in bodies[: self.universe.max_size]:
            head = self._subset([e for e in support if e.rank < r_max], rng.randint(0, 1))
            planted_y.append(Arrow(head, r))
        X = self._fill([planted_x], r_max)
        Y = self._fill(planted_y[: self.universe.max_size], r_max)
        return X, Y, Z
