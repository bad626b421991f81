"""Seeded sampling of admissible zeta with a prescribed rank.

Every sample draws from its own ``random.Random`` keyed by the run seed,
the system and the sample index, so results do not depend on how samples
are distributed across workers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from ..curvecount import ZetaTriple
from ..exactfield import GaussRational, rank_of_matrix
from ..rootsys import RootSystem, root_eval


@dataclass(frozen=True)
class SamplingConfig:
    numerator_bound: int = 20
    denominators: tuple[int, ...] = tuple(range(1, 9))
    max_attempts: int = 1000

    def to_json(self) -> dict:
        return {"numerator_bound": self.numerator_bound, "denominators": list(self.denominators)}


DEFAULT_SAMPLING = SamplingConfig()


def random_rational(rng: random.Random, cfg: SamplingConfig = DEFAULT_SAMPLING) -> Fraction:
    n = cfg.numerator_bound
    return Fraction(rng.randint(-n, n), rng.choice(cfg.denominators))


def random_vector(rng: random.Random, length: int, cfg: SamplingConfig = DEFAULT_SAMPLING) -> tuple[Fraction, ...]:
    while True:
        v = tuple(random_rational(rng, cfg) for _ in range(length))
        if any(v):
            return v


def _combine(coeffs: list[Fraction], vectors: list[tuple[Fraction, ...]]) -> tuple[Fraction, ...]:
    return tuple(sum((c * v[j] for c, v in zip(coeffs, vectors)), Fraction(0)) for j in range(len(vectors[0])))


def max_rank_class(system: RootSystem) -> int:
    return min(3, system.rank)


def sample_zeta(
    system: RootSystem, rank_class: int, rng: random.Random, cfg: SamplingConfig = DEFAULT_SAMPLING
) -> ZetaTriple:
    """Build zeta as a rank-``rank_class`` combination of random directions.

    A random 3 x k coefficient matrix of full rank mixes k random directions
    of the Cartan algebra; candidates that are inadmissible or fall short of
    the requested rank are rejected.
    """
    if not 1 <= rank_class <= max_rank_class(system):
        raise ValueError(f"rank class {rank_class} is impossible in {system.name}")
    for _ in range(cfg.max_attempts):
        directions = [random_vector(rng, system.rank, cfg) for _ in range(rank_class)]
        mix = [[random_rational(rng, cfg) for _ in range(rank_class)] for _ in range(3)]
        if rank_of_matrix(mix) != rank_class:
            continue
        zeta = ZetaTriple(system, *(_combine(row, directions) for row in mix))
        if zeta.admissible and rank_of_matrix(zeta.components()) == rank_class:
            return zeta
    raise RuntimeError(f"no admissible rank-{rank_class} zeta in {cfg.max_attempts} attempts for {system.name}")


def sample_rng(seed: int, system: RootSystem, rank_class: int, index: int) -> random.Random:
    return random.Random(f"{seed}:{system.name}:{rank_class}:{index}")


def rank_classes(system: RootSystem, rank_class: str | int) -> list[int]:
    if rank_class == "all":
        return list(range(1, max_rank_class(system) + 1))
    rc = int(rank_class)
    if not 1 <= rc <= max_rank_class(system):
        raise ValueError(f"rank class {rc} is impossible in {system.name}")
    return [rc]


def sample_plan(system: RootSystem, rank_class: str | int, samples: int) -> list[tuple[int, int]]:
    """(seed_index, rank class) pairs; ``all`` cycles through the classes."""
    classes = rank_classes(system, rank_class)
    return [(i, classes[i % len(classes)]) for i in range(samples)]


def iter_samples(
    system: RootSystem, rank_class: str | int, samples: int, seed: int, cfg: SamplingConfig = DEFAULT_SAMPLING
) -> Iterator[tuple[int, int, ZetaTriple]]:
    for index, rc in sample_plan(system, rank_class, samples):
        yield index, rc, sample_zeta(system, rc, sample_rng(seed, system, rc, index), cfg)


def random_plane(
    system: RootSystem, rng: random.Random, cfg: SamplingConfig = DEFAULT_SAMPLING
) -> tuple[tuple[GaussRational, ...], tuple[GaussRational, ...]]:
    """Two Gaussian-rational vectors spanning a plane inside no root kernel."""
    for _ in range(cfg.max_attempts):
        b1, b2 = (
            tuple(GaussRational(random_rational(rng, cfg), random_rational(rng, cfg)) for _ in range(system.rank))
            for _ in range(2)
        )
        if rank_of_matrix([b1, b2]) != 2:
            continue
        if all(not (root_eval(system, k, b1).is_zero() and root_eval(system, k, b2).is_zero())
               for k in system.positive_roots):
            return b1, b2
    raise RuntimeError(f"no admissible plane in {cfg.max_attempts} attempts for {system.name}")
