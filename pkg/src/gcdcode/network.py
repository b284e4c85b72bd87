"""Generalized complementary delivery networks and their optimal rates.

Source indices are 0-based.  Decoder ``j`` holds the sources outside
``demands[j]`` and must reproduce the sources in ``demands[j]``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidNetwork
from .typekit import Distribution, cond_entropy_coords


@dataclass(frozen=True)
class NetworkSpec:
    n_sources: int
    demands: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "demands", tuple(frozenset(int(i) for i in d) for d in self.demands)
        )

    @property
    def n_decoders(self) -> int:
        return len(self.demands)

    @property
    def sources(self) -> frozenset:
        return frozenset(range(self.n_sources))

    def demand(self, j: int) -> tuple:
        return tuple(sorted(self.demands[j]))

    def complement(self, j: int) -> tuple:
        """Indices of the side-information sources available to decoder ``j``."""
        return tuple(sorted(self.sources - self.demands[j]))

    def check(self) -> "NetworkSpec":
        problems = validate(self)
        if problems:
            raise InvalidNetwork("; ".join(problems))
        return self

    @classmethod
    def complementary_delivery(cls) -> "NetworkSpec":
        """Two sources, each decoder holding one and wanting the other."""
        return cls(2, ({0}, {1}))

    @classmethod
    def three_user(cls) -> "NetworkSpec":
        """Three sources; every decoder holds one source and wants the other two."""
        return cls(3, ({0, 1}, {0, 2}, {1, 2}))


def validate(net: NetworkSpec) -> list:
    """Return a description of every violated network invariant (empty when valid)."""
    problems = []
    if net.n_sources < 2:
        problems.append(f"need at least 2 sources, got {net.n_sources}")
    if net.n_decoders < 1:
        problems.append("need at least one decoder")
    seen = {}
    for j, d in enumerate(net.demands):
        if not d:
            problems.append(f"decoder {j}: empty demand set")
        bad = sorted(i for i in d if not 0 <= i < net.n_sources)
        if bad:
            problems.append(f"decoder {j}: source indices {bad} out of range")
        elif d and d == net.sources:
            problems.append(f"decoder {j}: demand set is not a proper subset of the sources")
        if d in seen:
            problems.append(f"decoder {j}: duplicate demand set (same as decoder {seen[d]})")
        else:
            seen[d] = j
    return problems


def rf_rate(P: Distribution, net: NetworkSpec) -> float:
    """Infimum achievable fixed-length rate: max over decoders of H(demand | side)."""
    return max(cond_entropy_coords(P, net.complement(j)) for j in range(net.n_decoders))


def rv_rate(P: Distribution, net: NetworkSpec) -> float:
    """Infimum achievable variable-length rate; it coincides with :func:`rf_rate`."""
    return rf_rate(P, net)
