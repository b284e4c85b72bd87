"""Admissible type sets and colorings of the per-type coding graphs.

The coding graph of a type ``Q`` has the sequences of its type class as
vertices; two vertices are adjacent when some decoder sees the same side
information for both.  Each decoder therefore partitions the class into
cliques (its shells).  The graph is never stored: vertices are class ranks
and adjacency is recovered by grouping vertices on their side projections.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import ConfigurationTooLarge, WrongDecoderCount
from .network import NetworkSpec
from .typekit import (
    DEFAULT_CAP,
    AlphabetSpec,
    JointType,
    Seq,
    class_size,
    cond_entropy_at_most,
    cond_entropy_coords,
    enumerate_shell,
    enumerate_types,
    iter_class,
    project,
    shell_size,
)

GREEDY = "greedy"
BIPARTITE = "bipartite"
COLORING_MODES = (GREEDY, BIPARTITE)


@dataclass(frozen=True)
class AdmissibleTypeSet:
    n: int
    R: object
    members: tuple

    def __contains__(self, Q) -> bool:
        return Q in self._lookup

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def _lookup(self) -> frozenset:
        cached = self.__dict__.get("_lookup_cache")
        if cached is None:
            cached = frozenset(self.members)
            object.__setattr__(self, "_lookup_cache", cached)
        return cached


@dataclass(frozen=True)
class TypeColoring:
    """Color of every vertex of one coding graph, indexed by class rank."""

    Q: JointType
    colors: tuple
    colors_used: int
    budget: int
    mode: str


@dataclass(frozen=True)
class Violation:
    decoder: int
    first: Seq
    second: Seq
    color: int


def max_cond_entropy(Q: JointType, net: NetworkSpec) -> float:
    return max(cond_entropy_coords(Q, net.complement(j)) for j in range(net.n_decoders))


def is_admissible(Q: JointType, net: NetworkSpec, R) -> bool:
    """max_j H(V_j | Q_j) <= R, decided exactly for rational ``R``."""
    return all(
        cond_entropy_at_most(Q, net.complement(j), R) for j in range(net.n_decoders)
    )


def admissible_types(
    n: int, R, net: NetworkSpec, alphabet: AlphabetSpec, cap: int = DEFAULT_CAP
) -> AdmissibleTypeSet:
    members = tuple(Q for Q in enumerate_types(n, alphabet, cap) if is_admissible(Q, net, R))
    return AdmissibleTypeSet(n, R, members)


def shell_sizes(Q: JointType, net: NetworkSpec) -> list:
    return [shell_size(Q, net, j) for j in range(net.n_decoders)]


def clique_number(Q: JointType, net: NetworkSpec) -> int:
    return max(shell_sizes(Q, net))


def degree_budget(Q: JointType, net: NetworkSpec) -> int:
    """Greedy color budget: one more than the number of vertices in the cliques of any vertex."""
    return sum(s - 1 for s in shell_sizes(Q, net)) + 1


def color_budget(Q: JointType, net: NetworkSpec, mode: str) -> int:
    """Closed-form number of colors a coloring in ``mode`` may use for ``Q``."""
    if mode == BIPARTITE:
        return clique_number(Q, net)
    if mode == GREEDY:
        return degree_budget(Q, net)
    raise ValueError(f"unknown coloring mode {mode!r}")


def paper_degree(Q: JointType, net: NetworkSpec) -> int:
    """The sum of shell sizes, an upper bound on the true maximum degree."""
    return sum(shell_sizes(Q, net))


def neighbors(x: Seq, Q: JointType, net: NetworkSpec) -> Iterator[Seq]:
    """Vertices adjacent to ``x``: its shell-mates at every decoder, each once."""
    seen = {x}
    for j in range(net.n_decoders):
        side = project(x, net.complement(j))
        for y in enumerate_shell(side, Q, net, j):
            if y not in seen:
                seen.add(y)
                yield y


def _check_cap(Q: JointType, cap: int) -> int:
    size = class_size(Q)
    if size > cap:
        raise ConfigurationTooLarge(f"type class of size {size} exceeds cap {cap}")
    return size


def color_greedy(Q: JointType, net: NetworkSpec, cap: int = DEFAULT_CAP) -> TypeColoring:
    """Smallest-available-color greedy coloring in class-rank order."""
    _check_cap(Q, cap)
    sides = [net.complement(j) for j in range(net.n_decoders)]
    used = [dict() for _ in sides]
    colors = []
    for x in iter_class(Q, cap):
        cliques = [u.setdefault(project(x, c), set()) for u, c in zip(used, sides)]
        forbidden = set().union(*cliques)
        color = 0
        while color in forbidden:
            color += 1
        for clique in cliques:
            clique.add(color)
        colors.append(color)
    return TypeColoring(Q, tuple(colors), max(colors) + 1, degree_budget(Q, net), GREEDY)


def color_bipartite(Q: JointType, net: NetworkSpec, cap: int = DEFAULT_CAP) -> TypeColoring:
    """Coloring with exactly the clique number of colors, for two-decoder networks.

    Vertices become edges of a bipartite multigraph between the side sequences
    of decoder 0 and those of decoder 1; a proper edge coloring with maximum
    degree many colors is built by alternating-path recoloring.
    """
    if net.n_decoders != 2:
        raise WrongDecoderCount(f"bipartite coloring needs 2 decoders, got {net.n_decoders}")
    _check_cap(Q, cap)
    left_c, right_c = net.complement(0), net.complement(1)
    palette = clique_number(Q, net)
    ends = []
    # vertex -> {color: edge}
    at: dict = {}
    colors = []
    for x in iter_class(Q, cap):
        u = (0, project(x, left_c))
        v = (1, project(x, right_c))
        e = len(ends)
        ends.append((u, v))
        colors.append(None)
        at_u = at.setdefault(u, {})
        at_v = at.setdefault(v, {})
        a = next(c for c in range(palette) if c not in at_u)
        if a in at_v:
            b = next(c for c in range(palette) if c not in at_v)
            # collect the a/b alternating path leaving v on color a
            path = []
            node, want = v, a
            while want in at[node]:
                edge = at[node][want]
                path.append(edge)
                p, q = ends[edge]
                node = q if p == node else p
                want = b if want == a else a
            for edge in path:
                p, q = ends[edge]
                old = colors[edge]
                del at[p][old]
                del at[q][old]
            for edge in path:
                p, q = ends[edge]
                new = b if colors[edge] == a else a
                colors[edge] = new
                at[p][new] = edge
                at[q][new] = edge
        colors[e] = a
        at_u[a] = e
        at_v[a] = e
    return TypeColoring(Q, tuple(colors), max(colors) + 1, palette, BIPARTITE)


def color(Q: JointType, net: NetworkSpec, mode: str, cap: int = DEFAULT_CAP) -> TypeColoring:
    if mode == GREEDY:
        return color_greedy(Q, net, cap)
    if mode == BIPARTITE:
        return color_bipartite(Q, net, cap)
    raise ValueError(f"unknown coloring mode {mode!r}")


def verify_coloring(
    Q: JointType, net: NetworkSpec, coloring: TypeColoring, cap: int = DEFAULT_CAP
) -> Optional[Violation]:
    """Return the first pair of shell-mates sharing a color, or ``None`` if proper."""
    if len(coloring.colors) != class_size(Q):
        raise ValueError("coloring does not cover the type class")
    sides = [net.complement(j) for j in range(net.n_decoders)]
    seen = [dict() for _ in sides]
    for x, c in zip(iter_class(Q, cap), coloring.colors):
        for j, coords in enumerate(sides):
            clique = seen[j].setdefault(project(x, coords), {})
            if c in clique:
                return Violation(j, clique[c], x, c)
            clique[c] = x
    return None
