"""Fixed-length (FF) and variable-length (FV) codes built on colored coding graphs.

FF codeword layout
    An integer in ``[0, M)`` with ``M = |types| * C_max + 1``.  An admissible
    input of type rank ``t`` and vertex color ``c`` maps to ``t * C_max + c``;
    the top index ``M - 1`` is reserved for a declared encoding error.  Type
    ranks are positions in the canonical list of *all* types at block length n.

FV codeword layout
    A bit string: the type rank in a fixed ``w_t = ceil(log2 |types|)`` bit
    field, followed by the color in ``w_c(Q) = ceil(log2 B(Q))`` bits, where
    ``B(Q)`` is the closed-form color budget of the coloring mode.  Both fields
    are most-significant-bit first.  Since the decoder learns ``Q`` from the
    first field it knows the length of the second, so the code is prefix-free.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from .errors import MalformedBits, NoMatchingVertex, TypeMismatch, WrongDecoderCount
from .graphcode import (
    BIPARTITE,
    COLORING_MODES,
    TypeColoring,
    admissible_types,
    color,
    color_budget,
    verify_coloring,
)
from .network import NetworkSpec
from .typekit import (
    DEFAULT_CAP,
    AlphabetSpec,
    JointType,
    Seq,
    check_sequence,
    class_rank,
    enumerate_types,
    iter_class,
    marginal_type,
    project,
    type_count,
    type_of,
    type_rank,
    type_unrank,
)

FF = "ff"
FV = "fv"
MODES = (FF, FV)


class FFCodeword(NamedTuple):
    index: int
    declared_error: bool = False


class Decoded(NamedTuple):
    symbols: Seq
    declared_error: bool = False


class _Entry:
    __slots__ = ("coloring", "tables")

    def __init__(self, coloring: TypeColoring):
        self.coloring = coloring
        self.tables = None


class Codebook:
    """Universal FF or FV code for one block length, network, and alphabet.

    Construction never looks at a source distribution.  Per-type colorings are
    computed on first use (or supplied when loading from a file) and are
    immutable afterwards; concurrent first uses of a type color it only once.
    """

    def __init__(
        self,
        n: int,
        net: NetworkSpec,
        alphabet: AlphabetSpec,
        mode: str = FF,
        coloring_mode: Optional[str] = None,
        R=None,
        cap: int = DEFAULT_CAP,
    ):
        net.check()
        if alphabet.n_sources != net.n_sources:
            raise ValueError("alphabet and network disagree on the number of sources")
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if coloring_mode is None:
            coloring_mode = BIPARTITE if net.n_decoders == 2 else "greedy"
        if coloring_mode not in COLORING_MODES:
            raise ValueError(f"unknown coloring mode {coloring_mode!r}")
        if coloring_mode == BIPARTITE and net.n_decoders != 2:
            raise WrongDecoderCount("bipartite coloring needs exactly 2 decoders")
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.net = net
        self.alphabet = alphabet
        self.mode = mode
        self.coloring_mode = coloring_mode
        self.cap = cap
        self.n_types = type_count(n, alphabet.joint_size)

        if mode == FF:
            if R is None:
                raise ValueError("an FF codebook needs a rate R")
            R = R if isinstance(R, float) else Fraction(R)
            if R < 0:
                raise ValueError("R must be nonnegative")
            self.R = R
            self.types = admissible_types(n, R, net, alphabet, cap).members
            self.c_max = max(color_budget(Q, net, coloring_mode) for Q in self.types)
            self.M = self.n_types * self.c_max + 1
        else:
            self.R = None
            self.types = tuple(enumerate_types(n, alphabet, cap))
            self.c_max = None
            self.M = None
            self.type_width = (self.n_types - 1).bit_length()
        self._members = frozenset(self.types)
        self._entries: dict = {}
        self._locks: dict = {}
        self._guard = threading.Lock()

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_locks"] = {}
        del state["_guard"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._guard = threading.Lock()

    # -- layout -----------------------------------------------------------

    @property
    def rate(self) -> float:
        """FF rate (1/n) log2 M in bits per symbol."""
        if self.mode != FF:
            raise AttributeError("FV codebooks have no fixed rate")
        return math.log2(self.M) / self.n

    @property
    def error_index(self) -> int:
        return self.M - 1

    def budget(self, Q: JointType) -> int:
        return color_budget(Q, self.net, self.coloring_mode)

    def color_width(self, Q: JointType) -> int:
        return (self.budget(Q) - 1).bit_length()

    def codeword_length(self, Q: JointType) -> int:
        """FV codeword length in bits for any input of type ``Q``."""
        return self.type_width + self.color_width(Q)

    def admits(self, Q: JointType) -> bool:
        return Q in self._members

    # -- per-type state ---------------------------------------------------

    def coloring(self, Q: JointType) -> TypeColoring:
        return self._entry(Q).coloring

    def _entry(self, Q: JointType) -> _Entry:
        entry = self._entries.get(Q)
        if entry is not None:
            return entry
        if Q not in self._members:
            raise KeyError("type is not covered by this codebook")
        with self._guard:
            lock = self._locks.setdefault(Q, threading.Lock())
        with lock:
            entry = self._entries.get(Q)
            if entry is None:
                entry = _Entry(color(Q, self.net, self.coloring_mode, self.cap))
                self._entries[Q] = entry
        return entry

    def _install(self, coloring: TypeColoring) -> None:
        self._entries[coloring.Q] = _Entry(coloring)

    def _table(self, Q: JointType, j: int) -> dict:
        """Decoder-``j`` lookup: side sequence -> {color: full sequence}."""
        entry = self._entry(Q)
        tables = entry.tables
        if tables is None:
            with self._locks.setdefault(Q, threading.Lock()):
                tables = entry.tables
                if tables is None:
                    sides = [self.net.complement(k) for k in range(self.net.n_decoders)]
                    tables = [dict() for _ in sides]
                    for x, c in zip(iter_class(Q, self.cap), entry.coloring.colors):
                        for table, coords in zip(tables, sides):
                            table.setdefault(project(x, coords), {})[c] = x
                    entry.tables = tables
        return tables[j]

    def materialize(self) -> "Codebook":
        """Color every type now rather than on first use."""
        for Q in self.types:
            self._entry(Q)
        return self

    def colorings(self) -> list:
        return [self.coloring(Q) for Q in self.types]

    def verify(self) -> bool:
        """True when every cached coloring is proper and within its budget."""
        for Q, entry in list(self._entries.items()):
            c = entry.coloring
            if c.colors_used > self.budget(Q) or verify_coloring(Q, self.net, c, self.cap):
                return False
        return True

    # -- color lookup -----------------------------------------------------

    def vertex_color(self, x: Seq, Q: JointType) -> int:
        return self.coloring(Q).colors[class_rank(x, Q)]

    def _resolve(self, Q: JointType, j: int, c: int, side: Sequence) -> Decoded:
        side = tuple(tuple(s) for s in side)
        coords = self.net.complement(j)
        if len(side) != self.n:
            raise TypeMismatch(f"side information has length {len(side)}, expected {self.n}")
        if type_of(side, self.alphabet.sub(coords)) != marginal_type(Q, coords):
            raise TypeMismatch("side information type is inconsistent with the decoded type")
        x = self._table(Q, j).get(side, {}).get(c)
        if x is None:
            raise NoMatchingVertex(f"no vertex with color {c} in the shell of the side information")
        return Decoded(project(x, self.net.demand(j)))


def build_codebook(
    n: int,
    R,
    net: NetworkSpec,
    alphabet: AlphabetSpec,
    mode: str = FF,
    coloring_mode: Optional[str] = None,
    cap: int = DEFAULT_CAP,
) -> Codebook:
    return Codebook(n, net, alphabet, mode, coloring_mode, R, cap)


def _check_decoder(cb: Codebook, j: int) -> None:
    if not 0 <= j < cb.net.n_decoders:
        raise ValueError(f"decoder index {j} outside 0..{cb.net.n_decoders - 1}")


def encode_ff(cb: Codebook, x: Sequence) -> FFCodeword:
    if cb.mode != FF:
        raise ValueError("encode_ff needs an FF codebook")
    x = check_sequence(x, cb.alphabet)
    if len(x) != cb.n:
        raise ValueError(f"block has length {len(x)}, codebook expects {cb.n}")
    Q = type_of(x, cb.alphabet)
    if not cb.admits(Q):
        return FFCodeword(cb.error_index, True)
    return FFCodeword(type_rank(Q) * cb.c_max + cb.vertex_color(x, Q))


def decode_ff(cb: Codebook, j: int, w, side: Sequence) -> Decoded:
    """Reconstruct decoder ``j``'s demanded sources from codeword ``w`` and its side information.

    On the reserved error codeword the all-zero sequence is returned with
    ``declared_error`` set.
    """
    if cb.mode != FF:
        raise ValueError("decode_ff needs an FF codebook")
    _check_decoder(cb, j)
    index = w.index if isinstance(w, FFCodeword) else int(w)
    if not 0 <= index < cb.M:
        raise NoMatchingVertex(f"codeword {index} outside 0..{cb.M - 1}")
    if index == cb.error_index:
        width = len(cb.net.demand(j))
        return Decoded(((0,) * width,) * cb.n, True)
    t, c = divmod(index, cb.c_max)
    Q = type_unrank(t, cb.n, cb.alphabet)
    if not cb.admits(Q):
        raise NoMatchingVertex("codeword names a type outside the admissible set")
    return cb._resolve(Q, j, c, side)


def _bits(value: int, width: int) -> str:
    return format(value, f"0{width}b") if width else ""


def encode_fv(cb: Codebook, x: Sequence) -> str:
    if cb.mode != FV:
        raise ValueError("encode_fv needs an FV codebook")
    x = check_sequence(x, cb.alphabet)
    if len(x) != cb.n:
        raise ValueError(f"block has length {len(x)}, codebook expects {cb.n}")
    Q = type_of(x, cb.alphabet)
    return _bits(type_rank(Q), cb.type_width) + _bits(cb.vertex_color(x, Q), cb.color_width(Q))


def read_fv(cb: Codebook, bits: str, pos: int = 0):
    """Parse one FV codeword starting at ``pos``; return ``(Q, color, end)``."""
    if cb.mode != FV:
        raise ValueError("read_fv needs an FV codebook")
    if any(b not in "01" for b in bits):
        raise MalformedBits("codeword contains characters other than 0 and 1")
    end = pos + cb.type_width
    if end > len(bits):
        raise MalformedBits("bit string ends inside the type field")
    t = int(bits[pos:end], 2) if cb.type_width else 0
    if t >= cb.n_types:
        raise MalformedBits(f"type field {t} exceeds the number of types")
    Q = type_unrank(t, cb.n, cb.alphabet)
    width = cb.color_width(Q)
    if end + width > len(bits):
        raise MalformedBits("bit string ends inside the color field")
    c = int(bits[end : end + width], 2) if width else 0
    return Q, c, end + width


def decode_fv(cb: Codebook, j: int, bits: str, side: Sequence) -> Seq:
    _check_decoder(cb, j)
    Q, c, end = read_fv(cb, bits)
    if end != len(bits):
        raise MalformedBits(f"{len(bits) - end} trailing bits after the codeword")
    return cb._resolve(Q, j, c, side).symbols
