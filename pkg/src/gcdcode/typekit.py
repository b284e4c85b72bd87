"""Method-of-types calculus over product alphabets.

A joint letter is a tuple with one symbol per source, and a sequence is a
tuple of joint letters.  Joint letters are ordered lexicographically (the
order produced by :func:`itertools.product`), which makes the letter index
order and the tuple order coincide; sequences inherit the lexicographic
order of their letters.

Counting is done with exact Python integers.  Probabilities and entropies
are base-2 logarithms in floating point, except for the ``exp2_*`` helpers
which return exact :class:`~fractions.Fraction` values for rational inputs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import ConfigurationTooLarge, TypeMismatch

Letter = tuple
Seq = tuple

DEFAULT_CAP = 10**7
"""Default upper bound on the number of items any exhaustive enumeration may produce."""

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class AlphabetSpec:
    """Per-source alphabet sizes; the joint alphabet is their Cartesian product."""

    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if not sizes:
            raise ValueError("an alphabet needs at least one source")
        if any(s < 2 for s in sizes):
            raise ValueError(f"every alphabet size must be >= 2, got {sizes}")

    @property
    def n_sources(self) -> int:
        return len(self.sizes)

    @property
    def joint_size(self) -> int:
        return math.prod(self.sizes)

    @cached_property
    def letters(self) -> tuple:
        return tuple(itertools.product(*(range(s) for s in self.sizes)))

    @cached_property
    def _index(self) -> dict:
        return {a: i for i, a in enumerate(self.letters)}

    def index(self, letter) -> int:
        try:
            return self._index[tuple(letter)]
        except KeyError:
            raise ValueError(f"letter {letter!r} is outside alphabet {self.sizes}") from None

    def sub(self, coords: Iterable[int]) -> "AlphabetSpec":
        """Alphabet of the sources listed in ``coords`` (taken in ascending order)."""
        coords = sorted(coords)
        if not coords:
            raise ValueError("source-index set must be nonempty")
        return AlphabetSpec(tuple(self.sizes[i] for i in coords))


@dataclass(frozen=True)
class JointType:
    """Letter counts of a length-``n`` sequence, indexed by canonical letter order."""

    alphabet: AlphabetSpec
    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if len(counts) != self.alphabet.joint_size:
            raise ValueError(
                f"expected {self.alphabet.joint_size} counts, got {len(counts)}"
            )
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")
        if sum(counts) < 1:
            raise ValueError("a type needs block length n >= 1")

    @property
    def n(self) -> int:
        return sum(self.counts)

    def count(self, letter) -> int:
        return self.counts[self.alphabet.index(letter)]

    def as_dict(self) -> dict:
        """Nonzero counts keyed by joint letter."""
        return {a: c for a, c in zip(self.alphabet.letters, self.counts) if c}

    @classmethod
    def from_mapping(cls, alphabet: AlphabetSpec, counts: Mapping) -> "JointType":
        vec = [0] * alphabet.joint_size
        for letter, c in counts.items():
            if not isinstance(letter, tuple):
                letter = (letter,)
            vec[alphabet.index(letter)] += c
        return cls(alphabet, tuple(vec))


@dataclass(frozen=True)
class Distribution:
    """A probability assignment over the joint alphabet.

    Probabilities may be :class:`~fractions.Fraction` (exact arithmetic is then
    available through :func:`type_probability_exact`) or floats.
    """

    alphabet: AlphabetSpec
    probs: tuple
    tolerance: float = field(default=1e-12, repr=False, compare=False)

    def __post_init__(self):
        probs = tuple(self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) != self.alphabet.joint_size:
            raise ValueError(
                f"expected {self.alphabet.joint_size} probabilities, got {len(probs)}"
            )
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be nonnegative")
        total = sum(probs)
        if abs(total - 1) > self.tolerance:
            raise ValueError(f"probabilities sum to {float(total)!r}, not 1")

    @property
    def is_exact(self) -> bool:
        return all(isinstance(p, (int, Fraction)) for p in self.probs)

    def prob(self, letter) -> Number:
        return self.probs[self.alphabet.index(letter)]

    def as_floats(self) -> list:
        return [float(p) for p in self.probs]

    def marginal(self, coords: Iterable[int]) -> "Distribution":
        coords = sorted(coords)
        sub = self.alphabet.sub(coords)
        acc = [0] * sub.joint_size
        for letter, p in zip(self.alphabet.letters, self.probs):
            acc[sub.index(tuple(letter[i] for i in coords))] += p
        return Distribution(sub, tuple(acc), self.tolerance)

    @classmethod
    def from_mapping(cls, alphabet: AlphabetSpec, probs: Mapping) -> "Distribution":
        vec = [0] * alphabet.joint_size
        for letter, p in probs.items():
            if not isinstance(letter, tuple):
                letter = (letter,)
            vec[alphabet.index(letter)] += p
        return cls(alphabet, tuple(vec))

    @classmethod
    def uniform(cls, alphabet: AlphabetSpec) -> "Distribution":
        k = alphabet.joint_size
        return cls(alphabet, tuple(Fraction(1, k) for _ in range(k)))


# ---------------------------------------------------------------------------
# sequences and types
# ---------------------------------------------------------------------------


def check_sequence(x: Sequence, alphabet: AlphabetSpec) -> Seq:
    """Return ``x`` as a tuple of joint-letter tuples, raising ``ValueError`` if ill-formed."""
    if len(x) < 1:
        raise ValueError("a sequence needs length n >= 1")
    out = []
    for pos, letter in enumerate(x):
        letter = tuple(letter) if isinstance(letter, (tuple, list)) else (letter,)
        if len(letter) != alphabet.n_sources:
            raise ValueError(f"position {pos}: letter {letter!r} has wrong arity")
        for sym, size in zip(letter, alphabet.sizes):
            if not 0 <= sym < size:
                raise ValueError(f"position {pos}: symbol {sym} outside 0..{size - 1}")
        out.append(letter)
    return tuple(out)


def type_of(x: Sequence, alphabet: AlphabetSpec) -> JointType:
    counts = [0] * alphabet.joint_size
    for letter in x:
        counts[alphabet.index(letter)] += 1
    return JointType(alphabet, tuple(counts))


def project(x: Sequence, coords: Iterable[int]) -> Seq:
    """Restrict every joint letter of ``x`` to the sources in ``coords`` (ascending)."""
    coords = sorted(coords)
    return tuple(tuple(letter[i] for i in coords) for letter in x)


def merge(part: Sequence, coords: Iterable[int], rest: Sequence, rest_coords: Iterable[int]) -> Seq:
    """Inverse of two complementary projections."""
    coords, rest_coords = sorted(coords), sorted(rest_coords)
    width = len(coords) + len(rest_coords)
    out = []
    for a, b in zip(part, rest):
        letter = [0] * width
        for i, s in zip(coords, a):
            letter[i] = s
        for i, s in zip(rest_coords, b):
            letter[i] = s
        out.append(tuple(letter))
    return tuple(out)


def type_count(n: int, k: int) -> int:
    """Number of types of length-``n`` sequences over ``k`` letters."""
    return math.comb(n + k - 1, k - 1)


def _compositions(n: int, k: int) -> Iterator[tuple]:
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def enumerate_types(n: int, alphabet: AlphabetSpec, cap: int = DEFAULT_CAP) -> list:
    """All types of length-``n`` sequences, lexicographically ordered by count vector."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = type_count(n, alphabet.joint_size)
    if total > cap:
        raise ConfigurationTooLarge(
            f"{total} types at n={n} over {alphabet.joint_size} letters exceeds cap {cap}"
        )
    return [JointType(alphabet, c) for c in _compositions(n, alphabet.joint_size)]


def type_rank(Q: JointType) -> int:
    """Position of ``Q`` in :func:`enumerate_types` order, computed without enumeration."""
    remaining = Q.n
    k = len(Q.counts)
    rank = 0
    for pos, c in enumerate(Q.counts[:-1]):
        parts = k - pos - 1
        # compositions whose current coordinate is smaller than c
        for v in range(c):
            rank += type_count(remaining - v, parts)
        remaining -= c
    return rank


def type_unrank(rank: int, n: int, alphabet: AlphabetSpec) -> JointType:
    k = alphabet.joint_size
    if not 0 <= rank < type_count(n, k):
        raise ValueError(f"type rank {rank} out of range at n={n}")
    counts = []
    remaining = n
    for pos in range(k - 1):
        parts = k - pos - 1
        v = 0
        while True:
            block = type_count(remaining - v, parts)
            if rank < block:
                break
            rank -= block
            v += 1
        counts.append(v)
        remaining -= v
    counts.append(remaining)
    return JointType(alphabet, tuple(counts))


def multinomial(counts: Iterable[int]) -> int:
    counts = list(counts)
    out = math.factorial(sum(counts))
    for c in counts:
        out //= math.factorial(c)
    return out


def class_size(Q: JointType) -> int:
    return multinomial(Q.counts)


def marginal_type(Q: JointType, coords: Iterable[int]) -> JointType:
    coords = sorted(set(coords))
    if not coords:
        raise ValueError("source-index set must be nonempty")
    if coords[-1] >= Q.alphabet.n_sources or coords[0] < 0:
        raise ValueError(f"source indices {coords} outside 0..{Q.alphabet.n_sources - 1}")
    sub = Q.alphabet.sub(coords)
    acc = [0] * sub.joint_size
    for letter, c in zip(Q.alphabet.letters, Q.counts):
        if c:
            acc[sub.index(tuple(letter[i] for i in coords))] += c
    return JointType(sub, tuple(acc))


# ---------------------------------------------------------------------------
# V-shells
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _groups(sizes: tuple, coords: tuple) -> dict:
    """Map side letter -> ascending joint-letter indices that extend it."""
    alphabet = AlphabetSpec(sizes)
    out: dict = {}
    for idx, letter in enumerate(alphabet.letters):
        out.setdefault(tuple(letter[i] for i in coords), []).append(idx)
    return {key: tuple(v) for key, v in out.items()}


def _side_coords(net, j: int) -> tuple:
    return tuple(sorted(net.complement(j)))


def shell_size_coords(Q: JointType, coords: Sequence[int]) -> int:
    """Size of the shell of any side sequence over ``coords`` with the marginal type of ``Q``."""
    out = 1
    for members in _groups(Q.alphabet.sizes, tuple(sorted(coords))).values():
        out *= multinomial(Q.counts[i] for i in members)
    return out


def shell_size(Q: JointType, net, j: int) -> int:
    """Number of completions of a decoder-``j`` side sequence within the class of ``Q``."""
    return shell_size_coords(Q, _side_coords(net, j))


class _ShellState:
    """Per-position candidate letters and remaining counts for one shell."""

    def __init__(self, Q: JointType, coords: tuple, side: Sequence):
        if len(side) != Q.n:
            raise TypeMismatch(f"side sequence has length {len(side)}, type has n={Q.n}")
        groups = _groups(Q.alphabet.sizes, coords)
        need: dict = {}
        for key, members in groups.items():
            tot = sum(Q.counts[i] for i in members)
            if tot:
                need[key] = tot
        have: dict = {}
        for letter in side:
            key = tuple(letter)
            have[key] = have.get(key, 0) + 1
        if have != need:
            raise TypeMismatch("side sequence type differs from the marginal of the joint type")
        self.candidates = [groups[tuple(letter)] for letter in side]
        self.remaining = list(Q.counts)
        self.group_left = dict(need)
        self.total = 1
        for key, members in groups.items():
            self.total *= multinomial(Q.counts[i] for i in members)


def iter_shell_coords(side: Sequence, Q: JointType, coords: Sequence[int]) -> Iterator[Seq]:
    coords = tuple(sorted(coords))
    state = _ShellState(Q, coords, side)
    letters = Q.alphabet.letters
    cands = state.candidates
    rem = state.remaining
    n = len(cands)
    out = [None] * n

    def rec(pos):
        if pos == n:
            yield tuple(out)
            return
        for idx in cands[pos]:
            if rem[idx]:
                rem[idx] -= 1
                out[pos] = letters[idx]
                yield from rec(pos + 1)
                rem[idx] += 1

    yield from rec(0)


def enumerate_shell(side: Sequence, Q: JointType, net, j: int) -> Iterator[Seq]:
    """Yield every completion of ``side`` within the class of ``Q``, lexicographically."""
    return iter_shell_coords(side, Q, _side_coords(net, j))


def rank_in_shell_coords(x: Sequence, side: Sequence, Q: JointType, coords: Sequence[int]) -> int:
    coords = tuple(sorted(coords))
    state = _ShellState(Q, coords, side)
    alphabet = Q.alphabet
    rem = state.remaining
    left = state.group_left
    total = state.total
    rank = 0
    if len(x) != len(side):
        raise ValueError("sequence and side information differ in length")
    for letter, s, cands in zip(x, side, state.candidates):
        idx = alphabet.index(letter)
        if idx not in cands:
            raise ValueError("sequence does not extend the side information")
        if not rem[idx]:
            raise ValueError("sequence is not a member of the type class")
        key = tuple(s)
        m = left[key]
        for c in cands:
            if c == idx:
                break
            if rem[c]:
                rank += total * rem[c] // m
        total = total * rem[idx] // m
        rem[idx] -= 1
        left[key] = m - 1
    return rank


def unrank_in_shell_coords(r: int, side: Sequence, Q: JointType, coords: Sequence[int]) -> Seq:
    coords = tuple(sorted(coords))
    state = _ShellState(Q, coords, side)
    if not 0 <= r < state.total:
        raise ValueError(f"rank {r} outside 0..{state.total - 1}")
    letters = Q.alphabet.letters
    rem = state.remaining
    left = state.group_left
    total = state.total
    out = []
    for s, cands in zip(side, state.candidates):
        key = tuple(s)
        m = left[key]
        for c in cands:
            if not rem[c]:
                continue
            block = total * rem[c] // m
            if r < block:
                out.append(letters[c])
                total = block
                rem[c] -= 1
                left[key] = m - 1
                break
            r -= block
    return tuple(out)


def rank_in_shell(x: Sequence, side: Sequence, Q: JointType, net, j: int) -> int:
    return rank_in_shell_coords(x, side, Q, _side_coords(net, j))


def unrank_in_shell(r: int, side: Sequence, Q: JointType, net, j: int) -> Seq:
    return unrank_in_shell_coords(r, side, Q, _side_coords(net, j))


def class_rank(x: Sequence, Q: JointType) -> int:
    """Lexicographic rank of ``x`` within the type class of ``Q``."""
    return rank_in_shell_coords(x, ((),) * len(x), Q, ())


def class_unrank(r: int, Q: JointType) -> Seq:
    return unrank_in_shell_coords(r, ((),) * Q.n, Q, ())


def iter_class(Q: JointType, cap: int = DEFAULT_CAP) -> Iterator[Seq]:
    size = class_size(Q)
    if size > cap:
        raise ConfigurationTooLarge(f"type class of size {size} exceeds cap {cap}")
    return iter_shell_coords(((),) * Q.n, Q, ())


# ---------------------------------------------------------------------------
# information measures (bits)
# ---------------------------------------------------------------------------


def _log2(x: Number) -> float:
    if isinstance(x, Fraction):
        return math.log2(x.numerator) - math.log2(x.denominator)
    return math.log2(x)


def entropy(Q) -> float:
    """Entropy in bits of a :class:`JointType` (empirical) or :class:`Distribution`."""
    if isinstance(Q, JointType):
        n = Q.n
        return math.log2(n) - math.fsum(c * math.log2(c) for c in Q.counts if c) / n
    return -math.fsum(float(p) * _log2(p) for p in Q.probs if p)


def cond_entropy_coords(Q, coords: Sequence[int]) -> float:
    """H(sources outside ``coords`` | sources in ``coords``) under ``Q``."""
    if isinstance(Q, JointType):
        return entropy(Q) - entropy(marginal_type(Q, coords))
    return entropy(Q) - entropy(Q.marginal(coords))


def cond_entropy(Q, net, j: int) -> float:
    return cond_entropy_coords(Q, _side_coords(net, j))


def divergence(Q: JointType, P: Distribution) -> float:
    """D(Q || P) in bits; ``inf`` when Q puts mass where P has none."""
    n = Q.n
    terms = []
    for c, p in zip(Q.counts, P.probs):
        if not c:
            continue
        if not p:
            return math.inf
        terms.append(c * (math.log2(c) - math.log2(n) - _log2(p)))
    return max(math.fsum(terms) / n, 0.0)


def type_probability(Q: JointType, P: Distribution) -> float:
    """log2 of the probability that an i.i.d. ``P`` block has type ``Q``."""
    total = math.log2(class_size(Q))
    terms = []
    for c, p in zip(Q.counts, P.probs):
        if not c:
            continue
        if not p:
            return -math.inf
        terms.append(c * _log2(p))
    return total + math.fsum(terms)


def epsilon_n(n: int, N: int, alphabet: AlphabetSpec) -> float:
    """Polynomial-overhead rate term (|joint alphabet| log(n+1) + log N) / n, in bits."""
    if n < 1 or N < 1:
        raise ValueError("n and N must be >= 1")
    return (alphabet.joint_size * math.log2(n + 1) + math.log2(N)) / n


# ---------------------------------------------------------------------------
# exact rational forms of 2^(n * measure)
# ---------------------------------------------------------------------------


def _self_power(counts: Iterable[int]) -> int:
    out = 1
    for c in counts:
        if c:
            out *= c**c
    return out


def exp2_n_entropy(Q: JointType) -> Fraction:
    """Exactly 2^(n H(Q)) = n^n / prod c^c."""
    n = Q.n
    return Fraction(n**n, _self_power(Q.counts))


def exp2_n_cond_entropy_coords(Q: JointType, coords: Sequence[int]) -> Fraction:
    """Exactly 2^(n H(rest | coords)) = prod d^d / prod c^c with d the marginal counts."""
    return Fraction(_self_power(marginal_type(Q, coords).counts), _self_power(Q.counts))


def exp2_n_cond_entropy(Q: JointType, net, j: int) -> Fraction:
    return exp2_n_cond_entropy_coords(Q, _side_coords(net, j))


def exp2_neg_n_divergence(Q: JointType, P: Distribution) -> Fraction:
    """Exactly 2^(-n D(Q||P)) = prod (n p_a / c_a)^c_a for rational ``P``."""
    if not P.is_exact:
        raise TypeError("exact evaluation needs rational probabilities")
    n = Q.n
    out = Fraction(1)
    for c, p in zip(Q.counts, P.probs):
        if c:
            out *= (Fraction(p) * n / c) ** c
    return out


def type_probability_exact(Q: JointType, P: Distribution) -> Fraction:
    if not P.is_exact:
        raise TypeError("exact evaluation needs rational probabilities")
    out = Fraction(class_size(Q))
    for c, p in zip(Q.counts, P.probs):
        if c:
            out *= Fraction(p) ** c
    return out


def cond_entropy_at_most(Q: JointType, coords: Sequence[int], R: Number) -> bool:
    """Decide H(rest | coords) <= R, exactly when ``R`` is a rational with small denominator."""
    n = Q.n
    if isinstance(R, (int, Fraction)):
        R = Fraction(R)
        if R.denominator <= 10_000:
            ratio = exp2_n_cond_entropy_coords(Q, coords)
            p, q = R.numerator * n, R.denominator
            # ratio <= 2^(p/q)  <=>  ratio^q <= 2^p
            lhs = ratio**q
            return lhs <= (Fraction(2**p) if p >= 0 else Fraction(1, 2**-p))
        R = float(R)
    return cond_entropy_coords(Q, coords) <= R
