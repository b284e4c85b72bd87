"""Exact finite-n performance of the type-based codes and the bounds around it.

Everything here is a sum or minimum over the finite set of types at block
length n, so no coding graph is ever built: the FF code errs exactly on the
inadmissible types, and FV codeword lengths depend only on the type through
the closed-form color budget.

Probabilities are carried as base-2 logarithms and combined by log-sum-exp.
Bound values are base-2 logarithms of the stated probability expressions;
``-inf`` stands for probability 0 (for instance a minimum over an empty set).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .codec import Codebook
from .graphcode import BIPARTITE, GREEDY, color_budget, is_admissible, max_cond_entropy
from .network import NetworkSpec, rf_rate
from .typekit import (
    DEFAULT_CAP,
    AlphabetSpec,
    Distribution,
    divergence,
    enumerate_types,
    epsilon_n,
    type_count,
    type_probability,
)


def log2_sum(logs) -> float:
    """log2 of a sum of terms given as log2 values, order independent up to rounding."""
    logs = [v for v in logs if v != -math.inf]
    if not logs:
        return -math.inf
    top = max(logs)
    return top + math.log2(math.fsum(2.0 ** (v - top) for v in logs))


def prob(log_value: float) -> float:
    """Probability from its log2, clamped to [0, 1] against summation rounding."""
    return min(1.0, 2.0**log_value)


def _default_mode(net: NetworkSpec, coloring_mode: Optional[str]) -> str:
    if coloring_mode is not None:
        return coloring_mode
    return BIPARTITE if net.n_decoders == 2 else GREEDY


class _TypeTable:
    """Per-type quantities for one (P, n, network) triple, computed once."""

    def __init__(self, P: Distribution, n: int, net: NetworkSpec, alphabet: AlphabetSpec, cap: int):
        self.types = enumerate_types(n, alphabet, cap)
        self.logp = [type_probability(Q, P) for Q in self.types]
        self.div = [divergence(Q, P) for Q in self.types]
        self.hmax = [max_cond_entropy(Q, net) for Q in self.types]

    def admissible(self, net: NetworkSpec, R) -> list:
        if isinstance(R, float):
            return [h <= R for h in self.hmax]
        return [is_admissible(Q, net, R) for Q in self.types]


def _min(values) -> float:
    return min(values, default=math.inf)


def _log_bound(n: int, offset: float, exponent: float) -> float:
    """log2 of exp2(-n (offset + exponent)), with an infinite exponent giving -inf."""
    if exponent == math.inf:
        return -math.inf
    return -n * (offset + exponent)


def code_rate(n: int, R, net: NetworkSpec, alphabet: AlphabetSpec,
              coloring_mode: Optional[str] = None, cap: int = DEFAULT_CAP) -> float:
    """(1/n) log2 M of the FF code for requested rate R, from closed-form budgets."""
    mode = _default_mode(net, coloring_mode)
    table = [Q for Q in enumerate_types(n, alphabet, cap) if is_admissible(Q, net, R)]
    c_max = max(color_budget(Q, net, mode) for Q in table)
    return math.log2(type_count(n, alphabet.joint_size) * c_max + 1) / n


# ---------------------------------------------------------------------------
# FF quantities
# ---------------------------------------------------------------------------


def log_error_prob(P, n, R, net, alphabet, cap=DEFAULT_CAP) -> float:
    t = _TypeTable(P, n, net, alphabet, cap)
    ok = t.admissible(net, R)
    return log2_sum(lp for lp, a in zip(t.logp, ok) if not a)


def exact_error_prob(P, n, R, net, alphabet, cap=DEFAULT_CAP) -> float:
    """Probability that the FF encoder declares an error (input type inadmissible)."""
    return prob(log_error_prob(P, n, R, net, alphabet, cap))


def error_exponent(P, n, R, net, alphabet, cap=DEFAULT_CAP) -> float:
    """Minimum divergence from P over inadmissible types; ``inf`` if every type is admissible."""
    t = _TypeTable(P, n, net, alphabet, cap)
    ok = t.admissible(net, R)
    return _min(d for d, a in zip(t.div, ok) if not a)


def _min_div_outside(t: _TypeTable, net, R) -> float:
    return _min(d for d, a in zip(t.div, t.admissible(net, R)) if not a)


def _min_div_inside(t: _TypeTable, net, R) -> float:
    return _min(d for d, a in zip(t.div, t.admissible(net, R)) if a)


def _clipped_min(t: _TypeTable, threshold: float) -> float:
    return _min(max(h - threshold, 0.0) + d for h, d in zip(t.hmax, t.div))


def _bounds(t: _TypeTable, n, R, net, alphabet, rate) -> dict:
    """log2 of every bound expression; ``rate`` is the FF code's achieved rate."""
    eps1 = epsilon_n(n, 1, alphabet)
    eps2 = epsilon_n(n, 2, alphabet)
    epsd = epsilon_n(n, net.n_decoders, alphabet)
    exact_R, R = R, float(R)
    return {
        "direct_ff": _log_bound(n, -epsd, _min_div_outside(t, net, exact_R)),
        "converse_ff": _log_bound(n, eps2, _min_div_outside(t, net, rate + eps2)),
        "correct_direct": _log_bound(n, eps1, _min_div_inside(t, net, exact_R)),
        "correct_converse": _log_bound(n, -eps1, _clipped_min(t, rate + eps1)),
        "overflow_direct": _log_bound(n, -epsd, _min_div_outside(t, net, R - epsd)),
        "overflow_converse": _log_bound(n, eps2, _min_div_outside(t, net, R + eps2)),
        "underflow_direct": _log_bound(n, eps1, _min_div_inside(t, net, R - epsd)),
        "underflow_converse": _log_bound(n, -eps1, _clipped_min(t, R + eps1)),
    }


def _bound(name, P, n, R, net, alphabet, coloring_mode, cap) -> float:
    t = _TypeTable(P, n, net, alphabet, cap)
    rate = code_rate(n, R, net, alphabet, coloring_mode, cap)
    return _bounds(t, n, R, net, alphabet, rate)[name]


def bound_direct_ff(P, n, R, net, alphabet, coloring_mode=None, cap=DEFAULT_CAP) -> float:
    """Upper bound on the error probability of the FF code at rate R."""
    return _bound("direct_ff", P, n, R, net, alphabet, coloring_mode, cap)


def bound_converse_ff(P, n, R, net, alphabet, coloring_mode=None, cap=DEFAULT_CAP) -> float:
    """Lower bound on the error probability of any code at the built code's rate (1/n) log2 M."""
    return _bound("converse_ff", P, n, R, net, alphabet, coloring_mode, cap)


def bound_correct_direct(P, n, R, net, alphabet, coloring_mode=None, cap=DEFAULT_CAP) -> float:
    return _bound("correct_direct", P, n, R, net, alphabet, coloring_mode, cap)


def bound_correct_converse(P, n, R, net, alphabet, coloring_mode=None, cap=DEFAULT_CAP) -> float:
    return _bound("correct_converse", P, n, R, net, alphabet, coloring_mode, cap)


def bound_overflow_direct(P, n, R, net, alphabet, coloring_mode=None, cap=DEFAULT_CAP) -> float:
    return _bound("overflow_direct", P, n, R, net, alphabet, coloring_mode, cap)


def bound_overflow_converse(P, n, R, net, alphabet, coloring_mode=None, cap=DEFAULT_CAP) -> float:
    return _bound("overflow_converse", P, n, R, net, alphabet, coloring_mode, cap)


def bound_underflow_direct(P, n, R, net, alphabet, coloring_mode=None, cap=DEFAULT_CAP) -> float:
    return _bound("underflow_direct", P, n, R, net, alphabet, coloring_mode, cap)


def bound_underflow_converse(P, n, R, net, alphabet, coloring_mode=None, cap=DEFAULT_CAP) -> float:
    return _bound("underflow_converse", P, n, R, net, alphabet, coloring_mode, cap)


# ---------------------------------------------------------------------------
# FV quantities
# ---------------------------------------------------------------------------


@dataclass
class FVStats:
    """Exact codeword-length distribution of the FV code under one source."""

    n: int
    type_width: int
    lengths: list  # (length in bits, log2 probability) per type
    expected_length_per_symbol: float

    def overflow(self, R: float) -> float:
        """Pr{ length > n R }."""
        return prob(log2_sum(lp for length, lp in self.lengths if length > self.n * R))

    def underflow(self, R: float) -> float:
        """Pr{ length < n R }."""
        return prob(log2_sum(lp for length, lp in self.lengths if length < self.n * R))


def fv_length_stats(P, n, net, alphabet, coloring_mode=None, cap=DEFAULT_CAP) -> FVStats:
    mode = _default_mode(net, coloring_mode)
    width = (type_count(n, alphabet.joint_size) - 1).bit_length()
    lengths = []
    for Q in enumerate_types(n, alphabet, cap):
        lp = type_probability(Q, P)
        if lp == -math.inf:
            continue
        lengths.append((width + (color_budget(Q, net, mode) - 1).bit_length(), lp))
    mean = math.fsum(length * 2.0**lp for length, lp in lengths) / n
    return FVStats(n, width, lengths, mean)


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

BOUND_NAMES = (
    "direct_ff",
    "converse_ff",
    "correct_direct",
    "correct_converse",
    "overflow_direct",
    "overflow_converse",
    "underflow_direct",
    "underflow_converse",
)


def is_vacuous(log_value: float) -> bool:
    """A bound carries no information if it claims probability >= 1 or <= 0."""
    return log_value >= 0 or log_value == -math.inf


@dataclass
class AnalysisReport:
    P: Distribution
    n: int
    R: object
    net: NetworkSpec
    code_rate: float
    rf: float
    exact_error: float
    exact_correct: float
    exponent: float
    bounds: dict = field(default_factory=dict)
    vacuous: dict = field(default_factory=dict)
    fv_stats: dict = field(default_factory=dict)


def full_report(P, n, R, net, alphabet, coloring_mode=None, cap=DEFAULT_CAP) -> AnalysisReport:
    """Every exact quantity and bound for one (P, n, R, network) point.

    ``R`` is the requested FF rate and also the FV overflow/underflow
    threshold.  Converse FF bounds use the achieved rate (1/n) log2 M.
    """
    mode = _default_mode(net, coloring_mode)
    t = _TypeTable(P, n, net, alphabet, cap)
    ok = t.admissible(net, R)
    rate = code_rate(n, R, net, alphabet, mode, cap)

    log_err = log2_sum(lp for lp, a in zip(t.logp, ok) if not a)
    log_ok = log2_sum(lp for lp, a in zip(t.logp, ok) if a)
    err = prob(log_err)
    # the smaller of the two complementary sums is the one with full relative precision
    correct = prob(log_ok) if log_ok < -1 else 1.0 - err
    bounds = _bounds(t, n, R, net, alphabet, rate)
    stats = fv_length_stats(P, n, net, alphabet, mode, cap)
    return AnalysisReport(
        P=P,
        n=n,
        R=R,
        net=net,
        code_rate=rate,
        rf=rf_rate(P, net),
        exact_error=err,
        exact_correct=correct,
        exponent=_min(d for d, a in zip(t.div, ok) if not a),
        bounds=bounds,
        vacuous={k: is_vacuous(v) for k, v in bounds.items()},
        fv_stats={
            "expected_length_per_symbol": stats.expected_length_per_symbol,
            "overflow_exact": stats.overflow(float(R)),
            "underflow_exact": stats.underflow(float(R)),
        },
    )


def codebook_rate_check(cb: Codebook) -> bool:
    """(1/n) log2 M <= R + eps_n(N_d) + 1/n for an FF codebook."""
    eps = epsilon_n(cb.n, cb.net.n_decoders, cb.alphabet)
    return cb.rate <= float(cb.R) + eps + 1 / cb.n
