"""Seeded Monte Carlo check of a built codebook against its source.

Trial ``t`` draws its block from a Philox stream keyed by the run seed with
``t`` in the top counter word, so every trial owns an independent substream
and the tallies do not depend on how trials are split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .codec import FF, Codebook, decode_ff, decode_fv, encode_ff, encode_fv
from .errors import GCDError
from .typekit import Distribution, project

Z95 = 1.959963984540054


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, trial]))


def draw_block(P: Distribution, n: int, seed: int, trial: int) -> tuple:
    letters = P.alphabet.letters
    cdf = np.cumsum([float(p) for p in P.probs])
    cdf[-1] = 1.0
    u = trial_generator(seed, trial).random(n)
    idx = np.searchsorted(cdf, u, side="right")
    # zero-probability letters sit on flat stretches of the cdf and are never drawn
    return tuple(letters[i] for i in idx)


@dataclass
class Tally:
    trials: int = 0
    declared: int = 0
    mismatches: List[int] = field(default_factory=list)

    def add(self, other: "Tally") -> None:
        self.trials += other.trials
        self.declared += other.declared
        if not self.mismatches:
            self.mismatches = [0] * len(other.mismatches)
        self.mismatches = [a + b for a, b in zip(self.mismatches, other.mismatches)]


def _outcome(cb: Codebook, x: tuple):
    """(declared error, per-decoder mismatch flags) for one block."""
    net = cb.net
    if cb.mode == FF:
        w = encode_ff(cb, x)
    else:
        w = encode_fv(cb, x)
    wrong = []
    for j in range(net.n_decoders):
        side = project(x, net.complement(j))
        want = project(x, net.demand(j))
        try:
            if cb.mode == FF:
                got = decode_ff(cb, j, w, side).symbols
            else:
                got = decode_fv(cb, j, w, side)
        except GCDError:
            got = None
        wrong.append(got != want)
    declared = cb.mode == FF and w.declared_error
    return declared, wrong


def run_trials(cb: Codebook, P: Distribution, seed: int, start: int, stop: int) -> Tally:
    tally = Tally(0, 0, [0] * cb.net.n_decoders)
    seen: dict = {}
    for t in range(start, stop):
        x = draw_block(P, cb.n, seed, t)
        res = seen.get(x)
        if res is None:
            res = seen[x] = _outcome(cb, x)
        declared, wrong = res
        tally.trials += 1
        tally.declared += declared
        for j, bad in enumerate(wrong):
            tally.mismatches[j] += bad
    return tally


def _worker(args):
    cb, P, seed, start, stop = args
    return run_trials(cb, P, seed, start, stop)


def simulate(cb: Codebook, P: Distribution, trials: int, seed: int, workers: int = 1) -> Tally:
    """Run ``trials`` trials; the result is identical for every ``workers`` value."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if workers <= 1:
        return run_trials(cb, P, seed, 0, trials)
    step = -(-trials // workers)
    jobs = [(cb, P, seed, s, min(s + step, trials)) for s in range(0, trials, step)]
    total = Tally()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_worker, jobs):
            total.add(part)
    return total


def wilson_interval(k: int, n: int, z: float = Z95):
    """Wilson score interval for a binomial proportion."""
    if n == 0:
        return 0.0, 1.0
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, centre - half)
    hi = 1.0 if k == n else min(1.0, centre + half)
    return lo, hi


def within_sigmas(k: int, n: int, p: float, sigmas: float = 3.0) -> bool:
    """Is the empirical count ``k`` of ``n`` within ``sigmas`` binomial deviations of ``p``?"""
    sd = math.sqrt(n * p * (1 - p))
    return abs(k - n * p) <= sigmas * sd
