"""Run configuration: a small line-oriented key/value format with one table.

Example::

    # doubly symmetric binary source, crossover 0.11
    sizes     = 2 2          # alphabet size of each source
    demand    = 0            # decoder 0 wants source 0 (indices are 0-based)
    demand    = 1            # one 'demand' line per decoder
    n         = 8            # block length; 'n = 4 8 12' gives a grid
    rate      = 4/5          # FF rate in bits/symbol; several values give a grid
    mode      = ff           # ff | fv
    coloring  = bipartite    # greedy | bipartite (default: bipartite iff 2 decoders)
    seed      = 20071026
    trials    = 100000
    cap       = 10000000     # enumeration cap

    [distribution]
    0 0 = 89/200             # joint letter = probability (rational or decimal)
    0 1 = 11/200
    1 0 = 11/200
    1 1 = 89/200

Text after ``#`` is ignored.  Probabilities and rates are parsed as exact
rationals, so ``0.8`` means exactly 4/5.  Letters missing from the
distribution table have probability 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional

from .errors import ConfigError
from .graphcode import COLORING_MODES
from .network import NetworkSpec, validate
from .typekit import DEFAULT_CAP, AlphabetSpec, Distribution

MODES = ("ff", "fv")
_SCALARS = {"sizes", "demand", "n", "rate", "mode", "coloring", "seed", "trials", "cap"}


@dataclass
class RunConfig:
    sizes: tuple
    demands: tuple
    distribution: Optional[Distribution] = None
    n_grid: List[int] = field(default_factory=list)
    rate_grid: List[Fraction] = field(default_factory=list)
    mode: str = "ff"
    coloring: Optional[str] = None
    seed: int = 0
    trials: int = 0
    cap: int = DEFAULT_CAP

    @property
    def alphabet(self) -> AlphabetSpec:
        return AlphabetSpec(self.sizes)

    @property
    def net(self) -> NetworkSpec:
        return NetworkSpec(len(self.sizes), self.demands)

    @property
    def n(self) -> int:
        if len(self.n_grid) != 1:
            raise ConfigError("exactly one block length is required here", field="n")
        return self.n_grid[0]

    @property
    def rate(self) -> Fraction:
        if len(self.rate_grid) != 1:
            raise ConfigError("exactly one rate is required here", field="rate")
        return self.rate_grid[0]

    def coloring_mode(self) -> str:
        if self.coloring is not None:
            return self.coloring
        return "bipartite" if len(self.demands) == 2 else "greedy"

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw).check()

    def check(self) -> "RunConfig":
        problems = validate(self.net)
        if problems:
            raise ConfigError("; ".join(problems), field="demand")
        if any(n < 1 for n in self.n_grid):
            raise ConfigError("block lengths must be >= 1", field="n")
        if any(r < 0 for r in self.rate_grid):
            raise ConfigError("rates must be nonnegative", field="rate")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}", field="mode")
        if self.coloring is not None and self.coloring not in COLORING_MODES:
            raise ConfigError(f"coloring must be one of {COLORING_MODES}", field="coloring")
        if self.coloring == "bipartite" and len(self.demands) != 2:
            raise ConfigError("bipartite coloring needs exactly 2 decoders", field="coloring")
        if self.trials < 0:
            raise ConfigError("trials must be >= 0", field="trials")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer", field="seed")
        if self.cap < 1:
            raise ConfigError("cap must be >= 1", field="cap")
        return self

    def require_distribution(self) -> Distribution:
        if self.distribution is None:
            raise ConfigError("this command needs a [distribution] table")
        return self.distribution


def parse_fraction(text: str, line=None, name=None) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{text.strip()!r} is not a rational number", line, name) from None


def _ints(text: str, line, name) -> List[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"expected integers, got {text.strip()!r}", line, name) from None


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a configuration before any computation starts."""
    values: dict = {}
    demands = []
    table = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line != "[distribution]":
                raise ConfigError(f"unknown section {line}", lineno)
            section = "distribution"
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if section == "distribution":
            table.append((lineno, key, value))
            continue
        if key not in _SCALARS:
            raise ConfigError(f"unknown key {key!r}", lineno, key)
        if key == "demand":
            demands.append((lineno, value))
        elif key in values:
            raise ConfigError("key given twice", lineno, key)
        else:
            values[key] = (lineno, value)

    if "sizes" not in values:
        raise ConfigError("missing alphabet sizes", field="sizes")
    line, text_sizes = values["sizes"]
    sizes = tuple(_ints(text_sizes, line, "sizes"))
    try:
        alphabet = AlphabetSpec(sizes)
    except ValueError as exc:
        raise ConfigError(str(exc), line, "sizes") from None
    if alphabet.n_sources < 2:
        raise ConfigError("need at least 2 sources", line, "sizes")
    if not demands:
        raise ConfigError("at least one 'demand' line is required", field="demand")
    demand_sets = []
    for line, value in demands:
        idx = _ints(value, line, "demand")
        if len(set(idx)) != len(idx):
            raise ConfigError("repeated source index", line, "demand")
        demand_sets.append(frozenset(idx))

    cfg = RunConfig(sizes=sizes, demands=tuple(demand_sets))
    if "n" in values:
        line, value = values["n"]
        cfg.n_grid = _ints(value, line, "n")
    if "rate" in values:
        line, value = values["rate"]
        cfg.rate_grid = sorted(parse_fraction(t, line, "rate") for t in value.replace(",", " ").split())
    for key in ("seed", "trials", "cap"):
        if key in values:
            line, value = values[key]
            got = _ints(value, line, key)
            if len(got) != 1:
                raise ConfigError("expected a single integer", line, key)
            setattr(cfg, key, got[0])
    if "mode" in values:
        cfg.mode = values["mode"][1].lower()
    if "coloring" in values:
        cfg.coloring = values["coloring"][1].lower()

    if table:
        probs = {}
        for line, key, value in table:
            letter = tuple(_ints(key, line, "distribution"))
            if letter in probs:
                raise ConfigError(f"letter {letter} listed twice", line, "distribution")
            p = parse_fraction(value, line, "distribution")
            if p < 0:
                raise ConfigError("negative probability", line, "distribution")
            probs[letter] = p
        try:
            cfg.distribution = Distribution.from_mapping(alphabet, probs)
        except ValueError as exc:
            raise ConfigError(str(exc), field="distribution") from None
    return cfg.check()


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text)
