"""Hypothesis selection from samples by pairwise Scheffe comparisons.

Two candidates are compared on their disagreement event
A = {x : Q_i(x) > Q_j(x)}: whichever candidate's claimed mass on A is
closer to the empirical mass of A wins (ties to the earlier candidate).
The candidate with the most wins over the whole pool is returned, ties
again to the earliest stream position.  With on the order of
log(1/delta)/eps^2 * log(m) samples the winner lands within a constant
multiple of the best candidate's TV distance, with probability at least
1 - delta.

Claimed masses are computed exactly by full-domain enumeration while
the joint domain is small enough; beyond the cap they are estimated
from per-candidate self-samples, which adds a further estimation error
term to the guarantee (documented, seeded, deterministic).

For candidate pools too large to round-robin, a streaming single
elimination pre-round trims the pool to a cap first; the extra union
bound is absorbed into the sample-count constant.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .dist import from_bayes_net
from .errors import InputError
from .model import BayesNet, Variable, log_prob_rows, mixed_radix_codes, sample

# Largest tables-times-candidates footprint (in table cells) the exact
# arena will hold in memory before falling back to self-sampling.
_EXACT_MEMORY_CELLS = 2 ** 24


@dataclass(frozen=True)
class TournamentConfig:
    """Accuracy eps, confidence delta, and implementation knobs."""

    eps: float
    delta: float
    rng_seed: int = 0
    constant: float = 10.0
    exact_domain_cap: int = 2 ** 20
    aux_samples: int = 4096

    def __post_init__(self) -> None:
        if not 0.0 < self.eps < 1.0:
            raise InputError("eps must lie in (0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise InputError("delta must lie in (0, 1)")
        if self.constant <= 0:
            raise InputError("constant must be positive")


class SampleSet:
    """I.i.d. joint assignments: an (N, n) integer array plus its variables."""

    __slots__ = ("variables", "rows")

    def __init__(self, variables: Sequence[Variable], rows) -> None:
        self.variables = tuple(variables)
        arr = np.asarray(rows, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != len(self.variables):
            raise InputError(f"rows must have shape (N, {len(self.variables)})")
        for j, v in enumerate(self.variables):
            if len(arr) and (arr[:, j].min() < 0 or arr[:, j].max() >= v.alphabet_size):
                raise InputError(f"column {j} has values outside the alphabet of {v.name!r}")
        arr = arr.copy()
        arr.setflags(write=False)
        self.rows = arr

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def __len__(self) -> int:
        return len(self.rows)


def required_samples(m: int, config: TournamentConfig) -> int:
    """Sample budget for selecting among m candidates at the configured accuracy."""
    if m < 1:
        raise InputError("m must be >= 1")
    return math.ceil(
        config.constant
        * math.log(1.0 / config.delta)
        / config.eps ** 2
        * math.log(max(m, 2))
    )


# ---------------------------------------------------------------------------
# Pairwise comparison arenas
# ---------------------------------------------------------------------------


class _ExactArena:
    """Pair rule with exact candidate masses from full-domain tables."""

    def __init__(self, variables: Sequence[Variable], rows: np.ndarray, cap: int) -> None:
        sizes = [v.alphabet_size for v in variables]
        self.variables = tuple(variables)
        self.cap = cap
        cells = math.prod(sizes)
        codes = mixed_radix_codes(rows, sizes)
        self.empirical = np.bincount(codes, minlength=cells) / len(rows)

    def add(self, net: BayesNet) -> np.ndarray:
        if net.variables != self.variables:
            raise InputError("candidate is over different variables than the samples")
        return from_bayes_net(net, cap=self.cap).probs

    def left_wins(self, ti: np.ndarray, tj: np.ndarray) -> bool:
        mask = ti > tj
        if not mask.any():
            return True  # identical claims: tie to the earlier candidate
        emp = float(self.empirical[mask].sum())
        di = abs(float(ti[mask].sum()) - emp)
        dj = abs(float(tj[mask].sum()) - emp)
        return di <= dj

    def left_wins_block(self, ti: np.ndarray, block: np.ndarray) -> np.ndarray:
        """Vectorized left_wins of one table against a (m, cells) block."""
        mask = ti[None, :] > block
        emp = mask @ self.empirical
        mass_i = mask @ ti
        mass_j = (mask * block).sum(axis=1)
        return np.abs(mass_i - emp) <= np.abs(mass_j - emp)


class _SampledArena:
    """Pair rule with candidate masses estimated from self-samples.

    Used when the joint domain is too large to enumerate.  Each
    candidate draws a fixed number of auxiliary samples from itself
    (seeded by registration order); the mass of a disagreement event
    under a candidate is the fraction of its own samples in the event.
    """

    def __init__(self, variables: Sequence[Variable], rows: np.ndarray, config: TournamentConfig) -> None:
        self.variables = tuple(variables)
        self.rows = rows
        self.aux = max(1, config.aux_samples)
        self.base_seed = config.rng_seed
        self._registered = 0

    def add(self, net: BayesNet) -> dict:
        if net.variables != self.variables:
            raise InputError("candidate is over different variables than the samples")
        seed = np.random.SeedSequence([self.base_seed, self._registered])
        self._registered += 1
        aux_rows = sample(net, self.aux, seed=np.random.default_rng(seed).integers(2 ** 63))
        return {
            "net": net,
            "lp_rows": log_prob_rows(net, self.rows),
            "aux": aux_rows,
            "lp_own_aux": log_prob_rows(net, aux_rows),
        }

    def left_wins(self, hi: dict, hj: dict) -> bool:
        on_rows = hi["lp_rows"] > hj["lp_rows"]
        emp = float(on_rows.mean()) if len(on_rows) else 0.0
        mass_i = float((hi["lp_own_aux"] > log_prob_rows(hj["net"], hi["aux"])).mean())
        mass_j = float((log_prob_rows(hi["net"], hj["aux"]) > hj["lp_own_aux"]).mean())
        return abs(mass_i - emp) <= abs(mass_j - emp)


def _make_arena(variables, rows, config: TournamentConfig, pool_bound: int):
    cells = math.prod(v.alphabet_size for v in variables)
    if cells <= config.exact_domain_cap and cells * max(pool_bound, 1) <= _EXACT_MEMORY_CELLS:
        return _ExactArena(variables, rows, config.exact_domain_cap)
    return _SampledArena(variables, rows, config)


# ---------------------------------------------------------------------------
# Round robin and streaming pre-round
# ---------------------------------------------------------------------------


@dataclass
class SelectionReport:
    """Winner plus bookkeeping from a round-robin selection."""

    winner: BayesNet
    winner_index: int
    samples_consumed: int
    comparisons: int
    wins: list[int]


def run_scheffe(
    samples: SampleSet,
    candidates: Iterable[BayesNet],
    config: TournamentConfig,
    sample_count: int | None = None,
) -> SelectionReport:
    """Full round robin over the candidates; most wins takes it.

    Consumes min(available, sample_count or required_samples(m)) rows
    from the front of the sample set.  Deterministic given the samples,
    the stream order, and the config.
    """
    nets = list(candidates)
    m = len(nets)
    if m == 0:
        raise InputError("candidate stream is empty")
    if m == 1:
        return SelectionReport(nets[0], 0, 0, 0, [0])
    if len(samples) == 0:
        raise InputError("sample set is empty")
    budget = required_samples(m, config) if sample_count is None else int(sample_count)
    n_use = min(len(samples), budget)
    if n_use < 1:
        raise InputError("sample budget must be >= 1")
    rows = samples.rows[:n_use]

    arena = _make_arena(samples.variables, rows, config, pool_bound=m)
    handles = [arena.add(net) for net in nets]
    wins = np.zeros(m, dtype=np.int64)
    if isinstance(arena, _ExactArena):
        tables = np.stack(handles)
        for i in range(m - 1):
            left = arena.left_wins_block(tables[i], tables[i + 1:])
            wins[i] += int(left.sum())
            wins[i + 1:][~left] += 1
    else:
        for i in range(m - 1):
            for j in range(i + 1, m):
                if arena.left_wins(handles[i], handles[j]):
                    wins[i] += 1
                else:
                    wins[j] += 1
    champion = int(np.argmax(wins))  # first maximum: lowest stream index
    return SelectionReport(nets[champion], champion, n_use, m * (m - 1) // 2, wins.tolist())


def scheffe_select(
    samples: SampleSet,
    candidates: Iterable[BayesNet],
    config: TournamentConfig,
) -> BayesNet:
    """The round-robin winner; see run_scheffe for the full report."""
    return run_scheffe(samples, candidates, config).winner


@dataclass
class _Entry:
    position: int
    handle: object
    net: BayesNet


def preselect_single_elimination(
    samples: SampleSet,
    candidates: Iterable[BayesNet],
    config: TournamentConfig,
    pool_cap: int,
    sample_count: int | None = None,
) -> tuple[list[BayesNet], int]:
    """Stream candidates through single-elimination rounds down to pool_cap.

    Consecutive pool members duel pairwise whenever the pool doubles the
    cap; losers drop, order is preserved.  Returns the surviving nets in
    stream order and the total number of candidates seen.
    """
    if pool_cap < 1:
        raise InputError("pool cap must be >= 1")
    if len(samples) == 0:
        raise InputError("sample set is empty")
    n_use = len(samples) if sample_count is None else min(len(samples), int(sample_count))
    if n_use < 1:
        raise InputError("sample budget must be >= 1")
    rows = samples.rows[:n_use]
    arena = _make_arena(samples.variables, rows, config, pool_bound=2 * pool_cap)

    def eliminate(pool: list[_Entry]) -> list[_Entry]:
        out = []
        for t in range(0, len(pool) - 1, 2):
            left, right = pool[t], pool[t + 1]
            out.append(left if arena.left_wins(left.handle, right.handle) else right)
        if len(pool) % 2:
            out.append(pool[-1])
        return out

    pool: list[_Entry] = []
    seen = 0
    for net in candidates:
        pool.append(_Entry(seen, arena.add(net), net))
        seen += 1
        if len(pool) >= 2 * pool_cap:
            pool = eliminate(pool)
    if seen == 0:
        raise InputError("candidate stream is empty")
    while len(pool) > pool_cap:
        pool = eliminate(pool)
    return [entry.net for entry in pool], seen


# ---------------------------------------------------------------------------
# CSV sample interchange: header of variable names, integer symbol rows.
# ---------------------------------------------------------------------------


def read_samples_csv(path) -> tuple[tuple[str, ...], np.ndarray]:
    """Variable names and the (N, n) integer rows of a sample CSV."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty sample file") from None
        names = tuple(h.strip() for h in header)
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(names):
                raise InputError(f"{path}:{lineno}: expected {len(names)} columns")
            try:
                rows.append([int(x) for x in record])
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-integer symbol") from None
    return names, np.asarray(rows, dtype=np.int64).reshape(len(rows), len(names))


def write_samples_csv(fh, names: Sequence[str], rows: np.ndarray) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(list(names))
    for row in np.asarray(rows, dtype=np.int64):
        writer.writerow([int(x) for x in row])
