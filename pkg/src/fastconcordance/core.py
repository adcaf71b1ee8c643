"""Domain types shared by the estimators, plus CSV ingestion.

Datasets are held column-wise in numpy arrays; the record types
(``ScoredPair``) exist for iteration and for building small inputs by hand.
"""
from __future__ import annotations

import csv
import enum
import functools
import math
import time
import dataclasses
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np


class ConcordanceError(Exception):
    """Base class for every error raised by this package."""


class InputError(ConcordanceError):
    """Malformed or unusable input data."""


class EmptyInput(InputError):
    pass


class ParseError(InputError):
    def __init__(self, row: int, col: int, value: str):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(f"row {row}, col {col}: cannot parse {value!r} as a number")


class NonFiniteValue(InputError):
    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"row {row}, col {col}: NaN or infinite value")


class NonBinaryResponse(InputError):
    pass


class EmptyGroup(InputError):
    def __init__(self, group: str):
        self.group = group
        super().__init__(f"group {group} is empty")


class EstimationError(ConcordanceError):
    """The estimator is undefined on this input (0/0 concordance)."""


class AllTied(EstimationError):
    pass


class NoComparablePairs(EstimationError):
    pass


class NoComparableClusters(EstimationError):
    pass


class NoComparableRegions(EstimationError):
    pass


class Method(str, enum.Enum):
    EXACT_BRUTE = "exact_brute"
    EXACT_RANK = "exact_rank"
    TRAPEZIUM = "trapezium"
    KMEANS = "kmeans"
    MARGINAL = "marginal"


class ScoredPair(NamedTuple):
    response: float
    prediction: float


def _finite_1d(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise InputError(f"{name}[{bad}] is NaN or infinite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScoredPairs:
    """A column-wise sequence of :class:`ScoredPair` records."""

    response: np.ndarray
    prediction: np.ndarray

    def __post_init__(self):
        r = _finite_1d(self.response, "response")
        p = _finite_1d(self.prediction, "prediction")
        if r.shape != p.shape:
            raise InputError(f"response and prediction lengths differ: {r.size} != {p.size}")
        object.__setattr__(self, "response", r)
        object.__setattr__(self, "prediction", p)

    @classmethod
    def from_records(cls, records: Iterable[tuple[float, float]]) -> "ScoredPairs":
        rows = list(records)
        if not rows:
            return cls(np.empty(0), np.empty(0))
        arr = np.asarray(rows, dtype=np.float64)
        return cls(arr[:, 0], arr[:, 1])

    def __len__(self) -> int:
        return int(self.response.size)

    def __iter__(self) -> Iterator[ScoredPair]:
        for r, p in zip(self.response.tolist(), self.prediction.tolist()):
            yield ScoredPair(r, p)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return ScoredPairs(self.response[i], self.prediction[i])
        return ScoredPair(float(self.response[i]), float(self.prediction[i]))

    def __eq__(self, other):
        if not isinstance(other, ScoredPairs):
            return NotImplemented
        return np.array_equal(self.response, other.response) and np.array_equal(
            self.prediction, other.prediction
        )

    __hash__ = None


@dataclass(frozen=True)
class GroupedBinaryData:
    """Predictions of the outcome-0 group (A) and the outcome-1 group (B)."""

    group_a: np.ndarray
    group_b: np.ndarray

    def __post_init__(self):
        a = _finite_1d(self.group_a, "group_a")
        b = _finite_1d(self.group_b, "group_b")
        if a.size == 0:
            raise EmptyGroup("A")
        if b.size == 0:
            raise EmptyGroup("B")
        object.__setattr__(self, "group_a", a)
        object.__setattr__(self, "group_b", b)

    @property
    def n(self) -> int:
        return int(self.group_a.size + self.group_b.size)

    def swapped(self) -> "GroupedBinaryData":
        return GroupedBinaryData(self.group_b, self.group_a)


@dataclass(frozen=True)
class ContinuousDataset:
    response: np.ndarray
    prediction: np.ndarray
    nu: float = 0.0

    def __post_init__(self):
        pairs = ScoredPairs(self.response, self.prediction)
        if len(pairs) == 0:
            raise EmptyInput("continuous dataset has no observations")
        nu = float(self.nu)
        if not (math.isfinite(nu) and nu >= 0.0):
            raise InputError(f"nu must be a finite non-negative number, got {self.nu!r}")
        object.__setattr__(self, "response", pairs.response)
        object.__setattr__(self, "prediction", pairs.prediction)
        object.__setattr__(self, "nu", nu)

    @classmethod
    def from_pairs(cls, pairs: ScoredPairs | Sequence[tuple[float, float]], nu: float = 0.0):
        if not isinstance(pairs, ScoredPairs):
            pairs = ScoredPairs.from_records(pairs)
        return cls(pairs.response, pairs.prediction, nu)

    @property
    def n(self) -> int:
        return int(self.response.size)

    def with_nu(self, nu: float) -> "ContinuousDataset":
        return ContinuousDataset(self.response, self.prediction, nu)


@dataclass(frozen=True)
class WeightedClusterSet:
    """Cluster representatives standing in for the raw observations.

    ``centroids`` has shape ``(k,)`` for 1-D clusterings and ``(k, 2)`` for
    joint (y, prediction) clusterings. Member counts are kept as integers so
    that downstream pair-mass sums stay exact.
    """

    centroids: np.ndarray
    counts: np.ndarray
    n_iter: int = 0
    converged: bool = True
    sse_history: tuple = ()
    labels: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.size == 0 or np.any(counts <= 0):
            raise ValueError("clusters must be non-empty with positive counts")
        cents = np.asarray(self.centroids, dtype=np.float64)
        if cents.shape[0] != counts.size:
            raise ValueError("one centroid per count required")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "centroids", cents)

    def __len__(self) -> int:
        return int(self.counts.size)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def weights(self) -> np.ndarray:
        return self.counts / self.counts.sum()


@dataclass(frozen=True)
class GridSpec:
    """Interior boundaries tau_1 < ... < tau_q; -inf and +inf are implicit.

    ``requested_q`` records how many boundaries were asked for before
    duplicate quantiles were merged.
    """

    boundaries: np.ndarray
    requested_q: int | None = None

    def __post_init__(self):
        b = _finite_1d(self.boundaries, "boundaries")
        if b.size < 1:
            raise InputError("a grid needs at least one boundary")
        if np.any(np.diff(b) <= 0):
            raise InputError("grid boundaries must be strictly increasing")
        object.__setattr__(self, "boundaries", b)
        if self.requested_q is None:
            object.__setattr__(self, "requested_q", int(b.size))

    @property
    def q(self) -> int:
        return int(self.boundaries.size)

    def band_index(self, values) -> np.ndarray:
        """0-based band of each value; band b is [tau_b, tau_{b+1}[ with tau_0 = -inf."""
        return np.searchsorted(self.boundaries, values, side="right")


@dataclass(frozen=True)
class CellCounts:
    """(q_y+1) x (q_pi+1) counts; rows index the Y band, columns the prediction band."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 2 or np.any(c < 0):
            raise InputError("cell counts must be a non-negative 2-D integer matrix")
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_csv(self, path) -> None:
        np.savetxt(path, self.counts, fmt="%d", delimiter=",")


def concordance_ratio(concordant, discordant, tied=0, ties: str = "exclude") -> float:
    """C = conc / (conc + disc), or (conc + tied/2) / (conc + disc + tied) with ``ties="half"``.

    Callers raise ``AllTied`` themselves when the denominator is zero.
    """
    if ties == "exclude":
        return concordant / (concordant + discordant)
    if ties == "half":
        # 2*conc + tied over 2*total keeps integer inputs exact until the division
        return (2 * concordant + tied) / (2 * (concordant + discordant + tied))
    raise ValueError(f"ties must be 'exclude' or 'half', got {ties!r}")


@dataclass(frozen=True)
class ConcordanceEstimate:
    c_hat: float
    concordant_mass: float
    discordant_mass: float
    method: Method
    elapsed: float = 0.0
    tied_mass: float = 0.0
    ties: str = "exclude"
    diagnostics: dict = field(default_factory=dict, compare=False)


def timed(func):
    """Stamp the wall-clock duration of ``func`` onto the returned estimate."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        est = func(*args, **kwargs)
        return dataclasses.replace(est, elapsed=time.perf_counter() - t0)

    return wrapper


# --- CSV --------------------------------------------------------------------


@dataclass(frozen=True)
class CsvFormat:
    """Where the two numeric columns live.

    ``response`` and ``prediction`` are either 0-based column indices or
    header names (names require ``header=True``).
    """

    response: int | str = 0
    prediction: int | str = 1
    header: bool | None = None  # None: sniff, a header is assumed iff the first row is non-numeric
    delimiter: str = ","


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _resolve(col: int | str, names: list[str] | None) -> int:
    if isinstance(col, int):
        return col
    if names is None:
        raise InputError(f"column {col!r} given by name but the file has no header")
    try:
        return [n.strip() for n in names].index(col)
    except ValueError:
        raise InputError(f"column {col!r} not found in header {names}") from None


def ingest_csv(path, fmt: CsvFormat | None = None) -> ScoredPairs:
    """Read (response, prediction) rows from a CSV file.

    Row numbers in errors are 1-based data rows (the header is not counted);
    column numbers are 1-based positions in the file.
    """
    fmt = fmt or CsvFormat()
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh, delimiter=fmt.delimiter) if r and any(c.strip() for c in r)]
    if not rows:
        raise EmptyInput(f"{path}: no rows")
    header = fmt.header
    if header is None:
        header = not all(_is_number(c) for c in rows[0])
    names = rows[0] if header else None
    data = rows[1:] if header else rows
    if not data:
        raise EmptyInput(f"{path}: header only, no data rows")
    ri = _resolve(fmt.response, names)
    pi = _resolve(fmt.prediction, names)

    out = np.empty((len(data), 2))
    for r, row in enumerate(data, start=1):
        for slot, ci in enumerate((ri, pi)):
            if ci >= len(row):
                raise ParseError(r, ci + 1, "")
            text = row[ci].strip()
            try:
                v = float(text)
            except ValueError:
                raise ParseError(r, ci + 1, text) from None
            if not math.isfinite(v):
                raise NonFiniteValue(r, ci + 1)
            out[r - 1, slot] = v
    return ScoredPairs(out[:, 0], out[:, 1])


def write_csv(pairs: ScoredPairs, path, header: bool = True) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(["response", "prediction"])
        for r, p in zip(pairs.response.tolist(), pairs.prediction.tolist()):
            w.writerow([repr(r), repr(p)])


def split_binary(pairs: ScoredPairs) -> GroupedBinaryData:
    r = pairs.response
    zero = r == 0.0
    one = r == 1.0
    if not np.all(zero | one):
        bad = int(np.flatnonzero(~(zero | one))[0])
        raise NonBinaryResponse(f"response[{bad}] = {float(r[bad])!r} is not 0 or 1")
    if not zero.any():
        raise EmptyGroup("A")
    if not one.any():
        raise EmptyGroup("B")
    return GroupedBinaryData(pairs.prediction[zero], pairs.prediction[one])
