"""Panel data model, CSV ingestion and block layout."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import IngestError, InvalidLayout, TooShort

MIN_TIME_POINTS = 4


@dataclass(frozen=True)
class Panel:
    """An n x d panel of observations, rows indexed by time.

    values is an (n, d) float array with every entry finite. labels, when
    present, name the d coordinates.
    """

    values: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise IngestError("panel values must form a 2-d array")
        if arr.shape[0] < MIN_TIME_POINTS:
            raise TooShort(
                "need at least %d time points, got %d" % (MIN_TIME_POINTS, arr.shape[0])
            )
        if arr.shape[1] < 1:
            raise InvalidLayout("panel needs at least one coordinate")
        if not np.isfinite(arr).all():
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise IngestError(
                "non-finite value at row %d, column %d" % (bad[0] + 1, bad[1] + 1),
                row=int(bad[0]) + 1,
                column=int(bad[1]) + 1,
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != arr.shape[1]:
                raise InvalidLayout(
                    "got %d labels for %d coordinates" % (len(labels), arr.shape[1])
                )
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def column(self, h: int) -> np.ndarray:
        """Series of coordinate h (0-based)."""
        return self.values[:, h]


@dataclass(frozen=True)
class BlockLayout:
    """Partition of 1..K*L into L contiguous blocks of K time points."""

    K: int
    L: int
    used_n: int = field(init=False)
    dropped_tail: int = 0

    def __post_init__(self):
        if self.K < 1 or self.L < 1:
            raise InvalidLayout("block layout needs K >= 1 and L >= 1")
        object.__setattr__(self, "used_n", self.K * self.L)


def partition_blocks(n: int, L: int) -> BlockLayout:
    """Split n time points into L blocks of equal length K = floor(n / L).

    The trailing n - K*L points are dropped from block construction; full
    series statistics are unaffected by the layout.
    """
    if L <= 0 or L > n:
        raise InvalidLayout("cannot form %d blocks from %d time points" % (L, n))
    K = n // L
    return BlockLayout(K=K, L=L, dropped_tail=n - K * L)


def _parse_cell(text: str, row: int, col: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise IngestError(
            "non-numeric cell %r at row %d, column %d" % (text, row, col),
            row=row,
            column=col,
        ) from None


def load_csv(
    path,
    has_header: bool = False,
    delimiter: str = ",",
    time_axis: str = "rows",
) -> Panel:
    """Read a rectangular numeric CSV into a Panel.

    Rows are time points by default; time_axis='columns' transposes. A
    header row, when declared, supplies coordinate labels. Ragged rows and
    non-numeric cells raise IngestError with the offending position.
    """
    if time_axis not in ("rows", "columns"):
        raise InvalidLayout("time_axis must be 'rows' or 'columns'")
    if isinstance(path, io.TextIOBase):
        rows = list(csv.reader(path, delimiter=delimiter))
    else:
        try:
            with open(path, newline="", encoding="utf-8") as fh:
                rows = list(csv.reader(fh, delimiter=delimiter))
        except OSError as exc:
            raise IngestError("cannot read %s: %s" % (path, exc)) from exc
    rows = [r for r in rows if r]
    if not rows:
        raise IngestError("empty input")
    labels = None
    if has_header:
        labels = tuple(cell.strip() for cell in rows[0])
        rows = rows[1:]
        if not rows:
            raise IngestError("no data rows after header")
    width = len(rows[0])
    data = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise IngestError(
                "ragged row %d: expected %d cells, got %d" % (i + 1, width, len(row)),
                row=i + 1,
            )
        for j, cell in enumerate(row):
            data[i, j] = _parse_cell(cell.strip(), i + 1, j + 1)
    if time_axis == "columns":
        data = data.T
        if labels is not None:
            labels = None
    return Panel(values=data, labels=labels)


def as_panel(X) -> Panel:
    """Coerce an array-like or Panel into a validated Panel."""
    if isinstance(X, Panel):
        return X
    return Panel(values=np.asarray(X, dtype=float))
