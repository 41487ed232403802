"""
Ingestion and pre-processing of daily price series.

The pipeline is ``read_price_csv`` -> ``forward_fill`` -> ``detrend`` ->
``uniform_deviate``. Everything here is a pure function over immutable
inputs.
"""
from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (CSVFormatError, EmptySeries, InsufficientData,
                     InvalidInput, LeadingGap)


@dataclass(frozen=True)
class RawSeries:
    """Dated closing prices for one market, as read from disk."""

    dates: tuple
    prices: np.ndarray
    label: str = ""

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        dates = tuple(self.dates)
        if len(dates) != len(prices):
            raise InvalidInput("dates and prices differ in length")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
            raise InvalidInput(f"{self.label}: prices must be finite and > 0")
        for a, b in zip(dates, dates[1:]):
            if not a < b:
                raise InvalidInput(
                    f"{self.label}: dates not strictly increasing at {b}")
        prices.setflags(write=False)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "prices", prices)

    def __len__(self):
        return len(self.prices)


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly indexed scalar series.

    ``dates`` is optional; when given it holds one calendar date per value.
    A single-value series is representable (a one-day forward fill), but
    every analysis step needs at least two values and checks for it.
    """

    values: np.ndarray
    label: str = ""
    dates: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or len(values) < 1:
            raise EmptySeries(f"{self.label}: a TimeSeries needs values")
        if not np.all(np.isfinite(values)):
            raise InvalidInput(f"{self.label}: non-finite values in series")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.dates is not None:
            dates = tuple(self.dates)
            if len(dates) != len(values):
                raise InvalidInput("dates and values differ in length")
            object.__setattr__(self, "dates", dates)

    def __len__(self):
        return len(self.values)

    @property
    def start_date(self):
        return self.dates[0] if self.dates else None

    def with_values(self, values):
        return TimeSeries(values, label=self.label, dates=self.dates)

    def slice(self, start, stop):
        dates = self.dates[start:stop] if self.dates is not None else None
        return TimeSeries(self.values[start:stop], label=self.label,
                          dates=dates)


def calendar_days(start: dt.date, end: dt.date) -> list:
    """Every calendar day from ``start`` to ``end`` inclusive."""
    n = (end - start).days + 1
    return [start + dt.timedelta(days=k) for k in range(max(n, 0))]


def business_days(start: dt.date, end: dt.date) -> list:
    """Monday-to-Friday days from ``start`` to ``end`` inclusive."""
    return [d for d in calendar_days(start, end) if d.weekday() < 5]


def forward_fill(raw: RawSeries, calendar: Iterable[dt.date]) -> TimeSeries:
    """Place ``raw`` on ``calendar``, carrying the last close over gaps.

    The output runs from the first calendar day up to the last raw date.
    Raw dates that are not calendar days still update the carried value.

    Raises
    ------
    EmptySeries
        ``raw`` has no entries.
    LeadingGap
        The first calendar day has no raw close (nothing to carry forward).
    """
    if len(raw) == 0:
        raise EmptySeries(f"{raw.label}: empty price series")
    last = raw.dates[-1]
    days = sorted(d for d in set(calendar) if d <= last)
    if not days:
        raise InvalidInput(f"{raw.label}: calendar does not cover the data")
    if days[0] < raw.dates[0] or days[0] not in set(raw.dates):
        raise LeadingGap(
            f"{raw.label}: no close on first calendar day {days[0]}")

    out = np.empty(len(days))
    k = 0
    current = None
    for i, day in enumerate(days):
        while k < len(raw) and raw.dates[k] <= day:
            current = raw.prices[k]
            k += 1
        out[i] = current
    return TimeSeries(out, label=raw.label, dates=tuple(days))


def detrend(ts: TimeSeries, degree: int = 3) -> TimeSeries:
    """Subtract the least-squares polynomial trend of ``degree``.

    The fit is done over index positions rescaled to [0, 1], which keeps the
    normal equations well conditioned for series of several thousand points.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    n = len(ts)
    if n <= degree + 1:
        raise InsufficientData(
            f"{ts.label}: detrending with degree {degree} needs more than "
            f"{degree + 1} points, got {n}")
    t = np.linspace(0.0, 1.0, n)
    fit = Polynomial.fit(t, ts.values, degree, domain=[0.0, 1.0])
    return ts.with_values(ts.values - fit(t))


def uniform_deviate(ts) -> TimeSeries:
    """Replace each value by rank/(N+1), ranks 1-based with stable ties.

    Accepts a TimeSeries or any 1-D sequence of numbers; the return type
    follows the input.
    """
    values = ts.values if isinstance(ts, TimeSeries) else np.asarray(ts, float)
    n = len(values)
    if n < 2:
        raise InsufficientData("uniform deviate needs at least 2 values")
    order = np.argsort(values, kind="stable")
    ranks = np.empty(n, dtype=float)
    ranks[order] = np.arange(1, n + 1)
    out = ranks / (n + 1)
    if isinstance(ts, TimeSeries):
        return ts.with_values(out)
    return out


def read_price_csv(path, label: Optional[str] = None) -> RawSeries:
    """Read a ``date,close`` CSV with a header row.

    Rows with unparseable dates, non-numeric or non-positive prices, or
    out-of-order dates raise :class:`CSVFormatError` naming the line.
    """
    path = Path(path)
    label = label if label is not None else path.stem
    dates, prices = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptySeries(f"{label}: {path} is empty")
        if [h.strip().lower() for h in header[:2]] != ["date", "close"]:
            raise CSVFormatError(path, 1, "expected header 'date,close'")
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise CSVFormatError(path, line, "expected two columns")
            try:
                day = dt.date.fromisoformat(row[0].strip())
            except ValueError:
                raise CSVFormatError(path, line,
                                     f"unparseable date {row[0]!r}") from None
            try:
                price = float(row[1])
            except ValueError:
                raise CSVFormatError(path, line,
                                     f"unparseable price {row[1]!r}") from None
            if not np.isfinite(price) or price <= 0:
                raise CSVFormatError(path, line,
                                     f"price must be positive, got {price}")
            if dates and day <= dates[-1]:
                raise CSVFormatError(path, line,
                                     f"date {day} not after {dates[-1]}")
            dates.append(day)
            prices.append(price)
    if not dates:
        raise EmptySeries(f"{label}: no data rows in {path}")
    return RawSeries(tuple(dates), np.array(prices), label=label)


def write_price_csv(path, dates: Sequence[dt.date], prices) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("date,close\n")
        for d, p in zip(dates, prices):
            fh.write(f"{d.isoformat()},{float(p)!r}\n")
