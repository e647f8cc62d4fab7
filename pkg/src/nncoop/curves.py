"""Coverage curves and their CSV form."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CSV_HEADER = ("t_db", "t_linear", "coverage", "ci_low", "ci_high",
              "method", "model", "scheme", "association")


@dataclass
class CoverageCurve:
    """Coverage on a threshold grid.

    Monte Carlo curves carry integer success counts and the trial count;
    analytic curves carry values and ``trials = 0`` (zero-width interval).
    """

    thresholds: np.ndarray
    values: np.ndarray
    trials: int = 0
    successes: np.ndarray | None = None
    method: str = "analytic"
    model: str = "superposition"
    scheme: str = "nsc"
    association: str = "fixed"
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, thresholds, successes, trials, **kw):
        successes = np.asarray(successes, dtype=np.int64)
        values = successes / trials
        return cls(np.asarray(thresholds, float), values, int(trials), successes,
                   method="mc", **kw)

    @property
    def estimate(self):
        return self.values

    @property
    def half_width(self):
        """95% normal-approximation binomial half-width ``1.96 sqrt(p(1-p)/n)``."""
        if self.trials <= 0:
            return np.zeros_like(self.values)
        p = self.values
        return 1.96 * np.sqrt(p * (1.0 - p) / self.trials)

    @property
    def ci_low(self):
        return np.clip(self.values - self.half_width, 0.0, 1.0)

    @property
    def ci_high(self):
        return np.clip(self.values + self.half_width, 0.0, 1.0)

    def wilson_interval(self, z=1.96):
        n = self.trials
        if n <= 0:
            return self.values, self.values
        p = self.values
        centre = (p + z * z / (2 * n)) / (1 + z * z / n)
        half = z / (1 + z * z / n) * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
        # exact endpoints where rounding would leave 1e-19 instead of 0
        lo = np.where(p <= 0, 0.0, np.clip(centre - half, 0.0, 1.0))
        hi = np.where(p >= 1, 1.0, np.clip(centre + half, 0.0, 1.0))
        return lo, hi

    def covers(self, reference):
        """Whether each reference value lies in the 95% interval.

        The normal interval is used wherever it is informative; at estimates
        of exactly 0 or 1 it collapses to a point, so the Wilson interval
        stands in there.
        """
        ref = np.asarray(reference, float)
        inside = (ref >= self.ci_low) & (ref <= self.ci_high)
        lo, hi = self.wilson_interval()
        degenerate = (self.values <= 0) | (self.values >= 1)
        return np.where(degenerate, (ref >= lo) & (ref <= hi), inside)

    @property
    def t_db(self):
        return 10.0 * np.log10(self.thresholds)

    def rows(self):
        for row in zip(self.t_db, self.thresholds, self.values, self.ci_low, self.ci_high):
            yield tuple(float(v) for v in row) + (self.method, self.model, self.scheme,
                                                  self.association)


def _fmt(v):
    return f"{v:.10g}" if isinstance(v, float) else str(v)


def curves_to_csv(curves) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in curves:
        for row in c.rows():
            w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_curves_csv(path, curves):
    Path(path).write_text(curves_to_csv(curves))


def read_curves_csv(path):
    """Rows of a curves CSV as dicts with numeric fields converted."""
    with open(Path(path), newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and tuple(rows[0].keys()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {tuple(rows[0].keys())}")
    for r in rows:
        for k in CSV_HEADER[:5]:
            r[k] = float(r[k])
    return rows
