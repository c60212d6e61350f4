"""Inferred mode persistence from signature maps.

``h^(k)`` is the smallest grid bandwidth at which the signature drops below
``2k``: the inferred birth bandwidth of mode ``k`` and, for ``k >= 2``, the
bandwidth at which ``k - 1`` modes split into ``k``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InputError

DETECTED = "detected"
NEVER_DETECTED = "never-detected"
SATURATED = "saturated"


@dataclass(frozen=True)
class PersistenceRecord:
    """Inferred bandwidths ``h^(1) >= h^(2) >= ...`` with censoring flags.

    ``next_bandwidth``/``next_flag`` hold ``h^(kmax+1)``, the split partner
    of the last mode in a persistence diagram.
    """

    h0: float
    hmax: float
    bandwidths: tuple
    flags: tuple
    next_bandwidth: float
    next_flag: str
    label: str = ""

    @property
    def kmax(self):
        return len(self.bandwidths)

    def log_bandwidths(self):
        return np.log(np.asarray(self.bandwidths, dtype=float))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["h0"]), float(d["hmax"]), tuple(float(x) for x in d["bandwidths"]),
                   tuple(d["flags"]), float(d["next_bandwidth"]), d["next_flag"], d.get("label", ""))


def _scan(signature, hs, k):
    hits = np.flatnonzero(signature < 2 * k)
    if hits.size == 0:
        return float(hs[-1]), SATURATED
    i = int(hits[0])
    return float(hs[i]), NEVER_DETECTED if i == 0 else DETECTED


def persistence_from_signature(signature, bandwidths, kmax: int, label: str = "") -> PersistenceRecord:
    """Persistence record from per-row signatures ``w_h`` along ``bandwidths``."""
    if kmax < 1:
        raise InputError(f"kmax must be >= 1, got {kmax}")
    w = np.asarray(signature)
    hs = np.asarray(bandwidths, dtype=float)
    if w.shape != hs.shape or hs.size == 0:
        raise InputError("signature and bandwidths must be nonempty and of equal length")
    entries = [_scan(w, hs, k) for k in range(1, kmax + 2)]
    hk, flags = zip(*entries)
    return PersistenceRecord(float(hs[0]), float(hs[-1]), tuple(hk[:-1]), tuple(flags[:-1]),
                             hk[-1], flags[-1], label)


def persistence_bandwidths(sig_map, kmax: int, label: str = "") -> PersistenceRecord:
    """Scan the map's signature upward from ``h0`` for each ``k <= kmax``."""
    return persistence_from_signature(sig_map.signature, sig_map.bws.values, kmax, label)


@dataclass(frozen=True)
class DiagramPoint:
    mode: int
    x: float
    y: float
    axes: tuple  # ("birth", "split") or ("split", "birth")
    flag: str
    label: str

    @property
    def on_diagonal(self):
        return self.x == self.y


@dataclass(frozen=True)
class PersistenceDiagram:
    points: tuple
    kmax: int

    # odd modes are read vertically, even modes horizontally
    convention = ("mode k is plotted at (log h^(k), log h^(k+1)) = (birth, split) for odd k "
                  "and at (log h^(k+1), log h^(k)) = (split, birth) for even k; "
                  "modes never detected at h0 fall on the diagonal")

    def for_mode(self, k):
        return [p for p in self.points if p.mode == k]

    def to_dict(self):
        return {"kmax": self.kmax, "convention": self.convention,
                "points": [asdict(p) for p in self.points]}


def build_diagram(records, kmax: int | None = None) -> PersistenceDiagram:
    """Persistence diagram in log-bandwidth coordinates, axes alternating by parity."""
    records = list(records)
    if not records:
        raise InputError("build_diagram needs at least one record")
    h0s = {r.h0 for r in records}
    if len(h0s) > 1:
        raise InputError(f"records disagree on h0: {sorted(h0s)}")
    kmax = kmax or min(r.kmax for r in records)
    if any(r.kmax < kmax for r in records):
        raise InputError(f"some record has fewer than kmax={kmax} modes")
    points = []
    for r in records:
        hs = list(r.bandwidths[:kmax])
        partner = r.bandwidths[kmax] if r.kmax > kmax else r.next_bandwidth
        hs.append(partner)
        for k in range(1, kmax + 1):
            birth, split = math.log(hs[k - 1]), math.log(hs[k])
            if k % 2:
                x, y, axes = birth, split, ("birth", "split")
            else:
                x, y, axes = split, birth, ("split", "birth")
            points.append(DiagramPoint(k, x, y, axes, r.flags[k - 1], r.label))
    return PersistenceDiagram(tuple(points), kmax)


def bandwidth_to_degrees(h):
    """Angular scale ``sqrt(h)`` expressed in degrees."""
    return np.degrees(np.sqrt(np.asarray(h, dtype=float)))


def summarize(groups, kmax: int | None = None, exclude_censored: bool = False,
              units: str = "log-radians"):
    """Per-condition, per-mode quartiles and means of ``log h^(k)``.

    ``groups`` maps a condition name to its list of records.  With
    ``units="degrees"`` the statistics are taken of ``sqrt(h)`` in degrees.
    """
    if units not in ("log-radians", "degrees"):
        raise InputError(f"unknown units {units!r}")
    rows = []
    for condition, records in groups.items():
        records = list(records)
        if not records:
            raise InputError(f"condition {condition!r} has no records")
        kk = kmax or min(r.kmax for r in records)
        for k in range(1, kk + 1):
            hs = np.array([r.bandwidths[k - 1] for r in records])
            flags = [r.flags[k - 1] for r in records]
            censored = np.array([f != DETECTED for f in flags])
            if exclude_censored:
                hs = hs[~censored]
            vals = np.log(hs) if units == "log-radians" else bandwidth_to_degrees(hs)
            row = {"condition": condition, "mode": k, "count": int(vals.size),
                   "censored": int(censored.sum())}
            if vals.size:
                q1, med, q3 = np.percentile(vals, [25, 50, 75])
                row.update(min=float(vals.min()), q1=float(q1), median=float(med),
                           q3=float(q3), max=float(vals.max()), mean=float(vals.mean()))
            else:
                row.update(min=None, q1=None, median=None, q3=None, max=None, mean=None)
            rows.append(row)
    return rows


def records_to_csv(records) -> str:
    records = list(records)
    kmax = max((r.kmax for r in records), default=0)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["label", "h0", "hmax"]
    for k in range(1, kmax + 1):
        header += [f"h{k}", f"flag{k}"]
    writer.writerow(header)
    for r in records:
        row = [r.label, f"{r.h0:.10g}", f"{r.hmax:.10g}"]
        for h, f in zip(r.bandwidths, r.flags):
            row += [f"{h:.10g}", f]
        writer.writerow(row)
    return buf.getvalue()


def rows_to_csv(rows) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("NA" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def records_to_json(records) -> str:
    return json.dumps([r.to_dict() for r in records], indent=2, sort_keys=True)
