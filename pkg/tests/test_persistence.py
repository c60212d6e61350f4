import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wizer.circle import AngleGrid
from wizer.errors import InputError
from wizer.inference import SignatureMap
from wizer.persistence import (DETECTED, NEVER_DETECTED, SATURATED, PersistenceRecord,
                               bandwidth_to_degrees, build_diagram, persistence_bandwidths,
                               persistence_from_signature, records_to_csv, records_to_json,
                               rows_to_csv, summarize)
from wizer.scalespace import BandwidthGrid

BWS = BandwidthGrid(0.01, 2.0, 30)


def record(hs, flags=None, h0=0.01, hmax=2.0, label="", nxt=None):
    flags = flags or tuple(NEVER_DETECTED if h == h0 else DETECTED for h in hs)
    nxt = h0 if nxt is None else nxt
    return PersistenceRecord(h0, hmax, tuple(hs), tuple(flags), nxt,
                             NEVER_DETECTED if nxt == h0 else DETECTED, label)


def map_from_signature(w, grid=AngleGrid(32)):
    """Signature map whose rows realise the requested (even) signatures."""
    signs = np.zeros((len(w), grid.size), dtype=np.int8)
    for i, wi in enumerate(w):
        pattern = np.tile([1, -1], wi // 2)
        signs[i, :pattern.size] = pattern
    bws = BandwidthGrid(0.01, 2.0, len(w))
    return SignatureMap(grid, bws, 1, signs, np.zeros_like(signs, dtype=bool), 1.0)


class TestScan:
    def test_empty_signature(self):
        rec = persistence_from_signature(np.zeros(30, int), BWS.values, 4)
        assert rec.bandwidths == (0.01,) * 4
        assert rec.flags == (NEVER_DETECTED,) * 4

    def test_single_mode_until_half(self):
        hs = BWS.values
        w = np.where(hs < 0.5, 2, 0)
        rec = persistence_from_signature(w, hs, 2)
        assert rec.bandwidths[0] == hs[hs >= 0.5][0]
        assert rec.flags == (DETECTED, NEVER_DETECTED)
        assert rec.bandwidths[1] == 0.01

    def test_saturated(self):
        rec = persistence_from_signature(np.full(30, 4), BWS.values, 3)
        assert rec.flags == (SATURATED, SATURATED, NEVER_DETECTED)
        assert rec.bandwidths[:2] == (2.0, 2.0)

    def test_non_monotone_signature_uses_first_drop(self):
        hs = np.array([0.1, 0.2, 0.3, 0.4])
        rec = persistence_from_signature(np.array([2, 0, 2, 0]), hs, 1)
        assert rec.bandwidths == (0.2,)

    def test_from_map(self):
        sig = map_from_signature([6, 4, 4, 2, 0])
        rec = persistence_bandwidths(sig, 3, label="x")
        hs = sig.bws.values
        assert rec.bandwidths == (hs[4], hs[3], hs[1])
        assert rec.next_bandwidth == hs[0] and rec.next_flag == NEVER_DETECTED
        assert rec.label == "x"

    def test_invalid(self):
        with pytest.raises(InputError):
            persistence_from_signature([0, 0], [0.1, 0.2], 0)
        with pytest.raises(InputError):
            persistence_from_signature([0, 0], [0.1], 1)

    @settings(max_examples=300, deadline=None)
    @given(st.lists(st.integers(0, 6), min_size=1, max_size=40), st.integers(1, 6))
    def test_non_increasing_in_k(self, half, kmax):
        w = 2 * np.array(half)
        hs = np.geomspace(0.01, 2.0, len(w)) if len(w) > 1 else np.array([0.01])
        rec = persistence_from_signature(w, hs, kmax)
        seq = rec.bandwidths + (rec.next_bandwidth,)
        assert all(a >= b for a, b in zip(seq, seq[1:]))
        assert all(hs[0] <= h <= hs[-1] for h in seq)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 5), min_size=2, max_size=30))
    def test_round_trip(self, half):
        hs = np.geomspace(0.01, 2.0, len(half))
        rec = persistence_from_signature(2 * np.array(half), hs, 6)
        # step function w(h) = 2 * #{k : h < h^(k)}, saturated modes never drop
        rebuilt = np.array([2 * sum((h < hk) or (f == SATURATED)
                                    for hk, f in zip(rec.bandwidths, rec.flags)) for h in hs])
        again = persistence_from_signature(rebuilt, hs, 6)
        assert again == rec


class TestDiagram:
    def test_all_never_detected(self):
        d = build_diagram([record([0.01] * 4)], 4)
        assert all(p.on_diagonal and p.x == math.log(0.01) for p in d.points)

    def test_parity_convention(self):
        d = build_diagram([record([1.0, 0.1, 0.1], h0=0.1, nxt=0.1)], 3)
        m1, m2, m3 = (d.for_mode(k)[0] for k in (1, 2, 3))
        assert (m1.x, m1.y) == (0.0, math.log(0.1))
        assert m1.axes == ("birth", "split") and m2.axes == ("split", "birth")
        assert m2.on_diagonal and m3.on_diagonal

    def test_even_mode_swaps_axes(self):
        d = build_diagram([record([1.0, 0.5, 0.2, 0.1], h0=0.01, nxt=0.05)], 4)
        m2 = d.for_mode(2)[0]
        assert (m2.x, m2.y) == (math.log(0.2), math.log(0.5))
        m4 = d.for_mode(4)[0]
        assert (m4.x, m4.y) == (math.log(0.05), math.log(0.1))

    def test_vertical_order_follows_h1(self):
        recs = [record([h1, 0.05]) for h1 in (0.3, 1.0, 0.1)]
        ys = [p.x for p in build_diagram(recs, 1).for_mode(1)]
        assert np.argsort(ys).tolist() == np.argsort([0.3, 1.0, 0.1]).tolist()

    def test_mismatched_h0(self):
        with pytest.raises(InputError):
            build_diagram([record([0.5]), record([0.5], h0=0.02)])
        with pytest.raises(InputError):
            build_diagram([])

    def test_to_dict(self):
        d = build_diagram([record([0.5, 0.01])], 2)
        payload = json.loads(json.dumps(d.to_dict()))
        assert payload["kmax"] == 2 and "diagonal" in payload["convention"]


class TestSummaries:
    def test_single_record(self):
        rows = summarize({"a": [record([0.5, 0.1])]})
        for row in rows:
            assert row["min"] == row["q1"] == row["median"] == row["q3"] == row["max"]

    def test_median_and_mean(self):
        recs = [record([math.exp(v)], h0=math.exp(-2)) for v in (-1.0, 0.0, 1.0)]
        (row,) = summarize({"c": recs})
        assert row["median"] == pytest.approx(0.0, abs=1e-15)
        assert row["mean"] == pytest.approx(0.0, abs=1e-15)

    def test_shift_preserves_mean_order(self):
        rng = np.random.default_rng(1)
        base = rng.uniform(-3, 0, 20)
        groups = {"low": [record([math.exp(v)], h0=0.001) for v in base],
                  "high": [record([math.exp(v + 0.5)], h0=0.001) for v in base]}
        rows = {r["condition"]: r for r in summarize(groups)}
        assert rows["high"]["mean"] > rows["low"]["mean"]

    def test_censoring(self):
        recs = [record([0.01]), record([0.5])]
        (row,) = summarize({"c": recs}, exclude_censored=True)
        assert row["count"] == 1 and row["censored"] == 1
        (empty,) = summarize({"c": [record([0.01])]}, exclude_censored=True)
        assert empty["median"] is None
        assert "NA" in rows_to_csv([empty])

    def test_degrees(self):
        (row,) = summarize({"c": [record([math.radians(6) ** 2])]}, units="degrees")
        assert row["median"] == pytest.approx(6.0)
        assert bandwidth_to_degrees(math.radians(3) ** 2) == pytest.approx(3.0)
        with pytest.raises(InputError):
            summarize({"c": [record([0.5])]}, units="furlongs")

    def test_serialisation_round_trip(self):
        recs = [record([0.5, 0.01], label="x"), record([1.0, 0.2], label="y", nxt=0.05)]
        back = [PersistenceRecord.from_dict(d) for d in json.loads(records_to_json(recs))]
        assert back == recs
        lines = records_to_csv(recs).splitlines()
        assert lines[0] == "label,h0,hmax,h1,flag1,h2,flag2"
        assert lines[1].startswith("x,0.01,2,0.5,detected")
