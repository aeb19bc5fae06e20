# Copyright 2026 The PriceScope Authors
# SPDX-License-Identifier: Apache-2.0
"""Price-manipulation detection for transaction traces."""

import json
from fractions import Fraction

from . import _core
from ._core import Error, list_fixtures

__all__ = ["Error", "scan_fixture", "scan_trace", "cpmm_swap", "stableswap_d", "synth_lines", "list_fixtures"]


def scan_fixture(path, backend="analytic", sources=None, timeout=300, endpoint=None):
    """Scan a frozen fixture and return the report as a dict."""
    return json.loads(_core.scan_fixture(str(path), backend, None if sources is None else str(sources), timeout, endpoint))


def scan_trace(trace, backend="analytic", sources=None, timeout=300, endpoint=None):
    """Scan a trace given as a dict in fixture format."""
    text = trace if isinstance(trace, str) else json.dumps(trace)
    return json.loads(_core.scan_trace_json(text, backend, None if sources is None else str(sources), timeout, endpoint))


def cpmm_swap(reserve_x, reserve_y, amount_in, x_in=True, fee_bps=30):
    """Returns (amount_out, new_reserve_x, new_reserve_y)."""
    out = _core.cpmm_swap(str(reserve_x), str(reserve_y), fee_bps, x_in, str(amount_in))
    return tuple(int(v) for v in out)


def stableswap_d(reserves, amp, amp_precision=1):
    num, den = _core.stableswap_d([str(r) for r in reserves], str(amp), str(amp_precision))
    return Fraction(int(num), int(den))


def synth_lines(count, seed=0, lo=10**18, hi=1000 * 10**18):
    return list(_core.synth_lines(count, seed, str(lo), str(hi)))
