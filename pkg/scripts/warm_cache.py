"""Precompute the heavy fixtures used by the test suite.

Run from the repository root:

    python3 scripts/warm_cache.py

Every product lands in .testcache/ keyed by its inputs, so the script is
idempotent and safe to interrupt; completed steps are skipped on rerun.
The threshold sweeps dominate (a few hours on one core).
"""

from __future__ import annotations

import sys
import time
import traceback
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import fixture_lib as fx  # noqa: E402
from kickedspin import ResonanceLabel  # noqa: E402


def step(name: str, fn) -> None:
    t0 = time.time()
    print(f"[{time.strftime('%H:%M:%S')}] {name} ...", flush=True)
    try:
        fn()
    except Exception:
        print(f"[{time.strftime('%H:%M:%S')}] {name} FAILED", flush=True)
        traceback.print_exc()
        return
    print(f"[{time.strftime('%H:%M:%S')}] {name} done ({time.time() - t0:.0f}s)", flush=True)


def main() -> None:
    grid = fx.ACCEPTANCE_GRID
    step("mismatch series 1:1 [100, 2000]", lambda: fx.mismatch_series(ResonanceLabel(1, 1), 100.0, 2000.0, 240))
    step("mismatch series 1:1 [250, 1000]", lambda: fx.mismatch_series(ResonanceLabel(1, 1), 250.0, 1000.0, 60))
    step("classical drift", fx.classical_drift)
    step("island sigmas", fx.island_chain_sigmas)
    step("NR collapse curves", fx.nr_collapse_curves)
    step("NR sweep", lambda: fx.sweep(fx.NR_PARAMS, grid))
    step("CR 1:1 sweep", lambda: fx.sweep(fx.CR11_PARAMS, grid))
    step("ER 1:1 sweep", lambda: fx.sweep(fx.ER11_PARAMS, grid))
    step("CR 2:3 sweep", lambda: fx.sweep(fx.CR23_PARAMS, grid))
    step("CR 3:4 sweep", lambda: fx.sweep(fx.CR34_PARAMS, grid))
    step("ER prediction curve J=1000", fx.er_prediction_curve)
    step("CR collapse curves", fx.cr_collapse_curves)
    step("s2 series 2:3", lambda: fx.s2_series(ResonanceLabel(2, 3), fx.S2_DENSE_GRID))
    step("s2 series 3:4", lambda: fx.s2_series(ResonanceLabel(3, 4), fx.S2_DENSE_GRID))
    step("kick element series 1:1", lambda: fx.kick_element_series(grid))
    print("all steps attempted", flush=True)


if __name__ == "__main__":
    main()
