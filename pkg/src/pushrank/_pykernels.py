"""Pure-Python push kernels: the fallback backend.

Correctness-first, speed-second: every mutation of the shared pending-mass
array happens under a single lock, which makes the monitor's quiescence
probe trivially sound (a probe holding the lock observes a frozen state,
and any worker that later grabs the lock re-checks the threshold before
acting).  The compiled backend in ``_kernels`` implements the same two
entry points lock-free.
"""

from __future__ import annotations

import time

NAME = "python"
NEEDS_LOCK = True


def worker_loop(h, reserved, offsets, targets, degree, vertices,
                xi, damping, ctrl, wstate, widx, dt_count, lock):
    """Circularly scan ``vertices`` until the stop flag in ``ctrl`` is set.

    A vertex holding more than ``xi`` pending mass is drained: the full
    amount moves to its reserved mass and ``damping/degree`` of it is
    pushed onto each target's pending mass.  Per-worker counters in
    ``wstate`` (stride 8): started, finished, edge pushes, pushes into
    dangling targets, vertices processed.
    """
    base = widx * 8
    while ctrl[0] == 0:
        done = 0
        for v in vertices:
            if ctrl[0] != 0:
                return
            if h[v] <= xi:  # unlocked peek; re-checked under the lock
                continue
            with lock:
                mass = h[v]
                if mass <= xi:
                    continue
                wstate[base] += 1
                h[v] = 0.0
                reserved[v] += mass
                lo, hi = offsets[v], offsets[v + 1]
                if hi > lo:
                    h[targets[lo:hi]] += damping * mass / degree[v]
                wstate[base + 2] += hi - lo
                wstate[base + 3] += dt_count[v]
                wstate[base + 4] += 1
                wstate[base + 1] += 1
                done += 1
        # nap after a fruitless pass so other threads get the interpreter
        time.sleep(0.0002 if done == 0 else 0)


def probe(h, scan_ids, xi, wstate, workers, lock):
    """Return True once no scanned vertex holds pending mass above ``xi``.

    Runs under the push lock, so the observation is of a consistent frozen
    state; once it holds, no worker can create new above-threshold mass.
    """
    with lock:
        if scan_ids.size == 0:
            return True
        return float(h[scan_ids].max()) <= xi
