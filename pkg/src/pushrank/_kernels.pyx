# cython: language_level=3, boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Lock-free push kernels (compiled backend).

Pending-mass increments use a compare-and-swap loop on the raw bit
pattern, draining uses an atomic exchange with zero, and per-worker
started/finished counters let the monitor take a consistent quiescence
snapshot: if both counter sums are equal before and after a full scan,
no push overlapped the scan, so the scanned values were stable.
"""

from libc.stdint cimport int64_t
from posix.unistd cimport usleep

cdef extern from *:
    """
    #include <stdint.h>

    static inline double pr_load_f64(const double *p) {
        uint64_t bits = __atomic_load_n((const uint64_t *)p, __ATOMIC_ACQUIRE);
        double out;
        __builtin_memcpy(&out, &bits, 8);
        return out;
    }

    static inline void pr_add_f64(double *p, double v) {
        uint64_t expected = __atomic_load_n((uint64_t *)p, __ATOMIC_RELAXED);
        for (;;) {
            double cur, nxt;
            uint64_t desired;
            __builtin_memcpy(&cur, &expected, 8);
            nxt = cur + v;
            __builtin_memcpy(&desired, &nxt, 8);
            if (__atomic_compare_exchange_n((uint64_t *)p, &expected, desired, 0,
                                            __ATOMIC_ACQ_REL, __ATOMIC_RELAXED))
                return;
        }
    }

    static inline double pr_exchange_f64(double *p, double v) {
        uint64_t bits, old;
        double out;
        __builtin_memcpy(&bits, &v, 8);
        old = __atomic_exchange_n((uint64_t *)p, bits, __ATOMIC_ACQ_REL);
        __builtin_memcpy(&out, &old, 8);
        return out;
    }

    static inline int64_t pr_load_i64(const int64_t *p) {
        return __atomic_load_n(p, __ATOMIC_ACQUIRE);
    }

    static inline void pr_add_i64(int64_t *p, int64_t v) {
        __atomic_add_fetch(p, v, __ATOMIC_ACQ_REL);
    }
    """
    double pr_load_f64(const double *p) nogil
    void pr_add_f64(double *p, double v) nogil
    double pr_exchange_f64(double *p, double v) nogil
    int64_t pr_load_i64(const int64_t *p) nogil
    void pr_add_i64(int64_t *p, int64_t v) nogil

NAME = "c"
NEEDS_LOCK = False


def worker_loop(double[::1] h, double[::1] reserved,
                int64_t[::1] offsets, int64_t[::1] targets,
                int64_t[::1] degree, int64_t[::1] vertices,
                double xi, double damping,
                int64_t[::1] ctrl, int64_t[::1] wstate, Py_ssize_t widx,
                int64_t[::1] dt_count, lock):
    """Circularly drain above-threshold vertices until the stop flag flips.

    Only this worker drains its vertices (exchange with zero); any worker
    may add to any pending cell.  Reserved mass is owner-written and needs
    no atomics.  ``lock`` is accepted for signature parity and ignored.
    """
    cdef Py_ssize_t base = widx * 8
    cdef Py_ssize_t i, e, v
    cdef int64_t lo, hi, done
    cdef double mass, share
    with nogil:
        while pr_load_i64(&ctrl[0]) == 0:
            done = 0
            for i in range(vertices.shape[0]):
                if pr_load_i64(&ctrl[0]) != 0:
                    break
                v = <Py_ssize_t>vertices[i]
                if pr_load_f64(&h[v]) <= xi:
                    continue
                pr_add_i64(&wstate[base], 1)            # started
                mass = pr_exchange_f64(&h[v], 0.0)
                reserved[v] += mass
                lo = offsets[v]
                hi = offsets[v + 1]
                if hi > lo:
                    share = damping * mass / <double>degree[v]
                    for e in range(lo, hi):
                        pr_add_f64(&h[<Py_ssize_t>targets[e]], share)
                pr_add_i64(&wstate[base + 2], hi - lo)  # edge pushes
                pr_add_i64(&wstate[base + 3], dt_count[v])
                pr_add_i64(&wstate[base + 4], 1)        # vertices processed
                pr_add_i64(&wstate[base + 1], 1)        # finished
                done += 1
            if done == 0:
                # nothing above threshold this pass: nap instead of hot
                # spinning so the monitor (and busier workers) get the CPU
                usleep(20)


def probe(double[::1] h, int64_t[::1] scan_ids, double xi,
          int64_t[::1] wstate, Py_ssize_t workers, lock):
    """Quiescence check: all scanned cells at/below threshold and no push
    started, in flight, or finished while we looked."""
    cdef int64_t s1 = 0, f1 = 0, s2 = 0, f2 = 0
    cdef Py_ssize_t j, i
    cdef bint below = True
    with nogil:
        for j in range(workers):
            s1 += pr_load_i64(&wstate[j * 8])
        for j in range(workers):
            f1 += pr_load_i64(&wstate[j * 8 + 1])
        if s1 != f1:
            below = False
        else:
            for i in range(scan_ids.shape[0]):
                if pr_load_f64(&h[<Py_ssize_t>scan_ids[i]]) > xi:
                    below = False
                    break
            if below:
                for j in range(workers):
                    s2 += pr_load_i64(&wstate[j * 8])
                for j in range(workers):
                    f2 += pr_load_i64(&wstate[j * 8 + 1])
                if s2 != s1 or f2 != f1:
                    below = False
    return below
