# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled window-accumulation kernel. Contract in flowsentry._kernels."""

from libc.stdint cimport int64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector


cdef dict _to_dict(unordered_map[int64_t, int64_t]& acc):
    cdef dict out = {}
    for item in acc:
        out[item.first] = item.second
    return out


def accumulate_windows(const int64_t[::1] ts_us, const int64_t[::1] flow_ids,
                       const int64_t[::1] nbytes, int64_t t0, int64_t delta,
                       Py_ssize_t n_windows):
    cdef Py_ssize_t n = ts_us.shape[0]
    cdef vector[int64_t] volumes = vector[int64_t](n_windows)
    cdef unordered_map[int64_t, int64_t] acc
    cdef list maps = [None] * n_windows
    cdef Py_ssize_t i
    cdef int64_t w
    cdef int64_t cur = -1
    for i in range(n):
        w = (ts_us[i] - t0) // delta
        if w != cur:
            # input is sorted, so a window is finished once the index moves on
            if cur >= 0 and acc.size() > 0:
                maps[cur] = _to_dict(acc)
                acc.clear()
            cur = w
        acc[flow_ids[i]] += nbytes[i]
        volumes[w] += nbytes[i]
    if cur >= 0 and acc.size() > 0:
        maps[cur] = _to_dict(acc)
    return [volumes[i] for i in range(n_windows)], maps
