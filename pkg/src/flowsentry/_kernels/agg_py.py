"""Pure-Python window accumulation, the fallback for the compiled kernel."""


def accumulate_windows(ts_us, flow_ids, nbytes, t0, delta, n_windows):
    volumes = [0] * n_windows
    maps = [None] * n_windows
    cur = -1
    cur_map = None
    # tolist() up front: iterating python ints is much faster than numpy scalars
    for ts, fid, nb in zip(ts_us.tolist(), flow_ids.tolist(), nbytes.tolist()):
        w = (ts - t0) // delta
        if w != cur:
            cur = w
            cur_map = maps[w]
            if cur_map is None:
                cur_map = {}
                maps[w] = cur_map
        cur_map[fid] = cur_map.get(fid, 0) + nb
        volumes[w] += nb
    return volumes, maps
