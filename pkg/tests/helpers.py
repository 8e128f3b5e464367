"""Brute-force oracles used across the test suite.

Everything here works by exhaustive enumeration of small groups, so it is
independent of the linear-algebra paths it cross-checks.
"""

import itertools

import numpy as np

from ghostdim import linalg
from ghostdim.modules import ModuleMap


def all_group_maps(src_orders, tgt_orders):
    """Every well-defined group matrix tgt x src, one representative each."""
    ns, nt = len(src_orders), len(tgt_orders)
    if ns == 0 or nt == 0:
        yield np.zeros((nt, ns), dtype=np.int64)
        return
    choices = []
    for j in range(ns):
        for i in range(nt):
            d, e = src_orders[j], tgt_orders[i]
            # x * d = 0 mod e  <=>  x multiple of e // gcd(e, d)
            step = e // np.gcd(e, d)
            choices.append(list(range(0, e, step)))
    for combo in itertools.product(*choices):
        mat = np.zeros((nt, ns), dtype=np.int64)
        idx = 0
        for j in range(ns):
            for i in range(nt):
                mat[i, j] = combo[idx]
                idx += 1
        yield mat


def is_equivariant(mat, src, tgt):
    ords = np.asarray(tgt.orders, dtype=np.int64)[:, None] if tgt.ngens else None
    for t in range(src.ring.rank):
        delta = mat @ src.actions[t] - tgt.actions[t] @ mat
        if tgt.ngens and (delta % ords).any():
            return False
    return True


def brute_hom_maps(src, tgt):
    """All module maps src -> tgt by exhaustive search (small modules only)."""
    out = []
    for mat in all_group_maps(src.orders, tgt.orders):
        if is_equivariant(mat, src, tgt):
            out.append(mat)
    return out


def span_of_maps(maps, tgt_orders, m):
    """Order of the group of maps generated by the given matrices."""
    if not maps:
        return 1
    cols = np.stack([mm.reshape(-1) for mm in maps], axis=1)
    orders = list(tgt_orders) * (cols.shape[0] // max(len(tgt_orders), 1)) if tgt_orders else []
    # vectorize column-major consistent with entry (i, j) -> j * nt + i
    return linalg.subgroup_order(
        _embed_cols(cols, orders, m), [m] * cols.shape[0], m
    )


def _embed_cols(cols, orders, m):
    if not orders:
        return cols
    scale = np.array([m // d for d in orders], dtype=np.int64)
    return (cols * scale[:, None]) % m


def hom_group_order(src, tgt):
    """|Hom(src, tgt)| by brute enumeration."""
    return len(brute_hom_maps(src, tgt))


def brute_homology_orders(cx, k):
    """Order of H_k by enumerating cycles and boundaries of small complexes."""
    term = cx.term(k)
    if term.is_zero:
        return 1
    d_out = cx.diff(k)
    d_in = cx.diff(k + 1)
    tgt = cx.term(k - 1)
    src = cx.term(k + 1)
    cycles = set()
    for v in linalg.enumerate_group(term.orders, cap=2 ** 14):
        w = linalg.reduce_coords(d_out @ v, tgt.orders) if tgt.ngens else np.zeros(0, dtype=np.int64)
        if not w.any():
            cycles.add(tuple(int(x) for x in v))
    boundaries = set()
    for u in linalg.enumerate_group(src.orders, cap=2 ** 14):
        w = linalg.reduce_coords(d_in @ u, term.orders)
        boundaries.add(tuple(int(x) for x in w))
    return len(cycles) // len(boundaries)


def brute_null_homotopy_exists(f):
    """Exhaustively search for h with f = dh + hd; for tiny complexes only."""
    x, y = f.src, f.tgt
    degs = [k for k in range(x.lo, x.hi + 1) if not x.term(k).is_zero and not y.term(k + 1).is_zero]
    spaces = []
    for k in degs:
        mats = brute_hom_maps(x.term(k), y.term(k + 1))
        spaces.append(mats)
    total = 1
    for s in spaces:
        total *= len(s)
        if total > 2 ** 12:
            raise ValueError("too many candidate homotopies for brute search")
    for combo in itertools.product(*spaces):
        h = {k: mat for k, mat in zip(degs, combo)}
        ok = True
        for k in range(x.lo, x.hi + 1):
            tgt_term = y.term(k)
            if tgt_term.is_zero:
                continue
            acc = np.zeros((tgt_term.ngens, x.term(k).ngens), dtype=np.int64)
            if k in h:
                acc = acc + y.diff(k + 1) @ h[k]
            if k - 1 in h:
                acc = acc + h[k - 1] @ x.diff(k)
            delta = linalg.reduce_coords(acc - f.component(k), tgt_term.orders)
            if delta.any():
                ok = False
                break
        if ok:
            return True
    return False
