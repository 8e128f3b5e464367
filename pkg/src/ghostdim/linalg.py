"""Exact linear algebra over Z/m.

Every solver in the package bottoms out here.  The two backends share one
arithmetic substrate: a finite abelian group of exponent dividing m is a
direct sum of Z/d_i with d_i | m, and a congruence  sum_j a_ij x_j = b_i
(mod e_i)  with e_i | m is equivalent, after scaling the row by m // e_i,
to the same congruence mod m.  So mixed-order systems become systems over
the single modulus m and are solved by one routine.

The workhorse is a Smith-style diagonalization mod m.  The elementary
gcd-combination matrices

    [[x, y], [-b//g, a//g]]     with  x*a + y*b == g == gcd(a, b)

have determinant 1, so they are invertible mod m; row swaps and
add-a-multiple steps likewise.  The result is D = S @ A @ T (mod m) with
D diagonal and S, T invertible mod m.  Solving, kernels, quotient
presentations and generating-set reduction all read off D.

Entries are kept reduced into [0, m); with m <= 2**8 every intermediate
product fits comfortably in int64.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

import numpy as np


def xgcd(a, b):
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b == g."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return g, x, y


def modinv(a, m):
    """Inverse of a mod m; a must be a unit."""
    return pow(int(a) % m, -1, m)


def as_matrix(a, rows=None, cols=None):
    """Coerce to a 2-d int64 array, materializing an explicit shape for empties."""
    arr = np.asarray(a, dtype=np.int64)
    if arr.ndim != 2:
        if arr.size == 0:
            arr = arr.reshape(rows if rows is not None else 0, cols if cols is not None else 0)
        else:
            raise ValueError(f"expected 2-d matrix, got shape {arr.shape}")
    return arr


def zeros(rows, cols):
    return np.zeros((rows, cols), dtype=np.int64)


def eye(n):
    return np.eye(n, dtype=np.int64)


@dataclass
class SmithDecomposition:
    """D = S @ A @ T mod m, D diagonal; s_inv is the mod-m inverse of S."""

    m: int
    diag: np.ndarray        # length min(rows, cols)
    s: np.ndarray
    s_inv: np.ndarray
    t: np.ndarray
    shape: tuple


def _is_prime(m):
    if m < 2:
        return False
    return all(m % q for q in range(2, int(m ** 0.5) + 1))


_PRIME_CACHE = {}


def _smith_prime(a, m, track_sinv):
    """Gauss-Jordan diagonalization over the field Z/m, m prime.

    One vectorized clearing pass per pivot, then a single column sweep,
    which is substantially faster than the generic gcd walk.
    """
    d = as_matrix(a).copy() % m
    r, c = d.shape
    s = eye(r)
    s_inv = eye(r) if track_sinv else None
    t = eye(c)
    pivot_cols = []
    row = 0
    for col in range(c):
        if row == r:
            break
        nz = np.nonzero(d[row:, col])[0]
        if nz.size == 0:
            continue
        i = row + int(nz[0])
        if i != row:
            d[[row, i]] = d[[i, row]]
            s[[row, i]] = s[[i, row]]
            if track_sinv:
                s_inv[:, [row, i]] = s_inv[:, [i, row]]
        pv = int(d[row, col])
        if pv != 1:
            inv = modinv(pv, m)
            d[row] = (d[row] * inv) % m
            s[row] = (s[row] * inv) % m
            if track_sinv:
                s_inv[:, row] = (s_inv[:, row] * pv) % m
        colvals = d[:, col].copy()
        colvals[row] = 0
        hits = np.nonzero(colvals)[0]
        if hits.size:
            q = colvals[hits]
            d[hits] = (d[hits] - np.outer(q, d[row])) % m
            s[hits] = (s[hits] - np.outer(q, s[row])) % m
            if track_sinv:
                s_inv[:, row] = (s_inv[:, row] + s_inv[:, hits] @ q) % m
        pivot_cols.append(col)
        row += 1
    npiv = len(pivot_cols)
    non_pivot = [j for j in range(c) if j not in set(pivot_cols)]
    perm = pivot_cols + non_pivot
    d = d[:, perm]
    t = t[:, perm]
    if npiv and c > npiv:
        b = d[:npiv, npiv:]
        if b.any():
            t[:, npiv:] = (t[:, npiv:] - t[:, :npiv] @ b) % m
            d[:npiv, npiv:] = 0
    diag = np.array([d[i, i] for i in range(min(r, c))], dtype=np.int64)
    return SmithDecomposition(m=m, diag=diag, s=s, s_inv=s_inv, t=t, shape=(r, c))


def smith_mod(a, m, track_sinv=True):
    """Diagonalize a mod m by unimodular row and column operations.

    Returns a SmithDecomposition.  No divisibility chain is enforced on the
    diagonal; none of the callers needs it.  Pass track_sinv=False to skip
    maintaining S^-1 (solving and kernels never read it).
    """
    if m not in _PRIME_CACHE:
        _PRIME_CACHE[m] = _is_prime(m)
    if _PRIME_CACHE[m]:
        return _smith_prime(a, m, track_sinv)
    d = as_matrix(a).copy() % m
    r, c = d.shape
    s = eye(r)
    s_inv = eye(r) if track_sinv else None
    t = eye(c)

    def row_step(k, i):
        # Zero d[i, k] using row k, keeping S and S^-1 in sync.
        av = int(d[k, k])
        bv = int(d[i, k])
        if bv == 0:
            return
        if av != 0 and bv % av == 0:
            q = bv // av
            d[i] = (d[i] - q * d[k]) % m
            s[i] = (s[i] - q * s[k]) % m
            if track_sinv:
                s_inv[:, k] = (s_inv[:, k] + q * s_inv[:, i]) % m
            return
        g, x, y = xgcd(av, bv)
        ag, bg = av // g, bv // g
        rk = (x * d[k] + y * d[i]) % m
        ri = (-bg * d[k] + ag * d[i]) % m
        d[k], d[i] = rk, ri
        sk = (x * s[k] + y * s[i]) % m
        si = (-bg * s[k] + ag * s[i]) % m
        s[k], s[i] = sk, si
        if track_sinv:
            ck = (ag * s_inv[:, k] + bg * s_inv[:, i]) % m
            ci = (-y * s_inv[:, k] + x * s_inv[:, i]) % m
            s_inv[:, k], s_inv[:, i] = ck, ci

    def col_step(k, j):
        av = int(d[k, k])
        bv = int(d[k, j])
        if bv == 0:
            return
        if av != 0 and bv % av == 0:
            q = bv // av
            d[:, j] = (d[:, j] - q * d[:, k]) % m
            t[:, j] = (t[:, j] - q * t[:, k]) % m
            return
        g, x, y = xgcd(av, bv)
        ag, bg = av // g, bv // g
        ck = (x * d[:, k] + y * d[:, j]) % m
        cj = (-bg * d[:, k] + ag * d[:, j]) % m
        d[:, k], d[:, j] = ck, cj
        tk = (x * t[:, k] + y * t[:, j]) % m
        tj = (-bg * t[:, k] + ag * t[:, j]) % m
        t[:, k], t[:, j] = tk, tj

    for k in range(min(r, c)):
        sub = d[k:, k:]
        nz = np.nonzero(sub)
        if nz[0].size == 0:
            break
        # Prefer a unit pivot: with one, a single vectorized sweep clears
        # everything, which is the common (field) case.
        vals = sub[nz]
        unit_mask = np.gcd(vals, m) == 1
        if unit_mask.any():
            pos = int(np.argmax(unit_mask))
        else:
            pos = int(np.argmin(vals))
        i0, j0 = int(nz[0][pos]) + k, int(nz[1][pos]) + k
        if i0 != k:
            d[[k, i0]] = d[[i0, k]]
            s[[k, i0]] = s[[i0, k]]
            if track_sinv:
                s_inv[:, [k, i0]] = s_inv[:, [i0, k]]
        if j0 != k:
            d[:, [k, j0]] = d[:, [j0, k]]
            t[:, [k, j0]] = t[:, [j0, k]]

        if gcd(int(d[k, k]), m) == 1:
            inv = modinv(d[k, k], m)
            col = d[k + 1:, k]
            if col.any():
                q = (col * inv) % m
                d[k + 1:] = (d[k + 1:] - np.outer(q, d[k])) % m
                s[k + 1:] = (s[k + 1:] - np.outer(q, s[k])) % m
                if track_sinv:
                    s_inv[:, k] = (s_inv[:, k] + s_inv[:, k + 1:] @ q) % m
            row = d[k, k + 1:]
            if row.any():
                q = (row * inv) % m
                d[:, k + 1:] = (d[:, k + 1:] - np.outer(d[:, k], q)) % m
                t[:, k + 1:] = (t[:, k + 1:] - np.outer(t[:, k], q)) % m
            continue

        while True:
            for i in range(k + 1, r):
                row_step(k, i)
            if not d[k, k + 1:].any():
                break
            for j in range(k + 1, c):
                col_step(k, j)
            if not d[k + 1:, k].any():
                break

    diag = np.array([d[i, i] for i in range(min(r, c))], dtype=np.int64)
    return SmithDecomposition(m=m, diag=diag, s=s, s_inv=s_inv, t=t, shape=(r, c))


class SmithSolver:
    """Cache one decomposition of A and answer many solve/kernel queries."""

    def __init__(self, a, m):
        self.m = m
        self.a = as_matrix(a) % m
        self.dec = smith_mod(self.a, m, track_sinv=False)

    def solve(self, b):
        """One solution x of A x = b (mod m), or None if none exists."""
        x = self.solve_matrix(np.asarray(b, dtype=np.int64).reshape(-1, 1))
        return None if x is None else x[:, 0]

    def solve_matrix(self, b):
        """Columnwise solve; returns None if any column is unsolvable."""
        m = self.m
        b = as_matrix(b, rows=self.a.shape[0]) % m
        r, c = self.dec.shape
        cb = (self.dec.s @ b) % m
        z = zeros(c, b.shape[1])
        for i in range(r):
            di = int(self.dec.diag[i]) if i < len(self.dec.diag) else 0
            g = gcd(di, m)
            row = cb[i]
            if (row % g).any():
                return None
            if i < c and g != m:
                inv = modinv(di // g, m // g)
                z[i] = ((row // g) * inv) % (m // g)
        return (self.dec.t @ z) % m

    def kernel(self):
        """Columns generating {x : A x = 0 (mod m)}."""
        m = self.m
        r, c = self.dec.shape
        cols = []
        for j in range(c):
            dj = int(self.dec.diag[j]) if j < len(self.dec.diag) else 0
            ann = m // gcd(dj, m)
            if ann != m:
                # ann * d_j = 0 mod m; for d_j = 0 this is ann = 1, a free column.
                cols.append((self.dec.t[:, j] * ann) % m)
        if not cols:
            return zeros(c, 0)
        return np.stack(cols, axis=1)


def solve_mod(a, b, m):
    return SmithSolver(a, m).solve(b)


def kernel_mod(a, m):
    return SmithSolver(a, m).kernel()


def reduce_generators(gens, m):
    """Replace the columns of gens by at most `rows` columns with the same span.

    Uses colspan(G) = S^-1 @ colspan(D): the nonzero diagonal entries give
    scaled columns of S^-1 generating the same subgroup of (Z/m)^rows.
    """
    g = as_matrix(gens) % m
    if g.shape[1] == 0 or not g.any():
        return zeros(g.shape[0], 0)
    dec = smith_mod(g, m)
    cols = []
    for i, di in enumerate(dec.diag):
        if di % m:
            cols.append((dec.s_inv[:, i] * int(di)) % m)
    if not cols:
        return zeros(g.shape[0], 0)
    return np.stack(cols, axis=1)


# ---------------------------------------------------------------------------
# Mixed-order helpers.  A "group" here is a tuple of orders (d_1, ..., d_k),
# each d_i | m, standing for  Z/d_1 + ... + Z/d_k.  Vectors are coordinate
# columns reduced mod the per-coordinate order.
# ---------------------------------------------------------------------------

def reduce_coords(v, orders):
    """Reduce each coordinate row of v modulo its order."""
    v = np.asarray(v, dtype=np.int64)
    if len(orders) == 0:
        return v
    mod = np.asarray(orders, dtype=np.int64)
    if v.ndim == 1:
        return v % mod
    return v % mod[:, None]


def scale_rows(a, row_orders, m):
    """Embed row congruences mod e_i into congruences mod m."""
    a = as_matrix(a, rows=len(row_orders))
    if a.shape[0] == 0:
        return a % m
    factors = np.array([m // e for e in row_orders], dtype=np.int64)
    return (a * factors[:, None]) % m


def solve_hetero(a, b, row_orders, m):
    """Solve  a @ x = b  where row i is a congruence mod row_orders[i].

    x is only meaningful modulo the column orders of whatever group it
    parametrizes; any representative mod m is returned.
    """
    a2 = scale_rows(a, row_orders, m)
    b2 = scale_rows(as_matrix(b, rows=len(row_orders)), row_orders, m)
    if a2.shape[0] == 0:
        return zeros(a2.shape[1], b2.shape[1])
    return SmithSolver(a2, m).solve_matrix(b2)


def kernel_hetero(a, row_orders, m):
    """Generators of {x : a @ x = 0 (mod row_orders, rowwise)} as columns mod m."""
    a2 = scale_rows(a, row_orders, m)
    if a2.shape[0] == 0:
        return eye(a2.shape[1])
    return SmithSolver(a2, m).kernel()


@dataclass
class QuotientPresentation:
    """Q = (Z/d_1 + ... + Z/d_k) / <relation columns>, normalized.

    proj maps ambient coordinates to Q coordinates; lift picks representatives
    (proj @ lift = identity on Q).  orders lists the invariant factors > 1.
    """

    orders: tuple
    proj: np.ndarray   # len(orders) x k
    lift: np.ndarray   # k x len(orders)


def quotient_presentation(ambient_orders, relations, m):
    """Present the quotient of a mixed-order group by a relation subgroup."""
    k = len(ambient_orders)
    rel = as_matrix(relations, rows=k, cols=0) % m
    full = np.concatenate([rel, np.diag(np.asarray(ambient_orders, dtype=np.int64)).reshape(k, k)], axis=1) if k else zeros(0, 0)
    if k == 0:
        return QuotientPresentation(orders=(), proj=zeros(0, 0), lift=zeros(0, 0))
    dec = smith_mod(full, m)
    new_orders = []
    keep = []
    for i in range(k):
        di = int(dec.diag[i]) if i < len(dec.diag) else 0
        delta = gcd(di, m)  # gcd(0, m) = m: a free Z/m coordinate
        if delta > 1:
            new_orders.append(delta)
            keep.append(i)
    if not keep:
        return QuotientPresentation(orders=(), proj=zeros(0, k), lift=zeros(k, 0))
    proj = dec.s[keep] % np.array(new_orders, dtype=np.int64)[:, None]
    lift = reduce_coords(dec.s_inv[:, keep], ambient_orders)
    return QuotientPresentation(orders=tuple(int(o) for o in new_orders), proj=proj, lift=lift)


def group_size(orders):
    n = 1
    for d in orders:
        n *= int(d)
    return n


def enumerate_group(orders, cap=None):
    """Yield every element of the group as an int64 vector.  cap guards blowup."""
    if cap is not None and group_size(orders) > cap:
        raise ValueError(f"group of order {group_size(orders)} exceeds enumeration cap {cap}")
    ranges = [range(int(d)) for d in orders]
    for tup in itertools.product(*ranges):
        yield np.array(tup, dtype=np.int64)


def subgroup_order(gens, ambient_orders, m):
    """Order of the subgroup of the mixed group generated by the given columns."""
    gens = as_matrix(gens, rows=len(ambient_orders))
    if gens.shape[1] == 0:
        return 1
    # |span| = |ambient| / |ambient/span|
    q = quotient_presentation(ambient_orders, gens, m)
    return group_size(ambient_orders) // group_size(q.orders)


def in_span(v, gens, ambient_orders, m):
    """Is v in the subgroup generated by the columns of gens?"""
    gens = as_matrix(gens, rows=len(ambient_orders))
    x = solve_hetero(gens, np.asarray(v, dtype=np.int64).reshape(-1, 1), ambient_orders, m)
    return x is not None
