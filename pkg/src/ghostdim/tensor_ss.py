"""Derived tensor products, Tor, and the universal-coefficient filtration.

Complexes here have projective terms, so the plain total tensor product
computes the derived tensor.  The E-infinity data of the universal
coefficient spectral sequence is read off directly from the ghost tower:
a homology class of X (x) Z has filtration s exactly when it dies under
g_s (x) Z but not under g_{s-1} (x) Z.  No page bookkeeping is needed; the
filtration is exact and finite because compact objects have finite
projective dimension.

An independent second route (`resolution_filtration`) computes the same
numbers from a free resolution of the left module, filtering the total
complex by resolution degree, with no towers anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .complexes import (
    ChainMap,
    Complex,
    dual_complex,
    induced_map,
    is_free_module,
    module_complex,
    resolution_complex,
    zero_module,
)
from .errors import RingMismatch, SideMismatch, ValidationError, WindowTooDeep
from .ghosts import ghost_tower
from .linalg import eye, zeros
from .modules import FgModule, tensor_map, tensor_modules
from .verdicts import Verdict


@dataclass
class TensorComplex:
    """Total tensor complex over the base ring, with per-bidegree block data."""

    total: Complex
    x: Complex
    z: Complex
    blocks: dict          # n -> list of (a, b, TensorModule, offset)

    def block_index(self, n):
        return {(a, b): (tm, off) for a, b, tm, off in self.blocks.get(n, [])}


def _as_left_complex(ring, z):
    if isinstance(z, FgModule):
        z = module_complex(z)
    if z.ring.modulus != ring.modulus or z.ring.rank != ring.rank:
        raise RingMismatch(f"{ring.name} vs {z.ring.name}")
    if not z.ring.same_ring(ring.opposite()):
        raise SideMismatch(f"left factor must live over {ring.name}^op")
    return z


def tensor_complexes(x, z):
    """X (x)_R Z with Koszul signs; Z is a complex over the opposite ring."""
    ring = x.ring
    z = _as_left_complex(ring, z)
    base = ring.base_ring()
    lo = x.lo + z.lo
    hi = x.hi + z.hi
    blocks = {}
    terms = {}
    tms = {}
    for a in x.degrees():
        if x.term(a).is_zero:
            continue
        for b in z.degrees():
            if z.term(b).is_zero:
                continue
            tms[(a, b)] = tensor_modules(x.term(a), z.term(b))
    for n in range(lo, hi + 1):
        entry = []
        off = 0
        orders = []
        for a in x.degrees():
            b = n - a
            tm = tms.get((a, b))
            if tm is None or tm.module.is_zero:
                continue
            entry.append((a, b, tm, off))
            off += tm.module.ngens
            orders.extend(tm.module.orders)
        blocks[n] = entry
        terms[n] = FgModule(ring=base, orders=tuple(orders),
                            actions=(eye(len(orders)),), label=f"T{n}")
    diffs = {}
    for n in range(lo, hi + 1):
        src_blocks = blocks.get(n, [])
        tgt_blocks = blocks.get(n - 1, [])
        tgt_index = {(a, b): (tm, off) for a, b, tm, off in tgt_blocks}
        mat = zeros(terms[n - 1].ngens if (n - 1) in terms else 0,
                    terms[n].ngens if n in terms else 0)
        if mat.size == 0:
            continue
        for a, b, tm, off in src_blocks:
            ncols = tm.module.ngens
            hit = tgt_index.get((a - 1, b))
            if hit is not None and x.diff(a).size:
                tmt, toff = hit
                sub = tensor_map(x.diff(a), eye(z.term(b).ngens), tm, tmt)
                mat[toff:toff + tmt.module.ngens, off:off + ncols] = sub.mat
            hit = tgt_index.get((a, b - 1))
            if hit is not None and z.diff(b).size:
                tmt, toff = hit
                sign = -1 if a % 2 else 1
                sub = tensor_map(eye(x.term(a).ngens), (sign * z.diff(b)) % ring.modulus, tm, tmt)
                mat[toff:toff + tmt.module.ngens, off:off + ncols] = sub.mat
        diffs[n] = mat
    total = Complex(base, lo, hi, terms, diffs, name=f"({x.name})(x)({z.name})")
    return TensorComplex(total=total, x=x, z=z, blocks=blocks)


def tensor_chain_map(f, z, src_tensor=None, tgt_tensor=None):
    """The induced map  f (x) id_Z  between total tensor complexes."""
    src_tensor = src_tensor or tensor_complexes(f.src, z)
    tgt_tensor = tgt_tensor or tensor_complexes(f.tgt, z)
    z = src_tensor.z
    mats = {}
    for n in src_tensor.total.degrees():
        src_blocks = src_tensor.blocks.get(n, [])
        tgt_index = tgt_tensor.block_index(n)
        mat = zeros(tgt_tensor.total.term(n).ngens, src_tensor.total.term(n).ngens)
        for a, b, tm, off in src_blocks:
            hit = tgt_index.get((a, b))
            if hit is None:
                continue
            tmt, toff = hit
            comp = f.component(a)
            if not comp.any():
                continue
            sub = tensor_map(comp, eye(z.term(b).ngens), tm, tmt)
            mat[toff:toff + tmt.module.ngens, off:off + tm.module.ngens] = sub.mat
        mats[n] = mat
    return ChainMap(src_tensor.total, tgt_tensor.total, mats, check=True)


def tor(m_right, n_left, max_degree):
    """Tor_s(M, N) for s <= max_degree, by resolving the right module."""
    res = resolution_complex(m_right, max_degree + 1)
    t = tensor_complexes(res, module_complex(n_left))
    return {s: t.total.homology_at(s).module for s in range(max_degree + 1)}


def tor_via_left(m_right, n_left, max_degree):
    """The same Tor computed by resolving the left module instead."""
    res = resolution_complex(n_left, max_degree + 1)
    t = tensor_complexes(module_complex(m_right), res)
    return {s: t.total.homology_at(s).module for s in range(max_degree + 1)}


# ---------------------------------------------------------------------------
# Tower-kernel filtration (the spectral sequence's E-infinity data)
# ---------------------------------------------------------------------------

@dataclass
class FiltrationTable:
    x_name: str
    z_name: str
    window: tuple                 # (lo, hi) total degrees
    h_orders: dict                # t -> |H_t(X (x) Z)|
    kernel_orders: dict           # t -> [|K_0|, |K_1|, ...]
    e_infty: dict                 # (s, t) -> order of the filtration quotient
    vanishing_line: int
    exhausted: bool
    depth: int

    def to_json(self):
        return {
            "x": self.x_name,
            "z": self.z_name,
            "window": list(self.window),
            "h_orders": {str(t): int(v) for t, v in sorted(self.h_orders.items())},
            "e_infty": {f"{s},{t}": int(v) for (s, t), v in sorted(self.e_infty.items())},
            "vanishing_line": self.vanishing_line,
            "exhausted": self.exhausted,
            "tower_depth": self.depth,
        }


def _kernel_order_of(ind):
    """Order of the kernel subgroup of a ModuleMap between finite modules."""
    m = ind.src.ring.modulus
    kg = linalg.kernel_hetero(ind.mat, ind.tgt.orders, m)
    kg = linalg.reduce_coords(kg, ind.src.orders)
    from .modules import subgroup_order_in

    return subgroup_order_in(ind.src, kg)


def ucss_filtration(x, z, window=None, tower=None, max_depth=None, extend=True):
    """Filtration of H(X (x) Z) by kernels of the tower-induced maps.

    A class has filtration s when it dies under g_s (x) Z but not under
    g_{s-1} (x) Z; the E-infinity order at (s, t) is the index jump of the
    kernel chain.  Raises WindowTooDeep if a supplied tower is too shallow
    and extension is forbidden.
    """
    ring = x.ring
    z = _as_left_complex(ring, z)
    txz = tensor_complexes(x, z)
    lo, hi = txz.total.lo, txz.total.hi
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    degrees = [t for t in range(lo, hi + 1)]
    h_orders = {t: txz.total.homology_at(t).module.size for t in degrees}
    if tower is None:
        tower = ghost_tower(x, 0)
    if max_depth is None:
        max_depth = max(x.length + 1, 1)
    kernel_orders = {t: [] for t in degrees}
    exhausted = all(v == 1 for v in h_orders.values())
    s = 0
    while not exhausted:
        if s >= max_depth:
            break
        if len(tower.stages) <= s and not extend:
            raise WindowTooDeep(f"tower depth {len(tower.stages)} cannot reach stage {s}")
        gs = tower.composite(s)
        gxz = tensor_chain_map(gs, z, src_tensor=txz)
        exhausted = True
        for t in degrees:
            ind = induced_map(gxz, t)
            k_order = _kernel_order_of(ind)
            prev = kernel_orders[t][-1] if kernel_orders[t] else None
            if prev is not None and k_order % prev:
                raise ValidationError("kernel filtration failed to be nested")
            kernel_orders[t].append(k_order)
            if k_order != h_orders[t]:
                exhausted = False
        s += 1
    e_infty = {}
    line = 0
    for t in degrees:
        chain = kernel_orders[t]
        prev = 1
        for s_idx, k in enumerate(chain):
            jump = k // prev
            if jump > 1:
                e_infty[(s_idx, t)] = jump
                line = max(line, s_idx)
            prev = k
    return FiltrationTable(
        x_name=x.name or "X",
        z_name=z.name or "Z",
        window=(lo, hi),
        h_orders=h_orders,
        kernel_orders=kernel_orders,
        e_infty=e_infty,
        vanishing_line=line,
        exhausted=exhausted,
        depth=len(tower.stages),
    )


# ---------------------------------------------------------------------------
# Independent route: filter the total complex of X (x) (free resolution of Z)
# ---------------------------------------------------------------------------

def resolution_filtration(x, z_module, window=None):
    """E-infinity orders per (s, t) from a free resolution of the left module.

    Builds Tot(X (x) Q) for Q -> Z a resolution, filters by resolution
    degree, and pushes the column filtration through the augmentation
    quasi-isomorphism onto H(X (x) Z).  Tower-free by construction.
    """
    ring = x.ring
    zc = module_complex(z_module)
    txz = tensor_complexes(x, zc)
    lo, hi = txz.total.lo, txz.total.hi
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    smax = hi - x.lo + 1
    q = resolution_complex(z_module, smax)
    txq = tensor_complexes(x, q)
    # augmentation: Q -> Z in degree 0
    aug0 = _augmentation_map(q, z_module)
    aug = _tensor_second_map(txq, txz, aug0)
    h_orders = {t: txz.total.homology_at(t).module.size for t in range(lo, hi + 1)}
    for t in range(lo, hi + 1):
        got = txq.total.homology_at(t).module.size
        if got != h_orders[t]:
            raise ValidationError(
                f"augmentation is not a quasi-isomorphism at degree {t}: {got} vs {h_orders[t]}"
            )
    e_infty = {}
    images = {t: [] for t in range(lo, hi + 1)}
    for s in range(0, smax + 1):
        sub, incl = _column_subcomplex(txq, s)
        through = aug @ incl
        for t in range(lo, hi + 1):
            ind = induced_map(through, t)
            from .modules import image_subgroup_order

            images[t].append(image_subgroup_order(ind))
        if all(images[t][-1] == h_orders[t] for t in images):
            break
    line = 0
    for t, chain in images.items():
        prev = 1
        for s_idx, v in enumerate(chain):
            if v % prev:
                raise ValidationError("column filtration failed to be nested")
            jump = v // prev
            if jump > 1:
                e_infty[(s_idx, t)] = jump
                line = max(line, s_idx)
            prev = v
        if chain and chain[-1] != h_orders[t]:
            raise ValidationError("column filtration failed to exhaust homology")
    return e_infty, line


def _augmentation_map(q, z_module):
    """The chain map from the resolution onto the module in degree zero."""
    zc = module_complex(z_module)
    f0 = q.term(0)
    if q.hi == 0 and f0 is z_module:
        # projective module: the resolution is the module itself
        return ChainMap(q, zc, {0: eye(z_module.ngens)}, check=True)
    from .modules import free_cover

    cover, pi = free_cover(z_module)
    if cover.ngens != f0.ngens:
        raise ValidationError("unexpected resolution shape for augmentation")
    return ChainMap(q, zc, {0: pi.mat}, check=True)


def _tensor_second_map(src_tensor, tgt_tensor, g):
    """Induced map  id_X (x) g  for g: Z -> Z' a map of left complexes."""
    x = src_tensor.x
    mats = {}
    for n in src_tensor.total.degrees():
        mat = zeros(tgt_tensor.total.term(n).ngens, src_tensor.total.term(n).ngens)
        tgt_index = tgt_tensor.block_index(n)
        for a, b, tm, off in src_tensor.blocks.get(n, []):
            comp = g.component(b)
            if not comp.any():
                continue
            hit = tgt_index.get((a, b))
            if hit is None:
                continue
            tmt, toff = hit
            sub = tensor_map(eye(x.term(a).ngens), comp, tm, tmt)
            mat[toff:toff + tmt.module.ngens, off:off + tm.module.ngens] = sub.mat
        mats[n] = mat
    return ChainMap(src_tensor.total, tgt_tensor.total, mats, check=True)


def _column_subcomplex(txq, q_max):
    """The subcomplex of Tot(X (x) Q) spanned by blocks with Q-degree <= q_max."""
    total = txq.total
    base = total.ring
    terms = {}
    incl_mats = {}
    keep = {}
    for n in total.degrees():
        orders = []
        rows = []
        kept = []
        for a, b, tm, off in txq.blocks.get(n, []):
            if b <= q_max:
                kept.append((a, b, tm, off, len(orders)))
                orders.extend(tm.module.orders)
        keep[n] = kept
        terms[n] = FgModule(ring=base, orders=tuple(orders), actions=(eye(len(orders)),))
        inc = zeros(total.term(n).ngens, len(orders))
        for a, b, tm, off, sub_off in kept:
            inc[off:off + tm.module.ngens, sub_off:sub_off + tm.module.ngens] = eye(tm.module.ngens)
        incl_mats[n] = inc
    diffs = {}
    for n in total.degrees():
        if n - 1 < total.lo:
            continue
        proj = incl_mats[n - 1].T if (n - 1) in incl_mats else zeros(0, total.term(n - 1).ngens)
        diffs[n] = proj @ total.diff(n) @ incl_mats[n]
    sub = Complex(base, total.lo, total.hi, terms, diffs)
    incl = ChainMap(sub, total, incl_mats, check=True)
    return sub, incl


# ---------------------------------------------------------------------------
# Flat dimension via the spectral sequence
# ---------------------------------------------------------------------------

def default_tests(x):
    """Left-module test objects: the opposite ring's simples, plus the dual
    complex of X when X is free-termed (the dual detects pdim exactly)."""
    ring = x.ring
    op = ring.opposite()
    tests = []
    if op.simples:
        for s in op.simples:
            tests.append(module_complex(s, name=f"simple:{s.label}"))
    if all(is_free_module(x.term(k)) or x.term(k).is_zero for k in x.degrees()):
        tests.append(dual_complex(x))
    return tests


def fdim_via_ss(x, bound, tests=None, window=None):
    """Least n <= bound with E-infinity vanishing line <= n across all tests."""
    if x.is_zero:
        return Verdict.finite(0)
    if tests is None:
        tests = default_tests(x)
    if not tests:
        raise ValidationError("fdim_via_ss needs at least one left test object")
    line = 0
    for z in tests:
        table = ucss_filtration(x, z, window=window, max_depth=bound + 2)
        if not table.exhausted:
            return Verdict.at_least(bound + 1)
        line = max(line, table.vanishing_line)
        if line > bound:
            return Verdict.at_least(bound + 1)
    return Verdict.finite(line)
