"""Bounded chain complexes of certified-projective modules.

These are the concrete model of compact objects: a complex knows its ring,
its degree range, a module for every degree and the differentials between
them.  Strict chain maps modulo chain homotopy represent morphisms in the
homotopy category, which agrees with the derived category on bounded
complexes of projectives.

Sign conventions (fixed once, used everywhere):

* suspension shifts degrees up by one and negates the differential;
* cone(f: X -> Y) has terms Y_k + X_{k-1} and d(y, x) = (dy + fx, -dx).

All homotopy questions (nullity, chain-map solving, factorizations through
cones) are linear systems over the base arithmetic and go through
:class:`MapSystem`.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import SquareNotCommuting, ValidationError
from .linalg import as_matrix, eye, zeros
from .modules import (
    FgModule,
    ModuleMap,
    _hom_constraint_rows,
    free_module,
    is_free_module,
    is_projective,
    make_module,
    module_to_descriptor,
    projective_cover_data,
)
from .rings import ring_to_dict


def zero_module(ring):
    return FgModule(ring=ring, orders=(), actions=tuple(zeros(0, 0) for _ in range(ring.rank)), label="0")


def direct_sum_modules(a, b, label=""):
    orders = a.orders + b.orders
    acts = []
    for t in range(a.ring.rank):
        blk = zeros(a.ngens + b.ngens, a.ngens + b.ngens)
        blk[: a.ngens, : a.ngens] = a.actions[t]
        blk[a.ngens :, a.ngens :] = b.actions[t]
        acts.append(blk)
    return FgModule(ring=a.ring, orders=orders, actions=tuple(acts), label=label or f"{a.label}+{b.label}")




@dataclass
class ProjectivityCertificate:
    """A section of a surjection from a free module: pi . section = id."""

    cover: FgModule
    pi: ModuleMap
    section: ModuleMap

    def validate(self):
        comp = self.pi @ self.section
        if not np.array_equal(comp.mat, linalg.reduce_coords(eye(self.pi.tgt.ngens), self.pi.tgt.orders)):
            raise ValidationError("projectivity certificate does not split")


def trivial_certificate(mod):
    if mod.is_zero or is_free_module(mod):
        ident = mod.identity_map()
        return ProjectivityCertificate(cover=mod, pi=ident, section=ident)
    return None


def certificate_for(mod):
    cert = trivial_certificate(mod)
    if cert is not None:
        return cert
    cover, pi, sec = projective_cover_data(mod)
    return ProjectivityCertificate(cover=cover, pi=pi, section=sec)


class Complex:
    """A bounded complex.  Immutable once built; derived data is cached."""

    def __init__(self, ring, lo, hi, terms, diffs, certs=None, name="", check=True):
        self.ring = ring
        self.lo = lo
        self.hi = hi
        self._terms = dict(terms)
        self._diffs = {k: as_matrix(d) for k, d in diffs.items()}
        self.name = name
        self._zero = zero_module(ring)
        self._lock = threading.RLock()
        self._cache = {}
        if certs is None:
            certs = {}
            for k, t in self._terms.items():
                certs[k] = trivial_certificate(t)
        self.certs = certs
        self.certified = all(self.certs.get(k) is not None for k in self._terms if not self._terms[k].is_zero)
        if check:
            self.validate()

    @classmethod
    def zero(cls, ring):
        return cls(ring, 0, -1, {}, {})

    def term(self, k):
        return self._terms.get(k, self._zero)

    def diff(self, k):
        """Matrix of d_k: term(k) -> term(k-1); correctly shaped zeros if absent."""
        d = self._diffs.get(k)
        if d is None:
            return zeros(self.term(k - 1).ngens, self.term(k).ngens)
        return d

    def diff_map(self, k):
        return ModuleMap(self.term(k), self.term(k - 1), self.diff(k), check=False)

    def degrees(self):
        return range(self.lo, self.hi + 1)

    @property
    def length(self):
        return max(self.hi - self.lo, 0)

    @property
    def is_zero(self):
        return all(self.term(k).is_zero for k in self.degrees())

    def total_order(self):
        n = 1
        for k in self.degrees():
            n *= self.term(k).size
        return n

    def validate(self):
        for k in self.degrees():
            t = self.term(k)
            if not t.ring.same_ring(self.ring):
                raise ValidationError(f"term {k} lives over {t.ring.name}")
        for k in self.degrees():
            d = self.diff(k)
            if d.shape != (self.term(k - 1).ngens, self.term(k).ngens):
                raise ValidationError(f"differential {k} has shape {d.shape}")
            ModuleMap(self.term(k), self.term(k - 1), d)  # validates equivariance
            dd = self.diff(k - 1) @ d
            if linalg.reduce_coords(dd, self.term(k - 2).orders).any():
                raise ValidationError(f"d.d != 0 at degree {k}")
        for k, cert in self.certs.items():
            if cert is not None:
                cert.validate()

    # -- derived data ------------------------------------------------------

    def homology(self):
        with self._lock:
            if "homology" not in self._cache:
                self._cache["homology"] = {k: _homology_at(self, k) for k in self.degrees()}
            return self._cache["homology"]

    def homology_at(self, k):
        if self.lo <= k <= self.hi:
            return self.homology()[k]
        return _zero_homology(self, k)

    def cache_get(self, key, build):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = build()
            return self._cache[key]

    def __repr__(self):
        nm = self.name or "C"
        return f"{nm}[{self.lo}..{self.hi}]@{self.ring.name}"


@dataclass
class HomologyData:
    degree: int
    module: FgModule          # the homology module (over the same ring)
    lift: np.ndarray          # term coordinates of chosen cycle representatives
    _cycles: np.ndarray
    _proj: np.ndarray
    _term: FgModule

    def classify(self, cols):
        """Coordinates in homology of the given cycle columns."""
        cols = as_matrix(cols, rows=self._term.ngens)
        if self.module.is_zero:
            return zeros(0, cols.shape[1])
        y = linalg.solve_hetero(self._cycles, cols, self._term.orders, self._term.ring.modulus)
        if y is None:
            raise ValidationError("classify() got a non-cycle")
        return linalg.reduce_coords(self._proj @ y, self.module.orders)


def _zero_homology(cx, k):
    z = zero_module(cx.ring)
    return HomologyData(degree=k, module=z, lift=zeros(cx.term(k).ngens, 0),
                        _cycles=zeros(cx.term(k).ngens, 0), _proj=zeros(0, 0), _term=cx.term(k))


def _homology_at(cx, k):
    ring = cx.ring
    m = ring.modulus
    term = cx.term(k)
    if term.is_zero:
        return _zero_homology(cx, k)
    below = cx.term(k - 1)
    cyc = linalg.kernel_hetero(cx.diff(k), below.orders, m)
    cyc = linalg.reduce_coords(cyc, term.orders)
    from .modules import _reduce_mixed_generators

    cyc = _reduce_mixed_generators(cyc, term.orders, m)
    if cyc.shape[1] == 0:
        return _zero_homology(cx, k)
    bnd = linalg.reduce_coords(cx.diff(k + 1), term.orders)
    yb = linalg.solve_hetero(cyc, bnd, term.orders, m)
    if yb is None:
        raise ValidationError("boundaries are not cycles; differential is broken")
    zrel = linalg.kernel_hetero(cyc, term.orders, m)
    rel = np.concatenate([yb, zrel], axis=1)
    pres = linalg.quotient_presentation([m] * cyc.shape[1], rel, m)
    if not pres.orders:
        return _zero_homology(cx, k)
    lift = linalg.reduce_coords(cyc @ pres.lift, term.orders)
    acts = []
    for t in range(ring.rank):
        moved = linalg.reduce_coords(term.actions[t] @ lift, term.orders)
        y = linalg.solve_hetero(cyc, moved, term.orders, m)
        acts.append(linalg.reduce_coords(pres.proj @ y, pres.orders))
    h = FgModule(ring=ring, orders=pres.orders, actions=tuple(acts), label=f"H{k}")
    return HomologyData(degree=k, module=h, lift=lift, _cycles=cyc, _proj=pres.proj, _term=term)


# ---------------------------------------------------------------------------
# Chain maps and homotopies
# ---------------------------------------------------------------------------

class ChainMap:
    """A strict degree-zero chain map: d . f = f . d exactly."""

    def __init__(self, src, tgt, mats, check=True):
        self.src = src
        self.tgt = tgt
        self.mats = {}
        for k, mat in mats.items():
            mat = as_matrix(mat, rows=tgt.term(k).ngens, cols=src.term(k).ngens)
            mat = linalg.reduce_coords(mat % tgt.ring.modulus, tgt.term(k).orders)
            if mat.any():
                self.mats[k] = mat
        if check:
            self.validate()

    def component(self, k):
        mat = self.mats.get(k)
        if mat is None:
            return zeros(self.tgt.term(k).ngens, self.src.term(k).ngens)
        return mat

    def validate(self):
        if not self.src.ring.same_ring(self.tgt.ring):
            raise ValidationError("chain map across different rings")
        lo = min(self.src.lo, self.tgt.lo)
        hi = max(self.src.hi, self.tgt.hi)
        for k in range(lo, hi + 1):
            ModuleMap(self.src.term(k), self.tgt.term(k), self.component(k))
            lhs = self.tgt.diff(k) @ self.component(k)
            rhs = self.component(k - 1) @ self.src.diff(k)
            if linalg.reduce_coords(lhs - rhs, self.tgt.term(k - 1).orders).any():
                raise ValidationError(f"does not commute with differentials at degree {k}")

    @property
    def is_zero(self):
        return not self.mats

    def __matmul__(self, other):
        mats = {}
        for k in range(min(other.src.lo, self.tgt.lo), max(other.src.hi, self.tgt.hi) + 1):
            mats[k] = self.component(k) @ other.component(k)
        return ChainMap(other.src, self.tgt, mats, check=False)

    def __add__(self, other):
        mats = {}
        for k in set(self.mats) | set(other.mats):
            mats[k] = self.component(k) + other.component(k)
        return ChainMap(self.src, self.tgt, mats, check=False)

    def __sub__(self, other):
        mats = {}
        for k in set(self.mats) | set(other.mats):
            mats[k] = self.component(k) - other.component(k)
        return ChainMap(self.src, self.tgt, mats, check=False)

    def __neg__(self):
        return ChainMap(self.src, self.tgt, {k: -v for k, v in self.mats.items()}, check=False)

    def __repr__(self):
        return f"ChainMap({self.src!r} -> {self.tgt!r})"


def identity_chain(cx):
    return ChainMap(cx, cx, {k: eye(cx.term(k).ngens) for k in cx.degrees()}, check=False)


def zero_chain(src, tgt):
    return ChainMap(src, tgt, {}, check=False)


class Homotopy:
    """Degree +1 maps h with  target relation  f = d h + h d."""

    def __init__(self, src, tgt, mats):
        self.src = src
        self.tgt = tgt
        self.mats = {}
        for k, mat in mats.items():
            mat = as_matrix(mat, rows=tgt.term(k + 1).ngens, cols=src.term(k).ngens)
            mat = linalg.reduce_coords(mat % tgt.ring.modulus, tgt.term(k + 1).orders)
            if mat.any():
                ModuleMap(src.term(k), tgt.term(k + 1), mat)
                self.mats[k] = mat

    def component(self, k):
        mat = self.mats.get(k)
        if mat is None:
            return zeros(self.tgt.term(k + 1).ngens, self.src.term(k).ngens)
        return mat

    def bounds(self, f):
        """Check  f = d h + h d  exactly."""
        for k in range(min(f.src.lo, f.tgt.lo) - 1, max(f.src.hi, f.tgt.hi) + 2):
            acc = self.tgt.diff(k + 1) @ self.component(k) + self.component(k - 1) @ f.src.diff(k)
            if linalg.reduce_coords(acc - f.component(k), f.tgt.term(k).orders).any():
                return False
        return True


def check_null_homotopy(f, h):
    if not h.bounds(f):
        raise ValidationError("claimed null-homotopy fails f = dh + hd")
    return True


# ---------------------------------------------------------------------------
# The linear-system engine for maps between complexes
# ---------------------------------------------------------------------------

class MapSystem:
    """Joint linear system over unknown families of degreewise module maps.

    A family (src, tgt, shift) stands for unknown maps U_k: src_k -> tgt_{k+shift}
    for every degree where both ends are nonzero.  Equations are matrix
    identities  sum_i  pre_i @ U_{k_i} @ post_i = rhs,  read entrywise as
    congruences modulo the target row orders.

    Maps out of a free module are parametrized directly by the images of
    its module generators (no constraints at all), which keeps the systems
    rank-of-the-algebra-squared smaller than the naive group-coordinate
    encoding; other blocks get explicit well-definedness and equivariance
    rows.  Equations whose domain is free are likewise restricted to module
    generators.
    """

    def __init__(self, ring):
        self.ring = ring
        self.m = ring.modulus
        self.families = {}
        self.equations = []

    def add_family(self, name, src, tgt, shift=0):
        degs = []
        for k in range(min(src.lo, tgt.lo - shift), max(src.hi, tgt.hi - shift) + 1):
            if not src.term(k).is_zero and not tgt.term(k + shift).is_zero:
                degs.append(k)
        self.families[name] = (src, tgt, shift, degs)

    def add_equation(self, tgt_term, src_term, rhs, terms):
        """terms: list of (family_name, degree, pre_matrix, post_matrix)."""
        self.equations.append((tgt_term, src_term, as_matrix(rhs, rows=tgt_term.ngens, cols=src_term.ngens), terms))

    def _block_info(self, name, k):
        src, tgt, shift, _ = self.families[name]
        s, t = src.term(k), tgt.term(k + shift)
        if is_free_module(s):
            rank = self.ring.rank
            return ("free", s, t, (s.ngens // rank) * t.ngens)
        return ("generic", s, t, s.ngens * t.ngens)

    def _layout(self):
        offsets = {}
        total = 0
        for name, (src, tgt, shift, degs) in self.families.items():
            for k in degs:
                kind, s, t, size = self._block_info(name, k)
                offsets[(name, k)] = (total, size, kind)
                total += size
        return offsets, total

    def _term_contribution(self, name, k, pre, post, tgt_term, eq_cols):
        """Rows (eq entries x block vars) of pre @ U_k @ post for this block."""
        src, tgt, shift, _ = self.families[name]
        kind, s, t, size = self._block_info(name, k)
        pre = as_matrix(pre, rows=tgt_term.ngens, cols=t.ngens)
        post = as_matrix(post, rows=s.ngens, cols=eq_cols)
        if kind == "generic":
            return np.kron(post.T, pre) % self.m
        rank = self.ring.rank
        a = s.ngens // rank
        out = zeros(tgt_term.ngens * eq_cols, size)
        for tt in range(rank):
            # U columns (j, tt) equal act^tt @ T[:, j]; collect P_tt
            p_t = post[tt::rank, :]                    # a x eq_cols
            pre_a = (pre @ t.actions[tt]) % self.m
            out = (out + np.kron(p_t.T, pre_a)) % self.m
        return out

    def _assemble(self):
        offsets, total = self._layout()
        rows = []
        moduli = []
        rhs_rows = []
        for name, (src, tgt, shift, degs) in self.families.items():
            for k in degs:
                kind, s, t, size = self._block_info(name, k)
                if kind != "generic":
                    continue
                block_rows, block_mods = _hom_constraint_rows(s, t)
                if block_rows.shape[0]:
                    off = offsets[(name, k)][0]
                    wide = zeros(block_rows.shape[0], total)
                    wide[:, off : off + size] = block_rows
                    rows.append(wide)
                    moduli.extend(block_mods)
                    rhs_rows.append(zeros(block_rows.shape[0], 1))
        for tgt_term, src_term, rhs, terms in self.equations:
            post_restrict = None
            eq_cols = src_term.ngens
            if is_free_module(src_term) and self.ring.rank > 1:
                # maps out of a free module agree iff they agree on generators
                from .modules import module_unit_columns

                post_restrict = module_unit_columns(self.ring, src_term.ngens // self.ring.rank)
                eq_cols = post_restrict.shape[1]
            nr = tgt_term.ngens * eq_cols
            if nr == 0:
                continue
            wide = zeros(nr, total)
            for name, k, pre, post in terms:
                if (name, k) not in offsets:
                    continue  # unknown block is identically zero there
                src, tgt, shift, _ = self.families[name]
                post = as_matrix(post, rows=src.term(k).ngens, cols=src_term.ngens)
                if post_restrict is not None:
                    post = (post @ post_restrict) % self.m
                off, size, kind = offsets[(name, k)]
                contrib = self._term_contribution(name, k, pre, post, tgt_term, eq_cols)
                wide[:, off : off + size] = (wide[:, off : off + size] + contrib) % self.m
            rows.append(wide)
            moduli.extend(list(tgt_term.orders) * eq_cols)
            rhs_used = rhs if post_restrict is None else (rhs @ post_restrict) % self.m
            rhs_rows.append(rhs_used.T.reshape(-1, 1))
        if rows:
            big = np.concatenate(rows, axis=0)
            rhs_full = np.concatenate(rhs_rows, axis=0)
        else:
            big = zeros(0, total)
            rhs_full = zeros(0, 1)
        return offsets, total, big, moduli, rhs_full

    def solve(self):
        """One solution as {family: {k: matrix}}, or None."""
        offsets, total, big, moduli, rhs = self._assemble()
        sol = linalg.solve_hetero(big, rhs, moduli, self.m)
        if sol is None:
            return None
        return self._unpack(sol[:, 0], offsets)

    def kernel(self, max_gens=None):
        """Generators of the solution space of the homogeneous system."""
        offsets, total, big, moduli, _ = self._assemble()
        gens = linalg.kernel_hetero(big, moduli, self.m)
        gens = linalg.reduce_generators(gens, self.m)
        out = []
        for c in range(gens.shape[1]):
            out.append(self._unpack(gens[:, c], offsets))
            if max_gens is not None and len(out) >= max_gens:
                break
        return out

    def _unpack(self, flat, offsets):
        result = {name: {} for name in self.families}
        for (name, k), (off, size, kind) in offsets.items():
            src, tgt, shift, _ = self.families[name]
            s = src.term(k)
            t = tgt.term(k + shift)
            if kind == "generic":
                block = flat[off : off + size].reshape(s.ngens, t.ngens).T
            else:
                rank = self.ring.rank
                a = s.ngens // rank
                targets = flat[off : off + size].reshape(a, t.ngens).T
                block = zeros(t.ngens, s.ngens)
                for j in range(a):
                    for tt in range(rank):
                        block[:, j * rank + tt] = (t.actions[tt] @ targets[:, j]) % self.m
            result[name][k] = block
        return result


def null_homotopy(f):
    """Solve f = dh + hd; returns a verified Homotopy or None.

    The underlying diagonalization is a complete decision procedure: None
    means the finite linear system has no solution.
    """
    sys = MapSystem(f.src.ring)
    sys.add_family("h", f.src, f.tgt, shift=1)
    lo = min(f.src.lo, f.tgt.lo)
    hi = max(f.src.hi, f.tgt.hi)
    for k in range(lo, hi + 1):
        tgt_term = f.tgt.term(k)
        src_term = f.src.term(k)
        if tgt_term.is_zero or src_term.is_zero:
            if f.component(k).any():
                return None
            continue
        sys.add_equation(
            tgt_term,
            src_term,
            f.component(k),
            [
                ("h", k, f.tgt.diff(k + 1), eye(src_term.ngens)),
                ("h", k - 1, eye(tgt_term.ngens), f.src.diff(k)),
            ],
        )
    sol = sys.solve()
    if sol is None:
        return None
    h = Homotopy(f.src, f.tgt, sol["h"])
    check_null_homotopy(f, h)
    return h


def chain_map_generators(src, tgt, max_gens=None):
    """Generators of the group of strict chain maps src -> tgt."""
    sys = MapSystem(src.ring)
    sys.add_family("f", src, tgt, shift=0)
    lo = min(src.lo, tgt.lo)
    hi = max(src.hi, tgt.hi)
    for k in range(lo, hi + 1):
        below = tgt.term(k - 1)
        if below.is_zero or src.term(k).is_zero:
            continue
        sys.add_equation(
            below,
            src.term(k),
            zeros(below.ngens, src.term(k).ngens),
            [
                ("f", k, tgt.diff(k), eye(src.term(k).ngens)),
                ("f", k - 1, -eye(below.ngens), src.diff(k)),
            ],
        )
    out = []
    for sol in sys.kernel(max_gens=max_gens):
        cm = ChainMap(src, tgt, sol["f"], check=True)
        if not cm.is_zero:
            out.append(cm)
    return out


def homotopic(f, g):
    return null_homotopy(f - g) is not None


# ---------------------------------------------------------------------------
# Suspension, cones, triangles
# ---------------------------------------------------------------------------

def suspend(cx, times=1):
    """Shift degrees up by `times` and scale differentials by (-1)^times."""
    if times == 0:
        return cx
    sign = -1 if times % 2 else 1
    terms = {k + times: cx.term(k) for k in cx.degrees() if not cx.term(k).is_zero}
    diffs = {k + times: (sign * cx.diff(k)) % cx.ring.modulus for k in cx.degrees()}
    certs = {k + times: cx.certs.get(k) for k in cx.degrees()}
    return Complex(cx.ring, cx.lo + times, cx.hi + times, terms, diffs, certs=certs,
                   name=f"S^{times}({cx.name})" if cx.name else "", check=False)


def suspend_map(f, times=1):
    src = suspend(f.src, times)
    tgt = suspend(f.tgt, times)
    return ChainMap(src, tgt, {k + times: m for k, m in f.mats.items()}, check=False)


def suspend_between(f, src, tgt, times):
    """Suspended map with caller-supplied (already suspended) endpoints."""
    return ChainMap(src, tgt, {k + times: m for k, m in f.mats.items()}, check=False)


@dataclass
class Triangle:
    """A -> B -> C -> SA with stored null-homotopies of consecutive composites."""

    a: object
    b: object
    c: object
    f: ChainMap
    g: ChainMap
    h: ChainMap
    gf_null: Homotopy
    hg_null: Homotopy
    rot_null: Homotopy          # (Sf) . h ~ 0
    kind: str = "cone"

    def suspended_a(self):
        return self.h.tgt

    def validate(self):
        for cx in (self.a, self.b, self.c):
            cx.validate()
        for mp in (self.f, self.g, self.h):
            mp.validate()
        if not check_null_homotopy(self.g @ self.f, self.gf_null):
            raise ValidationError("g.f not null")
        if not check_null_homotopy(self.h @ self.g, self.hg_null):
            raise ValidationError("h.g not null")
        sf = suspend_between(self.f, self.h.tgt, suspend(self.b), 1)
        if not check_null_homotopy(sf @ self.h, self.rot_null):
            raise ValidationError("(Sf).h not null")


@dataclass
class ConeData:
    triangle: Triangle
    cone: object
    # per-degree block injections/projections as raw matrices
    inj_target: dict      # Y_k -> C_k
    inj_shift: dict       # X_{k-1} -> C_k
    pr_target: dict       # C_k -> Y_k
    pr_shift: dict        # C_k -> X_{k-1}

    # shape-safe accessors (zero blocks outside the cone's support)
    def it(self, k):
        got = self.inj_target.get(k)
        return got if got is not None else zeros(self.cone.term(k).ngens, self.triangle.b.term(k).ngens)

    def ish(self, k):
        got = self.inj_shift.get(k)
        return got if got is not None else zeros(self.cone.term(k).ngens, self.triangle.a.term(k - 1).ngens)

    def pt(self, k):
        got = self.pr_target.get(k)
        return got if got is not None else zeros(self.triangle.b.term(k).ngens, self.cone.term(k).ngens)

    def psh(self, k):
        got = self.pr_shift.get(k)
        return got if got is not None else zeros(self.triangle.a.term(k - 1).ngens, self.cone.term(k).ngens)


def cone(f, name=""):
    """Mapping cone with its triangle  X -> Y -> C -> SX  and homotopies."""
    x, y = f.src, f.tgt
    ring = x.ring
    lo = min(y.lo, x.lo + 1)
    hi = max(y.hi, x.hi + 1)
    terms = {}
    inj_t, inj_s, pr_t, pr_s = {}, {}, {}, {}
    for k in range(lo, hi + 1):
        yk = y.term(k)
        xk1 = x.term(k - 1)
        terms[k] = direct_sum_modules(yk, xk1, label=f"C{k}")
        n = yk.ngens + xk1.ngens
        it = zeros(n, yk.ngens)
        it[: yk.ngens] = eye(yk.ngens)
        js = zeros(n, xk1.ngens)
        js[yk.ngens :] = eye(xk1.ngens)
        inj_t[k], inj_s[k] = it, js
        pt = zeros(yk.ngens, n)
        pt[:, : yk.ngens] = eye(yk.ngens)
        ps = zeros(xk1.ngens, n)
        ps[:, yk.ngens :] = eye(xk1.ngens)
        pr_t[k], pr_s[k] = pt, ps
    diffs = {}
    for k in range(lo, hi + 1):
        # d(y, x) = (dy + fx, -dx)
        top = np.concatenate([y.diff(k), f.component(k - 1)], axis=1)
        bot = np.concatenate(
            [zeros(x.term(k - 2).ngens, y.term(k).ngens), (-x.diff(k - 1)) % ring.modulus], axis=1
        )
        diffs[k] = np.concatenate([top, bot], axis=0)
    certs = {}
    for k in range(lo, hi + 1):
        cy = y.certs.get(k) or trivial_certificate(y.term(k))
        cx_ = x.certs.get(k - 1) or trivial_certificate(x.term(k - 1))
        certs[k] = _sum_certificates(terms[k], cy, cx_)
    c = Complex(ring, lo, hi, terms, diffs, certs=certs, name=name or f"cone({x.name or 'X'})", check=False)
    incl = ChainMap(y, c, {k: inj_t[k] for k in c.degrees()}, check=False)
    sx = suspend(x)
    proj = ChainMap(c, sx, {k: pr_s[k] for k in c.degrees()}, check=False)
    # i.f ~ 0 via h(x) = (0, x)
    h1 = Homotopy(x, c, {k: inj_s[k + 1] for k in range(x.lo, x.hi + 1) if (k + 1) in inj_s})
    # proj.incl = 0 exactly
    h2 = Homotopy(y, sx, {})
    # (Sf).proj ~ 0 via H(y, x) = y
    h3 = Homotopy(c, suspend(y), {k: pr_t[k] for k in c.degrees() if not c.term(k).is_zero})
    tri = Triangle(a=x, b=y, c=c, f=f, g=incl, h=proj, gf_null=h1, hg_null=h2, rot_null=h3)
    return ConeData(triangle=tri, cone=c, inj_target=inj_t, inj_shift=inj_s, pr_target=pr_t, pr_shift=pr_s)


def _sum_certificates(total, cert_a, cert_b):
    if cert_a is None or cert_b is None:
        return None
    cover = direct_sum_modules(cert_a.cover, cert_b.cover)
    na, nb = cert_a.cover.ngens, cert_b.cover.ngens
    pi = zeros(total.ngens, na + nb)
    pi[: cert_a.pi.tgt.ngens, :na] = cert_a.pi.mat
    pi[cert_a.pi.tgt.ngens :, na:] = cert_b.pi.mat
    sec = zeros(na + nb, total.ngens)
    sec[:na, : cert_a.pi.tgt.ngens] = cert_a.section.mat
    sec[na:, cert_a.pi.tgt.ngens :] = cert_b.section.mat
    return ProjectivityCertificate(
        cover=cover,
        pi=ModuleMap(cover, total, pi, check=False),
        section=ModuleMap(total, cover, sec, check=False),
    )


def desuspend(cx, times=1):
    return suspend(cx, -times)


def fiber(g):
    """F = S^-1 cone(g: X -> W), with projection F -> X and inclusion S^-1 W -> F.

    Returns (F, proj_to_src, incl_from_desusp_target, cone_data).
    """
    cd = cone(g)
    f = desuspend(cd.cone)
    proj = ChainMap(f, g.src, {k: cd.psh(k + 1) for k in f.degrees()}, check=True)
    wdown = desuspend(g.tgt)
    incl = ChainMap(wdown, f, {k: cd.it(k + 1) for k in f.degrees()}, check=True)
    return f, proj, incl, cd


def section_from_null_homotopy(g, h, fib, proj):
    """If g ~ 0 via h, the fiber projection splits: s(x) = (-h x, x), proj.s = id."""
    mats = {}
    for k in fib.degrees():
        x_part = g.src.term(k)
        if x_part.is_zero:
            continue
        n_w = g.tgt.term(k + 1).ngens
        block = zeros(n_w + x_part.ngens, x_part.ngens)
        block[:n_w] = (-h.component(k)) % g.src.ring.modulus
        block[n_w:] = eye(x_part.ngens)
        mats[k] = block
    return ChainMap(g.src, fib, mats, check=True)


def cone_inclusion_model(inner_cd):
    """The equivalence  cone(incl: B -> cone(f)) ~ SA  for f: A -> B.

    Explicit maps: u((b, a), b') = a;  v(a) = ((0, a), -f a);  u v = id and
    v u ~ id via the witness s((b, a), b') = ((0, 0), b).
    """
    f = inner_cd.triangle.f
    delta = inner_cd.triangle.g            # B -> cone(f)
    outer = cone(delta)
    c2 = outer.cone
    sa = suspend(f.src)
    u_mats = {}
    v_mats = {}
    s_mats = {}
    for k in range(c2.lo, c2.hi + 1):
        u_mats[k] = inner_cd.psh(k) @ outer.pt(k)
        v_mats[k] = outer.it(k) @ inner_cd.ish(k) - outer.ish(k) @ f.component(k - 1)
        s_mats[k] = outer.ish(k + 1) @ inner_cd.pt(k) @ outer.pt(k)
    u = ChainMap(c2, sa, u_mats, check=True)
    v = ChainMap(sa, c2, v_mats, check=True)
    s = Homotopy(c2, c2, s_mats)
    check_null_homotopy(identity_chain(c2) - v @ u, s)
    equiv = Equivalence(src=c2, tgt=sa, fwd=u, bwd=v,
                        fwd_bwd=Homotopy(sa, sa, {}),
                        bwd_fwd=negate_homotopy(s))
    return outer, equiv


def cone_desuspension_iso(phi, down_cone_cd, up_cone):
    """The iso  cone(S^-1 phi) = S^-1 cone(phi)  given both complexes.

    J(b, a) = (b, -a) in the block coordinates of the cone.
    """
    src = down_cone_cd.cone
    tgt = desuspend(up_cone.cone)
    mats = {}
    for k in src.degrees():
        mats[k] = (down_cone_cd.it(k) @ down_cone_cd.pt(k)
                   - down_cone_cd.ish(k) @ down_cone_cd.psh(k))
    fwd = ChainMap(src, tgt, mats, check=True)
    bwd = ChainMap(tgt, src, mats, check=True)
    return iso_equivalence(fwd, bwd)


def cone_suspension_twist(cone_of_suspended, plain_cd, times):
    """The iso  cone(S^times f) = S^times cone(f): twist the shifted block by (-1)^times."""
    src = cone_of_suspended.cone
    tgt = suspend(plain_cd.cone, times)
    sign = -1 if times % 2 else 1
    m = src.ring.modulus
    mats = {}
    for k in src.degrees():
        mats[k] = (cone_of_suspended.it(k) @ cone_of_suspended.pt(k)
                   + sign * cone_of_suspended.ish(k) @ cone_of_suspended.psh(k)) % m
    fwd = ChainMap(src, tgt, mats, check=True)
    bwd = ChainMap(tgt, src, mats, check=True)
    return iso_equivalence(fwd, bwd)


def octahedron_equivalence(a_map, v_map, b_map, comparison_cd, right_cd, witness=None):
    """The equivalence  cone(comparison) ~ cone(v)  for b = v . a (up to witness).

    pi((w, x), (u, x')) = (w + H x, u + a x) with sigma((w, u)) = ((w, 0), (u, 0));
    pi sigma = id exactly and sigma pi ~ id via s((w,x),(u,x')) = ((0,0),(0,x)).
    """
    cd_top = comparison_cd["top"]
    cd_bot = comparison_cd["bottom"]
    cd_phi = comparison_cd["phi"]
    cphi = cd_phi.cone
    cv = right_cd.cone
    h_comp = (witness.component if witness is not None else (lambda k: zeros(
        b_map.tgt.term(k + 1).ngens, b_map.src.term(k).ngens)))
    pi_mats = {}
    sig_mats = {}
    s_mats = {}
    for k in range(min(cphi.lo, cv.lo), max(cphi.hi, cv.hi) + 1):
        x_of_cb = cd_bot.psh(k) @ cd_phi.pt(k)
        w_part = right_cd.it(k) @ (cd_bot.pt(k) @ cd_phi.pt(k) + h_comp(k - 1) @ x_of_cb)
        u_part = right_cd.ish(k) @ (cd_top.pt(k - 1) @ cd_phi.psh(k)
                                    + a_map.component(k - 1) @ x_of_cb)
        pi_mats[k] = w_part + u_part
        sig_mats[k] = (cd_phi.it(k) @ cd_bot.it(k) @ right_cd.pt(k)
                       + cd_phi.ish(k) @ cd_top.it(k - 1) @ right_cd.psh(k))
        s_mats[k] = cd_phi.ish(k + 1) @ cd_top.ish(k) @ x_of_cb
    pi = ChainMap(cphi, cv, pi_mats, check=True)
    sigma = ChainMap(cv, cphi, sig_mats, check=True)
    s = Homotopy(cphi, cphi, s_mats)
    check_null_homotopy(identity_chain(cphi) - sigma @ pi, s)
    ps = pi @ sigma - identity_chain(cv)
    if not ps.is_zero:
        raise ValidationError("octahedron comparison: pi.sigma is not the identity")
    return Equivalence(src=cphi, tgt=cv, fwd=pi, bwd=sigma,
                       fwd_bwd=Homotopy(cv, cv, {}),
                       bwd_fwd=negate_homotopy(s))


def direct_sum_complexes(a, b, name=""):
    ring = a.ring
    lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
    terms, diffs, certs = {}, {}, {}
    for k in range(lo, hi + 1):
        terms[k] = direct_sum_modules(a.term(k), b.term(k))
        ca = a.certs.get(k) or trivial_certificate(a.term(k))
        cb = b.certs.get(k) or trivial_certificate(b.term(k))
        certs[k] = _sum_certificates(terms[k], ca, cb)
        top = np.concatenate([a.diff(k), zeros(a.term(k - 1).ngens, b.term(k).ngens)], axis=1)
        bot = np.concatenate([zeros(b.term(k - 1).ngens, a.term(k).ngens), b.diff(k)], axis=1)
        diffs[k] = np.concatenate([top, bot], axis=0)
    total = Complex(ring, lo, hi, terms, diffs, certs=certs, name=name, check=False)
    inj_a = ChainMap(a, total, {k: np.concatenate([eye(a.term(k).ngens), zeros(b.term(k).ngens, a.term(k).ngens)], axis=0) for k in range(lo, hi + 1)}, check=False)
    inj_b = ChainMap(b, total, {k: np.concatenate([zeros(a.term(k).ngens, b.term(k).ngens), eye(b.term(k).ngens)], axis=0) for k in range(lo, hi + 1)}, check=False)
    pr_a = ChainMap(total, a, {k: np.concatenate([eye(a.term(k).ngens), zeros(a.term(k).ngens, b.term(k).ngens)], axis=1) for k in range(lo, hi + 1)}, check=False)
    pr_b = ChainMap(total, b, {k: np.concatenate([zeros(b.term(k).ngens, a.term(k).ngens), eye(b.term(k).ngens)], axis=1) for k in range(lo, hi + 1)}, check=False)
    return total, (inj_a, inj_b), (pr_a, pr_b)


# ---------------------------------------------------------------------------
# Induced maps on homology and exactness checks
# ---------------------------------------------------------------------------

def induced_map(f, k):
    """H_k(f) as a ModuleMap between homology modules."""
    hs = f.src.homology_at(k)
    ht = f.tgt.homology_at(k)
    if hs.module.is_zero or ht.module.is_zero:
        return ModuleMap(hs.module, ht.module, zeros(ht.module.ngens, hs.module.ngens), check=False)
    pushed = linalg.reduce_coords(f.component(k) @ hs.lift, f.tgt.term(k).orders)
    return ModuleMap(hs.module, ht.module, ht.classify(pushed), check=False)


def shift_identification(sa, a, k, times=1):
    """The canonical iso H_k(sa) = H_{k-times}(a) where sa = S^times a.

    Suspension keeps the cycle and boundary subgroups (negating d does not
    change kernels or images), so classifying the lifted representatives is
    an isomorphism.
    """
    hs = sa.homology_at(k)
    ht = a.homology_at(k - times)
    if hs.module.is_zero:
        return ModuleMap(hs.module, ht.module, zeros(ht.module.ngens, 0), check=False)
    return ModuleMap(hs.module, ht.module, ht.classify(hs.lift), check=False)


def image_order(f):
    """Order of the image subgroup of a ModuleMap."""
    from .modules import image_subgroup_order

    return image_subgroup_order(f)


def homology_les_exact(tri):
    """Check exactness of the homology long exact sequence of a triangle.

    Uses |im| . |im next| = |middle| together with zero composites, which is
    equivalent to exactness for finite groups.
    """
    a, b, c = tri.a, tri.b, tri.c
    lo = min(a.lo, b.lo, c.lo) - 1
    hi = max(a.hi, b.hi, c.hi) + 1
    for k in range(lo, hi + 1):
        f_star = induced_map(tri.f, k)
        g_star = induced_map(tri.g, k)
        conn = shift_identification(tri.h.tgt, a, k) @ induced_map(tri.h, k)
        f_prev = induced_map(tri.f, k - 1)
        # composites vanish
        for left, right in ((f_star, g_star), (g_star, conn)):
            comp = right @ left
            if comp.mat.any():
                return False
        if (f_prev @ conn).mat.any():
            return False
        # order bookkeeping at each of the three spots
        hb = b.homology_at(k).module.size
        hc = c.homology_at(k).module.size
        ha_prev = a.homology_at(k - 1).module.size
        if image_order(f_star) * image_order(g_star) != hb:
            return False
        if image_order(g_star) * image_order(conn) != hc:
            return False
        if image_order(conn) * image_order(f_prev) != ha_prev:
            return False
    return True


# ---------------------------------------------------------------------------
# Resolutions
# ---------------------------------------------------------------------------

def resolution_complex(module, length, name=""):
    """A length-`length` complex of projectives with H_0 = module.

    Uses minimal free covers; stops early by placing a projective kernel as
    the final term, so finite projective dimension yields the honest finite
    resolution.  H_k = 0 for 0 < k < length; H_length is the last syzygy.
    """
    from .modules import kernel_of

    ring = module.ring
    if module.is_zero:
        return Complex.zero(ring)
    flag, _ = is_projective(module)
    if flag:
        terms = {0: module}
        return Complex(ring, 0, 0, terms, {}, certs={0: certificate_for(module)},
                       name=name or f"res({module.label})")
    if length < 1:
        raise ValidationError("a non-projective module needs length >= 1 to resolve")
    terms = {}
    diffs = {}
    certs = {}
    prev_incl = None
    current = module
    k = 0
    while k <= length:
        if k == length:
            # truncation: last term is the cover of the current syzygy
            cover, pi = _cover_of(current)
            terms[k] = cover
            certs[k] = trivial_certificate(cover)
            if prev_incl is not None:
                diffs[k] = linalg.reduce_coords(prev_incl.mat @ pi.mat, prev_incl.tgt.orders)
            break
        flag, _ = is_projective(current)
        if flag and k > 0:
            terms[k] = current
            certs[k] = certificate_for(current)
            if prev_incl is not None:
                diffs[k] = prev_incl.mat
            break
        cover, pi = _cover_of(current)
        terms[k] = cover
        certs[k] = trivial_certificate(cover)
        if prev_incl is not None:
            diffs[k] = linalg.reduce_coords(prev_incl.mat @ pi.mat, prev_incl.tgt.orders)
        ker = kernel_of(pi, label=f"syz{k + 1}")
        current = ker.module
        prev_incl = ker.inclusion
        if current.is_zero:
            break
        k += 1
    hi = max(terms)
    return Complex(ring, 0, hi, terms, diffs, certs=certs, name=name or f"res({module.label})")


def _cover_of(module):
    from .modules import free_cover

    return free_cover(module)


def free_complex(ring, ranks, name=""):
    """A complex of free modules with zero differentials."""
    terms = {k: free_module(ring, r) for k, r in ranks.items() if r > 0}
    if not terms:
        return Complex.zero(ring)
    lo, hi = min(terms), max(terms)
    return Complex(ring, lo, hi, terms, {}, name=name)


def module_complex(module, degree=0, name=""):
    """The module placed in one degree.  Requires a projectivity certificate
    to count as a compact object; homology-only uses may pass uncertified."""
    ring = module.ring
    terms = {degree: module}
    certs = {degree: certificate_for(module) if is_projective(module)[0] else None}
    return Complex(ring, degree, degree, terms, {}, certs=certs, name=name or module.label)


# ---------------------------------------------------------------------------
# The 3x3 / octahedron construction
# ---------------------------------------------------------------------------

@dataclass
class Equivalence:
    """Mutually inverse homotopy equivalences with stored witnesses."""

    src: object
    tgt: object
    fwd: ChainMap             # src -> tgt
    bwd: ChainMap             # tgt -> src
    fwd_bwd: Homotopy         # fwd . bwd ~ id_tgt
    bwd_fwd: Homotopy         # bwd . fwd ~ id_src

    def validate(self):
        if not check_null_homotopy(self.fwd @ self.bwd - identity_chain(self.tgt), self.fwd_bwd):
            raise ValidationError("fwd.bwd is not homotopic to the identity")
        if not check_null_homotopy(self.bwd @ self.fwd - identity_chain(self.src), self.bwd_fwd):
            raise ValidationError("bwd.fwd is not homotopic to the identity")


def negate_homotopy(h):
    return Homotopy(h.src, h.tgt, {k: (-m) % h.tgt.ring.modulus for k, m in h.mats.items()})


def add_homotopies(a, b):
    mats = {}
    for k in set(a.mats) | set(b.mats):
        mats[k] = a.component(k) + b.component(k)
    return Homotopy(a.src, a.tgt, mats)


def conjugate_homotopy(post, h, pre):
    """post . h . pre as a homotopy; post and pre must be chain maps."""
    mats = {}
    for k in range(pre.src.lo - 1, pre.src.hi + 1):
        mats[k] = post.component(k + 1) @ h.component(k) @ pre.component(k)
    return Homotopy(pre.src, post.tgt, mats)


def iso_equivalence(fwd, bwd):
    """Wrap exact mutually inverse chain maps as an Equivalence."""
    lo = min(fwd.src.lo, fwd.tgt.lo)
    hi = max(fwd.src.hi, fwd.tgt.hi)
    for k in range(lo, hi + 1):
        if (fwd @ bwd - identity_chain(fwd.tgt)).component(k).any():
            raise ValidationError("iso_equivalence: fwd.bwd is not the identity")
        if (bwd @ fwd - identity_chain(fwd.src)).component(k).any():
            raise ValidationError("iso_equivalence: bwd.fwd is not the identity")
    return Equivalence(src=fwd.src, tgt=fwd.tgt, fwd=fwd, bwd=bwd,
                       fwd_bwd=Homotopy(fwd.tgt, fwd.tgt, {}),
                       bwd_fwd=Homotopy(fwd.src, fwd.src, {}))


def compose_equivalences(e1, e2):
    """The composite equivalence e1.src ~ e2.tgt (e1.tgt and e2.src must be
    the same complex up to structural equality)."""
    fwd = e2.fwd @ e1.fwd
    bwd = e1.bwd @ e2.bwd
    # fwd.bwd - id = e2.fwd (e1.fwd e1.bwd - id) e2.bwd + (e2.fwd e2.bwd - id)
    fb = add_homotopies(conjugate_homotopy(e2.fwd, e1.fwd_bwd, e2.bwd), e2.fwd_bwd)
    bf = add_homotopies(conjugate_homotopy(e1.bwd, e2.bwd_fwd, e1.fwd), e1.bwd_fwd)
    fb = Homotopy(e2.tgt, e2.tgt, fb.mats)
    bf = Homotopy(e1.src, e1.src, bf.mats)
    return Equivalence(src=e1.src, tgt=e2.tgt, fwd=fwd, bwd=bwd, fwd_bwd=fb, bwd_fwd=bf)


def suspend_equivalence(e, times):
    """Suspend an equivalence; homotopy witnesses pick up a sign (-1)^times."""
    src = suspend(e.src, times)
    tgt = suspend(e.tgt, times)
    sign = -1 if times % 2 else 1
    m = e.src.ring.modulus
    fwd = ChainMap(src, tgt, {k + times: v for k, v in e.fwd.mats.items()}, check=False)
    bwd = ChainMap(tgt, src, {k + times: v for k, v in e.bwd.mats.items()}, check=False)
    fb = Homotopy(tgt, tgt, {k + times: (sign * v) % m for k, v in e.fwd_bwd.mats.items()})
    bf = Homotopy(src, src, {k + times: (sign * v) % m for k, v in e.bwd_fwd.mats.items()})
    return Equivalence(src=src, tgt=tgt, fwd=fwd, bwd=bwd, fwd_bwd=fb, bwd_fwd=bf)


@dataclass
class ThreeByThree:
    triangle: Triangle        # cone(top) -> cone(bottom) -> C -> S cone(top)
    comparison: ChainMap      # cone(top) -> cone(bottom)
    cofiber_model: Equivalence  # C ~ cone(right)
    witness: Homotopy


def three_by_three(top, bottom, right, witness=None):
    """Cofiber triangle of the square  (top: X->U) over (bottom: X->V)  with
    right leg  right: U -> V  commuting up to homotopy.

    Output: the honest cone triangle on the comparison map
    cone(top) -> cone(bottom), together Jwith an equivalence of its third
    vertex with cone(right).
    """
    x = top.src
    if bottom.src is not x:
        raise ValidationError("square legs must share the domain")
    if witness is None:
        witness = null_homotopy(bottom - right @ top)
        if witness is None:
            raise SquareNotCommuting("bottom is not homotopic to right.top")
    else:
        check_null_homotopy(bottom - right @ top, witness)
    cd_top = cone(top)
    cd_bot = cone(bottom)
    ca, cb = cd_top.cone, cd_bot.cone
    # comparison (u, x) -> (v u - H x, x)
    mats = {}
    for k in range(min(ca.lo, cb.lo), max(ca.hi, cb.hi) + 1):
        blk = (
            cd_bot.it(k) @ (right.component(k) @ cd_top.pt(k) - witness.component(k - 1) @ cd_top.psh(k))
            + cd_bot.ish(k) @ cd_top.psh(k)
        )
        mats[k] = blk
    comparison = ChainMap(ca, cb, mats, check=True)
    cd_phi = cone(comparison)
    cd_right = cone(right)
    equiv = octahedron_equivalence(
        top, right, bottom,
        {"top": cd_top, "bottom": cd_bot, "phi": cd_phi},
        cd_right,
        witness=witness,
    )
    return ThreeByThree(
        triangle=cd_phi.triangle, comparison=comparison, cofiber_model=equiv, witness=witness
    )


# ---------------------------------------------------------------------------
# Duals (free-termed complexes only)
# ---------------------------------------------------------------------------

def dual_free_map(ring, mat, src_rank, tgt_rank):
    """Group matrix of Hom(-, R) applied to a map of free right modules.

    mat: free(src_rank) -> free(tgt_rank) over ring.  The result maps
    free_{R^op}(tgt_rank) -> free_{R^op}(src_rank).
    """
    rk = ring.rank
    op = ring.opposite()
    out = zeros(src_rank * rk, tgt_rank * rk)
    units = zeros(src_rank * rk, src_rank)
    for j in range(src_rank):
        units[j * rk : (j + 1) * rk, j] = ring.unit
    values = (mat @ units) % ring.modulus   # column i: image of module generator i
    for j in range(tgt_rank):
        for t in range(rk):
            # functional phi with phi(e_j) = b_t, zero on other copies
            col = zeros(src_rank * rk, 1)
            for i in range(src_rank):
                v = values[j * rk : (j + 1) * rk, i]
                prod = np.zeros(rk, dtype=np.int64)
                for s in range(rk):
                    if v[s]:
                        prod = (prod + int(v[s]) * ring.sc[t, s, :]) % ring.modulus
                col[i * rk : (i + 1) * rk, 0] = prod
            out[:, j * rk + t] = col[:, 0]
    return out


def dual_complex(cx, name=""):
    """D(X) = Hom(X, R): a complex over the opposite ring; X must be free-termed."""
    ring = cx.ring
    op = ring.opposite()
    ranks = {}
    for k in cx.degrees():
        t = cx.term(k)
        if t.is_zero:
            continue
        if not is_free_module(t):
            raise ValidationError("dual_complex needs free terms")
        ranks[k] = t.ngens // ring.rank
    if not ranks:
        return Complex.zero(op)
    lo, hi = -max(ranks), -min(ranks)
    terms = {-k: free_module(op, r) for k, r in ranks.items()}
    diffs = {}
    for k in list(ranks):
        # d^D at degree -k+1 ... build D of d_k: X_k -> X_{k-1}
        if (k - 1) not in ranks and cx.term(k - 1).is_zero:
            continue
        src_rank = ranks.get(k, 0)
        tgt_rank = ranks.get(k - 1, 0)
        if src_rank == 0 or tgt_rank == 0:
            continue
        dmat = dual_free_map(ring, cx.diff(k), src_rank, tgt_rank)
        sign = -1 if (k % 2) else 1
        diffs[-(k - 1)] = (sign * dmat) % ring.modulus
    return Complex(op, lo, hi, terms, diffs, name=name or f"D({cx.name or 'X'})")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def complex_to_dict(cx):
    return {
        "ring": ring_to_dict(cx.ring),
        "lo": cx.lo,
        "hi": cx.hi,
        "name": cx.name,
        "terms": {str(k): module_to_descriptor(cx.term(k)) for k in cx.degrees()},
        "diffs": {str(k): cx.diff(k).tolist() for k in cx.degrees() if cx.diff(k).size},
    }


def complex_from_dict(data, ring=None):
    from .rings import make_ring, ring_spec_from_dict

    if ring is None:
        ring = make_ring(ring_spec_from_dict(data["ring"]))
    lo, hi = int(data["lo"]), int(data["hi"])
    terms = {}
    for k in range(lo, hi + 1):
        desc = data["terms"].get(str(k))
        terms[k] = make_module(ring, desc) if desc else zero_module(ring)
    diffs = {}
    for kstr, mat in data.get("diffs", {}).items():
        diffs[int(kstr)] = as_matrix(mat, rows=terms.get(int(kstr) - 1, zero_module(ring)).ngens,
                                     cols=terms.get(int(kstr), zero_module(ring)).ngens)
    certs = {k: (certificate_for(t) if is_projective(t)[0] else None) for k, t in terms.items()}
    return Complex(ring, lo, hi, terms, diffs, certs=certs, name=data.get("name", ""))


def chain_map_to_dict(f):
    return {k: mat.tolist() for k, mat in sorted(f.mats.items())}


def chain_map_from_dict(src, tgt, data):
    return ChainMap(src, tgt, {int(k): as_matrix(v) for k, v in data.items()})
