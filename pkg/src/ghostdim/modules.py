"""Finitely generated modules over a finite ring, and the maps between them.

A module is a mixed-order abelian group (orders d_i | m) together with one
action matrix per ring basis element.  All module-level questions (hom
spaces, kernels, cokernels, splittings) reduce to linear congruences mod m
and are answered by :mod:`ghostdim.linalg`.

Matrices act on *group coordinates*: a ModuleMap's column j is the image of
the j-th group generator of the source.  Two matrices represent the same
map exactly when they agree entrywise modulo the target row orders, so maps
are stored in that canonical reduction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import NonSimpleDeclared, ParseError, RingMismatch, ValidationError
from .linalg import as_matrix, eye, zeros
from .rings import ENUMERATION_CAP


@dataclass(eq=False)
class FgModule:
    ring: object
    orders: tuple
    actions: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(d) for d in self.orders))
        acts = tuple(as_matrix(a, rows=self.ngens, cols=self.ngens) % self.ring.modulus
                     for a in self.actions)
        object.__setattr__(self, "actions", acts)
        _validate_module(self)

    @property
    def ngens(self):
        return len(self.orders)

    @property
    def size(self):
        return linalg.group_size(self.orders)

    @property
    def is_zero(self):
        return self.ngens == 0

    def identity_map(self):
        return ModuleMap(self, self, eye(self.ngens))

    def zero_map_to(self, other):
        return ModuleMap(self, other, zeros(other.ngens, self.ngens))

    def elements(self, cap=ENUMERATION_CAP):
        return linalg.enumerate_group(self.orders, cap=cap)

    def act(self, t, vec):
        return linalg.reduce_coords(self.actions[t] @ vec, self.orders)

    def __repr__(self):
        tag = self.label or "M"
        return f"{tag}{list(self.orders)}@{self.ring.name}"


def _validate_module(mod):
    ring = mod.ring
    m = ring.modulus
    n = mod.ngens
    for d in mod.orders:
        if d < 2 or m % d:
            raise ValidationError(f"generator order {d} must divide m = {m} and exceed 1")
    if len(mod.actions) != ring.rank:
        raise ValidationError(f"need {ring.rank} action matrices, got {len(mod.actions)}")
    ords = np.asarray(mod.orders, dtype=np.int64)
    for t, a in enumerate(mod.actions):
        # well-definedness: a[i, j] * d_j = 0 mod d_i
        if n and ((a * ords[None, :]) % ords[:, None]).any():
            raise ValidationError(f"action matrix {t} is not well defined on the group")
    if n == 0:
        return
    unit_combo = sum(int(u) * a for u, a in zip(ring.unit, mod.actions)) % m
    if (linalg.reduce_coords(unit_combo, mod.orders) != linalg.reduce_coords(eye(n), mod.orders)).any():
        raise ValidationError("unit does not act as the identity")
    acts = np.stack(mod.actions)                              # rank x n x n
    # (x . b_s) . b_t = x . (b_s b_t):  A^t A^s = sum_k sc[s,t,k] A^k
    lhs = np.einsum("tij,sjk->stik", acts, acts)
    rhs = np.einsum("stk,kij->stij", ring.sc, acts)
    delta = (lhs - rhs) % np.asarray(mod.orders)[None, None, :, None]
    if delta.any():
        bad = np.argwhere(delta)[0]
        raise ValidationError(f"action violates the ring relations at basis pair ({bad[0]}, {bad[1]})")


@dataclass(eq=False)
class ModuleMap:
    src: FgModule
    tgt: FgModule
    mat: np.ndarray
    check: bool = True

    def __post_init__(self):
        self.mat = as_matrix(self.mat, rows=self.tgt.ngens, cols=self.src.ngens)
        self.mat = linalg.reduce_coords(self.mat % self.tgt.ring.modulus, self.tgt.orders)
        if self.check:
            _validate_map(self)

    def __matmul__(self, other):
        # self after other
        return ModuleMap(other.src, self.tgt, self.mat @ other.mat, check=False)

    def __add__(self, other):
        return ModuleMap(self.src, self.tgt, self.mat + other.mat, check=False)

    def __sub__(self, other):
        return ModuleMap(self.src, self.tgt, self.mat - other.mat, check=False)

    def __neg__(self):
        return ModuleMap(self.src, self.tgt, -self.mat, check=False)

    @property
    def is_zero(self):
        return not self.mat.any()

    def equal(self, other):
        return self.src is other.src and self.tgt is other.tgt and np.array_equal(self.mat, other.mat)

    def apply(self, vec):
        return linalg.reduce_coords(self.mat @ np.asarray(vec, dtype=np.int64), self.tgt.orders)

    def __repr__(self):
        return f"Map({self.src!r} -> {self.tgt!r})"


def _validate_map(f):
    if not f.src.ring.same_ring(f.tgt.ring):
        raise RingMismatch(f"{f.src.ring.name} vs {f.tgt.ring.name}")
    m = f.src.ring.modulus
    src_ord = np.asarray(f.src.orders, dtype=np.int64)
    tgt_ord = np.asarray(f.tgt.orders, dtype=np.int64)
    if f.mat.size:
        if ((f.mat * src_ord[None, :]) % tgt_ord[:, None]).any():
            raise ValidationError("matrix is not well defined on the source group")
        src_acts = np.stack(f.src.actions)
        tgt_acts = np.stack(f.tgt.actions)
        delta = (np.einsum("ij,tjk->tik", f.mat, src_acts)
                 - np.einsum("tij,jk->tik", tgt_acts, f.mat)) % tgt_ord[None, :, None]
        if delta.any():
            t = int(np.argwhere(delta)[0][0])
            raise ValidationError(f"matrix does not commute with ring action {t}")


def maps_equal(f, g):
    return np.array_equal(
        linalg.reduce_coords(f.mat, f.tgt.orders), linalg.reduce_coords(g.mat, g.tgt.orders)
    )


# ---------------------------------------------------------------------------
# Hom spaces
# ---------------------------------------------------------------------------

def _hom_constraint_rows(src, tgt):
    """Rows (matrix, row_orders) cutting out Hom(src, tgt) inside all matrices.

    Unknowns are the entries of a tgt.ngens x src.ngens matrix, vectorized
    column-major.  Returns (rows, moduli); rows may be empty.
    """
    m = src.ring.modulus
    ns, nt = src.ngens, tgt.ngens
    nvar = ns * nt
    blocks = []
    moduli = []
    # well-definedness rows, one per entry whose source order is not killed
    wd_rows = []
    wd_mods = []
    for j, dj in enumerate(src.orders):
        for i, ei in enumerate(tgt.orders):
            if dj % ei:
                row = zeros(1, nvar)
                row[0, j * nt + i] = dj
                wd_rows.append(row)
                wd_mods.append(ei)
    if wd_rows:
        blocks.append(np.concatenate(wd_rows, axis=0))
        moduli.extend(wd_mods)
    if src.ring.rank > 1:
        ident_t = eye(nt)
        for t in range(src.ring.rank):
            # U @ actS - actT @ U = 0, vectorized column-major
            block = (np.kron(src.actions[t].T, ident_t) - np.kron(eye(ns), tgt.actions[t])) % m
            blocks.append(block)
            moduli.extend(list(tgt.orders) * ns)
    if not blocks:
        return zeros(0, nvar), []
    return np.concatenate(blocks, axis=0), moduli


def hom_generators(src, tgt):
    """A reduced generating set of Hom(src, tgt) as a list of ModuleMap.

    Over an F_p-algebra this is an F_p-basis; over Z/n it generates the hom
    group (which may have mixed orders).
    """
    if not src.ring.same_ring(tgt.ring):
        raise RingMismatch(f"{src.ring.name} vs {tgt.ring.name}")
    m = src.ring.modulus
    ns, nt = src.ngens, tgt.ngens
    if ns == 0 or nt == 0:
        return []
    rows, moduli = _hom_constraint_rows(src, tgt)
    sols = linalg.kernel_hetero(rows, moduli, m)
    sols = linalg.reduce_generators(sols, m)
    out = []
    seen = set()
    for c in range(sols.shape[1]):
        mat = sols[:, c].reshape(ns, nt).T
        f = ModuleMap(src, tgt, mat, check=False)
        keyb = f.mat.tobytes()
        if f.is_zero or keyb in seen:
            continue
        seen.add(keyb)
        out.append(f)
    return out


def solve_module_map(src, tgt, extra_rows, extra_moduli, rhs):
    """Find a module map U: src -> tgt with  extra_rows @ vec(U) = rhs.

    extra equation rows are congruences mod extra_moduli.  Returns a
    ModuleMap or None.
    """
    m = src.ring.modulus
    ns, nt = src.ngens, tgt.ngens
    nvar = ns * nt
    hom_rows, hom_mods = _hom_constraint_rows(src, tgt)
    rows = np.concatenate([hom_rows, as_matrix(extra_rows, rows=len(extra_moduli), cols=nvar)], axis=0)
    moduli = list(hom_mods) + list(extra_moduli)
    rhs_full = np.concatenate([zeros(hom_rows.shape[0], 1), as_matrix(rhs, rows=len(extra_moduli), cols=1)], axis=0)
    sol = linalg.solve_hetero(rows, rhs_full, moduli, m)
    if sol is None:
        return None
    return ModuleMap(src, tgt, sol[:, 0].reshape(ns, nt).T, check=False)


# ---------------------------------------------------------------------------
# Submodules, kernels, cokernels
# ---------------------------------------------------------------------------

@dataclass
class Submodule:
    module: FgModule          # abstract presentation of the submodule
    inclusion: ModuleMap      # into the ambient module
    _gens: np.ndarray         # ambient coordinates of the chosen generators
    _expr: object             # callable: ambient columns -> submodule coordinates

    def express(self, cols):
        return self._expr(cols)


def submodule_from_generators(ambient, gens, label=""):
    """The submodule generated (as a group) by the given ambient columns.

    The columns must already be closed under the ring action, as kernels and
    action-closures are; use :func:`submodule_generated` first otherwise.
    """
    m = ambient.ring.modulus
    gens = as_matrix(gens, rows=ambient.ngens)
    g = gens.shape[1]
    rel = linalg.kernel_hetero(gens, ambient.orders, m)
    pres = linalg.quotient_presentation([m] * g, rel, m)
    sub_orders = pres.orders
    incl_mat = linalg.reduce_coords(gens @ pres.lift, ambient.orders) if sub_orders else zeros(ambient.ngens, 0)

    def express(cols):
        cols = as_matrix(cols, rows=ambient.ngens)
        y = linalg.solve_hetero(gens, cols, ambient.orders, m)
        if y is None:
            raise ValidationError("vector is not in the submodule")
        return linalg.reduce_coords(pres.proj @ y, sub_orders) if sub_orders else zeros(0, cols.shape[1])

    acts = []
    for t in range(ambient.ring.rank):
        moved = ambient.actions[t] @ incl_mat
        acts.append(express(moved))
    sub = FgModule(ring=ambient.ring, orders=sub_orders, actions=tuple(acts), label=label)
    incl = ModuleMap(sub, ambient, incl_mat)
    return Submodule(module=sub, inclusion=incl, _gens=gens, _expr=express)


def kernel_of(f, label=""):
    """Kernel of a module map, with its inclusion."""
    m = f.src.ring.modulus
    kg = linalg.kernel_hetero(f.mat, f.tgt.orders, m)
    kg = linalg.reduce_coords(kg, f.src.orders)
    kg = _reduce_mixed_generators(kg, f.src.orders, m)
    return submodule_from_generators(f.src, kg, label=label)


def _reduce_mixed_generators(gens, orders, m):
    """Thin a generating set of a subgroup of a mixed-order group."""
    gens = as_matrix(gens, rows=len(orders))
    if gens.shape[1] <= gens.shape[0]:
        return gens
    # work in (Z/m)^k via the embedding x_i -> (m/d_i) x_i, which is injective
    scale = np.array([m // d for d in orders], dtype=np.int64)
    emb = (gens * scale[:, None]) % m
    red = linalg.reduce_generators(emb, m)
    # pull back: columns of red are divisible by the scales again
    out = zeros(len(orders), red.shape[1])
    for c in range(red.shape[1]):
        col = red[:, c]
        if ((col % scale) != 0).any():
            # mixing happened across coordinates of unequal order; fall back
            return gens
        out[:, c] = col // scale
    return linalg.reduce_coords(out, orders)


@dataclass
class Quotient:
    module: FgModule
    projection: ModuleMap


def quotient_by(ambient, rel_cols, label="", closed=False):
    """Quotient of a module by the submodule generated by the given columns.

    Pass closed=True when the columns are already closed under the ring
    action (images of module maps are).
    """
    m = ambient.ring.modulus
    rel_cols = as_matrix(rel_cols, rows=ambient.ngens)
    if not closed and rel_cols.size:
        rel_cols = submodule_generated(ambient, rel_cols)
    pres = linalg.quotient_presentation(ambient.orders, rel_cols, m)
    acts = []
    for t in range(ambient.ring.rank):
        if pres.orders:
            acts.append(linalg.reduce_coords(pres.proj @ ambient.actions[t] @ pres.lift, pres.orders))
        else:
            acts.append(zeros(0, 0))
    q = FgModule(ring=ambient.ring, orders=pres.orders, actions=tuple(acts), label=label)
    proj = ModuleMap(ambient, q, pres.proj if pres.orders else zeros(0, ambient.ngens))
    return Quotient(module=q, projection=proj)


def kernel_cokernel(f):
    """(kernel with inclusion, cokernel with projection) of a module map."""
    ker = kernel_of(f)
    coker = quotient_by(f.tgt, f.mat, closed=True)
    return ker, coker


def submodule_generated(module, cols):
    """Ambient generators of the smallest submodule containing the columns.

    One pass of all action matrices suffices: the group span of
    {A^t c_j} is closed under every A^s because A^s A^t is a combination
    of the A^k, and it contains the c_j via the unit combination.
    """
    m = module.ring.modulus
    cols = as_matrix(cols, rows=module.ngens)
    if cols.shape[1] == 0:
        return cols
    moved = [linalg.reduce_coords(a @ cols, module.orders) for a in module.actions]
    new = np.concatenate(moved, axis=1)
    return _reduce_mixed_generators(new, module.orders, m)


def _embed(cols, orders, m):
    if len(orders) == 0:
        return as_matrix(cols, rows=0)
    scale = np.array([m // d for d in orders], dtype=np.int64)
    return (as_matrix(cols, rows=len(orders)) * scale[:, None]) % m


def subgroup_order_in(module, cols):
    return linalg.subgroup_order(_embed(cols, module.orders, module.ring.modulus),
                                 [module.ring.modulus] * module.ngens, module.ring.modulus)


def image_subgroup_order(f):
    """Order of the image subgroup of a module map."""
    return subgroup_order_in(f.tgt, f.mat)


# ---------------------------------------------------------------------------
# Free modules and covers
# ---------------------------------------------------------------------------

def is_free_module(mod):
    """Structurally a free_module output (same orders and block actions)."""
    cached = getattr(mod, "_is_free", None)
    if cached is not None:
        return cached
    ring = mod.ring
    result = True
    if mod.ngens % ring.rank:
        result = False
    else:
        rank = mod.ngens // ring.rank
        if any(d != ring.modulus for d in mod.orders):
            result = False
        else:
            model = free_module(ring, rank)
            result = all(np.array_equal(a, b) for a, b in zip(mod.actions, model.actions))
    object.__setattr__(mod, "_is_free", result)
    return result


_free_cache = {}


def free_module(ring, rank, label=None):
    """(free right module)^rank; group generators are basis elements per copy."""
    key = (ring.key(), rank)
    cached = _free_cache.get(key)
    if cached is not None and cached.ring.same_ring(ring):
        return cached
    orders = tuple([ring.modulus] * (ring.rank * rank))
    regular = ring.regular_actions()
    acts = []
    for t in range(ring.rank):
        blocks = np.zeros((ring.rank * rank, ring.rank * rank), dtype=np.int64)
        for c in range(rank):
            lo = c * ring.rank
            blocks[lo:lo + ring.rank, lo:lo + ring.rank] = regular[t]
        acts.append(blocks)
    mod = FgModule(ring=ring, orders=orders, actions=tuple(acts),
                   label=label or (f"R^{rank}" if rank != 1 else "R"))
    object.__setattr__(mod, "_is_free", True)
    _free_cache[key] = mod
    return mod


def free_rank(module):
    """Rank of a free module built by free_module."""
    return module.ngens // module.ring.rank


def module_unit_columns(ring, rank):
    """Group coordinates of the module generators (the unit of each copy)."""
    cols = zeros(ring.rank * rank, rank)
    for c in range(rank):
        cols[c * ring.rank:(c + 1) * ring.rank, c] = ring.unit
    return cols


def free_map(free_src, tgt, targets):
    """The module map free_src -> tgt sending the j-th module generator to targets[:, j].

    free_src must come from free_module; there is exactly one such map.
    """
    ring = tgt.ring
    targets = as_matrix(targets, rows=tgt.ngens)
    r = free_rank(free_src)
    mat = zeros(tgt.ngens, free_src.ngens)
    for j in range(r):
        for t in range(ring.rank):
            mat[:, j * ring.rank + t] = (tgt.actions[t] @ targets[:, j]) % ring.modulus
    return ModuleMap(free_src, tgt, mat)


def _prime_factors(d):
    out = set()
    q = 2
    while q * q <= d:
        if d % q == 0:
            out.add(q)
            while d % q == 0:
                d //= q
        q += 1
    if d > 1:
        out.add(d)
    return out


def minimal_generators(module):
    """A minimum-size generating set.

    With a trivial action (Z/n backend) coprime cyclic factors are packed
    into single generators via CRT; otherwise greedy thinning of the group
    basis is used, which is minimum over an F_p-algebra since it maps to an
    inclusion-minimal spanning set of M / rad M.
    """
    n = module.ngens
    if n == 0:
        return zeros(0, 0)
    if is_free_module(module):
        # the unit of each copy; greedy over the group basis would miss these
        return module_unit_columns(module.ring, n // module.ring.rank)
    if module.ring.rank == 1:
        groups = []
        used = []
        for i, d in enumerate(module.orders):
            ps = _prime_factors(d)
            for grp, taken in zip(groups, used):
                if taken.isdisjoint(ps):
                    grp.append(i)
                    taken |= ps
                    break
            else:
                groups.append([i])
                used.append(set(ps))
        gens = zeros(n, len(groups))
        for c, grp in enumerate(groups):
            for i in grp:
                gens[i, c] = 1
        return gens
    cols = list(range(n))
    gens = eye(n)
    total = module.size
    keep = cols[:]
    for c in cols:
        trial = [i for i in keep if i != c]
        if not trial:
            continue
        span = submodule_generated(module, gens[:, trial])
        if subgroup_order_in(module, span) == total:
            keep = trial
    return gens[:, keep]


def free_cover(module):
    """A surjection from a free module onto the module, via minimal generators."""
    gens = minimal_generators(module)
    rank = gens.shape[1]
    f = free_module(module.ring, rank)
    pi = free_map(f, module, gens)
    return f, pi


def split_surjection(pi):
    """A section s with pi . s = id exactly, or None.

    Sections M -> R^g are found through Hom(M, R)^g: a generating set of
    Hom(M, R) is computed once and the section is a combination of copies,
    which keeps the linear system small over high-rank algebras.
    """
    module = pi.tgt
    f = pi.src
    ring = module.ring
    m = ring.modulus
    if module.ngens == 0:
        return ModuleMap(module, f, zeros(f.ngens, 0), check=False)
    regular = free_module(ring, 1)
    g = f.ngens // regular.ngens
    homs = hom_generators(module, regular)
    if not homs:
        return None
    # unknown coefficients c[i, l]: s = sum c[i, l] inj_i . homs[l]
    cols = []
    pieces = []
    for i in range(g):
        for phi in homs:
            smat = zeros(f.ngens, module.ngens)
            smat[i * regular.ngens:(i + 1) * regular.ngens] = phi.mat
            pieces.append(smat)
            cols.append((pi.mat @ smat).T.reshape(-1))
    a = np.stack(cols, axis=1) % m
    rhs = eye(module.ngens).T.reshape(-1, 1)
    moduli = list(module.orders) * module.ngens
    sol = linalg.solve_hetero(a, rhs, moduli, m)
    if sol is None:
        return None
    smat = zeros(f.ngens, module.ngens)
    for coeff, piece in zip(sol[:, 0], pieces):
        if coeff:
            smat = smat + int(coeff) * piece
    sec = ModuleMap(module, f, smat)
    comp = pi @ sec
    if not np.array_equal(comp.mat, linalg.reduce_coords(eye(module.ngens), module.orders)):
        raise ValidationError("section failed verification")
    return sec


def is_projective(module):
    """Decide projectivity by splitting the free cover; returns (flag, section).

    The section s satisfies pi . s = id exactly when it exists.
    """
    if module.is_zero:
        return True, module.identity_map()
    _, pi = free_cover(module)
    sec = split_surjection(pi)
    if sec is None:
        return False, None
    return True, sec


def projective_cover_data(module):
    """(free cover, pi, section) for a projective module; raises otherwise."""
    if module.is_zero:
        f = free_module(module.ring, 0)
        return f, ModuleMap(f, module, zeros(0, 0)), ModuleMap(module, f, zeros(0, 0))
    f, pi = free_cover(module)
    sec = split_surjection(pi)
    if sec is None:
        raise ValidationError(f"{module!r} is not projective")
    return f, pi, sec


# ---------------------------------------------------------------------------
# Isomorphism search
# ---------------------------------------------------------------------------

def canonical_group(orders):
    """Multiset of prime-power components; equal iff the groups are isomorphic."""
    parts = []
    for d in orders:
        k = int(d)
        q = 2
        while q * q <= k:
            if k % q == 0:
                pe = 1
                while k % q == 0:
                    pe *= q
                    k //= q
                parts.append(pe)
            q += 1
        if k > 1:
            parts.append(k)
    return tuple(sorted(parts))


def is_invertible(f):
    """A module map between finite modules is invertible iff |src| = |tgt| and ker = 0."""
    if f.src.size != f.tgt.size:
        return False
    kg = linalg.kernel_hetero(f.mat, f.tgt.orders, f.src.ring.modulus)
    kg = linalg.reduce_coords(kg, f.src.orders)
    return not kg.any()


def find_isomorphism(a, b, max_gens=12, max_candidates=20000):
    """Search for an invertible module map a -> b.

    Returns a ModuleMap or None.  None means "no isomorphism found within the
    search budget": it is only a definite negative when the cheap structural
    rejections fired or the hom space was fully enumerated.
    """
    if not a.ring.same_ring(b.ring):
        raise RingMismatch(f"{a.ring.name} vs {b.ring.name}")
    if a.size != b.size or canonical_group(a.orders) != canonical_group(b.orders):
        return None
    if a.is_zero:
        return ModuleMap(a, b, zeros(0, 0))
    gens = hom_generators(a, b)
    if not gens:
        return None
    if len(gens) > max_gens:
        return None
    m = a.ring.modulus
    # single generators (and their unit multiples) catch most real cases
    for g in gens:
        for u in range(1, m):
            cand = ModuleMap(a, b, (u * g.mat), check=False)
            if is_invertible(cand):
                return cand
    budget = max_candidates
    for coeffs in itertools.product(range(m), repeat=len(gens)):
        budget -= 1
        if budget < 0:
            return None
        mat = sum(c * g.mat for c, g in zip(coeffs, gens))
        cand = ModuleMap(a, b, mat, check=False)
        if not cand.is_zero and is_invertible(cand):
            return cand
    return None


def modules_isomorphic(a, b):
    return find_isomorphism(a, b) is not None


# ---------------------------------------------------------------------------
# Tensor products (right module over R  x  left module = module over R^op)
# ---------------------------------------------------------------------------

@dataclass
class TensorModule:
    """M (x)_R N as a module over the base ring, with pair-coordinate data."""

    module: FgModule          # over ring.base_ring()
    pair_orders: tuple        # gcd(d_i, e_j), row-major pairs (i, j)
    proj: np.ndarray          # pair coords -> normalized coords
    lift: np.ndarray          # normalized -> pair coords
    shape: tuple = (0, 0)     # (right.ngens, left.ngens)


def _tensor_free_right(right, left, base, label):
    """R^a (x) N = N^a: basis copy-c of b_t tensored with n is act_N^t(n) in copy c."""
    ring = right.ring
    m = ring.modulus
    rank = ring.rank
    a = right.ngens // rank
    nj = left.ngens
    npair = right.ngens * nj
    orders = tuple(left.orders) * a
    proj = zeros(a * nj, npair)
    lift = zeros(npair, a * nj)
    for c in range(a):
        for t in range(rank):
            col_block = (c * rank + t) * nj
            proj[c * nj:(c + 1) * nj, col_block:col_block + nj] = left.actions[t]
        for t in range(rank):
            u = int(ring.unit[t])
            if u:
                col_block = (c * rank + t) * nj
                lift[col_block:col_block + nj, c * nj:(c + 1) * nj] = u * eye(nj)
    proj = linalg.reduce_coords(proj % m, orders) if orders else proj
    mod = FgModule(ring=base, orders=orders, actions=(eye(len(orders)),), label=label)
    return TensorModule(module=mod, pair_orders=_pair_orders(right, left), proj=proj, lift=lift,
                        shape=(right.ngens, left.ngens))


def _tensor_free_left(right, left, base, label):
    """M (x) (R^op)^b = M^b: m tensored with copy-c of b_t is act_M^t(m) in copy c."""
    ring = right.ring
    m = ring.modulus
    rank = ring.rank
    b = left.ngens // rank
    ni = right.ngens
    npair = ni * left.ngens
    orders = tuple(right.orders) * b
    proj = zeros(b * ni, npair)
    lift = zeros(npair, b * ni)
    for i in range(ni):
        for c in range(b):
            for t in range(rank):
                col = i * left.ngens + c * rank + t
                proj[c * ni:(c + 1) * ni, col] = right.actions[t][:, i]
    for c in range(b):
        for t in range(rank):
            u = int(ring.unit[t])
            if u:
                for i in range(ni):
                    lift[i * left.ngens + c * rank + t, c * ni + i] = u
    proj = linalg.reduce_coords(proj % m, orders) if orders else proj
    mod = FgModule(ring=base, orders=orders, actions=(eye(len(orders)),), label=label)
    return TensorModule(module=mod, pair_orders=_pair_orders(right, left), proj=proj, lift=lift,
                        shape=(right.ngens, left.ngens))


def _pair_orders(right, left):
    out = []
    for i in range(right.ngens):
        for j in range(left.ngens):
            out.append(int(np.gcd(right.orders[i], left.orders[j])))
    return tuple(out)


def tensor_modules(right, left):
    """Tensor a right module with a left module (a module over the opposite ring).

    Free factors short-circuit the balanced quotient: R^a (x) N = N^a and
    M (x) (R^op)^b = M^b with explicit coordinate maps.
    """
    ring = right.ring
    if ring.modulus != left.ring.modulus or ring.rank != left.ring.rank:
        raise RingMismatch(f"{ring.name} vs {left.ring.name}")
    if not ring.opposite().same_ring(left.ring):
        from .errors import SideMismatch

        raise SideMismatch(
            f"left factor must be a module over {ring.name}^op, got {left.ring.name}"
        )
    m = ring.modulus
    base = ring.base_ring()
    label = f"{right.label or 'M'}(x){left.label or 'N'}"
    if ring.rank > 1:
        if is_free_module(right):
            return _tensor_free_right(right, left, base, label)
        if is_free_module(left):
            return _tensor_free_left(right, left, base, label)
    ni, nj = right.ngens, left.ngens
    pair_orders = _pair_orders(right, left)
    npair = ni * nj
    rels = []
    if ring.rank > 1:
        for t in range(ring.rank):
            am = right.actions[t]          # action of b_t on the right module
            an = left.actions[t]           # right action of b_t in R^op = left action of b_t
            for i in range(ni):
                for j in range(nj):
                    vec = np.zeros(npair, dtype=np.int64)
                    for k in range(ni):
                        if am[k, i]:
                            vec[k * nj + j] += am[k, i]
                    for l in range(nj):
                        if an[l, j]:
                            vec[i * nj + l] -= an[l, j]
                    if vec.any():
                        rels.append(vec % m)
    rel_mat = np.stack(rels, axis=1) if rels else zeros(npair, 0)
    rel_mat = linalg.reduce_coords(rel_mat, pair_orders) if npair else rel_mat
    pres = linalg.quotient_presentation(pair_orders, rel_mat, m)
    mod = FgModule(
        ring=base,
        orders=pres.orders,
        actions=(eye(len(pres.orders)),),
        label=label,
    )
    proj = pres.proj if pres.orders else zeros(0, npair)
    lift = pres.lift if pres.orders else zeros(npair, 0)
    return TensorModule(module=mod, pair_orders=pair_orders, proj=proj, lift=lift,
                        shape=(right.ngens, left.ngens))


def tensor_map(f_mat, g_mat, src_tensor, tgt_tensor):
    """Induced map on tensors for group matrices f: M -> M' and g: N -> N'.

    src_tensor presents M (x) N and tgt_tensor presents M' (x) N'.  Pair
    coordinates are row-major; the Kronecker product is never materialized:
    (f (x) g) vec(V) = vec(f V g^T) columnwise over the lift.
    """
    m = src_tensor.module.ring.modulus
    ni_s, nj_s = src_tensor.shape
    lift = src_tensor.lift
    k = lift.shape[1]
    if k == 0 or tgt_tensor.module.is_zero:
        mat = zeros(tgt_tensor.module.ngens, src_tensor.module.ngens)
        return ModuleMap(src_tensor.module, tgt_tensor.module, mat, check=False)
    cube = lift.reshape(ni_s, nj_s, k)
    t1 = np.tensordot(f_mat, cube, axes=(1, 0)) % m          # ni_t x nj_s x k
    t2 = np.tensordot(g_mat, t1, axes=(1, 1)) % m            # nj_t x ni_t x k
    moved = np.transpose(t2, (1, 0, 2)).reshape(-1, k)
    mat = (tgt_tensor.proj @ moved) % m
    return ModuleMap(src_tensor.module, tgt_tensor.module, mat, check=False)


# ---------------------------------------------------------------------------
# Descriptors and validation helpers
# ---------------------------------------------------------------------------

def make_module(ring, descriptor, label=""):
    """Build a module from a JSON-style descriptor.

    zmod: {"orders": [...]} or {"presentation": [[...]]} (columns are relations
    among the generators).  fp_algebra: {"dim": d, "actions": [d x d] * rank}.
    """
    if ring.backend == "zmod":
        if "orders" in descriptor:
            orders = [int(d) for d in descriptor["orders"]]
            for d in orders:
                if d < 2 or ring.modulus % d:
                    raise ParseError(f"order {d} does not divide {ring.modulus}")
            return FgModule(ring=ring, orders=tuple(orders),
                            actions=(eye(len(orders)),), label=label or descriptor.get("label", ""))
        if "presentation" in descriptor:
            pres_mat = as_matrix(descriptor["presentation"])
            g = pres_mat.shape[0]
            pres = linalg.quotient_presentation([ring.modulus] * g, pres_mat, ring.modulus)
            return FgModule(ring=ring, orders=pres.orders,
                            actions=(eye(len(pres.orders)),), label=label or descriptor.get("label", ""))
        raise ParseError("zmod module descriptor needs 'orders' or 'presentation'")
    if "dim" not in descriptor or "actions" not in descriptor:
        raise ParseError("fp_algebra module descriptor needs 'dim' and 'actions'")
    dim = int(descriptor["dim"])
    acts = [as_matrix(a, rows=dim, cols=dim) for a in descriptor["actions"]]
    if len(acts) != ring.rank:
        raise ParseError(f"need {ring.rank} action matrices, got {len(acts)}")
    return FgModule(ring=ring, orders=tuple([ring.modulus] * dim), actions=tuple(acts),
                    label=label or descriptor.get("label", ""))


def module_to_descriptor(module):
    if module.ring.backend == "zmod":
        return {"orders": list(module.orders), "label": module.label}
    return {
        "dim": module.ngens,
        "actions": [a.tolist() for a in module.actions],
        "label": module.label,
    }


def is_simple(module, cap=ENUMERATION_CAP):
    """No proper nonzero submodule: every nonzero element generates."""
    if module.is_zero:
        return False
    for v in module.elements(cap=cap):
        if not v.any():
            continue
        span = submodule_generated(module, v.reshape(-1, 1))
        if subgroup_order_in(module, span) != module.size:
            return False
    return True


def validate_simple_list(ring, mods):
    for i, s in enumerate(mods):
        if not is_simple(s):
            raise NonSimpleDeclared(f"declared simple #{i} of {ring.name} is not simple")
    for i in range(len(mods)):
        for j in range(i + 1, len(mods)):
            if find_isomorphism(mods[i], mods[j]) is not None:
                raise NonSimpleDeclared(
                    f"declared simples #{i} and #{j} of {ring.name} are isomorphic"
                )
