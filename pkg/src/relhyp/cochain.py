"""Finite windows of the relative two-complex: cells, boundary maps,
(co)chains, bounded-primitive linear programs, and path-gain potentials.

The complex has one vertex orbit for the group, one vertex orbit per
peripheral factor (identified along cosets), edges for free generators,
edges tying a group element to its coset vertices, weight-zero peripheral
edges, one 2-cell orbit per relator, and multiplication 2-cells for finite
peripheral factors.  A Window materializes the finite fragment of this
complex over a truncated ball and records which 2-cells have their entire
boundary inside the fragment; linear programs and path searches only ever
constrain those interior cells.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import os

import numpy as np
from scipy.optimize import linprog

from .cayley import truncated_ball
from .errors import LpSolverError
from .presentation import (
    EMPTY_WORD,
    FiniteTableModel,
    HLetter,
    RelativePresentation,
    Word,
    XLetter,
    encode_word,
)

# cell kinds, by dimension
BASE_VERTEX = "base_vertex"
COSET_VERTEX = "coset_vertex"
GEN_EDGE = "gen_edge"
COSET_EDGE = "coset_edge"
PERIPHERAL_EDGE = "peripheral_edge"
RELATOR_FACE = "relator_face"
PERIPHERAL_FACE = "peripheral_face"

_DIM = {
    BASE_VERTEX: 0,
    COSET_VERTEX: 0,
    GEN_EDGE: 1,
    COSET_EDGE: 1,
    PERIPHERAL_EDGE: 1,
    RELATOR_FACE: 2,
    PERIPHERAL_FACE: 2,
}

# cells belonging to the peripheral subcomplex (invisible to relative
# cochains and carrying zero length)
_LBAR_KINDS = frozenset({PERIPHERAL_EDGE, PERIPHERAL_FACE})


@dataclass(frozen=True)
class CellId:
    kind: str
    translate: Word
    data: tuple = ()

    @property
    def dim(self) -> int:
        return _DIM[self.kind]

    @property
    def is_lbar(self) -> bool:
        return self.kind in _LBAR_KINDS

    def sort_key(self):
        return (self.dim, self.kind, self.translate.sort_key(), self.data)


def base_vertex(g: Word) -> CellId:
    return CellId(BASE_VERTEX, g)


def coset_vertex(lam: int, rep: Word) -> CellId:
    return CellId(COSET_VERTEX, rep, (lam,))


def gen_edge(sym: str, g: Word) -> CellId:
    return CellId(GEN_EDGE, g, (sym,))


def coset_edge(lam: int, g: Word) -> CellId:
    return CellId(COSET_EDGE, g, (lam,))


def peripheral_edge(lam: int, rep: Word, h) -> CellId:
    return CellId(PERIPHERAL_EDGE, rep, (lam, h))


def relator_face(r: int, g: Word) -> CellId:
    return CellId(RELATOR_FACE, g, (r,))


def peripheral_face(lam: int, rep: Word, a, b) -> CellId:
    return CellId(PERIPHERAL_FACE, rep, (lam, a, b))


# ---------------------------------------------------------------------------
# windows


@dataclass(frozen=True)
class Window:
    P: RelativePresentation = field(compare=False)
    O: object = field(compare=False)
    radius: int
    rho: int
    cells: dict = field(compare=False)      # dim -> tuple of CellId, sorted
    boundary: dict = field(compare=False)   # CellId -> ((CellId, sign), ...)
    interior: frozenset = field(compare=False)
    coset_reps: dict = field(compare=False)  # lam -> {coset key -> Word}
    home: Word = field(compare=False, default=None)

    @property
    def cell_set(self) -> frozenset:
        return frozenset(c for cs in self.cells.values() for c in cs)

    def cells_of_dim(self, dim: int) -> tuple:
        return self.cells.get(dim, ())

    @property
    def interior_relator_faces(self) -> tuple:
        return tuple(c for c in self.cells_of_dim(2)
                     if c in self.interior and c.kind == RELATOR_FACE)

    def coset_rep(self, lam: int, g: Word) -> Word:
        key = self.O.coset_key(g, lam)
        return self.coset_reps[lam].get(key, self.O.normal_form(g))

    def boundary_l1_bound(self) -> int:
        """Finite bound on the l1 norm of any 2-cell boundary: free letters
        contribute one edge, peripheral letters up to three."""
        per_rel = [sum(1 if isinstance(l, XLetter) else 3 for l in R)
                   for R in self.P.relators]
        finite = [3]  # multiplication cells have three boundary edges
        return max(per_rel + finite)


def _trace_relator(P: RelativePresentation, O, rep_of, r_idx: int, g: Word):
    """Signed boundary 1-chain of the relator 2-cell at translate g."""
    coeffs: dict[CellId, int] = {}

    def add(cell, s):
        coeffs[cell] = coeffs.get(cell, 0) + s
        if coeffs[cell] == 0:
            del coeffs[cell]

    cur = g
    for l in P.relators[r_idx]:
        if isinstance(l, XLetter):
            if l.sign > 0:
                add(gen_edge(l.sym, cur), +1)
                cur = O.normal_form(cur + Word((l,)))
            else:
                nxt = O.normal_form(cur + Word((l,)))
                add(gen_edge(l.sym, nxt), -1)
                cur = nxt
        else:
            nxt = O.normal_form(cur + Word((l,)))
            rep = rep_of(l.lam, cur)
            add(coset_edge(l.lam, cur), +1)
            add(peripheral_edge(l.lam, rep, l.elem), +1)
            add(coset_edge(l.lam, nxt), -1)
            cur = nxt
    return tuple(sorted(coeffs.items(), key=lambda kv: kv[0].sort_key()))


def build_window(P: RelativePresentation, O, radius: int, rho: int,
                 max_vertices: int | None = None) -> Window:
    """All cell translates over the ball of the given radius; peripheral
    edges carry only elements of model length <= rho."""
    ball = truncated_ball(P, O, radius, rho, max_vertices=max_vertices)
    V = list(ball.vertices)
    home = V[0]

    bases: dict[Word, None] = dict.fromkeys(V)
    for g in V:
        for sym in P.x_symbols:
            bases.setdefault(O.normal_form(g + Word((XLetter(sym, 1),))))
    base_list = list(bases)

    reps: dict[int, dict] = {}
    for lam in sorted(P.models):
        groups: dict = {}
        for g in base_list:
            groups.setdefault(O.coset_key(g, lam), []).append(g)
        reps[lam] = {key: min(ws, key=Word.sort_key)
                     for key, ws in groups.items()}

    def rep_of(lam, g):
        return reps[lam].get(O.coset_key(g, lam), O.normal_form(g))

    zero = [base_vertex(g) for g in base_list]
    seen_cosets: dict[int, list] = {}
    for lam in sorted(P.models):
        vals = sorted({rep_of(lam, g) for g in V}, key=Word.sort_key)
        seen_cosets[lam] = vals
        zero += [coset_vertex(lam, rep) for rep in vals]

    one: list[CellId] = []
    boundary: dict[CellId, tuple] = {}
    for g in V:
        for sym in P.x_symbols:
            e = gen_edge(sym, g)
            t = O.normal_form(g + Word((XLetter(sym, 1),)))
            one.append(e)
            boundary[e] = ((base_vertex(t), +1), (base_vertex(g), -1))
        for lam in sorted(P.models):
            e = coset_edge(lam, g)
            one.append(e)
            boundary[e] = ((coset_vertex(lam, rep_of(lam, g)), +1),
                           (base_vertex(g), -1))
    for lam in sorted(P.models):
        model = P.models[lam]
        for rep in seen_cosets[lam]:
            for h in model.elements_up_to(rho):
                e = peripheral_edge(lam, rep, h)
                one.append(e)
                boundary[e] = ()

    two: list[CellId] = []
    for g in V:
        for r_idx in range(len(P.relators)):
            f = relator_face(r_idx, g)
            two.append(f)
            boundary[f] = _trace_relator(P, O, rep_of, r_idx, g)
    for lam in sorted(P.models):
        model = P.models[lam]
        if not isinstance(model, FiniteTableModel):
            continue
        elems = [e for e in range(model.size) if not model.is_identity(e)]
        for rep in seen_cosets[lam]:
            for a in elems:
                for b in elems:
                    f = peripheral_face(lam, rep, a, b)
                    coeffs: dict[CellId, int] = {}
                    for cell, s in ((peripheral_edge(lam, rep, a), +1),
                                    (peripheral_edge(lam, rep, b), +1)):
                        coeffs[cell] = coeffs.get(cell, 0) + s
                    ab = model.product(a, b)
                    if not model.is_identity(ab):
                        cell = peripheral_edge(lam, rep, ab)
                        coeffs[cell] = coeffs.get(cell, 0) - 1
                    two.append(f)
                    boundary[f] = tuple(sorted(
                        ((c, s) for c, s in coeffs.items() if s != 0),
                        key=lambda kv: kv[0].sort_key()))

    # faces on the rim reference edges past the window; give those edges
    # their boundaries too so that dd = 0 holds on every face
    for f in two:
        for e, _ in boundary[f]:
            if e in boundary:
                continue
            if e.kind == GEN_EDGE:
                t = O.normal_form(e.translate + Word((XLetter(e.data[0], 1),)))
                boundary[e] = ((base_vertex(t), +1),
                               (base_vertex(e.translate), -1))
            elif e.kind == COSET_EDGE:
                boundary[e] = ((coset_vertex(e.data[0],
                                             rep_of(e.data[0], e.translate)),
                                +1),
                               (base_vertex(e.translate), -1))
            else:
                boundary[e] = ()

    cells = {
        0: tuple(sorted(set(zero), key=CellId.sort_key)),
        1: tuple(sorted(set(one), key=CellId.sort_key)),
        2: tuple(sorted(set(two), key=CellId.sort_key)),
    }
    cell_set = frozenset(c for cs in cells.values() for c in cs)
    interior = frozenset(
        f for f in cells[2]
        if all(c in cell_set for c, _ in boundary[f]))
    return Window(P=P, O=O, radius=radius, rho=rho, cells=cells,
                  boundary=boundary, interior=interior, coset_reps=reps,
                  home=home)


def window_to_json(W: Window) -> dict:
    idx: dict[CellId, int] = {}
    cell_docs = []
    for dim in (0, 1, 2):
        for c in W.cells_of_dim(dim):
            idx[c] = len(cell_docs)
            data = [list(d) if isinstance(d, tuple) else d for d in c.data]
            cell_docs.append({"dim": dim, "kind": c.kind,
                              "translate": encode_word(W.P, c.translate),
                              "data": data,
                              "lbar": c.is_lbar})
    triplets = []
    for c in list(W.cells_of_dim(1)) + list(W.cells_of_dim(2)):
        for b, s in W.boundary.get(c, ()):
            if b in idx:
                triplets.append([idx[c], idx[b], s])
    return {
        "radius": W.radius,
        "peripheral_bound": W.rho,
        "cells": cell_docs,
        "boundary": triplets,
        "interior": sorted(idx[c] for c in W.interior),
    }


# ---------------------------------------------------------------------------
# chains and cochains


def _clean(values: dict) -> dict:
    return {c: v for c, v in values.items() if v != 0}


@dataclass(frozen=True)
class Chain:
    dim: int
    coeffs: dict = field(default_factory=dict)

    def get(self, cell: CellId):
        return self.coeffs.get(cell, 0)


@dataclass(frozen=True)
class Cochain:
    dim: int
    values: dict = field(default_factory=dict)

    def get(self, cell: CellId):
        return self.values.get(cell, 0)

    @property
    def norm(self):
        vals = [abs(v) for v in self.values.values()]
        return max(vals) if vals else 0

    @property
    def is_relative(self) -> bool:
        return all(v == 0 for c, v in self.values.items() if c.is_lbar)


def cochain_add(a: Cochain, b: Cochain) -> Cochain:
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    out = dict(a.values)
    for c, v in b.values.items():
        out[c] = out.get(c, 0) + v
    return Cochain(a.dim, _clean(out))


def cochain_scale(a: Cochain, s) -> Cochain:
    return Cochain(a.dim, _clean({c: s * v for c, v in a.values.items()}))


def boundary_chain(W: Window, D: Chain) -> Chain:
    out: dict[CellId, object] = {}
    for cell, coef in D.coeffs.items():
        for b, s in W.boundary.get(cell, ()):
            out[b] = out.get(b, 0) + s * coef
    return Chain(D.dim - 1, _clean(out))


def coboundary(W: Window, c: Cochain) -> Cochain:
    """(delta c)(e) = c(boundary e), on window cells whose boundary stays in
    the window."""
    out: dict[CellId, object] = {}
    if c.dim == 0:
        targets = W.cells_of_dim(1)
    elif c.dim == 1:
        targets = tuple(f for f in W.cells_of_dim(2) if f in W.interior)
    else:
        return Cochain(c.dim + 1, {})
    cset = W.cell_set
    for e in targets:
        val = 0
        for b, s in W.boundary.get(e, ()):
            if b not in cset:
                val = None
                break
            val += s * c.get(b)
        if val:
            out[e] = val
    return Cochain(c.dim + 1, out)


def pair(z: Cochain, D: Chain):
    """Evaluation of a cochain against a chain of the same dimension."""
    if z.dim != D.dim:
        raise ValueError("dimension mismatch")
    return sum(z.get(cell) * coef for cell, coef in D.coeffs.items())


def rel_weight(cell: CellId):
    """Length weight of a 1-cell: free edges 1, coset edges 1/2, peripheral
    edges 0."""
    if cell.dim != 1:
        raise ValueError("weights are defined on 1-cells")
    if cell.kind == GEN_EDGE:
        return 1
    if cell.kind == COSET_EDGE:
        return Fraction(1, 2)
    return 0


def chain_rel_length(D: Chain):
    return sum(abs(c) * rel_weight(cell) for cell, c in D.coeffs.items())


# ---------------------------------------------------------------------------
# cocycle families


def relator_indicator_family(value=1):
    """z assigning `value` to every relator 2-cell of the window."""
    def build(W: Window) -> Cochain:
        return Cochain(2, {f: value for f in W.cells_of_dim(2)
                           if f.kind == RELATOR_FACE})
    return build


def zero_family():
    def build(W: Window) -> Cochain:
        return Cochain(2, {})
    return build


def coboundary_family(h_builder):
    """z = delta h for a 1-cochain produced per window by h_builder."""
    def build(W: Window) -> Cochain:
        return coboundary(W, h_builder(W))
    return build


# ---------------------------------------------------------------------------
# minimal bounded primitives


@dataclass(frozen=True)
class Primitive:
    m: Cochain
    norm: object
    exact: bool


@dataclass(frozen=True)
class Infeasible:
    witness: tuple


def min_linf_primitive(W: Window, z: Cochain, exact: bool = False):
    """Minimize the sup norm of a relative 1-cochain m with (delta m) = z on
    every interior relator 2-cell of the window."""
    if z.dim != 2:
        raise ValueError("target must be a 2-cochain")
    if not z.is_relative:
        raise ValueError("target cochain must vanish on peripheral cells")
    variables = [c for c in W.cells_of_dim(1) if not c.is_lbar]
    var_idx = {c: i for i, c in enumerate(variables)}
    faces = list(W.interior_relator_faces)
    rows = []
    rhs = []
    for f in faces:
        row = {}
        for b, s in W.boundary[f]:
            if b.is_lbar:
                continue
            row[var_idx[b]] = row.get(var_idx[b], 0) + s
        rows.append(row)
        rhs.append(z.get(f))
    if exact:
        return _exact_lp(variables, rows, rhs, faces)
    n = len(variables)
    A_eq = np.zeros((len(rows), n + 1))
    for i, row in enumerate(rows):
        for j, s in row.items():
            A_eq[i, j] = s
    b_eq = np.array([float(v) for v in rhs])
    A_ub = np.zeros((2 * n, n + 1))
    for j in range(n):
        A_ub[2 * j, j] = 1.0
        A_ub[2 * j, n] = -1.0
        A_ub[2 * j + 1, j] = -1.0
        A_ub[2 * j + 1, n] = -1.0
    b_ub = np.zeros(2 * n)
    c = np.zeros(n + 1)
    c[n] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=b_ub,
                  A_eq=A_eq if len(rows) else None,
                  b_eq=b_eq if len(rows) else None,
                  bounds=[(None, None)] * n + [(0, None)],
                  method="highs")
    if res.status == 2:
        return Infeasible(witness=tuple(faces))
    if res.status != 0:
        raise LpSolverError(f"solver failed with status {res.status}: "
                            f"{res.message}")
    m = Cochain(1, _clean({variables[j]: float(res.x[j]) for j in range(n)}))
    return Primitive(m=m, norm=float(res.x[n]), exact=False)


def _pivot(T, obj, basis, r, col):
    piv = T[r][col]
    T[r] = [v / piv for v in T[r]]
    row_r = T[r]
    for i in range(len(T)):
        if i != r and T[i][col]:
            f = T[i][col]
            T[i] = [a - f * b for a, b in zip(T[i], row_r)]
    if obj[col]:
        f = obj[col]
        obj[:] = [a - f * b for a, b in zip(obj, row_r)]
    basis[r] = col


def _simplex_iterate(T, obj, basis, cols):
    """Bland's rule: smallest eligible entering column, smallest basis index
    on ratio ties.  Terminates on exact arithmetic."""
    while True:
        enter = next((j for j in cols if obj[j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        for i, row in enumerate(T):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                if best is None or ratio < best[0] or \
                        (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot(T, obj, basis, best[1], enter)


def _exact_simplex(A, b, c):
    """min c . x  subject to  A x = b, x >= 0, everything Fraction.

    Returns ("optimal", x, value), ("infeasible", None, None) or
    ("unbounded", None, None)."""
    m = len(A)
    n = len(c)
    T = []
    for i in range(m):
        row = [Fraction(v) for v in A[i]]
        bi = Fraction(b[i])
        if bi < 0:
            row = [-v for v in row]
            bi = -bi
        T.append(row + [Fraction(0)] * m + [bi])
        T[i][n + i] = Fraction(1)
    basis = list(range(n, n + m))
    obj = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        obj = [a - bv for a, bv in zip(obj, T[i])]
    for i in range(m):
        obj[n + i] = Fraction(0)
    if _simplex_iterate(T, obj, basis, range(n)) != "optimal" or -obj[-1] > 0:
        return "infeasible", None, None
    # drive leftover artificials out of the basis, dropping redundant rows
    for r in range(len(T) - 1, -1, -1):
        if basis[r] >= n:
            col = next((j for j in range(n) if T[r][j] != 0), None)
            if col is None:
                del T[r]
                del basis[r]
            else:
                _pivot(T, obj, basis, r, col)
    obj2 = [Fraction(v) for v in c] + [Fraction(0)] * (m + 1)
    for r in range(len(T)):
        if obj2[basis[r]]:
            f = obj2[basis[r]]
            obj2 = [a - f * bv for a, bv in zip(obj2, T[r])]
    status = _simplex_iterate(T, obj2, basis, range(n))
    if status != "optimal":
        return status, None, None
    x = [Fraction(0)] * n
    for r, j in enumerate(basis):
        x[j] = T[r][-1]
    return "optimal", x, -obj2[-1]


def _exact_lp(variables, rows, rhs, faces):
    """Exact rational solve of the same program, in standard form with the
    split m_j = p_j - q_j and one slack per absolute-value inequality."""
    n = len(variables)
    if not rows:
        return Primitive(m=Cochain(1, {}), norm=Fraction(0), exact=True)
    t_col = 2 * n
    ncols = 2 * n + 1 + 2 * n
    A = []
    b = []
    for row, val in zip(rows, rhs):
        r = [Fraction(0)] * ncols
        for j, s in row.items():
            r[j] = Fraction(s)
            r[n + j] = Fraction(-s)
        A.append(r)
        b.append(Fraction(val))
    for j in range(n):
        r1 = [Fraction(0)] * ncols
        r1[j], r1[n + j], r1[t_col] = Fraction(1), Fraction(-1), Fraction(-1)
        r1[t_col + 1 + 2 * j] = Fraction(1)
        r2 = [Fraction(0)] * ncols
        r2[j], r2[n + j], r2[t_col] = Fraction(-1), Fraction(1), Fraction(-1)
        r2[t_col + 2 + 2 * j] = Fraction(1)
        A += [r1, r2]
        b += [Fraction(0), Fraction(0)]
    c = [Fraction(0)] * ncols
    c[t_col] = Fraction(1)
    status, x, value = _exact_simplex(A, b, c)
    if status == "infeasible":
        return Infeasible(witness=tuple(faces))
    if status != "optimal":
        raise LpSolverError(f"exact solver reported {status}")
    m_vals = {}
    for j, var in enumerate(variables):
        v = x[j] - x[n + j]
        if v:
            m_vals[var] = v
    for row, val in zip(rows, rhs):
        got = sum(s * m_vals.get(variables[j], Fraction(0))
                  for j, s in row.items())
        if got != Fraction(val):
            raise LpSolverError("exact solution failed verification")
    return Primitive(m=Cochain(1, m_vals), norm=value, exact=True)


# ---------------------------------------------------------------------------
# growth scans


@dataclass(frozen=True)
class GrowthScan:
    rows: tuple            # (width, optimal norm)
    slope: float
    verdict: str           # "bounded-consistent" or "linear-growth-witness"
    exact: bool


def _thread_count(requested: int | None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("RELHYP_THREADS", "").strip()
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def growth_scan(P: RelativePresentation, O, z_builder, widths, rho: int = 1,
                exact: bool = False, threads: int | None = None) -> GrowthScan:
    """Optimal primitive norms across windows of the given widths (window
    width w means ball radius w // 2)."""
    widths = list(widths)

    def solve(width: int):
        W = build_window(P, O, radius=width // 2, rho=rho)
        cert = min_linf_primitive(W, z_builder(W), exact=exact)
        if isinstance(cert, Infeasible):
            raise LpSolverError(
                f"no primitive exists on the window of width {width}")
        return cert.norm

    workers = min(_thread_count(threads), max(1, len(widths)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            norms = list(pool.map(solve, widths))
    else:
        norms = [solve(w) for w in widths]
    rows = tuple(zip(widths, norms))
    floats = [float(v) for v in norms]
    if len(set(widths)) >= 2:
        slope = float(np.polyfit([float(w) for w in widths], floats, 1)[0])
    else:
        slope = 0.0
    increasing = all(b > a + 1e-9 for a, b in zip(floats, floats[1:]))
    verdict = "linear-growth-witness" if increasing and len(floats) >= 2 \
        else "bounded-consistent"
    return GrowthScan(rows=rows, slope=slope, verdict=verdict, exact=exact)


# ---------------------------------------------------------------------------
# path gains and potentials


def path_gain(W: Window, path, m: Cochain, z: Cochain, C):
    """Gain of an edge path: pairing with m minus C * ||z|| * weighted
    length.  `path` is a sequence of (1-cell, +-1) steps."""
    total_m = 0
    total_len = 0
    cset = W.cell_set
    for cell, sign in path:
        if cell.dim != 1:
            raise ValueError("paths are made of 1-cells")
        if cell not in cset:
            raise ValueError(f"path leaves the window at {cell}")
        total_m += sign * m.get(cell)
        total_len += rel_weight(cell)
    return total_m - C * z.norm * total_len


def _adjacency(W: Window):
    adj: dict[CellId, list] = {}
    for e in W.cells_of_dim(1):
        bd = W.boundary.get(e, ())
        if not bd:
            continue  # weight-zero loops never change a path gain
        pos = [c for c, s in bd if s > 0]
        neg = [c for c, s in bd if s < 0]
        if len(pos) != 1 or len(neg) != 1:
            continue
        head, tail = pos[0], neg[0]
        adj.setdefault(tail, []).append((e, +1, head))
        adj.setdefault(head, []).append((e, -1, tail))
    for v in adj:
        adj[v].sort(key=lambda t: (t[0].sort_key(), t[1]))
    return adj


def windowed_max_nu(W: Window, m: Cochain, z: Cochain, C, start: CellId,
                    end: CellId, cap: int):
    """Maximum gain over simple edge paths (each 1-cell used once) from
    start to end with at most `cap` steps; peripheral loop edges are skipped
    since they contribute nothing for relative m."""
    for v in (start, end):
        if v.dim != 0 or v not in W.cell_set:
            raise ValueError(f"endpoint {v} is not a window vertex")
    adj = _adjacency(W)
    znorm = z.norm
    best: list = [None, None]   # value, path

    def consider(value, path):
        if best[0] is None or value > best[0] or \
                (value == best[0] and len(path) < len(best[1])):
            best[0] = value
            best[1] = tuple(path)

    path: list = []
    used: set = set()

    def dfs(v, gain, length):
        if v == end:
            consider(gain - C * znorm * length, path)
        if len(path) == cap:
            return
        for e, sign, t in adj.get(v, ()):
            if e in used:
                continue
            used.add(e)
            path.append((e, sign))
            dfs(t, gain + sign * m.get(e), length + rel_weight(e))
            path.pop()
            used.discard(e)

    dfs(start, 0, 0)
    if best[0] is None:
        raise ValueError(f"no path from {start} to {end} within {cap} steps")
    return best[0], best[1]


def relative_correction(W: Window, m: Cochain, z: Cochain, C, cap: int):
    """Potential d from windowed maximal gains into each vertex, and the
    corrected cochain k = -m + delta d (relative by construction: peripheral
    edges have zero boundary here, so delta d vanishes on them)."""
    start = base_vertex(W.home)
    d_vals = {}
    for v in W.cells_of_dim(0):
        val, _ = windowed_max_nu(W, m, z, C, start, v, cap)
        if val:
            d_vals[v] = val
    d = Cochain(0, d_vals)
    k = cochain_add(cochain_scale(m, -1), coboundary(W, d))
    return d, k
