"""Relative filling area, Dehn profiles, and certificate replay.

Area is computed by uniform-cost search over canonical words of the ambient
free product.  A single costed move splices one relator cell: pick a cyclic
rotation r of a relator or its inverse, factor r = p * q, match p against a
(possibly syllable-split) stretch of the current word, and replace it by the
inverse of q.  The new word differs from the old by one conjugate of a
relator, so the cost of a search path is exactly the number of cells in the
filling it describes.  Peripheral-letter merges, splits, and free
cancellations cost nothing and are folded into canonicalization; certificates
record them as explicit zero-cost moves so a dumb interpreter can replay the
whole trace.
"""

from __future__ import annotations

from dataclasses import dataclass
import heapq
import itertools

import numpy as np

from .cayley import ball_alphabet
from .presentation import (
    EMPTY_WORD,
    FiniteTableModel,
    FreeAbelianModel,
    FreeGroupModel,
    HLetter,
    RelativePresentation,
    Word,
    XLetter,
    free_reduce,
    letter_count,
    letter_key,
)

# ---------------------------------------------------------------------------
# trace moves


@dataclass(frozen=True)
class HSplit:
    """Split the peripheral letter at ``pos`` into (left, left^-1 * elem)."""
    pos: int
    left: object


@dataclass(frozen=True)
class HMerge:
    """Multiply the same-label peripheral letters at pos, pos+1; if the
    product is the identity both letters disappear."""
    pos: int


@dataclass(frozen=True)
class XCancel:
    """Remove the inverse free-letter pair at pos, pos+1."""
    pos: int


@dataclass(frozen=True)
class RCell:
    """Replace ``matched`` letters at ``pos`` (which must equal the leading
    part of the chosen relator rotation) by the inverse of its trailing part.
    This is the only move that costs a cell."""
    relator: int
    inverted: bool
    rotation: int
    pos: int
    matched: int


Move = HSplit | HMerge | XCancel | RCell


@dataclass(frozen=True)
class FillingCertificate:
    loop: Word
    area: int
    trace: tuple[Move, ...]
    max_area: int
    max_len: int
    minimal_within_caps: bool = True


@dataclass(frozen=True)
class Unknown:
    reason: str
    max_area: int
    max_len: int
    states_explored: int = 0


# ---------------------------------------------------------------------------
# relator rotations and abelianization pruning


def rotation_letters(P: RelativePresentation, relator: int, inverted: bool,
                     rotation: int) -> tuple:
    w = P.relators[relator]
    if inverted:
        w = P.inverse_word(w)
    ls = w.letters
    return ls[rotation:] + ls[:rotation]


def _variants(P: RelativePresentation):
    """All distinct rotations of each relator and its inverse, in a fixed
    enumeration order."""
    out = []
    seen = set()
    for idx in range(len(P.relators)):
        for inverted in (False, True):
            n = len(P.relators[idx])
            for rot in range(n):
                ls = rotation_letters(P, idx, inverted, rot)
                if ls in seen:
                    continue
                seen.add(ls)
                out.append((idx, inverted, rot, ls))
    return out


class _FreePartLattice:
    """Exponent-sum bookkeeping on the torsion-free generator slots.

    A word can only fill if its free-part exponent vector lies in the lattice
    spanned by the relators' vectors; for a single relator with nonzero vector
    the coefficient is an admissible remaining-cell count.
    """

    def __init__(self, P: RelativePresentation):
        from .oracle import integer_kernel, reduce_mod, row_echelon_lattice

        self._reduce_mod = reduce_mod
        self.P = P
        self._x_col = {}
        self._model_cols = {}
        m = 0
        for sym in P.x_symbols:
            self._x_col[sym] = m
            m += 1
        for lam in sorted(P.models):
            model = P.models[lam]
            if isinstance(model, FiniteTableModel):
                self._model_cols[lam] = (m, 0)
            else:
                self._model_cols[lam] = (m, model.rank)
                m += model.rank
        self.m = m
        self.rel_vecs = [self.epsilon(r) for r in P.relators]
        self._ech = row_echelon_lattice([v for v in self.rel_vecs if any(v)])
        single = [v for v in self.rel_vecs if any(v)]
        self._single_vec = single[0] if len(self.rel_vecs) == 1 and single else None

    def epsilon(self, w: Word) -> tuple[int, ...]:
        eps = [0] * self.m
        for l in w:
            if isinstance(l, XLetter):
                eps[self._x_col[l.sym]] += l.sign
            elif isinstance(l, HLetter):
                start, count = self._model_cols[l.lam]
                model = self.P.models[l.lam]
                if isinstance(model, FreeAbelianModel):
                    for i in range(count):
                        eps[start + i] += l.elem[i]
                elif isinstance(model, FreeGroupModel):
                    for t in l.elem:
                        eps[start + abs(t) - 1] += 1 if t > 0 else -1
        return tuple(eps)

    def fillable(self, eps) -> bool:
        if not any(eps):
            return True
        if not self._ech:
            return False
        return not any(self._reduce_mod(self._ech, eps))

    def lower_bound(self, eps) -> int:
        if self._single_vec is None:
            return 0
        v = self._single_vec
        j = next(i for i, c in enumerate(v) if c != 0)
        q, r = divmod(eps[j], v[j])
        if r != 0:
            return 0  # not fillable; the membership test already rejects
        return abs(q)


# ---------------------------------------------------------------------------
# match enumeration


def _candidates(P: RelativePresentation, w: Word, variants):
    """Yield (splice_letters, move_plan) successor descriptions.

    move_plan is (splits, rcell) in replay order against the current word.
    """
    letters = w.letters
    n = len(letters)
    for idx, inverted, rot, r in variants:
        m = len(r)
        inv_cache = {}

        def inv_tail(k):
            if k not in inv_cache:
                inv_cache[k] = P.inverse_word(Word(r[k:])).letters
            return inv_cache[k]

        for k in range(m, 0, -1):
            p = r[:k]
            q_inv = inv_tail(k)
            for i in range(0, n - k + 1):
                for plan in _match_at(P, letters, i, p):
                    if plan is None:
                        continue
                    left_rem, right_rem = plan
                    mid = []
                    if left_rem is not None:
                        mid.append(left_rem)
                    new = letters[:i] + tuple(mid) + q_inv \
                        + ((right_rem,) if right_rem is not None else ()) \
                        + letters[i + k:]
                    splits = []
                    shift = 0
                    if left_rem is not None:
                        splits.append(HSplit(i, left_rem.elem))
                        shift = 1
                    if right_rem is not None:
                        splits.append(HSplit(i + k - 1 + shift, p[-1].elem))
                    yield new, (tuple(splits),
                                RCell(idx, inverted, rot, i + shift, k))
        # pure insertion of the whole inverted rotation
        for i in range(n + 1):
            yield (letters[:i] + inv_tail(0) + letters[i:]),\
                ((), RCell(idx, inverted, rot, i, 0))


def _match_at(P: RelativePresentation, letters, i, p):
    """Ways p can match at position i consuming len(p) letters.

    Yields (left_remainder_letter | None, right_remainder_letter | None); the
    interior of p must match exactly, the first and last letter may match the
    trailing / leading part of a peripheral syllable.
    """
    k = len(p)
    # interior letters must be strictly equal
    for j in range(1, k - 1):
        if letters[i + j] != p[j]:
            return
    first, last = p[0], p[k - 1]
    wf, wl = letters[i], letters[i + k - 1]
    if k == 1:
        if wf == first:
            yield (None, None)
        elif isinstance(first, HLetter) and isinstance(wf, HLetter) \
                and first.lam == wf.lam:
            model = P.models[first.lam]
            a = model.product(wf.elem, model.inverse(first.elem))
            if not model.is_identity(a):
                yield (HLetter(first.lam, a), None)
            b = model.product(model.inverse(first.elem), wf.elem)
            if not model.is_identity(b):
                yield (None, HLetter(first.lam, b))
        return
    lefts = [None] if wf == first else []
    if not lefts and isinstance(first, HLetter) and isinstance(wf, HLetter) \
            and first.lam == wf.lam:
        model = P.models[first.lam]
        a = model.product(wf.elem, model.inverse(first.elem))
        if not model.is_identity(a):
            lefts = [HLetter(first.lam, a)]
    rights = [None] if wl == last else []
    if not rights and isinstance(last, HLetter) and isinstance(wl, HLetter) \
            and last.lam == wl.lam:
        model = P.models[last.lam]
        b = model.product(model.inverse(last.elem), wl.elem)
        if not model.is_identity(b):
            rights = [HLetter(last.lam, b)]
    for lr in lefts:
        for rr in rights:
            yield (lr, rr)


# ---------------------------------------------------------------------------
# the search


def relative_area(P: RelativePresentation, O, c: Word, max_area: int = 16,
                  max_len: int = 64, max_states: int | None = None,
                  check_trivial: bool = True):
    """Minimal number of relator cells filling the trivial loop c, within
    caps.  Returns a FillingCertificate or Unknown."""
    if check_trivial and O is not None and not O.is_trivial(c):
        raise ValueError("loop does not represent the identity")
    start = free_reduce(P, c)
    lattice = _FreePartLattice(P)
    if not lattice.fillable(lattice.epsilon(start)):
        return Unknown("exponent vector outside the relator lattice",
                       max_area, max_len, 0)
    cap_len = max(max_len, len(start))
    variants = _variants(P)
    counter = itertools.count()
    dist: dict[tuple, int] = {start.letters: 0}
    parent: dict[tuple, tuple] = {}
    h0 = lattice.lower_bound(lattice.epsilon(start))
    heap = [(h0, len(start), next(counter), 0, start.letters)]
    explored = 0
    while heap:
        f, _, _, g, state = heapq.heappop(heap)
        if dist.get(state, -1) != g:
            continue
        if not state:
            return _reconstruct(P, c, start, state, parent, g,
                                max_area, max_len)
        explored += 1
        if max_states is not None and explored > max_states:
            return Unknown("state budget exhausted", max_area, max_len,
                           explored)
        if g + 1 > max_area:
            continue
        w = Word(state)
        for new_letters, plan in _candidates(P, w, variants):
            nxt = free_reduce(P, Word(new_letters))
            if len(nxt) > cap_len:
                continue
            eps = lattice.epsilon(nxt)
            if not lattice.fillable(eps):
                continue
            key = nxt.letters
            if dist.get(key, max_area + 1) <= g + 1:
                continue
            hh = lattice.lower_bound(eps)
            if g + 1 + hh > max_area:
                continue
            dist[key] = g + 1
            parent[key] = (state, plan)
            heapq.heappush(heap,
                           (g + 1 + hh, len(nxt), next(counter), g + 1, key))
    return Unknown("no filling within caps", max_area, max_len, explored)


def _reconstruct(P, loop, start, state, parent, area, max_area, max_len):
    steps = []
    key = state
    while key != start.letters:
        prev, plan = parent[key]
        steps.append((prev, plan))
        key = prev
    steps.reverse()
    trace: list[Move] = []
    # initial canonicalization of the raw loop
    events: list = []
    cur = free_reduce(P, loop, _trace=events)
    trace.extend(_events_to_moves(events))
    assert cur == start
    for prev, (splits, rcell) in steps:
        assert cur.letters == prev
        work = list(cur.letters)
        for s in splits:
            trace.append(s)
            l = work[s.pos]
            model = P.models[l.lam]
            right = model.product(model.inverse(s.left), l.elem)
            work[s.pos:s.pos + 1] = [HLetter(l.lam, s.left),
                                     HLetter(l.lam, right)]
        trace.append(rcell)
        r = rotation_letters(P, rcell.relator, rcell.inverted, rcell.rotation)
        q_inv = P.inverse_word(Word(r[rcell.matched:])).letters
        work[rcell.pos:rcell.pos + rcell.matched] = list(q_inv)
        events = []
        cur = free_reduce(P, Word(tuple(work)), _trace=events)
        trace.extend(_events_to_moves(events))
    assert cur.is_empty
    return FillingCertificate(loop=loop, area=area, trace=tuple(trace),
                              max_area=max_area, max_len=max_len)


def _events_to_moves(events):
    return [HMerge(pos) if kind == "h_merge" else XCancel(pos)
            for kind, pos in events]


def replay_certificate(P: RelativePresentation, cert: FillingCertificate) -> Word:
    """Re-run a certificate's trace move by move, checking every precondition.
    Returns the final word (empty for a complete filling) and raises
    ValueError on the first violated move."""
    work = list(cert.loop.letters)
    cost = 0
    for mv in cert.trace:
        if isinstance(mv, HSplit):
            l = work[mv.pos]
            if not isinstance(l, HLetter):
                raise ValueError(f"split of a non-peripheral letter: {mv}")
            model = P.models[l.lam]
            right = model.product(model.inverse(mv.left), l.elem)
            if model.is_identity(mv.left) or model.is_identity(right):
                raise ValueError(f"split produces an identity letter: {mv}")
            work[mv.pos:mv.pos + 1] = [HLetter(l.lam, mv.left),
                                       HLetter(l.lam, right)]
        elif isinstance(mv, HMerge):
            a, b = work[mv.pos], work[mv.pos + 1]
            if not (isinstance(a, HLetter) and isinstance(b, HLetter)
                    and a.lam == b.lam):
                raise ValueError(f"merge of incompatible letters: {mv}")
            model = P.models[a.lam]
            prod = model.product(a.elem, b.elem)
            work[mv.pos:mv.pos + 2] = \
                [] if model.is_identity(prod) else [HLetter(a.lam, prod)]
        elif isinstance(mv, XCancel):
            a, b = work[mv.pos], work[mv.pos + 1]
            if not (isinstance(a, XLetter) and isinstance(b, XLetter)
                    and a.sym == b.sym and a.sign == -b.sign):
                raise ValueError(f"cancel of a non-inverse pair: {mv}")
            del work[mv.pos:mv.pos + 2]
        elif isinstance(mv, RCell):
            r = rotation_letters(P, mv.relator, mv.inverted, mv.rotation)
            p = r[:mv.matched]
            if tuple(work[mv.pos:mv.pos + mv.matched]) != p:
                raise ValueError(f"relator part does not match the word: {mv}")
            q_inv = P.inverse_word(Word(r[mv.matched:])).letters
            work[mv.pos:mv.pos + mv.matched] = list(q_inv)
            cost += 1
        else:
            raise ValueError(f"unknown move {mv!r}")
    if cost != cert.area:
        raise ValueError(f"trace cost {cost} != stated area {cert.area}")
    return Word(tuple(work))


# ---------------------------------------------------------------------------
# Dehn profiles


@dataclass(frozen=True)
class ProfileEntry:
    max_area: int
    loop_count: int
    exact: bool


@dataclass(frozen=True)
class DehnProfile:
    entries: dict[int, ProfileEntry]
    rho: int
    max_area: int
    max_len: int

    def entry(self, n: int) -> ProfileEntry:
        return self.entries[n]

    @property
    def n_max(self) -> int:
        return max(self.entries) if self.entries else 0

    @property
    def exact(self) -> bool:
        return all(e.exact for e in self.entries.values())


def _combinable(a, b) -> bool:
    """Whether two adjacent letters would merge or cancel under reduction."""
    if isinstance(a, XLetter) and isinstance(b, XLetter):
        return a.sym == b.sym and a.sign == -b.sign
    if isinstance(a, HLetter) and isinstance(b, HLetter):
        return a.lam == b.lam
    return False


def _loop_classes(P: RelativePresentation, O, n_max: int, rho: int):
    """Distinct reduced-loop classes (up to rotation and inversion) of
    relative length <= n_max at the basepoint, via distance-pruned DFS."""
    alphabet = ball_alphabet(P, rho)
    radius = (n_max + 1) // 2
    home = O.element_key(EMPTY_WORD)
    distance = {home: 0}
    frontier = [EMPTY_WORD]
    for d in range(1, radius + 1):
        nxt = []
        for w in frontier:
            for l in alphabet:
                t = free_reduce(P, w + Word((l,)))
                k = O.element_key(t)
                if k not in distance:
                    distance[k] = d
                    nxt.append(t)
        frontier = nxt

    classes: dict[tuple, Word] = {}

    def canon(word: Word):
        best = None
        best_letters = word.letters
        for seq in (word.letters, P.inverse_word(word).letters):
            kk = tuple(letter_key(l) for l in seq)
            for i in range(len(seq)):
                cand = kk[i:] + kk[:i]
                if best is None or cand < best:
                    best = cand
                    best_letters = seq[i:] + seq[:i]
        return best, best_letters

    def dfs(path: list, elem, key):
        depth = len(path)
        if depth and key == home and \
                (depth == 1 or not _combinable(path[-1], path[0])):
            ck, letters = canon(Word(tuple(path)))
            if ck not in classes:
                classes[ck] = Word(letters)
        if depth == n_max:
            return
        remaining = n_max - depth
        for l in alphabet:
            if path and _combinable(path[-1], l):
                continue
            nxt = free_reduce(P, elem + Word((l,)))
            t = O.element_key(nxt)
            d = distance.get(t)
            if d is None or d > remaining - 1:
                continue
            path.append(l)
            dfs(path, nxt, t)
            path.pop()

    dfs([], EMPTY_WORD, home)
    return classes


def dehn_profile(P: RelativePresentation, O, n_max: int, rho: int,
                 max_area: int = 16, max_len: int = 64,
                 max_states: int | None = None) -> DehnProfile:
    """Max filling area over trivial loops of relative length <= n, for each
    n up to n_max, using letters of model length <= rho."""
    classes = _loop_classes(P, O, n_max, rho)
    per_len_max: dict[int, int] = {}
    per_len_count: dict[int, int] = {}
    per_len_exact: dict[int, bool] = {}
    for word in classes.values():
        n = letter_count(word)
        per_len_count[n] = per_len_count.get(n, 0) + 1
        out = relative_area(P, O, word, max_area=max_area, max_len=max_len,
                            max_states=max_states)
        if isinstance(out, Unknown):
            per_len_exact[n] = False
        else:
            per_len_max[n] = max(per_len_max.get(n, 0), out.area)
    entries = {}
    best = 0
    count = 0
    exact = True
    for n in range(1, n_max + 1):
        best = max(best, per_len_max.get(n, 0))
        count += per_len_count.get(n, 0)
        exact = exact and per_len_exact.get(n, True)
        entries[n] = ProfileEntry(max_area=best, loop_count=count, exact=exact)
    return DehnProfile(entries=entries, rho=rho, max_area=max_area,
                       max_len=max_len)


@dataclass(frozen=True)
class DominanceReport:
    holds: bool
    constants: tuple
    failures: tuple = ()

    def __bool__(self) -> bool:
        return self.holds


def check_asymptotic_dominance(f: DehnProfile, g: DehnProfile, C: float,
                               K: float, L: float,
                               ns=None) -> DominanceReport:
    """Check f(n) <= g(ceil(C n + K)) + L n pointwise on ns (default: all of
    f's entries).  Raises ValueError when g does not cover an index."""
    if ns is None:
        ns = sorted(f.entries)
    failures = []
    for n in ns:
        m = int(np.ceil(C * n + K))
        if m < 1:
            m = 1
        if m not in g.entries:
            raise ValueError(
                f"dominance index {m} outside the covered range of g")
        lhs = f.entries[n].max_area
        rhs = g.entries[m].max_area + L * n
        if lhs > rhs:
            failures.append((n, lhs, rhs))
    return DominanceReport(holds=not failures, constants=(C, K, L),
                           failures=tuple(failures))


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    max_residual: float
    verdict: str  # "linear-consistent" or "superlinear-witness"


def linear_fit(profile: DehnProfile) -> LinearFit:
    """Least-squares line through the exact profile entries, with a
    second-difference superlinearity verdict.

    The verdict is "superlinear-witness" only when the trailing second
    differences (at least two of them) are all positive; oscillating or flat
    tails read as "linear-consistent".
    """
    pts = [(n, e.max_area) for n, e in sorted(profile.entries.items())
           if e.exact]
    if len(pts) < 3:
        raise ValueError("need at least three exact entries to fit")
    xs = np.array([p[0] for p in pts], dtype=float)
    ys = np.array([p[1] for p in pts], dtype=float)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = float(np.max(np.abs(ys - (slope * xs + intercept))))
    d2 = np.diff(ys, 2)
    tail = d2[-max(2, len(d2) // 2):]
    verdict = "superlinear-witness" if len(tail) >= 2 and np.all(tail > 0) \
        else "linear-consistent"
    return LinearFit(slope=float(slope), intercept=float(intercept),
                     max_residual=resid, verdict=verdict)


@dataclass(frozen=True)
class RhoEscalationReport:
    n: int
    rows: tuple  # (rho, max_area, exact)
    unbounded_witness: bool


def rho_escalation(P: RelativePresentation, O, n: int, rhos,
                   max_area: int = 32, max_len: int = 64) -> RhoEscalationReport:
    """Dehn profile entry at fixed relative length n for growing peripheral
    truncations; a strictly increasing exact row set witnesses that the
    profile entry is unbounded in rho."""
    rows = []
    for rho in rhos:
        prof = dehn_profile(P, O, n_max=n, rho=rho, max_area=max_area,
                            max_len=max_len)
        e = prof.entry(n)
        rows.append((rho, e.max_area, e.exact))
    values = [r[1] for r in rows]
    exact = all(r[2] for r in rows)
    unbounded = exact and all(b > a for a, b in zip(values, values[1:]))
    return RhoEscalationReport(n=n, rows=tuple(rows),
                               unbounded_witness=unbounded)
