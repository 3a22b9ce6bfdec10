"""Word-problem oracles for groups given by a relative presentation.

An oracle answers normal-form and equality queries for the presented group.
Four kinds are supported: the ambient free product itself (valid only when
there are no relators), homomorphisms onto subgroups of Z^d, finite quotients
given by a multiplication table, and external plugin executables speaking a
line-delimited JSON protocol.  Construction checks that every relator maps to
the identity; everything else is the caller's trust boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
import subprocess
import threading

from .errors import OracleInvalidError, ParseError
from .presentation import (
    EMPTY_WORD,
    FiniteTableModel,
    FreeAbelianModel,
    FreeGroupModel,
    HLetter,
    RelativePresentation,
    Word,
    XLetter,
    decode_word,
    encode_word,
    free_reduce,
)

# ---------------------------------------------------------------------------
# integer linear algebra over Z (column echelon with recorded transform)


def column_echelon(A: list[list[int]]):
    """Bring A into column echelon form by unimodular column operations.

    Returns (H, V, pivots) with A @ V = H, V unimodular, and pivots a list of
    (row, col) positions; columns at index >= len(pivots) are zero.
    """
    d = len(A)
    m = len(A[0]) if d else 0
    H = [list(row) for row in A]
    V = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    col = 0
    for row in range(d):
        piv = next((j for j in range(col, m) if H[row][j] != 0), None)
        if piv is None:
            continue
        _col_swap(H, V, col, piv)
        for j in range(col + 1, m):
            while H[row][j] != 0:
                q = H[row][col] // H[row][j]
                _col_addmul(H, V, col, j, -q)
                _col_swap(H, V, col, j)
        if H[row][col] < 0:
            _col_addmul(H, V, col, col, -2)
        col += 1
    pivots = []
    r = 0
    for c in range(col):
        while H[r][c] == 0:
            r += 1
        pivots.append((r, c))
        r += 1
    return H, V, pivots


def _col_swap(H, V, a, b):
    if a == b:
        return
    for M in (H, V):
        for r in M:
            r[a], r[b] = r[b], r[a]


def _col_addmul(H, V, dst, src, q):
    for M in (H, V):
        for r in M:
            r[dst] += q * r[src]


def integer_kernel(A: list[list[int]]) -> list[tuple[int, ...]]:
    """Basis of { y : A y = 0 } as a sublattice of Z^m (saturated)."""
    m = len(A[0]) if A else 0
    _, V, pivots = column_echelon(A)
    return [tuple(V[i][j] for i in range(m)) for j in range(len(pivots), m)]


def solve_integer(A: list[list[int]], target: list[int]):
    """One integer solution y of A y = target, or None."""
    H, V, pivots = column_echelon(A)
    m = len(V)
    t = list(target)
    z = [0] * m
    for row, col in pivots:
        if t[row] % H[row][col] != 0:
            return None
        z[col] = t[row] // H[row][col]
        for i in range(len(t)):
            t[i] -= z[col] * H[i][col]
    if any(t):
        return None
    return tuple(sum(V[i][j] * z[j] for j in range(m)) for i in range(m))


def row_echelon_lattice(rows: list) -> list[tuple[int, ...]]:
    """Echelon basis (positive pivots, rows sorted by pivot column) of the
    lattice spanned by the given integer rows.  Suitable for reduce_mod."""
    if not rows:
        return []
    m = len(rows[0])
    A = [[rows[j][i] for j in range(len(rows))] for i in range(m)]  # transpose
    H, _, pivots = column_echelon(A)
    return [tuple(H[i][c] for i in range(m)) for _, c in pivots]


def reduce_mod(ech_rows: list, vec) -> tuple[int, ...]:
    """Canonical representative of vec modulo the lattice with echelon basis."""
    v = list(vec)
    for row in ech_rows:
        j = next(i for i, x in enumerate(row) if x != 0)
        q = v[j] // row[j]
        if q:
            for i in range(len(v)):
                v[i] -= q * row[i]
    return tuple(v)


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Trivial:
    area: int


@dataclass(frozen=True)
class NontrivialCertified:
    witness: Word


# search-side Unknown lives in relhyp.filling; re-exported here for callers
# that only deal with verdicts.


def _check_relators(P: RelativePresentation, oracle):
    for i, r in enumerate(P.relators):
        if not oracle.normal_form(r).is_empty:
            raise OracleInvalidError(
                f"oracle does not kill relator {i}: {r}")


# ---------------------------------------------------------------------------
# free product oracle


class FreeProductOracle:
    """Exact oracle for the ambient free product (no relators allowed)."""

    kind = "free_product"

    def __init__(self, P: RelativePresentation, config: dict | None = None):
        if P.relators:
            raise OracleInvalidError(
                "free product oracle requires an empty relator list")
        self.P = P
        self.config = config or {"kind": self.kind}

    def normal_form(self, w: Word) -> Word:
        return free_reduce(self.P, w)

    def element_key(self, w: Word):
        return self.normal_form(w)

    def equal(self, a: Word, b: Word) -> bool:
        return self.normal_form(a + self.P.inverse_word(b)).is_empty

    def is_trivial(self, w: Word) -> bool:
        return self.normal_form(w).is_empty

    def in_peripheral(self, w: Word, lam: int) -> bool:
        nf = self.normal_form(w)
        if nf.is_empty:
            return True
        return len(nf) == 1 and isinstance(nf[0], HLetter) and nf[0].lam == lam

    def coset_key(self, w: Word, lam: int):
        nf = self.normal_form(w)
        if nf.letters and isinstance(nf[-1], HLetter) and nf[-1].lam == lam:
            nf = Word(nf.letters[:-1])
        return nf


# ---------------------------------------------------------------------------
# integer quotient oracle


class IntegerQuotientOracle:
    """Oracle through a homomorphism of the free product onto a subgroup of
    Z^d, given by image vectors for free-group symbols and peripheral model
    generators.  Finite-table models necessarily map to zero.  Faithfulness on
    the presented group is the caller's claim; relators are verified to die.
    """

    kind = "integer_quotient"

    def __init__(self, P: RelativePresentation, dim: int,
                 x_images: dict[str, tuple[int, ...]] | None = None,
                 model_images: dict[int, list] | None = None,
                 config: dict | None = None):
        if dim < 1:
            raise OracleInvalidError("dim must be positive")
        self.P = P
        self.dim = dim
        x_images = x_images or {}
        model_images = model_images or {}
        for sym in x_images:
            if sym not in P.x_symbols:
                raise OracleInvalidError(f"image for unknown symbol {sym!r}")
        for lam in model_images:
            if lam not in P.models:
                raise OracleInvalidError(f"image for unknown model label {lam}")

        columns: list[tuple[int, ...]] = []
        self._x_col: dict[str, int] = {}
        self._model_cols: dict[int, tuple[int, int]] = {}  # lam -> (start, count)
        for sym in P.x_symbols:
            self._x_col[sym] = len(columns)
            columns.append(self._vec(x_images.get(sym), f"x image {sym!r}"))
        for lam in sorted(P.models):
            model = P.models[lam]
            given = model_images.get(lam)
            if isinstance(model, FiniteTableModel):
                if given is not None and any(any(v) for v in
                                             (self._vec(g, "finite image")
                                              for g in given)):
                    raise OracleInvalidError(
                        f"finite model {lam} cannot map nontrivially to Z^{dim}")
                self._model_cols[lam] = (len(columns), 0)
                continue
            rank = model.rank
            if given is None:
                given = [None] * rank
            if len(given) != rank:
                raise OracleInvalidError(
                    f"model {lam} needs {rank} generator images")
            self._model_cols[lam] = (len(columns), rank)
            for i, g in enumerate(given):
                columns.append(self._vec(g, f"model {lam} generator {i}"))

        self._m = len(columns)
        self._A = [[columns[j][i] for j in range(self._m)] for i in range(dim)]
        self._kernel_ech = row_echelon_lattice(integer_kernel(self._A))
        self._perip_lattices = {
            lam: row_echelon_lattice(
                [tuple(self._A[i][start + j] for i in range(dim))
                 for j in range(count)])
            for lam, (start, count) in self._model_cols.items()
        }
        self.config = config or {"kind": self.kind, "dim": dim}
        _check_relators(P, self)

    def _vec(self, v, what) -> tuple[int, ...]:
        if v is None:
            return (0,) * self.dim
        v = tuple(v)
        if len(v) != self.dim or not all(isinstance(c, int) for c in v):
            raise OracleInvalidError(f"{what}: expected {self.dim} integers")
        return v

    # exponent vector in the generator slots
    def _epsilon(self, w: Word) -> list[int]:
        eps = [0] * self._m
        for l in w:
            if isinstance(l, XLetter):
                eps[self._x_col[l.sym]] += l.sign
            else:
                model = self.P.models[l.lam]
                start, count = self._model_cols[l.lam]
                if isinstance(model, FreeAbelianModel):
                    for i in range(count):
                        eps[start + i] += l.elem[i]
                elif isinstance(model, FreeGroupModel):
                    for t in l.elem:
                        eps[start + abs(t) - 1] += 1 if t > 0 else -1
                # finite model letters map to zero
        return eps

    def image_vector(self, w: Word) -> tuple[int, ...]:
        eps = self._epsilon(w)
        return tuple(sum(self._A[i][j] * eps[j] for j in range(self._m))
                     for i in range(self.dim))

    def x_image(self, sym: str) -> tuple[int, ...]:
        col = self._x_col[sym]
        return tuple(self._A[i][col] for i in range(self.dim))

    def model_image_rows(self, lam: int) -> tuple[tuple[int, ...], ...]:
        start, count = self._model_cols[lam]
        return tuple(tuple(self._A[i][start + j] for i in range(self.dim))
                     for j in range(count))

    def element_key(self, w: Word):
        return reduce_mod(self._kernel_ech, self._epsilon(w))

    def _word_from_slots(self, eps) -> Word:
        letters: list = []
        for sym in self.P.x_symbols:
            c = eps[self._x_col[sym]]
            letters.extend([XLetter(sym, 1 if c > 0 else -1)] * abs(c))
        for lam in sorted(self.P.models):
            start, count = self._model_cols[lam]
            if count == 0:
                continue
            block = tuple(eps[start + i] for i in range(count))
            if not any(block):
                continue
            model = self.P.models[lam]
            if isinstance(model, FreeAbelianModel):
                letters.append(HLetter(lam, block))
            else:
                elem: list[int] = []
                for i, c in enumerate(block):
                    elem.extend([(i + 1) if c > 0 else -(i + 1)] * abs(c))
                letters.append(HLetter(lam, tuple(elem)))
        return Word(tuple(letters))

    def normal_form(self, w: Word) -> Word:
        return self._word_from_slots(self.element_key(w))

    def equal(self, a: Word, b: Word) -> bool:
        return self.element_key(a) == self.element_key(b)

    def is_trivial(self, w: Word) -> bool:
        return not any(self.element_key(w))

    def in_peripheral(self, w: Word, lam: int) -> bool:
        v = self.image_vector(w)
        return reduce_mod(self._perip_lattices[lam], v) == (0,) * self.dim

    def coset_key(self, w: Word, lam: int):
        return reduce_mod(self._perip_lattices[lam], self.image_vector(w))

    def solve_in_model(self, lam: int, vec):
        """Nonzero model element of label lam with image vec, or None."""
        start, count = self._model_cols[lam]
        if count == 0:
            return None
        sub = [[self._A[i][start + j] for j in range(count)] for i in range(self.dim)]
        sol = solve_integer(sub, list(vec))
        if sol is None or not any(sol):
            return None
        model = self.P.models[lam]
        if isinstance(model, FreeAbelianModel):
            return tuple(sol)
        elem: list[int] = []
        for i, c in enumerate(sol):
            elem.extend([(i + 1) if c > 0 else -(i + 1)] * abs(c))
        return tuple(elem)


# ---------------------------------------------------------------------------
# finite quotient oracle


class FiniteQuotientOracle:
    """Oracle through a surjection-onto-its-image into a finite group given by
    a multiplication table, with evaluation data for every generator."""

    kind = "finite_quotient"

    def __init__(self, P: RelativePresentation, quotient: FiniteTableModel,
                 x_images: dict[str, int] | None = None,
                 model_images: dict[int, list[int]] | None = None,
                 config: dict | None = None):
        self.P = P
        self.Q = quotient
        x_images = x_images or {}
        model_images = model_images or {}
        self._x_img: dict[str, int] = {}
        for sym in P.x_symbols:
            img = x_images.get(sym, quotient.identity_index)
            quotient.validate(img)
            self._x_img[sym] = img
        self._gen_img: dict[int, list[int]] = {}
        for lam in sorted(P.models):
            model = P.models[lam]
            given = model_images.get(lam)
            if isinstance(model, FiniteTableModel):
                if given is None:
                    given = [quotient.identity_index] * model.size
                if len(given) != model.size:
                    raise OracleInvalidError(
                        f"model {lam} needs one image per element")
                for a in range(model.size):
                    for b in range(model.size):
                        lhs = quotient.product(given[a], given[b])
                        if lhs != given[model.product(a, b)]:
                            raise OracleInvalidError(
                                f"model {lam} images are not a homomorphism "
                                f"at ({a}, {b})")
            else:
                rank = model.rank
                if given is None:
                    given = [quotient.identity_index] * rank
                if len(given) != rank:
                    raise OracleInvalidError(
                        f"model {lam} needs {rank} generator images")
                for g in given:
                    quotient.validate(g)
                if isinstance(model, FreeAbelianModel):
                    for i in range(rank):
                        for j in range(i + 1, rank):
                            if quotient.product(given[i], given[j]) != \
                                    quotient.product(given[j], given[i]):
                                raise OracleInvalidError(
                                    f"model {lam} generator images must commute")
            self._gen_img[lam] = list(given)

        self._subgroups = {lam: self._generated_subgroup(lam)
                           for lam in sorted(P.models)}
        self._canonical = self._canonical_words()
        self._rel_dist, self._rel_witness = self._relative_distances()
        self.config = config or {"kind": self.kind}
        _check_relators(P, self)

    def _pow(self, base: int, k: int) -> int:
        if k < 0:
            base, k = self.Q.inverse(base), -k
        out = self.Q.identity_index
        for _ in range(k):
            out = self.Q.product(out, base)
        return out

    def eval_letter(self, l) -> int:
        if isinstance(l, XLetter):
            img = self._x_img[l.sym]
            return img if l.sign > 0 else self.Q.inverse(img)
        model = self.P.models[l.lam]
        imgs = self._gen_img[l.lam]
        if isinstance(model, FiniteTableModel):
            return imgs[l.elem]
        if isinstance(model, FreeAbelianModel):
            out = self.Q.identity_index
            for i, k in enumerate(l.elem):
                out = self.Q.product(out, self._pow(imgs[i], k))
            return out
        out = self.Q.identity_index
        for t in l.elem:
            g = imgs[abs(t) - 1]
            out = self.Q.product(out, g if t > 0 else self.Q.inverse(g))
        return out

    def eval_word(self, w: Word) -> int:
        out = self.Q.identity_index
        for l in w:
            out = self.Q.product(out, self.eval_letter(l))
        return out

    def _generator_letters(self):
        """Single-letter alphabet used for canonical-word search, in a fixed
        deterministic order."""
        letters = []
        for sym in self.P.x_symbols:
            letters.append(XLetter(sym, 1))
            letters.append(XLetter(sym, -1))
        for lam in sorted(self.P.models):
            model = self.P.models[lam]
            if isinstance(model, FiniteTableModel):
                for e in model.generators():
                    letters.append(HLetter(lam, e))
            elif isinstance(model, FreeAbelianModel):
                for g in model.generators():
                    letters.append(HLetter(lam, g))
                    letters.append(HLetter(lam, model.inverse(g)))
            else:
                for g in model.generators():
                    letters.append(HLetter(lam, g))
                    letters.append(HLetter(lam, model.inverse(g)))
        return letters

    def _canonical_words(self):
        words: dict[int, Word] = {self.Q.identity_index: EMPTY_WORD}
        frontier = [self.Q.identity_index]
        alphabet = self._generator_letters()
        while frontier:
            nxt = []
            for g in frontier:
                for l in alphabet:
                    t = self.Q.product(g, self.eval_letter(l))
                    if t not in words:
                        words[t] = free_reduce(self.P, words[g] + Word((l,)))
                        nxt.append(t)
            frontier = nxt
        return words

    def _generated_subgroup(self, lam: int) -> frozenset[int]:
        seen = {self.Q.identity_index}
        frontier = [self.Q.identity_index]
        gens = [g for g in self._gen_img[lam]]
        gens += [self.Q.inverse(g) for g in gens]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    t = self.Q.product(a, g)
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
            frontier = nxt
        return frozenset(seen)

    def _model_element_for(self, lam: int, target: int):
        """Shortest model element whose image is target (BFS in the model's
        generator images), deterministic.  None if unreachable."""
        model = self.P.models[lam]
        if isinstance(model, FiniteTableModel):
            for e in model.generators():
                if self._gen_img[lam][e] == target:
                    return e
            return None
        seen = {self.Q.identity_index: model.identity()}
        frontier = [self.Q.identity_index]
        steps = []
        for i, img in enumerate(self._gen_img[lam]):
            if isinstance(model, FreeAbelianModel):
                g = model.generators()[i]
            else:
                g = (i + 1,)
            steps.append((g, img))
            steps.append((model.inverse(g), self.Q.inverse(img)))
        while frontier:
            nxt = []
            for q in frontier:
                for g, img in steps:
                    t = self.Q.product(q, img)
                    if t not in seen:
                        seen[t] = model.product(seen[q], g)
                        nxt.append(t)
            frontier = nxt
            if target in seen:
                break
        return seen.get(target)

    def _relative_distances(self):
        """BFS where one step multiplies by any single-letter image: distances
        and geodesic witness words over actual letters."""
        steps: list[tuple] = []
        for sym in self.P.x_symbols:
            for sign in (1, -1):
                l = XLetter(sym, sign)
                steps.append((self.eval_letter(l), l))
        for lam in sorted(self.P.models):
            for s in sorted(self._subgroups[lam]):
                if s == self.Q.identity_index:
                    continue
                e = self._model_element_for(lam, s)
                if e is not None:
                    steps.append((s, HLetter(lam, e)))
        dist = {self.Q.identity_index: 0}
        wit = {self.Q.identity_index: EMPTY_WORD}
        frontier = [self.Q.identity_index]
        while frontier:
            nxt = []
            for g in frontier:
                for img, l in steps:
                    t = self.Q.product(g, img)
                    if t not in dist:
                        dist[t] = dist[g] + 1
                        wit[t] = wit[g] + Word((l,))
                        nxt.append(t)
            frontier = nxt
        return dist, wit

    def normal_form(self, w: Word) -> Word:
        g = self.eval_word(w)
        if g not in self._canonical:
            # unreachable from generators cannot occur for genuine words
            raise OracleInvalidError(f"element {g} not generated")
        return self._canonical[g]

    def element_key(self, w: Word):
        return self.eval_word(w)

    def equal(self, a: Word, b: Word) -> bool:
        return self.eval_word(a) == self.eval_word(b)

    def is_trivial(self, w: Word) -> bool:
        return self.eval_word(w) == self.Q.identity_index

    def in_peripheral(self, w: Word, lam: int) -> bool:
        return self.eval_word(w) in self._subgroups[lam]

    def coset_key(self, w: Word, lam: int):
        g = self.eval_word(w)
        return min(self.Q.product(g, s) for s in self._subgroups[lam])

    def relative_distance(self, w: Word) -> int:
        return self._rel_dist[self.eval_word(w)]

    def geodesic_word(self, w: Word) -> Word:
        return self._rel_witness[self.eval_word(w)]


# ---------------------------------------------------------------------------
# plugin oracle


class PluginOracle:
    """Normal forms computed by an external executable.

    Protocol: one request per line, a JSON array of letter objects in the
    presentation's encoding; the reply line is the canonical word in the same
    encoding.  The subprocess is started lazily and kept alive.
    """

    kind = "plugin"

    def __init__(self, P: RelativePresentation, command: list[str],
                 config: dict | None = None):
        if not command or not all(isinstance(c, str) for c in command):
            raise ParseError("plugin command must be a list of strings", "oracle")
        self.P = P
        self.command = list(command)
        self.config = config or {"kind": self.kind, "command": self.command}
        self._proc: subprocess.Popen | None = None
        self._lock = threading.Lock()
        self._cache: dict[tuple, Word] = {}
        _check_relators(P, self)

    def _ensure(self):
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, bufsize=1)

    def close(self):
        if self._proc is not None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except Exception:
                self._proc.kill()
            self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def normal_form(self, w: Word) -> Word:
        key = tuple(w.letters)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        with self._lock:
            self._ensure()
            line = json.dumps(encode_word(self.P, w))
            try:
                self._proc.stdin.write(line + "\n")
                self._proc.stdin.flush()
                reply = self._proc.stdout.readline()
            except (BrokenPipeError, OSError) as exc:
                raise OracleInvalidError(f"plugin pipe failed: {exc}") from None
        if not reply:
            raise OracleInvalidError("plugin closed its output stream")
        try:
            nf = decode_word(self.P, json.loads(reply), "plugin reply")
        except (json.JSONDecodeError, ParseError) as exc:
            raise OracleInvalidError(f"bad plugin reply: {exc}") from None
        self._cache[key] = nf
        return nf

    def element_key(self, w: Word):
        return self.normal_form(w)

    def equal(self, a: Word, b: Word) -> bool:
        return self.normal_form(a + self.P.inverse_word(b)).is_empty

    def is_trivial(self, w: Word) -> bool:
        return self.normal_form(w).is_empty

    def in_peripheral(self, w: Word, lam: int) -> bool:
        # certificate-style approximation: a canonical form that is a single
        # syllable of this label proves membership; anything else is treated
        # as outside
        nf = self.normal_form(w)
        if nf.is_empty:
            return True
        return len(nf) == 1 and isinstance(nf[0], HLetter) and nf[0].lam == lam

    def coset_key(self, w: Word, lam: int):
        nf = self.normal_form(w)
        if nf.letters and isinstance(nf[-1], HLetter) and nf[-1].lam == lam:
            nf = Word(nf.letters[:-1])
        return nf


GroupOracle = FreeProductOracle | IntegerQuotientOracle | FiniteQuotientOracle | PluginOracle


# ---------------------------------------------------------------------------
# configuration


def build_oracle(P: RelativePresentation, config: dict) -> GroupOracle:
    """Construct an oracle from the JSON 'oracle' object of a document."""
    if not isinstance(config, dict):
        raise ParseError("oracle must be an object", "oracle")
    kind = config.get("kind")
    if kind == "free_product":
        return FreeProductOracle(P, config)
    if kind == "integer_quotient":
        dim = config.get("dim")
        if not isinstance(dim, int):
            raise ParseError("integer_quotient needs an integer dim", "oracle.dim")
        x_images = {sym: tuple(v) for sym, v in (config.get("x_images") or {}).items()}
        model_images = {}
        for key, imgs in (config.get("model_images") or {}).items():
            try:
                lam = int(key)
            except (TypeError, ValueError):
                raise ParseError(f"bad model label {key!r}",
                                 "oracle.model_images") from None
            model_images[lam] = [tuple(v) for v in imgs]
        return IntegerQuotientOracle(P, dim, x_images, model_images, config)
    if kind == "finite_quotient":
        table = config.get("table")
        size = config.get("size")
        if not isinstance(size, int) or not isinstance(table, list):
            raise ParseError("finite_quotient needs size and table", "oracle")
        tbl = tuple(tuple(r) for r in table)
        identity = config.get("identity")
        from .presentation import _derive_inverses, _find_identity
        if identity is None:
            identity = _find_identity(tbl, size, "oracle")
        inverse = config.get("inverse")
        if inverse is None:
            inverse = _derive_inverses(tbl, size, identity, "oracle")
        try:
            Q = FiniteTableModel(size=size, table=tbl,
                                 inverse_table=tuple(inverse),
                                 identity_index=identity)
        except ValueError as exc:
            raise OracleInvalidError(str(exc)) from None
        model_images = {}
        for key, imgs in (config.get("model_images") or {}).items():
            model_images[int(key)] = list(imgs)
        return FiniteQuotientOracle(P, Q, config.get("x_images") or {},
                                    model_images, config)
    if kind == "plugin":
        return PluginOracle(P, config.get("command") or [], config)
    raise ParseError(f"unknown oracle kind {kind!r}", "oracle.kind")


def budgeted_word_problem(P: RelativePresentation, w: Word, max_area: int,
                          max_len: int, oracle: GroupOracle | None = None,
                          max_states: int | None = None):
    """Semi-decide triviality within an area and length budget.

    Returns Trivial(area) when a filling is found, NontrivialCertified when an
    attached oracle refutes triviality, and filling.Unknown otherwise.  The
    search alone never certifies nontriviality.
    """
    from . import filling

    if oracle is not None:
        nf = oracle.normal_form(w)
        if not nf.is_empty:
            return NontrivialCertified(nf)
    out = filling.relative_area(P, oracle, w, max_area=max_area,
                                max_len=max_len, max_states=max_states,
                                check_trivial=False)
    if isinstance(out, filling.FillingCertificate):
        return Trivial(out.area)
    return out
