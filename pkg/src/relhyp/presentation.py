"""Finite relative presentations over free products of concrete peripheral models.

A presentation holds a finite list of free-group symbols, a family of
peripheral models indexed by integer labels, and a list of relator words.
Words mix two letter kinds: signed free-group letters and peripheral letters
carrying a nonidentity model element.  A peripheral letter always counts as a
single letter regardless of how large its model element is.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
from typing import Iterable, Iterator, Union

from .errors import ParseError


# ---------------------------------------------------------------------------
# peripheral models


def _reduce_free_tuple(rank: int, letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for a in letters:
        if not isinstance(a, int) or a == 0 or abs(a) > rank:
            raise ValueError(f"free model letter out of range: {a!r}")
        if stack and stack[-1] == -a:
            stack.pop()
        else:
            stack.append(a)
    return tuple(stack)


@dataclass(frozen=True)
class FreeAbelianModel:
    """Z^rank with elements stored as integer tuples."""

    rank: int
    kind: str = field(default="Z^d", init=False)

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")

    def identity(self):
        return (0,) * self.rank

    def is_identity(self, e) -> bool:
        return all(c == 0 for c in e)

    def validate(self, e):
        if not (isinstance(e, tuple) and len(e) == self.rank
                and all(isinstance(c, int) for c in e)):
            raise ValueError(f"not a Z^{self.rank} element: {e!r}")
        return e

    def product(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inverse(self, a):
        return tuple(-x for x in a)

    def length(self, e) -> int:
        # word length in the unit-vector generators
        return sum(abs(c) for c in e)

    def generators(self):
        out = []
        for i in range(self.rank):
            v = [0] * self.rank
            v[i] = 1
            out.append(tuple(v))
        return out

    def elements_up_to(self, bound: int):
        """Nonidentity elements of generator length <= bound, deterministic order."""

        def rec(prefix, remaining, k):
            if k == self.rank:
                yield tuple(prefix)
                return
            for c in range(-remaining, remaining + 1):
                yield from rec(prefix + [c], remaining - abs(c), k + 1)

        for e in sorted(rec([], bound, 0)):
            if not self.is_identity(e):
                yield e

    def encode(self, e):
        return e[0] if self.rank == 1 else list(e)

    def decode(self, obj, path=""):
        if self.rank == 1 and isinstance(obj, int):
            return (obj,)
        if isinstance(obj, list) and len(obj) == self.rank \
                and all(isinstance(c, int) for c in obj):
            return tuple(obj)
        raise ParseError(f"bad Z^{self.rank} element {obj!r}", path)


@dataclass(frozen=True)
class FiniteTableModel:
    """A finite group given by its multiplication table.

    Elements are indices 0..size-1.  ``table[a][b]`` is the product, and the
    generating set implicit in the length function is every nonidentity
    element, so nonidentity lengths are all 1.
    """

    size: int
    table: tuple[tuple[int, ...], ...]
    inverse_table: tuple[int, ...]
    identity_index: int
    names: tuple[str, ...] | None = None
    kind: str = field(default="finite", init=False)

    def __post_init__(self):
        n = self.size
        if n < 1 or len(self.table) != n or any(len(r) != n for r in self.table):
            raise ValueError("table shape does not match size")
        if any(not (0 <= v < n) for r in self.table for v in r):
            raise ValueError("table entry out of range")
        e = self.identity_index
        if not (0 <= e < n):
            raise ValueError("identity index out of range")
        for a in range(n):
            if self.table[e][a] != a or self.table[a][e] != a:
                raise ValueError(f"identity index {e} fails at {a}")
            b = self.inverse_table[a]
            if self.table[a][b] != e or self.table[b][a] != e:
                raise ValueError(f"inverse table wrong at {a}")
        # associativity: full check for small tables, fixed sample otherwise
        triples = (
            ((a, b, c) for a in range(n) for b in range(n) for c in range(n))
            if n <= 24 else _assoc_sample(n)
        )
        for a, b, c in triples:
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise ValueError(f"table not associative at {(a, b, c)}")
        if self.names is not None and (len(self.names) != n
                                       or len(set(self.names)) != n):
            raise ValueError("names must be distinct, one per element")

    def identity(self):
        return self.identity_index

    def is_identity(self, e) -> bool:
        return e == self.identity_index

    def validate(self, e):
        if not (isinstance(e, int) and 0 <= e < self.size):
            raise ValueError(f"not an element index: {e!r}")
        return e

    def product(self, a, b):
        return self.table[a][b]

    def inverse(self, a):
        return self.inverse_table[a]

    def length(self, e) -> int:
        return 0 if e == self.identity_index else 1

    def generators(self):
        return [a for a in range(self.size) if a != self.identity_index]

    def elements_up_to(self, bound: int):
        if bound >= 1:
            yield from self.generators()

    def encode(self, e):
        return e

    def decode(self, obj, path=""):
        if isinstance(obj, int) and 0 <= obj < self.size:
            return obj
        if isinstance(obj, str) and self.names and obj in self.names:
            return self.names.index(obj)
        raise ParseError(f"bad finite element {obj!r}", path)


def _assoc_sample(n):
    # deterministic pseudo-random triples, enough to catch a broken table
    x = 123456789
    for _ in range(2000):
        x = (x * 6364136223846793005 + 1442695040888963407) % (1 << 64)
        yield (x % n, (x >> 20) % n, (x >> 40) % n)


@dataclass(frozen=True)
class FreeGroupModel:
    """Free group of given rank; elements are reduced tuples of nonzero ints."""

    rank: int
    kind: str = field(default="F_k", init=False)

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")

    def identity(self):
        return ()

    def is_identity(self, e) -> bool:
        return len(e) == 0

    def validate(self, e):
        if not isinstance(e, tuple):
            raise ValueError(f"not a free model element: {e!r}")
        if _reduce_free_tuple(self.rank, e) != e:
            raise ValueError(f"free model element not reduced: {e!r}")
        return e

    def product(self, a, b):
        return _reduce_free_tuple(self.rank, tuple(a) + tuple(b))

    def inverse(self, a):
        return tuple(-x for x in reversed(a))

    def length(self, e) -> int:
        return len(e)

    def generators(self):
        return [(i,) for i in range(1, self.rank + 1)]

    def elements_up_to(self, bound: int):
        """Reduced words of length 1..bound, shortest first then lexicographic."""
        alphabet = sorted(
            [i for i in range(1, self.rank + 1)] + [-i for i in range(1, self.rank + 1)]
        )
        frontier = [()]
        for _ in range(bound):
            nxt = []
            for w in frontier:
                for a in alphabet:
                    if w and w[-1] == -a:
                        continue
                    nxt.append(w + (a,))
            nxt.sort()
            yield from nxt
            frontier = nxt

    def encode(self, e):
        return list(e)

    def decode(self, obj, path=""):
        if isinstance(obj, list) and all(isinstance(c, int) for c in obj):
            try:
                return _reduce_free_tuple(self.rank, obj)
            except ValueError as exc:
                raise ParseError(str(exc), path) from None
        raise ParseError(f"bad F_{self.rank} element {obj!r}", path)


PeripheralModel = Union[FreeAbelianModel, FiniteTableModel, FreeGroupModel]


# ---------------------------------------------------------------------------
# letters and words


@dataclass(frozen=True)
class XLetter:
    sym: str
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def inverse(self) -> "XLetter":
        return XLetter(self.sym, -self.sign)


@dataclass(frozen=True)
class HLetter:
    lam: int
    elem: object  # int or tuple, owned by the model with this label


Letter = Union[XLetter, HLetter]


def _elem_key(e):
    if isinstance(e, int):
        return (0, (e,))
    return (1, (len(e),) + tuple(e))


def letter_key(letter: Letter):
    """Total order on letters used wherever a deterministic choice is needed."""
    if isinstance(letter, XLetter):
        return (0, letter.sym, 0 if letter.sign > 0 else 1, (0, ()))
    return (1, str(letter.lam), letter.lam, _elem_key(letter.elem))


@dataclass(frozen=True)
class Word:
    letters: tuple[Letter, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __getitem__(self, i):
        got = self.letters[i]
        return Word(got) if isinstance(i, slice) else got

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    @property
    def is_empty(self) -> bool:
        return not self.letters

    def sort_key(self):
        return (len(self.letters), tuple(letter_key(l) for l in self.letters))


EMPTY_WORD = Word()


def letter_count(w: Word) -> int:
    """Relative length of a word: every letter counts 1, peripheral or not."""
    return len(w)


# ---------------------------------------------------------------------------
# presentation


@dataclass(frozen=True)
class RelativePresentation:
    x_symbols: tuple[str, ...]
    models: dict[int, PeripheralModel]
    relators: tuple[Word, ...]

    def __post_init__(self):
        if len(set(self.x_symbols)) != len(self.x_symbols):
            raise ValueError("duplicate free-group symbols")
        for s in self.x_symbols:
            if not (isinstance(s, str) and s):
                raise ValueError(f"bad symbol {s!r}")
        for lam in self.models:
            if not isinstance(lam, int):
                raise ValueError("model labels must be integers")
        reduced = []
        for r in self.relators:
            self.validate_word(r)
            r = cyclically_reduce(self, r)
            if r.is_empty:
                raise ValueError("relator reduces to the empty word")
            reduced.append(r)
        object.__setattr__(self, "relators", tuple(reduced))

    def validate_word(self, w: Word):
        for l in w:
            self.validate_letter(l)
        return w

    def validate_letter(self, l: Letter):
        if isinstance(l, XLetter):
            if l.sym not in self.x_symbols:
                raise ValueError(f"unknown free-group symbol {l.sym!r}")
        elif isinstance(l, HLetter):
            model = self.models.get(l.lam)
            if model is None:
                raise ValueError(f"unknown model label {l.lam}")
            model.validate(l.elem)
            if model.is_identity(l.elem):
                raise ValueError(
                    f"identity peripheral letter for model {l.lam} is not allowed")
        else:
            raise ValueError(f"not a letter: {l!r}")
        return l

    def inverse_letter(self, l: Letter) -> Letter:
        if isinstance(l, XLetter):
            return l.inverse()
        return HLetter(l.lam, self.models[l.lam].inverse(l.elem))

    def inverse_word(self, w: Word) -> Word:
        return Word(tuple(self.inverse_letter(l) for l in reversed(w.letters)))


def free_reduce(P: RelativePresentation, w: Word, _trace: list | None = None) -> Word:
    """Normal form in the ambient free product.

    Adjacent peripheral letters with the same label are multiplied in their
    model (dropping the pair if the product is the identity) and inverse
    free-group letter pairs cancel, repeated to a fixpoint.  When ``_trace``
    is given, one ("h_merge", pos) or ("x_cancel", pos) event is appended per
    elementary step, positions indexed in the word as it stood at that step.
    """
    stack: list[Letter] = []
    for l in w:
        stack.append(l)
        while len(stack) >= 2:
            a, b = stack[-2], stack[-1]
            if isinstance(a, XLetter) and isinstance(b, XLetter) \
                    and a.sym == b.sym and a.sign == -b.sign:
                if _trace is not None:
                    _trace.append(("x_cancel", len(stack) - 2))
                stack.pop()
                stack.pop()
            elif isinstance(a, HLetter) and isinstance(b, HLetter) and a.lam == b.lam:
                if _trace is not None:
                    _trace.append(("h_merge", len(stack) - 2))
                model = P.models[a.lam]
                prod = model.product(a.elem, b.elem)
                stack.pop()
                stack.pop()
                if not model.is_identity(prod):
                    stack.append(HLetter(a.lam, prod))
            else:
                break
    return Word(tuple(stack))


def cyclically_reduce(P: RelativePresentation, w: Word) -> Word:
    """Freely reduce, then fold combinable first/last letters around the seam."""
    w = free_reduce(P, w)
    while len(w) >= 2:
        first, last = w.letters[0], w.letters[-1]
        foldable = (
            (isinstance(first, XLetter) and isinstance(last, XLetter)
             and first.sym == last.sym and first.sign == -last.sign)
            or (isinstance(first, HLetter) and isinstance(last, HLetter)
                and first.lam == last.lam)
        )
        if not foldable:
            break
        w = free_reduce(P, Word((last,) + w.letters[:-1]))
    return w


# ---------------------------------------------------------------------------
# JSON documents

_MODEL_KINDS = ("Z^d", "finite", "F_k")


def _decode_model(obj, path) -> tuple[int, PeripheralModel]:
    if not isinstance(obj, dict):
        raise ParseError("model must be an object", path)
    label = obj.get("label")
    if not isinstance(label, int):
        raise ParseError("model label must be an integer", path + ".label")
    kind = obj.get("kind")
    try:
        if kind == "Z^d":
            return label, FreeAbelianModel(rank=_expect_int(obj, "rank", path))
        if kind == "F_k":
            return label, FreeGroupModel(rank=_expect_int(obj, "rank", path))
        if kind == "finite":
            size = _expect_int(obj, "size", path)
            table = obj.get("table")
            if not isinstance(table, list):
                raise ParseError("finite model needs a table", path + ".table")
            tbl = tuple(tuple(row) for row in table)
            identity = obj.get("identity")
            if identity is None:
                identity = _find_identity(tbl, size, path)
            inv = obj.get("inverse")
            if inv is None:
                inv = _derive_inverses(tbl, size, identity, path)
            names = obj.get("names")
            return label, FiniteTableModel(
                size=size, table=tbl, inverse_table=tuple(inv),
                identity_index=identity,
                names=tuple(names) if names is not None else None)
    except ParseError:
        raise
    except (ValueError, TypeError) as exc:
        raise ParseError(str(exc), path) from None
    raise ParseError(f"unknown model kind {kind!r} (expected one of {_MODEL_KINDS})",
                     path + ".kind")


def _expect_int(obj, key, path):
    v = obj.get(key)
    if not isinstance(v, int):
        raise ParseError(f"{key} must be an integer", f"{path}.{key}")
    return v


def _find_identity(table, size, path):
    if len(table) != size or any(len(r) != size for r in table):
        raise ParseError("table shape does not match size", path + ".table")
    for e in range(size):
        if tuple(table[e]) == tuple(range(size)) \
                and all(table[a][e] == a for a in range(size)):
            return e
    raise ParseError("table has no identity element", path + ".table")


def _derive_inverses(table, size, identity, path):
    inv = []
    for a in range(size):
        for b in range(size):
            if table[a][b] == identity and table[b][a] == identity:
                inv.append(b)
                break
        else:
            raise ParseError(f"element {a} has no inverse", path + ".table")
    return inv


def _encode_model(label: int, model: PeripheralModel) -> dict:
    if isinstance(model, FreeAbelianModel):
        return {"label": label, "kind": "Z^d", "rank": model.rank}
    if isinstance(model, FreeGroupModel):
        return {"label": label, "kind": "F_k", "rank": model.rank}
    doc = {
        "label": label, "kind": "finite", "size": model.size,
        "table": [list(r) for r in model.table],
        "inverse": list(model.inverse_table),
        "identity": model.identity_index,
    }
    if model.names is not None:
        doc["names"] = list(model.names)
    return doc


def decode_letter(P: RelativePresentation, obj, path="") -> Letter:
    if not isinstance(obj, dict):
        raise ParseError(f"letter must be an object, got {obj!r}", path)
    if "x" in obj:
        sym = obj["x"]
        if sym not in P.x_symbols:
            raise ParseError(f"unknown free-group symbol {sym!r}", path)
        sign = obj.get("sign", 1)
        if sign not in (1, -1):
            raise ParseError(f"sign must be 1 or -1, got {sign!r}", path + ".sign")
        return XLetter(sym, sign)
    if "h" in obj:
        entry = obj["h"]
        if not isinstance(entry, dict) or "lambda" not in entry or "elem" not in entry:
            raise ParseError("peripheral letter needs lambda and elem", path)
        lam = entry["lambda"]
        model = P.models.get(lam)
        if model is None:
            raise ParseError(f"unknown model label {lam!r}", path)
        elem = model.decode(entry["elem"], path + ".elem")
        if model.is_identity(elem):
            raise ParseError(
                f"identity peripheral letter for model {lam} is not allowed", path)
        return HLetter(lam, elem)
    raise ParseError("letter must have an 'x' or 'h' key", path)


def encode_letter(P: RelativePresentation, l: Letter) -> dict:
    if isinstance(l, XLetter):
        return {"x": l.sym, "sign": l.sign}
    return {"h": {"lambda": l.lam, "elem": P.models[l.lam].encode(l.elem)}}


def decode_word(P: RelativePresentation, obj, path="") -> Word:
    if not isinstance(obj, list):
        raise ParseError("word must be a list of letters", path)
    return Word(tuple(
        decode_letter(P, o, f"{path}[{i}]") for i, o in enumerate(obj)))


def encode_word(P: RelativePresentation, w: Word) -> list:
    return [encode_letter(P, l) for l in w]


def parse_document(text: str) -> tuple[RelativePresentation, dict | None]:
    """Parse a presentation document; returns the presentation and the raw
    oracle configuration (if any) for the oracle layer to interpret."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: "
                         f"{exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    x = doc.get("x", [])
    if not isinstance(x, list) or not all(isinstance(s, str) for s in x):
        raise ParseError("x must be a list of strings", "x")
    models: dict[int, PeripheralModel] = {}
    for i, mobj in enumerate(doc.get("models", [])):
        label, model = _decode_model(mobj, f"models[{i}]")
        if label in models:
            raise ParseError(f"duplicate model label {label}", f"models[{i}].label")
        models[label] = model
    shell = RelativePresentation(tuple(x), models, ())
    relators = []
    robj = doc.get("relators", [])
    if not isinstance(robj, list):
        raise ParseError("relators must be a list", "relators")
    for i, wobj in enumerate(robj):
        relators.append(decode_word(shell, wobj, f"relators[{i}]"))
    try:
        P = RelativePresentation(tuple(x), models, tuple(relators))
    except ValueError as exc:
        raise ParseError(str(exc), "relators") from None
    oracle = doc.get("oracle")
    if oracle is not None and not isinstance(oracle, dict):
        raise ParseError("oracle must be an object", "oracle")
    return P, oracle


def parse_presentation(text: str) -> RelativePresentation:
    return parse_document(text)[0]


def presentation_to_doc(P: RelativePresentation, oracle: dict | None = None) -> dict:
    doc = {
        "x": list(P.x_symbols),
        "models": [_encode_model(lam, m) for lam, m in sorted(P.models.items())],
        "relators": [encode_word(P, r) for r in P.relators],
    }
    if oracle is not None:
        doc["oracle"] = oracle
    return doc


def serialize_presentation(P: RelativePresentation, oracle: dict | None = None) -> str:
    return json.dumps(presentation_to_doc(P, oracle), sort_keys=True, indent=2)
