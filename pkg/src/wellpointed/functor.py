"""Functor expressions and the terms that inhabit them.

A functor expression names a finitary set functor built from constants, the
identity, products, coproducts, finite exponents and the finite powerset.
Every such functor preserves wide intersections and injections on nonempty
sets, which is what the rest of the package relies on.

An element of ``H(X)`` for a finite carrier ``X = {0, ..., n-1}`` is a
:class:`Term`. Terms are immutable; sets inside them are kept sorted and
duplicate-free under :func:`term_key` once canonicalized.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

from .errors import ParseError, TermTypeError

RESERVED = frozenset({"inj"})
_DELIMS = frozenset("{}()[],:@^+<>\"")


def _is_symchar(ch: str) -> bool:
    return not ch.isspace() and ch not in _DELIMS


def _check_symbols(symbols: Sequence[str], what: str) -> tuple[str, ...]:
    symbols = tuple(symbols)
    seen = set()
    for s in symbols:
        if not s or not all(_is_symchar(c) for c in s):
            raise ValueError(f"invalid symbol {s!r} in {what}")
        if s in RESERVED:
            raise ValueError(f"reserved word {s!r} used as a symbol in {what}")
        if s in seen:
            raise ValueError(f"duplicate symbol {s!r} in {what}")
        seen.add(s)
    return symbols


# --------------------------------------------------------------------------
# functor expressions


@dataclass(frozen=True)
class Const:
    carrier: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "carrier", _check_symbols(self.carrier, "constant"))

    def __str__(self):
        return _fmt(self, 0)


@dataclass(frozen=True)
class Id:
    def __str__(self):
        return "Id"


@dataclass(frozen=True)
class Prod:
    left: "FunctorExpr"
    right: "FunctorExpr"

    def __str__(self):
        return _fmt(self, 0)


@dataclass(frozen=True)
class Coprod:
    summands: tuple["FunctorExpr", ...]

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))
        if len(self.summands) < 2:
            raise ValueError("a coproduct needs at least two summands")

    def __str__(self):
        return _fmt(self, 0)


@dataclass(frozen=True)
class Exp:
    base: "FunctorExpr"
    index: tuple[str, ...]

    def __post_init__(self):
        index = _check_symbols(self.index, "exponent index")
        if not index:
            raise ValueError("empty exponent index")
        object.__setattr__(self, "index", index)

    def __str__(self):
        return _fmt(self, 0)


@dataclass(frozen=True)
class Pow:
    inner: "FunctorExpr"

    def __str__(self):
        return _fmt(self, 0)


FunctorExpr = Union[Const, Id, Prod, Coprod, Exp, Pow]


def _fmt(f: FunctorExpr, level: int) -> str:
    # levels: 0 sum, 1 product, 2 postfix/atom
    if isinstance(f, Id):
        return "Id"
    if isinstance(f, Const):
        return "{" + ",".join(f.carrier) + "}"
    if isinstance(f, Pow):
        return "P(" + _fmt(f.inner, 0) + ")"
    if isinstance(f, Exp):
        return _fmt(f.base, 2) + "^{" + ",".join(f.index) + "}"
    if isinstance(f, Prod):
        s = _fmt(f.left, 1) + "*" + _fmt(f.right, 2)
        return s if level <= 1 else "(" + s + ")"
    if isinstance(f, Coprod):
        s = "+".join(_fmt(g, 1) for g in f.summands)
        return s if level == 0 else "(" + s + ")"
    raise TypeError(f"not a functor expression: {f!r}")


class _FunctorParser:
    def __init__(self, src: str):
        self.src = src
        self.i = 0

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, pos=self.i)

    def ws(self):
        while self.i < len(self.src) and self.src[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.ws()
        return self.src[self.i] if self.i < len(self.src) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            got = self.peek() or "end of input"
            raise self.error(f"expected {ch!r}, got {got!r}")
        self.i += 1

    def parse(self) -> FunctorExpr:
        f = self.sum()
        if self.peek():
            raise self.error(f"unexpected {self.peek()!r}")
        return f

    def sum(self) -> FunctorExpr:
        parts = [self.prod()]
        while self.peek() == "+":
            self.i += 1
            parts.append(self.prod())
        return parts[0] if len(parts) == 1 else Coprod(tuple(parts))

    def prod(self) -> FunctorExpr:
        f = self.postfix()
        while self.peek() == "*":
            self.i += 1
            f = Prod(f, self.postfix())
        return f

    def postfix(self) -> FunctorExpr:
        f = self.atom()
        while self.peek() == "^":
            self.i += 1
            start = self.i
            index = self.symlist()
            if not index:
                self.i = start
                raise self.error("empty exponent index")
            try:
                f = Exp(f, index)
            except ValueError as e:
                self.i = start
                raise self.error(str(e)) from None
        return f

    def atom(self) -> FunctorExpr:
        ch = self.peek()
        if ch == "(":
            self.i += 1
            f = self.sum()
            self.expect(")")
            return f
        if ch == "{":
            start = self.i
            syms = self.symlist()
            try:
                return Const(syms)
            except ValueError as e:
                self.i = start
                raise self.error(str(e)) from None
        if self.src.startswith("Id", self.i) and not self._symchar_at(self.i + 2):
            self.i += 2
            return Id()
        if ch == "P" and self._next_nonspace(self.i + 1) == "(":
            self.i += 1
            self.expect("(")
            f = self.sum()
            self.expect(")")
            return Pow(f)
        raise self.error(f"expected a functor, got {ch or 'end of input'!r}")

    def _symchar_at(self, j: int) -> bool:
        return j < len(self.src) and _is_symchar(self.src[j]) and self.src[j] != "*"

    def _next_nonspace(self, j: int) -> str:
        while j < len(self.src) and self.src[j].isspace():
            j += 1
        return self.src[j] if j < len(self.src) else ""

    def symlist(self) -> tuple[str, ...]:
        self.expect("{")
        syms: list[str] = []
        if self.peek() == "}":
            self.i += 1
            return ()
        while True:
            self.ws()
            start = self.i
            while self.i < len(self.src) and _is_symchar(self.src[self.i]):
                self.i += 1
            if self.i == start:
                raise self.error("expected a symbol")
            syms.append(self.src[start : self.i])
            if self.peek() == ",":
                self.i += 1
                continue
            self.expect("}")
            return tuple(syms)


def parse_functor(src: str) -> FunctorExpr:
    """Parse ``Id | {s,...} | F*F | F+F+... | F^{i,...} | P(F)`` with
    parentheses for grouping. ``*`` binds tighter than ``+``; ``^`` is postfix
    and binds tightest."""
    return _FunctorParser(src).parse()


def contains_pow(f: FunctorExpr) -> bool:
    if isinstance(f, Pow):
        return True
    if isinstance(f, Prod):
        return contains_pow(f.left) or contains_pow(f.right)
    if isinstance(f, Coprod):
        return any(contains_pow(g) for g in f.summands)
    if isinstance(f, Exp):
        return contains_pow(f.base)
    return False


def cardinality(f: FunctorExpr, n: int) -> int:
    """|H(n)| computed compositionally."""
    if isinstance(f, Const):
        return len(f.carrier)
    if isinstance(f, Id):
        return n
    if isinstance(f, Prod):
        return cardinality(f.left, n) * cardinality(f.right, n)
    if isinstance(f, Coprod):
        return sum(cardinality(g, n) for g in f.summands)
    if isinstance(f, Exp):
        return cardinality(f.base, n) ** len(f.index)
    if isinstance(f, Pow):
        return 2 ** cardinality(f.inner, n)
    raise TypeError(f"not a functor expression: {f!r}")


# --------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class ConstVal:
    symbol: str
    pos: int = 0  # position in the declared carrier; fixed by resolve_term


@dataclass(frozen=True)
class StateRef:
    index: int


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Inj:
    tag: int
    payload: "Term"


@dataclass(frozen=True)
class Tab:
    entries: tuple[tuple[str, "Term"], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((k, v) for k, v in self.entries))

    def get(self, key: str) -> "Term":
        for k, v in self.entries:
            if k == key:
                return v
        raise KeyError(key)


@dataclass(frozen=True)
class SetOf:
    elements: tuple["Term", ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))


Term = Union[ConstVal, StateRef, Pair, Inj, Tab, SetOf]


def term_key(t: Term) -> tuple:
    """Sort key realizing the canonical total order
    ConstVal < StateRef < Pair < Inj < Tab < SetOf.

    For SetOf the key uses the elements in their stored order, so keys of
    non-canonical terms are only meaningful after :func:`canonicalize_term`.
    """
    if isinstance(t, StateRef):
        return (1, t.index)
    if isinstance(t, ConstVal):
        return (0, t.pos, t.symbol)
    if isinstance(t, Pair):
        return (2, term_key(t.left), term_key(t.right))
    if isinstance(t, Inj):
        return (3, t.tag, term_key(t.payload))
    if isinstance(t, Tab):
        return (4, tuple(term_key(v) for _, v in t.entries))
    if isinstance(t, SetOf):
        return (5, tuple(term_key(e) for e in t.elements))
    raise TypeError(f"not a term: {t!r}")


def _sorted_unique(elements: Iterable[Term]) -> tuple[Term, ...]:
    keyed = sorted(((term_key(e), e) for e in elements), key=lambda p: p[0])
    out: list[Term] = []
    last = None
    for k, e in keyed:
        if k != last:
            out.append(e)
            last = k
    return tuple(out)


def canonicalize_term(t: Term) -> Term:
    """Sort and de-duplicate every set, bottom-up. Idempotent."""
    if isinstance(t, (StateRef, ConstVal)):
        return t
    if isinstance(t, Pair):
        return Pair(canonicalize_term(t.left), canonicalize_term(t.right))
    if isinstance(t, Inj):
        return Inj(t.tag, canonicalize_term(t.payload))
    if isinstance(t, Tab):
        return Tab(tuple((k, canonicalize_term(v)) for k, v in t.entries))
    if isinstance(t, SetOf):
        return SetOf(_sorted_unique(canonicalize_term(e) for e in t.elements))
    raise TypeError(f"not a term: {t!r}")


StateMap = Union[Sequence[int], Mapping[int, int], Callable[[int], int]]


def _as_callable(f: StateMap) -> Callable[[int], int]:
    if callable(f):
        return f
    return f.__getitem__


def map_term(t: Term, f: StateMap, n_target: int | None = None) -> Term:
    """Apply ``H(f)``: rename every state reference through ``f``.

    Sets are re-sorted and de-duplicated afterwards, so a non-injective ``f``
    may shrink them. With ``n_target`` given, images are range-checked.
    """
    g = _as_callable(f)

    def go(t: Term) -> Term:
        if isinstance(t, StateRef):
            y = g(t.index)
            if n_target is not None and not 0 <= y < n_target:
                raise IndexError(f"state @{t.index} maps to {y}, outside [0,{n_target})")
            return StateRef(y)
        if isinstance(t, ConstVal):
            return t
        if isinstance(t, Pair):
            return Pair(go(t.left), go(t.right))
        if isinstance(t, Inj):
            return Inj(t.tag, go(t.payload))
        if isinstance(t, Tab):
            return Tab(tuple((k, go(v)) for k, v in t.entries))
        if isinstance(t, SetOf):
            return SetOf(_sorted_unique(go(e) for e in t.elements))
        raise TypeError(f"not a term: {t!r}")

    return go(t)


def support(t: Term) -> frozenset[int]:
    """The least set of states the term lives over."""
    out: set[int] = set()
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, StateRef):
            out.add(t.index)
        elif isinstance(t, Pair):
            stack.append(t.left)
            stack.append(t.right)
        elif isinstance(t, Inj):
            stack.append(t.payload)
        elif isinstance(t, Tab):
            stack.extend(v for _, v in t.entries)
        elif isinstance(t, SetOf):
            stack.extend(t.elements)
    return frozenset(out)


def state_refs(t: Term) -> list[int]:
    """State references in left-to-right occurrence order (with repeats)."""
    if isinstance(t, StateRef):
        return [t.index]
    if isinstance(t, ConstVal):
        return []
    if isinstance(t, Pair):
        return state_refs(t.left) + state_refs(t.right)
    if isinstance(t, Inj):
        return state_refs(t.payload)
    if isinstance(t, Tab):
        return [x for _, v in t.entries for x in state_refs(v)]
    if isinstance(t, SetOf):
        return [x for e in t.elements for x in state_refs(e)]
    raise TypeError(f"not a term: {t!r}")


# --------------------------------------------------------------------------
# typing against a functor


def resolve_term(t: Term, f: FunctorExpr, n: int) -> Term:
    """Check ``t`` against ``(f, n)`` and return it canonicalized, with constant
    positions taken from the declared carriers and table entries put in index
    order. Raises :class:`TermTypeError` on a mismatch."""

    def go(t: Term, f: FunctorExpr, path: str) -> Term:
        if isinstance(f, Const):
            if not isinstance(t, ConstVal):
                raise TermTypeError(f"{path}: expected a constant of {f}, got {render_term(t)}")
            try:
                return ConstVal(t.symbol, f.carrier.index(t.symbol))
            except ValueError:
                raise TermTypeError(f"{path}: {t.symbol!r} is not in {f}") from None
        if isinstance(f, Id):
            if not isinstance(t, StateRef):
                raise TermTypeError(f"{path}: expected a state reference, got {render_term(t)}")
            if not 0 <= t.index < n:
                raise TermTypeError(f"{path}: state @{t.index} out of range for {n} states")
            return t
        if isinstance(f, Prod):
            if not isinstance(t, Pair):
                raise TermTypeError(f"{path}: expected a pair for {f}, got {render_term(t)}")
            return Pair(go(t.left, f.left, path + ".0"), go(t.right, f.right, path + ".1"))
        if isinstance(f, Coprod):
            if not isinstance(t, Inj):
                raise TermTypeError(f"{path}: expected an injection for {f}, got {render_term(t)}")
            if not 0 <= t.tag < len(f.summands):
                raise TermTypeError(f"{path}: injection tag {t.tag} out of range for {f}")
            return Inj(t.tag, go(t.payload, f.summands[t.tag], f"{path}.inj{t.tag}"))
        if isinstance(f, Exp):
            if not isinstance(t, Tab):
                raise TermTypeError(f"{path}: expected a table for {f}, got {render_term(t)}")
            given = dict(t.entries)
            if len(given) != len(t.entries):
                raise TermTypeError(f"{path}: duplicate table key")
            if set(given) != set(f.index):
                raise TermTypeError(
                    f"{path}: table keys {sorted(given)} do not match index {list(f.index)}"
                )
            return Tab(tuple((k, go(given[k], f.base, f"{path}[{k}]")) for k in f.index))
        if isinstance(f, Pow):
            if not isinstance(t, SetOf):
                raise TermTypeError(f"{path}: expected a set for {f}, got {render_term(t)}")
            return SetOf(_sorted_unique(go(e, f.inner, path + "{}") for e in t.elements))
        raise TypeError(f"not a functor expression: {f!r}")

    return go(t, f, "$")


def enumerate_terms(f: FunctorExpr, n: int) -> list[Term]:
    """All elements of H(n), canonical and sorted by :func:`term_key`."""

    def go(f: FunctorExpr) -> list[Term]:
        if isinstance(f, Const):
            return [ConstVal(s, i) for i, s in enumerate(f.carrier)]
        if isinstance(f, Id):
            return [StateRef(i) for i in range(n)]
        if isinstance(f, Prod):
            return [Pair(a, b) for a in go(f.left) for b in go(f.right)]
        if isinstance(f, Coprod):
            return [Inj(k, t) for k, g in enumerate(f.summands) for t in go(g)]
        if isinstance(f, Exp):
            base = go(f.base)
            return [
                Tab(tuple(zip(f.index, combo)))
                for combo in itertools.product(base, repeat=len(f.index))
            ]
        if isinstance(f, Pow):
            inner = sorted(go(f.inner), key=term_key)
            return [
                SetOf(sub)
                for r in range(len(inner) + 1)
                for sub in itertools.combinations(inner, r)
            ]
        raise TypeError(f"not a functor expression: {f!r}")

    return sorted(go(f), key=term_key)


# --------------------------------------------------------------------------
# text and JSON forms


def render_term(t: Term, leaf: Callable[[int], str] | None = None) -> str:
    """Compact text form: ``@k``, ``sym``, ``(t,t)``, ``inj k t``, ``[i:t,...]``,
    ``{t,...}``. ``leaf`` overrides how state references are printed."""
    if isinstance(t, StateRef):
        return leaf(t.index) if leaf else f"@{t.index}"
    if isinstance(t, ConstVal):
        return t.symbol
    if isinstance(t, Pair):
        return f"({render_term(t.left, leaf)},{render_term(t.right, leaf)})"
    if isinstance(t, Inj):
        return f"inj {t.tag} {render_term(t.payload, leaf)}"
    if isinstance(t, Tab):
        return "[" + ",".join(f"{k}:{render_term(v, leaf)}" for k, v in t.entries) + "]"
    if isinstance(t, SetOf):
        return "{" + ",".join(render_term(e, leaf) for e in t.elements) + "}"
    raise TypeError(f"not a term: {t!r}")


def shape(t: Term) -> str:
    """The term with every state reference replaced by ``_``."""
    return render_term(t, leaf=lambda _: "_")


class _TermParser:
    def __init__(self, src: str):
        self.src = src
        self.i = 0

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, pos=self.i)

    def peek(self) -> str:
        while self.i < len(self.src) and self.src[self.i].isspace():
            self.i += 1
        return self.src[self.i] if self.i < len(self.src) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}, got {self.peek() or 'end of input'!r}")
        self.i += 1

    def number(self) -> int:
        self.peek()
        start = self.i
        while self.i < len(self.src) and self.src[self.i].isdigit():
            self.i += 1
        if start == self.i:
            raise self.error("expected a number")
        return int(self.src[start : self.i])

    def symbol(self) -> str:
        self.peek()
        start = self.i
        while self.i < len(self.src) and _is_symchar(self.src[self.i]):
            self.i += 1
        if start == self.i:
            raise self.error(f"expected a term, got {self.peek() or 'end of input'!r}")
        return self.src[start : self.i]

    def parse(self) -> Term:
        t = self.term()
        if self.peek():
            raise self.error(f"unexpected {self.peek()!r}")
        return t

    def items(self, close: str, item):
        out = []
        if self.peek() == close:
            self.i += 1
            return out
        while True:
            out.append(item())
            if self.peek() == ",":
                self.i += 1
                continue
            self.expect(close)
            return out

    def term(self) -> Term:
        ch = self.peek()
        if ch == "@":
            self.i += 1
            return StateRef(self.number())
        if ch == "(":
            self.i += 1
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(")")
            return Pair(a, b)
        if ch == "{":
            self.i += 1
            return SetOf(tuple(self.items("}", self.term)))
        if ch == "[":
            self.i += 1

            def entry():
                k = self.symbol()
                self.expect(":")
                return (k, self.term())

            return Tab(tuple(self.items("]", entry)))
        sym = self.symbol()
        if sym == "inj":
            tag = self.number()
            return Inj(tag, self.term())
        return ConstVal(sym)


def parse_term(src: str, f: FunctorExpr | None = None, n: int | None = None) -> Term:
    """Parse the text form; with ``f`` and ``n`` the result is resolved."""
    t = _TermParser(src).parse()
    if f is not None:
        if n is None:
            raise ValueError("resolving a term needs the carrier size")
        t = resolve_term(t, f, n)
    return t


def term_to_json(t: Term):
    if isinstance(t, StateRef):
        return {"state": t.index}
    if isinstance(t, ConstVal):
        return {"const": t.symbol}
    if isinstance(t, Pair):
        return {"pair": [term_to_json(t.left), term_to_json(t.right)]}
    if isinstance(t, Inj):
        return {"inj": [t.tag, term_to_json(t.payload)]}
    if isinstance(t, Tab):
        return {"tab": [[k, term_to_json(v)] for k, v in t.entries]}
    if isinstance(t, SetOf):
        return {"set": [term_to_json(e) for e in t.elements]}
    raise TypeError(f"not a term: {t!r}")


def term_from_json(obj) -> Term:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise TermTypeError(f"malformed JSON term: {obj!r}")
    (kind, val), = obj.items()
    try:
        if kind == "state":
            if not isinstance(val, int) or isinstance(val, bool):
                raise TermTypeError(f"state index must be an integer: {val!r}")
            return StateRef(val)
        if kind == "const":
            if not isinstance(val, str):
                raise TermTypeError(f"constant must be a string: {val!r}")
            return ConstVal(val)
        if kind == "pair":
            a, b = val
            return Pair(term_from_json(a), term_from_json(b))
        if kind == "inj":
            tag, payload = val
            return Inj(int(tag), term_from_json(payload))
        if kind == "tab":
            items = val.items() if isinstance(val, dict) else val
            return Tab(tuple((str(k), term_from_json(v)) for k, v in items))
        if kind == "set":
            return SetOf(tuple(term_from_json(e) for e in val))
    except (TypeError, ValueError) as e:
        if isinstance(e, TermTypeError):
            raise
        raise TermTypeError(f"malformed JSON term {kind!r}: {e}") from None
    raise TermTypeError(f"unknown JSON term kind {kind!r}")


def functor_of(src: Union[str, FunctorExpr]) -> FunctorExpr:
    return parse_functor(src) if isinstance(src, str) else src


__all__ = [
    "Const", "Id", "Prod", "Coprod", "Exp", "Pow", "FunctorExpr",
    "ConstVal", "StateRef", "Pair", "Inj", "Tab", "SetOf", "Term",
    "parse_functor", "contains_pow", "cardinality",
    "term_key", "canonicalize_term", "map_term", "support", "state_refs",
    "resolve_term", "enumerate_terms", "render_term", "shape",
    "parse_term", "term_to_json", "term_from_json", "functor_of",
]
