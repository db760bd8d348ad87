"""Temporal formulas with a prompt eventually operator, and lasso words.

Formulas are kept in negation normal form: negation occurs only on atoms,
and the prompt eventually operator ``Fp`` never sits under a negation (it
has no dual in the supported fragment, so pushing a negation onto it is an
error).  The module provides the concrete syntax parser, the rewrites used
by the synthesis pipeline (relativization over a color proposition,
bounded-color formulas, prompt unfolding), benchmark arbiter generators,
and a direct evaluator over ultimately periodic words which serves as the
semantic ground truth for everything else.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence


class FormulaError(ValueError):
    pass


class ParseError(FormulaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"syntax error at position {position}: {message}")
        self.position = position


class PromptNegationError(FormulaError):
    def __init__(self, position: Optional[int] = None):
        msg = "negated prompt operator"
        if position is not None:
            msg += f" (at position {position})"
        super().__init__(msg)
        self.position = position


class Formula:
    """Base class; all nodes are immutable and structurally comparable."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class NotAtom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True, slots=True)
class FalseConst(Formula):
    pass


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Release(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class PromptF(Formula):
    """Prompt eventually: the witness must appear within the global bound."""

    arg: Formula


TRUE = TrueConst()
FALSE = FalseConst()


def eventually(f: Formula) -> Formula:
    return Until(TRUE, f)


def always(f: Formula) -> Formula:
    return Release(FALSE, f)


def conj(items: Sequence[Formula]) -> Formula:
    """Right-folded conjunction; empty yields true."""
    if not items:
        return TRUE
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def disj(items: Sequence[Formula]) -> Formula:
    """Right-folded disjunction; empty yields false."""
    if not items:
        return FALSE
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


def next_power(f: Formula, j: int) -> Formula:
    for _ in range(j):
        f = Next(f)
    return f


def negate(f: Formula) -> Formula:
    """Push a negation through ``f``, staying in NNF.

    Raises PromptNegationError if the negation would reach a prompt
    eventually operator.
    """
    if isinstance(f, Atom):
        return NotAtom(f.name)
    if isinstance(f, NotAtom):
        return Atom(f.name)
    if isinstance(f, TrueConst):
        return FALSE
    if isinstance(f, FalseConst):
        return TRUE
    if isinstance(f, And):
        return Or(negate(f.left), negate(f.right))
    if isinstance(f, Or):
        return And(negate(f.left), negate(f.right))
    if isinstance(f, Next):
        return Next(negate(f.arg))
    if isinstance(f, Until):
        return Release(negate(f.left), negate(f.right))
    if isinstance(f, Release):
        return Until(negate(f.left), negate(f.right))
    if isinstance(f, PromptF):
        raise PromptNegationError()
    raise TypeError(f"not a formula: {f!r}")


def iter_nodes(f: Formula) -> Iterator[Formula]:
    """All nodes of the syntax tree, possibly repeating equal subtrees."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, (And, Or, Until, Release)):
            stack.append(g.right)
            stack.append(g.left)
        elif isinstance(g, (Next, PromptF)):
            stack.append(g.arg)


def subformulas(f: Formula) -> set[Formula]:
    return set(iter_nodes(f))


def size(f: Formula) -> int:
    """Number of distinct subformulas (after shorthand expansion)."""
    return len(subformulas(f))


def propositions(f: Formula) -> set[str]:
    return {g.name for g in iter_nodes(f) if isinstance(g, (Atom, NotAtom))}


def has_prompt(f: Formula) -> bool:
    return any(isinstance(g, PromptF) for g in iter_nodes(f))


def is_pure_ltl(f: Formula) -> bool:
    return not has_prompt(f)


def sort_key(f: Formula):
    """Deterministic structural ordering, independent of hash seeds."""
    if isinstance(f, Atom):
        return ("atom", f.name)
    if isinstance(f, NotAtom):
        return ("natom", f.name)
    if isinstance(f, TrueConst):
        return ("true",)
    if isinstance(f, FalseConst):
        return ("false",)
    if isinstance(f, Next):
        return ("X", sort_key(f.arg))
    if isinstance(f, PromptF):
        return ("Fp", sort_key(f.arg))
    tag = {And: "and", Or: "or", Until: "U", Release: "R"}[type(f)]
    return (tag, sort_key(f.left), sort_key(f.right))


# ---------------------------------------------------------------------------
# Rewrites

def relativize(f: Formula, color: str) -> Formula:
    """Replace every prompt eventually by the until-chain over ``color``.

    The replacement requires the witness before the second change of the
    color's truth value; the result is a pure LTL formula of size linear
    in the input.
    """
    if color in propositions(f):
        raise FormulaError(f"color proposition {color!r} occurs in the formula")
    return _rel(f, color)


def _rel(f: Formula, color: str) -> Formula:
    if isinstance(f, (Atom, NotAtom, TrueConst, FalseConst)):
        return f
    if isinstance(f, Next):
        return Next(_rel(f.arg, color))
    if isinstance(f, And):
        return And(_rel(f.left, color), _rel(f.right, color))
    if isinstance(f, Or):
        return Or(_rel(f.left, color), _rel(f.right, color))
    if isinstance(f, Until):
        return Until(_rel(f.left, color), _rel(f.right, color))
    if isinstance(f, Release):
        return Release(_rel(f.left, color), _rel(f.right, color))
    if isinstance(f, PromptF):
        inner = _rel(f.arg, color)
        p = Atom(color)
        np = NotAtom(color)
        return And(
            Or(np, Until(p, Until(np, inner))),
            Or(p, Until(np, Until(p, inner))),
        )
    raise TypeError(f"not a formula: {f!r}")


def boundedness_formula(k: int, color: str) -> Formula:
    """Pure LTL formula holding iff every color block has length at most k.

    Shape: G over the disjunction, for j < k, of "the color value differs
    between steps j and j+1".  k = 0 is rejected: blocks have length at
    least one, so 0-boundedness is unsatisfiable.
    """
    if k < 1:
        raise FormulaError("block bound k must be at least 1")
    p = Atom(color)
    np = NotAtom(color)
    parts = [
        Or(
            And(next_power(p, j), next_power(np, j + 1)),
            And(next_power(np, j), next_power(p, j + 1)),
        )
        for j in range(k)
    ]
    return always(disj(parts))


def unfold_prompt(f: Formula, k: int) -> Formula:
    """Replace every prompt eventually by the disjunction of its k+1 shifts.

    The result is pure LTL and agrees with the bounded semantics: a word
    satisfies the unfolding iff it satisfies ``f`` with respect to ``k``.
    """
    if k < 0:
        raise FormulaError("bound k must be nonnegative")
    if isinstance(f, (Atom, NotAtom, TrueConst, FalseConst)):
        return f
    if isinstance(f, Next):
        return Next(unfold_prompt(f.arg, k))
    if isinstance(f, And):
        return And(unfold_prompt(f.left, k), unfold_prompt(f.right, k))
    if isinstance(f, Or):
        return Or(unfold_prompt(f.left, k), unfold_prompt(f.right, k))
    if isinstance(f, Until):
        return Until(unfold_prompt(f.left, k), unfold_prompt(f.right, k))
    if isinstance(f, Release):
        return Release(unfold_prompt(f.left, k), unfold_prompt(f.right, k))
    if isinstance(f, PromptF):
        inner = unfold_prompt(f.arg, k)
        return disj([next_power(inner, j) for j in range(k + 1)])
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Benchmark family

def arbiter_formula(r: int, r_p: int) -> Formula:
    """Arbiter for r resources, the first r_p of which are prompt.

    Requests q_i must be granted by p_i (promptly for i <= r_p), and at
    most one grant may be issued per step.
    """
    if r < 1:
        raise FormulaError("need at least one resource")
    if not 0 <= r_p <= r:
        raise FormulaError("prompt resource count must be between 0 and r")
    parts: list[Formula] = []
    for i in range(1, r_p + 1):
        parts.append(always(Or(NotAtom(f"q{i}"), PromptF(Atom(f"p{i}")))))
    for i in range(r_p + 1, r + 1):
        parts.append(always(Or(NotAtom(f"q{i}"), eventually(Atom(f"p{i}")))))
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            parts.append(always(Or(NotAtom(f"p{i}"), NotAtom(f"p{j}"))))
    return conj(parts)


def arbiter_partition(r: int, color: str = "p") -> "PropPartition":
    return PropPartition(
        inputs=tuple(f"q{i}" for i in range(1, r + 1)),
        outputs=tuple(f"p{i}" for i in range(1, r + 1)),
        color=color,
    )


@dataclass(frozen=True)
class PropPartition:
    """Input/output split of the propositions, plus the fresh color name."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    color: str = "p"

    def __post_init__(self):
        seen = set(self.inputs)
        if len(seen) != len(self.inputs):
            raise FormulaError("duplicate input proposition")
        if len(set(self.outputs)) != len(self.outputs):
            raise FormulaError("duplicate output proposition")
        if seen & set(self.outputs):
            raise FormulaError("inputs and outputs must be disjoint")
        if self.color in seen or self.color in self.outputs:
            raise FormulaError(f"color {self.color!r} must not occur in inputs or outputs")
        for name in (*self.inputs, *self.outputs, self.color):
            if not name:
                raise FormulaError("proposition names must be nonempty")

    @property
    def all_props(self) -> frozenset[str]:
        return frozenset(self.inputs) | frozenset(self.outputs)

    def outputs_with_color(self) -> tuple[str, ...]:
        return self.outputs + (self.color,)


# ---------------------------------------------------------------------------
# Lassos and evaluation

@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic word: prefix followed by a repeated loop."""

    prefix: tuple[frozenset[str], ...]
    loop: tuple[frozenset[str], ...]

    def __post_init__(self):
        if len(self.loop) < 1:
            raise FormulaError("lasso loop must be nonempty")

    @staticmethod
    def make(prefix: Iterable[Iterable[str]], loop: Iterable[Iterable[str]]) -> "Lasso":
        return Lasso(
            tuple(frozenset(v) for v in prefix),
            tuple(frozenset(v) for v in loop),
        )

    def valuation(self, pos: int) -> frozenset[str]:
        if pos < len(self.prefix):
            return self.prefix[pos]
        return self.loop[(pos - len(self.prefix)) % len(self.loop)]

    def restrict(self, props: Iterable[str]) -> "Lasso":
        keep = frozenset(props)
        return Lasso(
            tuple(v & keep for v in self.prefix),
            tuple(v & keep for v in self.loop),
        )

    def drop(self, prop: str) -> "Lasso":
        return Lasso(
            tuple(v - {prop} for v in self.prefix),
            tuple(v - {prop} for v in self.loop),
        )

    def __str__(self) -> str:
        return lasso_to_text(self)


def lasso_to_text(w: Lasso) -> str:
    def fmt(vals):
        return " , ".join("{" + " ".join(sorted(v)) + "}" for v in vals)

    return f"{fmt(w.prefix)} ; {fmt(w.loop)}"


_VALUATION_RE = re.compile(r"\{([^{}]*)\}")


def parse_lasso(text: str) -> Lasso:
    """Parse ``prefix ; loop`` where each side lists ``{a b c}`` sets."""
    if text.count(";") != 1:
        raise FormulaError("lasso text must contain exactly one ';'")
    prefix_part, loop_part = text.split(";")

    def side(part: str) -> list[frozenset[str]]:
        out = []
        for chunk in part.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            m = _VALUATION_RE.fullmatch(chunk)
            if m is None:
                raise FormulaError(f"malformed valuation {chunk!r}")
            out.append(frozenset(m.group(1).split()))
        return out

    loop = side(loop_part)
    if not loop:
        raise FormulaError("lasso loop must be nonempty")
    return Lasso(tuple(side(prefix_part)), tuple(loop))


def eval_on_lasso(f: Formula, w: Lasso, k: Optional[int] = None) -> bool:
    """Decide whether the lasso satisfies ``f`` at position 0.

    ``k`` is the bound for prompt eventually operators and is required
    exactly when the formula contains one.  Until/release are solved by
    fixpoint iteration over the finitely many distinct positions.
    """
    if k is None and has_prompt(f):
        raise FormulaError("formula contains a prompt operator but no bound k was given")
    plen = len(w.prefix)
    llen = len(w.loop)
    total = plen + llen
    vals = list(w.prefix) + list(w.loop)

    def succ(i: int) -> int:
        return i + 1 if i + 1 < total else plen

    # Vector of truth values per node, computed bottom-up.  Traversal is
    # keyed by object identity to avoid rehashing deep trees; structurally
    # equal duplicates are just recomputed.
    memo: dict[int, list[bool]] = {}

    def loop_fixpoint(va: list[bool], vb: list[bool], is_until: bool) -> list[bool]:
        t = [not is_until] * total
        for _ in range(llen + 1):
            changed = False
            for i in range(total - 1, plen - 1, -1):
                if is_until:
                    nv = vb[i] or (va[i] and t[succ(i)])
                else:
                    nv = vb[i] and (va[i] or t[succ(i)])
                if nv != t[i]:
                    t[i] = nv
                    changed = True
            if not changed:
                break
        for i in range(plen - 1, -1, -1):
            if is_until:
                t[i] = vb[i] or (va[i] and t[i + 1])
            else:
                t[i] = vb[i] and (va[i] or t[i + 1])
        return t

    def compute(node: Formula) -> list[bool]:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Atom):
            t = [node.name in vals[i] for i in range(total)]
        elif isinstance(node, NotAtom):
            t = [node.name not in vals[i] for i in range(total)]
        elif isinstance(node, TrueConst):
            t = [True] * total
        elif isinstance(node, FalseConst):
            t = [False] * total
        elif isinstance(node, And):
            a, b = compute(node.left), compute(node.right)
            t = [a[i] and b[i] for i in range(total)]
        elif isinstance(node, Or):
            a, b = compute(node.left), compute(node.right)
            t = [a[i] or b[i] for i in range(total)]
        elif isinstance(node, Next):
            a = compute(node.arg)
            t = [a[succ(i)] for i in range(total)]
        elif isinstance(node, Until):
            t = loop_fixpoint(compute(node.left), compute(node.right), True)
        elif isinstance(node, Release):
            t = loop_fixpoint(compute(node.left), compute(node.right), False)
        elif isinstance(node, PromptF):
            a = compute(node.arg)
            # Distance to the nearest current-or-future position where the
            # argument holds; the prompt operator asks distance <= k.
            inf = float("inf")
            dist: list[float] = [inf] * total
            for _ in range(2):
                for i in range(total - 1, -1, -1):
                    dist[i] = 0 if a[i] else dist[succ(i)] + 1
            t = [dist[i] <= k for i in range(total)]
        else:
            raise TypeError(f"not a formula: {node!r}")
        memo[id(node)] = t
        return t

    # Iterative postorder so deep next-chains (large unfoldings) do not
    # overflow the interpreter stack.
    order: list[Formula] = []
    seen: set[int] = set()
    stack: list[tuple[Formula, bool]] = [(f, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        if isinstance(node, (And, Or, Until, Release)):
            stack.append((node.left, False))
            stack.append((node.right, False))
        elif isinstance(node, (Next, PromptF)):
            stack.append((node.arg, False))
    for node in order:
        compute(node)
    return memo[id(f)][0]


# ---------------------------------------------------------------------------
# Concrete syntax

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<arrow>->)"
    r"|(?P<punct>[!&|()]))"
)

_KEYWORDS = {"X", "F", "G", "Fp", "U", "R", "true", "false"}


@dataclass
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            stripped = text[i:].lstrip()
            if not stripped:
                break
            pos = len(text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", pos)
        if m.lastgroup == "ident":
            word = m.group("ident")
            kind = word if word in _KEYWORDS else "atom"
        else:
            kind = m.group(m.lastgroup)
        tokens.append(_Token(kind, m.group(m.lastgroup), m.start(m.lastgroup)))
        i = m.end()
    tokens.append(_Token("<end>", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.take()

    def negated(self, f: Formula, pos: int) -> Formula:
        try:
            return negate(f)
        except PromptNegationError:
            raise PromptNegationError(pos) from None

    # Precedence, loosest first: ->, |, &, U/R (right-assoc), unary.
    def parse_implies(self) -> Formula:
        left = self.parse_or()
        if self.peek().kind == "->":
            pos = self.take().pos
            right = self.parse_implies()
            return Or(self.negated(left, pos), right)
        return left

    def parse_or(self) -> Formula:
        f = self.parse_and()
        if self.peek().kind == "|":
            self.take()
            return Or(f, self.parse_or())
        return f

    def parse_and(self) -> Formula:
        f = self.parse_until()
        if self.peek().kind == "&":
            self.take()
            return And(f, self.parse_and())
        return f

    def parse_until(self) -> Formula:
        left = self.parse_unary()
        tok = self.peek()
        if tok.kind in ("U", "R"):
            self.take()
            right = self.parse_until()
            return Until(left, right) if tok.kind == "U" else Release(left, right)
        return left

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "!":
            self.take()
            return self.negated(self.parse_unary(), tok.pos)
        if tok.kind == "X":
            self.take()
            return Next(self.parse_unary())
        if tok.kind == "F":
            self.take()
            return eventually(self.parse_unary())
        if tok.kind == "G":
            self.take()
            return always(self.parse_unary())
        if tok.kind == "Fp":
            self.take()
            return PromptF(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "atom":
            self.take()
            return Atom(tok.text)
        if tok.kind == "true":
            self.take()
            return TRUE
        if tok.kind == "false":
            self.take()
            return FALSE
        if tok.kind == "(":
            self.take()
            f = self.parse_implies()
            self.expect(")")
            return f
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.pos)


def parse(text: str) -> Formula:
    """Parse the ASCII syntax into an NNF formula.

    General negation and implication are accepted and pushed inward; a
    negation reaching a prompt operator is rejected.
    """
    parser = _Parser(text)
    f = parser.parse_implies()
    end = parser.peek()
    if end.kind != "<end>":
        raise ParseError(f"unexpected {end.text!r}", end.pos)
    return f


_LEVEL_IMPL, _LEVEL_OR, _LEVEL_AND, _LEVEL_UR, _LEVEL_UNARY, _LEVEL_ATOM = range(6)


def _level(f: Formula) -> int:
    if isinstance(f, (Atom, TrueConst, FalseConst)):
        return _LEVEL_ATOM
    if isinstance(f, (NotAtom, Next, PromptF)):
        return _LEVEL_UNARY
    if isinstance(f, (Until, Release)):
        return _LEVEL_UR
    if isinstance(f, And):
        return _LEVEL_AND
    return _LEVEL_OR


def to_text(f: Formula) -> str:
    """Render with minimal parentheses; round-trips through parse()."""

    def render(g: Formula, minimum: int) -> str:
        lvl = _level(g)
        if isinstance(g, Atom):
            body = g.name
        elif isinstance(g, NotAtom):
            body = f"!{g.name}"
        elif isinstance(g, TrueConst):
            body = "true"
        elif isinstance(g, FalseConst):
            body = "false"
        elif isinstance(g, Next):
            body = f"X {render(g.arg, _LEVEL_UNARY)}"
        elif isinstance(g, PromptF):
            body = f"Fp {render(g.arg, _LEVEL_UNARY)}"
        elif isinstance(g, Until):
            body = f"{render(g.left, _LEVEL_UNARY)} U {render(g.right, _LEVEL_UR)}"
        elif isinstance(g, Release):
            body = f"{render(g.left, _LEVEL_UNARY)} R {render(g.right, _LEVEL_UR)}"
        elif isinstance(g, And):
            # Binary operators associate to the right; a same-level left
            # child keeps its parentheses so rendering round-trips.
            body = f"{render(g.left, _LEVEL_AND + 1)} & {render(g.right, _LEVEL_AND)}"
        elif isinstance(g, Or):
            body = f"{render(g.left, _LEVEL_OR + 1)} | {render(g.right, _LEVEL_OR)}"
        else:
            raise TypeError(f"not a formula: {g!r}")
        if lvl < minimum:
            return f"({body})"
        return body

    return render(f, _LEVEL_IMPL)
