"""Conditional-directive expressions and presence conditions.

Two layers live here.  ConditionExpr is the syntax of an `#if`/`#elif`
argument: full C operator precedence over integer literals, `defined`
tests, and bare identifiers.  PresenceCondition is the boolean formula
attached to regions and entities: True/False/Atom/Not/And/Or plus Cmp,
an opaque wrapped comparison whose truth is computed by evaluating the
underlying expression under a configuration.

Feature semantics: an enabled feature behaves like a macro defined with
value 1, a disabled or unknown identifier evaluates to 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .diagnostics import DiagnosticSink
from .tokens import is_identifier, tokenize

SATISFIABILITY_ATOM_LIMIT = 20


class ParseError(Exception):
    """Raised internally when a condition does not parse."""


class TooManyAtoms(Exception):
    """Raised by satisfiable() above the enumeration limit; callers must
    treat the formula as possibly satisfiable."""


# --------------------------------------------------------------------------
# ConditionExpr


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class DefinedAtom:
    name: str


@dataclass(frozen=True)
class IdentAtom:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # ! ~ - +
    operand: "ConditionExpr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "ConditionExpr"
    right: "ConditionExpr"


@dataclass(frozen=True)
class Ternary:
    cond: "ConditionExpr"
    then: "ConditionExpr"
    other: "ConditionExpr"


ConditionExpr = IntLit | DefinedAtom | IdentAtom | Unary | Binary | Ternary


# --------------------------------------------------------------------------
# PresenceCondition


@dataclass(frozen=True)
class PTrue:
    pass


@dataclass(frozen=True)
class PFalse:
    pass


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Not:
    operand: "PresenceCondition"


@dataclass(frozen=True)
class And:
    left: "PresenceCondition"
    right: "PresenceCondition"


@dataclass(frozen=True)
class Or:
    left: "PresenceCondition"
    right: "PresenceCondition"


@dataclass(frozen=True)
class Cmp:
    expr: ConditionExpr


PresenceCondition = PTrue | PFalse | Atom | Not | And | Or | Cmp

TRUE = PTrue()
FALSE = PFalse()


def p_not(x: PresenceCondition) -> PresenceCondition:
    if isinstance(x, PTrue):
        return FALSE
    if isinstance(x, PFalse):
        return TRUE
    if isinstance(x, Not):
        return x.operand
    return Not(x)


def p_and(a: PresenceCondition, b: PresenceCondition) -> PresenceCondition:
    if isinstance(a, PFalse) or isinstance(b, PFalse):
        return FALSE
    if isinstance(a, PTrue):
        return b
    if isinstance(b, PTrue):
        return a
    if a == b:
        return a
    return And(a, b)


def p_or(a: PresenceCondition, b: PresenceCondition) -> PresenceCondition:
    if isinstance(a, PTrue) or isinstance(b, PTrue):
        return TRUE
    if isinstance(a, PFalse):
        return b
    if isinstance(b, PFalse):
        return a
    if a == b:
        return a
    return Or(a, b)


# --------------------------------------------------------------------------
# Configurations


@dataclass
class Configuration:
    """Total assignment of enabled/disabled; unmentioned features take the
    default state (disabled unless stated otherwise)."""

    assignment: Mapping[str, bool] = field(default_factory=dict)
    default_enabled: bool = False

    @classmethod
    def enabling(cls, names: Sequence[str] | set[str]) -> "Configuration":
        return cls({name: True for name in names})

    def is_enabled(self, name: str) -> bool:
        return self.assignment.get(name, self.default_enabled)


# --------------------------------------------------------------------------
# Expression parsing

_KEYWORD_OPS = {"defined"}

_BINARY_LEVELS: dict[str, int] = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6,
    "!=": 6,
    "<": 7,
    "<=": 7,
    ">": 7,
    ">=": 7,
    "<<": 8,
    ">>": 8,
    "+": 9,
    "-": 9,
    "*": 10,
    "/": 10,
    "%": 10,
}
_UNARY_LEVEL = 11
_PRIMARY_LEVEL = 12


class _ExprParser:
    def __init__(self, toks: Sequence[str]):
        self.toks = list(toks)
        self.pos = 0

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self) -> str:
        if self.pos >= len(self.toks):
            raise ParseError("unexpected end of expression")
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> ConditionExpr:
        expr = self.ternary()
        if self.pos != len(self.toks):
            raise ParseError(f"trailing tokens at {self.toks[self.pos:]}")
        return expr

    def ternary(self) -> ConditionExpr:
        cond = self.binary(1)
        if self.peek() == "?":
            self.take()
            then = self.ternary()
            if self.take() != ":":
                raise ParseError("expected ':' in conditional expression")
            other = self.ternary()
            return Ternary(cond, then, other)
        return cond

    def binary(self, min_level: int) -> ConditionExpr:
        left = self.unary()
        while True:
            tok = self.peek()
            level = _BINARY_LEVELS.get(tok or "")
            if level is None or level < min_level:
                return left
            self.take()
            right = self.binary(level + 1)
            left = Binary(tok, left, right)

    def unary(self) -> ConditionExpr:
        tok = self.peek()
        if tok in ("!", "~", "-", "+"):
            self.take()
            return Unary(tok, self.unary())
        return self.primary()

    def primary(self) -> ConditionExpr:
        tok = self.take()
        if tok == "(":
            expr = self.ternary()
            if self.take() != ")":
                raise ParseError("expected ')'")
            return expr
        if tok == "defined":
            if self.peek() == "(":
                self.take()
                name = self.take()
                if not is_identifier(name):
                    raise ParseError(f"bad defined() operand {name!r}")
                if self.take() != ")":
                    raise ParseError("expected ')' after defined")
            else:
                name = self.take()
                if not is_identifier(name):
                    raise ParseError(f"bad defined operand {name!r}")
            return DefinedAtom(name)
        if is_identifier(tok):
            return IdentAtom(tok)
        if tok.startswith("'"):
            return IntLit(_char_value(tok))
        value = _int_value(tok)
        if value is None:
            raise ParseError(f"unexpected token {tok!r}")
        return IntLit(value)


def _char_value(tok: str) -> int:
    body = tok[1:-1]
    if not body:
        return 0
    if body.startswith("\\"):
        escapes = {"n": 10, "t": 9, "r": 13, "0": 0, "\\": 92, "'": 39, '"': 34}
        return escapes.get(body[1], ord(body[1]) if len(body) > 1 else 0)
    return ord(body[0])


def _int_value(tok: str) -> int | None:
    # kept unwrapped so printing and reparsing a literal is stable;
    # evaluation applies 64-bit wraparound
    text = tok.rstrip("uUlL")
    try:
        if text.lower().startswith("0x"):
            return int(text, 16)
        if text.startswith("0") and len(text) > 1 and text.isdigit():
            return int(text, 8)
        if text.isdigit():
            return int(text, 10)
    except ValueError:
        return None
    return None


def _wrap64(value: int) -> int:
    value &= (1 << 64) - 1
    return value - (1 << 64) if value >= 1 << 63 else value


def parse_expr_tokens(toks: Sequence[str]) -> ConditionExpr:
    if not toks:
        raise ParseError("empty expression")
    return _ExprParser(toks).parse()


_error_counter = itertools.count()


def parse_condition(
    text: str,
    macros=None,
    context: PresenceCondition = TRUE,
    diagnostics: DiagnosticSink | None = None,
    error_names: Iterator[str] | None = None,
) -> ConditionExpr:
    """Parse an `#if`/`#elif` argument, macro-expanding it first.

    `macros` is a MacroTable (or None); identifiers outside `defined(...)`
    are expanded against it at the given context.  When the table yields
    several expansion variants, the variants are folded back into a single
    expression as a chain of conditional operators guarded by the variant
    presence conditions.  A malformed expression degrades to an opaque
    identifier atom and analysis continues.
    """
    toks = tokenize(text)
    try:
        if macros is not None:
            toks = _resolve_defined(toks, macros, context)
            variants = macros.condition_alternatives(toks, context, diagnostics)
            if len(variants) == 1:
                return parse_expr_tokens(variants[0][1])
            parsed = [(pc, parse_expr_tokens(vtoks)) for pc, vtoks in variants]
            expr = parsed[-1][1]
            for pc, branch in reversed(parsed[:-1]):
                expr = Ternary(parse_expr_tokens(tokenize(pc_to_text(pc))), branch, expr)
            return expr
        return parse_expr_tokens(toks)
    except ParseError as exc:
        if error_names is not None:
            name = next(error_names)
        else:
            name = f"__parse_error_{next(_error_counter)}"
        if diagnostics is not None:
            diagnostics.warn("condition-parse", f"cannot parse condition {text!r}: {exc}")
        return IdentAtom(name)


def _resolve_defined(toks: list[str], macros, context: PresenceCondition) -> list[str]:
    """Rewrite defined(NAME) for names the macro table manages.

    A name with `#define`/`#undef` history resolves to the disjunction of
    the slices where a definition is active; a name the table has never
    seen stays a free defined() atom (a feature test).
    """
    out: list[str] = []
    i = 0
    while i < len(toks):
        tok = toks[i]
        if tok != "defined":
            out.append(tok)
            i += 1
            continue
        name = None
        end = i + 1
        if i + 3 < len(toks) and toks[i + 1] == "(" and toks[i + 3] == ")":
            name = toks[i + 2]
            end = i + 4
        elif i + 1 < len(toks) and is_identifier(toks[i + 1]):
            name = toks[i + 1]
            end = i + 2
        if name is None:
            out.append(tok)
            i += 1
            continue
        defined_pc = macros.defined_pc(name, context)
        if defined_pc is None:
            out.extend(["defined", "(", name, ")"])
        else:
            out.extend(["("] + tokenize(pc_to_text(defined_pc)) + [")"])
        i = end
    return out


# --------------------------------------------------------------------------
# Expression -> presence condition

_BOOL_OPS = {"&&", "||"}


def to_presence(expr: ConditionExpr) -> PresenceCondition:
    """Boolean reading of a condition expression.

    `&&`/`||`/`!`, `defined`, identifiers, literals, and boolean-position
    ternaries map onto formula connectives; any arithmetic or comparison
    subtree stays an opaque Cmp leaf (constant-folded when it mentions no
    identifiers).
    """
    if isinstance(expr, IntLit):
        return TRUE if expr.value != 0 else FALSE
    if isinstance(expr, (DefinedAtom, IdentAtom)):
        return Atom(expr.name)
    if isinstance(expr, Unary) and expr.op == "!":
        return p_not(to_presence(expr.operand))
    if isinstance(expr, Binary) and expr.op in _BOOL_OPS:
        left = to_presence(expr.left)
        right = to_presence(expr.right)
        return p_and(left, right) if expr.op == "&&" else p_or(left, right)
    if isinstance(expr, Ternary):
        cond = to_presence(expr.cond)
        return p_or(
            p_and(cond, to_presence(expr.then)),
            p_and(p_not(cond), to_presence(expr.other)),
        )
    if not expr_atoms(expr):
        try:
            return TRUE if eval_expr(expr, Configuration()) != 0 else FALSE
        except _EvalError:
            return FALSE
    return Cmp(expr)


def expr_atoms(expr: ConditionExpr) -> set[str]:
    if isinstance(expr, (DefinedAtom, IdentAtom)):
        return {expr.name}
    if isinstance(expr, Unary):
        return expr_atoms(expr.operand)
    if isinstance(expr, Binary):
        return expr_atoms(expr.left) | expr_atoms(expr.right)
    if isinstance(expr, Ternary):
        return expr_atoms(expr.cond) | expr_atoms(expr.then) | expr_atoms(expr.other)
    return set()


# --------------------------------------------------------------------------
# Evaluation


class _EvalError(Exception):
    pass


def eval_expr(expr: ConditionExpr, config: Configuration) -> int:
    if isinstance(expr, IntLit):
        return _wrap64(expr.value)
    if isinstance(expr, (DefinedAtom, IdentAtom)):
        return 1 if config.is_enabled(expr.name) else 0
    if isinstance(expr, Unary):
        val = eval_expr(expr.operand, config)
        if expr.op == "!":
            return 0 if val else 1
        if expr.op == "~":
            return _wrap64(~val)
        if expr.op == "-":
            return _wrap64(-val)
        return val
    if isinstance(expr, Ternary):
        return (
            eval_expr(expr.then, config)
            if eval_expr(expr.cond, config)
            else eval_expr(expr.other, config)
        )
    assert isinstance(expr, Binary)
    op = expr.op
    if op == "&&":
        return 1 if eval_expr(expr.left, config) and eval_expr(expr.right, config) else 0
    if op == "||":
        return 1 if eval_expr(expr.left, config) or eval_expr(expr.right, config) else 0
    lhs = eval_expr(expr.left, config)
    rhs = eval_expr(expr.right, config)
    if op in ("/", "%"):
        if rhs == 0:
            raise _EvalError("division by zero")
        quot = abs(lhs) // abs(rhs)
        if (lhs < 0) != (rhs < 0):
            quot = -quot
        return quot if op == "/" else _wrap64(lhs - quot * rhs)
    if op in ("<<", ">>"):
        if rhs < 0 or rhs > 63:
            raise _EvalError("invalid shift count")
        return _wrap64(lhs << rhs) if op == "<<" else lhs >> rhs
    table = {
        "+": lambda: _wrap64(lhs + rhs),
        "-": lambda: _wrap64(lhs - rhs),
        "*": lambda: _wrap64(lhs * rhs),
        "<": lambda: int(lhs < rhs),
        "<=": lambda: int(lhs <= rhs),
        ">": lambda: int(lhs > rhs),
        ">=": lambda: int(lhs >= rhs),
        "==": lambda: int(lhs == rhs),
        "!=": lambda: int(lhs != rhs),
        "&": lambda: lhs & rhs,
        "^": lambda: lhs ^ rhs,
        "|": lambda: lhs | rhs,
    }
    return table[op]()


def evaluate(
    pc: PresenceCondition,
    config: Configuration,
    diagnostics: DiagnosticSink | None = None,
) -> bool:
    if isinstance(pc, PTrue):
        return True
    if isinstance(pc, PFalse):
        return False
    if isinstance(pc, Atom):
        return config.is_enabled(pc.name)
    if isinstance(pc, Not):
        return not evaluate(pc.operand, config, diagnostics)
    if isinstance(pc, And):
        return evaluate(pc.left, config, diagnostics) and evaluate(pc.right, config, diagnostics)
    if isinstance(pc, Or):
        return evaluate(pc.left, config, diagnostics) or evaluate(pc.right, config, diagnostics)
    assert isinstance(pc, Cmp)
    try:
        return eval_expr(pc.expr, config) != 0
    except _EvalError as exc:
        if diagnostics is not None:
            diagnostics.warn("condition-eval", f"{exc}; comparison treated as false")
        return False


_PARTIAL_ENUM_LIMIT = 12


def evaluate_partial(pc: PresenceCondition, partial: Mapping[str, bool]) -> bool | None:
    """Kleene three-valued evaluation; None means unknown."""
    if isinstance(pc, PTrue):
        return True
    if isinstance(pc, PFalse):
        return False
    if isinstance(pc, Atom):
        return partial.get(pc.name)
    if isinstance(pc, Not):
        val = evaluate_partial(pc.operand, partial)
        return None if val is None else not val
    if isinstance(pc, (And, Or)):
        left = evaluate_partial(pc.left, partial)
        right = evaluate_partial(pc.right, partial)
        if isinstance(pc, And):
            if left is False or right is False:
                return False
            if left is True and right is True:
                return True
            return None
        if left is True or right is True:
            return True
        if left is False and right is False:
            return False
        return None
    assert isinstance(pc, Cmp)
    unassigned = sorted(a for a in expr_atoms(pc.expr) if a not in partial)
    if len(unassigned) > _PARTIAL_ENUM_LIMIT:
        return None
    seen: set[bool] = set()
    base = {name: value for name, value in partial.items()}
    for bits in itertools.product((False, True), repeat=len(unassigned)):
        assignment = dict(base)
        assignment.update(zip(unassigned, bits))
        seen.add(evaluate(pc, Configuration(assignment)))
        if len(seen) == 2:
            return None
    return seen.pop()


def atoms(pc: PresenceCondition) -> set[str]:
    if isinstance(pc, (PTrue, PFalse)):
        return set()
    if isinstance(pc, Atom):
        return {pc.name}
    if isinstance(pc, Not):
        return atoms(pc.operand)
    if isinstance(pc, (And, Or)):
        return atoms(pc.left) | atoms(pc.right)
    assert isinstance(pc, Cmp)
    return expr_atoms(pc.expr)


def satisfiable(pc: PresenceCondition) -> bool:
    """Exhaustive-enumeration satisfiability over the formula's atoms."""
    if isinstance(pc, PTrue):
        return True
    if isinstance(pc, PFalse):
        return False
    names = sorted(atoms(pc))
    if len(names) > SATISFIABILITY_ATOM_LIMIT:
        raise TooManyAtoms(f"{len(names)} atoms exceeds enumeration limit")
    for bits in itertools.product((False, True), repeat=len(names)):
        if evaluate(pc, Configuration(dict(zip(names, bits)))):
            return True
    return False


def possibly_satisfiable(pc: PresenceCondition) -> bool:
    """satisfiable(), with formulas past the atom cap treated as satisfiable."""
    try:
        return satisfiable(pc)
    except TooManyAtoms:
        return True


def fold_constant(pc: PresenceCondition) -> PresenceCondition:
    """Collapse a formula that is a tautology or a contradiction to its
    constant; anything else (or anything past the atom cap) is returned
    unchanged."""
    try:
        if not satisfiable(pc):
            return FALSE
        if not satisfiable(p_not(pc)):
            return TRUE
    except TooManyAtoms:
        pass
    return pc


# --------------------------------------------------------------------------
# Branch conditions


def derive_branch_condition(
    group: Sequence[ConditionExpr | None], branch_index: int
) -> PresenceCondition:
    """Condition of one branch of an `#if…#endif` group.

    Branch i holds exactly when its own condition holds and every earlier
    branch's condition fails; an `#else` (condition None, last only) takes
    the conjunction of all prior negations.
    """
    if not 0 <= branch_index < len(group):
        raise ValueError("branch index out of range")
    for k, cond in enumerate(group):
        if cond is None and k != len(group) - 1:
            raise ValueError("only the last branch may be an #else")
    own = group[branch_index]
    acc: PresenceCondition | None = to_presence(own) if own is not None else None
    for j in range(branch_index):
        prior = group[j]
        assert prior is not None
        negated = p_not(to_presence(prior))
        acc = negated if acc is None else p_and(acc, negated)
    if acc is None:
        raise ValueError("an #else cannot open a group")
    return acc


# --------------------------------------------------------------------------
# Canonical text form


def pc_to_text(pc: PresenceCondition) -> str:
    text, _ = _pc_text(pc)
    return text


def _pc_text(pc: PresenceCondition) -> tuple[str, int]:
    if isinstance(pc, PTrue):
        return "1", _PRIMARY_LEVEL
    if isinstance(pc, PFalse):
        return "0", _PRIMARY_LEVEL
    if isinstance(pc, Atom):
        return f"defined({pc.name})", _PRIMARY_LEVEL
    if isinstance(pc, Not):
        inner, level = _pc_text(pc.operand)
        if level < _PRIMARY_LEVEL:
            inner = f"({inner})"
        return f"!{inner}", _UNARY_LEVEL
    if isinstance(pc, (And, Or)):
        op, level = ("&&", 2) if isinstance(pc, And) else ("||", 1)
        left, left_level = _pc_text(pc.left)
        right, right_level = _pc_text(pc.right)
        if left_level < level:
            left = f"({left})"
        if right_level <= level:
            right = f"({right})"
        return f"{left} {op} {right}", level
    assert isinstance(pc, Cmp)
    return _expr_text(pc.expr)


def expr_to_text(expr: ConditionExpr) -> str:
    return _expr_text(expr)[0]


def _expr_text(expr: ConditionExpr) -> tuple[str, int]:
    if isinstance(expr, IntLit):
        if expr.value < 0:
            return f"-{-expr.value}", _UNARY_LEVEL
        return str(expr.value), _PRIMARY_LEVEL
    if isinstance(expr, IdentAtom):
        return expr.name, _PRIMARY_LEVEL
    if isinstance(expr, DefinedAtom):
        return f"defined({expr.name})", _PRIMARY_LEVEL
    if isinstance(expr, Unary):
        inner, level = _expr_text(expr.operand)
        if level < _PRIMARY_LEVEL:
            inner = f"({inner})"
        return f"{expr.op}{inner}", _UNARY_LEVEL
    if isinstance(expr, Binary):
        level = _BINARY_LEVELS[expr.op]
        left, left_level = _expr_text(expr.left)
        right, right_level = _expr_text(expr.right)
        if left_level < level:
            left = f"({left})"
        if right_level <= level:
            right = f"({right})"
        return f"{left} {expr.op} {right}", level
    assert isinstance(expr, Ternary)
    cond, cond_level = _expr_text(expr.cond)
    if cond_level < 1:
        cond = f"({cond})"
    then, _ = _expr_text(expr.then)
    other, other_level = _expr_text(expr.other)
    return f"{cond} ? {then} : {other}", 0


def parse_pc_text(text: str) -> PresenceCondition:
    """Inverse of pc_to_text; raises ParseError on malformed input."""
    return to_presence(parse_expr_tokens(tokenize(text)))
