"""Variational macro table.

Every `#define`/`#undef` is recorded together with the presence condition
of the region it appeared in, so one name can carry several simultaneously
live definitions with disjoint (or shadowing) conditions.  Expansion
against such a table is variational: where exactly one definition covers
the expansion context the replacement happens inline; where several
variants overlap, the expansion defers by emitting a variational token
that carries one alternative token sequence per satisfiable slice of the
context.  Downstream consumers conjoin the slice condition into whatever
entity or expression contains the invocation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .conditions import (
    FALSE,
    TRUE,
    Configuration,
    PresenceCondition,
    evaluate,
    fold_constant,
    p_and,
    p_not,
    p_or,
    possibly_satisfiable,
)
from .diagnostics import DiagnosticSink
from .tokens import is_identifier, tokenize

EXPANSION_DEPTH_LIMIT = 256
ALTERNATIVE_LIMIT = 16

_NAME_RE = re.compile(r"\s*([A-Za-z_]\w*)")


@dataclass(frozen=True)
class Tok:
    """One expansion-level token; hide carries the blue-paint set."""

    text: str
    hide: frozenset[str] = frozenset()


@dataclass(frozen=True)
class VarTok:
    """A deferred expansion: one alternative per context slice."""

    alternatives: tuple[tuple[PresenceCondition, tuple[Tok, ...]], ...]


@dataclass(frozen=True)
class MacroDefinition:
    name: str
    kind: str  # "object" | "function"
    params: tuple[str, ...] | None
    variadic: bool
    body: tuple[str, ...]
    pc: PresenceCondition
    origin: tuple[str, int]  # file, line


@dataclass(frozen=True)
class UndefMarker:
    name: str
    pc: PresenceCondition
    origin: tuple[str, int]


@dataclass
class MacroTable:
    entries: dict[str, list[MacroDefinition | UndefMarker]] = field(default_factory=dict)

    def copy(self) -> "MacroTable":
        return MacroTable({name: list(items) for name, items in self.entries.items()})

    # -- table construction ------------------------------------------------

    def define(
        self,
        argument: str,
        enclosing_pc: PresenceCondition,
        origin: tuple[str, int],
        diagnostics: DiagnosticSink | None = None,
    ) -> None:
        """Record one `#define`; malformed definitions are dropped with a
        diagnostic.  Function kind requires the parenthesis to touch the
        macro name."""
        m = _NAME_RE.match(argument)
        if not m:
            self._malformed(argument, origin, diagnostics)
            return
        name = m.group(1)
        rest = argument[m.end():]
        if rest.startswith("("):
            close = _matching_paren(rest)
            if close is None:
                self._malformed(argument, origin, diagnostics)
                return
            raw_params = [p.strip() for p in rest[1:close].split(",")]
            if raw_params == [""]:
                raw_params = []
            params: list[str] = []
            variadic = False
            for k, param in enumerate(raw_params):
                if param == "...":
                    if k != len(raw_params) - 1:
                        self._malformed(argument, origin, diagnostics)
                        return
                    variadic = True
                elif is_identifier(param):
                    params.append(param)
                else:
                    self._malformed(argument, origin, diagnostics)
                    return
            if len(set(params)) != len(params):
                self._malformed(argument, origin, diagnostics)
                return
            body = rest[close + 1:].strip()
            definition = MacroDefinition(
                name, "function", tuple(params), variadic, tuple(tokenize(body)), enclosing_pc, origin
            )
        else:
            definition = MacroDefinition(
                name, "object", None, False, tuple(tokenize(rest.strip())), enclosing_pc, origin
            )
        self.entries.setdefault(name, []).append(definition)

    def undef(
        self, argument: str, enclosing_pc: PresenceCondition, origin: tuple[str, int],
        diagnostics: DiagnosticSink | None = None,
    ) -> None:
        m = _NAME_RE.match(argument)
        if not m:
            if diagnostics is not None:
                diagnostics.warn("malformed-undef", f"cannot parse #undef {argument!r}",
                                 origin[0], origin[1])
            return
        self.entries.setdefault(m.group(1), []).append(UndefMarker(m.group(1), enclosing_pc, origin))

    def predefine(self, spec: str) -> None:
        """Command-line style NAME or NAME=VALUE, unconditional."""
        name, _, value = spec.partition("=")
        self.define(f"{name} {value or '1'}", TRUE, ("<command-line>", 0))

    @staticmethod
    def _malformed(argument, origin, diagnostics):
        if diagnostics is not None:
            diagnostics.warn("malformed-define", f"cannot parse #define {argument!r}",
                             origin[0], origin[1])

    # -- lookups -------------------------------------------------------------

    def slices(
        self, name: str, context: PresenceCondition
    ) -> list[tuple[PresenceCondition, MacroDefinition | None]] | None:
        """Partition the context by which definition of `name` is active.

        Returns None when the table has never seen the name.  Otherwise a
        list of (slice pc, definition-or-None) with pairwise-disjoint pcs
        covering the context; later entries shadow earlier ones.
        """
        entries = self.entries.get(name)
        if entries is None:
            return None
        out: list[tuple[PresenceCondition, MacroDefinition | None]] = []
        remaining = context
        for entry in reversed(entries):
            intersection = p_and(remaining, entry.pc)
            if possibly_satisfiable(intersection):
                out.append(
                    (intersection, entry if isinstance(entry, MacroDefinition) else None)
                )
            remaining = p_and(remaining, p_not(entry.pc))
            if not possibly_satisfiable(remaining):
                remaining = FALSE
                break
        if not isinstance(remaining, type(FALSE)) and possibly_satisfiable(remaining):
            out.append((remaining, None))
        return out

    def defined_pc(self, name: str, context: PresenceCondition) -> PresenceCondition | None:
        """Condition under which `name` is a defined macro, or None when the
        table does not manage the name (a free feature test)."""
        slices = self.slices(name, context)
        if slices is None:
            return None
        result: PresenceCondition = FALSE
        for pc, definition in slices:
            if definition is not None:
                result = p_or(result, pc)
        return fold_constant(result)

    def active_definition(self, name: str, config: Configuration) -> MacroDefinition | None:
        result: MacroDefinition | None = None
        for entry in self.entries.get(name, []):
            if evaluate(entry.pc, config):
                result = entry if isinstance(entry, MacroDefinition) else None
        return result

    def concrete_names(self) -> set[str]:
        """Names given an unconditional definition (root `#define` or -D);
        these are excluded from feature discovery."""
        out = set()
        for name, entries in self.entries.items():
            if any(isinstance(e, MacroDefinition) and e.pc == TRUE for e in entries):
                out.add(name)
        return out

    # -- expansion -------------------------------------------------------------

    def expand(
        self,
        toks: list[str] | list[Tok],
        context: PresenceCondition,
        diagnostics: DiagnosticSink | None = None,
    ) -> list[Tok | VarTok]:
        wrapped = [t if isinstance(t, Tok) else Tok(t) for t in toks]
        return self._expand(wrapped, context, diagnostics, 0)

    def condition_alternatives(
        self,
        toks: list[str],
        context: PresenceCondition,
        diagnostics: DiagnosticSink | None = None,
    ) -> list[tuple[PresenceCondition, list[str]]]:
        """Expand a conditional-directive argument into per-slice token
        lists; `defined` operands are left untouched."""
        expanded = self.expand(list(toks), context, diagnostics)
        return [
            (pc, [t.text for t in seq])
            for pc, seq in flatten_alternatives(expanded, diagnostics)
        ]

    def _expand(
        self,
        toks: list[Tok | VarTok],
        context: PresenceCondition,
        diagnostics: DiagnosticSink | None,
        depth: int,
    ) -> list[Tok | VarTok]:
        out: list[Tok | VarTok] = []
        i = 0
        while i < len(toks):
            tok = toks[i]
            if isinstance(tok, VarTok) or not is_identifier(tok.text) or tok.text == "defined":
                if isinstance(tok, Tok) and tok.text == "defined":
                    # protect the operand of a defined() test
                    out.append(tok)
                    j = i + 1
                    if j < len(toks) and isinstance(toks[j], Tok) and toks[j].text == "(":
                        while j < len(toks) and isinstance(toks[j], Tok):
                            out.append(toks[j])
                            if toks[j].text == ")":
                                break
                            j += 1
                        i = j + 1
                        continue
                    if j < len(toks) and isinstance(toks[j], Tok) and is_identifier(toks[j].text):
                        out.append(toks[j])
                        i = j + 1
                        continue
                    i += 1
                    continue
                out.append(tok)
                i += 1
                continue
            name = tok.text
            if name in tok.hide or name not in self.entries:
                out.append(tok)
                i += 1
                continue
            slices = self.slices(name, context)
            if slices is None or all(d is None for _, d in slices):
                out.append(tok)
                i += 1
                continue
            if depth >= EXPANSION_DEPTH_LIMIT:
                if diagnostics is not None:
                    diagnostics.warn("expansion-depth", f"expansion depth exceeded at {name!r}")
                out.append(tok)
                i += 1
                continue
            any_function = any(d is not None and d.kind == "function" for _, d in slices)
            args = None
            consumed_end = i + 1
            if any_function and i + 1 < len(toks):
                nxt = toks[i + 1]
                if isinstance(nxt, Tok) and nxt.text == "(":
                    args, after = _parse_invocation_args(toks, i + 2)
                    if args is not None:
                        consumed_end = after
            invocation_tail = toks[i + 1 : consumed_end]
            outcomes: list[tuple[PresenceCondition, list[Tok | VarTok]]] = []
            for slice_pc, definition in slices:
                outcomes.append(
                    (
                        slice_pc,
                        self._expand_one(
                            tok, definition, args, invocation_tail, slice_pc, diagnostics, depth
                        ),
                    )
                )
            if len(outcomes) == 1:
                out.extend(outcomes[0][1])
            else:
                alternatives: list[tuple[PresenceCondition, tuple[Tok, ...]]] = []
                for slice_pc, seq in outcomes:
                    for sub_pc, flat in flatten_alternatives(seq, diagnostics, base=slice_pc):
                        alternatives.append((sub_pc, flat))
                out.append(VarTok(tuple(alternatives[:ALTERNATIVE_LIMIT])))
                if len(alternatives) > ALTERNATIVE_LIMIT and diagnostics is not None:
                    diagnostics.warn(
                        "variational-blowup",
                        f"{name!r} expansion produced {len(alternatives)} variants; truncated",
                    )
            i = consumed_end
        return out

    def _expand_one(
        self,
        tok: Tok,
        definition: MacroDefinition | None,
        args: list[list[Tok | VarTok]] | None,
        invocation_tail: list[Tok | VarTok],
        slice_pc: PresenceCondition,
        diagnostics: DiagnosticSink | None,
        depth: int,
    ) -> list[Tok | VarTok]:
        hide = tok.hide | {tok.text}
        if definition is None:
            # not defined in this slice: the name plus any invocation text
            # stays, though the tail may still contain other macros
            return [tok] + self._expand(list(invocation_tail), slice_pc, diagnostics, depth + 1)
        if definition.kind == "object":
            body = [Tok(t, hide) for t in definition.body]
            expanded = self._expand(body, slice_pc, diagnostics, depth + 1)
            return expanded + self._expand(list(invocation_tail), slice_pc, diagnostics, depth + 1)
        if args is None:
            return [tok]  # function-like name without an invocation
        assert definition.params is not None
        arity_ok = (
            len(args) >= len(definition.params)
            if definition.variadic
            else len(args) == len(definition.params)
            or (not definition.params and args == [[]])
        )
        if not arity_ok:
            if diagnostics is not None:
                diagnostics.warn(
                    "argument-count",
                    f"{definition.name!r} expects"
                    f" {len(definition.params)}{'+' if definition.variadic else ''} arguments,"
                    f" got {len(args)}",
                )
            return [tok] + list(invocation_tail)
        if any(isinstance(t, VarTok) for arg in args for t in arg):
            if diagnostics is not None:
                diagnostics.warn(
                    "variational-argument",
                    f"{definition.name!r} invoked with a variational argument; left unexpanded",
                )
            return [tok] + list(invocation_tail)
        substituted = self._substitute(definition, [list(a) for a in args], hide, slice_pc, diagnostics, depth)
        return self._expand(substituted, slice_pc, diagnostics, depth + 1)

    def _substitute(
        self,
        definition: MacroDefinition,
        args: list[list[Tok]],
        hide: frozenset[str],
        slice_pc: PresenceCondition,
        diagnostics: DiagnosticSink | None,
        depth: int,
    ) -> list[Tok | VarTok]:
        params = list(definition.params or ())
        raw: dict[str, list[Tok]] = {}
        for k, param in enumerate(params):
            raw[param] = args[k] if k < len(args) else []
        if definition.variadic:
            rest: list[Tok] = []
            for k in range(len(params), len(args)):
                if rest:
                    rest.append(Tok(","))
                rest.extend(args[k])
            raw["__VA_ARGS__"] = rest

        expanded_cache: dict[str, list[Tok | VarTok]] = {}

        def expanded_arg(param: str) -> list[Tok | VarTok]:
            if param not in expanded_cache:
                expanded_cache[param] = self._expand(
                    list(raw[param]), slice_pc, diagnostics, depth + 1
                )
            return expanded_cache[param]

        body = list(definition.body)
        out: list[Tok | VarTok] = []
        j = 0
        while j < len(body):
            text = body[j]
            if text == "#" and j + 1 < len(body) and body[j + 1] in raw:
                literal = " ".join(t.text for t in raw[body[j + 1]]).replace('"', '\\"')
                out.append(Tok(f'"{literal}"', hide))
                j += 2
                continue
            if j + 2 < len(body) and body[j + 1] == "##":
                left = [Tok(t.text, hide) for t in raw[text]] if text in raw else [Tok(text, hide)]
                j += 1
                while j < len(body) and body[j] == "##":
                    right_text = body[j + 1] if j + 1 < len(body) else ""
                    right = (
                        [Tok(t.text, hide) for t in raw[right_text]]
                        if right_text in raw
                        else ([Tok(right_text, hide)] if right_text else [])
                    )
                    merged_text = (left[-1].text if left else "") + (right[0].text if right else "")
                    middle = [Tok(merged_text, hide)] if merged_text else []
                    left = left[:-1] + middle + right[1:]
                    j += 2
                out.extend(left)
                continue
            if text in raw:
                out.extend(
                    t if isinstance(t, VarTok) else Tok(t.text, t.hide | hide)
                    for t in expanded_arg(text)
                )
                j += 1
                continue
            out.append(Tok(text, hide))
            j += 1
        return out


def _matching_paren(text: str) -> int | None:
    depth = 0
    for k, c in enumerate(text):
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
            if depth == 0:
                return k
    return None


def _parse_invocation_args(
    toks: list[Tok | VarTok], start: int
) -> tuple[list[list[Tok | VarTok]] | None, int]:
    """Collect comma-separated arguments up to the matching ')'.
    Returns (None, start) when the invocation is unterminated."""
    args: list[list[Tok | VarTok]] = [[]]
    depth = 0
    i = start
    while i < len(toks):
        tok = toks[i]
        text = tok.text if isinstance(tok, Tok) else None
        if text == "(":
            depth += 1
            args[-1].append(tok)
        elif text == ")":
            if depth == 0:
                return args, i + 1
            depth -= 1
            args[-1].append(tok)
        elif text == "," and depth == 0:
            args.append([])
        else:
            args[-1].append(tok)
        i += 1
    return None, start


def flatten_alternatives(
    seq: list[Tok | VarTok],
    diagnostics: DiagnosticSink | None = None,
    base: PresenceCondition = TRUE,
) -> list[tuple[PresenceCondition, tuple[Tok, ...]]]:
    """Cross-product a token sequence's variational tokens into concrete
    alternatives; contradictory combinations are pruned."""
    acc: list[tuple[PresenceCondition, list[Tok]]] = [(base, [])]
    for item in seq:
        if isinstance(item, Tok):
            for _, toks in acc:
                toks.append(item)
            continue
        expanded: list[tuple[PresenceCondition, list[Tok]]] = []
        for pc, toks in acc:
            for alt_pc, alt_toks in item.alternatives:
                joint = p_and(pc, alt_pc)
                if possibly_satisfiable(joint):
                    expanded.append((joint, toks + list(alt_toks)))
        acc = expanded[:ALTERNATIVE_LIMIT]
        if len(expanded) > ALTERNATIVE_LIMIT and diagnostics is not None:
            diagnostics.warn("variational-blowup", "alternative cross-product truncated")
        if not acc:
            acc = [(FALSE, [])]
    return [(pc, tuple(toks)) for pc, toks in acc]


def plain_text(seq: list[Tok | VarTok]) -> list[str]:
    """Token texts with variational tokens collapsed to their first
    alternative; used for display only."""
    out: list[str] = []
    for item in seq:
        if isinstance(item, Tok):
            out.append(item.text)
        elif item.alternatives:
            out.extend(t.text for t in item.alternatives[0][1])
    return out
