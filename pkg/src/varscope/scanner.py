"""Source scanning: logical lines, directives, regions, includes.

A translation unit is one `.c` file with its includes resolved inline.
Scanning walks the merged item stream once, keeping the conditional-region
stack and the variational macro table in step, so every text line comes
out attributed to its innermost region with macro expansion applied at
that point in the file.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from pathlib import Path

from .conditions import (
    FALSE,
    TRUE,
    ConditionExpr,
    IntLit,
    PFalse,
    PresenceCondition,
    derive_branch_condition,
    p_and,
    p_not,
    parse_condition,
    to_presence,
)
from .diagnostics import DiagnosticSink
from .macros import MacroTable, flatten_alternatives
from .tokens import tokenize

INCLUDE_DEPTH_LIMIT = 64

_DIRECTIVE_RE = re.compile(r"^\s*#\s*([A-Za-z_]\w*)?[ \t]*(.*?)\s*$", re.DOTALL)
_GUARD_IF_RE = re.compile(r"^!\s*defined\s*\(?\s*([A-Za-z_]\w*)\s*\)?$")


@dataclass(frozen=True)
class LogicalLine:
    file_id: str
    physical_span: tuple[int, int]
    text: str


class DirectiveKind(enum.Enum):
    IF = "if"
    IFDEF = "ifdef"
    IFNDEF = "ifndef"
    ELIF = "elif"
    ELSE = "else"
    ENDIF = "endif"
    DEFINE = "define"
    UNDEF = "undef"
    INCLUDE = "include"
    OTHER = "other"


_KIND_BY_KEYWORD = {k.value: k for k in DirectiveKind if k is not DirectiveKind.OTHER}


@dataclass(frozen=True)
class Directive:
    kind: DirectiveKind
    argument_text: str
    line: LogicalLine


@dataclass(eq=False)
class Region:
    """One branch of a conditional group (or a file/unit root)."""

    group_id: str | None
    branch_index: int
    own_condition: ConditionExpr | None
    effective_pc: PresenceCondition
    parent: "Region | None"
    children: list["Region"] = field(default_factory=list)
    first_item: int | None = None
    last_item: int | None = None
    discarded: bool = False

    def note_item(self, index: int) -> None:
        if self.first_item is None:
            self.first_item = index
        self.last_item = index

    def path(self) -> list["Region"]:
        chain: list[Region] = []
        node: Region | None = self
        while node is not None:
            chain.append(node)
            node = node.parent
        chain.reverse()
        return chain

    def is_ancestor_of(self, other: "Region") -> bool:
        node = other.parent
        while node is not None:
            if node is self:
                return True
            node = node.parent
        return False


@dataclass
class AttributedLine:
    """A text line with its region and expanded token alternatives."""

    line: LogicalLine
    region: Region
    blank: bool
    dead: bool  # region pc is structurally false
    alternatives: tuple[tuple[PresenceCondition, tuple[str, ...]], ...]


@dataclass(frozen=True)
class IncludeEdge:
    source_file: str
    target: str
    resolved: bool
    line: int


@dataclass
class UnitScan:
    unit_path: str
    lines: list[AttributedLine]
    items: list[tuple[str, object, Region]]  # ("text"|"directive", payload, region)
    root: Region
    table: MacroTable
    include_edges: list[IncludeEdge]
    diagnostics: DiagnosticSink


# --------------------------------------------------------------------------
# Phase 1: splicing and comment stripping


def splice_and_strip(
    raw: bytes, file_id: str, diagnostics: DiagnosticSink | None = None
) -> list[LogicalLine]:
    """Decode, join spliced lines, and blank out comments.

    Bytes that fail UTF-8 fall back to Latin-1, so scanning never aborts on
    encoding.  Each comment becomes a single space; string and character
    literals are left untouched.  A comment left open at end of file is
    reported and closed there.
    """
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        text = raw.decode("latin-1")
    if "??=" in text and diagnostics is not None:
        diagnostics.warn("trigraph", "trigraphs are not interpreted", file_id)
    text = text.replace("\r\n", "\n")

    lines: list[LogicalLine] = []
    buf: list[str] = []
    start_phys = 1
    phys = 1
    comment_open_line = 0
    state = "code"
    i = 0
    n = len(text)

    def emit() -> None:
        nonlocal start_phys
        lines.append(LogicalLine(file_id, (start_phys, phys), "".join(buf)))
        buf.clear()
        start_phys = phys + 1

    while i < n:
        c = text[i]
        if c == "\\" and i + 1 < n and text[i + 1] == "\n" and state != "line_comment":
            phys += 1
            i += 2
            continue
        if c == "\n":
            if state == "block_comment":
                phys += 1
                i += 1
                continue
            if state in ("line_comment", "string", "char"):
                state = "code"
            emit()
            phys += 1
            i += 1
            continue
        if state == "code":
            if c == "/" and i + 1 < n and text[i + 1] == "*":
                buf.append(" ")
                state = "block_comment"
                comment_open_line = phys
                i += 2
                continue
            if c == "/" and i + 1 < n and text[i + 1] == "/":
                buf.append(" ")
                state = "line_comment"
                i += 2
                continue
            if c == '"':
                state = "string"
            elif c == "'":
                state = "char"
            buf.append(c)
            i += 1
        elif state in ("string", "char"):
            if c == "\\" and i + 1 < n and text[i + 1] != "\n":
                buf.append(c)
                buf.append(text[i + 1])
                i += 2
                continue
            if (state == "string" and c == '"') or (state == "char" and c == "'"):
                state = "code"
            buf.append(c)
            i += 1
        elif state == "line_comment":
            i += 1
        else:  # block_comment
            if c == "*" and i + 1 < n and text[i + 1] == "/":
                state = "code"
                i += 2
            else:
                i += 1
    if state == "block_comment" and diagnostics is not None:
        diagnostics.warn(
            "unterminated-comment",
            "comment opened here is never closed; closed at end of file",
            file_id,
            comment_open_line,
        )
    if buf or (n and text[-1] != "\n"):
        emit()
    return lines


# --------------------------------------------------------------------------
# Phase 2: directive recognition


def scan_directives(lines: list[LogicalLine]) -> list[Directive | LogicalLine]:
    """Classify each logical line: a directive or a plain text line."""
    items: list[Directive | LogicalLine] = []
    for line in lines:
        stripped = line.text.lstrip()
        if not stripped.startswith("#"):
            items.append(line)
            continue
        m = _DIRECTIVE_RE.match(line.text)
        keyword = (m.group(1) or "").lower() if m else ""
        argument = m.group(2) if m else ""
        kind = _KIND_BY_KEYWORD.get(keyword, DirectiveKind.OTHER)
        items.append(Directive(kind, argument, line))
    return items


# --------------------------------------------------------------------------
# Phase 3: region tree walking


@dataclass
class _Group:
    group_id: str
    parent_region: Region
    conditions: list[ConditionExpr | None]
    reach_context: PresenceCondition  # parent pc AND negated prior conditions
    saw_else: bool = False


class RegionWalker:
    """Consumes directives and text lines, maintaining the region stack,
    the macro table, and per-line expansion."""

    def __init__(
        self,
        table: MacroTable | None,
        diagnostics: DiagnosticSink,
        expand_text: bool = True,
    ):
        self.table = table
        self.diagnostics = diagnostics
        self.expand_text = expand_text and table is not None
        self.root = Region(None, 0, None, TRUE, None)
        self.current = self.root
        self.groups: list[_Group] = []
        self.lines: list[AttributedLine] = []
        self.items: list[tuple[str, object, Region]] = []
        self._group_counter = itertools.count()
        self._error_names = (f"__parse_error_{k}" for k in itertools.count())
        self._item_index = 0

    # -- helpers

    def _note(self, kind: str, payload, region: Region) -> None:
        region.note_item(self._item_index)
        self.items.append((kind, payload, region))
        self._item_index += 1

    def _group_child_count(self, group: _Group) -> int:
        return sum(1 for c in group.parent_region.children if c.group_id == group.group_id)

    def _open_branch(self, group: _Group, condition: ConditionExpr | None) -> None:
        group.conditions.append(condition)
        branch_pc = derive_branch_condition(group.conditions, len(group.conditions) - 1)
        region = Region(
            group.group_id,
            self._group_child_count(group),
            condition,
            p_and(group.parent_region.effective_pc, branch_pc),
            group.parent_region,
        )
        group.parent_region.children.append(region)
        self.current = region

    def _discard_branch(self, group: _Group) -> None:
        region = Region(
            group.group_id,
            self._group_child_count(group),
            None,
            FALSE,
            group.parent_region,
            discarded=True,
        )
        group.parent_region.children.append(region)
        self.current = region

    def _parse(self, text: str, context: PresenceCondition) -> ConditionExpr:
        return parse_condition(
            text, self.table, context, self.diagnostics, self._error_names
        )

    # -- item entry points

    def feed(self, item: Directive | LogicalLine, guard_condition: bool = False) -> None:
        if isinstance(item, Directive):
            self._feed_directive(item, guard_condition)
        else:
            self._feed_text(item)

    def _feed_text(self, line: LogicalLine) -> None:
        region = self.current
        self._note("text", line, region)
        blank = not line.text.strip()
        dead = isinstance(region.effective_pc, PFalse)
        if blank:
            alternatives: tuple = ()
        else:
            toks = tokenize(line.text)
            if self.expand_text and not dead:
                expanded = self.table.expand(toks, region.effective_pc, self.diagnostics)
                alternatives = tuple(
                    (pc, tuple(t.text for t in seq))
                    for pc, seq in flatten_alternatives(
                        expanded, self.diagnostics, base=region.effective_pc
                    )
                )
            else:
                alternatives = ((region.effective_pc, tuple(toks)),)
        self.lines.append(AttributedLine(line, region, blank, dead, alternatives))

    def _feed_directive(self, directive: Directive, guard_condition: bool) -> None:
        kind = directive.kind
        line = directive.line
        if kind in (DirectiveKind.IF, DirectiveKind.IFDEF, DirectiveKind.IFNDEF):
            parent = self.current
            self._note("directive", directive, parent)
            group = _Group(
                f"{line.file_id}#g{next(self._group_counter)}",
                parent,
                [],
                parent.effective_pc,
            )
            self.groups.append(group)
            if guard_condition:
                condition: ConditionExpr = IntLit(1)
            else:
                text = directive.argument_text
                if kind is DirectiveKind.IFDEF:
                    text = f"defined({_first_word(text)})"
                elif kind is DirectiveKind.IFNDEF:
                    text = f"!defined({_first_word(text)})"
                condition = self._parse(text, group.reach_context)
            self._open_branch(group, condition)
            return
        if kind is DirectiveKind.ELIF:
            if not self.groups:
                self._unbalanced(directive)
                return
            group = self.groups[-1]
            self._note("directive", directive, group.parent_region)
            if group.saw_else:
                self.diagnostics.warn(
                    "elif-after-else", "#elif after #else; branch ignored",
                    line.file_id, line.physical_span[0],
                )
                self._discard_branch(group)
                return
            prior = group.conditions[-1]
            if prior is not None:
                group.reach_context = p_and(group.reach_context, p_not(to_presence(prior)))
            condition = self._parse(directive.argument_text, group.reach_context)
            self._open_branch(group, condition)
            return
        if kind is DirectiveKind.ELSE:
            if not self.groups:
                self._unbalanced(directive)
                return
            group = self.groups[-1]
            self._note("directive", directive, group.parent_region)
            if group.saw_else:
                self.diagnostics.warn(
                    "else-after-else", "duplicate #else; branch ignored",
                    line.file_id, line.physical_span[0],
                )
                self._discard_branch(group)
                return
            group.saw_else = True
            self._open_branch(group, None)
            return
        if kind is DirectiveKind.ENDIF:
            if not self.groups:
                self.diagnostics.warn(
                    "unbalanced-endif", "#endif without an open group",
                    line.file_id, line.physical_span[0],
                )
                self._note("directive", directive, self.current)
                return
            group = self.groups.pop()
            self.current = group.parent_region
            self._note("directive", directive, self.current)
            return

        region = self.current
        self._note("directive", directive, region)
        dead = isinstance(region.effective_pc, PFalse)
        if kind is DirectiveKind.DEFINE and self.table is not None and not dead:
            origin = (line.file_id, line.physical_span[0])
            self.table.define(directive.argument_text, region.effective_pc, origin, self.diagnostics)
        elif kind is DirectiveKind.UNDEF and self.table is not None and not dead:
            origin = (line.file_id, line.physical_span[0])
            self.table.undef(directive.argument_text, region.effective_pc, origin, self.diagnostics)
        # INCLUDE is handled by the unit scanner; OTHER has no effect

    def _unbalanced(self, directive: Directive) -> None:
        line = directive.line
        self.diagnostics.warn(
            "unbalanced-directive",
            f"#{directive.kind.value} without an open group; ignored",
            line.file_id,
            line.physical_span[0],
        )
        self._note("directive", directive, self.current)

    def finish(self, file_id: str) -> None:
        while self.groups:
            group = self.groups.pop()
            self.diagnostics.warn(
                "missing-endif",
                "conditional group still open at end of input; closed implicitly",
                file_id,
            )
            self.current = group.parent_region


def _first_word(text: str) -> str:
    words = text.split()
    return words[0] if words else "__missing__"


def build_region_tree(
    items: list[Directive | LogicalLine],
    table: MacroTable | None = None,
    diagnostics: DiagnosticSink | None = None,
) -> RegionWalker:
    """Walk one unit's merged item stream and return the finished walker
    (region tree root, attributed lines, table state)."""
    sink = diagnostics if diagnostics is not None else DiagnosticSink()
    walker = RegionWalker(table, sink)
    for item in items:
        walker.feed(item)
    file_id = ""
    for item in items:
        line = item.line if isinstance(item, Directive) else item
        file_id = line.file_id
        break
    walker.finish(file_id)
    return walker


# --------------------------------------------------------------------------
# Include resolution and unit scanning


def _detect_guard(items: list[Directive | LogicalLine]) -> tuple[int, str] | None:
    """Recognize the classic include-guard shape: the file's first
    significant item is `#ifndef NAME` (or `#if !defined(NAME)`), the next
    is `#define NAME`, and the matching `#endif` is the last significant
    item."""
    significant = [
        (k, item)
        for k, item in enumerate(items)
        if isinstance(item, Directive) or item.text.strip()
    ]
    if len(significant) < 3:
        return None
    first_index, first = significant[0]
    if not isinstance(first, Directive):
        return None
    if first.kind is DirectiveKind.IFNDEF:
        name = _first_word(first.argument_text)
    elif first.kind is DirectiveKind.IF:
        m = _GUARD_IF_RE.match(first.argument_text.strip())
        if not m:
            return None
        name = m.group(1)
    else:
        return None
    second = significant[1][1]
    if not (
        isinstance(second, Directive)
        and second.kind is DirectiveKind.DEFINE
        and _first_word(second.argument_text) == name
    ):
        return None
    depth = 0
    closing = None
    for k, item in significant:
        if not isinstance(item, Directive):
            continue
        if item.kind in (DirectiveKind.IF, DirectiveKind.IFDEF, DirectiveKind.IFNDEF):
            depth += 1
        elif item.kind is DirectiveKind.ENDIF:
            depth -= 1
            if depth == 0 and closing is None:
                closing = k
    if closing is None or closing != significant[-1][0]:
        return None
    return first_index, name


def _include_target(
    argument: str, table: MacroTable | None, context: PresenceCondition,
    diagnostics: DiagnosticSink,
) -> tuple[str, str] | None:
    """Return (form, name) where form is "quote" or "angle"."""
    text = argument.strip()
    if not (text.startswith('"') or text.startswith("<")) and table is not None:
        expanded = table.expand(tokenize(text), context, diagnostics)
        alternatives = flatten_alternatives(expanded, diagnostics, base=context)
        text = "".join(t.text for t in alternatives[0][1]) if alternatives else text
        if len(alternatives) > 1:
            diagnostics.warn(
                "variational-include",
                f"include target {argument!r} varies by configuration; first variant used",
            )
    if text.startswith('"') and text.endswith('"') and len(text) > 1:
        return "quote", text[1:-1]
    if text.startswith("<") and text.endswith(">") and len(text) > 1:
        return "angle", text[1:-1]
    return None


def resolve_include(
    form: str,
    name: str,
    including_dir: Path,
    search_paths: list[Path],
    mode: str,
) -> Path | None:
    """Locate an include target on disk; None means "stub it out".

    Quoted includes look next to the including file, then along the search
    paths.  Angle includes are looked up only in `full` mode; the default
    `project-only` mode stubs system headers entirely.
    """
    candidates: list[Path] = []
    if form == "quote":
        candidates.append(including_dir / name)
        candidates.extend(base / name for base in search_paths)
    elif mode == "full":
        candidates.extend(base / name for base in search_paths)
    for candidate in candidates:
        if candidate.is_file():
            return candidate
    return None


@dataclass
class ScanOptions:
    search_paths: list[Path] = field(default_factory=list)
    predefines: list[str] = field(default_factory=list)
    include_mode: str = "project-only"  # or "full"


def scan_unit(
    unit_path: Path,
    root_dir: Path,
    options: ScanOptions | None = None,
    diagnostics: DiagnosticSink | None = None,
) -> UnitScan:
    """Scan one translation unit: the `.c` file plus its resolved includes,
    sharing a single macro table and region walker."""
    options = options or ScanOptions()
    sink = diagnostics if diagnostics is not None else DiagnosticSink()
    table = MacroTable()
    for predef in options.predefines:
        table.predefine(predef)
    table.define('__FILE__ "<file>"', TRUE, ("<builtin>", 0))
    table.define("__LINE__ 0", TRUE, ("<builtin>", 0))
    walker = RegionWalker(table, sink)
    edges: list[IncludeEdge] = []
    unit_id = file_identifier(unit_path, root_dir)

    def scan_file(path: Path, file_id: str, stack: list[Path], depth: int) -> None:
        try:
            raw = path.read_bytes()
        except OSError as exc:
            sink.warn("unreadable-file", f"cannot read {path}: {exc}", file_id)
            return
        items = scan_directives(splice_and_strip(raw, file_id, sink))
        guard = _detect_guard(items)
        guard_index = None
        if guard is not None and not table.entries.get(guard[1]):
            guard_index = guard[0]
        for index, item in enumerate(items):
            if isinstance(item, Directive) and item.kind is DirectiveKind.INCLUDE:
                walker.feed(item)
                _handle_include(item, path.parent, file_id, stack, depth)
                continue
            walker.feed(item, guard_condition=(index == guard_index))

    def _handle_include(
        directive: Directive, including_dir: Path, file_id: str,
        stack: list[Path], depth: int,
    ) -> None:
        line_no = directive.line.physical_span[0]
        if isinstance(walker.current.effective_pc, PFalse):
            return  # inside a dead region: real preprocessing never sees it
        target = _include_target(
            directive.argument_text, table, walker.current.effective_pc, sink
        )
        if target is None:
            sink.warn(
                "malformed-include",
                f"cannot parse include target {directive.argument_text!r}",
                file_id,
                line_no,
            )
            return
        form, name = target
        resolved = resolve_include(form, name, including_dir, options.search_paths, options.include_mode)
        if resolved is None:
            edges.append(IncludeEdge(file_id, name, False, line_no))
            if options.include_mode == "full":
                sink.warn("unresolved-include", f"cannot resolve {name!r}; treated as empty",
                          file_id, line_no)
            return
        resolved = resolved.resolve()
        target_id = file_identifier(resolved, root_dir)
        edges.append(IncludeEdge(file_id, target_id, True, line_no))
        if resolved in stack:
            sink.warn("include-cycle", f"{target_id!r} is already being included; skipped",
                      file_id, line_no)
            return
        if depth >= INCLUDE_DEPTH_LIMIT:
            sink.warn("include-depth", f"include depth limit reached at {target_id!r}; skipped",
                      file_id, line_no)
            return
        scan_file(resolved, target_id, stack + [resolved], depth + 1)

    start = unit_path.resolve()
    scan_file(start, unit_id, [start], 0)
    walker.finish(unit_id)
    return UnitScan(
        unit_path=unit_id,
        lines=walker.lines,
        items=walker.items,
        root=walker.root,
        table=table,
        include_edges=edges,
        diagnostics=sink,
    )


def scan_source(text: str, file_id: str = "<memory>.c") -> UnitScan:
    """Scan source text directly (no include resolution); handy for
    single-file analysis and tests."""
    sink = DiagnosticSink()
    table = MacroTable()
    walker = RegionWalker(table, sink)
    for item in scan_directives(splice_and_strip(text.encode(), file_id, sink)):
        walker.feed(item)
    walker.finish(file_id)
    return UnitScan(
        unit_path=file_id,
        lines=walker.lines,
        items=walker.items,
        root=walker.root,
        table=table,
        include_edges=[],
        diagnostics=sink,
    )


def file_identifier(path: Path, root_dir: Path) -> str:
    try:
        return path.resolve().relative_to(root_dir.resolve()).as_posix()
    except ValueError:
        return path.as_posix()
