"""Tolerant structural extraction of entities and relations.

Works on the region-attributed, macro-expanded token lines of one
translation unit.  Recognition is token-level and forgiving: function
definitions are `name (params) { ... }` at file scope, file-scope
declarations ending in `;` yield one global variable per declarator, and
`struct|union|enum NAME { ... }` yields a composite.  An entity whose
structural tokens span sibling branches of a conditional group (or the
alternatives of a deferred macro expansion) is re-parsed once per branch
and split into one entity per variant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .conditions import (
    TRUE,
    PresenceCondition,
    p_and,
    p_not,
    p_or,
    possibly_satisfiable,
    to_presence,
)
from .diagnostics import DiagnosticSink
from .scanner import Region, UnitScan
from .tokens import is_identifier

KEYWORDS = frozenset(
    """auto break case char const continue default do double else enum extern
    float for goto if inline int long register restrict return short signed
    sizeof static struct switch typedef union unsigned void volatile while
    _Bool _Complex _Atomic _Noreturn _Static_assert _Thread_local""".split()
)

_TYPE_STARTERS = frozenset(
    """auto char const double enum extern float inline int long register
    restrict short signed static struct union unsigned void volatile _Bool
    _Complex _Atomic""".split()
)

_COMPOSITE_KEYWORDS = {"struct": "Struct", "union": "Union", "enum": "Enum"}

_KIND_CODES = {
    "TranslationUnit": "unit",
    "Function": "fn",
    "GlobalVariable": "var",
    "Struct": "struct",
    "Union": "union",
    "Enum": "enum",
}

_WRITE_FOLLOWERS = frozenset(
    {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="}
)
_SPLIT_DEPTH_LIMIT = 3


@dataclass
class Entity:
    id: str
    kind: str
    name: str
    pc: PresenceCondition
    span: tuple[str, int, int]  # file, first physical line, last physical line
    loc: int | None
    parent: str | None


@dataclass
class Relation:
    kind: str  # Calls | Reads | Writes | Contains
    source: str
    target: str
    pc: PresenceCondition
    sites: tuple[tuple[str, int], ...]


@dataclass
class _Slot:
    index: int
    file: str
    span: tuple[int, int]
    region: Region
    blank: bool
    alternatives: tuple[tuple[PresenceCondition, tuple[str, ...]], ...]
    rep: int


@dataclass
class _Body:
    walks: list[tuple[PresenceCondition, tuple[str, ...], tuple[str, int]]]
    local_names: set[str]


@dataclass
class _RawEntity:
    kind: str
    name: str
    pc: PresenceCondition
    file: str
    span: tuple[int, int]
    loc: int | None
    branch_tag: int | None
    region: Region
    body: _Body | None = None


@dataclass
class UnitExtraction:
    scan: UnitScan
    tu: Entity
    entities: list[Entity]  # includes the translation unit itself
    bodies: dict[str, _Body] = field(default_factory=dict)


# --------------------------------------------------------------------------
# slot preparation


def _make_slots(scan: UnitScan) -> list[_Slot]:
    slots: list[_Slot] = []
    for line in scan.lines:
        if line.dead:
            continue
        alternatives = line.alternatives
        rep = 0
        if len(alternatives) > 1:
            rep = max(range(len(alternatives)), key=lambda k: len(alternatives[k][1]))
        slots.append(
            _Slot(
                len(slots),
                line.line.file_id,
                line.line.physical_span,
                line.region,
                line.blank,
                alternatives,
                rep,
            )
        )
    return slots


# --------------------------------------------------------------------------
# candidate scanning


@dataclass
class _Candidate:
    tokens: list[tuple[_Slot, str, PresenceCondition]]
    opener: int | None  # index into tokens of the body '{'
    closer: int | None
    terminator: int | None  # index of the ';') if any
    kindhint: str  # "function" | "declaration" | "composite"


class _TailSkipped(Exception):
    pass


def _parse_candidates(
    slots: list[_Slot],
    choose,
    diagnostics: DiagnosticSink | None,
) -> list[_Candidate]:
    stream: list[tuple[_Slot, str, PresenceCondition]] = []
    for slot in slots:
        if slot.blank:
            continue
        chosen = choose(slot)
        if chosen is None:
            continue
        pc, toks = chosen
        stream.extend((slot, tok, pc) for tok in toks)

    candidates: list[_Candidate] = []
    n = len(stream)
    i = 0

    def skip_braces(start: int) -> int:
        depth = 0
        k = start
        while k < n:
            tok = stream[k][1]
            if tok == "{":
                depth += 1
            elif tok == "}":
                depth -= 1
                if depth == 0:
                    return k
            k += 1
        raise _TailSkipped

    try:
        while i < n:
            slot, tok, _pc = stream[i]
            if tok == ";":
                i += 1
                continue
            if tok == "}":
                if diagnostics is not None:
                    diagnostics.warn(
                        "skipped-tail",
                        "unmatched '}' at file scope; rest of unit skipped",
                        slot.file,
                        slot.span[0],
                    )
                break
            start = i
            paren = 0
            saw_eq = False
            prev = None
            opener = closer = terminator = None
            kindhint = "declaration"
            has_composite = False
            j = i
            while j < n:
                s2, t2, _p2 = stream[j]
                if t2 == "(":
                    paren += 1
                elif t2 == ")":
                    paren = max(0, paren - 1)
                elif t2 in _COMPOSITE_KEYWORDS and paren == 0 and opener is None:
                    has_composite = True
                elif t2 == "=" and paren == 0 and opener is None:
                    saw_eq = True
                elif t2 == "{" and paren == 0:
                    if saw_eq:
                        j = skip_braces(j)
                        prev = "}"
                        j += 1
                        continue
                    if prev == ")":
                        opener = j
                        closer = skip_braces(j)
                        kindhint = "function"
                        j = closer + 1
                        if j < n and stream[j][1] == ";":
                            terminator = j
                            j += 1
                        break
                    if has_composite:
                        opener = j
                        closer = j = skip_braces(j)
                        kindhint = "composite"
                        prev = "}"
                        j += 1
                        continue
                    if diagnostics is not None:
                        diagnostics.warn(
                            "unknown-block",
                            "brace block without a recognizable head"
                            " (unsupported definition style?); skipped",
                            s2.file,
                            s2.span[0],
                        )
                    j = skip_braces(j) + 1
                    start = j  # discard what came before
                    paren = 0
                    saw_eq = False
                    prev = None
                    has_composite = False
                    continue
                elif t2 == ";" and paren == 0:
                    terminator = j
                    j += 1
                    break
                prev = t2
                j += 1
            else:
                if j > start and diagnostics is not None:
                    diagnostics.warn(
                        "incomplete-declaration",
                        "declaration still open at end of unit; dropped",
                        stream[start][0].file,
                        stream[start][0].span[0],
                    )
                break
            if j > start and start < n:
                candidates.append(
                    _Candidate(stream[start:j], _rel(opener, start), _rel(closer, start),
                               _rel(terminator, start), kindhint)
                )
            i = j
    except _TailSkipped:
        if diagnostics is not None:
            diagnostics.warn(
                "skipped-tail",
                "unmatched '{'; rest of unit skipped",
                stream[i][0].file,
                stream[i][0].span[0],
            )
    return candidates


def _rel(index: int | None, start: int) -> int | None:
    return None if index is None else index - start


# --------------------------------------------------------------------------
# declarator and name extraction


def _declarator_name(chunk: list[tuple[_Slot, str, PresenceCondition]]) -> int | None:
    """Index of the declared identifier within one comma-separated
    declarator chunk, or None when the chunk declares nothing (prototype,
    bare type, forward declaration)."""
    # cut a top-level initializer
    depth_p = depth_b = 0
    end = len(chunk)
    for k, (_s, tok, _p) in enumerate(chunk):
        if tok == "(":
            depth_p += 1
        elif tok == ")":
            depth_p -= 1
        elif tok == "[":
            depth_b += 1
        elif tok == "]":
            depth_b -= 1
        elif tok == "=" and depth_p == 0 and depth_b == 0:
            end = k
            break
    candidate = None
    fallback = None
    depth_p = depth_b = 0
    for k in range(end):
        tok = chunk[k][1]
        if tok == "(":
            depth_p += 1
            continue
        if tok == ")":
            depth_p -= 1
            continue
        if tok == "[":
            depth_b += 1
            continue
        if tok == "]":
            depth_b -= 1
            continue
        if depth_b or not is_identifier(tok) or tok in KEYWORDS:
            continue
        if k > 0 and chunk[k - 1][1] in _COMPOSITE_KEYWORDS:
            continue  # the tag of `struct foo`, not a declarator
        if depth_p == 0:
            candidate = k
        elif depth_p == 1 and k > 0 and chunk[k - 1][1] == "*" and fallback is None:
            fallback = k  # function-pointer declarator `(*name)`
    chosen = candidate if candidate is not None else fallback
    if chosen is None:
        return None
    if chosen + 1 < end and chunk[chosen + 1][1] == "(" and candidate is not None:
        return None  # function prototype
    return chosen


def _split_chunks(
    toks: list[tuple[_Slot, str, PresenceCondition]]
) -> list[list[tuple[_Slot, str, PresenceCondition]]]:
    chunks: list[list[tuple[_Slot, str, PresenceCondition]]] = [[]]
    depth = 0
    for item in toks:
        tok = item[1]
        if tok in ("(", "[", "{"):
            depth += 1
        elif tok in (")", "]", "}"):
            depth -= 1
        if tok == "," and depth == 0:
            chunks.append([])
        else:
            chunks[-1].append(item)
    return [c for c in chunks if c]


def _function_name_index(cand: _Candidate) -> int | None:
    assert cand.opener is not None
    # the ')' right before the body; find its matching '('
    k = cand.opener - 1
    if k < 0 or cand.tokens[k][1] != ")":
        return None
    depth = 0
    while k >= 0:
        tok = cand.tokens[k][1]
        if tok == ")":
            depth += 1
        elif tok == "(":
            depth -= 1
            if depth == 0:
                break
        k -= 1
    if k <= 0:
        return None
    before = k - 1
    tok = cand.tokens[before][1]
    if is_identifier(tok) and tok not in KEYWORDS:
        return before
    # fall back: last plain identifier before the first '('
    for idx in range(k - 1, -1, -1):
        tok = cand.tokens[idx][1]
        if is_identifier(tok) and tok not in KEYWORDS:
            return idx
    return None


def _parameter_names(cand: _Candidate) -> set[str]:
    if cand.opener is None:
        return set()
    k = cand.opener - 1
    if k < 0 or cand.tokens[k][1] != ")":
        return set()
    depth = 0
    open_idx = None
    while k >= 0:
        tok = cand.tokens[k][1]
        if tok == ")":
            depth += 1
        elif tok == "(":
            depth -= 1
            if depth == 0:
                open_idx = k
                break
        k -= 1
    if open_idx is None:
        return set()
    names: set[str] = set()
    for chunk in _split_chunks(cand.tokens[open_idx + 1 : cand.opener - 1]):
        idents = [t for _s, t, _p in chunk if is_identifier(t) and t not in KEYWORDS]
        if idents:
            names.add(idents[-1])
    return names


def _local_declarations(walks) -> set[str]:
    """Names declared by statements that open with a type keyword."""
    names: set[str] = set()
    for _pc, toks, _site in walks:
        statement: list[tuple[None, str, None]] = []
        at_start = True
        is_decl = False
        for tok in toks:
            if tok in (";", "{", "}"):
                if is_decl and statement:
                    for chunk in _split_chunks(statement):
                        idx = _declarator_name(chunk)
                        if idx is not None:
                            names.add(chunk[idx][1])
                statement = []
                at_start = True
                is_decl = False
                continue
            if at_start:
                is_decl = tok in _TYPE_STARTERS and tok not in ("extern",)
                at_start = False
            statement.append((None, tok, None))
        if is_decl and statement:
            for chunk in _split_chunks(statement):
                idx = _declarator_name(chunk)
                if idx is not None:
                    names.add(chunk[idx][1])
    return names


# --------------------------------------------------------------------------
# candidate classification


def _loc_between(slots: list[_Slot], first: _Slot, last: _Slot) -> int:
    count = 0
    for slot in slots:
        if first.index <= slot.index <= last.index and not slot.blank:
            count += 1
    return count


def _classify(
    cand: _Candidate, slots: list[_Slot], diagnostics: DiagnosticSink | None
) -> list[_RawEntity]:
    toks = cand.tokens
    out: list[_RawEntity] = []
    first_slot = toks[0][0]
    last_slot = toks[-1][0]
    span = (first_slot.span[0], last_slot.span[1])

    if cand.kindhint == "function":
        name_idx = _function_name_index(cand)
        if name_idx is None:
            return []
        slot, name, pc = toks[name_idx]
        loc = _loc_between(slots, toks[cand.opener][0], toks[cand.closer][0])
        raw = _RawEntity(
            "Function", name, pc, slot.file, span, max(loc, 1), None, slot.region,
        )
        raw.body = _collect_body(cand, slots)
        return [raw]

    is_typedef = any(t == "typedef" for _s, t, _p in toks)
    composite_end = None
    # locate a composite body at top level
    depth = 0
    kw_idx = None
    for k, (_s, tok, _p) in enumerate(toks):
        if tok == "{":
            depth += 1
            if depth == 1 and kw_idx is not None:
                # composite body found
                close = _matching_brace(toks, k)
                if close is None:
                    return out
                kw_slot, kw, kw_pc = toks[kw_idx]
                name_idx = kw_idx + 1
                if (
                    name_idx < len(toks)
                    and is_identifier(toks[name_idx][1])
                    and toks[name_idx][1] not in KEYWORDS
                ):
                    name_slot, name, name_pc = toks[name_idx]
                else:
                    stem = "".join(
                        c if c.isalnum() else "_" for c in kw_slot.file.rsplit("/", 1)[-1]
                    )
                    name = f"anon_{kw}_{stem}_{kw_slot.span[0]}"
                    name_slot, name_pc = kw_slot, kw_pc
                loc = _loc_between(slots, toks[k][0], toks[close][0])
                out.append(
                    _RawEntity(
                        _COMPOSITE_KEYWORDS[kw],
                        name,
                        name_pc,
                        name_slot.file,
                        (toks[kw_idx][0].span[0], toks[close][0].span[1]),
                        max(loc, 1),
                        None,
                        name_slot.region,
                    )
                )
                composite_end = close
                break
        elif tok == "}":
            depth -= 1
        elif tok in _COMPOSITE_KEYWORDS and depth == 0 and kw_idx is None:
            kw_idx = k

    if is_typedef:
        return out
    # declarators: everything outside the composite body; initializer
    # token runs are cut per-chunk at the top-level '='
    decl_tokens = (
        toks[composite_end + 1 : cand.terminator]
        if composite_end is not None
        else toks[: cand.terminator]
    )
    for chunk in _split_chunks(decl_tokens):
        idx = _declarator_name(chunk)
        if idx is None:
            continue
        slot, name, pc = chunk[idx]
        out.append(
            _RawEntity(
                "GlobalVariable", name, pc, slot.file,
                (chunk[0][0].span[0], chunk[-1][0].span[1]),
                None, None, slot.region,
            )
        )
    return out


def _matching_brace(toks, open_idx: int) -> int | None:
    depth = 0
    for k in range(open_idx, len(toks)):
        tok = toks[k][1]
        if tok == "{":
            depth += 1
        elif tok == "}":
            depth -= 1
            if depth == 0:
                return k
    return None


def _collect_body(cand: _Candidate, slots: list[_Slot]) -> _Body:
    assert cand.opener is not None and cand.closer is not None
    toks = cand.tokens
    open_slot = toks[cand.opener][0]
    close_slot = toks[cand.closer][0]
    walks: list[tuple[PresenceCondition, tuple[str, ...], tuple[str, int]]] = []

    # the representative walk is the candidate's own token slice, grouped
    # back into per-slot runs so each run carries its line condition
    run: list[str] = []
    run_slot: _Slot | None = None
    run_pc: PresenceCondition | None = None

    def flush():
        nonlocal run, run_slot, run_pc
        if run and run_slot is not None:
            walks.append((run_pc, tuple(run), (run_slot.file, run_slot.span[0])))
        run, run_slot, run_pc = [], None, None

    for slot, tok, pc in toks[cand.opener + 1 : cand.closer]:
        if run_slot is not slot:
            flush()
            run_slot, run_pc = slot, pc
        run.append(tok)
    flush()

    # non-representative alternatives of interior lines
    for slot in slots:
        if not (open_slot.index < slot.index < close_slot.index):
            continue
        if len(slot.alternatives) <= 1 or slot.blank:
            continue
        for k, (apc, atoks) in enumerate(slot.alternatives):
            if k == slot.rep:
                continue
            if atoks:
                walks.append((apc, atoks, (slot.file, slot.span[0])))

    body = _Body(walks=walks, local_names=set())
    body.local_names = _parameter_names(cand) | _local_declarations(
        [(pc, toks_, site) for pc, toks_, site in walks]
    )
    return body


# --------------------------------------------------------------------------
# split handling


def _structural_slots(cand: _Candidate) -> list[_Slot]:
    toks = cand.tokens
    picked: list[_Slot] = []
    if cand.kindhint == "function":
        for slot, _t, _p in toks[: cand.opener + 1]:
            picked.append(slot)
        picked.append(toks[cand.closer][0])
        if cand.terminator is not None:
            picked.append(toks[cand.terminator][0])
    elif cand.kindhint == "composite":
        body_open = next(
            (k for k, (_s, t, _p) in enumerate(toks) if t == "{"), None
        )
        body_close = _matching_brace(toks, body_open) if body_open is not None else None
        for k, (slot, _t, _p) in enumerate(toks):
            if body_open is not None and body_close is not None and body_open < k < body_close:
                continue
            picked.append(slot)
    else:
        picked = [slot for slot, _t, _p in toks]
    seen: set[int] = set()
    unique: list[_Slot] = []
    for slot in picked:
        if slot.index not in seen:
            seen.add(slot.index)
            unique.append(slot)
    return unique


def _on_one_path(regions: list[Region]) -> bool:
    unique: list[Region] = []
    for region in regions:
        if region not in unique:
            unique.append(region)
    for a in unique:
        for b in unique:
            if a is b:
                continue
            if not (a.is_ancestor_of(b) or b.is_ancestor_of(a)):
                return False
    return True


def _offending_group(regions: list[Region]) -> list[Region] | None:
    """The branch regions of the topmost group where the paths diverge."""
    paths = []
    for region in regions:
        path = region.path()
        if path not in paths:
            paths.append(path)
    deepest = max(len(p) for p in paths)
    for depth in range(deepest):
        level = []
        for path in paths:
            if len(path) > depth and path[depth] not in level:
                level.append(path[depth])
        if len(level) > 1:
            anchor = min(level, key=lambda r: (r.group_id or "", r.branch_index))
            parent = anchor.parent
            if parent is None:
                return None
            return [c for c in parent.children if c.group_id == anchor.group_id]
    return None


# --------------------------------------------------------------------------
# the extraction driver


def _extract_raw(
    slots: list[_Slot],
    all_slots: list[_Slot],
    pinned: dict[int, int],
    excluded: frozenset,
    diagnostics: DiagnosticSink | None,
    depth: int,
) -> list[_RawEntity]:
    def choose(slot: _Slot):
        for region in slot.region.path():
            if region in excluded:
                return None
        if slot.index in pinned:
            return slot.alternatives[pinned[slot.index]]
        return slot.alternatives[slot.rep]

    out: list[_RawEntity] = []
    for cand in _parse_candidates(slots, choose, diagnostics):
        structural = _structural_slots(cand)
        multi = [
            s for s in structural if len(s.alternatives) > 1 and s.index not in pinned
        ]
        regions = [s.region for s in structural]
        if depth < _SPLIT_DEPTH_LIMIT and multi:
            axis = multi[0]
            sub_slots = _candidate_slot_range(cand, all_slots)
            for k, (apc, _toks) in enumerate(axis.alternatives):
                if not possibly_satisfiable(apc):
                    continue
                for raw in _extract_raw(
                    sub_slots, all_slots, {**pinned, axis.index: k}, excluded,
                    None, depth + 1,
                ):
                    raw.pc = p_and(raw.pc, apc)
                    raw.branch_tag = k if raw.branch_tag is None else raw.branch_tag
                    if possibly_satisfiable(raw.pc):
                        out.append(raw)
            continue
        if depth < _SPLIT_DEPTH_LIMIT and not _on_one_path(regions):
            branches = _offending_group(regions)
            if branches:
                sub_slots = _candidate_slot_range(cand, all_slots)
                parent = branches[0].parent
                for branch in branches:
                    siblings = frozenset(b for b in branches if b is not branch)
                    for raw in _extract_raw(
                        sub_slots, all_slots, pinned, excluded | siblings,
                        None, depth + 1,
                    ):
                        raw.pc = p_and(raw.pc, branch.effective_pc)
                        raw.branch_tag = (
                            branch.branch_index if raw.branch_tag is None else raw.branch_tag
                        )
                        if possibly_satisfiable(raw.pc):
                            out.append(raw)
                has_else = any(b.own_condition is None and not b.discarded for b in branches)
                if not has_else and parent is not None:
                    residual = parent.effective_pc
                    for branch in branches:
                        if branch.own_condition is not None:
                            residual = p_and(residual, p_not(to_presence(branch.own_condition)))
                    if possibly_satisfiable(residual):
                        for raw in _extract_raw(
                            sub_slots, all_slots, pinned,
                            excluded | frozenset(branches), None, depth + 1,
                        ):
                            raw.pc = p_and(raw.pc, residual)
                            raw.branch_tag = (
                                len(branches) if raw.branch_tag is None else raw.branch_tag
                            )
                            if possibly_satisfiable(raw.pc):
                                out.append(raw)
                continue
        out.extend(_classify(cand, slots, diagnostics))
    return out


def _candidate_slot_range(cand: _Candidate, all_slots: list[_Slot]) -> list[_Slot]:
    first = cand.tokens[0][0].index
    last = cand.tokens[-1][0].index
    return [s for s in all_slots if first <= s.index <= last]


# --------------------------------------------------------------------------
# public API


def extract_entities(scan: UnitScan, diagnostics: DiagnosticSink | None = None) -> UnitExtraction:
    """Entities of one translation unit, with per-branch splitting applied
    and stable ids allocated in file order."""
    sink = diagnostics if diagnostics is not None else scan.diagnostics
    slots = _make_slots(scan)
    raws = _extract_raw(slots, slots, {}, frozenset(), sink, 0)

    unit_file = scan.unit_path
    own_spans = [s.span[1] for s in slots if s.file == unit_file]
    tu = Entity(
        id=f"{unit_file}!unit!{unit_file.rsplit('/', 1)[-1]}",
        kind="TranslationUnit",
        name=unit_file.rsplit("/", 1)[-1],
        pc=TRUE,
        span=(unit_file, 1, max(own_spans) if own_spans else 1),
        loc=None,
        parent=None,
    )

    entities: list[Entity] = [tu]
    bodies: dict[str, _Body] = {}
    used_ids = {tu.id}
    # redeclarations of one variable along a single region path collapse
    # into one entity whose condition is the disjunction
    merge_targets: dict[tuple[str, str], tuple[Entity, Region]] = {}

    for raw in raws:
        key = (raw.kind, raw.name)
        if raw.kind == "GlobalVariable" and key in merge_targets:
            existing, region = merge_targets[key]
            if (
                region is raw.region
                or region.is_ancestor_of(raw.region)
                or raw.region.is_ancestor_of(region)
            ):
                existing.pc = p_or(existing.pc, raw.pc)
                continue
        base = f"{unit_file}!{_KIND_CODES[raw.kind]}!{raw.name}"
        entity_id = _allocate_id(base, raw.branch_tag, used_ids)
        entity = Entity(
            id=entity_id,
            kind=raw.kind,
            name=raw.name,
            pc=raw.pc,
            span=(raw.file, raw.span[0], raw.span[1]),
            loc=raw.loc,
            parent=tu.id,
        )
        entities.append(entity)
        if raw.kind == "GlobalVariable":
            merge_targets.setdefault(key, (entity, raw.region))
        if raw.body is not None:
            bodies[entity_id] = raw.body
    return UnitExtraction(scan=scan, tu=tu, entities=entities, bodies=bodies)


def _allocate_id(base: str, branch_tag: int | None, used: set[str]) -> str:
    if branch_tag is None:
        candidate = base
        n = 0
    else:
        candidate = f"{base}@branch{branch_tag}"
        n = branch_tag + 1
    while candidate in used:
        candidate = f"{base}@branch{n}"
        n += 1
    used.add(candidate)
    return candidate


def detect_calls(
    extractions: list[UnitExtraction], diagnostics: DiagnosticSink
) -> list[Relation]:
    """Calls relations: identifier immediately followed by '(' matching a
    known function name; keywords are excluded."""
    table: dict[str, list[Entity]] = {}
    for extraction in extractions:
        for entity in extraction.entities:
            if entity.kind == "Function":
                table.setdefault(entity.name, []).append(entity)
    relations: dict[tuple[str, str, str], dict] = {}
    for extraction in extractions:
        by_id = {e.id: e for e in extraction.entities}
        for caller_id, body in extraction.bodies.items():
            caller = by_id[caller_id]
            for walk_pc, toks, site in body.walks:
                for k, tok in enumerate(toks):
                    if (
                        k + 1 < len(toks)
                        and toks[k + 1] == "("
                        and is_identifier(tok)
                        and tok not in KEYWORDS
                        and tok in table
                    ):
                        for callee in table[tok]:
                            pc = p_and(p_and(caller.pc, walk_pc), callee.pc)
                            _note_relation(
                                relations, "Calls", caller.id, callee.id, pc, site
                            )
    return _finish_relations(relations, diagnostics)


def detect_accesses(
    extractions: list[UnitExtraction], diagnostics: DiagnosticSink
) -> list[Relation]:
    """Reads/Writes of global variables from function bodies, with
    local/parameter shadowing honored by name."""
    table: dict[str, list[Entity]] = {}
    for extraction in extractions:
        for entity in extraction.entities:
            if entity.kind == "GlobalVariable":
                table.setdefault(entity.name, []).append(entity)
    relations: dict[tuple[str, str, str], dict] = {}
    for extraction in extractions:
        by_id = {e.id: e for e in extraction.entities}
        for caller_id, body in extraction.bodies.items():
            caller = by_id[caller_id]
            for walk_pc, toks, site in body.walks:
                for k, tok in enumerate(toks):
                    if (
                        not is_identifier(tok)
                        or tok in KEYWORDS
                        or tok not in table
                        or tok in body.local_names
                    ):
                        continue
                    kinds = _access_kinds(toks, k)
                    for access_kind in kinds:
                        for target in table[tok]:
                            pc = p_and(p_and(caller.pc, walk_pc), target.pc)
                            _note_relation(
                                relations, access_kind, caller.id, target.id, pc, site
                            )
    return _finish_relations(relations, diagnostics)


def _access_kinds(toks: tuple[str, ...], k: int) -> list[str]:
    j = k + 1
    while j < len(toks) and toks[j] == "[":
        depth = 0
        while j < len(toks):
            if toks[j] == "[":
                depth += 1
            elif toks[j] == "]":
                depth -= 1
                if depth == 0:
                    j += 1
                    break
            j += 1
    follower = toks[j] if j < len(toks) else None
    prev = toks[k - 1] if k > 0 else None
    if follower == "=":
        return ["Writes"]
    if follower in _WRITE_FOLLOWERS:
        return ["Reads", "Writes"]
    if follower in ("++", "--") or prev in ("++", "--"):
        return ["Writes"]
    return ["Reads"]


def _note_relation(relations, kind, source, target, pc, site) -> None:
    entry = relations.setdefault(
        (kind, source, target), {"pcs": [], "sites": []}
    )
    if pc not in entry["pcs"]:
        entry["pcs"].append(pc)
    if site not in entry["sites"]:
        entry["sites"].append(site)


def _finish_relations(relations, diagnostics: DiagnosticSink) -> list[Relation]:
    out: list[Relation] = []
    for (kind, source, target), entry in relations.items():
        pc = entry["pcs"][0]
        for extra in entry["pcs"][1:]:
            pc = p_or(pc, extra)
        if not possibly_satisfiable(pc):
            diagnostics.warn(
                "unsatisfiable-relation",
                f"{kind} {source} -> {target} can never hold; dropped",
            )
            continue
        out.append(Relation(kind, source, target, pc, tuple(entry["sites"])))
    return out
