"""The variability model: entities, relations, features, and queries.

The model is a flat, serializable document.  Cross-unit calls are resolved
by name table only; duplicate names in different units stay distinct
entities.  Every query is read-only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .conditions import (
    Configuration,
    ParseError,
    atoms,
    evaluate,
    parse_pc_text,
    pc_to_text,
)
from .diagnostics import Diagnostic, DiagnosticSink
from .extractor import Entity, Relation, UnitExtraction, detect_accesses, detect_calls

SCHEMA_VERSION = 1


class DuplicateEntityId(Exception):
    """Internal invariant violation: two entities share an id."""


class SchemaVersionMismatch(Exception):
    pass


class MalformedModelFile(Exception):
    pass


class UnknownFeature(Exception):
    pass


@dataclass
class VariabilityModel:
    entities: dict[str, Entity]
    relations: list[Relation]
    features: list[str]  # sorted
    diagnostics: list[Diagnostic]
    meta: dict
    feature_entities: dict[str, set[str]] = field(default_factory=dict, repr=False, compare=False)
    feature_relations: dict[str, set[int]] = field(default_factory=dict, repr=False, compare=False)

    def reindex(self) -> None:
        self.feature_entities = {f: set() for f in self.features}
        self.feature_relations = {f: set() for f in self.features}
        for entity in self.entities.values():
            for name in atoms(entity.pc):
                if name in self.feature_entities:
                    self.feature_entities[name].add(entity.id)
        for k, relation in enumerate(self.relations):
            for name in atoms(relation.pc):
                if name in self.feature_relations:
                    self.feature_relations[name].add(k)

    def unit_of(self, entity_id: str) -> str:
        entity = self.entities[entity_id]
        while entity.parent is not None:
            entity = self.entities[entity.parent]
        return entity.id


@dataclass
class InclusionMap:
    configuration: Configuration
    status: dict[str, bool]  # entity id -> included
    relation_status: list[bool]  # parallel to model.relations


@dataclass
class ImpactResult:
    feature: str
    entities: set[str]
    translation_units: set[str]


@dataclass
class DiffResult:
    only_in_a: set[str]
    only_in_b: set[str]
    in_both: set[str]


# --------------------------------------------------------------------------
# construction


def build_model(
    extractions: list[UnitExtraction],
    meta: dict | None = None,
    diagnostics: DiagnosticSink | None = None,
) -> VariabilityModel:
    sink = diagnostics if diagnostics is not None else DiagnosticSink()
    entities: dict[str, Entity] = {}
    for extraction in extractions:
        sink.extend(extraction.scan.diagnostics)
        for entity in extraction.entities:
            if entity.id in entities:
                raise DuplicateEntityId(
                    f"entity id {entity.id!r} produced twice; units:"
                    f" {entities[entity.id].span[0]} and {entity.span[0]}"
                )
            entities[entity.id] = entity

    relations: list[Relation] = []
    for extraction in extractions:
        for entity in extraction.entities:
            if entity.parent is not None:
                relations.append(
                    Relation("Contains", entity.parent, entity.id, entity.pc, ())
                )
    relations.extend(detect_calls(extractions, sink))
    relations.extend(detect_accesses(extractions, sink))
    relations.sort(key=lambda r: (r.kind, r.source, r.target))

    concrete: set[str] = set()
    for extraction in extractions:
        concrete |= extraction.scan.table.concrete_names()
    mentioned: set[str] = set()
    for entity in entities.values():
        mentioned |= atoms(entity.pc)
    for relation in relations:
        mentioned |= atoms(relation.pc)
    features = sorted(mentioned - concrete)

    include_edges = sorted(
        {
            (edge.source_file, edge.target, edge.resolved, edge.line)
            for extraction in extractions
            for edge in extraction.scan.include_edges
        }
    )
    full_meta = dict(meta or {})
    full_meta.setdefault("tool", "varscope")
    full_meta["include_edges"] = [
        {"from": src, "target": tgt, "resolved": res, "line": line}
        for src, tgt, res, line in include_edges
    ]

    model = VariabilityModel(
        entities=entities,
        relations=relations,
        features=features,
        diagnostics=list(sink.items),
        meta=full_meta,
    )
    model.reindex()
    return model


# --------------------------------------------------------------------------
# queries


def evaluate_configuration(
    model: VariabilityModel,
    config: Configuration,
    diagnostics: DiagnosticSink | None = None,
) -> InclusionMap:
    """Q2: which entities survive under this configuration."""
    if diagnostics is not None:
        for name in config.assignment:
            if name not in model.features:
                diagnostics.warn(
                    "unknown-feature", f"{name!r} is not a feature of this model; ignored"
                )
    status = {
        entity_id: evaluate(entity.pc, config, diagnostics)
        for entity_id, entity in model.entities.items()
    }
    relation_status = [evaluate(r.pc, config, diagnostics) for r in model.relations]
    return InclusionMap(config, status, relation_status)


def feature_impact(model: VariabilityModel, feature: str) -> ImpactResult:
    """Q1: everything whose presence condition mentions the feature, plus
    the translation units it reaches into (via entities or relation
    sites)."""
    if feature not in model.features:
        raise UnknownFeature(feature)
    entity_ids = set(model.feature_entities.get(feature, ()))
    units = {model.unit_of(entity_id) for entity_id in entity_ids}
    for index in model.feature_relations.get(feature, ()):
        units.add(model.unit_of(model.relations[index].source))
    return ImpactResult(feature, entity_ids, units)


def diff_configurations(
    model: VariabilityModel, config_a: Configuration, config_b: Configuration
) -> DiffResult:
    status_a = evaluate_configuration(model, config_a).status
    status_b = evaluate_configuration(model, config_b).status
    only_a = {k for k, inc in status_a.items() if inc and not status_b[k]}
    only_b = {k for k, inc in status_b.items() if inc and not status_a[k]}
    both = {k for k, inc in status_a.items() if inc and status_b[k]}
    return DiffResult(only_a, only_b, both)


def search(model: VariabilityModel, query: str) -> list[str]:
    """Case-insensitive name search: exact, then prefix, then infix;
    an empty query matches nothing."""
    if not query:
        return []
    needle = query.lower()
    exact: list[str] = []
    prefix: list[str] = []
    infix: list[str] = []
    for entity_id in sorted(model.entities):
        name = model.entities[entity_id].name.lower()
        if name == needle:
            exact.append(entity_id)
        elif name.startswith(needle):
            prefix.append(entity_id)
        elif needle in name:
            infix.append(entity_id)
    return exact + prefix + infix


# --------------------------------------------------------------------------
# persistence


def model_to_document(model: VariabilityModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "meta": model.meta,
        "features": list(model.features),
        "entities": [
            {
                "id": e.id,
                "kind": e.kind,
                "name": e.name,
                "pc": pc_to_text(e.pc),
                "span": {"file": e.span[0], "start": e.span[1], "end": e.span[2]},
                "loc": e.loc,
                "parent": e.parent,
            }
            for e in sorted(model.entities.values(), key=lambda e: e.id)
        ],
        "relations": [
            {
                "kind": r.kind,
                "source": r.source,
                "target": r.target,
                "pc": pc_to_text(r.pc),
                "sites": [[file, line] for file, line in r.sites],
            }
            for r in model.relations
        ],
        "diagnostics": [
            {
                "severity": d.severity,
                "code": d.code,
                "message": d.message,
                "file": d.file,
                "line": d.line,
            }
            for d in model.diagnostics
        ],
    }


def save_model(model: VariabilityModel, path: Path | str) -> None:
    document = model_to_document(model)
    Path(path).write_text(
        json.dumps(document, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_model(path: Path | str) -> VariabilityModel:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedModelFile(str(exc)) from exc
    return model_from_document(document)


def model_from_document(document: dict) -> VariabilityModel:
    if not isinstance(document, dict):
        raise MalformedModelFile("model document is not an object")
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"expected schema 1, found {version!r}")
    try:
        entities: dict[str, Entity] = {}
        for raw in document["entities"]:
            entity = Entity(
                id=raw["id"],
                kind=raw["kind"],
                name=raw["name"],
                pc=parse_pc_text(raw["pc"]),
                span=(raw["span"]["file"], raw["span"]["start"], raw["span"]["end"]),
                loc=raw["loc"],
                parent=raw["parent"],
            )
            if entity.id in entities:
                raise MalformedModelFile(f"duplicate entity id {entity.id!r}")
            entities[entity.id] = entity
        relations = [
            Relation(
                kind=raw["kind"],
                source=raw["source"],
                target=raw["target"],
                pc=parse_pc_text(raw["pc"]),
                sites=tuple((file, line) for file, line in raw["sites"]),
            )
            for raw in document["relations"]
        ]
        diagnostics = [
            Diagnostic(
                severity=raw["severity"],
                code=raw["code"],
                message=raw["message"],
                file=raw["file"],
                line=raw["line"],
            )
            for raw in document["diagnostics"]
        ]
        features = list(document["features"])
        meta = dict(document["meta"])
    except MalformedModelFile:
        raise
    except (KeyError, TypeError, ValueError, ParseError) as exc:
        raise MalformedModelFile(f"bad model document: {exc!r}") from exc
    model = VariabilityModel(
        entities=entities,
        relations=relations,
        features=features,
        diagnostics=diagnostics,
        meta=meta,
    )
    model.reindex()
    return model
