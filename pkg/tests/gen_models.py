"""Random VariabilityModel builder for round-trip and layout tests."""

from __future__ import annotations

import random

from varscope.conditions import (
    TRUE,
    Atom,
    Binary,
    IdentAtom,
    IntLit,
    atoms,
    p_and,
    p_not,
    p_or,
    to_presence,
)
from varscope.diagnostics import Diagnostic
from varscope.extractor import Entity, Relation
from varscope.model import VariabilityModel

_ATOMS = [f"F{k}" for k in range(6)]


def random_pc(rng: random.Random, depth: int = 0):
    roll = rng.random()
    if depth >= 3 or roll < 0.35:
        choice = rng.random()
        if choice < 0.55:
            return Atom(rng.choice(_ATOMS))
        if choice < 0.7:
            return TRUE
        if choice < 0.85:
            return to_presence(
                Binary(">=", IdentAtom(rng.choice(_ATOMS)), IntLit(rng.randint(0, 2)))
            )
        return p_not(Atom(rng.choice(_ATOMS)))
    left = random_pc(rng, depth + 1)
    right = random_pc(rng, depth + 1)
    if roll < 0.6:
        return p_and(left, right)
    if roll < 0.85:
        return p_or(left, right)
    return p_not(left)


def random_model(seed: int, max_entities: int = 300) -> VariabilityModel:
    rng = random.Random(seed)
    entities: dict[str, Entity] = {}
    relations: list[Relation] = []
    functions: list[Entity] = []
    variables: list[Entity] = []

    unit_count = rng.randint(1, 7)
    for u in range(unit_count):
        unit_file = f"src/unit{u}.c"
        tu = Entity(
            id=f"{unit_file}!unit!unit{u}.c",
            kind="TranslationUnit",
            name=f"unit{u}.c",
            pc=TRUE,
            span=(unit_file, 1, 400),
            loc=None,
            parent=None,
        )
        entities[tu.id] = tu
        line = 1
        for k in range(rng.randint(0, 4)):
            if len(entities) >= max_entities:
                break
            kind = rng.choice(["Struct", "Union", "Enum"])
            name = f"{kind.lower()}_{u}_{k}"
            entity = Entity(
                id=f"{unit_file}!{kind.lower()}!{name}",
                kind=kind,
                name=name,
                pc=random_pc(rng),
                span=(unit_file, line, line + 3),
                loc=rng.randint(1, 30),
                parent=tu.id,
            )
            entities[entity.id] = entity
            line += 5
        for k in range(rng.randint(1, 12)):
            if len(entities) >= max_entities:
                break
            name = f"fn_{u}_{k}"
            entity = Entity(
                id=f"{unit_file}!fn!{name}",
                kind="Function",
                name=name,
                pc=random_pc(rng),
                span=(unit_file, line, line + 9),
                loc=rng.randint(1, 180),
                parent=tu.id,
            )
            entities[entity.id] = entity
            functions.append(entity)
            line += 11
        for k in range(rng.randint(0, 8)):
            if len(entities) >= max_entities:
                break
            name = f"g_{u}_{k}"
            entity = Entity(
                id=f"{unit_file}!var!{name}",
                kind="GlobalVariable",
                name=name,
                pc=random_pc(rng),
                span=(unit_file, line, line),
                loc=None,
                parent=tu.id,
            )
            entities[entity.id] = entity
            variables.append(entity)
            line += 1

    for entity in entities.values():
        if entity.parent is not None:
            relations.append(Relation("Contains", entity.parent, entity.id, entity.pc, ()))
    seen: set[tuple[str, str, str]] = set()
    for _ in range(rng.randint(0, 3 * len(functions))):
        if not functions:
            break
        source = rng.choice(functions)
        if rng.random() < 0.6 or not variables:
            target = rng.choice(functions)
            kind = "Calls"
        else:
            target = rng.choice(variables)
            kind = rng.choice(["Reads", "Writes"])
        key = (kind, source.id, target.id)
        if key in seen:
            continue
        seen.add(key)
        pc = p_and(source.pc, target.pc)
        from varscope.conditions import possibly_satisfiable

        if not possibly_satisfiable(pc):
            continue
        site = (source.span[0], rng.randint(source.span[1], source.span[2]))
        relations.append(Relation(kind, source.id, target.id, pc, (site,)))
    relations.sort(key=lambda r: (r.kind, r.source, r.target))

    mentioned: set[str] = set()
    for entity in entities.values():
        mentioned |= atoms(entity.pc)
    for relation in relations:
        mentioned |= atoms(relation.pc)

    diagnostics = [
        Diagnostic("warning", "missing-endif", f"synthetic diagnostic {k}", "src/unit0.c", k + 1)
        for k in range(rng.randint(0, 3))
    ]
    model = VariabilityModel(
        entities=entities,
        relations=relations,
        features=sorted(mentioned),
        diagnostics=diagnostics,
        meta={"tool": "varscope", "input_root": "synthetic", "timestamp": "1970-01-01T00:00:00Z",
              "include_edges": []},
    )
    model.reindex()
    return model
