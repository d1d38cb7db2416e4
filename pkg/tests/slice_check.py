"""Shared harness: entity-set equivalence against the elimination oracle.

For one generated file and one total configuration, the oracle deletes
excluded lines; extracting entities from that single-variant text must
give the same (kind, name) multiset as filtering the variational model's
entities by their presence conditions.
"""

from __future__ import annotations

import itertools

from oracle import eliminate

from varscope.conditions import Configuration, evaluate
from varscope.extractor import UnitExtraction, extract_entities
from varscope.scanner import scan_source


def entity_multiset(entities) -> list[tuple[str, str]]:
    return sorted((e.kind, e.name) for e in entities if e.kind != "TranslationUnit")


def variational_slice(extraction: UnitExtraction, config: Configuration) -> list:
    return sorted(
        (e.kind, e.name)
        for e in extraction.entities
        if e.kind != "TranslationUnit" and evaluate(e.pc, config)
    )


def oracle_slice(text: str, enabled: list[str], cache: dict | None = None) -> list:
    sliced = eliminate(text, {name: "1" for name in enabled})
    if cache is not None and sliced in cache:
        return cache[sliced]
    extraction = extract_entities(scan_source(sliced))
    result = entity_multiset(extraction.entities)
    if cache is not None:
        cache[sliced] = result
    return result


def check_slice_equivalence(text: str, flags: list[str], extraction=None) -> int:
    """Assert equality under every total configuration over `flags`;
    returns the number of configurations checked.

    Configurations differing only in flags that do not occur in the file
    produce byte-identical oracle slices and identical presence-condition
    values, so enumerating the file's own flag alphabet covers the full
    2^8 space.
    """
    if extraction is None:
        extraction = extract_entities(scan_source(text))
    cache: dict = {}
    checked = 0
    for bits in itertools.product((False, True), repeat=len(flags)):
        enabled = [f for f, on in zip(flags, bits) if on]
        config = Configuration.enabling(enabled)
        expected = oracle_slice(text, enabled, cache)
        got = variational_slice(extraction, config)
        assert got == expected, (
            f"slice mismatch under {enabled}:\n expected {expected}\n got {got}"
        )
        checked += 1
    return checked
