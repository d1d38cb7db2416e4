"""
Analyzing a small product line
==============================

Walk the whole pipeline on the bundled find-like fixture: scan the
sources, build the variability model, then answer the two questions the
tool exists for -- what does a flag touch, and what survives a
configuration.
"""

from pathlib import Path

from varscope.cli import analyze_directory
from varscope.conditions import Configuration, pc_to_text
from varscope.model import diff_configurations, evaluate_configuration, feature_impact, search

root = Path(__file__).resolve().parent.parent / "fixtures" / "mini_spl"
model = analyze_directory(root)

# Every feature flag the scanner discovered, straight from the presence
# conditions (concretely #defined names are filtered out automatically).
print("features:", ", ".join(model.features))

# Each entity carries the condition under which it is compiled.
print("\nentities:")
for entity in sorted(model.entities.values(), key=lambda e: e.id):
    print(f"  {entity.id:40s} pc = {pc_to_text(entity.pc)}")

# Q1: what does enabling FEATURE_FIND_XDEV affect?
impact = feature_impact(model, "FEATURE_FIND_XDEV")
print("\nFEATURE_FIND_XDEV reaches", len(impact.translation_units), "of",
      sum(1 for e in model.entities.values() if e.kind == "TranslationUnit"),
      "translation units:")
for entity_id in sorted(impact.entities):
    print("  ", entity_id)

# Q2: which entities exist when only the depth feature is on?
config = Configuration.enabling(["FEATURE_FIND_DEPTH"])
inclusion = evaluate_configuration(model, config)
included = sorted(k for k, ok in inclusion.status.items() if ok)
print(f"\nwith only FEATURE_FIND_DEPTH: {len(included)} entities included")

# Comparing two complete configurations shows exactly what flips.
diff = diff_configurations(
    model,
    Configuration.enabling(["FEATURE_FIND_EXEC"]),
    Configuration.enabling(["FEATURE_FIND_XDEV"]),
)
print("only with EXEC:", sorted(diff.only_in_a))
print("only with XDEV:", sorted(diff.only_in_b))

# And plain name search, exact matches first.
print("\nsearch 'find':", search(model, "find"))
