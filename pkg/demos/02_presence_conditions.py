"""
Presence-condition algebra
==========================

The formula layer on its own: parse conditional-directive expressions,
derive per-branch conditions, evaluate under configurations, and test
satisfiability -- no source files involved.
"""

from varscope.conditions import (
    Configuration,
    atoms,
    derive_branch_condition,
    evaluate,
    evaluate_partial,
    p_and,
    parse_condition,
    pc_to_text,
    satisfiable,
    to_presence,
)

# A directive argument parses under full C precedence; the boolean
# reading keeps &&/||/!/defined as formula connectives and wraps
# arithmetic comparisons as opaque leaves.
expr = parse_condition("defined(NET) && (VERSION >= 2 || defined(LEGACY))")
pc = to_presence(expr)
print("condition:", pc_to_text(pc))
print("atoms:", sorted(atoms(pc)))

# Evaluation: an enabled feature behaves like a macro defined to 1, so
# VERSION >= 2 is false whether or not VERSION is "enabled".
print("NET only:", evaluate(pc, Configuration.enabling(["NET"])))
print("NET+LEGACY:", evaluate(pc, Configuration.enabling(["NET", "LEGACY"])))

# Three-valued evaluation for partial assignments.
print("NET unknown, LEGACY on:", evaluate_partial(pc, {"LEGACY": True}))
print("NET off:", evaluate_partial(pc, {"NET": False}))

# An #if/#elif/#else group: branch k holds when its own condition does
# and every earlier one fails. The three conditions partition the space.
group = [parse_condition("defined(A)"), parse_condition("defined(B)"), None]
branches = [derive_branch_condition(group, k) for k in range(3)]
for k, branch in enumerate(branches):
    print(f"branch {k}: {pc_to_text(branch)}")
for i in range(3):
    for j in range(i + 1, 3):
        overlap = satisfiable(p_and(branches[i], branches[j]))
        print(f"branches {i} and {j} can coexist: {overlap}")
