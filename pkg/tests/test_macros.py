from __future__ import annotations

import sys
from pathlib import Path

from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))
from oracle import _Expander as OracleExpander  # noqa: E402

from varscope.conditions import (  # noqa: E402
    TRUE,
    Atom,
    Configuration,
    atoms,
    evaluate,
    p_not,
    parse_condition,
    to_presence,
)
from varscope.diagnostics import DiagnosticSink  # noqa: E402
from varscope.macros import MacroTable, Tok, VarTok, flatten_alternatives  # noqa: E402
from varscope.tokens import tokenize  # noqa: E402

CD = Atom("CONFIG_DESKTOP")
ORIGIN = ("test.c", 1)


def table_with_desktop_variants() -> MacroTable:
    table = MacroTable()
    table.define("ENABLE_DESKTOP 1", CD, ORIGIN)
    table.define("ENABLE_DESKTOP 0", p_not(CD), ORIGIN)
    table.define("IF_DESKTOP(...) __VA_ARGS__", CD, ORIGIN)
    table.define("IF_DESKTOP(...)", p_not(CD), ORIGIN)
    return table


def texts(seq) -> list[str]:
    return [t.text for t in seq]


# --------------------------------------------------------------------------
# definitions


def test_object_define_at_root():
    table = MacroTable()
    table.define("MAX 10", TRUE, ORIGIN)
    (entry,) = table.entries["MAX"]
    assert entry.kind == "object"
    assert entry.body == ("10",)
    assert entry.pc == TRUE


def test_space_before_paren_is_object():
    table = MacroTable()
    table.define("F (x)", TRUE, ORIGIN)
    (entry,) = table.entries["F"]
    assert entry.kind == "object"
    assert entry.body == ("(", "x", ")")


def test_desktop_variants_have_complementary_pcs():
    table = table_with_desktop_variants()
    first, second = table.entries["IF_DESKTOP"]
    assert first.pc == CD
    assert second.pc == p_not(CD)
    assert first.kind == "function" and first.variadic


def test_malformed_define_dropped_with_diagnostic():
    table = MacroTable()
    sink = DiagnosticSink()
    table.define("1BAD x", TRUE, ORIGIN, sink)
    table.define("F(a, 2) x", TRUE, ORIGIN, sink)
    assert "1BAD" not in table.entries and "F" not in table.entries
    assert [d.code for d in sink.items] == ["malformed-define", "malformed-define"]


# --------------------------------------------------------------------------
# expansion


def test_object_expansion():
    table = MacroTable()
    table.define("MAX 10", TRUE, ORIGIN)
    out = table.expand(tokenize("MAX + 1"), TRUE)
    assert texts(out) == ["10", "+", "1"]


def test_paste_operator():
    table = MacroTable()
    table.define("F(x, y) x##y", TRUE, ORIGIN)
    out = table.expand(tokenize("F(a, b)"), TRUE)
    assert texts(out) == ["ab"]


def test_stringize():
    table = MacroTable()
    table.define("S(x) #x", TRUE, ORIGIN)
    out = table.expand(tokenize("S(a + b)"), TRUE)
    assert texts(out) == ['"a + b"']


def test_nested_expansion():
    table = MacroTable()
    table.define("A B", TRUE, ORIGIN)
    table.define("B 42", TRUE, ORIGIN)
    assert texts(table.expand(tokenize("A"), TRUE)) == ["42"]


def test_self_reference_terminates():
    table = MacroTable()
    table.define("X X + 1", TRUE, ORIGIN)
    out = table.expand(tokenize("X"), TRUE)
    assert texts(out) == ["X", "+", "1"]


def test_function_macro_without_invocation_stays():
    table = MacroTable()
    table.define("F(x) x", TRUE, ORIGIN)
    assert texts(table.expand(tokenize("F + 1"), TRUE)) == ["F", "+", "1"]


def test_argument_count_mismatch_left_unexpanded():
    table = MacroTable()
    table.define("F(x, y) x y", TRUE, ORIGIN)
    sink = DiagnosticSink()
    out = table.expand(tokenize("F(a)"), TRUE, sink)
    assert texts(out) == ["F", "(", "a", ")"]
    assert any(d.code == "argument-count" for d in sink.items)


def test_deferred_variational_expansion():
    # the statement wrapped by IF_DESKTOP carries the desktop condition
    table = table_with_desktop_variants()
    out = table.expand(tokenize("IF_DESKTOP(runtime_check();)"), TRUE)
    assert len(out) == 1 and isinstance(out[0], VarTok)
    alternatives = {pc: [t.text for t in toks] for pc, toks in out[0].alternatives}
    assert alternatives[CD] == ["runtime_check", "(", ")", ";"]
    assert alternatives[p_not(CD)] == []


def test_variational_condition_reduces_to_flag():
    # ENABLE_DESKTOP is 1 exactly when CONFIG_DESKTOP is enabled
    table = table_with_desktop_variants()
    expr = parse_condition("ENABLE_DESKTOP", table, TRUE)
    pc = to_presence(expr)
    assert atoms(pc) == {"CONFIG_DESKTOP"}
    assert evaluate(pc, Configuration.enabling(["CONFIG_DESKTOP"])) is True
    assert evaluate(pc, Configuration()) is False


def test_active_definition_selects_by_configuration():
    table = table_with_desktop_variants()
    table.define("MAX 10", TRUE, ORIGIN)
    assert table.active_definition("MAX", Configuration()).body == ("10",)
    enabled = table.active_definition("IF_DESKTOP", Configuration.enabling(["CONFIG_DESKTOP"]))
    assert enabled.body == ("__VA_ARGS__",)
    disabled = table.active_definition("IF_DESKTOP", Configuration())
    assert disabled.body == ()
    assert table.active_definition("NEVER_DEFINED", Configuration()) is None


def test_undef_erases_earlier_definitions():
    table = MacroTable()
    table.define("GONE 1", TRUE, ORIGIN)
    table.undef("GONE", TRUE, ORIGIN)
    assert table.active_definition("GONE", Configuration()) is None
    assert texts(table.expand(tokenize("GONE"), TRUE)) == ["GONE"]


def test_defined_pc_for_managed_and_free_names():
    table = table_with_desktop_variants()
    assert table.defined_pc("ENABLE_DESKTOP", TRUE) == TRUE  # defined either way
    assert table.defined_pc("CONFIG_DESKTOP", TRUE) is None  # free feature test
    table2 = MacroTable()
    table2.define("ONLY_A 1", Atom("A"), ORIGIN)
    assert table2.defined_pc("ONLY_A", TRUE) == Atom("A")


def test_concrete_names():
    table = table_with_desktop_variants()
    table.define("LIMIT 3", TRUE, ORIGIN)
    table.predefine("FROM_CLI=2")
    assert table.concrete_names() == {"LIMIT", "FROM_CLI"}


# --------------------------------------------------------------------------
# config-slice correctness against the oracle expander


def _oracle_defines(table: MacroTable, config: Configuration) -> dict:
    out = {}
    for name in table.entries:
        definition = table.active_definition(name, config)
        if definition is not None:
            params = list(definition.params) + (["..."] if definition.variadic else []) \
                if definition.params is not None else None
            out[name] = (params, " ".join(definition.body))
    for name, enabled in config.assignment.items():
        if enabled and name not in out:
            out[name] = (None, "1")
    return out


def _config_slice(table: MacroTable, text: str, config: Configuration) -> list[str]:
    expanded = table.expand(tokenize(text), TRUE)
    for pc, toks in flatten_alternatives(expanded):
        if evaluate(pc, config):
            return [t.text for t in toks]
    raise AssertionError("no alternative matched the configuration")


def test_config_slice_matches_oracle_expander():
    table = table_with_desktop_variants()
    table.define("MAX 10", TRUE, ORIGIN)
    table.define("TWICE(x) ((x) * 2)", TRUE, ORIGIN)
    samples = [
        "MAX + 1",
        "TWICE(MAX)",
        "IF_DESKTOP(run();)",
        "ENABLE_DESKTOP",
        "TWICE(ENABLE_DESKTOP)",
        "no_macros_here(1, 2)",
    ]
    for config in (Configuration(), Configuration.enabling(["CONFIG_DESKTOP"])):
        oracle = OracleExpander(_oracle_defines(table, config))
        for text in samples:
            expected = oracle.expand(tokenize(text))
            assert _config_slice(table, text, config) == expected, (text, config)


# --------------------------------------------------------------------------
# termination and determinism properties

_names = st.sampled_from(["P", "Q", "R"])


@given(
    st.lists(
        st.tuples(_names, st.lists(st.sampled_from(["P", "Q", "R", "+", "1", "(", ")"]), max_size=5)),
        max_size=4,
    ),
    st.lists(st.sampled_from(["P", "Q", "R", "(", ")", ",", "1"]), max_size=8),
)
@settings(max_examples=200, deadline=None)
def test_adversarial_defines_terminate_and_are_deterministic(defines, use):
    table = MacroTable()
    for name, body in defines:
        table.define(f"{name} {' '.join(body)}", TRUE, ORIGIN)
    first = table.expand(list(use), TRUE)
    second = table.expand(list(use), TRUE)
    assert texts(first) == texts(second)
