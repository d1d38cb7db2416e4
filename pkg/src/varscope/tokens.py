"""Shared C token scanner for directive arguments and code lines."""

from __future__ import annotations

import re

# pp-number covers both integer and float shapes; exactness is not needed,
# only stable token boundaries.
_TOKEN_RE = re.compile(
    r"""
    [A-Za-z_]\w*
  | (?:\d|\.\d)(?:[\w.]|[eEpP][+-])*
  | "(?:\\.|[^"\\])*"
  | '(?:\\.|[^'\\])*'
  | >>=|<<=|\.\.\.
  | \#\#|&&|\|\||<<|>>|<=|>=|==|!=|\+\+|--|->|\+=|-=|\*=|/=|%=|&=|\^=|\|=
  | [-+*/%<>=!&|^~?:;,.()\[\]{}#]
  | \S
    """,
    re.VERBOSE,
)

_IDENT_RE = re.compile(r"[A-Za-z_]\w*\Z")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def is_identifier(token: str) -> bool:
    return bool(_IDENT_RE.match(token))
