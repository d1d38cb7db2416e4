"""Independent line-based conditional-elimination oracle.

Given one total configuration (a concrete set of macro definitions), this
simulates enough of the C preprocessor to decide, line by line, whether a
line survives preprocessing.  Excluded lines and directive lines are
replaced by empty lines so physical line numbers are preserved in the
output.

This is deliberately a from-scratch implementation: it keeps a plain
name -> definition dict per run, expands macros only while evaluating
conditions, and never builds presence conditions.  It exists so the main
package can be checked against something that shares none of its code
paths.
"""

from __future__ import annotations

import re

_ID_RE = re.compile(r"[A-Za-z_]\w*")
_TOKEN_RE = re.compile(
    r"[A-Za-z_]\w*"
    r"|0[xX][0-9A-Fa-f]+[uUlL]*|\d+[uUlL]*"
    r"|'(?:\\.|[^'\\])*'"
    r"|\"(?:\\.|[^\"\\])*\""
    r"|<<|>>|<=|>=|==|!=|&&|\|\||##|[-+*/%<>=!&|^~?:(),#]"
)
_DIRECTIVE_RE = re.compile(r"^\s*#\s*([A-Za-z_]\w*)\s*(.*)$", re.DOTALL)


class OracleError(Exception):
    pass


def strip_comments_and_splice(text: str) -> list[str]:
    """Return logical lines: splices joined, comments turned into a space.

    Implemented as a single character scan so it does not share the main
    scanner's structure.  Each returned entry is one logical line; a
    logical line produced by joining N physical lines is followed by N-1
    empty placeholder entries so indices still map to physical lines.
    """
    text = text.replace("\r\n", "\n")
    lines: list[str] = []
    buf: list[str] = []
    joined = 0  # physical lines merged into buf beyond the first
    i = 0
    state = "code"
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\" and i + 1 < n and text[i + 1] == "\n" and state != "line_comment":
            joined += 1
            i += 2
            continue
        if c == "\n":
            if state == "block_comment":
                joined += 1
                i += 1
                continue
            if state == "line_comment":
                state = "code"
            if state in ("string", "char"):
                state = "code"
            lines.append("".join(buf))
            lines.extend([""] * joined)
            buf = []
            joined = 0
            i += 1
            continue
        if state == "code":
            if c == "/" and i + 1 < n and text[i + 1] == "*":
                buf.append(" ")
                state = "block_comment"
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
            if c == "\\" and i + 1 < n:
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
    if buf or joined:
        lines.append("".join(buf))
        lines.extend([""] * joined)
    return lines


class _Expander:
    """Config-specific macro expansion for condition evaluation."""

    def __init__(self, defines: dict[str, tuple[list[str] | None, str]]):
        self.defines = defines

    def expand(self, tokens: list[str], hidden: frozenset[str] = frozenset()) -> list[str]:
        out: list[str] = []
        i = 0
        while i < len(tokens):
            tok = tokens[i]
            if tok == "defined":
                # defined NAME / defined(NAME): never expand the operand
                if i + 1 < len(tokens) and tokens[i + 1] == "(":
                    if i + 3 < len(tokens) and tokens[i + 3] == ")":
                        out.extend(tokens[i : i + 4])
                        i += 4
                        continue
                elif i + 1 < len(tokens) and _ID_RE.fullmatch(tokens[i + 1]):
                    out.extend(tokens[i : i + 2])
                    i += 2
                    continue
                out.append(tok)
                i += 1
                continue
            if _ID_RE.fullmatch(tok) and tok not in hidden and tok in self.defines:
                params, body = self.defines[tok]
                if params is None:
                    out.extend(self.expand(_tokenize(body), hidden | {tok}))
                    i += 1
                    continue
                if i + 1 < len(tokens) and tokens[i + 1] == "(":
                    args, nxt = self._parse_args(tokens, i + 2)
                    if args is not None:
                        replaced = self._substitute(params, args, body)
                        out.extend(self.expand(replaced, hidden | {tok}))
                        i = nxt
                        continue
                out.append(tok)
                i += 1
                continue
            out.append(tok)
            i += 1
        return out

    def _parse_args(self, tokens: list[str], i: int):
        args: list[list[str]] = [[]]
        depth = 0
        while i < len(tokens):
            tok = tokens[i]
            if tok == "(":
                depth += 1
                args[-1].append(tok)
            elif tok == ")":
                if depth == 0:
                    return args, i + 1
                depth -= 1
                args[-1].append(tok)
            elif tok == "," and depth == 0:
                args.append([])
            else:
                args[-1].append(tok)
            i += 1
        return None, i  # unterminated: caller leaves the name alone

    def _substitute(self, params: list[str], args: list[list[str]], body: str) -> list[str]:
        variadic = bool(params) and params[-1] == "..."
        names = params[:-1] if variadic else params
        mapping: dict[str, list[str]] = {}
        for k, name in enumerate(names):
            mapping[name] = self.expand(args[k]) if k < len(args) else []
        if variadic:
            rest: list[str] = []
            for k in range(len(names), len(args)):
                if rest:
                    rest.append(",")
                rest.extend(self.expand(args[k]))
            mapping["__VA_ARGS__"] = rest
        body_tokens = _tokenize(body)
        out: list[str] = []
        j = 0
        while j < len(body_tokens):
            tok = body_tokens[j]
            # token paste: evaluate left ## right textually
            if j + 2 < len(body_tokens) and body_tokens[j + 1] == "##":
                left = mapping.get(tok, [tok])
                right_tok = body_tokens[j + 2]
                right = mapping.get(right_tok, [right_tok])
                mid = (left[-1] if left else "") + (right[0] if right else "")
                out.extend(left[:-1])
                if mid:
                    out.extend(_tokenize(mid))
                out.extend(right[1:])
                j += 3
                continue
            if tok == "#" and j + 1 < len(body_tokens) and body_tokens[j + 1] in mapping:
                out.append('"' + " ".join(mapping[body_tokens[j + 1]]) + '"')
                j += 2
                continue
            if tok in mapping:
                out.extend(mapping[tok])
            else:
                out.append(tok)
            j += 1
        return out


def _tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


class _CondEval:
    """Recursive-descent evaluator over expanded condition tokens."""

    def __init__(self, tokens: list[str], defines: dict):
        self.toks = tokens
        self.pos = 0
        self.defines = defines

    def peek(self) -> str | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def take(self) -> str:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def evaluate(self) -> int:
        val = self.ternary()
        if self.pos != len(self.toks):
            raise OracleError(f"trailing tokens: {self.toks[self.pos:]}")
        return val

    def ternary(self) -> int:
        cond = self.logical_or()
        if self.peek() == "?":
            self.take()
            then = self.ternary()
            if self.take() != ":":
                raise OracleError("missing ':'")
            other = self.ternary()
            return then if cond else other
        return cond

    def logical_or(self) -> int:
        val = self.logical_and()
        while self.peek() == "||":
            self.take()
            rhs = self.logical_and()
            val = 1 if (val or rhs) else 0
        return val

    def logical_and(self) -> int:
        val = self.bit_or()
        while self.peek() == "&&":
            self.take()
            rhs = self.bit_or()
            val = 1 if (val and rhs) else 0
        return val

    def bit_or(self) -> int:
        val = self.bit_xor()
        while self.peek() == "|":
            self.take()
            val |= self.bit_xor()
        return val

    def bit_xor(self) -> int:
        val = self.bit_and()
        while self.peek() == "^":
            self.take()
            val ^= self.bit_and()
        return val

    def bit_and(self) -> int:
        val = self.equality()
        while self.peek() == "&":
            self.take()
            val &= self.equality()
        return val

    def equality(self) -> int:
        val = self.relational()
        while self.peek() in ("==", "!="):
            op = self.take()
            rhs = self.relational()
            val = 1 if ((val == rhs) if op == "==" else (val != rhs)) else 0
        return val

    def relational(self) -> int:
        val = self.shift()
        while self.peek() in ("<", "<=", ">", ">="):
            op = self.take()
            rhs = self.shift()
            res = {"<": val < rhs, "<=": val <= rhs, ">": val > rhs, ">=": val >= rhs}[op]
            val = 1 if res else 0
        return val

    def shift(self) -> int:
        val = self.additive()
        while self.peek() in ("<<", ">>"):
            op = self.take()
            rhs = self.additive()
            if rhs < 0 or rhs > 63:
                raise OracleError("bad shift count")
            val = _wrap(val << rhs) if op == "<<" else val >> rhs
        return val

    def additive(self) -> int:
        val = self.multiplicative()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.multiplicative()
            val = _wrap(val + rhs if op == "+" else val - rhs)
        return val

    def multiplicative(self) -> int:
        val = self.unary()
        while self.peek() in ("*", "/", "%"):
            op = self.take()
            rhs = self.unary()
            if op == "*":
                val = _wrap(val * rhs)
            else:
                if rhs == 0:
                    raise OracleError("division by zero")
                q = abs(val) // abs(rhs)
                if (val < 0) != (rhs < 0):
                    q = -q
                val = q if op == "/" else _wrap(val - q * rhs)
        return val

    def unary(self) -> int:
        tok = self.peek()
        if tok == "!":
            self.take()
            return 0 if self.unary() else 1
        if tok == "-":
            self.take()
            return _wrap(-self.unary())
        if tok == "+":
            self.take()
            return self.unary()
        if tok == "~":
            self.take()
            return _wrap(~self.unary())
        return self.primary()

    def primary(self) -> int:
        tok = self.peek()
        if tok is None:
            raise OracleError("unexpected end of condition")
        if tok == "(":
            self.take()
            val = self.ternary()
            if self.take() != ")":
                raise OracleError("missing ')'")
            return val
        self.take()
        if tok == "defined":
            if self.peek() == "(":
                self.take()
                name = self.take()
                if self.take() != ")":
                    raise OracleError("missing ')' after defined")
            else:
                name = self.take()
            return 1 if name in self.defines else 0
        if _ID_RE.fullmatch(tok):
            return 0  # unexpanded identifier
        if tok.startswith("'"):
            body = tok[1:-1]
            if body.startswith("\\"):
                return ord(body[1]) if len(body) > 1 else 0
            return ord(body[0]) if body else 0
        m = re.fullmatch(r"(0[xX][0-9A-Fa-f]+|\d+)[uUlL]*", tok)
        if not m:
            raise OracleError(f"bad token {tok!r}")
        digits = m.group(1)
        if digits.lower().startswith("0x"):
            return _wrap(int(digits, 16))
        if digits.startswith("0") and len(digits) > 1:
            return _wrap(int(digits, 8))
        return _wrap(int(digits, 10))


def _wrap(value: int) -> int:
    value &= (1 << 64) - 1
    if value >= 1 << 63:
        value -= 1 << 64
    return value


def eval_condition(text: str, defines: dict[str, tuple[list[str] | None, str]]) -> bool:
    tokens = _Expander(defines).expand(_tokenize(text))
    try:
        return _CondEval(tokens, defines).evaluate() != 0
    except OracleError:
        return False


def _parse_define(argument: str) -> tuple[str, list[str] | None, str] | None:
    m = _ID_RE.match(argument.lstrip())
    if not m:
        return None
    rest = argument.lstrip()[m.end():]
    name = m.group(0)
    if rest.startswith("("):
        close = _find_close(rest)
        if close is None:
            return None
        params = [p.strip() for p in rest[1:close].split(",") if p.strip()]
        return name, params, rest[close + 1:].strip()
    return name, None, rest.strip()


def _find_close(text: str) -> int | None:
    depth = 0
    for i, c in enumerate(text):
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
            if depth == 0:
                return i
    return None


def eliminate(text: str, config_defines: dict[str, str]) -> str:
    """Preprocess one file for one total configuration.

    config_defines maps macro names to replacement text (features that are
    enabled map to "1").  Returns the text with excluded lines, directive
    lines, and blank-filled join placeholders replaced by empty lines so
    the physical line count is unchanged.
    """
    defines: dict[str, tuple[list[str] | None, str]] = {
        name: (None, body) for name, body in config_defines.items()
    }
    lines = strip_comments_and_splice(text)
    out: list[str] = []
    # stack entries: [was_active, this_branch_taken, any_branch_taken, saw_else]
    stack: list[list] = []

    def active() -> bool:
        return all(fr[1] for fr in stack)

    for line in lines:
        m = _DIRECTIVE_RE.match(line) if line.lstrip().startswith("#") else None
        if not m:
            out.append(line if (active() and True) else "")
            continue
        keyword, argument = m.group(1), m.group(2).strip()
        out.append("")
        if keyword in ("if", "ifdef", "ifndef"):
            parent_active = active()
            if keyword == "ifdef":
                taken = argument.split()[0] in defines if argument.split() else False
            elif keyword == "ifndef":
                taken = argument.split()[0] not in defines if argument.split() else True
            else:
                taken = eval_condition(argument, defines) if parent_active else False
            taken = taken and parent_active
            stack.append([parent_active, taken, taken, False])
        elif keyword == "elif":
            if not stack or stack[-1][3]:
                continue
            fr = stack[-1]
            was_parent = fr[0]
            if fr[2] or not was_parent:
                fr[1] = False
            else:
                fr[1] = eval_condition(argument, defines)
                fr[2] = fr[2] or fr[1]
        elif keyword == "else":
            if not stack or stack[-1][3]:
                continue
            fr = stack[-1]
            fr[3] = True
            fr[1] = fr[0] and not fr[2]
            fr[2] = True
        elif keyword == "endif":
            if stack:
                stack.pop()
        elif keyword == "define":
            if active():
                parsed = _parse_define(argument)
                if parsed:
                    name, params, body = parsed
                    defines[name] = (params, body)
        elif keyword == "undef":
            if active():
                words = argument.split()
                if words:
                    defines.pop(words[0], None)
        # include/pragma/error/line: no effect on single-file elimination
    return "\n".join(out) + ("\n" if text.endswith("\n") or not text else "")
