/**
 * Presence-condition evaluation over the canonical text form emitted by
 * the analyzer (`defined(NAME)`, `!`, `&&`, `||`, C comparison syntax).
 *
 * Conditions are parsed once at load; evaluation treats an enabled
 * feature as the integer 1 and anything unknown as 0. A comparison that
 * fails arithmetically (division by zero) is false, matching the
 * analyzer.
 */

export type PcExpr =
  | { kind: "int"; value: bigint }
  | { kind: "ident"; name: string }
  | { kind: "defined"; name: string }
  | { kind: "unary"; op: string; operand: PcExpr }
  | { kind: "binary"; op: string; left: PcExpr; right: PcExpr }
  | { kind: "ternary"; cond: PcExpr; then: PcExpr; other: PcExpr };

const TOKEN_RE =
  /[A-Za-z_]\w*|0[xX][0-9A-Fa-f]+|\d+|<<|>>|<=|>=|==|!=|&&|\|\||[-+*/%<>=!&|^~?:()]/g;

const BINARY_LEVELS: Record<string, number> = {
  "||": 1,
  "&&": 2,
  "|": 3,
  "^": 4,
  "&": 5,
  "==": 6,
  "!=": 6,
  "<": 7,
  "<=": 7,
  ">": 7,
  ">=": 7,
  "<<": 8,
  ">>": 8,
  "+": 9,
  "-": 9,
  "*": 10,
  "/": 10,
  "%": 10,
};

export class PcParseError extends Error {}

class Parser {
  private tokens: string[];
  private pos = 0;

  constructor(text: string) {
    this.tokens = text.match(TOKEN_RE) ?? [];
  }

  parse(): PcExpr {
    const expr = this.ternary();
    if (this.pos !== this.tokens.length) {
      throw new PcParseError(`trailing tokens in ${this.tokens.join(" ")}`);
    }
    return expr;
  }

  private peek(): string | undefined {
    return this.tokens[this.pos];
  }

  private take(): string {
    const tok = this.tokens[this.pos];
    if (tok === undefined) throw new PcParseError("unexpected end of condition");
    this.pos += 1;
    return tok;
  }

  private ternary(): PcExpr {
    const cond = this.binary(1);
    if (this.peek() === "?") {
      this.take();
      const then = this.ternary();
      if (this.take() !== ":") throw new PcParseError("expected ':'");
      return { kind: "ternary", cond, then, other: this.ternary() };
    }
    return cond;
  }

  private binary(minLevel: number): PcExpr {
    let left = this.unary();
    for (;;) {
      const tok = this.peek();
      const level = tok === undefined ? undefined : BINARY_LEVELS[tok];
      if (level === undefined || level < minLevel) return left;
      this.take();
      left = { kind: "binary", op: tok!, left, right: this.binary(level + 1) };
    }
  }

  private unary(): PcExpr {
    const tok = this.peek();
    if (tok === "!" || tok === "~" || tok === "-" || tok === "+") {
      this.take();
      return { kind: "unary", op: tok, operand: this.unary() };
    }
    return this.primary();
  }

  private primary(): PcExpr {
    const tok = this.take();
    if (tok === "(") {
      const expr = this.ternary();
      if (this.take() !== ")") throw new PcParseError("expected ')'");
      return expr;
    }
    if (tok === "defined") {
      if (this.peek() === "(") {
        this.take();
        const name = this.take();
        if (this.take() !== ")") throw new PcParseError("expected ')' after defined");
        return { kind: "defined", name };
      }
      return { kind: "defined", name: this.take() };
    }
    if (/^[A-Za-z_]/.test(tok)) return { kind: "ident", name: tok };
    if (/^0[xX]/.test(tok)) return { kind: "int", value: BigInt(tok) };
    if (/^\d/.test(tok)) {
      // a leading zero means octal in C source
      const value =
        tok.length > 1 && tok.startsWith("0") ? BigInt(parseInt(tok, 8)) : BigInt(tok);
      return { kind: "int", value };
    }
    throw new PcParseError(`unexpected token '${tok}'`);
  }
}

export function parsePc(text: string): PcExpr {
  return new Parser(text).parse();
}

class EvalError extends Error {}

const wrap = (x: bigint): bigint => BigInt.asIntN(64, x);

function evalNum(expr: PcExpr, enabled: ReadonlySet<string>): bigint {
  switch (expr.kind) {
    case "int":
      return wrap(expr.value);
    case "ident":
    case "defined":
      return enabled.has(expr.name) ? 1n : 0n;
    case "unary": {
      const v = evalNum(expr.operand, enabled);
      if (expr.op === "!") return v === 0n ? 1n : 0n;
      if (expr.op === "~") return wrap(~v);
      if (expr.op === "-") return wrap(-v);
      return v;
    }
    case "ternary":
      return evalNum(expr.cond, enabled) !== 0n
        ? evalNum(expr.then, enabled)
        : evalNum(expr.other, enabled);
    case "binary": {
      if (expr.op === "&&") {
        return evalBool(expr.left, enabled) && evalBool(expr.right, enabled) ? 1n : 0n;
      }
      if (expr.op === "||") {
        return evalBool(expr.left, enabled) || evalBool(expr.right, enabled) ? 1n : 0n;
      }
      const lhs = evalNum(expr.left, enabled);
      const rhs = evalNum(expr.right, enabled);
      switch (expr.op) {
        case "+": return wrap(lhs + rhs);
        case "-": return wrap(lhs - rhs);
        case "*": return wrap(lhs * rhs);
        case "/":
          if (rhs === 0n) throw new EvalError("division by zero");
          return wrap(lhs / rhs);
        case "%":
          if (rhs === 0n) throw new EvalError("division by zero");
          return wrap(lhs % rhs);
        case "<<":
          if (rhs < 0n || rhs > 63n) throw new EvalError("bad shift");
          return wrap(lhs << rhs);
        case ">>":
          if (rhs < 0n || rhs > 63n) throw new EvalError("bad shift");
          return lhs >> rhs;
        case "<": return lhs < rhs ? 1n : 0n;
        case "<=": return lhs <= rhs ? 1n : 0n;
        case ">": return lhs > rhs ? 1n : 0n;
        case ">=": return lhs >= rhs ? 1n : 0n;
        case "==": return lhs === rhs ? 1n : 0n;
        case "!=": return lhs !== rhs ? 1n : 0n;
        case "&": return lhs & rhs;
        case "^": return lhs ^ rhs;
        case "|": return lhs | rhs;
      }
      throw new PcParseError(`unknown operator ${expr.op}`);
    }
  }
}

/**
 * Boolean truth of a condition. Logical connectives short-circuit; any
 * arithmetic subtree that fails evaluates to false, like the analyzer's
 * per-comparison error recovery.
 */
export function evalBool(expr: PcExpr, enabled: ReadonlySet<string>): boolean {
  switch (expr.kind) {
    case "int":
      return expr.value !== 0n;
    case "ident":
    case "defined":
      return enabled.has(expr.name);
    case "unary":
      if (expr.op === "!") return !evalBool(expr.operand, enabled);
      break;
    case "binary":
      if (expr.op === "&&") {
        return evalBool(expr.left, enabled) && evalBool(expr.right, enabled);
      }
      if (expr.op === "||") {
        return evalBool(expr.left, enabled) || evalBool(expr.right, enabled);
      }
      break;
    default:
      break;
  }
  try {
    return evalNum(expr, enabled) !== 0n;
  } catch (error) {
    if (error instanceof EvalError) return false;
    throw error;
  }
}

export function pcAtoms(expr: PcExpr, into: Set<string> = new Set()): Set<string> {
  switch (expr.kind) {
    case "ident":
    case "defined":
      into.add(expr.name);
      break;
    case "unary":
      pcAtoms(expr.operand, into);
      break;
    case "binary":
      pcAtoms(expr.left, into);
      pcAtoms(expr.right, into);
      break;
    case "ternary":
      pcAtoms(expr.cond, into);
      pcAtoms(expr.then, into);
      pcAtoms(expr.other, into);
      break;
    default:
      break;
  }
  return into;
}
