import { describe, expect, it } from "vitest";

import { evalBool, parsePc, pcAtoms } from "../src/pc.js";

const on = (...names: string[]) => new Set(names);

describe("presence-condition parsing and evaluation", () => {
  it("evaluates defined() conjunctions", () => {
    const pc = parsePc("defined(A) && !defined(B)");
    expect(evalBool(pc, on("A"))).toBe(true);
    expect(evalBool(pc, on("A", "B"))).toBe(false);
    expect(evalBool(pc, on())).toBe(false);
  });

  it("treats constants as their truth value", () => {
    expect(evalBool(parsePc("1"), on())).toBe(true);
    expect(evalBool(parsePc("0"), on("ANYTHING"))).toBe(false);
  });

  it("gives enabled features the integer value one", () => {
    const pc = parsePc("VERSION >= 2");
    expect(evalBool(pc, on("VERSION"))).toBe(false);
    expect(evalBool(pc, on())).toBe(false);
    expect(evalBool(parsePc("VERSION >= 1"), on("VERSION"))).toBe(true);
  });

  it("respects operator precedence", () => {
    const pc = parsePc("defined(A) && defined(B) || !defined(A)");
    expect(evalBool(pc, on())).toBe(true);
    expect(evalBool(pc, on("A"))).toBe(false);
    expect(evalBool(pc, on("A", "B"))).toBe(true);
  });

  it("treats failed arithmetic as false without throwing", () => {
    const pc = parsePc("A / B > 0");
    expect(evalBool(pc, on("A"))).toBe(false);
    expect(evalBool(pc, on("A", "B"))).toBe(true);
  });

  it("handles ternaries inside comparisons", () => {
    const pc = parsePc("(A ? 2 : 3) > 2");
    expect(evalBool(pc, on("A"))).toBe(false);
    expect(evalBool(pc, on())).toBe(true);
  });

  it("collects atoms", () => {
    const pc = parsePc("defined(A) && (VERSION >= 2 || !defined(B))");
    expect([...pcAtoms(pc)].sort()).toEqual(["A", "B", "VERSION"]);
  });

  it("rejects malformed text", () => {
    expect(() => parsePc("1 +")).toThrow();
    expect(() => parsePc("&& defined(A)")).toThrow();
  });
});
