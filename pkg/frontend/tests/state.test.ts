import { describe, expect, it } from "vitest";

import modelDoc from "./fixtures/model.json";
import {
  activeEdges,
  initialState,
  loadModel,
  searchEntities,
  selectEntity,
  toggleFeature,
} from "../src/state.js";
import { ModelDoc } from "../src/types.js";

const model = loadModel(modelDoc as unknown as ModelDoc);

describe("view state", () => {
  it("starts with every feature enabled", () => {
    const state = initialState(model);
    expect([...state.configuration].sort()).toEqual(model.doc.features);
    expect(state.selected).toBeNull();
  });

  it("toggle is an involution", () => {
    const state = initialState(model);
    const once = toggleFeature(state, "FEATURE_FIND_EXEC");
    expect(once.configuration.has("FEATURE_FIND_EXEC")).toBe(false);
    const twice = toggleFeature(once, "FEATURE_FIND_EXEC");
    expect([...twice.configuration].sort()).toEqual([...state.configuration].sort());
  });

  it("selecting an entity records its source span", () => {
    const state = selectEntity(model, initialState(model), "find.c!fn!find_main");
    expect(state.selected).toBe("find.c!fn!find_main");
    expect(state.codeView?.file).toBe("find.c");
    const entity = model.entities.get("find.c!fn!find_main")!;
    expect(state.codeView?.start).toBe(entity.span.start);
    expect(state.codeView?.end).toBe(entity.span.end);
  });

  it("selecting an unknown id clears the selection", () => {
    const selected = selectEntity(model, initialState(model), "find.c!fn!find_main");
    const cleared = selectEntity(model, selected, "nope!fn!missing");
    expect(cleared.selected).toBeNull();
    expect(cleared.codeView).toBeNull();
  });
});

describe("search", () => {
  it("ranks exact matches before prefix before infix", () => {
    const results = searchEntities(model, "find_main");
    expect(results[0]).toBe("find.c!fn!find_main");
  });

  it("matches case-insensitively and agrees with a linear scan", () => {
    const results = searchEntities(model, "COUNT");
    const scan = [...model.entities.values()]
      .filter((e) => e.name.toLowerCase().includes("count"))
      .map((e) => e.id)
      .sort();
    expect([...results].sort()).toEqual(scan);
  });

  it("returns nothing for an empty query", () => {
    expect(searchEntities(model, "")).toEqual([]);
  });

  it("returns nothing for an unknown name", () => {
    expect(searchEntities(model, "zzz_missing")).toEqual([]);
  });
});

describe("active edges", () => {
  it("follows only configuration-valid outgoing relations", () => {
    let state = selectEntity(model, initialState(model), "find.c!fn!find_main");
    const all = activeEdges(model, state);
    const targetsAll = all.map((k) => model.doc.relations[k].target).sort();
    expect(targetsAll).toContain("find.c!fn!run_exec");

    state = toggleFeature(state, "FEATURE_FIND_EXEC");
    const reduced = activeEdges(model, state);
    const targetsReduced = reduced.map((k) => model.doc.relations[k].target);
    expect(targetsReduced).not.toContain("find.c!fn!run_exec");
    expect(all.length - reduced.length).toBe(1);
  });
});
