/** Application bootstrap: fetch documents, build the view, wire events. */

import { createCodeViewer } from "./codeviewer.js";
import { buildFeatureExplorer, buildSearchBar, syncFeatureBoxes } from "./explorer.js";
import { applyConfiguration, applySelection, buildScene, Scene } from "./scene.js";
import {
  LoadedModel,
  ViewState,
  initialState,
  loadModel,
  selectEntity,
  toggleFeature,
} from "./state.js";
import { createTooltip } from "./tooltip.js";
import { LayoutDoc, ModelDoc } from "./types.js";

async function fetchJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) throw new Error(`${url}: HTTP ${response.status}`);
  return (await response.json()) as T;
}

async function fetchSource(file: string): Promise<string> {
  const response = await fetch(`/api/source?file=${encodeURIComponent(file)}`);
  if (!response.ok) throw new Error(`HTTP ${response.status}`);
  return response.text();
}

export async function start(root: HTMLElement): Promise<void> {
  const doc = root.ownerDocument;
  const model: LoadedModel = loadModel(await fetchJson<ModelDoc>("/api/model"));
  const layout = await fetchJson<LayoutDoc>("/api/layout");

  let state: ViewState = initialState(model);

  const sidebar = doc.getElementById("sidebar")!;
  const structure = doc.getElementById("structure")!;
  const codePane = doc.getElementById("code")!;
  const searchHost = doc.getElementById("search")!;

  const scene: Scene = buildScene(doc, layout);
  scene.svg.setAttribute("width", "100%");
  scene.svg.setAttribute("height", "100%");
  structure.appendChild(scene.svg);

  const viewer = createCodeViewer(codePane, fetchSource);
  const tooltip = createTooltip(root, model);

  const refresh = (): void => {
    applyConfiguration(scene, model, state);
    applySelection(scene, model, state);
    syncFeatureBoxes(sidebar, state);
    if (state.codeView !== null) {
      void viewer.show(state.codeView);
    } else {
      viewer.clear();
    }
  };

  buildFeatureExplorer(
    sidebar,
    model,
    (feature) => state.configuration.has(feature),
    (feature) => {
      state = toggleFeature(state, feature);
      refresh();
    },
  );
  buildSearchBar(searchHost, model, (entityId) => {
    state = selectEntity(model, state, entityId);
    refresh();
  });

  scene.svg.addEventListener("click", (event) => {
    const target = event.target as SVGElement;
    const entityId = target.getAttribute?.("data-entity-id");
    state = selectEntity(model, state, entityId ?? null);
    refresh();
  });
  scene.svg.addEventListener("mousemove", (event) => {
    const target = event.target as SVGElement;
    const entityId = target.getAttribute?.("data-entity-id");
    if (entityId) {
      state = { ...state, hovered: entityId };
      tooltip.show(entityId, (event as MouseEvent).clientX, (event as MouseEvent).clientY);
    } else {
      state = { ...state, hovered: null };
      tooltip.hide();
    }
  });
  scene.svg.addEventListener("mouseleave", () => tooltip.hide());

  refresh();
}

declare const window: (Window & typeof globalThis) | undefined;

if (typeof window !== "undefined" && typeof document !== "undefined") {
  const boot = () => {
    const root = document.getElementById("app");
    if (root) {
      void start(root);
    }
  };
  if (document.readyState === "complete" || document.readyState === "interactive") {
    boot();
  } else {
    window.addEventListener("DOMContentLoaded", boot);
  }
}
