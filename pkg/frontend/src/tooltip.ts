/** Hover tooltip with entity detail: name, kind, LOC, condition. */

import { LoadedModel } from "./state.js";

export interface Tooltip {
  element: HTMLDivElement;
  show(entityId: string, x: number, y: number): void;
  hide(): void;
}

export function createTooltip(parent: HTMLElement, model: LoadedModel): Tooltip {
  const doc = parent.ownerDocument;
  const element = doc.createElement("div");
  element.className = "tooltip";
  element.style.display = "none";
  parent.appendChild(element);
  return {
    element,
    show(entityId: string, x: number, y: number): void {
      const entity = model.entities.get(entityId);
      if (entity === undefined) return;
      element.textContent = "";
      const lines = [
        `${entity.name}`,
        `kind: ${entity.kind}`,
        entity.loc !== null ? `loc: ${entity.loc}` : null,
        `when: ${entity.pc}`,
      ];
      for (const line of lines) {
        if (line === null) continue;
        const row = doc.createElement("div");
        row.textContent = line;
        element.appendChild(row);
      }
      element.style.left = `${x + 12}px`;
      element.style.top = `${y + 12}px`;
      element.style.display = "block";
    },
    hide(): void {
      element.style.display = "none";
    },
  };
}
