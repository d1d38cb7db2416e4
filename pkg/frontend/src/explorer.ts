/** FeatureExplorer (checkbox per flag) and the entity search bar. */

import { LoadedModel, ViewState, searchEntities } from "./state.js";

export function buildFeatureExplorer(
  container: HTMLElement,
  model: LoadedModel,
  isEnabled: (feature: string) => boolean,
  onToggle: (feature: string) => void,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const heading = doc.createElement("h2");
  heading.textContent = "Features";
  container.appendChild(heading);
  const list = doc.createElement("ul");
  list.className = "feature-list";
  for (const feature of model.doc.features) {
    const item = doc.createElement("li");
    const label = doc.createElement("label");
    const box = doc.createElement("input");
    box.type = "checkbox";
    box.checked = isEnabled(feature);
    box.dataset.feature = feature;
    box.addEventListener("change", () => onToggle(feature));
    label.appendChild(box);
    label.appendChild(doc.createTextNode(` ${feature}`));
    item.appendChild(label);
    list.appendChild(item);
  }
  container.appendChild(list);
}

export function buildSearchBar(
  container: HTMLElement,
  model: LoadedModel,
  onPick: (entityId: string) => void,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const input = doc.createElement("input");
  input.type = "search";
  input.placeholder = "search entities";
  input.className = "search-input";
  const results = doc.createElement("ul");
  results.className = "search-results";

  input.addEventListener("input", () => {
    results.textContent = "";
    for (const entityId of searchEntities(model, input.value).slice(0, 20)) {
      const item = doc.createElement("li");
      const entity = model.entities.get(entityId)!;
      item.textContent = `${entity.name} (${entity.kind})`;
      item.dataset.entityId = entityId;
      item.addEventListener("click", () => onPick(entityId));
      results.appendChild(item);
    }
  });
  container.appendChild(input);
  container.appendChild(results);
}

export function syncFeatureBoxes(container: HTMLElement, state: ViewState): void {
  container
    .querySelectorAll<HTMLInputElement>("input[data-feature]")
    .forEach((box) => {
      box.checked = state.configuration.has(box.dataset.feature!);
    });
}
