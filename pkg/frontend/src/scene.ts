/**
 * SVG scene for the recursive-disk structure view.
 *
 * Geometry comes straight from the layout document and is written once;
 * configuration changes only ever touch the `opacity` attribute, and
 * selection only swaps classes and redraws the edge layer.
 */

import { activeEdges, LoadedModel, ViewState, entityIncluded } from "./state.js";
import { DiskDoc, LayoutDoc, SegmentDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
export const EXCLUDED_OPACITY = "0.15";

export interface Scene {
  svg: SVGSVGElement;
  entityElements: Map<string, SVGElement>;
  anchors: Map<string, [number, number]>;
  edgeLayer: SVGGElement;
}

function polar(cx: number, cy: number, radius: number, angle: number): [number, number] {
  // y grows downward in SVG, so increasing angles run clockwise on screen
  return [cx + radius * Math.cos(angle), cy + radius * Math.sin(angle)];
}

function sectorPath(cx: number, cy: number, segment: SegmentDoc): string {
  const { start_angle: a, end_angle: b, inner_radius: r0, outer_radius: r1 } = segment;
  const large = b - a > Math.PI ? 1 : 0;
  const [x0, y0] = polar(cx, cy, r1, a);
  const [x1, y1] = polar(cx, cy, r1, b);
  const [x2, y2] = polar(cx, cy, r0, b);
  const [x3, y3] = polar(cx, cy, r0, a);
  return (
    `M ${x0} ${y0} A ${r1} ${r1} 0 ${large} 1 ${x1} ${y1} ` +
    `L ${x2} ${y2} A ${r0} ${r0} 0 ${large} 0 ${x3} ${y3} Z`
  );
}

export function buildScene(host: Document, layout: LayoutDoc): Scene {
  const svg = host.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  const entityElements = new Map<string, SVGElement>();
  const anchors = new Map<string, [number, number]>();

  const diskLayer = host.createElementNS(SVG_NS, "g") as SVGGElement;
  diskLayer.setAttribute("class", "disks");
  svg.appendChild(diskLayer);

  const segmentsByDisk = new Map<string, SegmentDoc[]>();
  for (const segment of layout.segments) {
    const list = segmentsByDisk.get(segment.disk) ?? [];
    list.push(segment);
    segmentsByDisk.set(segment.disk, list);
  }

  let minX = 0, minY = 0, maxX = 0, maxY = 0;

  const addDisk = (disk: DiskDoc): void => {
    const [cx, cy] = disk.center;
    minX = Math.min(minX, cx - disk.radius);
    minY = Math.min(minY, cy - disk.radius);
    maxX = Math.max(maxX, cx + disk.radius);
    maxY = Math.max(maxY, cy + disk.radius);
    const circle = host.createElementNS(SVG_NS, "circle") as SVGCircleElement;
    circle.setAttribute("cx", String(cx));
    circle.setAttribute("cy", String(cy));
    circle.setAttribute("r", String(disk.radius));
    circle.setAttribute("class", `disk ${disk.color_class}`);
    circle.setAttribute("data-entity-id", disk.entity_id);
    diskLayer.appendChild(circle);
    entityElements.set(disk.entity_id, circle);
    anchors.set(disk.entity_id, [cx, cy]);

    for (const segment of segmentsByDisk.get(disk.entity_id) ?? []) {
      const path = host.createElementNS(SVG_NS, "path") as SVGPathElement;
      path.setAttribute("d", sectorPath(cx, cy, segment));
      path.setAttribute("class", `segment ${segment.color_class}`);
      path.setAttribute("data-entity-id", segment.entity_id);
      diskLayer.appendChild(path);
      entityElements.set(segment.entity_id, path);
      const midAngle = (segment.start_angle + segment.end_angle) / 2;
      const midRadius = (segment.inner_radius + segment.outer_radius) / 2;
      anchors.set(segment.entity_id, polar(cx, cy, midRadius, midAngle));
    }
    disk.children.forEach(addDisk);
  };
  layout.disks.forEach(addDisk);

  const pad = 2;
  svg.setAttribute(
    "viewBox",
    `${minX - pad} ${minY - pad} ${maxX - minX + 2 * pad} ${maxY - minY + 2 * pad}`,
  );

  const edgeLayer = host.createElementNS(SVG_NS, "g") as SVGGElement;
  edgeLayer.setAttribute("class", "edges");
  svg.appendChild(edgeLayer);

  return { svg, entityElements, anchors, edgeLayer };
}

/** Fade entities excluded by the configuration; geometry is untouched. */
export function applyConfiguration(
  scene: Scene,
  model: LoadedModel,
  state: ViewState,
): void {
  for (const [entityId, element] of scene.entityElements) {
    const included = entityIncluded(model, state, entityId);
    element.setAttribute("opacity", included ? "1" : EXCLUDED_OPACITY);
  }
}

/** Orange highlight on the selected entity and red lines to the targets
 * of its configuration-valid calls, reads, and writes. */
export function applySelection(
  scene: Scene,
  model: LoadedModel,
  state: ViewState,
): void {
  for (const element of scene.entityElements.values()) {
    element.classList.remove("selected");
  }
  while (scene.edgeLayer.firstChild) {
    scene.edgeLayer.removeChild(scene.edgeLayer.firstChild);
  }
  if (state.selected === null) return;
  const selectedElement = scene.entityElements.get(state.selected);
  if (selectedElement === undefined) {
    console.error(`selected entity ${state.selected} has no geometry`);
    return;
  }
  selectedElement.classList.add("selected");
  const from = scene.anchors.get(state.selected)!;
  const host = scene.svg.ownerDocument!;
  for (const index of activeEdges(model, state)) {
    const relation = model.doc.relations[index];
    const to = scene.anchors.get(relation.target);
    if (to === undefined) {
      console.error(`relation target ${relation.target} has no geometry`);
      continue;
    }
    const line = host.createElementNS(SVG_NS, "line") as SVGLineElement;
    line.setAttribute("x1", String(from[0]));
    line.setAttribute("y1", String(from[1]));
    line.setAttribute("x2", String(to[0]));
    line.setAttribute("y2", String(to[1]));
    line.setAttribute("class", "edge");
    line.setAttribute("data-relation-kind", relation.kind);
    line.setAttribute("data-target", relation.target);
    scene.edgeLayer.appendChild(line);
  }
}
