/** View state and the pure update logic behind the interactions. */

import { evalBool, parsePc, PcExpr, PcParseError } from "./pc.js";
import { EntityDoc, ModelDoc } from "./types.js";

export interface CodeViewTarget {
  file: string;
  start: number;
  end: number;
}

export interface ViewState {
  configuration: Set<string>;
  selected: string | null;
  hovered: string | null;
  searchQuery: string;
  codeView: CodeViewTarget | null;
}

/** Parsed model: condition text compiled once, entities indexed by id. */
export interface LoadedModel {
  doc: ModelDoc;
  entities: Map<string, EntityDoc>;
  entityPcs: Map<string, PcExpr>;
  relationPcs: PcExpr[];
}

export function loadModel(doc: ModelDoc): LoadedModel {
  const entities = new Map<string, EntityDoc>();
  const entityPcs = new Map<string, PcExpr>();
  for (const entity of doc.entities) {
    entities.set(entity.id, entity);
    try {
      entityPcs.set(entity.id, parsePc(entity.pc));
    } catch (error) {
      if (!(error instanceof PcParseError)) throw error;
      console.error(`unparseable condition on ${entity.id}: ${entity.pc}`);
      entityPcs.set(entity.id, { kind: "int", value: 0n });
    }
  }
  const relationPcs = doc.relations.map((relation) => parsePc(relation.pc));
  return { doc, entities, entityPcs, relationPcs };
}

/** The overview starts with every flag on: all potentially compiled
 * entities visible at full opacity. */
export function initialState(model: LoadedModel): ViewState {
  return {
    configuration: new Set(model.doc.features),
    selected: null,
    hovered: null,
    searchQuery: "",
    codeView: null,
  };
}

export function toggleFeature(state: ViewState, feature: string): ViewState {
  const configuration = new Set(state.configuration);
  if (configuration.has(feature)) {
    configuration.delete(feature);
  } else {
    configuration.add(feature);
  }
  return { ...state, configuration };
}

export function entityIncluded(
  model: LoadedModel,
  state: ViewState,
  entityId: string,
): boolean {
  const pc = model.entityPcs.get(entityId);
  return pc === undefined ? true : evalBool(pc, state.configuration);
}

export function relationIncluded(
  model: LoadedModel,
  state: ViewState,
  index: number,
): boolean {
  return evalBool(model.relationPcs[index], state.configuration);
}

export function selectEntity(
  model: LoadedModel,
  state: ViewState,
  entityId: string | null,
): ViewState {
  if (entityId === null || !model.entities.has(entityId)) {
    return { ...state, selected: null, codeView: null };
  }
  const span = model.entities.get(entityId)!.span;
  return {
    ...state,
    selected: entityId,
    codeView: { file: span.file, start: span.start, end: span.end },
  };
}

/** Case-insensitive name search: exact, then prefix, then infix matches,
 * each group ordered by id. An empty query matches nothing. */
export function searchEntities(model: LoadedModel, query: string): string[] {
  if (!query) return [];
  const needle = query.toLowerCase();
  const exact: string[] = [];
  const prefix: string[] = [];
  const infix: string[] = [];
  const ids = [...model.entities.keys()].sort();
  for (const id of ids) {
    const name = model.entities.get(id)!.name.toLowerCase();
    if (name === needle) exact.push(id);
    else if (name.startsWith(needle)) prefix.push(id);
    else if (name.includes(needle)) infix.push(id);
  }
  return [...exact, ...prefix, ...infix];
}

/** Outgoing call/read/write relations of the selected entity that hold
 * under the current configuration. */
export function activeEdges(model: LoadedModel, state: ViewState): number[] {
  if (state.selected === null) return [];
  const out: number[] = [];
  model.doc.relations.forEach((relation, index) => {
    if (relation.kind === "Contains") return;
    if (relation.source !== state.selected) return;
    if (!relationIncluded(model, state, index)) return;
    out.push(index);
  });
  return out;
}
