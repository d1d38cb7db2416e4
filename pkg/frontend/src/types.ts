/** Document shapes served by the analysis backend. */

export interface SpanDoc {
  file: string;
  start: number;
  end: number;
}

export interface EntityDoc {
  id: string;
  kind: string;
  name: string;
  pc: string;
  span: SpanDoc;
  loc: number | null;
  parent: string | null;
}

export interface RelationDoc {
  kind: string;
  source: string;
  target: string;
  pc: string;
  sites: [string, number][];
}

export interface DiagnosticDoc {
  severity: string;
  code: string;
  message: string;
  file: string | null;
  line: number | null;
}

export interface ModelDoc {
  schema_version: number;
  meta: Record<string, unknown>;
  features: string[];
  entities: EntityDoc[];
  relations: RelationDoc[];
  diagnostics: DiagnosticDoc[];
}

export interface DiskDoc {
  entity_id: string;
  center: [number, number];
  radius: number;
  ring_inner: number;
  ring_outer: number;
  color_class: string;
  children: DiskDoc[];
}

export interface SegmentDoc {
  disk: string;
  entity_id: string;
  start_angle: number;
  end_angle: number;
  inner_radius: number;
  outer_radius: number;
  color_class: string;
  area: number;
}

export interface LayoutDoc {
  schema_version: number;
  scale_k: number;
  disks: DiskDoc[];
  segments: SegmentDoc[];
}
