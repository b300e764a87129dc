/** Wire and document types mirroring the study service's JSON formats. */

export type Scalar = string | number | boolean;

export interface GraphNode {
  id: string;
  label?: string;
  attributes?: Record<string, Scalar>;
}

export interface GraphEdge {
  source: string;
  target: string;
  weight?: number;
  attributes?: Record<string, Scalar>;
}

export interface GraphGroup {
  id: string;
  label?: string;
  attributes?: Record<string, Scalar>;
}

export interface GraphDoc {
  nodes: GraphNode[];
  edges: GraphEdge[];
  groups: GraphGroup[];
  membership: Record<string, string>;
}

export interface RasterMeta {
  cell_size: number;
  reach: number;
  nx: number;
  ny: number;
}

export interface LayoutDoc {
  canvas: [number, number];
  seed: number;
  positions: Record<string, [number, number]>;
  raster?: RasterMeta;
  regions?: Record<string, number[]>;
}

export type AnswerKind =
  | "boolean"
  | "integer"
  | "group-id"
  | "group-id-set"
  | "group-id-list"
  | "node-id"
  | "pair";

/** A submitted answer as JSON. */
export type AnswerValue = boolean | number | string | string[];

export interface DescriptorDoc {
  mode: string;
  discover: boolean;
  search_kind: string;
  query_level: string;
  inputs: string;
  outputs: string;
  methods: string[];
}

export interface InstanceView {
  instance_id: string;
  template_id: string;
  category: string;
  prompt: string;
  answer_kind: AnswerKind;
  bound_parameters: Record<string, unknown>;
  stimulus_ref: Record<string, string>;
  descriptor: DescriptorDoc;
}

export interface SessionStart {
  session_id: string;
  study_id: string;
  participant_id: string;
  task_count: number;
  reveal_correctness: boolean;
  stimulus: { graph: GraphDoc; layout: LayoutDoc };
}

export interface NextResponse {
  done: boolean;
  cursor: number;
  of: number;
  instance?: InstanceView;
}

export interface AnswerResponse {
  accepted: boolean;
  cursor: number;
  done: boolean;
  correct?: boolean;
}
