// Shapes of the service JSON payloads. Field names mirror the wire format
// exactly; nothing here is recomputed on the client.

export interface SolvedSpec {
  annotators: number;
  annotators_floor: number;
  time: number;
  rate: number;
  samples: number;
  samples_floor: number;
  load: number;
  load_floor: number;
  double: number;
  re: number;
}

export interface AllocationEntry {
  single_ids: string[];
  double_ids: string[];
  reannotate_ids: string[];
}

export interface AllocationManifest {
  annotators: Record<string, AllocationEntry>;
  leftover_ids: string[];
  seed: number;
}

export interface GraphNode {
  intra: number | null;
  reliability: number;
}

export interface GraphEdge {
  a: string;
  b: string;
  agreement: number;
  overlap: number;
}

export interface GraphJson {
  nodes: Record<string, GraphNode>;
  edges: GraphEdge[];
}

export interface SceneNode {
  id: string;
  x: number;
  y: number;
  z: number;
  reliability: number;
  intra: number | null;
}

export interface SceneEdge {
  a: string;
  b: string;
  agreement: number;
  overlap: number;
}

export interface Scene3d {
  version: number;
  nodes: SceneNode[];
  edges: SceneEdge[];
}

export interface HeatmapMatrix {
  rows: string[];
  cols: string[];
  values: (number | null)[][];
}

export interface ReliabilityPayload {
  metric: string;
  alpha: number;
  overlap_threshold: number;
  iterations: number;
  converged: boolean;
  reliability: Record<string, number>;
  graph: GraphJson;
  outputs: string[];
  images?: Record<string, string>;
  scene3d?: Scene3d;
  heatmap_matrix?: HeatmapMatrix;
}

export interface ServiceError {
  error: string;
  detail: string;
  stuck_samples?: string[];
}

export const METRICS = [
  "krippendorff_nominal",
  "krippendorff_interval",
  "cohen_kappa",
  "fleiss_kappa",
  "cosine",
  "multi_krippendorff",
] as const;

export const GENERATORS = ["default", "effi", "topic", "ordinal"] as const;

export const RELIABILITY_OUTPUTS = [
  "reliability",
  "graph2d",
  "graph3d",
  "heatmap",
] as const;
