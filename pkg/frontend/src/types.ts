// Wire formats of the epibarrier service, mirrored field for field.

export interface ModelJson {
  A_m: number;
  A_h: number;
  gamma: number;
  u_min: number;
  u_max: number;
}

export interface CapsJson {
  xbar1: number;
  xbar2: number;
}

export interface ScenarioJson {
  model: ModelJson;
  caps: CapsJson;
  run: { [key: string]: unknown };
}

export interface RegionJson {
  kind: "admissible" | "mrpi";
  case: string;
  vertices: [number, number][];
  barrier_range: [number, number] | null;
  area: number;
  closure: string;
}

export interface RegionsJson {
  case: string;
  admissible: RegionJson;
  mrpi: RegionJson;
  efficiency_ratio: number | null;
}

export interface BarrierSampleJson {
  s: number;
  x1: number;
  x2: number;
  lambda1: number;
  lambda2: number;
  u: number;
}

export interface BarrierJson {
  set_kind: string;
  tangent: { face: string; x1: number; x2: number };
  samples: BarrierSampleJson[];
}

export interface BarriersJson {
  admissible: BarrierJson | null;
  mrpi: BarrierJson | null;
}

export type AdviceAction =
  | "use_min"
  | "use_max"
  | "relax_caps_or_increase_fumigation";

export interface MembershipJson {
  status: string;
  distance: number;
}

export interface AdviceJson {
  action: AdviceAction;
  rationale: string;
  in_admissible: MembershipJson;
  in_mrpi: MembershipJson;
}

export interface StepResponse {
  state: [number, number];
  t: number;
  clamped: boolean;
  u_applied: number;
  violation: { t: number; face: string } | null;
  advice: AdviceJson;
}

export interface SessionCreated {
  id: string;
  state: [number, number];
  advice: AdviceJson;
}
