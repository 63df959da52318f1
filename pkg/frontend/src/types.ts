/**
 * Types mirroring the evaluation service's JSON contract.
 * The console never interprets legal semantics itself: everything shown
 * comes verbatim from these payloads.
 */

export type ReliabilityLevel = 'hi' | 'lo';

export interface PolicySettings {
  min_evidence_count: number;
  require_severe_precise: boolean;
  colocation_window_minutes: number;
  scene_window_minutes: number;
  corroboration_threshold_pct: number;
}

export type PolicyKey = keyof PolicySettings;

export interface EvidenceEntry {
  tag: string;
  summary: string;
  witnesses: string[];
}

export interface EvaluateRequest {
  enabled_tags: string[];
  reliability_overrides: Record<string, string>;
  policy_overrides: Partial<Record<PolicyKey, number | boolean>>;
  explain: boolean;
}

export interface Preset {
  id: string;
  expected: string;
  request: EvaluateRequest;
}

export interface CaseDescriptor {
  case_id: string;
  suspect: string | null;
  evidences: EvidenceEntry[];
  witnesses: Record<string, string>;
  policy: PolicySettings;
  presets: Preset[];
}

export interface AssessmentRow {
  descriptor: string;
  severity: string;
  precision: string;
  supporting_tags: string[];
}

export interface ProofNode {
  goal: string;
  justification: string;
  children: ProofNode[];
}

export interface ScenarioEcho {
  case: string;
  suspect: string;
  enabled_tags: string[];
  reliability_overrides: Record<string, string>;
  explain: boolean;
}

export interface RunReport {
  verdict: string;
  ground: string | null;
  evidences: AssessmentRow[];
  proof: ProofNode | null;
  policy: PolicySettings;
  scenario: ScenarioEcho;
  timings_ms: number;
}

export interface FieldError {
  field: string;
  message: string;
}
