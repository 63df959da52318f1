/**
 * Console state and the pure transitions the controls drive.
 *
 * Everything here is side-effect free so the preset/request behaviour can
 * be tested against the recorded service fixtures.  The one structural
 * invariant: enabled toggles are always a subset of the descriptor's tags,
 * and witness/policy edits only touch declared witnesses and known keys.
 */

import type {
  CaseDescriptor,
  EvaluateRequest,
  FieldError,
  PolicyKey,
  PolicySettings,
  RunReport,
} from './types.js';

export interface ConsoleState {
  descriptor: CaseDescriptor;
  enabled: ReadonlySet<string>;
  reliability: Record<string, string>;
  policy: PolicySettings;
  explain: boolean;
  pending: boolean;
  lastReport: RunReport | null;
  fieldErrors: FieldError[];
  connectionError: string | null;
}

export function initialState(descriptor: CaseDescriptor): ConsoleState {
  return {
    descriptor,
    enabled: new Set(descriptor.evidences.map((e) => e.tag)),
    reliability: { ...descriptor.witnesses },
    policy: { ...descriptor.policy },
    explain: false,
    pending: false,
    lastReport: null,
    fieldErrors: [],
    connectionError: null,
  };
}

export function toggleEvidence(state: ConsoleState, tag: string, on: boolean): ConsoleState {
  if (!state.descriptor.evidences.some((e) => e.tag === tag)) {
    return state;
  }
  const enabled = new Set(state.enabled);
  if (on) {
    enabled.add(tag);
  } else {
    enabled.delete(tag);
  }
  return { ...state, enabled };
}

export function setReliability(state: ConsoleState, witness: string, level: string): ConsoleState {
  if (!(witness in state.descriptor.witnesses)) {
    return state;
  }
  return { ...state, reliability: { ...state.reliability, [witness]: level } };
}

export function setPolicyField(
  state: ConsoleState,
  key: PolicyKey,
  value: number | boolean,
): ConsoleState {
  if (!(key in state.descriptor.policy)) {
    return state;
  }
  return { ...state, policy: { ...state.policy, [key]: value } };
}

export function setExplain(state: ConsoleState, on: boolean): ConsoleState {
  return { ...state, explain: on };
}

/** Reset every control to the stored preset's scenario. */
export function applyPreset(state: ConsoleState, presetId: string): ConsoleState {
  const preset = state.descriptor.presets.find((p) => p.id === presetId);
  if (!preset) {
    return state;
  }
  const known = new Set(state.descriptor.evidences.map((e) => e.tag));
  const next = initialState(state.descriptor);
  const request = preset.request;
  return {
    ...next,
    lastReport: state.lastReport,
    enabled: new Set(request.enabled_tags.filter((t) => known.has(t))),
    reliability: { ...state.descriptor.witnesses, ...request.reliability_overrides },
    policy: { ...state.descriptor.policy, ...(request.policy_overrides as Partial<PolicySettings>) },
    explain: request.explain,
  };
}

/**
 * The request body the Adjudicate action posts.  Only deviations from the
 * descriptor's defaults become overrides, so a freshly applied preset
 * produces a body identical to the stored one.
 */
export function buildEvaluateRequest(state: ConsoleState): EvaluateRequest {
  const reliability: Record<string, string> = {};
  for (const witness of Object.keys(state.descriptor.witnesses).sort()) {
    const level = state.reliability[witness];
    if (level !== undefined && level !== state.descriptor.witnesses[witness]) {
      reliability[witness] = level;
    }
  }
  const policy: EvaluateRequest['policy_overrides'] = {};
  for (const key of Object.keys(state.descriptor.policy).sort() as PolicyKey[]) {
    if (state.policy[key] !== state.descriptor.policy[key]) {
      policy[key] = state.policy[key];
    }
  }
  return {
    enabled_tags: [...state.enabled].sort(),
    reliability_overrides: reliability,
    policy_overrides: policy,
    explain: state.explain,
  };
}

export function startRequest(state: ConsoleState): ConsoleState {
  return { ...state, pending: true, fieldErrors: [], connectionError: null };
}

export function finishRequest(state: ConsoleState, report: RunReport): ConsoleState {
  return { ...state, pending: false, lastReport: report };
}

export function failRequest(state: ConsoleState, errors: FieldError[]): ConsoleState {
  return { ...state, pending: false, fieldErrors: errors };
}

export function loseConnection(state: ConsoleState, message: string): ConsoleState {
  return { ...state, pending: false, connectionError: message };
}

/** What the banner shows: the service's verdict and ground, untransformed. */
export function verdictBanner(report: RunReport): { verdict: string; ground: string | null } {
  return { verdict: report.verdict, ground: report.ground };
}

/** Witness rows as the reliability selectors display them. */
export function witnessRows(state: ConsoleState): Array<{ name: string; level: string }> {
  return Object.keys(state.descriptor.witnesses)
    .sort()
    .map((name) => ({ name, level: state.reliability[name] ?? 'hi' }));
}
