import { describe, expect, it } from 'vitest';

import {
  applyPreset,
  buildEvaluateRequest,
  failRequest,
  finishRequest,
  initialState,
  setPolicyField,
  setReliability,
  startRequest,
  toggleEvidence,
  witnessRows,
} from '../src/state.js';
import type { CaseDescriptor, RunReport } from '../src/types.js';

import descriptorJson from '../fixtures/case_descriptor.json';
import reportsJson from '../fixtures/preset_reports.json';

const descriptor = descriptorJson as unknown as CaseDescriptor;
const reports = reportsJson as unknown as Record<string, RunReport>;

describe('initial state', () => {
  it('enables every evidence and copies defaults', () => {
    const state = initialState(descriptor);
    expect([...state.enabled].sort()).toEqual(descriptor.evidences.map((e) => e.tag));
    expect(state.reliability).toEqual(descriptor.witnesses);
    expect(state.policy).toEqual(descriptor.policy);
    expect(state.pending).toBe(false);
  });

  it('builds an all-on request with no overrides', () => {
    const body = buildEvaluateRequest(initialState(descriptor));
    expect(body).toEqual({
      enabled_tags: ['e1', 'e2', 'e3', 'e4', 'e5'],
      reliability_overrides: {},
      policy_overrides: {},
      explain: false,
    });
  });
});

describe('preset buttons', () => {
  it('produce request bodies identical to the stored presets', () => {
    for (const preset of descriptor.presets) {
      const state = applyPreset(initialState(descriptor), preset.id);
      expect(buildEvaluateRequest(state)).toEqual(preset.request);
    }
  });

  it('covers all four questions', () => {
    expect(descriptor.presets.map((p) => p.id)).toEqual(['Q1', 'Q2', 'Q3', 'Q4']);
  });

  it('Q3 visibly sets thenardier to lo before any evaluation', () => {
    const state = applyPreset(initialState(descriptor), 'Q3');
    expect(state.reliability['thenardier']).toBe('lo');
    const row = witnessRows(state).find((r) => r.name === 'thenardier');
    expect(row).toEqual({ name: 'thenardier', level: 'lo' });
    expect(state.lastReport).toBeNull();
  });

  it('a later preset resets earlier tweaks', () => {
    let state = initialState(descriptor);
    state = setReliability(state, 'fantine', 'lo');
    state = setPolicyField(state, 'min_evidence_count', 4);
    state = applyPreset(state, 'Q1');
    expect(buildEvaluateRequest(state)).toEqual(descriptor.presets[0]!.request);
  });

  it('unknown preset id is a no-op', () => {
    const state = initialState(descriptor);
    expect(applyPreset(state, 'Q9')).toBe(state);
  });
});

describe('toggles and overrides', () => {
  it('toggles stay within the descriptor tags', () => {
    let state = initialState(descriptor);
    state = toggleEvidence(state, 'e9', true);
    expect([...state.enabled].sort()).toEqual(['e1', 'e2', 'e3', 'e4', 'e5']);
    state = toggleEvidence(state, 'e4', false);
    expect(state.enabled.has('e4')).toBe(false);
    state = toggleEvidence(state, 'e4', true);
    expect(state.enabled.has('e4')).toBe(true);
  });

  it('request carries only deviations from the defaults', () => {
    let state = initialState(descriptor);
    state = toggleEvidence(state, 'e5', false);
    state = setReliability(state, 'thenardier', 'lo');
    state = setReliability(state, 'fantine', 'hi'); // unchanged from default
    state = setPolicyField(state, 'min_evidence_count', 0);
    state = setPolicyField(state, 'scene_window_minutes', descriptor.policy.scene_window_minutes);
    expect(buildEvaluateRequest(state)).toEqual({
      enabled_tags: ['e1', 'e2', 'e3', 'e4'],
      reliability_overrides: { thenardier: 'lo' },
      policy_overrides: { min_evidence_count: 0 },
      explain: false,
    });
  });

  it('unknown witnesses and policy keys are ignored', () => {
    const state = initialState(descriptor);
    expect(setReliability(state, 'ghost', 'lo')).toBe(state);
  });
});

describe('request lifecycle', () => {
  it('pending blocks double submission and clears on finish', () => {
    let state = startRequest(initialState(descriptor));
    expect(state.pending).toBe(true);
    state = finishRequest(state, reports['Q1']!);
    expect(state.pending).toBe(false);
    expect(state.lastReport).toBe(reports['Q1']);
  });

  it('field errors are kept for the view', () => {
    const errors = [{ field: 'enabled_tags.e9', message: 'unknown evidence tag' }];
    const state = failRequest(startRequest(initialState(descriptor)), errors);
    expect(state.pending).toBe(false);
    expect(state.fieldErrors).toEqual(errors);
  });
});
