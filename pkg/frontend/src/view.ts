/**
 * DOM rendering.  The whole console re-renders from state on every change;
 * the state is a handful of toggles, so diffing would be overkill.
 */

import type { ConsoleState } from './state.js';
import { verdictBanner, witnessRows } from './state.js';
import type { FieldError, PolicyKey, ProofNode, RunReport } from './types.js';

export interface Handlers {
  onToggle(tag: string, on: boolean): void;
  onReliability(witness: string, level: string): void;
  onPolicy(key: PolicyKey, value: number | boolean): void;
  onPreset(id: string): void;
  onExplain(on: boolean): void;
  onAdjudicate(): void;
  onRetry(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Array<Node | string>
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function errorsFor(errors: FieldError[], prefix: string): HTMLElement | null {
  const matching = errors.filter((e) => e.field === prefix || e.field.startsWith(`${prefix}.`));
  if (!matching.length) {
    return null;
  }
  return el(
    'ul',
    { class: 'field-errors' },
    ...matching.map((e) => el('li', {}, `${e.field}: ${e.message}`)),
  );
}

export function render(root: HTMLElement, state: ConsoleState, handlers: Handlers): void {
  root.replaceChildren(
    renderHeader(state),
    state.connectionError ? renderConnectionBanner(state, handlers) : '',
    el(
      'div',
      { class: 'layout' },
      renderControls(state, handlers),
      renderResults(state),
    ),
  );
}

function renderHeader(state: ConsoleState): HTMLElement {
  const { descriptor } = state;
  return el(
    'header',
    {},
    el('h1', {}, `What-if console: ${descriptor.case_id}`),
    el('p', { class: 'subtitle' },
      descriptor.suspect ? `Suspect on trial: ${descriptor.suspect}` : 'No suspect declared'),
  );
}

function renderConnectionBanner(state: ConsoleState, handlers: Handlers): HTMLElement {
  const retry = el('button', { type: 'button' }, 'Retry');
  retry.addEventListener('click', () => handlers.onRetry());
  return el(
    'div',
    { class: 'banner banner-error', role: 'alert' },
    `Connection problem: ${state.connectionError ?? ''} `,
    retry,
  );
}

function renderControls(state: ConsoleState, handlers: Handlers): HTMLElement {
  const adjudicate = el(
    'button',
    { type: 'button', class: 'adjudicate', id: 'adjudicate' },
    state.pending ? 'Adjudicating…' : 'Adjudicate',
  ) as HTMLButtonElement;
  adjudicate.disabled = state.pending;
  adjudicate.addEventListener('click', () => handlers.onAdjudicate());

  const explain = el('input', { type: 'checkbox', id: 'explain' }) as HTMLInputElement;
  explain.checked = state.explain;
  explain.addEventListener('change', () => handlers.onExplain(explain.checked));

  return el(
    'section',
    { class: 'controls' },
    renderPresets(state, handlers),
    renderEvidences(state, handlers),
    renderWitnesses(state, handlers),
    renderPolicy(state, handlers),
    el(
      'div',
      { class: 'actions' },
      el('label', { for: 'explain' }, explain, ' show proof tree'),
      adjudicate,
    ),
  );
}

function renderPresets(state: ConsoleState, handlers: Handlers): HTMLElement {
  const buttons = state.descriptor.presets.map((preset) => {
    const button = el(
      'button',
      { type: 'button', class: 'preset', 'data-preset': preset.id },
      preset.id,
    ) as HTMLButtonElement;
    button.disabled = state.pending;
    button.title = `Expected outcome: ${preset.expected}`;
    button.addEventListener('click', () => handlers.onPreset(preset.id));
    return button;
  });
  return el(
    'fieldset',
    { class: 'presets' },
    el('legend', {}, 'Preset questions'),
    ...(buttons.length ? buttons : [el('p', {}, 'This case stores no presets.')]),
  );
}

function renderEvidences(state: ConsoleState, handlers: Handlers): HTMLElement {
  const { evidences } = state.descriptor;
  if (!evidences.length) {
    return el(
      'fieldset',
      { class: 'evidences' },
      el('legend', {}, 'Evidences'),
      el('p', { class: 'notice' }, 'This case has no toggleable evidence.'),
    );
  }
  const rows = evidences.map((evidence) => {
    const box = el('input', {
      type: 'checkbox',
      id: `evidence-${evidence.tag}`,
      'data-tag': evidence.tag,
    }) as HTMLInputElement;
    box.checked = state.enabled.has(evidence.tag);
    box.addEventListener('change', () => handlers.onToggle(evidence.tag, box.checked));
    return el(
      'label',
      { class: 'evidence-row', for: `evidence-${evidence.tag}` },
      box,
      el('span', { class: 'tag' }, evidence.tag),
      el('span', { class: 'summary' }, evidence.summary),
    );
  });
  return el(
    'fieldset',
    { class: 'evidences' },
    el('legend', {}, 'Evidences'),
    ...rows,
    errorsFor(state.fieldErrors, 'enabled_tags') ?? '',
  );
}

function renderWitnesses(state: ConsoleState, handlers: Handlers): HTMLElement {
  const rows = witnessRows(state).map(({ name, level }) => {
    const select = el('select', { 'data-witness': name, id: `witness-${name}` }) as HTMLSelectElement;
    for (const option of ['hi', 'lo']) {
      select.append(el('option', { value: option }, option));
    }
    select.value = level;
    select.addEventListener('change', () => handlers.onReliability(name, select.value));
    return el(
      'label',
      { class: 'witness-row', for: `witness-${name}` },
      el('span', { class: 'witness-name' }, name),
      select,
    );
  });
  return el(
    'fieldset',
    { class: 'witnesses' },
    el('legend', {}, 'Witness reliability'),
    ...rows,
    errorsFor(state.fieldErrors, 'reliability_overrides') ?? '',
  );
}

const NUMERIC_POLICY_KEYS: PolicyKey[] = [
  'min_evidence_count',
  'colocation_window_minutes',
  'scene_window_minutes',
  'corroboration_threshold_pct',
];

function renderPolicy(state: ConsoleState, handlers: Handlers): HTMLElement {
  const rows: HTMLElement[] = NUMERIC_POLICY_KEYS.map((key) => {
    const input = el('input', {
      type: 'number',
      min: '0',
      id: `policy-${key}`,
      value: String(state.policy[key]),
    }) as HTMLInputElement;
    input.addEventListener('change', () => {
      const parsed = Number.parseInt(input.value, 10);
      if (!Number.isNaN(parsed)) {
        handlers.onPolicy(key, parsed);
      }
    });
    return el(
      'label',
      { class: 'policy-row', for: `policy-${key}` },
      el('span', {}, key.replace(/_/g, ' ')),
      input,
    );
  });
  const strict = el('input', {
    type: 'checkbox',
    id: 'policy-require_severe_precise',
  }) as HTMLInputElement;
  strict.checked = state.policy.require_severe_precise;
  strict.addEventListener('change', () =>
    handlers.onPolicy('require_severe_precise', strict.checked),
  );
  rows.push(
    el(
      'label',
      { class: 'policy-row', for: 'policy-require_severe_precise' },
      el('span', {}, 'require a severe and precise evidence'),
      strict,
    ),
  );
  return el(
    'fieldset',
    { class: 'policy' },
    el('legend', {}, 'Policy (art. 192 thresholds)'),
    ...rows,
    errorsFor(state.fieldErrors, 'policy_overrides') ?? '',
  );
}

function renderResults(state: ConsoleState): HTMLElement {
  const report = state.lastReport;
  if (!report) {
    return el(
      'section',
      { class: 'results' },
      el('p', { class: 'notice' }, 'Set up a scenario and press Adjudicate.'),
    );
  }
  return el(
    'section',
    { class: 'results' },
    renderBanner(report),
    renderEvidenceTable(report),
    report.proof ? renderProof(report.proof) : '',
    el('p', { class: 'timing' }, `evaluated in ${report.timings_ms.toFixed(1)} ms`),
  );
}

function renderBanner(report: RunReport): HTMLElement {
  const banner = verdictBanner(report);
  return el(
    'div',
    { class: `banner verdict-${banner.verdict}`, id: 'verdict-banner' },
    el('strong', {}, banner.verdict),
    banner.ground ? el('p', { class: 'ground' }, banner.ground) : '',
  );
}

function renderEvidenceTable(report: RunReport): HTMLElement {
  if (!report.evidences.length) {
    return el('p', { class: 'notice' }, 'No identity evidence could be derived.');
  }
  const header = el(
    'tr',
    {},
    el('th', {}, 'evidence'),
    el('th', {}, 'severity'),
    el('th', {}, 'precision'),
    el('th', {}, 'from'),
  );
  const rows = report.evidences.map((row) =>
    el(
      'tr',
      {},
      el('td', { class: 'descriptor' }, row.descriptor),
      el('td', {}, el('span', { class: `badge badge-${row.severity}` }, row.severity)),
      el('td', {}, el('span', { class: `badge badge-${row.precision}` }, row.precision)),
      el('td', {}, row.supporting_tags.join(', ')),
    ),
  );
  return el('table', { class: 'evidence-table' }, header, ...rows);
}

function renderProof(node: ProofNode): HTMLElement {
  const summary = el(
    'summary',
    {},
    el('code', {}, node.goal),
    el('span', { class: 'justification' }, ` ${node.justification}`),
  );
  const details = el('details', { class: 'proof-node', open: '' }, summary);
  for (const child of node.children) {
    details.append(renderProof(child));
  }
  return details;
}
