/** Bootstrap: fetch the case, wire handlers, keep one in-flight request. */

import { ApiError, fetchDescriptor, postEvaluate } from './api.js';
import {
  applyPreset,
  buildEvaluateRequest,
  failRequest,
  finishRequest,
  initialState,
  loseConnection,
  setExplain,
  setPolicyField,
  setReliability,
  startRequest,
  toggleEvidence,
  type ConsoleState,
} from './state.js';
import { render, type Handlers } from './view.js';

function start(root: HTMLElement): void {
  let state: ConsoleState | null = null;

  const update = (next: ConsoleState): void => {
    state = next;
    render(root, state, handlers);
  };

  const adjudicate = async (): Promise<void> => {
    if (!state || state.pending) {
      return;
    }
    const body = buildEvaluateRequest(state);
    update(startRequest(state));
    try {
      const report = await postEvaluate(body);
      update(finishRequest(state!, report));
    } catch (err) {
      if (err instanceof ApiError) {
        update(failRequest(state!, err.fieldErrors));
      } else {
        update(loseConnection(state!, err instanceof Error ? err.message : String(err)));
      }
    }
  };

  const boot = async (): Promise<void> => {
    root.replaceChildren('Loading case…');
    try {
      update(initialState(await fetchDescriptor()));
    } catch (err) {
      const banner = document.createElement('div');
      banner.className = 'banner banner-error';
      banner.textContent = `Could not load the case: ${
        err instanceof Error ? err.message : String(err)}`;
      const retry = document.createElement('button');
      retry.textContent = 'Retry';
      retry.addEventListener('click', () => void boot());
      banner.append(' ', retry);
      root.replaceChildren(banner);
    }
  };

  const handlers: Handlers = {
    onToggle: (tag, on) => state && update(toggleEvidence(state, tag, on)),
    onReliability: (witness, level) => state && update(setReliability(state, witness, level)),
    onPolicy: (key, value) => state && update(setPolicyField(state, key, value)),
    onPreset: (id) => state && update(applyPreset(state, id)),
    onExplain: (on) => state && update(setExplain(state, on)),
    onAdjudicate: () => void adjudicate(),
    onRetry: () => void boot(),
  };

  void boot();
}

const root = document.getElementById('app');
if (root) {
  start(root);
}
