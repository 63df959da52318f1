/** Thin fetch wrapper over the evaluation service. */

import type { CaseDescriptor, EvaluateRequest, FieldError, RunReport } from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly fieldErrors: FieldError[],
  ) {
    super(`request failed with status ${status}`);
  }
}

async function parseFieldErrors(res: Response): Promise<FieldError[]> {
  try {
    const body = (await res.json()) as { detail?: unknown };
    if (Array.isArray(body.detail)) {
      return body.detail.filter(
        (d): d is FieldError => typeof d === 'object' && d !== null && 'field' in d,
      );
    }
    return [{ field: 'request', message: String(body.detail ?? res.statusText) }];
  } catch {
    return [{ field: 'request', message: res.statusText }];
  }
}

export async function fetchDescriptor(base = ''): Promise<CaseDescriptor> {
  const res = await fetch(`${base}/api/case`);
  if (!res.ok) {
    throw new ApiError(res.status, await parseFieldErrors(res));
  }
  return (await res.json()) as CaseDescriptor;
}

export async function postEvaluate(body: EvaluateRequest, base = ''): Promise<RunReport> {
  const res = await fetch(`${base}/api/evaluate`, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify(body),
  });
  if (!res.ok) {
    throw new ApiError(res.status, await parseFieldErrors(res));
  }
  return (await res.json()) as RunReport;
}
