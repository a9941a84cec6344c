/**
 * Thin typed client over the JSON API. Writes carry the expected-revision
 * header; a stale write surfaces as ApiError with status 409.
 */

import type {
  AnswerPost,
  ItemsPayload,
  NormsPayload,
  Presence,
  QuestionsPayload,
  ReportBundle,
  SessionInfo,
  WhatIfPayload,
} from './types';

export const EXPECTED_REVISION_HEADER = 'X-Expected-Revision';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function toError(response: Response): Promise<ApiError> {
  let code = 'error';
  let message = `${response.status}`;
  try {
    const body = await response.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, code, message);
}

export class RainApi {
  constructor(private baseUrl = '') {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      throw await toError(response);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown, expectedRevision?: number): Promise<T> {
    const headers: Record<string, string> = { 'Content-Type': 'application/json' };
    if (expectedRevision !== undefined) {
      headers[EXPECTED_REVISION_HEADER] = String(expectedRevision);
    }
    return this.request<T>(path, { method: 'POST', headers, body: JSON.stringify(body) });
  }

  graphs(): Promise<{ graphs: string[] }> {
    return this.request('/graphs');
  }

  createSession(graph: string, session?: string): Promise<SessionInfo> {
    return this.post('/sessions', session ? { graph, session } : { graph });
  }

  sessionInfo(session: string): Promise<SessionInfo> {
    return this.request(`/sessions/${session}`);
  }

  questions(session: string): Promise<QuestionsPayload> {
    return this.request(`/sessions/${session}/questions`);
  }

  assertContext(
    session: string,
    assertions: Record<string, Presence>,
    expectedRevision: number,
  ): Promise<{ revision: number }> {
    return this.post(`/sessions/${session}/context`, { assertions }, expectedRevision);
  }

  norms(session: string): Promise<NormsPayload> {
    return this.request(`/sessions/${session}/norms`);
  }

  items(session: string): Promise<ItemsPayload> {
    return this.request(`/sessions/${session}/items`);
  }

  recordAnswers(
    session: string,
    answers: AnswerPost[],
    expectedRevision: number,
  ): Promise<{ revision: number }> {
    return this.post(`/sessions/${session}/answers`, { answers }, expectedRevision);
  }

  report(session: string, projections: string[] = []): Promise<ReportBundle> {
    const query = projections.map((p) => `projection=${encodeURIComponent(p)}`).join('&');
    return this.request(`/sessions/${session}/report${query ? `?${query}` : ''}`);
  }

  whatIf(
    session: string,
    overrides: Record<string, Presence>,
    projections: string[] = [],
  ): Promise<WhatIfPayload> {
    return this.post(`/sessions/${session}/whatif`, { overrides, projections });
  }

  projections(): Promise<{ projections: string[] }> {
    return this.request('/projections');
  }
}
