/**
 * Client-side mirror of server state. It holds server payloads verbatim and
 * never derives a score from them; panels render what the server said.
 */

import type {
  ItemsPayload,
  NormsPayload,
  Presence,
  QuestionsPayload,
  ReportBundle,
  SessionInfo,
  WhatIfPayload,
} from './types';

export interface SessionView {
  session: SessionInfo | null;
  questions: QuestionsPayload | null;
  norms: NormsPayload | null;
  items: ItemsPayload | null;
  report: ReportBundle | null;
  whatIfOverrides: Record<string, Presence>;
  whatIfComparison: WhatIfPayload | null;
  banner: string | null;
}

export const emptyView = (): SessionView => ({
  session: null,
  questions: null,
  norms: null,
  items: null,
  report: null,
  whatIfOverrides: {},
  whatIfComparison: null,
  banner: null,
});

export interface Store {
  get(): SessionView;
  set(patch: Partial<SessionView>): void;
  subscribe(listener: (view: SessionView) => void): () => void;
}

export function createStore(initial: SessionView = emptyView()): Store {
  let view = initial;
  const listeners = new Set<(view: SessionView) => void>();
  return {
    get: () => view,
    set(patch) {
      view = { ...view, ...patch };
      for (const listener of listeners) listener(view);
    },
    subscribe(listener) {
      listeners.add(listener);
      return () => listeners.delete(listener);
    },
  };
}
