/**
 * Application wiring. Mutations post to the API and then re-poll the
 * affected resources; panes re-render in place, never via a page reload.
 * A 409 means another writer moved the session: a banner says so and the
 * local view is left exactly as it was.
 */

import { ApiError, RainApi } from './api';
import { clear, el } from './dom';
import { renderItems } from './items';
import { renderNorms } from './norms';
import { renderQuestionnaire } from './questionnaire';
import { renderReport } from './report';
import { createStore, type SessionView, type Store } from './store';
import type { AssessmentItem, Presence } from './types';
import { renderWhatIf } from './whatif';

export const CONFLICT_BANNER = 'session changed elsewhere — reload';

export interface App {
  store: Store;
  openSession(graph: string, session?: string): Promise<void>;
  resumeSession(session: string): Promise<void>;
  refresh(): Promise<void>;
  answerQuestion(entity: string, presence: Presence): Promise<void>;
  answerItem(item: AssessmentItem, outcome: 'pass' | 'fail', evidence?: string): Promise<void>;
  setOverride(entity: string, presence: Presence | null): void;
  runWhatIf(): Promise<void>;
}

export function createApp(root: HTMLElement, api: RainApi, projections: string[] = []): App {
  const store = createStore();

  clear(root);
  const banner = el('div', { class: 'banner', 'data-role': 'banner', hidden: '' });
  const setup = el('section', { class: 'setup pane' });
  const questionnairePane = el('section', { class: 'pane', 'data-pane': 'questionnaire' });
  const normsPane = el('section', { class: 'pane', 'data-pane': 'norms' });
  const itemsPane = el('section', { class: 'pane', 'data-pane': 'items' });
  const reportPane = el('section', { class: 'pane', 'data-pane': 'report' });
  const whatIfPane = el('section', { class: 'pane', 'data-pane': 'whatif' });
  root.append(banner, setup, questionnairePane, normsPane, itemsPane, reportPane, whatIfPane);

  const graphInput = el('input', { placeholder: 'graph id', 'data-role': 'graph-id' }) as HTMLInputElement;
  const sessionInput = el('input', {
    placeholder: 'session id (blank = new)',
    'data-role': 'session-id',
  }) as HTMLInputElement;
  const openButton = el('button', { type: 'button', 'data-role': 'open-session' }, ['Start assessment']);
  const sessionLabel = el('span', { class: 'muted', 'data-role': 'session-label' }, ['no session']);
  setup.append(el('h1', {}, ['rain assessor']), graphInput, sessionInput, openButton, sessionLabel);

  function showBanner(message: string | null) {
    store.set({ banner: message });
  }

  async function guard<T>(work: () => Promise<T>): Promise<T | undefined> {
    try {
      return await work();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        showBanner(CONFLICT_BANNER);
      } else if (error instanceof ApiError) {
        showBanner(`${error.code}: ${error.message}`);
      } else {
        showBanner(String(error));
      }
      return undefined;
    }
  }

  async function refresh(): Promise<void> {
    const current = store.get().session;
    if (!current) return;
    await guard(async () => {
      const [info, questions, norms, items, report] = await Promise.all([
        api.sessionInfo(current.session),
        api.questions(current.session),
        api.norms(current.session),
        api.items(current.session),
        api.report(current.session, projections),
      ]);
      store.set({ session: info, questions, norms, items, report, banner: null });
    });
  }

  const app: App = {
    store,

    async openSession(graph: string, session?: string) {
      await guard(async () => {
        const info = await api.createSession(graph, session);
        store.set({ session: info, whatIfOverrides: {}, whatIfComparison: null, banner: null });
      });
      await refresh();
    },

    async resumeSession(session: string) {
      await guard(async () => {
        const info = await api.sessionInfo(session);
        store.set({ session: info, whatIfOverrides: {}, whatIfComparison: null, banner: null });
      });
      await refresh();
    },

    refresh,

    async answerQuestion(entity: string, presence: Presence) {
      const current = store.get().session;
      if (!current) return;
      const posted = await guard(() =>
        api.assertContext(current.session, { [entity]: presence }, current.revision),
      );
      if (posted !== undefined) {
        await refresh();
      }
    },

    async answerItem(item: AssessmentItem, outcome: 'pass' | 'fail', evidence?: string) {
      const current = store.get().session;
      if (!current) return;
      const posted = await guard(() =>
        api.recordAnswers(
          current.session,
          [{ norm: item.norm, level: item.level, outcome, evidence }],
          current.revision,
        ),
      );
      if (posted !== undefined) {
        await refresh();
      }
    },

    setOverride(entity: string, presence: Presence | null) {
      const overrides = { ...store.get().whatIfOverrides };
      if (presence === null) {
        delete overrides[entity];
      } else {
        overrides[entity] = presence;
      }
      store.set({ whatIfOverrides: overrides });
    },

    async runWhatIf() {
      const current = store.get().session;
      if (!current) return;
      await guard(async () => {
        const comparison = await api.whatIf(current.session, store.get().whatIfOverrides, projections);
        store.set({ whatIfComparison: comparison, banner: null });
      });
    },
  };

  openButton.addEventListener('click', () => {
    const graph = graphInput.value.trim();
    const session = sessionInput.value.trim();
    if (!graph && session) {
      void app.resumeSession(session);
    } else if (graph) {
      void app.openSession(graph, session || undefined);
    }
  });

  function render(view: SessionView) {
    if (view.banner) {
      banner.removeAttribute('hidden');
      banner.textContent = view.banner;
    } else {
      banner.setAttribute('hidden', '');
      banner.textContent = '';
    }
    sessionLabel.textContent = view.session
      ? `session ${view.session.session} · graph ${view.session.graph} r${view.session.graph_revision} · revision ${view.session.revision}`
      : 'no session';
    renderQuestionnaire(questionnairePane, view.questions, {
      onAnswer: (entity, presence) => void app.answerQuestion(entity, presence),
    });
    renderNorms(normsPane, view.norms);
    renderItems(itemsPane, view.items, {
      onAnswer: (item, outcome, evidence) => void app.answerItem(item, outcome, evidence),
    });
    renderReport(reportPane, view.report);
    renderWhatIf(whatIfPane, view.report, view.whatIfOverrides, view.whatIfComparison, {
      onToggle: (entity, presence) => app.setOverride(entity, presence),
      onRun: () => void app.runWhatIf(),
    });
  }

  store.subscribe(render);
  render(store.get());
  return app;
}
