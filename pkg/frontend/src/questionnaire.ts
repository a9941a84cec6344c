/**
 * Dynamic questionnaire pane: shows the server's next questions in server
 * order; each answer posts a context assertion and the app refreshes the
 * panes in place.
 */

import { clear, el } from './dom';
import type { Presence, QuestionsPayload } from './types';

export interface QuestionnaireHandlers {
  onAnswer(entity: string, presence: Presence): void;
}

export function renderQuestionnaire(
  container: HTMLElement,
  payload: QuestionsPayload | null,
  handlers: QuestionnaireHandlers,
): void {
  clear(container);
  container.append(el('h2', {}, ['Context questions']));
  if (payload === null) {
    container.append(el('p', { class: 'muted' }, ['Loading…']));
    return;
  }
  if (payload.questions.length === 0) {
    container.append(
      el('p', { class: 'questionnaire-complete', 'data-role': 'complete' }, [
        'All context questions answered — every norm is decided.',
      ]),
    );
    return;
  }
  const list = el('ol', { class: 'question-list', 'data-role': 'questions' });
  for (const question of payload.questions) {
    const yes = el('button', { 'data-role': 'answer-present', type: 'button' }, ['Yes']);
    const no = el('button', { 'data-role': 'answer-absent', type: 'button' }, ['No']);
    yes.addEventListener('click', () => handlers.onAnswer(question.entity, 'present'));
    no.addEventListener('click', () => handlers.onAnswer(question.entity, 'absent'));
    list.append(
      el('li', { class: 'question', 'data-entity': question.entity }, [
        el('span', { class: 'question-kind' }, [question.kind]),
        el('span', { class: 'question-text' }, [question.question]),
        el('span', { class: 'question-gates muted' }, [
          `decides ${question.gated_norms} norm${question.gated_norms === 1 ? '' : 's'}`,
        ]),
        yes,
        no,
      ]),
    );
  }
  container.append(list);
}
