/**
 * Assessment item forms: the unanswered criteria of active norms. Quiz and
 * evidence items take pass/fail from the assessor; monitor items record a
 * result supplied by an external monitor, through the same path.
 */

import { clear, el } from './dom';
import type { AssessmentItem, ItemsPayload } from './types';

export interface ItemHandlers {
  onAnswer(item: AssessmentItem, outcome: 'pass' | 'fail', evidence?: string): void;
}

const FAIL_HINTS: Record<AssessmentItem['fail_on'], string> = {
  yes: 'a yes fails this criterion',
  no: 'a no fails this criterion',
  absent: 'missing evidence fails this criterion',
};

export function renderItems(
  container: HTMLElement,
  payload: ItemsPayload | null,
  handlers: ItemHandlers,
): void {
  clear(container);
  container.append(el('h2', {}, ['Assessment items']));
  if (payload === null) {
    container.append(el('p', { class: 'muted' }, ['Loading…']));
    return;
  }
  if (payload.items.length === 0) {
    container.append(
      el('p', { 'data-role': 'items-complete' }, ['No open assessment items.']),
    );
    return;
  }
  const list = el('ul', { class: 'item-list', 'data-role': 'items' });
  for (const item of payload.items) {
    const pass = el('button', { type: 'button', 'data-role': 'item-pass' }, ['Pass']);
    const fail = el('button', { type: 'button', 'data-role': 'item-fail' }, ['Fail']);
    const evidence = el('input', {
      type: 'text',
      placeholder: item.kind === 'evidence' ? 'evidence reference' : 'note (optional)',
      'data-role': 'item-evidence',
    });
    pass.addEventListener('click', () => handlers.onAnswer(item, 'pass', evidence.value || undefined));
    fail.addEventListener('click', () => handlers.onAnswer(item, 'fail', evidence.value || undefined));
    const badges: (Node | string)[] = [
      el('span', { class: 'item-norm' }, [`${item.norm} · level ${item.level}`]),
      el('span', { class: `item-kind kind-${item.kind}` }, [item.kind]),
    ];
    if (item.kind === 'monitor') {
      badges.push(el('span', { class: 'muted' }, ['external monitor result']));
    }
    list.append(
      el('li', { class: 'item', 'data-norm': item.norm, 'data-level': String(item.level) }, [
        el('div', { class: 'item-head' }, badges),
        el('p', { class: 'item-prompt' }, [item.prompt]),
        el('p', { class: 'muted' }, [FAIL_HINTS[item.fail_on]]),
        evidence,
        pass,
        fail,
      ]),
    );
  }
  container.append(list);
}
