/** Live norm status pane: state badges and the currently activated values. */

import { clear, el } from './dom';
import type { NormsPayload } from './types';

export function renderNorms(container: HTMLElement, payload: NormsPayload | null): void {
  clear(container);
  container.append(el('h2', {}, ['Norms']));
  if (payload === null) {
    container.append(el('p', { class: 'muted' }, ['Loading…']));
    return;
  }
  const table = el('table', { class: 'norm-table', 'data-role': 'norms' });
  table.append(
    el('tr', {}, [el('th', {}, ['norm']), el('th', {}, ['state']), el('th', {}, ['violation'])]),
  );
  for (const normId of Object.keys(payload.norms).sort()) {
    const status = payload.norms[normId]!;
    const violation =
      status.state === 'active' && status.violation !== undefined ? String(status.violation) : '—';
    table.append(
      el('tr', { 'data-norm': normId, class: `norm-${status.state}` }, [
        el('td', {}, [normId]),
        el('td', { 'data-role': 'state' }, [status.state]),
        el('td', { 'data-role': 'violation', 'data-score': '' }, [violation]),
      ]),
    );
  }
  container.append(table);
  container.append(
    el('p', { class: 'activated-values' }, [
      'Activated values: ',
      el('span', { 'data-role': 'activated-values' }, [
        payload.activated_values.length ? payload.activated_values.join(', ') : 'none',
      ]),
    ]),
  );
}
