/**
 * What-if exploration: toggle feature/stakeholder presences, ask the server
 * for the hypothetical bundle, and show current vs hypothetical maturity
 * side by side. Toggles never touch the session; both columns are server
 * numbers, improvement styling is only a comparison of the two.
 */

import { clear, el, scoreCell } from './dom';
import type { GroupReport, Presence, ReportBundle, WhatIfPayload } from './types';

export interface WhatIfHandlers {
  onToggle(entity: string, presence: Presence | null): void;
  onRun(): void;
}

function comparisonRows(
  dimension: string,
  baseline: GroupReport[],
  hypothetical: GroupReport[],
): HTMLElement {
  const byId = new Map(hypothetical.map((report) => [report.id, report]));
  const section = el('section', { class: 'whatif-section', 'data-dimension': dimension });
  section.append(el('h4', {}, [`By ${dimension}`]));
  const table = el('table', { class: 'report-table' });
  table.append(
    el('tr', {}, [
      el('th', {}, ['id']),
      el('th', {}, ['current maturity']),
      el('th', {}, ['hypothetical maturity']),
    ]),
  );
  for (const current of baseline) {
    const hypo = byId.get(current.id);
    if (!hypo) continue;
    const row = el('tr', { 'data-group': current.id }, [
      el('td', { title: current.label }, [current.id]),
      scoreCell(current.maturity),
      scoreCell(hypo.maturity),
    ]);
    if (
      typeof current.maturity === 'number' &&
      typeof hypo.maturity === 'number' &&
      hypo.maturity !== current.maturity
    ) {
      row.classList.add(hypo.maturity > current.maturity ? 'improved' : 'regressed');
    }
    table.append(row);
  }
  section.append(table);
  return section;
}

export function renderWhatIf(
  container: HTMLElement,
  report: ReportBundle | null,
  overrides: Record<string, Presence>,
  comparison: WhatIfPayload | null,
  handlers: WhatIfHandlers,
): void {
  clear(container);
  container.append(el('h2', {}, ['What if…']));
  if (report === null) {
    container.append(el('p', { class: 'muted' }, ['Results load first.']));
    return;
  }
  container.append(
    el('p', { class: 'muted' }, [
      'Hypothetical presences only — nothing here changes the session.',
    ]),
  );
  const toggles = el('div', { class: 'whatif-toggles', 'data-role': 'whatif-toggles' });
  for (const feature of report.features) {
    const select = el('select', { 'data-entity': feature.id }) as HTMLSelectElement;
    for (const [value, label] of [
      ['', 'as asserted'],
      ['present', 'present'],
      ['absent', 'absent'],
      ['unknown', 'unknown'],
    ]) {
      select.append(el('option', { value: value! }, [label!]));
    }
    select.value = overrides[feature.id] ?? '';
    select.addEventListener('change', () => {
      handlers.onToggle(feature.id, (select.value || null) as Presence | null);
    });
    toggles.append(el('label', { class: 'whatif-toggle' }, [feature.id + ' ', select]));
  }
  container.append(toggles);
  const run = el('button', { type: 'button', 'data-role': 'run-whatif' }, ['Evaluate hypothesis']);
  run.addEventListener('click', () => handlers.onRun());
  container.append(run);

  if (comparison !== null) {
    const results = el('div', { 'data-role': 'whatif-results' });
    results.append(comparisonRows('value', comparison.baseline.values, comparison.hypothetical.values));
    results.append(
      comparisonRows('stakeholder', comparison.baseline.stakeholders, comparison.hypothetical.stakeholders),
    );
    results.append(
      comparisonRows('feature', comparison.baseline.features, comparison.hypothetical.features),
    );
    container.append(results);
  }
}
