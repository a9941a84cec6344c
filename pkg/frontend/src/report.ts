/**
 * Results pane: the server's report bundle rendered verbatim — compliance
 * flag, per-dimension worst violations and maturities, projections.
 */

import { clear, el, scoreCell } from './dom';
import type { GroupReport, ReportBundle } from './types';

function groupTable(title: string, dimension: string, reports: GroupReport[]): HTMLElement {
  const section = el('section', { class: 'report-section', 'data-dimension': dimension });
  section.append(el('h3', {}, [title]));
  const table = el('table', { class: 'report-table' });
  table.append(
    el('tr', {}, [
      el('th', {}, ['id']),
      el('th', {}, ['worst violation']),
      el('th', {}, ['maturity']),
      el('th', {}, ['contributing norms']),
    ]),
  );
  for (const report of reports) {
    const norms = report.norms.map(([normId, violation]) => `${normId}: ${violation}`).join(', ');
    table.append(
      el('tr', { 'data-group': report.id }, [
        el('td', { title: report.label }, [report.id]),
        scoreCell(report.worst_violation),
        scoreCell(report.maturity),
        el('td', { class: 'muted' }, [norms || '—']),
      ]),
    );
  }
  section.append(table);
  return section;
}

export function renderReport(container: HTMLElement, bundle: ReportBundle | null): void {
  clear(container);
  container.append(el('h2', {}, ['Results']));
  if (bundle === null) {
    container.append(el('p', { class: 'muted' }, ['Loading…']));
    return;
  }
  container.append(
    el('p', { class: `compliance compliance-${String(bundle.compliant)}` }, [
      'Ethically compliant: ',
      el('strong', { 'data-role': 'compliant', 'data-score': '' }, [String(bundle.compliant)]),
    ]),
  );
  container.append(groupTable('By value', 'value', bundle.values));
  container.append(groupTable('By stakeholder', 'stakeholder', bundle.stakeholders));
  container.append(groupTable('By feature', 'feature', bundle.features));
  container.append(groupTable('By policy', 'policy', bundle.policies));
  for (const projection of bundle.projections) {
    const section = el('section', { class: 'report-section', 'data-projection': projection.ruleset });
    section.append(el('h3', {}, [`Projection: ${projection.external}`]));
    const table = el('table', { class: 'report-table' });
    table.append(el('tr', {}, [el('th', {}, ['item']), el('th', {}, ['result'])]));
    for (const entry of projection.items) {
      table.append(
        el('tr', { 'data-item': entry.item }, [
          el('td', {}, [entry.item]),
          scoreCell(
            Array.isArray(entry.result) ? JSON.stringify(entry.result) : String(entry.result),
          ),
        ]),
      );
    }
    section.append(table);
    container.append(section);
  }
}
