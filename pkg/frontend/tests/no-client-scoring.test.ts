/**
 * Traffic audit: every score on screen must be a value the server sent.
 * The fake server records each payload it serves; after a full assessment
 * the test sweeps every score cell in the DOM and matches it row by row
 * against the recorded payloads. If the client computed any number of its
 * own, the sweep or the row-level equality would catch it.
 */

import { beforeEach, describe, expect, it } from 'vitest';

import { RainApi } from '../src/api';
import { createApp, type App } from '../src/app';
import type { ReportBundle, WhatIfPayload } from '../src/types';
import { FakeServer, flush, servedLeafValues } from './helpers';

async function settled(work: Promise<unknown>) {
  await work;
  await flush();
}

describe('zero client-side scoring', () => {
  let server: FakeServer;
  let root: HTMLElement;
  let app: App;

  beforeEach(async () => {
    server = new FakeServer();
    server.install();
    document.body.innerHTML = '<div id="app"></div>';
    root = document.querySelector<HTMLElement>('#app')!;
    app = createApp(root, new RainApi());
    await settled(app.openSession('elderly', 'assessment'));
    for (const entity of ['personal-data', 'remote-processing', 'end-user']) {
      await settled(app.answerQuestion(entity, 'present'));
    }
    for (const [norm, level, outcome] of [
      ['pd-gdpr', 1, 'fail'],
      ['pd-gdpr', 2, 'pass'],
      ['rp-privacy', 1, 'pass'],
      ['rp-privacy', 3, 'fail'],
    ] as const) {
      await settled(
        app.answerItem({ norm, level, kind: 'quiz', prompt: '', fail_on: 'no' }, outcome),
      );
    }
    app.setOverride('remote-processing', 'absent');
    await settled(app.runWhatIf());
  });

  it('every displayed score value was served by the API', () => {
    const served = servedLeafValues(server);
    const cells = [...root.querySelectorAll('[data-score]')];
    expect(cells.length).toBeGreaterThan(10);
    for (const cell of cells) {
      const text = cell.textContent ?? '';
      if (text === '—') continue; // placeholder for "not applicable", not a value
      expect(served.has(text), `displayed score ${text} was never served`).toBe(true);
    }
  });

  it('report maturities equal the served bundle field by field', () => {
    const bundles = server.served.filter(
      (payload): payload is ReportBundle =>
        typeof payload === 'object' && payload !== null && 'compliant' in payload,
    );
    const bundle = bundles[bundles.length - 1]!;
    for (const [dimension, reports] of [
      ['value', bundle.values],
      ['stakeholder', bundle.stakeholders],
      ['feature', bundle.features],
      ['policy', bundle.policies],
    ] as const) {
      for (const report of reports) {
        const row = root.querySelector(
          `[data-pane="report"] [data-dimension="${dimension}"] [data-group="${report.id}"]`,
        )!;
        const [worstCell, maturityCell] = row.querySelectorAll('[data-score]');
        expect(worstCell!.textContent).toBe(String(report.worst_violation));
        expect(maturityCell!.textContent).toBe(String(report.maturity));
      }
    }
    const compliant = root.querySelector('[data-role="compliant"]')!;
    expect(compliant.textContent).toBe(String(bundle.compliant));
  });

  it('what-if columns equal the served baseline and hypothetical bundles', () => {
    const payloads = server.served.filter(
      (payload): payload is WhatIfPayload =>
        typeof payload === 'object' && payload !== null && 'hypothetical' in payload,
    );
    const comparison = payloads[payloads.length - 1]!;
    const byId = new Map(comparison.hypothetical.values.map((report) => [report.id, report]));
    for (const baseline of comparison.baseline.values) {
      const row = root.querySelector(
        `[data-role="whatif-results"] [data-dimension="value"] [data-group="${baseline.id}"]`,
      )!;
      const [currentCell, hypoCell] = row.querySelectorAll('[data-score]');
      expect(currentCell!.textContent).toBe(String(baseline.maturity));
      expect(hypoCell!.textContent).toBe(String(byId.get(baseline.id)!.maturity));
    }
  });
});
