import { beforeEach, describe, expect, it } from 'vitest';

import { RainApi } from '../src/api';
import { CONFLICT_BANNER, createApp } from '../src/app';
import { FakeServer, flush } from './helpers';

function mount() {
  document.body.innerHTML = '<div id="app"></div>';
  return document.querySelector<HTMLElement>('#app')!;
}

async function settled(work: Promise<unknown>) {
  await work;
  await flush();
}

describe('questionnaire flow', () => {
  let server: FakeServer;
  let root: HTMLElement;

  beforeEach(() => {
    server = new FakeServer();
    server.install();
    root = mount();
  });

  it('renders questions in server order, exactly', async () => {
    server.forcedQuestions = [
      { entity: 'remote-processing', kind: 'feature', question: 'rp?', gated_norms: 1 },
      { entity: 'end-user', kind: 'stakeholder', question: 'eu?', gated_norms: 2 },
      { entity: 'personal-data', kind: 'feature', question: 'pd?', gated_norms: 2 },
    ];
    const app = createApp(root, new RainApi());
    await settled(app.openSession('elderly', 'assessment'));
    const shown = [...root.querySelectorAll('[data-role="questions"] .question')].map((node) =>
      node.getAttribute('data-entity'),
    );
    expect(shown).toEqual(['remote-processing', 'end-user', 'personal-data']);
  });

  it('posts context on answer and refreshes statuses without a reload', async () => {
    const app = createApp(root, new RainApi());
    await settled(app.openSession('elderly', 'assessment'));

    // end-user and personal-data both gate two norms; the id tie-break
    // puts end-user first in the server's ordering.
    const first = root.querySelector('[data-role="questions"] .question');
    expect(first?.getAttribute('data-entity')).toBe('end-user');
    const marker = root.querySelector('[data-pane="norms"]');

    await settled(app.answerQuestion('personal-data', 'present'));
    await settled(app.answerQuestion('end-user', 'present'));
    await settled(app.answerQuestion('remote-processing', 'present'));

    // Same DOM nodes, updated in place: no page reload happened.
    expect(root.querySelector('[data-pane="norms"]')).toBe(marker);
    expect(server.mutations).toEqual([
      'context:personal-data=present',
      'context:end-user=present',
      'context:remote-processing=present',
    ]);
    const pdRow = root.querySelector('[data-norm="pd-gdpr"] [data-role="state"]');
    expect(pdRow?.textContent).toBe('active');
    const activated = root.querySelector('[data-role="activated-values"]')?.textContent ?? '';
    expect(activated).toContain('data-governance');
    expect(root.querySelector('[data-role="complete"]')).not.toBeNull();
  });

  it('shows open items only for active norms and records answers', async () => {
    const app = createApp(root, new RainApi());
    await settled(app.openSession('elderly', 'assessment'));
    await settled(app.answerQuestion('personal-data', 'present'));
    await settled(app.answerQuestion('end-user', 'present'));
    await settled(app.answerQuestion('remote-processing', 'absent'));

    const items = [...root.querySelectorAll('[data-role="items"] .item')];
    expect(items.map((node) => node.getAttribute('data-norm'))).toEqual(['pd-gdpr', 'pd-gdpr']);

    const firstItem = server.graph.norms[0]!.criteria[0]!;
    await settled(
      app.answerItem(
        { norm: 'pd-gdpr', level: firstItem.level, kind: firstItem.kind, prompt: firstItem.prompt, fail_on: firstItem.fail_on },
        'pass',
      ),
    );
    expect(server.mutations).toContain('answer:pd-gdpr/1=pass');
    expect([...root.querySelectorAll('[data-role="items"] .item')]).toHaveLength(1);
  });

  it('surfaces a conflict banner on 409 and keeps local state untouched', async () => {
    const app = createApp(root, new RainApi());
    await settled(app.openSession('elderly', 'assessment'));
    const questionsBefore = root.querySelector('[data-role="questions"]')!.innerHTML;

    server.simulateConflict = true;
    await settled(app.answerQuestion('personal-data', 'present'));

    const banner = root.querySelector('[data-role="banner"]')!;
    expect(banner.hasAttribute('hidden')).toBe(false);
    expect(banner.textContent).toBe(CONFLICT_BANNER);
    expect(server.mutations).toEqual([]);
    expect(root.querySelector('[data-role="questions"]')!.innerHTML).toBe(questionsBefore);
  });
});
