/**
 * In-memory stand-in for the HTTP API, installed as global fetch. It mimics
 * the real routes and payload shapes, enforces the expected-revision header,
 * and records every payload it serves plus every mutation it accepts — the
 * interception point for the zero-client-scoring and journal-untouched
 * checks.
 */

import type {
  GroupReport,
  NormStatus,
  Presence,
  Question,
  ReportBundle,
  Violation,
} from '../src/types';

export interface FakeNorm {
  id: string;
  values: string[];
  stakeholders: string[];
  features: string[];
  source: string;
  criteria: { level: number; kind: 'quiz' | 'evidence' | 'monitor'; prompt: string; fail_on: 'yes' | 'no' | 'absent' }[];
}

export interface FakeGraph {
  scale: number;
  values: string[];
  stakeholders: string[];
  features: string[];
  policies: string[];
  norms: FakeNorm[];
  questions: Record<string, string>;
}

export const MINI_GRAPH: FakeGraph = {
  scale: 3,
  values: ['data-governance', 'data-protection', 'right-to-privacy'],
  stakeholders: ['end-user'],
  features: ['personal-data', 'remote-processing'],
  policies: ['gtai'],
  questions: {
    'personal-data': 'Does the application handle personal data?',
    'remote-processing': 'Is recorded data processed off-site?',
    'end-user': 'Does the application have end users?',
  },
  norms: [
    {
      id: 'pd-gdpr',
      values: ['data-governance'],
      stakeholders: ['end-user'],
      features: ['personal-data'],
      source: 'policy:gtai',
      criteria: [
        { level: 1, kind: 'quiz', prompt: 'Lawful basis for processing?', fail_on: 'no' },
        { level: 2, kind: 'evidence', prompt: 'Impact assessment on record?', fail_on: 'absent' },
      ],
    },
    {
      id: 'rp-privacy',
      values: ['data-governance', 'data-protection', 'right-to-privacy'],
      stakeholders: ['end-user'],
      features: ['personal-data', 'remote-processing'],
      source: 'expansion:home-automation',
      criteria: [
        { level: 1, kind: 'quiz', prompt: 'Recordings encrypted in transit?', fail_on: 'no' },
        { level: 3, kind: 'quiz', prompt: 'Use-case reason for remote processing?', fail_on: 'no' },
      ],
    },
  ],
};

type Outcome = 'pass' | 'fail';

function gatesOf(norm: FakeNorm): string[] {
  return [...norm.features, ...norm.stakeholders];
}

export class FakeServer {
  revision = 0;
  context: Record<string, Presence> = {};
  answers = new Map<string, Outcome>();
  /** Every JSON payload this server has sent. */
  served: unknown[] = [];
  /** Every accepted mutation (journal writes), as route names. */
  mutations: string[] = [];
  /** Force the next write to act as if another writer got there first. */
  simulateConflict = false;
  /** When set, /questions returns exactly this list (order test hook). */
  forcedQuestions: Question[] | null = null;

  constructor(public graph: FakeGraph = MINI_GRAPH) {}

  install(): void {
    const handler = (input: RequestInfo | URL, init?: RequestInit) =>
      Promise.resolve(this.handle(String(input), init));
    globalThis.fetch = handler as typeof fetch;
  }

  // -- server-side scoring (this is the engine's job, mirrored here) ------

  private statusOf(norm: FakeNorm, context: Record<string, Presence>): NormStatus {
    const presences = gatesOf(norm).map((gate) => context[gate] ?? 'unknown');
    if (presences.includes('absent')) return { state: 'inactive' };
    if (presences.includes('unknown')) return { state: 'potentially-active' };
    let worst = 0;
    for (const criterion of norm.criteria) {
      const outcome = this.answers.get(`${norm.id}/${criterion.level}`);
      if (outcome === undefined) return { state: 'active', violation: 'incomplete' };
      if (outcome === 'fail') worst = Math.max(worst, criterion.level);
    }
    return { state: 'active', violation: worst };
  }

  private groupReports(
    context: Record<string, Presence>,
    ids: string[],
    member: (norm: FakeNorm, id: string) => boolean,
  ): GroupReport[] {
    return ids.map((id) => {
      const contributions: [string, Violation][] = [];
      for (const norm of this.graph.norms) {
        const status = this.statusOf(norm, context);
        if (status.state === 'active' && member(norm, id)) {
          contributions.push([norm.id, status.violation!]);
        }
      }
      let worst: Violation = 0;
      for (const [, violation] of contributions) {
        if (violation === 'incomplete') {
          worst = 'incomplete';
          break;
        }
        worst = Math.max(worst as number, violation);
      }
      const maturity: Violation =
        worst === 'incomplete' ? 'incomplete' : this.graph.scale + 1 - (worst as number);
      return { id, label: id, worst_violation: worst, maturity, norms: contributions };
    });
  }

  private bundle(context: Record<string, Presence>): ReportBundle {
    const statuses = this.graph.norms.map((norm) => this.statusOf(norm, context));
    const activeViolations = statuses
      .filter((status) => status.state === 'active')
      .map((status) => status.violation!);
    const compliant = activeViolations.includes('incomplete')
      ? ('incomplete' as const)
      : activeViolations.every((violation) => violation === 0);
    return {
      graph: { digest: 'fake-digest', policies: this.graph.policies, scale: this.graph.scale },
      compliant,
      values: this.groupReports(context, this.graph.values, (norm, id) => norm.values.includes(id)),
      stakeholders: this.groupReports(context, this.graph.stakeholders, (norm, id) =>
        norm.stakeholders.includes(id),
      ),
      features: this.groupReports(context, this.graph.features, (norm, id) =>
        norm.features.includes(id),
      ),
      policies: this.groupReports(context, this.graph.policies, (norm, id) =>
        norm.source === `policy:${id}`,
      ),
      projections: [],
    };
  }

  private questionPayload(): { revision: number; questions: Question[] } {
    if (this.forcedQuestions) {
      return { revision: this.revision, questions: this.forcedQuestions };
    }
    const counts = new Map<string, number>();
    for (const norm of this.graph.norms) {
      if (this.statusOf(norm, this.context).state !== 'potentially-active') continue;
      for (const gate of gatesOf(norm)) {
        if ((this.context[gate] ?? 'unknown') === 'unknown') {
          counts.set(gate, (counts.get(gate) ?? 0) + 1);
        }
      }
    }
    const ordered = [...counts.keys()].sort(
      (a, b) => counts.get(b)! - counts.get(a)! || a.localeCompare(b),
    );
    return {
      revision: this.revision,
      questions: ordered.map((entity) => ({
        entity,
        kind: this.graph.features.includes(entity) ? 'feature' : 'stakeholder',
        question: this.graph.questions[entity] ?? `${entity}?`,
        gated_norms: counts.get(entity)!,
      })),
    };
  }

  // -- http surface --------------------------------------------------------

  private respond(status: number, payload: unknown): Response {
    this.served.push(payload);
    return new Response(JSON.stringify(payload), {
      status,
      headers: { 'Content-Type': 'application/json' },
    });
  }

  private checkRevision(init?: RequestInit): Response | null {
    const headers = new Headers(init?.headers);
    const expected = headers.get('X-Expected-Revision');
    if (expected === null) {
      return this.respond(400, { code: 'validation', message: 'missing expected revision', ids: [] });
    }
    if (this.simulateConflict || Number(expected) !== this.revision) {
      return this.respond(409, {
        code: 'revision-conflict',
        message: `session is at revision ${this.revision}, expected ${expected}`,
        ids: [],
      });
    }
    return null;
  }

  private sessionInfo() {
    return {
      session: 'assessment',
      graph: 'elderly',
      graph_revision: 1,
      revision: this.revision,
    };
  }

  handle(url: string, init?: RequestInit): Response {
    const method = (init?.method ?? 'GET').toUpperCase();
    const path = url.replace(/^https?:\/\/[^/]+/, '').split('?')[0]!;
    const body = init?.body ? JSON.parse(String(init.body)) : {};

    if (method === 'POST' && path === '/sessions') {
      return this.respond(201, this.sessionInfo());
    }
    if (method === 'GET' && path === '/sessions/assessment') {
      return this.respond(200, this.sessionInfo());
    }
    if (method === 'GET' && path === '/sessions/assessment/questions') {
      return this.respond(200, this.questionPayload());
    }
    if (method === 'POST' && path === '/sessions/assessment/context') {
      const conflict = this.checkRevision(init);
      if (conflict) return conflict;
      for (const entity of Object.keys(body.assertions).sort()) {
        this.context[entity] = body.assertions[entity];
        this.revision += 1;
        this.mutations.push(`context:${entity}=${body.assertions[entity]}`);
      }
      return this.respond(200, { revision: this.revision });
    }
    if (method === 'GET' && path === '/sessions/assessment/norms') {
      const norms: Record<string, NormStatus> = {};
      const activated = new Set<string>();
      for (const norm of this.graph.norms) {
        const status = this.statusOf(norm, this.context);
        norms[norm.id] = status;
        if (status.state !== 'inactive') norm.values.forEach((value) => activated.add(value));
      }
      return this.respond(200, {
        revision: this.revision,
        norms,
        activated_values: [...activated].sort(),
      });
    }
    if (method === 'GET' && path === '/sessions/assessment/items') {
      const items = [];
      for (const norm of this.graph.norms) {
        if (this.statusOf(norm, this.context).state !== 'active') continue;
        for (const criterion of norm.criteria) {
          if (!this.answers.has(`${norm.id}/${criterion.level}`)) {
            items.push({ norm: norm.id, ...criterion });
          }
        }
      }
      return this.respond(200, { revision: this.revision, items });
    }
    if (method === 'POST' && path === '/sessions/assessment/answers') {
      const conflict = this.checkRevision(init);
      if (conflict) return conflict;
      for (const answer of body.answers) {
        this.answers.set(`${answer.norm}/${answer.level}`, answer.outcome);
        this.revision += 1;
        this.mutations.push(`answer:${answer.norm}/${answer.level}=${answer.outcome}`);
      }
      return this.respond(200, { revision: this.revision });
    }
    if (method === 'GET' && path === '/sessions/assessment/report') {
      return this.respond(200, this.bundle(this.context));
    }
    if (method === 'POST' && path === '/sessions/assessment/whatif') {
      const hypothetical = { ...this.context, ...body.overrides };
      return this.respond(200, {
        baseline: this.bundle(this.context),
        hypothetical: this.bundle(hypothetical),
        revision: this.revision,
      });
    }
    return this.respond(404, { code: 'not-found', message: `no route ${method} ${path}`, ids: [] });
  }
}

/** Every primitive leaf served by the fake, stringified, for traffic audits. */
export function servedLeafValues(server: FakeServer): Set<string> {
  const leaves = new Set<string>();
  const walk = (value: unknown): void => {
    if (value === null) return;
    if (Array.isArray(value)) {
      value.forEach(walk);
      return;
    }
    if (typeof value === 'object') {
      Object.values(value as Record<string, unknown>).forEach(walk);
      return;
    }
    leaves.add(String(value));
  };
  server.served.forEach(walk);
  return leaves;
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
