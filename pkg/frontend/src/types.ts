/**
 * Server payload shapes, mirrored one-to-one from the JSON API.
 * Every number the UI shows comes out of one of these objects.
 */

export type Presence = 'present' | 'absent' | 'unknown';
export type Violation = number | 'incomplete';
export type Compliant = boolean | 'incomplete';

export interface Question {
  entity: string;
  kind: 'feature' | 'stakeholder';
  question: string;
  gated_norms: number;
}

export interface QuestionsPayload {
  revision: number;
  questions: Question[];
}

export interface NormStatus {
  state: 'inactive' | 'potentially-active' | 'active';
  violation?: Violation;
}

export interface NormsPayload {
  revision: number;
  norms: Record<string, NormStatus>;
  activated_values: string[];
}

export interface AssessmentItem {
  norm: string;
  level: number;
  kind: 'quiz' | 'evidence' | 'monitor';
  prompt: string;
  fail_on: 'yes' | 'no' | 'absent';
}

export interface ItemsPayload {
  revision: number;
  items: AssessmentItem[];
}

export interface GroupReport {
  id: string;
  label: string;
  worst_violation: Violation;
  maturity: Violation;
  norms: [string, Violation][];
}

export interface ProjectionResult {
  ruleset: string;
  external: string;
  items: { item: string; result: unknown }[];
}

export interface ReportBundle {
  graph: { digest: string; policies: string[]; scale: number };
  compliant: Compliant;
  values: GroupReport[];
  stakeholders: GroupReport[];
  features: GroupReport[];
  policies: GroupReport[];
  projections: ProjectionResult[];
}

export interface WhatIfPayload {
  baseline: ReportBundle;
  hypothetical: ReportBundle;
  revision: number;
}

export interface SessionInfo {
  session: string;
  graph: string;
  graph_revision: number;
  revision: number;
}

export interface AnswerPost {
  norm: string;
  level: number;
  outcome: 'pass' | 'fail';
  evidence?: string;
}
