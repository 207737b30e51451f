/**
 * Wire types for the review service. Field names match the JSON payloads
 * exactly, so responses can be used without mapping.
 */

export interface Candidate {
  question_id: string;
  text: string;
  reference_answer: string;
  dimension: string;
  status: string;
  version: number;
  editor_note: string;
}

export interface CandidatePage {
  items: Candidate[];
  total: number;
  page: number;
  page_size: number;
}

export type DecisionAction = 'accept' | 'reject' | 'revise';

export interface DecisionBody {
  action: DecisionAction;
  expected_version: number;
  edited_text?: string | null;
  edited_reference?: string | null;
  edited_dimension?: string | null;
  note?: string | null;
}

export interface FinalizeResult {
  path: string;
  total: number;
  counts: Record<string, number>;
  sha256: string;
}

export interface HealthResult {
  status: string;
}

export interface ErrorBody {
  error: string;
  message: string;
}

/** Benchmark dimensions, in display order. The server validates membership. */
export const DIMENSIONS = ['Concept', 'Process', 'Engineering'] as const;
