import { ConflictError, ApiError } from '../src/api.js';
import type { ReviewApiLike } from '../src/store.js';
import type { Candidate, DecisionBody, FinalizeResult } from '../src/types.js';

const DIMS = ['Concept', 'Process', 'Engineering'];

export function makeCandidate(i: number, overrides: Partial<Candidate> = {}): Candidate {
  return {
    question_id: `doc:c0000:q${String(i).padStart(2, '0')}`,
    text: `Question ${i}?`,
    reference_answer: `Reference ${i}.`,
    dimension: DIMS[i % 3] as string,
    status: 'vetting',
    version: 0,
    editor_note: '',
    ...overrides,
  };
}

/**
 * In-memory stand-in for ReviewApi that applies the same decision semantics
 * as the service: version check, revise bumps the version, accept/reject move
 * the status. Tests can queue errors to force failure paths.
 */
export class FakeApi implements ReviewApiLike {
  candidates = new Map<string, Candidate>();
  decisions: Array<{ questionId: string; body: DecisionBody }> = [];
  listCalls: Array<string | undefined> = [];
  nextListError: Error | null = null;
  nextDecisionError: Error | null = null;
  finalizeError: Error | null = null;

  constructor(candidates: Candidate[] = []) {
    for (const c of candidates) this.candidates.set(c.question_id, c);
  }

  async listAll(status?: string): Promise<Candidate[]> {
    this.listCalls.push(status);
    if (this.nextListError !== null) {
      const err = this.nextListError;
      this.nextListError = null;
      throw err;
    }
    const all = [...this.candidates.values()].sort((a, b) =>
      a.question_id < b.question_id ? -1 : 1,
    );
    return status === undefined ? all : all.filter((c) => c.status === status);
  }

  async getCandidate(questionId: string): Promise<Candidate> {
    const found = this.candidates.get(questionId);
    if (found === undefined) throw new ApiError(404, 'not_found', `no candidate ${questionId}`);
    return found;
  }

  async submitDecision(questionId: string, body: DecisionBody): Promise<Candidate> {
    this.decisions.push({ questionId, body });
    if (this.nextDecisionError !== null) {
      const err = this.nextDecisionError;
      this.nextDecisionError = null;
      throw err;
    }
    const current = await this.getCandidate(questionId);
    if (current.version !== body.expected_version) {
      throw new ConflictError(
        `expected version ${body.expected_version}, candidate is at ${current.version}`,
      );
    }
    const updated: Candidate = {
      ...current,
      text: body.edited_text ?? current.text,
      reference_answer: body.edited_reference ?? current.reference_answer,
      dimension: body.edited_dimension ?? current.dimension,
      editor_note: body.note ?? current.editor_note,
      version: current.version + 1,
      status:
        body.action === 'accept' ? 'accepted' : body.action === 'reject' ? 'rejected' : 'vetting',
    };
    this.candidates.set(questionId, updated);
    return updated;
  }

  async finalize(force = false): Promise<FinalizeResult> {
    if (this.finalizeError !== null) throw this.finalizeError;
    const accepted = [...this.candidates.values()].filter((c) => c.status === 'accepted');
    const pending = [...this.candidates.values()].filter((c) => c.status === 'vetting');
    if (pending.length > 0 && !force) {
      throw new ApiError(409, 'pending_items', `${pending.length} candidates still in vetting`);
    }
    const counts: Record<string, number> = { Concept: 0, Process: 0, Engineering: 0 };
    for (const c of accepted) counts[c.dimension] = (counts[c.dimension] ?? 0) + 1;
    return { path: 'benchmark.jsonl', total: accepted.length, counts, sha256: '0'.repeat(64) };
  }

  /** Simulate another reviewer revising behind this client's back. */
  bumpVersion(questionId: string, text: string): Candidate {
    const current = this.candidates.get(questionId);
    if (current === undefined) throw new Error(`no candidate ${questionId}`);
    const updated = { ...current, text, version: current.version + 1 };
    this.candidates.set(questionId, updated);
    return updated;
  }
}
