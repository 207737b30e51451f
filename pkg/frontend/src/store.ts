/**
 * DOM-free review queue state. The UI layer subscribes and re-renders; tests
 * and the e2e suite drive this store directly.
 *
 * Conflict handling: a 409 on submit never discards local edits. The draft
 * stays in the draft store under the stale version, the fresh server copy is
 * fetched, and both are surfaced as dialog state for the reviewer to resolve.
 */

import { ApiError, isConflictError } from './api.js';
import type { Draft, DraftFields, DraftStore } from './drafts.js';
import type { Candidate, DecisionAction, DecisionBody, FinalizeResult } from './types.js';

/** The slice of ReviewApi the queue uses; unit tests substitute a fake. */
export interface ReviewApiLike {
  listAll(status?: string): Promise<Candidate[]>;
  getCandidate(questionId: string): Promise<Candidate>;
  submitDecision(questionId: string, body: DecisionBody): Promise<Candidate>;
  finalize(force?: boolean): Promise<FinalizeResult>;
}

export interface DecisionEdits {
  text?: string;
  reference?: string;
  dimension?: string;
  note?: string;
}

export interface Banner {
  message: string;
  canRetry: boolean;
}

export interface Conflict {
  questionId: string;
  staleVersion: number;
  attempted: DecisionBody;
  server: Candidate;
  draft: Draft | null;
}

export interface QueueState {
  items: Candidate[];
  cursor: number;
  statusFilter: string;
  loading: boolean;
  banner: Banner | null;
  conflict: Conflict | null;
  finalized: FinalizeResult | null;
}

export type Listener = (state: QueueState) => void;

export class ReviewQueue {
  private state: QueueState = {
    items: [],
    cursor: 0,
    statusFilter: 'vetting',
    loading: false,
    banner: null,
    conflict: null,
    finalized: null,
  };
  private listeners: Listener[] = [];
  private lastFailed: (() => Promise<void>) | null = null;

  constructor(
    private readonly api: ReviewApiLike,
    private readonly drafts: DraftStore,
  ) {}

  getState(): QueueState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private patch(partial: Partial<QueueState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
  }

  private fail(err: unknown, op: () => Promise<void>): void {
    this.lastFailed = op;
    const message = err instanceof Error ? err.message : String(err);
    this.patch({ loading: false, banner: { message, canRetry: true } });
  }

  current(): Candidate | null {
    return this.state.items[this.state.cursor] ?? null;
  }

  async load(statusFilter = this.state.statusFilter): Promise<void> {
    this.patch({ loading: true, statusFilter });
    try {
      const items = await this.api.listAll(statusFilter || undefined);
      this.lastFailed = null;
      this.patch({
        items,
        cursor: Math.min(this.state.cursor, Math.max(items.length - 1, 0)),
        loading: false,
        banner: null,
      });
    } catch (err) {
      this.fail(err, () => this.load(statusFilter));
    }
  }

  select(index: number): void {
    if (index >= 0 && index < this.state.items.length) {
      this.patch({ cursor: index });
    }
  }

  next(): void {
    this.select(this.state.cursor + 1);
  }

  prev(): void {
    this.select(this.state.cursor - 1);
  }

  draftFor(candidate: Candidate): Draft | null {
    return this.drafts.load(candidate.question_id, candidate.version);
  }

  saveDraft(candidate: Candidate, fields: DraftFields): Draft {
    return this.drafts.save(candidate.question_id, candidate.version, fields);
  }

  /** Submit a decision for the candidate under the cursor. */
  decide(action: DecisionAction, edits: DecisionEdits = {}): Promise<Candidate | null> {
    const target = this.current();
    if (target === null) return Promise.resolve(null);
    return this.decideOn(target, action, edits);
  }

  async decideOn(
    target: Candidate,
    action: DecisionAction,
    edits: DecisionEdits = {},
  ): Promise<Candidate | null> {
    const body: DecisionBody = { action, expected_version: target.version };
    if (edits.text !== undefined) body.edited_text = edits.text;
    if (edits.reference !== undefined) body.edited_reference = edits.reference;
    if (edits.dimension !== undefined) body.edited_dimension = edits.dimension;
    if (edits.note !== undefined) body.note = edits.note;

    try {
      const updated = await this.api.submitDecision(target.question_id, body);
      this.drafts.clear(target.question_id, target.version);
      this.lastFailed = null;
      this.applyUpdate(updated);
      return updated;
    } catch (err) {
      if (isConflictError(err)) {
        await this.enterConflict(target, body);
        return null;
      }
      this.fail(err, async () => {
        await this.decideOn(target, action, edits);
      });
      return null;
    }
  }

  private applyUpdate(updated: Candidate): void {
    const items = [...this.state.items];
    const index = items.findIndex((c) => c.question_id === updated.question_id);
    if (index === -1) {
      this.patch({ banner: null });
      return;
    }
    const keep = this.state.statusFilter === '' || updated.status === this.state.statusFilter;
    if (keep) {
      items[index] = updated;
    } else {
      items.splice(index, 1);
    }
    this.patch({
      items,
      cursor: Math.min(this.state.cursor, Math.max(items.length - 1, 0)),
      banner: null,
    });
  }

  private async enterConflict(target: Candidate, attempted: DecisionBody): Promise<void> {
    let server: Candidate;
    try {
      server = await this.api.getCandidate(target.question_id);
    } catch (err) {
      this.fail(err, () => this.enterConflict(target, attempted));
      return;
    }
    this.patch({
      conflict: {
        questionId: target.question_id,
        staleVersion: target.version,
        attempted,
        server,
        draft: this.drafts.load(target.question_id, target.version),
      },
    });
  }

  /** Keep local edits: re-key the draft to the server version, refresh the row. */
  resolveConflictKeepMine(): void {
    const conflict = this.state.conflict;
    if (conflict === null) return;
    this.drafts.move(conflict.questionId, conflict.staleVersion, conflict.server.version);
    this.replaceItem(conflict.server);
    this.patch({ conflict: null });
  }

  /** Discard local edits in favour of the server copy. */
  resolveConflictTakeTheirs(): void {
    const conflict = this.state.conflict;
    if (conflict === null) return;
    this.drafts.clear(conflict.questionId, conflict.staleVersion);
    this.replaceItem(conflict.server);
    this.patch({ conflict: null });
  }

  private replaceItem(fresh: Candidate): void {
    const items = this.state.items.map((c) =>
      c.question_id === fresh.question_id ? fresh : c,
    );
    this.patch({ items });
  }

  async finalize(force = false): Promise<FinalizeResult | null> {
    try {
      const result = await this.api.finalize(force);
      this.lastFailed = null;
      this.patch({ finalized: result, banner: null });
      return result;
    } catch (err) {
      if (err instanceof ApiError && err.code === 'pending_items') {
        this.patch({ banner: { message: err.message, canRetry: false } });
        return null;
      }
      this.fail(err, async () => {
        await this.finalize(force);
      });
      return null;
    }
  }

  /** Re-run the operation behind the current error banner, if it is retryable. */
  async retry(): Promise<void> {
    const op = this.lastFailed;
    if (op === null) return;
    this.lastFailed = null;
    this.patch({ banner: null });
    await op();
  }
}
