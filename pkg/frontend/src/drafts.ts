/**
 * Local draft persistence for in-progress revisions.
 *
 * Drafts are keyed by question id AND version: a draft written against v0 is
 * not silently applied to v1, because the underlying candidate may have
 * changed. After a conflict the reviewer decides whether to carry the draft
 * forward (move) or drop it (clear).
 */

export interface Draft {
  text: string;
  reference_answer: string;
  dimension: string;
  note: string;
  saved_at: string;
}

export type DraftFields = Omit<Draft, 'saved_at'>;

/** The subset of DOM Storage the store needs; tests inject a memory stub. */
export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStorage implements StorageLike {
  private readonly entries = new Map<string, string>();

  getItem(key: string): string | null {
    return this.entries.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.entries.set(key, value);
  }

  removeItem(key: string): void {
    this.entries.delete(key);
  }
}

const PREFIX = 'geodistill.draft';

export class DraftStore {
  constructor(private readonly storage: StorageLike) {}

  static key(questionId: string, version: number): string {
    return `${PREFIX}:${questionId}@v${version}`;
  }

  load(questionId: string, version: number): Draft | null {
    const raw = this.storage.getItem(DraftStore.key(questionId, version));
    if (raw === null) return null;
    try {
      const parsed: unknown = JSON.parse(raw);
      if (
        typeof parsed === 'object' &&
        parsed !== null &&
        typeof (parsed as Draft).text === 'string' &&
        typeof (parsed as Draft).reference_answer === 'string'
      ) {
        return parsed as Draft;
      }
    } catch {
      // corrupted entry; treat as absent
    }
    return null;
  }

  save(questionId: string, version: number, fields: DraftFields): Draft {
    const draft: Draft = { ...fields, saved_at: new Date().toISOString() };
    this.storage.setItem(DraftStore.key(questionId, version), JSON.stringify(draft));
    return draft;
  }

  clear(questionId: string, version: number): void {
    this.storage.removeItem(DraftStore.key(questionId, version));
  }

  /** Re-key a draft after the server copy moved on, preserving its content. */
  move(questionId: string, fromVersion: number, toVersion: number): Draft | null {
    const draft = this.load(questionId, fromVersion);
    if (draft === null) return null;
    this.storage.setItem(DraftStore.key(questionId, toVersion), JSON.stringify(draft));
    this.storage.removeItem(DraftStore.key(questionId, fromVersion));
    return draft;
  }
}
