/**
 * Entry point: wires the API client, draft store, queue state, and keyboard
 * bindings to the DOM. Served by the review service itself, so the API is
 * same-origin. The bearer token lives in memory for the tab's lifetime.
 */

import { ReviewApi } from './api.js';
import { DraftStore } from './drafts.js';
import { actionForKey } from './keyboard.js';
import { ReviewQueue } from './store.js';
import type { EditorFields, Handlers } from './ui.js';
import { render } from './ui.js';

const api = new ReviewApi('');
const drafts = new DraftStore(window.localStorage);
const queue = new ReviewQueue(api, drafts);
const root = document.getElementById('app');

if (root === null) {
  throw new Error('missing #app mount point');
}

function fieldsToEdits(fields: EditorFields) {
  return {
    text: fields.text,
    reference: fields.reference_answer,
    dimension: fields.dimension,
    note: fields.note,
  };
}

const handlers: Handlers = {
  onConnect(token) {
    api.setToken(token);
    void queue.load();
  },
  onFilter(status) {
    void queue.load(status);
  },
  onSelect(index) {
    queue.select(index);
  },
  onAccept() {
    void queue.decide('accept');
  },
  onReject() {
    void queue.decide('reject');
  },
  onRevise(fields) {
    void queue.decide('revise', fieldsToEdits(fields));
  },
  onDraft(fields) {
    const candidate = queue.current();
    if (candidate !== null) queue.saveDraft(candidate, fields);
  },
  onFinalize() {
    void queue.finalize();
  },
  onRetry() {
    void queue.retry();
  },
  onKeepMine() {
    queue.resolveConflictKeepMine();
  },
  onTakeTheirs() {
    queue.resolveConflictTakeTheirs();
  },
  draftFor(candidate) {
    return queue.draftFor(candidate);
  },
};

queue.subscribe((state) => render(root, state, handlers));
render(root, queue.getState(), handlers);

document.addEventListener('keydown', (event) => {
  const target = event.target as HTMLElement | null;
  const editing =
    target !== null && ['INPUT', 'TEXTAREA', 'SELECT'].includes(target.tagName);
  const action = actionForKey(event.key, editing);
  if (action === null) return;
  event.preventDefault();
  switch (action) {
    case 'accept':
      void queue.decide('accept');
      break;
    case 'reject':
      void queue.decide('reject');
      break;
    case 'next':
      queue.next();
      break;
    case 'prev':
      queue.prev();
      break;
    case 'edit': {
      const field = document.querySelector<HTMLTextAreaElement>('.field-text');
      field?.focus();
      break;
    }
    case 'escape':
      (target as HTMLInputElement | null)?.blur?.();
      break;
  }
});
