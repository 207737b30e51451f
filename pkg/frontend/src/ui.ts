/**
 * DOM rendering. The whole view is rebuilt from QueueState on each store
 * emit; drafts are written silently (no emit) so typing never forces a
 * re-render mid-keystroke.
 */

import type { Draft } from './drafts.js';
import type { QueueState } from './store.js';
import type { Candidate } from './types.js';
import { DIMENSIONS } from './types.js';

export interface EditorFields {
  text: string;
  reference_answer: string;
  dimension: string;
  note: string;
}

export interface Handlers {
  onConnect(token: string): void;
  onFilter(status: string): void;
  onSelect(index: number): void;
  onAccept(): void;
  onReject(): void;
  onRevise(fields: EditorFields): void;
  onDraft(fields: EditorFields): void;
  onFinalize(): void;
  onRetry(): void;
  onKeepMine(): void;
  onTakeTheirs(): void;
  draftFor(candidate: Candidate): Draft | null;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = '',
  text = '',
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function badge(dimension: string): HTMLElement {
  return el('span', `badge badge-${dimension.toLowerCase()}`, dimension);
}

function readFields(form: HTMLElement): EditorFields {
  const get = (name: string) =>
    (form.querySelector(`[name="${name}"]`) as HTMLInputElement | HTMLTextAreaElement | null)
      ?.value ?? '';
  return {
    text: get('text'),
    reference_answer: get('reference_answer'),
    dimension: get('dimension'),
    note: get('note'),
  };
}

function renderHeader(state: QueueState, handlers: Handlers): HTMLElement {
  const header = el('header', 'topbar');

  const tokenInput = el('input', 'token-input');
  tokenInput.type = 'password';
  tokenInput.placeholder = 'bearer token';
  tokenInput.name = 'token';
  const connect = el('button', '', 'Connect');
  connect.addEventListener('click', () => handlers.onConnect(tokenInput.value));

  const filter = el('select', 'status-filter');
  for (const status of ['vetting', 'accepted', 'rejected', '']) {
    const option = el('option', '', status || 'all');
    option.value = status;
    if (status === state.statusFilter) option.selected = true;
    filter.appendChild(option);
  }
  filter.name = 'status';
  filter.addEventListener('change', () => handlers.onFilter(filter.value));

  const finalize = el('button', 'finalize', 'Finalize benchmark');
  finalize.addEventListener('click', () => handlers.onFinalize());

  header.append(el('h1', '', 'geodistill review'), tokenInput, connect, filter, finalize);
  return header;
}

function renderQueue(state: QueueState, handlers: Handlers): HTMLElement {
  const list = el('ul', 'queue');
  state.items.forEach((candidate, index) => {
    const row = el('li', index === state.cursor ? 'queue-row selected' : 'queue-row');
    row.addEventListener('click', () => handlers.onSelect(index));
    const title = el('span', 'queue-id', candidate.question_id);
    const version = el('span', 'queue-version', `v${candidate.version}`);
    row.append(title, badge(candidate.dimension), version);
    if (handlers.draftFor(candidate) !== null) {
      row.append(el('span', 'queue-draft', 'draft'));
    }
    list.appendChild(row);
  });
  if (state.items.length === 0 && !state.loading) {
    list.appendChild(el('li', 'queue-empty', 'queue is empty'));
  }
  return list;
}

function renderEditor(candidate: Candidate, handlers: Handlers): HTMLElement {
  const draft = handlers.draftFor(candidate);
  const panel = el('section', 'editor');
  panel.append(el('h2', '', candidate.question_id), badge(candidate.dimension));

  const text = el('textarea', 'field-text');
  text.name = 'text';
  text.value = draft?.text ?? candidate.text;

  const reference = el('textarea', 'field-reference');
  reference.name = 'reference_answer';
  reference.value = draft?.reference_answer ?? candidate.reference_answer;

  const dimension = el('select');
  dimension.name = 'dimension';
  for (const dim of DIMENSIONS) {
    const option = el('option', '', dim);
    option.value = dim;
    if (dim === (draft?.dimension ?? candidate.dimension)) option.selected = true;
    dimension.appendChild(option);
  }

  const note = el('input');
  note.name = 'note';
  note.placeholder = 'reviewer note';
  note.value = draft?.note ?? '';

  for (const field of [text, reference, dimension, note]) {
    field.addEventListener('input', () => handlers.onDraft(readFields(panel)));
  }

  const accept = el('button', 'accept', 'Accept (a)');
  accept.addEventListener('click', () => handlers.onAccept());
  const reject = el('button', 'reject', 'Reject (x)');
  reject.addEventListener('click', () => handlers.onReject());
  const revise = el('button', 'revise', 'Save revision');
  revise.addEventListener('click', () => handlers.onRevise(readFields(panel)));

  const actions = el('div', 'actions');
  actions.append(accept, reject, revise);
  panel.append(
    el('label', '', 'Question'),
    text,
    el('label', '', 'Reference answer'),
    reference,
    el('label', '', 'Dimension'),
    dimension,
    note,
    actions,
  );
  return panel;
}

function renderConflict(state: QueueState, handlers: Handlers): HTMLElement | null {
  const conflict = state.conflict;
  if (conflict === null) return null;
  const overlay = el('div', 'overlay');
  const dialog = el('div', 'dialog conflict-dialog');
  dialog.append(
    el('h2', '', 'Version conflict'),
    el(
      'p',
      '',
      `${conflict.questionId} changed on the server (now v${conflict.server.version}, ` +
        `you had v${conflict.staleVersion}). Your edits are kept locally.`,
    ),
  );

  const columns = el('div', 'conflict-columns');
  const theirs = el('div', 'conflict-column');
  theirs.append(el('h3', '', 'Server copy'), el('pre', '', conflict.server.text));
  const mine = el('div', 'conflict-column');
  mine.append(
    el('h3', '', 'Your draft'),
    el('pre', '', conflict.draft?.text ?? '(no draft saved)'),
  );
  columns.append(theirs, mine);

  const keep = el('button', 'keep-mine', 'Keep my edits');
  keep.addEventListener('click', () => handlers.onKeepMine());
  const take = el('button', 'take-theirs', 'Use server copy');
  take.addEventListener('click', () => handlers.onTakeTheirs());
  const actions = el('div', 'actions');
  actions.append(keep, take);

  dialog.append(columns, actions);
  overlay.appendChild(dialog);
  return overlay;
}

export function render(root: HTMLElement, state: QueueState, handlers: Handlers): void {
  root.replaceChildren();
  root.appendChild(renderHeader(state, handlers));

  if (state.banner !== null) {
    const banner = el('div', 'banner', state.banner.message);
    if (state.banner.canRetry) {
      const retry = el('button', 'retry', 'Retry');
      retry.addEventListener('click', () => handlers.onRetry());
      banner.appendChild(retry);
    }
    root.appendChild(banner);
  }

  const main = el('main', 'layout');
  main.appendChild(renderQueue(state, handlers));
  const candidate = state.items[state.cursor];
  if (candidate !== undefined) {
    main.appendChild(renderEditor(candidate, handlers));
  }
  root.appendChild(main);

  if (state.finalized !== null) {
    const summary = el(
      'div',
      'finalized',
      `benchmark written: ${state.finalized.total} questions, sha256 ${state.finalized.sha256}`,
    );
    root.appendChild(summary);
  }

  const conflict = renderConflict(state, handlers);
  if (conflict !== null) root.appendChild(conflict);
}
