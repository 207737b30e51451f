/**
 * Single-keystroke review bindings. Pure mapping so it can be tested without
 * a DOM; the UI layer decides what counts as "editing".
 */

export type KeyAction = 'accept' | 'reject' | 'next' | 'prev' | 'edit' | 'escape';

const BINDINGS: Record<string, KeyAction> = {
  a: 'accept',
  x: 'reject',
  j: 'next',
  n: 'next',
  k: 'prev',
  p: 'prev',
  e: 'edit',
  Escape: 'escape',
};

/** While a form field has focus only Escape is honoured. */
export function actionForKey(key: string, editing: boolean): KeyAction | null {
  if (editing) {
    return key === 'Escape' ? 'escape' : null;
  }
  return BINDINGS[key] ?? null;
}
