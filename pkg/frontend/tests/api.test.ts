import { describe, expect, it } from 'vitest';

import { ApiError, ConflictError, isConflictError, ReviewApi } from '../src/api.js';
import type { FetchLike } from '../src/api.js';
import type { Candidate } from '../src/types.js';

interface Recorded {
  url: string;
  method: string;
  headers: Record<string, string>;
  body: string | undefined;
}

function jsonResponse(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

/** Build a client whose fetch replays canned responses and records requests. */
function makeClient(responses: Response[], token = 'secret') {
  const calls: Recorded[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    calls.push({
      url,
      method: init?.method ?? 'GET',
      headers: (init?.headers ?? {}) as Record<string, string>,
      body: init?.body as string | undefined,
    });
    const next = responses.shift();
    if (next === undefined) throw new Error('no canned response left');
    return next;
  };
  return { api: new ReviewApi('http://example.test', token, fetchImpl), calls };
}

const CANDIDATE: Candidate = {
  question_id: 'doc:c0000:q00',
  text: 'What is a fault?',
  reference_answer: 'A fracture with displacement.',
  dimension: 'Concept',
  status: 'vetting',
  version: 0,
  editor_note: '',
};

describe('request shaping', () => {
  it('sends the bearer token on authed endpoints', async () => {
    const { api, calls } = makeClient([jsonResponse(200, CANDIDATE)]);
    await api.getCandidate('doc:c0000:q00');
    expect(calls[0]?.headers['authorization']).toBe('Bearer secret');
  });

  it('omits the authorization header when no token is set', async () => {
    const { api, calls } = makeClient([jsonResponse(200, { status: 'ok' })], '');
    await api.health();
    expect(calls[0]?.headers['authorization']).toBeUndefined();
  });

  it('builds the candidates query string', async () => {
    const { api, calls } = makeClient([
      jsonResponse(200, { items: [], total: 0, page: 2, page_size: 25 }),
    ]);
    await api.listCandidates({ status: 'vetting', page: 2, pageSize: 25 });
    expect(calls[0]?.url).toBe(
      'http://example.test/api/candidates?status=vetting&page=2&page_size=25',
    );
  });

  it('percent-encodes question ids in paths', async () => {
    const { api, calls } = makeClient([jsonResponse(200, CANDIDATE)]);
    await api.getCandidate('doc:c0000:q00');
    expect(calls[0]?.url).toBe('http://example.test/api/candidates/doc%3Ac0000%3Aq00');
  });

  it('posts decisions as JSON', async () => {
    const { api, calls } = makeClient([jsonResponse(200, { ...CANDIDATE, version: 1 })]);
    await api.submitDecision('doc:c0000:q00', { action: 'accept', expected_version: 0 });
    expect(calls[0]?.method).toBe('POST');
    expect(calls[0]?.headers['content-type']).toBe('application/json');
    expect(JSON.parse(calls[0]?.body ?? '')).toEqual({ action: 'accept', expected_version: 0 });
  });

  it('passes force through to finalize', async () => {
    const { api, calls } = makeClient([
      jsonResponse(200, { path: 'x', total: 0, counts: {}, sha256: '' }),
    ]);
    await api.finalize(true);
    expect(calls[0]?.url).toBe('http://example.test/api/finalize?force=true');
  });
});

describe('pagination', () => {
  it('listAll walks pages until total is covered', async () => {
    const page = (n: number, count: number, total: number) =>
      jsonResponse(200, {
        items: Array.from({ length: count }, (_, i) => ({
          ...CANDIDATE,
          question_id: `doc:c0000:q${(n - 1) * 100 + i}`,
        })),
        total,
        page: n,
        page_size: 100,
      });
    const { api, calls } = makeClient([page(1, 100, 250), page(2, 100, 250), page(3, 50, 250)]);
    const items = await api.listAll('vetting');
    expect(items).toHaveLength(250);
    expect(calls).toHaveLength(3);
    expect(calls[2]?.url).toContain('page=3');
  });
});

describe('error mapping', () => {
  it('maps the service error shape onto ApiError', async () => {
    const { api } = makeClient([jsonResponse(404, { error: 'not_found', message: 'no such id' })]);
    const err = await api.getCandidate('missing').catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).code).toBe('not_found');
    expect((err as ApiError).message).toBe('no such id');
  });

  it('maps 409 version_conflict onto ConflictError', async () => {
    const { api } = makeClient([
      jsonResponse(409, { error: 'version_conflict', message: 'stale write' }),
    ]);
    const err = await api
      .submitDecision('q', { action: 'accept', expected_version: 0 })
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ConflictError);
    expect(isConflictError(err)).toBe(true);
  });

  it('keeps other 409 codes as plain ApiError', async () => {
    const { api } = makeClient([
      jsonResponse(409, { error: 'pending_items', message: '3 still in vetting' }),
    ]);
    const err = await api.finalize().catch((e: unknown) => e);
    expect(isConflictError(err)).toBe(false);
    expect((err as ApiError).code).toBe('pending_items');
  });

  it('wraps transport failures as network_error', async () => {
    const fetchImpl: FetchLike = async () => {
      throw new TypeError('fetch failed');
    };
    const api = new ReviewApi('http://example.test', '', fetchImpl);
    const err = await api.health().catch((e: unknown) => e);
    expect((err as ApiError).code).toBe('network_error');
    expect((err as ApiError).status).toBe(0);
  });

  it('falls back to http_error for non-JSON error bodies', async () => {
    const { api } = makeClient([new Response('<html>boom</html>', { status: 500 })]);
    const err = await api.health().catch((e: unknown) => e);
    expect((err as ApiError).code).toBe('http_error');
    expect((err as ApiError).message).toBe('HTTP 500');
  });
});
