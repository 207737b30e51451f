/**
 * Typed HTTP client for the review service.
 *
 * Every error response has the shape {"error": <code>, "message": <text>};
 * the client maps that onto ApiError, with 409 version_conflict singled out
 * as ConflictError so callers can branch on stale writes.
 */

import type {
  Candidate,
  CandidatePage,
  DecisionBody,
  ErrorBody,
  FinalizeResult,
  HealthResult,
} from './types.js';

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.name = 'ApiError';
    this.status = status;
    this.code = code;
  }
}

export class ConflictError extends ApiError {
  constructor(message: string) {
    super(409, 'version_conflict', message);
    this.name = 'ConflictError';
  }
}

export function isConflictError(err: unknown): err is ConflictError {
  return err instanceof ConflictError;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

// below the server's page_size cap of 200
const PAGE_SIZE = 100;

export class ReviewApi {
  private readonly baseUrl: string;
  private token: string; // held in memory only, never persisted
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, token = '', fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
    this.token = token;
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  setToken(token: string): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { accept: 'application/json' };
    if (this.token) headers['authorization'] = `Bearer ${this.token}`;
    if (body !== undefined) headers['content-type'] = 'application/json';

    let res: Response;
    try {
      res = await this.fetchImpl(this.baseUrl + path, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      throw new ApiError(0, 'network_error', message);
    }

    if (res.ok) {
      return (await res.json()) as T;
    }

    let parsed: ErrorBody = { error: 'http_error', message: `HTTP ${res.status}` };
    try {
      const data: unknown = await res.json();
      if (
        typeof data === 'object' &&
        data !== null &&
        typeof (data as ErrorBody).error === 'string' &&
        typeof (data as ErrorBody).message === 'string'
      ) {
        parsed = data as ErrorBody;
      }
    } catch {
      // non-JSON error body; keep the fallback
    }
    if (res.status === 409 && parsed.error === 'version_conflict') {
      throw new ConflictError(parsed.message);
    }
    throw new ApiError(res.status, parsed.error, parsed.message);
  }

  health(): Promise<HealthResult> {
    return this.request('GET', '/api/health');
  }

  listCandidates(
    opts: { status?: string; page?: number; pageSize?: number } = {},
  ): Promise<CandidatePage> {
    const params = new URLSearchParams();
    if (opts.status) params.set('status', opts.status);
    if (opts.page !== undefined) params.set('page', String(opts.page));
    if (opts.pageSize !== undefined) params.set('page_size', String(opts.pageSize));
    const qs = params.toString();
    return this.request('GET', `/api/candidates${qs ? `?${qs}` : ''}`);
  }

  /** Walk every page of the listing until `total` items have been collected. */
  async listAll(status?: string): Promise<Candidate[]> {
    const items: Candidate[] = [];
    for (let page = 1; ; page += 1) {
      const batch = await this.listCandidates({ status, page, pageSize: PAGE_SIZE });
      items.push(...batch.items);
      if (items.length >= batch.total || batch.items.length === 0) {
        return items;
      }
    }
  }

  getCandidate(questionId: string): Promise<Candidate> {
    return this.request('GET', `/api/candidates/${encodeURIComponent(questionId)}`);
  }

  submitDecision(questionId: string, body: DecisionBody): Promise<Candidate> {
    return this.request('POST', `/api/candidates/${encodeURIComponent(questionId)}/decision`, body);
  }

  finalize(force = false): Promise<FinalizeResult> {
    return this.request('POST', `/api/finalize${force ? '?force=true' : ''}`);
  }
}
