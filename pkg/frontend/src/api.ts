import type { JobRequest, JobStatus, PositionPayload, QueueEntry } from './types.js';

/** Non-2xx response from the service, carrying the HTTP status and detail. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/**
 * Pick the service origin: the `?api=` query parameter when present
 * (e.g. `?api=http://127.0.0.1:8000`), else same-origin requests.
 */
export function resolveApiBase(search: string = window.location.search): string {
  const base = new URLSearchParams(search).get('api');
  return base ? base.replace(/\/+$/, '') : '';
}

/** Thin JSON client for the /v1 API. All ranking logic stays server-side. */
export class Api {
  constructor(
    private readonly base: string = '',
    private readonly fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { 'content-type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    const payload: unknown = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(response.status, extractDetail(payload) ?? `HTTP ${response.status}`);
    }
    return payload as T;
  }

  async loadQueue(): Promise<QueueEntry[]> {
    const payload = await this.request<{ entries: QueueEntry[] }>('GET', '/v1/queue');
    return payload.entries;
  }

  async submitJob(request: JobRequest): Promise<string> {
    const payload = await this.request<{ id: string }>('POST', '/v1/jobs', request);
    return payload.id;
  }

  jobStatus(jobId: string): Promise<JobStatus> {
    return this.request<JobStatus>('GET', `/v1/jobs/${encodeURIComponent(jobId)}`);
  }

  submitVerdict(fen: string, verdict: 'liked' | 'disliked'): Promise<QueueEntry> {
    return this.request<QueueEntry>('POST', '/v1/verdict', { fen, verdict });
  }

  position(entryId: number): Promise<PositionPayload> {
    return this.request<PositionPayload>('GET', `/v1/positions/${entryId}`);
  }
}

function extractDetail(payload: unknown): string | undefined {
  if (payload && typeof payload === 'object' && 'detail' in payload) {
    const detail = (payload as { detail: unknown }).detail;
    if (typeof detail === 'string') return detail;
  }
  return undefined;
}
