import { describe, expect, it, vi } from 'vitest';
import type { Api } from '../src/api.js';
import { pollJob } from '../src/poll.js';
import type { JobStatus } from '../src/types.js';

function status(overrides: Partial<JobStatus>): JobStatus {
  return {
    id: 'job-1',
    state: 'running',
    total: 10,
    done: 0,
    progress: 0,
    seed: 0,
    created_at: '2021-03-01T00:00:00',
    ...overrides,
  };
}

function apiWithStatuses(statuses: JobStatus[]): Api {
  let call = 0;
  return {
    jobStatus: vi.fn(() => Promise.resolve(statuses[Math.min(call++, statuses.length - 1)]!)),
  } as unknown as Api;
}

describe('pollJob', () => {
  it('resolves with the DONE status and reports every intermediate status', async () => {
    const seen: number[] = [];
    const api = apiWithStatuses([
      status({ done: 3, progress: 0.3 }),
      status({ done: 7, progress: 0.7 }),
      status({ state: 'done', done: 10, progress: 1, result_size: 10 }),
    ]);

    const result = await pollJob(api, 'job-1', {
      sleep: () => Promise.resolve(),
      onProgress: (s) => seen.push(s.progress),
    });

    expect(result.state).toBe('done');
    expect(result.result_size).toBe(10);
    expect(seen).toEqual([0.3, 0.7, 1]);
  });

  it('rejects with the failure reason from the status payload', async () => {
    const api = apiWithStatuses([
      status({ progress: 0.5 }),
      status({ state: 'failed', error: 'need at least 12 records' }),
    ]);

    await expect(pollJob(api, 'job-1', { sleep: () => Promise.resolve() })).rejects.toThrow(
      'need at least 12 records',
    );
  });

  it('grows the wait by the backoff factor up to the ceiling', async () => {
    const waits: number[] = [];
    const api = apiWithStatuses([
      status({}),
      status({}),
      status({}),
      status({}),
      status({ state: 'done', progress: 1 }),
    ]);

    await pollJob(api, 'job-1', {
      intervalMs: 100,
      backoffFactor: 2,
      maxIntervalMs: 350,
      sleep: (ms) => {
        waits.push(ms);
        return Promise.resolve();
      },
    });

    expect(waits).toEqual([100, 200, 350, 350]);
  });

  it('propagates status-endpoint failures', async () => {
    const api = {
      jobStatus: vi.fn(() => Promise.reject(new TypeError('fetch failed'))),
    } as unknown as Api;

    await expect(pollJob(api, 'job-1', { sleep: () => Promise.resolve() })).rejects.toThrow('fetch failed');
  });
});
