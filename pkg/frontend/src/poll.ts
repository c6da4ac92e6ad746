import type { Api } from './api.js';
import type { JobStatus } from './types.js';

export interface PollOptions {
  /** First wait between status checks (default 500 ms). */
  intervalMs?: number;
  /** Multiplier applied to the wait after each check (default 1.5). */
  backoffFactor?: number;
  /** Ceiling for the grown interval (default 5000 ms). */
  maxIntervalMs?: number;
  onProgress?: (status: JobStatus) => void;
  /** Injectable for tests. */
  sleep?: (ms: number) => Promise<void>;
}

const wait = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Poll a job until it reaches a terminal state. Resolves with the DONE
 * status; rejects with the failure reason from the status payload on FAILED.
 */
export async function pollJob(api: Api, jobId: string, options: PollOptions = {}): Promise<JobStatus> {
  const { intervalMs = 500, backoffFactor = 1.5, maxIntervalMs = 5000, onProgress, sleep = wait } = options;
  let interval = intervalMs;
  for (;;) {
    const status = await api.jobStatus(jobId);
    onProgress?.(status);
    if (status.state === 'done') return status;
    if (status.state === 'failed') throw new Error(status.error ?? 'ranking job failed');
    await sleep(interval);
    interval = Math.min(interval * backoffFactor, maxIntervalMs);
  }
}
