import { beforeEach, describe, expect, it, vi, type Mock } from 'vitest';
import { Api, ApiError } from '../src/api.js';
import { App, requestFromText } from '../src/app.js';
import type { JobStatus, QueueEntry } from '../src/types.js';
import { positionPayload, SEVEN_ENTRIES } from './fixtures.js';

interface FakeApi {
  loadQueue: Mock;
  submitJob: Mock;
  jobStatus: Mock;
  submitVerdict: Mock;
  position: Mock;
}

function fakeApi(): FakeApi {
  return {
    loadQueue: vi.fn().mockResolvedValue(SEVEN_ENTRIES.map((entry) => ({ ...entry }))),
    submitJob: vi.fn().mockResolvedValue('job-1'),
    jobStatus: vi.fn().mockResolvedValue(doneStatus(7)),
    submitVerdict: vi.fn(),
    position: vi.fn(),
  };
}

function doneStatus(resultSize: number): JobStatus {
  return {
    id: 'job-1',
    state: 'done',
    total: resultSize,
    done: resultSize,
    progress: 1,
    seed: 0,
    created_at: '2021-03-01T00:00:00',
    result_size: resultSize,
  };
}

function runningStatus(progress: number): JobStatus {
  return { ...doneStatus(0), state: 'running', progress, result_size: undefined };
}

async function makeApp(api: FakeApi): Promise<App> {
  const root = document.createElement('div');
  document.body.appendChild(root);
  const app = new App(root, api as unknown as Api, { poll: { intervalMs: 1, sleep: () => Promise.resolve() } });
  await app.start();
  return app;
}

function appRoot(): HTMLElement {
  return document.body.querySelector('.app')!;
}

const flush = () => new Promise<void>((resolve) => setTimeout(resolve, 0));

function deferred<T>(): { promise: Promise<T>; resolve: (value: T) => void; reject: (err: unknown) => void } {
  let resolve!: (value: T) => void;
  let reject!: (err: unknown) => void;
  const promise = new Promise<T>((res, rej) => {
    resolve = res;
    reject = rej;
  });
  return { promise, resolve, reject };
}

beforeEach(() => {
  document.body.replaceChildren();
});

describe('queue loading', () => {
  it('renders the seven-entry queue in server order with ARP badges', async () => {
    await makeApp(fakeApi());

    const badges = [...appRoot().querySelectorAll('.card .arp-badge')].map((badge) => badge.textContent);
    expect(badges).toEqual(['99.21', '97.56', '96.90', '93.89', '85.96', '81.15', '73.61']);
  });

  it('shows the placeholder when no ranking has completed yet', async () => {
    const api = fakeApi();
    api.loadQueue.mockRejectedValue(new ApiError(404, 'no completed ranking yet'));
    await makeApp(api);

    expect(appRoot().querySelector('.placeholder')!.textContent).toBe('no ranked collection yet');
    expect(appRoot().querySelector<HTMLElement>('.banner')!.hidden).toBe(true);
  });

  it('shows a retry banner when the service is unreachable and recovers on retry', async () => {
    const api = fakeApi();
    api.loadQueue.mockRejectedValueOnce(new TypeError('fetch failed'));
    await makeApp(api);

    const banner = appRoot().querySelector<HTMLElement>('.banner')!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain('service unreachable');
    expect(appRoot().querySelectorAll('.card')).toHaveLength(0);

    banner.querySelector<HTMLButtonElement>('.btn-retry')!.click();
    await flush();

    expect(appRoot().querySelectorAll('.card')).toHaveLength(7);
    expect(appRoot().querySelector<HTMLElement>('.banner')!.hidden).toBe(true);
  });
});

describe('verdicts', () => {
  it('applies the verdict optimistically and keeps it on success', async () => {
    const api = fakeApi();
    const pending = deferred<QueueEntry>();
    api.submitVerdict.mockReturnValue(pending.promise);
    await makeApp(api);

    const card = appRoot().querySelector<HTMLElement>('.card')!;
    card.querySelector<HTMLButtonElement>('.btn-like')!.click();

    // Optimistic: LIKED before the service responds.
    expect(card.querySelector('.verdict')!.textContent).toBe('LIKED');
    expect(card.querySelector<HTMLButtonElement>('.btn-like')!.disabled).toBe(true);
    expect(card.querySelector<HTMLButtonElement>('.btn-dislike')!.disabled).toBe(true);

    pending.resolve({ ...SEVEN_ENTRIES[0]!, verdict: 'liked' });
    await flush();

    expect(card.querySelector('.verdict')!.textContent).toBe('LIKED');
    expect(api.submitVerdict).toHaveBeenCalledWith(SEVEN_ENTRIES[0]!.fen, 'liked');
  });

  it('rolls back to PENDING with an error toast when the submit fails', async () => {
    const api = fakeApi();
    api.submitVerdict.mockRejectedValue(new TypeError('fetch failed'));
    await makeApp(api);

    const card = appRoot().querySelector<HTMLElement>('.card')!;
    card.querySelector<HTMLButtonElement>('.btn-like')!.click();
    expect(card.querySelector('.verdict')!.textContent).toBe('LIKED');
    await flush();

    expect(card.querySelector('.verdict')!.textContent).toBe('PENDING');
    expect(card.querySelector<HTMLButtonElement>('.btn-like')!.disabled).toBe(false);
    expect(appRoot().querySelector('.toast')!.textContent).toBe('fetch failed');
  });

  it("shows 'already decided' on a 409 conflict", async () => {
    const api = fakeApi();
    api.submitVerdict.mockRejectedValue(new ApiError(409, 'verdict already liked'));
    await makeApp(api);

    const card = appRoot().querySelector<HTMLElement>('.card')!;
    card.querySelector<HTMLButtonElement>('.btn-dislike')!.click();
    await flush();

    expect(card.querySelector('.verdict')!.textContent).toBe('PENDING');
    expect(appRoot().querySelector('.toast')!.textContent).toBe('already decided');
  });

  it('sends no request for a card that is already decided', async () => {
    const api = fakeApi();
    api.loadQueue.mockResolvedValue([{ ...SEVEN_ENTRIES[0]!, verdict: 'liked' }]);
    await makeApp(api);

    const card = appRoot().querySelector<HTMLElement>('.card')!;
    const dislike = card.querySelector<HTMLButtonElement>('.btn-dislike')!;
    expect(dislike.disabled).toBe(true);
    dislike.click();
    await flush();

    expect(api.submitVerdict).not.toHaveBeenCalled();
    expect(card.querySelector('.verdict')!.textContent).toBe('LIKED');
  });

  it('allows one in-flight verdict per card', async () => {
    const api = fakeApi();
    const pending = deferred<QueueEntry>();
    api.submitVerdict.mockReturnValue(pending.promise);
    await makeApp(api);

    const card = appRoot().querySelector<HTMLElement>('.card')!;
    card.querySelector<HTMLButtonElement>('.btn-like')!.click();
    card.querySelector<HTMLButtonElement>('.btn-dislike')!.click();

    pending.resolve({ ...SEVEN_ENTRIES[0]!, verdict: 'liked' });
    await flush();

    expect(api.submitVerdict).toHaveBeenCalledTimes(1);
  });
});

describe('ranking jobs', () => {
  it('runs a job to completion, reports progress, and reloads the queue', async () => {
    const api = fakeApi();
    const progress: number[] = [];
    api.jobStatus.mockResolvedValueOnce(runningStatus(0.5)).mockResolvedValueOnce(doneStatus(2));
    const reranked = SEVEN_ENTRIES.slice(0, 2).map((entry, index) => ({
      ...entry,
      id: index + 1,
      rank: index + 1,
    }));
    api.loadQueue
      .mockResolvedValueOnce(SEVEN_ENTRIES.map((entry) => ({ ...entry })))
      .mockResolvedValueOnce(reranked);

    const root = document.createElement('div');
    document.body.appendChild(root);
    const app = new App(root, api as unknown as Api, {
      poll: { intervalMs: 1, sleep: () => Promise.resolve(), onProgress: (s) => progress.push(s.progress) },
    });
    await app.start();

    await app.startRerank({ candidates: reranked.map((entry) => entry.fen) });

    expect(api.submitJob).toHaveBeenCalledWith({ candidates: reranked.map((entry) => entry.fen) });
    expect(progress).toEqual([0.5, 1]);
    expect(appRoot().querySelector('.banner')!.textContent).toBe('ranking done: 2 positions');
    expect(appRoot().querySelectorAll('.card')).toHaveLength(2);
    expect(api.loadQueue).toHaveBeenCalledTimes(2);
    expect(appRoot().querySelector<HTMLButtonElement>('.btn-rerank')!.disabled).toBe(false);
  });

  it("surfaces 'a ranking is already running' on a 409 submit", async () => {
    const api = fakeApi();
    api.submitJob.mockRejectedValue(new ApiError(409, 'a ranking job is already running'));
    const app = await makeApp(api);

    await app.startRerank({ candidates: ['8/8/8/8/8/8/8/8 w - - 0 1'] });

    expect(appRoot().querySelector('.banner')!.textContent).toBe('a ranking is already running');
  });

  it('shows the failure reason from the status payload when the job fails', async () => {
    const api = fakeApi();
    api.jobStatus.mockResolvedValue({
      ...doneStatus(0),
      state: 'failed',
      error: 'need at least 12 liked records',
    });
    const app = await makeApp(api);

    await app.startRerank({ candidates: ['8/8/8/8/8/8/8/8 w - - 0 1'] });

    expect(appRoot().querySelector('.banner')!.textContent).toBe('ranking failed: need at least 12 liked records');
  });

  it('disables the rerank buttons while a job is in flight', async () => {
    const api = fakeApi();
    const submitted = deferred<string>();
    api.submitJob.mockReturnValue(submitted.promise);
    const app = await makeApp(api);

    const running = app.startRerank({ candidates: ['8/8/8/8/8/8/8/8 w - - 0 1'] });
    await flush();

    const rerank = appRoot().querySelector<HTMLButtonElement>('.btn-rerank')!;
    const reuse = appRoot().querySelector<HTMLButtonElement>('.btn-rerank-pending')!;
    expect(rerank.disabled).toBe(true);
    expect(reuse.disabled).toBe(true);

    // A second start while one is in flight submits nothing.
    await app.startRerank({ candidates: ['ignored'] });
    expect(api.submitJob).toHaveBeenCalledTimes(1);

    submitted.resolve('job-1');
    await running;
    expect(rerank.disabled).toBe(false);
    expect(reuse.disabled).toBe(false);
  });

  it('re-ranks only the pending entries', async () => {
    const api = fakeApi();
    api.loadQueue.mockResolvedValue([
      { ...SEVEN_ENTRIES[0]!, verdict: 'liked' },
      { ...SEVEN_ENTRIES[1]! },
      { ...SEVEN_ENTRIES[2]!, verdict: 'disliked' },
      { ...SEVEN_ENTRIES[3]! },
    ]);
    await makeApp(api);

    appRoot().querySelector<HTMLButtonElement>('.btn-rerank-pending')!.click();
    await flush();

    expect(api.submitJob).toHaveBeenCalledWith({
      candidates: [SEVEN_ENTRIES[1]!.fen, SEVEN_ENTRIES[3]!.fen],
    });
  });

  it('asks for a file before ranking when none is chosen', async () => {
    const api = fakeApi();
    await makeApp(api);

    appRoot().querySelector<HTMLButtonElement>('.btn-rerank')!.click();
    await flush();

    expect(api.submitJob).not.toHaveBeenCalled();
    expect(appRoot().querySelector('.toast')!.textContent).toBe('choose a candidates file first');
  });
});

describe('boards', () => {
  it('toggles an inline board built from the positions payload', async () => {
    const api = fakeApi();
    api.position.mockImplementation((id: number) =>
      Promise.resolve(positionPayload(SEVEN_ENTRIES.find((entry) => entry.id === id)!)),
    );
    await makeApp(api);

    const card = appRoot().querySelector<HTMLElement>('.card')!;
    card.querySelector<HTMLElement>('.fen')!.click();
    await flush();

    expect(api.position).toHaveBeenCalledWith(1);
    expect(card.querySelectorAll('.board-slot .square')).toHaveLength(64);

    card.querySelector<HTMLElement>('.fen')!.click();
    await flush();
    expect(card.querySelectorAll('.board-slot .square')).toHaveLength(0);
  });
});

describe('requestFromText', () => {
  it('treats a tag-pair document as PGN', () => {
    const pgn = '[Event "?"]\n[FEN "8/8/8/8/8/8/8/8 w - - 0 1"]\n\n*\n';
    expect(requestFromText(pgn)).toEqual({ pgn });
  });

  it('treats anything else as one FEN per line, skipping blanks', () => {
    const text = '8/8/2Q5/1b6/1r6/5B2/k1N5/2K5 w - - 0 1\n\n  8/5K1k/8/8/7N/1p6/8/B7 w - - 0 1  \n';
    expect(requestFromText(text)).toEqual({
      candidates: ['8/8/2Q5/1b6/1r6/5B2/k1N5/2K5 w - - 0 1', '8/5K1k/8/8/7N/1p6/8/B7 w - - 0 1'],
    });
  });
});
