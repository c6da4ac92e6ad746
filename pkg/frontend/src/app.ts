import { Api, ApiError } from './api.js';
import { renderBoard } from './board.js';
import { pollJob, type PollOptions } from './poll.js';
import { cardVerdict, renderQueue, setCardVerdict } from './queue.js';
import type { JobRequest, QueueEntry } from './types.js';

export interface AppOptions {
  poll?: PollOptions;
  /** Toast lifetime in ms (default 4000). */
  toastMs?: number;
}

type BannerKind = 'none' | 'offline' | 'job';

/**
 * Single-page triage app. The UI holds no ranking logic; every number shown
 * is read from the service. One verdict may be in flight per card, and one
 * ranking job at a time.
 */
export class App {
  private readonly api: Api;
  private readonly options: AppOptions;
  private readonly queueEl: HTMLElement;
  private readonly bannerEl: HTMLElement;
  private readonly toastsEl: HTMLElement;
  private readonly rerankButton: HTMLButtonElement;
  private readonly reuseButton: HTMLButtonElement;
  private readonly fileInput: HTMLInputElement;
  private entries: QueueEntry[] = [];
  private bannerKind: BannerKind = 'none';
  private jobRunning = false;

  constructor(root: HTMLElement, api: Api, options: AppOptions = {}) {
    this.api = api;
    this.options = options;

    root.replaceChildren();
    root.className = 'app';

    const header = document.createElement('header');
    const title = document.createElement('h1');
    title.textContent = 'fenrank triage';
    header.appendChild(title);

    const controls = document.createElement('div');
    controls.className = 'controls';

    this.fileInput = document.createElement('input');
    this.fileInput.type = 'file';
    this.fileInput.accept = '.pgn,.fen,.txt';
    this.fileInput.className = 'candidates-file';

    this.rerankButton = document.createElement('button');
    this.rerankButton.className = 'btn-rerank';
    this.rerankButton.textContent = 'Rank file';
    this.rerankButton.addEventListener('click', () => void this.rerankFromFile());

    this.reuseButton = document.createElement('button');
    this.reuseButton.className = 'btn-rerank-pending';
    this.reuseButton.textContent = 'Re-rank pending';
    this.reuseButton.addEventListener('click', () => void this.rerankPending());

    controls.append(this.fileInput, this.rerankButton, this.reuseButton);
    header.appendChild(controls);

    this.bannerEl = document.createElement('div');
    this.bannerEl.className = 'banner';
    this.bannerEl.hidden = true;

    this.queueEl = document.createElement('main');
    this.queueEl.className = 'queue';

    this.toastsEl = document.createElement('div');
    this.toastsEl.className = 'toasts';

    root.append(header, this.bannerEl, this.queueEl, this.toastsEl);
  }

  async start(): Promise<void> {
    await this.reloadQueue();
  }

  // -- queue -----------------------------------------------------------

  async reloadQueue(): Promise<void> {
    let entries: QueueEntry[];
    try {
      entries = await this.api.loadQueue();
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        entries = [];
      } else {
        this.showOffline();
        return;
      }
    }
    if (this.bannerKind === 'offline') this.clearBanner();
    this.entries = entries;
    renderQueue(this.queueEl, entries, {
      onVerdict: (entry, verdict, card) => void this.handleVerdict(entry, verdict, card),
      onShowBoard: (entry, card) => void this.toggleBoard(entry, card),
    });
  }

  private showOffline(): void {
    this.setBanner('service unreachable', 'offline', { retry: true });
  }

  // -- verdicts ----------------------------------------------------------

  private async handleVerdict(entry: QueueEntry, verdict: 'liked' | 'disliked', card: HTMLElement): Promise<void> {
    if (cardVerdict(card) !== 'pending' || card.dataset.busy) return;
    card.dataset.busy = '1';
    setCardVerdict(card, verdict); // optimistic
    try {
      const updated = await this.api.submitVerdict(entry.fen, verdict);
      entry.verdict = updated.verdict;
      setCardVerdict(card, updated.verdict);
    } catch (err) {
      setCardVerdict(card, 'pending'); // rollback
      if (err instanceof ApiError && err.status === 409) {
        this.toast('already decided');
      } else {
        this.toast(describeError(err));
      }
    } finally {
      delete card.dataset.busy;
    }
  }

  // -- boards ------------------------------------------------------------

  private async toggleBoard(entry: QueueEntry, card: HTMLElement): Promise<void> {
    const slot = card.querySelector<HTMLElement>('.board-slot');
    if (!slot) return;
    if (slot.childElementCount > 0) {
      slot.replaceChildren();
      return;
    }
    try {
      const position = await this.api.position(entry.id);
      slot.replaceChildren(renderBoard(position));
    } catch (err) {
      this.toast(describeError(err));
    }
  }

  // -- ranking jobs --------------------------------------------------------

  private async rerankFromFile(): Promise<void> {
    const file = this.fileInput.files?.[0];
    if (!file) {
      this.toast('choose a candidates file first');
      return;
    }
    const text = await file.text();
    await this.startRerank(requestFromText(text));
  }

  private async rerankPending(): Promise<void> {
    const pending = this.entries.filter((entry) => entry.verdict === 'pending');
    if (pending.length === 0) {
      this.toast('no pending positions to re-rank');
      return;
    }
    await this.startRerank({ candidates: pending.map((entry) => entry.fen) });
  }

  async startRerank(request: JobRequest): Promise<void> {
    if (this.jobRunning) return;
    this.jobRunning = true;
    this.rerankButton.disabled = true;
    this.reuseButton.disabled = true;
    this.setBanner('ranking… 0%', 'job');
    try {
      const jobId = await this.api.submitJob(request);
      const status = await pollJob(this.api, jobId, {
        ...this.options.poll,
        onProgress: (s) => {
          this.setBanner(`ranking… ${Math.round(s.progress * 100)}%`, 'job');
          this.options.poll?.onProgress?.(s);
        },
      });
      await this.reloadQueue();
      this.setBanner(`ranking done: ${status.result_size ?? 0} positions`, 'job');
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.setBanner('a ranking is already running', 'job');
      } else {
        this.setBanner(`ranking failed: ${describeError(err)}`, 'job');
      }
    } finally {
      this.jobRunning = false;
      this.rerankButton.disabled = false;
      this.reuseButton.disabled = false;
    }
  }

  // -- chrome --------------------------------------------------------------

  private setBanner(text: string, kind: BannerKind, options: { retry?: boolean } = {}): void {
    this.bannerKind = kind;
    this.bannerEl.hidden = false;
    this.bannerEl.replaceChildren();
    const span = document.createElement('span');
    span.textContent = text;
    this.bannerEl.appendChild(span);
    if (options.retry) {
      const retry = document.createElement('button');
      retry.className = 'btn-retry';
      retry.textContent = 'retry';
      retry.addEventListener('click', () => void this.reloadQueue());
      this.bannerEl.appendChild(retry);
    }
  }

  private clearBanner(): void {
    this.bannerKind = 'none';
    this.bannerEl.hidden = true;
    this.bannerEl.replaceChildren();
  }

  private toast(message: string): void {
    const toast = document.createElement('div');
    toast.className = 'toast';
    toast.textContent = message;
    this.toastsEl.appendChild(toast);
    setTimeout(() => toast.remove(), this.options.toastMs ?? 4000);
  }
}

/** A PGN upload starts with a tag pair; anything else is a FEN-per-line list. */
export function requestFromText(text: string): JobRequest {
  if (text.trimStart().startsWith('[')) {
    return { pgn: text };
  }
  const candidates = text
    .split('\n')
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  return { candidates };
}

function describeError(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
