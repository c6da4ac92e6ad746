import { formatArp } from './board.js';
import type { QueueEntry, VerdictState } from './types.js';

export interface CardHandlers {
  onVerdict: (entry: QueueEntry, verdict: 'liked' | 'disliked', card: HTMLElement) => void;
  onShowBoard?: (entry: QueueEntry, card: HTMLElement) => void;
}

/**
 * Render the ranked queue. Card order equals server rank order; the UI never
 * re-sorts. An empty list renders the placeholder.
 */
export function renderQueue(container: HTMLElement, entries: QueueEntry[], handlers: CardHandlers): void {
  container.replaceChildren();
  if (entries.length === 0) {
    const empty = document.createElement('div');
    empty.className = 'placeholder';
    empty.textContent = 'no ranked collection yet';
    container.appendChild(empty);
    return;
  }
  for (const entry of entries) {
    container.appendChild(buildCard(entry, handlers));
  }
}

function buildCard(entry: QueueEntry, handlers: CardHandlers): HTMLElement {
  const card = document.createElement('article');
  card.className = 'card';
  card.dataset.id = String(entry.id);
  card.dataset.fen = entry.fen;

  const header = document.createElement('div');
  header.className = 'card-header';

  const rank = document.createElement('span');
  rank.className = 'rank';
  rank.textContent = `#${entry.rank}`;

  const badge = document.createElement('span');
  badge.className = 'arp-badge';
  badge.textContent = formatArp(entry.arp);
  badge.title = 'average rank percentage';

  const chip = document.createElement('span');
  chip.className = 'verdict';

  header.append(rank, badge, chip);

  const fen = document.createElement('code');
  fen.className = 'fen';
  fen.textContent = entry.fen;
  fen.title = 'show board';
  if (handlers.onShowBoard) {
    fen.addEventListener('click', () => handlers.onShowBoard?.(entry, card));
  }

  const actions = document.createElement('div');
  actions.className = 'card-actions';
  const like = document.createElement('button');
  like.className = 'btn-like';
  like.textContent = 'Like';
  like.addEventListener('click', () => handlers.onVerdict(entry, 'liked', card));
  const dislike = document.createElement('button');
  dislike.className = 'btn-dislike';
  dislike.textContent = 'Dislike';
  dislike.addEventListener('click', () => handlers.onVerdict(entry, 'disliked', card));
  actions.append(like, dislike);

  const boardSlot = document.createElement('div');
  boardSlot.className = 'board-slot';

  card.append(header, fen, actions, boardSlot);
  setCardVerdict(card, entry.verdict);
  return card;
}

/** Move a card between verdict states: chip text plus button disabling. */
export function setCardVerdict(card: HTMLElement, verdict: VerdictState): void {
  const chip = card.querySelector<HTMLElement>('.verdict');
  if (chip) {
    chip.textContent = verdict.toUpperCase();
    chip.dataset.state = verdict;
  }
  const decided = verdict !== 'pending';
  for (const button of card.querySelectorAll<HTMLButtonElement>('.card-actions button')) {
    button.disabled = decided;
  }
  card.classList.toggle('decided', decided);
}

export function cardVerdict(card: HTMLElement): VerdictState {
  const state = card.querySelector<HTMLElement>('.verdict')?.dataset.state;
  return (state as VerdictState | undefined) ?? 'pending';
}
