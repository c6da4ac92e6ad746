import type { PositionPayload } from './types.js';

const GLYPHS: Record<string, string> = {
  K: '♔',
  Q: '♕',
  R: '♖',
  B: '♗',
  N: '♘',
  P: '♙',
  k: '♚',
  q: '♛',
  r: '♜',
  b: '♝',
  n: '♞',
  p: '♟',
};

/** ARP badges always show two decimals. */
export function formatArp(arp: number): string {
  return arp.toFixed(2);
}

/**
 * Build a board panel from a /v1/positions payload. The output is a pure
 * function of the payload: squares arrive in reading order (a8..h8 first,
 * a1..h1 last) and render in standard orientation, a1 dark and h1 light.
 */
export function renderBoard(position: PositionPayload): HTMLElement {
  const panel = document.createElement('div');
  panel.className = 'board-panel';

  const board = document.createElement('div');
  board.className = 'board';
  position.squares.forEach((piece, index) => {
    const row = Math.floor(index / 8);
    const col = index % 8;
    const cell = document.createElement('div');
    cell.className = `square ${(row + col) % 2 === 0 ? 'light' : 'dark'}`;
    cell.textContent = GLYPHS[piece] ?? '';
    board.appendChild(cell);
  });
  panel.appendChild(board);

  const caption = document.createElement('div');
  caption.className = 'board-caption';

  const side = document.createElement('span');
  side.className = 'side-to-move';
  side.textContent = position.side_to_move === 'w' ? 'white to move' : 'black to move';

  const fen = document.createElement('code');
  fen.className = 'fen';
  fen.textContent = position.fen;

  const badge = document.createElement('span');
  badge.className = 'arp-badge';
  badge.textContent = formatArp(position.arp);

  caption.append(side, fen, badge);
  panel.appendChild(caption);
  return panel;
}
