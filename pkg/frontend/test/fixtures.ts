import type { PositionPayload, QueueEntry } from '../src/types.js';

/** Seven ranked entries with reference ARP values, in server order. */
export const SEVEN_ENTRIES: QueueEntry[] = [
  { id: 1, rank: 1, fen: '8/8/2Q5/1b6/1r6/5B2/k1N5/2K5 w - - 0 1', arp: 99.21, verdict: 'pending' },
  { id: 2, rank: 2, fen: '8/5K1k/8/8/7N/1p6/8/B7 w - - 0 1', arp: 97.56, verdict: 'pending' },
  { id: 3, rank: 3, fen: '3K4/6Rr/8/5B2/2Q5/8/8/3bk3 w - - 0 1', arp: 96.9, verdict: 'pending' },
  { id: 4, rank: 4, fen: '6Q1/8/8/1R5B/8/6R1/1Pp4K/1k6 w - - 0 1', arp: 93.89, verdict: 'pending' },
  { id: 5, rank: 5, fen: '1r6/8/6P1/1p1R4/k4N2/3p4/P5K1/2Q5 w - - 0 1', arp: 85.96, verdict: 'pending' },
  { id: 6, rank: 6, fen: '8/5R2/1k5K/2N2NR1/8/8/1p6/8 w - - 0 1', arp: 81.15, verdict: 'pending' },
  { id: 7, rank: 7, fen: '6R1/8/2K5/k7/8/3p4/1P6/8 w - - 0 1', arp: 73.61, verdict: 'pending' },
];

/** Board payload for the top entry: queen/bishops/rook mate study layout. */
export function positionPayload(entry: QueueEntry): PositionPayload {
  const squares = Array<string>(64).fill('');
  squares[18] = 'Q'; // c6
  squares[25] = 'b'; // b5
  squares[33] = 'r'; // b4
  squares[45] = 'B'; // f3
  squares[48] = 'k'; // a2
  squares[50] = 'N'; // c2
  squares[58] = 'K'; // c1
  return { ...entry, squares, side_to_move: 'w' };
}
