/** Payload shapes returned by the /v1 triage service. */

export type VerdictState = 'pending' | 'liked' | 'disliked';

export type JobState = 'queued' | 'running' | 'done' | 'failed';

export interface QueueEntry {
  id: number;
  rank: number;
  fen: string;
  arp: number;
  verdict: VerdictState;
}

export interface JobStatus {
  id: string;
  state: JobState;
  total: number;
  done: number;
  progress: number;
  seed: number;
  created_at: string;
  error?: string;
  result_size?: number;
}

/** Queue entry enriched with board data from /v1/positions/{id}. */
export interface PositionPayload extends QueueEntry {
  /** 64 cells in reading order: a8..h8 first, a1..h1 last. Empty squares are "". */
  squares: string[];
  side_to_move: 'w' | 'b';
}

export interface JobRequest {
  candidates?: string[];
  pgn?: string;
  seed?: number;
}
