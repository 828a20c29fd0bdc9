/**
 * Typed client for the chunklab session service.
 *
 * Mirrors schema/session_api_v1.json: tokens are {w, p} objects, labelings
 * are arrays of "I" | "O" | "B", timestamps are epoch milliseconds.
 */

export type ChunkTag = "I" | "O" | "B";

export interface Token {
  w: string;
  p: string;
}

export interface SentenceMsg {
  id: number;
  tokens: Token[];
}

export interface ReferenceSentence extends SentenceMsg {
  tags: ChunkTag[];
}

export interface SessionInfo {
  id: string;
  mode: "annotation" | "rule-writing";
  phase: "feedback" | "active" | "final-eval" | "done";
  iteration: number;
  feedback_index: number;
  pending_batch: { batch: number; size: number } | null;
  annotated_sentences: number;
  annotated_words: number;
  rule_submissions: number;
}

export interface SpanDiff {
  missing: [number, number][];
  extra: [number, number][];
}

export interface FeedbackResult {
  id?: number;
  gold?: ChunkTag[];
  diff?: SpanDiff;
  phase: string;
  next?: SentenceMsg;
}

export interface BatchMsg {
  batch: number | "final";
  size: number;
  sentences: SentenceMsg[];
}

export interface AnnotationsAck {
  iteration: number;
  annotated_sentences: number;
  annotated_words: number;
  duration_seconds: number;
}

export interface Report {
  precision: number;
  recall: number;
  fmeasure: number;
  correct: number;
  proposed: number;
  reference: number;
}

export interface RuleDelta {
  index: number;
  line: number;
  rule: string;
  f_after: number;
  delta: number;
}

export interface RulesResult {
  diagnostics: { line: number; message: string }[];
  rules_parsed: number;
  report: Report;
  deltas: RuleDelta[];
}

export interface EventRecord {
  ts: number;
  kind: string;
  payload: Record<string, unknown>;
}

export interface SessionConfig {
  corpus?: string;
  seed?: number;
  batch_size?: number;
  iterations?: number;
  feedback_limit?: number;
  committee_size?: number;
  split?: "bagging" | "nfold";
  measure?: "vote-entropy" | "f-complement";
  final_size?: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    throw new ApiError(response.status, body.detail ?? response.statusText);
  }
  return body as T;
}

function post<T>(url: string, body: unknown): Promise<T> {
  return request<T>(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
}

export class SessionApi {
  constructor(readonly base: string = "") {}

  createSession(mode: string, config?: SessionConfig): Promise<SessionInfo> {
    return post(`${this.base}/sessions`, config ? { mode, config } : { mode });
  }

  describe(id: string): Promise<SessionInfo> {
    return request(`${this.base}/sessions/${id}`);
  }

  submitFeedback(id: string, tags: ChunkTag[]): Promise<FeedbackResult> {
    return post(`${this.base}/sessions/${id}/feedback`, { tags });
  }

  stopFeedback(id: string): Promise<FeedbackResult> {
    return post(`${this.base}/sessions/${id}/feedback`, { stop: true });
  }

  nextBatch(id: string): Promise<BatchMsg> {
    return request(`${this.base}/sessions/${id}/batch`);
  }

  submitAnnotations(id: string, batch: number, labelings: ChunkTag[][]): Promise<AnnotationsAck> {
    return post(`${this.base}/sessions/${id}/annotations`, { batch, labelings });
  }

  submitRules(id: string, text: string): Promise<RulesResult> {
    return post(`${this.base}/sessions/${id}/rules`, { text });
  }

  submitFinal(id: string, labelings: ChunkTag[][]): Promise<Report> {
    return post(`${this.base}/sessions/${id}/final`, { labelings });
  }

  reference(id: string): Promise<{ sentences: ReferenceSentence[] }> {
    return request(`${this.base}/sessions/${id}/reference`);
  }

  events(id: string): Promise<{ session: string; events: EventRecord[] }> {
    return request(`${this.base}/sessions/${id}/events`);
  }
}
