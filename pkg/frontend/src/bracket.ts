/**
 * Click-to-bracket state machine for one sentence.
 *
 * A chunk is committed by marking its two boundaries (any order); one
 * boundary may be pending at a time.  Clicking a committed boundary
 * reopens it, so toggling the same gap twice restores the state.  Every
 * placement that would nest or overlap chunks is refused and flagged, so
 * committed spans are always disjoint and serialize to valid IOB1.
 */

import type { ChunkTag, Token } from "./api.js";

export interface Span {
  start: number;
  end: number;
}

export interface Pending {
  gap: number;
  kind: "open" | "close";
}

export interface BracketState {
  tokens: Token[];
  spans: Span[];          // sorted, disjoint, non-nested
  pending: Pending | null;
  refused: boolean;       // last toggle was rejected (visual cue)
}

export function newBracketState(tokens: Token[], spans: Span[] = []): BracketState {
  return { tokens, spans: sortSpans(spans), pending: null, refused: false };
}

function sortSpans(spans: Span[]): Span[] {
  return [...spans].sort((a, b) => a.start - b.start);
}

function overlaps(spans: Span[], start: number, end: number): boolean {
  return spans.some((s) => s.start < end && start < s.end);
}

function strictlyInside(spans: Span[], gap: number): boolean {
  return spans.some((s) => s.start < gap && gap < s.end);
}

function refuse(state: BracketState): BracketState {
  return { ...state, refused: true };
}

/** Toggle a chunk boundary at the gap before token `gap` (0..tokens.length). */
export function toggleBoundary(state: BracketState, gap: number): BracketState {
  if (gap < 0 || gap > state.tokens.length) {
    return refuse(state);
  }
  const spans = state.spans;
  if (state.pending) {
    const { gap: pg, kind } = state.pending;
    if (pg === gap) {
      return { ...state, pending: null, refused: false };
    }
    const [start, end] = kind === "open" ? [pg, gap] : [gap, pg];
    if (start >= end || overlaps(spans, start, end)) {
      return refuse(state);
    }
    return {
      ...state,
      spans: sortSpans([...spans, { start, end }]),
      pending: null,
      refused: false,
    };
  }
  // No pending boundary.  Priority: a click strictly inside a chunk is
  // refused; on a chunk's start it reopens that chunk (pending close); on
  // any gap with a free token after it, it starts a new chunk, which keeps
  // adjacent chunks reachable ("( a ) ( b )" via 0,1,1,2); only a chunk
  // ending at the very last gap reopens from its end.
  if (strictlyInside(spans, gap)) {
    return refuse(state);
  }
  const atStart = spans.find((s) => s.start === gap);
  if (atStart) {
    return {
      ...state,
      spans: spans.filter((s) => s !== atStart),
      pending: { gap: atStart.end, kind: "close" },
      refused: false,
    };
  }
  if (gap < state.tokens.length) {
    return { ...state, pending: { gap, kind: "open" }, refused: false };
  }
  const atEnd = spans.find((s) => s.end === gap);
  if (atEnd) {
    return {
      ...state,
      spans: spans.filter((s) => s !== atEnd),
      pending: { gap: atEnd.start, kind: "open" },
      refused: false,
    };
  }
  return refuse(state);  // an open at the very end could never close
}

/** Serialize committed spans to IOB1 tags (B for a chunk hugging the previous one). */
export function toTags(state: BracketState): ChunkTag[] {
  const tags: ChunkTag[] = new Array(state.tokens.length).fill("O");
  let prevEnd = -1;
  for (const span of state.spans) {
    tags[span.start] = span.start === prevEnd ? "B" : "I";
    for (let i = span.start + 1; i < span.end; i++) {
      tags[i] = "I";
    }
    prevEnd = span.end;
  }
  return tags;
}

export function fromTags(tokens: Token[], tags: ChunkTag[]): BracketState {
  const spans: Span[] = [];
  let start: number | null = null;
  tags.forEach((tag, i) => {
    if (tag === "O") {
      if (start !== null) spans.push({ start, end: i });
      start = null;
    } else if (tag === "B") {
      if (start !== null) spans.push({ start, end: i });
      start = i;
    } else if (start === null) {
      start = i;
    }
  });
  if (start !== null) spans.push({ start, end: tags.length });
  return newBracketState(tokens, spans);
}

/** A sentence is submittable once no boundary is dangling. */
export function isComplete(state: BracketState): boolean {
  return state.pending === null;
}
