/**
 * Token-aligned rendering model for the gold-feedback diff.
 *
 * The service reports which gold chunks the submission missed and which
 * submitted chunks are not in the gold; both are span lists, and every
 * highlight here derives purely from those span sets.
 */

import type { SpanDiff } from "./api.js";

export type TokenMark = "ok" | "missing" | "extra" | "both";

export interface DiffView {
  marks: TokenMark[];
  missingCount: number;
  extraCount: number;
  isPerfect: boolean;
}

export function reviewDiff(length: number, diff: SpanDiff): DiffView {
  const missing = new Array<boolean>(length).fill(false);
  const extra = new Array<boolean>(length).fill(false);
  for (const [start, end] of diff.missing) {
    for (let i = start; i < end; i++) missing[i] = true;
  }
  for (const [start, end] of diff.extra) {
    for (let i = start; i < end; i++) extra[i] = true;
  }
  const marks = Array.from({ length }, (_, i): TokenMark => {
    if (missing[i] && extra[i]) return "both";
    if (missing[i]) return "missing";
    if (extra[i]) return "extra";
    return "ok";
  });
  return {
    marks,
    missingCount: diff.missing.length,
    extraCount: diff.extra.length,
    isPerfect: diff.missing.length === 0 && diff.extra.length === 0,
  };
}
