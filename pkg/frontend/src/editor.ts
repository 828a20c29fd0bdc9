/**
 * Rule-editor state: the text being written, the last evaluation from the
 * service, and an append-only submission history.
 *
 * The editor never scores anything locally; every F figure on screen came
 * back from the service, and a failed request leaves the text untouched.
 */

import type { RulesResult, SessionApi } from "./api.js";

export interface Submission {
  at: number;          // epoch ms, client clock
  text: string;
  result: RulesResult | null;
}

export interface RuleEditorState {
  text: string;
  lastResult: RulesResult | null;
  error: string | null;
  history: readonly Submission[];
  evaluating: boolean;
}

export function newEditorState(text = ""): RuleEditorState {
  return { text, lastResult: null, error: null, history: [], evaluating: false };
}

export function setText(state: RuleEditorState, text: string): RuleEditorState {
  return { ...state, text };
}

export async function evaluate(
  state: RuleEditorState,
  api: SessionApi,
  sessionId: string,
  now: () => number = Date.now,
): Promise<RuleEditorState> {
  const text = state.text;
  try {
    const result = await api.submitRules(sessionId, text);
    return {
      ...state,
      lastResult: result,
      error: null,
      evaluating: false,
      history: [...state.history, { at: now(), text, result }],
    };
  } catch (err) {
    return {
      ...state,
      error: err instanceof Error ? err.message : String(err),
      evaluating: false,
      history: [...state.history, { at: now(), text, result: null }],
    };
  }
}
