/**
 * Workbench bootstrap: create or resume a session and route between the
 * feedback, annotation, final-evaluation and rule-writing views.
 */

import { ApiError, SessionApi } from "./api.js";
import type { BatchMsg, ChunkTag, SessionInfo } from "./api.js";
import { evaluate, newEditorState, RuleEditorState, setText } from "./editor.js";
import { BatchView, FeedbackView, RuleEditorView } from "./views.js";

const api = new SessionApi("");

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function startSession(mode: "annotation" | "rule-writing"): Promise<void> {
  const info = await api.createSession(mode, { corpus: "default" });
  byId("session-bar").textContent =
    `session ${info.id.slice(0, 8)} — ${info.mode} — phase: ${info.phase}`;
  await route(info);
}

async function route(info: SessionInfo): Promise<void> {
  const root = byId("view");
  if (info.mode === "rule-writing") {
    mountRuleEditor(root, info.id);
    return;
  }
  if (info.phase === "feedback") {
    await mountFeedback(root, info.id);
  } else if (info.phase === "active" || info.phase === "final-eval") {
    await mountBatch(root, info.id);
  } else {
    root.replaceChildren();
    root.appendChild(document.createTextNode("session complete"));
  }
}

async function refresh(sessionId: string): Promise<void> {
  await route(await api.describe(sessionId));
}

async function mountFeedback(root: HTMLElement, sessionId: string): Promise<void> {
  const info = await api.describe(sessionId);
  const reference = await api.reference(sessionId);
  const sentence = reference.sentences[info.feedback_index];
  if (!sentence) {
    await refresh(sessionId);
    return;
  }
  const view: FeedbackView = new FeedbackView(
    document, root, { id: sentence.id, tokens: sentence.tokens },
    async (tags: ChunkTag[]) => {
      const result = await api.submitFeedback(sessionId, tags);
      if (result.gold && result.diff) view.showGold(result.gold, result.diff);
    },
    () => void refresh(sessionId),
    async () => {
      await api.stopFeedback(sessionId);
      await refresh(sessionId);
    },
  );
}

let currentBatch: BatchView | null = null;

async function mountBatch(root: HTMLElement, sessionId: string): Promise<void> {
  let batch: BatchMsg;
  try {
    batch = await api.nextBatch(sessionId);
  } catch (err) {
    if (err instanceof ApiError) {
      root.replaceChildren(document.createTextNode(err.message));
      return;
    }
    throw err;
  }
  const isFinal = batch.batch === "final";
  currentBatch = new BatchView(document, root, batch, async (submission) => {
    currentBatch = null;
    if (isFinal) {
      const report = await api.submitFinal(sessionId, submission.labelings);
      root.replaceChildren(document.createTextNode(
        `final score vs reference: F = ${report.fmeasure.toFixed(4)}`));
    } else {
      const ack = await api.submitAnnotations(
        sessionId, submission.batch as number, submission.labelings);
      byId("session-bar").textContent =
        `iteration ${ack.iteration} — ${ack.annotated_words} words annotated ` +
        `(batch took ${ack.duration_seconds.toFixed(0)}s)`;
      await refresh(sessionId);
    }
  });
}

function mountRuleEditor(root: HTMLElement, sessionId: string): void {
  let state: RuleEditorState = newEditorState("");
  const view = new RuleEditorView(document, root, state.text, async (text) => {
    state = setText(state, text);
    state = await evaluate(state, api, sessionId);
    if (state.error) view.showError(state.error);
    else if (state.lastResult) view.showResult(state.lastResult);
  });
}

function wireStartButtons(): void {
  byId("start-annotation").addEventListener("click", () => void startSession("annotation"));
  byId("start-rules").addEventListener("click", () => void startSession("rule-writing"));
}

document.addEventListener("DOMContentLoaded", wireStartButtons);

// keyboard bracket placement is active while a batch is on screen
document.addEventListener("keydown", (event) => {
  const target = event.target as HTMLElement | null;
  if (target && target.tagName === "TEXTAREA") return;
  if (currentBatch) currentBatch.handleKey(event.key);
});
