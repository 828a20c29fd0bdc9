/**
 * DOM views for the workbench: click-to-bracket annotation (with keyboard
 * bracket placement) and the rule editor with inline diagnostics.
 *
 * All views are plain DOM so they run under any document implementation;
 * controllers own their state and re-render into a fixed root element.
 */

import type { BatchMsg, ChunkTag, RulesResult, SentenceMsg, SpanDiff } from "./api.js";
import { BracketState, isComplete, newBracketState, toTags, toggleBoundary } from "./bracket.js";
import { reviewDiff } from "./diff.js";
import { BatchTimer } from "./timer.js";

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document, tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// ---------------------------------------------------------------------------
// one sentence with clickable gaps

export interface SentenceViewOptions {
  diff?: SpanDiff;
  active?: boolean;
  cursor?: number;
}

export function renderSentence(
  doc: Document,
  state: BracketState,
  onToggle: ((gap: number) => void) | null,
  options: SentenceViewOptions = {},
): HTMLElement {
  const root = el(doc, "div", "sentence" + (options.active ? " active" : ""));
  if (state.refused) root.classList.add("refused");
  const marks = options.diff ? reviewDiff(state.tokens.length, options.diff).marks : null;
  const starts = new Set(state.spans.map((s) => s.start));
  const ends = new Set(state.spans.map((s) => s.end));
  const inChunk = (i: number) => state.spans.some((s) => s.start <= i && i < s.end);

  for (let gap = 0; gap <= state.tokens.length; gap++) {
    const gapNode = el(doc, "span", "gap");
    gapNode.dataset.gap = String(gap);
    if (ends.has(gap)) gapNode.classList.add("close");
    if (starts.has(gap)) gapNode.classList.add("open");
    if (state.pending?.gap === gap) gapNode.classList.add("pending", state.pending.kind);
    if (options.cursor === gap) gapNode.classList.add("cursor");
    let label = "·";
    if (ends.has(gap) && starts.has(gap)) label = ")(";
    else if (ends.has(gap)) label = ")";
    else if (starts.has(gap)) label = "(";
    else if (state.pending?.gap === gap) label = state.pending.kind === "open" ? "(" : ")";
    gapNode.textContent = label;
    if (onToggle) {
      gapNode.addEventListener("click", () => onToggle(gap));
    }
    root.appendChild(gapNode);

    if (gap < state.tokens.length) {
      const token = state.tokens[gap]!;
      const tokenNode = el(doc, "span", "token", token.w);
      if (inChunk(gap)) tokenNode.classList.add("chunked");
      if (marks) tokenNode.classList.add(`mark-${marks[gap]}`);
      tokenNode.appendChild(el(doc, "sub", "pos", token.p));
      root.appendChild(tokenNode);
    }
  }
  return root;
}

// ---------------------------------------------------------------------------
// a batch of sentences being annotated

export interface BatchSubmission {
  batch: number | "final";
  labelings: ChunkTag[][];
  elapsedSeconds: number;
}

export class BatchView {
  states: BracketState[];
  cursor = 0;            // gap cursor within the active sentence
  activeSentence = 0;
  readonly timer: BatchTimer;

  constructor(
    private readonly doc: Document,
    private readonly root: HTMLElement,
    readonly batch: BatchMsg,
    private readonly onSubmit: (submission: BatchSubmission) => void,
    now: () => number = Date.now,
  ) {
    this.states = batch.sentences.map((s: SentenceMsg) => newBracketState(s.tokens));
    this.timer = new BatchTimer(now);
    this.timer.start();   // the clock starts when the batch renders
    this.render();
  }

  toggle(sentence: number, gap: number): void {
    this.states[sentence] = toggleBoundary(this.states[sentence]!, gap);
    this.activeSentence = sentence;
    this.cursor = gap;
    this.render();
  }

  handleKey(key: string): void {
    const state = this.states[this.activeSentence]!;
    if (key === "ArrowRight") {
      this.cursor = Math.min(this.cursor + 1, state.tokens.length);
    } else if (key === "ArrowLeft") {
      this.cursor = Math.max(this.cursor - 1, 0);
    } else if (key === " ") {
      this.states[this.activeSentence] = toggleBoundary(state, this.cursor);
    } else if (key === "ArrowDown") {
      this.activeSentence = Math.min(this.activeSentence + 1, this.states.length - 1);
    } else if (key === "ArrowUp") {
      this.activeSentence = Math.max(this.activeSentence - 1, 0);
    } else {
      return;
    }
    this.render();
  }

  get complete(): boolean {
    return this.states.every(isComplete);
  }

  submit(): void {
    if (!this.complete) return;
    this.onSubmit({
      batch: this.batch.batch,
      labelings: this.states.map(toTags),
      elapsedSeconds: this.timer.elapsedSeconds(),
    });
  }

  render(): void {
    this.root.replaceChildren();
    const head = el(this.doc, "div", "batch-head",
      `batch ${this.batch.batch} — ${this.batch.size} sentences`);
    const clock = el(this.doc, "span", "timer", ` ${this.timer.display()}`);
    head.appendChild(clock);
    this.root.appendChild(head);

    this.states.forEach((state, i) => {
      const view = renderSentence(this.doc, state, (gap) => this.toggle(i, gap), {
        active: i === this.activeSentence,
        cursor: i === this.activeSentence ? this.cursor : undefined,
      });
      view.addEventListener("click", () => {
        if (this.activeSentence !== i) {
          this.activeSentence = i;
          this.render();
        }
      });
      this.root.appendChild(view);
    });

    const button = el(this.doc, "button", "submit", "submit batch");
    button.disabled = !this.complete;
    button.addEventListener("click", () => this.submit());
    this.root.appendChild(button);
  }
}

// ---------------------------------------------------------------------------
// feedback phase: annotate one sentence, then see the gold answer

export class FeedbackView {
  state: BracketState;
  diff: SpanDiff | null = null;
  gold: ChunkTag[] | null = null;

  constructor(
    private readonly doc: Document,
    private readonly root: HTMLElement,
    sentence: SentenceMsg,
    private readonly onSubmit: (tags: ChunkTag[]) => void,
    private readonly onNext: () => void,
    private readonly onStop: () => void,
  ) {
    this.state = newBracketState(sentence.tokens);
    this.render();
  }

  toggle(gap: number): void {
    if (this.diff) return;  // reviewing; no more edits
    this.state = toggleBoundary(this.state, gap);
    this.render();
  }

  showGold(gold: ChunkTag[], diff: SpanDiff): void {
    this.gold = gold;
    this.diff = diff;
    this.render();
  }

  render(): void {
    this.root.replaceChildren();
    this.root.appendChild(el(this.doc, "div", "phase-head",
      "feedback: the reference answer appears after each sentence"));
    this.root.appendChild(
      renderSentence(this.doc, this.state, this.diff ? null : (g) => this.toggle(g),
                     { active: true, diff: this.diff ?? undefined }));
    if (this.diff) {
      const view = reviewDiff(this.state.tokens.length, this.diff);
      const verdict = view.isPerfect
        ? "matches the reference exactly"
        : `${view.missingCount} chunk(s) missed, ${view.extraCount} spurious`;
      this.root.appendChild(el(this.doc, "div", "diff-verdict", verdict));
      const next = el(this.doc, "button", "next", "next sentence");
      next.addEventListener("click", () => this.onNext());
      this.root.appendChild(next);
    } else {
      const submit = el(this.doc, "button", "submit", "check against reference");
      submit.disabled = !isComplete(this.state);
      submit.addEventListener("click", () => this.onSubmit(toTags(this.state)));
      this.root.appendChild(submit);
    }
    const stop = el(this.doc, "button", "stop", "stop feedback, start annotating");
    stop.addEventListener("click", () => this.onStop());
    this.root.appendChild(stop);
  }
}

// ---------------------------------------------------------------------------
// rule editor with inline diagnostics and per-rule deltas

export class RuleEditorView {
  textarea: HTMLTextAreaElement;
  private resultsNode: HTMLElement;

  constructor(
    private readonly doc: Document,
    private readonly root: HTMLElement,
    initialText: string,
    private readonly onEvaluate: (text: string) => void,
  ) {
    root.replaceChildren();
    root.appendChild(el(doc, "div", "phase-head",
      "rule writing: scored against the 100 reference sentences"));
    this.textarea = el(doc, "textarea", "rules");
    this.textarea.value = initialText;
    this.textarea.rows = 16;
    root.appendChild(this.textarea);
    const button = el(doc, "button", "evaluate", "evaluate");
    button.addEventListener("click", () => this.onEvaluate(this.textarea.value));
    root.appendChild(button);
    this.resultsNode = el(doc, "div", "results");
    root.appendChild(this.resultsNode);
  }

  jumpToLine(line: number): void {
    const lines = this.textarea.value.split("\n");
    let offset = 0;
    for (let i = 0; i < line - 1 && i < lines.length; i++) {
      offset += lines[i]!.length + 1;
    }
    this.textarea.focus();
    this.textarea.setSelectionRange(offset, offset + (lines[line - 1]?.length ?? 0));
  }

  showError(message: string): void {
    this.resultsNode.replaceChildren(el(this.doc, "div", "error", message));
  }

  showResult(result: RulesResult): void {
    this.resultsNode.replaceChildren();
    const r = result.report;
    this.resultsNode.appendChild(el(this.doc, "div", "score",
      `P ${r.precision.toFixed(4)}  R ${r.recall.toFixed(4)}  F ${r.fmeasure.toFixed(4)}` +
      `  (${result.rules_parsed} rules)`));

    if (result.diagnostics.length) {
      const list = el(this.doc, "ul", "diagnostics");
      for (const diag of result.diagnostics) {
        const item = el(this.doc, "li", "diagnostic", `line ${diag.line}: ${diag.message}`);
        item.addEventListener("click", () => this.jumpToLine(diag.line));
        list.appendChild(item);
      }
      this.resultsNode.appendChild(list);
    }

    const table = el(this.doc, "table", "deltas");
    const head = el(this.doc, "tr");
    for (const title of ["#", "rule", "F after", "delta"]) {
      head.appendChild(el(this.doc, "th", undefined, title));
    }
    table.appendChild(head);
    for (const delta of result.deltas) {
      const row = el(this.doc, "tr", "delta");
      row.appendChild(el(this.doc, "td", undefined, String(delta.index + 1)));
      row.appendChild(el(this.doc, "td", "rule-text", delta.rule));
      row.appendChild(el(this.doc, "td", undefined, delta.f_after.toFixed(4)));
      const cell = el(this.doc, "td", delta.delta >= 0 ? "gain" : "loss",
        (delta.delta >= 0 ? "+" : "") + delta.delta.toFixed(4));
      row.appendChild(cell);
      table.appendChild(row);
    }
    this.resultsNode.appendChild(table);
  }
}
