/**
 * Scripted browser test against the real session service.
 *
 * Spawns `chunklab serve` on a scratch corpus, then drives the actual DOM
 * views end to end: one feedback sentence with its gold diff, a full
 * 5-sentence batch whose serve/submit timestamps must pair up in the event
 * log, and a rule-editor round trip of a full rule list with per-rule
 * deltas rendered.
 */

import { execFileSync, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionApi } from "../src/api.js";
import type { ChunkTag } from "../src/api.js";
import { toTags, toggleBoundary } from "../src/bracket.js";
import { BatchView, FeedbackView, RuleEditorView } from "../src/views.js";
import type { BatchSubmission } from "../src/views.js";

const PORT = 8753;
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = resolve(__dirname, "..", "..");

const RULE_LIST = [
  "# Grab-all rule",
  "{ _RB::? ADJ* ANOUN* ADJ* ANOUN+ }",
  "{ [ ANYTHING* } { _JJ TIME_W ] }",
  "{ [ NOT_ADJ+ } { TIME_W ] }",
  "{ (Only|only|About|about)_::? _(\\$|#)::?  \\",
  "   _CD::+ [ ANYTHING+ ] }",
  "{ _RBR::* _(PDT|JJ)::? _(DT|PRP\\$|POS) ADJ* \\",
  "   _RB::? VERB? [ ANYTHING+ ] }",
  "[ (That|that)__DT { ANYTHING+ } ]",
  "{ (only|about)_::? (\\$|#)_::? _CD::+ }",
  "{ [ ANYTHING+ [? ANYTHING* ]? ] _-LRB-  \\",
  "   [ ANYTHING+ ]  _-RRB- [ ANYTHING+ ] }",
  "{ _DT::? _PRP }",
  "{ [ _\\S+::+ ] (and|&)_ [ _\\S+::+ ] }",
  "{ _(DT|EX|WP|WDT) } VERB",
  "{ [ ANYTHING ] [ _CD ] }",
  "{ _(DT|RB)::? (much|most)_ } _IN",
].join("\n");

let server: ChildProcess;
let workDir: string;
const api = new SessionApi(BASE);

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("session service did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "chunklab-ui-"));
  const cli = (...args: string[]) =>
    execFileSync("python3", ["-m", "chunklab.cli", ...args], { cwd: workDir });
  cli("synth", "--out", "train.conll", "--sentences", "300", "--seed", "17");
  cli("synth", "--out", "test.conll", "--sentences", "120", "--seed", "1717");
  server = spawn(
    "python3",
    ["-m", "chunklab.cli", "serve", "--train", "train.conll", "--test", "test.conll",
     "--log-dir", "logs", "--port", String(PORT), "--static",
     join(REPO_ROOT, "frontend", "dist")],
    { cwd: workDir, stdio: "ignore" },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill();
  rmSync(workDir, { recursive: true, force: true });
});

describe("live workbench round trip", () => {
  it("annotates a feedback sentence, completes a batch, and checks the log", async () => {
    const created = await api.createSession("annotation", {
      corpus: "default",
      seed: 5,
      batch_size: 5,
      iterations: 1,
      feedback_limit: 1,
      final_size: 5,
    });
    expect(created.phase).toBe("feedback");
    const sid = created.id;

    // -- feedback: annotate one sentence in the DOM, receive the gold diff
    const reference = await api.reference(sid);
    const sentence = reference.sentences[0]!;
    const root = document.createElement("div");
    let goldShown = false;
    const feedback = new FeedbackView(
      document, root, { id: sentence.id, tokens: sentence.tokens },
      async (tags: ChunkTag[]) => {
        const result = await api.submitFeedback(sid, tags);
        expect(result.gold).toEqual(sentence.tags);
        feedback.showGold(result.gold!, result.diff!);
        goldShown = true;
      },
      () => {}, () => {});

    // submit a deliberately empty bracketing by clicking nothing
    root.querySelector<HTMLButtonElement>("button.submit")!.click();
    await new Promise((r) => setTimeout(r, 100));
    expect(goldShown).toBe(true);
    const goldChunks = new Set(sentence.tags.filter((t) => t !== "O")).size > 0;
    if (goldChunks) {
      expect(root.querySelectorAll(".token.mark-missing").length).toBeGreaterThan(0);
      expect(root.querySelector(".diff-verdict")!.textContent).toMatch(/missed/);
    }

    // -- active phase: complete a 5-sentence batch through the batch view
    expect((await api.describe(sid)).phase).toBe("active");
    const batch = await api.nextBatch(sid);
    expect(batch.size).toBe(5);

    const batchRoot = document.createElement("div");
    let ackIteration = -1;
    const view = new BatchView(document, batchRoot, batch, async (s: BatchSubmission) => {
      const ack = await api.submitAnnotations(sid, s.batch as number, s.labelings);
      ackIteration = ack.iteration;
    });
    // bracket the first token of every sentence by clicking its two gaps
    batchRoot.querySelectorAll<HTMLElement>(".sentence").forEach((node, i) => {
      const gaps = node.querySelectorAll<HTMLElement>(".gap");
      gaps[0]!.click();
      void i;
    });
    view.states.forEach((_, i) => view.toggle(i, 1));
    const submitButton = batchRoot.querySelector<HTMLButtonElement>("button.submit")!;
    expect(submitButton.disabled).toBe(false);
    view.submit();
    await new Promise((r) => setTimeout(r, 200));
    expect(ackIteration).toBe(1);

    // -- the service log pairs the serve and submit timestamps
    const log = await api.events(sid);
    const kinds = log.events.map((e) => e.kind);
    expect(kinds[0]).toBe("session-created");
    const served = log.events.find((e) => e.kind === "batch-served")!;
    const submitted = log.events.find((e) => e.kind === "annotation-submitted")!;
    expect(served).toBeDefined();
    expect(submitted).toBeDefined();
    expect(served.payload.batch).toBe(batch.batch);
    expect(submitted.payload.batch).toBe(batch.batch);
    expect(submitted.ts).toBeGreaterThanOrEqual(served.ts);
    expect(kinds.indexOf("batch-served")).toBeLessThan(kinds.indexOf("annotation-submitted"));

    // the labelings we clicked together arrived intact and valid
    const logged = submitted.payload.labelings as ChunkTag[][];
    expect(logged).toEqual(view.states.map(toTags));
  });

  it("round-trips the rule list through the editor with per-rule deltas", async () => {
    const created = await api.createSession("rule-writing", { corpus: "default" });
    expect(created.phase).toBe("active");
    const sid = created.id;

    const root = document.createElement("div");
    let done: (() => void) | null = null;
    const finished = new Promise<void>((r) => (done = r));
    const editor = new RuleEditorView(document, root, "", async (text) => {
      const result = await api.submitRules(sid, text);
      editor.showResult(result);
      done!();
    });

    editor.textarea.value = RULE_LIST;
    root.querySelector<HTMLButtonElement>("button.evaluate")!.click();
    await finished;

    // text round-trips unchanged, parses clean, and the deltas are rendered
    expect(editor.textarea.value).toBe(RULE_LIST);
    expect(root.querySelectorAll("li.diagnostic")).toHaveLength(0);
    const rows = root.querySelectorAll("tr.delta");
    expect(rows).toHaveLength(13);
    expect(root.querySelector(".score")!.textContent).toMatch(/F \d\.\d{4}/);

    const log = await api.events(sid);
    const submission = log.events.find((e) => e.kind === "rule-list-submitted")!;
    expect(submission.payload.text).toBe(RULE_LIST);
  });
});
