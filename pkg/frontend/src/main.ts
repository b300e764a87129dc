/**
 * Browser entry point: joins a study session and walks the participant
 * through every task. Query parameters: `service` (base URL), `study`
 * (study id), `participant` (optional id).
 */

import { StudyClient } from "./client.js";
import { renderStimulus, type Scene } from "./render.js";
import { SessionRunner } from "./session.js";
import type { AnswerValue, InstanceView, SessionStart } from "./types.js";
import {
  BooleanAnswer,
  GroupSetAnswer,
  IntegerAnswer,
  RankedListAnswer,
  widgetFor,
  type AnswerWidget,
} from "./widgets.js";

/** Templates whose ground truth comes from the raster geometry. */
const REGION_TEMPLATES = new Set(["GO-10", "GO-14", "GL-4"]);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function listSizeFor(instance: InstanceView): number | undefined {
  const count = instance.bound_parameters["count"];
  return typeof count === "number" && count >= 1 ? count : undefined;
}

class TaskPanel {
  readonly root = el("div", "task-panel");
  private readonly progress = el("div", "progress");
  private readonly prompt = el("div", "prompt");
  private readonly timer = el("div", "timer");
  private readonly controls = el("div", "controls");
  private readonly submit = el("button", "submit", "Submit answer");
  private readonly feedback = el("div", "feedback");
  private ticker: ReturnType<typeof setInterval> | null = null;

  constructor(private readonly scene: Scene) {
    this.submit.disabled = true;
    this.root.append(this.progress, this.prompt, this.timer, this.controls, this.submit, this.feedback);
  }

  present(instance: InstanceView, cursor: number, of: number, widget: AnswerWidget): Promise<AnswerValue> {
    this.progress.textContent = `Task ${cursor + 1} of ${of}`;
    this.prompt.textContent = instance.prompt;
    this.feedback.textContent = "";
    this.controls.replaceChildren();
    this.scene.setSelection([]);
    this.scene.showRegions(REGION_TEMPLATES.has(instance.template_id));
    this.buildControls(widget);

    const startedAt = Date.now();
    if (this.ticker) clearInterval(this.ticker);
    this.ticker = setInterval(() => {
      this.timer.textContent = `${((Date.now() - startedAt) / 1000).toFixed(0)} s`;
    }, 250);

    return new Promise<AnswerValue>((resolve) => {
      const refresh = () => {
        this.submit.disabled = !widget.complete();
        this.scene.setSelection(widget.selection());
      };
      this.refreshHook = refresh;
      refresh();
      this.submit.onclick = () => {
        const value = widget.value();
        if (value === null) return;
        if (this.ticker) clearInterval(this.ticker);
        this.submit.disabled = true;
        resolve(value);
      };
    });
  }

  refreshHook: () => void = () => {};

  showFeedback(text: string): void {
    this.feedback.textContent = text;
  }

  private buildControls(widget: AnswerWidget): void {
    if (widget instanceof BooleanAnswer) {
      for (const [label, value] of [["Yes", true], ["No", false]] as const) {
        const button = el("button", "choice", label);
        button.onclick = () => {
          widget.choose(value);
          this.refreshHook();
        };
        this.controls.append(button);
      }
      return;
    }
    if (widget instanceof IntegerAnswer) {
      const input = el("input", "number-input") as HTMLInputElement;
      input.type = "text";
      input.inputMode = "numeric";
      input.placeholder = "Enter a number";
      input.oninput = () => {
        widget.setText(input.value);
        this.refreshHook();
      };
      this.controls.append(input);
      return;
    }
    if (widget instanceof GroupSetAnswer) {
      const none = el("button", "choice", "No groups");
      none.onclick = () => {
        widget.markEmpty();
        this.refreshHook();
      };
      this.controls.append(
        el("span", "hint", "Click group regions to toggle them, or:"),
        none,
      );
      return;
    }
    if (widget instanceof RankedListAnswer) {
      const hint =
        widget.size === null
          ? "Click groups in path order; click again to remove."
          : `Click ${widget.size} group(s) in rank order; click again to remove.`;
      this.controls.append(el("span", "hint", hint));
      return;
    }
    this.controls.append(el("span", "hint", "Click the answer in the map."));
  }
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("service") ?? "";
  const studyId = params.get("study") ?? "";
  const participant = params.get("participant") ?? "anonymous";
  const app = document.getElementById("app");
  if (!app) throw new Error("missing #app container");
  if (!studyId) {
    app.textContent = "Missing ?study=<id> parameter.";
    return;
  }

  // a refresh mid-session reuses the stored session and resumes at the
  // server cursor (next-task delivery is idempotent)
  const cacheKey = `groupgraph-session:${base}:${studyId}:${participant}`;
  const client = new StudyClient(base);
  let session: SessionStart;
  const cached = window.sessionStorage.getItem(cacheKey);
  if (cached) {
    session = JSON.parse(cached) as SessionStart;
  } else {
    try {
      session = await client.createSession(studyId, participant);
    } catch (error) {
      app.textContent = `Could not join study: ${String(error)}`;
      return;
    }
    window.sessionStorage.setItem(cacheKey, JSON.stringify(session));
  }

  const stage = el("div", "stage");
  const side = el("div", "sidebar");
  app.append(stage, side);
  let scene: Scene;
  try {
    scene = renderStimulus(stage, session.stimulus.graph, session.stimulus.layout, {
      onGroupClick: (gid) => {
        currentWidget?.pickGroup(gid);
        panel.refreshHook();
      },
      onNodeClick: (nid) => {
        currentWidget?.pickNode(nid);
        panel.refreshHook();
      },
    });
  } catch (error) {
    app.replaceChildren(el("div", "error", `Stimulus error: ${String(error)}`));
    return;
  }

  const panel = new TaskPanel(scene);
  side.append(panel.root);
  let currentWidget: AnswerWidget | null = null;

  const groupIds = session.stimulus.graph.groups.map((g) => g.id);
  const nodeIds = session.stimulus.graph.nodes.map((n) => n.id);

  const runner = new SessionRunner(client, session.session_id, {
    presentTask: (instance, cursor, of) => {
      currentWidget = widgetFor(instance.answer_kind, {
        groupIds,
        nodeIds,
        listSize: listSizeFor(instance),
      });
      return panel.present(instance, cursor, of, currentWidget);
    },
    onAnswered: (outcome) => {
      if (session.reveal_correctness && outcome.correct !== undefined) {
        panel.showFeedback(outcome.correct ? "Correct" : "Incorrect");
      }
    },
    onRetry: async (error) => {
      panel.showFeedback(`Connection problem, retrying: ${error.name}`);
      await new Promise((resolve) => setTimeout(resolve, 1500));
    },
    onDone: () => {
      window.sessionStorage.removeItem(cacheKey);
      side.replaceChildren(
        el("div", "done", "All tasks completed. Thank you for participating!"),
      );
    },
  });

  await runner.run();
}

start().catch((error) => {
  const app = document.getElementById("app");
  if (app) app.textContent = `Unexpected error: ${String(error)}`;
});
