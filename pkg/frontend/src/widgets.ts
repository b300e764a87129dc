/**
 * Answer collection state machines, one per answer kind.
 *
 * The DOM layer forwards selection events (group/node clicks, button
 * presses, text input) into these objects; rendering reads them back. A
 * widget reports `complete` only when a syntactically valid answer exists,
 * which gates the submit button.
 */

import type { AnswerKind, AnswerValue } from "./types.js";

export interface AnswerWidget {
  readonly kind: AnswerKind;
  /** True once the current state is a submittable answer. */
  complete(): boolean;
  /** The JSON payload to submit; null while incomplete. */
  value(): AnswerValue | null;
  /** Group/node ids currently selected, for highlighting. */
  selection(): string[];
  /** Forward a click on a group hull. */
  pickGroup(id: string): void;
  /** Forward a click on a node glyph. */
  pickNode(id: string): void;
  reset(): void;
}

export class BooleanAnswer implements AnswerWidget {
  readonly kind: AnswerKind = "boolean";
  private choice: boolean | null = null;

  choose(value: boolean): void {
    this.choice = value;
  }

  complete(): boolean {
    return this.choice !== null;
  }

  value(): AnswerValue | null {
    return this.choice;
  }

  selection(): string[] {
    return [];
  }

  pickGroup(): void {}
  pickNode(): void {}

  reset(): void {
    this.choice = null;
  }
}

export class IntegerAnswer implements AnswerWidget {
  readonly kind: AnswerKind = "integer";
  private text = "";

  setText(text: string): void {
    this.text = text.trim();
  }

  complete(): boolean {
    return /^-?\d+$/.test(this.text);
  }

  value(): AnswerValue | null {
    return this.complete() ? parseInt(this.text, 10) : null;
  }

  selection(): string[] {
    return [];
  }

  pickGroup(): void {}
  pickNode(): void {}

  reset(): void {
    this.text = "";
  }
}

/** Single pick from a fixed id universe (one group, or one node). */
class SinglePick implements AnswerWidget {
  private picked: string | null = null;

  constructor(
    readonly kind: AnswerKind,
    private readonly universe: ReadonlySet<string>,
    private readonly fromNodes: boolean,
  ) {}

  private pick(id: string): void {
    if (this.universe.has(id)) this.picked = id;
  }

  pickGroup(id: string): void {
    if (!this.fromNodes) this.pick(id);
  }

  pickNode(id: string): void {
    if (this.fromNodes) this.pick(id);
  }

  complete(): boolean {
    return this.picked !== null;
  }

  value(): AnswerValue | null {
    return this.picked;
  }

  selection(): string[] {
    return this.picked ? [this.picked] : [];
  }

  reset(): void {
    this.picked = null;
  }
}

export class GroupPickAnswer extends SinglePick {
  constructor(groupIds: Iterable<string>) {
    super("group-id", new Set(groupIds), false);
  }
}

export class NodePickAnswer extends SinglePick {
  constructor(nodeIds: Iterable<string>) {
    super("node-id", new Set(nodeIds), true);
  }
}

/** Multi-click toggle set; "no groups" is a legal answer but must be explicit. */
export class GroupSetAnswer implements AnswerWidget {
  readonly kind: AnswerKind = "group-id-set";
  private readonly chosen = new Set<string>();
  private touched = false;

  constructor(private readonly universe: ReadonlySet<string>) {}

  pickGroup(id: string): void {
    if (!this.universe.has(id)) return;
    this.touched = true;
    if (this.chosen.has(id)) this.chosen.delete(id);
    else this.chosen.add(id);
  }

  pickNode(): void {}

  /** Explicitly answer "no groups". */
  markEmpty(): void {
    this.chosen.clear();
    this.touched = true;
  }

  complete(): boolean {
    return this.touched;
  }

  value(): AnswerValue | null {
    return this.touched ? Array.from(this.chosen).sort() : null;
  }

  selection(): string[] {
    return Array.from(this.chosen).sort();
  }

  reset(): void {
    this.chosen.clear();
    this.touched = false;
  }
}

/**
 * Ordered list builder of distinct groups.
 *
 * With a fixed `size` (ranked top-k tasks) exactly that many picks are
 * required; with `size` null (path tasks, where the length is the
 * participant's answer) any non-empty ordered list is submittable.
 */
export class RankedListAnswer implements AnswerWidget {
  readonly kind: AnswerKind = "group-id-list";
  private readonly order: string[] = [];

  constructor(
    private readonly universe: ReadonlySet<string>,
    readonly size: number | null,
  ) {}

  pickGroup(id: string): void {
    if (!this.universe.has(id)) return;
    const at = this.order.indexOf(id);
    const cap = this.size ?? this.universe.size;
    if (at >= 0) this.order.splice(at, 1);
    else if (this.order.length < cap) this.order.push(id);
  }

  pickNode(): void {}

  moveUp(id: string): void {
    const at = this.order.indexOf(id);
    if (at > 0) {
      [this.order[at - 1], this.order[at]] = [this.order[at], this.order[at - 1]];
    }
  }

  moveDown(id: string): void {
    const at = this.order.indexOf(id);
    if (at >= 0 && at < this.order.length - 1) {
      [this.order[at + 1], this.order[at]] = [this.order[at], this.order[at + 1]];
    }
  }

  complete(): boolean {
    return this.size === null ? this.order.length >= 1 : this.order.length === this.size;
  }

  value(): AnswerValue | null {
    return this.complete() ? this.order.slice() : null;
  }

  selection(): string[] {
    return this.order.slice();
  }

  reset(): void {
    this.order.length = 0;
  }
}

/** One or two groups, unordered (single group, or the pair at a link's ends). */
export class PairAnswer implements AnswerWidget {
  readonly kind: AnswerKind = "pair";
  private readonly chosen = new Set<string>();

  constructor(private readonly universe: ReadonlySet<string>) {}

  pickGroup(id: string): void {
    if (!this.universe.has(id)) return;
    if (this.chosen.has(id)) {
      this.chosen.delete(id);
    } else if (this.chosen.size < 2) {
      this.chosen.add(id);
    }
  }

  pickNode(): void {}

  complete(): boolean {
    return this.chosen.size >= 1 && this.chosen.size <= 2;
  }

  value(): AnswerValue | null {
    return this.complete() ? Array.from(this.chosen).sort() : null;
  }

  selection(): string[] {
    return Array.from(this.chosen).sort();
  }

  reset(): void {
    this.chosen.clear();
  }
}

export interface WidgetContext {
  groupIds: string[];
  nodeIds: string[];
  /**
   * Ranked-list length from the instance's bound parameters; omit for
   * tasks whose list length is itself part of the answer (paths).
   */
  listSize?: number;
}

export function widgetFor(kind: AnswerKind, context: WidgetContext): AnswerWidget {
  const groups = new Set(context.groupIds);
  switch (kind) {
    case "boolean":
      return new BooleanAnswer();
    case "integer":
      return new IntegerAnswer();
    case "group-id":
      return new GroupPickAnswer(groups);
    case "node-id":
      return new NodePickAnswer(new Set(context.nodeIds));
    case "group-id-set":
      return new GroupSetAnswer(groups);
    case "group-id-list":
      return new RankedListAnswer(groups, context.listSize ?? null);
    case "pair":
      return new PairAnswer(groups);
    default: {
      const exhaustive: never = kind;
      throw new Error(`unknown answer kind ${exhaustive}`);
    }
  }
}
