/**
 * Session runner: drives next-task / collect / submit until done.
 *
 * The UI supplies hooks; the runner owns protocol concerns. A network
 * failure re-presents the same task after the retry hook (the server never
 * advanced, so nothing is lost); an out-of-order conflict (e.g. a refresh
 * double-submitting) resyncs to the server cursor and continues.
 */

import { HttpError, NetworkError, StudyClient } from "./client.js";
import type { AnswerResponse, AnswerValue, InstanceView } from "./types.js";

export interface TaskOutcome {
  instance: InstanceView;
  answer: AnswerValue;
  clientLatencyMs: number;
  correct?: boolean;
}

export interface SessionHooks {
  /** Present the task and resolve with the participant's answer. */
  presentTask(instance: InstanceView, cursor: number, of: number): Promise<AnswerValue>;
  /** Called after each accepted answer. */
  onAnswered?(outcome: TaskOutcome): void;
  /** Called when the protocol hits a transient failure before retrying. */
  onRetry?(error: Error): Promise<void> | void;
  /** Called once past the last task. */
  onDone?(outcomes: TaskOutcome[]): void;
  /** Injectable clock for tests. */
  now?(): number;
}

export class SessionRunner {
  readonly outcomes: TaskOutcome[] = [];

  constructor(
    private readonly client: StudyClient,
    private readonly sessionId: string,
    private readonly hooks: SessionHooks,
  ) {}

  private now(): number {
    return this.hooks.now ? this.hooks.now() : Date.now();
  }

  async run(): Promise<TaskOutcome[]> {
    for (;;) {
      let next;
      try {
        next = await this.client.next(this.sessionId);
      } catch (error) {
        if (error instanceof NetworkError) {
          await this.hooks.onRetry?.(error);
          continue;
        }
        throw error;
      }
      if (next.done || !next.instance) {
        this.hooks.onDone?.(this.outcomes);
        return this.outcomes;
      }
      const instance = next.instance;
      const shownAt = this.now();
      const answer = await this.hooks.presentTask(instance, next.cursor, next.of);
      const submitted = await this.submitWithRetry(instance, answer);
      if (submitted === null) {
        continue; // conflict: resync to the server cursor without recording
      }
      const outcome: TaskOutcome = {
        instance,
        answer,
        clientLatencyMs: this.now() - shownAt,
        correct: submitted.correct,
      };
      this.outcomes.push(outcome);
      this.hooks.onAnswered?.(outcome);
    }
  }

  private async submitWithRetry(
    instance: InstanceView,
    answer: AnswerValue,
  ): Promise<AnswerResponse | null> {
    for (;;) {
      try {
        return await this.client.answer(this.sessionId, instance.instance_id, answer);
      } catch (error) {
        if (error instanceof NetworkError) {
          await this.hooks.onRetry?.(error);
          continue;
        }
        if (error instanceof HttpError && error.status === 409) {
          return null;
        }
        throw error;
      }
    }
  }
}
