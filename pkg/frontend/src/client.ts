/** Thin typed client for the study service wire protocol. */

import type { AnswerResponse, AnswerValue, NextResponse, SessionStart } from "./types.js";

export class HttpError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
  ) {
    super(`HTTP ${status}: ${JSON.stringify(body)}`);
    this.name = "HttpError";
  }
}

export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`network failure: ${String(cause)}`);
    this.name = "NetworkError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class StudyClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly base: string,
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.base}${path}`, {
        method,
        headers: body !== undefined ? { "content-type": "application/json" } : undefined,
        body: body !== undefined ? JSON.stringify(body) : undefined,
      });
    } catch (cause) {
      throw new NetworkError(cause);
    }
    let parsed: unknown = null;
    try {
      parsed = await response.json();
    } catch {
      parsed = null;
    }
    if (!response.ok) {
      throw new HttpError(response.status, parsed);
    }
    return parsed as T;
  }

  createSession(studyId: string, participantId: string): Promise<SessionStart> {
    return this.request("POST", `/studies/${studyId}/sessions`, {
      participant_id: participantId,
    });
  }

  next(sessionId: string): Promise<NextResponse> {
    return this.request("GET", `/sessions/${sessionId}/next`);
  }

  answer(sessionId: string, instanceId: string, answer: AnswerValue): Promise<AnswerResponse> {
    return this.request("POST", `/sessions/${sessionId}/answer`, {
      instance_id: instanceId,
      answer,
    });
  }
}
