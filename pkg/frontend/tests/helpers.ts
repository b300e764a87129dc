/** In-memory study service mimicking the wire protocol for client tests. */

import type { AnswerValue, InstanceView } from "../src/types.js";
import type { FetchLike } from "../src/client.js";

export interface FakeRecord {
  instance_id: string;
  answer: AnswerValue;
}

export class FakeService {
  cursor = 0;
  records: FakeRecord[] = [];
  /** When > 0, that many upcoming requests fail at the network level. */
  failNextRequests = 0;
  /** When set, the next answer POST succeeds server-side but the response is lost. */
  dropNextAnswerResponse = false;

  constructor(readonly instances: InstanceView[]) {}

  fetch: FetchLike = async (input, init) => {
    const url = new URL(input, "http://fake");
    const method = init?.method ?? "GET";
    if (this.failNextRequests > 0) {
      this.failNextRequests -= 1;
      throw new TypeError("fetch failed");
    }
    if (method === "GET" && url.pathname.endsWith("/next")) {
      if (this.cursor >= this.instances.length) {
        return jsonResponse(200, { done: true, cursor: this.cursor, of: this.instances.length });
      }
      return jsonResponse(200, {
        done: false,
        cursor: this.cursor,
        of: this.instances.length,
        instance: this.instances[this.cursor],
      });
    }
    if (method === "POST" && url.pathname.endsWith("/answer")) {
      const body = JSON.parse(String(init?.body));
      if (this.cursor >= this.instances.length) {
        return jsonResponse(409, { error: "session already finished" });
      }
      const expected = this.instances[this.cursor].instance_id;
      if (body.instance_id !== expected) {
        return jsonResponse(409, { error: `out-of-order: expected ${expected}` });
      }
      this.records.push({ instance_id: body.instance_id, answer: body.answer });
      this.cursor += 1;
      if (this.dropNextAnswerResponse) {
        this.dropNextAnswerResponse = false;
        throw new TypeError("connection reset");
      }
      return jsonResponse(200, {
        accepted: true,
        cursor: this.cursor,
        done: this.cursor >= this.instances.length,
      });
    }
    return jsonResponse(404, { error: `no route ${method} ${url.pathname}` });
  };
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

export function makeInstances(count: number): InstanceView[] {
  return Array.from({ length: count }, (_, index) => ({
    instance_id: `t${index + 1}`,
    template_id: "GO-13",
    category: "group-only",
    prompt: `How many groups are there? (${index + 1})`,
    answer_kind: "integer" as const,
    bound_parameters: {},
    stimulus_ref: { graph: "abc" },
    descriptor: {
      mode: "consume",
      discover: true,
      search_kind: "explore",
      query_level: "summarize",
      inputs: "Entire map",
      outputs: "Count of groups",
      methods: ["derive"],
    },
  }));
}
