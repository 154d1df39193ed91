/**
 * JSON-RPC client for CUBE endpoints. Every request body is canonical JSON
 * and every value sent or compared goes through the local canonical
 * encoder, never the serving side's.
 */

import { canonicalJson, parseJson, type JsonValue } from "./canonical.js";
import { errorFromCode } from "./errors.js";

export interface ActionRequest {
  name: string;
  args: Record<string, JsonValue>;
}

export interface StepResult {
  obs: Record<string, JsonValue>;
  reward: number;
  terminated: boolean;
  truncated: boolean;
  info: Record<string, JsonValue>;
}

export interface ResetResult {
  obs: Record<string, JsonValue>;
  info: Record<string, JsonValue>;
}

export interface TaskDescriptor {
  task_id: string;
  title: string;
  tags: string[];
  stochastic: boolean;
  max_steps: number;
}

export interface BenchmarkInfo {
  name: string;
  version: string;
  description: string;
  task_count: number;
}

export interface SpawnTicket {
  session_id: string;
  endpoint: string;
  task_id: string;
  seed: number | null;
}

export class RpcEndpoint {
  private nextId = 0;

  constructor(public readonly url: string) {}

  async call(method: string, params: Record<string, JsonValue> = {}): Promise<JsonValue> {
    this.nextId += 1;
    const id = this.nextId;
    const body = canonicalJson({ id, jsonrpc: "2.0", method, params });
    const response = await fetch(this.url, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body,
    });
    const doc = parseJson(await response.text()) as Record<string, JsonValue>;
    if (doc === null || typeof doc !== "object" || Array.isArray(doc)) {
      throw new Error(`malformed response from ${this.url}`);
    }
    const error = doc.error as { code: number; message: string; data?: unknown } | undefined;
    if (error !== undefined) {
      throw errorFromCode(error.code, error.message, error.data);
    }
    if (doc.id !== id) {
      throw new Error(`response id ${String(doc.id)} does not match request id ${id}`);
    }
    return doc.result as JsonValue;
  }
}

export class TaskEndpoint {
  private readonly rpc: RpcEndpoint;

  constructor(url: string, public readonly ticket: SpawnTicket) {
    this.rpc = new RpcEndpoint(url);
  }

  async toolsList(): Promise<JsonValue> {
    return this.rpc.call("tools/list");
  }

  async toolsCall(action: ActionRequest): Promise<JsonValue> {
    return this.rpc.call("tools/call", { name: action.name, args: action.args });
  }

  async resourcesList(): Promise<JsonValue> {
    return this.rpc.call("resources/list");
  }

  async resourcesRead(uri: string): Promise<JsonValue> {
    return this.rpc.call("resources/read", { uri });
  }

  async evaluate(): Promise<StepResult> {
    return (await this.rpc.call("cube/evaluate")) as unknown as StepResult;
  }

  async reset(seed?: number | null): Promise<ResetResult> {
    const params: Record<string, JsonValue> = {};
    if (seed !== undefined && seed !== null) params.seed = seed;
    return (await this.rpc.call("cube/reset", params)) as unknown as ResetResult;
  }

  async step(action: ActionRequest): Promise<StepResult> {
    return (await this.rpc.call("cube/step", {
      action: { name: action.name, args: action.args },
    })) as unknown as StepResult;
  }

  async close(): Promise<void> {
    await this.rpc.call("cube/close");
  }

  async privilegedInfo(): Promise<string> {
    return (await this.rpc.call("cube/privileged_info")) as string;
  }
}

export class RemoteSession {
  private readonly rpc: RpcEndpoint;
  readonly openTickets: SpawnTicket[] = [];

  constructor(public readonly baseUrl: string) {
    this.rpc = new RpcEndpoint(baseUrl);
  }

  async info(): Promise<BenchmarkInfo> {
    return (await this.rpc.call("cube/info")) as unknown as BenchmarkInfo;
  }

  async tasks(): Promise<TaskDescriptor[]> {
    const items: TaskDescriptor[] = [];
    let token: string | null = null;
    for (;;) {
      const params: Record<string, JsonValue> = {};
      if (token !== null) params.filter = { page_token: token };
      const page = (await this.rpc.call("cube/tasks", params)) as unknown as {
        items: TaskDescriptor[];
        next_page_token?: string;
      };
      items.push(...page.items);
      token = page.next_page_token ?? null;
      if (token === null) return items;
    }
  }

  async findTask(taskId: string): Promise<TaskDescriptor | undefined> {
    return (await this.tasks()).find((d) => d.task_id === taskId);
  }

  async spawn(taskId: string, seed?: number | null): Promise<TaskEndpoint> {
    const params: Record<string, JsonValue> = { task_id: taskId };
    if (seed !== undefined && seed !== null) params.seed = seed;
    const ticket = (await this.rpc.call("cube/spawn", params)) as unknown as SpawnTicket;
    this.openTickets.push(ticket);
    return new TaskEndpoint(ticket.endpoint, ticket);
  }

  async status(): Promise<JsonValue> {
    return this.rpc.call("cube/status");
  }

  async shutdown(sessionId?: string): Promise<void> {
    const params: Record<string, JsonValue> = {};
    if (sessionId !== undefined) params.session_id = sessionId;
    await this.rpc.call("cube/shutdown", params);
  }
}
