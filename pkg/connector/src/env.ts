/**
 * Gym-style remote environment: only reset/step/close are exposed, each
 * delegating to the matching task-level RPC method.
 */

import {
  RemoteSession,
  type ActionRequest,
  type ResetResult,
  type StepResult,
  TaskEndpoint,
} from "./client.js";

export class RemoteEnv {
  private constructor(
    private readonly task: TaskEndpoint,
    public readonly taskId: string,
    public readonly seed: number | null
  ) {}

  static async open(
    baseUrl: string,
    taskId: string,
    seed?: number | null
  ): Promise<RemoteEnv> {
    const session = new RemoteSession(baseUrl);
    const task = await session.spawn(taskId, seed);
    return new RemoteEnv(task, taskId, seed ?? null);
  }

  async reset(seed?: number | null): Promise<ResetResult> {
    return this.task.reset(seed ?? this.seed);
  }

  async step(action: ActionRequest): Promise<StepResult> {
    return this.task.step(action);
  }

  async close(): Promise<void> {
    await this.task.close();
  }
}

export const remoteEnv = RemoteEnv.open;
