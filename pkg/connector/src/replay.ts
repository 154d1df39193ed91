/**
 * Scripted replay of the bundled debug tasks, producing trajectory JSONL
 * intended to be byte-identical to a native harness's output for the same
 * jobs. Task layouts are mirrored literals; the vault secret is recomputed
 * from the seed locally rather than read back from the wire.
 */

import { canonicalJson, type JsonValue } from "./canonical.js";
import { RemoteSession, type ActionRequest, type StepResult } from "./client.js";
import { secretHex } from "./splitmix.js";

type Cell = readonly [number, number];

interface GridSpec {
  width: number;
  height: number;
  goal: Cell;
  walls: ReadonlySet<string>;
}

const DIRECTIONS: Record<string, Cell> = {
  north: [-1, 0],
  south: [1, 0],
  east: [0, 1],
  west: [0, -1],
};

// Neighbor expansion order; must match the serving side's solver exactly
// or replayed move sequences diverge.
const DIRECTION_ORDER = ["east", "south", "west", "north"] as const;

function cellKey(cell: Cell): string {
  return `${cell[0]},${cell[1]}`;
}

function walls7x7(): Set<string> {
  const walls = new Set<string>();
  for (let c = 0; c <= 5; c += 1) walls.add(cellKey([1, c]));
  for (let c = 1; c <= 6; c += 1) walls.add(cellKey([3, c]));
  for (let c = 0; c <= 5; c += 1) walls.add(cellKey([5, c]));
  return walls;
}

const GRID_SPECS: Record<string, GridSpec> = {
  "grid-3x3": { width: 3, height: 3, goal: [2, 2], walls: new Set() },
  "grid-3x3-seeded": { width: 3, height: 3, goal: [2, 2], walls: new Set() },
  "grid-5x5": { width: 5, height: 5, goal: [4, 4], walls: new Set() },
  "grid-7x7-walls": { width: 7, height: 7, goal: [6, 6], walls: walls7x7() },
};

const VAULT_KEYS: Record<string, string[]> = {
  "vault-easy": ["k0"],
  "vault-hard": ["k0", "k1", "k2"],
};

export function bfsPath(spec: GridSpec, start: Cell): string[] | null {
  if (start[0] === spec.goal[0] && start[1] === spec.goal[1]) return [];
  const parents = new Map<string, { prev: Cell; move: string }>();
  const seen = new Set<string>([cellKey(start)]);
  let frontier: Cell[] = [start];
  while (frontier.length > 0) {
    const next: Cell[] = [];
    for (const pos of frontier) {
      for (const direction of DIRECTION_ORDER) {
        const [dr, dc] = DIRECTIONS[direction];
        const cand: Cell = [pos[0] + dr, pos[1] + dc];
        if (cand[0] < 0 || cand[0] >= spec.height || cand[1] < 0 || cand[1] >= spec.width) {
          continue;
        }
        const key = cellKey(cand);
        if (spec.walls.has(key) || seen.has(key)) continue;
        seen.add(key);
        parents.set(key, { prev: pos, move: direction });
        if (cand[0] === spec.goal[0] && cand[1] === spec.goal[1]) {
          const moves: string[] = [];
          let cursor: Cell = cand;
          while (cursor[0] !== start[0] || cursor[1] !== start[1]) {
            const link = parents.get(cellKey(cursor))!;
            moves.push(link.move);
            cursor = link.prev;
          }
          moves.reverse();
          return moves;
        }
        next.push(cand);
      }
    }
    frontier = next;
  }
  return null;
}

export type Agent = (
  obs: Record<string, JsonValue>,
  lastResult: StepResult | null
) => ActionRequest | null;

export function makeGridAgent(taskId: string): Agent {
  const spec = GRID_SPECS[taskId];
  return (obs) => {
    const position = obs.position as [number, number];
    const pos: Cell = [position[0], position[1]];
    if (pos[0] === spec.goal[0] && pos[1] === spec.goal[1]) return null;
    const path = bfsPath(spec, pos);
    if (path === null || path.length === 0) return null;
    return { name: "move", args: { direction: path[0] } };
  };
}

export function makeVaultAgent(taskId: string, seed: number): Agent {
  const keys = VAULT_KEYS[taskId];
  let queried = 0;
  return (obs): ActionRequest | null => {
    if (obs.solved === true) return null;
    if (queried < keys.length) {
      const key = keys[queried];
      queried += 1;
      return { name: "query", args: { key } };
    }
    // Independent recomputation: the answer comes from the seed, not from
    // the fragments the queries returned.
    return { name: "submit", args: { answer: secretHex(seed) } };
  };
}

export function makeDebugAgent(taskId: string, seed: number | null): Agent {
  if (taskId in GRID_SPECS) return makeGridAgent(taskId);
  if (taskId in VAULT_KEYS) {
    if (seed === null) throw new Error(`task ${taskId} requires a seed`);
    return makeVaultAgent(taskId, seed);
  }
  throw new Error(`no debug agent for task ${taskId}`);
}

export interface ReplayJob {
  taskId: string;
  seed: number | null;
}

export async function replayEpisode(
  baseUrl: string,
  taskId: string,
  seed: number | null
): Promise<Record<string, JsonValue>> {
  const session = new RemoteSession(baseUrl);
  const info = await session.info();
  const descriptor = await session.findTask(taskId);
  if (descriptor === undefined) throw new Error(`unknown task ${taskId}`);
  const agent = makeDebugAgent(taskId, seed);

  const task = await session.spawn(taskId, seed);
  try {
    const reset = await task.reset(seed);
    let obs = reset.obs;
    let last: StepResult | null = null;
    const steps: Array<Record<string, JsonValue>> = [];
    const results: StepResult[] = [];
    for (;;) {
      const action = agent(obs, last);
      if (action === null) break;
      const result = await task.step(action);
      steps.push({
        action: { name: action.name, args: action.args },
        result: result as unknown as Record<string, JsonValue>,
      });
      results.push(result);
      obs = result.obs;
      last = result;
      if (result.terminated || result.truncated || steps.length >= descriptor.max_steps) {
        break;
      }
    }
    const final =
      results.length > 0 ? results[results.length - 1] : await task.evaluate();
    return {
      benchmark_id: info.name,
      task_id: taskId,
      seed,
      steps,
      final: final as unknown as Record<string, JsonValue>,
    };
  } finally {
    await task.close().catch(() => undefined);
  }
}

export async function parityDump(baseUrl: string, jobs: ReplayJob[]): Promise<string> {
  const lines: string[] = [];
  for (const job of jobs) {
    const trajectory = await replayEpisode(baseUrl, job.taskId, job.seed);
    lines.push(canonicalJson(trajectory));
  }
  return lines.map((line) => `${line}\n`).join("");
}
