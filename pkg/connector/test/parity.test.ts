/**
 * Cross-language parity: replaying every debug config against a live
 * endpoint must produce JSONL byte-identical to the native harness's
 * output for the same jobs.
 */

import assert from "node:assert/strict";
import test from "node:test";
import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";

import { parseJson } from "../src/canonical.js";
import { RemoteSession } from "../src/client.js";
import { remoteEnv } from "../src/env.js";
import { NotResetYetError, TaskTerminatedError } from "../src/errors.js";
import { parityDump, replayEpisode } from "../src/replay.js";
import { secretHex } from "../src/splitmix.js";

const execFileAsync = promisify(execFile);
const PYTHON = process.env.CUBE_PYTHON ?? "python3";

interface DebugConfig {
  task_id: string;
  seed: number | null;
  max_steps: number;
  expected_final_reward: number;
}

interface ServedBenchmark {
  endpoint: string;
  process: ChildProcess;
}

function portRange(): string {
  const base = 20000 + Math.floor(Math.random() * 30000);
  return `${base}-${base + 29}`;
}

async function serveBenchmark(benchmarkId: string): Promise<ServedBenchmark> {
  const child = spawn(
    PYTHON,
    ["-m", "cube.kit.cli", "serve", "--benchmark", benchmarkId, "--ports", portRange()],
    { stdio: ["ignore", "pipe", "inherit"] }
  );
  const endpoint = await new Promise<string>((resolve, reject) => {
    let buffer = "";
    const timer = setTimeout(() => reject(new Error("server did not start")), 30000);
    child.stdout.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const newline = buffer.indexOf("\n");
      if (newline >= 0) {
        clearTimeout(timer);
        resolve(buffer.slice(0, newline).trim());
      }
    });
    child.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early with code ${code}`));
    });
  });
  return { endpoint, process: child };
}

async function stopBenchmark(served: ServedBenchmark): Promise<void> {
  served.process.kill("SIGTERM");
  await new Promise((resolve) => served.process.on("exit", resolve));
}

async function debugConfigs(benchmarkId: string): Promise<DebugConfig[]> {
  const { stdout } = await execFileAsync(PYTHON, [
    "-m",
    "cube.kit.cli",
    "debug-configs",
    "--benchmark",
    benchmarkId,
  ]);
  return stdout
    .trim()
    .split("\n")
    .map((line) => parseJson(line) as unknown as DebugConfig);
}

async function nativeReplay(
  endpoint: string,
  config: DebugConfig,
  outPath: string
): Promise<Buffer> {
  const args = [
    "-m",
    "cube.harness.cli",
    "--target",
    endpoint,
    "--task",
    config.task_id,
    "--agent",
    "debug",
    "--out",
    outPath,
  ];
  if (config.seed !== null) args.push("--seed", String(config.seed));
  await execFileAsync(PYTHON, args);
  return readFileSync(outPath);
}

for (const benchmarkId of ["treasure-grid", "key-vault"]) {
  test(`JSONL parity for every ${benchmarkId} debug config`, { timeout: 120000 }, async () => {
    const served = await serveBenchmark(benchmarkId);
    const scratch = mkdtempSync(join(tmpdir(), "cube-parity-"));
    try {
      const configs = await debugConfigs(benchmarkId);
      assert.ok(configs.length > 0);
      for (const config of configs) {
        const native = await nativeReplay(
          served.endpoint,
          config,
          join(scratch, `${config.task_id}.jsonl`)
        );
        const ours = await parityDump(served.endpoint, [
          { taskId: config.task_id, seed: config.seed },
        ]);
        assert.equal(
          ours,
          native.toString("utf-8"),
          `trajectory bytes diverged for ${config.task_id}`
        );
      }
    } finally {
      await stopBenchmark(served);
    }
  });
}

test("replayed debug configs reach reward 1.0", { timeout: 120000 }, async () => {
  const served = await serveBenchmark("treasure-grid");
  try {
    for (const config of await debugConfigs("treasure-grid")) {
      const trajectory = await replayEpisode(served.endpoint, config.task_id, config.seed);
      const final = trajectory.final as { reward: number; terminated: boolean };
      assert.equal(final.reward, 1);
      assert.equal(final.terminated, true);
    }
  } finally {
    await stopBenchmark(served);
  }
});

test("remote env exposes the five-field step contract", { timeout: 60000 }, async () => {
  const served = await serveBenchmark("treasure-grid");
  try {
    const env = await remoteEnv(served.endpoint, "grid-3x3");
    const reset = await env.reset();
    assert.deepEqual(Object.keys(reset).sort(), ["info", "obs"]);
    const result = await env.step({ name: "move", args: { direction: "east" } });
    assert.deepEqual(Object.keys(result).sort(), [
      "info",
      "obs",
      "reward",
      "terminated",
      "truncated",
    ]);
    await env.close();
  } finally {
    await stopBenchmark(served);
  }
});

test("typed errors mirror wire codes", { timeout: 60000 }, async () => {
  const served = await serveBenchmark("treasure-grid");
  try {
    const session = new RemoteSession(served.endpoint);
    const task = await session.spawn("grid-3x3");
    await assert.rejects(() => task.evaluate(), NotResetYetError);
    await task.reset();
    for (const direction of ["east", "east", "south", "south"]) {
      await task.step({ name: "move", args: { direction } });
    }
    await assert.rejects(
      () => task.step({ name: "move", args: { direction: "north" } }),
      TaskTerminatedError
    );
    await task.close();
  } finally {
    await stopBenchmark(served);
  }
});

test("vault secret recomputed from seed wins the episode", { timeout: 60000 }, async () => {
  const served = await serveBenchmark("key-vault");
  try {
    const env = await remoteEnv(served.endpoint, "vault-easy", 0);
    await env.reset();
    const result = await env.step({
      name: "submit",
      args: { answer: secretHex(0) },
    });
    assert.equal(result.reward, 1);
    assert.equal(result.terminated, true);
    await env.close();
  } finally {
    await stopBenchmark(served);
  }
});
