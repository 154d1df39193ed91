#!/usr/bin/env node
/** cube-ts-replay: replay debug tasks against a CUBE endpoint into JSONL. */

import { writeFileSync } from "node:fs";
import { parityDump, type ReplayJob } from "./replay.js";

function usage(): never {
  console.error(
    "usage: cube-ts-replay --target <url> --task <id> [--seed N] --out traj.jsonl"
  );
  process.exit(2);
}

function parseArgs(argv: string[]): { target: string; task: string; seed: number | null; out: string } {
  let target: string | undefined;
  let task: string | undefined;
  let out: string | undefined;
  let seed: number | null = null;
  for (let i = 0; i < argv.length; i += 1) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--target":
        target = value;
        i += 1;
        break;
      case "--task":
        task = value;
        i += 1;
        break;
      case "--seed":
        seed = Number.parseInt(value, 10);
        i += 1;
        break;
      case "--out":
        out = value;
        i += 1;
        break;
      default:
        usage();
    }
  }
  if (target === undefined || task === undefined || out === undefined) usage();
  return { target, task, seed, out };
}

async function main(): Promise<void> {
  const args = parseArgs(process.argv.slice(2));
  const jobs: ReplayJob[] = [{ taskId: args.task, seed: args.seed }];
  const jsonl = await parityDump(args.target, jobs);
  writeFileSync(args.out, jsonl, "utf-8");
  process.stdout.write(`${args.task} seed=${args.seed} -> ${args.out}\n`);
}

main().catch((err) => {
  console.error(String(err));
  process.exit(1);
});
