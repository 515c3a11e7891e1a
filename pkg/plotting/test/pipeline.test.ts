import { spawnSync } from "child_process";
import { mkdtempSync, readFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { beforeAll, describe, expect, it } from "vitest";

import { render } from "../src/render";

// end-to-end smoke: solver CLI emits the CSVs, this package renders them;
// needs the mopd entry point on PATH
const HAVE_MOPD = spawnSync("mopd", ["--help"]).status === 0;

function mopd(args: string[]): void {
  const res = spawnSync("mopd", args, { encoding: "utf8" });
  expect(res.error).toBeUndefined();
  expect(res.status, res.stderr).toBe(0);
}

describe.skipIf(!HAVE_MOPD)("solver csv pipeline", () => {
  let dir: string;
  const traces: string[] = [];
  let front: string;
  let flow: string;

  beforeAll(() => {
    dir = mkdtempSync(join(tmpdir(), "mopd-pipeline-"));
    for (const seed of [0, 1]) {
      const path = join(dir, `trace${seed}.csv`);
      mopd(["solve", "--problem", "bk1", "--seed", String(seed), "--trace", path]);
      traces.push(path);
    }
    front = join(dir, "front.csv");
    mopd(["front", "--problem", "bk1", "--starts", "40", "--seed", "0", "--out", front]);
    flow = join(dir, "flow.csv");
    mopd(["flow", "--problem", "bk1", "--h", "0.01", "--T", "3", "--out", flow]);
  }, 120_000);

  it("renders all three figure kinds deterministically", () => {
    const jobs = [
      { kind: "residuals" as const, inputs: traces, logY: true },
      { kind: "front" as const, inputs: [front], logY: false },
      { kind: "trajectory" as const, inputs: [flow], logY: false },
    ];
    for (const job of jobs) {
      const out1 = join(dir, `${job.kind}-1.png`);
      const out2 = join(dir, `${job.kind}-2.png`);
      render({ ...job, out: out1 });
      render({ ...job, out: out2 });
      const bytes = readFileSync(out1);
      expect(bytes.length).toBeGreaterThan(1000);
      expect(bytes.subarray(0, 8)).toEqual(
        Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a])
      );
      expect(bytes.equals(readFileSync(out2))).toBe(true);
    }
  }, 60_000);
});
