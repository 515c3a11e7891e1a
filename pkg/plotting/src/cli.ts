#!/usr/bin/env node
import { parseArgs } from "util";

import { InputError } from "./csv";
import { FigureSpec, Kind, render } from "./render";

const USAGE = "usage: plot --kind trajectory|front|residuals --in CSV[,CSV...] --out PNG [--log-y]";

const USAGE_ERROR = 2;
const RUNTIME_ERROR = 3;

export function main(argv: string[]): number {
  let values: { kind?: string; in?: string; out?: string; "log-y"?: boolean };
  try {
    values = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        in: { type: "string" },
        out: { type: "string" },
        "log-y": { type: "boolean", default: false },
      },
    }).values;
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n${USAGE}\n`);
    return USAGE_ERROR;
  }
  const { kind, in: inputs, out } = values;
  if (kind === undefined || inputs === undefined || out === undefined) {
    process.stderr.write(`--kind, --in, and --out are required\n${USAGE}\n`);
    return USAGE_ERROR;
  }
  if (kind !== "trajectory" && kind !== "front" && kind !== "residuals") {
    process.stderr.write(`unknown figure kind: ${kind}\n${USAGE}\n`);
    return USAGE_ERROR;
  }
  const spec: FigureSpec = {
    kind: kind as Kind,
    inputs: inputs.split(",").filter((s) => s.length > 0),
    out,
    logY: values["log-y"] ?? false,
  };
  try {
    render(spec);
  } catch (err) {
    if (err instanceof InputError) {
      process.stderr.write(`${err.message}\n`);
      return USAGE_ERROR;
    }
    process.stderr.write(`${(err as Error).message}\n`);
    return RUNTIME_ERROR;
  }
  return 0;
}

if (require.main === module) {
  process.exitCode = main(process.argv.slice(2));
}
