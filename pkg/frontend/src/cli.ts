#!/usr/bin/env node
/** `plotkit render --spec plot.json`: CSV zero sets to an SVG scatter. */

import { readFileSync, writeFileSync } from "node:fs";
import { dirname, resolve } from "node:path";

import { renderScatter } from "./render.js";
import { validateSpec } from "./spec.js";

function usage(): never {
  process.stderr.write("usage: plotkit render --spec plot.json\n");
  process.exit(2);
}

export function main(argv: string[]): number {
  if (argv.length < 1 || argv[0] !== "render") usage();
  const flag = argv.indexOf("--spec");
  if (flag === -1 || flag + 1 >= argv.length) usage();
  const specPath = argv[flag + 1];
  let spec;
  try {
    const raw = JSON.parse(readFileSync(specPath, "utf-8"));
    spec = validateSpec(raw);
    // series paths resolve relative to the spec file
    spec = {
      ...spec,
      series: spec.series.map((s) => ({
        ...s,
        path: resolve(dirname(specPath), s.path),
      })),
      output: resolve(dirname(specPath), spec.output),
    };
  } catch (err) {
    process.stderr.write(`spec error: ${(err as Error).message}\n`);
    return 2;
  }
  try {
    const { svg, warnings } = renderScatter(spec);
    for (const w of warnings) process.stderr.write(`warning: ${w}\n`);
    writeFileSync(spec.output, svg, "utf-8");
    process.stdout.write(`${spec.output}\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`render error: ${(err as Error).message}\n`);
    return 1;
  }
}

const self = process.argv[1] ?? "";
if (self.endsWith("cli.js") || self.endsWith("cli.ts")) {
  process.exit(main(process.argv.slice(2)));
}
