/** Regenerate the golden series files from the committed fixtures. */

import { mkdirSync, writeFileSync } from "fs";
import { dirname, join } from "path";
import { fileURLToPath } from "url";

import { readCsv } from "./csv.js";
import { collapseDynamic, collapseStatic, serializeSeries, sweepLogLog, sweepSemiLog } from "./figures.js";

const root = dirname(dirname(fileURLToPath(import.meta.url)));
const fixtures = join(root, "fixtures");
const goldens = join(root, "goldens");

export function buildAll() {
  const sweepB1 = readCsv(join(fixtures, "sweep_B1.csv"));
  const sweepB2 = readCsv(join(fixtures, "sweep_B2.csv"));
  const collapsedB1 = readCsv(join(fixtures, "collapse_B1.csv"));
  const collapsedB2 = readCsv(join(fixtures, "collapse_B2.csv"));
  const dynamicSeries = ["64", "128", "256"].map((L) =>
    readCsv(join(fixtures, `dynamic_L${L}.csv`))
  );
  const pcB1 = Number(collapsedB1.meta["p_c"]);
  const pcB2 = Number(collapsedB2.meta["p_c"]);
  const gamma = Number(collapsedB1.meta["gamma"]);
  const z = Number(process.env["FIG_Z"] ?? "1.0");
  return [
    sweepLogLog(sweepB1, pcB1),
    sweepSemiLog(sweepB1),
    sweepLogLog(sweepB2, pcB2),
    sweepSemiLog(sweepB2),
    collapseStatic(collapsedB1),
    collapseStatic(collapsedB2),
    collapseDynamic(dynamicSeries, gamma, z),
  ];
}

const invokedDirectly = process.argv[1]?.endsWith("make_goldens.js") ?? false;
if (invokedDirectly) {
  mkdirSync(goldens, { recursive: true });
  for (const fig of buildAll()) {
    const path = join(goldens, `${fig.name}.series.json`);
    writeFileSync(path, serializeSeries(fig.series));
    console.log(path);
  }
}
