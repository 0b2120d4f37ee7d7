/**
 * figures CLI: render sweep/collapse/dynamic figures from simulation CSVs.
 *
 *   node dist/cli.js sweep   --csv sweep_B1.csv --pc 0.15 --outdir figs
 *   node dist/cli.js collapse --csv collapse_B1.csv --outdir figs
 *   node dist/cli.js dynamic --series a.csv b.csv c.csv --gamma 0.30 --z 1.0 --outdir figs
 *
 * Each figure is written as <name>.svg plus <name>.series.json (the exact
 * plotted data series, used for golden-file verification).
 */

import { mkdirSync, writeFileSync } from "fs";
import { join } from "path";

import { readCsv } from "./csv.js";
import { Figure, collapseDynamic, collapseStatic, serializeSeries, sweepLogLog, sweepSemiLog } from "./figures.js";

interface Args {
  command: string;
  flags: Record<string, string[]>;
}

function parseArgs(argv: string[]): Args {
  const [command, ...rest] = argv;
  const flags: Record<string, string[]> = {};
  let key: string | null = null;
  for (const tok of rest) {
    if (tok.startsWith("--")) {
      key = tok.slice(2);
      flags[key] = flags[key] ?? [];
    } else if (key) {
      flags[key].push(tok);
    } else {
      throw new Error(`unexpected argument ${tok}`);
    }
  }
  return { command: command ?? "", flags };
}

function one(args: Args, name: string): string | null {
  const v = args.flags[name];
  if (!v || v.length === 0) return null;
  return v[v.length - 1];
}

function writeFigure(outdir: string, fig: Figure): string[] {
  mkdirSync(outdir, { recursive: true });
  const svgPath = join(outdir, `${fig.name}.svg`);
  const seriesPath = join(outdir, `${fig.name}.series.json`);
  writeFileSync(svgPath, fig.svg);
  writeFileSync(seriesPath, serializeSeries(fig.series));
  return [svgPath, seriesPath];
}

export function run(argv: string[]): number {
  const args = parseArgs(argv);
  const outdir = one(args, "outdir") ?? ".";
  const tag = one(args, "tag") ?? "";
  const written: string[] = [];
  switch (args.command) {
    case "sweep": {
      const csv = one(args, "csv");
      if (!csv) throw new Error("sweep needs --csv");
      const pcRaw = one(args, "pc");
      const file = readCsv(csv);
      written.push(...writeFigure(outdir, sweepLogLog(file, pcRaw === null ? null : Number(pcRaw), tag)));
      written.push(...writeFigure(outdir, sweepSemiLog(file, tag)));
      break;
    }
    case "collapse": {
      const csv = one(args, "csv");
      if (!csv) throw new Error("collapse needs --csv");
      written.push(...writeFigure(outdir, collapseStatic(readCsv(csv), tag)));
      break;
    }
    case "dynamic": {
      const series = args.flags["series"] ?? [];
      const gamma = one(args, "gamma");
      const z = one(args, "z");
      if (series.length === 0 || gamma === null || z === null) {
        throw new Error("dynamic needs --series files, --gamma and --z");
      }
      written.push(
        ...writeFigure(outdir, collapseDynamic(series.map(readCsv), Number(gamma), Number(z), tag))
      );
      break;
    }
    default:
      console.error("usage: figures <sweep|collapse|dynamic> [flags]");
      return 1;
  }
  for (const w of written) console.log(w);
  return 0;
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js") ?? false;
if (invokedDirectly) {
  try {
    process.exit(run(process.argv.slice(2)));
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exit(2);
  }
}
