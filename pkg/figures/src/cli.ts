#!/usr/bin/env node
/** Batch figure regeneration from sweep CSV files.
 *
 *   panel --csv FILE --quantity F|lambda_min|region [--levels a,b,c]
 *         [--title TEXT] --out-dir DIR [--name NAME.svg]
 *   grid  --csv PS.csv --csv PA.csv --csv PC.csv --out-dir DIR [--name NAME.svg]
 *
 * `grid` renders the nine-panel composite: columns follow the input file
 * order, rows are fidelity, minimum eigenvalue, region mask.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { parseSweepCsv } from "./csv.js";
import { GridPanel, Quantity, renderGrid, renderPanel } from "./panels.js";

interface Args {
  mode: string;
  csv: string[];
  quantity?: string;
  levels?: number[];
  title?: string;
  outDir: string;
  name?: string;
}

function parseArgs(argv: string[]): Args {
  if (argv.length === 0) throw new Error("missing mode: 'panel' or 'grid'");
  const args: Args = { mode: argv[0], csv: [], outDir: "." };
  for (let i = 1; i < argv.length; i++) {
    const flag = argv[i];
    const need = () => {
      if (i + 1 >= argv.length) throw new Error(`${flag} needs a value`);
      return argv[++i];
    };
    switch (flag) {
      case "--csv":
        args.csv.push(need());
        break;
      case "--quantity":
        args.quantity = need();
        break;
      case "--levels":
        args.levels = need().split(",").map(Number);
        break;
      case "--title":
        args.title = need();
        break;
      case "--out-dir":
        args.outDir = need();
        break;
      case "--name":
        args.name = need();
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  return args;
}

function asQuantity(text: string | undefined): Quantity {
  if (text === "F" || text === "lambda_min" || text === "region") return text;
  throw new Error(`--quantity must be F, lambda_min or region (got '${text}')`);
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 1;
  }
  try {
    fs.mkdirSync(args.outDir, { recursive: true });
    if (args.mode === "panel") {
      if (args.csv.length !== 1) throw new Error("panel mode takes exactly one --csv");
      const data = parseSweepCsv(fs.readFileSync(args.csv[0], "utf8"));
      const quantity = asQuantity(args.quantity);
      const svg = renderPanel(data, { quantity, levels: args.levels, title: args.title });
      const name = args.name ?? `${path.basename(args.csv[0], ".csv")}_${quantity}.svg`;
      const out = path.join(args.outDir, name);
      fs.writeFileSync(out, svg);
      console.log(`wrote ${out}`);
      return 0;
    }
    if (args.mode === "grid") {
      if (args.csv.length !== 3) throw new Error("grid mode takes exactly three --csv files");
      const datasets = args.csv.map((p) => parseSweepCsv(fs.readFileSync(p, "utf8")));
      const quantities: Quantity[] = ["F", "lambda_min", "region"];
      const panels: GridPanel[] = [];
      for (const quantity of quantities) {
        for (let c = 0; c < 3; c++) {
          const label = `${datasets[c].metadata["spec"] ?? path.basename(args.csv[c])} ${quantity}`;
          panels.push({ data: datasets[c], spec: { quantity, title: label } });
        }
      }
      const svg = renderGrid(panels);
      const name = args.name ?? "composite.svg";
      const out = path.join(args.outDir, name);
      fs.writeFileSync(out, svg);
      console.log(`wrote ${out}`);
      return 0;
    }
    throw new Error(`unknown mode '${args.mode}'`);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

import { fileURLToPath } from "node:url";

if (process.argv[1] && fileURLToPath(import.meta.url) === path.resolve(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
