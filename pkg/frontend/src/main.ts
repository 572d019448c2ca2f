/**
 * plot <kind> <input> -o <output>
 *
 * kinds: radius_timeseries | energy_decay | spectrum_plane | decay_fit_overlay
 * input: a simulate CSV (or the spectrum JSON for spectrum_plane)
 */

import { readFileSync, writeFileSync } from "fs";
import { SchemaMismatch } from "./csv";
import { FIGURE_KINDS, FigureKind, renderFigure } from "./figures";

function usage(): never {
  process.stderr.write(
    `usage: plot <kind> <input> -o <output>\n  kinds: ${FIGURE_KINDS.join(" | ")}\n`,
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  const args = argv.slice(2);
  if (args.length < 4) usage();
  const kind = args[0] as FigureKind;
  if (!FIGURE_KINDS.includes(kind)) usage();
  const input = args[1];
  const oIdx = args.indexOf("-o");
  if (oIdx < 0 || oIdx + 1 >= args.length) usage();
  const output = args[oIdx + 1];

  let text: string;
  try {
    text = readFileSync(input, "utf-8");
  } catch (err) {
    process.stderr.write(`io error: cannot read ${input}: ${err}\n`);
    return 4;
  }
  let svg: string;
  try {
    svg = renderFigure(kind, text);
  } catch (err) {
    if (err instanceof SchemaMismatch) {
      process.stderr.write(`schema mismatch: ${err.message}\n`);
      return 3;
    }
    throw err;
  }
  try {
    writeFileSync(output, svg);
  } catch (err) {
    process.stderr.write(`io error: cannot write ${output}: ${err}\n`);
    return 4;
  }
  process.stdout.write(`${output}\n`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv));
}
