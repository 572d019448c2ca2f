import { readFileSync } from "fs";
import { join } from "path";
import { describe, expect, it } from "vitest";
import { parseCsv, SchemaMismatch } from "../src/csv";
import { parseSpectrum, renderFigure } from "../src/figures";

const FIXTURES = join(__dirname, "fixtures");
const runCsv = readFileSync(join(FIXTURES, "run_galerkin.csv"), "utf-8");
const spectrumJson = readFileSync(join(FIXTURES, "spectrum.json"), "utf-8");

// reference rates from the simulator's own `fit` subcommand on these inputs
const FIT_DIST_MANIFOLD = 0.05487097369032287;
const FIT_ENERGY_GAP = 0.10981127339494401;

describe("csv parsing", () => {
  it("reads the canonical run", () => {
    const table = parseCsv(runCsv);
    expect(table.columns).toEqual([
      "t", "R", "Rdot", "p", "mass", "E_total", "dEdt_fd", "diss_rhs",
      "residual", "dist_manifold", "normW",
    ]);
    expect(table.rows).toBeGreaterThan(1000);
  });

  it("rejects an empty csv with a row-count message", () => {
    expect(() => parseCsv("")).toThrow(/row count 0/);
    expect(() => parseCsv("t,R\n")).toThrow(/row count 0/);
  });

  it("rejects ragged and non-numeric rows", () => {
    expect(() => parseCsv("t,R\n1.0\n")).toThrow(SchemaMismatch);
    expect(() => parseCsv("t,R\n1.0,abc\n")).toThrow(SchemaMismatch);
  });
});

describe("figures", () => {
  it("renders every kind from the canonical run without schema errors", () => {
    for (const kind of ["radius_timeseries", "energy_decay",
                        "decay_fit_overlay"] as const) {
      const svg = renderFigure(kind, runCsv);
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).toContain("</svg>");
    }
    const svg = renderFigure("spectrum_plane", spectrumJson);
    expect(svg.startsWith("<svg")).toBe(true);
  });

  it("is idempotent: same input, same bytes", () => {
    const a = renderFigure("energy_decay", runCsv);
    const b = renderFigure("energy_decay", runCsv);
    expect(a).toBe(b);
  });

  it("annotates the energy-decay slope within 1% of the fit subcommand", () => {
    const svg = renderFigure("energy_decay", runCsv);
    const m = svg.match(/slope = -([0-9.eE+-]+)/);
    expect(m).not.toBeNull();
    const rate = Number(m![1]);
    expect(Math.abs(rate - FIT_ENERGY_GAP) / FIT_ENERGY_GAP).toBeLessThan(0.01);
  });

  it("annotates the manifold-distance rate within 1% of the fit subcommand", () => {
    const svg = renderFigure("decay_fit_overlay", runCsv);
    const m = svg.match(/rate = ([0-9.eE+-]+)/);
    expect(m).not.toBeNull();
    const rate = Number(m![1]);
    expect(Math.abs(rate - FIT_DIST_MANIFOLD) / FIT_DIST_MANIFOLD)
      .toBeLessThan(0.01);
  });

  it("places exactly one kernel marker at the origin of the spectrum plane", () => {
    const svg = renderFigure("spectrum_plane", spectrumJson);
    const kernels = svg.match(/class="marker-kernel"/g) ?? [];
    expect(kernels.length).toBe(1);
    expect((svg.match(/class="marker-eig"/g) ?? []).length).toBeGreaterThan(3);
    expect((svg.match(/class="marker-root"/g) ?? []).length).toBeGreaterThan(3);
    expect(svg).toContain('class="beta-line"');
  });

  it("validates the spectrum JSON schema", () => {
    expect(() => parseSpectrum("{}")).toThrow(SchemaMismatch);
    expect(() => parseSpectrum("not json")).toThrow(SchemaMismatch);
    expect(() => parseSpectrum('{"eigenvalues": [{"re": 1}], "q_roots": [],' +
      ' "beta": {"beta": 0.1}}')).toThrow(SchemaMismatch);
  });

  it("requires the columns a figure needs", () => {
    expect(() => renderFigure("radius_timeseries", "a,b\n1,2\n"))
      .toThrow(/missing column/);
    expect(() => renderFigure("decay_fit_overlay", "t,R\n1,2\n"))
      .toThrow(/missing column/);
  });
});
