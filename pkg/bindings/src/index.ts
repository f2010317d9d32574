/**
 * Node bindings for the wikitig table-evaluation toolkit.
 *
 * The numeric functions delegate to the toolkit's CLI (eval-table,
 * significance) and exchange its JSON wire formats, so results are the
 * primary implementation's doubles, bit for bit.  Strings cross the
 * boundary as UTF-8; reports come back as plain data.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { runCli, withTempDir, writeJsonl, CliError } from "./runner.js";

export type { Cell, GroupCell, PairCell, ParseMode } from "./format.js";
export { TableParseError, linearize, delinearize, sanitizeText } from "./format.js";
export { CliError } from "./runner.js";

export const VERSION = "0.1.0";

export type CellType = "header" | "group" | "value";
export type RougeVariant = "1" | "2" | "l";

export interface PrfScore {
  precision: number;
  recall: number;
  f1: number;
}

export interface BoundReport {
  nDocuments: number;
  /** display scores, x100 rounded to one decimal */
  rouge: Record<RougeVariant, number>;
  tableF1: Record<CellType, number>;
  corpusF1: Record<CellType, number>;
  raw: {
    rouge: Record<RougeVariant, number>;
    tableF1: Record<CellType, number>;
    corpusF1: Record<CellType, PrfScore>;
    docIds: string[];
    parseFailures: string[];
    perDoc: {
      rouge: Record<RougeVariant, number[]>;
      tableF1: Record<CellType, Array<number | null>>;
    };
  };
}

export interface EvaluateOptions {
  mode?: "strict" | "lenient";
  ids?: string[];
}

export interface BootstrapOptions {
  resamples?: number;
  seed?: number;
}

export interface BootstrapOutcome {
  pValue: number;
  wins: number;
  ties: number;
  losses: number;
  nResamples: number;
  seed: number;
  nDocuments: number;
  meanA: number;
  meanB: number;
}

function reportFromCliJson(obj: any): BoundReport {
  return {
    nDocuments: obj.n_documents,
    rouge: obj.rouge,
    tableF1: obj.table_f1,
    corpusF1: obj.corpus_f1,
    raw: {
      rouge: obj.raw.rouge,
      tableF1: obj.raw.table_f1,
      corpusF1: obj.raw.corpus_f1,
      docIds: obj.raw.doc_ids,
      parseFailures: obj.raw.parse_failures,
      perDoc: {
        rouge: obj.raw.per_doc.rouge,
        tableF1: obj.raw.per_doc.table_f1,
      },
    },
  };
}

function docIds(n: number, ids?: string[]): string[] {
  if (ids === undefined) {
    return Array.from({ length: n }, (_, i) => String(i).padStart(6, "0"));
  }
  if (ids.length !== n) {
    throw new RangeError(`ids length ${ids.length} does not match document count ${n}`);
  }
  return ids;
}

/** Score generated linearized tables against references via eval-table. */
export function evaluate(
  genStrings: string[],
  refStrings: string[],
  options: EvaluateOptions = {},
): BoundReport {
  if (genStrings.length !== refStrings.length) {
    throw new RangeError(
      `length mismatch: ${genStrings.length} generated vs ${refStrings.length} reference`,
    );
  }
  if (genStrings.length === 0) {
    throw new RangeError("no documents to score");
  }
  const ids = docIds(genStrings.length, options.ids);
  const mode = options.mode ?? "lenient";
  return withTempDir((dir) => {
    const genPath = join(dir, "gen.jsonl");
    const refPath = join(dir, "ref.jsonl");
    writeJsonl(genPath, ids.map((id, i) => ({ id, table: genStrings[i] })));
    writeJsonl(refPath, ids.map((id, i) => ({ id, table: refStrings[i] })));
    const stdout = runCli(["eval-table", "--gen", genPath, "--ref", refPath, "--mode", mode]);
    return reportFromCliJson(JSON.parse(stdout));
  });
}

export function tableF1(
  genStrings: string[],
  refStrings: string[],
  options: EvaluateOptions = {},
): Record<CellType, number> {
  return evaluate(genStrings, refStrings, options).raw.tableF1;
}

export function corpusF1(
  genStrings: string[],
  refStrings: string[],
  options: EvaluateOptions = {},
): Record<CellType, PrfScore> {
  return evaluate(genStrings, refStrings, options).raw.corpusF1;
}

function rouge(variant: RougeVariant, gen: string[], ref: string[], options: EvaluateOptions): number {
  return evaluate(gen, ref, options).raw.rouge[variant];
}

export function rouge1(gen: string[], ref: string[], options: EvaluateOptions = {}): number {
  return rouge("1", gen, ref, options);
}

export function rouge2(gen: string[], ref: string[], options: EvaluateOptions = {}): number {
  return rouge("2", gen, ref, options);
}

export function rougeL(gen: string[], ref: string[], options: EvaluateOptions = {}): number {
  return rouge("l", gen, ref, options);
}

/** Paired bootstrap over per-document scores via the significance command. */
export function pairedBootstrap(
  perDocA: number[],
  perDocB: number[],
  options: BootstrapOptions = {},
): BootstrapOutcome {
  if (perDocA.length !== perDocB.length) {
    throw new RangeError(`length mismatch: ${perDocA.length} vs ${perDocB.length}`);
  }
  const resamples = options.resamples ?? 10000;
  const seed = options.seed ?? 0;
  return withTempDir((dir) => {
    const aPath = join(dir, "a.json");
    const bPath = join(dir, "b.json");
    // raw score arrays, not reports
    writeFileSync(aPath, JSON.stringify(perDocA), "utf-8");
    writeFileSync(bPath, JSON.stringify(perDocB), "utf-8");
    const stdout = runCli([
      "significance", aPath, bPath,
      "--resamples", String(resamples),
      "--seed", String(seed),
    ]);
    const metrics = JSON.parse(stdout).metrics.score;
    return {
      pValue: metrics.p_value,
      wins: metrics.wins,
      ties: metrics.ties,
      losses: metrics.losses,
      nResamples: metrics.n_resamples,
      seed: metrics.seed,
      nDocuments: metrics.n_documents,
      meanA: metrics.mean_a,
      meanB: metrics.mean_b,
    };
  });
}

/** Version reported by the underlying CLI; must equal VERSION. */
export function cliVersion(): string {
  const out = runCli(["--version"]).trim();
  const match = out.match(/(\d+\.\d+\.\d+)/);
  if (!match) {
    throw new CliError(`cannot parse version from ${JSON.stringify(out)}`, 0, "");
  }
  return match[1];
}

/** Read records emitted by the extract/emit commands. */
export function readRecordsJsonl(path: string): any[] {
  return readFileSync(path, "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line));
}
