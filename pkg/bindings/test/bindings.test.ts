import assert from "node:assert/strict";
import test from "node:test";
import { join } from "node:path";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";

import {
  VERSION,
  cliVersion,
  corpusF1,
  delinearize,
  evaluate,
  linearize,
  pairedBootstrap,
  rouge1,
  sanitizeText,
  tableF1,
  type Cell,
} from "../src/index.js";
import { runCli, writeJsonl } from "../src/runner.js";

function randomInt(state: { x: number }, bound: number): number {
  // xorshift keeps fixtures reproducible without a dependency
  state.x ^= state.x << 13;
  state.x ^= state.x >>> 17;
  state.x ^= state.x << 5;
  state.x >>>= 0;
  return state.x % bound;
}

const WORDS = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta"];

function randomCellText(state: { x: number }): string {
  const n = 1 + randomInt(state, 3);
  return Array.from({ length: n }, () => WORDS[randomInt(state, WORDS.length)]).join(" ");
}

function randomCells(state: { x: number }): Cell[] {
  const n = 1 + randomInt(state, 5);
  return Array.from({ length: n }, (): Cell => {
    if (randomInt(state, 10) < 3) {
      return { kind: "group", text: randomCellText(state) };
    }
    return { kind: "pair", header: randomCellText(state), value: randomCellText(state) };
  });
}

test("version matches the primary CLI", () => {
  assert.equal(cliVersion(), VERSION);
});

test("identical inputs score 1.0 everywhere present", () => {
  const strings = ["A | B <> C | D <> Section", "Place of origin | England"];
  const report = evaluate(strings, strings);
  assert.equal(report.raw.rouge["1"], 1.0);
  assert.equal(report.raw.rouge["2"], 1.0);
  assert.equal(report.raw.rouge["l"], 1.0);
  assert.equal(report.raw.tableF1.header, 1.0);
  assert.equal(report.raw.tableF1.value, 1.0);
  assert.equal(report.raw.tableF1.group, 1.0);
  assert.equal(report.rouge["1"], 100.0);
  assert.equal(report.nDocuments, 2);
});

test("clipping fixture scores exactly two thirds", () => {
  const report = evaluate(["X | Y <> X | Y"], ["X | Y"]);
  assert.equal(report.raw.tableF1.value, 2 / 3);
  assert.equal(report.tableF1.value, 66.7);
});

test("length mismatch raises before any process is spawned", () => {
  assert.throws(() => evaluate(["A | B"], []), RangeError);
  assert.throws(() => pairedBootstrap([1, 2], [1]), RangeError);
});

test("strict mode surfaces the CLI parse error", () => {
  assert.throws(
    () => evaluate(["A | B | C"], ["A | B"], { mode: "strict" }),
    (err: Error) => err.name === "CliError" && /fields/.test(err.message),
  );
});

test("tableF1 / corpusF1 / rouge1 helpers agree with evaluate", () => {
  const gen = ["A | B <> G", "X | Y"];
  const ref = ["A | B <> H", "X | Z"];
  const report = evaluate(gen, ref);
  assert.deepEqual(tableF1(gen, ref), report.raw.tableF1);
  assert.deepEqual(corpusF1(gen, ref), report.raw.corpusF1);
  assert.equal(rouge1(gen, ref), report.raw.rouge["1"]);
});

test("pairedBootstrap matches the enumerated fixture and is seed-stable", () => {
  const a = [1, 1, 1, 0];
  const b = [0, 0, 0, 1];
  const first = pairedBootstrap(a, b, { resamples: 10000, seed: 5 });
  assert.ok(Math.abs(first.pValue - 67 / 256) < 0.03);
  assert.equal(first.wins + first.ties + first.losses, 10000);
  const second = pairedBootstrap(a, b, { resamples: 10000, seed: 5 });
  assert.deepEqual(first, second);
});

test("binding equivalence: bound evaluate equals direct CLI output bit-for-bit", () => {
  const state = { x: 20240817 };
  const batches = 10;
  const docsPerBatch = 10; // 100 random fixtures total
  for (let batch = 0; batch < batches; batch++) {
    const gen: string[] = [];
    const ref: string[] = [];
    for (let d = 0; d < docsPerBatch; d++) {
      gen.push(linearize(randomCells(state)));
      ref.push(linearize(randomCells(state)));
    }
    const ids = gen.map((_, i) => `doc${String(i).padStart(3, "0")}`);
    const bound = evaluate(gen, ref, { ids });

    const dir = mkdtempSync(join(tmpdir(), "wikitig-equiv-"));
    try {
      const genPath = join(dir, "gen.jsonl");
      const refPath = join(dir, "ref.jsonl");
      writeJsonl(genPath, ids.map((id, i) => ({ id, table: gen[i] })));
      writeJsonl(refPath, ids.map((id, i) => ({ id, table: ref[i] })));
      const direct = JSON.parse(
        runCli(["eval-table", "--gen", genPath, "--ref", refPath, "--mode", "lenient"]),
      );

      for (const variant of ["1", "2", "l"] as const) {
        assert.equal(bound.raw.rouge[variant], direct.raw.rouge[variant]);
        assert.deepEqual(bound.raw.perDoc.rouge[variant], direct.raw.per_doc.rouge[variant]);
      }
      for (const cellType of ["header", "group", "value"] as const) {
        assert.equal(bound.raw.tableF1[cellType], direct.raw.table_f1[cellType]);
        assert.deepEqual(bound.raw.corpusF1[cellType], direct.raw.corpus_f1[cellType]);
        assert.deepEqual(
          bound.raw.perDoc.tableF1[cellType],
          direct.raw.per_doc.table_f1[cellType],
        );
      }
    } finally {
      rmSync(dir, { recursive: true, force: true });
    }
  }
});

test("local codecs match the primary through the emitted file schema", () => {
  const page = `<html><body>
<table class="infobox">
<tr><th>Codec Checks</th></tr>
<tr><td><img src="/m/codec.png" width="320" height="240">Codec Checks diagram</td></tr>
<tr><th>First</th><td>Value one | piped</td></tr>
<tr><th colspan="2">A Group</th></tr>
<tr><th>Second</th><td>  spaced   out  </td></tr>
</table>
</body></html>`;
  const dir = mkdtempSync(join(tmpdir(), "wikitig-codec-"));
  try {
    writeFileSync(join(dir, "codec_checks.html"), page, "utf-8");
    const out = join(dir, "out");
    runCli(["extract", "--input", dir, "--out", out]);
    const lines = readFileSync(join(out, "records.jsonl"), "utf-8")
      .split("\n")
      .filter((l) => l.trim().length > 0);
    assert.equal(lines.length, 1);
    const record = JSON.parse(lines[0]);

    const cells: Cell[] = record.cells.map((c: any) =>
      c.type === "group"
        ? { kind: "group", text: c.text }
        : { kind: "pair", header: c.header, value: c.value },
    );
    assert.equal(linearize(cells), record.table_linearized);
    assert.deepEqual(delinearize(record.table_linearized, "strict"), cells);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
});

test("sanitizeText matches the pinned rules", () => {
  assert.equal(sanitizeText("  a   b  "), "a b");
  assert.equal(sanitizeText("x | y <> z"), "x / y z");
  assert.equal(sanitizeText("a<<>>b"), "ab");
});

test("delinearize handles lenient model output", () => {
  assert.deepEqual(delinearize("A | B | C", "lenient"), [
    { kind: "pair", header: "A", value: "B / C" },
  ]);
  assert.throws(() => delinearize("", "lenient"));
  assert.throws(() => delinearize("A | B | C", "strict"));
});
