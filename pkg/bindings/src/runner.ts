/** Child-process plumbing: every call shells out to the toolkit's CLI. */

import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export class CliError extends Error {
  constructor(message: string, public readonly exitCode: number, public readonly stderr: string) {
    super(message);
    this.name = "CliError";
  }
}

function launcher(): { command: string; prefix: string[] } {
  const custom = process.env.WIKITIG_PYTHON;
  if (custom) {
    const parts = custom.split(" ").filter((p) => p.length > 0);
    return { command: parts[0], prefix: [...parts.slice(1), "-m", "wikitig"] };
  }
  return { command: "python3", prefix: ["-m", "wikitig"] };
}

export function runCli(args: string[]): string {
  const { command, prefix } = launcher();
  const proc = spawnSync(command, [...prefix, ...args], {
    encoding: "utf-8",
    maxBuffer: 256 * 1024 * 1024,
  });
  if (proc.error) {
    throw proc.error;
  }
  if (proc.status !== 0) {
    const detail = (proc.stderr ?? "").trim();
    throw new CliError(
      detail.length > 0 ? detail : `CLI exited with code ${proc.status}`,
      proc.status ?? -1,
      proc.stderr ?? "",
    );
  }
  return proc.stdout;
}

export function withTempDir<T>(body: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "wikitig-"));
  try {
    return body(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

export function writeJsonl(path: string, rows: object[]): void {
  writeFileSync(path, rows.map((r) => JSON.stringify(r) + "\n").join(""), "utf-8");
}
