// Compile page: archive upload, the column rename editor, and a preview of
// the compiled CSV the service sends back.

import { parseCsv } from "../csv.js";
import { esc } from "../html.js";

export const PREVIEW_ROWS = 20;

export interface RenameRow {
  from: string;
  to: string;
}

export interface RenameResult {
  ok: boolean;
  message?: string;
  renames?: Record<string, string>;
}

export function buildRenames(rows: RenameRow[]): RenameResult {
  const renames: Record<string, string> = {};
  for (const row of rows) {
    const from = row.from.trim();
    const to = row.to.trim();
    if (from === "" && to === "") {
      continue;
    }
    if (from === "" || to === "") {
      return { ok: false, message: "rename rows need both a from and a to column" };
    }
    if (from in renames) {
      return { ok: false, message: `duplicate rename source ${from}` };
    }
    renames[from] = to;
  }
  return { ok: true, renames };
}

export function renderPreview(csvText: string): string {
  const rows = parseCsv(csvText, PREVIEW_ROWS + 1);
  if (rows.length === 0) {
    return `<p class="hint">compiled table is empty</p>`;
  }
  const [header, ...body] = rows;
  const head = header.map((cell) => `<th>${esc(cell)}</th>`).join("");
  const trs = body
    .map(
      (row) =>
        `<tr>${row.map((cell) => `<td>${esc(cell)}</td>`).join("")}</tr>`,
    )
    .join("");
  return (
    `<div class="scroll-x"><table class="preview-table">` +
    `<thead><tr>${head}</tr></thead><tbody>${trs}</tbody></table></div>` +
    `<p class="hint">showing first ${body.length} rows</p>`
  );
}

export interface CompileState {
  busy: boolean;
  renameRows: RenameRow[];
  toast?: string;
  csvText?: string;
  downloadUrl?: string;
}

export function renderCompilePage(state: CompileState): string {
  const rows = state.renameRows
    .map(
      (row, i) => `
      <div class="rename-row" data-index="${i}">
        <input name="rename-from-${i}" placeholder="archive column"
               value="${esc(row.from)}" ${state.busy ? "disabled" : ""}>
        <span>→</span>
        <input name="rename-to-${i}" placeholder="compiled column"
               value="${esc(row.to)}" ${state.busy ? "disabled" : ""}>
      </div>`,
    )
    .join("");

  const toast = state.toast
    ? `<div class="toast" role="alert">${esc(state.toast)}</div>`
    : "";
  const progress = state.busy
    ? `<p class="progress" data-busy="true">compiling…</p>`
    : "";
  const preview = state.csvText
    ? `<section class="results"><h3>Compiled table</h3>${renderPreview(state.csvText)}</section>`
    : "";
  const download = state.downloadUrl
    ? `<p><a class="download" href="${esc(state.downloadUrl)}"
          download="compiled.csv">Download compiled.csv</a></p>`
    : "";

  return `
<section class="page page-compile">
  <h2>Compile annotations</h2>
  <p class="hint">Upload a ZIP of per-annotator task CSVs. Optional renames
  map archive column names onto the compiled ones.</p>
  <form id="compile-form">
    <label>task archive (ZIP)
      <input name="archive" type="file" accept=".zip" ${state.busy ? "disabled" : ""}></label>
    <div id="rename-editor">
      <h4>Column renames</h4>
      ${rows}
      <button type="button" id="add-rename" ${state.busy ? "disabled" : ""}>add rename</button>
    </div>
    <button type="submit" ${state.busy ? "disabled" : ""}>Compile</button>
  </form>
  ${toast}${progress}${preview}${download}
</section>`;
}
