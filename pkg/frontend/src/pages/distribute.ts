// Distribution page: the capacity spec form, solve feedback, and the
// allocation download. The solved numbers shown come from spec.json inside
// the archive the service returns; the form itself never solves anything.

import { esc } from "../html.js";
import type { SolvedSpec } from "../types.js";

export const SPEC_FIELDS = [
  { key: "annotators", label: "annotators (n)" },
  { key: "time", label: "time budget (t)" },
  { key: "rate", label: "rate (rho)" },
  { key: "samples", label: "samples (N)" },
  { key: "double", label: "double fraction (d)" },
  { key: "re", label: "re-annotation rate (r)" },
] as const;

export type SpecFieldKey = (typeof SPEC_FIELDS)[number]["key"];

// Only these can be left blank for the service to solve; d and r have no
// closed-form inverse in the capacity identity.
const SOLVABLE: SpecFieldKey[] = ["annotators", "time", "rate", "samples"];

export type SpecFormValues = Record<SpecFieldKey, string>;

export interface SpecValidation {
  ok: boolean;
  message?: string;
  spec?: Record<string, number>;
  solveFor?: SpecFieldKey;
}

export function validateSpecForm(values: SpecFormValues): SpecValidation {
  const blanks = SPEC_FIELDS.map((f) => f.key).filter(
    (key) => values[key].trim() === "",
  );
  if (blanks.length !== 1) {
    const listed = blanks.length === 0 ? "none" : blanks.join(", ");
    return {
      ok: false,
      message:
        `leave exactly one field blank for the service to solve ` +
        `(blank: ${listed})`,
    };
  }
  const blank = blanks[0];
  if (!SOLVABLE.includes(blank)) {
    return {
      ok: false,
      message: `${blank} cannot be solved for; fill it in and blank one of ${SOLVABLE.join(", ")}`,
    };
  }
  const spec: Record<string, number> = {};
  for (const field of SPEC_FIELDS) {
    if (field.key === blank) {
      continue;
    }
    const parsed = Number(values[field.key]);
    if (!Number.isFinite(parsed)) {
      return { ok: false, message: `${field.key} is not a number` };
    }
    spec[field.key] = parsed;
  }
  return { ok: true, spec, solveFor: blank };
}

export interface DistributeState {
  busy: boolean;
  values: SpecFormValues;
  seed: string;
  names: string;
  error?: string;
  solved?: SolvedSpec;
  solvedFor?: SpecFieldKey;
  downloadUrl?: string;
  downloadName?: string;
}

export function emptySpecValues(): SpecFormValues {
  return { annotators: "", time: "", rate: "", samples: "", double: "0", re: "0" };
}

export function renderSolvedSpec(
  solved: SolvedSpec,
  solvedFor?: SpecFieldKey,
): string {
  const rows = [
    ["annotators", solved.annotators, solved.annotators_floor],
    ["time", solved.time, null],
    ["rate", solved.rate, null],
    ["samples", solved.samples, solved.samples_floor],
    ["load per annotator", solved.load, solved.load_floor],
    ["double", solved.double, null],
    ["re", solved.re, null],
  ] as const;
  const body = rows
    .map(([name, value, floor]) => {
      const mark = name === solvedFor ? " class=\"solved-cell\"" : "";
      const floorCell = floor === null ? "" : esc(floor);
      return (
        `<tr${mark}><th>${esc(name)}</th>` +
        `<td data-field="${esc(name)}">${esc(value)}</td>` +
        `<td>${floorCell}</td></tr>`
      );
    })
    .join("");
  return (
    `<table class="kv-table solved-spec">` +
    `<thead><tr><th>field</th><th>value</th><th>floor</th></tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

export function renderDistributePage(state: DistributeState): string {
  const fields = SPEC_FIELDS.map(
    (field) =>
      `<label>${esc(field.label)}
        <input name="${field.key}" type="number" step="any"
               value="${esc(state.values[field.key])}"
               ${state.busy ? "disabled" : ""}></label>`,
  ).join("");

  const error = state.error
    ? `<p class="form-error" role="alert">${esc(state.error)}</p>`
    : "";
  const progress = state.busy
    ? `<p class="progress" data-busy="true">distributing…</p>`
    : "";
  const solved = state.solved
    ? `<section class="results"><h3>Solved spec</h3>` +
      renderSolvedSpec(state.solved, state.solvedFor) +
      `</section>`
    : "";
  const download = state.downloadUrl
    ? `<p><a class="download" href="${esc(state.downloadUrl)}"
          download="${esc(state.downloadName ?? "allocation.zip")}">
          Download ${esc(state.downloadName ?? "allocation.zip")}</a></p>`
    : "";

  return `
<section class="page page-distribute">
  <h2>Distribute samples</h2>
  <p class="hint">Fill five of the six spec fields and leave the one to
  solve blank. Upload the sample pool CSV (sample_id column required).</p>
  <form id="distribute-form">
    <fieldset class="spec-grid">${fields}</fieldset>
    <label>seed <input name="seed" type="number" value="${esc(state.seed)}"
      ${state.busy ? "disabled" : ""}></label>
    <label>annotator names (comma separated, optional)
      <input name="names" type="text" value="${esc(state.names)}"
        ${state.busy ? "disabled" : ""}></label>
    <label>sample pool CSV
      <input name="pool" type="file" accept=".csv" ${state.busy ? "disabled" : ""}></label>
    <button type="submit" ${state.busy ? "disabled" : ""}>Distribute</button>
  </form>
  ${error}${progress}${solved}${download}
</section>`;
}
