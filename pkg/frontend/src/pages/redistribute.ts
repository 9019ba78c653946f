// Redistribute page: agreement summary for the uploaded table, then the
// second-pass assignment. Loads shown afterwards are entry counts from the
// allocation manifest inside the returned archive.

import { esc } from "../html.js";
import type { AllocationManifest, ReliabilityPayload } from "../types.js";

export interface RedistributeSpecForm {
  annotators: string;
  time: string;
  rate: string;
  re: string;
}

export interface RedistributeSpecResult {
  ok: boolean;
  message?: string;
  spec?: Record<string, number>;
}

export function buildRedistributeSpec(
  form: RedistributeSpecForm,
): RedistributeSpecResult {
  const spec: Record<string, number> = {};
  const required: (keyof RedistributeSpecForm)[] = ["annotators", "time", "rate"];
  for (const key of required) {
    const parsed = Number(form[key]);
    if (form[key].trim() === "" || !Number.isFinite(parsed) || parsed <= 0) {
      return { ok: false, message: `${key} must be a positive number` };
    }
    spec[key] = parsed;
  }
  if (form.re.trim() !== "") {
    const re = Number(form.re);
    if (!Number.isFinite(re) || re < 0) {
      return { ok: false, message: "re must be a non-negative number" };
    }
    spec.re = re;
  }
  return { ok: true, spec };
}

export function renderAgreementSummary(payload: ReliabilityPayload): string {
  const rows = Object.entries(payload.reliability)
    .map(
      ([name, value]) =>
        `<tr><th>${esc(name)}</th><td>${esc(String(value))}</td></tr>`,
    )
    .join("");
  return (
    `<section class="results agreement-summary"><h3>Current agreement</h3>` +
    `<p class="meta">metric ${esc(payload.metric)}, ` +
    `${esc(String(payload.iterations))} iterations, ` +
    `${payload.converged ? "converged" : "did not converge"}</p>` +
    `<table class="kv-table"><thead><tr><th>annotator</th><th>reliability</th></tr></thead>` +
    `<tbody>${rows}</tbody></table></section>`
  );
}

export function renderLoadTable(manifest: AllocationManifest): string {
  const rows = Object.entries(manifest.annotators)
    .map(([name, entry]) => {
      const singles = entry.single_ids.length;
      const doubles = entry.double_ids.length;
      const re = entry.reannotate_ids.length;
      return (
        `<tr data-annotator="${esc(name)}"><th>${esc(name)}</th>` +
        `<td>${singles}</td><td>${doubles}</td><td>${re}</td>` +
        `<td class="load-total">${singles + doubles}</td></tr>`
      );
    })
    .join("");
  return (
    `<table class="kv-table load-table">` +
    `<thead><tr><th>annotator</th><th>singles</th><th>doubles</th><th>re-annotations</th><th>assigned</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>` +
    `<p class="meta">seed ${esc(String(manifest.seed))}, ` +
    `${manifest.leftover_ids.length} leftover samples</p>`
  );
}

export function renderStuckList(stuck: string[]): string {
  const items = stuck.map((sid) => `<li>${esc(sid)}</li>`).join("");
  return (
    `<section class="results stuck"><h3>Redistribution infeasible</h3>` +
    `<p>These samples already carry annotations from every annotator:</p>` +
    `<ul class="stuck-list">${items}</ul></section>`
  );
}

export interface RedistributeState {
  busy: boolean;
  spec: RedistributeSpecForm;
  seed: string;
  error?: string;
  summary?: ReliabilityPayload;
  manifest?: AllocationManifest;
  stuck?: string[];
  downloadUrl?: string;
}

export function initialRedistributeState(): RedistributeState {
  return {
    busy: false,
    spec: { annotators: "", time: "", rate: "", re: "0" },
    seed: "0",
  };
}

export function renderRedistributePage(state: RedistributeState): string {
  const spec = state.spec;
  const error = state.error
    ? `<p class="form-error" role="alert">${esc(state.error)}</p>`
    : "";
  const progress = state.busy
    ? `<p class="progress" data-busy="true">working…</p>`
    : "";
  const summary = state.summary ? renderAgreementSummary(state.summary) : "";
  const stuck = state.stuck ? renderStuckList(state.stuck) : "";
  const loads = state.manifest
    ? `<section class="results"><h3>New assignment</h3>${renderLoadTable(state.manifest)}</section>`
    : "";
  const download = state.downloadUrl
    ? `<p><a class="download" href="${esc(state.downloadUrl)}"
        download="redistribution.zip">Download redistribution.zip</a></p>`
    : "";

  return `
<section class="page page-redistribute">
  <h2>Redistribute</h2>
  <p class="hint">Upload the compiled CSV from the first pass. Summarize
  shows current agreement; Redistribute plans the second pass so nobody
  re-annotates a sample they already saw.</p>
  <form id="redistribute-form">
    <label>compiled CSV
      <input name="compiled" type="file" accept=".csv" ${state.busy ? "disabled" : ""}></label>
    <fieldset class="spec-grid">
      <label>annotators (n)
        <input name="annotators" type="number" step="any" value="${esc(spec.annotators)}"
          ${state.busy ? "disabled" : ""}></label>
      <label>time budget (t)
        <input name="time" type="number" step="any" value="${esc(spec.time)}"
          ${state.busy ? "disabled" : ""}></label>
      <label>rate (rho)
        <input name="rate" type="number" step="any" value="${esc(spec.rate)}"
          ${state.busy ? "disabled" : ""}></label>
      <label>re-annotation rate (r)
        <input name="re" type="number" step="any" value="${esc(spec.re)}"
          ${state.busy ? "disabled" : ""}></label>
    </fieldset>
    <label>seed <input name="seed" type="number" value="${esc(state.seed)}"
      ${state.busy ? "disabled" : ""}></label>
    <button type="button" id="summarize" ${state.busy ? "disabled" : ""}>Summarize agreement</button>
    <button type="submit" ${state.busy ? "disabled" : ""}>Redistribute</button>
  </form>
  ${error}${progress}${summary}${stuck}${loads}${download}
</section>`;
}
