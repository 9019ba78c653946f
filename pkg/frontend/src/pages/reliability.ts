// Reliability page: metric configuration plus the four result views
// (report table, 2D SVG, rotatable 3D scene, heatmap). Every number shown
// is lifted verbatim from the service payload.

import { esc } from "../html.js";
import { agreementColor, DEFAULT_VIEW, renderSceneSvg, ViewAngles } from "../scene.js";
import type { ReliabilityConfig } from "../api.js";
import type { HeatmapMatrix, ReliabilityPayload } from "../types.js";
import { GENERATORS, METRICS, RELIABILITY_OUTPUTS } from "../types.js";

const BLANK_FILL = "#e8e8e8";

export interface MappingRow {
  label: string;
  index: string;
}

export interface ReliabilityForm {
  metric: string;
  alpha: string;
  overlap: string;
  generator: string;
  autoMapping: boolean;
  mappingRows: MappingRow[];
  outputs: string[];
}

export function defaultReliabilityForm(): ReliabilityForm {
  return {
    metric: "krippendorff_nominal",
    alpha: "0.5",
    overlap: "0",
    generator: "default",
    autoMapping: true,
    mappingRows: [],
    outputs: [...RELIABILITY_OUTPUTS],
  };
}

export interface ConfigResult {
  ok: boolean;
  message?: string;
  config?: ReliabilityConfig;
}

export function buildReliabilityConfig(form: ReliabilityForm): ConfigResult {
  const alpha = Number(form.alpha);
  if (!Number.isFinite(alpha) || alpha < 0 || alpha > 1) {
    return { ok: false, message: "alpha must lie in [0, 1]" };
  }
  const overlap = Number(form.overlap);
  if (!Number.isInteger(overlap) || overlap < 0) {
    return { ok: false, message: "overlap threshold must be a whole number" };
  }
  const config: ReliabilityConfig = {
    metric: form.metric,
    alpha,
    overlap_threshold: overlap,
    label_generator: form.generator,
    outputs: [...form.outputs],
  };
  if (!form.autoMapping) {
    const mapping: Record<string, number> = {};
    for (const row of form.mappingRows) {
      const label = row.label.trim();
      if (label === "" && row.index.trim() === "") {
        continue;
      }
      const index = Number(row.index);
      if (
        label === "" ||
        row.index.trim() === "" ||
        !Number.isInteger(index) ||
        index < 0
      ) {
        return {
          ok: false,
          message: "mapping rows need a label and a non-negative class index",
        };
      }
      if (label in mapping) {
        return { ok: false, message: `duplicate mapping label ${label}` };
      }
      mapping[label] = index;
    }
    if (Object.keys(mapping).length === 0) {
      return {
        ok: false,
        message: "manual mapping selected but no rows filled in",
      };
    }
    config.mapping = mapping;
  }
  return { ok: true, config };
}

export function renderReliabilityTable(payload: ReliabilityPayload): string {
  const rows = Object.entries(payload.reliability)
    .map(
      ([name, value]) =>
        `<tr><th>${esc(name)}</th>` +
        `<td data-annotator="${esc(name)}">${esc(String(value))}</td></tr>`,
    )
    .join("");
  const converged = payload.converged ? "converged" : "did not converge";
  return (
    `<p class="meta">metric ${esc(payload.metric)}, alpha ${esc(String(payload.alpha))}, ` +
    `${esc(String(payload.iterations))} iterations, ${converged}</p>` +
    `<table class="kv-table reliability-table">` +
    `<thead><tr><th>annotator</th><th>reliability</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

export function renderHeatmapTable(matrix: HeatmapMatrix): string {
  const head = matrix.cols.map((c) => `<th>${esc(c)}</th>`).join("");
  const body = matrix.rows
    .map((row, i) => {
      const cells = matrix.values[i]
        .map((value, j) => {
          if (value === null) {
            return `<td class="hm-cell" data-row="${esc(row)}" data-col="${esc(matrix.cols[j])}" style="background:${BLANK_FILL}"></td>`;
          }
          return (
            `<td class="hm-cell" data-row="${esc(row)}" data-col="${esc(matrix.cols[j])}" ` +
            `style="background:${agreementColor(value)}" title="${esc(String(value))}">` +
            `${esc(value.toFixed(2))}</td>`
          );
        })
        .join("");
      return `<tr><th class="hm-row" data-row="${esc(row)}">${esc(row)}</th>${cells}</tr>`;
    })
    .join("");
  return (
    `<div class="scroll-x"><table class="heatmap-table">` +
    `<thead><tr><th></th>${head}</tr></thead><tbody>${body}</tbody></table></div>`
  );
}

export interface ReliabilityState {
  busy: boolean;
  form: ReliabilityForm;
  error?: string;
  payload?: ReliabilityPayload;
  view: ViewAngles;
}

export function initialReliabilityState(): ReliabilityState {
  return { busy: false, form: defaultReliabilityForm(), view: { ...DEFAULT_VIEW } };
}

function renderResults(payload: ReliabilityPayload, view: ViewAngles): string {
  const parts: string[] = [`<section class="results"><h3>Reliability</h3>`];
  parts.push(renderReliabilityTable(payload));
  if (payload.images && payload.images.graph2d) {
    parts.push(`<h3>Agreement graph</h3><div class="svg-host">${payload.images.graph2d}</div>`);
  }
  if (payload.scene3d) {
    parts.push(
      `<h3>3D view</h3><p class="hint">drag to rotate</p>` +
        `<div id="scene-host" class="svg-host">${renderSceneSvg(payload.scene3d, view)}</div>`,
    );
  }
  if (payload.heatmap_matrix) {
    parts.push(`<h3>Pairwise heatmap</h3>${renderHeatmapTable(payload.heatmap_matrix)}`);
  }
  parts.push(`</section>`);
  return parts.join("");
}

export function renderReliabilityPage(state: ReliabilityState): string {
  const form = state.form;
  const metricOptions = METRICS.map(
    (m) =>
      `<option value="${m}" ${m === form.metric ? "selected" : ""}>${m}</option>`,
  ).join("");
  const generatorOptions = GENERATORS.map(
    (g) =>
      `<option value="${g}" ${g === form.generator ? "selected" : ""}>${g}</option>`,
  ).join("");
  const outputBoxes = RELIABILITY_OUTPUTS.map(
    (o) => `
    <label class="inline"><input type="checkbox" name="output-${o}"
      ${form.outputs.includes(o) ? "checked" : ""}
      ${state.busy ? "disabled" : ""}> ${o}</label>`,
  ).join("");
  const mappingRows = form.mappingRows
    .map(
      (row, i) => `
      <div class="rename-row" data-index="${i}">
        <input name="map-label-${i}" placeholder="label" value="${esc(row.label)}"
          ${form.autoMapping || state.busy ? "disabled" : ""}>
        <span>→</span>
        <input name="map-index-${i}" placeholder="class index" value="${esc(row.index)}"
          ${form.autoMapping || state.busy ? "disabled" : ""}>
      </div>`,
    )
    .join("");

  const error = state.error
    ? `<p class="form-error" role="alert">${esc(state.error)}</p>`
    : "";
  const progress = state.busy
    ? `<p class="progress" data-busy="true">computing…</p>`
    : "";
  const results = state.payload ? renderResults(state.payload, state.view) : "";

  return `
<section class="page page-reliability">
  <h2>Reliability</h2>
  <p class="hint">Upload a compiled CSV; the service builds the agreement
  graph and runs the reliability fixed point.</p>
  <form id="reliability-form">
    <label>compiled CSV
      <input name="compiled" type="file" accept=".csv" ${state.busy ? "disabled" : ""}></label>
    <label>label generator
      <select name="generator" ${state.busy ? "disabled" : ""}>${generatorOptions}</select></label>
    <label>metric
      <select name="metric" ${state.busy ? "disabled" : ""}>${metricOptions}</select></label>
    <label>alpha (intra weight): <output id="alpha-value">${esc(form.alpha)}</output>
      <input name="alpha" type="range" min="0" max="1" step="0.01"
        value="${esc(form.alpha)}" ${state.busy ? "disabled" : ""}></label>
    <label>overlap threshold
      <input name="overlap" type="number" min="0" step="1"
        value="${esc(form.overlap)}" ${state.busy ? "disabled" : ""}></label>
    <label class="inline"><input type="checkbox" name="auto-mapping"
      ${form.autoMapping ? "checked" : ""} ${state.busy ? "disabled" : ""}>
      infer label mapping from the data</label>
    <div id="mapping-editor">
      <h4>Label mapping</h4>
      ${mappingRows}
      <button type="button" id="add-mapping"
        ${form.autoMapping || state.busy ? "disabled" : ""}>add label</button>
    </div>
    <fieldset><legend>outputs</legend>${outputBoxes}</fieldset>
    <button type="submit" ${state.busy ? "disabled" : ""}>Compute</button>
  </form>
  ${error}${progress}${results}
</section>`;
}
