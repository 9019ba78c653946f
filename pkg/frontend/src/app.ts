// DOM wiring. Pages render to strings (testable without a browser); this
// layer owns state, event handlers, uploads, and downloads. Heavy service
// calls are guarded so each page has at most one request in flight.

import {
  ApiError,
  fetchHealth,
  postCompile,
  postDistribute,
  postRedistribute,
  postReliability,
  UploadTooLargeError,
} from "./api.js";
import {
  DEFAULT_MAX_UPLOAD_MB,
  getBaseUrl,
  setBaseUrl,
  setMaxUploadMb,
} from "./config.js";
import { renderSceneSvg } from "./scene.js";
import type { AllocationManifest, SolvedSpec } from "./types.js";
import { entryJson, unzip } from "./zip.js";
import {
  DistributeState,
  emptySpecValues,
  renderDistributePage,
  SPEC_FIELDS,
  SpecFormValues,
  validateSpecForm,
} from "./pages/distribute.js";
import {
  buildRenames,
  CompileState,
  renderCompilePage,
} from "./pages/compile.js";
import {
  buildReliabilityConfig,
  initialReliabilityState,
  ReliabilityState,
  renderReliabilityPage,
} from "./pages/reliability.js";
import {
  buildRedistributeSpec,
  initialRedistributeState,
  RedistributeState,
  renderRedistributePage,
} from "./pages/redistribute.js";
import { RELIABILITY_OUTPUTS } from "./types.js";

type PageName = "distribute" | "compile" | "reliability" | "redistribute";

const PAGES: PageName[] = ["distribute", "compile", "reliability", "redistribute"];

function errorText(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.body.error}: ${err.body.detail}`;
  }
  if (err instanceof UploadTooLargeError) {
    return err.message;
  }
  return err instanceof Error ? err.message : String(err);
}

export class App {
  private view: HTMLElement;
  private page: PageName = "distribute";
  private inflight = new Set<PageName>();
  private objectUrls: string[] = [];

  private distribute: DistributeState = {
    busy: false,
    values: emptySpecValues(),
    seed: "0",
    names: "",
  };
  private distributeFile: File | null = null;

  private compile: CompileState = {
    busy: false,
    renameRows: [{ from: "", to: "" }],
  };
  private compileFile: File | null = null;

  private reliability: ReliabilityState = initialReliabilityState();
  private reliabilityFile: File | null = null;

  private redistribute: RedistributeState = initialRedistributeState();
  private redistributeFile: File | null = null;

  constructor(root: HTMLElement) {
    const viewHost = root.querySelector<HTMLElement>("#view");
    if (!viewHost) {
      throw new Error("missing #view container");
    }
    this.view = viewHost;
    this.bindChrome(root);
    this.render();
  }

  private bindChrome(root: HTMLElement): void {
    const baseInput = root.querySelector<HTMLInputElement>("#base-url");
    if (baseInput) {
      baseInput.value = getBaseUrl();
      baseInput.addEventListener("change", () => {
        setBaseUrl(baseInput.value);
      });
    }
    const limitInput = root.querySelector<HTMLInputElement>("#upload-limit");
    if (limitInput) {
      limitInput.value = String(DEFAULT_MAX_UPLOAD_MB);
      limitInput.addEventListener("change", () => {
        setMaxUploadMb(Number(limitInput.value));
      });
    }
    const healthButton = root.querySelector<HTMLButtonElement>("#health-check");
    const healthDot = root.querySelector<HTMLElement>("#health-dot");
    if (healthButton && healthDot) {
      healthButton.addEventListener("click", async () => {
        healthDot.dataset.state = "checking";
        try {
          await fetchHealth();
          healthDot.dataset.state = "ok";
        } catch {
          healthDot.dataset.state = "down";
        }
      });
    }
    root.querySelectorAll<HTMLButtonElement>("nav [data-page]").forEach((btn) => {
      btn.addEventListener("click", () => {
        this.page = btn.dataset.page as PageName;
        this.render();
      });
    });
  }

  private trackUrl(url: string): string {
    this.objectUrls.push(url);
    return url;
  }

  private render(): void {
    document
      .querySelectorAll<HTMLButtonElement>("nav [data-page]")
      .forEach((btn) => {
        btn.classList.toggle("active", btn.dataset.page === this.page);
      });
    switch (this.page) {
      case "distribute":
        this.view.innerHTML = renderDistributePage(this.distribute);
        this.bindDistribute();
        break;
      case "compile":
        this.view.innerHTML = renderCompilePage(this.compile);
        this.bindCompile();
        break;
      case "reliability":
        this.view.innerHTML = renderReliabilityPage(this.reliability);
        this.bindReliability();
        break;
      case "redistribute":
        this.view.innerHTML = renderRedistributePage(this.redistribute);
        this.bindRedistribute();
        break;
    }
    this.markChosenFiles();
  }

  private markChosenFiles(): void {
    const chosen: [string, File | null][] = [
      ["pool", this.distributeFile],
      ["archive", this.compileFile],
      ["compiled", this.page === "reliability" ? this.reliabilityFile : this.redistributeFile],
    ];
    for (const [name, file] of chosen) {
      if (!file) {
        continue;
      }
      const input = this.view.querySelector<HTMLInputElement>(
        `input[name="${name}"]`,
      );
      if (input && input.files?.length === 0) {
        const hint = document.createElement("span");
        hint.className = "file-hint";
        hint.textContent = `selected: ${file.name}`;
        input.insertAdjacentElement("afterend", hint);
      }
    }
  }

  private readForm(): FormData | null {
    const form = this.view.querySelector("form");
    return form ? new FormData(form) : null;
  }

  private async guard(page: PageName, work: () => Promise<void>): Promise<void> {
    if (this.inflight.has(page)) {
      return;
    }
    this.inflight.add(page);
    try {
      await work();
    } finally {
      this.inflight.delete(page);
    }
  }

  // --- distribute -------------------------------------------------------

  private bindDistribute(): void {
    const form = this.view.querySelector<HTMLFormElement>("#distribute-form");
    if (!form) {
      return;
    }
    const fileInput = form.querySelector<HTMLInputElement>('input[name="pool"]');
    fileInput?.addEventListener("change", () => {
      this.distributeFile = fileInput.files?.[0] ?? null;
    });
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.guard("distribute", () => this.runDistribute());
    });
  }

  private async runDistribute(): Promise<void> {
    const data = this.readForm();
    if (!data) {
      return;
    }
    const values = {} as SpecFormValues;
    for (const field of SPEC_FIELDS) {
      values[field.key] = String(data.get(field.key) ?? "");
    }
    const state = this.distribute;
    state.values = values;
    state.seed = String(data.get("seed") ?? "0");
    state.names = String(data.get("names") ?? "");
    state.error = undefined;

    const checked = validateSpecForm(values);
    if (!checked.ok || !checked.spec) {
      state.error = checked.message;
      this.render();
      return;
    }
    if (!this.distributeFile) {
      state.error = "choose a sample pool CSV first";
      this.render();
      return;
    }

    state.busy = true;
    state.solved = undefined;
    state.downloadUrl = undefined;
    this.render();
    try {
      const names = state.names
        .split(",")
        .map((s) => s.trim())
        .filter((s) => s !== "");
      const buffer = await postDistribute({
        file: this.distributeFile,
        fileName: this.distributeFile.name,
        spec: checked.spec,
        seed: Number(state.seed || "0"),
        names: names.length > 0 ? names : undefined,
      });
      const entries = await unzip(buffer);
      state.solved = entryJson<SolvedSpec>(entries, "spec.json");
      state.solvedFor = checked.solveFor;
      state.downloadName = "allocation.zip";
      state.downloadUrl = this.trackUrl(
        URL.createObjectURL(new Blob([buffer], { type: "application/zip" })),
      );
    } catch (err) {
      state.error = errorText(err);
    } finally {
      state.busy = false;
      this.render();
    }
  }

  // --- compile ----------------------------------------------------------

  private bindCompile(): void {
    const form = this.view.querySelector<HTMLFormElement>("#compile-form");
    if (!form) {
      return;
    }
    const fileInput = form.querySelector<HTMLInputElement>('input[name="archive"]');
    fileInput?.addEventListener("change", () => {
      this.compileFile = fileInput.files?.[0] ?? null;
    });
    form.querySelector("#add-rename")?.addEventListener("click", () => {
      this.captureRenameRows();
      this.compile.renameRows.push({ from: "", to: "" });
      this.render();
    });
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.guard("compile", () => this.runCompile());
    });
  }

  private captureRenameRows(): void {
    this.compile.renameRows = this.compile.renameRows.map((_, i) => ({
      from:
        this.view.querySelector<HTMLInputElement>(`input[name="rename-from-${i}"]`)
          ?.value ?? "",
      to:
        this.view.querySelector<HTMLInputElement>(`input[name="rename-to-${i}"]`)
          ?.value ?? "",
    }));
  }

  private async runCompile(): Promise<void> {
    this.captureRenameRows();
    const state = this.compile;
    state.toast = undefined;

    const built = buildRenames(state.renameRows);
    if (!built.ok || !built.renames) {
      state.toast = built.message;
      this.render();
      return;
    }
    if (!this.compileFile) {
      state.toast = "choose a task archive first";
      this.render();
      return;
    }

    state.busy = true;
    state.csvText = undefined;
    state.downloadUrl = undefined;
    this.render();
    try {
      const text = await postCompile(
        this.compileFile,
        this.compileFile.name,
        built.renames,
      );
      state.csvText = text;
      state.downloadUrl = this.trackUrl(
        URL.createObjectURL(new Blob([text], { type: "text/csv" })),
      );
    } catch (err) {
      state.toast = errorText(err);
    } finally {
      state.busy = false;
      this.render();
    }
  }

  // --- reliability ------------------------------------------------------

  private bindReliability(): void {
    const form = this.view.querySelector<HTMLFormElement>("#reliability-form");
    if (!form) {
      return;
    }
    const fileInput = form.querySelector<HTMLInputElement>('input[name="compiled"]');
    fileInput?.addEventListener("change", () => {
      this.reliabilityFile = fileInput.files?.[0] ?? null;
    });
    const alpha = form.querySelector<HTMLInputElement>('input[name="alpha"]');
    const alphaOut = form.querySelector<HTMLOutputElement>("#alpha-value");
    alpha?.addEventListener("input", () => {
      if (alphaOut) {
        alphaOut.value = alpha.value;
      }
    });
    const auto = form.querySelector<HTMLInputElement>('input[name="auto-mapping"]');
    auto?.addEventListener("change", () => {
      this.captureReliabilityForm();
      this.render();
    });
    form.querySelector("#add-mapping")?.addEventListener("click", () => {
      this.captureReliabilityForm();
      this.reliability.form.mappingRows.push({ label: "", index: "" });
      this.render();
    });
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.guard("reliability", () => this.runReliability());
    });
    this.bindSceneDrag();
  }

  private bindSceneDrag(): void {
    const host = this.view.querySelector<HTMLElement>("#scene-host");
    const scene = this.reliability.payload?.scene3d;
    if (!host || !scene) {
      return;
    }
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    host.addEventListener("pointerdown", (event) => {
      dragging = true;
      lastX = event.clientX;
      lastY = event.clientY;
      host.setPointerCapture(event.pointerId);
    });
    host.addEventListener("pointermove", (event) => {
      if (!dragging) {
        return;
      }
      const view = this.reliability.view;
      view.yaw += (event.clientX - lastX) * 0.01;
      view.pitch += (event.clientY - lastY) * 0.01;
      view.pitch = Math.max(-1.5, Math.min(1.5, view.pitch));
      lastX = event.clientX;
      lastY = event.clientY;
      host.innerHTML = renderSceneSvg(scene, view);
    });
    host.addEventListener("pointerup", () => {
      dragging = false;
    });
  }

  private captureReliabilityForm(): void {
    const form = this.view.querySelector<HTMLFormElement>("#reliability-form");
    if (!form) {
      return;
    }
    const data = new FormData(form);
    const f = this.reliability.form;
    f.metric = String(data.get("metric") ?? f.metric);
    f.alpha = String(data.get("alpha") ?? f.alpha);
    f.overlap = String(data.get("overlap") ?? f.overlap);
    f.generator = String(data.get("generator") ?? f.generator);
    f.autoMapping = data.get("auto-mapping") !== null;
    f.outputs = RELIABILITY_OUTPUTS.filter(
      (o) => data.get(`output-${o}`) !== null,
    );
    f.mappingRows = f.mappingRows.map((_, i) => ({
      label:
        form.querySelector<HTMLInputElement>(`input[name="map-label-${i}"]`)
          ?.value ?? "",
      index:
        form.querySelector<HTMLInputElement>(`input[name="map-index-${i}"]`)
          ?.value ?? "",
    }));
  }

  private async runReliability(): Promise<void> {
    this.captureReliabilityForm();
    const state = this.reliability;
    state.error = undefined;

    const built = buildReliabilityConfig(state.form);
    if (!built.ok || !built.config) {
      state.error = built.message;
      this.render();
      return;
    }
    if (!this.reliabilityFile) {
      state.error = "choose a compiled CSV first";
      this.render();
      return;
    }

    state.busy = true;
    state.payload = undefined;
    this.render();
    try {
      state.payload = await postReliability(
        this.reliabilityFile,
        this.reliabilityFile.name,
        built.config,
      );
    } catch (err) {
      state.error = errorText(err);
    } finally {
      state.busy = false;
      this.render();
    }
  }

  // --- redistribute -----------------------------------------------------

  private bindRedistribute(): void {
    const form = this.view.querySelector<HTMLFormElement>("#redistribute-form");
    if (!form) {
      return;
    }
    const fileInput = form.querySelector<HTMLInputElement>('input[name="compiled"]');
    fileInput?.addEventListener("change", () => {
      this.redistributeFile = fileInput.files?.[0] ?? null;
    });
    form.querySelector("#summarize")?.addEventListener("click", () => {
      void this.guard("redistribute", () => this.runSummarize());
    });
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.guard("redistribute", () => this.runRedistribute());
    });
  }

  private captureRedistributeForm(): void {
    const form = this.view.querySelector<HTMLFormElement>("#redistribute-form");
    if (!form) {
      return;
    }
    const data = new FormData(form);
    const state = this.redistribute;
    state.spec = {
      annotators: String(data.get("annotators") ?? ""),
      time: String(data.get("time") ?? ""),
      rate: String(data.get("rate") ?? ""),
      re: String(data.get("re") ?? ""),
    };
    state.seed = String(data.get("seed") ?? "0");
  }

  private async runSummarize(): Promise<void> {
    this.captureRedistributeForm();
    const state = this.redistribute;
    state.error = undefined;
    if (!this.redistributeFile) {
      state.error = "choose a compiled CSV first";
      this.render();
      return;
    }
    state.busy = true;
    this.render();
    try {
      state.summary = await postReliability(
        this.redistributeFile,
        this.redistributeFile.name,
        { outputs: ["reliability"] },
      );
    } catch (err) {
      state.error = errorText(err);
    } finally {
      state.busy = false;
      this.render();
    }
  }

  private async runRedistribute(): Promise<void> {
    this.captureRedistributeForm();
    const state = this.redistribute;
    state.error = undefined;

    const built = buildRedistributeSpec(state.spec);
    if (!built.ok || !built.spec) {
      state.error = built.message;
      this.render();
      return;
    }
    if (!this.redistributeFile) {
      state.error = "choose a compiled CSV first";
      this.render();
      return;
    }

    state.busy = true;
    state.manifest = undefined;
    state.stuck = undefined;
    state.downloadUrl = undefined;
    this.render();
    try {
      const buffer = await postRedistribute({
        file: this.redistributeFile,
        fileName: this.redistributeFile.name,
        spec: built.spec,
        seed: Number(state.seed || "0"),
      });
      const entries = await unzip(buffer);
      state.manifest = entryJson<AllocationManifest>(entries, "allocation.json");
      state.downloadUrl = this.trackUrl(
        URL.createObjectURL(new Blob([buffer], { type: "application/zip" })),
      );
    } catch (err) {
      if (err instanceof ApiError && err.status === 409 && err.body.stuck_samples) {
        state.stuck = err.body.stuck_samples;
      } else {
        state.error = errorText(err);
      }
    } finally {
      state.busy = false;
      this.render();
    }
  }
}

export function mount(): void {
  const root = document.getElementById("app");
  if (root) {
    new App(root);
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount();
}

export { PAGES };
