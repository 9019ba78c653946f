// Single base-URL setting for every service call. Persisted in
// localStorage when available so the setting survives reloads; tests and
// other non-browser contexts fall back to an in-memory value.

const STORAGE_KEY = "annokit.baseUrl";

// Mirrors the service default; the settings bar lets users lower it to
// match a stricter MAX_UPLOAD_MB deployment.
export const DEFAULT_MAX_UPLOAD_MB = 64;

let memoryBaseUrl = "";
let memoryMaxUploadMb = DEFAULT_MAX_UPLOAD_MB;

function storage(): Storage | null {
  try {
    return typeof localStorage === "undefined" ? null : localStorage;
  } catch {
    return null;
  }
}

export function getBaseUrl(): string {
  const store = storage();
  if (store) {
    return store.getItem(STORAGE_KEY) ?? "";
  }
  return memoryBaseUrl;
}

export function setBaseUrl(url: string): void {
  const trimmed = url.replace(/\/+$/, "");
  const store = storage();
  if (store) {
    store.setItem(STORAGE_KEY, trimmed);
  }
  memoryBaseUrl = trimmed;
}

export function getMaxUploadMb(): number {
  return memoryMaxUploadMb;
}

export function setMaxUploadMb(mb: number): void {
  if (Number.isFinite(mb) && mb > 0) {
    memoryMaxUploadMb = mb;
  }
}

export function apiUrl(path: string): string {
  return getBaseUrl() + path;
}
