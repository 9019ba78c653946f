// Thin typed client for the annokit service. Every endpoint takes
// multipart form data and returns either JSON or a file body; errors come
// back as {error, detail} JSON which we surface as ApiError.

import { apiUrl, getMaxUploadMb } from "./config.js";
import type { ReliabilityPayload, ServiceError } from "./types.js";

export class ApiError extends Error {
  status: number;
  body: ServiceError;

  constructor(status: number, body: ServiceError) {
    super(`${body.error}: ${body.detail}`);
    this.status = status;
    this.body = body;
  }
}

export class UploadTooLargeError extends Error {
  constructor(sizeBytes: number, limitMb: number) {
    super(
      `file is ${(sizeBytes / (1024 * 1024)).toFixed(1)} MB, ` +
        `the service limit is ${limitMb} MB`,
    );
  }
}

// Client-side mirror of the service MAX_UPLOAD_MB check: oversized files
// are rejected before any bytes leave the browser.
export function checkUploadSize(sizeBytes: number, limitMb?: number): void {
  const mb = limitMb ?? getMaxUploadMb();
  if (sizeBytes > mb * 1024 * 1024) {
    throw new UploadTooLargeError(sizeBytes, mb);
  }
}

async function parseError(response: Response): Promise<never> {
  let body: ServiceError;
  try {
    body = (await response.json()) as ServiceError;
  } catch {
    body = { error: `HTTP ${response.status}`, detail: response.statusText };
  }
  throw new ApiError(response.status, body);
}

async function postForm(path: string, form: FormData): Promise<Response> {
  const response = await fetch(apiUrl(path), { method: "POST", body: form });
  if (!response.ok) {
    await parseError(response);
  }
  return response;
}

export async function fetchHealth(): Promise<{ status: string }> {
  const response = await fetch(apiUrl("/api/health"));
  if (!response.ok) {
    await parseError(response);
  }
  return response.json();
}

export interface DistributeRequest {
  file: Blob;
  fileName: string;
  spec: Record<string, number>;
  seed?: number;
  names?: string[];
  ringSpan?: number;
}

export async function postDistribute(
  req: DistributeRequest,
): Promise<ArrayBuffer> {
  checkUploadSize(req.file.size);
  const form = new FormData();
  form.append("file", req.file, req.fileName);
  form.append("spec", JSON.stringify(req.spec));
  if (req.seed !== undefined) {
    form.append("seed", String(req.seed));
  }
  if (req.names && req.names.length > 0) {
    form.append("names", req.names.join(","));
  }
  if (req.ringSpan !== undefined) {
    form.append("ring_span", String(req.ringSpan));
  }
  const response = await postForm("/api/distribute", form);
  return response.arrayBuffer();
}

export interface RedistributeRequest {
  file: Blob;
  fileName: string;
  spec: Record<string, number>;
  seed?: number;
  dataColumns?: string[];
}

export async function postRedistribute(
  req: RedistributeRequest,
): Promise<ArrayBuffer> {
  checkUploadSize(req.file.size);
  const form = new FormData();
  form.append("file", req.file, req.fileName);
  form.append("spec", JSON.stringify(req.spec));
  if (req.seed !== undefined) {
    form.append("seed", String(req.seed));
  }
  if (req.dataColumns && req.dataColumns.length > 0) {
    form.append("data_columns", req.dataColumns.join(","));
  }
  const response = await postForm("/api/redistribute", form);
  return response.arrayBuffer();
}

export async function postCompile(
  file: Blob,
  fileName: string,
  renames: Record<string, string>,
): Promise<string> {
  checkUploadSize(file.size);
  const form = new FormData();
  form.append("file", file, fileName);
  if (Object.keys(renames).length > 0) {
    form.append("renames", JSON.stringify(renames));
  }
  const response = await postForm("/api/compile", form);
  return response.text();
}

export interface ReliabilityConfig {
  metric?: string;
  alpha?: number;
  overlap_threshold?: number;
  label_generator?: string;
  mapping?: Record<string, number>;
  outputs?: string[];
  data_columns?: string[];
}

export async function postReliability(
  file: Blob,
  fileName: string,
  config: ReliabilityConfig,
): Promise<ReliabilityPayload> {
  checkUploadSize(file.size);
  const form = new FormData();
  form.append("file", file, fileName);
  form.append("config", JSON.stringify(config));
  const response = await postForm("/api/reliability", form);
  return response.json();
}
