/** Thin fetch wrapper over the generation service. */

import type {
  GenerateRequestMsg,
  GenerateResponseMsg,
  ModelDescriptor,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function errorMessage(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (typeof body.detail === "string") return body.detail;
    if (Array.isArray(body.detail)) {
      return body.detail
        .map((d: { field?: string; message?: string }) =>
          d.field ? `${d.field}: ${d.message}` : String(d.message),
        )
        .join("; ");
    }
  } catch {
    /* non-JSON body */
  }
  return `service error ${response.status}`;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = globalThis.fetch.bind(globalThis),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}/api/v1${path}`;
  }

  async listModels(): Promise<ModelDescriptor[]> {
    const response = await this.fetchFn(this.url("/models"));
    if (!response.ok) throw new ApiError(response.status, await errorMessage(response));
    return response.json();
  }

  async generate(request: GenerateRequestMsg): Promise<GenerateResponseMsg> {
    const response = await this.fetchFn(this.url("/generate"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    if (!response.ok) throw new ApiError(response.status, await errorMessage(response));
    return response.json();
  }

  async renderMidi(tokens: string[], tempoBpm: number): Promise<ArrayBuffer> {
    const response = await this.fetchFn(this.url("/render/midi"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ tokens, tempo_bpm: tempoBpm }),
    });
    if (!response.ok) throw new ApiError(response.status, await errorMessage(response));
    return response.arrayBuffer();
  }
}
