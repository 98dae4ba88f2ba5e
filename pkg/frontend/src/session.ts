/** Workbench session state and actions.
 *
 * The store is a thin client: every token it ever holds came verbatim from
 * a service response.  Per-bar alpha annotations are kept here and compiled
 * into the alpha_regions of the next /generate request; nothing musical is
 * computed in the browser.
 */

import type { ApiClient } from "./api.js";
import { barRangeToTokenRegion, tokensPerBar } from "./bars.js";
import type {
  AlphaRegionMsg,
  Domain,
  GenerateRequestMsg,
  ModelDescriptor,
} from "./types.js";
import { CONSERVATIVE_ALPHA, FILL_IN_ALPHA, MAX_ALPHA } from "./types.js";

export interface SessionState {
  models: ModelDescriptor[];
  selected: ModelDescriptor | null;
  tokens: string[];
  rendered: string;
  elapsedMs: number | null;
  seedTokens: string[];
  length: number;
  defaultAlpha: number;
  /** bar index -> alpha override for the next request */
  barAlpha: Map<number, number>;
  seed: number | null;
  tempoBpm: number;
  busy: boolean;
  error: string | null;
}

export type Listener = (state: SessionState) => void;

function defaultSeedTokens(domain: Domain): string[] {
  return domain === "chord" ? ["_START_"] : ["_BAR_"];
}

function defaultLength(domain: Domain): number {
  return domain === "chord" ? 64 : 170;
}

/** Merge per-bar annotations into minimal token-index regions. */
export function regionsFromAnnotations(
  barAlpha: Map<number, number>,
  domain: Domain,
): AlphaRegionMsg[] {
  const bars = [...barAlpha.entries()].sort((a, b) => a[0] - b[0]);
  const regions: AlphaRegionMsg[] = [];
  for (const [bar, alpha] of bars) {
    const span = barRangeToTokenRegion(bar, bar + 1, domain);
    const last = regions[regions.length - 1];
    if (last && last.end === span.start && last.alpha === alpha) {
      last.end = span.end;
    } else {
      regions.push({ start: span.start, end: span.end, alpha });
    }
  }
  return regions;
}

export class SessionStore {
  private state: SessionState = {
    models: [],
    selected: null,
    tokens: [],
    rendered: "",
    elapsedMs: null,
    seedTokens: [],
    length: 64,
    defaultAlpha: 1.0,
    barAlpha: new Map(),
    seed: null,
    tempoBpm: 120,
    busy: false,
    error: null,
  };
  private listeners: Listener[] = [];

  constructor(private readonly api: ApiClient) {}

  getState(): Readonly<SessionState> {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private update(patch: Partial<SessionState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  get canGenerate(): boolean {
    return this.state.selected !== null && !this.state.busy;
  }

  get canExport(): boolean {
    return this.state.tokens.length > 0 && !this.state.busy;
  }

  async loadModels(): Promise<void> {
    try {
      const models = await this.api.listModels();
      this.update({ models, error: null });
    } catch (err) {
      this.update({ error: (err as Error).message });
    }
  }

  select(modelId: string): void {
    const selected = this.state.models.find((m) => m.id === modelId) ?? null;
    if (!selected) {
      this.update({ selected: null });
      return;
    }
    this.update({
      selected,
      tokens: [],
      rendered: "",
      elapsedMs: null,
      barAlpha: new Map(),
      seedTokens: defaultSeedTokens(selected.domain),
      length: defaultLength(selected.domain),
      error: null,
    });
  }

  setSeedTokens(tokens: string[]): void {
    this.update({ seedTokens: tokens });
  }

  setLength(length: number): void {
    if (!Number.isInteger(length) || length < 0) return;
    this.update({ length });
  }

  setDefaultAlpha(alpha: number): void {
    if (!(alpha > 0 && alpha <= MAX_ALPHA)) return;
    this.update({ defaultAlpha: alpha });
  }

  setSeed(seed: number | null): void {
    this.update({ seed });
  }

  setTempo(tempoBpm: number): void {
    if (!(tempoBpm > 0)) return;
    this.update({ tempoBpm });
  }

  /** Mark a bar for a drum fill / adventurous chords on the next request. */
  markFillIn(bar: number): void {
    this.setBarAlpha(bar, FILL_IN_ALPHA);
  }

  markConservative(bar: number): void {
    this.setBarAlpha(bar, CONSERVATIVE_ALPHA);
  }

  setBarAlpha(bar: number, alpha: number): void {
    if (bar < 0 || !(alpha > 0 && alpha <= MAX_ALPHA)) return;
    const barAlpha = new Map(this.state.barAlpha);
    barAlpha.set(bar, alpha);
    this.update({ barAlpha });
  }

  clearBarMark(bar: number): void {
    const barAlpha = new Map(this.state.barAlpha);
    barAlpha.delete(bar);
    this.update({ barAlpha });
  }

  clearAllMarks(): void {
    this.update({ barAlpha: new Map() });
  }

  /** The exact /generate body the current annotations produce. */
  buildRequest(): GenerateRequestMsg {
    const model = this.state.selected;
    if (!model) throw new Error("no model selected");
    return {
      model_id: model.id,
      seed_tokens: this.state.seedTokens,
      length: this.state.length,
      default_alpha: this.state.defaultAlpha,
      alpha_regions: regionsFromAnnotations(this.state.barAlpha, model.domain),
      seed: this.state.seed,
    };
  }

  /** Issue /generate; at most one request is ever in flight. */
  async generate(): Promise<boolean> {
    if (!this.canGenerate) return false;
    this.update({ busy: true, error: null });
    try {
      const response = await this.api.generate(this.buildRequest());
      // the view is the response, verbatim
      this.update({
        tokens: response.tokens,
        rendered: response.rendered,
        elapsedMs: response.elapsed_ms,
        busy: false,
      });
      return true;
    } catch (err) {
      this.update({ busy: false, error: (err as Error).message });
      return false;
    }
  }

  /** Re-roll with one bar range pinned to a new alpha. */
  async regenerateRegion(
    startBar: number,
    endBar: number,
    alpha: number,
  ): Promise<boolean> {
    const barAlpha = new Map(this.state.barAlpha);
    for (let bar = startBar; bar < endBar; bar++) barAlpha.set(bar, alpha);
    this.update({ barAlpha });
    return this.generate();
  }

  /** Lead-sheet text download payload (chord sessions). */
  exportLeadsheet(): { filename: string; text: string } | null {
    if (!this.canExport || !this.state.selected) return null;
    return {
      filename: `${this.state.selected.id}.leadsheet.txt`,
      text: this.state.rendered,
    };
  }

  /** MIDI download payload via the service renderer (drum sessions). */
  async exportMidi(): Promise<{ filename: string; data: ArrayBuffer } | null> {
    if (!this.canExport || !this.state.selected) return null;
    this.update({ busy: true, error: null });
    try {
      const data = await this.api.renderMidi(
        this.state.tokens,
        this.state.tempoBpm,
      );
      this.update({ busy: false });
      return { filename: `${this.state.selected.id}.mid`, data };
    } catch (err) {
      this.update({ busy: false, error: (err as Error).message });
      return null;
    }
  }

  /** Convenience for views: the token span a bar occupies. */
  barSpan(bar: number): { start: number; end: number } {
    const domain = this.state.selected?.domain ?? "chord";
    return barRangeToTokenRegion(bar, bar + 1, domain);
  }

  barCountForView(): number {
    const domain = this.state.selected?.domain ?? "chord";
    return Math.ceil(this.state.tokens.length / tokensPerBar(domain));
  }
}
