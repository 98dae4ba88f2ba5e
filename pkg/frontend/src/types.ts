/** Wire types mirroring the generation service's JSON API. */

export type Mode = "char" | "word";
export type Domain = "chord" | "drum";

export interface ModelDescriptor {
  id: string;
  mode: Mode;
  domain: Domain;
  vocab_size: number;
  hidden_size: number;
}

export interface AlphaRegionMsg {
  start: number; // generated-token index, inclusive
  end: number; // exclusive
  alpha: number;
}

export interface GenerateRequestMsg {
  model_id: string;
  seed_tokens: string[];
  length: number;
  default_alpha: number;
  alpha_regions: AlphaRegionMsg[];
  seed?: number | null;
}

export interface GenerateResponseMsg {
  tokens: string[];
  rendered: string;
  elapsed_ms: number;
}

/** Diversity presets: the two exercised extremes. */
export const FILL_IN_ALPHA = 1.5;
export const CONSERVATIVE_ALPHA = 0.5;
export const MAX_ALPHA = 2.0;
