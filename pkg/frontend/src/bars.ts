/** Exact bar <-> token-index conversions and bar-structured views.
 *
 * Chord sequences carry 4 tokens per bar (one per beat).  Drum sequences
 * carry 17 per bar: the _BAR_ flag plus 16 sixteenth-note words.  Bars are
 * positional chunks over the raw token indices, so the region math is an
 * exact round trip in both domains.
 */

import type { Domain } from "./types.js";

export const BAR_FLAG = "_BAR_";
export const DRUM_COMPONENTS = [
  "kick",
  "snare",
  "open HH",
  "closed HH",
  "tom hi",
  "tom mid",
  "tom low",
  "crash",
  "ride",
] as const;

export function tokensPerBar(domain: Domain): number {
  return domain === "chord" ? 4 : 17;
}

export function barCount(tokenCount: number, domain: Domain): number {
  return Math.ceil(tokenCount / tokensPerBar(domain));
}

/** Token span covered by bars [startBar, endBar), as a half-open region. */
export function barRangeToTokenRegion(
  startBar: number,
  endBar: number,
  domain: Domain,
): { start: number; end: number } {
  if (startBar < 0 || endBar <= startBar) {
    throw new Error(`invalid bar range [${startBar}, ${endBar})`);
  }
  const per = tokensPerBar(domain);
  return { start: startBar * per, end: endBar * per };
}

export function tokenIndexToBar(index: number, domain: Domain): number {
  if (index < 0) throw new Error(`invalid token index ${index}`);
  return Math.floor(index / tokensPerBar(domain));
}

/** Chord view: plain 4-token rows; the final row may be short. */
export function chordBars(tokens: string[]): string[][] {
  const bars: string[][] = [];
  for (let i = 0; i < tokens.length; i += 4) {
    bars.push(tokens.slice(i, i + 4));
  }
  return bars;
}

export interface DrumBarView {
  /** true when the bar opens with the expected _BAR_ flag */
  aligned: boolean;
  /** raw 17-token slice, service output verbatim */
  tokens: string[];
  /** 9 rows x 16 columns of hits; malformed words give empty columns */
  grid: boolean[][];
}

const WORD_RE = /^[01]{9}$/;

/** Drum view: positional 17-token chunks rendered as 9x16 hit grids. */
export function drumBars(tokens: string[]): DrumBarView[] {
  const bars: DrumBarView[] = [];
  for (let i = 0; i < tokens.length; i += 17) {
    const chunk = tokens.slice(i, i + 17);
    const grid: boolean[][] = Array.from({ length: 9 }, () =>
      Array<boolean>(16).fill(false),
    );
    chunk.slice(1).forEach((word, column) => {
      if (!WORD_RE.test(word)) return;
      for (let row = 0; row < 9; row++) {
        if (word[row] === "1") grid[row]![column] = true;
      }
    });
    bars.push({ aligned: chunk[0] === BAR_FLAG, tokens: chunk, grid });
  }
  return bars;
}
