/** DOM layer: renders the session state and wires the controls.
 *
 * Rendering is a pure function of the store state; all behavior lives in
 * SessionStore.  Nothing here invents tokens.
 */

import { chordBars, drumBars, DRUM_COMPONENTS } from "./bars.js";
import type { SessionStore } from "./session.js";
import { CONSERVATIVE_ALPHA, FILL_IN_ALPHA, MAX_ALPHA } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function download(filename: string, blob: Blob): void {
  const url = URL.createObjectURL(blob);
  const link = el("a");
  link.href = url;
  link.download = filename;
  link.click();
  URL.revokeObjectURL(url);
}

export function mount(root: HTMLElement, store: SessionStore): void {
  root.innerHTML = "";
  const toolbar = el("div", "toolbar");
  const modelSelect = el("select");
  const seedInput = el("input");
  seedInput.placeholder = "seed tokens";
  const lengthInput = el("input");
  lengthInput.type = "number";
  const alphaSlider = el("input");
  alphaSlider.type = "range";
  alphaSlider.min = "0.1";
  alphaSlider.max = String(MAX_ALPHA);
  alphaSlider.step = "0.1";
  const alphaLabel = el("span", "alpha-label");
  const seedNumber = el("input");
  seedNumber.type = "number";
  seedNumber.placeholder = "PRNG seed";
  const tempoInput = el("input");
  tempoInput.type = "number";
  tempoInput.value = "120";
  const generateBtn = el("button", "primary", "Generate");
  const clearMarksBtn = el("button", "", "Clear marks");
  const exportLeadBtn = el("button", "", "Export lead sheet");
  const exportMidiBtn = el("button", "", "Export MIDI");

  toolbar.append(
    modelSelect,
    seedInput,
    labelled("length", lengthInput),
    labelled("default α", alphaSlider),
    alphaLabel,
    labelled("seed", seedNumber),
    labelled("tempo", tempoInput),
    generateBtn,
    clearMarksBtn,
    exportLeadBtn,
    exportMidiBtn,
  );

  const status = el("div", "status");
  const barsView = el("div", "bars");
  const renderedView = el("pre", "rendered");
  root.append(toolbar, status, barsView, renderedView);

  function labelled(name: string, control: HTMLElement): HTMLElement {
    const wrap = el("label", "field");
    wrap.append(el("span", "", name), control);
    return wrap;
  }

  modelSelect.onchange = () => store.select(modelSelect.value);
  seedInput.onchange = () =>
    store.setSeedTokens(seedInput.value.split(/\s+/).filter(Boolean));
  lengthInput.onchange = () => store.setLength(Number(lengthInput.value));
  alphaSlider.oninput = () => store.setDefaultAlpha(Number(alphaSlider.value));
  seedNumber.onchange = () =>
    store.setSeed(seedNumber.value === "" ? null : Number(seedNumber.value));
  tempoInput.onchange = () => store.setTempo(Number(tempoInput.value));
  generateBtn.onclick = () => void store.generate();
  clearMarksBtn.onclick = () => store.clearAllMarks();
  exportLeadBtn.onclick = () => {
    const payload = store.exportLeadsheet();
    if (payload) {
      download(payload.filename, new Blob([payload.text], { type: "text/plain" }));
    }
  };
  exportMidiBtn.onclick = () =>
    void store.exportMidi().then((payload) => {
      if (payload) {
        download(payload.filename, new Blob([payload.data], { type: "audio/midi" }));
      }
    });

  function barHeader(bar: number, alpha: number | undefined): HTMLElement {
    const header = el("div", "bar-header");
    header.append(el("span", "bar-name", `Bar ${bar + 1}`));
    if (alpha !== undefined) {
      header.append(el("span", "alpha-badge", `α=${alpha}`));
    }
    const fill = el("button", "mini", "fill-in");
    fill.title = `regenerate this bar with α=${FILL_IN_ALPHA}`;
    fill.onclick = () => store.markFillIn(bar);
    const calm = el("button", "mini", "calm");
    calm.title = `regenerate this bar with α=${CONSERVATIVE_ALPHA}`;
    calm.onclick = () => store.markConservative(bar);
    const clear = el("button", "mini", "×");
    clear.onclick = () => store.clearBarMark(bar);
    header.append(fill, calm, clear);
    return header;
  }

  function render(): void {
    const state = store.getState();

    if (modelSelect.options.length !== state.models.length + 1) {
      modelSelect.innerHTML = "";
      modelSelect.append(el("option", "", "— select model —"));
      for (const model of state.models) {
        const option = el("option", "", `${model.id} (${model.domain}, ${model.mode})`);
        option.value = model.id;
        modelSelect.append(option);
      }
    }
    if (document.activeElement !== seedInput) {
      seedInput.value = state.seedTokens.join(" ");
    }
    if (document.activeElement !== lengthInput) {
      lengthInput.value = String(state.length);
    }
    alphaLabel.textContent = `α=${state.defaultAlpha.toFixed(1)}`;

    generateBtn.disabled = !store.canGenerate;
    exportLeadBtn.disabled = !store.canExport || state.selected?.domain !== "chord";
    exportMidiBtn.disabled = !store.canExport || state.selected?.domain !== "drum";
    clearMarksBtn.disabled = state.barAlpha.size === 0;

    status.textContent = state.busy
      ? "generating…"
      : state.error
        ? `error: ${state.error}`
        : state.elapsedMs !== null
          ? `${state.tokens.length} tokens in ${state.elapsedMs.toFixed(0)} ms`
          : "";
    status.classList.toggle("error", state.error !== null);

    barsView.innerHTML = "";
    if (!state.selected) return;
    if (state.selected.domain === "chord") {
      chordBars(state.tokens).forEach((bar, index) => {
        const cell = el("div", "bar chord-bar");
        cell.append(barHeader(index, state.barAlpha.get(index)));
        const beats = el("div", "beats");
        bar.forEach((token) => beats.append(el("span", "beat", token)));
        cell.append(beats);
        barsView.append(cell);
      });
    } else {
      drumBars(state.tokens).forEach((bar, index) => {
        const cell = el("div", `bar drum-bar${bar.aligned ? "" : " misaligned"}`);
        cell.append(barHeader(index, state.barAlpha.get(index)));
        const table = el("table", "grid");
        bar.grid.forEach((row, r) => {
          const tr = el("tr");
          tr.append(el("td", "component", DRUM_COMPONENTS[r]));
          row.forEach((hit) => tr.append(el("td", hit ? "hit" : "rest")));
          table.append(tr);
        });
        cell.append(table);
        barsView.append(cell);
      });
    }
    renderedView.textContent = state.rendered;
  }

  store.subscribe(render);
  render();
}
