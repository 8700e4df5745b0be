/**
 * Explorer wiring: bundle picker, point picker, m slider over the
 * precomputed m_list, overlay toggles, and the two chart panels.  All
 * data comes from the read-only bundle API; steering the controls only
 * re-renders from the client cache (first touch of a (point, m) slice is
 * one GET, nothing is ever re-estimated).
 */

import { ApiClient, type Meta } from "./api.js";
import { clampToMeta, decodeState, encodeState, type ToggleKey, type ViewState } from "./state.js";
import { buildAutocorrView, buildSpectrumView, formatPoint } from "./series.js";
import { renderPanel, sharedYExtent } from "./svg.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

class Explorer {
  private api = new ApiClient("");
  private state: ViewState = decodeState(location.search.slice(1));
  private meta: Meta | null = null;
  private rendering = 0;

  async start(): Promise<void> {
    const bundles = await this.api.listBundles();
    const select = el<HTMLSelectElement>("bundle-select");
    select.innerHTML = "";
    for (const b of bundles) {
      const opt = document.createElement("option");
      opt.value = b.id;
      opt.textContent = b.id;
      select.appendChild(opt);
    }
    if (bundles.length === 0) {
      el("nc-badge").textContent = "no bundles found";
      return;
    }
    if (!this.state.bundleId || !bundles.some((b) => b.id === this.state.bundleId)) {
      this.state.bundleId = bundles[0].id;
    }
    select.value = this.state.bundleId;
    select.addEventListener("change", () => {
      this.state.bundleId = select.value;
      void this.loadBundle();
    });

    this.bindControls();
    await this.loadBundle();
  }

  private bindControls(): void {
    el<HTMLInputElement>("m-slider").addEventListener("input", () => {
      if (!this.meta) return;
      const idx = Number(el<HTMLInputElement>("m-slider").value);
      this.state.m = this.meta.m_list[idx];
      void this.render();
    });
    el<HTMLSelectElement>("point-select").addEventListener("change", () => {
      this.state.pointIndex = Number(el<HTMLSelectElement>("point-select").value);
      void this.render();
    });
    const toggles: [string, ToggleKey][] = [
      ["toggle-global", "showGlobal"],
      ["toggle-band", "showBand"],
      ["toggle-imag", "showImaginary"],
      ["toggle-acf", "showAutocorr"],
      ["toggle-cumsum", "cumulative"],
    ];
    for (const [id, key] of toggles) {
      const box = el<HTMLInputElement>(id);
      box.addEventListener("change", () => {
        this.state[key] = box.checked;
        void this.render();
      });
    }
  }

  private async loadBundle(): Promise<void> {
    if (!this.state.bundleId) return;
    this.meta = await this.api.meta(this.state.bundleId);
    this.state = clampToMeta(this.state, this.meta);

    const pointSelect = el<HTMLSelectElement>("point-select");
    pointSelect.innerHTML = "";
    this.meta.points.forEach((p, i) => {
      const opt = document.createElement("option");
      opt.value = String(i);
      opt.textContent = formatPoint(p);
      pointSelect.appendChild(opt);
    });
    pointSelect.value = String(this.state.pointIndex);

    const slider = el<HTMLInputElement>("m-slider");
    slider.min = "0";
    slider.max = String(this.meta.m_list.length - 1);
    slider.step = "1";
    slider.value = String(this.meta.m_list.indexOf(this.state.m));

    el("bundle-info").textContent =
      `b = (${this.meta.b[0]}, ${this.meta.b[1]}), window = ${this.meta.window}, ` +
      `config ${this.meta.config_hash.slice(0, 12)}`;
    await this.render();
  }

  private syncControls(): void {
    if (!this.meta) return;
    el<HTMLInputElement>("m-slider").value = String(this.meta.m_list.indexOf(this.state.m));
    el("m-value").textContent = `m = ${this.state.m}`;
    el<HTMLInputElement>("toggle-global").checked = this.state.showGlobal;
    el<HTMLInputElement>("toggle-band").checked = this.state.showBand;
    el<HTMLInputElement>("toggle-imag").checked = this.state.showImaginary;
    el<HTMLInputElement>("toggle-acf").checked = this.state.showAutocorr;
    el<HTMLInputElement>("toggle-cumsum").checked = this.state.cumulative;
    history.replaceState(null, "", `?${encodeState(this.state)}`);
  }

  private async render(): Promise<void> {
    if (!this.meta || !this.state.bundleId) return;
    const token = ++this.rendering;  // last-write-wins on stale async renders
    this.syncControls();
    // fetch every point at the current m so all views share one y-scale
    // (tail bands must stay visually comparable to the center's)
    const [spectra, acf] = await Promise.all([
      Promise.all(
        this.meta.points.map((_, i) => this.api.spectrum(this.state.bundleId!, i, this.state.m)),
      ),
      this.api.autocorr(this.state.bundleId, this.state.pointIndex),
    ]);
    if (token !== this.rendering) return;

    const views = spectra.map((s, i) =>
      buildSpectrumView(s, i === this.state.pointIndex ? acf : null, this.state),
    );
    const view = views[this.state.pointIndex];
    const yScale = sharedYExtent(views.map((v) => v.panels[0]));
    el("nc-badge").textContent = view.ncLabel;
    el("nc-badge").className = view.ncLabel === "NC = OK" ? "nc ok" : "nc fail";
    el("point-label").textContent = `${view.pointLabel}, m = ${view.m}`;
    el("spectrum-panels").innerHTML = view.panels
      .map((p, i) => renderPanel(p, undefined, i === 0 ? yScale : undefined))
      .join("");
    el("notices").textContent = view.notices.join("; ");

    const acfHost = el("autocorr-panel");
    if (this.state.showAutocorr) {
      const acfView = buildAutocorrView(acf, this.state);
      acfHost.innerHTML = renderPanel(acfView.panel);
      acfHost.style.display = "";
    } else {
      acfHost.innerHTML = "";
      acfHost.style.display = "none";
    }
  }
}

window.addEventListener("DOMContentLoaded", () => {
  new Explorer().start().catch((err) => {
    el("nc-badge").textContent = String(err);
  });
});
