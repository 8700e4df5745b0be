/**
 * Pure builders turning API payloads + view state into chart series.
 * No DOM, no fetch: identical inputs give identical output arrays, which
 * is what the round-trip tests pin down against the bundle CSV exports.
 */

import type { AutocorrPayload, SpectrumPayload } from "./api.js";
import { isDiagonalPoint, type ViewState } from "./state.js";

export interface LineSeries {
  kind: "line";
  label: string;
  x: number[];
  y: number[];
  color: string;
  dash?: boolean;
}

export interface BandSeries {
  kind: "band";
  label: string;
  x: number[];
  lower: number[];
  upper: number[];
  color: string;
}

export interface StemSeries {
  kind: "stem";
  label: string;
  x: number[];
  y: number[];
  color: string;
  flags?: boolean[];
}

export interface MarkerSeries {
  kind: "marker";
  label: string;
  x: number;
  color: string;
}

export type ChartSeries = LineSeries | BandSeries | StemSeries | MarkerSeries;

export interface Panel {
  title: string;
  series: ChartSeries[];
  yLabel: string;
}

export interface SpectrumView {
  panels: Panel[];
  ncLabel: "NC = OK" | "NC = FAIL";
  notices: string[];
  pointLabel: string;
  m: number;
}

const LOCAL_COLOR = "#2563eb";
const GLOBAL_COLOR = "#dc2626";
const BAND_COLOR = "rgba(37, 99, 235, 0.18)";
const GLOBAL_BAND_COLOR = "rgba(220, 38, 38, 0.15)";
const MARKER_COLOR = "#6b7280";

export function formatPoint(point: [number, number]): string {
  return `v = (${point[0].toFixed(2)}, ${point[1].toFixed(2)})`;
}

/** NC badge: OK only when every contributing lag (h <= m) converged at
 * both the point and its reflection. */
export function ncBadge(acf: AutocorrPayload | null, m: number): "NC = OK" | "NC = FAIL" {
  if (acf === null) return "NC = OK";
  for (let i = 0; i < Math.min(m, acf.nc.length); i++) {
    if (!acf.nc[i] || !acf.nc_reflected[i]) return "NC = FAIL";
  }
  return "NC = OK";
}

export function buildSpectrumView(
  spectrum: SpectrumPayload,
  acf: AutocorrPayload | null,
  state: ViewState,
): SpectrumView {
  const notices: string[] = [];
  const diagonal = isDiagonalPoint(spectrum.point);

  const realSeries: ChartSeries[] = [];
  if (state.showBand) {
    if (spectrum.band) {
      realSeries.push({
        kind: "band",
        label: "90% band",
        x: spectrum.omega,
        lower: spectrum.band.lower,
        upper: spectrum.band.upper,
        color: BAND_COLOR,
      });
      realSeries.push({
        kind: "line",
        label: "local median",
        x: spectrum.omega,
        y: spectrum.band.median,
        color: LOCAL_COLOR,
        dash: true,
      });
    } else {
      notices.push("no band data in this bundle (run `lgspec band`)");
    }
  }
  realSeries.push({
    kind: "line",
    label: "local spectrum",
    x: spectrum.omega,
    y: spectrum.re,
    color: LOCAL_COLOR,
  });
  if (state.showGlobal && spectrum.global) {
    if (state.showBand && spectrum.global.band) {
      realSeries.push({
        kind: "band",
        label: "global 90% band",
        x: spectrum.global.omega,
        lower: spectrum.global.band.lower,
        upper: spectrum.global.band.upper,
        color: GLOBAL_BAND_COLOR,
      });
    }
    realSeries.push({
      kind: "line",
      label: "global spectrum",
      x: spectrum.global.omega,
      y: spectrum.global.re,
      color: GLOBAL_COLOR,
    });
  }

  const panels: Panel[] = [
    {
      title: diagonal ? "spectrum" : "spectrum, real part",
      series: realSeries,
      yLabel: "f",
    },
  ];

  if (!diagonal && state.showImaginary) {
    const imagSeries: ChartSeries[] = [];
    if (state.showBand && spectrum.band?.im_lower && spectrum.band.im_upper) {
      imagSeries.push({
        kind: "band",
        label: "90% band",
        x: spectrum.omega,
        lower: spectrum.band.im_lower,
        upper: spectrum.band.im_upper,
        color: BAND_COLOR,
      });
    }
    imagSeries.push({
      kind: "line",
      label: "imaginary part",
      x: spectrum.omega,
      y: spectrum.im,
      color: LOCAL_COLOR,
    });
    panels.push({ title: "spectrum, imaginary part", series: imagSeries, yLabel: "Im f" });
  }

  return {
    panels,
    ncLabel: ncBadge(acf, spectrum.m),
    notices,
    pointLabel: formatPoint(spectrum.point),
    m: spectrum.m,
  };
}

export interface AutocorrView {
  panel: Panel;
  ncLabel: "NC = OK" | "NC = FAIL";
  pointLabel: string;
}

export function cumulativeSum(values: number[]): number[] {
  const out = new Array<number>(values.length);
  let acc = 0;
  for (let i = 0; i < values.length; i++) {
    acc += values[i];
    out[i] = acc;
  }
  return out;
}

export function buildAutocorrView(acf: AutocorrPayload, state: ViewState): AutocorrView {
  const values = state.cumulative ? cumulativeSum(acf.rho) : acf.rho;
  const series: ChartSeries[] = [
    {
      kind: "stem",
      label: state.cumulative ? "cumulative sum of rho(h)" : "rho(h)",
      x: acf.h,
      y: values,
      color: LOCAL_COLOR,
      flags: acf.nc,
    },
    { kind: "marker", label: `m = ${state.m}`, x: state.m + 0.5, color: MARKER_COLOR },
  ];
  if (!isDiagonalPoint(acf.point)) {
    const reflected = state.cumulative ? cumulativeSum(acf.rho_reflected) : acf.rho_reflected;
    series.splice(1, 0, {
      kind: "stem",
      label: "rho(h) at reflected point",
      x: acf.h.map((h) => h + 0.25),
      y: reflected,
      color: GLOBAL_COLOR,
      flags: acf.nc_reflected,
    });
  }
  return {
    panel: {
      title: state.cumulative ? "cumulative local autocorrelation" : "local autocorrelation",
      series,
      yLabel: state.cumulative ? "sum rho" : "rho",
    },
    ncLabel: ncBadge(acf, acf.h.length),
    pointLabel: formatPoint(acf.point),
  };
}
