/**
 * The explorer's entire view state, URL-encodable so a view can be shared
 * by copying the address.  The m slider only ever selects values that
 * were actually precomputed (the bundle's m_list); nothing interpolates.
 */

import type { Meta } from "./api.js";

export interface ViewState {
  bundleId: string | null;
  pointIndex: number;
  m: number;
  showGlobal: boolean;
  showBand: boolean;
  showImaginary: boolean;
  showAutocorr: boolean;
  cumulative: boolean;
}

export const DEFAULT_STATE: ViewState = {
  bundleId: null,
  pointIndex: 0,
  m: 0,
  showGlobal: true,
  showBand: true,
  showImaginary: true,
  showAutocorr: true,
  cumulative: false,
};

export type ToggleKey = "showGlobal" | "showBand" | "showImaginary" | "showAutocorr" | "cumulative";

const FLAGS: [ToggleKey, string][] = [
  ["showGlobal", "g"],
  ["showBand", "bd"],
  ["showImaginary", "im"],
  ["showAutocorr", "ac"],
  ["cumulative", "cs"],
];

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.bundleId !== null) params.set("bundle", state.bundleId);
  params.set("point", String(state.pointIndex));
  params.set("m", String(state.m));
  for (const [key, short] of FLAGS) {
    params.set(short, state[key] ? "1" : "0");
  }
  return params.toString();
}

export function decodeState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const state: ViewState = { ...DEFAULT_STATE };
  if (params.has("bundle")) state.bundleId = params.get("bundle");
  if (params.has("point")) state.pointIndex = Number(params.get("point")) || 0;
  if (params.has("m")) state.m = Number(params.get("m")) || 0;
  for (const [key, short] of FLAGS) {
    if (params.has(short)) {
      state[key] = params.get(short) === "1";
    }
  }
  return state;
}

/** Snap the state onto what the bundle actually precomputed. */
export function clampToMeta(state: ViewState, meta: Meta): ViewState {
  const pointIndex = Math.min(Math.max(state.pointIndex, 0), meta.points.length - 1);
  const m = meta.m_list.includes(state.m) ? state.m : meta.m_list[meta.m_list.length - 1];
  return { ...state, bundleId: meta.id, pointIndex, m };
}

export function isDiagonalPoint(point: [number, number]): boolean {
  return point[0] === point[1];
}
