/**
 * Typed client for the read-only bundle API.
 *
 * Only the four documented endpoints are ever requested, and every
 * (bundle, point, m) payload is cached after its first fetch, so steering
 * the view re-renders from memory without further network traffic.
 */

export interface BundleInfo {
  id: string;
  config_hash: string;
}

export interface Meta {
  id: string;
  config: Record<string, unknown>;
  config_hash: string;
  series_digest: string;
  points: [number, number][];
  b: [number, number];
  m_list: number[];
  window: string;
  has_bands: boolean;
  nc_summary: Record<string, unknown>;
}

export interface BandPayload {
  lower: number[];
  median: number[];
  upper: number[];
  im_lower?: number[];
  im_median?: number[];
  im_upper?: number[];
}

export interface GlobalPayload {
  omega: number[];
  re: number[];
  band?: BandPayload;
}

export interface SpectrumPayload {
  omega: number[];
  re: number[];
  im: number[];
  point: [number, number];
  m: number;
  config_hash: string;
  band?: BandPayload;
  global?: GlobalPayload;
}

export interface AutocorrPayload {
  h: number[];
  rho: number[];
  rho_reflected: number[];
  nc: boolean[];
  nc_reflected: boolean[];
  point: [number, number];
  config_hash: string;
}

export function bundlesUrl(base: string): string {
  return `${base}/api/bundles`;
}

export function metaUrl(base: string, id: string): string {
  return `${base}/api/bundles/${encodeURIComponent(id)}/meta`;
}

export function spectrumUrl(base: string, id: string, point: number, m: number): string {
  return `${base}/api/bundles/${encodeURIComponent(id)}/spectrum?point=${point}&m=${m}`;
}

export function autocorrUrl(base: string, id: string, point: number): string {
  return `${base}/api/bundles/${encodeURIComponent(id)}/autocorr?point=${point}`;
}

async function getJson<T>(url: string): Promise<T> {
  const resp = await fetch(url);
  if (!resp.ok) {
    throw new Error(`${url} -> HTTP ${resp.status}`);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  private cache = new Map<string, unknown>();

  constructor(private base: string = "") {}

  private async cached<T>(url: string): Promise<T> {
    if (!this.cache.has(url)) {
      this.cache.set(url, await getJson<T>(url));
    }
    return this.cache.get(url) as T;
  }

  async listBundles(): Promise<BundleInfo[]> {
    const payload = await getJson<{ bundles: BundleInfo[] }>(bundlesUrl(this.base));
    return payload.bundles;
  }

  meta(id: string): Promise<Meta> {
    return this.cached<Meta>(metaUrl(this.base, id));
  }

  spectrum(id: string, point: number, m: number): Promise<SpectrumPayload> {
    return this.cached<SpectrumPayload>(spectrumUrl(this.base, id, point, m));
  }

  autocorr(id: string, point: number): Promise<AutocorrPayload> {
    return this.cached<AutocorrPayload>(autocorrUrl(this.base, id, point));
  }
}
