import type { MapPoint, SearchResult } from './types.js';

/** Thin client for the read-only service endpoints. `fetchFn` is
 * injectable so the logic is testable without a network. */

export type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export class NotReadyError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = 'NotReadyError';
  }
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
    this.name = 'ApiError';
  }
}

async function detailOf(response: { json(): Promise<unknown> }): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? 'request failed';
  } catch {
    return 'request failed';
  }
}

export async function fetchMap(fetchFn: FetchLike, base = ''): Promise<MapPoint[]> {
  const response = await fetchFn(`${base}/map`);
  if (response.status === 409) throw new NotReadyError(await detailOf(response));
  if (!response.ok) throw new ApiError(response.status, await detailOf(response));
  return (await response.json()) as MapPoint[];
}

export async function searchByDoc(
  fetchFn: FetchLike, docId: string, k: number, base = '',
): Promise<SearchResult[]> {
  const response = await fetchFn(`${base}/search?doc=${encodeURIComponent(docId)}&k=${k}`);
  if (!response.ok) throw new ApiError(response.status, await detailOf(response));
  return (await response.json()) as SearchResult[];
}

export async function searchByText(
  fetchFn: FetchLike, text: string, k: number, base = '',
): Promise<SearchResult[]> {
  const response = await fetchFn(`${base}/search?text=${encodeURIComponent(text)}&k=${k}`);
  if (!response.ok) throw new ApiError(response.status, await detailOf(response));
  return (await response.json()) as SearchResult[];
}
