/** Payload and state types for the explorer. Field names mirror the server
 * payloads exactly; displayed values are passed through verbatim. */

export interface MapPoint {
  id: string;
  x: number;
  y: number;
  cluster: number | null;
  source: string | null;
  year: number | null;
  title: string;
}

export interface SearchResult {
  id: string;
  title: string;
  url: string;
  score: number;
}

export type ColorMode = 'cluster' | 'source' | 'year';

export interface ViewportState {
  centerX: number;
  centerY: number;
  /** screen pixels per world unit */
  zoom: number;
}

export interface ViewState {
  colorMode: ColorMode;
  viewport: ViewportState;
  selectedId: string | null;
  hoveredId: string | null;
  query: string;
  results: SearchResult[];
  banner: string | null;
}
