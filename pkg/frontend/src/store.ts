import { ApiError, FetchLike, NotReadyError, fetchMap, searchByDoc, searchByText } from './api.js';
import { centerOn, fitToPoints, screenToWorld } from './viewport.js';
import type { ColorMode, MapPoint, SearchResult, ViewState } from './types.js';

/** All explorer behaviour that does not touch the DOM.
 *
 * Single-threaded by construction; searches are latest-wins: a stale
 * response is dropped if a newer search was issued while it was in flight.
 * Server-ranked results are never reordered. */
export class ExplorerStore {
  points: MapPoint[] = [];
  state: ViewState = {
    colorMode: 'cluster',
    viewport: { centerX: 0, centerY: 0, zoom: 1 },
    selectedId: null,
    hoveredId: null,
    query: '',
    results: [],
    banner: null,
  };
  width = 800;
  height = 600;
  resultCount = 10;

  private byId = new Map<string, MapPoint>();
  private searchToken = 0;
  private listeners: Array<() => void> = [];

  constructor(private fetchFn: FetchLike, private base = '') {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  resize(width: number, height: number): void {
    this.width = width;
    this.height = height;
    this.emit();
  }

  async loadMap(): Promise<void> {
    try {
      this.points = await fetchMap(this.fetchFn, this.base);
      this.byId = new Map(this.points.map((p) => [p.id, p]));
      this.state.banner = this.points.length === 0 ? 'The map is empty.' : null;
      this.state.viewport = fitToPoints(this.points, this.width, this.height);
    } catch (error) {
      if (error instanceof NotReadyError) {
        this.points = [];
        this.byId = new Map();
        this.state.banner = 'No projection has been computed yet.';
      } else {
        this.state.banner = `Could not load the map: ${(error as Error).message}`;
      }
    }
    this.emit();
  }

  point(id: string): MapPoint | undefined {
    return this.byId.get(id);
  }

  setColorMode(mode: ColorMode): void {
    this.state.colorMode = mode;
    this.emit();
  }

  setViewport(viewport: ViewState['viewport']): void {
    this.state.viewport = viewport;
    this.emit();
  }

  /** Nearest point within `radiusPixels` of the cursor, else null. */
  pickAt(sx: number, sy: number, radiusPixels = 6): MapPoint | null {
    const [wx, wy] = screenToWorld(this.state.viewport, this.width, this.height, sx, sy);
    const radiusWorld = radiusPixels / this.state.viewport.zoom;
    const r2 = radiusWorld * radiusWorld;
    let best: MapPoint | null = null;
    let bestD2 = r2;
    for (const p of this.points) {
      const dx = p.x - wx;
      const dy = p.y - wy;
      const d2 = dx * dx + dy * dy;
      if (d2 <= bestD2) {
        bestD2 = d2;
        best = p;
      }
    }
    return best;
  }

  hoverAt(sx: number, sy: number): MapPoint | null {
    const hit = this.pickAt(sx, sy);
    const id = hit ? hit.id : null;
    if (id !== this.state.hoveredId) {
      this.state.hoveredId = id;
      this.emit();
    }
    return hit;
  }

  /** Select a document; recenters the viewport when the point is mapped. */
  select(id: string): void {
    this.state.selectedId = id;
    const point = this.byId.get(id);
    if (point) {
      this.state.viewport = centerOn(this.state.viewport, point.x, point.y);
    }
    this.emit();
  }

  clickAt(sx: number, sy: number): void {
    const hit = this.pickAt(sx, sy);
    if (hit) {
      this.select(hit.id);
      void this.searchSelected();
    }
  }

  /** Similarity search seeded by the selected document. */
  async searchSelected(): Promise<void> {
    if (!this.state.selectedId) return;
    const token = ++this.searchToken;
    try {
      const results = await searchByDoc(
        this.fetchFn, this.state.selectedId, this.resultCount, this.base);
      this.applyResults(token, results);
    } catch (error) {
      this.applyError(token, error);
    }
  }

  /** Free-text similarity search. */
  async searchText(query: string): Promise<void> {
    this.state.query = query;
    if (!query.trim()) {
      this.state.banner = 'Enter a query or select a document first.';
      this.emit();
      return;
    }
    const token = ++this.searchToken;
    try {
      const results = await searchByText(this.fetchFn, query, this.resultCount, this.base);
      this.applyResults(token, results);
    } catch (error) {
      this.applyError(token, error);
    }
  }

  private applyResults(token: number, results: SearchResult[]): void {
    if (token !== this.searchToken) return; // a newer search superseded this one
    this.state.results = results;
    this.state.banner = null;
    this.emit();
  }

  private applyError(token: number, error: unknown): void {
    if (token !== this.searchToken) return;
    if (error instanceof ApiError) {
      this.state.banner = `Search failed (${error.status}): ${error.message}`;
    } else {
      this.state.banner = `Search failed: ${(error as Error).message}`;
    }
    this.emit();
  }

  /** A result click selects the document on the map and recenters. */
  clickResult(result: SearchResult): void {
    this.select(result.id);
  }
}
