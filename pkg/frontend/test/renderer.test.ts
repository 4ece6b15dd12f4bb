import { describe, expect, it } from 'vitest';

import { Canvas2DLike, drawMap } from '../src/renderer.js';
import { fitToPoints } from '../src/viewport.js';
import type { MapPoint, ViewState } from '../src/types.js';

class RecordingCtx implements Canvas2DLike {
  fillStyle: string | CanvasGradient | CanvasPattern = '';
  strokeStyle: string | CanvasGradient | CanvasPattern = '';
  lineWidth = 1;
  fills = 0;
  strokes = 0;
  clears = 0;
  fillColors = new Set<string>();
  clearRect(): void { this.clears += 1; }
  beginPath(): void {}
  arc(): void {}
  fill(): void {
    this.fills += 1;
    this.fillColors.add(String(this.fillStyle));
  }
  stroke(): void { this.strokes += 1; }
}

function makePoints(n: number): MapPoint[] {
  return Array.from({ length: n }, (_, i) => ({
    id: `d${i}`,
    x: i % 10,
    y: Math.floor(i / 10),
    cluster: i % 3,
    source: i % 2 ? 'forum' : 'preprint',
    year: 2018 + (i % 4),
    title: `title ${i}`,
  }));
}

function stateFor(points: MapPoint[], overrides: Partial<ViewState> = {}): ViewState {
  return {
    colorMode: 'cluster',
    viewport: fitToPoints(points, 400, 300),
    selectedId: null,
    hoveredId: null,
    query: '',
    results: [],
    banner: null,
    ...overrides,
  };
}

describe('canvas renderer', () => {
  it('draws one mark per visible point', () => {
    const points = makePoints(60);
    const ctx = new RecordingCtx();
    const drawn = drawMap(ctx, points, stateFor(points), 400, 300);
    expect(drawn).toBe(60);
    expect(ctx.fills).toBe(60);
    expect(ctx.clears).toBe(1);
  });

  it('culls points far outside the viewport', () => {
    const points = makePoints(20);
    const state = stateFor(points, {
      viewport: { centerX: 1e6, centerY: 1e6, zoom: 50 },
    });
    const ctx = new RecordingCtx();
    expect(drawMap(ctx, points, state, 400, 300)).toBe(0);
  });

  it('highlights hovered and selected points with strokes', () => {
    const points = makePoints(10);
    const ctx = new RecordingCtx();
    drawMap(ctx, points, stateFor(points, { hoveredId: 'd1', selectedId: 'd2' }), 400, 300);
    expect(ctx.strokes).toBe(2);
  });

  it('recolors without moving: positions identical across modes', () => {
    const points = makePoints(30);
    const clusterCtx = new RecordingCtx();
    const yearCtx = new RecordingCtx();
    drawMap(clusterCtx, points, stateFor(points, { colorMode: 'cluster' }), 400, 300);
    drawMap(yearCtx, points, stateFor(points, { colorMode: 'year' }), 400, 300);
    expect(yearCtx.fills).toBe(clusterCtx.fills);
    expect(yearCtx.fillColors).not.toEqual(clusterCtx.fillColors);
  });
});
