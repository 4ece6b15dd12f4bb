import type { ColorMode, MapPoint } from './types.js';

/** Fixed palettes per color mode, so screenshots are reproducible. */

const CLUSTER_PALETTE = [
  '#4e79a7', '#f28e2b', '#e15759', '#76b7b2', '#59a14f',
  '#edc948', '#b07aa1', '#ff9da7', '#9c755f', '#bab0ac',
];

const SOURCE_COLORS: Record<string, string> = {
  forum: '#7b3fa0',
  preprint: '#2e8b57',
  other: '#888888',
};

const YEAR_RAMP = ['#440154', '#414487', '#2a788e', '#22a884', '#7ad151', '#fde725'];

export const FALLBACK_COLOR = '#c0c0c0';

export interface YearDomain {
  min: number;
  max: number;
}

export function yearDomain(points: readonly MapPoint[]): YearDomain {
  let min = Infinity, max = -Infinity;
  for (const p of points) {
    if (p.year === null) continue;
    if (p.year < min) min = p.year;
    if (p.year > max) max = p.year;
  }
  if (min === Infinity) return { min: 0, max: 1 };
  return { min, max: max > min ? max : min + 1 };
}

function rampColor(t: number): string {
  const clamped = Math.max(0, Math.min(1, t));
  const idx = Math.min(YEAR_RAMP.length - 1, Math.floor(clamped * YEAR_RAMP.length));
  return YEAR_RAMP[idx];
}

export function colorFor(point: MapPoint, mode: ColorMode, domain: YearDomain): string {
  if (mode === 'cluster') {
    if (point.cluster === null || point.cluster < 0) return FALLBACK_COLOR;
    return CLUSTER_PALETTE[point.cluster % CLUSTER_PALETTE.length];
  }
  if (mode === 'source') {
    return (point.source !== null && SOURCE_COLORS[point.source]) || FALLBACK_COLOR;
  }
  if (point.year === null) return FALLBACK_COLOR;
  return rampColor((point.year - domain.min) / (domain.max - domain.min));
}
