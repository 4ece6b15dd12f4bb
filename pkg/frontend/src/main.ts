import { ExplorerStore } from './store.js';
import { drawMap } from './renderer.js';
import { pan, zoomAt } from './viewport.js';
import type { ColorMode } from './types.js';

/** DOM wiring: canvas events, the color-mode selector, the search panel,
 * and the hover tooltip. All behaviour lives in ExplorerStore. */

function mustGet<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const canvas = mustGet<HTMLCanvasElement>('map');
const tooltip = mustGet<HTMLDivElement>('tooltip');
const banner = mustGet<HTMLDivElement>('banner');
const detail = mustGet<HTMLDivElement>('detail');
const resultList = mustGet<HTMLUListElement>('results');
const queryInput = mustGet<HTMLInputElement>('query');
const searchButton = mustGet<HTMLButtonElement>('search');
const modeSelect = mustGet<HTMLSelectElement>('color-mode');

const store = new ExplorerStore((url) => fetch(url));

function resize(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
  store.resize(canvas.width, canvas.height);
}

function render(): void {
  const ctx = canvas.getContext('2d');
  if (ctx) {
    drawMap(ctx, store.points, store.state, canvas.width, canvas.height);
  }

  banner.textContent = store.state.banner ?? '';
  banner.style.display = store.state.banner ? 'block' : 'none';

  const selected = store.state.selectedId ? store.point(store.state.selectedId) : undefined;
  if (selected) {
    const parts = [selected.title];
    if (selected.year !== null) parts.push(String(selected.year));
    if (selected.source !== null) parts.push(selected.source);
    if (selected.cluster !== null) parts.push(`cluster ${selected.cluster}`);
    detail.textContent = parts.join(' · ');
  } else {
    detail.textContent = '';
  }

  resultList.replaceChildren(
    ...store.state.results.map((result) => {
      const item = document.createElement('li');
      const link = document.createElement('a');
      link.textContent = `${result.score.toFixed(3)}  ${result.title}`;
      link.href = '#';
      link.addEventListener('click', (event) => {
        event.preventDefault();
        store.clickResult(result);
      });
      item.appendChild(link);
      if (result.id === store.state.selectedId) item.classList.add('selected');
      return item;
    }),
  );
}

store.onChange(render);

canvas.addEventListener('mousemove', (event) => {
  const rect = canvas.getBoundingClientRect();
  const hit = store.hoverAt(event.clientX - rect.left, event.clientY - rect.top);
  if (hit) {
    tooltip.textContent = hit.title;
    tooltip.style.display = 'block';
    tooltip.style.left = `${event.clientX + 12}px`;
    tooltip.style.top = `${event.clientY + 12}px`;
  } else {
    tooltip.style.display = 'none';
  }
});

canvas.addEventListener('click', (event) => {
  const rect = canvas.getBoundingClientRect();
  store.clickAt(event.clientX - rect.left, event.clientY - rect.top);
});

canvas.addEventListener('wheel', (event) => {
  event.preventDefault();
  const rect = canvas.getBoundingClientRect();
  const factor = event.deltaY < 0 ? 1.2 : 1 / 1.2;
  store.setViewport(zoomAt(
    store.state.viewport, canvas.width, canvas.height,
    factor, event.clientX - rect.left, event.clientY - rect.top,
  ));
}, { passive: false });

let dragging = false;
let lastX = 0;
let lastY = 0;
canvas.addEventListener('mousedown', (event) => {
  dragging = true;
  lastX = event.clientX;
  lastY = event.clientY;
});
window.addEventListener('mouseup', () => { dragging = false; });
window.addEventListener('mousemove', (event) => {
  if (!dragging) return;
  store.setViewport(pan(store.state.viewport, event.clientX - lastX, event.clientY - lastY));
  lastX = event.clientX;
  lastY = event.clientY;
});

modeSelect.addEventListener('change', () => {
  store.setColorMode(modeSelect.value as ColorMode);
});

searchButton.addEventListener('click', () => {
  void store.searchText(queryInput.value);
});
queryInput.addEventListener('keydown', (event) => {
  if (event.key === 'Enter') void store.searchText(queryInput.value);
});

window.addEventListener('resize', () => { resize(); render(); });

resize();
void store.loadMap();
