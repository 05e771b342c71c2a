/** Small DOM helpers shared by the views. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

/**
 * Render a payload value exactly as received: numbers via String(), which
 * round-trips the parsed JSON value. The UI never reformats or rounds.
 */
export function verbatim(value: unknown): string {
  if (value === null || value === undefined) return "—";
  return String(value);
}

/**
 * Diverging color for a signed weight, anchored at zero and normalized by
 * the explanation's max |weight|: positive blue, negative red, zero neutral.
 */
export function weightColor(weight: number, maxAbs: number): string {
  if (maxAbs <= 0 || weight === 0) return "transparent";
  const alpha = Math.min(1, Math.abs(weight) / maxAbs);
  return weight > 0
    ? `rgba(44, 127, 184, ${alpha.toFixed(4)})`
    : `rgba(214, 69, 65, ${alpha.toFixed(4)})`;
}

export function clear(container: HTMLElement): void {
  while (container.firstChild) container.removeChild(container.firstChild);
}
