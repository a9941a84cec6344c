/** Tiny DOM builders; textContent everywhere, no innerHTML with user data. */

type Child = Node | string;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Child[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === 'class') node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function clear(node: HTMLElement): void {
  node.textContent = '';
}

/** A table cell whose text is a value served verbatim by the API. */
export function scoreCell(value: number | string | boolean): HTMLTableCellElement {
  return el('td', { class: 'score', 'data-score': '' }, [String(value)]);
}
