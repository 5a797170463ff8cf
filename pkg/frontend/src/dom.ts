/** Element construction without innerHTML, so text stays text. */

interface Attrs {
  class?: string;
  text?: string;
  title?: string;
  disabled?: boolean;
  type?: string;
  name?: string;
  value?: string;
  data?: Record<string, string>;
  style?: Record<string, string>;
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  children: Array<Node | string> = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (attrs.class !== undefined) node.className = attrs.class;
  if (attrs.text !== undefined) node.textContent = attrs.text;
  if (attrs.title !== undefined) node.title = attrs.title;
  if (attrs.type !== undefined) (node as HTMLInputElement).type = attrs.type;
  if (attrs.name !== undefined) (node as HTMLInputElement).name = attrs.name;
  if (attrs.value !== undefined) (node as HTMLInputElement).value = attrs.value;
  if (attrs.disabled) (node as HTMLButtonElement).disabled = true;
  if (attrs.data) {
    for (const [key, value] of Object.entries(attrs.data)) {
      node.dataset[key] = value;
    }
  }
  if (attrs.style) {
    for (const [prop, value] of Object.entries(attrs.style)) {
      node.style.setProperty(prop, value);
    }
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}
