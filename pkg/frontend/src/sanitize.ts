/** SVG sanitizer: artifacts are inlined (not iframed) so their text nodes
 * stay searchable, which means stripping anything executable first. */

const BANNED_ELEMENTS = new Set(["script", "foreignobject", "iframe", "object", "embed"]);

export function sanitizeSvg(svgText: string): SVGSVGElement | null {
  const parsed = new DOMParser().parseFromString(svgText, "image/svg+xml");
  const root = parsed.documentElement;
  if (!root || root.nodeName.toLowerCase() !== "svg") return null;
  scrub(root);
  return root as unknown as SVGSVGElement;
}

function scrub(node: Element): void {
  for (const child of Array.from(node.children)) {
    if (BANNED_ELEMENTS.has(child.nodeName.toLowerCase())) {
      child.remove();
      continue;
    }
    scrub(child);
  }
  for (const attr of Array.from(node.attributes)) {
    const name = attr.name.toLowerCase();
    const value = attr.value.trim().toLowerCase();
    if (name.startsWith("on")) node.removeAttribute(attr.name);
    else if ((name === "href" || name === "xlink:href") && value.startsWith("javascript:")) {
      node.removeAttribute(attr.name);
    }
  }
}
