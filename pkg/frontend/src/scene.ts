// Renders the versioned 3D scene JSON the service exports. The scene
// already carries node coordinates (ring layout, reliability on z); this
// module only rotates and projects them, it never recomputes layout or
// any agreement value.

import type { Scene3d } from "./types.js";

export const SCENE_VERSION = 1;

export interface ViewAngles {
  yaw: number;
  pitch: number;
}

export const DEFAULT_VIEW: ViewAngles = { yaw: 0.6, pitch: 0.45 };

// Same diverging scale the service uses for its own SVG exports.
const LOW = [0x21, 0x66, 0xac];
const MID = [0xf7, 0xf7, 0xf7];
const HIGH = [0xb2, 0x18, 0x2b];

export function agreementColor(value: number): string {
  const v = Math.max(-1, Math.min(1, value));
  const [a, b, t] = v < 0 ? [LOW, MID, v + 1] : [MID, HIGH, v];
  const channel = (k: number) => Math.round(a[k] + (b[k] - a[k]) * t);
  const hex = (n: number) => n.toString(16).padStart(2, "0");
  return `#${hex(channel(0))}${hex(channel(1))}${hex(channel(2))}`;
}

interface Projected {
  name: string;
  px: number;
  py: number;
  depth: number;
  reliability: number;
  intra: number | null;
}

export function projectNodes(
  scene: Scene3d,
  view: ViewAngles,
  size = 420,
): Projected[] {
  if (scene.version !== SCENE_VERSION) {
    throw new Error(
      `unsupported scene version ${scene.version}, expected ${SCENE_VERSION}`,
    );
  }
  const cy = Math.cos(view.yaw);
  const sy = Math.sin(view.yaw);
  const cp = Math.cos(view.pitch);
  const sp = Math.sin(view.pitch);
  const half = size / 2;
  const scale = size * 0.34;

  return scene.nodes.map((node) => {
    // Yaw about the z axis, then pitch about the x axis.
    const x1 = node.x * cy - node.y * sy;
    const y1 = node.x * sy + node.y * cy;
    const y2 = y1 * cp - node.z * sp;
    const z2 = y1 * sp + node.z * cp;
    return {
      name: node.id,
      px: half + x1 * scale,
      py: half - z2 * scale,
      depth: y2,
      reliability: node.reliability,
      intra: node.intra,
    };
  });
}

export function renderSceneSvg(
  scene: Scene3d,
  view: ViewAngles,
  size = 420,
): string {
  const projected = projectNodes(scene, view, size);
  const byName = new Map(projected.map((p) => [p.name, p]));

  const edges = scene.edges
    .map((edge) => {
      const a = byName.get(edge.a);
      const b = byName.get(edge.b);
      if (!a || !b) {
        return "";
      }
      const color = agreementColor(edge.agreement);
      const title = `${edge.a} / ${edge.b}: ${edge.agreement.toFixed(2)} (n=${edge.overlap})`;
      return (
        `<line x1="${a.px.toFixed(1)}" y1="${a.py.toFixed(1)}" ` +
        `x2="${b.px.toFixed(1)}" y2="${b.py.toFixed(1)}" ` +
        `stroke="${color}" stroke-width="2.5"><title>${title}</title></line>`
      );
    })
    .join("");

  // Far nodes first so near ones paint on top.
  const nodes = [...projected]
    .sort((a, b) => b.depth - a.depth)
    .map((p) => {
      const r = 9 + 5 * Math.max(0, -p.depth);
      const intra = p.intra === null ? "no re-pass" : `intra ${p.intra.toFixed(2)}`;
      const title = `${p.name}: reliability ${p.reliability.toFixed(3)}, ${intra}`;
      return (
        `<g class="scene-node" data-name="${p.name}">` +
        `<circle cx="${p.px.toFixed(1)}" cy="${p.py.toFixed(1)}" r="${r.toFixed(1)}" ` +
        `fill="#f0b429" stroke="#444444" stroke-width="1.5">` +
        `<title>${title}</title></circle>` +
        `<text x="${p.px.toFixed(1)}" y="${(p.py - r - 4).toFixed(1)}" ` +
        `text-anchor="middle" font-size="11">${p.name}</text></g>`
      );
    })
    .join("");

  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${size} ${size}" ` +
    `width="${size}" height="${size}" data-scene-version="${scene.version}">` +
    `<rect width="${size}" height="${size}" fill="#fcfcfc"/>` +
    edges +
    nodes +
    `</svg>`
  );
}
