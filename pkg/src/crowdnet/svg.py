"""Static SVG rendering of a run: both walls, one path per agent, the target path."""
from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from .geometry import Corridor

WIDTH = 900
MARGIN = 20


def _points(xy, to_px) -> str:
    return " ".join(f"{'M' if i == 0 else 'L'}{px:.3f},{py:.3f}"
                    for i, (px, py) in enumerate(to_px(np.asarray(xy, dtype=float))))


def trajectory_svg(corridor: Corridor, agent_paths: np.ndarray, target_path: np.ndarray,
                   wall_samples: int = 200) -> str:
    """``agent_paths`` has shape (frames, N, 2); ``target_path`` has shape (frames, 2)."""
    lo, hi = corridor.x_domain
    xs = np.linspace(lo, hi, wall_samples)
    upper = np.column_stack([xs, corridor.upper(xs)])
    lower = np.column_stack([xs, corridor.lower(xs)])
    y_min, y_max = float(lower[:, 1].min()), float(upper[:, 1].max())
    scale = (WIDTH - 2 * MARGIN) / (hi - lo)
    height = int(round((y_max - y_min) * scale)) + 2 * MARGIN

    def to_px(p):
        p = p.reshape(-1, 2)
        return np.column_stack([MARGIN + (p[:, 0] - lo) * scale,
                                height - MARGIN - (p[:, 1] - y_min) * scale])

    root = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(WIDTH),
                      height=str(height), viewBox=f"0 0 {WIDTH} {height}")
    walls = ET.SubElement(root, "g", id="walls", fill="none", stroke="black")
    for name, pts in (("upper", upper), ("lower", lower)):
        ET.SubElement(walls, "path", {"class": "wall", "id": f"wall-{name}",
                                      "d": _points(pts, to_px)})
    agents = ET.SubElement(root, "g", id="agents", fill="none", stroke="steelblue")
    agents.set("stroke-width", "0.8")
    for k in range(agent_paths.shape[1]):
        ET.SubElement(agents, "path", {"class": "agent", "id": f"agent-{k}",
                                       "d": _points(agent_paths[:, k, :], to_px)})
    ET.SubElement(root, "path", {"class": "target", "id": "target", "fill": "none",
                                 "stroke": "crimson", "stroke-dasharray": "4 2",
                                 "d": _points(target_path, to_px)})
    return ET.tostring(root, encoding="unicode") + "\n"
