//! Axis-aligned boxes and the overlap measures built on them.
//!
//! Boxes are `(left, top, width, height)` in continuous pixel coordinates:
//! pixel `(i, j)` covers `[i, i+1) x [j, j+1)`. Boxes may lie partly or
//! entirely outside a frame.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        BBox { x, y, w, h }
    }

    pub fn from_center(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        BBox::new(cx - w / 2.0, cy - h / 2.0, w, h)
    }

    pub fn is_valid(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.w.is_finite()
            && self.h.is_finite()
            && self.w > 0.0
            && self.h > 0.0
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Self {
        BBox::new(self.x + dx, self.y + dy, self.w, self.h)
    }

    pub fn scale(&self, s: f64) -> Self {
        BBox::new(self.x * s, self.y * s, self.w * s, self.h * s)
    }

    /// Overlap area; edges that merely touch give zero.
    pub fn intersection_area(&self, other: &BBox) -> f64 {
        let iw = self.right().min(other.right()) - self.x.max(other.x);
        let ih = self.bottom().min(other.bottom()) - self.y.max(other.y);
        if iw <= 0.0 || ih <= 0.0 {
            0.0
        } else {
            iw * ih
        }
    }

    /// Smallest box containing both.
    pub fn enclosing(&self, other: &BBox) -> BBox {
        let x = self.x.min(other.x);
        let y = self.y.min(other.y);
        BBox::new(
            x,
            y,
            self.right().max(other.right()) - x,
            self.bottom().max(other.bottom()) - y,
        )
    }

    /// Intersection with the `[0, width) x [0, height)` frame rectangle.
    pub fn clip_to(&self, width: f64, height: f64) -> Option<BBox> {
        let x0 = self.x.max(0.0);
        let y0 = self.y.max(0.0);
        let x1 = self.right().min(width);
        let y1 = self.bottom().min(height);
        (x1 > x0 && y1 > y0).then(|| BBox::new(x0, y0, x1 - x0, y1 - y0))
    }
}

/// Area measured from the corners, so it agrees exactly with
/// [`BBox::intersection_area`] when two boxes coincide.
fn corner_area(b: &BBox) -> f64 {
    (b.right() - b.x) * (b.bottom() - b.y)
}

pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter <= 0.0 {
        return 0.0;
    }
    let union = corner_area(a) + corner_area(b) - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Generalized IoU: `IoU - (|C| - |A ∪ B|) / |C|` with `C` the enclosing box.
pub fn giou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    let union = corner_area(a) + corner_area(b) - inter;
    let hull = (a.right().max(b.right()) - a.x.min(b.x)) * (a.bottom().max(b.bottom()) - a.y.min(b.y));
    let iou = if inter > 0.0 { inter / union } else { 0.0 };
    (iou - (hull - union) / hull).clamp(-1.0, 1.0)
}

pub fn center_error(a: &BBox, b: &BBox) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    (ax - bx).hypot(ay - by)
}
