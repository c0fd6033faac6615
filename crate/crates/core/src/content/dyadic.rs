use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{IfsSystem, PointCloud, Word};
use crate::linalg::Point;

/// Axis-aligned cube; its sup-norm diameter is `side`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverBox {
    pub corner: Point,
    pub side: f64,
}

/// Finite family of boxes covering a set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub boxes: Vec<CoverBox>,
}

impl Cover {
    pub fn from_sides(sides: &[f64]) -> Self {
        Cover {
            boxes: sides
                .iter()
                .map(|&side| CoverBox {
                    corner: vec![0.0],
                    side,
                })
                .collect(),
        }
    }

    /// `Σ |L|^s`.
    pub fn value(&self, s: f64) -> f64 {
        self.boxes.iter().map(|b| b.side.powf(s)).sum()
    }

    pub fn sides(&self) -> Vec<f64> {
        self.boxes.iter().map(|b| b.side).collect()
    }

    pub fn max_side(&self) -> f64 {
        self.boxes.iter().map(|b| b.side).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContentMethod {
    GridGreedy,
    CylinderCover,
}

/// Upper estimate of `H^s_∞` realized by an explicit cover.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContentEstimate {
    pub s: f64,
    pub value: f64,
    pub method: ContentMethod,
    /// Sup-norm diameter of the covered set.
    pub set_diameter: f64,
    pub scale_floor: f64,
    pub cover: Cover,
}

/// What to cover. Every input is first replaced by the union of the
/// `scale_floor` grid cells it meets.
#[derive(Debug, Clone, Copy)]
pub enum ContentInput<'a> {
    Points(&'a PointCloud),
    /// Sup-norm balls `(center, radius)`.
    Balls(&'a [(Point, f64)]),
}

pub fn hausdorff_content_upper(input: ContentInput<'_>, s: f64, scale_floor: f64) -> Result<ContentEstimate> {
    hausdorff_content_upper_shifted(input, s, scale_floor, 0.0)
}

/// As [`hausdorff_content_upper`], with the grid anchor moved by `shift`
/// cells along every axis.
pub fn hausdorff_content_upper_shifted(
    input: ContentInput<'_>,
    s: f64,
    scale_floor: f64,
    shift: f64,
) -> Result<ContentEstimate> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent s = {s} must be ≥ 0")));
    }
    if !(scale_floor > 0.0 && scale_floor.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale floor {scale_floor} must be > 0")));
    }
    let (d, cells, origin) = rasterize(input, scale_floor, shift)?;
    Ok(optimal_cover(d, &cells, &origin, scale_floor, s))
}

type Cell = Vec<i64>;

fn rasterize(input: ContentInput<'_>, h: f64, shift: f64) -> Result<(usize, Vec<Cell>, Point)> {
    let (d, lo) = match input {
        ContentInput::Points(cloud) => {
            if cloud.is_empty() {
                return Err(Error::EmptyInput);
            }
            let d = cloud.dim();
            let mut lo = vec![f64::INFINITY; d];
            for p in cloud.iter() {
                for (l, x) in lo.iter_mut().zip(p) {
                    *l = l.min(*x);
                }
            }
            (d, lo)
        }
        ContentInput::Balls(balls) => {
            if balls.is_empty() {
                return Err(Error::EmptyInput);
            }
            let d = balls[0].0.len();
            let mut lo = vec![f64::INFINITY; d];
            for (c, r) in balls {
                for (l, x) in lo.iter_mut().zip(c) {
                    *l = l.min(x - r);
                }
            }
            (d, lo)
        }
    };
    let origin: Point = lo.iter().map(|x| x - shift * h).collect();
    let idx = |x: f64, o: f64| ((x - o) / h).floor() as i64;
    let mut cells: Vec<Cell> = Vec::new();
    match input {
        ContentInput::Points(cloud) => {
            for p in cloud.iter() {
                cells.push(p.iter().zip(&origin).map(|(x, o)| idx(*x, *o)).collect());
            }
        }
        ContentInput::Balls(balls) => {
            for (c, r) in balls {
                let ranges: Vec<(i64, i64)> = c
                    .iter()
                    .zip(&origin)
                    .map(|(x, o)| (idx(x - r, *o), idx(x + r, *o)))
                    .collect();
                let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
                'cells: loop {
                    cells.push(cur.clone());
                    for (slot, (a, b)) in cur.iter_mut().zip(&ranges) {
                        if *slot < *b {
                            *slot += 1;
                            continue 'cells;
                        }
                        *slot = *a;
                    }
                    break;
                }
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    Ok((d, cells, origin))
}

/// Cheapest cover by dyadic boxes over the leaf cells, by the bottom-up
/// recursion `cost(Q) = min(|Q|^s, Σ cost(children))`, compared against one
/// box spanning the whole set.
pub(crate) fn optimal_cover(d: usize, cells: &[Cell], origin: &[f64], h: f64, s: f64) -> ContentEstimate {
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for c in cells {
        for i in 0..d {
            lo[i] = lo[i].min(c[i]);
            hi[i] = hi[i].max(c[i]);
        }
    }
    let span = (0..d).map(|i| hi[i] - lo[i] + 1).max().unwrap_or(1);
    let set_diameter = span as f64 * h;

    // levels[j]: node key -> (cost, take whole box)
    let mut levels: Vec<BTreeMap<Cell, (f64, bool)>> = Vec::new();
    let leaf = h.powf(s);
    levels.push(cells.iter().map(|c| (c.clone(), (leaf, true))).collect());
    while levels.last().expect("non-empty").len() > 1 {
        let j = levels.len();
        let side = h * (1u64 << j.min(62)) as f64;
        let own = side.powf(s);
        let mut next: BTreeMap<Cell, (f64, bool)> = BTreeMap::new();
        for (key, (cost, _)) in levels.last().expect("non-empty") {
            let parent: Cell = key.iter().map(|k| k.div_euclid(2)).collect();
            next.entry(parent).or_insert((0.0, false)).0 += cost;
        }
        for v in next.values_mut() {
            if own <= v.0 {
                *v = (own, true);
            }
        }
        levels.push(next);
    }
    let top = levels.len() - 1;
    let (root_key, (root_cost, _)) = levels[top].iter().next().map(|(k, v)| (k.clone(), *v)).expect("root");
    let whole = set_diameter.powf(s);

    let mut cover = Cover::default();
    let value = if whole <= root_cost {
        cover.boxes.push(CoverBox {
            corner: (0..d).map(|i| origin[i] + lo[i] as f64 * h).collect(),
            side: set_diameter,
        });
        whole
    } else {
        collect(&levels, top, &root_key, origin, h, &mut cover);
        cover.value(s)
    };
    ContentEstimate {
        s,
        value: value.min(root_cost.min(whole)),
        method: ContentMethod::GridGreedy,
        set_diameter,
        scale_floor: h,
        cover,
    }
}

fn collect(levels: &[BTreeMap<Cell, (f64, bool)>], j: usize, key: &Cell, origin: &[f64], h: f64, cover: &mut Cover) {
    let (_, take) = levels[j][key];
    let side = h * (1u64 << j.min(62)) as f64;
    if take {
        cover.boxes.push(CoverBox {
            corner: key.iter().zip(origin).map(|(k, o)| o + *k as f64 * side).collect(),
            side,
        });
        return;
    }
    let d = key.len();
    for code in 0..(1usize << d) {
        let child: Cell = key
            .iter()
            .enumerate()
            .map(|(i, k)| 2 * k + ((code >> i) & 1) as i64)
            .collect();
        if levels[j - 1].contains_key(&child) {
            collect(levels, j - 1, &child, origin, h, cover);
        }
    }
}

/// Cover of the attractor by the level-`k` cylinders: `Σ_{|w|=k} |f_w(K)|^s`.
pub fn cylinder_cover_content(system: &IfsSystem, s: f64, k: usize) -> Result<ContentEstimate> {
    let budget = crate::numeric::word_budget();
    let count = crate::numeric::level_size(system.len(), k);
    if count > budget {
        return Err(Error::BudgetExceeded {
            budget,
            requested: count,
            depth_reached: 0,
            partial: Vec::new(),
        });
    }
    let mut cover = Cover::default();
    for w in Word::all_of_length(system.len(), k) {
        let g = system.cylinder(&w)?;
        cover.boxes.push(CoverBox {
            corner: g.anchor_image.iter().map(|x| x - 0.5 * g.diameter).collect(),
            side: g.diameter,
        });
    }
    let value = crate::numeric::compensated_sum(cover.boxes.iter().map(|b| b.side.powf(s)));
    Ok(ContentEstimate {
        s,
        value,
        method: ContentMethod::CylinderCover,
        set_diameter: system.attractor_diameter(),
        scale_floor: cover.boxes.iter().map(|b| b.side).fold(f64::INFINITY, f64::min),
        cover,
    })
}
