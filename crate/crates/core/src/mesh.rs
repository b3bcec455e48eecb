//! Closed triangle surfaces in R³: ingestion, topological validation and
//! the measure-theoretic primitives (area, enclosed volume, center of mass).

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{Point3, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::sum::{pairwise_sum, pairwise_sum_by, pairwise_sum_vec3};

/// Faces smaller than this fraction of the mean face area count as degenerate.
pub const DEGENERATE_AREA_FRACTION: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("face {face} references vertex {index}, but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        face: usize,
        index: i64,
        vertex_count: usize,
    },
    #[error("unknown mesh format for {0:?} (expected .off or .obj)")]
    UnknownFormat(String),
    #[error("mesh has no faces")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self, MeshError> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        match ext.as_deref() {
            Some("off") => Ok(MeshFormat::Off),
            Some("obj") => Ok(MeshFormat::Obj),
            _ => Err(MeshError::UnknownFormat(path.display().to_string())),
        }
    }
}

/// An immutable triangle mesh with derived vertex adjacency.
///
/// Faces are vertex-index triples, counterclockwise when seen from outside.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
    vertex_faces: Vec<Vec<usize>>,
    one_ring: Vec<Vec<usize>>,
}

impl Mesh {
    /// Builds adjacency. Only index bounds are checked here; call
    /// [`Mesh::validate`] for the topological properties.
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if faces.is_empty() {
            return Err(MeshError::Empty);
        }
        let nv = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&bad) = f.iter().find(|&&i| i >= nv) {
                return Err(MeshError::IndexOutOfRange {
                    face: fi,
                    index: bad as i64,
                    vertex_count: nv,
                });
            }
        }
        let mut vertex_faces = vec![Vec::new(); nv];
        let mut one_ring = vec![Vec::new(); nv];
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let a = f[k];
                vertex_faces[a].push(fi);
                for &b in &[f[(k + 1) % 3], f[(k + 2) % 3]] {
                    if b != a {
                        one_ring[a].push(b);
                    }
                }
            }
        }
        for ring in &mut one_ring {
            ring.sort_unstable();
            ring.dedup();
        }
        Ok(Mesh {
            vertices,
            faces,
            vertex_faces,
            one_ring,
        })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    /// Sorted, deduplicated direct neighbours of `v`.
    pub fn one_ring(&self, v: usize) -> &[usize] {
        &self.one_ring[v]
    }

    /// Vertices within `depth` edge hops of `v`, excluding `v`, in BFS order.
    pub fn k_ring(&self, v: usize, depth: usize) -> Vec<usize> {
        let mut dist: HashMap<usize, usize> = HashMap::new();
        dist.insert(v, 0);
        let mut queue = VecDeque::from([v]);
        let mut out = Vec::new();
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            if d == depth {
                continue;
            }
            for &w in &self.one_ring[u] {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(d + 1);
                    out.push(w);
                    queue.push_back(w);
                }
            }
        }
        out
    }

    pub fn face_points(&self, f: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// (b − a) × (c − a); twice the area times the unit normal.
    pub fn face_cross(&self, f: usize) -> Vector3<f64> {
        let [a, b, c] = self.face_points(f);
        (b - a).cross(&(c - a))
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_cross(f).norm()
    }

    pub fn face_areas(&self) -> Vec<f64> {
        (0..self.faces.len()).map(|f| self.face_area(f)).collect()
    }

    /// Barycentric lumped vertex areas: one third of each incident face.
    /// They partition the total area exactly (up to round-off).
    pub fn vertex_areas(&self) -> Vec<f64> {
        let face_areas = self.face_areas();
        self.vertex_faces
            .iter()
            .map(|fs| {
                let mut incident: Vec<f64> = fs.iter().map(|&f| face_areas[f] / 3.0).collect();
                incident.sort_by(f64::total_cmp);
                pairwise_sum(&incident)
            })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.undirected_edge_faces().len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    fn undirected_edge_faces(&self) -> HashMap<(usize, usize), usize> {
        let mut edges = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        edges
    }

    pub fn validate(&self) -> ValidationReport {
        let edges = self.undirected_edge_faces();
        let boundary_or_nonmanifold_edges = edges.values().filter(|&&c| c != 2).count();

        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                *directed.entry((f[k], f[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        let inconsistent_edges = directed.values().filter(|&&c| c > 1).count();

        let components = self.face_components();
        let unreferenced_vertices = self.vertex_faces.iter().filter(|f| f.is_empty()).count();

        let areas = self.face_areas();
        let total = pairwise_sum(&areas);
        let min_face_area = areas.iter().copied().fold(f64::INFINITY, f64::min);
        let degenerate_threshold = DEGENERATE_AREA_FRACTION * total / self.faces.len() as f64;
        let degenerate_faces = areas
            .iter()
            .filter(|&&a| !(a >= degenerate_threshold) || a == 0.0)
            .count();

        ValidationReport {
            closed: boundary_or_nonmanifold_edges == 0,
            oriented: inconsistent_edges == 0,
            connected: components == 1 && unreferenced_vertices == 0,
            non_degenerate: degenerate_faces == 0,
            min_face_area,
            boundary_or_nonmanifold_edges,
            inconsistent_edges,
            components,
            unreferenced_vertices,
            degenerate_faces,
        }
    }

    fn face_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.faces.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                if let Some(&other) = edge_owner.get(&key) {
                    let (ra, rb) = (find(&mut parent, fi), find(&mut parent, other));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                } else {
                    edge_owner.insert(key, fi);
                }
            }
        }
        (0..self.faces.len()).filter(|&f| find(&mut parent, f) == f).count()
    }

    pub fn measures(&self) -> MeshMeasures {
        let idx: Vec<usize> = (0..self.faces.len()).collect();
        let area = pairwise_sum_by(&idx, &|&f| self.face_area(f));
        let weighted = pairwise_sum_vec3(&idx, &|&f| {
            let [a, b, c] = self.face_points(f);
            let centroid = (a.coords + b.coords + c.coords) / 3.0;
            centroid * self.face_area(f)
        });
        let enclosed_volume = pairwise_sum_by(&idx, &|&f| {
            let [a, b, c] = self.face_points(f);
            a.coords.dot(&b.coords.cross(&c.coords)) / 6.0
        });
        MeshMeasures {
            area,
            barycenter: Point3::from(weighted / area),
            enclosed_volume,
        }
    }

    pub fn map_vertices(&self, f: impl Fn(&Point3<f64>) -> Point3<f64>) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(f).collect(),
            faces: self.faces.clone(),
            vertex_faces: self.vertex_faces.clone(),
            one_ring: self.one_ring.clone(),
        }
    }

    /// X → cX about the origin.
    pub fn scaled(&self, c: f64) -> Mesh {
        self.map_vertices(|p| Point3::from(p.coords * c))
    }

    pub fn translated(&self, t: Vector3<f64>) -> Mesh {
        self.map_vertices(|p| p + t)
    }

    /// Drops face `f` (keeps all vertices). Useful for building open meshes.
    pub fn without_face(&self, f: usize) -> Result<Mesh, MeshError> {
        let mut faces = self.faces.clone();
        faces.remove(f);
        Mesh::new(self.vertices.clone(), faces)
    }

    pub fn disjoint_union(&self, other: &Mesh) -> Mesh {
        let offset = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut faces = self.faces.clone();
        faces.extend(other.faces.iter().map(|f| f.map(|i| i + offset)));
        Mesh::new(vertices, faces).expect("indices are in range by construction")
    }

    pub fn to_off_string(&self) -> String {
        let mut s = String::new();
        writeln!(s, "OFF").unwrap();
        writeln!(s, "{} {} {}", self.vertex_count(), self.face_count(), self.edge_count()).unwrap();
        for v in &self.vertices {
            writeln!(s, "{:?} {:?} {:?}", v.x, v.y, v.z).unwrap();
        }
        for f in &self.faces {
            writeln!(s, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
        }
        s
    }

    pub fn to_obj_string(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            writeln!(s, "v {:?} {:?} {:?}", v.x, v.y, v.z).unwrap();
        }
        for f in &self.faces {
            writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), MeshError> {
        let text = match MeshFormat::from_path(path)? {
            MeshFormat::Off => self.to_off_string(),
            MeshFormat::Obj => self.to_obj_string(),
        };
        fs::write(path, text).map_err(|source| MeshError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Pass/fail for each topological precondition plus diagnostic counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub closed: bool,
    pub oriented: bool,
    pub connected: bool,
    pub non_degenerate: bool,
    pub min_face_area: f64,
    pub boundary_or_nonmanifold_edges: usize,
    pub inconsistent_edges: usize,
    pub components: usize,
    pub unreferenced_vertices: usize,
    pub degenerate_faces: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.closed && self.oriented && self.connected && self.non_degenerate
    }

    /// Names of the failed checks, in a fixed order.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.closed {
            out.push("closed");
        }
        if !self.oriented {
            out.push("oriented");
        }
        if !self.connected {
            out.push("connected");
        }
        if !self.non_degenerate {
            out.push("non_degenerate");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshMeasures {
    pub area: f64,
    pub barycenter: Point3<f64>,
    pub enclosed_volume: f64,
}

pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<Mesh, MeshError> {
    let text = fs::read_to_string(path).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })?;
    match format {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, MeshError> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("invalid number {tok:?}")))
}

/// Splits a polygon into a triangle fan.
fn fan(poly: &[usize]) -> impl Iterator<Item = [usize; 3]> + '_ {
    (1..poly.len() - 1).map(move |i| [poly[0], poly[i], poly[i + 1]])
}

/// ASCII OFF. Polygons with more than three corners are fan-triangulated.
pub fn parse_off(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut header_tokens = header.split_whitespace();
    if header_tokens.next() != Some("OFF") {
        return Err(parse_err(hl, "missing OFF header"));
    }
    let rest: Vec<&str> = header_tokens.collect();
    let (cl, counts): (usize, Vec<&str>) = if rest.is_empty() {
        let (cl, l) = lines.next().ok_or_else(|| parse_err(hl, "missing counts line"))?;
        (cl, l.split_whitespace().collect())
    } else {
        (hl, rest)
    };
    if counts.len() < 2 {
        return Err(parse_err(cl, "counts line needs V and F"));
    }
    let nv: usize = counts[0].parse().map_err(|_| parse_err(cl, "invalid vertex count"))?;
    let nf: usize = counts[1].parse().map_err(|_| parse_err(cl, "invalid face count"))?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(cl, "unexpected end of file in vertex list"))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() < 3 {
            return Err(parse_err(ln, "vertex line needs three coordinates"));
        }
        vertices.push(Point3::new(
            parse_f64(t[0], ln)?,
            parse_f64(t[1], ln)?,
            parse_f64(t[2], ln)?,
        ));
    }

    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(cl, "unexpected end of file in face list"))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        let k: usize = t
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(ln, "invalid face arity"))?;
        if k < 3 || t.len() < k + 1 {
            return Err(parse_err(ln, "face needs at least three indices"));
        }
        let mut poly = Vec::with_capacity(k);
        for tok in &t[1..=k] {
            let idx: i64 = tok
                .parse()
                .map_err(|_| parse_err(ln, format!("invalid index {tok:?}")))?;
            if idx < 0 || idx as usize >= nv {
                return Err(MeshError::IndexOutOfRange {
                    face: faces.len(),
                    index: idx,
                    vertex_count: nv,
                });
            }
            poly.push(idx as usize);
        }
        faces.extend(fan(&poly));
    }
    Mesh::new(vertices, faces)
}

/// ASCII OBJ: `v` and `f` records (1-based, `i/t/n` accepted, negative
/// indices count back from the latest vertex); everything else is ignored.
pub fn parse_obj(text: &str) -> Result<Mesh, MeshError> {
    let mut vertices = Vec::new();
    let mut raw_faces: Vec<(usize, Vec<i64>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let mut t = line.split_whitespace();
        match t.next() {
            Some("v") => {
                let c: Vec<&str> = t.collect();
                if c.len() < 3 {
                    return Err(parse_err(ln, "vertex record needs three coordinates"));
                }
                vertices.push(Point3::new(
                    parse_f64(c[0], ln)?,
                    parse_f64(c[1], ln)?,
                    parse_f64(c[2], ln)?,
                ));
            }
            Some("f") => {
                let mut poly = Vec::new();
                for tok in t {
                    let head = tok.split('/').next().unwrap_or("");
                    let idx: i64 = head
                        .parse()
                        .map_err(|_| parse_err(ln, format!("invalid index {tok:?}")))?;
                    poly.push(if idx < 0 { vertices.len() as i64 + 1 + idx } else { idx });
                }
                if poly.len() < 3 {
                    return Err(parse_err(ln, "face needs at least three indices"));
                }
                raw_faces.push((ln, poly));
            }
            _ => {}
        }
    }
    let nv = vertices.len();
    let mut faces = Vec::new();
    for (_, poly) in raw_faces {
        let mut zero_based = Vec::with_capacity(poly.len());
        for idx in poly {
            if idx < 1 || idx as usize > nv {
                return Err(MeshError::IndexOutOfRange {
                    face: faces.len(),
                    index: idx,
                    vertex_count: nv,
                });
            }
            zero_based.push(idx as usize - 1);
        }
        faces.extend(fan(&zero_based));
    }
    Mesh::new(vertices, faces)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub const TETRA_OFF: &str = "OFF\n4 4 6\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";

    pub fn tetrahedron() -> Mesh {
        parse_off(TETRA_OFF).unwrap()
    }

    pub fn torus(big: f64, small: f64, nu: usize, nv: usize) -> Mesh {
        let mut verts = Vec::new();
        for i in 0..nu {
            let u = 2.0 * std::f64::consts::PI * i as f64 / nu as f64;
            for j in 0..nv {
                let w = 2.0 * std::f64::consts::PI * j as f64 / nv as f64;
                let r = big + small * w.cos();
                verts.push(Point3::new(r * u.cos(), r * u.sin(), small * w.sin()));
            }
        }
        let idx = |i: usize, j: usize| (i % nu) * nv + (j % nv);
        let mut faces = Vec::new();
        for i in 0..nu {
            for j in 0..nv {
                faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        Mesh::new(verts, faces).unwrap()
    }
}
